"""Exhaustive search for a cheating prover that gets a wrong assignment accepted.

The prover controls two things: the secret pair it lays on each cell and the
secret index it feeds every chosen cut. It learns each shift from the marker
reveal, so its choices are expressed as logical indices into its own view of
the line; which physical shuffle outcome occurred then does not change what
any choice leads to. The search checks this by replaying every explored
strategy under three different shift vectors.

Lines share no cards and every line returns all of its cards to the supply,
so the table state at the start of a line does not depend on how earlier
lines were passed. The search therefore explores each line on its own from a
snapshot of the supply and memoizes repeated (line, cards, supply) inputs.
"""

from __future__ import annotations

import dataclasses
import itertools
import random
from collections import Counter
from dataclasses import dataclass, field

from .cards import CLUB, HEART, ForcedShifts, Suit, Supply, Table, TableCard
from .gadgets import Reject
from .nonogram import B, W, Grid, Puzzle, all_grids, check_solution, puzzle_from_grid
from .protocol import (
    HonestProver,
    LineContext,
    LineVerification,
    Prover,
    Role,
    line_contexts,
    formula_deck,
    run_full_protocol,
    setup_commitments,
    verify_all_formats,
)

ALL_PAIRS = ((CLUB, HEART), (HEART, CLUB), (CLUB, CLUB), (HEART, HEART))
MAX_LINE_LENGTH = 4
MAX_SEARCH_CELLS = 6


class SearchBoundExceeded(RuntimeError):
    pass


class _NeedChoice(Exception):
    def __init__(self, options: range):
        self.options = options


def _shift_modes() -> dict:
    noise = random.Random(20220701)
    vector = [noise.randrange(1 << 30) for _ in range(4096)]
    return {
        "zero": lambda i, k: 0,
        "last": lambda i, k: k - 1,
        "noise": lambda i, k: vector[i % len(vector)],
    }


SHIFT_MODES = _shift_modes()


@dataclass
class ProverStrategy:
    """Secret placement plus the logical index chosen at each chosen cut, per line."""

    placement: tuple
    selections: dict = field(default_factory=dict)


class ScriptedProver(Prover):
    """Plays a fixed placement and replays scripted choices line by line.

    Running past the end of the script raises ``_NeedChoice`` so the search
    can branch. With ``canonical`` set, Phase 2 removals are restricted to
    non-decreasing current positions (removal order cannot affect any later
    check, so one order per removed set suffices).
    """

    def __init__(self, placement, selections=None, canonical: bool = True):
        self._placement = placement
        self.selections = selections or {}
        self.canonical = canonical
        self._line = None
        self._used = 0
        self._last_removal = 0

    def placement(self, m, n):
        return self._placement

    def choose(self, phase, ctx, round_no, suits):
        key = (ctx.role.value, ctx.index)
        if key != self._line:
            self._line, self._used, self._last_removal = key, 0, 0
        script = self.selections.get(key, ())
        low = self._last_removal if (phase == "PHASE2" and self.canonical) else 0
        if self._used >= len(script):
            raise _NeedChoice(range(low, len(suits)))
        choice = script[self._used]
        self._used += 1
        if phase == "PHASE2":
            self._last_removal = choice
        return choice


def _line_cards(known) -> list[TableCard]:
    return [TableCard(s, False, -1 - i) for i, s in enumerate(known)]


def _run_line(ctx: LineContext, known, supply: Supply, path, mode: str, canonical: bool):
    """One isolated line run. Returns (outcome, supply_after); outcome is
    'ACCEPT', a rejection reason, or a ``range`` of options when the path is
    too short."""
    prover = ScriptedProver(None, {(ctx.role.value, ctx.index): tuple(path)}, canonical)
    table = Table(supply.copy(), ForcedShifts(SHIFT_MODES[mode], testing=True))
    try:
        LineVerification(table, ctx, _line_cards(known), known, prover).run()
    except _NeedChoice as need:
        return need.options, None
    except Reject as rej:
        return rej.reason, None
    return "ACCEPT", table.supply


@dataclass
class LineSearch:
    accepting: list
    leaves: int
    max_depth: int
    reasons: Counter
    supply_after: Supply | None


def _supply_key(supply: Supply) -> tuple:
    return tuple(supply.available[s] for s in Suit) + tuple(supply.shortfall[s] for s in Suit)


def search_line(
    ctx: LineContext,
    known,
    supply: Supply,
    canonical: bool = True,
    depth_bound: int | None = None,
    modes=("zero", "last", "noise"),
) -> LineSearch:
    """Depth-first search over every choice sequence for one line."""
    if depth_bound is None:
        depth_bound = len(ctx.clue) + ctx.removal_rounds
    primary, *others = modes
    result = LineSearch([], 0, 0, Counter(), None)
    stack = [()]
    while stack:
        path = stack.pop()
        if len(path) > depth_bound:
            raise SearchBoundExceeded(f"{ctx.role.value} {ctx.index + 1}: path deeper than {depth_bound}")
        outcome, after = _run_line(ctx, known, supply, path, primary, canonical)
        if isinstance(outcome, range):
            stack.extend(path + (c,) for c in reversed(outcome))
            continue
        result.leaves += 1
        result.max_depth = max(result.max_depth, len(path))
        for mode in others:
            again, _ = _run_line(ctx, known, supply, path, mode, canonical)
            if again != outcome:
                raise AssertionError(
                    f"outcome of {path} depends on the shuffle: {outcome} vs {again} ({mode})"
                )
        if outcome == "ACCEPT":
            if result.supply_after is not None and _supply_key(after) != _supply_key(result.supply_after):
                raise AssertionError("table state after a line depends on the prover's choices")
            result.supply_after = after
            result.accepting.append(path)
        else:
            result.reasons[outcome] += 1
    return result


@dataclass
class SearchOutcome:
    strategy: ProverStrategy | None
    reason: str | None
    leaves: int = 0
    max_depth: int = 0
    reasons: Counter = field(default_factory=Counter)


def _format_stage(placement, m: int, n: int):
    """Commit and format-check under every shift mode; returns (reason or None, supply)."""
    seen = set()
    supply_after = None
    for mode in SHIFT_MODES:
        table = Table(Supply(formula_deck(m, n), strict=False), ForcedShifts(SHIFT_MODES[mode], testing=True))
        try:
            verify_all_formats(table, setup_commitments(table, placement))
        except Reject as rej:
            seen.add(rej.reason)
        else:
            seen.add(None)
            supply_after = table.supply
    if len(seen) != 1:
        raise AssertionError(f"format stage outcome depends on the shuffle: {seen}")
    return seen.pop(), supply_after


class StrategySearcher:
    """Holds memo tables shared across many searches of the same sweep."""

    def __init__(self, canonical: bool = True):
        self.canonical = canonical
        self._line_memo: dict = {}
        self._format_memo: dict = {}

    def format_stage(self, placement, m, n):
        key = (m, n, placement)
        if key not in self._format_memo:
            self._format_memo[key] = _format_stage(placement, m, n)
        return self._format_memo[key]

    def line(self, ctx: LineContext, known, supply: Supply) -> LineSearch:
        # the line's position in the grid plays no part in its verification
        ctx = dataclasses.replace(ctx, index=0)
        key = (ctx, tuple(known), _supply_key(supply))
        if key not in self._line_memo:
            self._line_memo[key] = search_line(ctx, known, supply, self.canonical)
        return self._line_memo[key]

    def search(self, puzzle: Puzzle, placement) -> SearchOutcome:
        m, n = puzzle.m, puzzle.n
        if m * n > MAX_SEARCH_CELLS or max(m, n) > MAX_LINE_LENGTH:
            raise SearchBoundExceeded(
                f"{m}x{n} is outside the search bound ({MAX_SEARCH_CELLS} cells, lines of {MAX_LINE_LENGTH})"
            )
        placement = tuple(tuple(tuple(p) for p in row) for row in placement)
        reason, supply = self.format_stage(placement, m, n)
        outcome = SearchOutcome(None, reason, leaves=1, reasons=Counter())
        if reason is not None:
            outcome.reasons[reason] += 1
            return outcome
        # a format-valid placement: the table now holds fresh copies with the same suits
        selections = {}
        outcome.leaves = 0
        for ctx in line_contexts(puzzle):
            if ctx.role is Role.ROW:
                known = [pair[0] for pair in placement[ctx.index]]
            else:
                known = [row[ctx.index][1] for row in placement]
            found = self.line(ctx, known, supply)
            outcome.leaves += found.leaves
            outcome.max_depth += found.max_depth
            outcome.reasons.update(found.reasons)
            if not found.accepting:
                outcome.reason = "LINE"
                return outcome
            selections[(ctx.role.value, ctx.index)] = found.accepting[0]
            supply = found.supply_after
        strategy = ProverStrategy(placement, selections)
        for mode in SHIFT_MODES:
            replay = run_full_protocol(
                puzzle, ScriptedProver(placement, selections, self.canonical),
                ForcedShifts(SHIFT_MODES[mode], testing=True),
            )
            if not replay.accepted:
                raise AssertionError(f"line-wise accepting strategy rejected on full replay ({mode})")
        outcome.strategy = strategy
        outcome.reason = None
        return outcome


def honest_strategy(grid: Grid) -> ProverStrategy:
    """The strategy an honest prover plays, recorded from one run."""
    puzzle = puzzle_from_grid(grid)
    honest = HonestProver(grid)
    recorded: dict = {}

    class Recorder(Prover):
        def placement(self, m, n):
            return honest.placement(m, n)

        def choose(self, phase, ctx, round_no, suits):
            choice = honest.choose(phase, ctx, round_no, suits)
            recorded.setdefault((ctx.role.value, ctx.index), []).append(choice)
            return choice

    run_full_protocol(puzzle, Recorder())
    placement = tuple(tuple(row) for row in honest.placement(puzzle.m, puzzle.n))
    return ProverStrategy(placement, {k: tuple(v) for k, v in recorded.items()})


def search_accepting_strategy(puzzle: Puzzle, assignment, searcher: StrategySearcher | None = None):
    """Return an accepting strategy for ``assignment`` (a grid or a placement), or ``None``."""
    searcher = searcher or StrategySearcher()
    if assignment and isinstance(assignment[0][0], tuple):
        placement = assignment
    else:
        placement = HonestProver(assignment).placement(puzzle.m, puzzle.n)
    return searcher.search(puzzle, placement).strategy


def desk_shapes(max_cells: int):
    for m in range(1, MAX_LINE_LENGTH + 1):
        for n in range(1, MAX_LINE_LENGTH + 1):
            if m * n <= max_cells:
                yield m, n


@dataclass
class SoundnessReport:
    max_cells: int
    puzzles: int = 0
    wrong_assignments: int = 0
    malformed_placements: int = 0
    solutions_witnessed: int = 0
    strategies_examined: int = 0
    max_depth: int = 0
    reasons: Counter = field(default_factory=Counter)
    counterexamples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def text(self) -> str:
        lines = [
            f"soundness sweep max-cells {self.max_cells}",
            f"puzzles {self.puzzles}",
            f"wrong assignments {self.wrong_assignments}",
            f"malformed placements {self.malformed_placements}",
            f"solutions witnessed {self.solutions_witnessed}",
            f"strategies examined {self.strategies_examined}",
            f"max depth {self.max_depth}",
            "rejections " + " ".join(f"{k}={v}" for k, v in sorted(self.reasons.items())),
            f"counterexamples {len(self.counterexamples)}",
        ]
        for puzzle, strategy, transcript in self.counterexamples:
            lines.append("--- counterexample")
            lines.append("placement " + " ".join(
                "|".join(f"{a.name[0]}{b.name[0]}" for a, b in row) for row in strategy.placement
            ))
            lines.append(transcript.rstrip())
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines) + "\n"


def soundness_sweep(max_cells: int = MAX_SEARCH_CELLS, include_malformed: bool = True) -> SoundnessReport:
    """Every puzzle from every small grid, against every assignment that is not a solution."""
    if max_cells > MAX_SEARCH_CELLS:
        raise SearchBoundExceeded(f"max_cells is limited to {MAX_SEARCH_CELLS}")
    report = SoundnessReport(max_cells)
    searcher = StrategySearcher()
    for m, n in desk_shapes(max_cells):
        puzzles = {puzzle_from_grid(g) for g in all_grids(m, n)}
        placements = list(itertools.product(ALL_PAIRS, repeat=m * n))
        for puzzle in sorted(puzzles, key=repr):
            report.puzzles += 1
            for flat in placements:
                placement = tuple(flat[i * n:(i + 1) * n] for i in range(m))
                malformed = any(p[0] is p[1] for p in flat)
                if malformed and not include_malformed:
                    continue
                if not malformed:
                    grid = tuple(tuple(B if p == (CLUB, HEART) else W for p in row) for row in placement)
                    is_solution = check_solution(puzzle, grid)
                else:
                    is_solution = False
                outcome = searcher.search(puzzle, placement)
                report.strategies_examined += outcome.leaves
                report.max_depth = max(report.max_depth, outcome.max_depth)
                report.reasons.update(outcome.reasons)
                if is_solution:
                    if outcome.strategy is None:
                        raise AssertionError(f"no accepting strategy for a genuine solution of {puzzle}")
                    report.solutions_witnessed += 1
                    continue
                if malformed:
                    report.malformed_placements += 1
                else:
                    report.wrong_assignments += 1
                if outcome.strategy is not None:
                    replay = run_full_protocol(puzzle, ScriptedProver(placement, outcome.strategy.selections))
                    report.counterexamples.append((puzzle, outcome.strategy, replay.transcript.text()))
    return report
