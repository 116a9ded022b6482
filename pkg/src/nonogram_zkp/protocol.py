"""The full Nonogram proof: commit, format-check, then three phases per row and column."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .cards import (
    CLUB,
    DIAMOND,
    HEART,
    SPADE,
    ProtocolError,
    RandomSource,
    Suit,
    Supply,
    Table,
    TableCard,
    TableSequence,
    Transcript,
)
from .gadgets import Commitment, Reject, chosen_cut, commit, encode, verify_format
from .nonogram import Grid, Puzzle

LEAK_LATE_TURN_DOWN = "late-turn-down"
LEAK_NO_SHUFFLE = "no-shuffle"
LEAKS = (LEAK_LATE_TURN_DOWN, LEAK_NO_SHUFFLE)


class Role(enum.Enum):
    ROW = "ROW"
    COLUMN = "COLUMN"


@dataclass(frozen=True)
class LineContext:
    role: Role
    index: int
    length: int
    clue: tuple
    black_suit: Suit
    white_suit: Suit

    @classmethod
    def row(cls, index: int, length: int, clue) -> "LineContext":
        return cls(Role.ROW, index, length, tuple(clue), CLUB, HEART)

    @classmethod
    def column(cls, index: int, length: int, clue) -> "LineContext":
        # the right card of a commitment is the one used for columns: HEART marks black
        return cls(Role.COLUMN, index, length, tuple(clue), HEART, CLUB)

    @property
    def removal_rounds(self) -> int:
        return self.length - sum(self.clue) - len(self.clue) + 1

    def expected_word(self) -> list[Suit]:
        word = [self.white_suit]
        for x in self.clue:
            word += [SPADE] * x + [self.white_suit]
        return word + [DIAMOND]


# --- resources -------------------------------------------------------------


def expected_card_count(m: int, n: int) -> int:
    return 2 * m * n + 2 * max(m, n) + 6


def expected_shuffle_count(m: int, n: int, w: int) -> int:
    return m * n + 2 * m + 2 * n + 2 * w


def formula_deck(m: int, n: int) -> dict[Suit, int]:
    big = max(m, n)
    return {CLUB: m * n + 1, HEART: m * n + big + 4, SPADE: big, DIAMOND: 1}


@dataclass
class ResourceLedger:
    m: int
    n: int
    deck: dict
    shuffles: int = 0
    shortfall: Counter = field(default_factory=Counter)
    low_water: Counter = field(default_factory=Counter)

    @property
    def cards(self) -> int:
        return sum(self.deck.values())

    @property
    def deck_sufficient(self) -> bool:
        return not any(self.shortfall.values())

    def summary(self) -> list[str]:
        lines = [
            f"cards {self.cards}",
            "deck " + " ".join(f"{s.name}={self.deck[s]}" for s in Suit),
            f"shuffles {self.shuffles}",
        ]
        if not self.deck_sufficient:
            lines.append(
                "deck shortfall "
                + " ".join(f"{s.name}={self.shortfall[s]}" for s in Suit if self.shortfall[s])
            )
        return lines


# --- provers ---------------------------------------------------------------


class Prover:
    """Decides the secret placement and every chosen-cut selection.

    ``choose`` receives the prover's own view of the line in logical order
    (starting from the first end card, removed cards dropped) and returns a
    logical index. The prover always knows these suits: it placed them.
    """

    def placement(self, m: int, n: int) -> list[list[tuple[Suit, Suit]]]:
        raise NotImplementedError

    def choose(self, phase: str, ctx: LineContext, round_no: int, suits: list[Suit]) -> int:
        raise NotImplementedError


def _runs(suits: Sequence[Suit], target: Suit):
    """(start, length) of maximal runs of ``target``."""
    start = None
    for i, s in enumerate(suits):
        if s is target:
            if start is None:
                start = i
        elif start is not None:
            yield start, i - start
            start = None
    if start is not None:
        yield start, len(suits) - start


class HonestProver(Prover):
    def __init__(self, grid: Grid):
        self.grid = grid

    def placement(self, m, n):
        return [[encode(cell) for cell in row] for row in self.grid]

    def choose(self, phase, ctx, round_no, suits):
        if phase == "PHASE1":
            # earlier blocks are spades by now, so the leftmost club run is the next block
            for start, _ in _runs(suits, ctx.black_suit):
                return start
            return 0
        for start, length in _runs(suits, ctx.white_suit):
            if length >= 2:
                return start
        return 0


class ProverLineState:
    """The prover's belief about where each of its line cards sits on the table.

    Updated from public information only: the marker position revealed by each
    chosen cut, combined with the secret index the prover itself chose.
    """

    def __init__(self, seq: TableSequence, known: Sequence[Suit]):
        self.order = [c.uid for c in seq.cards]
        self.logical = list(self.order)
        self.known = dict(zip(self.order, known))

    def logical_suits(self) -> list[Suit]:
        return [self.known[u] for u in self.logical]

    def secret_index(self, logical_index: int) -> int:
        return self.order.index(self.logical[logical_index])

    def learn_shift(self, secret_index: int, public_pos: int) -> None:
        k = len(self.order)
        r = (public_pos - secret_index) % k
        if r:
            self.order[:] = self.order[k - r:] + self.order[:k - r]

    def replaced(self, old_uid: int, new_uid: int, suit: Suit) -> None:
        self.order[self.order.index(old_uid)] = new_uid
        self.logical[self.logical.index(old_uid)] = new_uid
        del self.known[old_uid]
        self.known[new_uid] = suit

    def removed(self, pos: int) -> None:
        uid = self.order.pop(pos)
        self.logical.remove(uid)

    def check(self, seq: TableSequence) -> None:
        if self.order != [c.uid for c in seq.cards]:
            raise AssertionError("prover alignment diverged from the table")


# --- one line ---------------------------------------------------------------


class LineVerification:
    """Runs the three phases for a single row or column."""

    def __init__(
        self,
        table: Table,
        ctx: LineContext,
        cells: Sequence[TableCard],
        known: Sequence[Suit],
        prover: Prover,
        leak: str | None = None,
    ):
        self.table = table
        self.ctx = ctx
        self.prover = prover
        self.leak = leak
        self._turn_down_pending = False
        self.seq = self.build_line_sequence(cells)
        w = ctx.white_suit
        self.state = ProverLineState(self.seq, [w, *known, w, DIAMOND])

    def build_line_sequence(self, cells: Sequence[TableCard]) -> TableSequence:
        table, w = self.table, self.ctx.white_suit
        table.announce_place(len(cells))
        ends = table.place((w, w, DIAMOND), face_down=False)
        table.turn_all_face_down(ends)
        first, last, marker = ends.cards
        return TableSequence([first, *cells, last, marker])

    def _select(self, phase: str, round_no: int) -> int:
        state = self.state
        logical = self.prover.choose(phase, self.ctx, round_no, state.logical_suits())
        if not 0 <= logical < len(state.logical):
            raise ProtocolError(f"prover chose logical index {logical} of {len(state.logical)}")
        secret = state.secret_index(logical)
        pos = chosen_cut(self.table, self.seq, secret, late_turn_down=self._turn_down_pending)
        self._turn_down_pending = False
        state.learn_shift(secret, pos)
        state.check(self.seq)
        return pos

    def _expect(self, pos: int, suit: Suit, reason: str) -> None:
        got = self.table.reveal(self.seq, pos)
        if got is not suit:
            raise Reject(f"{self.ctx.role.value} {self.ctx.index + 1}: expected {suit.name}, saw {got.name}", reason)

    def phase1_count_blocks(self) -> None:
        table, seq, ctx = self.table, self.seq, self.ctx
        for i, x in enumerate(ctx.clue):
            p = self._select("PHASE1", i)
            for t in range(x):
                self._expect(p + t, ctx.black_suit, "PHASE1")
            self._expect(p - 1, ctx.white_suit, "PHASE1")
            self._expect(p + x, ctx.white_suit, "PHASE1")
            for t in range(x):
                j = seq.index(p + t)
                old = seq.cards[j].uid
                table.replace_with_supply(seq, j, SPADE)
                self.state.replaced(old, seq.cards[j].uid, SPADE)
            if self.leak == LEAK_LATE_TURN_DOWN:
                self._turn_down_pending = True
            else:
                table.turn_all_face_down(seq)

    def phase2_remove_whites(self) -> None:
        for i in range(self.ctx.removal_rounds):
            p = self._select("PHASE2", i)
            self._expect(p, self.ctx.white_suit, "PHASE2")
            self.table.remove_card(self.seq, p)
            self.state.removed(p)

    def phase3_verify_order(self) -> None:
        table, seq, ctx = self.table, self.seq, self.ctx
        table.random_cut(seq)
        if self._turn_down_pending:
            table.turn_all_face_down(seq)
            self._turn_down_pending = False
        word = [table.reveal(seq, i) for i in range(len(seq))]
        if word.count(DIAMOND) != 1:
            raise Reject(f"{ctx.role.value} {ctx.index + 1}: marker card missing", "PHASE3")
        table.rotate_public(seq, len(seq) - 1 - word.index(DIAMOND))
        if seq.hidden_suits() != ctx.expected_word():
            raise Reject(f"{ctx.role.value} {ctx.index + 1}: final arrangement does not match the clue", "PHASE3")

    def run(self) -> None:
        self.phase1_count_blocks()
        self.phase2_remove_whites()
        self.phase3_verify_order()
        self.table.collect(self.seq.cards)


# --- whole protocol ------------------------------------------------------------


def setup_commitments(table: Table, placement) -> list[list[Commitment]]:
    return [[commit(table, pair) for pair in row] for row in placement]


def verify_all_formats(table: Table, commitments) -> list[list[Commitment]]:
    return [[verify_format(table, c) for c in row] for row in commitments]


def line_contexts(puzzle: Puzzle) -> list[LineContext]:
    rows = [LineContext.row(i, puzzle.n, c) for i, c in enumerate(puzzle.row_clues)]
    cols = [LineContext.column(j, puzzle.m, c) for j, c in enumerate(puzzle.col_clues)]
    return rows + cols


@dataclass
class RunResult:
    accepted: bool
    transcript: Transcript
    ledger: ResourceLedger
    reason: str | None = None
    detail: str = ""
    failed_at: int | None = None

    @property
    def verdict(self) -> str:
        return "ACCEPT" if self.accepted else "REJECT"


def run_full_protocol(
    puzzle: Puzzle,
    prover: Prover | Grid,
    rng: RandomSource | None = None,
    *,
    strict_supply: bool = False,
    leak: str | None = None,
) -> RunResult:
    """Run commit, format checks and all line verifications; stop at the first rejection.

    Uses exactly the card deck the count formula predicts. With
    ``strict_supply`` an empty suit raises :class:`SupplyError`; otherwise
    missing cards are borrowed and reported in the ledger's ``shortfall``.
    """
    if not isinstance(prover, Prover):
        prover = HonestProver(prover)
    if leak is not None and leak not in LEAKS:
        raise ValueError(f"unknown leak variant {leak!r}")
    m, n = puzzle.m, puzzle.n
    deck = formula_deck(m, n)
    supply = Supply(deck, strict=strict_supply)
    table = Table(supply, rng if rng is not None else RandomSource())
    table.rig_piles = leak == LEAK_NO_SHUFFLE
    ledger = ResourceLedger(m, n, dict(deck))

    placement = prover.placement(m, n)
    if len(placement) != m or any(len(row) != n for row in placement):
        raise ValueError(f"prover placement is not {m}x{n}")
    result = RunResult(False, table.transcript, ledger)
    try:
        commitments = verify_all_formats(table, setup_commitments(table, placement))
        for ctx in line_contexts(puzzle):
            if ctx.role is Role.ROW:
                cells = [c.pair.cards[0] for c in commitments[ctx.index]]
                known = [pair[0] for pair in placement[ctx.index]]
            else:
                cells = [row[ctx.index].pair.cards[1] for row in commitments]
                known = [row[ctx.index][1] for row in placement]
            LineVerification(table, ctx, cells, known, prover, leak).run()
    except Reject as exc:
        result.reason = exc.reason
        result.detail = str(exc)
        result.failed_at = len(table.transcript) - 1
    else:
        result.accepted = True
        total = table.supply.total()
        if total != ledger.cards + sum(supply.shortfall.values()):
            raise AssertionError("card conservation violated")
    table.verdict(result.accepted)
    ledger.shuffles = table.shuffles
    ledger.shortfall = Counter(supply.shortfall)
    ledger.low_water = Counter(supply.low_water)
    return result


def prove(puzzle: Puzzle, grid: Grid, seed: int | None = None, **kwargs) -> RunResult:
    rng = RandomSource(seed) if seed is not None else RandomSource()
    return run_full_protocol(puzzle, grid, rng, **kwargs)
