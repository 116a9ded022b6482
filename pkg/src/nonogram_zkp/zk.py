"""Transcript simulator and real-vs-simulated distribution comparison.

The simulator sees only the puzzle. It reproduces the verifier's view:
uniform opened words for each format check, a uniform marker position for
each chosen cut, the reveal pattern fixed by the clue, and the final word of
each line at a uniform rotation.

Two comparison tiers: exact (every shuffle outcome enumerated, probabilities
as fractions) where the outcome tree is small, and per-slot chi-square
homogeneity tests with a Bonferroni bound otherwise.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from scipy import stats

from .cards import CLUB, DIAMOND, HEART, SPADE, RandomSource, ShiftPath, Transcript, enumerate_shift_paths, format_event
from .nonogram import Grid, Puzzle
from .protocol import LineContext, line_contexts, run_full_protocol

DEFAULT_TRIALS = 10_000
DEFAULT_ALPHA = 0.01
EXACT_LIMIT = 200_000
MIN_BIN = 10

Source = Callable[[RandomSource], Transcript]


def canonical(transcript: Transcript) -> tuple:
    """Verifier-observable projection. Events carry nothing else, so this is the event tuple."""
    return tuple(transcript.events)


# --- simulator ---------------------------------------------------------------


class _Sim:
    def __init__(self, rng: RandomSource):
        self.rng = rng
        self.t = Transcript()

    def emit(self, *event):
        self.t.append(event)

    def chosen_cut(self, k: int) -> int:
        self.emit("PLACE", k, True, ())
        self.emit("SHUFFLE", "PILE", k, ())
        p = self.rng.shift(k)
        for i in range(k):
            self.emit("REVEAL", i, CLUB if i == p else HEART)
        return p

    def format_check(self):
        self.emit("PLACE", 2, False, (CLUB, HEART))
        self.emit("SHUFFLE", "PILE", 2, ())
        flipped = self.rng.shift(2)
        first, second = (HEART, CLUB) if flipped else (CLUB, HEART)
        self.emit("REVEAL", 0, first)
        self.emit("REVEAL", 1, second)
        self.emit("ROTATE", flipped)

    def line(self, ctx: LineContext):
        black, white = ctx.black_suit, ctx.white_suit
        self.emit("PLACE", ctx.length, True, ())
        self.emit("PLACE", 3, False, (white, white, DIAMOND))
        k = ctx.length + 3
        for x in ctx.clue:
            p = self.chosen_cut(k)
            for t in range(x):
                self.emit("REVEAL", (p + t) % k, black)
            self.emit("REVEAL", (p - 1) % k, white)
            self.emit("REVEAL", (p + x) % k, white)
            for t in range(x):
                self.emit("REPLACE", (p + t) % k, SPADE)
        for _ in range(ctx.removal_rounds):
            p = self.chosen_cut(k)
            self.emit("REVEAL", p, white)
            self.emit("REMOVE", p)
            k -= 1
        self.emit("SHUFFLE", "CUT", k, ())
        r = self.rng.shift(k)
        word = ctx.expected_word()
        shown = word[k - r:] + word[:k - r]
        for i, suit in enumerate(shown):
            self.emit("REVEAL", i, suit)
        self.emit("ROTATE", (k - 1 - shown.index(DIAMOND)) % k)


def simulate_transcript(puzzle: Puzzle, rng: RandomSource) -> Transcript:
    """A transcript with the real protocol's distribution, built from the clues alone."""
    sim = _Sim(rng)
    for _ in range(puzzle.m * puzzle.n):
        sim.emit("PLACE", 2, True, ())
    for _ in range(puzzle.m * puzzle.n):
        sim.format_check()
    for ctx in line_contexts(puzzle):
        sim.line(ctx)
    sim.emit("VERDICT", True)
    return sim.t


def real_source(puzzle: Puzzle, grid: Grid, leak: str | None = None) -> Source:
    return lambda rng: run_full_protocol(puzzle, grid, rng, leak=leak).transcript


def sim_source(puzzle: Puzzle) -> Source:
    return lambda rng: simulate_transcript(puzzle, rng)


# --- exact tier ----------------------------------------------------------------


def outcome_tree_size(source: Source) -> int:
    """Number of leaves in the shuffle-outcome tree, assuming ranges do not depend on outcomes."""
    path = ShiftPath([])
    source(path)
    return math.prod(k for _, k in path.taken)


def exact_distribution(source: Source) -> dict[tuple, Fraction]:
    # leaves mostly share a denominator, so tally integer hits before building fractions
    hits: Counter = Counter()
    for prob, transcript in enumerate_shift_paths(source):
        hits[canonical(transcript), prob.denominator] += prob.numerator
    dist: dict[tuple, Fraction] = defaultdict(Fraction)
    for (key, denom), count in hits.items():
        dist[key] += Fraction(count, denom)
    if sum(dist.values()) != 1:
        raise AssertionError("outcome probabilities do not sum to one")
    return dict(dist)


# --- statistical tier ----------------------------------------------------------


def trial_seed(seed: int, label: int, i: int) -> int:
    return (seed << 40) + (label << 32) + i


class SlotCounts:
    """Per-event-position value counts over many transcripts."""

    def __init__(self):
        self.slots: list[Counter] = []
        self.lengths = Counter()
        self.trials = 0

    def add(self, transcript: Transcript) -> None:
        events = transcript.events
        slots = self.slots
        if len(slots) < len(events):
            slots.extend(Counter() for _ in range(len(events) - len(slots)))
        for slot, event in zip(slots, events):
            slot[event] += 1
        self.lengths[len(events)] += 1
        self.trials += 1


def collect(source: Source, trials: int, seed: int, label: int) -> SlotCounts:
    counts = SlotCounts()
    for i in range(trials):
        counts.add(source(RandomSource(trial_seed(seed, label, i))))
    return counts


@dataclass
class Divergence:
    slot: str
    p_value: float
    detail: str


@dataclass
class ComparisonReport:
    mode: str
    alpha: float
    trials: int
    seed: int | None
    tested: int = 0
    divergences: list = field(default_factory=list)
    bins: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.divergences

    def text(self, title: str = "") -> str:
        lines = []
        if title:
            lines.append(title)
        lines.append(f"mode {self.mode}")
        if self.mode == "chi-square":
            lines.append(f"trials {self.trials} alpha {self.alpha} seed {self.seed}")
            lines.append(f"slots tested {self.tested} bonferroni threshold {self.alpha / max(self.tested, 1):.3g}")
        else:
            lines.append(f"transcripts in support {self.tested}")
        for d in self.divergences[:20]:
            lines.append(f"divergent {d.slot} p={d.p_value:.3g} {d.detail}")
        if len(self.divergences) > 20:
            lines.append(f"... {len(self.divergences) - 20} more divergent bins")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines) + "\n"

    def bins_csv(self) -> str:
        rows = ["slot,value,count_a,count_b"]
        for slot, value, a, b in self.bins:
            rows.append(f"{slot},{value},{a},{b}")
        return "\n".join(rows) + "\n"


def _merge_rare(a: Counter, b: Counter) -> tuple[list, list, list]:
    keys = sorted(set(a) | set(b), key=repr)
    labels, row_a, row_b = [], [], []
    other_a = other_b = 0
    for key in keys:
        if a[key] + b[key] < MIN_BIN:
            other_a += a[key]
            other_b += b[key]
        else:
            labels.append(key)
            row_a.append(a[key])
            row_b.append(b[key])
    if other_a + other_b:
        labels.append("OTHER")
        row_a.append(other_a)
        row_b.append(other_b)
    return labels, row_a, row_b


def _label(value) -> str:
    return value if isinstance(value, str) else format_event(value) if isinstance(value, tuple) else str(value)


def chi_square_homogeneity(a: SlotCounts, b: SlotCounts, alpha: float, keep_bins: bool = False) -> ComparisonReport:
    report = ComparisonReport("chi-square", alpha, a.trials, None)
    tests = []
    pairs = [("length", a.lengths, b.lengths)]
    width = max(len(a.slots), len(b.slots))
    for j in range(width):
        ca = a.slots[j] if j < len(a.slots) else Counter()
        cb = b.slots[j] if j < len(b.slots) else Counter()
        pairs.append((f"event {j}", ca, cb))
    for name, ca, cb in pairs:
        labels, row_a, row_b = _merge_rare(ca, cb)
        if keep_bins:
            report.bins.extend(
                (name, _label(lab).replace(",", ";"), x, y) for lab, x, y in zip(labels, row_a, row_b)
            )
        # columns present in only one sample would make the table degenerate for scipy
        if len(labels) < 2:
            continue
        if sum(row_a) == 0 or sum(row_b) == 0:
            tests.append((name, 0.0, "present in only one source"))
            continue
        _, p, _, _ = stats.chi2_contingency([row_a, row_b], correction=False)
        worst = max(range(len(labels)), key=lambda i: abs(row_a[i] - row_b[i]))
        tests.append((name, p, f"{_label(labels[worst])}: {row_a[worst]} vs {row_b[worst]}"))
    report.tested = len(tests)
    threshold = alpha / max(len(tests), 1)
    report.divergences = [Divergence(n, p, d) for n, p, d in tests if p < threshold]
    return report


def compare_exact(dist_a: dict, dist_b: dict) -> ComparisonReport:
    report = ComparisonReport("exact", 0.0, 0, None)
    keys = set(dist_a) | set(dist_b)
    report.tested = len(keys)
    for key in sorted(keys, key=repr):
        pa, pb = dist_a.get(key, Fraction(0)), dist_b.get(key, Fraction(0))
        if pa != pb:
            first = next(
                (format_event(e) for e in key if e[0] == "SHUFFLE" and e[3]), format_event(key[-1])
            )
            report.divergences.append(Divergence("transcript", 0.0, f"P={pa} vs {pb} ({first} ...)"))
    return report


def compare_distributions(
    source_a: Source,
    source_b: Source,
    trials: int = DEFAULT_TRIALS,
    alpha: float = DEFAULT_ALPHA,
    seed: int = 0,
    exact: bool | None = None,
    keep_bins: bool = False,
) -> ComparisonReport:
    """Exact comparison when both outcome trees are small enough, chi-square otherwise."""
    if exact is None:
        exact = max(outcome_tree_size(source_a), outcome_tree_size(source_b)) <= EXACT_LIMIT
    if exact:
        return compare_exact(exact_distribution(source_a), exact_distribution(source_b))
    a = collect(source_a, trials, seed, 0)
    b = collect(source_b, trials, seed, 1)
    report = chi_square_homogeneity(a, b, alpha, keep_bins)
    report.seed = seed
    return report


# --- pooled uniformity -----------------------------------------------------------


def stage_samples(transcript: Transcript) -> tuple[list, list]:
    """Marker positions ``(size, pos)`` of every chosen cut and the first suit of every format check."""
    markers, formats = [], []
    ev = transcript.events
    for i in range(len(ev) - 2):
        e, nxt = ev[i], ev[i + 1]
        if e[0] != "PLACE" or nxt[0] != "SHUFFLE" or nxt[1] != "PILE":
            continue
        if e[2]:
            k = e[1]
            shown = [x[2] for x in ev[i + 2:i + 2 + k]]
            if shown.count(CLUB) == 1:
                markers.append((k, shown.index(CLUB)))
        elif e[3] == (CLUB, HEART):
            formats.append(ev[i + 2][2])
    return markers, formats


@dataclass
class UniformityReport:
    alpha: float
    markers: dict = field(default_factory=dict)
    formats: Counter = field(default_factory=Counter)
    p_values: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        threshold = self.alpha / max(len(self.p_values), 1)
        return all(p >= threshold for p in self.p_values.values())

    def text(self) -> str:
        lines = [f"{name} p={p:.3g}" for name, p in sorted(self.p_values.items())]
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines) + "\n"


def uniformity(source: Source, trials: int, alpha: float = DEFAULT_ALPHA, seed: int = 0) -> UniformityReport:
    """Goodness-of-fit for marker positions (per sequence size) and format-check openings."""
    report = UniformityReport(alpha)
    by_size: dict[int, Counter] = defaultdict(Counter)
    for i in range(trials):
        markers, formats = stage_samples(source(RandomSource(trial_seed(seed, 2, i))))
        for k, pos in markers:
            by_size[k][pos] += 1
        report.formats.update(formats)
    for k, counts in sorted(by_size.items()):
        observed = [counts[p] for p in range(k)]
        report.p_values[f"marker size {k}"] = stats.chisquare(observed).pvalue
    report.markers = dict(by_size)
    if report.formats:
        report.p_values["format opening"] = stats.chisquare([report.formats[CLUB], report.formats[HEART]]).pvalue
    return report
