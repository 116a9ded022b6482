"""Honest-prover sweep: every grid up to a size bound, many seeds each.

Every grid is the unique-or-not solution of the puzzle its own clues define,
so walking all grids covers every puzzle/solution pair at that size. Each run
also checks the shuffle count formula and records any deck shortfall.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .cards import RandomSource
from .nonogram import all_grids, count_white, sample_puzzle, sample_solution, format_grid, puzzle_from_grid
from .protocol import expected_shuffle_count, run_full_protocol

FULL_SEEDS = 1000
FULL_SAMPLE_SEEDS = 100
MAX_SIDE = 4


def sweep_shapes(max_side: int = MAX_SIDE):
    return [(m, n) for m in range(1, max_side + 1) for n in range(1, max_side + 1)]


def sweep_cases(max_side: int = MAX_SIDE):
    for m, n in sweep_shapes(max_side):
        for grid in all_grids(m, n):
            yield puzzle_from_grid(grid), grid


@dataclass
class CompletenessReport:
    seeds: int
    sample_seeds: int
    grids: int = 0
    runs: int = 0
    elapsed: float = 0.0
    rejections: list = field(default_factory=list)
    shuffle_mismatches: list = field(default_factory=list)
    short_deck: list = field(default_factory=list)

    @property
    def accepted_all(self) -> bool:
        return not self.rejections

    @property
    def seconds_per_run(self) -> float:
        return self.elapsed / max(self.runs, 1)

    def projected_full_seconds(self, grids: int, sample_cost: float = 10.0) -> float:
        """Estimated cost of the full workload; a 10x10 sample run is weighted as ``sample_cost`` small runs."""
        return self.seconds_per_run * (grids * FULL_SEEDS + FULL_SAMPLE_SEEDS * sample_cost)

    def text(self) -> str:
        lines = [
            f"grids {self.grids} seeds {self.seeds} sample seeds {self.sample_seeds}",
            f"runs {self.runs} elapsed {self.elapsed:.1f}s",
            f"rejections {len(self.rejections)}",
            f"shuffle count mismatches {len(self.shuffle_mismatches)}",
            f"grids with deck shortfall {len(self.short_deck)}",
        ]
        for label, seed, reason in self.rejections[:10]:
            lines.append(f"rejected {label} seed {seed}: {reason}")
        lines.append("PASS" if self.accepted_all and not self.shuffle_mismatches else "FAIL")
        return "\n".join(lines) + "\n"


def _check(report: CompletenessReport, puzzle, grid, label: str, seeds) -> None:
    expected = expected_shuffle_count(puzzle.m, puzzle.n, count_white(grid))
    short = False
    for seed in seeds:
        result = run_full_protocol(puzzle, grid, RandomSource(seed))
        report.runs += 1
        if not result.accepted:
            report.rejections.append((label, seed, f"{result.reason} {result.detail}"))
            continue
        if result.ledger.shuffles != expected:
            report.shuffle_mismatches.append((label, seed, result.ledger.shuffles, expected))
        short = short or not result.ledger.deck_sufficient
    if short:
        report.short_deck.append(label)


def completeness_sweep(
    seeds: int = FULL_SEEDS,
    sample_seeds: int = FULL_SAMPLE_SEEDS,
    max_side: int = MAX_SIDE,
) -> CompletenessReport:
    report = CompletenessReport(seeds, sample_seeds)
    start = time.perf_counter()
    for puzzle, grid in sweep_cases(max_side):
        report.grids += 1
        _check(report, puzzle, grid, format_grid(grid).strip().replace("\n", "/"), range(seeds))
    _check(report, sample_puzzle(), sample_solution(), "sample", range(sample_seeds))
    report.elapsed = time.perf_counter() - start
    return report
