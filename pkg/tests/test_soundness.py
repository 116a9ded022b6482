import itertools

import pytest

from nonogram_zkp.cards import CLUB, HEART, Suit, Supply
from nonogram_zkp.nonogram import B, W, sample_puzzle, make_grid, parse_grid, parse_puzzle, puzzle_from_grid
from nonogram_zkp.protocol import LineContext, run_full_protocol
from nonogram_zkp.soundness import (
    ALL_PAIRS,
    ScriptedProver,
    SearchBoundExceeded,
    StrategySearcher,
    honest_strategy,
    search_accepting_strategy,
    search_line,
    soundness_sweep,
)


def test_honest_strategy_one_by_one():
    s = honest_strategy(((B,),))
    assert s.placement == (((CLUB, HEART),),)
    assert s.selections == {("ROW", 0): (1,), ("COLUMN", 0): (1,)}


def test_honest_strategy_replays():
    grid = parse_grid("#.#\n.#.")
    s = honest_strategy(grid)
    puzzle = puzzle_from_grid(grid)
    assert run_full_protocol(puzzle, ScriptedProver(s.placement, s.selections)).accepted


def test_honest_strategy_on_invalid_grid_rejected():
    puzzle = parse_puzzle("1 2\n1\n1\n0\n")
    result = run_full_protocol(puzzle, ((W, B),))
    assert not result.accepted
    assert result.reason in {"PHASE1", "PHASE2", "PHASE3"}


def test_no_strategy_for_white_one_by_one():
    puzzle = parse_puzzle("1 1\n1\n1\n")
    assert search_accepting_strategy(puzzle, ((W,),)) is None
    assert search_accepting_strategy(puzzle, ((B,),)) is not None


def test_no_strategy_for_overfull_row():
    puzzle = parse_puzzle("1 2\n1\n1\n0\n")
    assert search_accepting_strategy(puzzle, ((B, B),)) is None


def test_malformed_placements_one_by_one():
    puzzle = parse_puzzle("1 1\n1\n1\n")
    for pair in ALL_PAIRS:
        found = search_accepting_strategy(puzzle, (((pair),),))
        assert (found is not None) == (pair == (CLUB, HEART))


def test_search_bound():
    with pytest.raises(SearchBoundExceeded):
        search_accepting_strategy(sample_puzzle(), make_grid([[W] * 10] * 10))
    with pytest.raises(SearchBoundExceeded):
        soundness_sweep(7)


def test_depth_bound_is_an_error():
    ctx = LineContext.row(0, 3, (1,))
    supply = Supply({s: 20 for s in Suit})
    with pytest.raises(SearchBoundExceeded):
        search_line(ctx, [HEART, CLUB, HEART], supply, depth_bound=1)


def test_canonical_phase2_order_loses_nothing():
    # restricting removals to non-decreasing positions finds an accepting path
    # exactly when the unrestricted search does
    supply = Supply({s: 20 for s in Suit})
    for length in range(1, 5):
        clues = {tuple(len(list(g)) for k, g in itertools.groupby(cells) if k)
                 for cells in itertools.product((True, False), repeat=length)}
        for clue in clues:
            ctx = LineContext.row(0, length, clue)
            for known in itertools.product((CLUB, HEART), repeat=length):
                fast = search_line(ctx, list(known), supply, canonical=True)
                full = search_line(ctx, list(known), supply, canonical=False, modes=("zero",))
                assert bool(fast.accepting) == bool(full.accepting), (clue, known)
                assert set(fast.reasons) <= set(full.reasons) | {"ACCEPT"}


@pytest.mark.parametrize("max_cells", [1, 2, 4])
def test_small_sweeps(max_cells):
    report = soundness_sweep(max_cells)
    assert report.passed
    assert report.solutions_witnessed > 0
    assert set(report.reasons) <= {"FORMAT", "PHASE1", "PHASE2", "PHASE3"}
    assert report.text().rstrip().endswith("PASS")


def test_sweep_counts_one_by_one():
    report = soundness_sweep(1)
    # puzzles (1)/(1) and 0/0, one wrong assignment each, two malformed placements each
    assert report.puzzles == 2
    assert report.wrong_assignments == 2
    assert report.malformed_placements == 4
