from pathlib import Path

import pytest

from nonogram_zkp.nonogram import sample_puzzle, sample_solution, parse_grid, parse_puzzle

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def sample():
    return sample_puzzle(), sample_solution()


@pytest.fixture(scope="session")
def diagonals():
    """The 2x2 puzzle with clues (1),(1) / (1),(1): exactly two solutions."""
    puzzle = parse_puzzle("2 2\n1\n1\n1\n1\n")
    return puzzle, parse_grid("#.\n.#"), parse_grid(".#\n#.")
