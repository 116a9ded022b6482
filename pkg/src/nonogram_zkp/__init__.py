"""Simulator for a card-based zero-knowledge proof of Nonogram solutions."""

from .cards import DEFAULT_SEED, RandomSource, Suit, Transcript
from .nonogram import Puzzle, check_solution, parse_grid, parse_puzzle, solve_brute_force
from .protocol import (
    HonestProver,
    RunResult,
    expected_card_count,
    expected_shuffle_count,
    prove,
    run_full_protocol,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_SEED",
    "HonestProver",
    "Puzzle",
    "RandomSource",
    "RunResult",
    "Suit",
    "Transcript",
    "check_solution",
    "expected_card_count",
    "expected_shuffle_count",
    "parse_grid",
    "parse_puzzle",
    "prove",
    "run_full_protocol",
    "solve_brute_force",
]
