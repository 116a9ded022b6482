"""Nonogram instances, clue derivation, checking and a brute-force oracle solver."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_ORACLE_CELLS = 25


class Color(enum.Enum):
    BLACK = "#"
    WHITE = "."

    def __str__(self) -> str:
        return self.value


B = Color.BLACK
W = Color.WHITE

Clue = tuple  # tuple[int, ...]; empty tuple for a line with no black cells
Grid = tuple  # tuple[tuple[Color, ...], ...], row-major


class PuzzleError(ValueError):
    """Base class for puzzle/grid input problems."""


class PuzzleFormatError(PuzzleError):
    pass


class InfeasibleClueError(PuzzleError):
    pass


class ClueSumMismatchError(PuzzleError):
    pass


class DimensionError(PuzzleError):
    pass


class OracleSizeError(PuzzleError):
    pass


def clue_is_feasible(clue: Sequence[int], length: int) -> bool:
    if any(x < 1 for x in clue):
        return False
    return not clue or sum(clue) + len(clue) - 1 <= length


@dataclass(frozen=True)
class Puzzle:
    m: int
    n: int
    row_clues: tuple
    col_clues: tuple

    def __post_init__(self):
        object.__setattr__(self, "row_clues", tuple(tuple(c) for c in self.row_clues))
        object.__setattr__(self, "col_clues", tuple(tuple(c) for c in self.col_clues))
        if self.m < 1 or self.n < 1:
            raise PuzzleFormatError(f"grid size must be positive, got {self.m}x{self.n}")
        if len(self.row_clues) != self.m or len(self.col_clues) != self.n:
            raise PuzzleFormatError(
                f"expected {self.m} row clues and {self.n} column clues, "
                f"got {len(self.row_clues)} and {len(self.col_clues)}"
            )
        for i, clue in enumerate(self.row_clues):
            if not clue_is_feasible(clue, self.n):
                raise InfeasibleClueError(f"row {i + 1} clue {clue} does not fit in {self.n} cells")
        for j, clue in enumerate(self.col_clues):
            if not clue_is_feasible(clue, self.m):
                raise InfeasibleClueError(f"column {j + 1} clue {clue} does not fit in {self.m} cells")
        rows_total = sum(map(sum, self.row_clues))
        cols_total = sum(map(sum, self.col_clues))
        if rows_total != cols_total:
            raise ClueSumMismatchError(
                f"row clues count {rows_total} black cells but column clues count {cols_total}"
            )

    @property
    def black_cells(self) -> int:
        return sum(map(sum, self.row_clues))

    @property
    def white_cells(self) -> int:
        return self.m * self.n - self.black_cells


def make_grid(rows: Iterable[Iterable[Color]]) -> Grid:
    grid = tuple(tuple(row) for row in rows)
    if not grid or any(len(row) != len(grid[0]) for row in grid) or not grid[0]:
        raise DimensionError("grid must be a non-empty rectangle")
    return grid


def grid_columns(grid: Grid) -> list[tuple]:
    return [tuple(col) for col in zip(*grid)]


def count_white(grid: Grid) -> int:
    return sum(cell is W for row in grid for cell in row)


def derive_line_clue(line: Iterable[Color]) -> Clue:
    """Lengths of the maximal black runs of ``line``, left to right."""
    return tuple(
        sum(1 for _ in run) for color, run in itertools.groupby(line) if color is B
    )


def puzzle_from_grid(grid: Grid) -> Puzzle:
    return Puzzle(
        m=len(grid),
        n=len(grid[0]),
        row_clues=tuple(derive_line_clue(row) for row in grid),
        col_clues=tuple(derive_line_clue(col) for col in grid_columns(grid)),
    )


def check_solution(puzzle: Puzzle, grid: Grid) -> bool:
    if len(grid) != puzzle.m or any(len(row) != puzzle.n for row in grid):
        raise DimensionError(
            f"grid is {len(grid)}x{len(grid[0]) if grid else 0}, puzzle is {puzzle.m}x{puzzle.n}"
        )
    if any(derive_line_clue(row) != clue for row, clue in zip(grid, puzzle.row_clues)):
        return False
    return all(
        derive_line_clue(col) == clue for col, clue in zip(grid_columns(grid), puzzle.col_clues)
    )


def all_grids(m: int, n: int):
    """Every m x n grid, in row-major lexicographic order (BLACK before WHITE)."""
    for cells in itertools.product((B, W), repeat=m * n):
        yield tuple(cells[i * n:(i + 1) * n] for i in range(m))


def solve_brute_force(puzzle: Puzzle, limit: int | None = None) -> list[Grid]:
    """All solutions by full enumeration. Guarded to ``MAX_ORACLE_CELLS`` cells."""
    if puzzle.m * puzzle.n > MAX_ORACLE_CELLS:
        raise OracleSizeError(
            f"{puzzle.m}x{puzzle.n} has {puzzle.m * puzzle.n} cells; "
            f"the brute-force oracle handles at most {MAX_ORACLE_CELLS}"
        )
    found = []
    for grid in all_grids(puzzle.m, puzzle.n):
        if check_solution(puzzle, grid):
            found.append(grid)
            if limit is not None and len(found) >= limit:
                break
    return found


# --- text formats -------------------------------------------------------


def _clue_text(clue: Clue) -> str:
    return " ".join(map(str, clue)) if clue else "0"


def serialize_puzzle(puzzle: Puzzle) -> str:
    lines = [f"{puzzle.m} {puzzle.n}"]
    lines += [_clue_text(c) for c in puzzle.row_clues]
    lines += [_clue_text(c) for c in puzzle.col_clues]
    return "\n".join(lines) + "\n"


def _ints(line: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise PuzzleFormatError(f"line {lineno}: expected integers, got {line!r}") from None


def parse_puzzle(text: str) -> Puzzle:
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise PuzzleFormatError("empty puzzle file")
    lineno, header = lines[0]
    dims = _ints(header, lineno)
    if len(dims) != 2 or min(dims) < 1:
        raise PuzzleFormatError(f"line {lineno}: header must be 'm n' with m, n >= 1")
    m, n = dims
    body = lines[1:]
    if len(body) != m + n:
        raise PuzzleFormatError(f"expected {m + n} clue lines after the header, found {len(body)}")
    clues = []
    for lineno, line in body:
        values = _ints(line, lineno)
        if values == [0]:
            clues.append(())
        elif not values or any(v < 1 for v in values):
            raise PuzzleFormatError(f"line {lineno}: clue entries must be positive (or a lone 0)")
        else:
            clues.append(tuple(values))
    return Puzzle(m, n, tuple(clues[:m]), tuple(clues[m:]))


def format_grid(grid: Grid) -> str:
    return "\n".join("".join(c.value for c in row) for row in grid) + "\n"


def parse_grid(text: str) -> Grid:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            rows.append(tuple(Color(ch) for ch in line))
        except ValueError:
            raise PuzzleFormatError(f"grid line {lineno}: only '#' and '.' are allowed") from None
    return make_grid(rows)


SAMPLE_TEXT = """\
10 10
3 2
2 4 2
2 2 1
3 2 1
3 1
4 3
2 1
3 1
3
3 2
5 3
5 3
7
1 2
2
4
4
1 1 1
2 1 1
7
"""

SAMPLE_SOLUTION_TEXT = """\
....###.##
##.####.##
##...##..#
###..##..#
###......#
####...###
..##.....#
###....#..
###.......
###....##.
"""


def sample_puzzle() -> Puzzle:
    """The 10x10 example instance used throughout as a reference workload."""
    return parse_puzzle(SAMPLE_TEXT)


def sample_solution() -> Grid:
    return parse_grid(SAMPLE_SOLUTION_TEXT)
