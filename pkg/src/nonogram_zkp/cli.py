"""Command-line front end.

Exit codes: 0 accept/pass, 1 reject/fail/finding, 2 usage or input error,
3 puzzle too large for the brute-force oracle.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import __version__
from .cards import DEFAULT_SEED
from .nonogram import (
    MAX_ORACLE_CELLS,
    B,
    W,
    DimensionError,
    OracleSizeError,
    PuzzleError,
    check_solution,
    format_grid,
    parse_grid,
    parse_puzzle,
    puzzle_from_grid,
    serialize_puzzle,
    solve_brute_force,
)
from .protocol import LEAKS, expected_card_count, expected_shuffle_count, prove
from .zk import DEFAULT_ALPHA, DEFAULT_TRIALS, compare_distributions, real_source, sim_source

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_TOO_LARGE = 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _load_puzzle(path: str):
    return parse_puzzle(_read(path))


def _load_grid(path: str):
    return parse_grid(_read(path))


def _load_pair(args):
    puzzle = _load_puzzle(args.puzzle)
    grid = _load_grid(args.grid)
    if len(grid) != puzzle.m or any(len(row) != puzzle.n for row in grid):
        raise DimensionError(f"grid is {len(grid)}x{len(grid[0])}, puzzle is {puzzle.m}x{puzzle.n}")
    return puzzle, grid


def cmd_solve(args) -> int:
    solutions = solve_brute_force(_load_puzzle(args.puzzle))
    for i, grid in enumerate(solutions):
        if i:
            print()
        sys.stdout.write(format_grid(grid))
    print(f"solutions {len(solutions)}")
    return EXIT_OK


def cmd_check(args) -> int:
    puzzle, grid = _load_pair(args)
    ok = check_solution(puzzle, grid)
    print("VALID" if ok else "INVALID")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_prove(args) -> int:
    puzzle, grid = _load_pair(args)
    result = prove(puzzle, grid, seed=args.seed)
    out = [f"seed {args.seed}"]
    if args.trace:
        out.extend(result.transcript.lines())
    out.append(f"verdict {result.verdict}")
    if not result.accepted:
        out.append(f"reason {result.reason} {result.detail}".rstrip())
    out.extend(result.ledger.summary())
    sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK if result.accepted else EXIT_FAIL


def cmd_resources(args) -> int:
    m, n, w = args.m, args.n, args.w
    if m < 1 or n < 1:
        raise InputError("m and n must be positive")
    if not 0 <= w <= m * n:
        raise InputError(f"w must lie in 0..{m * n}")
    print(f"cards {expected_card_count(m, n)}")
    print(f"shuffles {expected_shuffle_count(m, n, w)}")
    return EXIT_OK


def _solutions_for(args, puzzle):
    if args.grid:
        grid = _load_grid(args.grid)
        if not check_solution(puzzle, grid):
            raise InputError("the given grid does not solve the puzzle")
        return [grid]
    if puzzle.m * puzzle.n > MAX_ORACLE_CELLS:
        raise OracleSizeError(f"puzzle exceeds {MAX_ORACLE_CELLS} cells; pass --grid with a solution")
    return solve_brute_force(puzzle, limit=2)


def cmd_zk_test(args) -> int:
    puzzle = _load_puzzle(args.puzzle)
    solutions = _solutions_for(args, puzzle)
    if not solutions:
        raise InputError("puzzle has no solution; nothing to prove")
    exact = {"auto": None, "exact": True, "chi-square": False}[args.mode]
    header = f"seed {args.seed} trials {args.trials} alpha {args.alpha} mode {args.mode}"
    if args.leaky_variant:
        header += f" leak {args.leaky_variant}"
    print(header)
    first = solutions[0]
    checks = [("real vs simulator", real_source(puzzle, first, args.leaky_variant), sim_source(puzzle))]
    if len(solutions) > 1:
        checks.append(
            ("solution A vs solution B", real_source(puzzle, first, args.leaky_variant), real_source(puzzle, solutions[1]))
        )
    passed = True
    csv_parts = []
    for title, a, b in checks:
        report = compare_distributions(
            a, b, trials=args.trials, alpha=args.alpha, seed=args.seed, exact=exact, keep_bins=bool(args.csv)
        )
        sys.stdout.write(report.text(f"== {title}"))
        passed = passed and report.passed
        if args.csv and report.bins:
            csv_parts.append(f"# {title}\n" + report.bins_csv())
    if args.csv:
        Path(args.csv).write_text("".join(csv_parts), encoding="utf-8")
    print("zk-test PASS" if passed else "zk-test FAIL")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_soundness_search(args) -> int:
    from .soundness import MAX_SEARCH_CELLS, soundness_sweep

    if not 1 <= args.max_cells <= MAX_SEARCH_CELLS:
        raise InputError(f"--max-cells must lie in 1..{MAX_SEARCH_CELLS}")
    report = soundness_sweep(args.max_cells, include_malformed=not args.skip_malformed)
    sys.stdout.write(report.text())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_completeness(args) -> int:
    from .completeness import completeness_sweep

    print(f"seed range 0..{args.seeds - 1}")
    report = completeness_sweep(args.seeds, args.sample_seeds, args.max_side)
    sys.stdout.write(report.text())
    return EXIT_OK if report.accepted_all and not report.shuffle_mismatches else EXIT_FAIL


def cmd_gen(args) -> int:
    if args.m < 1 or args.n < 1:
        raise InputError("m and n must be positive")
    if not 0.0 <= args.density <= 1.0:
        raise InputError("--density must lie in [0, 1]")
    rnd = random.Random(args.seed)
    grid = tuple(
        tuple(B if rnd.random() < args.density else W for _ in range(args.n)) for _ in range(args.m)
    )
    sys.stdout.write(f"# seed {args.seed}\n" + serialize_puzzle(puzzle_from_grid(grid)))
    if args.grid_out:
        Path(args.grid_out).write_text(format_grid(grid), encoding="utf-8")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nonogram-zkp", description="Card-based zero-knowledge proof for Nonogram.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="list all solutions (small puzzles only)")
    p.add_argument("puzzle")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="check a grid against a puzzle")
    p.add_argument("puzzle")
    p.add_argument("grid")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("prove", help="run the protocol with an honest prover")
    p.add_argument("puzzle")
    p.add_argument("grid")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trace", action="store_true", help="print the verifier's transcript")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("resources", help="card and shuffle counts for an m x n puzzle with w white cells")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("w", type=int)
    p.set_defaults(func=cmd_resources)

    p = sub.add_parser("zk-test", help="compare real and simulated transcript distributions")
    p.add_argument("puzzle")
    p.add_argument("--grid", help="solution to use (required above the oracle size)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--mode", choices=("auto", "exact", "chi-square"), default="auto")
    p.add_argument("--csv", help="write per-bin counts to this file")
    p.add_argument("--leaky-variant", choices=LEAKS, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_zk_test)

    p = sub.add_parser("soundness-search", help="exhaustive cheating-prover search on small puzzles")
    p.add_argument("--max-cells", type=int, default=6)
    p.add_argument("--skip-malformed", action="store_true", help="only try well-formed wrong grids")
    p.set_defaults(func=cmd_soundness_search)

    p = sub.add_parser("completeness", help="honest runs over every small grid")
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--sample-seeds", type=int, default=100)
    p.add_argument("--max-side", type=int, default=4)
    p.set_defaults(func=cmd_completeness)

    p = sub.add_parser("gen", help="random grid and the puzzle it defines")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--grid-out", help="also write the generating grid here")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "trials", 1) < 1:
        print("error: --trials must be positive", file=sys.stderr)
        return EXIT_INPUT
    if not 0.0 < getattr(args, "alpha", 0.5) < 1.0:
        print("error: --alpha must lie in (0, 1)", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except OracleSizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except (PuzzleError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
