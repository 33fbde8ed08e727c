"""Benchmark / regression runner over a file of curves.

    hypersieve-bench [CORPUS] [-h H] [-p M] [-N N] [-n n] [-F D] [-S [S]] [-s] [-z] [-o OUT]

A corpus has one curve per line, whitespace-separated coefficients with the
constant term first; '#' starts a comment.  Every curve is searched with the
same parameters and the points are written to OUT, each curve preceded by a
header line.  Timing goes to stdout only, so OUT is reproducible.
"""

from __future__ import annotations

import sys
import time
from importlib import resources
from pathlib import Path
from typing import TextIO

from .api import find_points_clear, find_points_init, find_points_work
from .cli import DEFAULT_FORMAT, PointFormatter, UsageError, parse_coefficients, parse_options
from .params import SearchArgs

__all__ = ["DEFAULT_HEIGHT", "bundled_corpus", "load_corpus", "main", "run_corpus"]

DEFAULT_HEIGHT = 16383
DEFAULT_OUTPUT = "hypersieve-bench.out"


def bundled_corpus(name: str = "genus2") -> Path:
    """Path of a corpus shipped with the package ('genus2' or 'cubic')."""
    path = resources.files("hypersieve") / "data" / f"{name}.txt"
    return Path(str(path))


def load_corpus(path) -> list[list[int]]:
    curves = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                curves.append(parse_coefficients(line))
    return curves


def run_corpus(argv: list[str], stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    corpus_path: str | None = None
    out_path = DEFAULT_OUTPUT
    rest: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "-o" and i + 1 < len(argv):
            out_path = argv[i + 1]
            i += 2
        elif i == 0 and not tok.startswith("-"):
            corpus_path = tok
            i += 1
        else:
            rest.append(tok)
            i += 1
    try:
        toggles, counts, strings, intervals, sturm = parse_options(rest, {"-h": "height"})
        extra = set(toggles) - {"suppress_points"} | set(strings)
        if extra or intervals or "b_low" in counts or "b_high" in counts:
            raise UsageError("only -h -p -N -n -F -S -s -z -o are accepted")
    except UsageError as e:
        stderr.write(f"error: {e}\n")
        return 1
    path = corpus_path if corpus_path is not None else bundled_corpus()
    try:
        curves = load_corpus(path)
    except OSError as e:
        stderr.write(f"error: cannot read corpus: {e}\n")
        return 1
    except UsageError as e:
        stderr.write(f"error: bad corpus line: {e}\n")
        return 1

    height = counts.get("height", DEFAULT_HEIGHT)
    quiet_points = toggles.get("suppress_points", False)
    total = 0
    start = time.perf_counter()
    session = find_points_init(SearchArgs([0, 1], height))
    try:
        with open(out_path, "w", encoding="utf-8", newline="\n") as out:
            for k, coeffs in enumerate(curves, 1):
                args = SearchArgs(
                    coefficients=coeffs,
                    height=height,
                    sp1=counts.get("sp1", -1),
                    sp2=counts.get("sp2", -1),
                    num_primes=counts.get("num_primes", -1),
                    max_forbidden=counts.get("max_forbidden", -1),
                    sturm=sturm,
                )
                out.write(f"# curve {k}: {' '.join(map(str, coeffs))}\n")
                fmt = PointFormatter(out, DEFAULT_FORMAT)

                def on_point(x, z, y, ctx, quit_flag):
                    if not quiet_points:
                        fmt.emit(x, y, z)
                    return 1

                total += find_points_work(session, args, on_point)
    finally:
        find_points_clear(session)
    elapsed = time.perf_counter() - start
    stdout.write(f"{len(curves)} curves, {total} points, height {height}, {elapsed:.3f} s\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    return run_corpus(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
