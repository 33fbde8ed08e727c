"""Command line front end.

    hypersieve 'a0 a1 ... an' H [options]

searches y^2 = a_n x^n + ... + a_0 for points whose x-coordinate has
numerator and denominator bounded by H.  Options may come in any order
after the two positionals; for opposing options the last one wins.
Format markers in ``-f`` strings are %x, %y and %z.

Exit status: 0 on success, 1 usage error, 2 bad arguments, 3 polynomial
not squarefree.
"""

from __future__ import annotations

import logging
import math
import re
import sys
import time
from dataclasses import dataclass, field
from typing import Iterable, TextIO

from .api import find_points
from .errors import BadArgsError, NonSquarefreeError
from .params import (
    DEFAULT_MAX_FORBIDDEN,
    DEFAULT_NUM_PRIMES,
    DEFAULT_SP1,
    DEFAULT_SP2,
    DEFAULT_STURM,
    MAX_DEGREE,
    Flags,
    SearchArgs,
)
from .sieveprep import clamp_counts, odd_primes_below

__all__ = [
    "OutputOptions",
    "PointFormatter",
    "UsageError",
    "compile_format",
    "decode_escapes",
    "format_points",
    "main",
    "parse_cli",
    "run_cli",
]

EXIT_OK, EXIT_USAGE, EXIT_BAD_ARGS, EXIT_NON_SQUAREFREE = 0, 1, 2, 3

USAGE = """\
usage: hypersieve 'a0 a1 ... an' H [options]
  -1            stop after the first point        -i / -I   no points at infinity
  -q            only print the points             -v        explain what is going on
  -z / -Z       do not print points               -y / -Y   only x-coordinates (x : z)
  -f FMT -fs S -fm S -fe S                        point format (markers %x %y %z)
  -dl D -du D   denominator range                 -l L -u U search intervals (in order)
  -p M -N N -n n -F D                             sieve parameters
  -S [S] / -s   Sturm refinement depth / skip     -k / -K   no polynomial reversal
  -j / -J       no Jacobi test on denominators    -x / -X   do not check points exactly
"""

DEFAULT_FORMAT = "(%x : %y : %z)\\n"
DEFAULT_X_FORMAT = "(%x : %z)\\n"

_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", "%": "%"}


class UsageError(ValueError):
    pass


def decode_escapes(s: str) -> str:
    r"""Decode \n, \t, \\ and \%; anything else after a backslash is an error."""
    out = []
    i = 0
    while i < len(s):
        ch = s[i]
        if ch == "\\":
            if i + 1 >= len(s) or s[i + 1] not in _ESCAPES:
                raise UsageError(f"unknown escape sequence in {s!r}")
            out.append(_ESCAPES[s[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def compile_format(fmt: str) -> list[tuple[str, str]]:
    """Split a point format into ('lit', text) and ('var', 'x'|'y'|'z') parts."""
    parts: list[tuple[str, str]] = []
    lit: list[str] = []
    i = 0
    while i < len(fmt):
        ch = fmt[i]
        if ch == "\\":
            if i + 1 >= len(fmt) or fmt[i + 1] not in _ESCAPES:
                raise UsageError(f"unknown escape sequence in format {fmt!r}")
            lit.append(_ESCAPES[fmt[i + 1]])
            i += 2
        elif ch == "%":
            if i + 1 >= len(fmt) or fmt[i + 1] not in "xyz":
                raise UsageError(f"unknown marker in format {fmt!r}; use %x, %y or %z")
            if lit:
                parts.append(("lit", "".join(lit)))
                lit = []
            parts.append(("var", fmt[i + 1]))
            i += 2
        else:
            lit.append(ch)
            i += 1
    if lit:
        parts.append(("lit", "".join(lit)))
    return parts


@dataclass
class OutputOptions:
    quiet: bool = False
    verbose: bool = False
    suppress_points: bool = False
    x_only: bool = False
    no_infinity: bool = False
    one_point: bool = False
    no_check: bool = False
    fmt: str | None = None  # raw, escapes not yet decoded
    fs: str = ""
    fm: str = ""
    fe: str = ""

    def point_format(self) -> str:
        if self.fmt is not None:
            return self.fmt
        return DEFAULT_X_FORMAT if self.x_only or self.no_check else DEFAULT_FORMAT


class PointFormatter:
    """Writes points as they arrive: fs first, fm between, fe after the last."""

    def __init__(self, out: TextIO, fmt: str = DEFAULT_FORMAT, fs: str = "", fm: str = "", fe: str = ""):
        self.out = out
        self.parts = compile_format(fmt)
        self.fs, self.fm, self.fe = decode_escapes(fs), decode_escapes(fm), decode_escapes(fe)
        self.count = 0

    def emit(self, x: int, y: int, z: int) -> None:
        values = {"x": x, "y": y, "z": z}
        text = "".join(v if kind == "lit" else str(values[v]) for kind, v in self.parts)
        self.out.write((self.fm if self.count else self.fs) + text)
        self.count += 1

    def close(self) -> None:
        if self.count:
            self.out.write(self.fe)


def format_points(fmt: str, fs: str, fm: str, fe: str, points: Iterable[tuple[int, int, int]]) -> str:
    """Render (x, y, z) triples the way the command line prints them."""
    import io

    buf = io.StringIO()
    f = PointFormatter(buf, fmt, fs, fm, fe)
    for x, y, z in points:
        f.emit(x, y, z)
    f.close()
    return buf.getvalue()


# -- argument parsing ------------------------------------------------------------

_INT_RE = re.compile(r"[+-]?\d+$")


def _int(tok: str, what: str) -> int:
    if not _INT_RE.match(tok):
        raise UsageError(f"{what}: expected an integer, got {tok!r}")
    return int(tok)


def _float(tok: str, what: str) -> float:
    try:
        x = float(tok)
    except ValueError:
        raise UsageError(f"{what}: expected a number, got {tok!r}") from None
    if math.isnan(x):
        raise UsageError(f"{what}: NaN is not a bound")
    return x


def parse_coefficients(text: str) -> list[int]:
    toks = text.split()
    if not toks:
        raise UsageError("empty coefficient list")
    return [_int(t, "coefficient") for t in toks]


@dataclass
class _Parsed:
    sturm_depth: int = DEFAULT_STURM
    skip_sturm: bool = False
    flags: dict = field(default_factory=dict)


_TOGGLES = {
    "-i": ("no_infinity", True), "-I": ("no_infinity", False),
    "-z": ("suppress_points", True), "-Z": ("suppress_points", False),
    "-y": ("x_only", True), "-Y": ("x_only", False),
    "-x": ("no_check", True), "-X": ("no_check", False),
    "-k": ("no_reverse", True), "-K": ("no_reverse", False),
    "-j": ("no_jacobi", True), "-J": ("no_jacobi", False),
    "-q": ("quiet", True), "-v": ("verbose", True), "-1": ("one_point", True),
}
_COUNTS = {"-p": "num_primes", "-N": "sp2", "-n": "sp1", "-F": "max_forbidden", "-dl": "b_low", "-du": "b_high"}
_STRINGS = {"-f": "fmt", "-fs": "fs", "-fm": "fm", "-fe": "fe"}


def parse_options(tokens: list[str], extra_counts: dict | None = None):
    """Shared option loop; returns (toggles, counts, strings, intervals, sturm)."""
    counts_map = dict(_COUNTS, **(extra_counts or {}))
    toggles: dict[str, bool] = {}
    counts: dict[str, int] = {}
    strings: dict[str, str] = {}
    intervals: list[tuple[float, float]] = []
    pending_low: float | None = None
    depth, skip = DEFAULT_STURM, False
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        i += 1

        def arg() -> str:
            nonlocal i
            if i >= len(tokens):
                raise UsageError(f"option {tok} needs an argument")
            i += 1
            return tokens[i - 1]

        if tok in _TOGGLES:
            name, value = _TOGGLES[tok]
            toggles[name] = value
        elif tok in counts_map:
            counts[counts_map[tok]] = _int(arg(), tok)
        elif tok in _STRINGS:
            strings[_STRINGS[tok]] = arg()
        elif tok == "-l":
            if pending_low is not None:
                raise UsageError("-l must be followed by -u before the next -l")
            pending_low = _float(arg(), tok)
        elif tok == "-u":
            up = _float(arg(), tok)
            if pending_low is None:
                if intervals:
                    raise UsageError("only the first interval may omit its -l")
                pending_low = -math.inf
            intervals.append((pending_low, up))
            pending_low = None
        elif tok == "-s":
            skip = True
        elif tok == "-S":
            # a bare -S cancels -s; with a count it also sets the depth
            if i < len(tokens) and tokens[i].isdigit():
                depth = int(tokens[i])
                i += 1
            skip = False
        else:
            raise UsageError(f"unknown option {tok!r}")
    if pending_low is not None:
        intervals.append((pending_low, math.inf))
    prev = -math.inf
    for lo, up in intervals:
        if not (prev <= lo <= up):
            raise UsageError("search intervals must be given in increasing order")
        prev = up
    if len(intervals) > MAX_DEGREE:
        raise UsageError(f"at most {MAX_DEGREE} search intervals")
    return toggles, counts, strings, intervals, (-1 if skip else depth)


def parse_cli(argv: list[str]) -> tuple[SearchArgs, OutputOptions]:
    if len(argv) < 2:
        raise UsageError("need a coefficient list and a height bound")
    coeffs = parse_coefficients(argv[0])
    height = _int(argv[1], "height bound")
    toggles, counts, strings, intervals, sturm = parse_options(argv[2:])
    for name in _STRINGS.values():
        if name in strings:
            # validate escapes and markers now rather than mid-output
            (compile_format if name == "fmt" else decode_escapes)(strings[name])

    opts = OutputOptions(
        quiet=toggles.get("quiet", False),
        verbose=toggles.get("verbose", False),
        suppress_points=toggles.get("suppress_points", False),
        x_only=toggles.get("x_only", False),
        no_infinity=toggles.get("no_infinity", False),
        one_point=toggles.get("one_point", False),
        no_check=toggles.get("no_check", False),
        fmt=strings.get("fmt"),
        fs=strings.get("fs", ""),
        fm=strings.get("fm", ""),
        fe=strings.get("fe", ""),
    )
    flags = Flags.NONE
    if opts.no_check:
        flags |= Flags.NO_CHECK | Flags.NO_Y
    if opts.x_only:
        flags |= Flags.NO_Y
    if toggles.get("no_reverse"):
        flags |= Flags.NO_REVERSE
    if toggles.get("no_jacobi"):
        flags |= Flags.NO_JACOBI
    if opts.no_infinity:
        flags |= Flags.NO_INFINITY
    if opts.verbose and not opts.quiet:
        flags |= Flags.VERBOSE
    args = SearchArgs(
        coefficients=coeffs,
        height=height,
        domain=intervals,
        b_low=counts.get("b_low", 0),
        b_high=counts.get("b_high", 0),
        sp1=counts.get("sp1", -1),
        sp2=counts.get("sp2", -1),
        num_primes=counts.get("num_primes", -1),
        max_forbidden=counts.get("max_forbidden", -1),
        sturm=sturm,
        flags=flags,
    )
    return args, opts


# -- running ----------------------------------------------------------------------


def poly_to_str(coeffs: list[int]) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        mag = abs(c)
        mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        text += f" {sign} {body}"
    return text


def _or_default(value: int, default: int) -> int:
    return value if value >= 0 else default


def run_cli(argv: list[str], stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args, opts = parse_cli(argv)
    except UsageError as e:
        stderr.write(f"error: {e}\n{USAGE}")
        return EXIT_USAGE

    quiet = opts.quiet
    formatter = PointFormatter(stdout, opts.point_format(), opts.fs, opts.fm, opts.fe)
    found = 0

    def on_point(x, z, y, ctx, quit_flag):
        nonlocal found
        found += 1
        if not opts.suppress_points:
            formatter.emit(x, y, z)
        if opts.one_point:
            quit_flag.set()
        return 1

    handler = None
    if args.flags & Flags.VERBOSE:
        handler = logging.StreamHandler(stdout)
        handler.setFormatter(logging.Formatter("# %(message)s"))
        logger = logging.getLogger("hypersieve")
        logger.addHandler(handler)
        logger.setLevel(logging.INFO)
    if not quiet:
        stdout.write(f"# y^2 = {poly_to_str(args.coefficients)}\n")
        m, n2, n1 = clamp_counts(
            _or_default(args.num_primes, DEFAULT_NUM_PRIMES),
            _or_default(args.sp2, DEFAULT_SP2),
            _or_default(args.sp1, DEFAULT_SP1),
            len(odd_primes_below(1 << args.prime_bits)),
        )
        sturm = "off" if args.sturm < 0 else args.sturm
        stdout.write(
            f"# height bound {args.height}; denominators {args.b_low or 1}..{args.b_high or args.height}\n"
            f"# primes {m}, sieving with {n2} ({n1} in stage 1); forbidden divisors"
            f" {_or_default(args.max_forbidden, DEFAULT_MAX_FORBIDDEN)}; sturm depth {sturm}\n"
        )
    start = time.perf_counter()
    try:
        find_points(args, on_point)
    except BadArgsError as e:
        stderr.write(f"error: bad arguments: {e}\n")
        return EXIT_BAD_ARGS
    except NonSquarefreeError:
        stderr.write("error: the polynomial is not squarefree\n")
        return EXIT_NON_SQUAREFREE
    finally:
        if handler is not None:
            logging.getLogger("hypersieve").removeHandler(handler)
    formatter.close()
    if not quiet:
        what = "x-coordinates" if args.flags & Flags.NO_Y else "points"
        note = " (reversed polynomial)" if args.flags & Flags.REVERSED else ""
        stdout.write(f"# {found} {what} found in {time.perf_counter() - start:.3f} s{note}\n")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    return run_cli(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
