"""Command-line interface: ``plbc construct|encode|decode|simulate|bound``.

Exit status is 0 on success (and full masking), 1 when ``encode`` leaves
defects unmasked, and 2 on usage or code-specification errors.  All tabular
output is CSV with a fixed header line.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from . import analysis, codec, sim
from .algebra import BitMatrix, BitVector
from .code import PbchSpec, PlbcCode, load_code, pbch_build, pbch_r0, plbc_from_generators, save_code
from .errors import DecodeFailure, InvalidCode, InvalidSpec, UnsupportedComputation

EXIT_OK = 0
EXIT_UNMASKED = 1
EXIT_USAGE = 2

DEFAULT_DESIGNED_D0 = 5

BOUND_CLI_HEADER = "u,kind,value,value_float"
MIXTURE_CLI_HEADER = "epsilon,kind,value,value_float"


class UsageError(Exception):
    """Bad arguments detected after parsing."""


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def parse_probability(text: str) -> Fraction:
    """``"40/1023"`` or ``"0.04"`` as an exact fraction in [0, 1]."""
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a probability: {text!r}") from None
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"probability {text} outside [0, 1]")
    return value


def fraction_text(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _common_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    p.add_argument("--trials", type=int, default=100_000, help="Monte Carlo trials per point")
    p.add_argument("--out", default="-", help="output file (default stdout)")
    p.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    return p


def _code_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("code selection")
    g.add_argument("--spec", help="code-spec JSON file")
    g.add_argument("--demo", choices=("n2", "n7"), help="built-in demo code")
    g.add_argument("--pbch", action="store_true", help="PBCH code from --n/--g1/--g0")
    g.add_argument("--n", type=int, help="block length 2^m - 1")
    g.add_argument("--g1", help="g1(x) as hex (bit i = coefficient of x^i)")
    g.add_argument("--g0", help="g0(x) as hex")
    g.add_argument("--primitive", help="primitive polynomial of GF(2^m) as hex")
    g.add_argument(
        "--d0",
        type=int,
        help="designed distance of the r = 0 PBCH family member (used with --n when --g0 is absent)",
    )
    return p


def demo_code(name: str) -> PlbcCode:
    if name == "n2":
        return plbc_from_generators(BitMatrix.from_strs(["10"]), BitMatrix.from_strs(["11"]))
    if name == "n7":
        return pbch_build(PbchSpec.from_hex(7, "0x1", "0xb"))
    raise UsageError(f"unknown demo code {name!r}")


def code_from_args(args, designed: Optional[int] = None) -> PlbcCode:
    """Build the code named by the code-selection flags."""
    if args.spec:
        return load_code(args.spec)
    if args.demo:
        return demo_code(args.demo)
    if args.n is None:
        raise UsageError("choose a code with --spec, --demo, or --n (with --pbch/--g0 or --d0)")
    prim = args.primitive
    if args.g0 is not None or args.pbch:
        if args.g0 is None:
            raise UsageError("--pbch needs --g0 (and optionally --g1)")
        return pbch_build(PbchSpec.from_hex(args.n, args.g1 or "0x1", args.g0, prim))
    delta = designed if designed is not None else (args.d0 if args.d0 is not None else DEFAULT_DESIGNED_D0)
    return pbch_build(pbch_r0(args.n, delta, None if prim is None else int(prim, 16)))


@contextlib.contextmanager
def open_out(path: str) -> Iterator:
    if path == "-":
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _bits(text: str, length: int, what: str) -> BitVector:
    try:
        v = BitVector.from_str(text.strip())
    except ValueError:
        raise UsageError(f"{what} must be a string of 0/1 characters") from None
    if v.length != length:
        raise UsageError(f"{what} has length {v.length}, expected {length}")
    return v


def _sweep_values(args) -> list:
    if args.values:
        items = [s for s in args.values.split(",") if s.strip()]
    elif args.start is not None and args.stop is not None:
        if args.sweep == "epsilon":
            raise UsageError("epsilon sweeps take --values (e.g. 1/100,40/1023)")
        step = args.step or (2 if args.sweep == "rate" else 1)
        items = [str(v) for v in range(args.start, args.stop + 1, step)]
    else:
        raise UsageError("give --values or both --from and --to")
    if args.sweep == "epsilon":
        return [parse_probability(s) for s in items]
    try:
        return [int(s) for s in items]
    except ValueError:
        raise UsageError(f"--sweep {args.sweep} takes integer values") from None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_construct(args) -> int:
    code = code_from_args(args)
    with open_out(args.out) as fh:
        print(code.summary(), file=fh)
    if args.save:
        save_code(code, args.save)
    return EXIT_OK


def cmd_encode(args) -> int:
    code = code_from_args(args)
    w = _bits(args.w, code.k, "--w")
    try:
        s = codec.DefectVector.parse(code.n, args.defects)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = codec.encode(code, w, s, args.scheme)
    with open_out(args.out) as fh:
        print(codec.ENCODE_CSV_HEADER, file=fh)
        print(res.csv_row(), file=fh)
    return EXIT_UNMASKED if res.unmasked else EXIT_OK


def cmd_decode(args) -> int:
    code = code_from_args(args)
    y = _bits(args.y, code.n, "--y")
    w_hat, z_hat = codec.decode_plbc(code, y)
    if args.polynomial:
        if code.spec is None:
            raise UsageError("--polynomial needs a PBCH code")
        w_hat = codec.decode_pcc(code.spec, code, y)
    with open_out(args.out) as fh:
        print("w_hat,z_hat", file=fh)
        print(f"{w_hat},{z_hat}", file=fh)
    return EXIT_OK


def _simulate_rows(args) -> Iterator[str]:
    schemes = [s.strip() for s in args.schemes.split(",") if s.strip()]
    for s in schemes:
        if s not in sim.SCHEMES:
            raise UsageError(f"unknown scheme {s!r}; choose from {', '.join(sim.SCHEMES)}")
    values = _sweep_values(args)

    def point(code, u=None, eps=None):
        config = sim.SimConfig(
            trials=args.trials, seed=args.seed, scheme=schemes[0], u=u, epsilon=eps,
            p=args.p, selection=args.selection,
        )
        for rep in sim.run_point(code, config, schemes, args.metric, args.baseline_d, args.threads):
            yield rep.csv_row()

    if args.sweep == "rate":
        if (args.u is None) == (args.epsilon is None):
            raise UsageError("a rate sweep needs exactly one of --u and --epsilon")
        if args.n is None:
            raise UsageError("a rate sweep walks the r = 0 PBCH family at --n")
        for delta in values:
            code = pbch_build(pbch_r0(args.n, delta, None if args.primitive is None else int(args.primitive, 16)))
            yield from point(code, args.u, args.epsilon)
        return
    code = code_from_args(args)
    for v in values:
        if args.sweep == "u":
            if not 0 <= v <= code.n:
                raise UsageError(f"u={v} outside [0, {code.n}]")
            yield from point(code, u=v)
        else:
            yield from point(code, eps=v)


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    rows = list(_simulate_rows(args))
    with open_out(args.out) as fh:
        print(sim.SIM_CSV_HEADER, file=fh)
        for row in rows:
            print(row, file=fh)
    return EXIT_OK


def bound_cli_row(rep: analysis.BoundReport) -> str:
    return f"{rep.u},{rep.kind},{fraction_text(rep.value)},{analysis.format_float(float(rep.value))}"


def cmd_bound(args) -> int:
    code = code_from_args(args)
    try:
        wd = code.dual_distribution(approx=args.approx)
    except UnsupportedComputation as exc:
        raise UsageError(str(exc)) from None
    lines = []
    if args.mixture is not None:
        value = analysis.binomial_mixture_bound(wd, code.n, args.mixture, code.d0)
        lines.append(MIXTURE_CLI_HEADER)
        lines.append(
            f"{fraction_text(args.mixture)},mixture-upper-bound,{fraction_text(value)},"
            f"{analysis.format_float(float(value))}"
        )
    else:
        if args.u is not None:
            us = [args.u]
        else:
            lo = 0 if args.start is None else args.start
            hi = code.n if args.stop is None else args.stop
            us = list(range(lo, hi + 1))
        for u in us:
            if not 0 <= u <= code.n:
                raise UsageError(f"u={u} outside [0, {code.n}]")
        reports = [analysis.masking_failure_piecewise(wd, u, code.d0) for u in us]
        if args.split_fraction:
            lines.append(analysis.BOUND_CSV_HEADER)
            lines.extend(rep.csv_row() for rep in reports)
        else:
            lines.append(BOUND_CLI_HEADER)
            lines.extend(bound_cli_row(rep) for rep in reports)
    with open_out(args.out) as fh:
        for line in lines:
            print(line, file=fh)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _common_parent()
    codeopts = _code_parent()
    parser = argparse.ArgumentParser(
        prog="plbc",
        description="Partitioned linear block codes for memories with stuck-at defects.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common, codeopts], help="build a code and print its parameters")
    p.add_argument("--save", help="write the code spec as JSON")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("encode", parents=[common, codeopts], help="mask defects for one message")
    p.add_argument("--w", required=True, help="message bits, index 0 first")
    p.add_argument("--defects", default="", help='defects as "index:value" pairs, e.g. "2:1 5:0"')
    p.add_argument("--scheme", default="two-step", choices=sorted(codec.ENCODERS))
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", parents=[common, codeopts], help="decode one read-back word")
    p.add_argument("--y", required=True, help="received bits, index 0 first")
    p.add_argument("--polynomial", action="store_true", help="recover w by polynomial division (PBCH codes)")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", parents=[common, codeopts], help="Monte Carlo failure rates as CSV")
    p.add_argument("--sweep", choices=("u", "epsilon", "rate"), default="u")
    p.add_argument("--from", dest="start", type=int, help="first sweep value (u or designed distance)")
    p.add_argument("--to", dest="stop", type=int, help="last sweep value, inclusive")
    p.add_argument("--step", type=int, help="sweep step (default 1; 2 for rate sweeps)")
    p.add_argument("--values", help="comma-separated sweep values")
    p.add_argument("--schemes", default="two-step", help=f"comma-separated subset of {','.join(sim.SCHEMES)}")
    p.add_argument("--u", type=int, help="fixed defect count (rate sweeps)")
    p.add_argument("--epsilon", type=parse_probability, help="defect probability (rate sweeps)")
    p.add_argument("--p", type=parse_probability, default=Fraction(0), help="error probability of normal cells")
    p.add_argument("--metric", choices=("masking", "decoding"), default="masking",
                   help="failure criterion for the encoder schemes")
    p.add_argument("--baseline-d", type=int, help="distance of the BCH baselines (default: the code's d0)")
    p.add_argument("--selection", choices=("descending", "random"), default="descending",
                   help="defect-location selection for one-step / step 2")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bound", parents=[common, codeopts], help="analytical masking-failure values as CSV")
    p.add_argument("--u", type=int, help="single defect count")
    p.add_argument("--from", dest="start", type=int, help="first u (default 0)")
    p.add_argument("--to", dest="stop", type=int, help="last u, inclusive (default n)")
    p.add_argument("--approx", action="store_true", help="binomial approximation of the weight distribution")
    p.add_argument("--mixture", type=parse_probability, metavar="EPSILON",
                   help="bound for independent defects with this probability")
    p.add_argument("--split-fraction", action="store_true",
                   help="print value as separate numerator and denominator columns")
    p.set_defaults(func=cmd_bound)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if getattr(args, "threads", 1) < 1:
        print("plbc: error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, InvalidSpec, InvalidCode, UnsupportedComputation, DecodeFailure, ValueError,
            OSError) as exc:
        print(f"plbc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
