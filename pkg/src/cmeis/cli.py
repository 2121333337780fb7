"""Command-line front end.

Subcommands:

* ``coeffs``           stream coefficient records (JSON lines or CSV)
* ``degree``           the trace-m degree as an exact prime-log map
* ``singular-moduli``  both sides of the resultant reconciliation
* ``verify``           run the cross-module invariant suites

Exit codes: 0 success, 1 verification failure, 2 usage or setup error,
3 precision failure.  All rational values are emitted as reduced
fraction strings and maps are keyed by primes in increasing order, so
emitted JSON re-serializes byte-identically.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction

import mpmath

from .eisenstein import (
    arakelov_degree,
    constant_term,
    mixed_coefficient,
    trace_degree,
)
from .exact import LogLinear, factor
from .field import FElem, Setup, SetupError, enumerate_trace_slice
from .oracle import PrecisionError, singular_moduli_check
from .verify import SUITES, run_suites

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_PRECISION = 3

_RECORD_FIELDS = ("m", "x", "alpha", "diff", "a_alpha", "deg_X", "a_alpha_float", "nu")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _loglinear_map(value: LogLinear) -> dict[str, str]:
    return {str(p): str(c) for p, c in sorted(value.terms().items())}


def _float_str(x, digits: int) -> str:
    if x == 0:
        return "0"
    return mpmath.nstr(x, digits, strip_zeros=False)


def _display_bits(digits: int) -> int:
    return max(128, 4 * digits + 32)


def _slice_record(setup, m, elt, digits, bits):
    report = arakelov_degree(setup, elt.alpha)
    coefficient = report.coefficient
    return {
        "m": m,
        "x": elt.x,
        "alpha": [str(elt.alpha.u), str(elt.alpha.v)],
        "diff": [{"p": q.p, "kind": q.kind} for q in report.diff],
        "a_alpha": _loglinear_map(coefficient),
        "deg_X": _loglinear_map(report.degree),
        "a_alpha_float": _float_str(
            0 if coefficient.is_zero else coefficient.to_float(bits), digits
        ),
        "nu": str(report.nu),
    }


def _mixed_records(setup, m, v1, v2, digits, bits):
    """Nonzero mixed-signature records at trace m, largest terms first by |x|.

    Trace fixes only a line in the lattice, so the scan walks outward in x
    and stops once a divisor-count bound on the coefficient falls below
    the display cutoff (the terms decay like exp(-c|x|)).
    """
    D = setup.D
    cutoff = mpmath.mpf(10) ** (-(digits + 2))
    xmax = math.isqrt(m * m * D - 1)
    parity = (m * D) % 2
    start = xmax + 1
    if start % 2 != parity:
        start += 1
    records = []
    x = start
    while True:
        n = (x * x - m * m * D) // 4
        with mpmath.mp.workprec(bits):
            sigma = (x * mpmath.sqrt(D) / D - m) / 2  # |negative embedding|
            divisors = 1
            for _, e in factor(n):
                divisors *= e + 1
            # rho is at most the squared divisor count of the norm
            bound = 2 * divisors**2 * mpmath.exp(-4 * mpmath.pi * sigma * min(v1, v2))
        if bound < cutoff:
            break
        for sx in (-x, x):
            alpha = FElem(Fraction(m, 2), Fraction(sx, 2 * D))
            value = mixed_coefficient(setup, alpha, v1, v2, bits)
            if abs(value) < cutoff:
                continue
            records.append(
                {
                    "m": m,
                    "x": sx,
                    "alpha": [str(alpha.u), str(alpha.v)],
                    "diff": [],
                    "a_alpha": {},
                    "deg_X": {},
                    "a_alpha_float": _float_str(value, digits),
                    "nu": "0",
                }
            )
        x += 2
    return sorted(records, key=lambda r: r["x"])


def coefficient_records(setup, trace_max, v1=None, v2=None, digits=30):
    """All emitted records, deterministically ordered.

    Always one record per trace-slice element for 1 <= m <= trace_max.
    With imaginary parts given, also the constant term (m = 0) and the
    mixed-signature terms whose numeric size clears the display cutoff.
    """
    bits = _display_bits(digits)
    records = []
    if v1 is not None:
        records.append(
            {
                "m": 0,
                "x": 0,
                "alpha": ["0", "0"],
                "diff": [],
                "a_alpha": {},
                "deg_X": {},
                "a_alpha_float": _float_str(constant_term(setup, v1, v2, bits), digits),
                "nu": "0",
            }
        )
    for m in range(1, trace_max + 1):
        per_m = [
            _slice_record(setup, m, elt, digits, bits)
            for elt in enumerate_trace_slice(setup, m)
        ]
        if v1 is not None:
            per_m.extend(_mixed_records(setup, m, v1, v2, digits, bits))
        records.extend(sorted(per_m, key=lambda r: r["x"]))
    return records


def _emit_json(records, out) -> None:
    for rec in records:
        out.write(json.dumps(rec, separators=(",", ":")) + "\n")


def _emit_csv(records, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        ["m", "x", "alpha_u", "alpha_v", "diff", "a_alpha", "deg_X", "a_alpha_float", "nu"]
    )
    for rec in records:
        writer.writerow(
            [
                rec["m"],
                rec["x"],
                rec["alpha"][0],
                rec["alpha"][1],
                json.dumps(rec["diff"], separators=(",", ":")),
                json.dumps(rec["a_alpha"], separators=(",", ":")),
                json.dumps(rec["deg_X"], separators=(",", ":")),
                rec["a_alpha_float"],
                rec["nu"],
            ]
        )


def _cmd_coeffs(args) -> int:
    setup = Setup(args.d1, args.d2)
    if (args.v1 is None) != (args.v2 is None):
        raise SetupError("--v1 and --v2 must be given together")
    if args.v1 is not None and (args.v1 <= 0 or args.v2 <= 0):
        raise SetupError("imaginary parts must be positive")
    records = coefficient_records(
        setup, args.trace_max, v1=args.v1, v2=args.v2, digits=args.digits
    )
    if args.format == "json":
        _emit_json(records, sys.stdout)
    else:
        _emit_csv(records, sys.stdout)
    return EXIT_OK


def _cmd_degree(args) -> int:
    setup = Setup(args.d1, args.d2)
    value = trace_degree(setup, args.m)
    bits = _display_bits(args.digits)
    obj = {
        "d1": args.d1,
        "d2": args.d2,
        "m": args.m,
        "deg_T": _loglinear_map(value),
        "deg_T_float": _float_str(0 if value.is_zero else value.to_float(bits), args.digits),
    }
    sys.stdout.write(json.dumps(obj, separators=(",", ":")) + "\n")
    return EXIT_OK


def _cmd_singular_moduli(args) -> int:
    setup = Setup(args.d1, args.d2)
    report = singular_moduli_check(setup)
    obj = {
        "d1": report.d1,
        "d2": report.d2,
        "h1": report.h1,
        "h2": report.h2,
        "resultant_abs": str(report.resultant_abs),
        "resultant_factorization": {str(p): str(e) for p, e in report.factorization},
        "scale": str(report.scale),
        "degree_side": _loglinear_map(report.degree_side),
        "resultant_side": _loglinear_map(report.resultant_side),
        "precision_bits": report.precision_used,
        "pass": report.ok,
    }
    sys.stdout.write(json.dumps(obj, separators=(",", ":")) + "\n")
    return EXIT_OK


def _cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = run_suites(names, seed=args.seed)
    failed = False
    for res in results:
        status = "ok" if res.ok else "FAIL"
        sys.stdout.write(f"{status} {res.suite}.{res.name}\n")
        if not res.ok:
            failed = True
            sys.stderr.write(
                json.dumps(
                    {"suite": res.suite, "invariant": res.name, "detail": res.detail},
                    separators=(",", ":"),
                )
                + "\n"
            )
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmeis",
        description=(
            "Exact Fourier coefficients of the derived Hilbert Eisenstein series "
            "for a pair of imaginary quadratic discriminants, the matching "
            "Arakelov degrees, and a singular-moduli cross-check."
        ),
        epilog=(
            "Exit codes: 0 success, 1 verification failure, 2 usage/setup error, "
            "3 precision failure.  CMEIS_PRECISION_BITS overrides the starting "
            "precision of the floating-point oracle."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d1", type=int, required=True, help="first negative fundamental discriminant")
    common.add_argument("--d2", type=int, required=True, help="second negative fundamental discriminant")
    common.add_argument(
        "--digits", type=_positive_int, default=30, help="significant digits for floats (default 30)"
    )

    p_coeffs = sub.add_parser("coeffs", parents=[common], help="stream coefficient records")
    p_coeffs.add_argument("--trace-max", type=_positive_int, required=True, metavar="M")
    p_coeffs.add_argument("--v1", type=float, default=None, help="first imaginary part")
    p_coeffs.add_argument("--v2", type=float, default=None, help="second imaginary part")
    p_coeffs.add_argument("--format", choices=("json", "csv"), default="json")
    p_coeffs.set_defaults(func=_cmd_coeffs)

    p_degree = sub.add_parser("degree", parents=[common], help="trace-m Arakelov degree")
    p_degree.add_argument("--m", type=_positive_int, required=True)
    p_degree.set_defaults(func=_cmd_degree)

    p_sm = sub.add_parser(
        "singular-moduli", parents=[common], help="resultant vs degree reconciliation"
    )
    p_sm.set_defaults(func=_cmd_singular_moduli)

    p_verify = sub.add_parser("verify", help="run invariant suites")
    p_verify.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SetupError as exc:
        sys.stderr.write(f"setup error: {exc}\n")
        return EXIT_USAGE
    except PrecisionError as exc:
        sys.stderr.write(f"precision failure: {exc}\n")
        return EXIT_PRECISION


if __name__ == "__main__":
    sys.exit(main())
