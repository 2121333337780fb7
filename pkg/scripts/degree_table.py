#!/usr/bin/env python3
"""Tabulate trace degrees across the discriminant matrix.

For each pair prints deg(trace-m locus) as an exact prime-log vector for
m up to a bound, plus the factored class-polynomial resultant next to the
m = 1 row so the classical reconciliation is visible at a glance.

Usage: python3 scripts/degree_table.py [--max-trace 6]
"""

import argparse

from cmeis.field import Setup
from cmeis.eisenstein import trace_degree
from cmeis.oracle import singular_moduli_check
from cmeis.verify import TEST_MATRIX


def _fmt(value) -> str:
    terms = value.terms()
    if not terms:
        return "0"
    return " + ".join(f"{c}*log({p})" for p, c in sorted(terms.items()))


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--max-trace", type=int, default=6)
    args = parser.parse_args()

    for d1, d2 in TEST_MATRIX:
        setup = Setup(d1, d2)
        report = singular_moduli_check(setup)
        res_fac = " * ".join(f"{p}^{e}" for p, e in report.factorization)
        print(f"\n(d1, d2) = ({d1}, {d2})   D = {setup.D}")
        print(f"  |resultant| = {report.resultant_abs} = {res_fac}"
              f"   scale 8/(w1*w2) = {report.scale}   match: {report.ok}")
        for m in range(1, args.max_trace + 1):
            value = trace_degree(setup, m)
            line = f"  m = {m:2d}   deg = {_fmt(value)}"
            if not value.is_zero:
                line += f"   = {float(value.to_float(64)):.6f}"
            print(line)


if __name__ == "__main__":
    main()
