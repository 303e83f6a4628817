#!/usr/bin/env python3
"""Build the rational-bump max-family and run the three max criteria on it."""

import argparse

import numpy as np

from qamean import (
    Interval,
    NGrid,
    build_prop53_family,
    derivative_ratio_test,
    integral_test,
    ratio_test,
    x_infinity_estimate,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k-max", type=int, default=32)
    ap.add_argument("--query", type=float, nargs=2, default=(0.2, 0.8))
    args = ap.parse_args()

    U = Interval(0, 1)
    p, q = args.query
    fam, cert = build_prop53_family(U, args.k_max, query=(p, q))
    d = cert.data
    ns = NGrid.range(1, args.k_max)
    print(f"first centre in ({p}, {q}): {d.get('centre')} (index {d.get('centre_index')}), k0 = {d.get('k0')}")
    print(f"{'n':>4} {'int A_n':>12} {'lower bound':>12}")
    for n, (v, lb) in enumerate(zip(d["query_integrals"], d.get("predicted_lower_bounds", [])), 1):
        print(f"{n:>4} {v:>12.4f} {lb:>12.4f}")
    y = 0.5 * (p + q)
    for rep in (ratio_test(fam, p, y, q, ns), derivative_ratio_test(fam, p, q, ns), integral_test(fam, p, q, ns)):
        print(f"{rep.test:>12}: {rep.verdict.classification}  last value {rep.values[-1]!r}")
    centres = d["rationals"][: args.k_max]
    est = x_infinity_estimate(fam, np.union1d(np.linspace(0, 1, 41), centres), ns, 1000)
    print(f"points flagged as blowing up: {len(est.members)} (rational centres: {len(centres)})")


if __name__ == "__main__":
    main()
