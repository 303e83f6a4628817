#!/usr/bin/env python3
"""Build the small-L1 bump family and show its means stay away from max(x, z).

Prints, per n, the L1 norm of A_n, log sup f_n'(q)/f_n'(p) and M_{f_n}(x, z, xi),
next to the level y that every mean stays under.
"""

import argparse
import math

from qamean import Interval, TargetSetSpec, TwoPointQuery, build_prop51_family, obstruction_level, qa_mean_two
from qamean.diagnostics import max_derivative_ratio


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--n-max", type=int, default=64)
    ap.add_argument("--cantor-depth", type=int, default=None, help="target Cantor endpoints instead of the midpoint")
    ap.add_argument("--x", type=float, default=0.1)
    ap.add_argument("--z", type=float, default=0.9)
    ap.add_argument("--xi", type=float, default=0.5)
    args = ap.parse_args()

    U = Interval(0, 1)
    if args.cantor_depth is None:
        V = TargetSetSpec.midpoint(U)
    else:
        V = TargetSetSpec.cantor(args.cantor_depth, Interval(0.25, 0.75))
    fam, cert = build_prop51_family(V, args.eps, U, args.n_max)
    ystar = obstruction_level(args.x, args.z, args.xi, math.exp(args.eps))
    y = 0.5 * (ystar + args.z)
    print(f"target points: {len(V.points)}  anchor: {cert.data['anchor']}  level y = {y:.6f}")
    print(f"{'n':>4} {'L1(A_n)':>10} {'log ratio':>10} {'mean':>10}")
    for n in range(1, args.n_max + 1):
        m = qa_mean_two(fam.at(n), TwoPointQuery(args.x, args.z, args.xi))
        lr = max_derivative_ratio(fam.at(n), U.lo, U.hi)
        print(f"{n:>4} {cert.profile_l1[n - 1]:>10.6f} {lr:>10.6f} {m:>10.6f}")
    print(f"sup L1 = {max(cert.profile_l1):.6f} < eps = {args.eps}")


if __name__ == "__main__":
    main()
