#!/usr/bin/env python3
"""Compare the derivative-ratio verdict with the empirical mean-gap verdict on builtin families."""

import numpy as np

from qamean import (
    Interval,
    NGrid,
    TrendConfig,
    TwoPointQuery,
    builtin_family,
    derivative_ratio_test,
    dualize,
    empirical_max_test,
    lower_bounded_estimate,
)

FAMILIES = {
    "exp-seq on [0,1]": builtin_family("exp-seq", 1.0, Interval(0, 1)),
    "power-seq on [1,2]": builtin_family("power-seq", 1.0, Interval(1, 2)),
    "identity on [0,1]": builtin_family("constant", ("identity",), Interval(0, 1)),
    "exp:3 constant": builtin_family("constant", ("exp", 3.0), Interval(0, 1)),
    "exp-seq, rate -n": builtin_family("exp-seq", -1.0, Interval(0, 1)),
    "dual exp-seq": dualize(builtin_family("exp-seq", 1.0, Interval(0, 1))),
}


def main():
    ns = NGrid.range(4, 256, 4)
    cfg = TrendConfig(zero_tol=0.02)
    print(f"{'family':<20} {'C_hat':>8} {'deriv-ratio':>22} {'empirical':>22} agree")
    for name, fam in FAMILIES.items():
        U = fam.domain
        at = lambda s: U.lo + s * U.width  # noqa: E731
        c_hat = lower_bounded_estimate(fam, np.linspace(U.lo, U.hi, 21), ns)
        d = derivative_ratio_test(fam, at(0.25), at(0.75), ns, cfg).verdict.classification
        (e,) = empirical_max_test(fam, [TwoPointQuery(at(0), at(1), 0.5)], ns, cfg)
        e = e.verdict.classification
        agree = (d == "diverges_to_infinity") == (e == "converges_to_zero")
        print(f"{name:<20} {c_hat:>8.2f} {d:>22} {e:>22} {agree}")


if __name__ == "__main__":
    main()
