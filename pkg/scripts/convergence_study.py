#!/usr/bin/env python3
"""How fast do sieve ratios approach the product value for a pattern?

Prints the count ratio at growing x next to the bracketed product, e.g.:

    python3 scripts/convergence_study.py --pattern "1..1,3..inf" --max-x 10000000
"""

import argparse

from expdens.empirical import count_pattern
from expdens.euler import density
from expdens.patterns import PrimeAwarePattern, parse_pattern


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pattern", default="1..1")
    ap.add_argument("--error", type=float, default=1e-8)
    ap.add_argument("--max-x", type=int, default=10**7)
    args = ap.parse_args()

    pap = PrimeAwarePattern(default=parse_pattern(args.pattern))
    est = density(pap, args.error)
    print(f"pattern {args.pattern!r}")
    print(f"product value {est.value:.12f}  bracket [{est.lower:.12f}, {est.upper:.12f}]")
    print(f"{'x':>12} {'count':>12} {'ratio':>14} {'deviation':>12}")
    x = 1000
    while x <= args.max_x:
        rep = count_pattern(x, pap)
        print(f"{x:>12} {rep.count:>12} {rep.ratio:>14.8f} {rep.ratio - est.value:>12.2e}")
        x *= 10


if __name__ == "__main__":
    main()
