"""Shared test utilities: independent brute-force oracles and generators.

Everything here deliberately avoids the library's sieve and product code
paths, so agreement between a helper and the library is genuine evidence.
"""

from __future__ import annotations

import random

import hypothesis.strategies as st

from expdens.patterns import ExponentPattern, PrimeAwarePattern, normalize_intervals


def brute_factorize(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization, no tables."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            e = 0
            while n % f == 0:
                n //= f
                e += 1
            out.append((f, e))
        f += 1
    if n > 1:
        out.append((n, 1))
    return out


def brute_count(x: int, allowed) -> int:
    """Count n <= x with allowed(p, alpha) for every prime power; n=1 counts."""
    total = 0
    for n in range(1, x + 1):
        if all(allowed(p, a) for p, a in brute_factorize(n)):
            total += 1
    return total


def in_raw_union(raw: list[tuple[int, int | None]], alpha: int) -> bool:
    return any(lo <= alpha and (hi is None or alpha <= hi) for lo, hi in raw)


raw_intervals = st.lists(
    st.tuples(st.integers(1, 12), st.one_of(st.none(), st.integers(0, 8))).map(
        lambda t: (t[0], None if t[1] is None else t[0] + t[1])
    ),
    max_size=5,
)


def random_pattern(
    rng: random.Random,
    max_lo: int = 12,
    max_width: int = 6,
    allow_unbounded: bool = True,
) -> ExponentPattern:
    ivs: list[tuple[int, int | None]] = []
    for _ in range(rng.randint(1, 3)):
        lo = rng.randint(1, max_lo)
        ivs.append((lo, lo + rng.randint(0, max_width)))
    if allow_unbounded and rng.random() < 0.5:
        ivs.append((rng.randint(1, max_lo), None))
    return normalize_intervals(ivs)


def random_small_pap(rng: random.Random) -> PrimeAwarePattern:
    """Patterns shaped for sieve comparison: intervals within [1, 6], an
    optional unbounded tail, up to two exceptional primes from {2, 3, 5},
    and a default that allows exponent 1."""
    from expdens.patterns import contains

    while True:
        ivs: list[tuple[int, int | None]] = []
        for _ in range(rng.randint(1, 3)):
            lo = rng.randint(1, 6)
            ivs.append((lo, rng.randint(lo, 6)))
        if rng.random() < 0.5:
            ivs.append((rng.randint(1, 7), None))
        default = normalize_intervals(ivs)
        if contains(default, 1):
            break
    exceptions = {}
    for q in (2, 3, 5):
        if len(exceptions) >= 2 or rng.random() >= 0.35:
            continue
        if rng.random() < 0.25:
            exceptions[q] = normalize_intervals([])
        else:
            lo = rng.randint(1, 4)
            hi = None if rng.random() < 0.3 else rng.randint(lo, 6)
            exceptions[q] = normalize_intervals([(lo, hi)])
    return PrimeAwarePattern(default=default, exceptions=exceptions)


def pap_allows(pap: PrimeAwarePattern, p: int, alpha: int) -> bool:
    from expdens.patterns import contains, pattern_for_prime

    return contains(pattern_for_prime(pap, p), alpha)
