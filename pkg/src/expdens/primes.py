"""Prime sieves and exact factorization tables.

numpy-backed Eratosthenes sieves, segmented above a threshold so that large
limits never allocate one giant boolean block, plus a smallest-prime-factor
table for factoring every integer up to a bound.
"""

from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

# Allocation guard: no sieve covers more than this many integers unless the
# caller raises the budget explicitly.
DEFAULT_SIEVE_BUDGET = 10**8
# SPF entries are uint32, so no table may ever exceed this.
HARD_LIMIT = 2**32 - 1
SEGMENT_SIZE = 1 << 22
_ONE_SHOT_LIMIT = 10**7


class ResourceBudgetError(RuntimeError):
    """A sieve or count was requested beyond the configured memory budget."""


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit``, ascending int64."""

    limit: int
    primes: np.ndarray


@dataclass(frozen=True)
class SpfTable:
    """``spf[n]`` is the smallest prime factor of n, for 2 <= n <= limit."""

    limit: int
    spf: np.ndarray


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality check (validation-scale only)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _check_budget(limit: int, budget: int) -> None:
    cap = min(budget, HARD_LIMIT)
    if limit > cap:
        raise ResourceBudgetError(f"sieve limit {limit} exceeds budget {cap}")


def _sieve_block(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def prime_segments(
    limit: int,
    segment_size: int = SEGMENT_SIZE,
    budget: int = DEFAULT_SIEVE_BUDGET,
) -> Iterator[np.ndarray]:
    """Yield ascending arrays of primes that together cover [2, limit].

    Small limits come back as a single block; large ones are produced segment
    by segment so peak memory stays bounded by ``segment_size``.
    """
    if limit < 2:
        return
    _check_budget(limit, budget)
    if limit <= _ONE_SHOT_LIMIT:
        yield _sieve_block(limit)
        return
    s = max(math.isqrt(limit), 2)
    base = _sieve_block(s)
    yield base
    lo = s + 1
    while lo <= limit:
        hi = min(lo + segment_size, limit + 1)
        flags = np.ones(hi - lo, dtype=bool)
        for p in base.tolist():
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start < hi:
                flags[start - lo :: p] = False
        seg = np.flatnonzero(flags).astype(np.int64)
        seg += lo
        yield seg
        lo = hi


def sieve_primes(limit: int, budget: int = DEFAULT_SIEVE_BUDGET) -> PrimeTable:
    """All primes <= limit."""
    if limit < 2:
        raise ValueError("sieve limit must be >= 2")
    _check_budget(limit, budget)
    if limit <= _ONE_SHOT_LIMIT:
        return PrimeTable(limit, _sieve_block(limit))
    parts = list(prime_segments(limit, budget=budget))
    return PrimeTable(limit, np.concatenate(parts))


def spf_sieve(limit: int, budget: int = DEFAULT_SIEVE_BUDGET) -> SpfTable:
    """Smallest-prime-factor table for every n in [2, limit]."""
    if limit < 2:
        raise ValueError("sieve limit must be >= 2")
    _check_budget(limit, budget)
    spf = np.zeros(limit + 1, dtype=np.uint32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            view = spf[p * p :: p]
            view[view == 0] = p
    untouched = np.flatnonzero(spf == 0)
    untouched = untouched[untouched >= 2]
    spf[untouched] = untouched  # remaining entries are the primes themselves
    return SpfTable(limit, spf)


def factorize(n: int, table: SpfTable) -> list[tuple[int, int]]:
    """Prime factorization of n as (prime, exponent) pairs, primes ascending."""
    if not 2 <= n <= table.limit:
        raise ValueError(f"n={n} outside table range [2, {table.limit}]")
    spf = table.spf
    out: list[tuple[int, int]] = []
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out
