"""Elementary arithmetic utilities: prime sieves, divisor tables, factorization.

Everything here is exact integer arithmetic on numpy int64 or Python ints;
results are cached module-level since the tables are reused across audits.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

_sieve_cache: dict[int, np.ndarray] = {}


def prime_sieve(limit: int) -> np.ndarray:
    """Sorted array of all primes <= limit."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    for cap, primes in _sieve_cache.items():
        if cap >= limit:
            return primes[primes <= limit]
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    primes = np.nonzero(is_p)[0].astype(np.int64)
    if len(_sieve_cache) > 4:
        _sieve_cache.clear()
    _sieve_cache[limit] = primes
    return primes


def smallest_prime_factor(limit: int) -> np.ndarray:
    """spf[n] = smallest prime factor of n for 0 <= n <= limit (spf[0..1] = 0)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    return spf


def divisor_count_table(limit: int) -> np.ndarray:
    """tau[n] = number of divisors of n, for 0 <= n <= limit (tau[0] = 0)."""
    tau = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        tau[d::d] += 1
    return tau


def is_squarefree(n: int) -> bool:
    if n <= 0:
        return False
    return all(e == 1 for _, e in factorize(n))


_TRIAL_LIMIT = 1_000_000


@lru_cache(maxsize=65536)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of n >= 1 by trial division.

    Complete for any n whose second-largest prime factor is <= 1e6 (in
    particular all n <= 1e12); raises otherwise.
    """
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = []
    m = n
    for p in prime_sieve(min(max(3, math.isqrt(n) + 1), _TRIAL_LIMIT)).tolist():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
    if m > 1:
        if m > _TRIAL_LIMIT * _TRIAL_LIMIT:
            raise ValueError(f"cannot certify primality of cofactor {m}")
        out.append((m, 1))
    return tuple(out)


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    out = [1]
    for p, e in factorize(n):
        out = [d * p**i for i in range(e + 1) for d in out]
    return sorted(out)


def euler_phi(n: int) -> int:
    val = 1
    for p, e in factorize(n):
        val *= (p - 1) * p ** (e - 1)
    return val


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)
