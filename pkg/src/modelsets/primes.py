"""Prime enumeration and certified prime-sum tail bounds."""

from __future__ import annotations

import math
from bisect import bisect_right

_sieve_cache: list[int] = [2, 3, 5, 7]
_sieve_limit: int = 10


def primes_upto(n: int) -> list[int]:
    """All primes <= n, cached and extended on demand."""
    global _sieve_cache, _sieve_limit
    if n > _sieve_limit:
        limit = max(2 * _sieve_limit, n)
        flags = bytearray([1]) * (limit + 1)
        flags[0:2] = b"\x00\x00"
        for p in range(2, math.isqrt(limit) + 1):
            if flags[p]:
                flags[p * p::p] = b"\x00" * len(flags[p * p::p])
        _sieve_cache = [i for i, f in enumerate(flags) if f]
        _sieve_limit = limit
    return _sieve_cache[:bisect_right(_sieve_cache, n)]


def first_primes(count: int) -> list[int]:
    bound = 30
    while True:
        ps = primes_upto(bound)
        if len(ps) >= count:
            return ps[:count]
        bound *= 2


def nth_prime(n: int) -> int:
    """The n-th prime, 1-based (nth_prime(1) == 2)."""
    return first_primes(n)[-1]


def distinct_prime_factors(n: int) -> list[int]:
    if n < 1:
        n = -n
    factors = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            factors.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors.append(n)
    return factors


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    n = abs(n)
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        while n % d == 0:
            n //= d
        d += 1 if d == 2 else 2
    return True


def reciprocal_power_tail(bound: int, k: int) -> float:
    """Certified upper bound for sum_{p prime, p > bound} 1/p^k with k >= 2.

    Uses sum_{m > bound} 1/m^k <= integral_bound^inf t^-k dt
    = bound^(1-k) / (k-1), evaluated with upward rounding.
    """
    if k < 2 or bound < 1:
        raise ValueError("need k >= 2 and bound >= 1")
    raw = 1.0 / ((k - 1) * bound ** (k - 1))
    return math.nextafter(math.nextafter(raw, math.inf), math.inf)
