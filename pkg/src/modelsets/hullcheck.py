"""Finite-scale hull admissibility and patch frequencies for visible points.

The hull of the visible points consists of the subsets of Z^2 missing at
least one coset modulo p Z^2 for every prime p; `admissible` checks this
up to a prime bound and produces a witness coset per prime.  Patch
frequencies are estimated empirically by scanning translations and
enclosed exactly by a residue-counting inclusion-exclusion over primes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import PatternLargerThanRegion, PatternTooLarge
from .intervals import BoundedValue, product_enclosure
from .pointsets import DensityEstimate, Patch, Region
from .primes import primes_upto, reciprocal_power_tail

_MAX_PATTERN_POINTS = 9


def ball_sites(rho: int, dim: int = 2) -> list[tuple[int, ...]]:
    """Lattice points of the closed Euclidean ball of radius rho."""
    from itertools import product as iter_product
    out = []
    for x in iter_product(*[range(-rho, rho + 1)] * dim):
        if sum(v * v for v in x) <= rho * rho:
            out.append(x)
    return sorted(out)


@dataclass(frozen=True)
class PatchPattern:
    """Occupancy constraints on the sites of the ball B_rho(0).

    Sites listed in neither set are unconstrained: frequencies refer to the
    cylinder over the listed constraints only.  A full pattern constrains
    every ball site.
    """

    rho: int
    occupied: frozenset[tuple[int, ...]]
    empty: frozenset[tuple[int, ...]]

    def __post_init__(self):
        overlap = self.occupied & self.empty
        if overlap:
            raise ValueError(f"sites {sorted(overlap)} marked both occupied and empty")
        sites = set(ball_sites(self.rho, self._dim()))
        stray = (self.occupied | self.empty) - sites
        if stray:
            raise ValueError(f"sites {sorted(stray)} outside the rho-ball")

    def _dim(self) -> int:
        for s in self.occupied | self.empty:
            return len(s)
        return 2

    @staticmethod
    def of(rho: int, occupied: Sequence[Sequence[int]],
           empty: Sequence[Sequence[int]] = ()) -> "PatchPattern":
        return PatchPattern(rho,
                            frozenset(tuple(map(int, s)) for s in occupied),
                            frozenset(tuple(map(int, s)) for s in empty))

    @staticmethod
    def from_dict(desc: dict) -> "PatchPattern":
        return PatchPattern.of(int(desc["rho"]), desc.get("occupied", ()),
                               desc.get("empty", ()))

    def constrained(self) -> int:
        return len(self.occupied) + len(self.empty)


@dataclass
class AdmissibilityReport:
    admissible: bool
    witnesses: dict[int, Optional[tuple[int, int]]]  # prime -> missed coset
    failing: list[int]


def admissible(p: Patch, prime_bound: int) -> AdmissibilityReport:
    """For every prime q <= prime_bound, find a coset of q Z^2 disjoint from
    the patch.  Failure at any prime rules the patch out of the hull."""
    witnesses: dict[int, Optional[tuple[int, int]]] = {}
    failing: list[int] = []
    pts = p.points
    for q in primes_upto(prime_bound):
        if pts.shape[0] == 0:
            witnesses[q] = (0, 0)
            continue
        codes = (pts[:, 0] % q) * q + (pts[:, 1] % q)
        hit = np.zeros(q * q, dtype=bool)
        hit[np.unique(codes)] = True
        free = np.nonzero(~hit)[0]
        if free.size:
            witnesses[q] = (int(free[0]) // q, int(free[0]) % q)
        else:
            witnesses[q] = None
            failing.append(q)
    return AdmissibilityReport(not failing, witnesses, failing)


def patch_frequency_empirical(v: Patch, pattern: PatchPattern) -> DensityEstimate:
    """Density of translations t in the shrunken region with t + site in V
    for every occupied site and t + site outside V for every empty site."""
    if pattern.rho >= v.region.radius:
        raise PatternLargerThanRegion(
            f"pattern radius {pattern.rho} too large for region radius {v.region.radius}")
    inner = v.region.shrink(pattern.rho)
    bounds = v.region.bounds()
    origins = [lo for lo, _ in bounds]
    shape = tuple(hi - lo + 1 for lo, hi in bounds)
    grid = np.zeros(shape, dtype=bool)
    if v.count:
        idx = tuple(v.points[:, i] - origins[i] for i in range(v.region.dim))
        grid[idx] = True
    ib = inner.bounds()
    base = tuple(slice(lo - o, hi - o + 1) for (lo, hi), o in zip(ib, origins))
    ok = np.ones(tuple(hi - lo + 1 for lo, hi in ib), dtype=bool)

    def shifted(site):
        return tuple(slice(s.start + c, s.stop + c) for s, c in zip(base, site))

    for site in sorted(pattern.occupied):
        ok &= grid[shifted(site)]
    for site in sorted(pattern.empty):
        ok &= ~grid[shifted(site)]
    if inner.shape == "ball":
        axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in ib]
        rel = [ax - c for ax, c in zip(axes, inner.center)]
        sq = rel[0][:, None] ** 2 + rel[1][None, :] ** 2
        ok &= sq <= inner.radius * inner.radius
    count = int(np.count_nonzero(ok))
    vol = inner.volume
    return DensityEstimate(count, float(vol), count / vol, inner)


def patch_frequency_exact(pattern: PatchPattern, prime_bound: int) -> BoundedValue:
    """Certified enclosure of the pattern frequency for the visible points.

    For a translation t, an occupied site x requires t + x to avoid the
    zero coset of every p Z^2, and an empty site requires some certifying
    prime with t + x in p Z^2.  Expanding the empty-site requirement by
    inclusion-exclusion leaves, for each subset S of the empty sites, the
    all-avoiding event whose density factorises over primes as
    1 - c_p/p^2 with c_p the number of distinct cosets hit by the
    constrained sites.  Primes beyond the bound contribute a factor inside
    [1 - s/prime_bound, 1].
    """
    sites = pattern.occupied | pattern.empty
    if len(sites) > _MAX_PATTERN_POINTS:
        raise PatternTooLarge(f"pattern has {len(sites)} sites; limit {_MAX_PATTERN_POINTS}")
    span = max((abs(c) for s in sites for c in s), default=0)
    if span >= prime_bound:
        raise ValueError("prime bound must exceed every pattern coordinate")
    ps = primes_upto(prime_bound)
    tail = reciprocal_power_tail(ps[-1], 2) if ps else 1.0
    empties = sorted(pattern.empty)
    total = BoundedValue.exact(0)
    from itertools import combinations
    for size in range(len(empties) + 1):
        for chosen in combinations(empties, size):
            constrained = pattern.occupied | set(chosen)
            factors = []
            for q in ps:
                cosets = {tuple(c % q for c in s) for s in constrained}
                factors.append(Fraction(q * q - len(cosets), q * q))
            term = product_enclosure(factors,
                                     tail_deficit=len(constrained) * tail)
            total = total + term if size % 2 == 0 else total - term
    return total


def pattern_frequency_table(v: Patch, rho: int) -> dict[PatchPattern, DensityEstimate]:
    """Empirical frequencies of all full patterns at radius rho (every ball
    site constrained).  Their counts partition the translations, so the
    frequencies sum to exactly one."""
    from itertools import product as iter_product
    sites = ball_sites(rho, v.region.dim)
    out = {}
    for assignment in iter_product((False, True), repeat=len(sites)):
        occupied = [s for s, occ in zip(sites, assignment) if occ]
        empty = [s for s, occ in zip(sites, assignment) if not occ]
        pattern = PatchPattern.of(rho, occupied, empty)
        out[pattern] = patch_frequency_empirical(v, pattern)
    return out
