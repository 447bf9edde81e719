"""Pure-point diffraction: spectral support, amplitudes, intensities.

The spectrum is the direct sum of the dual member lattices.  Every point k
of it has a unique minimal support set F_k, and the amplitude is
dens(V) * prod_{n in F_k} 1/(1 - [Gamma:Gamma_n]); its square is the
intensity.  An independent inclusion-exclusion evaluation of the same
amplitude and a volume-normalised exponential sum over finite patches
serve as cross-checks.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import Optional, Sequence

import numpy as np

from . import lattices as lat
from .errors import DenominatorNotSquareFree, NotInSpectrum, SupportNotCovered
from .family import (CoprimeFamily, PRESET_KFREE, PRESET_VISIBLE, model_density,
                     model_density_exact)
from .intervals import BoundedValue, six_over_pi_squared
from .pointsets import Patch
from .primes import distinct_prime_factors, is_squarefree, primes_upto

Box = Sequence[tuple[Fraction, Fraction]]  # half-open [lo, hi) per axis


@dataclass(frozen=True, order=True)
class RationalPoint:
    """A point of Q^d with fully reduced coordinates."""

    coords: tuple[Fraction, ...]

    @staticmethod
    def of(*values) -> "RationalPoint":
        return RationalPoint(tuple(Fraction(v) for v in values))

    @staticmethod
    def parse(text: str) -> "RationalPoint":
        return RationalPoint(tuple(Fraction(part.strip())
                                   for part in text.split(",")))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def denominator(self) -> int:
        """lcm of the coordinate denominators."""
        den = 1
        for c in self.coords:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return den

    def __neg__(self) -> "RationalPoint":
        return RationalPoint(tuple(-c for c in self.coords))

    def translate(self, v: Sequence[int]) -> "RationalPoint":
        return RationalPoint(tuple(c + int(w) for c, w in zip(self.coords, v)))

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class SpectralLine:
    k: RationalPoint
    support_set: tuple[int, ...]  # minimal F_k as 1-based member numbers
    amplitude: BoundedValue
    intensity: BoundedValue
    rel_intensity: Fraction  # I(k)/I(0) = prod 1/(idx-1)^2, exact


@dataclass
class SpectrumTable:
    lines: list[SpectralLine]
    window_region: list[tuple[Fraction, Fraction]]
    threshold: float
    family_tag: str


# -- minimal support -----------------------------------------------------------


def _scalar_support(k: RationalPoint,
                    scalars: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Minimal support for scalar members a_n Z^d, by factoring the lcm
    denominator out of the a_n; None when k is outside the spectrum."""
    den = k.denominator()
    if den == 1:
        return ()
    support = []
    residual = den
    for n, a in enumerate(scalars, start=1):
        if math.gcd(a, residual) > 1:
            support.append(n)
            g = math.gcd(a, residual)
            while g > 1:
                residual //= g
                g = math.gcd(a, residual)
    if residual != 1:
        return None
    prod = 1
    for n in support:
        prod *= scalars[n - 1]
    if prod % den != 0:
        return None
    return tuple(support)


def _scalar_prefix(f: CoprimeFamily, k: RationalPoint) -> Optional[list[int]]:
    """Scalar values of enough leading members to decide membership of k,
    aligned with the family's member numbering; None for non-scalar families."""
    if f.is_finite:
        return f.scalar_members(f.size)
    den = k.denominator()
    largest = max(distinct_prime_factors(den), default=2)
    if f.preset_tag == PRESET_VISIBLE:
        return list(primes_upto(max(largest, 2)))
    if f.preset_tag == PRESET_KFREE:
        return [p ** f.kfree_k for p in primes_upto(max(largest, 2))]
    return None


def minimal_support(f: CoprimeFamily, k: RationalPoint) -> tuple[int, ...]:
    """The unique minimal F with k in the direct sum of the duals over F,
    as a sorted tuple of 1-based member numbers."""
    if k.dim != f.dim:
        raise ValueError("dimension mismatch")
    scalars = _scalar_prefix(f, k)
    if scalars is not None:
        sup = _scalar_support(k, scalars)
        if sup is None:
            raise NotInSpectrum(f"{k} is not in the spectrum")
        return sup
    # general finite family: membership elimination on the full member list
    size = f.size
    members = f.members(size)
    full = lat.family_intersection(f.gamma, members, range(1, size + 1))
    if not lat.dual_contains(full, k.coords):
        raise NotInSpectrum(f"{k} is not in the spectrum")
    support = []
    for n in range(1, size + 1):
        rest = [m for m in range(1, size + 1) if m != n]
        without = lat.family_intersection(f.gamma, members, rest)
        if not lat.dual_contains(without, k.coords):
            support.append(n)
    return tuple(support)


# -- amplitudes ----------------------------------------------------------------


def _support_factor(f: CoprimeFamily, support: Sequence[int]) -> Fraction:
    """prod_{n in F} 1/(1 - [Gamma:Gamma_n]), exact and signed."""
    factor = Fraction(1)
    for n in support:
        factor *= Fraction(1, 1 - f.member_index(n))
    return factor


def amplitude(f: CoprimeFamily, k: RationalPoint, N: int) -> BoundedValue:
    """Enclosure of a(k) = dens(V) * prod_{n in F_k} 1/(1 - idx_n)."""
    support = minimal_support(f, k)  # raises NotInSpectrum
    return model_density(f, N).scale_exact(_support_factor(f, support))


def amplitude_exact(f: CoprimeFamily, k: RationalPoint) -> Fraction:
    """Exact amplitude for a finite family."""
    support = minimal_support(f, k)
    return model_density_exact(f) * _support_factor(f, support)


def intensity_visible(k: RationalPoint) -> BoundedValue:
    """The visible-points intensity I(k) = (6/pi^2 * prod_{p | den} 1/(1-p^2))^2,
    defined for k in Q^2 with square-free lcm denominator."""
    if k.dim != 2:
        raise ValueError("visible points live in Z^2")
    den = k.denominator()
    if not is_squarefree(den):
        raise DenominatorNotSquareFree(f"denominator {den} is not square-free")
    factor = Fraction(1)
    for p in distinct_prime_factors(den):
        factor *= Fraction(1, 1 - p * p)
    return six_over_pi_squared().scale_exact(factor).square()


def empirical_amplitude(p: Patch, k: RationalPoint) -> complex:
    """(1/vol) * sum over patch points of exp(-2 pi i k.t).

    The phase k.t is reduced modulo 1 in integer arithmetic first: with q
    the lcm denominator, each point contributes a q-th root of unity, so
    the sum collapses to exact integer counts of the q phase classes.  The
    final q-term reduction runs in a fixed order, making the result
    independent of any point partitioning.
    """
    vol = p.region.volume
    if p.count == 0:
        return 0.0 + 0.0j
    q = k.denominator()
    if q > 10 ** 7:
        raise ValueError(f"denominator {q} too large for phase-class reduction")
    mults = [int(c * q) for c in k.coords]  # k_i = mults_i / q
    phase = np.zeros(p.count, dtype=np.int64)
    for i, m in enumerate(mults):
        if m % q:
            phase += (m % q) * (p.points[:, i] % q)
    counts = np.bincount(phase % q, minlength=q)
    total = 0.0 + 0.0j
    for j in range(q):
        c = int(counts[j])
        if c:
            total += c * cmath.exp(-2j * cmath.pi * j / q)
    return total / vol


def inclusion_exclusion_amplitude(f: CoprimeFamily, k: RationalPoint,
                                  M: int) -> BoundedValue:
    """Independent evaluation of a(k) from the alternating sum over subsets
    F of the first M members with F containing F_k,

        sum_F (-1)^|F| dens(Gamma) / prod_{m in F} idx_m,

    which collapses exactly to a signed product over [M]; the members
    beyond M multiply the true value by a factor inside [1 - tail, 1].
    """
    support = minimal_support(f, k)
    M = f.effective_truncation(M)
    if any(n > M for n in support):
        raise SupportNotCovered(f"F_k = {support} not within the first {M} members")
    partial = f.density_factor()
    for n in support:
        partial *= Fraction(-1, f.member_index(n))
    for n in range(1, M + 1):
        if n not in support:
            idx = f.member_index(n)
            partial *= Fraction(idx - 1, idx)
    if f.is_finite:
        return BoundedValue.exact(partial)
    tail = f.tail_index_sum_bound(M)
    return BoundedValue(max(0.0, 1.0 - tail), 1.0).scale_exact(partial)


# -- spectrum enumeration --------------------------------------------------------


def _admissible_supports(f: CoprimeFamily, threshold: float):
    """All support sets F with relative intensity prod (idx_n - 1)^-2 at or
    above the threshold, as (member numbers, exact relative intensity).
    Member indices of the infinite presets are increasing, so a prefix scan
    with multiplicative pruning is exhaustive."""
    if threshold <= 0:
        raise ValueError("threshold must be positive to keep the support finite")
    thr = Fraction(threshold)
    if f.is_finite:
        candidates = list(range(1, f.size + 1))
    else:
        candidates = []
        n = 1
        while Fraction(1, (f.member_index(n) - 1) ** 2) >= thr:
            candidates.append(n)
            n += 1
    out: list[tuple[tuple[int, ...], Fraction]] = []

    def extend(prefix: tuple[int, ...], weight: Fraction, start: int):
        out.append((prefix, weight))
        for pos in range(start, len(candidates)):
            n = candidates[pos]
            w = weight * Fraction(1, (f.member_index(n) - 1) ** 2)
            if w >= thr:
                extend(prefix + (n,), w, pos + 1)

    extend((), Fraction(1), 0)
    return out


def _box_int_range(lo: Fraction, hi: Fraction, q: int) -> range:
    """Integers v with lo <= v/q < hi."""
    start = math.ceil(lo * q)
    stop = math.ceil(hi * q)
    return range(start, stop)


def _points_with_support(f: CoprimeFamily, support: tuple[int, ...],
                         box: Box) -> list[RationalPoint]:
    """Spectrum points in the box whose minimal support is exactly `support`."""
    all_scalar = f.scalar_members(max(support) if support else 0)
    if all_scalar is not None:
        # scalar fast path: dual of the joint lattice is (1/Q) Z^d
        Q = 1
        factors = []
        for n in support:
            a = all_scalar[n - 1]
            Q *= a
            factors.append(a)
        points = []
        axes = [list(_box_int_range(lo, hi, Q)) for lo, hi in box]
        for v in iter_product(*axes):
            # minimality: dropping member n must expel k, i.e. some
            # coordinate numerator must not be divisible by a_n
            if all(any(vi % a for vi in v) for a in factors):
                points.append(RationalPoint(tuple(Fraction(vi, Q) for vi in v)))
        return points
    members = [f.member(n) for n in support]
    group = lat.family_intersection(f.gamma, members, range(1, len(members) + 1))
    points = []
    for k in _dual_points_in_box(group, box):
        if _is_minimal_support(f, k, support):
            points.append(k)
    return points


def _dual_points_in_box(L: lat.CanonicalLattice, box: Box) -> list[RationalPoint]:
    """Points of the dual lattice L^* in a half-open box [lo, hi)^d."""
    d = L.dim
    dual_rows = lat.dual_basis(L)
    cols = L.columns()
    corners = list(iter_product(*[(lo, hi) for lo, hi in box]))
    ranges = []
    for i in range(d):
        vals = [sum(Fraction(corner[j]) * cols[i][j] for j in range(d))
                for corner in corners]
        ranges.append(range(math.floor(min(vals)) - 1, math.ceil(max(vals)) + 2))
    out = []
    for coeffs in iter_product(*ranges):
        k = tuple(sum(dual_rows[i][j] * coeffs[j] for j in range(d))
                  for i in range(d))
        if all(lo <= k[i] < hi for i, (lo, hi) in enumerate(box)):
            out.append(RationalPoint(k))
    return out


def _is_minimal_support(f: CoprimeFamily, k: RationalPoint,
                        support: Sequence[int]) -> bool:
    for drop in support:
        rest = [f.member(n) for n in support if n != drop]
        group = lat.family_intersection(f.gamma, rest, range(1, len(rest) + 1))
        if lat.dual_contains(group, k.coords):
            return False
    return True


def spectral_support(f: CoprimeFamily, box: Box, threshold: float,
                     N: int) -> list[RationalPoint]:
    """All spectrum points in the half-open dual box whose closed-form
    relative intensity clears the threshold, sorted lexicographically."""
    found = []
    for support, _weight in _admissible_supports(f, threshold):
        found.extend(_points_with_support(f, support, box))
    return sorted(found)


def spectrum_table(f: CoprimeFamily, box: Box, threshold: float,
                   N: int) -> SpectrumTable:
    """Fully populated spectral lines in the box, sorted by decreasing
    relative intensity then lexicographic k; deterministic."""
    density = model_density(f, N)
    lines = []
    for support, weight in _admissible_supports(f, threshold):
        amp = density.scale_exact(_support_factor(f, support))
        intensity = amp.square()
        for k in _points_with_support(f, support, box):
            lines.append(SpectralLine(k, support, amp, intensity, weight))
    lines.sort(key=lambda l: (-l.rel_intensity, l.k))
    return SpectrumTable(lines, [tuple(b) for b in box], threshold, f.tag)
