"""Finite patches of the weak model set V = Gamma \\ union(Gamma_n).

Generation over boxes and balls, exact gcd/sieve specialisations for the
visible-points and k-free presets, density estimation over increasing
regions, the maximality verdict, and hole construction by simultaneous
congruences.

Patches keep their points as a lexicographically sorted (n, d) int64 array;
every generator checks that coordinates fit and falls back to exact Python
integers only in the congruence machinery, where entries can be huge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import lattices as lat
from .errors import BadExponent, VerificationFailed
from .family import (CoprimeFamily, PRESET_KFREE, PRESET_VISIBLE,
                     model_density, tail_density_bound)
from .intervals import BoundedValue

_INT64_SAFE = 2 ** 62


@dataclass(frozen=True)
class Region:
    """A centred box (Chebyshev ball) or Euclidean ball of lattice sites.

    `volume` is the exact number of Z^d points in the region: for boxes
    this equals the Euclidean volume (2r+1)^d of the fattened box, and for
    balls the lattice-point count keeps density quotients self-consistent
    at desk-scale radii, where pi r^2 would visibly disagree.
    """

    shape: str  # "box" | "ball"
    radius: int
    dim: int
    center: tuple[int, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.shape not in ("box", "ball"):
            raise ValueError(f"unknown region shape {self.shape!r}")
        if self.radius < 1:
            raise ValueError("region radius must be >= 1")
        if self.center is None:
            object.__setattr__(self, "center", (0,) * self.dim)
        elif len(self.center) != self.dim:
            raise ValueError("center dimension mismatch")

    @property
    def volume(self) -> int:
        if self.shape == "box":
            return (2 * self.radius + 1) ** self.dim
        return _ball_count(self.radius * self.radius, self.dim)

    def bounds(self) -> list[tuple[int, int]]:
        return [(c - self.radius, c + self.radius) for c in self.center]

    def contains(self, point: Sequence[int]) -> bool:
        rel = [p - c for p, c in zip(point, self.center)]
        if self.shape == "box":
            return all(abs(v) <= self.radius for v in rel)
        return sum(v * v for v in rel) <= self.radius * self.radius

    def shrink(self, by: int) -> "Region":
        return Region(self.shape, self.radius - by, self.dim, self.center)


def _ball_count(r_sq: int, dim: int) -> int:
    if dim == 0:
        return 1
    if dim == 1:
        return 2 * math.isqrt(r_sq) + 1
    total = 0
    top = math.isqrt(r_sq)
    for x in range(-top, top + 1):
        total += _ball_count(r_sq - x * x, dim - 1)
    return total


@dataclass(frozen=True)
class Patch:
    """A finite piece of a point set: the points inside `region`."""

    points: np.ndarray  # (n, d) int64, lexicographically sorted
    region: Region
    family_tag: str

    @property
    def count(self) -> int:
        return int(self.points.shape[0])

    def point_set(self) -> set[tuple[int, ...]]:
        return set(map(tuple, self.points.tolist()))


@dataclass(frozen=True)
class DensityEstimate:
    count: int
    volume: float
    value: float
    region: Region


class DensitySequence(NamedTuple):
    estimates: list[DensityEstimate]
    running_min: list[float]  # finite-scale proxy for the lower density
    running_max: list[float]  # finite-scale proxy for the upper density


def _sorted_patch(points: np.ndarray, region: Region, tag: str) -> Patch:
    if points.size == 0:
        return Patch(points.reshape(0, region.dim).astype(np.int64), region, tag)
    order = np.lexsort(tuple(points[:, i] for i in reversed(range(points.shape[1]))))
    return Patch(np.ascontiguousarray(points[order]), region, tag)


def _region_grids(region: Region):
    """Coordinate axes arrays spanning the region's bounding box."""
    return [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in region.bounds()]


def _axis_shape(dim: int, axis: int) -> tuple[int, ...]:
    shape = [1] * dim
    shape[axis] = -1
    return tuple(shape)


def _region_mask(region: Region, axes) -> Optional[np.ndarray]:
    if region.shape == "box":
        return None
    d = region.dim
    sq = None
    for i in range(d):
        term = ((axes[i] - region.center[i]) ** 2).reshape(_axis_shape(d, i))
        sq = term if sq is None else sq + term
    return sq <= region.radius * region.radius


def _mask_to_patch(mask: np.ndarray, region: Region, tag: str) -> Patch:
    axes = _region_grids(region)
    idx = np.argwhere(mask)
    pts = np.empty_like(idx, dtype=np.int64)
    for i, ax in enumerate(axes):
        pts[:, i] = ax[idx[:, i]]
    return _sorted_patch(pts, region, tag)


def generate(f: CoprimeFamily, region: Region, N: int) -> Patch:
    """Points of Gamma in the region avoiding the first N members.

    This is a superset of V ∩ region: points only excluded by members
    beyond N survive, so downstream density estimates must be widened by
    tail_density_bound(f, N).
    """
    if N < 1:
        raise ValueError("truncation level N must be >= 1")
    if region.dim != f.dim:
        raise ValueError("region dimension does not match the family")
    N = f.effective_truncation(N)
    scalars = f.scalar_members(N)
    bound = max(abs(v) for lo, hi in region.bounds() for v in (lo, hi))
    if scalars is not None and bound < _INT64_SAFE:
        axes = _region_grids(region)
        d = region.dim
        excluded = np.zeros(tuple(len(ax) for ax in axes), dtype=bool)
        for a in scalars:
            hit = None
            for i in range(d):
                axis_hit = ((axes[i] % a) == 0).reshape(_axis_shape(d, i))
                hit = axis_hit if hit is None else hit & axis_hit
            excluded |= hit
        keep = ~excluded
        rmask = _region_mask(region, axes)
        if rmask is not None:
            keep &= rmask
        return _mask_to_patch(keep, region, f.tag)
    # general path: exact iteration over Gamma ∩ region
    members = f.members(N)
    pts = []
    for x in _gamma_points(f.gamma, region):
        if any(lat.contains(m, x) for m in members):
            continue
        pts.append(x)
    arr = np.array(pts, dtype=np.int64).reshape(len(pts), region.dim)
    return _sorted_patch(arr, region, f.tag)


def _gamma_points(gamma: lat.CanonicalLattice, region: Region):
    if gamma.is_identity():
        for x in iter_product(*[range(lo, hi + 1) for lo, hi in region.bounds()]):
            if region.contains(x):
                yield x
    else:
        for x in lat.lattice_points_in_box(gamma, region.bounds()):
            if region.contains(x):
                yield x


def generate_visible(region: Region) -> Patch:
    """Exact V ∩ region for the visible points of Z^2 (gcd predicate)."""
    if region.dim != 2:
        raise ValueError("visible points live in Z^2")
    xs, ys = _region_grids(region)
    mask = np.gcd.outer(xs, ys) == 1
    rmask = _region_mask(region, [xs, ys])
    if rmask is not None:
        mask &= rmask
    return _mask_to_patch(mask, region, PRESET_VISIBLE)


def generate_kfree(k: int, region: Region) -> Patch:
    """Exact k-free integers in a 1-d region via a power sieve, 0 excluded."""
    if k < 2:
        raise BadExponent(f"k must be >= 2, got {k}")
    if region.dim != 1:
        raise ValueError("k-free integers live in Z")
    lo, hi = region.bounds()[0]
    values = np.arange(lo, hi + 1, dtype=np.int64)
    keep = values != 0
    top = int(max(abs(lo), abs(hi)))
    limit = int(round(top ** (1.0 / k))) + 2
    for p in _primes_np(limit):
        q = int(p) ** k
        if q > top:
            continue
        first = -(lo % q) % q
        keep[first::q] = False
    pts = values[keep].reshape(-1, 1)
    return _sorted_patch(pts, region, f"kfree-{k}")


def _primes_np(n: int) -> np.ndarray:
    if n < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return np.nonzero(flags)[0].astype(np.int64)


def density_estimate(p: Patch) -> DensityEstimate:
    vol = p.region.volume
    return DensityEstimate(p.count, float(vol), p.count / vol, p.region)


def _best_patch(f: CoprimeFamily, region: Region, N: int) -> tuple[Patch, float]:
    """Exact generator when the preset admits one, else truncated generate.
    Returns the patch and the truncation excess bound on its density."""
    if f.preset_tag == PRESET_VISIBLE:
        return generate_visible(region), 0.0
    if f.preset_tag == PRESET_KFREE:
        return generate_kfree(f.kfree_k, region), 0.0
    if f.is_finite:
        return generate(f, region, f.size), 0.0
    return generate(f, region, N), tail_density_bound(f, N)


def density_sequence(f: CoprimeFamily, radii: Sequence[int], N: int,
                     shape: str = "box") -> DensitySequence:
    estimates = []
    for r in radii:
        patch, _ = _best_patch(f, Region(shape, r, f.dim), N)
        estimates.append(density_estimate(patch))
    run_min, run_max = [], []
    lo = math.inf
    hi = -math.inf
    for e in estimates:
        lo = min(lo, e.value)
        hi = max(hi, e.value)
        run_min.append(lo)
        run_max.append(hi)
    return DensitySequence(estimates, run_min, run_max)


@dataclass
class MaximalityReport:
    verdict: str  # "CONSISTENT" | "INCONSISTENT"
    model: BoundedValue
    tail_bound: float
    estimates: list[DensityEstimate]
    margins: list[float]  # distance left before the widened interval is violated
    widenings: list[float]
    exact_generation: bool

    @property
    def worst_margin(self) -> float:
        return min(self.margins)


def boundary_ratio(region: Region, reach: int = 1) -> float:
    """Fraction of region sites within `reach` of the boundary: the exact
    share for boxes, a Chebyshev-shell bound for balls."""
    if region.shape == "box":
        inner = max(0, 2 * (region.radius - reach) + 1) ** region.dim
        return 1.0 - inner / region.volume
    if region.radius <= reach:
        return 1.0
    inner = _ball_count((region.radius - reach) ** 2, region.dim)
    return 1.0 - inner / region.volume


def maximality_report(f: CoprimeFamily, radii: Sequence[int], N: int,
                      shape: str = "box",
                      boundary_factor: float = 4.0) -> MaximalityReport:
    """Compare empirical densities against the model prediction.

    Each estimate must fall inside the model interval widened by the
    truncation excess plus a finite-size allowance proportional to the
    boundary share of the region (no convergence rate is available for
    these estimates, so the allowance factor is an engineering choice,
    reported explicitly).
    """
    model = model_density(f, N)
    tail = tail_density_bound(f, N)  # raises NoTailBound when unavailable
    estimates = []
    margins = []
    widenings = []
    exact = f.preset_tag in (PRESET_VISIBLE, PRESET_KFREE) or f.is_finite
    for r in radii:
        region = Region(shape, r, f.dim)
        patch, excess = _best_patch(f, region, N)
        est = density_estimate(patch)
        widen = excess + boundary_factor * boundary_ratio(region) * model.upper
        low = model.lower - widen
        high = model.upper + widen
        margins.append(min(est.value - low, high - est.value))
        widenings.append(widen)
        estimates.append(est)
    verdict = "CONSISTENT" if all(m >= 0 for m in margins) else "INCONSISTENT"
    return MaximalityReport(verdict, model, tail, estimates, margins,
                            widenings, exact)


class HoleResult(NamedTuple):
    t: tuple[int, ...]
    m: int
    assignments: list[tuple[tuple[int, ...], int, tuple[int, ...], str]]
    # each entry: (offset, member number, t + offset, witness description)


def find_hole(f: CoprimeFamily, m: int) -> HoleResult:
    """A translation t with (t + [-m, m]^d) ∩ V empty.

    Each box offset is assigned a distinct family member in index order and
    t solves t ≡ -offset modulo that member; the coprimality of the family
    makes the system solvable.  Every point of the block is re-verified
    with the exact membership predicate before returning.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    d = f.dim
    offsets = sorted(iter_product(*[range(-m, m + 1)] * d))
    need = len(offsets)
    if f.is_finite and f.size < need:
        raise ValueError(f"family has {f.size} members; need {need} for m={m}")
    members = [f.member(n) for n in range(1, need + 1)]
    residues = [tuple(-o for o in off) for off in offsets]
    t, modulus = lat.solve_congruences(residues, members)
    if all(c == 0 for c in t):
        # 0 itself is a valid hole centre, but prefer a visibly nonzero one
        t = tuple(a + b for a, b in zip(t, modulus.column(0)))
    assignments = []
    for off, member, n in zip(offsets, members, range(1, need + 1)):
        point = tuple(a + b for a, b in zip(t, off))
        if not lat.contains(member, point):
            raise VerificationFailed(f"{point} escaped member {n}")
        witness = _hole_witness(f, n, point)
        if witness is None:
            raise VerificationFailed(f"{point} fails the exact membership predicate")
        assignments.append((off, n, point, witness))
    return HoleResult(t, m, assignments)


def _hole_witness(f: CoprimeFamily, n: int, point: tuple[int, ...]) -> Optional[str]:
    """Independent arithmetic check that `point` lies outside V."""
    if f.preset_tag == PRESET_VISIBLE:
        g = math.gcd(*point)
        return f"gcd={g}" if g != 1 else None
    if f.preset_tag == PRESET_KFREE:
        from .primes import first_primes
        q = first_primes(n)[-1] ** f.kfree_k
        return f"{q} divides {point[0]}" if point[0] % q == 0 else None
    if lat.contains(f.member(n), point):
        return f"member {n} contains the point"
    return None
