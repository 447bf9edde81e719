"""Empirical autocorrelation of finite patches versus the model prediction.

The empirical coefficient at shift z counts pairs x, x - z with both
endpoints inside the patch (the restricted-measure convolution), divided
by the region volume.  The theoretical coefficient is dens(L) times the
covariogram at the star image of z.  The sandwich check verifies the
two-sided measure inequality with explicit finite-size slack.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import lattices as lat
from .errors import NotInGamma, ShiftNotInGamma
from .family import CoprimeFamily, covariogram, covariogram_exact
from .intervals import BoundedValue
from .pointsets import Patch, Region, boundary_ratio

Shift = tuple[int, ...]


@dataclass
class AutocorrEntry:
    pair_count: int
    empirical: float
    theoretical: Optional[BoundedValue] = None


@dataclass
class AutocorrTable:
    entries: dict[Shift, AutocorrEntry]
    region: Region
    normalization: float  # region volume used for every coefficient
    family_tag: str

    def shifts(self) -> list[Shift]:
        return sorted(self.entries)


def _patch_grid(p: Patch) -> tuple[np.ndarray, list[int]]:
    """Boolean occupancy grid over the region's bounding box, plus origins."""
    bounds = p.region.bounds()
    origins = [lo for lo, _ in bounds]
    shape = tuple(hi - lo + 1 for lo, hi in bounds)
    grid = np.zeros(shape, dtype=bool)
    if p.count:
        idx = tuple(p.points[:, i] - origins[i] for i in range(p.region.dim))
        grid[idx] = True
    return grid, origins


def _shifted_overlap(grid: np.ndarray, z: Shift) -> int:
    """Number of occupied x with x - z also occupied (both inside the grid)."""
    a_slices, b_slices = [], []
    for size, dz in zip(grid.shape, z):
        if abs(dz) >= size:
            return 0
        if dz >= 0:
            a_slices.append(slice(dz, size))
            b_slices.append(slice(0, size - dz))
        else:
            a_slices.append(slice(0, size + dz))
            b_slices.append(slice(-dz, size))
    return int(np.count_nonzero(grid[tuple(a_slices)] & grid[tuple(b_slices)]))


def empirical_autocorr(p: Patch, shifts: Sequence[Shift],
                       gamma: Optional[lat.CanonicalLattice] = None) -> AutocorrTable:
    """Pair counts per shift, normalised by the region volume.

    When `gamma` is supplied, shifts outside it are rejected; bare patches
    are treated as subsets of Z^d.
    """
    if gamma is not None:
        for z in shifts:
            if not lat.contains(gamma, z):
                raise ShiftNotInGamma(f"shift {z} is not in Gamma")
    grid, _ = _patch_grid(p)
    vol = p.region.volume
    entries = {}
    for z in shifts:
        z = tuple(int(c) for c in z)
        pairs = _shifted_overlap(grid, z)
        entries[z] = AutocorrEntry(pairs, pairs / vol)
    return AutocorrTable(entries, p.region, float(vol), p.family_tag)


def theoretical_autocorr(f: CoprimeFamily, z: Sequence[int], N: int) -> BoundedValue:
    """gamma({z}) = dens(L) * c_W(z*), as an enclosure."""
    return covariogram(f, z, N).scale_exact(f.density_factor())


def theoretical_autocorr_exact(f: CoprimeFamily, z: Sequence[int]) -> Fraction:
    """Exact rational autocorrelation coefficient for a finite family."""
    return covariogram_exact(f, z) * f.density_factor()


def attach_theoretical(f: CoprimeFamily, table: AutocorrTable, N: int) -> AutocorrTable:
    for z, entry in table.entries.items():
        entry.theoretical = theoretical_autocorr(f, z, N)
    return table


def autocorr_table(f: CoprimeFamily, p: Patch, shifts: Sequence[Shift],
                   N: int) -> AutocorrTable:
    table = empirical_autocorr(p, shifts, gamma=f.gamma)
    return attach_theoretical(f, table, N)


@dataclass
class SandwichEntry:
    shift: Shift
    empirical: float
    theo_lower: float
    theo_upper: float
    slack: float
    upper_margin: float  # theo_upper + slack - empirical
    lower_margin: float  # empirical - lower bound


@dataclass
class SandwichReport:
    entries: list[SandwichEntry]
    passed: bool
    worst_margin: float


def sandwich_check(f: CoprimeFamily, table: AutocorrTable,
                   truncation_excess: float = 0.0,
                   boundary_factor: float = 4.0) -> SandwichReport:
    """Verify 0 <= empirical(z) <= theoretical_upper(z) + slack for every
    tabulated shift.

    The slack combines a finite-size allowance proportional to the share of
    region sites near the boundary (at least one site deep, since even the
    zero-shift coefficient fluctuates like a density estimate) with any
    truncation excess of the patch generator.  For the infinite presets the
    window has empty interior, so the lower bound is plain nonnegativity;
    for finite families the exact coefficient itself bounds from below.
    """
    entries = []
    for z, e in table.entries.items():
        if e.theoretical is None:
            raise ValueError("table has no theoretical values; attach them first")
        reach = max(max(abs(c) for c in z), 1)
        slack = truncation_excess + \
            boundary_factor * boundary_ratio(table.region, reach) * e.theoretical.upper
        upper_margin = e.theoretical.upper + slack - e.empirical
        if f.is_finite:
            lower_margin = e.empirical - (e.theoretical.lower - slack)
        else:
            lower_margin = e.empirical  # c_{W interior} is identically zero
        entries.append(SandwichEntry(z, e.empirical, e.theoretical.lower,
                                     e.theoretical.upper, slack,
                                     upper_margin, lower_margin))
    worst = min(min(s.upper_margin, s.lower_margin) for s in entries)
    return SandwichReport(entries, worst >= 0.0, worst)
