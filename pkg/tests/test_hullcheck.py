"""Hull admissibility and patch-frequency enclosures for the visible points."""

import math
from itertools import combinations, product

import numpy as np
import pytest

from modelsets.errors import PatternLargerThanRegion, PatternTooLarge
from modelsets.hullcheck import (PatchPattern, admissible, ball_sites,
                                 patch_frequency_empirical,
                                 patch_frequency_exact, pattern_frequency_table)
from modelsets.pointsets import Patch, Region, _sorted_patch, generate_visible


def full_patch(region):
    pts = np.array([p for p in product(range(-region.radius, region.radius + 1),
                                       repeat=2) if region.contains(p)],
                   dtype=np.int64)
    return _sorted_patch(pts, region, "full")


def empty_patch(region):
    return _sorted_patch(np.empty((0, 2), dtype=np.int64), region, "empty")


# -- admissibility -----------------------------------------------------------------


def test_visible_patch_is_admissible():
    v = generate_visible(Region("box", 120, 2))
    rep = admissible(v, 23)
    assert rep.admissible
    # the visible points miss the zero coset modulo every prime
    assert all(w == (0, 0) for w in rep.witnesses.values())


def test_full_ball_not_admissible():
    rep = admissible(full_patch(Region("ball", 50, 2)), 3)
    assert not rep.admissible
    assert rep.failing == [2, 3]
    assert rep.witnesses[2] is None


def test_empty_patch_admissible():
    rep = admissible(empty_patch(Region("box", 5, 2)), 13)
    assert rep.admissible
    assert all(w is not None for w in rep.witnesses.values())


def test_admissible_monotone_under_subsets():
    v = generate_visible(Region("box", 60, 2))
    rep = admissible(v, 11)
    assert rep.admissible
    rng = np.random.default_rng(7)
    for _ in range(5):
        keep = rng.random(v.count) < 0.5
        sub = _sorted_patch(v.points[keep], v.region, v.family_tag)
        assert admissible(sub, 11).admissible


def test_admissibility_witness_is_truly_missed():
    v = generate_visible(Region("box", 80, 2))
    rep = admissible(v, 7)
    pts = v.point_set()
    for q, coset in rep.witnesses.items():
        assert all((x % q, y % q) != coset for x, y in pts)


# -- patterns -----------------------------------------------------------------------


def test_ball_sites_rho1():
    assert ball_sites(1) == [(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)]


def test_pattern_contradiction_rejected():
    with pytest.raises(ValueError):
        PatchPattern.of(0, [(0, 0)], [(0, 0)])


def test_pattern_site_outside_ball_rejected():
    with pytest.raises(ValueError):
        PatchPattern.of(1, [(1, 1)], [])


def test_pattern_too_large():
    sites = [(x, y) for x in range(-2, 3) for y in range(-2, 3)
             if x * x + y * y <= 4][:10]
    pattern = PatchPattern.of(2, sites, [])
    with pytest.raises(PatternTooLarge):
        patch_frequency_exact(pattern, 100)


def test_pattern_larger_than_region():
    v = generate_visible(Region("box", 3, 2))
    with pytest.raises(PatternLargerThanRegion):
        patch_frequency_empirical(v, PatchPattern.of(3, [(0, 0)], []))


# -- frequencies ---------------------------------------------------------------------


def test_single_site_occupied_is_density(visible_r1000):
    est = patch_frequency_empirical(visible_r1000, PatchPattern.of(0, [(0, 0)], []))
    # frequency of "origin occupied" equals the density of V over the
    # shrunken region, up to the one-site rim
    from modelsets.pointsets import density_estimate
    dens = density_estimate(visible_r1000).value
    assert abs(est.value - dens) < 1e-3
    exact = patch_frequency_exact(PatchPattern.of(0, [(0, 0)], []), 1000)
    assert exact.contains(6 / math.pi ** 2)


def test_single_site_empty_is_complement(visible_r1000):
    est = patch_frequency_empirical(visible_r1000, PatchPattern.of(0, [], [(0, 0)]))
    assert abs(est.value - (1 - 6 / math.pi ** 2)) < 2e-3
    exact = patch_frequency_exact(PatchPattern.of(0, [], [(0, 0)]), 1000)
    assert exact.contains(1 - 6 / math.pi ** 2)


def test_rho0_frequencies_sum_to_one_exactly(visible_r1000):
    table = pattern_frequency_table(visible_r1000, 0)
    counts = [est.count for est in table.values()]
    volume = next(iter(table.values())).volume
    assert sum(counts) == volume  # partition of the translation region
    assert sum(est.value for est in table.values()) == 1.0


def test_rho1_full_patterns_partition_translations():
    v = generate_visible(Region("box", 300, 2))
    table = pattern_frequency_table(v, 1)
    assert len(table) == 32
    counts = [e.count for e in table.values()]
    assert sum(counts) == int(next(iter(table.values())).volume)


def test_rho0_exact_interval_sum_contains_one():
    total = patch_frequency_exact(PatchPattern.of(0, [(0, 0)], []), 500) + \
        patch_frequency_exact(PatchPattern.of(0, [], [(0, 0)]), 500)
    assert total.contains(1)


def test_all_occupied_ball_pattern(visible_r1000):
    pattern = PatchPattern.of(1, ball_sites(1), [])
    est = patch_frequency_empirical(visible_r1000, pattern)
    assert est.value > 0
    exact = patch_frequency_exact(pattern, 1000)
    assert exact.lower - 0.01 <= est.value <= exact.upper + 0.01


def test_empirical_within_exact_for_two_constraint_patterns(visible_r1000):
    sites = ball_sites(1)
    for s1, s2 in combinations(sites, 2):
        for occ1, occ2 in product((True, False), repeat=2):
            occupied = [s for s, o in ((s1, occ1), (s2, occ2)) if o]
            empty = [s for s, o in ((s1, occ1), (s2, occ2)) if not o]
            pattern = PatchPattern.of(1, occupied, empty)
            est = patch_frequency_empirical(visible_r1000, pattern)
            enc = patch_frequency_exact(pattern, 1000)
            assert enc.lower - 1e-2 <= est.value <= enc.upper + 1e-2


def test_exact_requires_prime_bound_beyond_coordinates():
    pattern = PatchPattern.of(1, [(0, 1)], [])
    with pytest.raises(ValueError):
        patch_frequency_exact(pattern, 1)


def test_exact_unconstrained_pattern_is_one():
    enc = patch_frequency_exact(PatchPattern.of(1, [], []), 100)
    assert enc.contains(1)
    assert enc.width < 1e-12


def test_two_occupied_sites_match_covariogram():
    # the frequency of "origin and z both in V" is the covariogram at z:
    # both events remove the same cosets modulo every prime
    from modelsets.family import covariogram, visible_points_family
    fam = visible_points_family()
    for z in ((1, 0), (0, 1)):
        pattern = PatchPattern.of(1, [(0, 0), z], [])
        enc = patch_frequency_exact(pattern, 1000)
        cov = covariogram(fam, z, 168)
        assert enc.overlaps(cov)
        assert enc.contains(0.3226341)
