"""Family validation, star map, and the window-measure product machinery."""

import math
from fractions import Fraction
from itertools import product

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modelsets import lattices as lat
from modelsets.errors import (BadExponent, NotCoprime, NotInGamma, NotProper)
from modelsets.family import (bfree_family, covariogram, covariogram_exact,
                              custom_family, family_from_description,
                              kfree_family, model_density, model_density_exact,
                              star_map, tail_density_bound, validate_family,
                              visible_points_family, window_measure,
                              window_measure_exact)
from modelsets.primes import primes_upto

N4 = 1229  # members whose primes cover 10^4


# -- validation ---------------------------------------------------------------


def test_visible_preset_indices():
    f = visible_points_family()
    assert not f.is_finite
    assert f.member_indices(5) == [4, 9, 25, 49, 121]
    assert f.member(2) == lat.scalar_lattice(3, 2)


def test_nested_family_rejected():
    with pytest.raises(NotCoprime) as exc:
        custom_family([[1]], [[[2]], [[4]]])
    assert exc.value.pair == (1, 2)


def test_improper_member_rejected():
    with pytest.raises(NotProper):
        custom_family([[1, 0], [0, 1]], [[[1, 0], [0, 1]]])


def test_kfree_preset_indices_and_pairwise_coprimality():
    f = kfree_family(2)
    assert f.member_indices(5) == [4, 9, 25, 49, 121]
    members = f.members(5)
    for a, b in product(members, repeat=2):
        if a != b:
            assert lat.lattice_sum(a, b) == f.gamma


def test_kfree_bad_exponent():
    with pytest.raises(BadExponent):
        kfree_family(1)


def test_bfree_is_finite_scalar_family():
    f = bfree_family([2, 3, 5])
    assert f.is_finite and f.size == 3
    assert f.member_indices(3) == [2, 3, 5]


def test_family_from_description_matrix_form():
    f = family_from_description({
        "dim": 2,
        "gamma": [[1, 0], [0, 1]],
        "subs": [[[2, 0], [0, 2]], [[3, 0], [0, 3]]],
    })
    assert f.is_finite and f.member_indices(2) == [4, 9]


def test_validate_family_checks_containment():
    gamma = lat.scalar_lattice(2, 2)
    with pytest.raises(lat.NotASublattice):
        validate_family(gamma, [lat.scalar_lattice(3, 2)])


# -- star map ------------------------------------------------------------------


def test_star_map_zero(visible):
    img = star_map(visible, (0, 0), 4)
    assert all(c.is_zero() for c in img.cosets)


def test_star_map_componentwise(visible):
    img = star_map(visible, (3, 5), 3)
    assert [c.rep for c in img.cosets] == [(1, 1), (0, 2), (3, 0)]


def test_star_map_requires_gamma_point():
    f = custom_family([[2, 0], [0, 2]], [[[6, 0], [0, 6]]])
    with pytest.raises(NotInGamma):
        star_map(f, (1, 0), 1)


def test_star_map_zero_positions_of_crt_point(visible):
    # Build x by per-coordinate integer CRT, independent of the library:
    # x ≡ 0 mod 3 and mod 11, x ≡ 1 mod the other primes up to member 6.
    target = {2, 5}  # member numbers for primes 3 and 11
    ps = [2, 3, 5, 7, 11, 13]
    x = 0
    modulus = 1
    for i, p in enumerate(ps, start=1):
        want = 0 if i in target else 1
        while x % p != want:
            x += modulus
        modulus *= p
    img = star_map(visible, (x, x), 6)
    assert set(img.zero_positions()) == target


@given(st.tuples(st.integers(-50, 50), st.integers(-50, 50)),
       st.tuples(st.integers(-50, 50), st.integers(-50, 50)))
@settings(max_examples=40)
def test_star_map_is_additive(x, y):
    f = visible_points_family()
    s = tuple(a + b for a, b in zip(x, y))
    assert star_map(f, x, 5) + star_map(f, y, 5) == star_map(f, s, 5)


# -- window measure ---------------------------------------------------------------


def test_window_measure_visible_converges_to_one_over_zeta2(visible):
    w = window_measure(visible, N4)
    assert w.contains(0.6079271)
    assert w.width < 1e-3


def test_window_measure_single_member_exact():
    f = custom_family([[1, 0], [0, 1]], [[[2, 0], [0, 2]]])
    w = window_measure(f, 1)
    assert (w.lower, w.upper) == (0.75, 0.75)
    assert window_measure_exact(f) == Fraction(3, 4)


def test_window_measure_squarefree_tight(kfree2):
    w = window_measure(kfree2, N4)
    assert w.contains(0.6079271)
    assert w.width < 1e-4


def test_window_measure_against_mpmath_euler_product(visible):
    # independent high-precision evaluation of the truncated product + tail
    w = window_measure(visible, 100)
    with mpmath.workdps(40):
        prod = mpmath.mpf(1)
        for p in primes_upto(100000)[:100]:
            prod *= (1 - mpmath.mpf(1) / (p * p))
    assert w.lower <= float(prod)  # truncated product exceeds the limit
    assert w.contains(6 / math.pi ** 2)


def test_window_measure_antitone_upper_and_width(visible):
    prev = window_measure(visible, 1)
    for N in (2, 4, 8, 16, 64, 256):
        curr = window_measure(visible, N)
        assert curr.upper <= prev.upper
        assert curr.width <= prev.width
        prev = curr


# -- model density -----------------------------------------------------------------


def test_model_density_visible(visible):
    assert model_density(visible, N4).contains(0.6079271)


def test_model_density_scaled_by_determinant():
    f = validate_family(lat.scalar_lattice(2, 2), [lat.scalar_lattice(6, 2)])
    assert f.member_indices(1) == [9]
    assert model_density_exact(f) == Fraction(1, 4) * Fraction(8, 9)


def test_finite_model_density_equals_period_count():
    # exact inclusion-exclusion density vs direct count over one full period
    f = bfree_family([2, 3, 5])
    period = 30
    count = sum(1 for n in range(period) if n % 2 and n % 3 and n % 5)
    assert model_density_exact(f) == Fraction(count, period)

    f2 = custom_family([[1, 0], [0, 1]], [[[2, 0], [0, 2]], [[3, 0], [0, 3]]])
    period = 6
    count = sum(1 for x, y in product(range(period), repeat=2)
                if not (x % 2 == 0 and y % 2 == 0)
                and not (x % 3 == 0 and y % 3 == 0))
    assert model_density_exact(f2) == Fraction(count, period ** 2)


# -- covariogram --------------------------------------------------------------------


def test_covariogram_at_zero_equals_window(visible):
    for N in (5, 50, 300):
        assert covariogram(visible, (0, 0), N).upper == window_measure(visible, N).upper


def test_covariogram_values(visible):
    # reference values: the infinite products prod(1 - 2/p^2) and
    # (3/4) / (1 - 2/4) * that, evaluated independently to 7 digits
    c10 = covariogram(visible, (1, 0), N4)
    assert c10.contains(0.3226341) and c10.width < 1e-4
    c20 = covariogram(visible, (2, 0), N4)
    assert c20.contains(0.4839511) and c20.width < 1e-4


def test_covariogram_against_mpmath(visible):
    # independent evaluation of prod(1 - 2/p^2) over many primes
    with mpmath.workdps(40):
        prod = mpmath.mpf(1)
        for p in primes_upto(10000):
            prod *= (1 - mpmath.mpf(2) / (p * p))
    c = covariogram(visible, (1, 0), N4)
    assert c.lower - 1e-4 <= float(prod) <= c.upper
    # the infinite product is below the truncation, within the tail allowance
    assert c.contains(float(prod) - 1e-7) or c.contains(float(prod))


@given(st.tuples(st.integers(-40, 40), st.integers(-40, 40)))
@settings(max_examples=40)
def test_covariogram_symmetric_and_dominated(z):
    f = visible_points_family()
    c = covariogram(f, z, 30)
    c_neg = covariogram(f, tuple(-v for v in z), 30)
    assert (c.lower, c.upper) == (c_neg.lower, c_neg.upper)
    assert 0.0 <= c.upper <= window_measure(f, 30).upper


def test_covariogram_exact_finite():
    f = bfree_family([2, 3])
    # z = 0: both factors (idx-1)/idx; z = 1: both (idx-2)/idx
    assert covariogram_exact(f, (0,)) == Fraction(1, 2) * Fraction(2, 3)
    assert covariogram_exact(f, (1,)) == Fraction(0) * Fraction(1, 3)
    assert covariogram_exact(f, (3,)) == Fraction(0, 2) * Fraction(2, 3)
    assert covariogram_exact(f, (6,)) == Fraction(1, 2) * Fraction(2, 3)


# -- tails ----------------------------------------------------------------------------


def test_tail_bound_finite_family_is_zero():
    assert tail_density_bound(bfree_family([2, 3, 5]), 1) == 0.0


def test_tail_bound_visible_past_100(visible):
    n100 = len(primes_upto(100))
    bound = tail_density_bound(visible, n100)
    assert bound <= 0.0102
    # oracle: the actual prime sum up to 10^6 must stay below the bound
    partial = sum(1.0 / (p * p) for p in primes_upto(10 ** 6) if p > 100)
    assert partial < bound


def test_tail_bound_squarefree_past_100(kfree2):
    n100 = len(primes_upto(100))
    assert tail_density_bound(kfree2, n100) <= 0.0102


def test_tail_bound_monotone(visible):
    bounds = [tail_density_bound(visible, N) for N in (5, 25, 100, 500)]
    assert all(b1 > b2 for b1, b2 in zip(bounds, bounds[1:]))


def test_empty_family_rejected():
    with pytest.raises(ValueError):
        validate_family(lat.identity_lattice(1), [])


def test_non_integer_matrix_entry_rejected():
    with pytest.raises(ValueError):
        family_from_description({"dim": 1, "gamma": [[1]], "subs": [[[2.5]]]})
