"""Lattice algebra against brute-force enumeration oracles.

The oracle enumerates lattice points independently of the library: it
inverts the basis with its own Gaussian elimination over Fractions, bounds
the coefficient ranges over the corners of the target box, and collects
the integer-combination points.  Membership, index, sum and intersection
are all checked against point sets produced this way.
"""

import math
from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from modelsets import lattices as lat
from modelsets.errors import NotASublattice, SingularBasis


# -- oracle -----------------------------------------------------------------


def invert_fraction_matrix(rows):
    d = len(rows)
    a = [[Fraction(rows[i][j]) for j in range(d)] for i in range(d)]
    inv = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    for col in range(d):
        piv = next((r for r in range(col, d) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        inv[col] = [v / p for v in inv[col]]
        for r in range(d):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
                inv[r] = [v - f * w for v, w in zip(inv[r], inv[col])]
    return inv


def brute_lattice_points(columns, radius):
    """All integer combinations of the columns inside [-radius, radius]^d."""
    d = len(columns[0])
    rows = [[columns[j][i] for j in range(d)] for i in range(d)]
    inv = invert_fraction_matrix(rows)
    assert inv is not None, "oracle needs a nonsingular basis"
    corners = list(product(*[(-radius, radius)] * d))
    ranges = []
    for i in range(d):
        vals = [sum(inv[i][j] * c[j] for j in range(d)) for c in corners]
        ranges.append(range(math.floor(min(vals)), math.ceil(max(vals)) + 1))
    pts = set()
    for coeffs in product(*ranges):
        p = tuple(sum(coeffs[j] * columns[j][i] for j in range(d)) for i in range(d))
        if all(abs(v) <= radius for v in p):
            pts.add(p)
    return pts


def det_int(columns):
    d = len(columns[0])
    if d == 1:
        return columns[0][0]
    if d == 2:
        return columns[0][0] * columns[1][1] - columns[1][0] * columns[0][1]
    (a, b, c), (p, q, r), (x, y, z) = columns[0], columns[1], columns[2]
    return a * (q * z - r * y) - p * (b * z - c * y) + x * (b * r - c * q)


# -- canonicalize -------------------------------------------------------------


def test_canonicalize_identity():
    L = lat.from_columns([[1, 0], [0, 1]])
    assert L == lat.identity_lattice(2)
    assert L.det_abs == 1


def test_canonicalize_diagonal():
    L = lat.from_columns([[2, 0], [0, 2]])
    assert L.hnf == ((2, 0), (0, 2))
    assert L.det_abs == 4


def test_canonicalize_sheared_with_membership_oracle():
    cols = [[2, 2], [0, 4]]
    L = lat.from_columns(cols)
    assert L.det_abs == 8
    assert not lat.contains(L, (1, 1))
    assert lat.contains(L, (2, 2))
    oracle = brute_lattice_points(cols, 12)
    for x in product(range(-12, 13), repeat=2):
        assert lat.contains(L, x) == (x in oracle)


def test_canonicalize_singular():
    with pytest.raises(SingularBasis):
        lat.from_columns([[1, 2], [2, 4]])


def test_canonicalize_idempotent():
    b = lat.LatticeBasis(2, ((3, 1), (0, 7)))
    once = lat.canonicalize(b)
    assert lat.canonicalize(once) == once


# -- contains ------------------------------------------------------------------


def test_contains_zero_and_scalar():
    L = lat.scalar_lattice(3, 2)
    assert lat.contains(L, (0, 0))
    assert lat.contains(L, (3, 3))
    assert not lat.contains(L, (3, 1))


small_matrix = st.integers(min_value=-6, max_value=6)


@given(st.integers(1, 3), st.data())
@settings(max_examples=30, deadline=None)
def test_contains_matches_oracle(d, data):
    cols = [[data.draw(small_matrix) for _ in range(d)] for _ in range(d)]
    det = det_int(cols)
    assume(det != 0 and abs(det) <= 50)
    radius = 20 if d <= 2 else 8
    L = lat.from_columns(cols)
    oracle = brute_lattice_points(cols, radius)
    for x in product(range(-radius, radius + 1), repeat=d):
        assert lat.contains(L, x) == (x in oracle)


# -- index ------------------------------------------------------------------------


def test_index_prime_squared():
    assert lat.index(lat.identity_lattice(2), lat.scalar_lattice(5, 2)) == 25


def test_index_self():
    L = lat.from_columns([[2, 1], [0, 3]])
    assert lat.index(L, L) == 1


def test_index_by_coset_exhaustion():
    cols = [[2, 1], [0, 3]]
    L = lat.from_columns(cols)
    assert lat.index(lat.identity_lattice(2), L) == 6
    # independent count: points of L in [0, 6)^2 vs box size
    pts = brute_lattice_points(cols, 12)
    in_box = sum(1 for x in product(range(6), repeat=2) if x in pts)
    assert 36 // in_box == 6


def test_index_not_sublattice():
    with pytest.raises(NotASublattice):
        lat.index(lat.scalar_lattice(2, 2), lat.scalar_lattice(3, 2))


# -- sum / intersect ------------------------------------------------------------


def test_sum_bezout():
    assert lat.lattice_sum(lat.scalar_lattice(2, 1), lat.scalar_lattice(3, 1)) \
        == lat.identity_lattice(1)


def test_sum_idempotent():
    L = lat.from_columns([[2, 1], [0, 3]])
    assert lat.lattice_sum(L, L) == L


def test_sum_scalar_pairs_with_generation_oracle():
    assert lat.lattice_sum(lat.scalar_lattice(2, 2), lat.scalar_lattice(3, 2)) \
        == lat.identity_lattice(2)
    assert lat.lattice_sum(lat.scalar_lattice(2, 2), lat.scalar_lattice(6, 2)) \
        == lat.scalar_lattice(2, 2)
    # oracle: pointwise sums of the two generators inside a box generate the sum
    s = lat.lattice_sum(lat.from_columns([[4, 0], [2, 6]]),
                        lat.from_columns([[6, 0], [0, 10]]))
    a = brute_lattice_points([[4, 0], [2, 6]], 30)
    b = brute_lattice_points([[6, 0], [0, 10]], 30)
    sums = {(x[0] + y[0], x[1] + y[1]) for x in a for y in b
            if all(abs(x[i] + y[i]) <= 10 for i in range(2))}
    for x in product(range(-10, 11), repeat=2):
        if x in sums:
            assert lat.contains(s, x)


def test_intersect_lcm():
    assert lat.intersect(lat.scalar_lattice(2, 1), lat.scalar_lattice(3, 1)) \
        == lat.scalar_lattice(6, 1)


def test_intersect_with_ambient():
    L = lat.from_columns([[2, 1], [0, 3]])
    assert lat.intersect(L, lat.identity_lattice(2)) == L


def test_intersect_index_formula_with_scan_oracle():
    inter = lat.intersect(lat.scalar_lattice(2, 2), lat.scalar_lattice(3, 2))
    assert inter == lat.scalar_lattice(6, 2)
    assert lat.index(lat.identity_lattice(2), inter) == 36
    for x in product(range(-12, 13), repeat=2):
        both = lat.contains(lat.scalar_lattice(2, 2), x) and \
            lat.contains(lat.scalar_lattice(3, 2), x)
        assert lat.contains(inter, x) == both


@given(st.data())
@settings(max_examples=25, deadline=None)
def test_intersect_matches_membership_oracle(data):
    d = data.draw(st.integers(1, 2))
    cols1 = [[data.draw(small_matrix) for _ in range(d)] for _ in range(d)]
    cols2 = [[data.draw(small_matrix) for _ in range(d)] for _ in range(d)]
    assume(det_int(cols1) != 0 and det_int(cols2) != 0)
    assume(abs(det_int(cols1)) <= 20 and abs(det_int(cols2)) <= 20)
    L1, L2 = lat.from_columns(cols1), lat.from_columns(cols2)
    inter = lat.intersect(L1, L2)
    for x in product(range(-15, 16), repeat=d):
        assert lat.contains(inter, x) == (lat.contains(L1, x) and lat.contains(L2, x))


# -- dual -----------------------------------------------------------------------


def test_dual_self_dual():
    for d in (1, 2, 3):
        assert lat.dual_basis(lat.identity_lattice(d)) == tuple(
            tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d))


def test_dual_scalar():
    dual = lat.dual_basis(lat.scalar_lattice(5, 2))
    assert dual == ((Fraction(1, 5), Fraction(0)), (Fraction(0), Fraction(1, 5)))


def test_dual_pairing_integrality():
    L = lat.from_columns([[2, 1], [0, 3]])
    dual = lat.dual_basis(L)
    for j in range(2):  # dual generator = column j of dual
        u = tuple(dual[i][j] for i in range(2))
        for col in L.columns():
            pairing = sum(a * b for a, b in zip(u, col))
            assert pairing.denominator == 1


def test_dual_contains():
    L = lat.scalar_lattice(6, 2)
    assert lat.dual_contains(L, (Fraction(1, 6), Fraction(5, 6)))
    assert not lat.dual_contains(L, (Fraction(1, 4), Fraction(0)))


# -- coprimality and gcd law ------------------------------------------------------


def test_is_coprime_pair_examples():
    G = lat.identity_lattice(2)
    assert lat.is_coprime_pair(G, lat.scalar_lattice(2, 2), lat.scalar_lattice(3, 2))
    assert not lat.is_coprime_pair(G, lat.scalar_lattice(2, 2), lat.scalar_lattice(4, 2))
    assert not lat.is_coprime_pair(G, lat.scalar_lattice(2, 2), lat.scalar_lattice(6, 2))


def test_is_coprime_pair_requires_sublattices():
    with pytest.raises(NotASublattice):
        lat.is_coprime_pair(lat.scalar_lattice(2, 2), lat.scalar_lattice(3, 2),
                            lat.scalar_lattice(6, 2))


def test_gcd_law_trivial_and_scalar():
    G = lat.identity_lattice(2)
    subs = [lat.scalar_lattice(p, 2) for p in (2, 3, 5, 7)]
    members = list(range(1, 5))
    sets = [list(c) for size in range(4) for c in combinations(members, size)]
    for F in sets:
        for Fp in sets:
            assert lat.check_gcd_law(G, subs, F, Fp)


def test_gcd_law_violation():
    G = lat.identity_lattice(2)
    subs = [lat.scalar_lattice(2, 2), lat.scalar_lattice(6, 2)]
    assert not lat.check_gcd_law(G, subs, [1], [2])


def test_gcd_law_index_out_of_range():
    G = lat.identity_lattice(2)
    subs = [lat.scalar_lattice(2, 2)]
    with pytest.raises(lat.IndexOutOfRange):
        lat.check_gcd_law(G, subs, [1], [2])


# -- structural invariants --------------------------------------------------------


@given(st.data())
@settings(max_examples=25, deadline=None)
def test_index_multiplicativity_on_coprime_families(data):
    d = data.draw(st.integers(1, 2))
    primes = [2, 3, 5, 7, 11]
    exps = [data.draw(st.integers(1, 2)) for _ in primes]
    G = lat.identity_lattice(d)
    subs = [lat.scalar_lattice(p ** e, d) for p, e in zip(primes, exps)]
    members = data.draw(st.sets(st.integers(1, len(subs)), max_size=4))
    F = sorted(members)
    inter = lat.family_intersection(G, subs, F)
    want = 1
    for n in F:
        want *= lat.index(G, subs[n - 1])
    assert lat.index(G, inter) == want


@given(st.data())
@settings(max_examples=20, deadline=None)
def test_duality_consistency(data):
    d = data.draw(st.integers(1, 2))
    cols1 = [[data.draw(small_matrix) for _ in range(d)] for _ in range(d)]
    cols2 = [[data.draw(small_matrix) for _ in range(d)] for _ in range(d)]
    assume(det_int(cols1) != 0 and det_int(cols2) != 0)
    L1, L2 = lat.from_columns(cols1), lat.from_columns(cols2)
    lhs = lat.dual_basis(lat.intersect(L1, L2))
    rhs = lat.rational_lattice_sum(lat.dual_basis(L1), lat.dual_basis(L2))
    assert lat.rational_lattices_equal(lhs, rhs)


@given(st.data())
@settings(max_examples=20, deadline=None)
def test_sum_intersect_commutative_associative_monotone(data):
    d = data.draw(st.integers(1, 2))
    mats = []
    for _ in range(3):
        cols = [[data.draw(small_matrix) for _ in range(d)] for _ in range(d)]
        assume(det_int(cols) != 0)
        mats.append(lat.from_columns(cols))
    a, b, c = mats
    assert lat.lattice_sum(a, b) == lat.lattice_sum(b, a)
    assert lat.intersect(a, b) == lat.intersect(b, a)
    assert lat.lattice_sum(lat.lattice_sum(a, b), c) == \
        lat.lattice_sum(a, lat.lattice_sum(b, c))
    assert lat.intersect(lat.intersect(a, b), c) == \
        lat.intersect(a, lat.intersect(b, c))
    # monotone: intersect(a, b) ⊆ a ⊆ sum(a, c)
    assert lat.is_sublattice(a, lat.intersect(a, b))
    assert lat.is_sublattice(lat.lattice_sum(a, c), a)


# -- congruence solving -------------------------------------------------------------


def test_solve_congruences_scalar():
    t, mod = lat.solve_congruences(
        [(1, 0), (2, 1), (0, 3)],
        [lat.scalar_lattice(3, 2), lat.scalar_lattice(5, 2), lat.scalar_lattice(7, 2)])
    assert mod == lat.scalar_lattice(105, 2)
    assert lat.contains(lat.scalar_lattice(3, 2), (t[0] - 1, t[1] - 0))
    assert lat.contains(lat.scalar_lattice(5, 2), (t[0] - 2, t[1] - 1))
    assert lat.contains(lat.scalar_lattice(7, 2), (t[0] - 0, t[1] - 3))


def test_solve_congruences_nonscalar():
    L1 = lat.from_columns([[2, 1], [0, 3]])  # det 6
    L2 = lat.from_columns([[5, 0], [0, 7]])  # det 35, coprime to 6
    t, mod = lat.solve_congruences([(1, 1), (2, 3)], [L1, L2])
    assert lat.contains(L1, (t[0] - 1, t[1] - 1))
    assert lat.contains(L2, (t[0] - 2, t[1] - 3))
    assert mod == lat.intersect(L1, L2)
