"""Exact algebra of full-rank sublattices of Z^d.

Lattices are generated by the columns of an integer matrix and are kept in
a single canonical form: the column-style Hermite normal form (lower
triangular, positive diagonal, entries left of each pivot reduced modulo
the pivot).  Two lattices describe the same point set iff their canonical
forms are identical, so structural equality is lattice equality.

All arithmetic uses Python's arbitrary-precision integers; hole
construction downstream feeds coset solutions whose entries can run to
hundreds of digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import Sequence

from .errors import DimensionMismatch, IndexOutOfRange, NotASublattice, SingularBasis

Vector = tuple[int, ...]
Matrix = tuple[tuple[int, ...], ...]  # row-major


def _as_columns(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    d = len(rows)
    return [[rows[i][j] for i in range(d)] for j in range(len(rows[0]))]


def _as_rows(cols: Sequence[Sequence[int]], dim: int) -> Matrix:
    return tuple(tuple(col[i] for col in cols) for i in range(dim))


@dataclass(frozen=True)
class LatticeBasis:
    """A full-rank sublattice of Z^d, generated by the columns of `basis`."""

    dim: int
    basis: Matrix  # row-major, d x d

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if len(self.basis) != self.dim or any(len(r) != self.dim for r in self.basis):
            raise DimensionMismatch("basis must be a d x d matrix")

    @staticmethod
    def from_columns(cols: Sequence[Sequence[int]]) -> "LatticeBasis":
        d = len(cols[0])
        for c in cols:
            for v in c:
                if int(v) != v:
                    raise ValueError(f"non-integer basis entry {v!r}")
        rows = tuple(tuple(int(c[i]) for c in cols) for i in range(d))
        return LatticeBasis(d, rows)


@dataclass(frozen=True)
class CanonicalLattice:
    """Hermite-normal-form representative of a full-rank sublattice of Z^d."""

    dim: int
    hnf: Matrix  # lower triangular, row-major
    det_abs: int

    def column(self, j: int) -> Vector:
        return tuple(self.hnf[i][j] for i in range(self.dim))

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.dim)]

    def is_identity(self) -> bool:
        return self.det_abs == 1

    def scalar(self) -> int | None:
        """Return a if this lattice is a*Z^d, else None."""
        a = self.hnf[0][0]
        for i in range(self.dim):
            for j in range(self.dim):
                want = a if i == j else 0
                if self.hnf[i][j] != want:
                    return None
        return a

    def __repr__(self) -> str:
        return f"CanonicalLattice(d={self.dim}, hnf={self.hnf})"


@dataclass(frozen=True)
class CosetLabel:
    """An element of Gamma/L, identified by its canonical representative."""

    lattice: CanonicalLattice
    rep: Vector

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.rep)

    def __add__(self, other: "CosetLabel") -> "CosetLabel":
        if other.lattice != self.lattice:
            raise DimensionMismatch("cosets of different lattices")
        total = tuple(a + b for a, b in zip(self.rep, other.rep))
        return CosetLabel(self.lattice, reduce_mod(self.lattice, total))


def identity_lattice(dim: int) -> CanonicalLattice:
    rows = tuple(tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim))
    return CanonicalLattice(dim, rows, 1)


def scalar_lattice(a: int, dim: int) -> CanonicalLattice:
    if a == 0:
        raise SingularBasis("scalar lattice with a = 0")
    a = abs(a)
    rows = tuple(tuple(a if i == j else 0 for j in range(dim)) for i in range(dim))
    return CanonicalLattice(dim, rows, a ** dim)


def _column_hnf(cols: list[list[int]], dim: int, track: bool = False):
    """In-place column HNF. Returns (pivot_cols, transform) where transform
    collects the same column operations applied to an identity matrix, so
    that  original_matrix @ transform == [pivots | zeros]."""
    ncols = len(cols)
    work = [list(c) for c in cols]
    trans = [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)] if track else None

    def col_addmul(dst: int, src: int, q: int):
        wd, ws = work[dst], work[src]
        for i in range(dim):
            wd[i] += q * ws[i]
        if track:
            td, ts = trans[dst], trans[src]
            for i in range(ncols):
                td[i] += q * ts[i]

    def col_swap(a: int, b: int):
        work[a], work[b] = work[b], work[a]
        if track:
            trans[a], trans[b] = trans[b], trans[a]

    def col_negate(j: int):
        work[j] = [-x for x in work[j]]
        if track:
            trans[j] = [-x for x in trans[j]]

    pivots = 0
    for row in range(dim):
        # Clear row `row` across columns >= pivots down to one nonzero entry.
        while True:
            live = [j for j in range(pivots, ncols) if work[j][row] != 0]
            if len(live) <= 1:
                break
            live.sort(key=lambda j: abs(work[j][row]))
            j0 = live[0]
            for j in live[1:]:
                q = work[j][row] // work[j0][row]
                col_addmul(j, j0, -q)
        live = [j for j in range(pivots, ncols) if work[j][row] != 0]
        if not live:
            continue
        j0 = live[0]
        col_swap(pivots, j0)
        if work[pivots][row] < 0:
            col_negate(pivots)
        # Reduce the entries to the left of the pivot in this row.
        piv = work[pivots][row]
        for j in range(pivots):
            q = work[j][row] // piv  # floor division -> remainder in [0, piv)
            if q:
                col_addmul(j, pivots, -q)
        pivots += 1

    return work, pivots, trans


def canonicalize(b: LatticeBasis | CanonicalLattice) -> CanonicalLattice:
    """Unique HNF representative of the lattice; raises SingularBasis on rank loss."""
    if isinstance(b, CanonicalLattice):
        return b
    cols = _as_columns(b.basis)
    work, rank, _ = _column_hnf(cols, b.dim)
    if rank < b.dim:
        raise SingularBasis("basis matrix is singular")
    hnf = _as_rows(work[:b.dim], b.dim)
    det = 1
    for i in range(b.dim):
        det *= hnf[i][i]
    return CanonicalLattice(b.dim, hnf, det)


def from_columns(cols: Sequence[Sequence[int]]) -> CanonicalLattice:
    return canonicalize(LatticeBasis.from_columns(cols))


def _reduce_coeffs(L: CanonicalLattice, x: Sequence[int]):
    """Forward substitution: coefficients c with H c = x if x is in L."""
    v = list(x)
    coeffs = []
    for i in range(L.dim):
        piv = L.hnf[i][i]
        if v[i] % piv != 0:
            return None
        q = v[i] // piv
        coeffs.append(q)
        if q:
            for k in range(i, L.dim):
                v[k] -= q * L.hnf[k][i]
    return coeffs


def contains(L: CanonicalLattice, x: Sequence[int]) -> bool:
    """Exact membership x in L via back-substitution on the triangular HNF."""
    if len(x) != L.dim:
        raise DimensionMismatch(f"point of dim {len(x)} vs lattice of dim {L.dim}")
    return _reduce_coeffs(L, x) is not None


def reduce_mod(L: CanonicalLattice, x: Sequence[int]) -> Vector:
    """Canonical representative of x + L in the fundamental box of the HNF."""
    if len(x) != L.dim:
        raise DimensionMismatch(f"point of dim {len(x)} vs lattice of dim {L.dim}")
    v = list(x)
    for i in range(L.dim):
        piv = L.hnf[i][i]
        q = v[i] // piv  # floor -> representative coordinate in [0, piv)
        if q:
            for k in range(i, L.dim):
                v[k] -= q * L.hnf[k][i]
    return tuple(v)


def coset(L: CanonicalLattice, x: Sequence[int]) -> CosetLabel:
    return CosetLabel(L, reduce_mod(L, x))


def is_sublattice(G: CanonicalLattice, L: CanonicalLattice) -> bool:
    """True iff L is a sublattice of G (every generator of L lies in G)."""
    if G.dim != L.dim:
        raise DimensionMismatch("dimension mismatch")
    return all(contains(G, col) for col in L.columns())


def index(G: CanonicalLattice, L: CanonicalLattice) -> int:
    """Group index [G : L] for L a sublattice of G."""
    if not is_sublattice(G, L):
        raise NotASublattice("L is not contained in G")
    q, r = divmod(L.det_abs, G.det_abs)
    assert r == 0
    return q


def lattice_sum(L1: CanonicalLattice, L2: CanonicalLattice) -> CanonicalLattice:
    """Canonical form of L1 + L2 (lattice generated by both bases)."""
    if L1.dim != L2.dim:
        raise DimensionMismatch("dimension mismatch")
    cols = [list(c) for c in L1.columns()] + [list(c) for c in L2.columns()]
    work, rank, _ = _column_hnf(cols, L1.dim)
    assert rank == L1.dim
    hnf = _as_rows(work[:L1.dim], L1.dim)
    det = 1
    for i in range(L1.dim):
        det *= hnf[i][i]
    return CanonicalLattice(L1.dim, hnf, det)


def intersect(L1: CanonicalLattice, L2: CanonicalLattice) -> CanonicalLattice:
    """Canonical form of L1 ∩ L2 via the integer kernel of [B1 | B2].

    If B1 x + B2 y = 0 then B1 x ranges over the intersection as (x, y)
    ranges over the kernel, which is read off the unimodular transform of
    the column HNF.
    """
    if L1.dim != L2.dim:
        raise DimensionMismatch("dimension mismatch")
    d = L1.dim
    cols = [list(c) for c in L1.columns()] + [[-v for v in c] for c in L2.columns()]
    work, rank, trans = _column_hnf(cols, d, track=True)
    assert rank == d
    kernel_cols = [trans[j] for j in range(d, 2 * d)]  # columns past the pivots
    b1_cols = L1.columns()
    inter_cols = []
    for kc in kernel_cols:
        vec = [0] * d
        for j in range(d):
            cj = kc[j]
            if cj:
                col = b1_cols[j]
                for i in range(d):
                    vec[i] += cj * col[i]
        inter_cols.append(vec)
    return from_columns(inter_cols)


def dual_basis(L: CanonicalLattice) -> tuple[tuple[Fraction, ...], ...]:
    """Basis of the dual lattice L^* = B^{-T} Z^d, row-major with exact
    rational entries (columns generate)."""
    d = L.dim
    inv = _invert_rational(L.hnf)
    # inverse-transpose: row i of B^{-T} is column i of inv
    return tuple(tuple(inv[j][i] for j in range(d)) for i in range(d))


def _invert_rational(rows: Matrix) -> list[list[Fraction]]:
    d = len(rows)
    a = [[Fraction(rows[i][j]) for j in range(d)] for i in range(d)]
    inv = [[Fraction(1 if i == j else 0) for j in range(d)] for i in range(d)]
    for col in range(d):
        piv_row = next(r for r in range(col, d) if a[r][col] != 0)
        a[col], a[piv_row] = a[piv_row], a[col]
        inv[col], inv[piv_row] = inv[piv_row], inv[col]
        piv = a[col][col]
        a[col] = [v / piv for v in a[col]]
        inv[col] = [v / piv for v in inv[col]]
        for r in range(d):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
                inv[r] = [v - f * w for v, w in zip(inv[r], inv[col])]
    return inv


def dual_contains(L: CanonicalLattice, k: Sequence[Fraction]) -> bool:
    """True iff k lies in the dual lattice L^*, i.e. <k, b> in Z for all
    basis vectors b of L."""
    if len(k) != L.dim:
        raise DimensionMismatch("dimension mismatch")
    for col in L.columns():
        pairing = sum(Fraction(ki) * ci for ki, ci in zip(k, col))
        if pairing.denominator != 1:
            return False
    return True


def rational_lattice_sum(basis_a, basis_b):
    """Sum of two rational lattices given by row-major Fraction bases,
    returned as another row-major Fraction basis."""
    d = len(basis_a)
    scale = 1
    for basis in (basis_a, basis_b):
        for i in range(d):
            for j in range(d):
                q = Fraction(basis[i][j]).denominator
                scale = scale * q // _gcd(scale, q)
    cols = []
    for basis in (basis_a, basis_b):
        for j in range(d):
            cols.append([int(Fraction(basis[i][j]) * scale) for i in range(d)])
    work, rank, _ = _column_hnf(cols, d)
    assert rank == d
    return tuple(tuple(Fraction(work[j][i], scale) for j in range(d))
                 for i in range(d))


def rational_lattices_equal(basis_a, basis_b) -> bool:
    """Equality of two rational lattices given by row-major Fraction bases."""
    def scaled(basis):
        d = len(basis)
        denoms = [Fraction(basis[i][j]).denominator for i in range(d) for j in range(d)]
        scale = 1
        for q in denoms:
            scale = scale * q // _gcd(scale, q)
        cols = [[int(Fraction(basis[i][j]) * scale) for i in range(d)] for j in range(d)]
        return scale, from_columns(cols)

    sa, la = scaled(basis_a)
    sb, lb = scaled(basis_b)
    if sa == sb:
        return la == lb
    # rescale both to the common denominator lcm(sa, sb)
    common = sa * sb // _gcd(sa, sb)
    ca = [[v * (common // sa) for v in col] for col in _as_columns(la.hnf)]
    cb = [[v * (common // sb) for v in col] for col in _as_columns(lb.hnf)]
    return from_columns(ca) == from_columns(cb)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def is_coprime_pair(G: CanonicalLattice, L1: CanonicalLattice,
                    L2: CanonicalLattice) -> bool:
    """True iff L1 + L2 = G (the coprimality condition for sublattices of G)."""
    if not is_sublattice(G, L1) or not is_sublattice(G, L2):
        raise NotASublattice("both lattices must be sublattices of G")
    return lattice_sum(L1, L2) == G


def family_intersection(gamma: CanonicalLattice,
                        subs: Sequence[CanonicalLattice],
                        F: Sequence[int]) -> CanonicalLattice:
    """Intersection of the members numbered by F (1-based); empty F -> gamma."""
    result = gamma
    for n in F:
        if not 1 <= n <= len(subs):
            raise IndexOutOfRange(f"member number {n} out of range")
        result = intersect(result, subs[n - 1])
    return result


def check_gcd_law(gamma: CanonicalLattice, subs: Sequence[CanonicalLattice],
                  F: Sequence[int], Fp: Sequence[int]) -> bool:
    """Check Gamma_F + Gamma_F' == Gamma_{F ∩ F'} for 1-based index sets."""
    inter = set(F) & set(Fp)
    left = lattice_sum(family_intersection(gamma, subs, F),
                       family_intersection(gamma, subs, Fp))
    right = family_intersection(gamma, subs, sorted(inter))
    return left == right


def solve_congruences(residues: Sequence[Sequence[int]],
                      lattices: Sequence[CanonicalLattice]):
    """Solve t ≡ r_i (mod L_i) simultaneously for pairwise coprime lattices.

    Returns (t, modulus) with t reduced into the fundamental domain of
    modulus = intersection of all L_i.  Requires that consecutive combined
    moduli stay coprime to the next lattice, which the coprimality and
    gcd laws of a validated family guarantee.
    """
    if not residues:
        raise ValueError("need at least one congruence")
    d = lattices[0].dim
    t = list(residues[0])
    mod = lattices[0]
    for r, L in zip(residues[1:], lattices[1:]):
        diff = [b - a for a, b in zip(t, r)]
        # decompose diff = s1 + s2 with s1 in mod, s2 in L
        cols = [list(c) for c in mod.columns()] + [list(c) for c in L.columns()]
        work, rank, trans = _column_hnf(cols, d, track=True)
        if rank < d:
            raise NotASublattice("moduli do not span the ambient lattice")
        # solve [H|0] y = diff by forward substitution on the pivot block
        y = [0] * (2 * d)
        v = list(diff)
        for i in range(d):
            piv = work[i][i]
            if v[i] % piv != 0:
                raise NotASublattice("congruence system unsolvable: moduli not coprime")
            q = v[i] // piv
            y[i] = q
            if q:
                for kk in range(i, d):
                    v[kk] -= q * work[kk][i]
        # coefficients in terms of the original 2d columns
        coeff = [sum(trans[j][i] * y[j] for j in range(2 * d)) for i in range(2 * d)]
        s1 = [0] * d
        mod_cols = mod.columns()
        for j in range(d):
            cj = coeff[j]
            if cj:
                for i in range(d):
                    s1[i] += cj * mod_cols[j][i]
        t = [a + b for a, b in zip(t, s1)]  # t ≡ old t (mod), and t ≡ r (L)
        mod = intersect(mod, L)
        t = list(reduce_mod(mod, t))
    return tuple(t), mod


def lattice_points_in_box(L: CanonicalLattice, bounds: Sequence[tuple[int, int]]):
    """All points of L inside the box prod_i [lo_i, hi_i], by enumerating
    integer coefficient vectors against the triangular basis."""
    d = L.dim
    inv = _invert_rational(L.hnf)
    corners = list(iter_product(*[(lo, hi) for lo, hi in bounds]))
    ranges = []
    for i in range(d):
        vals = [sum(inv[i][j] * c[j] for j in range(d)) for c in corners]
        lo = min(vals)
        hi = max(vals)
        ranges.append(range(int(lo.__floor__()), int(hi.__ceil__()) + 1))
    cols = L.columns()
    out = []
    for coeffs in iter_product(*ranges):
        pt = tuple(sum(coeffs[j] * cols[j][i] for j in range(d)) for i in range(d))
        if all(lo <= pt[i] <= hi for i, (lo, hi) in enumerate(bounds)):
            out.append(pt)
    out.sort()
    return out
