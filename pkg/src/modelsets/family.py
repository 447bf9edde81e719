"""Coprime sublattice families and the derived internal-space quantities.

A family is the ambient lattice Gamma plus proper sublattices Gamma_n that
are pairwise coprime (Gamma_i + Gamma_j = Gamma), satisfy the gcd law for
finite intersections, and have a convergent sum of index reciprocals.  The
window of the associated cut-and-project scheme is never materialised: it
is the product over n of the complement of the zero coset in Gamma/Gamma_n,
so every measure-type quantity reduces to a (possibly truncated) product
over the members.

Truncation is always explicit: operations take a level N (first N members)
and attach a certified tail bound; presets carry closed-form tails, finite
families have tail zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from . import lattices as lat
from .errors import (BadExponent, DivergentIndexSum, GcdLawViolation, NoTailBound,
                     NotCoprime, NotInGamma, NotProper)
from .intervals import BoundedValue, product_enclosure
from .lattices import CanonicalLattice, CosetLabel
from .primes import first_primes, reciprocal_power_tail

PRESET_VISIBLE = "visible-d2"
PRESET_KFREE = "kfree"
PRESET_BFREE = "bfree"
PRESET_CUSTOM = "custom"

# how many leading members the sampled gcd-law validation draws from
_GCD_LAW_MEMBERS = 6
_GCD_LAW_MAX_SIZE = 3


@dataclass
class CoprimeFamily:
    """Ambient lattice plus its validated list (or stream) of sublattices.

    Member numbering is 1-based throughout the public surface, matching the
    n = 1, 2, ... order of the family.  For infinite presets, members are
    produced on demand; `size` is None in that case.
    """

    gamma: CanonicalLattice
    preset_tag: str = PRESET_CUSTOM
    kfree_k: Optional[int] = None
    _finite_subs: Optional[list[CanonicalLattice]] = None
    _finite_indices: Optional[list[int]] = None
    _member_cache: dict = field(default_factory=dict, repr=False)

    # -- structure ----------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.gamma.dim

    @property
    def det_abs(self) -> int:
        return self.gamma.det_abs

    @property
    def is_finite(self) -> bool:
        return self._finite_subs is not None

    @property
    def size(self) -> Optional[int]:
        return len(self._finite_subs) if self.is_finite else None

    @property
    def subs(self) -> Optional[list[CanonicalLattice]]:
        return self._finite_subs

    @property
    def indices(self) -> Optional[list[int]]:
        return self._finite_indices

    @property
    def tag(self) -> str:
        if self.preset_tag == PRESET_KFREE:
            return f"kfree-{self.kfree_k}"
        return self.preset_tag

    def density_factor(self) -> Fraction:
        """dens(L) = 1/|det Gamma| of the embedding lattice."""
        return Fraction(1, self.det_abs)

    def member(self, n: int) -> CanonicalLattice:
        """The n-th sublattice Gamma_n, 1-based."""
        if n < 1:
            raise IndexError("member numbers are 1-based")
        if self.is_finite:
            if n > len(self._finite_subs):
                raise IndexError(f"family has only {len(self._finite_subs)} members")
            return self._finite_subs[n - 1]
        if n not in self._member_cache:
            p = first_primes(n)[-1]
            if self.preset_tag == PRESET_VISIBLE:
                self._member_cache[n] = lat.scalar_lattice(p, 2)
            elif self.preset_tag == PRESET_KFREE:
                self._member_cache[n] = lat.scalar_lattice(p ** self.kfree_k, 1)
            else:
                raise IndexError("unknown infinite preset")
        return self._member_cache[n]

    def members(self, N: int) -> list[CanonicalLattice]:
        if self.is_finite:
            N = min(N, len(self._finite_subs))
        return [self.member(n) for n in range(1, N + 1)]

    def member_index(self, n: int) -> int:
        """[Gamma : Gamma_n] of the n-th member."""
        if self.is_finite:
            if not 1 <= n <= len(self._finite_indices):
                raise IndexError(f"family has only {len(self._finite_indices)} members")
            return self._finite_indices[n - 1]
        p = first_primes(n)[-1]
        if self.preset_tag == PRESET_VISIBLE:
            return p * p
        if self.preset_tag == PRESET_KFREE:
            return p ** self.kfree_k
        raise IndexError("unknown infinite preset")

    def member_indices(self, N: int) -> list[int]:
        if self.is_finite:
            N = min(N, len(self._finite_indices))
        return [self.member_index(n) for n in range(1, N + 1)]

    def effective_truncation(self, N: int) -> int:
        return min(N, self.size) if self.is_finite else N

    # -- tail bounds ---------------------------------------------------------

    def tail_index_sum_bound(self, N: int) -> float:
        """Certified upper bound for sum_{n > N} 1/[Gamma:Gamma_n].

        The tail members sit at primes >= the (N+1)-st prime q, and
        sum_{m >= q} 1/m^k <= (q-1)^(1-k)/(k-1) by integral comparison.
        """
        if self.is_finite:
            return 0.0
        q = first_primes(N + 1)[-1] if N >= 1 else 2
        if self.preset_tag == PRESET_VISIBLE:
            return reciprocal_power_tail(q - 1, 2)
        if self.preset_tag == PRESET_KFREE:
            return reciprocal_power_tail(q - 1, self.kfree_k)
        raise NoTailBound("no closed-form tail for this family")

    def scalar_members(self, N: int) -> Optional[list[int]]:
        """If Gamma = Z^d and the first N members are a_n Z^d, return [a_n]."""
        if not self.gamma.is_identity():
            return None
        out = []
        for sub in self.members(N):
            a = sub.scalar()
            if a is None:
                return None
            out.append(a)
        return out


# -- construction / validation -----------------------------------------------


def visible_points_family() -> CoprimeFamily:
    """The visible points of Z^2: Gamma = Z^2, Gamma_p = p Z^2 over primes p."""
    return CoprimeFamily(lat.identity_lattice(2), preset_tag=PRESET_VISIBLE)


def kfree_family(k: int) -> CoprimeFamily:
    """The k-th power-free integers: Gamma = Z, Gamma_p = p^k Z over primes."""
    if k < 2:
        raise BadExponent(f"k must be >= 2, got {k}")
    return CoprimeFamily(lat.identity_lattice(1), preset_tag=PRESET_KFREE, kfree_k=k)


def bfree_family(bs: Sequence[int]) -> CoprimeFamily:
    """B-free integers for a finite list of pairwise coprime moduli."""
    subs = [lat.scalar_lattice(b, 1) for b in bs]
    return validate_family(lat.identity_lattice(1), subs, preset_tag=PRESET_BFREE)


def custom_family(gamma_cols: Sequence[Sequence[int]],
                  sub_cols: Sequence[Sequence[Sequence[int]]]) -> CoprimeFamily:
    gamma = lat.from_columns(gamma_cols)
    subs = [lat.from_columns(cols) for cols in sub_cols]
    return validate_family(gamma, subs)


def validate_family(gamma: CanonicalLattice, subs: Sequence[CanonicalLattice],
                    preset_tag: str = PRESET_CUSTOM) -> CoprimeFamily:
    """Validate the three structural conditions on a finite member list.

    Properness and pairwise coprimality are checked for every pair; the gcd
    law, which quantifies over all finite F, F', is checked exhaustively for
    |F|, |F'| <= 3 drawn from the first six members.  Convergence of the
    index sum is automatic for finite lists.
    """
    if not subs:
        raise ValueError("family must have at least one sublattice")
    indices = []
    for pos, sub in enumerate(subs, start=1):
        idx = lat.index(gamma, sub)  # raises NotASublattice if not contained
        if idx < 2:
            raise NotProper(f"member {pos} equals Gamma (index 1)")
        indices.append(idx)
    for (i, a), (j, b) in combinations(enumerate(subs, start=1), 2):
        if lat.lattice_sum(a, b) != gamma:
            raise NotCoprime(i, j)
    pool = list(range(1, min(len(subs), _GCD_LAW_MEMBERS) + 1))
    sets = [frozenset(c) for size in range(_GCD_LAW_MAX_SIZE + 1)
            for c in combinations(pool, size)]
    for F in sets:
        for Fp in sets:
            if not lat.check_gcd_law(gamma, subs, sorted(F), sorted(Fp)):
                raise GcdLawViolation(F, Fp)
    return CoprimeFamily(gamma, preset_tag=preset_tag,
                         _finite_subs=list(subs), _finite_indices=indices)


@dataclass
class ValidationReport:
    valid: bool
    tag: str
    dim: int
    member_count: Optional[int]
    indices: Optional[list[int]]
    error: Optional[str] = None
    error_type: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "tag": self.tag,
            "dim": self.dim,
            "member_count": self.member_count,
            "indices": self.indices,
            "error": self.error,
            "error_type": self.error_type,
        }


def family_from_description(desc: dict) -> CoprimeFamily:
    """Build a family from its JSON description.

    Accepted shapes:
      {"preset": "visible-d2"}
      {"preset": "kfree", "k": 2}
      {"preset": "bfree", "b": [2, 3, 5]}
      {"dim": d, "gamma": [[...]], "subs": [[[...]], ...]}   (column matrices)
    """
    if "preset" in desc:
        preset = desc["preset"]
        if preset == PRESET_VISIBLE:
            return visible_points_family()
        if preset == PRESET_KFREE:
            return kfree_family(int(desc.get("k", 2)))
        if preset == PRESET_BFREE:
            return bfree_family([int(b) for b in desc["b"]])
        raise ValueError(f"unknown preset {preset!r}")
    gamma = desc["gamma"]
    subs = desc["subs"]
    if "dim" in desc and len(gamma) != int(desc["dim"]):
        raise ValueError("declared dim does not match gamma matrix")
    return custom_family(gamma, subs)


def validation_report(desc: dict) -> ValidationReport:
    from .errors import ModelSetError
    try:
        fam = family_from_description(desc)
    except (ModelSetError, ValueError, KeyError) as exc:
        tag = desc.get("preset", PRESET_CUSTOM)
        if "dim" in desc:
            dim = int(desc["dim"])
        elif "gamma" in desc:
            dim = len(desc["gamma"])
        else:
            dim = 2 if tag == PRESET_VISIBLE else 1
        return ValidationReport(False, tag, dim, None, None,
                                error=str(exc), error_type=type(exc).__name__)
    count = fam.size
    idx = fam.member_indices(count) if count is not None else fam.member_indices(8)
    return ValidationReport(True, fam.tag, fam.dim, count, idx)


# -- star map ----------------------------------------------------------------


@dataclass(frozen=True)
class StarImage:
    """Truncated image of a point under the star map: its cosets mod the
    first N members."""

    cosets: tuple[CosetLabel, ...]

    def __add__(self, other: "StarImage") -> "StarImage":
        return StarImage(tuple(a + b for a, b in zip(self.cosets, other.cosets)))

    def zero_positions(self) -> list[int]:
        """1-based member numbers whose coset component is zero."""
        return [n for n, c in enumerate(self.cosets, start=1) if c.is_zero()]


def star_map(f: CoprimeFamily, x: Sequence[int], N: int) -> StarImage:
    """Reduction of x in Gamma modulo each of the first N members."""
    if not lat.contains(f.gamma, x):
        raise NotInGamma(f"{tuple(x)} is not a point of Gamma")
    N = f.effective_truncation(N)
    return StarImage(tuple(lat.coset(f.member(n), x) for n in range(1, N + 1)))


# -- measures ------------------------------------------------------------------


def window_measure(f: CoprimeFamily, N: int) -> BoundedValue:
    """Enclosure of the Haar measure of the window,
    theta_H(W) = prod_n (1 - 1/[Gamma:Gamma_n])."""
    if N < 1:
        raise ValueError("truncation level N must be >= 1")
    if f.is_finite:
        return BoundedValue.exact(window_measure_exact(f))
    factors = (Fraction(idx - 1, idx) for idx in f.member_indices(N))
    return product_enclosure(factors, tail_deficit=f.tail_index_sum_bound(N))


def window_measure_exact(f: CoprimeFamily) -> Fraction:
    """Exact window measure for a finite family."""
    if not f.is_finite:
        raise NoTailBound("exact window measure requires a finite family")
    value = Fraction(1)
    for idx in f.member_indices(f.size):
        value *= Fraction(idx - 1, idx)
    return value


def model_density(f: CoprimeFamily, N: int) -> BoundedValue:
    """Enclosure of dens(V) = dens(L) * theta_H(W)."""
    if f.is_finite:
        return BoundedValue.exact(model_density_exact(f))
    return window_measure(f, N).scale_exact(f.density_factor())


def model_density_exact(f: CoprimeFamily) -> Fraction:
    return window_measure_exact(f) * f.density_factor()


def covariogram(f: CoprimeFamily, z: Sequence[int], N: int) -> BoundedValue:
    """Enclosure of the covariogram c_W at the star image of z.

    W is a product of one-coset complements, so the covariogram factors:
    the n-th factor of theta_H(W ∩ (z* + W)) is (idx-1)/idx when z lies in
    Gamma_n (the two removed cosets coincide) and (idx-2)/idx otherwise.
    Each tail factor falls short of 1 by at most 2/idx, hence the doubled
    tail deficit relative to the window measure.
    """
    if not lat.contains(f.gamma, z):
        raise NotInGamma(f"{tuple(z)} is not a point of Gamma")
    if f.is_finite:
        return BoundedValue.exact(covariogram_exact(f, z))
    N = f.effective_truncation(N)
    factors = (_covariogram_factor(f, n, z) for n in range(1, N + 1))
    # at z = 0 every tail factor is (idx-1)/idx, exactly as in the window
    # measure; otherwise a tail factor can fall short of 1 by up to 2/idx
    tail = f.tail_index_sum_bound(N) * (1.0 if not any(z) else 2.0)
    return product_enclosure(factors, tail_deficit=tail)


def covariogram_exact(f: CoprimeFamily, z: Sequence[int]) -> Fraction:
    if not f.is_finite:
        raise NoTailBound("exact covariogram requires a finite family")
    if not lat.contains(f.gamma, z):
        raise NotInGamma(f"{tuple(z)} is not a point of Gamma")
    value = Fraction(1)
    for n in range(1, f.size + 1):
        value *= _covariogram_factor(f, n, z)
    return value


def _covariogram_factor(f: CoprimeFamily, n: int, z: Sequence[int]) -> Fraction:
    idx = f.member_index(n)
    if lat.contains(f.member(n), z):
        return Fraction(idx - 1, idx)
    return Fraction(idx - 2, idx)


def tail_density_bound(f: CoprimeFamily, N: int) -> float:
    """Certified upper bound on the upper density of the union of all members
    beyond the first N: dens(U_{n>N} Gamma_n) <= sum_{n>N} 1/idx_n * dens(Gamma)."""
    if f.is_finite:
        return 0.0
    bound = f.tail_index_sum_bound(N)  # raises NoTailBound when unavailable
    return bound * float(f.density_factor())
