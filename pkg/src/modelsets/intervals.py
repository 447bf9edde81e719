"""Outward-rounded interval arithmetic for certified truncated products.

Every quantity that involves a truncated infinite product or sum is reported
as a ``BoundedValue`` [lower, upper] that is guaranteed to contain the true
real number.  Endpoints are binary doubles; every inexact operation rounds
the lower endpoint down and the upper endpoint up (``math.nextafter``), so
enclosures never shrink below the truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

_INF = math.inf

Exactable = Union[int, float, Fraction]


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _float_below(value: Fraction) -> float:
    f = float(value)
    if Fraction(f) <= value:
        return f
    return _down(f)


def _float_above(value: Fraction) -> float:
    f = float(value)
    if Fraction(f) >= value:
        return f
    return _up(f)


@dataclass(frozen=True)
class BoundedValue:
    """A real number known to lie in [lower, upper]."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError(f"invalid interval [{self.lower}, {self.upper}]")

    @staticmethod
    def exact(value: Exactable) -> "BoundedValue":
        """Tightest float enclosure of an exact rational (zero width if dyadic)."""
        if isinstance(value, float):
            return BoundedValue(value, value)
        frac = Fraction(value)
        return BoundedValue(_float_below(frac), _float_above(frac))

    @staticmethod
    def hull(lo: float, hi: float) -> "BoundedValue":
        return BoundedValue(min(lo, hi), max(lo, hi))

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: Exactable) -> bool:
        if isinstance(value, float):
            return self.lower <= value <= self.upper
        frac = Fraction(value)
        return Fraction(self.lower) <= frac <= Fraction(self.upper)

    def overlaps(self, other: "BoundedValue") -> bool:
        return self.lower <= other.upper and other.lower <= self.upper

    def __neg__(self) -> "BoundedValue":
        return BoundedValue(-self.upper, -self.lower)

    def __add__(self, other: "BoundedValue | Exactable") -> "BoundedValue":
        other = _coerce(other)
        return BoundedValue(_down(self.lower + other.lower),
                            _up(self.upper + other.upper))

    def __sub__(self, other: "BoundedValue | Exactable") -> "BoundedValue":
        return self + (-_coerce(other))

    def __mul__(self, other: "BoundedValue | Exactable") -> "BoundedValue":
        other = _coerce(other)
        products = (self.lower * other.lower, self.lower * other.upper,
                    self.upper * other.lower, self.upper * other.upper)
        return BoundedValue(_down(min(products)), _up(max(products)))

    __radd__ = __add__
    __rmul__ = __mul__

    def scale_exact(self, factor: Fraction) -> "BoundedValue":
        """Multiply by an exact rational, rounding endpoints outward only once."""
        if factor >= 0:
            lo = _float_below(Fraction(self.lower) * factor)
            hi = _float_above(Fraction(self.upper) * factor)
        else:
            lo = _float_below(Fraction(self.upper) * factor)
            hi = _float_above(Fraction(self.lower) * factor)
        return BoundedValue(lo, hi)

    def square(self) -> "BoundedValue":
        """Enclosure of x**2 (handles sign-straddling intervals)."""
        a, b = self.lower, self.upper
        hi = _up(max(a * a, b * b))
        if a <= 0.0 <= b:
            return BoundedValue(0.0, hi)
        lo = _down(min(a * a, b * b))
        return BoundedValue(lo, hi)

    def __repr__(self) -> str:
        return f"[{self.lower:.10g}, {self.upper:.10g}]"


def _coerce(value: "BoundedValue | Exactable") -> BoundedValue:
    if isinstance(value, BoundedValue):
        return value
    return BoundedValue.exact(value)


def product_enclosure(factors: Iterable[Fraction],
                      tail_deficit: float = 0.0) -> BoundedValue:
    """Enclosure of prod(factors) * T with factors in [0, 1] and unknown tail
    T in [max(0, 1 - tail_deficit), 1].

    The running upper endpoint is clamped to be non-increasing, which keeps
    the enclosure antitone in the number of factors even when a factor is so
    close to 1 that a rounding step alone would bump the endpoint up.
    """
    lo, hi = 1.0, 1.0
    for f in factors:
        if not 0 <= f <= 1:
            raise ValueError(f"product factor {f} outside [0, 1]")
        f_lo, f_hi = _float_below(f), _float_above(f)
        lo = max(0.0, _down(lo * f_lo))
        hi = min(hi, _up(hi * f_hi))
        if hi == 0.0:
            lo = 0.0
            break
    if tail_deficit > 0.0:
        lo = max(0.0, _down(lo * _down(1.0 - tail_deficit)))
    return BoundedValue(lo, hi)


# Certified enclosure of pi, for quantities such as 6/pi^2.
PI = BoundedValue(math.nextafter(math.pi, 0.0), math.nextafter(math.pi, 4.0))


def six_over_pi_squared() -> BoundedValue:
    """Enclosure of 6/pi^2 = 1/zeta(2), the density of the visible points."""
    pi_sq = PI.square()
    lo = _down(6.0 / pi_sq.upper)
    hi = _up(6.0 / pi_sq.lower)
    return BoundedValue(lo, hi)
