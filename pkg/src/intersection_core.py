"""
Intersection Core

Exact cup products on the blow-up Y = Bl_C(V) of a Picard-rank-one Fano threefold
along a curve. H^2(Y, Z) is spanned by H (pullback of the ample generator) and
the exceptional divisor E; every degree-6 number is read off a symmetric
triple-product tensor (H^3, H^2E, HE^2, E^3).

All arithmetic is over Python integers and fractions.Fraction.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union


# c_2 coefficients such as 3/2 or 12/11 are rational; Fraction keeps them reduced
# with a positive denominator.
Rational = Fraction


def as_rational(value: Union[int, Fraction, Tuple[int, int]]) -> Fraction:
    """Coerce an int, a Fraction or a (num, den) pair into a reduced Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, tuple) or isinstance(value, list):
        num, den = value
        if den == 0:
            raise ZeroDivisionError("rational with zero denominator")
        return Fraction(num, den)
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"expected an integer or a rational, got {value!r}")
    return Fraction(value)


@dataclass(frozen=True)
class TripleTensor:
    """The four triple products of (H, E), in units of the point class."""
    t30: int  # H.H.H
    t21: int  # H.H.E
    t12: int  # H.E.E
    t03: int  # E.E.E

    def __post_init__(self):
        for name in ("t30", "t21", "t12", "t03"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError(f"TripleTensor.{name} must be an integer, got {value!r}")

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.t30, self.t21, self.t12, self.t03)

    @classmethod
    def from_sequence(cls, values) -> "TripleTensor":
        t30, t21, t12, t03 = values
        return cls(t30, t21, t12, t03)


@dataclass(frozen=True)
class Deg2Class:
    """A divisor class a*H + b*E on Y."""
    a: int
    b: int

    def __add__(self, other: "Deg2Class") -> "Deg2Class":
        return Deg2Class(self.a + other.a, self.b + other.b)

    def __neg__(self) -> "Deg2Class":
        return Deg2Class(-self.a, -self.b)

    def __sub__(self, other: "Deg2Class") -> "Deg2Class":
        return self + (-other)

    def scaled(self, factor: int) -> "Deg2Class":
        return Deg2Class(factor * self.a, factor * self.b)

    def as_tuple(self) -> Tuple[int, int]:
        return (self.a, self.b)


H = Deg2Class(1, 0)
E = Deg2Class(0, 1)
ZERO_CLASS = Deg2Class(0, 0)


def proper_transform(k: int) -> Deg2Class:
    """Class of the proper transform of the anticanonical K3 divisor, k*H - E."""
    return Deg2Class(k, -1)


def triple_product(x: Deg2Class, y: Deg2Class, z: Deg2Class, t: TripleTensor) -> int:
    """Evaluate x.y.z on Y by full multilinear expansion against the tensor."""
    return (
        x.a * y.a * z.a * t.t30
        + (x.a * y.a * z.b + x.a * y.b * z.a + x.b * y.a * z.a) * t.t21
        + (x.a * y.b * z.b + x.b * y.a * z.b + x.b * y.b * z.a) * t.t12
        + x.b * y.b * z.b * t.t03
    )


def pair_c2(x: Deg2Class, p: Fraction, q: int, k: int, t: TripleTensor) -> Fraction:
    """Evaluate x.c_2(Y) with c_2(Y) = p*H^2 - q*H*E.

    c_2(Y) is kept as a product of divisor classes and never expanded in the
    (H^2, L) basis of H^4(Y). ``k`` is accepted for signature parity with the
    catalog data; the product itself does not depend on it.
    """
    p = as_rational(p)
    h_part = x.a * t.t30 + x.b * t.t21   # x.H.H
    e_part = x.a * t.t21 + x.b * t.t12   # x.H.E
    return p * h_part - q * e_part
