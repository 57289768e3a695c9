"""
Doubling Invariants

Builds the invariant record of the doubling Calabi-Yau M glued from two copies
of a blown-up Fano threefold: generators of H^2(M, Z), the cubic cup form, the
pairing with c_2(M), the generator of its kernel and the lambda-invariant.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Any, Dict, Tuple

from fano_catalog import FanoFamily, hodge_numbers
from intersection_core import (
    H,
    ZERO_CLASS,
    Deg2Class,
    TripleTensor,
    pair_c2,
    proper_transform,
    triple_product,
)

logger = logging.getLogger(__name__)

# A class on M given by its restrictions to the two glued copies.
DoubleClass = Tuple[Deg2Class, Deg2Class]


class InvariantError(ArithmeticError):
    """Base class for failures while computing invariants."""


class ZeroChernClass(InvariantError):
    """c_2(M) pairs to zero with every class, so lambda is undefined."""


class NonIntegralPairing(InvariantError):
    """c_2(M).e_i came out non-integral; the catalog row is corrupt."""


class OddLeadingCoefficient(InvariantError):
    """e_1^3 of a doubling form is twice H^3 and must be even."""


class MissingGeometry(InvariantError):
    """A geometric input needed for an alternative tensor is not recorded."""


class MissingTensor(InvariantError):
    """The family has no catalog tensor."""


class TensorSource(Enum):
    CATALOG = "catalog"
    GEOMETRIC = "geometric"


@dataclass(frozen=True)
class CubicForm:
    """mu(e1,e1,e1), mu(e1,e1,e2), mu(e1,e2,e2), mu(e2,e2,e2)."""
    c30: int
    c21: int
    c12: int
    c03: int

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.c30, self.c21, self.c12, self.c03)

    def evaluate(self, a: int, b: int) -> int:
        """mu(v, v, v) for v = a*e1 + b*e2."""
        return a**3 * self.c30 + 3 * a * a * b * self.c21 + 3 * a * b * b * self.c12 + b**3 * self.c03


@dataclass(frozen=True)
class ChernPairing:
    """The linear form x -> c_2(M).x in the basis (e1, e2)."""
    l1: int
    l2: int

    def as_tuple(self) -> Tuple[int, int]:
        return (self.l1, self.l2)

    def is_zero(self) -> bool:
        return self.l1 == 0 and self.l2 == 0


@dataclass(frozen=True)
class InvariantRecord:
    id: str
    hodge: Tuple[int, int]
    cubic: CubicForm
    chern: ChernPairing
    kernel: Tuple[int, int]
    lambda_value: int
    tensor_source: TensorSource = TensorSource.CATALOG

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "hodge": list(self.hodge),
            "cubic": list(self.cubic.as_tuple()),
            "chern": list(self.chern.as_tuple()),
            "kernel": list(self.kernel),
            "lambda": self.lambda_value,
            "tensor_source": self.tensor_source.value,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "InvariantRecord":
        return cls(
            id=data["id"],
            hodge=tuple(data["hodge"]),
            cubic=CubicForm(*data["cubic"]),
            chern=ChernPairing(*data["chern"]),
            kernel=tuple(data["kernel"]),
            lambda_value=data["lambda"],
            tensor_source=TensorSource(data.get("tensor_source", TensorSource.CATALOG.value)),
        )


def generators(family: FanoFamily) -> Tuple[DoubleClass, DoubleClass]:
    """e1 = (H, H) and e2 = (kH - E, 0)."""
    return (H, H), (proper_transform(family.k), ZERO_CLASS)


def cup_product(x: DoubleClass, y: DoubleClass, z: DoubleClass, tensor: TripleTensor) -> int:
    """Cup product on M: the sum of the triple products on each copy."""
    return sum(triple_product(x[i], y[i], z[i], tensor) for i in (0, 1))


def cubic_from_tensor(tensor: TripleTensor, k: int) -> CubicForm:
    e1 = (H, H)
    e2 = (proper_transform(k), ZERO_CLASS)
    return CubicForm(
        cup_product(e1, e1, e1, tensor),
        cup_product(e1, e1, e2, tensor),
        cup_product(e1, e2, e2, tensor),
        cup_product(e2, e2, e2, tensor),
    )


def _require_tensor(family: FanoFamily) -> TripleTensor:
    if family.tensor is None:
        raise MissingTensor(f"family {family.id} has no catalog tensor (use geometric mode)")
    return family.tensor


def cubic_form(family: FanoFamily) -> CubicForm:
    """Cubic cup form of the doubling of ``family`` from its catalog tensor."""
    return cubic_from_tensor(_require_tensor(family), family.k)


def invert_tensor(cubic: CubicForm, k: int) -> TripleTensor:
    """Solve the triangular system of cubic_from_tensor for the tensor."""
    if cubic.c30 % 2:
        raise OddLeadingCoefficient(f"e1^3 = {cubic.c30} is odd")
    t30 = cubic.c30 // 2
    t21 = k * t30 - cubic.c21
    t12 = cubic.c12 - k * k * t30 + 2 * k * t21
    t03 = k**3 * t30 - 3 * k * k * t21 + 3 * k * t12 - cubic.c03
    return TripleTensor(t30, t21, t12, t03)


def _integral(value: Fraction, what: str, family_id: str) -> int:
    if value.denominator != 1:
        raise NonIntegralPairing(f"family {family_id}: {what} = {value} is not an integer")
    return value.numerator


def chern_pairing_from_tensor(tensor: TripleTensor, p: Fraction, q: int, k: int, family_id: str = "?") -> ChernPairing:
    # c_2(M) restricts to c_2(Y) on both copies; e2 lives on the first one only.
    l1 = 2 * pair_c2(H, p, q, k, tensor)
    l2 = pair_c2(proper_transform(k), p, q, k, tensor)
    return ChernPairing(_integral(l1, "c2.e1", family_id), _integral(l2, "c2.e2", family_id))


def chern_pairing(family: FanoFamily) -> ChernPairing:
    return chern_pairing_from_tensor(_require_tensor(family), family.c2_p, family.c2_q, family.k, family.id)


def kernel_generator(chern: ChernPairing) -> Tuple[int, int]:
    """Primitive solution of l1*a + l2*b = 0 with first nonzero coordinate positive."""
    if chern.is_zero():
        raise ZeroChernClass("c_2(M) is zero on H^2(M); lambda is undefined")
    g = gcd(chern.l1, chern.l2)
    a, b = chern.l2 // g, -chern.l1 // g
    if a < 0 or (a == 0 and b < 0):
        a, b = -a, -b
    return a, b


def lambda_invariant(cubic: CubicForm, chern: ChernPairing) -> int:
    """|m^3| for the generator m of the kernel of c_2(M)."""
    a, b = kernel_generator(chern)
    return abs(cubic.evaluate(a, b))


def geometric_tensor(family: FanoFamily) -> TripleTensor:
    """Tensor from the standard blow-up rules along a curve of degree d and genus g.

    H.E^2 = -d and E^3 = -deg N_C = -((2g - 2) + r*d); H^3 is kept from the
    catalog tensor when there is one.
    """
    missing = [
        name for name in ("deg_center", "genus_center", "index_r")
        if getattr(family, name, None) is None
    ]
    if missing:
        raise MissingGeometry(f"family {family.id}: missing {', '.join(missing)}")
    t30 = family.tensor.t30 if family.tensor is not None else family.h3_geom
    d = family.deg_center
    normal_degree = (2 * family.genus_center - 2) + family.index_r * d
    return TripleTensor(t30, 0, -d, -normal_degree)


def tau_rule_tensor(family: FanoFamily) -> TripleTensor:
    """Tensor from the tau-corrected expansion E^2 = -d*H^2 + (4d + 2g - 2 - 2*tau)*L.

    With H.L = 0 and E.L = -1 this reads H.E^2 = -d*H^3 and
    E^3 = -(4d + 2g - 2 - 2*tau).
    """
    if family.tau is None or family.deg_center is None or family.genus_center is None:
        raise MissingGeometry(f"family {family.id}: tau, deg_center and genus_center are all required")
    t30 = family.tensor.t30 if family.tensor is not None else family.h3_geom
    d = family.deg_center
    return TripleTensor(t30, 0, -d * t30, -(4 * d + 2 * family.genus_center - 2 - 2 * family.tau))


def invariant_record(family: FanoFamily, geometric: bool = False) -> InvariantRecord:
    """Assemble the full invariant record.

    Args:
        family: catalog row
        geometric: compute from geometric_tensor instead of the catalog tensor

    Returns:
        InvariantRecord labelled with the tensor it was computed from
    """
    if geometric:
        tensor = geometric_tensor(family)
        source = TensorSource.GEOMETRIC
    else:
        tensor = _require_tensor(family)
        source = TensorSource.CATALOG

    cubic = cubic_from_tensor(tensor, family.k)
    chern = chern_pairing_from_tensor(tensor, family.c2_p, family.c2_q, family.k, family.id)
    kernel = kernel_generator(chern)
    record = InvariantRecord(
        id=family.id,
        hodge=hodge_numbers(family),
        cubic=cubic,
        chern=chern,
        kernel=kernel,
        lambda_value=abs(cubic.evaluate(*kernel)),
        tensor_source=source,
    )
    logger.debug("%s (%s): cubic=%s chern=%s kernel=%s lambda=%d",
                 family.id, source.value, cubic.as_tuple(), chern.as_tuple(), kernel, record.lambda_value)
    return record
