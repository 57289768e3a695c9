"""
Form Equivalence

Unimodular change of basis on invariant pairs (cubic form, c_2 pairing) and a
bounded exhaustive search for an isomorphism between two such pairs.

Basis convention: P acts by rows, the new basis vector i is sum_j P[i][j] e_j.
Applying P and then Q is the same as applying the product Q*P.
"""

import logging
import multiprocessing
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Optional, Tuple, Union

from doubling_invariants import ChernPairing, CubicForm, InvariantRecord, lambda_invariant

logger = logging.getLogger(__name__)

DEFAULT_BOUND = 10

Vector = Tuple[int, int]


class NotUnimodular(ValueError):
    """The matrix does not have determinant +1 or -1."""


@dataclass(frozen=True)
class UnimodularMatrix:
    m11: int
    m12: int
    m21: int
    m22: int

    def __post_init__(self):
        if abs(self.determinant) != 1:
            raise NotUnimodular(f"{self.rows} has determinant {self.determinant}")

    @property
    def determinant(self) -> int:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def rows(self) -> Tuple[Vector, Vector]:
        return (self.m11, self.m12), (self.m21, self.m22)

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.m11, self.m12, self.m21, self.m22)

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def inverse(self) -> "UnimodularMatrix":
        d = self.determinant  # +-1, so dividing is multiplying
        return UnimodularMatrix(d * self.m22, -d * self.m12, -d * self.m21, d * self.m11)

    @classmethod
    def identity(cls) -> "UnimodularMatrix":
        return cls(1, 0, 0, 1)


IDENTITY = UnimodularMatrix.identity()
SWAP = UnimodularMatrix(0, 1, 1, 0)


def _trilinear(cubic: CubicForm, u: Vector, v: Vector, w: Vector) -> int:
    return (
        cubic.c30 * u[0] * v[0] * w[0]
        + cubic.c21 * (u[0] * v[0] * w[1] + u[0] * v[1] * w[0] + u[1] * v[0] * w[0])
        + cubic.c12 * (u[0] * v[1] * w[1] + u[1] * v[0] * w[1] + u[1] * v[1] * w[0])
        + cubic.c03 * u[1] * v[1] * w[1]
    )


def transform_cubic(cubic: CubicForm, P: UnimodularMatrix) -> CubicForm:
    r1, r2 = P.rows
    return CubicForm(
        _trilinear(cubic, r1, r1, r1),
        _trilinear(cubic, r1, r1, r2),
        _trilinear(cubic, r1, r2, r2),
        _trilinear(cubic, r2, r2, r2),
    )


def transform_chern(chern: ChernPairing, P: UnimodularMatrix) -> ChernPairing:
    return ChernPairing(
        P.m11 * chern.l1 + P.m12 * chern.l2,
        P.m21 * chern.l1 + P.m22 * chern.l2,
    )


def transform(cubic: CubicForm, chern: ChernPairing, P: UnimodularMatrix) -> Tuple[CubicForm, ChernPairing]:
    """Re-express the pair in the basis given by the rows of P."""
    if not isinstance(P, UnimodularMatrix):
        P = UnimodularMatrix(*P)
    return transform_cubic(cubic, P), transform_chern(chern, P)


class VerdictKind(Enum):
    DISTINCT_BY_LAMBDA = "DistinctByLambda"
    EQUIVALENT_WITNESS = "EquivalentWitness"
    INCONCLUSIVE_AT_BOUND = "InconclusiveAtBound"


@dataclass(frozen=True)
class DistinctByLambda:
    lambda_a: int
    lambda_b: int
    kind: VerdictKind = VerdictKind.DISTINCT_BY_LAMBDA

    def to_dict(self):
        return {"verdict": self.kind.value, "lambda_a": self.lambda_a, "lambda_b": self.lambda_b}


@dataclass(frozen=True)
class EquivalentWitness:
    """transform(b.cubic, b.chern, matrix) == (a.cubic, a.chern)."""
    matrix: UnimodularMatrix
    kind: VerdictKind = VerdictKind.EQUIVALENT_WITNESS

    def to_dict(self):
        return {"verdict": self.kind.value, "matrix": [list(row) for row in self.matrix.rows]}


@dataclass(frozen=True)
class InconclusiveAtBound:
    bound: int
    kind: VerdictKind = VerdictKind.INCONCLUSIVE_AT_BOUND

    def to_dict(self):
        return {"verdict": self.kind.value, "bound": self.bound}


Verdict = Union[DistinctByLambda, EquivalentWitness, InconclusiveAtBound]


def _candidates(m11: int, bound: int) -> Iterator[UnimodularMatrix]:
    """All unimodular matrices with this m11, lexicographic in (m12, m21, m22)."""
    span = range(-bound, bound + 1)
    for m12 in span:
        for m21 in span:
            for m22 in span:
                if abs(m11 * m22 - m12 * m21) == 1:
                    yield UnimodularMatrix(m11, m12, m21, m22)


def _scan_block(
    target: Tuple[CubicForm, ChernPairing],
    source: Tuple[CubicForm, ChernPairing],
    m11: int,
    bound: int,
) -> Tuple[Optional[Tuple[int, int, int, int]], int]:
    """First witness in one m11 block, and how many candidates were tried."""
    tried = 0
    for P in _candidates(m11, bound):
        tried += 1
        if transform(source[0], source[1], P) == target:
            return P.as_tuple(), tried
    return None, tried


def equivalence_search(a: InvariantRecord, b: InvariantRecord, bound: int = DEFAULT_BOUND, jobs: int = 1) -> Verdict:
    """Decide whether (b.cubic, b.chern) can be carried onto (a.cubic, a.chern).

    Unequal lambda invariants settle the question without a search. Otherwise
    every unimodular P with entries in [-bound, bound] is tried in lexicographic
    order of (m11, m12, m21, m22); the first witness wins for any ``jobs``.
    """
    if bound < 1:
        raise ValueError(f"bound must be at least 1, got {bound}")

    lambda_a = lambda_invariant(a.cubic, a.chern)
    lambda_b = lambda_invariant(b.cubic, b.chern)
    if lambda_a != lambda_b:
        logger.info("%s vs %s: distinct by lambda (%d != %d)", a.id, b.id, lambda_a, lambda_b)
        return DistinctByLambda(lambda_a, lambda_b)

    target = (a.cubic, a.chern)
    source = (b.cubic, b.chern)
    blocks = list(range(-bound, bound + 1))
    jobs = max(1, min(jobs, len(blocks)))
    logger.info("%s vs %s: equal lambda %d, searching bound %d in %d blocks with %d worker(s)",
                a.id, b.id, lambda_a, bound, len(blocks), jobs)

    witness = None
    if jobs == 1:
        for m11 in blocks:
            found, tried = _scan_block(target, source, m11, bound)
            logger.debug("block m11=%d: %d candidates", m11, tried)
            if found is not None:
                witness = found
                break
    else:
        with multiprocessing.Pool(processes=jobs) as pool:
            pending = [pool.apply_async(_scan_block, (target, source, m11, bound)) for m11 in blocks]
            # blocks are collected in m11 order, so the first hit is the lexicographic minimum
            for m11, result in zip(blocks, pending):
                found, tried = result.get()
                logger.debug("block m11=%d: %d candidates", m11, tried)
                if found is not None:
                    witness = found
                    break
            pool.terminate()

    if witness is None:
        logger.info("%s vs %s: no witness within bound %d", a.id, b.id, bound)
        return InconclusiveAtBound(bound)
    logger.info("%s vs %s: witness %s", a.id, b.id, witness)
    return EquivalentWitness(UnimodularMatrix(*witness))


def confirm_witness(a: InvariantRecord, b: InvariantRecord, verdict: Verdict) -> bool:
    """Re-apply the witness matrix; False for verdicts without one."""
    if not isinstance(verdict, EquivalentWitness):
        return False
    return transform(b.cubic, b.chern, verdict.matrix) == (a.cubic, a.chern)


def cross_pairs(ids: List[str]) -> List[Tuple[str, str]]:
    """Unordered pairs of distinct ids, in input order."""
    return [(ids[i], ids[j]) for i in range(len(ids)) for j in range(i + 1, len(ids))]
