#!/usr/bin/env python3
"""
Verification Service

Re-derives every published number in the catalog and reports, row by row,
whether the computation reproduces it. Each check is a separate executor so
the suite can be extended one check at a time.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from doubling_invariants import (
    InvariantError,
    InvariantRecord,
    geometric_tensor,
    invariant_record,
)
from fano_catalog import Catalog, FanoFamily, derive_c2_coeffs, hodge_numbers
from form_equivalence import cross_pairs

logger = logging.getLogger(__name__)


class CheckStatus(Enum):
    MATCH = "Match"
    MISMATCH = "Mismatch"
    NOT_APPLICABLE = "NotApplicable"


class DistinctStatus(Enum):
    DISTINCT = "Distinct"
    NOT_DISTINCT = "NotDistinct"


CHECK_NAMES = ("hodge", "cubic", "kernel", "lambda", "c2_coeffs", "geometric_tensor_agreement")


@dataclass
class CheckResult:
    id: str
    check: str
    computed: Any
    published: Any
    status: CheckStatus
    known_discrepancy: bool = False
    note: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "check": self.check,
            "computed": self.computed,
            "published": self.published,
            "status": self.status.value,
            "known_discrepancy": self.known_discrepancy,
            "note": self.note,
        }


@dataclass
class DistinctnessResult:
    hodge: List[int]
    id_a: str
    id_b: str
    lambda_a: int
    lambda_b: int

    @property
    def status(self) -> DistinctStatus:
        return DistinctStatus.DISTINCT if self.lambda_a != self.lambda_b else DistinctStatus.NOT_DISTINCT

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hodge": self.hodge,
            "id_a": self.id_a,
            "id_b": self.id_b,
            "lambda_a": self.lambda_a,
            "lambda_b": self.lambda_b,
            "status": self.status.value,
        }


@dataclass
class VerificationReport:
    results: List[CheckResult] = field(default_factory=list)
    distinctness: List[DistinctnessResult] = field(default_factory=list)

    def for_row(self, family_id: str) -> List[CheckResult]:
        return [result for result in self.results if result.id == family_id]

    def result(self, family_id: str, check: str) -> CheckResult:
        for result in self.results:
            if result.id == family_id and result.check == check:
                return result
        raise KeyError((family_id, check))

    def mismatches(self, include_known: bool = True) -> List[CheckResult]:
        return [
            result for result in self.results
            if result.status is CheckStatus.MISMATCH and (include_known or not result.known_discrepancy)
        ]

    @property
    def summary(self) -> Dict[str, int]:
        counts = {status.value: 0 for status in CheckStatus}
        for result in self.results:
            counts[result.status.value] += 1
        counts["known_discrepancies"] = sum(1 for result in self.mismatches() if result.known_discrepancy)
        counts["not_distinct_pairs"] = sum(
            1 for pair in self.distinctness if pair.status is DistinctStatus.NOT_DISTINCT
        )
        return counts

    def passed(self, strict: bool = False) -> bool:
        if any(pair.status is DistinctStatus.NOT_DISTINCT for pair in self.distinctness):
            return False
        return not self.mismatches(include_known=strict)

    def exit_code(self, strict: bool = False) -> int:
        return 0 if self.passed(strict) else 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "results": [result.to_dict() for result in self.results],
            "distinctness": [pair.to_dict() for pair in self.distinctness],
            "summary": self.summary,
        }


@dataclass
class RowContext:
    """What the executors share for one catalog row."""
    family: FanoFamily
    record: Optional[InvariantRecord] = None
    error: Optional[str] = None


class CheckExecutor(ABC):
    """One verification check applied to a catalog row."""

    name: str = ""

    @abstractmethod
    def run(self, row: RowContext) -> CheckResult:
        pass

    def _compare(self, row: RowContext, computed: Any, published: Any) -> CheckResult:
        status = CheckStatus.MATCH if computed == published else CheckStatus.MISMATCH
        return CheckResult(row.family.id, self.name, computed, published, status)

    def _not_applicable(self, row: RowContext, note: str, computed: Any = None) -> CheckResult:
        return CheckResult(row.family.id, self.name, computed, None, CheckStatus.NOT_APPLICABLE, note=note)

    def _failed(self, row: RowContext, published: Any) -> CheckResult:
        return CheckResult(row.family.id, self.name, None, published, CheckStatus.MISMATCH, note=row.error or "")


class HodgeCheck(CheckExecutor):
    name = "hodge"

    def run(self, row: RowContext) -> CheckResult:
        return self._compare(row, list(hodge_numbers(row.family)), list(row.family.published.hodge))


class CubicCheck(CheckExecutor):
    name = "cubic"

    def run(self, row: RowContext) -> CheckResult:
        published = row.family.published.cubic
        if published is None:
            return self._not_applicable(row, "no published cubic form")
        if row.record is None:
            return self._failed(row, list(published))
        return self._compare(row, list(row.record.cubic.as_tuple()), list(published))


class KernelCheck(CheckExecutor):
    name = "kernel"

    def run(self, row: RowContext) -> CheckResult:
        published = row.family.published.kernel_generator
        if published is None:
            return self._not_applicable(row, "no published kernel generator")
        if row.record is None:
            return self._failed(row, list(published))
        computed = list(row.record.kernel)
        negated = [-published[0], -published[1]]
        # generators are defined up to sign
        status = CheckStatus.MATCH if computed in (list(published), negated) else CheckStatus.MISMATCH
        return CheckResult(row.family.id, self.name, computed, list(published), status)


class LambdaCheck(CheckExecutor):
    name = "lambda"

    def run(self, row: RowContext) -> CheckResult:
        published = row.family.published.lambda_value
        if published is None:
            return self._not_applicable(row, "no published lambda")
        if row.record is None:
            return self._failed(row, published)
        return self._compare(row, row.record.lambda_value, published)


class C2CoeffsCheck(CheckExecutor):
    name = "c2_coeffs"

    def run(self, row: RowContext) -> CheckResult:
        family = row.family
        p, q = derive_c2_coeffs(family.index_r, family.h3_geom, family.k)
        return self._compare(row, [str(p), q], [str(family.c2_p), family.c2_q])


class GeometricTensorCheck(CheckExecutor):
    name = "geometric_tensor_agreement"

    def run(self, row: RowContext) -> CheckResult:
        family = row.family
        try:
            computed = list(geometric_tensor(family).as_tuple())
        except InvariantError as e:
            return self._not_applicable(row, str(e))
        if family.tensor is None:
            return self._not_applicable(row, "no catalog tensor to compare against", computed)
        return self._compare(row, computed, list(family.tensor.as_tuple()))


DEFAULT_EXECUTORS = (
    HodgeCheck(),
    CubicCheck(),
    KernelCheck(),
    LambdaCheck(),
    C2CoeffsCheck(),
    GeometricTensorCheck(),
)


class VerificationService:
    """Runs every check executor over every catalog row."""

    def __init__(self, executors=DEFAULT_EXECUTORS):
        self.executors = list(executors)

    def _row_context(self, family: FanoFamily) -> RowContext:
        row = RowContext(family)
        if family.tensor is None:
            return row
        try:
            row.record = invariant_record(family)
        except InvariantError as e:
            logger.warning("%s: invariant record failed: %s", family.id, e)
            row.error = f"{type(e).__name__}: {e}"
        return row

    def verify_row(self, family: FanoFamily, catalog: Catalog) -> List[CheckResult]:
        row = self._row_context(family)
        results = []
        for executor in self.executors:
            result = executor.run(row)
            if result.status is CheckStatus.MISMATCH and catalog.is_known_discrepancy(family.id, result.check):
                result.known_discrepancy = True
                logger.warning("%s: %s mismatch is a known discrepancy (computed %s, published %s)",
                               family.id, result.check, result.computed, result.published)
            else:
                logger.debug("%s: %s %s", family.id, result.check, result.status.value)
            results.append(result)
        return results

    def distinctness(self, records: List[InvariantRecord]) -> List[DistinctnessResult]:
        """Pairwise lambda comparison inside every Hodge group with two or more rows."""
        groups: Dict[tuple, List[InvariantRecord]] = {}
        for record in records:
            groups.setdefault(record.hodge, []).append(record)

        pairs = []
        for hodge in sorted(groups):
            members = {record.id: record for record in groups[hodge]}
            for id_a, id_b in cross_pairs(list(members)):
                pairs.append(DistinctnessResult(
                    list(hodge), id_a, id_b, members[id_a].lambda_value, members[id_b].lambda_value,
                ))
        return pairs

    def verify_all(self, catalog: Catalog) -> VerificationReport:
        report = VerificationReport()
        for family in catalog:
            logger.info("Verifying %s", family.id)
            report.results.extend(self.verify_row(family, catalog))

        records = []
        for family in catalog.published_rows():
            try:
                records.append(invariant_record(family))
            except InvariantError:
                continue  # already reported as a row failure
        report.distinctness = self.distinctness(records)

        logger.info("Verification summary: %s", report.summary)
        return report


def verify_all(catalog: Catalog) -> VerificationReport:
    return VerificationService().verify_all(catalog)
