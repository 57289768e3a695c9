"""
Fano Catalog

The versioned database of the 17 Picard-rank-one Fano threefold families
(IDs 1-1 ... 1-17), catalog loading and validation, and the formulas that
derive catalog fields from geometric inputs.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import comb, gcd
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import jsonschema

from intersection_core import TripleTensor

logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).parent.parent
DEFAULT_CATALOG_PATH = PROJECT_ROOT / "data" / "fano_catalog.json"
SCHEMA_PATH = PROJECT_ROOT / "data" / "fano_catalog.schema.json"
CATALOG_ENV_VAR = "CY_CATALOG"
SCHEMA_VERSION = 1

# Published table order: the eight rows whose doubling manifolds share Hodge numbers.
PUBLISHED_TABLE_IDS = ("1-2", "1-17", "1-8", "1-9", "1-10", "1-4", "1-12", "1-14")

# Families that are complete intersections in ordinary projective space:
# id -> (ambient dimension, degrees). 1-11 and 1-12 live in weighted spaces.
ORDINARY_COMPLETE_INTERSECTIONS: Dict[str, Tuple[int, Tuple[int, ...]]] = {
    "1-2": (4, (4,)),
    "1-3": (5, (2, 3)),
    "1-4": (6, (2, 2, 2)),
    "1-13": (4, (3,)),
    "1-14": (5, (2, 2)),
    "1-16": (4, (2,)),
    "1-17": (3, ()),
}


class CatalogError(ValueError):
    """Base class for catalog problems."""


class ParseError(CatalogError):
    """The catalog file is unreadable, not JSON, or does not match the schema."""


class ValidationError(CatalogError):
    """A catalog row violates a family invariant."""

    def __init__(self, family_id: str, check: str, detail: str):
        super().__init__(f"family {family_id}: {check} failed: {detail}")
        self.family_id = family_id
        self.check = check
        self.detail = detail


class OddDegree(CatalogError):
    """-K^3 is odd, so the Fano genus is undefined."""


class UnknownId(CatalogError, KeyError):
    """No family with this id in the catalog."""

    def __str__(self):
        return self.args[0] if self.args else "unknown family id"


class TensorProvenance(Enum):
    """Where a catalog tensor comes from."""
    PAPER_STATED = "paper"           # stated explicitly in the worked examples
    INVERTED_FROM_CUBIC = "inverted"  # solved back from the published cubic tuple


@dataclass(frozen=True)
class PublishedRow:
    """Published results for cross-checking: the Hodge pair and, where tabulated, cubic and lambda."""
    hodge: Tuple[int, int]
    cubic: Optional[Tuple[int, int, int, int]] = None
    lambda_value: Optional[int] = None
    kernel_generator: Optional[Tuple[int, int]] = None


@dataclass(frozen=True)
class FanoFamily:
    """One catalog row."""
    id: str
    description: str
    index_r: int
    k: int
    h3_geom: int
    minus_k3: int
    h12: int
    genus_fano: int
    genus_center: Optional[int]
    deg_center: Optional[int]
    tau: Optional[int]
    tensor: Optional[TripleTensor]
    c2_p: Fraction
    c2_q: int
    tensor_provenance: Optional[TensorProvenance]
    published: PublishedRow

    @property
    def in_published_table(self) -> bool:
        return self.published.cubic is not None


@dataclass(frozen=True)
class KnownDiscrepancy:
    id: str
    check: str
    note: str = ""


@dataclass
class Catalog:
    """A loaded, validated catalog. Iterates and indexes like a list of families."""
    families: List[FanoFamily]
    schema_version: int = SCHEMA_VERSION
    known_discrepancies: List[KnownDiscrepancy] = field(default_factory=list)
    tensor_normalization_exceptions: List[str] = field(default_factory=list)
    source: Optional[Path] = None

    def __iter__(self) -> Iterator[FanoFamily]:
        return iter(self.families)

    def __len__(self) -> int:
        return len(self.families)

    def __getitem__(self, index):
        return self.families[index]

    def __eq__(self, other):
        if not isinstance(other, Catalog):
            return NotImplemented
        # source is where it was read from, not part of the data
        return (
            self.families == other.families
            and self.schema_version == other.schema_version
            and self.known_discrepancies == other.known_discrepancies
            and self.tensor_normalization_exceptions == other.tensor_normalization_exceptions
        )

    @property
    def ids(self) -> List[str]:
        return [family.id for family in self.families]

    def get(self, family_id: str) -> FanoFamily:
        for family in self.families:
            if family.id == family_id:
                return family
        raise UnknownId(f"unknown family id: {family_id}")

    def published_rows(self) -> List[FanoFamily]:
        """Families with a published cubic, in published table order where known."""
        rows = [family for family in self.families if family.in_published_table]
        order = {family_id: position for position, family_id in enumerate(PUBLISHED_TABLE_IDS)}
        return sorted(rows, key=lambda family: (order.get(family.id, len(order)), id_sort_key(family.id)))

    def is_known_discrepancy(self, family_id: str, check: str) -> bool:
        return any(entry.id == family_id and entry.check == check for entry in self.known_discrepancies)


def id_sort_key(family_id: str) -> Tuple[int, ...]:
    """Numeric ordering for ids like '1-10' (so 1-2 sorts before 1-10)."""
    try:
        return tuple(int(part) for part in family_id.split("-"))
    except ValueError:
        return (10**9,)


# ---------------------------------------------------------------------------
# Derivation formulas
# ---------------------------------------------------------------------------

def fano_genus(minus_k3: int) -> int:
    """Genus g = -K^3/2 + 1 of a Fano threefold."""
    if minus_k3 <= 0:
        raise OddDegree(f"-K^3 must be positive, got {minus_k3}")
    if minus_k3 % 2:
        raise OddDegree(f"-K^3 = {minus_k3} is odd")
    return minus_k3 // 2 + 1


def derive_c2_coeffs(index_r: int, h3_geom: int, k: int) -> Tuple[Fraction, int]:
    """Coefficients (p, q) of c_2(Y) = p*H^2 - q*H*E.

    c_2(V) = a*H^2 with a fixed by (1/24) c_1(V) c_2(V) = chi(O_V) = 1, i.e.
    a = 24 / (r * H^3). The blow-up formula adds the class of the centre,
    k^2 * H^2, and subtracts c_1(V).E = r*H*E.
    """
    if index_r < 1 or h3_geom < 1:
        raise ValueError(f"index_r and h3_geom must be positive, got {index_r}, {h3_geom}")
    a = Fraction(24, index_r * h3_geom)
    return a + k * k, index_r


def chern_consistency(family: FanoFamily) -> Fraction:
    """(1/24) c_1(V) c_2(V) for the derived c_2(V); equals chi(O_V) = 1 when consistent."""
    p, _ = derive_c2_coeffs(family.index_r, family.h3_geom, family.k)
    a = p - family.k * family.k
    return Fraction(family.index_r) * a * family.h3_geom / 24


def chern_series_ci(ambient_dim: int, degrees: Sequence[int]) -> Tuple[int, Fraction]:
    """(c_1, c_2) coefficients of a complete intersection in CP^n.

    Expands (1+H)^(n+1) / prod(1 + d_i H) modulo H^3.
    """
    if any(degree < 1 for degree in degrees):
        raise ValueError(f"degrees must be positive, got {list(degrees)}")
    n = ambient_dim
    series = [Fraction(1), Fraction(n + 1), Fraction(comb(n + 1, 2))]
    for degree in degrees:
        inverse = (1, -degree, degree * degree)  # 1/(1+dH) mod H^3
        series = [
            series[0] * inverse[0],
            series[1] * inverse[0] + series[0] * inverse[1],
            series[2] * inverse[0] + series[1] * inverse[1] + series[0] * inverse[2],
        ]
    c1 = series[1]
    return int(c1), series[2]


def hodge_numbers(family: FanoFamily) -> Tuple[int, int]:
    """(h^{1,1}, h^{2,1}) of the doubling Calabi-Yau built from ``family``."""
    return 2, 2 * family.h12 + family.minus_k3 + 22


# ---------------------------------------------------------------------------
# Loading and validation
# ---------------------------------------------------------------------------

def resolve_catalog_path(explicit: Optional[str] = None) -> Path:
    """--catalog flag, then $CY_CATALOG, then the bundled catalog."""
    if explicit:
        return Path(explicit)
    from_env = os.getenv(CATALOG_ENV_VAR)
    if from_env:
        return Path(from_env)
    return DEFAULT_CATALOG_PATH


def _load_schema() -> Dict[str, Any]:
    with open(SCHEMA_PATH, "r", encoding="utf-8") as fp:
        return json.load(fp)


def _validate_schema(document: Any) -> None:
    validator = jsonschema.Draft7Validator(_load_schema())
    errors = sorted(validator.iter_errors(document), key=lambda error: list(error.absolute_path))
    if errors:
        first = errors[0]
        where = "/".join(str(part) for part in first.absolute_path) or "<root>"
        raise ParseError(f"catalog does not match schema at {where}: {first.message}")


def _parse_rational(pair: Sequence[int], family_id: str) -> Fraction:
    num, den = pair
    if gcd(abs(num), den) != 1:
        raise ValidationError(family_id, "c2_p", f"[{num}, {den}] is not reduced")
    return Fraction(num, den)


def _family_from_dict(row: Dict[str, Any]) -> FanoFamily:
    published = row["published"]
    provenance = row["tensor_provenance"]
    return FanoFamily(
        id=row["id"],
        description=row["description"],
        index_r=row["index_r"],
        k=row["k"],
        h3_geom=row["h3_geom"],
        minus_k3=row["minus_k3"],
        h12=row["h12"],
        genus_fano=row["genus_fano"],
        genus_center=row["genus_center"],
        deg_center=row["deg_center"],
        tau=row["tau"],
        tensor=TripleTensor.from_sequence(row["tensor"]) if row["tensor"] is not None else None,
        c2_p=_parse_rational(row["c2_p"], row["id"]),
        c2_q=row["c2_q"],
        tensor_provenance=TensorProvenance(provenance) if provenance is not None else None,
        published=PublishedRow(
            hodge=tuple(published["hodge"]),
            cubic=tuple(published["cubic"]) if published["cubic"] is not None else None,
            lambda_value=published["lambda"],
            kernel_generator=(
                tuple(published["kernel_generator"]) if published["kernel_generator"] is not None else None
            ),
        ),
    )


def validate_family(family: FanoFamily, normalization_exceptions: Sequence[str] = ()) -> None:
    """Check every row invariant; raise ValidationError naming the failed check."""
    fid = family.id

    if family.k != family.index_r:
        raise ValidationError(fid, "k_equals_index", f"k = {family.k}, index_r = {family.index_r}")

    if family.minus_k3 != family.index_r ** 3 * family.h3_geom:
        raise ValidationError(
            fid, "anticanonical_degree",
            f"-K^3 = {family.minus_k3} but r^3 * H^3 = {family.index_r ** 3 * family.h3_geom}",
        )

    try:
        genus = fano_genus(family.minus_k3)
    except OddDegree as e:
        raise ValidationError(fid, "genus_fano", str(e))
    if family.genus_fano != genus:
        raise ValidationError(fid, "genus_fano", f"recorded {family.genus_fano}, -K^3/2 + 1 = {genus}")

    p, q = derive_c2_coeffs(family.index_r, family.h3_geom, family.k)
    if (family.c2_p, family.c2_q) != (p, q):
        raise ValidationError(
            fid, "c2_coeffs",
            f"recorded ({family.c2_p}, {family.c2_q}), Riemann-Roch gives ({p}, {q})",
        )

    published = family.published
    if (published.cubic is None) != (published.lambda_value is None):
        raise ValidationError(fid, "published", "cubic and lambda must be published together")
    if (published.cubic is None) != (published.kernel_generator is None):
        raise ValidationError(fid, "published", "cubic and kernel_generator must be published together")
    expected = fid in PUBLISHED_TABLE_IDS
    if family.in_published_table != expected:
        raise ValidationError(
            fid, "published_table",
            "row is in the published table but has no published cubic" if expected
            else "only published table rows may carry a cubic and lambda",
        )

    if (family.tensor is None) != (family.tensor_provenance is None):
        raise ValidationError(fid, "tensor_provenance", "tensor and tensor_provenance must be set together")
    if published.cubic is not None and family.tensor is None:
        raise ValidationError(fid, "tensor", "rows with a published cubic need a tensor")

    if family.tensor is not None:
        _validate_tensor(family, normalization_exceptions)


def _validate_tensor(family: FanoFamily, normalization_exceptions: Sequence[str]) -> None:
    fid = family.id
    tensor = family.tensor
    if tensor.t21 != 0:
        raise ValidationError(fid, "tensor", f"H^2.E must vanish, got {tensor.t21}")

    if fid in normalization_exceptions:
        if tensor.t30 != family.minus_k3:
            raise ValidationError(
                fid, "tensor_normalization",
                f"exception row needs t30 = -K^3 = {family.minus_k3}, got {tensor.t30}",
            )
    elif tensor.t30 != family.h3_geom:
        raise ValidationError(fid, "tensor_normalization", f"t30 = {tensor.t30}, H^3 = {family.h3_geom}")

    if family.tensor_provenance is TensorProvenance.INVERTED_FROM_CUBIC:
        from doubling_invariants import CubicForm, InvariantError, invert_tensor

        if family.published.cubic is None:
            raise ValidationError(fid, "tensor_provenance", "inverted tensor without a published cubic")
        try:
            recomputed = invert_tensor(CubicForm(*family.published.cubic), family.k)
        except InvariantError as e:
            raise ValidationError(fid, "tensor_provenance", str(e))
        if recomputed != tensor:
            raise ValidationError(
                fid, "tensor_provenance",
                f"inverting the published cubic gives {recomputed.as_tuple()}, stored {tensor.as_tuple()}",
            )


def _check_applies(family: FanoFamily, check: str) -> bool:
    """Whether a verification check has published or stored data to compare on this row."""
    if check in ("cubic", "lambda"):
        return family.published.cubic is not None
    if check == "kernel":
        return family.published.kernel_generator is not None
    if check == "geometric_tensor_agreement":
        return family.tensor is not None
    return True


def catalog_from_dict(document: Dict[str, Any], source: Optional[Path] = None) -> Catalog:
    """Build and validate a Catalog from an already-parsed JSON document."""
    _validate_schema(document)

    families: List[FanoFamily] = []
    seen = set()
    for row in document["families"]:
        if row["id"] in seen:
            raise ValidationError(row["id"], "unique_id", "duplicate id")
        seen.add(row["id"])
        families.append(_family_from_dict(row))

    exceptions = list(document.get("tensor_normalization_exceptions", []))
    for family_id in exceptions:
        if family_id not in seen:
            raise ValidationError(family_id, "tensor_normalization", "exception names an unknown id")

    discrepancies = [
        KnownDiscrepancy(entry["id"], entry["check"], entry.get("note", ""))
        for entry in document.get("known_discrepancies", [])
    ]
    for entry in discrepancies:
        if entry.id not in seen:
            raise ValidationError(entry.id, "known_discrepancies", "entry names an unknown id")

    for family in families:
        validate_family(family, exceptions)

    by_id = {family.id: family for family in families}
    for entry in discrepancies:
        if not _check_applies(by_id[entry.id], entry.check):
            raise ValidationError(
                entry.id, "known_discrepancies",
                f"check '{entry.check}' does not apply to this row",
            )

    return Catalog(
        families=families,
        schema_version=document["schema_version"],
        known_discrepancies=discrepancies,
        tensor_normalization_exceptions=exceptions,
        source=source,
    )


def load_catalog(path: Optional[os.PathLike] = None) -> Catalog:
    """Load and validate a catalog file (default: the bundled catalog)."""
    path = Path(path) if path is not None else DEFAULT_CATALOG_PATH
    try:
        with open(path, "r", encoding="utf-8") as fp:
            text = fp.read()
    except OSError as e:
        raise ParseError(f"cannot read catalog {path}: {e}")

    if not text.strip():
        raise ParseError(f"catalog {path} is empty")
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"catalog {path} is not valid JSON: {e}")

    catalog = catalog_from_dict(document, source=path)
    logger.info("Loaded catalog %s: %d families, schema version %d", path, len(catalog), catalog.schema_version)
    return catalog


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def family_to_dict(family: FanoFamily) -> Dict[str, Any]:
    published = family.published
    return {
        "id": family.id,
        "description": family.description,
        "index_r": family.index_r,
        "k": family.k,
        "h3_geom": family.h3_geom,
        "minus_k3": family.minus_k3,
        "h12": family.h12,
        "genus_fano": family.genus_fano,
        "genus_center": family.genus_center,
        "deg_center": family.deg_center,
        "tau": family.tau,
        "tensor": list(family.tensor.as_tuple()) if family.tensor is not None else None,
        "c2_p": [family.c2_p.numerator, family.c2_p.denominator],
        "c2_q": family.c2_q,
        "tensor_provenance": family.tensor_provenance.value if family.tensor_provenance is not None else None,
        "published": {
            "hodge": list(published.hodge),
            "cubic": list(published.cubic) if published.cubic is not None else None,
            "lambda": published.lambda_value,
            "kernel_generator": (
                list(published.kernel_generator) if published.kernel_generator is not None else None
            ),
        },
    }


def dump_catalog(catalog: Catalog) -> Dict[str, Any]:
    """Serialize a catalog back to the JSON document layout."""
    return {
        "schema_version": catalog.schema_version,
        "tensor_normalization_exceptions": list(catalog.tensor_normalization_exceptions),
        "known_discrepancies": [
            {"id": entry.id, "check": entry.check, "note": entry.note}
            for entry in catalog.known_discrepancies
        ],
        "families": [family_to_dict(family) for family in catalog.families],
    }


def save_catalog(catalog: Catalog, path: os.PathLike) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(dump_catalog(catalog), fp, indent=2, ensure_ascii=False)
        fp.write("\n")
    return path
