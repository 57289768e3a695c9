"""
Report Tools

Rendering of invariant tables, verification reports and comparison verdicts
as text, JSON, CSV, Markdown, HTML and Word documents. All numbers are
rendered with ASCII minus signs.
"""

import csv
import io
import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import markdown
from docx import Document
from texttable import Texttable

from doubling_invariants import InvariantError, InvariantRecord, TensorSource, invariant_record
from fano_catalog import Catalog, FanoFamily
from form_equivalence import DistinctByLambda, EquivalentWitness, Verdict
from verification_service import VerificationReport

logger = logging.getLogger(__name__)

EXPORT_FORMATS = ("json", "csv", "md", "html", "docx")
CSV_COLUMNS = ["id", "h11", "h21", "c30", "c21", "c12", "c03", "ker_a", "ker_b", "lambda"]
TABLE_HEADER = ["id", "(h11,h21)", "(e1^3,e1^2e2,e1e2^2,e2^3)", "kernel", "lambda"]
DESCRIPTION_TITLE = "Fano 3-fold"


class UnknownFormat(ValueError):
    """Requested an output format that is not supported."""


def format_tuple(values: Iterable[Any]) -> str:
    """'(36,18,-306,-904)': no spaces, ASCII minus."""
    return "(" + ",".join(str(value) for value in values) + ")"


def collect_records(catalog: Catalog, all_rows: bool = False) -> List[InvariantRecord]:
    """Records of the published-table rows, in table order.

    With ``all_rows`` every other family follows in id order, computed in
    geometric mode when it has no catalog tensor.
    """
    records = [invariant_record(family) for family in catalog.published_rows()]
    if all_rows:
        seen = {record.id for record in records}
        for family in catalog:
            if family.id in seen:
                continue
            try:
                records.append(invariant_record(family, geometric=family.tensor is None))
            except InvariantError as e:
                logger.warning("%s: skipped in full table: %s", family.id, e)
    return records


def build_meta(catalog: Catalog) -> Dict[str, Any]:
    return {
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "catalog": str(catalog.source) if catalog.source is not None else None,
        "schema_version": catalog.schema_version,
    }


def to_json(payload: Any, meta: Optional[Dict[str, Any]] = None) -> str:
    """Serialize a payload; meta, when given, sits beside the data, never inside it."""
    if meta is not None:
        payload = {"meta": meta, "data": payload}
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

def _label(record: InvariantRecord) -> str:
    if record.tensor_source is TensorSource.GEOMETRIC:
        return f"{record.id} [geometric]"
    return record.id


def render_texttable(records: Sequence[InvariantRecord]) -> str:
    table = Texttable(max_width=0)
    table.set_deco(Texttable.HEADER | Texttable.VLINES | Texttable.BORDER)
    table.set_cols_dtype(["t"] * len(TABLE_HEADER))
    table.set_cols_align(["l", "c", "r", "r", "r"])
    table.header(TABLE_HEADER)
    for record in records:
        table.add_row([
            _label(record),
            format_tuple(record.hodge),
            format_tuple(record.cubic.as_tuple()),
            format_tuple(record.kernel),
            str(record.lambda_value),
        ])
    return table.draw() + "\n"


def family_descriptions(catalog: Catalog) -> Dict[str, str]:
    return {family.id: family.description for family in catalog}


def render_markdown(records: Sequence[InvariantRecord], descriptions: Optional[Mapping[str, str]] = None) -> str:
    """Markdown table; ``descriptions`` adds a trailing Fano 3-fold column keyed by id."""
    header = "| id | (h11,h21) | (e1^3, e1^2e2, e1e2^2, e2^3) | lambda |"
    rule = "|---|---|---|---|"
    if descriptions is not None:
        header += f" {DESCRIPTION_TITLE} |"
        rule += "---|"
    lines = ["# Cubic forms and lambda-invariants", "", header, rule]
    for record in records:
        line = (
            f"| {_label(record)} | {format_tuple(record.hodge)} | "
            f"{format_tuple(record.cubic.as_tuple())} | {record.lambda_value} |"
        )
        if descriptions is not None:
            line += f" {descriptions.get(record.id, '')} |"
        lines.append(line)
    return "\n".join(lines) + "\n"


def render_csv(records: Sequence[InvariantRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in records:
        h11, h21 = record.hodge
        writer.writerow([record.id, h11, h21, *record.cubic.as_tuple(), *record.kernel, record.lambda_value])
    return buffer.getvalue()


def render_records_json(records: Sequence[InvariantRecord], meta: Optional[Dict[str, Any]] = None) -> str:
    return to_json([record.to_dict() for record in records], meta)


def render_html(records: Sequence[InvariantRecord], descriptions: Optional[Mapping[str, str]] = None) -> str:
    body = markdown.markdown(render_markdown(records, descriptions), extensions=["tables"])
    return (
        "<!DOCTYPE html>\n<html>\n<head><meta charset=\"utf-8\"><title>Doubling Calabi-Yau invariants</title></head>\n"
        f"<body>\n{body}\n</body>\n</html>\n"
    )


def write_docx(
    records: Sequence[InvariantRecord],
    path: Path,
    descriptions: Optional[Mapping[str, str]] = None,
) -> Path:
    doc = Document()
    doc.add_heading("Cubic forms and lambda-invariants", 0)
    doc.add_paragraph(
        "Cubic cup forms in the basis (e1, e2), generators of the kernel of c_2 and lambda-invariants "
        "of the doubling Calabi-Yau threefolds."
    )
    header = TABLE_HEADER + ([DESCRIPTION_TITLE] if descriptions is not None else [])
    table = doc.add_table(rows=1, cols=len(header))
    table.style = "Table Grid"
    for cell, title in zip(table.rows[0].cells, header):
        cell.text = title
    for record in records:
        cells = table.add_row().cells
        values = [
            _label(record),
            format_tuple(record.hodge),
            format_tuple(record.cubic.as_tuple()),
            format_tuple(record.kernel),
            str(record.lambda_value),
        ]
        if descriptions is not None:
            values.append(descriptions.get(record.id, ""))
        for cell, value in zip(cells, values):
            cell.text = value
    doc.save(str(path))
    return path


def export_table(
    records: Sequence[InvariantRecord],
    fmt: str,
    path,
    meta: Optional[Dict[str, Any]] = None,
    descriptions: Optional[Mapping[str, str]] = None,
) -> Path:
    """Write the invariant table to ``path`` in ``fmt``.

    Args:
        records: invariant records to export
        fmt: one of EXPORT_FORMATS
        path: output file
        meta: optional generation metadata (JSON only)
        descriptions: Fano 3-fold description per id (md, html and docx only)

    Returns:
        Path: the written file
    """
    if fmt not in EXPORT_FORMATS:
        raise UnknownFormat(f"unknown export format '{fmt}' (choose from {', '.join(EXPORT_FORMATS)})")
    path = Path(path)

    if fmt == "docx":
        write_docx(records, path, descriptions)
    else:
        renderers = {
            "json": lambda: render_records_json(records, meta),
            "csv": lambda: render_csv(records),
            "md": lambda: render_markdown(records, descriptions),
            "html": lambda: render_html(records, descriptions),
        }
        with open(path, "w", encoding="utf-8", newline="") as fp:
            fp.write(renderers[fmt]())

    logger.info("Exported %d records as %s to %s", len(records), fmt, path)
    return path


# ---------------------------------------------------------------------------
# Text views for the command line
# ---------------------------------------------------------------------------

def render_family_list(families: Sequence[FanoFamily]) -> str:
    return "".join(f"{family.id}\t{family.description}\n" for family in families)


def family_payload(family: FanoFamily) -> Dict[str, Any]:
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
        "tensor_provenance": family.tensor_provenance.value if family.tensor_provenance is not None else None,
        "c2": {"p": str(family.c2_p), "q": family.c2_q},
        "published": {
            "hodge": list(family.published.hodge),
            "cubic": list(family.published.cubic) if family.published.cubic is not None else None,
            "lambda": family.published.lambda_value,
            "kernel_generator": (
                list(family.published.kernel_generator)
                if family.published.kernel_generator is not None else None
            ),
        },
    }


def render_key_values(pairs: Sequence[Tuple[str, Any]]) -> str:
    width = max(len(key) for key, _ in pairs)
    lines = []
    for key, value in pairs:
        if isinstance(value, (tuple, list)):
            value = format_tuple(value)
        elif value is None:
            value = "-"
        lines.append(f"{key.ljust(width)}  {value}")
    return "\n".join(lines) + "\n"


def render_record_text(record: InvariantRecord) -> str:
    return render_key_values([
        ("id", record.id),
        ("tensor", record.tensor_source.value),
        ("hodge", record.hodge),
        ("cubic", record.cubic.as_tuple()),
        ("chern", record.chern.as_tuple()),
        ("kernel", record.kernel),
        ("lambda", record.lambda_value),
    ])


def render_report_text(report: VerificationReport, strict: bool = False) -> str:
    table = Texttable(max_width=0)
    table.set_deco(Texttable.HEADER | Texttable.VLINES | Texttable.BORDER)
    table.set_cols_dtype(["t"] * 5)
    table.header(["id", "check", "status", "computed", "published"])
    for result in report.results:
        status = result.status.value + (" (known)" if result.known_discrepancy else "")
        table.add_row([result.id, result.check, status, _cell(result.computed), _cell(result.published)])
    out = [table.draw(), ""]

    if report.distinctness:
        out.append("Lambda distinctness within Hodge groups:")
        for pair in report.distinctness:
            out.append(
                f"  {format_tuple(pair.hodge)} {pair.id_a} vs {pair.id_b}: "
                f"{pair.lambda_a} vs {pair.lambda_b} {pair.status.value}"
            )
        out.append("")

    summary = report.summary
    out.append(
        "Summary: "
        + ", ".join(f"{key}={summary[key]}" for key in sorted(summary))
    )
    out.append("Result: " + ("PASS" if report.passed(strict) else "FAIL") + (" (strict)" if strict else ""))
    return "\n".join(out) + "\n"


def _cell(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        return format_tuple(value)
    return str(value)


def render_verdict_text(a: InvariantRecord, b: InvariantRecord, verdict: Verdict) -> str:
    lines = [f"{a.id} vs {b.id}: {verdict.kind.value}"]
    if isinstance(verdict, DistinctByLambda):
        lines.append(f"  lambda({a.id}) = {verdict.lambda_a}")
        lines.append(f"  lambda({b.id}) = {verdict.lambda_b}")
    elif isinstance(verdict, EquivalentWitness):
        (m11, m12), (m21, m22) = verdict.matrix.rows
        lines.append(f"  witness P = [[{m11},{m12}],[{m21},{m22}]] carries {b.id} onto {a.id}")
    else:
        lines.append(f"  no unimodular witness with entries in [-{verdict.bound},{verdict.bound}]")
    return "\n".join(lines) + "\n"


def verdict_payload(a: InvariantRecord, b: InvariantRecord, verdict: Verdict) -> Dict[str, Any]:
    payload = {"a": a.id, "b": b.id}
    payload.update(verdict.to_dict())
    return payload
