#!/usr/bin/env python3
"""
Command-line interface for the doubling Calabi-Yau invariants engine.

    python src/main.py list [--filter 1-2,1-8]
    python src/main.py show 1-8
    python src/main.py invariants 1-4 [--force]
    python src/main.py table [--all]
    python src/main.py verify [--strict]
    python src/main.py compare 1-2 1-17 [--bound 10] [--jobs 4]
    python src/main.py export --format csv --out table.csv

Exit codes: 0 success, 1 strict verification failure, 2 usage or input error.
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

sys.path.append(str(Path(__file__).parent))

from doubling_invariants import (  # noqa: E402
    InvariantError,
    geometric_tensor,
    invariant_record,
    tau_rule_tensor,
)
from fano_catalog import (  # noqa: E402
    ORDINARY_COMPLETE_INTERSECTIONS,
    Catalog,
    CatalogError,
    chern_consistency,
    chern_series_ci,
    derive_c2_coeffs,
    hodge_numbers,
    load_catalog,
    resolve_catalog_path,
)
from form_equivalence import DEFAULT_BOUND, NotUnimodular, equivalence_search  # noqa: E402
from report_tools import (  # noqa: E402
    UnknownFormat,
    build_meta,
    collect_records,
    export_table,
    family_descriptions,
    family_payload,
    render_family_list,
    render_key_values,
    render_record_text,
    render_records_json,
    render_report_text,
    render_texttable,
    render_verdict_text,
    to_json,
    verdict_payload,
)
from verification_service import verify_all  # noqa: E402

# Load .env from project root
env_path = Path(__file__).parent.parent / '.env'
load_dotenv(dotenv_path=env_path)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2

LOG_FORMAT = "%(name)s:%(levelname)s:%(message)s"

# Shared options default to SUPPRESS in the parser and are filled in after parsing.
GLOBAL_DEFAULTS = {"catalog": None, "meta": False, "verbose": 0, "format": "text"}


class UsageError(ValueError):
    """Bad combination of arguments."""


@dataclass
class Settings:
    catalog_path: Path
    log_level: str = "WARNING"
    jobs: int = 1
    bound: int = DEFAULT_BOUND


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got '{raw}'")


def build_settings(args: argparse.Namespace) -> Settings:
    """Flag, then environment, then built-in default."""
    verbose = getattr(args, "verbose", 0) or 0
    if verbose >= 2:
        level = "DEBUG"
    elif verbose == 1:
        level = "INFO"
    else:
        level = os.getenv("CY_LOG_LEVEL", "WARNING").upper()

    jobs = getattr(args, "jobs", None)
    bound = getattr(args, "bound", None)
    settings = Settings(
        catalog_path=resolve_catalog_path(getattr(args, "catalog", None)),
        log_level=level,
        jobs=jobs if jobs is not None else _env_int("CY_JOBS", 1),
        bound=bound if bound is not None else _env_int("CY_BOUND", DEFAULT_BOUND),
    )
    if settings.jobs < 1:
        raise UsageError(f"jobs must be at least 1, got {settings.jobs}")
    if settings.bound < 1:
        raise UsageError(f"bound must be at least 1, got {settings.bound}")
    return settings


def configure_logging(level: str) -> None:
    numeric = getattr(logging, level, None)
    if not isinstance(numeric, int):
        raise UsageError(f"unknown log level '{level}'")
    logging.basicConfig(format=LOG_FORMAT, stream=sys.stderr, level=numeric, force=True)


def build_parser() -> argparse.ArgumentParser:
    # Shared options may be given before or after the subcommand; SUPPRESS keeps
    # the subcommand level from overwriting a value given at the top level.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", default=argparse.SUPPRESS, help="Catalog JSON (default: $CY_CATALOG or bundled)")
    common.add_argument("--meta", action="store_true", default=argparse.SUPPRESS,
                        help="Add a meta object to JSON output")
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS,
                        help="-v for INFO, -vv for DEBUG logging on stderr")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--format", choices=["text", "json"], default=argparse.SUPPRESS, help="Output format")

    parser = argparse.ArgumentParser(
        prog="cy-invariants",
        description="Invariants of doubling Calabi-Yau threefolds built from Picard-rank-one Fano threefolds",
        parents=[common, output],
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    p_list = subparsers.add_parser("list", parents=[common, output], help="List catalog families")
    p_list.add_argument("--filter", default="", help="Comma-separated ids to show")

    p_show = subparsers.add_parser("show", parents=[common, output], help="Show one catalog row with derived data")
    p_show.add_argument("id")

    p_inv = subparsers.add_parser("invariants", parents=[common, output], help="Invariant record of one family")
    p_inv.add_argument("id")
    p_inv.add_argument("--force", action="store_true",
                       help="Allow rows outside the published table (geometric mode without a catalog tensor)")

    p_table = subparsers.add_parser("table", parents=[common, output], help="Table of invariant records")
    p_table.add_argument("--all", action="store_true", help="Include every family")

    p_verify = subparsers.add_parser("verify", parents=[common, output], help="Verify against published tables")
    p_verify.add_argument("--strict", action="store_true", help="Fail on any mismatch, known or not")

    p_compare = subparsers.add_parser("compare", parents=[common, output], help="Compare two invariant pairs")
    p_compare.add_argument("id_a")
    p_compare.add_argument("id_b")
    p_compare.add_argument("--bound", type=int, default=None, help="Entry bound for the matrix search")
    p_compare.add_argument("--jobs", type=int, default=None, help="Worker processes for the search")

    p_export = subparsers.add_parser("export", parents=[common], help="Export the invariant table to a file")
    p_export.add_argument("--format", dest="export_format", required=True, help="json, csv, md, html or docx")
    p_export.add_argument("--out", required=True, help="Output path")
    p_export.add_argument("--all", action="store_true", help="Include every family")

    return parser


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _meta(args, catalog: Catalog):
    return build_meta(catalog) if args.meta else None


def cmd_list(args, catalog: Catalog) -> int:
    families = list(catalog)
    wanted = [item.strip() for item in args.filter.split(",") if item.strip()]
    if wanted:
        families = [catalog.get(family_id) for family_id in wanted]

    if args.format == "json":
        payload = [{"id": family.id, "description": family.description} for family in families]
        sys.stdout.write(to_json(payload, _meta(args, catalog)))
    else:
        sys.stdout.write(render_family_list(families))
    return EXIT_OK


def cmd_show(args, catalog: Catalog) -> int:
    family = catalog.get(args.id)
    payload = family_payload(family)
    p, q = derive_c2_coeffs(family.index_r, family.h3_geom, family.k)
    derived = {
        "hodge": list(hodge_numbers(family)),
        "c2_derived": {"p": str(p), "q": q},
        "chern_consistency": str(chern_consistency(family)),
    }
    if family.id in ORDINARY_COMPLETE_INTERSECTIONS:
        ambient, degrees = ORDINARY_COMPLETE_INTERSECTIONS[family.id]
        c1, c2 = chern_series_ci(ambient, degrees)
        derived["chern_series"] = {"ambient_dim": ambient, "degrees": list(degrees), "c1": c1, "c2": str(c2)}
    try:
        derived["geometric_tensor"] = list(geometric_tensor(family).as_tuple())
    except InvariantError as e:
        derived["geometric_tensor"] = None
        logger.info("%s: no geometric tensor: %s", family.id, e)
    if family.tau is not None:
        derived["tau_rule_tensor"] = list(tau_rule_tensor(family).as_tuple())
    payload["derived"] = derived

    if args.format == "json":
        sys.stdout.write(to_json(payload, _meta(args, catalog)))
        return EXIT_OK

    rows = [
        ("id", family.id),
        ("description", family.description),
        ("index_r", family.index_r),
        ("k", family.k),
        ("H^3", family.h3_geom),
        ("-K^3", family.minus_k3),
        ("h12", family.h12),
        ("genus", family.genus_fano),
        ("center (d, g)", (family.deg_center, family.genus_center)),
        ("tau", family.tau),
        ("tensor", payload["tensor"]),
        ("provenance", payload["tensor_provenance"]),
        ("c2(Y)", f"{family.c2_p} H^2 - {family.c2_q} HE"),
        ("chern consistency", derived["chern_consistency"]),
        ("hodge", derived["hodge"]),
        ("published hodge", family.published.hodge),
        ("published cubic", family.published.cubic),
        ("published lambda", family.published.lambda_value),
        ("geometric tensor", derived["geometric_tensor"]),
    ]
    if "chern_series" in derived:
        series = derived["chern_series"]
        rows.append(("CI chern series", f"c1 = {series['c1']}, c2 = {series['c2']}"))
    if "tau_rule_tensor" in derived:
        rows.append(("tau-rule tensor", derived["tau_rule_tensor"]))
    sys.stdout.write(render_key_values(rows))
    return EXIT_OK


def cmd_invariants(args, catalog: Catalog) -> int:
    family = catalog.get(args.id)
    if not family.in_published_table and not args.force:
        raise UsageError(f"{family.id} is not in the published table; pass --force to compute it anyway")

    geometric = family.tensor is None
    if geometric:
        logger.warning("%s has no catalog tensor; using geometric mode", family.id)
    record = invariant_record(family, geometric=geometric)

    if args.format == "json":
        sys.stdout.write(to_json(record.to_dict(), _meta(args, catalog)))
    else:
        sys.stdout.write(render_record_text(record))
    return EXIT_OK


def cmd_table(args, catalog: Catalog) -> int:
    records = collect_records(catalog, all_rows=args.all)
    if args.format == "json":
        sys.stdout.write(render_records_json(records, _meta(args, catalog)))
    else:
        sys.stdout.write(render_texttable(records))
    return EXIT_OK


def cmd_verify(args, catalog: Catalog) -> int:
    report = verify_all(catalog)
    if args.format == "json":
        sys.stdout.write(to_json(report.to_dict(), _meta(args, catalog)))
    else:
        sys.stdout.write(render_report_text(report, strict=args.strict))
    return report.exit_code(strict=args.strict)


def cmd_compare(args, catalog: Catalog, settings: Settings) -> int:
    a = invariant_record(catalog.get(args.id_a))
    b = invariant_record(catalog.get(args.id_b))
    verdict = equivalence_search(a, b, bound=settings.bound, jobs=settings.jobs)
    if args.format == "json":
        sys.stdout.write(to_json(verdict_payload(a, b, verdict), _meta(args, catalog)))
    else:
        sys.stdout.write(render_verdict_text(a, b, verdict))
    return EXIT_OK


def cmd_export(args, catalog: Catalog) -> int:
    records = collect_records(catalog, all_rows=args.all)
    path = export_table(
        records, args.export_format, args.out, _meta(args, catalog), family_descriptions(catalog),
    )
    logger.info("Wrote %s", path)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    for name, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, name):
            setattr(args, name, value)

    try:
        settings = build_settings(args)
        configure_logging(settings.log_level)
        catalog = load_catalog(settings.catalog_path)

        if args.command == "list":
            return cmd_list(args, catalog)
        if args.command == "show":
            return cmd_show(args, catalog)
        if args.command == "invariants":
            return cmd_invariants(args, catalog)
        if args.command == "table":
            return cmd_table(args, catalog)
        if args.command == "verify":
            return cmd_verify(args, catalog)
        if args.command == "compare":
            return cmd_compare(args, catalog, settings)
        if args.command == "export":
            return cmd_export(args, catalog)
        raise UsageError(f"unknown command '{args.command}'")
    except (CatalogError, InvariantError, UnknownFormat, NotUnimodular, UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
