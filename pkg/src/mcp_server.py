#!/usr/bin/env python3
"""
Doubling Calabi-Yau Invariants MCP Server

An MCP server that exposes the Fano catalog, invariant records, verification
against the published tables and equivalence comparisons as tools.
"""

import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional

from mcp.server import Server
from mcp.types import TextContent, Tool

# Ensure environment variables are loaded (backup to the client config)
from dotenv import load_dotenv
env_path = Path(__file__).parent.parent / '.env'
load_dotenv(dotenv_path=env_path)

sys.path.append(str(Path(__file__).parent))

from doubling_invariants import InvariantError, invariant_record  # noqa: E402
from fano_catalog import Catalog, CatalogError, load_catalog, resolve_catalog_path  # noqa: E402
from form_equivalence import DEFAULT_BOUND, NotUnimodular, equivalence_search  # noqa: E402
from report_tools import (  # noqa: E402
    EXPORT_FORMATS,
    UnknownFormat,
    collect_records,
    export_table,
    family_descriptions,
    family_payload,
    verdict_payload,
)
from verification_service import verify_all  # noqa: E402

logger = logging.getLogger(__name__)

_catalog: Optional[Catalog] = None


def get_catalog() -> Catalog:
    """Load the catalog on first use ($CY_CATALOG or the bundled file)."""
    global _catalog
    if _catalog is None:
        _catalog = load_catalog(resolve_catalog_path())
    return _catalog


def reset_catalog() -> None:
    global _catalog
    _catalog = None


TOOL_NAMES = ("list_families", "show_family", "get_invariants", "verify_tables", "compare_families", "export_table")

# Create MCP server
mcp_server = Server("doubling-cy-invariants")


def _id_property(description: str) -> Dict[str, str]:
    return {"type": "string", "description": description}


@mcp_server.list_tools()
async def handle_list_tools() -> list[Tool]:
    """List available tools."""
    return [
        Tool(
            name="list_families",
            description="List the Picard-rank-one Fano threefold families in the catalog",
            inputSchema={"type": "object", "properties": {}},
        ),
        Tool(
            name="show_family",
            description="Show one catalog row: geometric data, triple-product tensor, c2 coefficients and published values",
            inputSchema={
                "type": "object",
                "properties": {"family_id": _id_property("Catalog id such as '1-8'")},
                "required": ["family_id"],
            },
        ),
        Tool(
            name="get_invariants",
            description="Cubic form, c2 pairing, kernel generator and lambda-invariant of a doubling Calabi-Yau",
            inputSchema={
                "type": "object",
                "properties": {
                    "family_id": _id_property("Catalog id such as '1-8'"),
                    "force": {
                        "type": "boolean",
                        "description": "Compute rows outside the published table (geometric mode without a tensor)",
                        "default": False,
                    },
                },
                "required": ["family_id"],
            },
        ),
        Tool(
            name="verify_tables",
            description="Re-derive every published number and report Match / Mismatch / NotApplicable per row",
            inputSchema={
                "type": "object",
                "properties": {
                    "strict": {
                        "type": "boolean",
                        "description": "Count known discrepancies as failures",
                        "default": False,
                    },
                },
            },
        ),
        Tool(
            name="compare_families",
            description="Decide whether two invariant pairs are distinct by lambda or related by a unimodular matrix",
            inputSchema={
                "type": "object",
                "properties": {
                    "id_a": _id_property("First catalog id"),
                    "id_b": _id_property("Second catalog id"),
                    "bound": {"type": "integer", "minimum": 1, "default": DEFAULT_BOUND},
                    "jobs": {"type": "integer", "minimum": 1, "default": 1},
                },
                "required": ["id_a", "id_b"],
            },
        ),
        Tool(
            name="export_table",
            description="Write the invariant table to a file",
            inputSchema={
                "type": "object",
                "properties": {
                    "format": {"type": "string", "enum": list(EXPORT_FORMATS)},
                    "path": {"type": "string", "description": "Output file path"},
                    "all_rows": {"type": "boolean", "default": False},
                },
                "required": ["format", "path"],
            },
        ),
    ]


def _text(payload: Any) -> list[TextContent]:
    if not isinstance(payload, str):
        payload = json.dumps(payload, indent=2)
    return [TextContent(type="text", text=payload)]


def run_tool(name: str, arguments: Dict[str, Any]) -> Any:
    """Execute one tool and return its JSON payload; domain errors propagate."""
    if name == "list_families":
        return [{"id": family.id, "description": family.description} for family in get_catalog()]

    if name == "show_family":
        family_id = arguments.get("family_id")
        if not family_id:
            raise ValueError("family_id is required")
        return family_payload(get_catalog().get(family_id))

    if name == "get_invariants":
        family_id = arguments.get("family_id")
        if not family_id:
            raise ValueError("family_id is required")
        family = get_catalog().get(family_id)
        if not family.in_published_table and not arguments.get("force", False):
            raise ValueError(f"{family_id} is not in the published table; set force to compute it anyway")
        return invariant_record(family, geometric=family.tensor is None).to_dict()

    if name == "verify_tables":
        strict = bool(arguments.get("strict", False))
        report = verify_all(get_catalog())
        payload = report.to_dict()
        payload["passed"] = report.passed(strict)
        return payload

    if name == "compare_families":
        id_a, id_b = arguments.get("id_a"), arguments.get("id_b")
        if not id_a or not id_b:
            raise ValueError("id_a and id_b are required")
        catalog = get_catalog()
        a = invariant_record(catalog.get(id_a))
        b = invariant_record(catalog.get(id_b))
        verdict = equivalence_search(
            a, b,
            bound=int(arguments.get("bound", DEFAULT_BOUND)),
            jobs=int(arguments.get("jobs", 1)),
        )
        return verdict_payload(a, b, verdict)

    if name == "export_table":
        fmt, path = arguments.get("format"), arguments.get("path")
        if not fmt or not path:
            raise ValueError("format and path are required")
        catalog = get_catalog()
        records = collect_records(catalog, all_rows=bool(arguments.get("all_rows", False)))
        written = export_table(records, fmt, path, descriptions=family_descriptions(catalog))
        return {"path": str(written), "format": fmt, "records": len(records)}

    raise LookupError(f"Unknown tool: {name}")


@mcp_server.call_tool()
async def handle_call_tool(name: str, arguments: dict[str, Any] | None) -> list[TextContent]:
    """Handle tool execution."""
    if not arguments:
        arguments = {}

    if name not in TOOL_NAMES:
        return _text(f"Unknown tool: {name}")

    try:
        return _text(run_tool(name, arguments))
    except (CatalogError, InvariantError, UnknownFormat, NotUnimodular, ValueError, OSError) as e:
        logger.warning("Tool %s failed: %s", name, e)
        return _text(f"Error: {e}")


async def main():
    """Run the MCP server."""
    from mcp.server.stdio import stdio_server

    logging.basicConfig(format="%(name)s:%(levelname)s:%(message)s", stream=sys.stderr, level=logging.INFO)
    async with stdio_server() as (read_stream, write_stream):
        await mcp_server.run(
            read_stream,
            write_stream,
            mcp_server.create_initialization_options()
        )

if __name__ == "__main__":
    asyncio.run(main())
