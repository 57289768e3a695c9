"""
Pytest configuration and fixtures for the doubling Calabi-Yau invariants tests.
"""

import sys
import pytest
from pathlib import Path
from dotenv import load_dotenv

# Add src to Python path
project_root = Path(__file__).parent
src_path = project_root / "src"
sys.path.insert(0, str(src_path))

# Load environment variables
env_path = project_root / '.env'
load_dotenv(dotenv_path=env_path)

FAKER_SEED = 20241017


@pytest.fixture(scope="session")
def catalog_path():
    """Path of the bundled catalog."""
    return project_root / "data" / "fano_catalog.json"


@pytest.fixture(scope="session")
def catalog(catalog_path):
    """The bundled catalog, loaded once."""
    from fano_catalog import load_catalog
    return load_catalog(catalog_path)


@pytest.fixture(scope="session")
def records(catalog):
    """Invariant records of the published-table rows, keyed by id."""
    from doubling_invariants import invariant_record
    return {family.id: invariant_record(family) for family in catalog.published_rows()}


@pytest.fixture
def fake():
    """Seeded Faker so random inputs are reproducible."""
    from faker import Faker
    generator = Faker()
    generator.seed_instance(FAKER_SEED)
    return generator


@pytest.fixture
def catalog_document(catalog_path):
    """A fresh, mutable copy of the catalog JSON document."""
    import json
    with open(catalog_path, "r", encoding="utf-8") as fp:
        return json.load(fp)


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep CY_* settings from the shell out of the tests."""
    for name in ("CY_CATALOG", "CY_LOG_LEVEL", "CY_JOBS", "CY_BOUND"):
        monkeypatch.delenv(name, raising=False)


def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line(
        "markers", "unit: Unit tests of a single module"
    )
    config.addinivalue_line(
        "markers", "integration: Tests that run several modules together"
    )
    config.addinivalue_line(
        "markers", "property: Randomized property tests (seeded)"
    )
    config.addinivalue_line(
        "markers", "slow: Tests that take a long time to run"
    )
    config.addinivalue_line(
        "markers", "cli: End-to-end tests of the command line"
    )
    config.addinivalue_line(
        "markers", "mcp: Tests for MCP server functionality"
    )


def pytest_collection_modifyitems(config, items):
    """Automatically mark tests based on their names."""
    for item in items:
        name = item.name.lower()

        if "property" in name or "random" in name:
            item.add_marker(pytest.mark.property)

        if any(keyword in name for keyword in ["parallel", "determinism", "thousand"]):
            item.add_marker(pytest.mark.slow)

        if "cli" in name or "exit_code" in name:
            item.add_marker(pytest.mark.cli)

        if "mcp" in name:
            item.add_marker(pytest.mark.mcp)
