"""
Tests for the Fano catalog: loading, validation, derivation formulas and round-trips.
"""

import json
from fractions import Fraction

import pytest

from fano_catalog import (
    DEFAULT_CATALOG_PATH,
    ORDINARY_COMPLETE_INTERSECTIONS,
    PUBLISHED_TABLE_IDS,
    OddDegree,
    ParseError,
    TensorProvenance,
    UnknownId,
    ValidationError,
    catalog_from_dict,
    chern_consistency,
    chern_series_ci,
    derive_c2_coeffs,
    dump_catalog,
    fano_genus,
    hodge_numbers,
    id_sort_key,
    load_catalog,
    resolve_catalog_path,
    save_catalog,
)


def _row(document, family_id):
    return next(row for row in document["families"] if row["id"] == family_id)


def _write(tmp_path, document, name="catalog.json"):
    path = tmp_path / name
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


@pytest.mark.unit
class TestLoadCatalog:
    """Test loading and validating catalog files."""

    def test_bundled_catalog_has_seventeen_rows(self, catalog):
        """Test the bundled catalog covers 1-1 through 1-17."""
        assert len(catalog) == 17
        assert catalog.ids == [f"1-{n}" for n in range(1, 18)]
        assert catalog.schema_version == 1

    def test_default_path_is_bundled_catalog(self):
        """Test load_catalog without a path reads the bundled file."""
        assert len(load_catalog()) == 17
        assert DEFAULT_CATALOG_PATH.name == "fano_catalog.json"

    def test_empty_file(self, tmp_path):
        """Test an empty file is a parse error."""
        path = tmp_path / "empty.json"
        path.write_text("", encoding="utf-8")
        with pytest.raises(ParseError):
            load_catalog(path)

    def test_missing_file(self, tmp_path):
        """Test a missing file is a parse error."""
        with pytest.raises(ParseError):
            load_catalog(tmp_path / "nowhere.json")

    def test_not_json(self, tmp_path):
        """Test malformed JSON is a parse error."""
        path = tmp_path / "broken.json"
        path.write_text("{families: [", encoding="utf-8")
        with pytest.raises(ParseError):
            load_catalog(path)

    def test_unknown_field_rejected(self, tmp_path, catalog_document):
        """Test the schema rejects unknown row fields."""
        _row(catalog_document, "1-3")["eta"] = 1
        with pytest.raises(ParseError, match="eta"):
            load_catalog(_write(tmp_path, catalog_document))

    def test_unknown_top_level_field_rejected(self, tmp_path, catalog_document):
        """Test the schema rejects unknown top-level fields."""
        catalog_document["errata"] = []
        with pytest.raises(ParseError):
            load_catalog(_write(tmp_path, catalog_document))

    def test_duplicated_id(self, tmp_path, catalog_document):
        """Test a repeated id fails the unique_id check."""
        catalog_document["families"].append(dict(_row(catalog_document, "1-8")))
        with pytest.raises(ValidationError) as excinfo:
            load_catalog(_write(tmp_path, catalog_document))
        assert excinfo.value.family_id == "1-8"
        assert excinfo.value.check == "unique_id"

    def test_wrong_anticanonical_degree(self, catalog_document):
        """Test -K^3 must equal r^3 * H^3."""
        _row(catalog_document, "1-5")["minus_k3"] = 12
        with pytest.raises(ValidationError) as excinfo:
            catalog_from_dict(catalog_document)
        assert excinfo.value.check == "anticanonical_degree"
        assert "1-5" in str(excinfo.value)

    def test_wrong_genus(self, catalog_document):
        """Test the recorded genus must follow from -K^3."""
        _row(catalog_document, "1-6")["genus_fano"] = 6
        with pytest.raises(ValidationError, match="genus_fano"):
            catalog_from_dict(catalog_document)

    def test_wrong_c2_coefficients(self, catalog_document):
        """Test c_2 coefficients must match Riemann-Roch."""
        _row(catalog_document, "1-9")["c2_p"] = [7, 2]
        with pytest.raises(ValidationError) as excinfo:
            catalog_from_dict(catalog_document)
        assert (excinfo.value.family_id, excinfo.value.check) == ("1-9", "c2_coeffs")

    def test_unreduced_c2_p(self, catalog_document):
        """Test c2_p must be stored in lowest terms."""
        _row(catalog_document, "1-8")["c2_p"] = [10, 4]
        with pytest.raises(ValidationError, match="not reduced"):
            catalog_from_dict(catalog_document)

    def test_k_must_equal_index(self, catalog_document):
        """Test k is tied to the Fano index."""
        _row(catalog_document, "1-13")["k"] = 1
        with pytest.raises(ValidationError, match="k_equals_index"):
            catalog_from_dict(catalog_document)

    def test_nonzero_h2e_rejected(self, catalog_document):
        """Test H^2.E must vanish in every stored tensor."""
        _row(catalog_document, "1-8")["tensor"] = [16, 1, -256, -44]
        with pytest.raises(ValidationError) as excinfo:
            catalog_from_dict(catalog_document)
        assert excinfo.value.check == "tensor"

    def test_tampered_inverted_tensor(self, catalog_document):
        """Test an inverted tensor must reproduce its published cubic."""
        _row(catalog_document, "1-10")["tensor"] = [22, 0, -484, -71]
        with pytest.raises(ValidationError) as excinfo:
            catalog_from_dict(catalog_document)
        assert (excinfo.value.family_id, excinfo.value.check) == ("1-10", "tensor_provenance")

    def test_normalization_exception_required(self, catalog_document):
        """Test 1-12 only loads while it is listed as a normalization exception."""
        catalog_document["tensor_normalization_exceptions"] = []
        with pytest.raises(ValidationError) as excinfo:
            catalog_from_dict(catalog_document)
        assert (excinfo.value.family_id, excinfo.value.check) == ("1-12", "tensor_normalization")

    def test_tensor_without_provenance(self, catalog_document):
        """Test a tensor needs a provenance tag."""
        _row(catalog_document, "1-9")["tensor_provenance"] = None
        with pytest.raises(ValidationError, match="tensor_provenance"):
            catalog_from_dict(catalog_document)

    def test_cubic_without_lambda(self, catalog_document):
        """Test cubic and lambda are published together."""
        _row(catalog_document, "1-2")["published"]["lambda"] = None
        with pytest.raises(ValidationError, match="published together"):
            catalog_from_dict(catalog_document)

    def test_cubic_without_kernel_generator(self, catalog_document):
        """Test a published cubic needs a published kernel generator."""
        _row(catalog_document, "1-2")["published"]["kernel_generator"] = None
        with pytest.raises(ValidationError, match="kernel_generator") as excinfo:
            catalog_from_dict(catalog_document)
        assert (excinfo.value.family_id, excinfo.value.check) == ("1-2", "published")

    def test_table_row_stripped_of_its_numbers(self, tmp_path, catalog_document):
        """Test a published table row cannot drop its cubic, lambda and tensor."""
        row = _row(catalog_document, "1-10")
        row["tensor"] = None
        row["tensor_provenance"] = None
        row["published"].update({"cubic": None, "lambda": None, "kernel_generator": None})
        with pytest.raises(ValidationError) as excinfo:
            load_catalog(_write(tmp_path, catalog_document))
        assert (excinfo.value.family_id, excinfo.value.check) == ("1-10", "published_table")

    def test_cubic_outside_published_table(self, catalog_document):
        """Test only published table rows may carry a cubic and lambda."""
        _row(catalog_document, "1-5")["published"].update(
            {"cubic": [20, 10, -90, -200], "lambda": 100, "kernel_generator": [1, 0]}
        )
        with pytest.raises(ValidationError, match="only published table rows") as excinfo:
            catalog_from_dict(catalog_document)
        assert (excinfo.value.family_id, excinfo.value.check) == ("1-5", "published_table")

    @pytest.mark.parametrize("family_id,check", [
        ("1-5", "lambda"),
        ("1-5", "cubic"),
        ("1-7", "kernel"),
        ("1-1", "geometric_tensor_agreement"),
    ])
    def test_discrepancy_for_inapplicable_check(self, catalog_document, family_id, check):
        """Test a known discrepancy must name a check the row can actually fail."""
        catalog_document["known_discrepancies"].append({"id": family_id, "check": check})
        with pytest.raises(ValidationError, match="does not apply") as excinfo:
            catalog_from_dict(catalog_document)
        assert (excinfo.value.family_id, excinfo.value.check) == (family_id, "known_discrepancies")

    def test_discrepancy_for_row_wide_check(self, catalog_document):
        """Test hodge discrepancies are accepted on rows outside the published table."""
        catalog_document["known_discrepancies"].append({"id": "1-5", "check": "hodge"})
        catalog = catalog_from_dict(catalog_document)
        assert catalog.is_known_discrepancy("1-5", "hodge")

    def test_discrepancy_for_unknown_id(self, catalog_document):
        """Test a known discrepancy must name a catalog row."""
        catalog_document["known_discrepancies"].append({"id": "1-99", "check": "lambda"})
        with pytest.raises(ValidationError, match="1-99"):
            catalog_from_dict(catalog_document)


@pytest.mark.unit
class TestCatalogContents:
    """Test the values stored in the bundled catalog."""

    def test_get_unknown_id(self, catalog):
        """Test unknown ids raise UnknownId, which is also a KeyError."""
        with pytest.raises(UnknownId):
            catalog.get("9-9")
        with pytest.raises(KeyError):
            catalog.get("9-9")

    def test_stated_tensors(self, catalog):
        """Test the tensors given explicitly for five rows."""
        expected = {
            "1-17": (1, 0, -16, -128),
            "1-2": (4, 0, -4, -8),
            "1-4": (8, 0, -64, -20),
            "1-8": (16, 0, -256, -44),
            "1-9": (18, 0, -324, -50),
        }
        for family_id, tensor in expected.items():
            family = catalog.get(family_id)
            assert family.tensor_provenance is TensorProvenance.PAPER_STATED
            assert family.tensor.as_tuple() == tensor

    def test_inverted_tensors(self, catalog):
        """Test which tensors were inverted from a published cubic."""
        for family_id in ("1-10", "1-12", "1-14"):
            assert catalog.get(family_id).tensor_provenance is TensorProvenance.INVERTED_FROM_CUBIC

    def test_published_cubic_exactly_on_table_rows(self, catalog):
        """Test cubic, lambda and kernel generator appear exactly on the table rows."""
        with_cubic = {family.id for family in catalog if family.published.cubic is not None}
        with_lambda = {family.id for family in catalog if family.published.lambda_value is not None}
        with_kernel = {family.id for family in catalog if family.published.kernel_generator is not None}
        assert with_cubic == with_lambda == with_kernel == set(PUBLISHED_TABLE_IDS)

    def test_published_table_order(self, catalog):
        """Test published_rows follows the order of the published table."""
        assert [family.id for family in catalog.published_rows()] == list(PUBLISHED_TABLE_IDS)

    def test_every_h2e_vanishes(self, catalog):
        """Test H^2.E = 0 on every stored tensor."""
        assert all(family.tensor.t21 == 0 for family in catalog if family.tensor is not None)

    def test_normalization_exceptions(self, catalog):
        """Test 1-12 and 1-14 store -K^3 as their leading coefficient."""
        assert catalog.tensor_normalization_exceptions == ["1-12", "1-14"]
        assert catalog.get("1-12").tensor.t30 == catalog.get("1-12").minus_k3 == 16
        assert catalog.get("1-14").tensor.t30 == catalog.get("1-14").minus_k3 == 32
        assert catalog.get("1-12").h3_geom == 2

    def test_known_discrepancies(self, catalog):
        """Test the bundled known discrepancy on 1-10."""
        assert catalog.is_known_discrepancy("1-10", "lambda")
        assert not catalog.is_known_discrepancy("1-9", "lambda")

    def test_id_sort_key(self):
        """Test ids sort numerically, not lexically."""
        assert sorted(["1-10", "1-2", "1-1"], key=id_sort_key) == ["1-1", "1-2", "1-10"]


@pytest.mark.unit
class TestRoundTrip:
    """Test dumping and reloading catalogs."""

    def test_dump_matches_source_document(self, catalog, catalog_document):
        """Test dump_catalog reproduces the bundled document."""
        assert dump_catalog(catalog) == catalog_document

    def test_save_then_load(self, catalog, tmp_path):
        """Test a saved catalog loads back equal."""
        path = save_catalog(catalog, tmp_path / "copy.json")
        assert load_catalog(path) == catalog

    def test_dump_reparses_identically(self, catalog):
        """Test the dumped document survives a JSON round-trip."""
        text = json.dumps(dump_catalog(catalog))
        assert catalog_from_dict(json.loads(text)) == catalog


@pytest.mark.unit
class TestDerivations:
    """Test the derivation formulas behind the catalog checks."""

    @pytest.mark.parametrize("index_r,h3_geom,k,expected", [
        (1, 16, 1, (Fraction(5, 2), 1)),
        (4, 1, 4, (Fraction(22), 4)),
        (1, 22, 1, (Fraction(23, 11), 1)),
    ])
    def test_derive_c2_coeffs(self, index_r, h3_geom, k, expected):
        """Test c_2 coefficients from index, degree and k."""
        assert derive_c2_coeffs(index_r, h3_geom, k) == expected

    def test_c2_of_v_on_table_rows(self, catalog):
        """Test c_2(V) = a*H^2 on the published table rows."""
        expected = {
            "1-17": Fraction(6), "1-2": Fraction(6), "1-4": Fraction(3), "1-8": Fraction(3, 2),
            "1-9": Fraction(4, 3), "1-10": Fraction(12, 11), "1-12": Fraction(6), "1-14": Fraction(3),
        }
        for family_id, a in expected.items():
            family = catalog.get(family_id)
            p, q = derive_c2_coeffs(family.index_r, family.h3_geom, family.k)
            assert p - family.k ** 2 == a, family_id
            assert (p, q) == (family.c2_p, family.c2_q)

    def test_derive_c2_rejects_nonpositive(self):
        """Test a zero index is rejected."""
        with pytest.raises(ValueError):
            derive_c2_coeffs(0, 4, 1)

    @pytest.mark.parametrize("ambient,degrees,expected", [
        (4, [4], (1, 6)),
        (6, [2, 2, 2], (1, 3)),
        # (1+H)^6 (1 - 2H + 4H^2)^2 = 1 + 2H + 3H^2 + O(H^3)
        (5, [2, 2], (2, 3)),
        (3, [], (4, 6)),
    ])
    def test_chern_series_ci(self, ambient, degrees, expected):
        """Test c_1 and c_2 of complete intersections."""
        assert chern_series_ci(ambient, degrees) == expected

    def test_chern_series_agrees_with_riemann_roch(self, catalog):
        """Test the two c_2 derivations agree on complete intersections."""
        for family_id, (ambient, degrees) in ORDINARY_COMPLETE_INTERSECTIONS.items():
            family = catalog.get(family_id)
            c1, c2 = chern_series_ci(ambient, degrees)
            p, _ = derive_c2_coeffs(family.index_r, family.h3_geom, family.k)
            assert c1 == family.index_r, family_id
            assert c2 == p - family.k ** 2, family_id

    def test_chern_series_rejects_zero_degree(self):
        """Test hypersurfaces of degree zero are rejected."""
        with pytest.raises(ValueError):
            chern_series_ci(4, [0])

    def test_hodge_numbers_match_table_on_all_rows(self, catalog):
        """Test derived Hodge numbers match the published ones on every row."""
        for family in catalog:
            assert hodge_numbers(family) == family.published.hodge, family.id

    @pytest.mark.parametrize("family_id,expected", [
        ("1-1", (2, 128)),
        ("1-10", (2, 44)),
        ("1-16", (2, 76)),
    ])
    def test_hodge_examples(self, catalog, family_id, expected):
        """Test Hodge numbers of a few individual rows."""
        assert hodge_numbers(catalog.get(family_id)) == expected

    @pytest.mark.parametrize("minus_k3,genus", [(4, 3), (8, 5), (2, 2), (64, 33)])
    def test_fano_genus(self, minus_k3, genus):
        """Test genus = -K^3/2 + 1."""
        assert fano_genus(minus_k3) == genus

    def test_fano_genus_odd_degree(self):
        """Test odd anticanonical degrees are rejected."""
        with pytest.raises(OddDegree):
            fano_genus(5)

    def test_chern_consistency_everywhere(self, catalog):
        """Test the c_2 consistency check holds on every row."""
        for family in catalog:
            assert chern_consistency(family) == 1, family.id


@pytest.mark.unit
class TestCatalogPath:
    """Test catalog path resolution."""

    def test_flag_wins(self, monkeypatch, tmp_path):
        """Test an explicit path beats CY_CATALOG."""
        monkeypatch.setenv("CY_CATALOG", str(tmp_path / "env.json"))
        assert resolve_catalog_path(str(tmp_path / "flag.json")) == tmp_path / "flag.json"

    def test_environment_second(self, monkeypatch, tmp_path):
        """Test CY_CATALOG is used when no path is given."""
        monkeypatch.setenv("CY_CATALOG", str(tmp_path / "env.json"))
        assert resolve_catalog_path() == tmp_path / "env.json"

    def test_default_last(self):
        """Test the bundled catalog is the fallback."""
        assert resolve_catalog_path() == DEFAULT_CATALOG_PATH
