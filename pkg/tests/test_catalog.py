import numpy as np
import pytest

from ksrigidity.catalog import (
    CATALOG_NAMES, catalog_path, dumps, load_catalog, load_set, loads, save_set, validate_metadata,
)
from ksrigidity.errors import CatalogIOError, DuplicateRayError, FormatError

HEADER = "name: t\ndim: 3\nvectors: {n}\northogonalities: 3\nbases: 1\nparameters: 0\ncritical: false\n"

# distinct orthogonal pairs actually present in the shipped rays
EDGE_COUNTS = {
    "peres33": 72, "penrose33": 72, "schuette33": 76, "conway-kochen31": 71, "peres24": 108,
    "kernaghan20": 75, "pavicic20": 75, "cabello18": 63, "pavicic24": 95,
}


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


def test_all_files_load(catalog):
    assert list(catalog) == list(CATALOG_NAMES)
    for rec in catalog.values():
        assert len(rec.rays) == rec.expected.vectors


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_round_trip(name, catalog, tmp_path):
    rec = catalog[name]
    path = tmp_path / f"{name}.ks"
    save_set(rec, path)
    again = load_set(path)
    assert again.expected == rec.expected
    assert all(a.allclose(b, 1e-15) for a, b in zip(rec.rays, again.rays))


def test_decimal_round_trip_is_exact(catalog):
    rec = catalog["penrose33"].transformed(np.eye(3))  # drops the exact texts
    again = loads(dumps(rec))
    assert all(np.array_equal(a.vec, b.vec) for a, b in zip(rec.rays, again.rays))


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_counts(name, catalog):
    rep = validate_metadata(catalog[name])
    assert rep.check("vectors").passed
    assert rep.check("bases").passed
    assert rep.check("orthogonalities").actual == EDGE_COUNTS[name]


def test_pair_incidences_follow_basis_convention(catalog):
    # for sets where the header counts pairs basis by basis
    assert validate_metadata(catalog["peres24"]).basis_pair_incidences == 144
    assert validate_metadata(catalog["cabello18"]).basis_pair_incidences == 54


def test_penrose_is_complex_and_peres_real(catalog):
    assert catalog["peres33"].is_real()
    assert not catalog["penrose33"].is_real()


def test_duplicate_rays():
    text = HEADER.format(n=3) + "1,0,0\n0,1,0\n2,0,0\n"
    with pytest.raises(DuplicateRayError):
        loads(text)


def test_duplicate_up_to_phase():
    text = HEADER.format(n=3) + "1,i,0\n0,0,1\ni,-1,0\n"
    with pytest.raises(DuplicateRayError):
        loads(text)


@pytest.mark.parametrize("body,line", [
    ("1,0\n", 8),
    ("1,0,0\n0,1,0\n0,0,$\n", 10),
    ("1,0,0\n0,0,0\n", 9),
])
def test_format_errors_name_the_line(body, line):
    with pytest.raises(FormatError) as info:
        loads(HEADER.format(n=3) + body)
    assert info.value.line == line


def test_vector_count_mismatch():
    with pytest.raises(FormatError):
        loads(HEADER.format(n=4) + "1,0,0\n0,1,0\n0,0,1\n")


def test_missing_header_key():
    with pytest.raises(FormatError):
        loads("name: t\ndim: 3\n1,0,0\n")


def test_unknown_key():
    with pytest.raises(FormatError):
        loads("colour: red\n" + HEADER.format(n=0))


def test_comments_and_blank_lines():
    rec = loads("# a triad\n\n" + HEADER.format(n=3) + "1,0,0  # x\n\n0,1,0\n0,0,1\n")
    assert len(rec.rays) == 3


def test_missing_file(tmp_path):
    with pytest.raises(CatalogIOError):
        load_set(tmp_path / "nope.ks")


def test_permuted_keeps_texts(catalog):
    rec = catalog["cabello18"]
    perm = list(reversed(range(18)))
    p = rec.permuted(perm)
    assert p.texts[0] == rec.texts[17]
    assert p.rays[0].allclose(rec.rays[17])


def test_catalog_path():
    assert catalog_path("cabello18").name == "cabello18.ks"
