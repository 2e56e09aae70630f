"""Catalog files: KS ray sets with their expected table metadata.

File layout (UTF-8 text, ``#`` starts a comment)::

    name: cabello18
    title: Cabello et al.          (optional)
    dim: 4
    vectors: 18
    orthogonalities: 54
    bases: 9
    parameters: 0
    critical: true
    1, 0, 0, 0
    ...

All seven keys other than ``title`` are required and must precede the first
ray line.  Each ray line holds ``dim`` comma-separated component
expressions (see :mod:`ksrigidity.expr`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CatalogIOError, DuplicateRayError, EvalError, FormatError, KSError, ParseError
from .expr import format_decimal, parse_component
from .rays import DEFAULT_TOL, Ray, Tolerance, canonicalize, ray_matrix

# distinct catalog rays are far apart; anything this close is the same ray
DUPLICATE_OVERLAP = 1 - 1e-9

CATALOG_DIR = Path(__file__).resolve().parent / "catalog"
CATALOG_NAMES = (
    "peres33", "penrose33", "schuette33", "conway-kochen31", "peres24",
    "kernaghan20", "pavicic20", "cabello18", "pavicic24",
)

_REQUIRED = ("name", "dim", "vectors", "orthogonalities", "bases", "parameters", "critical")
_INT_KEYS = ("dim", "vectors", "orthogonalities", "bases", "parameters")


@dataclass(frozen=True)
class Expected:
    vectors: int
    orthogonalities: int
    bases: int
    parameters: int
    critical: bool


@dataclass(frozen=True, eq=False)
class KSSetRecord:
    name: str
    dim: int
    rays: tuple[Ray, ...]
    expected: Expected
    title: str | None = None
    # original component texts, kept so re-serialising is exact
    texts: tuple[tuple[str, ...], ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(self.rays))
        for r in self.rays:
            if r.dim != self.dim:
                raise FormatError(f"ray of dimension {r.dim} in a dimension-{self.dim} set")
        if len(self.rays) != self.expected.vectors:
            raise FormatError(
                f"{self.name}: {len(self.rays)} rays but header says vectors: {self.expected.vectors}"
            )
        dup = find_duplicate(self.rays)
        if dup is not None:
            raise DuplicateRayError(f"{self.name}: rays {dup[0]} and {dup[1]} are the same projective point")

    @property
    def matrix(self) -> np.ndarray:
        return ray_matrix(self.rays)

    def is_real(self) -> bool:
        return all(r.is_real() for r in self.rays)

    def permuted(self, perm: Sequence[int], name: str | None = None) -> "KSSetRecord":
        """Record whose ray k is this record's ray ``perm[k]``."""
        texts = None if self.texts is None else tuple(self.texts[p] for p in perm)
        return KSSetRecord(name or self.name, self.dim, tuple(self.rays[p] for p in perm),
                           self.expected, self.title, texts)

    def transformed(self, unitary: np.ndarray, name: str | None = None,
                    tol: Tolerance = DEFAULT_TOL) -> "KSSetRecord":
        """Apply one matrix to every ray (component texts are dropped)."""
        rays = tuple(canonicalize(unitary @ r.vec, tol) for r in self.rays)
        return KSSetRecord(name or self.name, self.dim, rays, self.expected, self.title, None)

    def with_rays(self, rays: Sequence[Ray], name: str) -> "KSSetRecord":
        return KSSetRecord(name, self.dim, tuple(rays), self.expected, self.title, None)


def find_duplicate(rays: Sequence[Ray]) -> tuple[int, int] | None:
    if not rays:
        return None
    m = ray_matrix(rays)
    overlap = np.abs(m.conj() @ m.T)
    np.fill_diagonal(overlap, 0)
    hits = np.argwhere(overlap > DUPLICATE_OVERLAP)
    if len(hits):
        i, j = sorted(map(int, hits[0]))
        return i, j
    return None


def _parse_bool(value: str, line: int) -> bool:
    v = value.strip().lower()
    if v in ("true", "yes", "1"):
        return True
    if v in ("false", "no", "0"):
        return False
    raise FormatError(f"expected true/false, got {value!r}", line)


def loads(text: str, tol: Tolerance = DEFAULT_TOL, source: str = "<string>") -> KSSetRecord:
    """Parse catalog text into a record with canonicalized rays."""
    header: dict[str, str] = {}
    header_line: dict[str, int] = {}
    rays, texts = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if sep and key.strip().isidentifier():
            key = key.strip()
            if rays:
                raise FormatError(f"header key {key!r} after the first ray", lineno)
            if key not in _REQUIRED and key != "title":
                raise FormatError(f"unknown header key {key!r}", lineno)
            if key in header:
                raise FormatError(f"duplicate header key {key!r}", lineno)
            header[key] = value.strip()
            header_line[key] = lineno
            continue
        missing = [k for k in _REQUIRED if k not in header]
        if missing:
            raise FormatError(f"ray line before header keys {', '.join(missing)}", lineno)
        dim = int(header["dim"])
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != dim:
            raise FormatError(f"expected {dim} components, found {len(parts)}", lineno)
        try:
            comps = [parse_component(p) for p in parts]
        except (ParseError, EvalError) as exc:
            raise FormatError(str(exc), lineno) from exc
        try:
            rays.append(canonicalize(comps, tol))
        except KSError as exc:
            raise FormatError(str(exc), lineno) from exc
        texts.append(tuple(parts))

    missing = [k for k in _REQUIRED if k not in header]
    if missing:
        raise FormatError(f"{source}: missing header keys {', '.join(missing)}")
    values = {}
    for k in _INT_KEYS:
        try:
            values[k] = int(header[k])
        except ValueError:
            raise FormatError(f"{k} must be an integer, got {header[k]!r}", header_line[k]) from None
    if values["dim"] < 3:
        raise FormatError("dim must be at least 3", header_line["dim"])
    expected = Expected(
        vectors=values["vectors"],
        orthogonalities=values["orthogonalities"],
        bases=values["bases"],
        parameters=values["parameters"],
        critical=_parse_bool(header["critical"], header_line["critical"]),
    )
    return KSSetRecord(header["name"], values["dim"], tuple(rays), expected,
                       header.get("title"), tuple(texts))


def load_set(path, tol: Tolerance = DEFAULT_TOL) -> KSSetRecord:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CatalogIOError(f"cannot read {path}: {exc}") from exc
    return loads(text, tol, source=str(path))


def dumps(record: KSSetRecord) -> str:
    """Serialise a record; rays without source text are printed as decimals."""
    lines = [f"name: {record.name}"]
    if record.title:
        lines.append(f"title: {record.title}")
    e = record.expected
    lines += [
        f"dim: {record.dim}",
        f"vectors: {e.vectors}",
        f"orthogonalities: {e.orthogonalities}",
        f"bases: {e.bases}",
        f"parameters: {e.parameters}",
        f"critical: {'true' if e.critical else 'false'}",
    ]
    if record.texts is not None:
        lines += [", ".join(t) for t in record.texts]
    else:
        lines += [", ".join(format_decimal(c) for c in r.components) for r in record.rays]
    return "\n".join(lines) + "\n"


def save_set(record: KSSetRecord, path) -> None:
    Path(path).write_text(dumps(record), encoding="utf-8")


def catalog_path(name: str) -> Path:
    return CATALOG_DIR / f"{name}.ks"


def load_catalog(tol: Tolerance = DEFAULT_TOL) -> dict[str, KSSetRecord]:
    """All shipped catalog sets, keyed by name, in table order."""
    return {name: load_set(catalog_path(name), tol) for name in CATALOG_NAMES}


@dataclass(frozen=True)
class Check:
    column: str
    expected: int
    actual: int

    @property
    def passed(self) -> bool:
        return self.expected == self.actual


@dataclass(frozen=True)
class ValidationReport:
    name: str
    checks: tuple[Check, ...]
    # orthogonal pairs counted once per basis they sit in; informational only
    basis_pair_incidences: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, column: str) -> Check:
        return next(c for c in self.checks if c.column == column)


def validate_metadata(record: KSSetRecord, tol: Tolerance = DEFAULT_TOL) -> ValidationReport:
    """Recount vectors, orthogonal pairs and bases and compare with the header."""
    from .graph import build_graph, enumerate_bases

    graph = build_graph(record, tol)
    bases = enumerate_bases(graph)
    e = record.expected
    checks = (
        Check("vectors", e.vectors, len(record.rays)),
        Check("orthogonalities", e.orthogonalities, len(graph.edges)),
        Check("bases", e.bases, len(bases)),
    )
    incidences = sum(len(list(itertools.combinations(b.vertices, 2))) for b in bases)
    return ValidationReport(record.name, checks, incidences)
