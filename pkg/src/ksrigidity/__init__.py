"""Kochen-Specker ray sets: orthogonality graphs, colourability and rigidity."""
# ruff: noqa: F401

from .catalog import (
    CATALOG_NAMES, Expected, KSSetRecord, ValidationReport, catalog_path, dumps, load_catalog,
    load_set, loads, save_set, validate_metadata,
)
from .coloring import Coloring, Result, SearchStats, check_critical, find_ks_coloring
from .errors import *  # noqa: F401,F403
from .expr import parse_component
from .graph import Basis, OrthoGraph, build_graph, enumerate_bases, graph_isomorphic, to_dot
from .rays import (
    DEFAULT_TOL, ComplexScalar, Ray, Tolerance, canonicalize, inner_product, is_orthogonal,
    orthogonal_complement_ray,
)
from .reconstruct import Reconstruction, propagate_reconstruct
from .rigidity import (
    ConstraintSystem, GaugeFrame, RigidityReport, assemble_constraints, flex, gauge_fix,
    parameter_count, residual_gauge_tangents,
)

__version__ = "0.1.0"
