"""Command-line front end.

Usage:
    ksrigidity verify  <set> [--format json]
    ksrigidity table1  [catalog_dir] [--format json]
    ksrigidity color   <set> [--critical]
    ksrigidity rigidity <set> [--reconstruct] [--basis-index K]
    ksrigidity flex    <set> --direction D --steps N --step-size H --out-dir DIR
    ksrigidity dot     <set>

``<set>`` is a path to a catalog file or the name of a bundled set
(``cabello18``, ``peres33`` ...).  Exit codes: 0 success / everything
matches, 1 an analysis disagrees with the header (or flex on a rigid set),
2 bad input or unreadable files.

Output is deterministic for fixed inputs and --seed; wall-clock timings are
only included with --timing.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from .catalog import CATALOG_DIR, CATALOG_NAMES, KSSetRecord, catalog_path, load_set, save_set, validate_metadata
from .coloring import check_critical, find_ks_coloring
from .errors import CatalogIOError, ContinuationStallError, InputError, KSError
from .graph import build_graph, enumerate_bases, to_dot
from .rays import Tolerance
from .reconstruct import propagate_reconstruct
from .rigidity import flex, max_edge_residue, parameter_count

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2
COLUMNS = ("vectors", "orthogonalities", "bases", "parameters", "colourable", "critical")


class _Clock:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.times: dict[str, float] = {}

    def run(self, label, fn, *a, **kw):
        t0 = time.perf_counter()
        out = fn(*a, **kw)
        self.times[label] = round(time.perf_counter() - t0, 4)
        return out


def _tolerance(args) -> Tolerance:
    return Tolerance(args.tolerance_ortho, args.rank_tol, args.gap_min)


def _resolve(ref: str) -> Path:
    p = Path(ref)
    if p.exists() or p.suffix == ".ks" or "/" in ref:
        return p
    bundled = catalog_path(ref)
    return bundled if bundled.exists() else p


def _load(ref: str, tol: Tolerance) -> KSSetRecord:
    return load_set(_resolve(ref), tol)


def _finite(x: float):
    return None if math.isinf(x) else float(x)


def build_report(record: KSSetRecord, tol: Tolerance, basis_index: int = 0, timing: bool = False) -> dict:
    """Everything ``verify`` knows about one set, as a plain dict."""
    clock = _Clock(timing)
    meta = clock.run("metadata", validate_metadata, record, tol)
    graph = build_graph(record, tol)
    bases = enumerate_bases(graph)
    colouring, stats = clock.run("colouring", find_ks_coloring, graph, bases)
    colourable = colouring is not None
    critical = None
    if not colourable:
        critical = clock.run("criticality", check_critical, graph, bases).critical
    rig = clock.run("rigidity", parameter_count, record, tol, basis_index)

    e = record.expected
    computed = {
        "vectors": meta.check("vectors").actual,
        "orthogonalities": meta.check("orthogonalities").actual,
        "bases": meta.check("bases").actual,
        "parameters": rig.parameter_count if rig.conclusive else None,
        "colourable": colourable,
        "critical": critical,
    }
    expected = {
        "vectors": e.vectors,
        "orthogonalities": e.orthogonalities,
        "bases": e.bases,
        "parameters": e.parameters,
        "colourable": False,
        "critical": e.critical,
    }
    doc = {
        "name": record.name,
        "dim": record.dim,
        "computed": computed,
        "expected": expected,
        "pass": {k: computed[k] == expected[k] for k in COLUMNS},
        "rigidity": {
            "status": rig.status,
            "pinned_basis": list(rig.pinned_basis),
            "n_coords": rig.n_coords,
            "n_residues": rig.n_residues,
            "null_dim": rig.null_dim,
            "residual_gauge_dim": rig.residual_gauge_dim,
            "gap_ratio": _finite(rig.gap_ratio),
            "real_parameter_count": rig.real_parameter_count,
        },
        "basis_pair_incidences": meta.basis_pair_incidences,
        "search_nodes": stats.nodes_explored,
        "tolerances": {"ortho_tol": tol.ortho_tol, "rank_tol": tol.rank_tol, "gap_min": tol.gap_min},
    }
    doc["all_pass"] = all(doc["pass"].values())
    if timing:
        doc["timing"] = clock.times
    return doc


def _yn(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def _format_verify(doc: dict) -> str:
    lines = [f"{doc['name']} (dim {doc['dim']})"]
    for k in COLUMNS:
        mark = "pass" if doc["pass"][k] else "FAIL"
        lines.append(f"  {k:<16} {_yn(doc['computed'][k]):>6}   expected {_yn(doc['expected'][k]):>6}   {mark}")
    r = doc["rigidity"]
    gap = "inf" if r["gap_ratio"] is None else f"{r['gap_ratio']:.3g}"
    lines.append(f"  rigidity: {r['status'].lower()}, null_dim {r['null_dim']}, "
                 f"gauge {r['residual_gauge_dim']}, gap {gap}")
    if r["real_parameter_count"] is not None:
        lines.append(f"  real-restricted parameters: {r['real_parameter_count']}")
    lines.append(f"  pairs counted per basis: {doc['basis_pair_incidences']}")
    if "timing" in doc:
        lines.append("  timing: " + ", ".join(f"{k} {v:.3f}s" for k, v in doc["timing"].items()))
    lines.append("ALL PASS" if doc["all_pass"] else "MISMATCH")
    return "\n".join(lines)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


# ---------------------------------------------------------------- subcommands

def cmd_verify(args) -> int:
    tol = _tolerance(args)
    record = _load(args.set, tol)
    doc = build_report(record, tol, args.basis_index, args.timing)
    print(_dump_json(doc) if args.format == "json" else _format_verify(doc))
    return EXIT_OK if doc["all_pass"] else EXIT_MISMATCH


def _table_files(directory: Path) -> tuple[list[Path], list[str]]:
    files, missing = [], []
    for name in CATALOG_NAMES:
        p = directory / f"{name}.ks"
        (files.append(p) if p.exists() else missing.append(name))
    known = {f"{n}.ks" for n in CATALOG_NAMES}
    files += sorted(p for p in directory.glob("*.ks") if p.name not in known)
    return files, missing


def cmd_table1(args) -> int:
    tol = _tolerance(args)
    directory = Path(args.catalog_dir) if args.catalog_dir else CATALOG_DIR
    if not directory.is_dir():
        raise CatalogIOError(f"no such directory: {directory}")
    files, missing = _table_files(directory)
    for name in missing:
        print(f"warning: {name}.ks missing from {directory}", file=sys.stderr)

    rows, errors = [], []
    for path in files:
        try:
            record = load_set(path, tol)
        except KSError as exc:
            errors.append(f"{path.name}: {exc}")
            print(f"error: {path.name}: {exc}", file=sys.stderr)
            continue
        rows.append(build_report(record, tol, args.basis_index, args.timing))

    all_pass = bool(rows) and not errors and all(r["all_pass"] for r in rows)
    if args.format == "json":
        print(_dump_json({"sets": rows, "missing": missing, "errors": errors, "all_pass": all_pass}))
    else:
        print(_format_table(rows))
    if not rows:
        return EXIT_INPUT
    return EXIT_OK if all_pass and not missing else EXIT_MISMATCH


def _format_table(rows: list[dict]) -> str:
    head = ["name", "n", "Vectors", "⊥", "Bases", "Parameters", "Critical"]
    keys = ["vectors", "orthogonalities", "bases", "parameters", "critical"]
    body = []
    for r in rows:
        cells = [r["name"], str(r["dim"])]
        for k in keys:
            c, e = r["computed"][k], r["expected"][k]
            cells.append(_yn(c) if r["pass"][k] else f"{_yn(c)}≠{_yn(e)}")
        body.append(cells)
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    fmt = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()  # noqa: E731
    out = [fmt(head), fmt(["-" * w for w in widths])]
    out += [fmt(c) for c in body]
    n_ok = sum(r["all_pass"] for r in rows)
    out.append(f"{n_ok}/{len(rows)} rows match (a≠b: computed a, expected b)")
    return "\n".join(out)


def cmd_color(args) -> int:
    tol = _tolerance(args)
    record = _load(args.set, tol)
    graph = build_graph(record, tol)
    bases = enumerate_bases(graph)
    colouring, stats = find_ks_coloring(graph, bases)
    doc = {"name": record.name, "result": stats.result.value, "nodes_explored": stats.nodes_explored,
           "propagations": stats.propagations,
           "colouring": None if colouring is None else list(colouring.values)}
    if args.critical and colouring is None:
        crit = check_critical(graph, bases)
        doc["critical"] = crit.critical
        doc["surviving_deletions"] = crit.surviving_deletions
    if args.format == "json":
        print(_dump_json(doc))
    else:
        print(f"{record.name}: {doc['result']} ({stats.nodes_explored} nodes, {stats.propagations} propagations)")
        if colouring is not None:
            print("ones at: " + " ".join(str(v) for v, x in enumerate(colouring.values) if x))
        if "critical" in doc:
            print(f"critical: {_yn(doc['critical'])}")
            if doc["surviving_deletions"]:
                print("uncolourable after deleting: " + " ".join(map(str, doc["surviving_deletions"])))
    return EXIT_OK


def cmd_rigidity(args) -> int:
    tol = _tolerance(args)
    record = _load(args.set, tol)
    rep = parameter_count(record, tol, args.basis_index)
    doc = {
        "name": rep.name, "dim": rep.dim, "status": rep.status, "pinned_basis": list(rep.pinned_basis),
        "n_coords": rep.n_coords, "n_residues": rep.n_residues, "null_dim": rep.null_dim,
        "residual_gauge_dim": rep.residual_gauge_dim, "parameter_count": rep.parameter_count,
        "gap_ratio": _finite(rep.gap_ratio), "real_parameter_count": rep.real_parameter_count,
        "singular_values_tail": [float(f"{s:.6e}") for s in rep.singular_values[-8:]],
    }
    if args.reconstruct:
        graph = build_graph(record, tol)
        rec = propagate_reconstruct(graph, enumerate_bases(graph), args.seed, tol)
        doc["reconstruction"] = {"parameters": rec.parameters_introduced, "consistent": rec.consistency}
    if args.format == "json":
        print(_dump_json(doc))
    else:
        gap = "inf" if doc["gap_ratio"] is None else f"{doc['gap_ratio']:.3g}"
        print(f"{rep.name}: {rep.parameter_count} parameter(s) [{rep.status.lower()}]")
        print(f"  pinned basis {rep.pinned_basis}; {rep.n_coords} coordinates, {rep.n_residues} residues")
        print(f"  null_dim {rep.null_dim} - gauge {rep.residual_gauge_dim}; gap {gap}")
        if rep.real_parameter_count is not None:
            print(f"  real-restricted: {rep.real_parameter_count}")
        if "reconstruction" in doc:
            r = doc["reconstruction"]
            print(f"  reconstruction (seed {args.seed}): {_yn(r['parameters'])} parameter(s), "
                  f"consistent {_yn(r['consistent'])}")
    return EXIT_OK


def cmd_flex(args) -> int:
    tol = _tolerance(args)
    record = _load(args.set, tol)
    if args.steps == 0:
        return EXIT_OK
    try:
        sets = flex(record, args.direction, args.steps, args.step_size, tol, args.basis_index)
    except (InputError, ContinuationStallError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    graph = build_graph(record, tol)
    for k, s in enumerate(sets, start=1):
        path = out / f"{s.name}.ks"
        save_set(s, path)
        print(f"step {k:3d}  max residue {max_edge_residue(s, graph):.3e}  -> {path}")
    return EXIT_OK


def cmd_dot(args) -> int:
    tol = _tolerance(args)
    record = _load(args.set, tol)
    sys.stdout.write(to_dot(build_graph(record, tol), name=record.name))
    return EXIT_OK


# ----------------------------------------------------------------------- main

def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    d = Tolerance()
    common.add_argument("--tolerance-ortho", type=float, default=d.ortho_tol,
                        help="|<u,v>| at or below this counts as orthogonal (default %(default)g)")
    common.add_argument("--rank-tol", type=float, default=d.rank_tol,
                        help="relative singular-value threshold (default %(default)g)")
    common.add_argument("--gap-min", type=float, default=d.gap_min,
                        help="minimum singular-value gap for a conclusive count (default %(default)g)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised reconstruction")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--basis-index", type=int, default=0, help="which enumerated basis to pin")
    common.add_argument("--timing", action="store_true", help="include wall-clock timings")

    p = argparse.ArgumentParser(prog="ksrigidity", description="Kochen-Specker set verification and rigidity.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify", parents=[common], help="check a set against its header")
    s.add_argument("set")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("table1", parents=[common], help="verify every set in a catalog directory")
    s.add_argument("catalog_dir", nargs="?", default=None, help="defaults to the bundled catalog")
    s.set_defaults(func=cmd_table1)

    s = sub.add_parser("color", parents=[common], help="search for a KS colouring")
    s.add_argument("set")
    s.add_argument("--critical", action="store_true", help="also test every single-vertex deletion")
    s.set_defaults(func=cmd_color)

    s = sub.add_parser("rigidity", parents=[common], help="count free parameters")
    s.add_argument("set")
    s.add_argument("--reconstruct", action="store_true", help="cross-check by sequential reconstruction")
    s.set_defaults(func=cmd_rigidity)

    s = sub.add_parser("flex", parents=[common], help="deform a non-rigid set along a parameter direction")
    s.add_argument("set")
    s.add_argument("--direction", type=int, default=0)
    s.add_argument("--steps", type=int, default=10)
    s.add_argument("--step-size", type=float, default=0.02)
    s.add_argument("--out-dir", default="flex-out")
    s.set_defaults(func=cmd_flex)

    s = sub.add_parser("dot", parents=[common], help="orthogonality graph in DOT format")
    s.add_argument("set")
    s.set_defaults(func=cmd_dot)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        _tolerance(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (KSError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
