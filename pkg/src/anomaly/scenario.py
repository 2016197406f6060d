"""Scenario files: declared spaces, chained Lagrangians or toy bordisms, requested checks.

Format (JSON, complex numbers as ``[re, im]`` pairs, matrices row-major)::

    {
      "version": "anomaly-scenario/1",
      "spaces": {"W0": {"dim": 2, "conj_matrix": [[[1, 0], [0, 0]], ...]}, ...},
      "lagrangians": [
        {"name": "L01", "source": "W0", "target": "W1", "frame": [...]},
        {"name": "L12", "source": "W1", "target": "W2", "graph": [...]}
      ],
      "checks": ["lagrangian", "compose", "glue", "coherence"],
      "tolerances": {"rank_tol": 1e-9, "residual_tol": 1e-9},
      "seed": 0
    }

``frame`` columns span the relation inside ``source + (-target)``;
``graph`` is the matrix of a map ``source -> target``.  Instead of
``lagrangians`` a scenario may list ``bordisms`` (see :func:`parse_bordism`).
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .lagrangian import Lagrangian, compose, graph_lagrangian, is_lagrangian
from .linalg import DEFAULT_TOL, ToleranceConfig, projection_residual
from .report import Report, from_pairs, jsonable, to_pairs
from .rspace import RSpace
from .suites import COHERENCE_TOL, _Folder, evaluate_pair, evaluate_triple, fold_pair, fold_triple, negative_control_residual
from .toy import Circle, Edge, PointObject, ToyBordism, boundary_lagrangian, glue_bordisms, tau, toy_coherence

__all__ = [
    "VERSION",
    "ScenarioError",
    "Scenario",
    "load_scenario",
    "parse_scenario",
    "run_scenario",
    "space_to_json",
    "lagrangian_to_json",
    "bordism_to_json",
    "write_scenario",
]

VERSION = "anomaly-scenario/1"
LAGRANGIAN_CHECKS = ("lagrangian", "compose", "glue", "coherence")
BORDISM_CHECKS = ("lagrangian", "functoriality", "tau", "coherence")
# log2 of the largest Fock tensor a scenario may request
MAX_FOCK_BITS = 12


class ScenarioError(ValueError):
    """Malformed scenario; ``where`` names the offending field."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass
class Scenario:
    spaces: dict
    lagrangians: list = field(default_factory=list)
    bordisms: list = field(default_factory=list)
    checks: tuple = ()
    tol: ToleranceConfig = DEFAULT_TOL
    seed: int | None = None


def _get(obj, key, where, kind=None):
    if not isinstance(obj, dict):
        raise ScenarioError(where, "expected an object")
    if key not in obj:
        raise ScenarioError(f"{where}.{key}", "missing field")
    val = obj[key]
    if kind is not None and (not isinstance(val, kind) or isinstance(val, bool)):
        raise ScenarioError(f"{where}.{key}", f"expected {getattr(kind, '__name__', kind)}, got {type(val).__name__}")
    return val


def _matrix(data, where, shape=None):
    try:
        m = from_pairs(data, 2)
    except TypeError as exc:
        raise ScenarioError(where, str(exc)) from None
    if shape is not None:
        rows, cols = shape
        if m.size == 0 and rows * (cols if cols is not None else 0) == 0:
            return np.zeros((rows, cols or 0), dtype=complex)
        if m.shape[0] != rows or (cols is not None and m.shape[1] != cols):
            raise ScenarioError(where, f"expected shape ({rows}, {cols if cols is not None else 'k'}), got {m.shape}")
    return m


def _parse_space(name, spec, where) -> RSpace:
    dim = _get(spec, "dim", where, int)
    if dim < 0:
        raise ScenarioError(f"{where}.dim", "must be nonnegative")
    if dim == 0:
        return RSpace(np.zeros((0, 0)))
    c = _matrix(_get(spec, "conj_matrix", where, list), f"{where}.conj_matrix", (dim, dim))
    try:
        return RSpace(c)
    except ValueError as exc:
        raise ScenarioError(f"{where}.conj_matrix", str(exc)) from None


def _parse_lagrangian(spec, spaces, where):
    name = _get(spec, "name", where, str)
    src, tgt = _get(spec, "source", where, str), _get(spec, "target", where, str)
    for key, ref in (("source", src), ("target", tgt)):
        if ref not in spaces:
            raise ScenarioError(f"{where}.{key}", f"unknown space {ref!r}")
    w0, w1 = spaces[src], spaces[tgt]
    if "frame" in spec:
        frame = _matrix(spec["frame"], f"{where}.frame", (w0.dim + w1.dim, None))
        return name, src, tgt, ("frame", frame)
    if "graph" in spec:
        q = _matrix(spec["graph"], f"{where}.graph", (w1.dim, w0.dim))
        return name, src, tgt, ("graph", q)
    raise ScenarioError(where, "needs a 'frame' or a 'graph'")


def _parse_points(data, where):
    if not isinstance(data, list):
        raise ScenarioError(where, "expected a list of [rank, sign] pairs")
    out = []
    for i, p in enumerate(data):
        if not (isinstance(p, list) and len(p) == 2 and all(isinstance(t, int) and not isinstance(t, bool) for t in p)):
            raise ScenarioError(f"{where}[{i}]", "expected [rank, sign]")
        try:
            out.append(PointObject(p[0], p[1]))
        except ValueError as exc:
            raise ScenarioError(f"{where}[{i}]", str(exc)) from None
    return out


def _parse_end(data, where):
    if not (isinstance(data, list) and len(data) == 2 and data[0] in ("in", "out") and isinstance(data[1], int)):
        raise ScenarioError(where, 'expected ["in" | "out", index]')
    return (data[0], int(data[1]))


def parse_bordism(spec, where) -> tuple[str, ToyBordism]:
    """``{name, source: [[rank, sign]...], target: [...], edges: [...], circles: [...]}``.

    Edges are ``{start: ["in", i], end: ["out", j], transfer: matrix, sites: n}``,
    circles ``{holonomy: matrix, sites: n}``.
    """
    name = _get(spec, "name", where, str)
    source = _parse_points(_get(spec, "source", where, list), f"{where}.source")
    target = _parse_points(_get(spec, "target", where, list), f"{where}.target")
    edges = []
    for i, e in enumerate(spec.get("edges", [])):
        w = f"{where}.edges[{i}]"
        edges.append(
            Edge(
                _parse_end(_get(e, "start", w), f"{w}.start"),
                _parse_end(_get(e, "end", w), f"{w}.end"),
                _matrix(_get(e, "transfer", w, list), f"{w}.transfer"),
                int(e.get("sites", 1)),
            )
        )
    circles = []
    for i, c in enumerate(spec.get("circles", [])):
        w = f"{where}.circles[{i}]"
        circles.append(Circle(_matrix(_get(c, "holonomy", w, list), f"{w}.holonomy"), int(c.get("sites", 1))))
    try:
        return name, ToyBordism(source, target, edges, circles)
    except ValueError as exc:
        raise ScenarioError(where, str(exc)) from None


def parse_scenario(data) -> Scenario:
    """Validate decoded JSON; raises :class:`ScenarioError` naming the bad field."""
    if not isinstance(data, dict):
        raise ScenarioError("$", "top level must be an object")
    version = _get(data, "version", "$", str)
    if version != VERSION:
        raise ScenarioError("$.version", f"unrecognized version {version!r}, expected {VERSION!r}")
    tol = DEFAULT_TOL
    if "tolerances" in data:
        t = data["tolerances"]
        if not isinstance(t, dict):
            raise ScenarioError("$.tolerances", "expected an object")
        try:
            tol = ToleranceConfig(
                rank_tol=float(t.get("rank_tol", DEFAULT_TOL.rank_tol)),
                residual_tol=float(t.get("residual_tol", DEFAULT_TOL.residual_tol)),
            )
        except (TypeError, ValueError) as exc:
            raise ScenarioError("$.tolerances", str(exc)) from None
    seed = data.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        raise ScenarioError("$.seed", "expected an integer")

    has_l, has_b = "lagrangians" in data, "bordisms" in data
    if has_l == has_b:
        raise ScenarioError("$", "give exactly one of 'lagrangians' or 'bordisms'")
    allowed = LAGRANGIAN_CHECKS if has_l else BORDISM_CHECKS
    checks = data.get("checks", list(allowed))
    if not isinstance(checks, list):
        raise ScenarioError("$.checks", "expected a list")
    for i, c in enumerate(checks):
        if c not in allowed:
            raise ScenarioError(f"$.checks[{i}]", f"unknown check {c!r}; allowed {list(allowed)}")

    if has_b:
        items = _get(data, "bordisms", "$", list)
        bords = [parse_bordism(b, f"$.bordisms[{i}]") for i, b in enumerate(items)]
        if not bords:
            raise ScenarioError("$.bordisms", "empty list")
        return Scenario({}, bordisms=bords, checks=tuple(checks), tol=tol, seed=seed)

    spaces_raw = _get(data, "spaces", "$", dict)
    spaces = {name: _parse_space(name, spec, f"$.spaces.{name}") for name, spec in spaces_raw.items()}
    items = _get(data, "lagrangians", "$", list)
    if not items:
        raise ScenarioError("$.lagrangians", "empty list")
    lags = [_parse_lagrangian(spec, spaces, f"$.lagrangians[{i}]") for i, spec in enumerate(items)]
    for i in range(len(lags) - 1):
        if lags[i][2] != lags[i + 1][1]:
            raise ScenarioError(
                f"$.lagrangians[{i + 1}].source",
                f"chain broken: {lags[i][0]} ends at {lags[i][2]!r} but {lags[i + 1][0]} starts at {lags[i + 1][1]!r}",
            )
    return Scenario(spaces, lagrangians=lags, checks=tuple(checks), tol=tol, seed=seed)


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file; JSON syntax errors carry line and column."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(str(path), f"cannot read file: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    return parse_scenario(data)


# ---------------------------------------------------------------- running

def _build_lagrangian(sc: Scenario, item, tol):
    name, src, tgt, (kind, data) = item
    w0, w1 = sc.spaces[src], sc.spaces[tgt]
    if kind == "graph":
        return graph_lagrangian(w0, w1, data, tol)
    # frames need not be orthonormal
    return Lagrangian.relation(w0, w1, data, orthonormal=False, tol=tol)


def _run_lagrangians(sc: Scenario, report: Report):
    tol = sc.tol
    lags = []
    ok_lags = True
    for item in sc.lagrangians:
        name = item[0]
        start = time.perf_counter()
        try:
            lag = _build_lagrangian(sc, item, tol)
        except Exception as exc:
            report.fail(f"lagrangian:{name}", f"{type(exc).__name__}: {exc}")
            ok_lags = False
            continue
        rep = is_lagrangian(lag.ambient, lag.space, tol)
        if "lagrangian" in sc.checks:
            report.add(f"lagrangian:{name}", rep.residual, tol.residual_tol,
                       {"dim": lag.dim, "ambient_dim": lag.ambient.dim}, time.perf_counter() - start)
        ok_lags = ok_lags and bool(rep)
        lags.append(lag)
    if not ok_lags:
        return len(sc.lagrangians)
    names = [it[0] for it in sc.lagrangians]

    for i in range(len(lags) - 1):
        pair = f"{names[i]}*{names[i + 1]}"
        f = _Folder(False)
        start = time.perf_counter()
        if lags[i].dim + lags[i + 1].dim > MAX_FOCK_BITS:
            report.fail(f"glue:{pair}", f"Fock tensor of 2^{lags[i].dim + lags[i + 1].dim} exceeds the size limit")
            continue
        try:
            meas = evaluate_pair(lags[i], lags[i + 1], tol)
        except Exception as exc:
            report.fail(f"glue:{pair}", f"{type(exc).__name__}: {exc}")
            continue
        wall = time.perf_counter() - start
        if "compose" in sc.checks:
            comp_meta = {"dim_K": meas["dim_K"]}
            report.add(f"compose:{pair}", meas["composed_residual"], tol.residual_tol, comp_meta, wall)
        if "glue" in sc.checks:
            fold_pair(f, 0, "scenario", meas, tol, wall)
            f.into(report)
            for e in report.entries[-len(f.checks):]:
                e["name"] = f"{e['name']}:{pair}"
                e["metadata"]["dim_K"] = meas["dim_K"]
    if len(lags) == 3 and "coherence" in sc.checks:
        trip = "*".join(names)
        if sum(l.dim for l in lags) > MAX_FOCK_BITS:
            report.fail(f"coherence:{trip}", "triple Fock tensor exceeds the size limit")
        else:
            start = time.perf_counter()
            try:
                meas = evaluate_triple(*lags, tol)
                f = _Folder(False)
                fold_triple(f, 0, "scenario", meas, tol, time.perf_counter() - start)
                f.into(report)
                for e in report.entries[-len(f.checks):]:
                    e["name"] = f"{e['name']}:{trip}"
            except Exception as exc:
                report.fail(f"coherence:{trip}", f"{type(exc).__name__}: {exc}")
    return len(sc.lagrangians)


def _run_bordisms(sc: Scenario, report: Report):
    tol = sc.tol
    names = [n for n, _ in sc.bordisms]
    bords = [b for _, b in sc.bordisms]
    for name, X in sc.bordisms:
        if "lagrangian" in sc.checks:
            try:
                lag = boundary_lagrangian(X, tol)
                report.add(f"lagrangian:{name}", lag.report(tol).residual, tol.residual_tol, {"dim": lag.dim})
            except Exception as exc:
                report.fail(f"lagrangian:{name}", f"{type(exc).__name__}: {exc}")
    for i in range(len(bords) - 1):
        pair = f"{names[i]}*{names[i + 1]}"
        try:
            glued = glue_bordisms(bords[i], bords[i + 1])
            comp = compose(boundary_lagrangian(bords[i], tol), boundary_lagrangian(bords[i + 1], tol), tol)
            if "functoriality" in sc.checks:
                res = projection_residual(boundary_lagrangian(glued, tol).space, comp.composed.space)
                report.add(f"functoriality:{pair}", res, tol.residual_tol, {"dim_K": comp.K.dim})
            if "tau" in sc.checks:
                tr = tau(bords[i], bords[i + 1], tol=tol)
                report.add(f"tau:{pair}", max(tr.kernel_residual, tr.functoriality_residual), tol.residual_tol,
                           {"gram_det": tr.gram_det, "new_circles": len(tr.new_circles)})
        except Exception as exc:
            report.fail(f"functoriality:{pair}", f"{type(exc).__name__}: {exc}")
    if len(bords) == 3 and "coherence" in sc.checks:
        trip = "*".join(names)
        try:
            rep = toy_coherence(*bords, tol=tol)
            report.add(f"coherence:{trip}", rep.path_difference, COHERENCE_TOL,
                       {"det_factor": rep.dropped_det, "circle_classes": rep.circle_classes})
            report.add(f"coherence_negative_control:{trip}", negative_control_residual(
                {"det_factor": rep.dropped_det, "negative_control": rep.negative_control}), 1.0,
                {"negative_control": rep.negative_control})
        except Exception as exc:
            report.fail(f"coherence:{trip}", f"{type(exc).__name__}: {exc}")
    return len(bords)


def run_scenario(sc: Scenario, source: str | None = None) -> Report:
    """Run every requested check; invariant violations become failing entries."""
    report = Report(
        seed=sc.seed,
        tolerances={"rank_tol": sc.tol.rank_tol, "residual_tol": sc.tol.residual_tol, "coherence_tol": COHERENCE_TOL},
        scenario=source,
    )
    n = _run_bordisms(sc, report) if sc.bordisms else _run_lagrangians(sc, report)
    report.counts = {"items": n, "checks": len(report.entries),
                     "failed": sum(e["status"] == "fail" for e in report.entries)}
    return report


# ---------------------------------------------------------- serialization

def space_to_json(w: RSpace) -> dict:
    return {"dim": w.dim, "conj_matrix": to_pairs(w.conj_matrix) if w.dim else []}


def lagrangian_to_json(name: str, source: str, target: str, lag: Lagrangian) -> dict:
    return {"name": name, "source": source, "target": target, "frame": to_pairs(lag.frame)}


def bordism_to_json(name: str, X: ToyBordism) -> dict:
    def end(e):
        return [e[0], int(e[1])]

    return {
        "name": name,
        "source": [[p.rank, p.sign] for p in X.source],
        "target": [[p.rank, p.sign] for p in X.target],
        "edges": [{"start": end(e.start), "end": end(e.end), "transfer": to_pairs(e.transfer), "sites": e.sites}
                  for e in X.edges],
        "circles": [{"holonomy": to_pairs(c.holonomy), "sites": c.sites} for c in X.circles],
    }


def write_scenario(path, spaces: dict | None = None, lagrangians=None, bordisms=None, checks=None, seed=None) -> None:
    """Write a scenario file; ``spaces`` maps names to :class:`RSpace`."""
    data = {"version": VERSION}
    if bordisms is not None:
        data["bordisms"] = bordisms
    else:
        data["spaces"] = {k: space_to_json(v) for k, v in (spaces or {}).items()}
        data["lagrangians"] = lagrangians or []
    if checks is not None:
        data["checks"] = list(checks)
    if seed is not None:
        data["seed"] = seed
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(jsonable(data), fh, sort_keys=True, indent=1)
        fh.write("\n")
