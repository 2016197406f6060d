"""Machine-readable verification reports.

Every check carries its own tolerance and passes iff ``max_residual`` is at
most that tolerance.  Lower-bound conditions (``value ≥ threshold``) are
stored as the ratio ``threshold / value`` against tolerance 1.
"""
from __future__ import annotations

import json
import math
import time
from contextlib import contextmanager

import numpy as np

__all__ = ["Report", "to_pairs", "from_pairs", "jsonable", "lower_bound_residual"]


def to_pairs(a) -> list:
    """Complex array to nested lists of ``[re, im]`` pairs (row-major)."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [to_pairs(x) for x in a]


def from_pairs(data, depth: int) -> np.ndarray:
    """Inverse of :func:`to_pairs` for an array with ``depth`` axes; plain numbers count as real."""

    def scalar(x):
        if isinstance(x, bool):
            raise TypeError("boolean is not a number")
        if isinstance(x, (int, float)):
            return complex(x)
        if isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in x):
            return complex(x[0], x[1])
        raise TypeError(f"expected a number or an [re, im] pair, got {x!r}")

    def walk(x, d):
        if d == 0:
            return scalar(x)
        if not isinstance(x, list):
            raise TypeError(f"expected a list, got {type(x).__name__}")
        return [walk(t, d - 1) for t in x]

    out = np.array(walk(data, depth), dtype=complex)
    if out.ndim != depth:
        if out.size == 0:
            return out.reshape((0,) * depth)
        raise TypeError("ragged array")
    return out


def jsonable(x):
    """Recursively convert numpy data; non-finite floats become ``None``."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (complex, np.complexfloating)):
        return [jsonable(x.real), jsonable(x.imag)]
    if isinstance(x, np.ndarray):
        return jsonable(to_pairs(x)) if np.iscomplexobj(x) else jsonable(x.tolist())
    return x


def lower_bound_residual(value: float, threshold: float) -> float:
    """``threshold / value``, which is ``≤ 1`` iff ``value ≥ threshold``."""
    if value <= 0 or not math.isfinite(value):
        return math.inf
    return threshold / value


class Report:
    """Ordered list of check entries plus global settings."""

    def __init__(self, seed=None, tolerances=None, **settings):
        self.seed = seed
        self.tolerances = dict(tolerances or {})
        self.settings = settings
        self.entries: list[dict] = []
        self.counts: dict = {}

    def add(self, name: str, max_residual: float, tolerance: float, metadata=None, wall_time: float = 0.0) -> dict:
        r = float(max_residual)
        status = "pass" if (math.isfinite(r) or r == -math.inf) and r <= tolerance else "fail"
        entry = {
            "name": name,
            "status": status,
            "max_residual": r,
            "tolerance": float(tolerance),
            "metadata": metadata or {},
            "wall_time": float(wall_time),
        }
        self.entries.append(entry)
        return entry

    def fail(self, name: str, message: str, metadata=None) -> dict:
        """Record a check that could not be evaluated."""
        meta = dict(metadata or {})
        meta["error"] = message
        return self.add(name, math.inf, 0.0, meta)

    @contextmanager
    def timed(self):
        box = {}
        start = time.perf_counter()
        try:
            yield box
        finally:
            box["wall_time"] = time.perf_counter() - start

    @property
    def ok(self) -> bool:
        return all(e["status"] == "pass" for e in self.entries)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_dict(self) -> dict:
        g = {"seed": self.seed, "tolerances": self.tolerances, "counts": self.counts}
        g.update(self.settings)
        return {"global": g, "checks": self.entries, "status": "pass" if self.ok else "fail"}

    def to_json(self) -> str:
        return json.dumps(jsonable(self.to_dict()), sort_keys=True, indent=2) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    def summary_lines(self) -> list[str]:
        out = []
        for e in self.entries:
            out.append(f"{e['status'].upper():4s}  {e['name']:<34s} max_residual={e['max_residual']:.3e}  tol={e['tolerance']:.1e}")
        return out
