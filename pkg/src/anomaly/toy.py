"""A lattice model of one-dimensional bordisms with spinor data.

Objects are finite lists of points, each carrying the spinor space
``Σ = C^{r|r}`` with grading operator ``J = diag(i, -i)`` and Clifford
generator ``γ1 = [[0, -I], [I, 0]]``.  The space attached to a point is the
underlying real space of ``Σ`` made complex by ``J``; in the coordinates
``z = (x+, conj(x-))`` the metric ``Re<φ,ψ> + i Re<Jφ,ψ>`` is the standard
Hermitian product and the real structure ``φ -> iγ1 φ`` has matrix
``[[0, -iI], [-iI, 0]]``.

A bordism is a set of edges between boundary points and a set of circles.
Each edge carries a transfer ``u ∈ U(r)`` acting as ``diag(u, u)`` on ``Σ``
(``diag(u, conj u)`` in ``z`` coordinates) and a number of lattice sites.
Sections that are parallel along edges are the harmonic spinors; on a
circle they are the fixed vectors of the holonomy, with the lattice ``L²``
norm ``N |x|²``.

Points carry an orientation sign.  An edge may run from an incoming point of
sign ``+`` or an outgoing point of sign ``-``, and may end at an outgoing
point of sign ``+`` or an incoming point of sign ``-``; with these rules
every edge contributes a Lagrangian graph to ``W_{Y0} + (-W_{Y1})``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .fock import BimoduleStructure
from .gluing import coherence_check, glue_iso
from .lagrangian import Lagrangian, compose
from .linalg import (
    DEFAULT_TOL,
    Subspace,
    ToleranceConfig,
    complement,
    intersect,
    kernel,
    orthonormalize,
    projection_residual,
    subspace_sum,
)
from .rspace import RSpace, direct_sum

__all__ = [
    "InvalidTransfer",
    "CutMismatch",
    "PointObject",
    "Edge",
    "Circle",
    "ToyBordism",
    "TwistValue",
    "spinor_conj_matrix",
    "grading_operator",
    "clifford_normal",
    "j_coordinates",
    "point_space",
    "object_space",
    "boundary_lagrangian",
    "circle_sections",
    "harmonic_space",
    "glue_bordisms",
    "reverse_bordism",
    "twist",
    "tau",
    "toy_coherence",
    "cobordism_transversality_check",
    "random_transfer",
    "circle_three_pieces",
    "two_circles",
    "circle_first_cut",
    "interval_chain",
    "interval_and_circle",
    "TOY_FAMILIES",
    "random_bordism_pair",
    "closed_double",
    "random_cap",
]


class InvalidTransfer(ValueError):
    pass


class CutMismatch(ValueError):
    pass


def spinor_conj_matrix(r: int) -> np.ndarray:
    z = np.zeros((r, r))
    e = np.eye(r)
    return np.block([[z, -1j * e], [-1j * e, z]])


def grading_operator(r: int) -> np.ndarray:
    """``J = diag(i I, -i I)`` on ``Σ = C^{r|r}``."""
    return np.diag(np.concatenate([1j * np.ones(r), -1j * np.ones(r)]))


def clifford_normal(r: int) -> np.ndarray:
    """``γ1 = [[0, -I], [I, 0]]``, odd with square ``-I``."""
    z = np.zeros((r, r))
    e = np.eye(r)
    return np.block([[z, -e], [e, z]]).astype(complex)


def j_coordinates(phi) -> np.ndarray:
    """``z = (x+, conj x-)`` for a spinor ``φ = (x+, x-)``."""
    phi = np.asarray(phi, dtype=complex)
    r = phi.shape[0] // 2
    return np.concatenate([phi[:r], phi[r:].conj()])


def transfer_matrix(u) -> np.ndarray:
    """``diag(u, u)`` on ``Σ`` written in ``z`` coordinates."""
    u = np.asarray(u, dtype=complex)
    r = u.shape[0]
    out = np.zeros((2 * r, 2 * r), dtype=complex)
    out[:r, :r] = u
    out[r:, r:] = u.conj()
    return out


@dataclass(frozen=True)
class PointObject:
    rank: int
    sign: int = 1

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("point rank must be positive")
        if self.sign not in (1, -1):
            raise ValueError("orientation sign must be +1 or -1")


def point_space(p: PointObject) -> RSpace:
    return RSpace(p.sign * spinor_conj_matrix(p.rank))


def object_space(points) -> RSpace:
    points = tuple(points)
    if not points:
        return RSpace(np.zeros((0, 0)))
    return direct_sum(*(point_space(p) for p in points))


def _offsets(points):
    off = [0]
    for p in points:
        off.append(off[-1] + 2 * p.rank)
    return off


@dataclass(frozen=True)
class Edge:
    """Edge between boundary points ``('in', i)`` or ``('out', j)``.

    ``crossings`` lists earlier cut points the edge passes through as
    ``(label, index, partial)``, where ``partial`` is the transfer from the
    start of the edge to that point.
    """

    start: tuple
    end: tuple
    transfer: np.ndarray
    sites: int = 1
    crossings: tuple = ()


@dataclass(frozen=True)
class Circle:
    """Closed component with holonomy based at its first crossing."""

    holonomy: np.ndarray
    sites: int = 1
    crossings: tuple = ()


_START_SIGN = {"in": 1, "out": -1}
_END_SIGN = {"out": 1, "in": -1}


@dataclass(frozen=True)
class ToyBordism:
    source: tuple
    target: tuple
    edges: tuple = ()
    circles: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "circles", tuple(self.circles))
        self.validate()

    def point(self, end) -> PointObject:
        side, idx = end
        if side == "in":
            return self.source[idx]
        if side == "out":
            return self.target[idx]
        raise ValueError(f"unknown boundary side {side!r}")

    def validate(self, tol: ToleranceConfig = DEFAULT_TOL):
        seen = set()
        for e in self.edges:
            if e.sites < 1:
                raise ValueError("edges need at least one site")
            ps, pe = self.point(e.start), self.point(e.end)
            if ps.rank != pe.rank or np.shape(e.transfer) != (ps.rank, ps.rank):
                raise InvalidTransfer("edge transfer does not match the ranks of its endpoints")
            _check_unitary(e.transfer, tol)
            if ps.sign != _START_SIGN[e.start[0]] or pe.sign != _END_SIGN[e.end[0]]:
                raise InvalidTransfer(f"orientation signs do not allow an edge {e.start} -> {e.end}")
            for end in (e.start, e.end):
                if end in seen:
                    raise ValueError(f"boundary point {end} is used twice")
                seen.add(end)
        expected = {("in", i) for i in range(len(self.source))} | {("out", j) for j in range(len(self.target))}
        if seen != expected:
            raise ValueError("every boundary point must be the end of exactly one edge")
        for c in self.circles:
            if c.sites < 1:
                raise ValueError("circles need at least one site")
            _check_unitary(c.holonomy, tol)

    @property
    def is_closed(self) -> bool:
        return not self.source and not self.target


def _check_unitary(u, tol):
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InvalidTransfer("transfer must be a square matrix")
    resid = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if resid > 1e3 * tol.residual_tol:
        raise InvalidTransfer(f"transfer is not unitary (residual {resid:.2e})")


def boundary_lagrangian(X: ToyBordism, tol: ToleranceConfig = DEFAULT_TOL) -> Lagrangian:
    """Boundary values of parallel sections on the edges of ``X``."""
    w0, w1 = object_space(X.source), object_space(X.target)
    off0, off1 = _offsets(X.source), _offsets(X.target)
    n0 = w0.dim
    n = n0 + w1.dim

    def block(end):
        side, idx = end
        return (off0[idx], off0[idx + 1]) if side == "in" else (n0 + off1[idx], n0 + off1[idx + 1])

    cols = []
    for e in X.edges:
        r = np.shape(e.transfer)[0]
        t = transfer_matrix(e.transfer)
        piece = np.zeros((n, 2 * r), dtype=complex)
        a, b = block(e.start)
        piece[a:b] = np.eye(2 * r)
        a, b = block(e.end)
        piece[a:b] = t
        cols.append(piece / np.sqrt(2.0))
    frame = np.hstack(cols) if cols else np.zeros((n, 0), dtype=complex)
    return Lagrangian.relation(w0, w1, Subspace(frame, n))


def circle_sections(circle: Circle, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Basepoint values of an ``L²``-orthonormal basis of parallel sections."""
    t = transfer_matrix(circle.holonomy)
    fixed = kernel(t - np.eye(t.shape[0]), tol, scale=1.0)
    return fixed.frame / np.sqrt(circle.sites)


def harmonic_space(X: ToyBordism, tol: ToleranceConfig = DEFAULT_TOL) -> list:
    """Per circle basepoint bases of the parallel sections."""
    return [circle_sections(c, tol) for c in X.circles]


def section_values(circle: Circle, basis: np.ndarray) -> dict:
    """Values of the sections at each crossing, keyed by ``(label, index)``."""
    out = {}
    for label, idx, partial in circle.crossings:
        out[(label, idx)] = transfer_matrix(partial) @ basis
    return out


def _z_side(X0: ToyBordism, X1: ToyBordism):
    if len(X0.target) != len(X1.source) or any(
        (p.rank, p.sign) != (q.rank, q.sign) for p, q in zip(X0.target, X1.source)
    ):
        raise CutMismatch("outgoing points of the first bordism do not match incoming points of the second")


def glue_bordisms(X0: ToyBordism, X1: ToyBordism, label: str = "Z") -> ToyBordism:
    """Glue ``X0 : Y0 -> Z`` and ``X1 : Z -> Y1`` along ``Z``.

    Edges are chained through the ``Z`` points, multiplying transfers (the
    later one on the left) and adding sites.  Chains that close up become
    circles based at the first ``Z`` point reached from their first edge.
    """
    _z_side(X0, X1)
    # ('a', k) is X0.edges[k], ('b', k) is X1.edges[k]
    edges = {("a", k): e for k, e in enumerate(X0.edges)}
    edges.update({("b", k): e for k, e in enumerate(X1.edges)})
    start_at = {}
    for key, e in edges.items():
        side = "out" if key[0] == "a" else "in"
        if e.start[0] == side:
            start_at[e.start[1]] = key

    def on_z(key, end):
        return end[0] == ("out" if key[0] == "a" else "in")

    def chain(first):
        """Follow edges from ``first`` until leaving ``Z`` or returning to ``first``."""
        keys = [first]
        u = np.asarray(edges[first].transfer, dtype=complex)
        sites = edges[first].sites
        crossings = list(edges[first].crossings)
        while on_z(keys[-1], edges[keys[-1]].end):
            j = edges[keys[-1]].end[1]
            nxt = start_at[j]
            if nxt == first:
                return keys, u, sites, crossings, True
            crossings.append((label, j, u))
            e = edges[nxt]
            crossings.extend((lab, idx, p @ u) for lab, idx, p in e.crossings)
            u = np.asarray(e.transfer, dtype=complex) @ u
            sites += e.sites
            keys.append(nxt)
        return keys, u, sites, crossings, False

    used = set()
    new_edges = []
    for key in sorted(edges):
        e = edges[key]
        if on_z(key, e.start):
            continue
        keys, u, sites, crossings, closed = chain(key)
        used.update(keys)
        new_edges.append(Edge(e.start, edges[keys[-1]].end, u, sites, tuple(crossings)))
    new_circles = list(X0.circles) + list(X1.circles)
    for key in sorted(edges):
        if key in used:
            continue
        keys, u, sites, crossings, closed = chain(key)
        if not closed:
            raise CutMismatch("open chain found among interior edges")
        used.update(keys)
        base = edges[key].start[1]
        # the chain is based at the start of its first edge, which is a Z point
        crossings = [(label, base, np.eye(u.shape[0], dtype=complex))] + crossings
        new_circles.append(Circle(u, sites, tuple(crossings)))
    return ToyBordism(X0.source, X1.target, tuple(new_edges), tuple(new_circles))


def reverse_bordism(X: ToyBordism) -> ToyBordism:
    """``X`` read backwards: edges reversed with inverse transfers."""
    flip = {"in": "out", "out": "in"}
    edges = []
    for e in X.edges:
        u = np.asarray(e.transfer, dtype=complex)
        edges.append(Edge((flip[e.end[0]], e.end[1]), (flip[e.start[0]], e.start[1]), u.conj().T, e.sites))
    circles = [Circle(np.asarray(c.holonomy).conj().T, c.sites) for c in X.circles]
    return ToyBordism(X.target, X.source, tuple(edges), tuple(circles))


@dataclass
class TwistValue:
    """``ΛL_X`` with the parallel sections of the closed part."""

    bimodule: BimoduleStructure
    harmonic_bases: list
    harmonic_dim: int


def twist(X: ToyBordism, tol: ToleranceConfig = DEFAULT_TOL) -> TwistValue:
    bases = harmonic_space(X, tol)
    return TwistValue(BimoduleStructure(boundary_lagrangian(X, tol)), bases, sum(b.shape[1] for b in bases))


def _restriction(circles, bases, label, points) -> np.ndarray:
    """``R_Z`` applied to the given section bases, as a matrix into ``W_Z``."""
    off = _offsets(points)
    cols = []
    for c, b in zip(circles, bases):
        block = np.zeros((off[-1], b.shape[1]), dtype=complex)
        for lab, idx, partial in c.crossings:
            if lab == label:
                block[off[idx] : off[idx + 1]] += transfer_matrix(partial) @ b
        cols.append(block)
    return np.hstack(cols) if cols else np.zeros((off[-1], 0), dtype=complex)


def _restriction_from_values(values, keys, label, points) -> np.ndarray:
    off = _offsets(points)
    cols = []
    for key in keys:
        vals = values[key]
        k = next(iter(vals.values())).shape[1]
        block = np.zeros((off[-1], k), dtype=complex)
        for (lab, idx), v in vals.items():
            if lab == label:
                block[off[idx] : off[idx + 1]] += v
        cols.append(block)
    return np.hstack(cols) if cols else np.zeros((off[-1], 0), dtype=complex)


def _det(m) -> complex:
    return complex(np.linalg.det(m)) if m.size else 1.0 + 0j


def _gram_det(r) -> float:
    return float(np.real(np.linalg.det(r.conj().T @ r))) if r.size else 1.0


@dataclass
class TauResult:
    """``τ = α ∘ (id ⊗ Λ^top R_Z / det(R_Z^* R_Z))`` as a dense matrix."""

    tau: np.ndarray
    alpha: np.ndarray
    factor: complex
    gram_det: float
    glued: ToyBordism
    new_circles: list
    kernel_residual: float
    functoriality_residual: float


def tau(X0: ToyBordism, X1: ToyBordism, label: str = "Z", tol: ToleranceConfig = DEFAULT_TOL) -> TauResult:
    """Gluing isomorphism of twist values along the cut between ``X0`` and ``X1``."""
    glued = glue_bordisms(X0, X1, label)
    n_old = len(X0.circles) + len(X1.circles)
    new = list(glued.circles[n_old:])
    bases = [circle_sections(c, tol) for c in new]
    rphi = _restriction(new, bases, label, X0.target)
    l0, l1 = boundary_lagrangian(X0, tol), boundary_lagrangian(X1, tol)
    comp = compose(l0, l1, tol)
    lx = boundary_lagrangian(glued, tol)
    func = projection_residual(lx.space, comp.composed.space)
    k = comp.K.frame
    if k.shape[1] != rphi.shape[1]:
        raise CutMismatch(f"anomaly space has dim {k.shape[1]}, new circles give {rphi.shape[1]}")
    kres = projection_residual(orthonormalize(rphi, tol, rows=k.shape[0], scale=1.0), comp.K) if k.shape[0] else 0.0
    g = glue_iso(l0, l1, tol, composed_frame=lx.frame, k_basis=k)
    gram = _gram_det(rphi)
    factor = _det(k.conj().T @ rphi) / gram
    return TauResult(factor * g.alpha, g.alpha, factor, gram, glued, new, kres, func)


@dataclass
class ToyCoherenceReport:
    path_difference: float
    negative_control: float
    dropped_det: float
    circle_classes: dict
    kernel_residual: float
    path_norm: float
    abstract: object = field(repr=False)


def toy_coherence(X01: ToyBordism, X12: ToyBordism, X23: ToyBordism, tol: ToleranceConfig = DEFAULT_TOL) -> ToyCoherenceReport:
    """Both composites of ``τ`` maps for ``X01 ∘ X12 ∘ X23`` in the common model.

    New circles of the triple gluing are classed by the cuts they cross:
    only the first (``C02``), only the second (``C13``), or both (``Cr``).
    Sections are fixed once, as values at the crossings, so both paths use
    literally the same basis of the closed part.
    """
    for X in (X01, X12, X23):
        if any(c.crossings for c in X.circles) or any(e.crossings for e in X.edges):
            raise CutMismatch("pieces must not carry earlier cut data")
    l01, l12, l23 = (boundary_lagrangian(X, tol) for X in (X01, X12, X23))
    rep = coherence_check(l01, l12, l23, tol, keep_paths=True)
    dev = rep.development
    X03 = glue_bordisms(glue_bordisms(X01, X12, "Y1"), X23, "Y2")
    classes = {"C02": [], "C13": [], "Cr": []}
    values = {}
    for i, c in enumerate(X03.circles):
        labels = {lab for lab, _, _ in c.crossings}
        if not labels:
            continue
        values[i] = section_values(c, circle_sections(c, tol))
        key = "Cr" if labels == {"Y1", "Y2"} else "C02" if labels == {"Y1"} else "C13"
        classes[key].append(i)
    y1, y2 = X01.target, X12.target

    def r1(keys):
        return _restriction_from_values(values, keys, "Y1", y1)

    def r2(keys):
        return _restriction_from_values(values, keys, "Y2", y2)

    c02, c13, cr = classes["C02"], classes["C13"], classes["Cr"]
    u013 = np.hstack([dev.U012, dev.A])
    g013 = _gram_det(r1(c02 + cr))
    path_a, path_b = rep.paths
    p1_scalar = _det(u013.conj().T @ r1(c02 + cr)) * _det(dev.W123.conj().T @ r2(c13)) / (g013 * _gram_det(r2(c13)))
    p2_scalar = _det(dev.U012.conj().T @ r1(c02)) * _det(dev.Z.conj().T @ r2(c13 + cr)) / (
        _gram_det(r1(c02)) * _gram_det(r2(c13 + cr))
    )
    path1 = p1_scalar * path_a
    path2 = p2_scalar * path_b
    diff = float(np.max(np.abs(path1 - path2)))
    neg = float(np.max(np.abs(g013 * path1 - path2)))
    kres = max(
        projection_residual(orthonormalize(r1(c02), tol, rows=r1(c02).shape[0], scale=1.0), dev.kspaces.K012),
        projection_residual(orthonormalize(r2(c13), tol, rows=r2(c13).shape[0], scale=1.0), dev.kspaces.K123),
        projection_residual(orthonormalize(r1(c02 + cr), tol, rows=r1(c02).shape[0], scale=1.0), dev.kspaces.K013),
        projection_residual(orthonormalize(r2(c13 + cr), tol, rows=r2(c13).shape[0], scale=1.0), dev.kspaces.K023),
    )
    return ToyCoherenceReport(
        path_difference=diff,
        negative_control=neg,
        dropped_det=g013,
        circle_classes={k: len(v) for k, v in classes.items()},
        kernel_residual=kres,
        path_norm=float(np.max(np.abs(path1))),
        abstract=rep,
    )


def cobordism_transversality_check(X0: ToyBordism, X1: ToyBordism, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Intersection and sum of ``L_X0`` and ``L_X1`` for a closed ``X0 ∪ X1``.

    ``K`` is computed from the parallel sections of the circles formed by
    the gluing, independently of the Lagrangians.
    """
    if X0.source or X1.target:
        raise CutMismatch("cobordism check needs X0 : {} -> Z and X1 : Z -> {}")
    _z_side(X0, X1)
    glued = glue_bordisms(X0, X1, "Z")
    new = list(glued.circles[len(X0.circles) + len(X1.circles) :])
    rphi = _restriction(new, [circle_sections(c, tol) for c in new], "Z", X0.target)
    wz = object_space(X0.target)
    n = wz.dim
    k = orthonormalize(rphi, tol, rows=n, scale=1.0)
    la = Subspace(boundary_lagrangian(X0, tol).frame, n)
    lb = Subspace(boundary_lagrangian(X1, tol).frame, n)
    inter = intersect(la, lb, tol)
    total = subspace_sum(la, lb, tol)
    kbar_perp = complement(Subspace(wz.conj(k.frame), n) if k.dim else Subspace.zero(n), tol)
    return {
        "dim_K": k.dim,
        "intersection_residual": projection_residual(inter, k) if n else 0.0,
        "sum_residual": projection_residual(total, kbar_perp) if n else 0.0,
        "dim_intersection": inter.dim,
        "dim_sum": total.dim,
        "ambient_dim": n,
    }


def random_transfer(r: int, rng, scale: float = 1.0) -> np.ndarray:
    """``exp(A)`` for a random skew-Hermitian ``A``."""
    a = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
    a = scale * (a - a.conj().T) / 2
    return scipy.linalg.expm(a)


def _holonomy_fix(prefix, r, rng, fixed_dim):
    """Closing transfer making the total holonomy fix ``fixed_dim`` directions."""
    if fixed_dim >= r:
        target = np.eye(r, dtype=complex)
    else:
        q = random_transfer(r, rng)
        phases = np.ones(r, dtype=complex)
        phases[fixed_dim:] = np.exp(1j * rng.uniform(0.5, 2 * np.pi - 0.5, size=r - fixed_dim))
        target = q @ np.diag(phases) @ q.conj().T
    return target @ prefix.conj().T


def _sites(rng, k, n_max):
    return [int(s) for s in rng.integers(1, max(2, n_max // k) + 1, size=k)]


def circle_three_pieces(r: int, rng, fixed_dim=None, n_max=16):
    """One circle crossing both cuts: cap in ``X01``, two strands in ``X12``, cup in ``X23``.

    ``Y1 = Y2 = {(-), (+)}``; the closing strand fixes ``fixed_dim``
    holonomy directions (all of them by default).
    """
    fixed_dim = r if fixed_dim is None else fixed_dim
    s = _sites(rng, 4, n_max)
    u1, u2, u3 = (random_transfer(r, rng) for _ in range(3))
    u4 = _holonomy_fix(u3 @ u2 @ u1, r, rng, fixed_dim)
    y = (PointObject(r, -1), PointObject(r, 1))
    x01 = ToyBordism((), y, [Edge(("out", 0), ("out", 1), u1, s[0])])
    x12 = ToyBordism(y, y, [Edge(("in", 1), ("out", 1), u2, s[1]), Edge(("out", 0), ("in", 0), u4, s[3])])
    x23 = ToyBordism(y, (), [Edge(("in", 1), ("in", 0), u3, s[2])])
    return x01, x12, x23


def two_circles(r: int, rng, fixed_dim=None, n_max=16):
    """A circle across the first cut and another across the second."""
    fixed_dim = r if fixed_dim is None else fixed_dim
    s = _sites(rng, 4, n_max)
    a1, b1 = random_transfer(r, rng), random_transfer(r, rng)
    a2 = _holonomy_fix(a1, r, rng, fixed_dim)
    b2 = _holonomy_fix(b1, r, rng, fixed_dim)
    y = (PointObject(r, -1), PointObject(r, 1))
    x01 = ToyBordism((), y, [Edge(("out", 0), ("out", 1), a1, s[0])])
    x12 = ToyBordism(y, y, [Edge(("in", 1), ("in", 0), a2, s[1]), Edge(("out", 0), ("out", 1), b1, s[2])])
    x23 = ToyBordism(y, (), [Edge(("in", 1), ("in", 0), b2, s[3])])
    return x01, x12, x23


def circle_first_cut(r: int, rng, fixed_dim=None, n_max=16):
    """A circle across the first cut only; the last piece is the empty bordism."""
    fixed_dim = r if fixed_dim is None else fixed_dim
    s = _sites(rng, 2, n_max)
    a1 = random_transfer(r, rng)
    a2 = _holonomy_fix(a1, r, rng, fixed_dim)
    y = (PointObject(r, -1), PointObject(r, 1))
    x01 = ToyBordism((), y, [Edge(("out", 0), ("out", 1), a1, s[0])])
    x12 = ToyBordism(y, (), [Edge(("in", 1), ("in", 0), a2, s[1])])
    return x01, x12, ToyBordism((), ())


def interval_chain(r: int, rng, n_max=16):
    """A single interval through both cuts."""
    s = _sites(rng, 3, n_max)
    p = (PointObject(r, 1),)
    xs = [ToyBordism(p, p, [Edge(("in", 0), ("out", 0), random_transfer(r, rng), k)]) for k in s]
    return tuple(xs)


def interval_and_circle(rng, n_max=16):
    """A turning interval in the first piece next to a circle across both cuts (rank 1)."""
    c01, c12, c23 = circle_three_pieces(1, rng, n_max=n_max)
    y0 = (PointObject(1, 1), PointObject(1, -1))
    turn = Edge(("in", 0), ("in", 1), random_transfer(1, rng), int(rng.integers(1, n_max + 1)))
    x01 = ToyBordism(y0, c01.target, list(c01.edges) + [turn])
    return x01, c12, c23


TOY_FAMILIES = {
    "circle_three_pieces": circle_three_pieces,
    "two_circles": two_circles,
    "circle_first_cut": circle_first_cut,
    "interval_chain": interval_chain,
}


def _match(starts, ends, rng, n_max):
    perm = rng.permutation(len(ends))
    return [Edge(s, ends[k], None, int(rng.integers(1, n_max + 1))) for s, k in zip(starts, perm)]


def random_bordism_pair(r: int, rng, max_points=3, n_max=16, max_total=10):
    """Random ``X0 : Y0 -> Z`` and ``X1 : Z -> Y1`` with rank ``r`` points.

    Points are matched at random subject to the orientation rules, so
    gluing produces a random mix of intervals and circles.  ``max_total``
    caps ``r (|Y0| + 2|Z| + |Y1|)``, the log2 size of the Fock tensor.
    """
    for _ in range(1000):
        x0, x1 = _random_pair_once(r, rng, max_points, n_max)
        if r * (len(x0.source) + 2 * len(x0.target) + len(x1.target)) <= max_total:
            return x0, x1
    raise ValueError(f"no bordism pair within max_total={max_total}")


def _random_pair_once(r, rng, max_points, n_max):
    def fill(edges):
        return [Edge(e.start, e.end, random_transfer(r, rng), e.sites) for e in edges]

    while True:
        n_in_plus, n_in_minus = (int(x) for x in rng.integers(0, max_points + 1, size=2))
        n_z_minus = int(rng.integers(0, max_points + 1))
        # starts: in+ and Z-; ends: Z+ and in-
        n_z_plus = n_in_plus + n_z_minus - n_in_minus
        if 0 <= n_z_plus <= max_points + 1 and n_z_plus + n_z_minus > 0:
            break
    y0 = [PointObject(r, 1)] * n_in_plus + [PointObject(r, -1)] * n_in_minus
    z = [PointObject(r, 1)] * n_z_plus + [PointObject(r, -1)] * n_z_minus
    starts = [("in", i) for i in range(n_in_plus)] + [("out", n_z_plus + j) for j in range(n_z_minus)]
    ends = [("out", j) for j in range(n_z_plus)] + [("in", n_in_plus + i) for i in range(n_in_minus)]
    x0 = ToyBordism(y0, z, fill(_match(starts, ends, rng, n_max)))

    # X1 starts at Z+ and its own out- points, ends at Z- and out+ points
    while True:
        n_out_minus = int(rng.integers(0, max_points + 1))
        n_out_plus = n_z_plus + n_out_minus - n_z_minus
        if 0 <= n_out_plus <= max_points + 1:
            break
    y1 = [PointObject(r, 1)] * n_out_plus + [PointObject(r, -1)] * n_out_minus
    starts = [("in", i) for i in range(n_z_plus)] + [("out", n_out_plus + j) for j in range(n_out_minus)]
    ends = [("in", n_z_plus + i) for i in range(n_z_minus)] + [("out", j) for j in range(n_out_plus)]
    x1 = ToyBordism(z, y1, fill(_match(starts, ends, rng, n_max)))
    return x0, x1


def closed_double(X: ToyBordism):
    """``(X, reverse(X))`` for ``X : {} -> Z``; their union is a closed bordism."""
    if X.source:
        raise CutMismatch("doubles are built from bordisms with empty source")
    return X, reverse_bordism(X)


def random_cap(r: int, n_pairs: int, rng, signs=None, n_max: int = 16) -> ToyBordism:
    """``{} -> Y`` made of ``n_pairs`` U-shaped intervals, each from a ``-`` to a ``+`` point.

    ``signs`` fixes the point sequence of ``Y``; by default it is shuffled.
    """
    if signs is None:
        signs = list(rng.permutation([-1] * n_pairs + [1] * n_pairs))
    minus = [k for k, s in enumerate(signs) if s < 0]
    plus = list(rng.permutation([k for k, s in enumerate(signs) if s > 0]))
    if len(minus) != len(plus):
        raise ValueError("a cap needs as many - points as + points")
    edges = [
        Edge(("out", int(a)), ("out", int(b)), random_transfer(r, rng), int(rng.integers(1, n_max + 1)))
        for a, b in zip(minus, plus)
    ]
    return ToyBordism((), [PointObject(r, int(s)) for s in signs], edges)
