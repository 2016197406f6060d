"""Random spaces, Lagrangians and chains of relations for tests and suites."""
from __future__ import annotations

import numpy as np
from scipy.stats import ortho_group, unitary_group

from .lagrangian import Lagrangian, compose, graph_lagrangian
from .linalg import DEFAULT_TOL, Subspace, ToleranceConfig, complement, intersect, orthonormalize, subspace_sum
from .rspace import RSpace, direct_sum, opposite, real_points, restrict

__all__ = [
    "random_rspace",
    "random_lagrangian",
    "random_lagrangian_containing",
    "random_relation",
    "random_relation_containing",
    "random_real_unitary_graph",
    "random_isotropic",
    "random_chain",
    "forced_chain",
]


def _orthogonal(n: int, rng) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0))
    if n == 1:
        return np.array([[1.0 if rng.random() < 0.5 else -1.0]])
    return ortho_group.rvs(n, random_state=rng)


def _unitary(n: int, rng) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    if n == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(n, random_state=rng)


def random_rspace(n: int, rng) -> RSpace:
    """``C^n`` with real structure ``U U^T conj`` for a Haar unitary ``U``."""
    u = _unitary(n, rng)
    return RSpace(u @ u.T if n else np.zeros((0, 0)))


def random_lagrangian(space: RSpace, rng, tol: ToleranceConfig = DEFAULT_TOL) -> Lagrangian:
    """Random Lagrangian ``E O L_std`` with ``E`` a real orthonormal basis, ``O`` orthogonal."""
    n = space.dim
    if n % 2:
        from .rspace import NoLagrangianExists

        raise NoLagrangianExists(f"space of odd dimension {n} has no Lagrangian")
    e = real_points(space, tol)
    o = _orthogonal(n, rng)
    std = np.zeros((n, n // 2), dtype=complex)
    for i in range(n // 2):
        std[2 * i, i] = 1 / np.sqrt(2)
        std[2 * i + 1, i] = -1j / np.sqrt(2)
    return Lagrangian(space, Subspace(e @ o @ std if n else std, n))


def random_lagrangian_containing(space: RSpace, sub: Subspace, rng, tol: ToleranceConfig = DEFAULT_TOL,
                                 parts=None) -> Lagrangian:
    """Random Lagrangian containing the isotropic subspace ``sub``."""
    n = space.dim
    if sub.dim == 0:
        lag = random_lagrangian(space, rng, tol)
        return Lagrangian(space, lag.space, parts)
    iso = float(np.max(np.abs(space.conj(sub.frame).conj().T @ sub.frame)))
    if iso > 1e3 * tol.residual_tol:
        raise ValueError(f"subspace is not isotropic (residual {iso:.2e})")
    both = subspace_sum(sub, Subspace(space.conj(sub.frame), n), tol)
    rest = complement(both, tol)
    reduced = restrict(space, rest, tol)
    inner = random_lagrangian(reduced, rng, tol)
    frame = np.hstack([sub.frame, rest.frame @ inner.frame])
    return Lagrangian(space, orthonormalize(frame, tol, rows=n, scale=1.0), parts)


def random_relation(w0: RSpace, w1: RSpace, rng, tol: ToleranceConfig = DEFAULT_TOL) -> Lagrangian:
    amb = direct_sum(w0, opposite(w1))
    return Lagrangian(amb, random_lagrangian(amb, rng, tol).space, parts=(w0, w1))


def random_relation_containing(w0: RSpace, w1: RSpace, vectors, rng, tol: ToleranceConfig = DEFAULT_TOL) -> Lagrangian:
    """Random relation containing the span of ``vectors`` (stacked ``W0`` over ``W1``)."""
    amb = direct_sum(w0, opposite(w1))
    sub = orthonormalize(np.asarray(vectors, dtype=complex).reshape(amb.dim, -1), tol, rows=amb.dim, scale=1.0)
    return random_lagrangian_containing(amb, sub, rng, tol, parts=(w0, w1))


def random_real_unitary_graph(w: RSpace, rng) -> Lagrangian:
    """Graph of ``E g E^H`` for a real orthogonal ``g``, which commutes with the real structure."""
    e = real_points(w)
    g = _orthogonal(w.dim, rng)
    return graph_lagrangian(w, w, e @ g @ e.conj().T)


def random_isotropic(space: RSpace, dim: int, rng, inside: Subspace | None = None,
                     tol: ToleranceConfig = DEFAULT_TOL) -> Subspace:
    """Random isotropic subspace, taken inside a Lagrangian (of ``inside`` if given)."""
    if inside is None:
        inside = random_lagrangian(space, rng, tol).space
    if dim > inside.dim:
        raise ValueError(f"cannot pick {dim} directions inside a subspace of dim {inside.dim}")
    c = _unitary(inside.dim, rng)[:, :dim] if inside.dim else np.zeros((0, dim))
    return Subspace(inside.frame @ c, space.dim)


def random_chain(dims, rng, tol: ToleranceConfig = DEFAULT_TOL):
    """Spaces ``W_0 .. W_r`` of the given dims and random relations between neighbours."""
    spaces = [random_rspace(n, rng) for n in dims]
    rels = [random_relation(spaces[i], spaces[i + 1], rng, tol) for i in range(len(dims) - 1)]
    return spaces, rels


def _in_first(v, n_other):
    return np.vstack([v, np.zeros((n_other, v.shape[1]))])


def _in_second(v, n_other):
    return np.vstack([np.zeros((n_other, v.shape[1])), v])


def forced_chain(dims, rng, d1=1, d2=1, d3=1, v_dim=1, tol: ToleranceConfig = DEFAULT_TOL):
    """Triple chain ``W0 -> W1 -> W2 -> W3`` with prescribed anomaly spaces.

    ``L12`` contains ``(D1, 0)`` and ``(0, D2)``, ``L23`` contains
    ``(D2 + D3, 0)`` and ``L01`` contains ``(0, D1 + V)`` where ``V`` is chosen in
    ``{u : (u, 0) in L13}`` orthogonal to ``D1``.  Then ``D1 ⊂ K012``,
    ``D1 + V ⊂ K013`` and ``D2 ⊂ K123``.  The extra ``D3`` makes ``V`` leave
    ``K012``, so the development map is generically nontrivial.
    Returns ``(spaces, (L01, L12, L23))``.
    """
    n0, n1, n2, n3 = dims
    w0, w1, w2, w3 = (random_rspace(n, rng) for n in dims)
    dd1 = random_isotropic(w1, d1, rng, tol=tol)
    d23 = random_isotropic(w2, d2 + d3, rng, tol=tol)
    dd2 = Subspace(d23.frame[:, :d2], n2)
    l12 = random_relation_containing(
        w1, w2, np.hstack([_in_first(dd1.frame, n2), _in_second(dd2.frame, n1)]), rng, tol
    )
    l23 = random_relation_containing(w2, w3, _in_first(d23.frame, n3), rng, tol)
    l13 = compose(l12, l23, tol).composed
    e_left = Subspace(_in_first(np.eye(n1), n3))
    e = intersect(l13.space, e_left, tol)
    e = orthonormalize(e.frame[:n1], tol, rows=n1, scale=1.0)
    # directions of E orthogonal to D1
    rest = orthonormalize(e.frame - dd1.frame @ (dd1.frame.conj().T @ e.frame), tol, rows=n1, scale=1.0)
    if rest.dim < v_dim:
        raise ValueError(f"only {rest.dim} free directions for V, asked for {v_dim}")
    vv = random_isotropic(w1, v_dim, rng, inside=rest, tol=tol)
    l01 = random_relation_containing(w0, w1, _in_second(np.hstack([dd1.frame, vv.frame]), n0), rng, tol)
    return (w0, w1, w2, w3), (l01, l12, l23)
