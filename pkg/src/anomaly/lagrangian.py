"""Lagrangian subspaces and their composition as linear relations.

A Lagrangian relation from ``W0`` to ``W1`` is a Lagrangian inside
``W0 + (-W1)``; frames are stacked with the ``W0`` coordinates on top.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    Subspace,
    ToleranceConfig,
    as_matrix,
    complement,
    intersect,
    orthonormalize,
    projection_residual,
)
from .rspace import RSpace, direct_sum, opposite

__all__ = [
    "Lagrangian",
    "LagrangianReport",
    "NotAGraphLagrangian",
    "NotLagrangian",
    "CompositionResult",
    "is_lagrangian",
    "graph_lagrangian",
    "compose",
    "splitting_check",
    "qalpha_lagrangian",
    "qalpha_scan",
    "closeness",
    "SCAN_TOL",
]

# The truncated Q_alpha family has singular values of order exp(-N); a
# tighter rank cut keeps N = 32 resolvable.
SCAN_TOL = ToleranceConfig(rank_tol=1e-15, residual_tol=1e-9)


class NotAGraphLagrangian(ValueError):
    """The operator does not satisfy ``Q^* = conj(Q)^{-1}``."""


class NotLagrangian(ValueError):
    pass


@dataclass(frozen=True)
class LagrangianReport:
    is_lagrangian: bool
    residual: float
    dim_ok: bool

    def __bool__(self):
        return self.is_lagrangian


class Lagrangian:
    """A subspace of an RSpace, optionally carrying a relation splitting.

    Parameters
    ----------
    ambient : RSpace
    space : Subspace or array_like
        Orthonormal frame, or spanning vectors when ``orthonormal=False``.
    parts : (RSpace, RSpace), optional
        ``(W0, W1)`` when the ambient is ``W0 + (-W1)``.
    """

    __slots__ = ("ambient", "space", "parts")

    def __init__(self, ambient: RSpace, space, parts=None, orthonormal=True, tol=DEFAULT_TOL):
        if not isinstance(space, Subspace):
            m = as_matrix(space, rows=ambient.dim)
            space = Subspace(m) if orthonormal else orthonormalize(m, tol, scale=1.0)
        if space.ambient_dim != ambient.dim:
            raise ValueError("frame does not live in the ambient space")
        if parts is not None and parts[0].dim + parts[1].dim != ambient.dim:
            raise ValueError("relation parts do not add up to the ambient dimension")
        self.ambient = ambient
        self.space = space
        self.parts = parts

    @classmethod
    def relation(cls, w0: RSpace, w1: RSpace, frame, orthonormal=True, tol=DEFAULT_TOL):
        amb = direct_sum(w0, opposite(w1))
        return cls(amb, frame, parts=(w0, w1), orthonormal=orthonormal, tol=tol)

    @property
    def frame(self) -> np.ndarray:
        return self.space.frame

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def source(self) -> RSpace:
        return self._parts()[0]

    @property
    def target(self) -> RSpace:
        return self._parts()[1]

    def _parts(self):
        if self.parts is None:
            raise ValueError("Lagrangian carries no relation splitting")
        return self.parts

    def conj_frame(self) -> np.ndarray:
        return self.ambient.conj(self.frame)

    def report(self, tol: ToleranceConfig = DEFAULT_TOL) -> LagrangianReport:
        return is_lagrangian(self.ambient, self.space, tol)

    def with_frame(self, frame) -> "Lagrangian":
        return Lagrangian(self.ambient, Subspace(frame, self.ambient.dim), self.parts)

    def __repr__(self):
        return f"Lagrangian(dim={self.dim}, ambient_dim={self.ambient.dim})"


def is_lagrangian(space: RSpace, sub: Subspace, tol: ToleranceConfig = DEFAULT_TOL) -> LagrangianReport:
    """Check ``dim L = n/2`` and ``conj(L) ⟂ L``."""
    n = space.dim
    dim_ok = 2 * sub.dim == n
    if sub.dim:
        f = sub.frame
        resid = float(np.max(np.abs(space.conj(f).conj().T @ f)))
    else:
        resid = 0.0
    return LagrangianReport(bool(dim_ok and resid <= tol.residual_tol), resid, dim_ok)


def graph_lagrangian(w0: RSpace, w1: RSpace, q, tol: ToleranceConfig = DEFAULT_TOL) -> Lagrangian:
    """Graph ``{(v, Qv)}`` as a Lagrangian in ``W0 + (-W1)``.

    Raises :class:`NotAGraphLagrangian` unless ``Q`` is invertible with
    ``Q^* = conj(Q)^{-1}``, where ``conj(Q) v = conj(Q conj(v))``.
    """
    q = as_matrix(q)
    if q.shape != (w1.dim, w0.dim):
        raise ValueError(f"graph operator has shape {q.shape}, expected {(w1.dim, w0.dim)}")
    if w0.dim != w1.dim:
        raise NotAGraphLagrangian("graph operator is not square, hence not invertible")
    n = w0.dim
    if n:
        # invertibility is certified by Q^* conj(Q) = I below; only exact
        # singularity is rejected here, since Q_alpha is legitimately ill-conditioned
        s = np.linalg.svd(q, compute_uv=False)
        if s[-1] == 0.0:
            raise NotAGraphLagrangian("graph operator is singular")
        qbar = w1.conj_matrix @ q.conj() @ w0.conj_matrix.conj()
        resid = np.max(np.abs(q.conj().T @ qbar - np.eye(n)))
        scale = max(1.0, float(np.linalg.norm(q, 2) * np.linalg.norm(qbar, 2)))
        if resid > tol.residual_tol * scale:
            raise NotAGraphLagrangian(f"Q^* != conj(Q)^-1 (residual {resid:.2e})")
    # the identity block makes the columns independent, so no rank decision
    frame, _ = np.linalg.qr(np.vstack([np.eye(n), q]))
    return Lagrangian.relation(w0, w1, frame)


@dataclass
class CompositionResult:
    """Composed relation together with the diagnostics of its construction."""

    composed: Lagrangian
    K: Subspace
    L_sigma: Subspace
    closedness_margin: float
    splitting_residual: float
    kernel_identity_residual: float
    dim_consistent: bool
    sigma_singular_values: np.ndarray = field(repr=False)
    lagrangian_residual: float = 0.0

    @property
    def dim_K(self) -> int:
        return self.K.dim


def _check_chain(l01: Lagrangian, l12: Lagrangian, tol):
    if not l01.target.same_as(l12.source, tol):
        raise ValueError("middle spaces of the two relations do not agree")


def _boundary_pieces(l01: Lagrangian, l12: Lagrangian, tol):
    """``{w : (0, w) in L01}`` and ``{w : (w, 0) in L12}`` as subspaces of W1."""
    n0, n1 = l01.source.dim, l01.target.dim
    n2 = l12.target.dim
    e_right = np.vstack([np.zeros((n0, n1)), np.eye(n1)])
    e_left = np.vstack([np.eye(n1), np.zeros((n2, n1))])
    a = intersect(l01.space, Subspace(e_right), tol)
    b = intersect(l12.space, Subspace(e_left), tol)
    a = orthonormalize(a.frame[n0:], tol, rows=n1, scale=1.0)
    b = orthonormalize(b.frame[:n1], tol, rows=n1, scale=1.0)
    return a, b


def anomaly_space(l01: Lagrangian, l12: Lagrangian, tol: ToleranceConfig = DEFAULT_TOL) -> Subspace:
    """``K = {w in W1 : (0, w) in L01, (w, 0) in L12}`` by two intersections."""
    _check_chain(l01, l12, tol)
    a, b = _boundary_pieces(l01, l12, tol)
    return intersect(a, b, tol)


def _sigma_on_l(l01: Lagrangian, l12: Lagrangian):
    n0 = l01.source.dim
    n1 = l01.target.dim
    return np.hstack([l01.frame[n0:], -l12.frame[:n1]])


def compose(l01: Lagrangian, l12: Lagrangian, tol: ToleranceConfig = DEFAULT_TOL) -> CompositionResult:
    """Composition of Lagrangian relations through ``ker(sigma) ∩ L``."""
    _check_chain(l01, l12, tol)
    w0, w1 = l01.parts
    w2 = l12.target
    n0, n1, n2 = w0.dim, w1.dim, w2.dim
    k01, k12 = l01.dim, l12.dim

    # frame of L = L01 + L12 inside W0 + (-W1) + W1 + (-W2)
    big = np.zeros((n0 + 2 * n1 + n2, k01 + k12), dtype=complex)
    big[: n0 + n1, :k01] = l01.frame
    big[n0 + n1 :, k01:] = l12.frame

    sig = _sigma_on_l(l01, l12)
    if n1 and k01 + k12:
        u, s, vh = np.linalg.svd(sig, full_matrices=True)
        ref = max(s[0], 1.0) if s.size else 1.0
        rank = int(np.count_nonzero(s > tol.rank_tol * ref))
        null = vh[rank:].conj().T
        image = u[:, :rank]
        margin = float(s[rank - 1]) if rank else math.inf
    else:
        s = np.zeros(0)
        rank = 0
        null = np.eye(k01 + k12, dtype=complex)
        image = np.zeros((n1, 0), dtype=complex)
        margin = math.inf

    l_sigma = Subspace(big @ null)
    outer = np.vstack([l_sigma.frame[:n0], l_sigma.frame[n0 + 2 * n1 :]])
    composed_space = orthonormalize(outer, tol, rows=n0 + n2, scale=1.0)
    composed = Lagrangian.relation(w0, w2, composed_space)

    k = anomaly_space(l01, l12, tol)
    dim_ok = composed.dim == l_sigma.dim - k.dim

    # image(sigma|_L)^perp must equal conj(K)
    k_bar = Subspace(w1.conj(k.frame), n1) if k.dim else Subspace.zero(n1)
    im_perp = complement(Subspace(image, n1), tol)
    kid = projection_residual(im_perp, k_bar) if n1 else 0.0

    res = CompositionResult(
        composed=composed,
        K=k,
        L_sigma=l_sigma,
        closedness_margin=margin,
        splitting_residual=0.0,
        kernel_identity_residual=kid,
        dim_consistent=bool(dim_ok),
        sigma_singular_values=s,
        lagrangian_residual=composed.report(tol).residual,
    )
    res.splitting_residual = splitting_check(l01, l12, tol, _l_sigma=l_sigma)["residual"]
    return res


def splitting_check(l01: Lagrangian, l12: Lagrangian, tol: ToleranceConfig = DEFAULT_TOL, _l_sigma=None) -> dict:
    """Orthogonal splitting ``W = Lσ + P_L conj(U) + conj(Lσ) + P_conj(L) U``.

    ``U = δ(W1) = {(0, w, w, 0)}``.  Returns pairwise orthogonality
    residuals, the four dimensions and the dimension defect.
    """
    _check_chain(l01, l12, tol)
    w0, w1 = l01.parts
    w2 = l12.target
    n0, n1 = w0.dim, w1.dim
    big_space = direct_sum(w0, opposite(w1), w1, opposite(w2))
    n = big_space.dim
    k01 = l01.dim
    lf = np.zeros((n, k01 + l12.dim), dtype=complex)
    lf[: n0 + n1, :k01] = l01.frame
    lf[n0 + n1 :, k01:] = l12.frame
    if _l_sigma is None:
        _l_sigma = compose(l01, l12, tol).L_sigma
    ls = _l_sigma.frame

    delta = np.zeros((n, n1), dtype=complex)
    delta[n0 : n0 + n1] = np.eye(n1)
    delta[n0 + n1 : n0 + 2 * n1] = np.eye(n1)
    u_bar = big_space.conj(delta)
    lbf = big_space.conj(lf)

    p_l = lf @ lf.conj().T
    p_lb = lbf @ lbf.conj().T
    pieces = [
        Subspace(ls, n),
        orthonormalize(p_l @ u_bar, tol, rows=n, scale=1.0),
        Subspace(big_space.conj(ls), n),
        orthonormalize(p_lb @ delta, tol, rows=n, scale=1.0),
    ]
    resid = 0.0
    for i in range(4):
        for j in range(i + 1, 4):
            if pieces[i].dim and pieces[j].dim:
                g = pieces[i].frame.conj().T @ pieces[j].frame
                resid = max(resid, float(np.max(np.abs(g))))
    dims = [p.dim for p in pieces]
    return {"residual": resid, "dims": dims, "dim_defect": n - sum(dims)}


def _flip(n: int) -> np.ndarray:
    return np.eye(n)[::-1].copy()


def qalpha_space(N: int) -> RSpace:
    """``span{e_-N .. e_N}`` with real structure ``conj(e_n) = e_-n``."""
    if N < 1:
        raise ValueError("truncation half-width must be at least 1")
    return RSpace(_flip(2 * N + 1))


def qalpha_lagrangian(alpha: float, N: int) -> Lagrangian:
    """Graph of ``Q_alpha e_n = exp(alpha n) e_n`` on the truncated index set."""
    w = qalpha_space(N)
    idx = np.arange(-N, N + 1)
    return graph_lagrangian(w, w, np.diag(np.exp(alpha * idx)))


def qalpha_scan(alpha: float, sizes, tol: ToleranceConfig = SCAN_TOL) -> list:
    """Closedness margins of ``compose(Q_alpha, Q_-alpha)`` over truncation sizes."""
    if alpha == 0:
        raise ValueError("alpha = 0 gives a degenerate scan")
    rows = []
    for n in sizes:
        res = compose(qalpha_lagrangian(alpha, n), qalpha_lagrangian(-alpha, n), tol)
        rows.append(
            {
                "N": int(n),
                "closedness_margin": res.closedness_margin,
                "composed_residual": res.lagrangian_residual,
                "dim_K": res.K.dim,
            }
        )
    return rows


def closeness(s1: Subspace, s2: Subspace) -> dict:
    """Operator norm and singular profile of ``P1 - P2``."""
    if s1.ambient_dim != s2.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    if s1.ambient_dim == 0:
        return {"operator_norm_diff": 0.0, "singular_profile": []}
    s = np.linalg.svd(s1.projector() - s2.projector(), compute_uv=False)
    return {"operator_norm_diff": float(s[0]), "singular_profile": [float(x) for x in s]}
