"""Dense complex subspace arithmetic.

Subspaces are stored as orthonormal frames (columns) obtained from a
singular value decomposition.  Rank decisions use a cutoff relative to
the largest singular value; equality of subspaces is always decided on
orthogonal projections, never on frames.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "Subspace",
    "as_matrix",
    "orthonormalize",
    "kernel",
    "intersect",
    "subspace_sum",
    "complement",
    "project",
    "principal_angles",
    "projection_residual",
    "subspaces_equal",
    "contains",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Cutoffs for rank decisions and equality checks.

    Parameters
    ----------
    rank_tol : float
        Singular values below ``rank_tol * reference`` are treated as zero,
        where the reference is the largest singular value (or an explicit
        scale, whichever is larger).
    residual_tol : float
        Max-norm threshold for residual based equality checks.
    """

    rank_tol: float = 1e-9
    residual_tol: float = 1e-9

    def __post_init__(self):
        if not 0.0 < self.rank_tol < 1.0:
            raise ValueError(f"rank_tol must lie in (0, 1), got {self.rank_tol}")
        if not 0.0 < self.residual_tol < 1.0:
            raise ValueError(f"residual_tol must lie in (0, 1), got {self.residual_tol}")


DEFAULT_TOL = ToleranceConfig()


def as_matrix(a, rows=None) -> np.ndarray:
    """Return ``a`` as a finite complex 2-d array.

    A 1-d input is read as a single column.  ``rows`` fixes the row count,
    which matters for empty inputs.
    """
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1) if m.size or rows is None else m.reshape(rows, 0)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {m.shape}")
    if rows is not None and m.shape[0] != rows:
        if m.size == 0:
            return np.zeros((rows, 0), dtype=complex)
        raise ValueError(f"expected {rows} rows, got {m.shape[0]}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


class Subspace:
    """Subspace of ``C^n`` given by an orthonormal frame.

    The constructor trusts the frame; use :func:`orthonormalize` to build a
    subspace from arbitrary spanning vectors.
    """

    __slots__ = ("_frame",)

    def __init__(self, frame, ambient_dim=None):
        f = as_matrix(frame, rows=ambient_dim)
        f = f.copy()
        f.setflags(write=False)
        self._frame = f

    @property
    def frame(self) -> np.ndarray:
        return self._frame

    @property
    def ambient_dim(self) -> int:
        return self._frame.shape[0]

    @property
    def dim(self) -> int:
        return self._frame.shape[1]

    def projector(self) -> np.ndarray:
        f = self._frame
        return f @ f.conj().T

    def frame_residual(self) -> float:
        """Max deviation of ``frame^* frame`` from the identity."""
        if self.dim == 0:
            return 0.0
        g = self._frame.conj().T @ self._frame
        return float(np.max(np.abs(g - np.eye(self.dim))))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(np.zeros((n, 0), dtype=complex))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(np.eye(n, dtype=complex))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def _rank(s: np.ndarray, tol: ToleranceConfig, scale) -> int:
    if s.size == 0:
        return 0
    ref = s[0] if scale is None else max(s[0], scale)
    if ref == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_tol * ref))


def orthonormalize(vectors, tol: ToleranceConfig = DEFAULT_TOL, rows=None, scale=None) -> Subspace:
    """Orthonormal frame of the column space of ``vectors``.

    Columns are dropped when their relative singular value falls below
    ``tol.rank_tol``.  Passing ``scale`` makes the cutoff relative to
    ``max(sigma_max, scale)`` instead, which keeps numerically zero inputs
    from being promoted to a spurious direction.
    """
    m = as_matrix(vectors, rows=rows)
    n = m.shape[0]
    if m.shape[1] == 0 or n == 0:
        return Subspace.zero(n)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = _rank(s, tol, scale)
    return Subspace(u[:, :r])


def kernel(matrix, tol: ToleranceConfig = DEFAULT_TOL, cols=None, scale=None) -> Subspace:
    """Null space of ``matrix`` as a subspace of its domain."""
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2:
        if cols is None:
            raise ValueError("kernel needs a matrix")
        m = m.reshape(-1, cols)
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    n = m.shape[1]
    if n == 0:
        return Subspace.zero(0)
    if m.shape[0] == 0:
        return Subspace.full(n)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    r = _rank(s, tol, scale)
    return Subspace(vh[r:].conj().T)


def _check_same(s1: Subspace, s2: Subspace):
    if s1.ambient_dim != s2.ambient_dim:
        raise ValueError(f"ambient dimension mismatch: {s1.ambient_dim} vs {s2.ambient_dim}")


def intersect(s1: Subspace, s2: Subspace, tol: ToleranceConfig = DEFAULT_TOL) -> Subspace:
    """Intersection of two subspaces.

    Directions of ``s1`` whose component orthogonal to ``s2`` has norm
    (the sine of the principal angle) below ``rank_tol`` are kept.
    """
    _check_same(s1, s2)
    f1, f2 = s1.frame, s2.frame
    if s1.dim == 0 or s2.dim == 0:
        return Subspace.zero(s1.ambient_dim)
    resid = f1 - f2 @ (f2.conj().T @ f1)
    _, s, vh = np.linalg.svd(resid, full_matrices=True)
    keep = np.ones(s1.dim, dtype=bool)
    keep[: s.size] = s <= tol.rank_tol
    coords = vh.conj().T[:, keep]
    return orthonormalize(f1 @ coords, tol, rows=s1.ambient_dim, scale=1.0)


def subspace_sum(s1: Subspace, s2: Subspace, tol: ToleranceConfig = DEFAULT_TOL) -> Subspace:
    _check_same(s1, s2)
    return orthonormalize(np.hstack([s1.frame, s2.frame]), tol, rows=s1.ambient_dim, scale=1.0)


def complement(s: Subspace, tol: ToleranceConfig = DEFAULT_TOL) -> Subspace:
    """Orthogonal complement inside the ambient space."""
    n = s.ambient_dim
    if s.dim == 0:
        return Subspace.full(n)
    return kernel(s.frame.conj().T, tol, scale=1.0)


def project(s: Subspace, v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.shape[0] != s.ambient_dim:
        raise ValueError(f"vector of length {v.shape[0]} not in ambient dim {s.ambient_dim}")
    f = s.frame
    return f @ (f.conj().T @ v)


def principal_angles(s1: Subspace, s2: Subspace) -> np.ndarray:
    """Principal angles in nonincreasing order, ``min(dim s1, dim s2)`` values."""
    _check_same(s1, s2)
    if s1.dim == 0 or s2.dim == 0:
        return np.zeros(0)
    ang = scipy.linalg.subspace_angles(s1.frame, s2.frame)
    return np.clip(np.sort(ang)[::-1], 0.0, np.pi / 2)


def projection_residual(s1: Subspace, s2: Subspace) -> float:
    """Max-norm of the difference of the orthogonal projections."""
    _check_same(s1, s2)
    if s1.ambient_dim == 0:
        return 0.0
    return float(np.max(np.abs(s1.projector() - s2.projector())))


def subspaces_equal(s1: Subspace, s2: Subspace, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return projection_residual(s1, s2) <= tol.residual_tol


def contains(big: Subspace, small: Subspace) -> float:
    """Residual of ``small`` lying inside ``big`` (zero when contained)."""
    _check_same(big, small)
    if small.dim == 0:
        return 0.0
    r = small.frame - project(big, small.frame)
    return float(np.max(np.abs(r)))
