"""Complex inner-product spaces with a real structure.

A real structure is an anti-unitary involution ``v -> conj(v)``.  It is
stored as a matrix ``C`` acting after entrywise conjugation, so that
``conj(v) = C @ v.conj()``.  The Hermitian product is antilinear in the
first slot throughout (``np.vdot`` convention).
"""
from __future__ import annotations

import numpy as np

from .linalg import DEFAULT_TOL, Subspace, ToleranceConfig, as_matrix

__all__ = [
    "RSpace",
    "NoLagrangianExists",
    "conjugate_vector",
    "bilinear_form",
    "direct_sum",
    "opposite",
    "conjugate_space",
    "flip_space",
    "real_points",
    "reference_lagrangian",
    "restrict",
]


class NoLagrangianExists(ValueError):
    """Raised for spaces of odd dimension, which carry no Lagrangian."""


class RSpace:
    """Finite-dimensional space ``C^n`` with real structure ``v -> C conj(v)``.

    Parameters
    ----------
    conj_matrix : array_like, shape (n, n)
        Must be unitary and satisfy ``C @ conj(C) = I``.
    """

    __slots__ = ("_c",)

    def __init__(self, conj_matrix, tol: ToleranceConfig = DEFAULT_TOL):
        c = np.asarray(conj_matrix, dtype=complex)
        if c.size == 0:
            c = np.zeros((0, 0), dtype=complex)
        c = as_matrix(c)
        if c.shape[0] != c.shape[1]:
            raise ValueError(f"conjugation matrix must be square, got {c.shape}")
        n = c.shape[0]
        if n:
            eye = np.eye(n)
            unit = np.max(np.abs(c.conj().T @ c - eye))
            invol = np.max(np.abs(c @ c.conj() - eye))
            if unit > tol.residual_tol:
                raise ValueError(f"conjugation matrix is not unitary (residual {unit:.2e})")
            if invol > tol.residual_tol:
                raise ValueError(f"conjugation is not an involution (residual {invol:.2e})")
        c = c.copy()
        c.setflags(write=False)
        self._c = c

    @property
    def conj_matrix(self) -> np.ndarray:
        return self._c

    @property
    def dim(self) -> int:
        return self._c.shape[0]

    def conj(self, v) -> np.ndarray:
        """Apply the real structure to a vector or to each column of a matrix."""
        v = np.asarray(v, dtype=complex)
        if v.shape[0] != self.dim:
            raise ValueError(f"vector of length {v.shape[0]} not in space of dim {self.dim}")
        return self._c @ v.conj()

    def conj_operator(self, a) -> np.ndarray:
        """The conjugate ``conj(A)(v) = conj(A conj(v))`` of a linear endomorphism."""
        return self._c @ np.asarray(a, dtype=complex).conj() @ self._c.conj()

    def same_as(self, other: "RSpace", tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        if self.dim != other.dim:
            return False
        if self.dim == 0:
            return True
        return bool(np.max(np.abs(self._c - other._c)) <= tol.residual_tol)

    @classmethod
    def standard(cls, n: int) -> "RSpace":
        """``C^n`` with coordinatewise complex conjugation."""
        return cls(np.eye(n))

    def __repr__(self):
        return f"RSpace(dim={self.dim})"


def conjugate_vector(space: RSpace, v) -> np.ndarray:
    return space.conj(v)


def bilinear_form(space: RSpace, v, w) -> complex:
    """``b(v, w) = <conj(v), w>``, complex bilinear and symmetric."""
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if w.shape[0] != space.dim:
        raise ValueError("dimension mismatch")
    return complex(np.vdot(space.conj(v), w))


def bilinear_matrix(space: RSpace) -> np.ndarray:
    """Matrix ``B`` with ``b(v, w) = v^T B w``."""
    return space.conj_matrix.conj().T


def _block_diag(blocks) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i : i + k, i : i + k] = b
        i += k
    return out


def direct_sum(*spaces: RSpace) -> RSpace:
    return RSpace(_block_diag([s.conj_matrix for s in spaces]))


def opposite(space: RSpace) -> RSpace:
    """``-W``: same Hermitian product, negated real structure."""
    return RSpace(-space.conj_matrix)


def conjugate_space(space: RSpace) -> RSpace:
    """``W-bar`` in conjugated coordinates; the conjugation matrix is ``conj(C)``."""
    return RSpace(space.conj_matrix.conj())


def flip_space(v_dim: int) -> RSpace:
    """``V + conj(V)`` with the flip real structure ``(v, xi) -> (conj xi, conj v)``."""
    if v_dim < 0:
        raise ValueError("v_dim must be nonnegative")
    z = np.zeros((v_dim, v_dim))
    e = np.eye(v_dim)
    return RSpace(np.block([[z, e], [e, z]]) if v_dim else np.zeros((0, 0)))


def real_points(space: RSpace, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the real points ``{v : conj(v) = v}``.

    The fixed set is a real form of the space, so the returned ``n``
    vectors are also an orthonormal complex basis.
    """
    n = space.dim
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    c = space.conj_matrix
    eye = np.eye(n)
    # (x + conj x)/2 for x = e_j and x = i e_j spans the fixed set over R
    span = np.hstack([(eye + c) / 2, 1j * (eye - c) / 2])
    real_span = np.vstack([span.real, span.imag])
    u, s, _ = np.linalg.svd(real_span, full_matrices=False)
    basis = u[:, :n]
    if s[n - 1] <= tol.rank_tol * s[0]:
        raise ValueError("real structure has a degenerate fixed set")
    # on real points the Hermitian product is real, so real orthonormality suffices
    return basis[:n] + 1j * basis[n:]


def reference_frame(space: RSpace, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Frame ``(e_{2i-1} - i e_{2i}) / sqrt 2`` built from the real points."""
    n = space.dim
    if n % 2:
        raise NoLagrangianExists(f"space of odd dimension {n} has no Lagrangian")
    e = real_points(space, tol)
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    return (e[:, 0::2] - 1j * e[:, 1::2]) / np.sqrt(2.0)


def reference_lagrangian(space: RSpace, tol: ToleranceConfig = DEFAULT_TOL):
    """Canonical Lagrangian of an even-dimensional space."""
    from .lagrangian import Lagrangian

    return Lagrangian(space, Subspace(reference_frame(space, tol), ambient_dim=space.dim))


def restrict(space: RSpace, sub: Subspace, tol: ToleranceConfig = DEFAULT_TOL) -> RSpace:
    """Real structure of a conjugation-invariant subspace, in frame coordinates."""
    g = sub.frame
    if sub.dim == 0:
        return RSpace(np.zeros((0, 0)))
    inv = np.max(np.abs(space.conj(g) - g @ (g.conj().T @ space.conj(g))))
    if inv > max(tol.residual_tol, 1e3 * tol.rank_tol):
        raise ValueError(f"subspace is not invariant under the real structure (residual {inv:.2e})")
    c = g.conj().T @ space.conj_matrix @ g.conj()
    # symmetrize away roundoff so the involution check is exact to machine precision
    c = (c + c.T) / 2
    return RSpace(c, ToleranceConfig(tol.rank_tol, max(tol.residual_tol, 1e-8)))
