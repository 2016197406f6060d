"""Fock modules of Lagrangians and their Clifford actions.

The exterior algebra of a Lagrangian ``L`` with orthonormal frame
``l_1 .. l_k`` has basis ``e_S = l_{s1} ^ ... ^ l_{sm}`` (``s1 < ... < sm``)
ordered by (popcount, bitmask), so that even and odd degrees form
contiguous blocks.  A vector ``w = p + conj(q)`` with ``p, q in L`` acts by
``wedge(p) + insertion(q)``; the anticommutator of two generators is
``b(v, w)`` times the identity, without a factor of two.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .lagrangian import Lagrangian
from .linalg import DEFAULT_TOL, Subspace, ToleranceConfig, kernel
from .rspace import RSpace, bilinear_form, flip_space, opposite, real_points, reference_lagrangian

__all__ = [
    "fock_basis",
    "FockModule",
    "BimoduleStructure",
    "CliffordAlgebra",
    "CliffordElement",
    "NotInPfaffianLine",
    "generator_action",
    "vacuum",
    "left_act",
    "right_act",
    "pfaffian_line",
    "hom_from_pfaffian",
    "car_operators",
    "opposite_algebra_residual",
    "exterior_power_matrix",
]


class NotInPfaffianLine(ValueError):
    """The proposed image of the vacuum is not annihilated by ``conj(L)``."""


@lru_cache(maxsize=None)
def fock_basis(k: int):
    """Bitmasks of all subsets of ``range(k)`` in (popcount, bitmask) order."""
    masks = sorted(range(1 << k), key=lambda m: (bin(m).count("1"), m))
    index = {m: i for i, m in enumerate(masks)}
    return tuple(masks), index


@lru_cache(maxsize=None)
def _ladder(k: int):
    """Creation and annihilation matrices for each frame direction."""
    masks, index = fock_basis(k)
    d = 1 << k
    create = np.zeros((k, d, d))
    for col, m in enumerate(masks):
        for i in range(k):
            if m >> i & 1:
                continue
            sign = -1.0 if bin(m & ((1 << i) - 1)).count("1") % 2 else 1.0
            create[i, index[m | 1 << i], col] = sign
    annih = create.transpose(0, 2, 1).copy()
    parity = np.array([(-1.0) ** bin(m).count("1") for m in masks])
    for a in (create, annih, parity):
        a.setflags(write=False)
    return create, annih, parity


class FockModule:
    """Exterior algebra ``ΛL`` as a module over ``Cl(W)``.

    ``action(w)`` is the matrix of the generator ``w`` in the
    (popcount, bitmask) basis; it is complex linear in ``w``.
    """

    def __init__(self, lagrangian: Lagrangian):
        self.lagrangian = lagrangian
        self.space: RSpace = lagrangian.ambient
        self.k = lagrangian.dim
        self.dim = 1 << self.k
        create, annih, parity = _ladder(self.k)
        f = lagrangian.frame
        fb = self.space.conj(f)
        # action(w) = sum_i <l_i, w> create_i + <conj(l_i), w> annih_i
        g = np.einsum("ji,iab->jab", f.conj(), create) + np.einsum("ji,iab->jab", fb.conj(), annih)
        g.setflags(write=False)
        self._gen = g
        self.parity = np.diag(parity).astype(complex)
        self.degree = np.array([bin(m).count("1") for m in fock_basis(self.k)[0]])

    def action(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        if w.shape != (self.space.dim,):
            raise ValueError(f"vector of shape {w.shape} not in ambient of dim {self.space.dim}")
        if self.space.dim == 0:
            return np.zeros((self.dim, self.dim), dtype=complex)
        return np.tensordot(w, self._gen, axes=1)

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def basis_vector(self, mask: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[fock_basis(self.k)[1][mask]] = 1.0
        return v

    def clifford_residual(self, vectors) -> float:
        """Max residual of ``γ(v)γ(w) + γ(w)γ(v) = b(v, w)`` over pairs of columns."""
        vs = np.asarray(vectors, dtype=complex)
        ops = [self.action(vs[:, i]) for i in range(vs.shape[1])]
        eye = np.eye(self.dim)
        out = 0.0
        for i in range(len(ops)):
            for j in range(i, len(ops)):
                b = bilinear_form(self.space, vs[:, i], vs[:, j])
                r = ops[i] @ ops[j] + ops[j] @ ops[i] - b * eye
                out = max(out, float(np.max(np.abs(r))))
        return out


def generator_action(module: FockModule, w) -> np.ndarray:
    return module.action(w)


def vacuum(module: FockModule) -> np.ndarray:
    return module.vacuum()


class BimoduleStructure:
    """``ΛL01`` as a ``Cl(W0)``-``Cl(W1)`` bimodule for ``L01 ⊂ W0 + (-W1)``.

    ``left(w0)`` acts as ``(w0, 0)``; ``right(w1)`` is the matrix of
    ``ξ -> (-1)^{|ξ|} (0, w1)·ξ``, extended linearly over parity components.
    Right actions compose in reverse: ``(ξ·a)·b = right(b) @ right(a) @ ξ``.
    """

    def __init__(self, lagrangian: Lagrangian):
        self.module = FockModule(lagrangian)
        self.left_space, self.right_space = lagrangian.parts
        self.dim = self.module.dim
        self.parity = self.module.parity
        self._n0 = self.left_space.dim

    @property
    def lagrangian(self) -> Lagrangian:
        return self.module.lagrangian

    def left(self, w0) -> np.ndarray:
        w = np.zeros(self.module.space.dim, dtype=complex)
        w[: self._n0] = w0
        return self.module.action(w)

    def right(self, w1) -> np.ndarray:
        w = np.zeros(self.module.space.dim, dtype=complex)
        w[self._n0 :] = w1
        return self.module.action(w) @ self.parity

    def vacuum(self) -> np.ndarray:
        return self.module.vacuum()


def left_act(bimodule: BimoduleStructure, w0, xi) -> np.ndarray:
    return bimodule.left(w0) @ np.asarray(xi, dtype=complex)


def right_act(bimodule: BimoduleStructure, xi, w1) -> np.ndarray:
    return bimodule.right(w1) @ np.asarray(xi, dtype=complex)


def pfaffian_line(frame, module, tol: ToleranceConfig = DEFAULT_TOL) -> Subspace:
    """``{m : conj(l)·m = 0 for all l}`` for the columns ``l`` of ``frame``.

    ``module`` is anything with ``space``, ``dim`` and ``action(w)``.
    """
    f = frame.frame if isinstance(frame, Subspace) else np.asarray(frame, dtype=complex)
    if f.ndim != 2 or f.shape[1] == 0:
        return Subspace.full(module.dim)
    fb = module.space.conj(f)
    stack = np.vstack([module.action(fb[:, i]) for i in range(f.shape[1])])
    return kernel(stack, tol, scale=1.0)


def hom_from_pfaffian(m, frame, module, tol: ToleranceConfig = DEFAULT_TOL, check=True) -> np.ndarray:
    """Module map ``ΛL -> M`` sending ``e_S`` to ``l_{s1} ⋯ l_{sk} · m``.

    Returns the matrix whose columns are the images of the Fock basis of
    ``L`` (frame columns) in (popcount, bitmask) order.
    """
    f = np.asarray(frame, dtype=complex)
    m = np.asarray(m, dtype=complex)
    k = f.shape[1]
    if check and k:
        fb = module.space.conj(f)
        resid = max(float(np.linalg.norm(module.action(fb[:, i]) @ m)) for i in range(k))
        if resid > tol.residual_tol * max(1.0, float(np.linalg.norm(m))):
            raise NotInPfaffianLine(f"vector is not annihilated by conj(L) (residual {resid:.2e})")
    masks, index = fock_basis(k)
    ops = [module.action(f[:, i]) for i in range(k)]
    cols = np.zeros((module.dim, 1 << k), dtype=complex)
    cols[:, 0] = m
    for mask in masks[1:]:
        low = (mask & -mask).bit_length() - 1
        cols[:, index[mask]] = ops[low] @ cols[:, index[mask & (mask - 1)]]
    return cols


def exterior_power_matrix(u) -> np.ndarray:
    """Matrix of ``Λ(U)`` on the Fock basis: minors ``det U[S, T]``."""
    u = np.asarray(u, dtype=complex)
    k = u.shape[0]
    masks, index = fock_basis(k)
    out = np.zeros((1 << k, 1 << k), dtype=complex)
    bits = [[i for i in range(k) if m >> i & 1] for m in masks]
    for a, rows in enumerate(bits):
        for b, cols in enumerate(bits):
            if len(rows) != len(cols):
                continue
            out[a, b] = np.linalg.det(u[np.ix_(rows, cols)]) if rows else 1.0
    return out


@dataclass(frozen=True)
class CliffordElement:
    """An element of ``Cl(W)`` as an operator in the canonical representation."""

    algebra: "CliffordAlgebra"
    operator: np.ndarray
    parity: str

    def __matmul__(self, other: "CliffordElement") -> "CliffordElement":
        par = {("even", "even"): "even", ("odd", "odd"): "even", ("even", "odd"): "odd", ("odd", "even"): "odd"}
        return CliffordElement(self.algebra, self.operator @ other.operator, par.get((self.parity, other.parity), "mixed"))


class CliffordAlgebra:
    """``Cl(W)`` realized on the Fock module of the reference Lagrangian."""

    def __init__(self, space: RSpace, tol: ToleranceConfig = DEFAULT_TOL):
        self.space = space
        self.ref_lagrangian = reference_lagrangian(space, tol)
        self.module = FockModule(self.ref_lagrangian)
        self.rep_dim = self.module.dim

    def generator(self, v) -> CliffordElement:
        return CliffordElement(self, self.module.action(v), "odd")

    def word(self, vectors) -> np.ndarray:
        out = np.eye(self.rep_dim, dtype=complex)
        for v in vectors:
            out = out @ self.module.action(v)
        return out

    def monomials(self, basis=None) -> np.ndarray:
        """Operators of all ordered monomials in ``basis`` (default: standard), stacked."""
        n = self.space.dim
        eye = np.eye(n) if basis is None else np.asarray(basis, dtype=complex)
        ops = []
        for mask in range(1 << n):
            idx = [i for i in range(n) if mask >> i & 1]
            ops.append(self.word([eye[:, i] for i in idx]))
        return np.array(ops)

    def faithfulness_rank(self, tol: ToleranceConfig = DEFAULT_TOL) -> int:
        """Rank of the monomial operators; ``4^k`` means faithful."""
        ops = self.monomials().reshape(1 << self.space.dim, -1)
        s = np.linalg.svd(ops, compute_uv=False)
        return int(np.count_nonzero(s > tol.rank_tol * s[0]))


def car_operators(v_dim: int, tol: ToleranceConfig = DEFAULT_TOL):
    """Annihilators ``a(v)`` and creators ``a^*(w)`` on ``Λ`` of the flip space.

    Returns ``(a, a_star, module)`` where ``a(v)`` is the action of
    ``(v, 0)`` and ``a_star(w)`` the action of ``(0, conj w)``; the first is
    linear in its argument, the second antilinear.
    """
    space = flip_space(v_dim)
    module = FockModule(reference_lagrangian(space, tol))

    def a(v):
        v = np.asarray(v, dtype=complex)
        return module.action(np.concatenate([v, np.zeros(v_dim)]))

    def a_star(w):
        w = np.asarray(w, dtype=complex)
        return module.action(np.concatenate([np.zeros(v_dim), w.conj()]))

    return a, a_star, module


def opposite_algebra_residual(space: RSpace, rng: np.random.Generator, n_words=20, max_len=3,
                              tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Check that ``w -> w`` extends to an algebra map ``Cl(-W) -> Cl(W)^op``.

    The map is defined on ordered monomials of an orthonormal basis by
    reversal with the Koszul sign; a product of random words in ``Cl(-W)``
    must go to the opposite product ``a • b = (-1)^{|a||b|} b a`` of the
    images.
    """
    n = space.dim
    plus = CliffordAlgebra(space, tol)
    minus = CliffordAlgebra(opposite(space), tol)
    # a real orthonormal basis is b-orthogonal for both W and -W
    basis = real_points(space, tol)
    mon_minus = minus.monomials(basis).reshape(1 << n, -1)
    mon_plus = plus.monomials(basis)
    # v1 • ... • vm = (-1)^{m(m-1)/2} vm ... v1, and reordering an orthogonal
    # monomial back costs the same sign, so ordered monomials map to themselves
    images = mon_plus

    def phi(op_minus):
        coeffs, *_ = np.linalg.lstsq(mon_minus.T, op_minus.reshape(-1), rcond=None)
        return np.tensordot(coeffs, images, axes=1)

    def random_word():
        length = int(rng.integers(1, max_len + 1))
        vs = [rng.normal(size=n) + 1j * rng.normal(size=n) for _ in range(length)]
        return vs

    worst = 0.0
    for _ in range(n_words):
        wa, wb = random_word(), random_word()
        a_m, b_m = minus.word(wa), minus.word(wb)
        lhs = phi(a_m @ b_m)
        pa, pb = len(wa) % 2, len(wb) % 2
        rhs = (-1.0) ** (pa * pb) * phi(b_m) @ phi(a_m)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        # generators go to generators
        v = wa[0]
        worst = max(worst, float(np.max(np.abs(phi(minus.module.action(v)) - plus.module.action(v)))))
    return worst
