"""Gluing of Fock bimodules along a composition of Lagrangian relations.

``ΛL01 ⊗_{Cl(W1)} ΛL12`` is realized as the orthogonal complement of the
relation space ``Q = span{ξ·w ⊗ ξ' - ξ ⊗ w·ξ'}`` in the plain tensor
product.  The gluing map is a module map from ``ΛL02 ⊗ Λ^top K`` into this
quotient, and the development map compares the two ways of gluing three
relations.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fock import BimoduleStructure, hom_from_pfaffian, pfaffian_line
from .lagrangian import CompositionResult, Lagrangian, compose
from .linalg import DEFAULT_TOL, Subspace, ToleranceConfig, contains, intersect, orthonormalize
from .rspace import direct_sum, opposite

__all__ = [
    "GluingDegenerate",
    "NotAGraph",
    "CompositionNotLagrangian",
    "TensorOverClifford",
    "QuotientModule",
    "tensor_over_clifford",
    "GlueResult",
    "glue_iso",
    "verify_glue",
    "KSpaces",
    "k_spaces",
    "DevelopmentMap",
    "development_map",
    "swap_check",
    "SwapDiagnostics",
    "swap_diagnostics",
    "coherence_check",
]


class GluingDegenerate(RuntimeError):
    """The generator of the gluing map vanished in the quotient."""


class NotAGraph(ValueError):
    """The relation between the two complements is not the graph of a map."""


class CompositionNotLagrangian(ValueError):
    pass


class TensorDimensionMismatch(RuntimeError):
    pass


class QuotientModule:
    """The quotient as a module over ``Cl(W0 + (-W2))``.

    ``(w0, w2)`` acts by ``x -> w0·x + (-1)^{|x|} x·w2``.
    """

    def __init__(self, tensor: "TensorOverClifford"):
        self.tensor = tensor
        self.space = direct_sum(tensor.left_space, opposite(tensor.right_space))
        self.dim = tensor.dim
        self.parity = tensor.parity
        self._n0 = tensor.left_space.dim

    def action(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        out = self.tensor.left(w[: self._n0])
        if w.shape[0] > self._n0:
            out = out + self.tensor.right(w[self._n0 :]) @ self.parity
        return out


class TensorOverClifford:
    """``M01 ⊗_{Cl(W1)} M12`` as the orthogonal complement of the relations.

    The factors are bimodule-like: they expose ``left_space``,
    ``right_space``, ``dim``, ``left(w)``, ``right(w)`` and ``parity``.  The
    quotient itself is bimodule-like, so iterated quotients are available.

    Attributes
    ----------
    relations : Subspace
        Orthonormal frame of ``Q`` inside the plain tensor product.
    frame : ndarray
        Orthonormal frame ``B`` of ``Q^⊥``; the projection is ``x -> B^H x``.
    """

    def __init__(self, m01, m12, tol: ToleranceConfig = DEFAULT_TOL, check_dim=True):
        if not m01.right_space.same_as(m12.left_space, tol):
            raise ValueError("middle spaces of the two bimodules do not agree")
        self.factors = (m01, m12)
        self.left_space = m01.left_space
        self.middle_space = m01.right_space
        self.right_space = m12.right_space
        d0, d1 = m01.dim, m12.dim
        self.ambient_dim = d0 * d1
        n1 = self.middle_space.dim
        eye0, eye1 = np.eye(d0), np.eye(d1)
        basis = np.eye(n1)
        cols = [np.kron(m01.right(basis[:, j]), eye1) - np.kron(eye0, m12.left(basis[:, j])) for j in range(n1)]
        if cols:
            stack = np.hstack(cols)
            # a complete left basis is needed; skip the right factor when it is wide
            u, s, _ = np.linalg.svd(stack, full_matrices=stack.shape[1] < stack.shape[0])
            ref = max(float(s[0]), 1.0) if s.size else 1.0
            r = int(np.count_nonzero(s > tol.rank_tol * ref))
            self.relation_singular_values = s
        else:
            u = np.eye(self.ambient_dim, dtype=complex)
            r = 0
            self.relation_singular_values = np.zeros(0)
        self.relations = Subspace(u[:, :r], self.ambient_dim)
        frame = np.ascontiguousarray(u[:, r:])
        frame.setflags(write=False)
        self.frame = frame
        self.dim = frame.shape[1]
        self.parity = self._compress(np.kron(m01.parity, m12.parity))
        self.expected_dim = self._expected_dim()
        if check_dim and self.expected_dim is not None and self.dim != self.expected_dim:
            raise TensorDimensionMismatch(
                f"quotient has dimension {self.dim}, expected {self.expected_dim}"
            )

    def _expected_dim(self):
        n = self.left_space.dim + self.right_space.dim
        return None if n % 2 else 1 << (n // 2)

    def _compress(self, op) -> np.ndarray:
        b = self.frame
        return b.conj().T @ op @ b

    def project(self, x) -> np.ndarray:
        """Coordinates of ``π(x)`` in the frame of ``Q^⊥``."""
        return self.frame.conj().T @ np.asarray(x, dtype=complex)

    def embed(self, y) -> np.ndarray:
        return self.frame @ np.asarray(y, dtype=complex)

    def left(self, w0) -> np.ndarray:
        m01, m12 = self.factors
        return self._compress(np.kron(m01.left(w0), np.eye(m12.dim)))

    def right(self, w2) -> np.ndarray:
        m01, m12 = self.factors
        return self._compress(np.kron(np.eye(m01.dim), m12.right(w2)))

    def module(self) -> QuotientModule:
        return QuotientModule(self)

    def preservation_residual(self) -> float:
        """How far the outer actions and the grading fail to preserve ``Q``."""
        q = self.relations.frame
        if q.shape[1] == 0:
            return 0.0
        m01, m12 = self.factors
        ops = [np.kron(m01.parity, m12.parity)]
        e0, e2 = np.eye(self.left_space.dim), np.eye(self.right_space.dim)
        ops += [np.kron(m01.left(e0[:, i]), np.eye(m12.dim)) for i in range(e0.shape[0])]
        ops += [np.kron(np.eye(m01.dim), m12.right(e2[:, i])) for i in range(e2.shape[0])]
        b = self.frame
        return max(float(np.max(np.abs(b.conj().T @ op @ q))) if b.shape[1] else 0.0 for op in ops)


def tensor_over_clifford(m01, m12, tol: ToleranceConfig = DEFAULT_TOL) -> TensorOverClifford:
    return TensorOverClifford(m01, m12, tol)


@dataclass
class GlueResult:
    """Gluing map ``α : ΛL02 ⊗ Λ^top K -> ΛL01 ⊗_Cl ΛL12`` and its ingredients."""

    alpha: np.ndarray
    tensor: TensorOverClifford
    composition: CompositionResult
    composed_frame: np.ndarray
    k_basis: np.ndarray
    generator: np.ndarray
    naive_image: np.ndarray
    bimodules: tuple = field(repr=False)

    @property
    def dim_K(self) -> int:
        return self.k_basis.shape[1]


def _vacuum_times(m01: BimoduleStructure, vectors) -> np.ndarray:
    """``Ω01·u_1⋯u_n`` for the columns ``u_i``."""
    x = m01.vacuum()
    for i in range(vectors.shape[1]):
        x = m01.right(vectors[:, i]) @ x
    return x


def glue_iso(l01: Lagrangian, l12: Lagrangian, tol: ToleranceConfig = DEFAULT_TOL,
             composed_frame=None, k_basis=None) -> GlueResult:
    """The gluing isomorphism as a dense matrix.

    Column ``S`` (Fock order of the ``L02`` frame) is
    ``T_{ℓ_{s1}} ⋯ T_{ℓ_{sk}} t`` with ``t = π(Ω01·u_1⋯u_n ⊗ Ω12)``.
    ``composed_frame`` and ``k_basis`` override the frames of ``L02`` and
    ``K``; they must span the same subspaces.
    """
    comp = compose(l01, l12, tol)
    m01, m12 = BimoduleStructure(l01), BimoduleStructure(l12)
    tensor = TensorOverClifford(m01, m12, tol)
    k = comp.K.frame if k_basis is None else np.asarray(k_basis, dtype=complex)
    f02 = comp.composed.frame if composed_frame is None else np.asarray(composed_frame, dtype=complex)
    om12 = m12.vacuum()
    t = tensor.project(np.kron(_vacuum_times(m01, k), om12))
    if np.linalg.norm(t) <= tol.residual_tol:
        raise GluingDegenerate(f"generator vanishes in the quotient (norm {np.linalg.norm(t):.2e})")
    alpha = hom_from_pfaffian(t, f02, tensor.module(), tol, check=False)
    naive = tensor.project(np.kron(m01.vacuum(), om12))
    return GlueResult(alpha, tensor, comp, f02, k, t, naive, (m01, m12))


def verify_glue(glue: GlueResult, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Residual report for a gluing map.

    Keys: ``sigma_min``/``sigma_max`` of ``α`` (bijectivity),
    ``intertwining`` (left and right outer actions, with the sign
    ``(-1)^{dim K}`` from moving a right generator past ``Λ^top K``),
    ``generator_annihilated`` (``conj(L02)`` kills the generator),
    ``subtop_vanishing`` (shorter products of ``K`` vanish), ``pfaffian_dim``
    and ``naive_norm``.
    """
    a = glue.alpha
    tensor = glue.tensor
    m01, m12 = glue.bimodules
    module = tensor.module()
    f02 = glue.composed_frame
    l02 = Lagrangian.relation(tensor.left_space, tensor.right_space, f02)
    m02 = BimoduleStructure(l02)
    n_k = glue.dim_K
    out = {}
    square = a.shape[0] == a.shape[1]
    s = np.linalg.svd(a, compute_uv=False) if a.size else np.ones(1)
    out["square"] = bool(square)
    out["sigma_min"] = float(s[-1]) if square else 0.0
    out["sigma_max"] = float(s[0])
    sign = -1.0 if n_k % 2 else 1.0
    resid = 0.0
    e0 = np.eye(tensor.left_space.dim)
    for i in range(e0.shape[0]):
        resid = max(resid, float(np.max(np.abs(a @ m02.left(e0[:, i]) - tensor.left(e0[:, i]) @ a))))
    e2 = np.eye(tensor.right_space.dim)
    for i in range(e2.shape[0]):
        resid = max(resid, float(np.max(np.abs(sign * a @ m02.right(e2[:, i]) - tensor.right(e2[:, i]) @ a))))
    out["intertwining"] = resid
    t = glue.generator
    fb = module.space.conj(f02)
    out["generator_annihilated"] = max(
        (float(np.linalg.norm(module.action(fb[:, i]) @ t)) for i in range(fb.shape[1])), default=0.0
    )
    om12 = m12.vacuum()
    k = glue.k_basis
    out["subtop_vanishing"] = max(
        (float(np.linalg.norm(tensor.project(np.kron(_vacuum_times(m01, k[:, :j]), om12)))) for j in range(n_k)),
        default=0.0,
    )
    out["pfaffian_dim"] = pfaffian_line(f02, module, tol).dim
    out["naive_norm"] = float(np.linalg.norm(glue.naive_image))
    out["generator_norm"] = float(np.linalg.norm(t))
    out["dim_K"] = n_k
    out["quotient_dim"] = tensor.dim
    out["expected_dim"] = tensor.expected_dim
    out["ok"] = bool(
        square
        and out["sigma_min"] > tol.rank_tol
        and resid <= tol.residual_tol * max(1.0, out["sigma_max"])
        and out["generator_annihilated"] <= tol.residual_tol
        and out["subtop_vanishing"] <= tol.residual_tol
        and out["pfaffian_dim"] == 1
    )
    return out


@dataclass
class KSpaces:
    """The four anomaly spaces of a triple chain and the compositions behind them."""

    K012: Subspace
    K123: Subspace
    K013: Subspace
    K023: Subspace
    complement_013: Subspace
    complement_123: Subspace
    inclusion_residuals: tuple
    compositions: dict = field(repr=False)

    @property
    def dims(self) -> dict:
        return {"K012": self.K012.dim, "K123": self.K123.dim, "K013": self.K013.dim, "K023": self.K023.dim}


def k_spaces(l01: Lagrangian, l12: Lagrangian, l23: Lagrangian, tol: ToleranceConfig = DEFAULT_TOL) -> KSpaces:
    """``K012 ⊂ K013`` in ``W1`` and ``K123 ⊂ K023`` in ``W2`` with complements.

    The complements are ``K012^⊥ ∩ K013`` and ``K123^⊥ ∩ K023``.
    """
    c012 = compose(l01, l12, tol)
    c123 = compose(l12, l23, tol)
    c013 = compose(l01, c123.composed, tol)
    c023 = compose(c012.composed, l23, tol)
    k012, k123, k013, k023 = c012.K, c123.K, c013.K, c023.K
    incl = (contains(k013, k012), contains(k023, k123))

    def perp_part(big, small, n):
        f = big.frame
        if small.dim:
            f = f - small.frame @ (small.frame.conj().T @ f)
        return orthonormalize(f, tol, rows=n, scale=1.0)

    a = perp_part(k013, k012, l12.source.dim)
    b = perp_part(k023, k123, l12.target.dim)
    comps = {"012": c012, "123": c123, "013": c013, "023": c023}
    return KSpaces(k012, k123, k013, k023, a, b, incl, comps)


@dataclass
class DevelopmentMap:
    """``ρ0 : K012^⊥∩K013 -> K123^⊥∩K023`` and its extension ``ρ``.

    ``rho`` is written in the source basis ``[U012, A, W123]`` of
    ``K013 + K123`` and the target basis ``[U012, Z]`` of ``K012 + K023``,
    where ``A``, ``Z``, ``U012``, ``W123`` are orthonormal.
    """

    rho0: np.ndarray
    rho0_adjoint: np.ndarray
    reduced: np.ndarray
    rho: np.ndarray
    det_factor: float
    det_factor_reduced: float
    graph_residual: float
    A: np.ndarray
    B: np.ndarray
    U012: np.ndarray
    W123: np.ndarray
    Z: np.ndarray
    kspaces: KSpaces = field(repr=False)

    @property
    def m(self) -> int:
        return self.A.shape[1]


def development_map(l01: Lagrangian, l12: Lagrangian, l23: Lagrangian, tol: ToleranceConfig = DEFAULT_TOL,
                    kspaces: KSpaces | None = None) -> DevelopmentMap:
    """Read ``ρ0`` off ``L12 ∩ (A + B)`` and extend it to ``ρ``."""
    ks = k_spaces(l01, l12, l23, tol) if kspaces is None else kspaces
    n1, n2 = l12.source.dim, l12.target.dim
    a, b = ks.complement_013.frame, ks.complement_123.frame
    m = a.shape[1]
    if b.shape[1] != m:
        raise NotAGraph(f"complements have dimensions {m} and {b.shape[1]}")
    blocks = np.zeros((n1 + n2, 2 * m), dtype=complex)
    blocks[:n1, :m] = a
    blocks[n1:, m:] = b
    rel = intersect(l12.space, Subspace(blocks, n1 + n2), tol)
    if rel.dim != m:
        raise NotAGraph(f"relation has dimension {rel.dim}, expected {m}")
    src = a.conj().T @ rel.frame[:n1]
    tgt = b.conj().T @ rel.frame[n1:]
    if m:
        s = np.linalg.svd(src, compute_uv=False)
        if s[-1] <= tol.rank_tol:
            raise NotAGraph("projection of the relation to the source is singular")
        reduced = np.linalg.solve(src.T, tgt.T).T
    else:
        reduced = np.zeros((0, 0), dtype=complex)
    rho0 = b @ reduced @ a.conj().T
    rho0_adj = a @ reduced.conj().T @ b.conj().T
    # graph of rho0 against the relation, as subspaces
    graph = orthonormalize(np.vstack([a, b @ reduced]), tol, rows=n1 + n2, scale=1.0)
    from .linalg import projection_residual

    graph_res = projection_residual(graph, rel) if m else 0.0

    u012, w123, z = ks.K012.frame, ks.K123.frame, ks.K023.frame
    l, p = u012.shape[1], w123.shape[1]
    rho = np.zeros((l + z.shape[1], l + m + p), dtype=complex)
    rho[:l, :l] = np.eye(l)
    rho[l:, l : l + m] = z.conj().T @ rho0 @ a
    rho[l:, l + m :] = z.conj().T @ w123
    if rho.shape[0] != rho.shape[1]:
        raise NotAGraph(f"extension is not square: {rho.shape}")
    det_full = float(np.real(np.linalg.det(rho.conj().T @ rho))) if rho.size else 1.0
    det_red = float(np.real(np.linalg.det(reduced.conj().T @ reduced))) if m else 1.0
    return DevelopmentMap(rho0, rho0_adj, reduced, rho, det_full, det_red, graph_res, a, b, u012, w123, z, ks)


def swap_check(l01: Lagrangian, l12: Lagrangian, l23: Lagrangian, tol: ToleranceConfig = DEFAULT_TOL,
               dev: DevelopmentMap | None = None) -> float:
    """Max of ``|ρ0^*(u)·Ω12 - Ω12·u|`` over an orthonormal basis ``u`` of ``K123^⊥∩K023``."""
    dev = development_map(l01, l12, l23, tol) if dev is None else dev
    m12 = BimoduleStructure(l12)
    om = m12.vacuum()
    worst = 0.0
    for j in range(dev.m):
        u = dev.B[:, j]
        lhs = m12.left(dev.rho0_adjoint @ u) @ om
        rhs = m12.right(u) @ om
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


@dataclass
class SwapDiagnostics:
    """Vacuum swap for ``ρ0`` checked on the module and on the relation.

    ``module_residual`` is the Fock side ``|ρ0^*(u)·Ω12 - Ω12·u|``;
    ``relation_residual`` is the distance of ``(conj ρ0^*u, conj u)`` from
    ``L12``, which is zero exactly when the swap holds.  The swap is
    expected when ``conj(L12) ∩ (A + B)`` has dimension ``m``, i.e. when the
    projection of ``L12`` onto ``A + B`` is the graph of ``ρ0`` itself.
    """

    module_residual: float
    relation_residual: float
    conj_relation_dim: int
    m: int

    @property
    def hypothesis_holds(self) -> bool:
        return self.conj_relation_dim == self.m


def swap_diagnostics(l01: Lagrangian, l12: Lagrangian, l23: Lagrangian, tol: ToleranceConfig = DEFAULT_TOL,
                     dev: DevelopmentMap | None = None) -> SwapDiagnostics:
    dev = development_map(l01, l12, l23, tol) if dev is None else dev
    w1, w2 = l12.source, l12.target
    n1, n2 = w1.dim, w2.dim
    module_res = swap_check(l01, l12, l23, tol, dev=dev)
    rel_res = 0.0
    frame = l12.space.frame
    for j in range(dev.m):
        u = dev.B[:, j : j + 1]
        v = np.vstack([w1.conj(dev.rho0_adjoint @ u), w2.conj(u)])
        v = v / np.linalg.norm(v)
        rel_res = max(rel_res, float(np.linalg.norm(v - frame @ (frame.conj().T @ v))))
    blocks = np.zeros((n1 + n2, 2 * dev.m), dtype=complex)
    blocks[:n1, : dev.m] = dev.A
    blocks[n1:, dev.m :] = dev.B
    conj_frame = np.vstack([w1.conj(frame[:n1]), w2.conj(frame[n1:])])
    conj_l12 = orthonormalize(conj_frame, tol, rows=n1 + n2, scale=1.0)
    dim = intersect(conj_l12, Subspace(blocks, n1 + n2), tol).dim if dev.m else 0
    return SwapDiagnostics(module_res, rel_res, dim, dev.m)


def _lagrangian_or_raise(res: CompositionResult, name: str, tol: ToleranceConfig):
    if res.lagrangian_residual > tol.residual_tol or not res.dim_consistent:
        raise CompositionNotLagrangian(
            f"composition {name} is not Lagrangian (residual {res.lagrangian_residual:.2e})"
        )


def _project_pair(tensor_a: TensorOverClifford, inner: TensorOverClifford, x: np.ndarray) -> np.ndarray:
    """Map vectors of ``ΛL01 ⊗ ΛL12 ⊗ ΛL23`` to the iterated quotient.

    ``inner`` is the quotient of the first two factors and ``tensor_a`` the
    quotient of ``inner`` with the third; columns of ``x`` are processed
    independently.
    """
    d_outer = tensor_a.factors[1].dim
    cols = x.shape[1]
    y = x.reshape(inner.ambient_dim, d_outer, cols)
    y = np.einsum("ia,ajc->ijc", inner.frame.conj().T, y).reshape(inner.dim * d_outer, cols)
    return tensor_a.frame.conj().T @ y


@dataclass
class CoherenceReport:
    path_difference: float
    det_factor: float
    negative_control: float
    det_rho_coefficient: complex
    path_norm: float
    well_defined_residual: float
    kspace_dims: dict
    model_dim: int
    largest_tensor: int
    super_sign: int
    swap_residual: float
    paths: tuple = field(repr=False, default=())
    development: DevelopmentMap | None = field(repr=False, default=None)

    @property
    def negative_control_triggered(self) -> bool:
        return abs(self.det_factor - 1.0) <= 1e-6 or self.negative_control >= abs(self.det_factor - 1.0) * self.path_norm / 2


def coherence_check(l01: Lagrangian, l12: Lagrangian, l23: Lagrangian, tol: ToleranceConfig = DEFAULT_TOL,
                    keep_paths=False) -> CoherenceReport:
    """Compare the two ways of gluing three relations in a common model.

    The model is the iterated quotient ``(ΛL01 ⊗_Cl ΛL12) ⊗_Cl ΛL23``; the
    path through ``α013`` and ``α123`` reaches it from the plain triple
    tensor product, which is well defined because both relation spaces are
    killed.  The source of both paths is ``ΛL03`` with the top form
    ``U012 ∧ A ∧ W123`` of ``K013 + K123``.
    """
    dev = development_map(l01, l12, l23, tol)
    ks = dev.kspaces
    for name, res in ks.compositions.items():
        _lagrangian_or_raise(res, name, tol)
    c012, c123, c013, c023 = (ks.compositions[k] for k in ("012", "123", "013", "023"))
    l02, l13 = c012.composed, c123.composed
    f03 = c013.composed.frame
    u012, a, w123, z = dev.U012, dev.A, dev.W123, dev.Z
    l = u012.shape[1]

    g012 = glue_iso(l01, l12, tol, k_basis=u012)
    g123 = glue_iso(l12, l23, tol, k_basis=w123)
    g013 = glue_iso(l01, l13, tol, composed_frame=f03, k_basis=np.hstack([u012, a]))
    g023 = glue_iso(l02, l23, tol, composed_frame=f03, k_basis=z)
    m01, m12 = g012.bimodules
    m23 = g123.bimodules[1]
    q012, q123 = g012.tensor, g123.tensor
    model = TensorOverClifford(q012, m23, tol)
    d01, d12, d23 = m01.dim, m12.dim, m23.dim

    # path through alpha_013 then alpha_123, lifted to the triple product
    lift123 = q123.frame @ g123.alpha
    lifted = np.kron(np.eye(d01), lift123) @ (g013.tensor.frame @ g013.alpha)
    path_a = _project_pair(model, q012, lifted)

    # path through alpha_023 then alpha_012; moving Λ^top K012 past ΛL23
    # costs Γ23^l, and reordering the top forms costs (-1)^{l dim K023}
    n023 = z.shape[1]
    sign = -1.0 if (l * n023) % 2 else 1.0
    twist = np.linalg.matrix_power(m23.parity, l)
    left_b = np.kron(g012.alpha, twist)
    path_b = sign * (model.frame.conj().T @ (left_b @ (g023.tensor.frame @ g023.alpha)))

    coeff = np.linalg.det(z.conj().T @ np.hstack([dev.rho0 @ a, w123])) if n023 else 1.0
    det = dev.det_factor
    diff = float(np.max(np.abs(coeff * path_b / det - path_a)))
    neg = float(np.max(np.abs(coeff * path_b - path_a)))
    norm = float(np.max(np.abs(path_a)))

    # both lifts must kill the relations of the quotient they start from
    wd = 0.0
    rel013 = g013.tensor.relations.frame
    if rel013.shape[1]:
        wd = max(wd, float(np.max(np.abs(_project_pair(model, q012, np.kron(np.eye(d01), lift123) @ rel013)))))
    rel023 = g023.tensor.relations.frame
    if rel023.shape[1]:
        wd = max(wd, float(np.max(np.abs(model.frame.conj().T @ (left_b @ rel023)))))
    # the triple-product relations of the second slot must die in the model as well
    q123_rel = q123.relations.frame
    if q123_rel.shape[1]:
        wd = max(wd, float(np.max(np.abs(_project_pair(model, q012, np.kron(np.eye(d01), q123_rel))))))

    largest = max(d01 * d12 * d23, d01 * m12.dim, model.ambient_dim, g013.tensor.ambient_dim, g023.tensor.ambient_dim)
    return CoherenceReport(
        path_difference=diff,
        det_factor=det,
        negative_control=neg,
        det_rho_coefficient=complex(coeff),
        path_norm=norm,
        well_defined_residual=wd,
        kspace_dims=ks.dims,
        model_dim=model.dim,
        largest_tensor=int(largest),
        super_sign=int(sign),
        swap_residual=swap_check(l01, l12, l23, tol, dev=dev),
        paths=(path_a, path_b) if keep_paths else (),
        development=dev,
    )
