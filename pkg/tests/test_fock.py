import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anomaly.fock import (
    BimoduleStructure,
    CliffordAlgebra,
    FockModule,
    NotInPfaffianLine,
    car_operators,
    exterior_power_matrix,
    fock_basis,
    hom_from_pfaffian,
    opposite_algebra_residual,
    pfaffian_line,
)
from anomaly.lagrangian import Lagrangian
from anomaly.linalg import Subspace
from anomaly.rspace import RSpace, bilinear_form
from anomaly.sampling import random_lagrangian, random_relation, random_rspace

PLANE = RSpace.standard(2)
ISO = np.array([[1.0], [1j]]) / np.sqrt(2)


def test_basis_order():
    assert fock_basis(2)[0] == (0, 1, 2, 3)
    assert fock_basis(3)[0] == (0, 1, 2, 4, 3, 5, 6, 7)
    assert fock_basis(0)[0] == (0,)


def test_plane_action_by_hand():
    mod = FockModule(Lagrangian(PLANE, Subspace(ISO)))
    l, lbar = ISO[:, 0], ISO[:, 0].conj()
    assert np.allclose(mod.action(l), [[0, 0], [1, 0]])
    assert np.allclose(mod.action(lbar), [[0, 1], [0, 0]])
    assert bilinear_form(PLANE, l, lbar) == pytest.approx(1.0)
    # the anticommutator carries no factor of two, so e1 squares to b(e1, e1)/2
    e1 = mod.action(np.array([1.0, 0.0]))
    assert np.allclose(e1 @ e1, 0.5 * np.eye(2))


def test_action_rejects_wrong_shape():
    mod = FockModule(Lagrangian(PLANE, Subspace(ISO)))
    with pytest.raises(ValueError):
        mod.action(np.zeros(3))


def test_vacuum_spans_the_pfaffian_line_of_its_own_lagrangian(rng):
    w = random_rspace(6, rng)
    lag = random_lagrangian(w, rng)
    mod = FockModule(lag)
    line = pfaffian_line(lag.frame, mod)
    assert line.dim == 1
    assert abs(abs(np.vdot(line.frame[:, 0], mod.vacuum())) - 1) <= 1e-12


def test_hom_from_pfaffian_rejects_non_annihilated_vectors(rng):
    w = random_rspace(4, rng)
    l1, l2 = random_lagrangian(w, rng), random_lagrangian(w, rng)
    tgt = FockModule(l2)
    with pytest.raises(NotInPfaffianLine):
        hom_from_pfaffian(np.ones(tgt.dim), l1.frame, tgt)


def test_faithful_representation():
    for n in (2, 4):
        assert CliffordAlgebra(RSpace.standard(n)).faithfulness_rank() == 4 ** (n // 2)


def test_exterior_power_is_multiplicative(rng):
    u = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    v = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert np.allclose(exterior_power_matrix(np.eye(3)), np.eye(8))
    assert np.allclose(exterior_power_matrix(u @ v), exterior_power_matrix(u) @ exterior_power_matrix(v))
    assert exterior_power_matrix(u)[-1, -1] == pytest.approx(np.linalg.det(u))


def test_car_relations(rng):
    for v_dim in (1, 2, 4):
        a, a_star, mod = car_operators(v_dim)
        v = rng.normal(size=v_dim) + 1j * rng.normal(size=v_dim)
        w = rng.normal(size=v_dim) + 1j * rng.normal(size=v_dim)
        eye = np.eye(mod.dim)
        assert np.allclose(a(v) @ a(w) + a(w) @ a(v), 0, atol=1e-12)
        assert np.allclose(a_star(v) @ a_star(w) + a_star(w) @ a_star(v), 0, atol=1e-12)
        assert np.allclose(a(v) @ a_star(w) + a_star(w) @ a(v), np.vdot(w, v) * eye, atol=1e-12)
        # a is linear and a_star antilinear
        assert np.allclose(a(1j * v), 1j * a(v))
        assert np.allclose(a_star(1j * v), -1j * a_star(v))


def test_opposite_algebra(rng):
    for n in (2, 4):
        assert opposite_algebra_residual(random_rspace(n, rng), rng, n_words=4) <= 1e-9


def _space_and_lagrangian(seed, max_half=4):
    rng = np.random.default_rng(seed)
    n = 2 * int(rng.integers(1, max_half + 1))
    w = random_rspace(n, rng)
    return rng, w, random_lagrangian(w, rng)


@given(seed=st.integers(0, 2**31))
def test_clifford_relation(seed):
    rng, w, lag = _space_and_lagrangian(seed)
    vecs = rng.normal(size=(w.dim, 3)) + 1j * rng.normal(size=(w.dim, 3))
    assert FockModule(lag).clifford_residual(np.hstack([vecs, np.eye(w.dim)])) <= 1e-12


@given(seed=st.integers(0, 2**31))
def test_pfaffian_lines_are_lines_and_give_module_maps(seed):
    rng, w, lag = _space_and_lagrangian(seed, 3)
    src = FockModule(lag)
    tgt = FockModule(random_lagrangian(w, rng))
    line = pfaffian_line(lag.frame, tgt)
    assert line.dim == 1
    phi = hom_from_pfaffian(line.frame[:, 0], lag.frame, tgt)
    for _ in range(3):
        v = rng.normal(size=w.dim) + 1j * rng.normal(size=w.dim)
        assert np.max(np.abs(phi @ src.action(v) - tgt.action(v) @ phi)) <= 1e-10
    # a nonzero map between irreducible modules is invertible
    assert np.linalg.matrix_rank(phi, tol=1e-8) == tgt.dim


@given(seed=st.integers(0, 2**31))
def test_bimodule_actions_commute_and_vacuum_swaps(seed):
    rng = np.random.default_rng(seed)
    n0 = int(rng.integers(0, 4))
    n1 = n0 % 2 + 2 * int(rng.integers(0 if n0 % 2 else 1, 3))
    w0, w1 = random_rspace(n0, rng), random_rspace(n1, rng)
    rel = random_relation(w0, w1, rng)
    bim = BimoduleStructure(rel)
    a0 = rng.normal(size=n0) + 1j * rng.normal(size=n0)
    a1 = rng.normal(size=n1) + 1j * rng.normal(size=n1)
    assert np.max(np.abs(bim.left(a0) @ bim.right(a1) - bim.right(a1) @ bim.left(a0))) <= 1e-12
    om = bim.vacuum()
    for j in range(rel.dim):
        x, y = rel.frame[:n0, j], rel.frame[n0:, j]
        assert np.max(np.abs(bim.left(w0.conj(x)) @ om - bim.right(w1.conj(y)) @ om)) <= 1e-12


def test_number_operator_in_one_mode():
    a, a_star, _ = car_operators(1)
    n_op = a_star(np.ones(1)) @ a(np.ones(1))
    assert np.allclose(n_op, n_op.conj().T)
    assert np.allclose(np.linalg.eigvalsh(n_op), [0.0, 1.0])
