import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anomaly.linalg import (
    Subspace,
    ToleranceConfig,
    complement,
    contains,
    intersect,
    kernel,
    orthonormalize,
    principal_angles,
    projection_residual,
    subspace_sum,
    subspaces_equal,
)
from conftest import cvec


def e(n, *idx):
    return np.eye(n)[:, list(idx)]


def test_dependent_columns_give_a_line():
    s = orthonormalize(np.array([[1.0, 2.0], [0.0, 0.0]]))
    assert s.dim == 1
    assert subspaces_equal(s, Subspace(e(2, 0)))


def test_identity_spans_everything():
    assert orthonormalize(np.eye(3)).dim == 3


def test_random_full_rank_frame_is_orthonormal(rng):
    s = orthonormalize(cvec(rng, 4, 2))
    assert s.dim == 2
    assert s.frame_residual() <= 1e-12


def test_intersections_of_coordinate_spans():
    s = Subspace(e(3, 0, 1))
    assert subspaces_equal(intersect(s, s), s)
    assert intersect(Subspace(e(3, 0)), Subspace(e(3, 1))).dim == 0
    got = intersect(Subspace(e(3, 0, 1)), Subspace(e(3, 1, 2)))
    assert subspaces_equal(got, Subspace(e(3, 1)))


def test_sum_and_kernel():
    assert subspaces_equal(subspace_sum(Subspace(e(3, 0)), Subspace(e(3, 1))), Subspace(e(3, 0, 1)))
    assert kernel(np.zeros((2, 4))).dim == 4


def test_principal_angle_of_diagonal_line():
    ang = principal_angles(Subspace(e(2, 0)), Subspace(np.array([[1.0], [1.0]]) / np.sqrt(2)))
    assert ang == pytest.approx([np.pi / 4])


def test_tolerance_config_rejects_nonsense():
    with pytest.raises(ValueError):
        ToleranceConfig(rank_tol=0.0)
    with pytest.raises(ValueError):
        ToleranceConfig(residual_tol=2.0)


def test_rank_cutoff_is_relative(rng):
    # a tiny second direction is dropped, a moderate one is kept
    v = np.array([[1.0, 0.0], [0.0, 1e-12]])
    assert orthonormalize(v).dim == 1
    assert orthonormalize(np.array([[1.0, 0.0], [0.0, 1e-6]])).dim == 2


@given(seed=st.integers(0, 2**31), n=st.integers(2, 7), a=st.integers(1, 4), b=st.integers(1, 4))
def test_dimension_formula(seed, n, a, b):
    rng = np.random.default_rng(seed)
    s1 = orthonormalize(cvec(rng, n, min(a, n)))
    s2 = orthonormalize(cvec(rng, n, min(b, n)))
    assert s1.dim + s2.dim == subspace_sum(s1, s2).dim + intersect(s1, s2).dim


@given(seed=st.integers(0, 2**31), n=st.integers(2, 7), k=st.integers(0, 7))
def test_complement_is_orthogonal_and_complementary(seed, n, k):
    rng = np.random.default_rng(seed)
    s = orthonormalize(cvec(rng, n, min(k, n)), rows=n)
    c = complement(s)
    assert s.dim + c.dim == n
    if s.dim and c.dim:
        assert np.max(np.abs(s.frame.conj().T @ c.frame)) <= 1e-12


@given(seed=st.integers(0, 2**31), n=st.integers(3, 7))
def test_intersection_lies_in_both(seed, n):
    rng = np.random.default_rng(seed)
    common = cvec(rng, n, 1)
    s1 = orthonormalize(np.hstack([common, cvec(rng, n, 1)]))
    s2 = orthonormalize(np.hstack([common, cvec(rng, n, 1)]))
    i = intersect(s1, s2)
    assert i.dim == 1
    assert contains(s1, i) <= 1e-10 and contains(s2, i) <= 1e-10


@given(seed=st.integers(0, 2**31), n=st.integers(2, 6))
def test_equality_ignores_the_choice_of_frame(seed, n):
    rng = np.random.default_rng(seed)
    s = orthonormalize(cvec(rng, n, n // 2))
    q, _ = np.linalg.qr(cvec(rng, s.dim, s.dim))
    assert projection_residual(s, Subspace(s.frame @ q)) <= 1e-12
