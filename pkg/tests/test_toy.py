import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anomaly.lagrangian import is_lagrangian
from anomaly.rspace import RSpace
from anomaly.toy import (
    Circle,
    CutMismatch,
    Edge,
    InvalidTransfer,
    PointObject,
    ToyBordism,
    boundary_lagrangian,
    circle_first_cut,
    circle_sections,
    circle_three_pieces,
    closed_double,
    cobordism_transversality_check,
    glue_bordisms,
    interval_and_circle,
    interval_chain,
    object_space,
    point_space,
    random_bordism_pair,
    random_cap,
    random_transfer,
    reverse_bordism,
    spinor_conj_matrix,
    tau,
    toy_coherence,
    two_circles,
    _restriction,
)

MINUS_PLUS = (PointObject(1, -1), PointObject(1, 1))


def test_point_space():
    for r in (1, 2, 3):
        w = point_space(PointObject(r))
        assert w.dim == 2 * r
        c = spinor_conj_matrix(r)
        assert np.allclose(c @ c.conj(), np.eye(2 * r))
        assert isinstance(w, RSpace)
    assert object_space(()).dim == 0
    assert object_space(MINUS_PLUS).dim == 4


def test_point_validation():
    with pytest.raises(ValueError):
        PointObject(0)
    with pytest.raises(ValueError):
        PointObject(1, 2)


def test_bordism_validation():
    p = (PointObject(1, 1),)
    with pytest.raises(InvalidTransfer):
        ToyBordism(p, p, [Edge(("in", 0), ("out", 0), np.array([[2.0]]))])
    with pytest.raises(InvalidTransfer):
        # an edge may not start at an incoming point of sign -
        q = (PointObject(1, -1),)
        ToyBordism(q, q, [Edge(("in", 0), ("out", 0), np.eye(1))])
    with pytest.raises(ValueError):
        ToyBordism(p, p, [])
    with pytest.raises(ValueError):
        ToyBordism(p, p, [Edge(("in", 0), ("out", 0), np.eye(1), sites=0)])


def test_gluing_rejects_mismatched_cut():
    x0 = ToyBordism((), MINUS_PLUS, [Edge(("out", 0), ("out", 1), np.eye(1))])
    x1 = ToyBordism((PointObject(2, -1), PointObject(2, 1)), (), [Edge(("in", 1), ("in", 0), np.eye(2))])
    with pytest.raises(CutMismatch):
        glue_bordisms(x0, x1)


def test_cap_and_cup_close_into_a_circle(rng):
    x0, x1, _ = circle_first_cut(1, rng)
    g = glue_bordisms(x0, x1)
    assert g.is_closed and len(g.circles) == 1
    c = g.circles[0]
    assert c.sites == x0.edges[0].sites + x1.edges[0].sites
    assert [cr[:2] for cr in c.crossings] == [("Z", 0), ("Z", 1)]


def test_tau_normalization_for_a_circle_crossing_twice(rng):
    # trivial holonomy: the 2r sections restrict to two unitary copies of a vector of squared norm 1/N
    for r in (1, 2):
        x0, x1, _ = circle_first_cut(r, rng)
        t = tau(x0, x1)
        n = t.new_circles[0].sites
        assert t.gram_det == pytest.approx((2 / n) ** (2 * r), rel=1e-12)
        assert t.kernel_residual <= 1e-12
        assert t.functoriality_residual <= 1e-12


def test_restriction_of_a_circle_crossing_three_times(rng):
    n = 7
    u, v = random_transfer(1, rng), random_transfer(1, rng)
    c = Circle(np.eye(1), n, (("Z", 0, np.eye(1)), ("Z", 1, u), ("Z", 2, v)))
    pts = (PointObject(1),) * 3
    b = circle_sections(c)
    rz = _restriction([c], [b], "Z", pts)
    assert rz.shape == (6, 2)
    assert np.linalg.det(rz.conj().T @ rz).real == pytest.approx((3 / n) ** 2, rel=1e-12)


def test_partial_holonomy_fixes_fewer_sections(rng):
    x0, x1, _ = circle_first_cut(2, rng, fixed_dim=1)
    t = tau(x0, x1)
    assert t.kernel_residual <= 1e-12
    # one fixed direction of u gives two real-structure-paired sections
    assert len(t.new_circles) == 1
    assert circle_sections(t.new_circles[0]).shape[1] == 2


def test_interval_glue_has_no_anomaly(rng):
    x0, x1, _ = interval_chain(1, rng)
    t = tau(x0, x1)
    assert not t.new_circles
    assert t.factor == pytest.approx(1.0)
    assert t.functoriality_residual <= 1e-12


def test_reverse_twice_is_identity(rng):
    x = random_cap(1, 2, rng)
    rr = reverse_bordism(reverse_bordism(x))
    assert rr.source == x.source and rr.target == x.target
    for e, f in zip(x.edges, rr.edges):
        assert e.start == f.start and e.end == f.end
        assert np.allclose(e.transfer, f.transfer)


@pytest.mark.parametrize(
    "builder",
    [
        lambda rng: circle_three_pieces(1, rng),
        lambda rng: two_circles(1, rng),
        lambda rng: circle_first_cut(1, rng),
        lambda rng: interval_chain(1, rng),
        lambda rng: interval_and_circle(rng),
        lambda rng: circle_three_pieces(1, rng, fixed_dim=0),
    ],
    ids=["three_pieces", "two_circles", "first_cut", "interval", "interval_and_circle", "no_sections"],
)
def test_toy_coherence_families(builder, rng):
    rep = toy_coherence(*builder(rng))
    assert rep.path_difference <= 1e-8 * max(1.0, rep.path_norm)
    assert rep.kernel_residual <= 1e-10
    if abs(rep.dropped_det - 1) > 1e-6:
        assert rep.negative_control >= 1e-4 * rep.path_norm


def test_toy_coherence_rejects_glued_pieces(rng):
    x0, x1, x2 = circle_three_pieces(1, rng)
    with pytest.raises(CutMismatch):
        toy_coherence(glue_bordisms(x0, x1, "Y1"), ToyBordism(x1.target, x1.target, [
            Edge(("in", 1), ("out", 1), np.eye(1)), Edge(("out", 0), ("in", 0), np.eye(1))]), x2)


@settings(max_examples=15)
@given(seed=st.integers(0, 2**31))
def test_random_pairs_are_functorial(seed):
    rng = np.random.default_rng(seed)
    x0, x1 = random_bordism_pair(1, rng, max_total=8)
    for x in (x0, x1):
        lag = boundary_lagrangian(x)
        assert is_lagrangian(lag.ambient, lag.space)
    t = tau(x0, x1)
    assert t.functoriality_residual <= 1e-10
    assert t.kernel_residual <= 1e-10
    assert t.gram_det > 0


@settings(max_examples=15)
@given(seed=st.integers(0, 2**31), pairs=st.integers(1, 3))
def test_closed_double_transversality(seed, pairs):
    rng = np.random.default_rng(seed)
    x0, x1 = closed_double(random_cap(1, pairs, rng))
    r = cobordism_transversality_check(x0, x1)
    # every cap meets its reverse in a circle with trivial holonomy
    assert r["dim_K"] == r["dim_intersection"] == 2 * pairs
    assert r["intersection_residual"] <= 1e-10 and r["sum_residual"] <= 1e-10
    assert r["dim_sum"] == r["ambient_dim"] - r["dim_K"]


@settings(max_examples=15)
@given(seed=st.integers(0, 2**31), pairs=st.integers(1, 3))
def test_mixed_caps_transversality(seed, pairs):
    rng = np.random.default_rng(seed)
    a = random_cap(1, pairs, rng)
    signs = [p.sign for p in a.target]
    b = reverse_bordism(random_cap(1, pairs, rng, signs=signs))
    r = cobordism_transversality_check(a, b)
    assert r["intersection_residual"] <= 1e-10 and r["sum_residual"] <= 1e-10
    assert r["dim_intersection"] == r["dim_K"]
