import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lotstab.convexfun import MaxAffinePotential, SampledFunction1D
from lotstab.crofton import (GridFunction2D, calibrate_vector_constant, crofton_boundary,
                             fubini_area, gn_check_1d, gn_check_nd, integral_identity_check,
                             l2_distance_1d, line_restriction, sample_lines)
from lotstab.errors import BoundingMismatch, NoIntersection, NotConvex, NotConvexAlongLine
from lotstab.geometry import Ball, Box, Segment, random_convex_polygon, unit_disk, unit_square
from lotstab.verify import gn_sharpness_pair, random_convex_pl

SQ = unit_square()


def test_sample_lines_validation_and_measure():
    L = sample_lines(100, 2.0, seed=1)
    assert len(L) == 100 and L.total_measure == pytest.approx(8 * math.pi)
    assert L.weight * len(L) == pytest.approx(L.total_measure)
    assert np.allclose(np.linalg.norm(L.directions, axis=1), 1.0)
    assert sample_lines(50, 1.0, stratified=True).directions.shape == (49, 2)
    with pytest.raises(ValueError):
        sample_lines(0, 1.0)
    with pytest.raises(ValueError):
        sample_lines(5, 0.0)
    with pytest.raises(BoundingMismatch):
        crofton_boundary(SQ, sample_lines(10, 0.5, center=(0.5, 0.5)))


def test_sampling_is_seeded():
    a, b = sample_lines(1000, 1.0, seed=4), sample_lines(1000, 1.0, seed=4)
    assert np.array_equal(a.directions, b.directions) and np.array_equal(a.offsets, b.offsets)


@pytest.mark.parametrize("body, exact", [
    (Box([0.0, 0.0], [1.0, 1.0]), 4.0),
    (Ball([0.5, 0.5], 0.5), math.pi),
    (Segment([0.2, 0.3], [0.8, 0.6]), 2 * math.hypot(0.6, 0.3)),
])
def test_crofton_boundary_within_error_bars(body, exact):
    est, se = crofton_boundary(body, sample_lines(200_000, 0.75, seed=2, center=(0.5, 0.5)), return_stderr=True)
    assert abs(est - exact) <= 4 * se


def test_crofton_rigid_motion_invariance():
    P = random_convex_polygon(np.random.default_rng(0), 6, radius=0.4, center=(0.0, 0.0))
    L = sample_lines(100_000, 1.0, seed=5)
    c = math.cos(0.7), math.sin(0.7)
    Q = np.array([[c[0], -c[1]], [c[1], c[0]]])
    moved = type(P)(P.vertices @ Q.T + [0.1, -0.2])
    a = crofton_boundary(P, L)
    b = crofton_boundary(moved, L.transformed(Q, [0.1, -0.2]))
    assert a == pytest.approx(b, rel=1e-12)


def test_fubini_area():
    for e in ([1.0, 0.0], [1.0, 1.0], [0.3, -0.8]):
        assert fubini_area(SQ, e, 4000, 0.75, (0.5, 0.5)) == pytest.approx(1.0, rel=1e-3)
    assert fubini_area(unit_disk(), [0.0, 1.0], 4000, 1.0) == pytest.approx(math.pi, rel=1e-4)


def test_integral_identities():
    L = sample_lines(40_000, 0.75, seed=3, center=(0.5, 0.5), stratified=True)
    d, l = integral_identity_check(lambda P: 1 + P[:, 0] * P[:, 1], SQ, L, n=128)
    assert l == pytest.approx(d, rel=0.01)
    d, l = integral_identity_check(lambda P: np.stack([P[:, 1], 1 - P[:, 0]], axis=1), SQ, L, n=128)
    assert l == pytest.approx(d, rel=0.01)
    assert calibrate_vector_constant(L, n=128) == pytest.approx(1 / math.pi, rel=0.01)


def test_line_restriction():
    f = lambda P: P[:, 0] + 2 * P[:, 1]
    g = line_restriction(f, ([0.0, 0.5], [1.0, 0.0]), SQ, 0.1)
    assert g.interval == pytest.approx((0.0, 1.0))
    assert g.slopes == pytest.approx(np.ones(10))
    with pytest.raises(NoIntersection):
        line_restriction(f, ([0.0, 2.0], [1.0, 0.0]), SQ, 0.1)


def test_l2_distance_exact():
    u = SampledFunction1D([0.0, 1.0], [0.0, 1.0])
    v = SampledFunction1D([0.0, 0.5, 1.0], [0.0, 0.0, 0.0])
    assert l2_distance_1d(u, v) == pytest.approx(1 / math.sqrt(3), rel=1e-14)


@settings(max_examples=100)
@given(st.integers(0, 100_000))
def test_gn_1d_holds_on_random_pairs(seed):
    rng = np.random.default_rng(seed)
    u, v = random_convex_pl(rng), random_convex_pl(rng)
    lhs, rhs = gn_check_1d(u, v)
    assert lhs <= rhs * (1 + 1e-9)


def test_gn_1d_sharpness_closed_form():
    for L in (0.5, 1.0, 2.0):
        for eps in (0.05, 0.1):
            u, v = gn_sharpness_pair(L, eps)
            lhs, _ = gn_check_1d(u, v)
            assert lhs == pytest.approx(2 * L * eps, abs=1e-12)
            assert l2_distance_1d(u, v) ** 2 == pytest.approx(2 / 3 * eps ** 3 / L, abs=1e-12)


def test_gn_1d_rejects_nonconvex():
    with pytest.raises(NotConvex):
        gn_check_1d(SampledFunction1D([0, 1, 2], [0, 1, 1]), SampledFunction1D([0, 2], [0, 0]))


def test_gn_nd_lines_agree_with_grid():
    rng = np.random.default_rng(0)
    u = MaxAffinePotential(rng.random((6, 2)), rng.random(6) * 0.2, SQ)
    v = MaxAffinePotential(rng.random((6, 2)), rng.random(6) * 0.2, SQ)
    L = sample_lines(4096, 0.75, seed=1, center=(0.5, 0.5), stratified=True)
    r = gn_check_nd(u, v, SQ, L)
    assert r.lhs <= r.rhs and r.lhs_lines <= r.rhs_lines
    assert r.lhs_lines == pytest.approx(r.lhs, rel=0.03)
    assert r.boundary == pytest.approx(4.0)


def test_gn_nd_detects_nonconvex_line():
    box = Box([0.0, 0.0], [1.0, 1.0])
    u = GridFunction2D.from_callable(box, 64, lambda P: -((P[:, 0] - 0.5) ** 2))
    v = GridFunction2D.from_callable(box, 64, lambda P: P[:, 0] ** 2)
    with pytest.raises(NotConvexAlongLine) as info:
        gn_check_nd(u, v, box, sample_lines(64, 0.75, seed=0, center=(0.5, 0.5)), n=64)
    assert info.value.line is not None


def test_grid_function_interpolates_affine_exactly():
    box = Box([0.0, 0.0], [1.0, 1.0])
    g = GridFunction2D.from_callable(box, 32, lambda P: 3 * P[:, 0] - P[:, 1])
    P = np.random.default_rng(0).random((50, 2))
    assert g(P) == pytest.approx(3 * P[:, 0] - P[:, 1], abs=1e-12)
    assert g.grid_gradient() == pytest.approx(np.tile([3.0, -1.0], (32 * 32, 1)), abs=1e-10)
