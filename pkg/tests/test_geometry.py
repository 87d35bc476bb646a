import math

import numpy as np
import pytest
import shapely.geometry as sg
from hypothesis import given, strategies as st

from lotstab.errors import EmptyErosion, InvalidDomain
from lotstab.geometry import (Ball, Box, Interval, Polygon, Rounded, Segment, dilate,
                              dilation_slice_volume, domain_from_spec, erode, erosion_slice_volume,
                              erosion_volume_bound, radial_function, radii, random_convex_polygon,
                              unit_disk, unit_square)


def test_erode_examples():
    I = erode(Interval(0.0, 1.0), 0.1)
    assert (I.a, I.b) == pytest.approx((0.1, 0.9))
    S = erode(unit_square(), 0.25)
    assert S.volume == pytest.approx(0.25)
    assert np.allclose(S.bounds[0], [0.25, 0.25]) and np.allclose(S.bounds[1], [0.75, 0.75])
    D = erode(unit_disk(), 0.3)
    assert isinstance(D, Ball) and D.radius == pytest.approx(0.7)


def test_erode_beyond_inradius():
    with pytest.raises(EmptyErosion):
        erode(unit_square(), 0.5)
    with pytest.raises(EmptyErosion):
        erode(Interval(0.0, 1.0), 0.6)


def test_dilate_examples():
    I = dilate(Interval(0.0, 1.0), 0.1)
    assert (I.a, I.b) == pytest.approx((-0.1, 1.1))
    assert dilate(unit_square(), 0.1).volume == pytest.approx(1 + 0.4 + math.pi * 0.01, abs=1e-12)
    D = dilate(unit_disk(), 0.5)
    assert D.radius == pytest.approx(1.5)


def test_radii_and_radial():
    assert radii(unit_disk()) == pytest.approx((1.0, 1.0))
    assert radii(unit_square()) == pytest.approx((0.5, math.sqrt(0.5)))
    assert radii(Interval(0.0, 1.0, 0.25)) == pytest.approx((0.25, 0.75))
    assert radial_function(unit_disk(), [0.6, 0.8]) == pytest.approx(1.0)
    assert radial_function(unit_square(), [1.0, 0.0]) == pytest.approx(0.5)
    assert radial_function(unit_square(), [math.sqrt(0.5)] * 2) == pytest.approx(math.sqrt(0.5))


def test_slice_bound_examples():
    assert erosion_volume_bound(unit_disk(), 0.1) == pytest.approx(4 * math.pi * 0.1)
    assert erosion_slice_volume(unit_disk(), 0.1) == pytest.approx(math.pi * (0.2 - 0.01))
    assert erosion_volume_bound(unit_disk(), 0.0) == 0.0 and erosion_slice_volume(unit_disk(), 0.0) == 0.0
    I = Interval(0.0, 1.0, 0.5)
    assert erosion_volume_bound(I, 0.2) == pytest.approx(0.4)
    assert erosion_slice_volume(I, 0.2) == pytest.approx(0.4)


def test_invalid_domains():
    with pytest.raises(InvalidDomain):
        Interval(1.0, 0.0)
    with pytest.raises(InvalidDomain):
        Polygon([[0, 0], [1, 1], [2, 2]])
    with pytest.raises(InvalidDomain):
        Polygon([[0, 0], [0, 1], [1, 1], [1, 0]])          # clockwise
    with pytest.raises(InvalidDomain):
        Interval(0.0, 1.0, reference=2.0)
    with pytest.raises(InvalidDomain):
        domain_from_spec({"kind": "triangle"})


def test_domain_from_spec():
    P = domain_from_spec({"kind": "polygon", "params": [0, 0, 2, 0, 0, 2]})
    assert P.volume == pytest.approx(2.0)
    B = domain_from_spec({"kind": "ball", "params": [0, 0, 2]})
    assert B.volume == pytest.approx(4 * math.pi)
    assert domain_from_spec({"kind": "box", "params": [0, 0, 1, 2]}).volume == pytest.approx(2.0)


# independent oracle: shapely buffers


@given(st.integers(0, 10_000), st.floats(0.01, 0.5))
def test_polygon_offsets_match_shapely(seed, frac):
    P = random_convex_polygon(np.random.default_rng(seed), 6)
    r = P.inradius
    eps = frac * r
    ref = sg.Polygon(P.vertices)
    assert erode(P, eps).volume == pytest.approx(ref.buffer(-eps, join_style=2).area, rel=1e-9, abs=1e-12)
    # Steiner volume against a finely tessellated round buffer
    assert dilate(P, eps).volume == pytest.approx(ref.buffer(eps, quad_segs=512).area, rel=1e-5)


@given(st.integers(0, 10_000), st.floats(0.0, 1.0))
def test_erosion_slice_below_dilation_slice(seed, frac):
    P = random_convex_polygon(np.random.default_rng(seed), 6)
    eps = frac * P.inradius
    s = erosion_slice_volume(P, eps)
    assert s <= dilation_slice_volume(P, eps) + 1e-12
    assert s <= erosion_volume_bound(P, eps) + 1e-12


@given(st.integers(0, 10_000), st.floats(0.0, 0.45), st.floats(0.0, 0.45))
def test_parallel_bodies_nested(seed, a, b):
    e1, e2 = sorted([a, b])
    P = random_convex_polygon(np.random.default_rng(seed), 6)
    r = P.inradius
    rng = np.random.default_rng(seed + 1)
    lo, hi = P.bounds
    pts = lo - 1 + (hi - lo + 2) * rng.random((400, 2))
    inner2, inner1 = erode(P, e2 * r), erode(P, e1 * r)
    outer1, outer2 = dilate(P, e1), dilate(P, e2)
    c = [K.contains(pts) for K in (inner2, inner1, P, outer1, outer2)]
    for small, big in zip(c[:-1], c[1:]):
        assert not np.any(small & ~big)


@given(st.floats(-math.pi, math.pi), st.floats(0.1, 10.0))
def test_radial_function_homogeneous_degree_zero(theta, s):
    P = random_convex_polygon(np.random.default_rng(3), 7)
    u = np.array([math.cos(theta), math.sin(theta)])
    r = radial_function(P, u)
    assert r == pytest.approx(P.radial(s * u / np.linalg.norm(s * u)))
    # the radial point lies on the boundary
    x = P.reference + r * u
    assert P.contains(x[None], tol=1e-9)[0]
    assert not P.contains((P.reference + (r + 1e-6) * u)[None], tol=0.0)[0]


def test_rounded_domain():
    R = dilate(unit_square(), 0.2)
    assert isinstance(R, Rounded)
    assert R.contains(np.array([[1.1, 0.5], [1.13, 1.13], [1.2, 1.2]])).tolist() == [True, True, False]
    outer = R.outer_polygon(8)
    assert outer.volume >= R.volume
    pts = np.random.default_rng(0).uniform(-0.3, 1.3, (2000, 2))
    assert np.all(outer.contains(pts[R.contains(pts)], tol=1e-12))


def test_chords():
    S = unit_square()
    t0, t1 = S.chord(np.array([[0.0, 0.5], [0.0, 2.0]]), np.array([[1.0, 0.0], [1.0, 0.0]]))
    assert t1[0] - t0[0] == pytest.approx(1.0)
    assert np.isnan(t0[1])
    D = unit_disk()
    t0, t1 = D.chord(np.array([[0.0, 0.0]]), np.array([[0.0, 1.0]]))
    assert (t0[0], t1[0]) == pytest.approx((-1.0, 1.0))
    seg = Segment([0, 0], [1, 0])
    assert seg.boundary_measure == pytest.approx(2.0)
