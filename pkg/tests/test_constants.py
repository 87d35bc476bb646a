import math

import pytest
import sympy as sp

from lotstab.constants import (ball_volume, gagliardo_nirenberg_constant, sphere_area,
                               strong_convexity_constant, vector_field_constant)


def test_sphere_and_ball():
    assert sphere_area(0) == pytest.approx(2.0)
    assert sphere_area(1) == pytest.approx(2 * math.pi)
    assert sphere_area(2) == pytest.approx(4 * math.pi)
    assert ball_volume(0) == pytest.approx(1.0)
    assert ball_volume(1) == pytest.approx(2.0)
    assert ball_volume(2) == pytest.approx(math.pi)
    assert ball_volume(3) == pytest.approx(4 * math.pi / 3)
    with pytest.raises(ValueError):
        sphere_area(-1)


@pytest.mark.parametrize("d", range(1, 7))
def test_sphere_is_derivative_of_ball(d):
    # S_{d-1} = d V_d
    assert sphere_area(d - 1) == pytest.approx(d * ball_volume(d), rel=1e-13)


def test_strong_convexity_constant():
    assert strong_convexity_constant(1) == pytest.approx(4 * math.e)
    assert strong_convexity_constant(2) == pytest.approx(12 * math.e)


def test_vector_field_constant_by_symbolic_average():
    # C'_d = 1 / (int_{S^{d-1}} e_1^2 de) for d = 2 and d = 3
    t, p = sp.symbols("t p")
    I2 = sp.integrate(sp.cos(t) ** 2, (t, 0, 2 * sp.pi))
    I3 = sp.integrate(sp.integrate(sp.cos(p) ** 2 * sp.sin(p), (p, 0, sp.pi)), (t, 0, 2 * sp.pi))
    assert vector_field_constant(2) == pytest.approx(float(1 / I2), rel=1e-14)
    assert vector_field_constant(3) == pytest.approx(float(1 / I3), rel=1e-14)
    assert vector_field_constant(2) == pytest.approx(1 / math.pi)


def test_gn_constant_plane():
    ref = sp.N(8 / sp.pi * 8 ** sp.Rational(2, 3) * (2 * sp.pi) ** sp.Rational(1, 3), 20)
    assert gagliardo_nirenberg_constant(2) == pytest.approx(float(ref), rel=1e-14)
    assert gagliardo_nirenberg_constant(2) == pytest.approx(18.7958, abs=1e-4)
