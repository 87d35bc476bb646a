"""Dimensional constants used by the stability bounds."""

from __future__ import annotations

import math


def sphere_area(k: int) -> float:
    """Surface measure ``S_k`` of the unit sphere in ``R^{k+1}``.

    ``S_0 = 2`` (two points), ``S_1 = 2*pi``, ``S_2 = 4*pi``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    return 2.0 * math.pi ** ((k + 1) / 2.0) / math.gamma((k + 1) / 2.0)


def ball_volume(d: int) -> float:
    """Volume ``V_d`` of the unit ball in ``R^d`` (``V_0 = 1``)."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def strong_convexity_constant(d: int) -> float:
    """Constant ``e (d+1) 2^d`` of the dual strong convexity estimate."""
    return math.e * (d + 1) * 2.0**d


def vector_field_constant(d: int) -> float:
    """Normalizing constant ``C'_d`` of the line identity for vector fields.

    With the kinematic measure ``de dp`` and ``e`` uniform on the sphere,
    ``int_{S^{d-1}} <x, e>^2 de = S_{d-1} / d`` for a unit vector ``x``,
    so ``C'_d = d / S_{d-1}``; in the plane this is ``1/pi``.
    """
    if d < 1:
        raise ValueError("d must be positive")
    return d / sphere_area(d - 1)


def gagliardo_nirenberg_constant(d: int) -> float:
    """Composed constant of the dimension-``d`` interpolation inequality.

    ``8 C'_d (4 V_{d-1})^{2/3} S_{d-1}^{1/3}``; about 18.79 for ``d = 2``.
    """
    return (
        8.0
        * vector_field_constant(d)
        * (4.0 * ball_volume(d - 1)) ** (2.0 / 3.0)
        * sphere_area(d - 1) ** (1.0 / 3.0)
    )
