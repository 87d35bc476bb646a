import numpy as np
import pytest
from hypothesis import given, strategies as st

from lotstab.convexfun import (MaxAffinePotential, SampledFunction1D, conjugate,
                               erosion_lipschitz_radius, gradient_lipschitz_bound, holder_modulus,
                               legendre_1d, moreau_yosida)
from lotstab.errors import AlphaOutOfRange, NotConvex
from lotstab.geometry import Ball, Interval, random_convex_polygon, unit_disk, unit_square
from lotstab.verify import random_convex_pl


def _grid(n=401):
    g = np.linspace(0.0, 1.0, n)
    return np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)


@given(st.integers(0, 10_000))
def test_conjugate_square_matches_dense_grid(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 8))
    phi = MaxAffinePotential(rng.random((k, 2)) * 2 - 0.5, rng.random(k), unit_square())
    X = _grid()
    fX = phi(X)
    Q = rng.normal(size=(20, 2))
    brute = (Q @ X.T - fX).max(axis=1)
    exact = phi.conjugate(Q)
    lip = np.abs(Q).sum(axis=1) + np.abs(phi.slopes).sum(axis=1).max()
    assert np.all(exact >= brute - 1e-12)
    assert np.all(exact - brute <= lip * 1.0 / 400 + 1e-12)
    mn, mx = phi.extrema()
    assert fX.min() >= mn - 1e-12 and fX.max() <= mx + 1e-12
    assert fX.min() - mn <= 0.01 and mx - fX.max() <= 1e-12     # corners are on the grid


@given(st.integers(0, 10_000))
def test_conjugate_polygon_and_disk_lower_bounds(seed):
    rng = np.random.default_rng(seed)
    P = random_convex_polygon(rng, 6, radius=0.5, center=(0.5, 0.5))
    for dom in (P, unit_disk()):
        phi = MaxAffinePotential(rng.random((5, 2)), rng.random(5), dom)
        lo, hi = dom.bounds
        X = lo + (hi - lo) * rng.random((20000, 2))
        X = X[dom.contains(X)]
        Q = rng.normal(size=(10, 2))
        assert np.all(phi.conjugate(Q) >= (Q @ X.T - phi(X)).max(axis=1) - 1e-12)


def test_conjugate_is_dual_on_atoms():
    # psi_j = phi*(y_j) for atoms with nonempty cells
    phi = MaxAffinePotential([[0.25, 0.5], [0.75, 0.5]], [0.0, 0.25], unit_square())    # cells split at x1 = 1/2
    assert phi.conjugate([[0.25, 0.5], [0.75, 0.5]]) == pytest.approx([0.0, 0.25], abs=1e-14)
    assert phi.lipschitz_constant() == pytest.approx(np.hypot(0.75, 0.5))
    assert phi.lipschitz_constant(Ball([0.1, 0.5], 0.2)) == pytest.approx(np.hypot(0.25, 0.5))


def test_validation():
    with pytest.raises(ValueError):
        MaxAffinePotential(np.zeros((0, 2)), [], unit_square())
    with pytest.raises(ValueError):
        MaxAffinePotential([[1.0]], [0.0], unit_square())
    with pytest.raises(ValueError):
        SampledFunction1D([0.0, 0.0], [1.0, 2.0])
    with pytest.raises(TypeError):
        conjugate(lambda x: x, [0.0])


@given(st.integers(0, 10_000))
def test_legendre_scan_matches_brute(seed):
    rng = np.random.default_rng(seed)
    f = random_convex_pl(rng)
    y = np.sort(rng.normal(scale=3, size=50))
    assert legendre_1d(f.x, f.f, y, "scan") == pytest.approx(legendre_1d(f.x, f.f, y, "brute"), abs=1e-12)


def test_sampled_function_basics():
    f = SampledFunction1D([0.0, 1.0, 2.0], [0.0, 0.0, 1.0])
    assert f.is_convex() and f.lipschitz() == 1.0
    assert f([3.0, -1.0]).tolist() == [2.0, 0.0]
    assert f.derivative([0.5, 1.5]).tolist() == [0.0, 1.0]
    assert not SampledFunction1D([0.0, 1.0, 2.0], [0.0, 1.0, 1.0]).is_convex()


@given(st.integers(0, 10_000), st.floats(1e-3, 2.0))
def test_moreau_envelope_matches_brute_minimization(seed, lam):
    rng = np.random.default_rng(seed)
    f = random_convex_pl(rng)
    env = moreau_yosida(f, lam)
    x = np.linspace(f.x[0] - 1, f.x[-1] + 1, 37)
    u = np.linspace(f.x[0] - 15, f.x[-1] + 15, 200001)
    fu = f(u)
    brute = np.array([np.min(fu + (u - xi) ** 2 / (2 * lam)) for xi in x])
    h = u[1] - u[0]
    assert np.all(env(x) <= brute + 1e-10)
    assert np.all(brute - env(x) <= h * (f.lipschitz() + 20 / lam) + 1e-10)
    # envelope properties: below f, gradient 1/lam-Lipschitz, same minimum
    assert np.all(env(x) <= f(x) + 1e-12)
    assert gradient_lipschitz_bound(env) <= 1 / lam * (1 + 1e-9)


def test_moreau_needs_convex():
    with pytest.raises(NotConvex):
        moreau_yosida(SampledFunction1D([0.0, 1.0, 2.0], [0.0, 1.0, 1.0]), 0.1)
    with pytest.raises(ValueError):
        moreau_yosida(SampledFunction1D([0.0, 1.0], [0.0, 1.0]), 0.0)


def test_moreau_of_abs_is_huber():
    env = moreau_yosida(SampledFunction1D([-1.0, 0.0, 1.0], [1.0, 0.0, 1.0]), 0.5)
    x = np.array([-2.0, -0.25, 0.0, 0.3, 2.0])
    huber = np.where(np.abs(x) <= 0.5, x ** 2, np.abs(x) - 0.25)
    assert env(x) == pytest.approx(huber, abs=1e-14)
    assert env.knots() == pytest.approx([-0.5, 0.5])


def test_erosion_lipschitz_radius():
    assert erosion_lipschitz_radius(1.0, 0.5, 4.0) == pytest.approx(1 / 16)
    with pytest.raises(AlphaOutOfRange):
        erosion_lipschitz_radius(1.0, 1.0, 1.0)


def test_holder_modulus_sqrt():
    x = np.linspace(0.0, 1.0, 201)
    assert holder_modulus(x, np.sqrt(x), 0.5) == pytest.approx(1.0, abs=1e-12)
    X = np.random.default_rng(0).random((500, 2))
    m = holder_modulus(X, X[:, 0], 1.0)
    assert m <= 1.0 + 1e-12 and m > 0.9
