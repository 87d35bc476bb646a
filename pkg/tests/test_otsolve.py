import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lotstab.errors import NonConvergence, SupportMismatch
from lotstab.geometry import Interval, unit_square
from lotstab.measures import DiscreteMeasure, GridDensity
from lotstab.otsolve import (DualPotential, brenier_1d, dual_gradient, dual_objective, dual_path,
                             kantorovich, laguerre_masses, solve_semidiscrete)
from lotstab.verify import random_measure, reference_density

TWO = DiscreteMeasure([[0.25, 0.5], [0.75, 0.5]], [0.5, 0.5])


def test_kantorovich_two_point_closed_form():
    rho = GridDensity(unit_square(), 64)
    # psi = 0: the second atom wins everywhere, K = int 0.75 x1 + 0.5 x2 = 5/8
    assert kantorovich((TWO.points, np.zeros(2)), rho) == pytest.approx(5 / 8, abs=1e-12)
    assert laguerre_masses(TWO.points, [0.0, 0.25], rho) == pytest.approx([0.5, 0.5], abs=1e-12)


def test_two_point_solution():
    rho = GridDensity(unit_square(), 128)
    res = solve_semidiscrete(rho, TWO, tol=1e-10)
    d = res.T - rho.centers
    assert rho.integrate((d ** 2).sum(axis=1)) == pytest.approx(5 / 48, abs=1e-3)
    v = res.dual.values
    assert v[1] - v[0] == pytest.approx(0.25, abs=1e-8)
    assert res.masses == pytest.approx([0.5, 0.5], abs=1e-10)
    assert rho.integrate(res.phi) == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    rho = reference_density(2, 64)
    mu = random_measure(rng, 2)
    psi = 0.5 * (mu.points ** 2).sum(axis=1) + 0.05 * rng.normal(size=len(mu))
    g = dual_gradient((mu.points, psi), rho, mu)
    h = 1e-6
    fd = np.empty(len(mu))
    for j in range(len(mu)):
        e = np.zeros(len(mu))
        e[j] = h
        fd[j] = (dual_objective((mu.points, psi + e), rho, mu) - dual_objective((mu.points, psi - e), rho, mu)) / (2 * h)
    assert np.max(np.abs(g - fd)) <= 1e-4


@settings(max_examples=15)
@given(st.integers(0, 10_000))
def test_solver_equalizes_masses(seed):
    rng = np.random.default_rng(seed)
    rho = reference_density(2, 64)
    mu = random_measure(rng, 2)
    for method in ("lbfgs", "newton"):
        res = solve_semidiscrete(rho, mu, tol=1e-8, method=method)
        assert np.max(np.abs(res.masses - mu.weights)) <= 1e-8
        # the dual value equals the conjugate of the potential on every charged atom
        assert res.psi(mu.points) == pytest.approx(res.dual.values, abs=1e-9)


@settings(max_examples=15)
@given(st.integers(0, 10_000))
def test_semidiscrete_1d_matches_quantile(seed):
    rng = np.random.default_rng(seed)
    rho = reference_density(1, 512)
    mu = random_measure(rng, 1)
    a = solve_semidiscrete(rho, mu, tol=1e-10)
    b = brenier_1d(rho, mu)
    err = np.sqrt(rho.integrate((a.T[:, 0] - b.T[:, 0]) ** 2))
    assert err <= 2 * rho.spacing


def test_quantile_solver_uniform_shift():
    rho = GridDensity(Interval(0.0, 1.0), 400)
    mu = GridDensity(Interval(0.1, 1.1), 400)
    res = brenier_1d(rho, mu)
    assert res.T[:, 0] == pytest.approx(rho.centers[:, 0] + 0.1, abs=1e-12)
    # phi(x) = x^2/2 + 0.1 x - const, centered
    x = rho.centers[:, 0]
    ref = x ** 2 / 2 + 0.1 * x
    ref -= rho.integrate(ref)
    assert res.phi == pytest.approx(ref, abs=1e-6)
    # psi(y) = (y - 0.1)^2 / 2 + const, a conjugate pair phi(x) + psi(y) >= x y
    y = np.linspace(0.1, 1.1, 11)
    assert np.all(res.phi_at(x[::40])[:, None] + res.psi(y)[None, :] >= np.outer(x[::40], y) - 1e-12)


def test_zero_weight_atom():
    mu = DiscreteMeasure([[0.2, 0.2], [0.8, 0.8], [0.5, 0.5]], [0.5, 0.5, 0.0])
    res = solve_semidiscrete(GridDensity(unit_square(), 64), mu, tol=1e-9)
    assert res.masses[2] == 0.0
    assert np.isfinite(res.dual.values).all()


def test_nonconvergence_carries_result():
    rho = reference_density(2, 64)
    mu = random_measure(np.random.default_rng(3), 2, k_range=(8, 9))
    with pytest.raises(NonConvergence) as info:
        solve_semidiscrete(rho, mu, tol=1e-14, max_iter=2)
    assert info.value.result is not None


def test_dual_path_endpoints():
    rho = GridDensity(unit_square(), 64)
    p0 = DualPotential(TWO.points, [0.0, 0.25], rho.domain)
    p1 = DualPotential(TWO.points, [0.0, 0.3], rho.domain)
    K, dK, mt = dual_path(p0, p1, 0.0, rho)
    assert K == pytest.approx(kantorovich(p0, rho))
    assert dK == pytest.approx(-0.05 * 0.5)
    with pytest.raises(SupportMismatch):
        dual_path(p0, DualPotential(TWO.points + 0.1, [0.0, 0.0], rho.domain), 0.5, rho)
    with pytest.raises(SupportMismatch):
        dual_objective(p0, rho, DiscreteMeasure([[0.1, 0.1], [0.2, 0.2]]))
