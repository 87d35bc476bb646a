import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lotstab.errors import ReferenceMismatch
from lotstab.geometry import Interval
from lotstab.lot import bracket, dual_difference, embed, lot_distance, variance
from lotstab.measures import DiscreteMeasure, GridDensity, w2_discrete, wasserstein_1d
from lotstab.verify import random_measure, random_pair, reference_density


def test_variance_closed_form():
    assert variance([1.0, 3.0], [0.5, 0.5]) == pytest.approx(1.0)
    # total mass two: min_c sum w (f - c)^2
    assert variance([1.0, 3.0, 1.0, 3.0], [0.5] * 4) == pytest.approx(2.0)
    assert variance([5.0], [0.0]) == 0.0


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.2])
def test_variance_shift_mixture(eps):
    # f(y) = -eps y under U[0,1] + U[eps,1+eps] (mass two): 2 eps^2 (1/12 + eps^2/4)
    rho0 = GridDensity(Interval(0.0, 1.0), 4000)
    rho1 = GridDensity(Interval(eps, 1.0 + eps), 4000)
    y = np.concatenate([rho0.centers[:, 0], rho1.centers[:, 0]])
    w = np.concatenate([rho0.masses, rho1.masses])
    assert variance(-eps * y, w) == pytest.approx(2 * eps ** 2 * (1 / 12 + eps ** 2 / 4), rel=1e-6)


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_lot_distance_equals_w2_in_1d(seed):
    rng = np.random.default_rng(seed)
    rho = reference_density(1, 512)
    mu0, mu1 = random_measure(rng, 1), random_measure(rng, 1)
    e0, e1 = embed(rho, mu0), embed(rho, mu1)
    d = lot_distance(e0, e1)
    assert d == pytest.approx(wasserstein_1d(mu0, mu1, 2), abs=2 * rho.spacing)
    assert lot_distance(e0, e0) == 0.0
    assert d == pytest.approx(lot_distance(e1, e0))


@settings(max_examples=10)
@given(st.integers(0, 10_000))
def test_lot_metric_properties_2d(seed):
    rho = reference_density(2, 64)
    rng = np.random.default_rng(seed)
    es = [embed(rho, random_measure(rng, 2), tol=1e-9) for _ in range(3)]
    a, b, c = es
    assert lot_distance(a, c) <= lot_distance(a, b) + lot_distance(b, c) + 1e-12
    # (T_a, T_b) pushes rho to a coupling of the targets
    assert lot_distance(a, b) >= w2_discrete(a.measure, b.measure) - 2 * rho.spacing


@settings(max_examples=25)
@given(st.integers(0, 10_000), st.sampled_from([1, 2]))
def test_bracket_nonnegative(seed, d):
    p = random_pair(seed, d, n=64 if d == 2 else 256)
    e0, e1 = embed(p.rho, p.mu0), embed(p.rho, p.mu1)
    assert bracket(e0, e1, p.mu0, p.mu1) >= -1e-9
    assert bracket(e0, e0, p.mu0, p.mu1) == 0.0
    v, w = dual_difference(e0, e1)
    assert len(v) == len(p.mu0) + len(p.mu1) and w.sum() == pytest.approx(2.0)


def test_reference_mismatch():
    mu = DiscreteMeasure([[0.3], [0.6]])
    a = embed(GridDensity(Interval(0.0, 1.0), 64), mu)
    b = embed(GridDensity(Interval(0.0, 1.0), 65), mu)
    with pytest.raises(ReferenceMismatch):
        lot_distance(a, b)
    with pytest.raises(TypeError):
        embed(reference_density(2, 16), GridDensity(Interval(0.0, 1.0), 8))
