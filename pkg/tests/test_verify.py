import math

import numpy as np
import pytest

from lotstab import verify as V
from lotstab.convexfun import SampledFunction1D
from lotstab.errors import DegenerateData, NotStronglyConvex, RegimeUnsupported
from lotstab.geometry import unit_disk, unit_square
from lotstab.measures import GridDensity
from lotstab.geometry import Interval


def test_make_report_pass_semantics():
    assert V.make_report("x", "i", 1.0, 1.0).passed
    assert not V.make_report("x", "i", 1.01, 1.0, tolerance=1e-3).passed
    assert V.make_report("x", "i", 1.0005, 1.0, tolerance=1e-3).passed
    assert V.make_report("x", "i", 1e-4, 0.0, slack=1e-3).passed
    assert not V.make_report("x", "i", 1e-2, 0.0, slack=1e-3).passed
    assert not V.make_report("x", "i", 0.5, 1.0, extra_pass=False).passed
    r = V.make_report("x", "i", 0.5, 1.0, inputs={"a": 1})
    assert r.digest == V.make_report("y", "j", 0.7, 2.0, inputs={"a": 1}).digest


def test_fit_holder_exponent():
    x = np.geomspace(0.01, 0.2, 8)
    fit = V.fit_holder_exponent(x, 3.0 * x ** 1.7)
    assert fit.slope == pytest.approx(1.7, abs=1e-12)
    assert math.exp(fit.intercept) == pytest.approx(3.0, rel=1e-12)
    with pytest.raises(DegenerateData):
        V.fit_holder_exponent(x[:3], x[:3])
    with pytest.raises(DegenerateData):
        V.fit_holder_exponent(x, -x)


def test_map_exponents():
    assert V.map_exponent("compact16", 2) == pytest.approx(1 / 6)
    assert V.map_exponent("holder", 2, alpha=0.5) == pytest.approx(1 / 14)
    assert V.map_exponent("moments", 1, p=4) == pytest.approx(4 / 40)
    assert V.map_exponent("moments", 2, p=4) == pytest.approx(4 / 56)
    with pytest.raises(RegimeUnsupported):
        V.map_exponent("moments", 2, p=2)


def test_pairs_are_seeded():
    a, b = V.random_pair(3, 2, n=64), V.random_pair(3, 2, n=64)
    assert np.array_equal(a.mu0.points, b.mu0.points) and np.array_equal(a.mu1.weights, b.mu1.weights)
    c = V.random_pair(3, 2, common_support=True, n=64)
    assert np.array_equal(c.mu0.points, c.mu1.points)


def test_strong_convexity_and_primal_dual_on_a_pair():
    p = V.random_pair(11, 2, n=64)
    r = V.check_strong_convexity(p.rho, p.mu0, p.mu1)
    assert r.passed and 0 <= r.ratio <= 1
    reps = V.check_primal_dual(p.rho, p.mu0, p.mu1, 2.0)
    assert all(x.passed for x in reps)


def test_shift_example():
    # phi1 - phi0 = const in 1D shift: bracket is unchanged by adding constants
    rho = GridDensity(Interval(0.0, 1.0), 256)
    from lotstab.lot import embed
    from lotstab.measures import DiscreteMeasure
    mu0 = DiscreteMeasure([[0.2], [0.7]])
    mu1 = DiscreteMeasure([[0.3], [0.8]])
    r = V.check_shift_invariance(embed(rho, mu0), embed(rho, mu1))
    assert r.passed


def test_bracket_sharpness_reports():
    reps = V.check_bracket_sharpness()
    assert all(r.passed for r in reps)


def test_gn_sharpness_report():
    r = V.check_gn_sharpness(1.0, 0.1)
    assert r.passed and r.lhs == pytest.approx(0.2, abs=1e-12)


def test_brascamp_lieb_gaussian_equality():
    s = lambda x: x
    r = V.check_brascamp_lieb_1d(lambda x: x ** 2 / 2, lambda x: np.ones_like(x), s, lambda x: np.ones_like(x), (-8.0, 8.0))
    assert r.ratio == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(NotStronglyConvex):
        V.check_brascamp_lieb_1d(lambda x: 0 * x, lambda x: 0 * x, s, lambda x: np.ones_like(x), (-1.0, 1.0))


def test_boundary_slices_and_moreau():
    for dom in (unit_disk(), unit_square()):
        assert all(r.passed for r in V.check_boundary_slice(dom, 0.1))
    f = SampledFunction1D([-1.0, 0.0, 1.0], [1.0, 0.0, 1.0])
    assert V.check_moreau_yosida(f).passed


def test_crofton_check():
    r = V.check_crofton("square", n=200_000, seed=1)
    assert r.passed and r.aux["estimate"] == pytest.approx(4.0, rel=0.02)


def test_run_check_unknown():
    with pytest.raises(KeyError):
        V.run_check("nope")


def test_run_all_small_is_deterministic():
    a = V.run_all(seed=1, size=5, crofton_lines=20_000, checks=["strong-convexity", "gn-1d", "crofton"])
    b = V.run_all(seed=1, size=5, crofton_lines=20_000, checks=["strong-convexity", "gn-1d", "crofton"])
    la = [(r.check_id, r.instance, r.lhs, r.rhs) for rs in a.values() for r in rs]
    lb = [(r.check_id, r.instance, r.lhs, r.rhs) for rs in b.values() for r in rs]
    assert la == lb and len(la) > 0
