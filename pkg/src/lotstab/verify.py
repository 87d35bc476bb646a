"""Empirical checks of the stability inequalities.

Every check returns a :class:`CheckReport` with both sides of an
inequality.  A report passes when ``lhs <= rhs (1 + tolerance) + slack``;
checks whose constants are not explicit compare fitted exponents instead
(``lhs`` is then the required exponent and ``rhs`` the fitted one).
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import crofton
from .constants import strong_convexity_constant
from .convexfun import (MaxAffinePotential, SampledFunction1D, erosion_lipschitz_radius,
                        gradient_lipschitz_bound, holder_modulus, moreau_yosida)
from .errors import (AlphaOutOfRange, DegenerateData, EmptyErosion, NotStronglyConvex,
                     RegimeUnsupported)
from .geometry import (Ball, Box, ConvexDomain, Interval, Segment, dilation_slice_volume, erode,
                       erosion_slice_volume, erosion_volume_bound, random_convex_polygon,
                       unit_disk, unit_square)
from .lot import EmbeddedMeasure, atoms, bracket, dual_difference, embed, lot_distance, variance
from .measures import (DiscreteMeasure, GridDensity, chi2_divergence, moment, w1_discrete,
                       w2_discrete, wasserstein_1d)

log = logging.getLogger(__name__)

__all__ = [
    "CheckReport",
    "HolderFit",
    "Pair",
    "fit_holder_exponent",
    "map_exponent",
    "q_moment_exponent",
    "random_measure",
    "random_pair",
    "suite_pairs",
    "random_convex_pl",
    "check_strong_convexity",
    "check_shift_invariance",
    "check_primal_dual",
    "check_potential_stability",
    "check_map_stability",
    "check_map_sweep",
    "check_bracket_sharpness",
    "check_brascamp_lieb_1d",
    "check_w2_gradient_bound",
    "check_density_targets_1d",
    "check_morrey_potential",
    "check_erosion_lipschitz",
    "check_boundary_slice",
    "check_moreau_yosida",
    "check_gn_1d",
    "check_gn_sharpness",
    "check_gn_nd",
    "check_crofton",
    "CHECKS",
    "run_check",
    "run_all",
]

ABSOLUTE_FLOOR = 1e-12


@dataclass
class CheckReport:
    """Outcome of one inequality check on one instance.

    Attributes
    ----------
    check_id : str
    instance : str
        Short human-readable description.
    lhs, rhs : float
    ratio : float
        ``lhs / rhs``; ``0`` when both vanish, ``inf`` when only ``rhs`` does.
    tolerance : float
        Relative tolerance on ``rhs``.
    slack : float
        Absolute slack (discretization floor).
    passed : bool
    aux : dict
        Constants, exponents and intermediate quantities.
    inputs : dict
        Seeds and resolutions.
    """

    check_id: str
    instance: str
    lhs: float
    rhs: float
    ratio: float
    tolerance: float
    slack: float
    passed: bool
    aux: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)

    @property
    def degenerate(self) -> bool:
        return not self.rhs > 0

    @property
    def digest(self) -> str:
        blob = json.dumps(self.inputs, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def make_report(check_id: str, instance: str, lhs: float, rhs: float, *, tolerance: float = 1e-6,
                slack: float = 0.0, aux: dict | None = None, inputs: dict | None = None,
                extra_pass: bool = True) -> CheckReport:
    lhs, rhs = float(lhs), float(rhs)
    if rhs > 0:
        ratio = lhs / rhs
        ok = lhs <= rhs * (1.0 + tolerance) + slack
    else:
        ratio = 0.0 if abs(lhs) <= ABSOLUTE_FLOOR else math.inf
        ok = lhs <= max(ABSOLUTE_FLOOR, slack)
    return CheckReport(check_id, instance, lhs, rhs, ratio, tolerance, slack, bool(ok and extra_pass),
                       dict(aux or {}), dict(inputs or {}))


# exponent fits ---------------------------------------------------------------


@dataclass
class HolderFit:
    """Ordinary least squares fit of ``log y = slope log x + intercept``."""

    x: np.ndarray
    y: np.ndarray
    slope: float
    intercept: float
    residual: float

    def predict(self, x) -> np.ndarray:
        return math.exp(self.intercept) * np.asarray(x, dtype=float) ** self.slope


def fit_holder_exponent(x, y) -> HolderFit:
    """Log-log regression slope as an empirical exponent.

    Raises
    ------
    DegenerateData
        With fewer than four samples or non-positive values.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if len(x) != len(y):
        raise ValueError("x and y differ in length")
    if len(x) < 4:
        raise DegenerateData("need at least four samples")
    if np.any(~(x > 0)) or np.any(~(y > 0)):
        raise DegenerateData("samples must be positive")
    lx, ly = np.log(x), np.log(y)
    if np.ptp(lx) == 0:
        raise DegenerateData("all x values coincide")
    A = np.stack([lx, np.ones_like(lx)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    res = float(np.max(np.abs(ly - (slope * lx + intercept))))
    return HolderFit(x, y, float(slope), float(intercept), res)


def map_exponent(regime: str, d: int, alpha: float | None = None, p: float | None = None) -> float:
    """Exponent of ``W_1`` in the map stability bound of each regime.

    ``compact16``: 1/6; ``holder``: ``1/(2(11 - 8 alpha))``;
    ``moments``: ``p/(6p + 16d)`` with ``p > d`` and ``p >= 4``.
    """
    if regime == "compact16":
        return 1.0 / 6.0
    if regime == "holder":
        if alpha is None or not 0 < alpha <= 1:
            raise RegimeUnsupported("holder regime needs alpha in (0, 1]")
        return 1.0 / (2.0 * (11.0 - 8.0 * alpha))
    if regime == "moments":
        if p is None or not (p > d and p >= 4):
            raise RegimeUnsupported("moments regime needs p > d and p >= 4")
        return p / (6.0 * p + 16.0 * d)
    raise RegimeUnsupported(f"unknown regime {regime!r}")


def q_moment_exponent(q: float, alpha: float) -> float:
    """``(q - 1) / (2 (q (7 - 4 alpha) - 3))`` for targets with a q-th moment."""
    return (q - 1.0) / (2.0 * (q * (7.0 - 4.0 * alpha) - 3.0))


# random instances -------------------------------------------------------------


def random_measure(rng: np.random.Generator, d: int, k_range=(2, 10), box=None) -> DiscreteMeasure:
    """2-10 atoms uniform in a box (default ``[0,1]^d``) with Dirichlet weights."""
    lo, hi = (np.zeros(d), np.ones(d)) if box is None else (np.asarray(box[0], float), np.asarray(box[1], float))
    k = int(rng.integers(k_range[0], k_range[1] + 1))
    pts = lo + (hi - lo) * rng.random((k, d))
    w = rng.dirichlet(np.ones(k))
    return DiscreteMeasure(pts, w / w.sum())


@dataclass
class Pair:
    """Two targets solved against a common reference density."""

    rho: GridDensity
    mu0: DiscreteMeasure
    mu1: DiscreteMeasure
    e0: EmbeddedMeasure
    e1: EmbeddedMeasure
    seed: int
    label: str

    @property
    def inputs(self) -> dict:
        return {"seed": self.seed, "n": self.rho.n, "d": self.rho.dim, "kind": self.label}


_REFERENCE_CACHE: dict = {}


def reference_density(d: int, n: int | None = None) -> GridDensity:
    """Uniform density on ``[0,1]^d``; 512 cells in 1D, 256^2 in 2D by default."""
    n = (512 if d == 1 else 256) if n is None else int(n)
    key = (d, n)
    if key not in _REFERENCE_CACHE:
        dom = Interval(0.0, 1.0) if d == 1 else Box([0.0, 0.0], [1.0, 1.0])
        _REFERENCE_CACHE[key] = GridDensity(dom, n)
    return _REFERENCE_CACHE[key]


def random_pair(seed: int, d: int, *, common_support: bool = False, n: int | None = None,
                rho: GridDensity | None = None) -> Pair:
    """Seeded random target pair solved against ``rho``.

    With ``common_support`` both targets share atoms and differ in their
    (positive) Dirichlet weights.
    """
    rng = np.random.default_rng([seed, d, int(common_support)])
    rho = reference_density(d, n) if rho is None else rho
    mu0 = random_measure(rng, d)
    if common_support:
        w = rng.dirichlet(np.ones(len(mu0)))
        mu1 = DiscreteMeasure(mu0.points, w / w.sum())
    else:
        mu1 = random_measure(rng, d)
    return Pair(rho, mu0, mu1, embed(rho, mu0), embed(rho, mu1), seed,
                "common" if common_support else "random")


def suite_pairs(count: int, d: int, seed: int = 0, common_support: bool = False, n: int | None = None) -> list[Pair]:
    return [random_pair(seed * 100_003 + i, d, common_support=common_support, n=n) for i in range(count)]


def random_convex_pl(rng: np.random.Generator, max_breaks: int = 20, slope_range: float = 5.0,
                     interval=(0.0, 1.0)) -> SampledFunction1D:
    """Random convex piecewise-linear function with at most ``max_breaks`` breakpoints."""
    a, b = interval
    k = int(rng.integers(2, max_breaks + 1))
    inner = np.sort(rng.uniform(a, b, size=k - 2))
    x = np.unique(np.concatenate([[a], inner, [b]]))
    s = np.sort(rng.uniform(-slope_range, slope_range, size=len(x) - 1))
    f0 = rng.uniform(-1.0, 1.0)
    return SampledFunction1D(x, np.concatenate([[f0], f0 + np.cumsum(s * np.diff(x))]))


# strong convexity and potential stability -------------------------------------


def _oscillation(e0: EmbeddedMeasure, e1: EmbeddedMeasure) -> tuple[float, float, float]:
    (m0, M0), (m1, M1) = e0.extrema(), e1.extrema()
    m, M = min(m0, m1), max(M0, M1)
    return m, M, M - m


def _density_ratio(rho: GridDensity) -> float:
    return float(rho.M_rho / rho.m_rho)


def check_strong_convexity(rho: GridDensity, mu0, mu1, *, e0=None, e1=None, tolerance: float = 1e-3,
                           inputs: dict | None = None) -> CheckReport:
    """``Var_{mu0+mu1}(psi1 - psi0) <= C_d (M/m)^2 (M_phi - m_phi) <psi0 - psi1, mu1 - mu0>``."""
    e0 = embed(rho, mu0) if e0 is None else e0
    e1 = embed(rho, mu1) if e1 is None else e1
    lhs = variance(*dual_difference(e0, e1))
    br = bracket(e0, e1, e0.measure, e1.measure)
    m, M, osc = _oscillation(e0, e1)
    C = strong_convexity_constant(rho.dim)
    q = _density_ratio(rho)
    rhs = C * q * q * osc * max(br, 0.0)
    aux = {"bracket": br, "oscillation": osc, "m_phi": m, "M_phi": M, "C_d": C, "density_ratio": q}
    return make_report("strong-convexity", _describe(mu0, mu1), lhs, rhs, tolerance=tolerance,
                       aux=aux, inputs=inputs)


def check_shift_invariance(e0: EmbeddedMeasure, e1: EmbeddedMeasure, c: float = 0.37,
                           inputs: dict | None = None) -> CheckReport:
    """Variance, bracket and oscillation are unchanged when ``phi0 -> phi0 + c``.

    Adding ``c`` to ``phi0`` subtracts it from ``psi0``; the change of every
    quantity is reported as ``lhs`` against a zero right-hand side with
    a round-off slack.
    """
    y0, w0 = atoms(e0.measure)
    y1, w1 = atoms(e1.measure)
    Y = np.concatenate([y0, y1])
    W = np.concatenate([w0, w1])
    p0, p1 = e0.psi(Y), e1.psi(Y)
    v, vs = variance(p1 - p0, W), variance(p1 - (p0 - c), W)
    b = bracket(e0, e1, e0.measure, e1.measure)
    bs = bracket(lambda y: e0.psi(y) - c, e1, e0.measure, e1.measure)
    (m0, M0), (m1, M1) = e0.extrema(), e1.extrema()
    osc = max(M0, M1) - min(m0, m1)
    osc_s = max(M0 + c, M1) - min(m0 + c, m1)
    # the oscillation of each potential is invariant; the common one is not
    own = max(M0 - m0, M1 - m1)
    own_s = max((M0 + c) - (m0 + c), M1 - m1)
    change = max(abs(vs - v), abs(bs - b), abs(own_s - own))
    return make_report("shift-invariance", f"c={c:g}", change, 0.0, slack=1e-9 * max(1.0, abs(c)),
                       aux={"variance": v, "bracket": b, "oscillation_each": own,
                            "common_oscillation": osc, "common_oscillation_shifted": osc_s},
                       inputs=inputs)


def _phi_difference(e0: EmbeddedMeasure, e1: EmbeddedMeasure) -> np.ndarray:
    if e0.rho is not e1.rho and not np.array_equal(e0.rho.centers, e1.rho.centers):
        raise ValueError("embeddings use different grids")
    return e1.phi - e0.phi


def check_primal_dual(rho: GridDensity, mu0, mu1, p: float, *, e0=None, e1=None, slack: float = 1e-3,
                      inputs: dict | None = None) -> list[CheckReport]:
    """``||phi1 - phi0||_{L^p(rho)} <= ||psi1 - psi0||_{L^p(mu0+mu1)}`` and the variance chain.

    The potentials are the conjugate pairs stored by the solver, so the
    comparison is not shift-invariant and uses them as they are.
    """
    e0 = embed(rho, mu0) if e0 is None else e0
    e1 = embed(rho, mu1) if e1 is None else e1
    dphi = _phi_difference(e0, e1)
    v, W = dual_difference(e0, e1)
    lhs = rho.lp_norm(dphi, p)
    rhs = float(np.dot(W, np.abs(v) ** p) ** (1.0 / p))
    desc = _describe(mu0, mu1)
    out = [make_report("primal-dual", f"{desc} p={p:g}", lhs, rhs, tolerance=0.0, slack=slack,
                       aux={"p": p}, inputs=inputs)]
    vr = variance(dphi, rho.masses)
    vd = variance(v, W)
    out.append(make_report("variance-chain", desc, vr, vd, tolerance=0.0, slack=slack, inputs=inputs))
    return out


def _w1(mu0, mu1) -> float:
    if mu0.dim == 1:
        return wasserstein_1d(mu0, mu1, p=1)
    return w1_discrete(mu0, mu1)


def _w2(mu0, mu1) -> float:
    if (isinstance(mu0, GridDensity) and mu0.dim == 1) or mu0.dim == 1:
        return wasserstein_1d(mu0, mu1, p=2)
    return w2_discrete(mu0, mu1)


def check_potential_stability(rho: GridDensity, mu0, mu1, mode: str = "W1", *, e0=None, e1=None,
                              tolerance: float = 1e-3, inputs: dict | None = None) -> CheckReport:
    """Potential stability in ``W_1`` or chi-squared form.

    ``lhs`` is the dual variance (the larger side of the variance chain);
    the primal variance is recorded in ``aux``.

    Raises
    ------
    NotAbsolutelyContinuous
        In ``chi2`` mode when ``mu1`` is not absolutely continuous w.r.t. ``mu0``.
    """
    if mode not in ("W1", "chi2"):
        raise ValueError("mode must be 'W1' or 'chi2'")
    D = chi2_divergence(mu1, mu0) if mode == "chi2" else None
    e0 = embed(rho, mu0) if e0 is None else e0
    e1 = embed(rho, mu1) if e1 is None else e1
    primal = variance(_phi_difference(e0, e1), rho.masses)
    lhs = variance(*dual_difference(e0, e1))
    _, _, osc = _oscillation(e0, e1)
    C = strong_convexity_constant(rho.dim)
    q = _density_ratio(rho)
    aux = {"primal_variance": primal, "oscillation": osc, "C_d": C}
    if mode == "W1":
        W1 = _w1(mu0, mu1)
        diam = rho.domain.diameter
        rhs = C * q * q * osc * diam * W1
        aux.update(W1=W1, diameter=diam)
    else:
        rhs = (C * q * q * osc) ** 2 * D
        aux.update(chi2=D)
    return make_report(f"potential-{mode.lower()}", _describe(mu0, mu1), lhs, rhs, tolerance=tolerance,
                       aux=aux, inputs=inputs, extra_pass=primal <= lhs + 1e-3)


# map stability ------------------------------------------------------------------


def check_map_stability(rho: GridDensity, mu0, mu1, regime: str = "compact16", *, alpha=None, p=None,
                        e0=None, e1=None, inputs: dict | None = None) -> CheckReport:
    """Single-instance map stability record.

    Reports ``||T1 - T0||_{L^2(rho)}`` and the implied constant
    ``lhs / W_1^exponent``; the pass flag is the lower bound
    ``W_2 <= ||T1 - T0|| + 2 h`` (``h`` the grid spacing).  Exponents are
    checked on sweeps by :func:`check_map_sweep`.
    """
    ex = map_exponent(regime, rho.dim, alpha=alpha, p=p)
    e0 = embed(rho, mu0) if e0 is None else e0
    e1 = embed(rho, mu1) if e1 is None else e1
    dist = lot_distance(e0, e1)
    W1, W2 = _w1(mu0, mu1), _w2(mu0, mu1)
    implied = dist / W1 ** ex if W1 > 0 else math.nan
    h = 2.0 * rho.spacing
    return make_report(f"map-{regime}", _describe(mu0, mu1), W2, dist, tolerance=0.0, slack=h,
                       aux={"lot_distance": dist, "W1": W1, "W2": W2, "exponent": ex,
                            "implied_constant": implied}, inputs=inputs)


def _family(kind: str, d: int, eps: float, atoms_n: int, base_pts=None):
    if kind == "translation":
        pts = base_pts + np.eye(d)[0] * eps
        return DiscreteMeasure(pts)
    if kind == "dilation":
        return DiscreteMeasure(base_pts * (1.0 + eps))
    raise ValueError(f"unknown family {kind!r}")


def check_map_sweep(kind: str, d: int, eps: Sequence[float], *, regime: str = "compact16", p=None,
                    atoms_n: int | None = None, n: int | None = None, seed: int = 0,
                    tolerance_exponent: float = 0.05) -> list[CheckReport]:
    """Fitted exponent of ``||T^eps - T^0||`` against ``W_1`` over a sweep.

    1D families discretize ``U[0,1]`` with ``atoms_n`` atoms (default 200);
    2D families translate a seeded random target.  Returns one lower-bound
    report per sweep point and a final exponent report.
    """
    rho = reference_density(d, n)
    if d == 1:
        k = 200 if atoms_n is None else atoms_n
        base = ((np.arange(k) + 0.5) / k)[:, None]
    else:
        base = random_measure(np.random.default_rng([seed, 2]), 2).points
    mu0 = DiscreteMeasure(base) if d == 2 else DiscreteMeasure(base)
    e0 = embed(rho, mu0)
    reports, xs, ys = [], [], []
    for e in eps:
        mu1 = _family(kind, d, float(e), 0, base)
        r = check_map_stability(rho, mu0, mu1, regime, p=p, e0=e0,
                                inputs={"kind": kind, "d": d, "eps": float(e), "seed": seed, "n": rho.n})
        r.instance = f"{kind} d={d} eps={float(e):g}"
        reports.append(r)
        xs.append(r.aux["W1"])
        ys.append(r.aux["lot_distance"])
    fit = fit_holder_exponent(xs, ys)
    ex = map_exponent(regime, d, p=p)
    reports.append(make_report(f"map-{regime}-exponent", f"{kind} d={d}", ex - tolerance_exponent, fit.slope,
                               tolerance=0.0, aux={"slope": fit.slope, "intercept": fit.intercept,
                                                   "residual": fit.residual, "exponent": ex},
                               inputs={"kind": kind, "d": d, "seed": seed, "n": rho.n}))
    return reports


def bracket_sharpness_data(eps: Sequence[float], atoms_n: int = 200, n: int = 512):
    """Bracket and dual variance of ``U[0,1]`` against its ``eps``-shifts.

    Targets are ``atoms_n`` equal atoms at cell midpoints; the reference is
    ``U[0,1]`` on ``n`` cells.  Returns arrays ``(eps, bracket, variance)``.
    """
    rho = reference_density(1, n)
    base = ((np.arange(atoms_n) + 0.5) / atoms_n)[:, None]
    e0 = embed(rho, DiscreteMeasure(base))
    br, va = [], []
    for e in eps:
        e1 = embed(rho, DiscreteMeasure(base + float(e)))
        br.append(bracket(e0, e1, e0.measure, e1.measure))
        va.append(variance(*dual_difference(e0, e1)))
    return np.asarray(eps, dtype=float), np.asarray(br), np.asarray(va)


def check_bracket_sharpness(eps: Sequence[float] | None = None, atoms_n: int = 200, n: int = 512) -> list[CheckReport]:
    """The bracket and the dual variance scale like ``eps^2`` on the shift family.

    Slopes must be ``2 +- 0.1`` (bracket) and ``2 +- 0.15`` (variance).
    The continuum values are ``eps^2 - eps^3/3`` and
    ``eps^2/6 + eps^4/6 - eps^5/15``, recorded with the relative errors.
    """
    eps = np.round(np.arange(1, 11) * 0.02, 12) if eps is None else np.asarray(eps, dtype=float)
    e, br, va = bracket_sharpness_data(eps, atoms_n, n)
    fb, fv = fit_holder_exponent(e, br), fit_holder_exponent(e, va)
    exact_b = e ** 2 - e ** 3 / 3.0
    exact_v = e ** 2 / 6.0 + e ** 4 / 6.0 - e ** 5 / 15.0
    inputs = {"atoms": atoms_n, "n": n, "eps": [float(x) for x in e]}
    aux_b = {"slope": fb.slope, "max_rel_err_exact": float(np.max(np.abs(br / exact_b - 1))),
             "max_rel_err_eps2": float(np.max(np.abs(br / e ** 2 - 1)))}
    aux_v = {"slope": fv.slope, "max_rel_err_exact": float(np.max(np.abs(va / exact_v - 1))),
             "max_rel_err_eps2_6": float(np.max(np.abs(va / (e ** 2 / 6) - 1)))}
    return [
        make_report("sharpness-bracket", "shift family", abs(fb.slope - 2.0), 0.1, tolerance=0.0,
                    aux=aux_b, inputs=inputs),
        make_report("sharpness-variance", "shift family", abs(fv.slope - 2.0), 0.15, tolerance=0.0,
                    aux=aux_v, inputs=inputs),
    ]


# Brascamp-Lieb and the W2 gradient bound -----------------------------------------


def _gauss_nodes(a: float, b: float, n: int = 4096, order: int = 8):
    panels = max(1, int(math.ceil(n / order)))
    t, w = leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    return x, wt


def check_brascamp_lieb_1d(phi: Callable, d2phi: Callable, s: Callable, ds: Callable, interval,
                           *, nodes: int = 4096, tolerance: float = 1e-9, name: str = "") -> CheckReport:
    """``Var(s) <= E <s', s'/phi''>`` under ``e^{-phi} / Z`` on an interval.

    Composite 8-point Gauss-Legendre quadrature with at least ``nodes`` nodes.

    Raises
    ------
    NotStronglyConvex
        If ``phi''`` is not positive at every node.
    """
    if nodes < 4096:
        raise ValueError("quadrature needs at least 4096 nodes")
    a, b = interval
    x, w = _gauss_nodes(a, b, nodes)
    curv = np.asarray(d2phi(x), dtype=float)
    if np.any(~(curv > 0)):
        raise NotStronglyConvex("phi'' must be positive on the interval")
    f = np.asarray(phi(x), dtype=float)
    dens = np.exp(-(f - f.min()))
    Z = float(np.dot(w, dens))
    p = w * dens / Z
    sv = np.asarray(s(x), dtype=float) * np.ones_like(x)
    mean = float(np.dot(p, sv))
    lhs = float(np.dot(p, (sv - mean) ** 2))
    g = np.asarray(ds(x), dtype=float) * np.ones_like(x)
    rhs = float(np.dot(p, g * g / curv))
    return make_report("brascamp-lieb", name or f"[{a:g},{b:g}]", lhs, rhs, tolerance=tolerance,
                       aux={"log_Z": math.log(Z) - f.min(), "nodes": len(x)},
                       inputs={"interval": [a, b], "nodes": len(x)})


def check_w2_gradient_bound(mu0: GridDensity, mu1: GridDensity, f: Callable, df: Callable, Y,
                            *, tolerance: float = 1e-9, nodes: int = 4096) -> CheckReport:
    """``int f d(mu1 - mu0) <= sqrt(C_mu) ||f'||_{L^2(Y)} W_2(mu0, mu1)`` in 1D."""
    lhs = float(np.dot(mu1.masses, f(mu1.centers[:, 0])) - np.dot(mu0.masses, f(mu0.centers[:, 0])))
    C = max(float(mu0.M_rho), float(mu1.M_rho))
    x, w = _gauss_nodes(Y[0], Y[1], nodes)
    gn = math.sqrt(float(np.dot(w, np.asarray(df(x), dtype=float) ** 2 * np.ones_like(x))))
    W2 = wasserstein_1d(mu0, mu1, p=2)
    rhs = math.sqrt(C) * gn * W2
    return make_report("w2-gradient", f"Y=[{Y[0]:g},{Y[1]:g}]", lhs, rhs, tolerance=tolerance,
                       aux={"C_mu": C, "grad_norm": gn, "W2": W2},
                       inputs={"n0": mu0.n, "n1": mu1.n})


# density targets in 1D ------------------------------------------------------------


def check_density_targets_1d(kind: str = "shift", eps: Sequence[float] | None = None, n: int = 512,
                   tolerance_exponent: float = 0.05) -> list[CheckReport]:
    """Exponents of the map and potential distances against ``W_2`` for density targets.

    ``kind`` is ``shift`` (``U[eps, 1+eps]``) or ``dilation`` (``U[0, 1+eps]``),
    all compared with ``U[0,1]`` through the reference ``U[0,1]``.  Reports
    the implied constants of ``||T1 - T0|| / W_2^{1/5}`` and
    ``Var / W_2^{6/5}`` and the fitted slopes against the exponents 1/5
    and 6/5.
    """
    eps = np.round(np.arange(1, 11) * 0.02, 12) if eps is None else np.asarray(eps, dtype=float)
    rho = reference_density(1, n)
    mu0 = GridDensity(Interval(0.0, 1.0), n)
    e0 = embed(rho, mu0)
    W, D, V, out = [], [], [], []
    for e in eps:
        dom = Interval(e, 1.0 + e) if kind == "shift" else Interval(0.0, 1.0 + e)
        mu1 = GridDensity(dom, n)
        e1 = embed(rho, mu1)
        w2 = wasserstein_1d(mu0, mu1, p=2)
        dist = lot_distance(e0, e1)
        var = variance(*dual_difference(e0, e1))
        W.append(w2)
        D.append(dist)
        V.append(var)
        out.append(make_report("density-lower-bound", f"{kind} eps={e:g}", w2, dist, tolerance=0.0,
                               slack=2.0 * rho.spacing,
                               aux={"implied_map": dist / w2 ** 0.2, "implied_variance": var / w2 ** 1.2},
                               inputs={"kind": kind, "eps": float(e), "n": n}))
    fm, fv = fit_holder_exponent(W, D), fit_holder_exponent(W, V)
    common = {"kind": kind, "n": n}
    out.append(make_report("density-map-exponent", kind, 0.2 - tolerance_exponent, fm.slope, tolerance=0.0,
                           aux={"slope": fm.slope, "exponent": 0.2}, inputs=common))
    out.append(make_report("density-variance-exponent", kind, 1.2 - tolerance_exponent, fv.slope, tolerance=0.0,
                           aux={"slope": fv.slope, "exponent": 1.2}, inputs=common))
    return out


# Hoelder potentials ----------------------------------------------------------------


def check_morrey_potential(mu: DiscreteMeasure, p: float, *, n: int | None = None,
                           seed: int = 0) -> CheckReport:
    """Hoelder modulus of ``phi`` at exponent ``1 - d/p`` under grid refinement.

    The modulus at resolutions ``n`` and ``2n`` must be finite and agree
    within a factor of two; the implied constant is
    ``modulus / (M_p / m_rho)^{1/p}``.
    """
    d = mu.dim
    if not p > d:
        raise RegimeUnsupported("need p > d")
    alpha = 1.0 - d / p
    n = (256 if d == 1 else 64) if n is None else n
    mods = []
    for k in (n, 2 * n):
        rho = reference_density(d, k)
        e = embed(rho, mu)
        mods.append(holder_modulus(rho.centers, e.phi, alpha, seed=seed))
    rho = reference_density(d, n)
    scale = (moment(mu, p) / rho.m_rho) ** (1.0 / p)
    ratio = mods[1] / mods[0] if mods[0] > 0 else (1.0 if mods[1] == 0 else math.inf)
    stable = all(math.isfinite(m) for m in mods) and (mods[0] == 0 or 0.5 <= ratio <= 2.0)
    return make_report("morrey", _describe(mu), abs(math.log(ratio)) if ratio > 0 else 0.0, math.log(2.0),
                       tolerance=0.0, aux={"alpha": alpha, "modulus_n": mods[0], "modulus_2n": mods[1],
                                            "implied_constant": mods[1] / scale if scale > 0 else math.nan},
                       inputs={"n": n, "p": p, "seed": seed}, extra_pass=stable)


def check_erosion_lipschitz(e: EmbeddedMeasure, alpha: float, R: float, *, seed: int = 0) -> CheckReport:
    """``phi`` is ``R``-Lipschitz on the erosion by ``(M_alpha / R)^{1/(1-alpha)}``.

    ``M_alpha`` is measured on the cell centers together with the domain
    boundary; the Lipschitz constant on the erosion is exact for the
    max-affine potential.
    """
    if not 0 < alpha < 1:
        raise AlphaOutOfRange("alpha must be in (0, 1)")
    rho = e.rho
    X = rho.domain
    if rho.dim == 1:
        pts = np.concatenate([rho.edges, rho.centers[:, 0]])[:, None]
    else:
        pts = rho.centers
    vals = e.result.phi_at(pts)
    M = holder_modulus(pts, vals, alpha, seed=seed)
    eta = erosion_lipschitz_radius(M, alpha, R) if M > 0 else 0.0
    pot = e.result.dual.potential
    inst = f"alpha={alpha:g} R={R:g}"
    try:
        inner = erode(X, eta) if eta > 0 else X
    except EmptyErosion:
        return make_report("erosion-lipschitz", inst + " empty", 0.0, R, aux={"eta": eta, "M_alpha": M})
    lip = pot.lipschitz_constant(inner)
    return make_report("erosion-lipschitz", inst, lip, R, tolerance=1e-6,
                       aux={"eta": eta, "M_alpha": M}, inputs={"n": rho.n, "seed": seed})


# geometry ---------------------------------------------------------------------------


def check_boundary_slice(domain: ConvexDomain, eps: float, name: str = "") -> list[CheckReport]:
    """Boundary slice volume against the dilation slice and the radial bound."""
    s = erosion_slice_volume(domain, eps)
    b = erosion_volume_bound(domain, eps)
    out = [make_report("slice-radial-bound", f"{name} eps={eps:g}", s, b, tolerance=1e-12,
                       slack=1e-12, aux={"slice": s})]
    r, _ = domain.radii()
    if eps <= r:
        dv = dilation_slice_volume(domain, eps)
        out.append(make_report("slice-dilation", f"{name} eps={eps:g}", s, dv, tolerance=1e-12,
                               slack=1e-12, aux={"slice": s}))
    return out


# Moreau-Yosida -------------------------------------------------------------------------


def check_moreau_yosida(f: SampledFunction1D, lams: Sequence[float] = (1.0, 0.3, 0.1, 0.03, 0.01, 1e-3),
                        name: str = "") -> CheckReport:
    """Envelope properties on a convex piecewise-linear function.

    (i) ``f_lam <= f`` and ``f_lam`` increases to ``f`` as ``lam`` decreases;
    (ii) the envelope gradient is ``1/lam``-Lipschitz;
    (iii) ``f_lam' -> f'`` and (iv) ``|f_lam'| <= |f'|`` at piece midpoints.
    ``lhs`` is the largest violation found (zero when all hold).
    """
    xs = np.linspace(f.x[0], f.x[-1], 401)
    mids = 0.5 * (f.x[:-1] + f.x[1:])
    fx = f(xs)
    prev = None
    worst = 0.0
    conv = []
    grad_err = []
    for lam in sorted(lams, reverse=True):
        env = moreau_yosida(f, lam)
        val = env(xs)
        worst = max(worst, float(np.max(val - fx)))                       # (i) below f
        if prev is not None:
            worst = max(worst, float(np.max(prev - val)))                  # (i) monotone in lam
        prev = val
        worst = max(worst, gradient_lipschitz_bound(env) - 1.0 / lam - 1e-8)          # (ii)
        g = env.gradient(mids)
        worst = max(worst, float(np.max(np.abs(g) - np.abs(f.slopes))) - 1e-12)      # (iv)
        conv.append(float(np.max(fx - val)))
        grad_err.append(float(np.max(np.abs(g - f.slopes))))
    # (i)/(iii): errors vanish as lam -> 0; for PL functions they are O(lam)
    lam_min = min(lams)
    span = float(np.ptp(f.slopes)) + float(np.max(np.abs(f.slopes)))
    worst = max(worst, conv[-1] - lam_min * span ** 2)
    hmin = float(np.min(np.diff(f.x)))
    if lam_min * span < 0.5 * hmin:
        worst = max(worst, grad_err[-1])
    return make_report("moreau-yosida", name, max(worst, 0.0), 0.0, slack=1e-9,
                       aux={"final_gap": conv[-1], "final_gradient_error": grad_err[-1]})


# interpolation inequalities -------------------------------------------------------------


def check_gn_1d(u: SampledFunction1D, v: SampledFunction1D, name: str = "") -> CheckReport:
    lhs, rhs = crofton.gn_check_1d(u, v)
    return make_report("gn-1d", name, lhs, rhs, tolerance=1e-12)


def gn_sharpness_pair(L: float, eps: float) -> tuple[SampledFunction1D, SampledFunction1D]:
    """``u = L|x - 1/2|`` and ``v = max(u, eps)`` on ``[0, 1]``."""
    u = SampledFunction1D([0.0, 0.5, 1.0], [0.5 * L, 0.0, 0.5 * L])
    a = eps / L
    v = SampledFunction1D([0.0, 0.5 - a, 0.5 + a, 1.0], [0.5 * L, eps, eps, 0.5 * L])
    return u, v


def check_gn_sharpness(L: float, eps: float) -> CheckReport:
    """Closed forms for the sharpness pair: ``lhs = 2 L eps`` and ``||u - v||^2 = (2/3) eps^3 / L``."""
    u, v = gn_sharpness_pair(L, eps)
    lhs, rhs = crofton.gn_check_1d(u, v)
    l2sq = crofton.l2_distance_1d(u, v) ** 2
    err = max(abs(lhs - 2 * L * eps), abs(l2sq - (2.0 / 3.0) * eps ** 3 / L))
    return make_report("gn-sharpness", f"L={L:g} eps={eps:g}", lhs, rhs, tolerance=1e-12,
                       aux={"lhs_exact": 2 * L * eps, "l2_squared": l2sq,
                            "l2_squared_integral": (2.0 / 3.0) * eps ** 3 / L,
                            "l2_squared_stated": eps ** 3 / L, "closed_form_error": err},
                       extra_pass=err <= 1e-12)


def check_gn_nd(u, v, K: ConvexDomain, L: crofton.LineEnsemble, *, agreement: float = 0.03,
                name: str = "", n: int = 256) -> CheckReport:
    """Plane interpolation inequality with the composed constant.

    Passes when the grid ``lhs <= rhs`` and the line-integral ``lhs`` agrees
    with the grid value within ``agreement`` (relative).
    """
    rep = crofton.gn_check_nd(u, v, K, L, n=n)
    rel = abs(rep.lhs_lines - rep.lhs) / rep.lhs if rep.lhs > 1e-14 else abs(rep.lhs_lines - rep.lhs)
    return make_report("gn-nd", name, rep.lhs, rep.rhs, tolerance=1e-9,
                       aux={"lhs_lines": rep.lhs_lines, "rhs_lines": rep.rhs_lines, "l2": rep.l2,
                            "l2_lines": rep.l2_lines, "lip_u": rep.lip_u, "lip_v": rep.lip_v,
                            "constant": rep.constant, "line_agreement": rel},
                       inputs={"lines": len(L), "seed": L.seed, "n": n},
                       extra_pass=rel <= agreement)


def check_crofton(shape: str, n: int = 1_000_000, seed: int = 0, tolerance: float = 0.02) -> CheckReport:
    """Crofton boundary estimate of a standard shape against its exact value."""
    K, exact, center, R = _crofton_shape(shape)
    L = crofton.sample_lines(n, R, seed=seed, center=center)
    est, se = crofton.crofton_boundary(K, L, return_stderr=True)
    rel = abs(est - exact) / exact
    return make_report("crofton", shape, rel, tolerance, tolerance=0.0,
                       aux={"estimate": est, "stderr": se, "exact": exact},
                       inputs={"n": n, "seed": seed, "radius": R})


def _crofton_shape(shape: str):
    if shape == "square":
        return unit_square(), 4.0, (0.5, 0.5), 1.0
    if shape == "disk":
        return unit_disk(), 2.0 * math.pi, (0.0, 0.0), 1.25
    if shape == "segment":
        return Segment([-0.5, 0.0], [0.5, 0.0]), 2.0, (0.0, 0.0), 1.0
    raise ValueError(f"unknown shape {shape!r}")


def _describe(*ms) -> str:
    return " vs ".join(f"{len(m)} atoms" if isinstance(m, DiscreteMeasure) else "density" for m in ms)


# suite runner --------------------------------------------------------------------------


def _suite_strong(pairs):
    out = []
    for P in pairs:
        out.append(check_strong_convexity(P.rho, P.mu0, P.mu1, e0=P.e0, e1=P.e1, inputs=P.inputs))
    return out


def _suite_primal_dual(pairs):
    out = []
    for P in pairs:
        for p in (1, 2, 4):
            reps = check_primal_dual(P.rho, P.mu0, P.mu1, p, e0=P.e0, e1=P.e1, inputs=P.inputs)
            out.append(reps[0])
        out.append(reps[1])
    return out


def _suite_shift(pairs):
    return [check_shift_invariance(P.e0, P.e1, inputs=P.inputs) for P in pairs]


def _suite_w1(pairs):
    return [check_potential_stability(P.rho, P.mu0, P.mu1, "W1", e0=P.e0, e1=P.e1, inputs=P.inputs) for P in pairs]


def _suite_chi2(pairs):
    return [check_potential_stability(P.rho, P.mu0, P.mu1, "chi2", e0=P.e0, e1=P.e1, inputs=P.inputs)
            for P in pairs]


def _suite_gn_nd(pairs):
    L = crofton.sample_lines(4096, 0.75, seed=pairs[0].seed if pairs else 0, center=(0.5, 0.5), stratified=True)
    K = unit_square()
    out = []
    for P in pairs:
        out.append(check_gn_nd(P.e0.result.dual.potential, P.e1.result.dual.potential, K, L,
                               name=_describe(P.mu0, P.mu1)))
        out[-1].inputs.update(P.inputs)
    return out


def _suite_gn_1d(seed, count):
    rng = np.random.default_rng([seed, 51])
    return [check_gn_1d(random_convex_pl(rng), random_convex_pl(rng), name=f"pair {i}") for i in range(count)]


def _suite_gn_sharpness():
    return [check_gn_sharpness(L, e) for L in (0.5, 1.0, 2.0) for e in (0.05, 0.1)]


def _suite_geometry(seed):
    rng = np.random.default_rng([seed, 8])
    shapes = [("disk", unit_disk()), ("square", unit_square()), ("hexagon", random_convex_polygon(rng, 6))]
    out = []
    for name, K in shapes:
        r, _ = K.radii()
        for e in np.linspace(0.0, r, 21):
            out.extend(check_boundary_slice(K, float(e), name))
    return out


def _suite_brascamp_lieb():
    return [
        check_brascamp_lieb_1d(lambda x: 0.5 * x * x, lambda x: np.ones_like(x), lambda x: x,
                               lambda x: np.ones_like(x), (-6.0, 6.0), name="gaussian s=x"),
        check_brascamp_lieb_1d(lambda x: x ** 4, lambda x: 12 * x * x, lambda x: x * x,
                               lambda x: 2 * x, (-2.0, 2.0), name="quartic s=x^2"),
        check_brascamp_lieb_1d(lambda x: np.exp(x) + np.exp(-x), lambda x: np.exp(x) + np.exp(-x),
                               np.sin, np.cos, (-3.0, 3.0), name="exp-sum s=sin"),
        check_brascamp_lieb_1d(lambda x: 0.5 * x * x, lambda x: np.ones_like(x), lambda x: np.ones_like(x),
                               lambda x: np.zeros_like(x), (-6.0, 6.0), name="constant s"),
    ]


def _suite_moreau(seed, count):
    rng = np.random.default_rng([seed, 26])
    return [check_moreau_yosida(random_convex_pl(rng), name=f"f{i}") for i in range(count)]


def _suite_map(seed):
    eps = np.round(np.arange(1, 11) * 0.02, 12)
    out = []
    for kind in ("translation", "dilation"):
        for regime, p in (("compact16", None), ("moments", 4)):
            out.extend(check_map_sweep(kind, 1, eps, regime=regime, p=p, seed=seed))
    for regime, p in (("compact16", None), ("moments", 4)):
        out.extend(check_map_sweep("translation", 2, eps * 0.5, regime=regime, p=p, seed=seed))
    return out


def _suite_density_targets():
    return check_density_targets_1d("shift") + check_density_targets_1d("dilation")


def _suite_w2_gradient():
    n = 512
    base = GridDensity(Interval(0.0, 1.0), n)
    out = [check_w2_gradient_bound(base, GridDensity(Interval(0.1, 1.1), n), lambda y: y,
                                   lambda y: np.ones_like(y), (0.0, 1.1))]
    out.append(check_w2_gradient_bound(base, base, lambda y: y, lambda y: np.ones_like(y), (0.0, 1.0)))
    out.append(check_w2_gradient_bound(base, GridDensity(Interval(0.0, 1.2), n), np.sin, np.cos, (0.0, 1.2)))
    return out


def _suite_morrey(seed):
    rng = np.random.default_rng([seed, 34])
    out = []
    for d in (1, 2):
        for _ in range(3):
            out.append(check_morrey_potential(random_measure(rng, d), 4.0, seed=seed))
    return out


def _suite_erosion(pairs):
    out = []
    for P in pairs[:5]:
        for alpha in (0.5,):
            rho = P.rho
            pts = np.concatenate([rho.edges, rho.centers[:, 0]])[:, None] if rho.dim == 1 else rho.centers
            M = holder_modulus(pts, P.e0.result.phi_at(pts), alpha)
            for factor in (1.5, 3.0, 6.0):
                out.append(check_erosion_lipschitz(P.e0, alpha, factor * M))
    return out


def _suite_crofton(seed, n):
    return [check_crofton(s, n, seed) for s in ("square", "disk", "segment")]


CHECKS = {
    "sharpness-1d": "bracket and dual variance exponents on the shift family",
    "strong-convexity": "dual variance against the bracket",
    "shift-invariance": "variance and bracket under potential shifts",
    "primal-dual": "L^p comparison of primal and dual differences, variance chain",
    "potential-w1": "potential stability in W_1 form",
    "potential-chi2": "potential stability in chi-squared form",
    "map-stability": "map exponents on translation and dilation sweeps",
    "density-targets": "density-target exponents against W_2",
    "w2-gradient": "W_2 duality against gradients",
    "morrey": "Hoelder modulus of potentials under refinement",
    "erosion-lipschitz": "Lipschitz constant on erosions",
    "geometry": "boundary slice volumes",
    "brascamp-lieb": "Brascamp-Lieb inequality by quadrature",
    "moreau-yosida": "Moreau-Yosida envelope properties",
    "gn-1d": "1D interpolation inequality on random convex pairs",
    "gn-sharpness": "closed forms of the 1D sharpness pair",
    "gn-nd": "plane interpolation inequality on solved potentials",
    "crofton": "Crofton boundary estimates",
}


class _PairCache:
    def __init__(self, seed: int, size: int):
        self.seed, self.size = seed, size
        self._store = {}

    def get(self, d: int, common: bool = False) -> list[Pair]:
        key = (d, common)
        if key not in self._store:
            self._store[key] = suite_pairs(self.size, d, self.seed, common_support=common)
        return self._store[key]

    def both(self) -> list[Pair]:
        return self.get(1) + self.get(2)


def run_check(check_id: str, seed: int = 0, size: int = 50, cache: _PairCache | None = None,
              crofton_lines: int = 1_000_000) -> list[CheckReport]:
    """Run one named check family; ``size`` is the number of random pairs per dimension."""
    if check_id not in CHECKS:
        raise KeyError(f"unknown check {check_id!r}")
    cache = _PairCache(seed, size) if cache is None else cache
    if check_id == "sharpness-1d":
        return check_bracket_sharpness()
    if check_id == "strong-convexity":
        return _suite_strong(cache.both())
    if check_id == "shift-invariance":
        return _suite_shift(cache.both())
    if check_id == "primal-dual":
        return _suite_primal_dual(cache.both())
    if check_id == "potential-w1":
        return _suite_w1(cache.both())
    if check_id == "potential-chi2":
        return _suite_chi2(cache.get(1, True) + cache.get(2, True))
    if check_id == "map-stability":
        return _suite_map(seed)
    if check_id == "density-targets":
        return _suite_density_targets()
    if check_id == "w2-gradient":
        return _suite_w2_gradient()
    if check_id == "morrey":
        return _suite_morrey(seed)
    if check_id == "erosion-lipschitz":
        return _suite_erosion(cache.get(1) + cache.get(2))
    if check_id == "geometry":
        return _suite_geometry(seed)
    if check_id == "brascamp-lieb":
        return _suite_brascamp_lieb()
    if check_id == "moreau-yosida":
        return _suite_moreau(seed, max(size, 20))
    if check_id == "gn-1d":
        return _suite_gn_1d(seed, max(10 * size, 100))
    if check_id == "gn-sharpness":
        return _suite_gn_sharpness()
    if check_id == "gn-nd":
        return _suite_gn_nd(cache.get(2)[: max(1, size // 5)])
    if check_id == "crofton":
        return _suite_crofton(seed, crofton_lines)
    raise AssertionError(check_id)


def run_all(seed: int = 0, size: int = 50, crofton_lines: int = 1_000_000,
            checks: Iterable[str] | None = None) -> dict[str, list[CheckReport]]:
    """Run every check family (in a fixed order) sharing the random pairs."""
    cache = _PairCache(seed, size)
    out = {}
    for cid in (CHECKS if checks is None else checks):
        log.info("running %s", cid)
        out[cid] = run_check(cid, seed, size, cache, crofton_lines)
    return out
