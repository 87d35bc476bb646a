"""Integral geometry in the plane: random lines, Crofton counting, line
restrictions, and the interpolation inequalities along lines.

Line measure convention
-----------------------
Lines are ``x = c + s e_perp + t e`` with ``e`` uniform on the circle and
``s`` uniform in ``[-R, R]``; each of ``n`` lines carries the weight
``2 pi * 2R / n`` of the measure ``de ds`` (every unoriented line counted
once per orientation).  For this measure a convex body meets
``int #(l cap boundary) dl = 4 * perimeter``, so the boundary estimator
divides by ``2 V_1 = 4``.  The integral identities use
``int f^2 = (1/S_1) int int_l f^2`` and, for vector fields,
``int |F|^2 = C'_2 int int_l <F, e>^2`` with ``C'_2 = 1/pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .constants import ball_volume, gagliardo_nirenberg_constant, sphere_area, vector_field_constant
from .convexfun import MaxAffinePotential, SampledFunction1D
from .errors import BoundingMismatch, NoIntersection, NotConvex, NotConvexAlongLine
from .geometry import Ball, Box, ConvexDomain, Polygon, Segment
from .measures import GridDensity

__all__ = [
    "LineEnsemble",
    "GridFunction2D",
    "GNReport",
    "sample_lines",
    "crofton_boundary",
    "fubini_area",
    "line_restriction",
    "gn_check_1d",
    "gn_check_nd",
    "l2_distance_1d",
    "integral_identity_check",
    "calibrate_vector_constant",
]


@dataclass(frozen=True)
class LineEnsemble:
    """Lines ``center + offsets + t directions`` with equal measure weight."""

    directions: np.ndarray
    offsets: np.ndarray
    center: np.ndarray
    radius: float
    seed: int | None
    weight: float

    def __len__(self):
        return len(self.directions)

    @property
    def total_measure(self) -> float:
        return 2.0 * math.pi * 2.0 * self.radius

    @property
    def base_points(self) -> np.ndarray:
        return self.center + self.offsets

    def transformed(self, rotation=None, translation=(0.0, 0.0)) -> "LineEnsemble":
        """Image of the ensemble under the rigid motion ``x -> Q x + b``."""
        Q = np.eye(2) if rotation is None else np.asarray(rotation, dtype=float)
        b = np.asarray(translation, dtype=float)
        return LineEnsemble(self.directions @ Q.T, self.offsets @ Q.T, Q @ self.center + b,
                            self.radius, self.seed, self.weight)


def sample_lines(n: int, radius: float, seed: int | None = 0, center=(0.0, 0.0),
                 stratified: bool = False) -> LineEnsemble:
    """Random lines meeting the disk ``B(center, radius)``.

    Parameters
    ----------
    n : int
        Number of lines (``stratified`` rounds it to a square number).
    radius : float
    seed : int
    center : array_like
    stratified : bool
        Jittered grid over (angle, offset) instead of i.i.d. draws.
    """
    if n < 1:
        raise ValueError("need at least one line")
    if not radius > 0:
        raise ValueError("radius must be positive")
    rng = np.random.default_rng(seed)
    if stratified:
        k = max(1, int(round(math.sqrt(n))))
        n = k * k
        i, j = np.meshgrid(np.arange(k), np.arange(k), indexing="ij")
        u = (i.ravel() + rng.random(n)) / k
        v = (j.ravel() + rng.random(n)) / k
    else:
        u = rng.random(n)
        v = rng.random(n)
    theta = 2.0 * math.pi * u
    s = radius * (2.0 * v - 1.0)
    E = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    P = s[:, None] * np.stack([-E[:, 1], E[:, 0]], axis=1)
    return LineEnsemble(E, P, np.asarray(center, dtype=float).reshape(2), float(radius), seed,
                        2.0 * math.pi * 2.0 * radius / n)


def _check_bounding(K, L: LineEnsemble):
    c, R = L.center, L.radius
    tol = 1e-12 * max(1.0, R)
    if isinstance(K, Ball):
        far = np.linalg.norm(K.center - c) + K.radius
    elif isinstance(K, Polygon):
        far = np.linalg.norm(K.vertices - c, axis=1).max()
    elif isinstance(K, Segment):
        far = max(np.linalg.norm(K.a - c), np.linalg.norm(K.b - c))
    else:
        raise TypeError(f"unsupported body {type(K).__name__}")
    if far > R + tol:
        raise BoundingMismatch(f"body reaches distance {far:.6g} > ensemble radius {R:.6g}")


def _chords(K, L: LineEnsemble):
    return K.chord(L.base_points, L.directions)


def crofton_boundary(K, L: LineEnsemble, return_stderr: bool = False):
    """Monte Carlo boundary length ``(1 / 2V_1) int #(l cap dK) dl``.

    A line meeting a convex body crosses its boundary twice (tangency has
    measure zero); for a segment both sides are counted.
    """
    _check_bounding(K, L)
    t0, _ = _chords(K, L)
    counts = np.where(np.isnan(t0), 0.0, 2.0)
    X = counts * L.total_measure / (2.0 * ball_volume(1))
    est = float(X.mean())
    if return_stderr:
        return est, float(X.std(ddof=1) / math.sqrt(len(X))) if len(X) > 1 else float("inf")
    return est


def fubini_area(K, direction, n: int, radius: float, center=(0.0, 0.0), seed: int | None = None) -> float:
    """Area as the integral of chord lengths over parallel lines.

    Offsets use the midpoint rule on ``[-radius, radius]``, or uniform
    random offsets when ``seed`` is given.
    """
    e = np.asarray(direction, dtype=float).reshape(2)
    e = e / np.linalg.norm(e)
    if seed is None:
        s = radius * (2.0 * (np.arange(n) + 0.5) / n - 1.0)
    else:
        s = radius * (2.0 * np.random.default_rng(seed).random(n) - 1.0)
    P = np.asarray(center, dtype=float) + s[:, None] * np.array([-e[1], e[0]])
    t0, t1 = K.chord(P, np.tile(e, (n, 1)))
    length = np.where(np.isnan(t0), 0.0, t1 - t0)
    return float(length.sum() * 2.0 * radius / n)


class GridFunction2D:
    """Values at the cell centers of an ``n x n`` grid over a box.

    Evaluation is bilinear (linear extrapolation within the outer half
    cell); gradients at the centers use central differences.
    """

    def __init__(self, box: Box, values: np.ndarray):
        V = np.asarray(values, dtype=float)
        if V.ndim != 2:
            raise ValueError("values must be a 2D array indexed [row (x2), column (x1)]")
        self.box = box
        ny, nx = V.shape
        self.x = box.lo[0] + (np.arange(nx) + 0.5) * (box.hi[0] - box.lo[0]) / nx
        self.y = box.lo[1] + (np.arange(ny) + 0.5) * (box.hi[1] - box.lo[1]) / ny
        self.values = V
        self._interp = RegularGridInterpolator((self.y, self.x), V, method="linear",
                                               bounds_error=False, fill_value=None)
        gy, gx = np.gradient(V, self.y, self.x)
        self._gx, self._gy = gx, gy

    @classmethod
    def from_callable(cls, box: Box, n: int, f) -> "GridFunction2D":
        x = box.lo[0] + (np.arange(n) + 0.5) * (box.hi[0] - box.lo[0]) / n
        y = box.lo[1] + (np.arange(n) + 0.5) * (box.hi[1] - box.lo[1]) / n
        X, Y = np.meshgrid(x, y)
        vals = np.asarray(f(np.stack([X.ravel(), Y.ravel()], axis=1)), dtype=float).reshape(n, n)
        return cls(box, vals)

    @property
    def spacing(self) -> float:
        return float(max(self.x[1] - self.x[0], self.y[1] - self.y[0]))

    def __call__(self, P) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=float))
        return self._interp(P[:, ::-1])

    def grid_gradient(self) -> np.ndarray:
        """Central-difference gradient at the centers, shape ``(ny*nx, 2)``."""
        return np.stack([self._gx.ravel(), self._gy.ravel()], axis=1)

    def centers(self) -> np.ndarray:
        X, Y = np.meshgrid(self.x, self.y)
        return np.stack([X.ravel(), Y.ravel()], axis=1)


def line_restriction(f, line, K: ConvexDomain, step: float) -> SampledFunction1D:
    """Samples of ``f`` along ``line cap K`` in arc length.

    Parameters
    ----------
    f : callable
        Function of points ``(M, 2)``; grid functions interpolate
        bilinearly.
    line : tuple
        ``(point, direction)`` with a unit direction.
    K : ConvexDomain
    step : float
        Target sample spacing; the segment is split into equal steps.

    Returns
    -------
    SampledFunction1D
        On ``[0, |l cap K|]``; for convex ``K`` the intersection is a single
        segment.

    Raises
    ------
    NoIntersection
    """
    p, e = (np.asarray(v, dtype=float).reshape(2) for v in line)
    t0, t1 = K.chord(p[None], e[None])
    if np.isnan(t0[0]) or not t1[0] > t0[0]:
        raise NoIntersection("line does not meet the domain")
    length = float(t1[0] - t0[0])
    m = max(1, int(math.ceil(length / step)))
    t = np.linspace(0.0, length, m + 1)
    pts = p + (t0[0] + t)[:, None] * e
    return SampledFunction1D(t, np.asarray(f(pts), dtype=float).reshape(-1))


# Gagliardo-Nirenberg type inequalities ----------------------------------------


def _merged(u: SampledFunction1D, v: SampledFunction1D):
    if not (np.isclose(u.x[0], v.x[0], rtol=0, atol=1e-12) and np.isclose(u.x[-1], v.x[-1], rtol=0, atol=1e-12)):
        raise ValueError("functions must live on the same segment")
    xs = np.unique(np.concatenate([u.x, v.x]))
    return xs, u(xs), v(xs)


def l2_distance_1d(u: SampledFunction1D, v: SampledFunction1D) -> float:
    """Exact ``||u - v||_{L^2}`` for piecewise-linear functions."""
    xs, fu, fv = _merged(u, v)
    D = fu - fv
    dx = np.diff(xs)
    return float(math.sqrt(max(np.sum(dx * (D[:-1] ** 2 + D[:-1] * D[1:] + D[1:] ** 2) / 3.0), 0.0)))


def gn_check_1d(u: SampledFunction1D, v: SampledFunction1D) -> tuple[float, float]:
    """``||u' - v'||^2`` and ``8 (|u'|_inf + |v'|_inf)^{4/3} ||u - v||^{2/3}``.

    Raises
    ------
    NotConvex
        If ``u`` or ``v`` has a second difference below ``-1e-10``.
    """
    if not (u.is_convex(1e-10) and v.is_convex(1e-10)):
        raise NotConvex("gn_check_1d needs convex functions")
    xs, fu, fv = _merged(u, v)
    dx = np.diff(xs)
    su, sv = np.diff(fu) / dx, np.diff(fv) / dx
    lhs = float(np.sum((su - sv) ** 2 * dx))
    l2 = l2_distance_1d(u, v)
    rhs = 8.0 * (u.lipschitz() + v.lipschitz()) ** (4.0 / 3.0) * l2 ** (2.0 / 3.0)
    return lhs, float(rhs)


@dataclass
class GNReport:
    """Both sides of the plane interpolation inequality, two ways.

    ``lhs``/``rhs`` use the grid quadrature; ``lhs_lines``/``rhs_lines``
    use the line integrals of the same quantities.
    """

    lhs: float
    rhs: float
    lhs_lines: float
    rhs_lines: float
    l2: float
    l2_lines: float
    lip_u: float
    lip_v: float
    boundary: float
    constant: float
    extra: dict = field(default_factory=dict)


def _lipschitz(f, K, pts):
    if isinstance(f, MaxAffinePotential):
        return f.lipschitz_constant(K)
    if isinstance(f, GridFunction2D):
        g = f.grid_gradient()
        inside = K.contains(f.centers())
        return float(np.linalg.norm(g[inside], axis=1).max())
    g = f.gradient(pts)
    return float(np.linalg.norm(g, axis=1).max())


def _gradient(f, pts):
    if isinstance(f, GridFunction2D):
        return None
    return f.gradient(pts) if hasattr(f, "gradient") else None


def gn_check_nd(u, v, K: ConvexDomain, L: LineEnsemble, *, n: int = 256,
                step: float | None = None, convexity_tol: float = 1e-10) -> GNReport:
    """Interpolation inequality ``||grad(u - v)||^2 <= C H(dK)^{2/3} (...)`` in the plane.

    Parameters
    ----------
    u, v : MaxAffinePotential, GridFunction2D, or objects with
        ``__call__(points)`` and ``gradient(points)``
    K : ConvexDomain
    L : LineEnsemble
        Lines used for the line-integral versions and convexity checks.
    n : int
        Resolution of the grid quadrature over ``K``.
    step : float, optional
        Sampling step along lines, default half the quadrature spacing.

    Raises
    ------
    NotConvexAlongLine
        With the index of the first line where ``u`` or ``v`` fails convexity.
    """
    _check_bounding(K, L)
    quad = GridDensity(K, n)
    pts, vol = quad.centers, quad.volumes
    du = u(pts) - v(pts)
    gu, gv = _gradient(u, pts), _gradient(v, pts)
    if gu is None or gv is None:
        if not (isinstance(u, GridFunction2D) and isinstance(v, GridFunction2D)):
            raise TypeError("mixed grid and analytic functions are not supported")
        gdiff = u.grid_gradient() - v.grid_gradient()
        inside = K.contains(u.centers())
        w_cells = np.full(inside.sum(), u.spacing ** 2)
        lhs = float(np.sum(w_cells * np.einsum("nd,nd->n", gdiff[inside], gdiff[inside])))
    else:
        gd = gu - gv
        lhs = float(np.sum(vol * np.einsum("nd,nd->n", gd, gd)))
    l2 = float(math.sqrt(max(np.sum(vol * du * du), 0.0)))
    lip_u, lip_v = _lipschitz(u, K, pts), _lipschitz(v, K, pts)
    H = K.boundary_measure
    C = gagliardo_nirenberg_constant(2)
    rhs = C * H ** (2.0 / 3.0) * (lip_u + lip_v) ** (4.0 / 3.0) * l2 ** (2.0 / 3.0)

    # line integrals
    step = 0.5 * quad.spacing if step is None else step
    t0, t1 = _chords(K, L)
    hit = np.nonzero(~np.isnan(t0) & (t1 > t0))[0]
    Ilhs = np.zeros(len(L))
    Il2 = np.zeros(len(L))
    B = L.base_points
    for idx in np.array_split(hit, max(1, len(hit) // 256)):
        if len(idx) == 0:
            continue
        lengths = t1[idx] - t0[idx]
        m = np.maximum(1, np.ceil(lengths / step).astype(int))
        line_id = np.repeat(np.arange(len(idx)), m + 1)
        local = np.concatenate([np.arange(k + 1) for k in m])
        h = lengths / m
        tt = t0[idx][line_id] + local * h[line_id]
        P = B[idx][line_id] + tt[:, None] * L.directions[idx][line_id]
        fu_, fv_ = u(P), v(P)
        # convexity of each restriction from second differences at interior nodes
        interior = (line_id[:-2] == line_id[2:]) if len(line_id) > 2 else np.zeros(0, dtype=bool)
        for f_name, fvals in (("u", fu_), ("v", fv_)):
            d2 = fvals[2:] - 2.0 * fvals[1:-1] + fvals[:-2]
            scale = np.maximum(1.0, np.abs(fvals[1:-1]))
            bad = interior & (d2 < -convexity_tol * scale)
            if bad.any():
                k = int(idx[line_id[int(np.nonzero(bad)[0][0]) + 1]])
                raise NotConvexAlongLine(f"{f_name} is not convex along line {k}", line=k)
        # midpoint values for the integrals
        diff = fu_ - fv_
        mid_mask = local < m[line_id]
        mids = P[mid_mask] + 0.5 * h[line_id][mid_mask][:, None] * L.directions[idx][line_id][mid_mask]
        lid = line_id[mid_mask]
        wmid = h[lid]
        dm = u(mids) - v(mids)
        gu_m, gv_m = _gradient(u, mids), _gradient(v, mids)
        if gu_m is None or gv_m is None:
            nxt = np.nonzero(mid_mask)[0] + 1
            dd = (diff[nxt] - diff[np.nonzero(mid_mask)[0]]) / wmid
        else:
            dd = np.einsum("nd,nd->n", gu_m - gv_m, L.directions[idx][lid])
        Ilhs[idx] = np.bincount(lid, dd * dd * wmid, minlength=len(idx))
        Il2[idx] = np.bincount(lid, dm * dm * wmid, minlength=len(idx))
    lhs_lines = vector_field_constant(2) * L.weight * float(Ilhs.sum())
    l2_lines = math.sqrt(max(L.weight * float(Il2.sum()) / sphere_area(1), 0.0))
    H_lines = crofton_boundary(K, L)
    rhs_lines = C * H_lines ** (2.0 / 3.0) * (lip_u + lip_v) ** (4.0 / 3.0) * l2_lines ** (2.0 / 3.0)
    return GNReport(lhs, float(rhs), lhs_lines, float(rhs_lines), l2, l2_lines, lip_u, lip_v, H, C,
                    {"lines_hit": int(len(hit)), "boundary_lines": H_lines})


def integral_identity_check(f, K: ConvexDomain, L: LineEnsemble, *, n: int = 512,
                            step: float | None = None, vector: bool | None = None,
                            constant: float | None = None) -> tuple[float, float]:
    """Direct ``int_K |f|^2`` against its line-integral representation.

    Scalar ``f`` uses ``(1/S_1) int int_l f^2``; vector fields (values of
    shape ``(M, 2)``) use ``C'_2 int int_l <F, e>^2`` with the stored
    constant unless ``constant`` is given.
    """
    _check_bounding(K, L)
    quad = GridDensity(K, n)
    vals = np.asarray(f(quad.centers), dtype=float)
    if vector is None:
        vector = vals.ndim == 2 and vals.shape[1] == 2
    sq = np.einsum("nd,nd->n", vals, vals) if vector else vals.reshape(-1) ** 2
    direct = float(np.sum(quad.volumes * sq))
    step = 0.5 * quad.spacing if step is None else step
    t0, t1 = _chords(K, L)
    hit = np.nonzero(~np.isnan(t0) & (t1 > t0))[0]
    total = 0.0
    B = L.base_points
    for idx in np.array_split(hit, max(1, len(hit) // 512)):
        if len(idx) == 0:
            continue
        lengths = t1[idx] - t0[idx]
        m = np.maximum(1, np.ceil(lengths / step).astype(int))
        lid = np.repeat(np.arange(len(idx)), m)
        local = np.concatenate([np.arange(k) for k in m])
        h = lengths / m
        tt = t0[idx][lid] + (local + 0.5) * h[lid]
        P = B[idx][lid] + tt[:, None] * L.directions[idx][lid]
        fv = np.asarray(f(P), dtype=float)
        if vector:
            g = np.einsum("nd,nd->n", fv, L.directions[idx][lid]) ** 2
        else:
            g = fv.reshape(-1) ** 2
        total += float(np.sum(g * h[lid]))
    if vector:
        c = vector_field_constant(2) if constant is None else constant
        line = c * L.weight * total
    else:
        line = L.weight * total / sphere_area(1)
    return direct, float(line)


def calibrate_vector_constant(L: LineEnsemble, n: int = 256) -> float:
    """Estimate ``C'_2`` from the unit field ``(1, 0)`` on the unit square."""
    sq = Box([0.0, 0.0], [1.0, 1.0])
    direct, line = integral_identity_check(lambda P: np.tile([1.0, 0.0], (len(P), 1)), sq, L,
                                           n=n, vector=True, constant=1.0)
    return direct / line
