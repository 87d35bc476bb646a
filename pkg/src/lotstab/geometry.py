"""Compact convex domains in one and two dimensions.

Every domain carries a reference point in its interior; radii and the
radial function are measured from it.  Domains are immutable.

Supported shapes: :class:`Interval`, :class:`Box` (axis aligned,
2D), :class:`Polygon` (convex, counterclockwise), :class:`Ball` (2D disk),
and :class:`Rounded`, the Minkowski sum of a polygon and a disk, which is
what dilating a polygon produces.  :class:`Segment` is a degenerate body
used only for line counting.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .constants import sphere_area
from .errors import EmptyErosion, InvalidDomain

__all__ = [
    "ConvexDomain",
    "Interval",
    "Box",
    "Polygon",
    "Ball",
    "Rounded",
    "Segment",
    "erode",
    "dilate",
    "radii",
    "radial_function",
    "erosion_volume_bound",
    "erosion_slice_volume",
    "dilation_slice_volume",
    "clip_halfplane",
    "random_convex_polygon",
    "domain_from_spec",
]


def _tol(scale: float) -> float:
    return 1e-12 * max(1.0, abs(scale) / 10.0)


def clip_halfplane(poly: np.ndarray, normal, offset: float, tol: float = 0.0) -> np.ndarray:
    """Intersect a convex polygon with ``{x : <normal, x> <= offset}``.

    Parameters
    ----------
    poly : ndarray, shape (k, 2)
        Vertices in counterclockwise order (``k`` may be 0).
    normal : array_like, shape (2,)
    offset : float
    tol : float
        Vertices with signed distance below ``tol`` count as inside.

    Returns
    -------
    ndarray, shape (k', 2)
        The clipped polygon, counterclockwise, possibly empty.
    """
    if len(poly) == 0:
        return poly
    s = poly @ np.asarray(normal, dtype=float) - offset
    inside = s <= tol
    if inside.all():
        return poly
    if not inside.any():
        return poly[:0]
    out = []
    k = len(poly)
    for i in range(k):
        j = (i + 1) % k
        p, q = poly[i], poly[j]
        sp, sq = s[i], s[j]
        if inside[i]:
            out.append(p)
        if inside[i] != inside[j]:
            t = sp / (sp - sq)
            out.append(p + t * (q - p))
    if not out:
        return poly[:0]
    return np.array(out)


def _dedupe(poly: np.ndarray, tol: float) -> np.ndarray:
    if len(poly) < 2:
        return poly
    keep = np.linalg.norm(poly - np.roll(poly, -1, axis=0), axis=1) > tol
    if not keep.any():
        return poly[:1]
    return poly[keep]


def _shoelace(poly: np.ndarray) -> float:
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _point_polygon_distance(points: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Euclidean distance from points to a convex polygon (0 inside)."""
    a = verts
    b = np.roll(verts, -1, axis=0)
    ab = b - a
    ap = points[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("mkd,kd->mk", ap, ab) / np.einsum("kd,kd->k", ab, ab), 0.0, 1.0)
    proj = a[None] + t[..., None] * ab[None]
    dist = np.linalg.norm(points[:, None, :] - proj, axis=2).min(axis=1)
    n = np.stack([ab[:, 1], -ab[:, 0]], axis=1) / np.linalg.norm(ab, axis=1)[:, None]
    inside = np.all(points @ n.T - np.einsum("kd,kd->k", n, a) <= 0.0, axis=1)
    return np.where(inside, 0.0, dist)


class ConvexDomain:
    """Abstract compact convex domain with an interior reference point."""

    dim: int
    reference: np.ndarray

    # geometry ---------------------------------------------------------
    @property
    def volume(self) -> float:
        raise NotImplementedError

    @property
    def boundary_measure(self) -> float:
        """``H^{d-1}(boundary)``: number of endpoints in 1D, perimeter in 2D."""
        raise NotImplementedError

    @property
    def diameter(self) -> float:
        raise NotImplementedError

    @property
    def inradius(self) -> float:
        """Radius of the largest ball contained in the domain."""
        raise NotImplementedError

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Axis-aligned bounding box ``(lo, hi)``."""
        raise NotImplementedError

    @property
    def scale(self) -> float:
        lo, hi = self.bounds
        return float(max(np.abs(lo).max(), np.abs(hi).max(), 1.0))

    def contains(self, points, tol: float | None = None) -> np.ndarray:
        raise NotImplementedError

    def radii(self) -> tuple[float, float]:
        raise NotImplementedError

    def radial(self, u) -> float:
        raise NotImplementedError

    def chord(self, points, directions) -> tuple[np.ndarray, np.ndarray]:
        """Parameters ``t0 <= t1`` where lines ``p + t e`` meet the domain.

        Lines missing the domain get ``nan``.
        """
        raise NotImplementedError

    def with_reference(self, reference) -> "ConvexDomain":
        raise NotImplementedError

    def _check_reference(self):
        ref = self.reference
        if ref.shape != (self.dim,) or not np.all(np.isfinite(ref)):
            raise InvalidDomain("reference point has wrong shape")
        r, _ = self.radii()
        if r <= _tol(self.scale):
            raise InvalidDomain("reference point must lie in the interior")

    def describe(self) -> dict:
        raise NotImplementedError


class Interval(ConvexDomain):
    """Closed interval ``[a, b]``."""

    def __init__(self, a: float, b: float, reference: float | None = None):
        a, b = float(a), float(b)
        if not (np.isfinite(a) and np.isfinite(b)) or not a < b:
            raise InvalidDomain("interval endpoints must satisfy a < b")
        self.a, self.b = a, b
        self.dim = 1
        ref = 0.5 * (a + b) if reference is None else float(np.ravel(reference)[0])
        self.reference = np.array([ref])
        self._check_reference()

    def __repr__(self):
        return f"Interval({self.a!r}, {self.b!r})"

    @property
    def volume(self):
        return self.b - self.a

    @property
    def boundary_measure(self):
        return 2.0

    @property
    def diameter(self):
        return self.b - self.a

    @property
    def inradius(self):
        return 0.5 * (self.b - self.a)

    @property
    def bounds(self):
        return np.array([self.a]), np.array([self.b])

    def contains(self, points, tol=None):
        x = np.asarray(points, dtype=float).reshape(-1)
        tol = _tol(self.scale) if tol is None else tol
        return (x >= self.a - tol) & (x <= self.b + tol)

    def radii(self):
        c = self.reference[0]
        lo, hi = c - self.a, self.b - c
        return min(lo, hi), max(lo, hi)

    def radial(self, u):
        u = float(np.ravel(u)[0])
        if u == 0:
            raise ValueError("direction must be nonzero")
        return self.b - self.reference[0] if u > 0 else self.reference[0] - self.a

    def with_reference(self, reference):
        return Interval(self.a, self.b, reference)

    def describe(self):
        return {"kind": "interval", "params": [self.a, self.b]}


class Polygon(ConvexDomain):
    """Convex polygon with counterclockwise vertices.

    Parameters
    ----------
    vertices : array_like, shape (k, 2)
        Vertices in convex position, counterclockwise, ``k >= 3``.
    reference : array_like, optional
        Interior reference point; defaults to the centroid.
    """

    def __init__(self, vertices, reference=None):
        V = np.asarray(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 2 or len(V) < 3 or not np.all(np.isfinite(V)):
            raise InvalidDomain("polygon needs at least 3 finite 2D vertices")
        self.vertices = V
        self.dim = 2
        tol = _tol(float(np.abs(V).max()))
        area = _shoelace(V)
        if area <= tol:
            raise InvalidDomain("polygon vertices must be counterclockwise with positive area")
        e = np.roll(V, -1, axis=0) - V
        if np.any(np.linalg.norm(e, axis=1) <= tol):
            raise InvalidDomain("repeated polygon vertex")
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if np.any(cross < -tol * np.linalg.norm(e, axis=1) * np.linalg.norm(np.roll(e, -1, axis=0), axis=1)):
            raise InvalidDomain("polygon vertices are not in convex position")
        lens = np.linalg.norm(e, axis=1)
        self.normals = np.stack([e[:, 1], -e[:, 0]], axis=1) / lens[:, None]
        self.offsets = np.einsum("kd,kd->k", self.normals, V)
        self._area = area
        self._perimeter = float(lens.sum())
        if reference is None:
            x, y = V[:, 0], V[:, 1]
            xn, yn = np.roll(x, -1), np.roll(y, -1)
            c = x * yn - xn * y
            reference = np.array([((x + xn) * c).sum(), ((y + yn) * c).sum()]) / (6.0 * area)
        self.reference = np.asarray(reference, dtype=float).reshape(2)
        self._check_reference()

    def __repr__(self):
        return f"Polygon({self.vertices.tolist()!r})"

    @property
    def volume(self):
        return self._area

    @property
    def boundary_measure(self):
        return self._perimeter

    @property
    def diameter(self):
        d = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.sqrt((d**2).sum(axis=2)).max())

    @property
    def inradius(self):
        # Chebyshev center: max r s.t. <n_i, c> + r <= b_i
        A = np.hstack([self.normals, np.ones((len(self.normals), 1))])
        res = linprog(c=[0.0, 0.0, -1.0], A_ub=A, b_ub=self.offsets,
                      bounds=[(None, None), (None, None), (0, None)], method="highs")
        return float(res.x[2])

    @property
    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def contains(self, points, tol=None):
        P = np.atleast_2d(np.asarray(points, dtype=float))
        tol = _tol(self.scale) if tol is None else tol
        return np.all(P @ self.normals.T - self.offsets <= tol, axis=1)

    def radii(self):
        r = float(np.min(self.offsets - self.normals @ self.reference))
        R = float(np.linalg.norm(self.vertices - self.reference, axis=1).max())
        return r, R

    def radial(self, u):
        u = np.asarray(u, dtype=float).reshape(2)
        u = u / np.linalg.norm(u)
        nu = self.normals @ u
        gap = self.offsets - self.normals @ self.reference
        pos = nu > 0
        return float(np.min(gap[pos] / nu[pos]))

    def chord(self, points, directions):
        P = np.atleast_2d(np.asarray(points, dtype=float))
        E = np.atleast_2d(np.asarray(directions, dtype=float))
        num = self.offsets[None, :] - P @ self.normals.T
        den = E @ self.normals.T
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = num / den
        upper = np.where(den > 0, ratio, np.inf).min(axis=1)
        lower = np.where(den < 0, ratio, -np.inf).max(axis=1)
        parallel_out = np.any((den == 0) & (num < 0), axis=1)
        miss = parallel_out | ~(upper > lower)
        return np.where(miss, np.nan, lower), np.where(miss, np.nan, upper)

    def with_reference(self, reference):
        return Polygon(self.vertices, reference)

    def describe(self):
        return {"kind": "polygon", "params": self.vertices.ravel().tolist()}


class Box(Polygon):
    """Axis-aligned rectangle ``[lo_1, hi_1] x [lo_2, hi_2]``."""

    def __init__(self, lo, hi, reference=None):
        lo = np.asarray(lo, dtype=float).reshape(2)
        hi = np.asarray(hi, dtype=float).reshape(2)
        if not np.all(lo < hi):
            raise InvalidDomain("box corners must be strictly ordered")
        self.lo, self.hi = lo, hi
        V = np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
        super().__init__(V, 0.5 * (lo + hi) if reference is None else reference)

    def __repr__(self):
        return f"Box({self.lo.tolist()!r}, {self.hi.tolist()!r})"

    @property
    def inradius(self):
        return float(0.5 * np.min(self.hi - self.lo))

    def with_reference(self, reference):
        return Box(self.lo, self.hi, reference)

    def describe(self):
        return {"kind": "box", "params": [*self.lo.tolist(), *self.hi.tolist()]}


class Ball(ConvexDomain):
    """Closed disk in the plane."""

    def __init__(self, center, radius: float, reference=None):
        c = np.asarray(center, dtype=float).reshape(2)
        radius = float(radius)
        if not radius > 0:
            raise InvalidDomain("radius must be positive")
        self.center, self.radius = c, radius
        self.dim = 2
        self.reference = c.copy() if reference is None else np.asarray(reference, dtype=float).reshape(2)
        self._check_reference()

    def __repr__(self):
        return f"Ball({self.center.tolist()!r}, {self.radius!r})"

    @property
    def volume(self):
        return math.pi * self.radius**2

    @property
    def boundary_measure(self):
        return 2.0 * math.pi * self.radius

    @property
    def diameter(self):
        return 2.0 * self.radius

    @property
    def inradius(self):
        return self.radius

    @property
    def bounds(self):
        return self.center - self.radius, self.center + self.radius

    def contains(self, points, tol=None):
        P = np.atleast_2d(np.asarray(points, dtype=float))
        tol = _tol(self.scale) if tol is None else tol
        return np.linalg.norm(P - self.center, axis=1) <= self.radius + tol

    def radii(self):
        off = float(np.linalg.norm(self.reference - self.center))
        return self.radius - off, self.radius + off

    def radial(self, u):
        u = np.asarray(u, dtype=float).reshape(2)
        u = u / np.linalg.norm(u)
        w = self.reference - self.center
        wu = float(w @ u)
        return -wu + math.sqrt(wu * wu - float(w @ w) + self.radius**2)

    def chord(self, points, directions):
        P = np.atleast_2d(np.asarray(points, dtype=float))
        E = np.atleast_2d(np.asarray(directions, dtype=float))
        W = P - self.center
        a = np.einsum("nd,nd->n", E, E)
        b = np.einsum("nd,nd->n", W, E)
        c = np.einsum("nd,nd->n", W, W) - self.radius**2
        disc = b * b - a * c
        hit = disc > 0
        sq = np.sqrt(np.where(hit, disc, 0.0))
        t0 = np.where(hit, (-b - sq) / a, np.nan)
        t1 = np.where(hit, (-b + sq) / a, np.nan)
        return t0, t1

    def with_reference(self, reference):
        return Ball(self.center, self.radius, reference)

    def describe(self):
        return {"kind": "ball", "params": [*self.center.tolist(), self.radius]}


class Rounded(ConvexDomain):
    """Minkowski sum ``P + B(0, r)`` of a convex polygon and a disk.

    Volume and perimeter follow the Steiner formula exactly; containment is
    exact through the point-to-polygon distance.  :meth:`outer_polygon`
    gives a conservative polygonal over-approximation.
    """

    def __init__(self, base: Polygon, radius: float, reference=None):
        if not isinstance(base, Polygon):
            raise InvalidDomain("rounded domains need a polygon base")
        radius = float(radius)
        if not radius > 0:
            raise InvalidDomain("rounding radius must be positive")
        self.base, self.radius = base, radius
        self.dim = 2
        self.reference = base.reference.copy() if reference is None else np.asarray(reference, dtype=float).reshape(2)
        self._check_reference()

    def __repr__(self):
        return f"Rounded({self.base!r}, {self.radius!r})"

    @property
    def volume(self):
        r = self.radius
        return self.base.volume + self.base.boundary_measure * r + math.pi * r * r

    @property
    def boundary_measure(self):
        return self.base.boundary_measure + 2.0 * math.pi * self.radius

    @property
    def diameter(self):
        return self.base.diameter + 2.0 * self.radius

    @property
    def inradius(self):
        return self.base.inradius + self.radius

    @property
    def bounds(self):
        lo, hi = self.base.bounds
        return lo - self.radius, hi + self.radius

    def contains(self, points, tol=None):
        P = np.atleast_2d(np.asarray(points, dtype=float))
        tol = _tol(self.scale) if tol is None else tol
        return _point_polygon_distance(P, self.base.vertices) <= self.radius + tol

    def radii(self):
        r0 = float(np.min(self.base.offsets - self.base.normals @ self.reference))
        R0 = float(np.linalg.norm(self.base.vertices - self.reference, axis=1).max())
        return r0 + self.radius, R0 + self.radius

    def radial(self, u):
        u = np.asarray(u, dtype=float).reshape(2)
        u = u / np.linalg.norm(u)
        lo, hi = 0.0, self.diameter + float(np.linalg.norm(self.reference - self.base.reference)) + 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.contains(self.reference + mid * u, tol=0.0)[0]:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * hi:
                break
        return 0.5 * (lo + hi)

    def outer_polygon(self, k: int = 8) -> Polygon:
        """Polygon containing the rounded domain, ``k`` arc pieces per vertex.

        Each vertex arc is replaced by tangent segments at radius
        ``r / cos(theta / 2k)``, where ``theta`` is the exterior angle.
        """
        V, N = self.base.vertices, self.base.normals
        pts = []
        m = len(V)
        for i in range(m):
            n_prev, n_cur = N[i - 1], N[i]
            a0 = math.atan2(n_prev[1], n_prev[0])
            a1 = math.atan2(n_cur[1], n_cur[0])
            theta = (a1 - a0) % (2 * math.pi)
            step = theta / k
            rr = self.radius / math.cos(step / 2) if k > 0 else self.radius
            pts.append(V[i] + self.radius * n_prev)
            for s in range(k):
                ang = a0 + (s + 0.5) * step
                pts.append(V[i] + rr * np.array([math.cos(ang), math.sin(ang)]))
            pts.append(V[i] + self.radius * n_cur)
        P = _dedupe(np.array(pts), 1e-14)
        return Polygon(P, self.reference)

    def with_reference(self, reference):
        return Rounded(self.base, self.radius, reference)

    def describe(self):
        return {"kind": "rounded", "params": self.base.vertices.ravel().tolist(), "radius": self.radius}


class Segment:
    """Closed segment in the plane, a degenerate convex body.

    Only supports line intersection; its boundary measure in the
    integral-geometric sense counts both sides, ``2 * length``.
    """

    dim = 2

    def __init__(self, a, b):
        self.a = np.asarray(a, dtype=float).reshape(2)
        self.b = np.asarray(b, dtype=float).reshape(2)
        if np.allclose(self.a, self.b):
            raise InvalidDomain("segment endpoints coincide")
        self.reference = 0.5 * (self.a + self.b)

    @property
    def length(self):
        return float(np.linalg.norm(self.b - self.a))

    @property
    def boundary_measure(self):
        return 2.0 * self.length

    @property
    def volume(self):
        return 0.0

    @property
    def bounds(self):
        return np.minimum(self.a, self.b), np.maximum(self.a, self.b)

    def chord(self, points, directions):
        P = np.atleast_2d(np.asarray(points, dtype=float))
        E = np.atleast_2d(np.asarray(directions, dtype=float))
        d = self.b - self.a
        # solve p + t e = a + s d
        det = E[:, 0] * (-d[1]) - E[:, 1] * (-d[0])
        rhs = self.a - P
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (rhs[:, 0] * (-d[1]) - rhs[:, 1] * (-d[0])) / det
            s = (E[:, 0] * rhs[:, 1] - E[:, 1] * rhs[:, 0]) / det
        hit = (det != 0) & (s >= 0) & (s <= 1)
        t = np.where(hit, t, np.nan)
        return t, t.copy()


# operations ---------------------------------------------------------------


def erode(domain: ConvexDomain, eps: float) -> ConvexDomain:
    """Inner parallel body ``{x : dist(x, boundary) >= eps}``.

    Raises
    ------
    EmptyErosion
        If ``eps`` is at least the inradius.
    """
    eps = float(eps)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if eps == 0:
        return domain
    if eps >= domain.inradius * (1.0 - 1e-12):
        raise EmptyErosion(f"erosion radius {eps} >= inradius {domain.inradius}")
    if isinstance(domain, Interval):
        out = Interval(domain.a + eps, domain.b - eps, None)
    elif isinstance(domain, Box):
        out = Box(domain.lo + eps, domain.hi - eps, None)
    elif isinstance(domain, Polygon):
        tol = _tol(domain.scale)
        P = domain.vertices
        for n, b in zip(domain.normals, domain.offsets):
            P = clip_halfplane(P, n, b - eps)
        P = _dedupe(P, 1e3 * tol)
        if len(P) < 3 or _shoelace(P) <= tol:
            raise EmptyErosion("erosion is degenerate")
        out = Polygon(P, None)
    elif isinstance(domain, Ball):
        out = Ball(domain.center, domain.radius - eps, None)
    elif isinstance(domain, Rounded):
        if eps < domain.radius:
            out = Rounded(domain.base, domain.radius - eps, None)
        elif eps == domain.radius:
            out = domain.base
        else:
            out = erode(domain.base, eps - domain.radius)
    else:
        raise TypeError(f"unsupported domain {type(domain).__name__}")
    return _keep_reference(out, domain.reference)


def dilate(domain: ConvexDomain, eps: float) -> ConvexDomain:
    """Outer parallel body ``{x : dist(x, domain) <= eps}``."""
    eps = float(eps)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if eps == 0:
        return domain
    if isinstance(domain, Interval):
        return Interval(domain.a - eps, domain.b + eps, domain.reference[0])
    if isinstance(domain, Ball):
        return Ball(domain.center, domain.radius + eps, domain.reference)
    if isinstance(domain, Polygon):
        return Rounded(domain, eps, domain.reference)
    if isinstance(domain, Rounded):
        return Rounded(domain.base, domain.radius + eps, domain.reference)
    raise TypeError(f"unsupported domain {type(domain).__name__}")


def _keep_reference(domain: ConvexDomain, ref: np.ndarray) -> ConvexDomain:
    try:
        return domain.with_reference(ref)
    except InvalidDomain:
        return domain


def radii(domain: ConvexDomain) -> tuple[float, float]:
    """Radii ``(r_X, R_X)`` with ``B(ref, r_X) in X in B(ref, R_X)``."""
    return domain.radii()


def radial_function(domain: ConvexDomain, u) -> float:
    """Distance from the reference point to the boundary along ``u``."""
    return domain.radial(u)


def erosion_volume_bound(domain: ConvexDomain, eps: float) -> float:
    """Upper bound ``S_{d-1} (R+r)^{d-1} (R/r) eps`` on the boundary slice."""
    r, R = domain.radii()
    d = domain.dim
    return sphere_area(d - 1) * (R + r) ** (d - 1) * (R / r) * float(eps)


def erosion_slice_volume(domain: ConvexDomain, eps: float) -> float:
    """Exact ``vol(X minus X_{-eps})``; equals ``vol(X)`` once eps >= inradius."""
    if eps <= 0:
        return 0.0
    try:
        inner = erode(domain, eps)
    except EmptyErosion:
        return domain.volume
    return domain.volume - inner.volume


def dilation_slice_volume(domain: ConvexDomain, eps: float) -> float:
    """Exact ``vol(X_{+eps} minus X)``."""
    if eps <= 0:
        return 0.0
    return dilate(domain, eps).volume - domain.volume


def random_convex_polygon(rng: np.random.Generator, k: int = 6, radius: float = 1.0,
                          center=(0.0, 0.0)) -> Polygon:
    """Random convex ``k``-gon inscribed in a circle, containing its center."""
    center = np.asarray(center, dtype=float)
    while True:
        ang = np.sort(rng.uniform(0.0, 2.0 * math.pi, size=k))
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2.0 * math.pi]]))
        if gaps.max() < 0.9 * math.pi and gaps.min() > 1e-3:
            break
    V = center + radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    return Polygon(V, center)


def domain_from_spec(spec: dict) -> ConvexDomain:
    """Build a domain from ``{kind: ..., params: [...], reference: [...]}``."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidDomain("domain spec needs a 'kind'")
    kind = spec["kind"]
    p = [float(v) for v in spec.get("params", [])]
    ref = spec.get("reference")
    if kind == "interval":
        if len(p) != 2:
            raise InvalidDomain("interval params: [a, b]")
        return Interval(p[0], p[1], ref)
    if kind == "box":
        if len(p) == 2:
            return Interval(p[0], p[1], ref)
        if len(p) != 4:
            raise InvalidDomain("box params: [lo1, lo2, hi1, hi2]")
        return Box(p[:2], p[2:], ref)
    if kind == "polygon":
        if len(p) < 6 or len(p) % 2:
            raise InvalidDomain("polygon params: flat list of x,y pairs")
        return Polygon(np.array(p).reshape(-1, 2), ref)
    if kind == "ball":
        if len(p) == 2:
            return Interval(p[0] - p[1], p[0] + p[1], ref)
        if len(p) != 3:
            raise InvalidDomain("ball params: [c1, c2, r]")
        return Ball(p[:2], p[2], ref)
    raise InvalidDomain(f"unknown domain kind {kind!r}")


def unit_square() -> Box:
    return Box([0.0, 0.0], [1.0, 1.0])


def unit_disk() -> Ball:
    return Ball([0.0, 0.0], 1.0)


def _as_points(x: Sequence[float] | np.ndarray, d: int) -> np.ndarray:
    return np.asarray(x, dtype=float).reshape(-1, d)
