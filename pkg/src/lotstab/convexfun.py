"""Convex functions: max-affine potentials, 1D samples, conjugates, envelopes.

The semi-discrete Brenier potential ``phi(x) = max_j <x, y_j> - psi_j`` is
piecewise affine.  On a polygon its conjugate over the domain is attained
at a vertex of the induced subdivision (the Laguerre cells clipped to the
domain), so :meth:`MaxAffinePotential.conjugate` enumerates those
vertices.  On a disk the extra candidates are edge/circle crossings and,
for each affine piece, the disk point maximizing the linear part.
"""

from __future__ import annotations

import numpy as np

from .errors import AlphaOutOfRange, NotConvex
from .geometry import Ball, ConvexDomain, Polygon, _point_polygon_distance, clip_halfplane

__all__ = [
    "MaxAffinePotential",
    "SampledFunction1D",
    "MoreauEnvelope",
    "envelope_intervals",
    "conjugate",
    "legendre_1d",
    "moreau_yosida",
    "gradient_lipschitz_bound",
    "erosion_lipschitz_radius",
    "holder_modulus",
]


def envelope_intervals(a: np.ndarray, b: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                       neighbors: bool = False):
    """Active intervals of lines ``a_j x + b_rj`` in the upper envelope.

    Parameters
    ----------
    a : ndarray, shape (N,)
        Slopes, shared by all rows.
    b : ndarray, shape (R, N)
        Intercepts per row.
    lo, hi : ndarray, shape (R,)
        Row windows.

    Returns
    -------
    L, U : ndarray, shape (R, N)
        Line ``j`` is the maximum on ``[L, U]`` (empty when ``U <= L``).
        Among equal slopes the larger intercept wins, ties to the lowest
        index, matching :func:`numpy.argmax`.
    KL, KU : ndarray, shape (R, N), int
        Only with ``neighbors=True``: the lines whose crossings define the
        lower and upper ends before clipping to the window (-1 if none).
    """
    R, N = b.shape
    D = a[:, None] - a[None, :]
    pos, neg, eq = D > 0, D < 0, D == 0
    np.fill_diagonal(eq, False)
    Dsafe = np.where(D == 0, 1.0, D)
    L = np.empty((R, N))
    U = np.empty((R, N))
    if neighbors:
        KL = np.full((R, N), -1)
        KU = np.full((R, N), -1)
    chunk = max(1, int(4e6 // max(N * N, 1)))
    lower_idx = np.arange(N)[None, :] < np.arange(N)[:, None]   # k < j
    for s in range(0, R, chunk):
        bb = b[s:s + chunk]
        X = (bb[:, None, :] - bb[:, :, None]) / Dsafe[None]      # x_jk
        Xl = np.where(pos[None], X, -np.inf)
        Xu = np.where(neg[None], X, np.inf)
        lower = Xl.max(axis=2)
        upper = Xu.min(axis=2)
        if neighbors:
            KL[s:s + chunk] = np.where(np.isfinite(lower), Xl.argmax(axis=2), -1)
            KU[s:s + chunk] = np.where(np.isfinite(upper), Xu.argmin(axis=2), -1)
        bj, bk = bb[:, :, None], bb[:, None, :]
        dom = eq[None] & ((bk > bj) | ((bk == bj) & lower_idx[None]))
        dead = dom.any(axis=2)
        Ls = np.maximum(lower, lo[s:s + chunk, None])
        Us = np.minimum(upper, hi[s:s + chunk, None])
        Us = np.where(dead, Ls, Us)
        L[s:s + chunk], U[s:s + chunk] = Ls, Us
    if neighbors:
        return L, U, KL, KU
    return L, U


class MaxAffinePotential:
    """``phi(x) = max_j <x, y_j> - psi_j`` restricted to a convex domain.

    Parameters
    ----------
    slopes : ndarray, shape (N, d)
    offsets : ndarray, shape (N,)
        The values ``psi_j`` (intercepts are ``-psi_j``).
    domain : ConvexDomain
    """

    def __init__(self, slopes, offsets, domain: ConvexDomain):
        Y = np.asarray(slopes, dtype=float)
        if Y.ndim == 1:
            Y = Y[:, None]
        psi = np.asarray(offsets, dtype=float).reshape(-1)
        if len(Y) == 0 or psi.shape != (len(Y),) or Y.shape[1] != domain.dim:
            raise ValueError("need matching nonempty slopes and offsets")
        if not (np.all(np.isfinite(Y)) and np.all(np.isfinite(psi))):
            raise ValueError("slopes and offsets must be finite")
        self.slopes = Y
        self.offsets = psi
        self.domain = domain
        self._cells = None
        self._verts = None

    @property
    def dim(self):
        return self.domain.dim

    def scores(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float).reshape(-1, self.dim)
        return X @ self.slopes.T - self.offsets

    def argmax(self, X) -> np.ndarray:
        return np.argmax(self.scores(X), axis=1)

    def __call__(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float).reshape(-1, self.dim)
        out = np.empty(len(X))
        for s in range(0, len(X), 65536):
            out[s:s + 65536] = self.scores(X[s:s + 65536]).max(axis=1)
        return out

    def gradient(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float).reshape(-1, self.dim)
        idx = np.empty(len(X), dtype=int)
        for s in range(0, len(X), 65536):
            idx[s:s + 65536] = self.argmax(X[s:s + 65536])
        return self.slopes[idx]

    def shifted(self, c: float) -> "MaxAffinePotential":
        """The potential ``phi + c``."""
        return MaxAffinePotential(self.slopes, self.offsets - c, self.domain)

    # subdivision -------------------------------------------------------
    def cells(self):
        """Pieces of the subdivision of the domain.

        1D: list of ``(L_j, U_j)`` or ``None``.  2D: list of vertex arrays
        of the Laguerre cells clipped to the domain (to its bounding box for
        a disk), possibly empty.
        """
        if self._cells is not None:
            return self._cells
        Y, psi = self.slopes, self.offsets
        if self.dim == 1:
            dom = self.domain
            L, U = envelope_intervals(Y[:, 0], -psi[None, :], np.array([dom.a]), np.array([dom.b]))
            self._cells = [(L[0, j], U[0, j]) if U[0, j] > L[0, j] else None for j in range(len(psi))]
            return self._cells
        if isinstance(self.domain, Polygon):
            base = self.domain.vertices
        else:
            lo, hi = self.domain.bounds
            base = np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
        scale = self.domain.scale * (1.0 + float(np.abs(Y).max()))
        cells = []
        order = np.arange(len(psi))
        for j in range(len(psi)):
            P = base
            # clip nearest competitors first to shrink the polygon quickly
            dist = np.linalg.norm(Y - Y[j], axis=1)
            for k in order[np.argsort(dist, kind="stable")]:
                if k == j:
                    continue
                n = Y[k] - Y[j]
                off = psi[k] - psi[j]
                if not np.any(n):
                    if off < 0 or (off == 0 and k < j):
                        P = P[:0]
                        break
                    continue
                P = clip_halfplane(P, n, off, tol=1e-13 * scale)
                if len(P) == 0:
                    break
            cells.append(P)
        self._cells = cells
        return cells

    def vertices(self) -> np.ndarray:
        """Candidate points containing every vertex of the subdivision."""
        if self._verts is not None:
            return self._verts
        if self.dim == 1:
            pts = [self.domain.a, self.domain.b]
            for c in self.cells():
                if c is not None:
                    pts.extend(c)
            V = np.unique(np.clip(pts, self.domain.a, self.domain.b))[:, None]
        elif isinstance(self.domain, Polygon):
            cells = [c for c in self.cells() if len(c)]
            V = np.vstack([self.domain.vertices] + cells)
        elif isinstance(self.domain, Ball):
            V = self._disk_vertices()
        else:
            raise TypeError(f"unsupported domain {type(self.domain).__name__}")
        self._verts = V
        return V

    def _disk_vertices(self):
        c, r = self.domain.center, self.domain.radius
        pts = []
        for P in self.cells():
            if len(P) == 0:
                continue
            inside = np.linalg.norm(P - c, axis=1) <= r
            pts.append(P[inside])
            Q = np.roll(P, -1, axis=0)
            d = Q - P
            w = P - c
            A = np.einsum("kd,kd->k", d, d)
            B = np.einsum("kd,kd->k", w, d)
            C = np.einsum("kd,kd->k", w, w) - r * r
            disc = B * B - A * C
            ok = (disc >= 0) & (A > 0)
            sq = np.sqrt(np.where(ok, disc, 0.0))
            for sgn in (-1.0, 1.0):
                t = (-B + sgn * sq) / np.where(A > 0, A, 1.0)
                m = ok & (t >= 0) & (t <= 1)
                X = P[m] + t[m, None] * d[m]
                # project onto the circle to remove rounding
                X = c + r * (X - c) / np.linalg.norm(X - c, axis=1)[:, None]
                pts.append(X)
        if not pts:
            return c[None, :].copy()
        return np.vstack(pts)

    def conjugate(self, Q) -> np.ndarray:
        """``phi*(q) = max_{x in X} <x, q> - phi(x)`` evaluated exactly."""
        Q = np.asarray(Q, dtype=float).reshape(-1, self.dim)
        V = self.vertices()
        fV = self(V)
        out = np.empty(len(Q))
        step = max(1, int(2e6 // max(len(V), 1)))
        for s in range(0, len(Q), step):
            out[s:s + step] = (Q[s:s + step] @ V.T - fV).max(axis=1)
        if isinstance(self.domain, Ball):
            c, r = self.domain.center, self.domain.radius
            for j in range(len(self.offsets)):
                g = Q - self.slopes[j]
                ng = np.linalg.norm(g, axis=1)
                ok = ng > 0
                X = c + r * g[ok] / ng[ok, None]
                vals = np.einsum("nd,nd->n", X, Q[ok]) - self(X)
                out[ok] = np.maximum(out[ok], vals)
        return out

    def extrema(self) -> tuple[float, float]:
        """``(min_X phi, max_X phi)``."""
        if isinstance(self.domain, Ball):
            c, r = self.domain.center, self.domain.radius
            mx = float(np.max(self.slopes @ c + r * np.linalg.norm(self.slopes, axis=1) - self.offsets))
        else:
            mx = float(self(self.vertices()).max())
        mn = -float(self.conjugate(np.zeros((1, self.dim)))[0])
        return mn, mx

    def active(self, region: ConvexDomain | None = None) -> np.ndarray:
        """Indices of pieces whose cell meets ``region`` (default: domain) with interior."""
        region = self.domain if region is None else region
        out = []
        for j, cell in enumerate(self.cells()):
            if self.dim == 1:
                if cell is None:
                    continue
                if min(cell[1], region.b) > max(cell[0], region.a):
                    out.append(j)
                continue
            if len(cell) < 3:
                continue
            if isinstance(region, Polygon):
                P = cell
                for n, b in zip(region.normals, region.offsets):
                    P = clip_halfplane(P, n, b)
                if len(P) >= 3 and _area(P) > 1e-14:
                    out.append(j)
            elif isinstance(region, Ball):
                if _area(cell) > 1e-14 and _point_polygon_distance(region.center[None], cell)[0] < region.radius:
                    out.append(j)
            else:
                raise TypeError(f"unsupported region {type(region).__name__}")
        return np.array(out, dtype=int)

    def lipschitz_constant(self, region: ConvexDomain | None = None) -> float:
        """Exact Lipschitz constant ``max |y_j|`` over pieces active on ``region``."""
        idx = self.active(region)
        if len(idx) == 0:
            return 0.0
        return float(np.linalg.norm(self.slopes[idx], axis=1).max())


def _area(P):
    x, y = P[:, 0], P[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def conjugate(phi, at) -> np.ndarray:
    """Legendre-Fenchel conjugate over the domain, evaluated at points.

    ``phi`` is a :class:`MaxAffinePotential` or a :class:`SampledFunction1D`.
    """
    if isinstance(phi, MaxAffinePotential):
        return phi.conjugate(at)
    if isinstance(phi, SampledFunction1D):
        return legendre_1d(phi.x, phi.f, np.asarray(at, dtype=float).reshape(-1))
    raise TypeError("unsupported function type")


def legendre_1d(x: np.ndarray, f: np.ndarray, y: np.ndarray, method: str = "auto") -> np.ndarray:
    """``max_i x_i y - f_i`` for sampled ``f``.

    ``method='scan'`` uses the monotone argmax of convex samples (requires
    sorted ``x`` and sorted ``y``, and convex ``f``); ``'brute'`` is O(N M).
    """
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    y = np.asarray(y, dtype=float)
    if method == "auto":
        sorted_y = np.all(np.diff(y) >= 0)
        s = np.diff(f) / np.diff(x) if len(x) > 1 else np.zeros(0)
        method = "scan" if sorted_y and np.all(np.diff(x) > 0) and np.all(np.diff(s) >= -1e-12) else "brute"
    if method == "brute":
        out = np.empty(len(y))
        step = max(1, int(2e6 // max(len(x), 1)))
        for i in range(0, len(y), step):
            out[i:i + step] = (np.outer(y[i:i + step], x) - f).max(axis=1)
        return out
    # slopes are nondecreasing, so the maximizer for y is the first
    # breakpoint whose right slope exceeds y
    s = np.diff(f) / np.diff(x)
    k = np.searchsorted(s, y, side="left")
    return x[k] * y - f[k]


class SampledFunction1D:
    """Piecewise-linear interpolant of samples ``(x_i, f_i)``.

    Outside ``[x_0, x_m]`` the end pieces are extended linearly, so a convex
    interpolant stays convex on the whole line.
    """

    def __init__(self, x, f):
        x = np.asarray(x, dtype=float).reshape(-1)
        f = np.asarray(f, dtype=float).reshape(-1)
        if x.shape != f.shape or len(x) < 2:
            raise ValueError("need at least two samples of matching shape")
        if not np.all(np.diff(x) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(f))):
            raise ValueError("samples must be finite")
        self.x, self.f = x, f

    def __repr__(self):
        return f"SampledFunction1D(m={len(self.x)})"

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.f) / np.diff(self.x)

    @property
    def interval(self) -> tuple[float, float]:
        return float(self.x[0]), float(self.x[-1])

    def piece(self, t) -> np.ndarray:
        return np.clip(np.searchsorted(self.x, t, side="right") - 1, 0, len(self.x) - 2)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        k = self.piece(t)
        return self.f[k] + self.slopes[k] * (t - self.x[k])

    def derivative(self, t) -> np.ndarray:
        """Right derivative."""
        return self.slopes[self.piece(np.asarray(t, dtype=float))]

    def second_differences(self) -> np.ndarray:
        return np.diff(self.slopes)

    def is_convex(self, tol: float = 1e-10) -> bool:
        s = self.slopes
        scale = max(1.0, float(np.abs(s).max()))
        return bool(np.all(np.diff(s) >= -tol * scale))

    def conjugate(self, y) -> np.ndarray:
        return legendre_1d(self.x, self.f, np.asarray(y, dtype=float).reshape(-1))

    def lipschitz(self) -> float:
        return float(np.abs(self.slopes).max())


class MoreauEnvelope:
    """Exact Moreau-Yosida envelope of a convex piecewise-linear function.

    The proximal map of such an ``f`` is the inverse of ``u -> u + lam df(u)``:
    it holds ``u = x_i`` for ``x`` in ``[x_i + lam s_{i-1}, x_i + lam s_i]``
    at each kink ``x_i`` and is a unit-slope shift in between.
    """

    def __init__(self, f: SampledFunction1D, lam: float):
        self.f, self.lam = f, float(lam)
        s = f.slopes
        kinks = np.nonzero(np.diff(s) > 0)[0] + 1     # interior breakpoints with a slope jump
        xk = f.x[kinks]
        self._kx = np.stack([xk + lam * s[kinks - 1], xk + lam * s[kinks]], axis=1).ravel()
        self._ku = np.repeat(xk, 2)
        self._s_first, self._s_last = float(s[0]), float(s[-1])

    def prox(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lam = self.lam
        if len(self._kx) == 0:
            return x - lam * self._s_first
        u = np.interp(x, self._kx, self._ku)
        u = np.where(x < self._kx[0], x - lam * self._s_first, u)
        u = np.where(x > self._kx[-1], x - lam * self._s_last, u)
        return u

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        u = self.prox(x)
        return self.f(u) + (u - x) ** 2 / (2.0 * self.lam)

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x - self.prox(x)) / self.lam

    def knots(self) -> np.ndarray:
        """Points where the envelope switches between affine and quadratic."""
        return self._kx.copy()

    def to_sampled(self, x) -> SampledFunction1D:
        return SampledFunction1D(x, self(x))


def moreau_yosida(f: SampledFunction1D, lam: float) -> MoreauEnvelope:
    """``f_lam(x) = min_u f(u) + |u - x|^2 / (2 lam)`` for convex PL ``f``.

    Raises
    ------
    NotConvex
        If some second difference of ``f`` is below ``-1e-10``.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    if not f.is_convex(1e-10):
        raise NotConvex("moreau_yosida needs a convex function")
    # clean tiny negative slope jumps so the prox map is monotone
    s = np.maximum.accumulate(f.slopes)
    g = SampledFunction1D(f.x, np.concatenate([[f.f[0]], f.f[0] + np.cumsum(s * np.diff(f.x))]))
    return MoreauEnvelope(g if not np.array_equal(s, f.slopes) else f, lam)


def gradient_lipschitz_bound(env: MoreauEnvelope, lam: float | None = None, samples=None,
                             n: int = 4001) -> float:
    """Measured Lipschitz constant of the envelope gradient on a sample.

    The default sample covers the kinks of the proximal map with margin and
    includes them exactly.
    """
    if samples is None:
        kx = env.knots()
        lo = min(env.f.x[0], kx.min() if len(kx) else env.f.x[0])
        hi = max(env.f.x[-1], kx.max() if len(kx) else env.f.x[-1])
        pad = 0.25 * (hi - lo) + env.lam
        samples = np.unique(np.concatenate([np.linspace(lo - pad, hi + pad, n), kx]))
    x = np.sort(np.asarray(samples, dtype=float))
    g = env.gradient(x)
    dx = np.diff(x)
    # near-coincident samples only resolve round-off in the difference quotient
    ok = dx > 1e-6 * max(1.0, float(x[-1] - x[0]))
    if not ok.any():
        return 0.0
    return float(np.max(np.abs(np.diff(g)[ok]) / dx[ok]))


def erosion_lipschitz_radius(M_alpha: float, alpha: float, R: float) -> float:
    """Erosion depth ``(M_alpha / R)^{1/(1-alpha)}`` past which an
    ``alpha``-Hölder convex function is ``R``-Lipschitz."""
    if not 0 < alpha < 1:
        raise AlphaOutOfRange(f"alpha={alpha} not in (0, 1)")
    if not (M_alpha > 0 and R > 0):
        raise ValueError("M_alpha and R must be positive")
    return (M_alpha / R) ** (1.0 / (1.0 - alpha))


def holder_modulus(points, values, alpha: float, pairs=None, n_pairs: int = 100_000,
                   seed: int = 0) -> float:
    """Empirical ``max |f(x) - f(x')| / |x - x'|^alpha`` over sample pairs.

    1D samples use all pairs; higher dimensions use ``n_pairs`` seeded random
    pairs unless ``pairs`` (an ``(P, 2)`` index array) is given.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    f = np.asarray(values, dtype=float).reshape(-1)
    best = 0.0
    if pairs is None and X.shape[1] == 1:
        x = X[:, 0]
        order = np.argsort(x, kind="stable")
        x, f = x[order], f[order]
        m = len(x)
        for i in range(m - 1):
            dx = x[i + 1:] - x[i]
            ok = dx > 0
            if ok.any():
                best = max(best, float(np.max(np.abs(f[i + 1:][ok] - f[i]) / dx[ok] ** alpha)))
        return best
    if pairs is None:
        rng = np.random.default_rng(seed)
        pairs = rng.integers(0, len(X), size=(n_pairs, 2))
    pairs = np.asarray(pairs, dtype=int)
    d = np.linalg.norm(X[pairs[:, 0]] - X[pairs[:, 1]], axis=1)
    ok = d > 0
    if not ok.any():
        return 0.0
    return float(np.max(np.abs(f[pairs[ok, 0]] - f[pairs[ok, 1]]) / d[ok] ** alpha))
