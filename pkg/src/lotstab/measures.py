"""Source densities on grids, discrete targets, and distances between measures.

A :class:`GridDensity` is a piecewise-constant density on a regular grid
over a convex domain.  In 2D the grid covers the bounding box and every
pixel is clipped to the domain along its row-center scanline; the
clipped pixel keeps the scanline segment as its 1D support, which is what
the semi-discrete solver integrates against (see :mod:`lotstab.otsolve`).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import sparse
from scipy.optimize import linprog
from scipy.spatial import cKDTree

from .errors import InvalidDomain, NotAbsolutelyContinuous, SizeLimit
from .geometry import ConvexDomain, Rounded

__all__ = [
    "GridDensity",
    "DiscreteMeasure",
    "moment",
    "subexp_moment_bound",
    "chi2_divergence",
    "wasserstein_1d",
    "transport_cost",
    "w1_discrete",
    "w2_discrete",
    "pushforward",
    "density_from_spec",
]


@dataclass(frozen=True)
class _Rows:
    """Scanline representation: per row, a piecewise-uniform 1D measure."""

    t: np.ndarray        # (R,) row heights (zeros in 1D)
    knots: np.ndarray    # (R, n+1) clipped pixel edges along the row
    lam: np.ndarray      # (R, n) mass per unit length on each piece
    cm: np.ndarray       # (R, n+1) cumulative mass at knots
    cm1: np.ndarray      # (R, n+1) cumulative first moment at knots

    @property
    def lo(self):
        return self.knots[:, 0]

    @property
    def hi(self):
        return self.knots[:, -1]

    def locate(self, x: np.ndarray) -> np.ndarray:
        """Piece index of each ``x`` (shape (R, N)) within its row."""
        R, n1 = self.knots.shape
        n = n1 - 1
        if R == 1:
            idx = np.searchsorted(self.knots[0], x[0], side="right") - 1
            return np.clip(idx, 0, n - 1)[None, :]
        span = float(self.knots.max() - self.knots.min()) + 1.0
        off = span * np.arange(R)[:, None]
        flat = (self.knots + off).ravel()
        idx = np.searchsorted(flat, (x + off).ravel(), side="right") - 1
        idx = idx.reshape(x.shape) - n1 * np.arange(R)[:, None]
        return np.clip(idx, 0, n - 1)

    def cumulative(self, x: np.ndarray, with_density: bool = False):
        """Cumulative mass and first moment at ``x`` of shape (R, N).

        ``x`` must already be clamped to each row's ``[lo, hi]``.  With
        ``with_density`` the linear density of the piece containing ``x``
        is returned as well.
        """
        idx = self.locate(x)
        rows = np.arange(len(self.knots))[:, None]
        k0 = self.knots[rows, idx]
        lam = self.lam[rows, idx]
        M = self.cm[rows, idx] + lam * (x - k0)
        M1 = self.cm1[rows, idx] + 0.5 * lam * (x * x - k0 * k0)
        if with_density:
            return M, M1, lam
        return M, M1


class GridDensity:
    """Piecewise-constant probability density on a grid over a convex domain.

    Parameters
    ----------
    domain : ConvexDomain
        Interval, box, polygon or disk.
    n : int
        Cells per axis (over the bounding box in 2D).
    density : callable, optional
        Positive function of points ``(M, d)``; evaluated at cell centers and
        renormalized.  Uniform when omitted.

    Attributes
    ----------
    centers : ndarray, shape (M, d)
    volumes : ndarray, shape (M,)
    values : ndarray, shape (M,)
        Density values (mass per volume).
    masses : ndarray, shape (M,)
    m_rho, M_rho : float
        Lower and upper density bounds.
    """

    def __init__(self, domain: ConvexDomain, n: int, density: Callable | None = None):
        n = int(n)
        if n < 1:
            raise ValueError("resolution must be positive")
        if isinstance(domain, Rounded):
            raise InvalidDomain("grid densities on rounded domains are not supported")
        self.domain = domain
        self.n = n
        self.dim = domain.dim
        lo, hi = domain.bounds
        self.lo, self.hi = np.asarray(lo, float), np.asarray(hi, float)
        self.h = (self.hi - self.lo) / n
        if self.dim == 1:
            self._build_1d()
        else:
            self._build_2d()
        if density is None:
            f = np.ones(len(self.volumes))
        else:
            f = np.asarray(density(self.centers), dtype=float).reshape(-1)
        if f.shape != self.volumes.shape or not np.all(np.isfinite(f)) or np.any(f <= 0):
            raise ValueError("density must be finite and positive on the domain")
        z = float(np.sum(f * self.volumes))
        self.values = f / z
        self.masses = self.values * self.volumes
        self.m_rho = float(self.values.min())
        self.M_rho = float(self.values.max())
        lam = np.zeros_like(self._seg_len)
        lam[self._valid] = self.values * self._row_height
        self._finish_rows(lam)

    def _build_1d(self):
        a, b = self.domain.a, self.domain.b
        edges = np.linspace(a, b, self.n + 1)
        self.edges = edges
        self.centers = (0.5 * (edges[:-1] + edges[1:]))[:, None]
        self.volumes = np.diff(edges)
        self._valid = np.ones((1, self.n), dtype=bool)
        self._seg_len = self.volumes[None, :].copy()
        self._row_height = 1.0
        self._knots = edges[None, :].copy()
        self._t = np.zeros(1)
        self.row_index = np.zeros(self.n, dtype=int)
        self.col_index = np.arange(self.n)

    def _build_2d(self):
        n = self.n
        hx, hy = self.h
        ex = self.lo[0] + hx * np.arange(n + 1)
        ex[-1] = self.hi[0]
        t = self.lo[1] + hy * (np.arange(n) + 0.5)
        P = np.stack([np.zeros(n), t], axis=1)
        E = np.tile([1.0, 0.0], (n, 1))
        l, u = self.domain.chord(P, E)
        miss = np.isnan(l)
        l = np.where(miss, self.lo[0], np.maximum(l, self.lo[0]))
        u = np.where(miss, self.lo[0], np.minimum(u, self.hi[0]))
        knots = np.clip(ex[None, :], l[:, None], u[:, None])
        seg = np.diff(knots, axis=1)
        valid = seg > 1e-12 * hx
        rr, kk = np.nonzero(valid)
        mid = 0.5 * (knots[rr, kk] + knots[rr, kk + 1])
        self.edges = ex
        self.centers = np.stack([mid, t[rr]], axis=1)
        self.volumes = hy * seg[rr, kk]
        self._valid = valid
        self._seg_len = np.where(valid, seg, 0.0)
        self._row_height = hy
        self._knots = knots
        self._t = t
        self.row_index = rr
        self.col_index = kk

    def _finish_rows(self, lam):
        seg = np.diff(self._knots, axis=1)
        piece = lam * seg
        cm = np.concatenate([np.zeros((len(seg), 1)), np.cumsum(piece, axis=1)], axis=1)
        k2 = self._knots**2
        piece1 = 0.5 * lam * np.diff(k2, axis=1)
        cm1 = np.concatenate([np.zeros((len(seg), 1)), np.cumsum(piece1, axis=1)], axis=1)
        self.rows = _Rows(self._t, self._knots, lam, cm, cm1)

    # basic quantities --------------------------------------------------
    def __len__(self):
        return len(self.masses)

    def __repr__(self):
        return f"GridDensity({self.domain!r}, n={self.n})"

    @property
    def spacing(self) -> float:
        """Largest grid spacing over the axes."""
        return float(np.max(self.h))

    @property
    def cell_count(self) -> int:
        return len(self.masses)

    def integrate(self, f: np.ndarray) -> float:
        """Grid quadrature ``sum_c f_c rho_c vol_c``."""
        return float(np.dot(np.asarray(f, dtype=float), self.masses))

    def lp_norm(self, f: np.ndarray, p: float) -> float:
        f = np.abs(np.asarray(f, dtype=float))
        if p == np.inf:
            return float(f.max())
        return float(np.dot(f**p, self.masses) ** (1.0 / p))

    def as_discrete(self) -> "DiscreteMeasure":
        """Cell centers weighted by cell masses."""
        return DiscreteMeasure(self.centers, self.masses / self.masses.sum())

    def to_image(self, f: np.ndarray) -> np.ndarray:
        """Scatter per-cell values into an ``(n, n)`` array (nan outside)."""
        img = np.full((len(self._t), self.n), np.nan)
        img[self.row_index, self.col_index] = f
        return img

    # 1D distribution functions ---------------------------------------------
    def cdf(self, x) -> np.ndarray:
        """Cumulative distribution function (1D only)."""
        self._need_1d()
        x = np.clip(np.asarray(x, dtype=float), self.edges[0], self.edges[-1])
        M, _ = self.rows.cumulative(x.reshape(1, -1))
        return np.clip(M.reshape(x.shape), 0.0, 1.0)

    def quantile(self, t) -> np.ndarray:
        """Generalized inverse of :meth:`cdf` (1D only)."""
        self._need_1d()
        t = np.asarray(t, dtype=float)
        cm = self.rows.cm[0]
        k = np.clip(np.searchsorted(cm, t, side="left") - 1, 0, self.n - 1)
        lam = self.rows.lam[0, k]
        x = self.edges[k] + (t - cm[k]) / np.where(lam > 0, lam, 1.0)
        return np.clip(x, self.edges[k], self.edges[k + 1])

    def _need_1d(self):
        if self.dim != 1:
            raise ValueError("only available for 1D densities")


def density_from_spec(spec: dict | None, dim: int) -> Callable | None:
    """Density callable from ``{kind: uniform|affine|piecewise, ...}``.

    * ``affine``: ``coef = [a0, a1(, a2)]`` gives ``a0 + <a, x>``.
    * ``piecewise``: ``breaks`` (increasing) and ``values`` (one more than
      breaks) as a step function of the first coordinate.
    """
    if spec is None:
        return None
    kind = spec.get("kind", "uniform")
    if kind == "uniform":
        return None
    if kind == "affine":
        coef = np.asarray(spec["coef"], dtype=float)
        if coef.shape != (dim + 1,):
            raise ValueError(f"affine density needs {dim + 1} coefficients")
        return lambda P: coef[0] + P @ coef[1:]
    if kind == "piecewise":
        br = np.asarray(spec["breaks"], dtype=float)
        vals = np.asarray(spec["values"], dtype=float)
        if len(vals) != len(br) + 1 or np.any(np.diff(br) <= 0):
            raise ValueError("piecewise density needs len(values) = len(breaks) + 1")
        return lambda P: vals[np.searchsorted(br, P[:, 0], side="right")]
    raise ValueError(f"unknown density kind {kind!r}")


class DiscreteMeasure:
    """Finitely supported probability measure.

    Parameters
    ----------
    points : array_like, shape (N, d) or (N,)
    weights : array_like, shape (N,), optional
        Nonnegative weights summing to one; uniform when omitted.
    """

    def __init__(self, points, weights=None, *, check: bool = True):
        P = np.asarray(points, dtype=float)
        if P.ndim == 1:
            P = P[:, None]
        if P.ndim != 2 or len(P) == 0:
            raise ValueError("need at least one support point")
        w = np.full(len(P), 1.0 / len(P)) if weights is None else np.asarray(weights, dtype=float).reshape(-1)
        if w.shape != (len(P),):
            raise ValueError("weights must match points")
        if check:
            if not np.all(np.isfinite(P)) or not np.all(np.isfinite(w)):
                raise ValueError("non-finite support or weights")
            if np.any(w < 0):
                raise ValueError("weights must be nonnegative")
            if abs(w.sum() - 1.0) > 1e-12:
                raise ValueError(f"weights sum to {w.sum()!r}, expected 1")
            if len(P) > 1 and cKDTree(P).query_pairs(1e-12):
                raise ValueError("support points must be pairwise distinct")
        self.points = P
        self.weights = w

    @classmethod
    def normalized(cls, points, weights) -> "DiscreteMeasure":
        w = np.asarray(weights, dtype=float)
        return cls(points, w / w.sum())

    def __len__(self):
        return len(self.weights)

    def __repr__(self):
        return f"DiscreteMeasure(n={len(self)}, d={self.dim})"

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def translate(self, tau) -> "DiscreteMeasure":
        return DiscreteMeasure(self.points + np.asarray(tau, dtype=float), self.weights, check=False)

    def scale(self, s: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.points * float(s), self.weights, check=False)

    def positive(self) -> "DiscreteMeasure":
        """Restriction to atoms with positive weight."""
        keep = self.weights > 0
        return DiscreteMeasure(self.points[keep], self.weights[keep], check=False)

    def mean(self) -> np.ndarray:
        return self.weights @ self.points

    # CSV i/o: columns x1[,x2],weight
    def to_csv(self, path) -> None:
        d = self.dim
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"x{i + 1}" for i in range(d)] + ["weight"])
            for p, wt in zip(self.points, self.weights):
                w.writerow([f"{v:.12e}" for v in p] + [f"{wt:.12e}"])

    @classmethod
    def from_csv(cls, path) -> "DiscreteMeasure":
        path = Path(path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise ValueError(f"empty measure file {path}")
        header = [h.strip() for h in rows[0]]
        if header[-1] != "weight" or not all(h == f"x{i + 1}" for i, h in enumerate(header[:-1])):
            raise ValueError(f"{path}: header must be x1[,x2],weight")
        data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
        if data.size == 0:
            raise ValueError(f"{path}: no atoms")
        w = data[:, -1]
        s = w.sum()
        if abs(s - 1.0) > 1e-9:
            raise ValueError(f"{path}: weights sum to {s}")
        return cls(data[:, :-1], w / s)


# functionals -------------------------------------------------------------


def moment(m, p: float) -> float:
    """``M_p = int ||x||^p dm`` for a discrete measure or grid density."""
    if not p > 0:
        raise ValueError("p must be positive")
    if isinstance(m, GridDensity):
        return m.integrate(np.linalg.norm(m.centers, axis=1) ** p)
    return float(np.dot(m.weights, np.linalg.norm(m.points, axis=1) ** p))


def subexp_moment_bound(sigma: float, p: int) -> float:
    """Moment bound ``2 p! (sigma/2)^p`` for sub-exponential measures."""
    if int(p) != p or p < 1:
        raise ValueError("p must be an integer >= 1")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return 2.0 * math.factorial(int(p)) * (sigma / 2.0) ** int(p)


def chi2_divergence(mu1: DiscreteMeasure, mu0: DiscreteMeasure, tol: float = 1e-12) -> float:
    """Chi-squared divergence ``sum (w1 - w0)^2 / w0`` over ``support(mu0)``.

    Raises
    ------
    NotAbsolutelyContinuous
        If ``mu1`` charges a point that ``mu0`` does not.
    """
    tree = cKDTree(mu0.points)
    dist, idx = tree.query(mu1.points)
    w1 = np.zeros(len(mu0))
    charged = mu1.weights > 0
    if np.any(dist[charged] > tol):
        raise NotAbsolutelyContinuous("mu1 charges points outside support(mu0)")
    np.add.at(w1, idx[charged], mu1.weights[charged])
    w0 = mu0.weights
    if np.any((w0 == 0) & (w1 > 0)):
        raise NotAbsolutelyContinuous("mu1 charges a null atom of mu0")
    pos = w0 > 0
    return float(np.sum((w1[pos] - w0[pos]) ** 2 / w0[pos]))


def _quantile_pieces(m):
    """Quantile function as pieces ``(t0, t1, q0, q1)``, affine on each."""
    if isinstance(m, GridDensity):
        if m.dim != 1:
            raise ValueError("wasserstein_1d needs 1D measures")
        cm = m.rows.cm[0]
        mass = np.diff(cm)
        keep = mass > 0
        return cm[:-1][keep], cm[1:][keep], m.edges[:-1][keep], m.edges[1:][keep]
    if m.dim != 1:
        raise ValueError("wasserstein_1d needs 1D measures")
    order = np.argsort(m.points[:, 0], kind="stable")
    y = m.points[order, 0]
    w = m.weights[order]
    keep = w > 0
    y, w = y[keep], w[keep]
    c = np.concatenate([[0.0], np.cumsum(w)])
    c[-1] = 1.0
    return c[:-1], c[1:], y, y


def wasserstein_1d(mu, nu, p: int = 2) -> float:
    """Exact ``W_p`` (``p`` in ``{1, 2}``) between 1D measures.

    The quantile functions of discrete measures and 1D grid densities are
    affine on a common refinement of their breakpoints in ``[0, 1]``, so
    ``int_0^1 |Q_mu - Q_nu|^p`` is integrated in closed form per piece.
    """
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    A, B = _quantile_pieces(mu), _quantile_pieces(nu)
    s = np.unique(np.concatenate([A[0], A[1], B[0], B[1], [0.0, 1.0]]))
    s = s[(s >= 0) & (s <= 1)]
    s0, s1 = s[:-1], s[1:]
    mid = 0.5 * (s0 + s1)
    # evaluate each affine piece (selected at the midpoint) at both ends
    def ends(P):
        t0, t1, q0, q1 = P
        k = np.clip(np.searchsorted(t1, mid, side="left"), 0, len(t1) - 1)
        span = t1[k] - t0[k]
        slope = np.where(span > 0, (q1[k] - q0[k]) / np.where(span > 0, span, 1.0), 0.0)
        return q0[k] + slope * (s0 - t0[k]), q0[k] + slope * (s1 - t0[k])

    a0, a1 = ends(A)
    b0, b1 = ends(B)
    D0, D1 = a0 - b0, a1 - b1
    L = s1 - s0
    if p == 2:
        total = np.sum(L * (D0 * D0 + D0 * D1 + D1 * D1) / 3.0)
        return float(math.sqrt(max(total, 0.0)))
    same = D0 * D1 >= 0
    den = np.abs(D0) + np.abs(D1)
    cross = np.where(den > 0, (D0 * D0 + D1 * D1) / (2.0 * np.where(den > 0, den, 1.0)), 0.0)
    total = np.sum(L * np.where(same, 0.5 * np.abs(D0 + D1), cross))
    return float(total)


def transport_cost(mu: DiscreteMeasure, nu: DiscreteMeasure, power: float = 1.0,
                   max_support: int = 2000) -> float:
    """Optimal value of the transportation LP with cost ``||y - z||^power``.

    Solved exactly with the HiGHS simplex through :func:`scipy.optimize.linprog`.
    """
    mu, nu = mu.positive(), nu.positive()
    if len(mu) + len(nu) > max_support:
        raise SizeLimit(f"combined support {len(mu) + len(nu)} exceeds {max_support}")
    n, m = len(mu), len(nu)
    C = np.linalg.norm(mu.points[:, None, :] - nu.points[None, :, :], axis=2) ** power
    if n == 1 or m == 1:
        return float(np.sum(C * (mu.weights[:, None] * nu.weights[None, :])))
    rows = sparse.kron(sparse.eye(n), np.ones((1, m)), format="csr")
    cols = sparse.kron(np.ones((1, n)), sparse.eye(m), format="csr")
    A = sparse.vstack([rows, cols[:-1]]).tocsr()
    b = np.concatenate([mu.weights, nu.weights[:-1]])
    res = linprog(C.ravel(), A_eq=A, b_eq=b, bounds=(0, None), method="highs-ds")
    if res.status != 0:
        raise RuntimeError(f"transport LP failed: {res.message}")
    return float(max(res.fun, 0.0))


def w1_discrete(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Exact ``W_1`` between discrete measures (combined support <= 2000)."""
    return transport_cost(mu, nu, 1.0)


def w2_discrete(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Exact ``W_2`` between discrete measures via the squared-cost LP."""
    return math.sqrt(transport_cost(mu, nu, 2.0))


def pushforward(rho: GridDensity, T: np.ndarray) -> DiscreteMeasure:
    """Image measure of ``rho`` under a map sampled at cell centers."""
    T = np.asarray(T, dtype=float).reshape(len(rho), -1)
    pts, inv = np.unique(T, axis=0, return_inverse=True)
    w = np.bincount(inv.reshape(-1), weights=rho.masses, minlength=len(pts))
    return DiscreteMeasure(pts, w / w.sum(), check=False)
