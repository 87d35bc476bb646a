"""Semi-discrete optimal transport and the exact 1D solver.

Sign convention
---------------
The Kantorovich functional is ``K(psi) = int max_j (<x, y_j> - psi_j) drho``.
The solver minimizes ``G(psi) = K(psi) + <psi, w>`` (equivalently maximizes
``F = -G``), whose gradient is ``w_j - mass_j(psi)``, ``mass_j`` being the
``rho``-mass of the Laguerre cell of ``y_j``.

Quadrature
----------
``K`` and the cell masses are integrated exactly along the row-center
scanline of every grid row (the density is constant on each scanline
piece).  This makes ``G`` a smooth function of ``psi`` between events,
with an exact gradient, so tight mass tolerances and finite-difference
checks are meaningful at moderate resolution.  In 1D the scanline
integration is exact.  The sampled map, potential and assignment use the
argmax at cell centers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .convexfun import MaxAffinePotential, envelope_intervals
from .errors import NonConvergence, SupportMismatch
from .geometry import ConvexDomain
from .measures import DiscreteMeasure, GridDensity

log = logging.getLogger(__name__)

__all__ = [
    "DualPotential",
    "TransportResult",
    "kantorovich",
    "laguerre_masses",
    "dual_objective",
    "dual_gradient",
    "solve_semidiscrete",
    "brenier_1d",
    "dual_path",
]


class DualPotential:
    """Dual values ``psi_j`` on target points, with the induced potential.

    Calling the object evaluates the conjugate ``phi*`` of
    ``phi = max_j <x, y_j> - psi_j`` over the source domain, which is the
    globally defined dual potential (it equals ``psi_j`` on every atom whose
    Laguerre cell is nonempty).
    """

    def __init__(self, points, values, domain: ConvexDomain):
        Y = np.asarray(points, dtype=float)
        if Y.ndim == 1:
            Y = Y[:, None]
        psi = np.asarray(values, dtype=float).reshape(-1)
        if psi.shape != (len(Y),):
            raise ValueError("one dual value per support point")
        if not np.all(np.isfinite(psi)):
            raise ValueError("dual values must be finite")
        self.points, self.values, self.domain = Y, psi, domain
        self._phi = None

    def __len__(self):
        return len(self.values)

    @property
    def potential(self) -> MaxAffinePotential:
        if self._phi is None:
            self._phi = MaxAffinePotential(self.points, self.values, self.domain)
        return self._phi

    def __call__(self, y) -> np.ndarray:
        return self.potential.conjugate(y)

    def shifted(self, c: float) -> "DualPotential":
        return DualPotential(self.points, self.values + c, self.domain)


@dataclass
class TransportResult:
    """Brenier map and potentials sampled on the source grid.

    Attributes
    ----------
    rho : GridDensity
    target : DiscreteMeasure or GridDensity
    T : ndarray, shape (M, d)
        Map values at cell centers.
    phi : ndarray, shape (M,)
        Brenier potential at cell centers, ``rho``-centered.
    dual : DualPotential or None
        Dual values on the target atoms (``None`` for density targets).
    assignment : ndarray or None
        Laguerre cell index of each grid cell.
    masses : ndarray or None
        Laguerre cell masses (scanline quadrature).
    """

    rho: GridDensity
    target: object
    T: np.ndarray
    phi: np.ndarray
    dual: DualPotential | None
    assignment: np.ndarray | None
    masses: np.ndarray | None
    iterations: int
    grad_inf_norm: float
    objective: float
    converged: bool = True
    method: str = "semidiscrete"
    phi_fn: Callable | None = field(default=None, repr=False)
    psi_fn: Callable | None = field(default=None, repr=False)
    extrema_fn: Callable | None = field(default=None, repr=False)

    def psi(self, y) -> np.ndarray:
        """Dual potential ``phi*`` at arbitrary points."""
        y = np.asarray(y, dtype=float).reshape(-1, self.rho.dim)
        if self.psi_fn is not None:
            return self.psi_fn(y)
        return self.dual(y)

    def phi_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1, self.rho.dim)
        if self.phi_fn is not None:
            return self.phi_fn(x)
        return self.dual.potential(x)

    def extrema(self) -> tuple[float, float]:
        """Exact ``(min_X phi, max_X phi)`` of the centered potential."""
        if self.extrema_fn is not None:
            return self.extrema_fn()
        return self.dual.potential.extrema()

    @property
    def grid_masses(self) -> np.ndarray:
        """Whole-cell masses of the center assignment."""
        return np.bincount(self.assignment, weights=self.rho.masses, minlength=len(self.dual))

    def summary(self) -> dict:
        return {
            "iterations": int(self.iterations),
            "grad_inf_norm": float(self.grad_inf_norm),
            "objective": float(self.objective),
        }


# scanline integrals ---------------------------------------------------------


def _row_terms(Y: np.ndarray, psi: np.ndarray, rho: GridDensity, diagonal: bool = False):
    rows = rho.rows
    a = Y[:, 0]
    if rho.dim == 1:
        b = -psi[None, :]
    else:
        b = rows.t[:, None] * Y[None, :, 1] - psi[None, :]
    lo, hi = rows.lo, rows.hi
    L, U, KL, KU = envelope_intervals(a, b, lo, hi, neighbors=True)
    L = np.clip(L, lo[:, None], hi[:, None])
    U = np.clip(np.maximum(U, L), lo[:, None], hi[:, None])
    ML, M1L = rows.cumulative(L)
    MU, M1U, lamU = rows.cumulative(U, with_density=True)
    dM = np.maximum(MU - ML, 0.0)
    dM1 = M1U - M1L
    mass = dM.sum(axis=0)
    K = float(np.sum(a[None, :] * dM1 + b * dM))
    if not diagonal:
        return K, mass
    # Hessian of K: each interior right end of cell j is shared with the
    # neighbour line k; weight = density there / slope gap
    open_ = (U > L) & (U < hi[:, None]) & (KU >= 0)
    r_idx, j_idx = np.nonzero(open_)
    k_idx = KU[r_idx, j_idx]
    lam = lamU[r_idx, j_idx]
    c = lam / (a[k_idx] - a[j_idx])
    return K, mass, (j_idx, k_idx, c)


def laguerre_masses(Y, psi, rho: GridDensity) -> np.ndarray:
    """Masses of the Laguerre cells ``argmax_j <x, y_j> - psi_j``."""
    Y = np.asarray(Y, dtype=float).reshape(len(psi), rho.dim)
    return _row_terms(Y, np.asarray(psi, dtype=float), rho)[1]


def _unpack(psi, mu=None):
    if isinstance(psi, DualPotential):
        Y, v = psi.points, psi.values
    else:
        Y, v = psi
        Y = np.asarray(Y, dtype=float)
        v = np.asarray(v, dtype=float)
    if mu is not None and (mu.points.shape != Y.shape or not np.array_equal(mu.points, Y)):
        raise SupportMismatch("dual potential and target have different support")
    return Y, v


def kantorovich(psi, rho: GridDensity) -> float:
    """``K(psi) = int psi* drho`` with ``psi*(x) = max_j <x, y_j> - psi_j``."""
    Y, v = _unpack(psi)
    return _row_terms(Y.reshape(len(v), rho.dim), v, rho)[0]


def dual_objective(psi, rho: GridDensity, mu: DiscreteMeasure) -> float:
    """``G(psi) = K(psi) + <psi, w>``, minimized by the optimal dual."""
    Y, v = _unpack(psi, mu)
    return kantorovich((Y, v), rho) + float(v @ mu.weights)


def dual_gradient(psi, rho: GridDensity, mu: DiscreteMeasure) -> np.ndarray:
    """Gradient ``w_j - mass_j`` of :func:`dual_objective`."""
    Y, v = _unpack(psi, mu)
    return mu.weights - laguerre_masses(Y, v, rho)


# solver ---------------------------------------------------------------------


def _hessian(n, pieces):
    j, k, c = pieces
    H = np.zeros((n, n))
    np.add.at(H, (j, j), c)
    np.add.at(H, (k, k), c)
    np.add.at(H, (j, k), -c)
    np.add.at(H, (k, j), -c)
    return H


def _diagonal(n, pieces):
    j, k, c = pieces
    return np.bincount(j, c, minlength=n) + np.bincount(k, c, minlength=n)


def _preconditioner(diag):
    """Inverse Hessian diagonal, floored for cells with no interior boundary."""
    pos = diag > 0
    if not pos.any():
        return np.ones_like(diag)
    floor = float(np.median(diag[pos]))
    return 1.0 / np.where(pos, np.maximum(diag, 1e-3 * floor), floor)


def _initial_psi(Y, rho, w):
    psi = 0.5 * np.einsum("nd,nd->n", Y, Y)
    _, mass = _row_terms(Y, psi, rho)
    if len(w) == 1 or mass.min() >= 0.1 * w.min():
        return psi
    # Voronoi cells of z_j = c + s (y_j - m) have dual values |z_j|^2 / 2s
    # for the original atoms; fit the atoms inside the domain
    c = rho.domain.reference
    r, _ = rho.domain.radii()
    m = Y.mean(axis=0)
    spread = float(np.linalg.norm(Y - m, axis=1).max())
    s = 0.9 * r / spread if spread > 0 else 1.0
    Z = c + s * (Y - m)
    return 0.5 * np.einsum("nd,nd->n", Z, Z) / s


def _center(rho, Y, psi):
    pot = MaxAffinePotential(Y, psi, rho.domain)
    C = rho.centers
    assign = np.empty(len(C), dtype=int)
    phi = np.empty(len(C))
    for s in range(0, len(C), 65536):
        sc = pot.scores(C[s:s + 65536])
        assign[s:s + 65536] = np.argmax(sc, axis=1)
        phi[s:s + 65536] = sc[np.arange(len(sc)), assign[s:s + 65536]]
    c = rho.integrate(phi)
    return assign, phi - c, psi + c


def _lbfgs(psi, state, evaluate, eps0, tol, max_iter, memory, stall=25):
    G, g, mass, pieces = state
    n = len(psi)
    S, Yh = [], []
    it = 0
    best_g = float(np.abs(g).max())
    since_best = 0
    while it < max_iter:
        it += 1
        P = _preconditioner(_diagonal(n, pieces))
        q = -g.copy()
        alphas = []
        for s_k, y_k in zip(reversed(S), reversed(Yh)):
            a_k = (s_k @ q) / (y_k @ s_k)
            alphas.append(a_k)
            q -= a_k * y_k
        q *= P
        for (s_k, y_k), a_k in zip(zip(S, Yh), reversed(alphas)):
            b_k = (y_k @ q) / (y_k @ s_k)
            q += (a_k - b_k) * s_k
        d = q
        slope = float(g @ d)
        if not slope < 0:
            S.clear(), Yh.clear()
            d = -P * g
            slope = float(g @ d)
        step = 1.0
        new = None
        for _ in range(40):
            cand = evaluate(psi + step * d)
            G_new, g_new, m_new, _ = cand
            armijo = G_new <= G + 1e-4 * step * slope
            flat = abs(G_new - G) <= 1e-14 * (1.0 + abs(G)) and np.abs(g_new).max() < np.abs(g).max()
            if m_new.min() >= eps0 and (armijo or flat):
                new = cand
                break
            step *= 0.5
        if new is None:
            break
        s_vec, y_vec = step * d, new[1] - g
        if s_vec @ y_vec > 1e-18 * (s_vec @ s_vec):
            S.append(s_vec), Yh.append(y_vec)
            if len(S) > memory:
                S.pop(0), Yh.pop(0)
        psi = psi + s_vec
        G, g, mass, pieces = new
        gi = float(np.abs(g).max())
        if gi <= tol:
            return psi, new, it, True
        if gi < 0.5 * best_g:
            best_g, since_best = gi, 0
        else:
            since_best += 1
            if since_best >= stall:
                break
    return psi, (G, g, mass, pieces), it, False


def _newton(psi, state, evaluate, eps0, tol, max_iter):
    """Damped Newton with the Kitagawa-Merigot-Thibert step rule."""
    G, g, mass, pieces = state
    n = len(psi)
    it = 0
    while it < max_iter:
        it += 1
        H = _hessian(n, pieces)
        # H is singular along constants; restrict to zero-sum directions
        d = -np.linalg.lstsq(H + np.ones((n, n)) / n, g, rcond=None)[0]
        d -= d.mean()
        gn = float(np.linalg.norm(g))
        step = 1.0
        new = None
        for _ in range(60):
            cand = evaluate(psi + step * d)
            if cand[2].min() >= eps0 and np.linalg.norm(cand[1]) <= (1.0 - 0.5 * step) * gn:
                new = cand
                break
            step *= 0.5
        if new is None:
            break
        psi = psi + step * d
        G, g, mass, pieces = new
        if float(np.abs(g).max()) <= tol:
            return psi, new, it, True
    return psi, (G, g, mass, pieces), it, False


def solve_semidiscrete(rho: GridDensity, mu: DiscreteMeasure, *, tol: float = 1e-7,
                       max_iter: int = 1000, memory: int = 10, psi0=None,
                       method: str = "lbfgs") -> TransportResult:
    """Optimal transport from a grid density to a discrete measure.

    Parameters
    ----------
    rho : GridDensity
    mu : DiscreteMeasure
        Atoms with zero weight are allowed; their dual value is the
        conjugate of the optimal potential.
    tol : float
        Stop when every cell mass is within ``tol`` of its weight.
    max_iter : int
        Cap on the total number of iterations.
    memory : int
        L-BFGS history length.
    psi0 : array_like, optional
        Initial dual values on the positive-weight atoms; defaults to
        ``|y_j|^2 / 2`` (or a fitted Voronoi start when that leaves
        nearly empty cells).
    method : {'lbfgs', 'newton'}
        ``'lbfgs'`` runs Jacobi-preconditioned L-BFGS with Armijo
        backtracking and switches to damped Newton if it stalls;
        ``'newton'`` uses damped Newton from the start.  Both reject steps
        that shrink a cell below half the initial minimal mass.

    Returns
    -------
    TransportResult

    Raises
    ------
    NonConvergence
        After ``max_iter`` iterations, carrying the best iterate.
    """
    if mu.dim != rho.dim:
        raise ValueError("source and target dimensions differ")
    if method not in ("lbfgs", "newton"):
        raise ValueError(f"unknown method {method!r}")
    pos = mu.weights > 0
    Y = mu.points[pos]
    w = mu.weights[pos]
    n = len(w)
    psi = _initial_psi(Y, rho, w) if psi0 is None else np.array(psi0, dtype=float).reshape(n)

    def evaluate(p):
        K, mass, pieces = _row_terms(Y, p, rho, diagonal=True)
        return K + float(p @ w), w - mass, mass, pieces

    state = evaluate(psi)
    eps0 = 0.5 * min(float(state[2].min()), float(w.min()))
    it = 0
    gi = float(np.abs(state[1]).max())
    converged = n == 1 or gi <= tol
    if not converged and method == "lbfgs":
        psi, state, it, converged = _lbfgs(psi, state, evaluate, eps0, tol, max_iter, memory)
    if not converged and it < max_iter:
        psi, state, k, converged = _newton(psi, state, evaluate, eps0, tol, max_iter - it)
        it += k
    G, g, mass, _ = state
    psi = psi - float(psi @ w)          # normalize by the mu-mean
    assign, phi, psi_c = _center(rho, Y, psi)
    full = np.empty(len(mu))
    full[pos] = psi_c
    result = TransportResult(
        rho=rho, target=mu, T=Y[assign], phi=phi,
        dual=None, assignment=None, masses=None,
        iterations=it, grad_inf_norm=float(np.abs(g).max()),
        objective=float(G), converged=converged,
    )
    pot = MaxAffinePotential(Y, psi_c, rho.domain)
    if not pos.all():
        full[~pos] = pot.conjugate(mu.points[~pos])
    index = np.nonzero(pos)[0]
    result.assignment = index[assign]
    result.dual = DualPotential(mu.points, full, rho.domain)
    result.dual._phi = pot if pos.all() else None
    m_full = np.zeros(len(mu))
    m_full[pos] = mass
    result.masses = m_full
    if not converged:
        raise NonConvergence(f"no convergence after {it} iterations (|grad|={result.grad_inf_norm:.3e})", result)
    log.debug("semi-discrete solve: %d iterations, |grad| %.3e", it, result.grad_inf_norm)
    return result


# exact 1D solver ------------------------------------------------------------


def _cdf_1d(m, y):
    """Right-continuous distribution function of a 1D measure."""
    y = np.asarray(y, dtype=float)
    if isinstance(m, GridDensity):
        return m.cdf(y)
    order = np.argsort(m.points[:, 0], kind="stable")
    pts = m.points[order, 0]
    cw = np.concatenate([[0.0], np.cumsum(m.weights[order])])
    cw[-1] = 1.0
    return cw[np.searchsorted(pts, y, side="right")]


def _quantile_1d(m, t):
    t = np.asarray(t, dtype=float)
    if isinstance(m, GridDensity):
        return m.quantile(t)
    order = np.argsort(m.points[:, 0], kind="stable")
    pts = m.points[order, 0]
    w = m.weights[order]
    cw = np.cumsum(w)
    cw[-1] = 1.0
    k = np.clip(np.searchsorted(cw, t, side="left"), 0, len(pts) - 1)
    # with zero-weight atoms the smallest charged atom must be chosen
    charged = np.nonzero(w > 0)[0]
    first = charged[np.searchsorted(charged, k, side="left").clip(0, len(charged) - 1)]
    return pts[first]


def _target_knots(m):
    if isinstance(m, GridDensity):
        return m.rows.cm[0]
    cw = np.cumsum(m.weights[np.argsort(m.points[:, 0], kind="stable")])
    return np.concatenate([[0.0], cw])


def brenier_1d(rho: GridDensity, mu) -> TransportResult:
    """Exact 1D Brenier map ``T = Q_mu o F_rho`` and its potentials.

    ``mu`` is a 1D :class:`DiscreteMeasure` or :class:`GridDensity`.  The map
    is affine between the source edges and the preimages of the target
    knots, so the potential is integrated exactly; the dual potential is
    ``psi(y) = x* y - phi(x*)`` with ``x* = F_rho^{-1}(F_mu(y))``.
    """
    if rho.dim != 1:
        raise ValueError("brenier_1d needs a 1D source")
    a, b = rho.edges[0], rho.edges[-1]
    knots_t = np.clip(_target_knots(mu), 0.0, 1.0)
    xs = np.unique(np.concatenate([rho.edges, rho.quantile(knots_t)]))
    xs = xs[(xs >= a) & (xs <= b)]

    def T_mid(x0, x1):
        return _quantile_1d(mu, rho.cdf(0.5 * (x0 + x1)))

    dx = np.diff(xs)
    incr = dx * T_mid(xs[:-1], xs[1:])
    phi_knots = np.concatenate([[0.0], np.cumsum(incr)])

    def raw_phi(x):
        x = np.clip(np.asarray(x, dtype=float).reshape(-1), a, b)
        k = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(xs) - 2)
        return phi_knots[k] + (x - xs[k]) * T_mid(xs[k], x)

    C = rho.centers[:, 0]
    shift = rho.integrate(raw_phi(C))

    def phi_fn(x):
        return raw_phi(np.asarray(x).reshape(-1)) - shift

    def psi_fn(y):
        y = np.asarray(y, dtype=float).reshape(-1)
        xstar = rho.quantile(_cdf_1d(mu, y))
        return xstar * y - phi_fn(xstar)

    def extrema_fn():
        ends = phi_fn(np.array([a, b]))
        mn = -float(psi_fn(np.zeros(1))[0])
        return min(mn, float(ends.min())), float(ends.max())

    T = _quantile_1d(mu, rho.cdf(C))[:, None]
    phi = phi_fn(C)
    dual = None
    assign = None
    masses = None
    if isinstance(mu, DiscreteMeasure):
        dual = DualPotential(mu.points, psi_fn(mu.points[:, 0]), rho.domain)
        assign = np.searchsorted(mu.points[:, 0], T[:, 0]) if np.all(np.diff(mu.points[:, 0]) > 0) \
            else np.argmin(np.abs(mu.points[:, 0][None, :] - T), axis=1)
        masses = mu.weights.copy()
    return TransportResult(
        rho=rho, target=mu, T=T, phi=phi, dual=dual, assignment=assign, masses=masses,
        iterations=0, grad_inf_norm=0.0, objective=float("nan"), converged=True,
        method="quantile", phi_fn=lambda x: phi_fn(x), psi_fn=lambda y: psi_fn(y), extrema_fn=extrema_fn,
    )


def dual_path(psi0: DualPotential, psi1: DualPotential, t: float, rho: GridDensity):
    """Value, derivative and pushforward along ``psi^t = (1-t) psi0 + t psi1``.

    Returns
    -------
    K : float
        ``K(psi^t)``.
    dK : float
        ``-sum_j v_j mass_j(t)`` with ``v = psi1 - psi0``.
    mu_t : DiscreteMeasure
        Laguerre cell masses of ``psi^t`` on the common support.
    """
    if psi0.points.shape != psi1.points.shape or not np.allclose(psi0.points, psi1.points, atol=1e-12, rtol=0):
        raise SupportMismatch("dual potentials on different supports")
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    v = psi1.values - psi0.values
    psit = (1.0 - t) * psi0.values + t * psi1.values
    K, mass = _row_terms(psi0.points, psit, rho)
    tot = mass.sum()
    return K, float(-v @ mass), DiscreteMeasure(psi0.points, mass / tot, check=False)
