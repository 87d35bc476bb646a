"""The linearized optimal transport embedding and the functionals of the
stability estimates.

A measure ``mu`` is represented by its Brenier map ``T_mu`` from a fixed
reference density ``rho``; the distance between two embeddings is the
``L^2(rho)`` distance of their maps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ReferenceMismatch
from .measures import DiscreteMeasure, GridDensity
from .otsolve import TransportResult, brenier_1d, solve_semidiscrete

__all__ = [
    "EmbeddedMeasure",
    "embed",
    "lot_distance",
    "variance",
    "bracket",
    "atoms",
    "dual_difference",
]


@dataclass
class EmbeddedMeasure:
    """A target measure embedded through its Brenier map from ``rho``."""

    rho: GridDensity
    measure: object
    result: TransportResult

    @property
    def T(self) -> np.ndarray:
        return self.result.T

    @property
    def phi(self) -> np.ndarray:
        return self.result.phi

    def psi(self, y) -> np.ndarray:
        return self.result.psi(y)

    def extrema(self) -> tuple[float, float]:
        return self.result.extrema()


def embed(rho: GridDensity, mu, **opts) -> EmbeddedMeasure:
    """Embed ``mu`` (discrete, or a 1D grid density) against ``rho``.

    1D problems use the exact quantile solver, 2D problems the
    semi-discrete solver (``opts`` are passed through to it).
    """
    if rho.dim == 1:
        res = brenier_1d(rho, mu)
    else:
        if not isinstance(mu, DiscreteMeasure):
            raise TypeError("2D targets must be discrete")
        res = solve_semidiscrete(rho, mu, **opts)
    return EmbeddedMeasure(rho, mu, res)


def lot_distance(a: EmbeddedMeasure, b: EmbeddedMeasure) -> float:
    """``||T_a - T_b||_{L^2(rho)}``."""
    if a.rho is not b.rho:
        if not (a.rho.centers.shape == b.rho.centers.shape
                and np.array_equal(a.rho.centers, b.rho.centers)
                and np.array_equal(a.rho.masses, b.rho.masses)):
            raise ReferenceMismatch("embeddings use different reference densities")
    diff = a.T - b.T
    return float(np.sqrt(max(a.rho.integrate(np.einsum("nd,nd->n", diff, diff)), 0.0)))


def variance(f, weights) -> float:
    """``min_c int (f - c)^2 dm`` for a finite measure of any total mass."""
    f = np.asarray(f, dtype=float).reshape(-1)
    w = np.asarray(weights, dtype=float).reshape(-1)
    tot = float(w.sum())
    if tot <= 0:
        return 0.0
    mean = float(np.dot(w, f)) / tot
    return float(np.dot(w, (f - mean) ** 2))


def atoms(m) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature points and weights of a discrete measure or grid density."""
    if isinstance(m, GridDensity):
        return m.centers, m.masses
    if isinstance(m, EmbeddedMeasure):
        return atoms(m.measure)
    return m.points, m.weights


def _evaluate(psi, y):
    if isinstance(psi, EmbeddedMeasure):
        return psi.psi(y)
    if isinstance(psi, TransportResult):
        return psi.psi(y)
    return np.asarray(psi(y), dtype=float)


def bracket(psi0, psi1, mu0, mu1) -> float:
    """Dual pairing ``<psi0 - psi1, mu1 - mu0>``.

    ``psi0, psi1`` are anything evaluable at points (dual potentials,
    transport results or embeddings); ``mu0, mu1`` discrete measures or 1D
    grid densities.
    """
    y0, w0 = atoms(mu0)
    y1, w1 = atoms(mu1)
    d1 = _evaluate(psi0, y1) - _evaluate(psi1, y1)
    d0 = _evaluate(psi0, y0) - _evaluate(psi1, y0)
    return float(np.dot(w1, d1) - np.dot(w0, d0))


def dual_difference(e0: EmbeddedMeasure, e1: EmbeddedMeasure) -> tuple[np.ndarray, np.ndarray]:
    """``psi1 - psi0`` on the support of ``mu0 + mu1`` with its weights."""
    y0, w0 = atoms(e0.measure)
    y1, w1 = atoms(e1.measure)
    Y = np.concatenate([y0, y1])
    v = e1.psi(Y) - e0.psi(Y)
    return v, np.concatenate([w0, w1])
