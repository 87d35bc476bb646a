"""Brenier maps, the linearized optimal transport embedding, and empirical
checks of the stability inequalities of potentials and maps."""

__version__ = "0.1.0"

from .errors import LotstabError
from .geometry import Ball, Box, Interval, Polygon, Segment, dilate, erode
from .measures import DiscreteMeasure, GridDensity
from .otsolve import TransportResult, brenier_1d, solve_semidiscrete
from .lot import EmbeddedMeasure, bracket, embed, lot_distance, variance

__all__ = [
    "__version__",
    "LotstabError",
    "Ball",
    "Box",
    "Interval",
    "Polygon",
    "Segment",
    "dilate",
    "erode",
    "DiscreteMeasure",
    "GridDensity",
    "TransportResult",
    "brenier_1d",
    "solve_semidiscrete",
    "EmbeddedMeasure",
    "bracket",
    "embed",
    "lot_distance",
    "variance",
]
