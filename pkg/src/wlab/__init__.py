"""Exact optimal transport and Wasserstein-space geometry for finitely supported measures."""

from .measures import (
    DiscreteMeasure,
    GroundSpace,
    MeasureError,
    SignedDecomposition,
    WeightedAtoms,
    dirac,
    distance,
    euclidean,
    lattice_decompose,
    mixture,
    powered_euclidean,
    pushforward,
    table_space,
)
from .transport import OTResult, TransportError, TransportPlan, brute_force_solve, glue, solve, wasserstein

__version__ = "0.1.0"

__all__ = [
    "DiscreteMeasure",
    "GroundSpace",
    "MeasureError",
    "OTResult",
    "SignedDecomposition",
    "TransportError",
    "TransportPlan",
    "WeightedAtoms",
    "brute_force_solve",
    "dirac",
    "distance",
    "euclidean",
    "glue",
    "lattice_decompose",
    "mixture",
    "powered_euclidean",
    "pushforward",
    "solve",
    "table_space",
    "wasserstein",
]
