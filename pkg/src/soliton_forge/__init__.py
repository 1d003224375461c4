"""Chart-based Riemannian tensor calculus and soliton verification."""

from .errors import (
    DomainError,
    HypothesisUnmet,
    NumericalError,
    OrderError,
    SolitonForgeError,
    SpecError,
)
from .expr import evaluate, parse
from .geometry import ChartManifold, VectorFieldSpec, frame_at
from .jet import Jet, jet_apply, seed_point

__version__ = "0.1.0"

__all__ = [
    "ChartManifold",
    "DomainError",
    "HypothesisUnmet",
    "Jet",
    "NumericalError",
    "OrderError",
    "SolitonForgeError",
    "SpecError",
    "VectorFieldSpec",
    "evaluate",
    "frame_at",
    "jet_apply",
    "parse",
    "seed_point",
    "__version__",
]
