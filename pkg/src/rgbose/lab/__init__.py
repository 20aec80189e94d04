"""Physics modules: model, propagators, thermodynamics, power counting, trees, integrals, flows and WIs."""

from .errors import ConfigError, ConvergenceError, DomainError, NonContractionError, QuadratureError, RGBoseError
from .model import CutoffProfile, ModelParams, Momentum

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "CutoffProfile",
    "DomainError",
    "ModelParams",
    "Momentum",
    "NonContractionError",
    "QuadratureError",
    "RGBoseError",
]
