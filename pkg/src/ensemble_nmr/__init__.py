"""Design calculator and simulators for an ensemble NMR quantum register of
shallow donors in silicon."""

from .constants import CONSTANTS_VERSION
from .donor import P31, DonorSpecies, gain_factor, transition_frequencies
from .errors import (AmbiguityError, ConvergenceError, DomainError, LayoutError,
                     ParseError)

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS_VERSION", "P31", "DonorSpecies", "gain_factor", "transition_frequencies",
    "AmbiguityError", "ConvergenceError", "DomainError", "LayoutError", "ParseError",
]
