"""Truncated Loewner-Kufarev coefficient dynamics and their Virasoro structure."""

from .evolution import (
    BlowUpError,
    DrivingFunction,
    EvolutionState,
    Trajectory,
    build_L_nonpositive,
    conserved_virasoro,
    integrate,
)
from .series import LaurentWindow, TruncatedTaylor

__all__ = [
    "BlowUpError",
    "DrivingFunction",
    "EvolutionState",
    "LaurentWindow",
    "Trajectory",
    "TruncatedTaylor",
    "build_L_nonpositive",
    "conserved_virasoro",
    "integrate",
]
__version__ = "0.1.0"
