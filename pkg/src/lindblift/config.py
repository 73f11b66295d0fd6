"""Centralized numerical tolerances."""
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    kernel: float = 1e-12
    physics: float = 1e-8
    hermiticity: float = 1e-10
    eigenoperator: float = 1e-8
    # levels kept clear of the Fock cutoff before results count as reliable
    truncation_buffer: int = 8
    truncation_weight: float = 1e-12


DEFAULT_TOLERANCES = Tolerances()
