"""Closed-form dynamics of a two-level atom damped by a thermal bosonic bath.

Basis order is ``(|e>, |g>)``; lifted vectors use ``|e e>, |e g>, |g e>, |g g>``.
The finite-temperature lifted generator splits as ``H0 + i*gamma*J`` with
commuting parts, so the propagator is ``exp(-i H0 t) exp(gamma J t)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .lindblad_model import MasterEquation, StandardForm, from_standard_form
from .operator_algebra import devectorize, require_square, tensor_product, vectorize
from .operators import IDENTITY_2, SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z

__all__ = [
    "QubitParams",
    "bose_occupation",
    "qubit_standard_form",
    "qubit_model",
    "finite_T_effective_hamiltonian",
    "finite_T_split",
    "finite_T_propagator",
    "evolve_qubit",
]


def bose_occupation(omega: float, temperature: float) -> float:
    """Mean thermal occupation ``1 / (exp(omega/T) - 1)`` with ``k_B = 1``."""
    if not omega > 0 or not temperature > 0:
        raise ContractViolation(
            f"bose_occupation needs positive frequency and temperature, got {omega}, {temperature}"
        )
    return 1.0 / math.expm1(omega / temperature)


@dataclass(frozen=True)
class QubitParams:
    rabi: float
    gamma: float
    nbar: float = 0.0

    def __post_init__(self):
        for name in ("rabi", "gamma", "nbar"):
            if not math.isfinite(getattr(self, name)):
                raise ContractViolation(f"{name} must be finite")
        if self.gamma < 0:
            raise ContractViolation(f"gamma must be >= 0, got {self.gamma}")
        if self.nbar < 0:
            raise ContractViolation(f"nbar must be >= 0, got {self.nbar}")

    @classmethod
    def at_temperature(cls, rabi: float, gamma: float, temperature: float, omega: float | None = None):
        """Occupation from the bath temperature; ``omega`` defaults to ``rabi``."""
        return cls(rabi, gamma, bose_occupation(rabi if omega is None else omega, temperature))


def qubit_standard_form(p: QubitParams) -> StandardForm:
    return StandardForm(
        h0=0.5 * p.rabi * SIGMA_Z,
        lowering_channels=((SIGMA_MINUS, p.gamma * (p.nbar + 1)),),
        raising_channels=((SIGMA_PLUS, p.gamma * p.nbar),),
    )


def qubit_model(p: QubitParams) -> MasterEquation:
    return from_standard_form(qubit_standard_form(p))


def finite_T_split(p: QubitParams) -> tuple[np.ndarray, np.ndarray]:
    """The commuting pair ``(H0, J)`` with ``H_eff = H0 + i*gamma*J`` on the lifted space."""
    ident4 = np.eye(4, dtype=np.complex128)
    sz, tz = tensor_product(SIGMA_Z, IDENTITY_2), tensor_product(IDENTITY_2, SIGMA_Z)
    h0 = 0.5 * p.rabi * (sz - tz) - 1j * p.gamma * (p.nbar + 0.5) * ident4
    j = (
        p.nbar * tensor_product(SIGMA_PLUS, SIGMA_PLUS)
        + (p.nbar + 1) * tensor_product(SIGMA_MINUS, SIGMA_MINUS)
        - 0.25 * (sz + tz)
    )
    return h0, j


def finite_T_effective_hamiltonian(p: QubitParams) -> np.ndarray:
    h0, j = finite_T_split(p)
    return h0 + 1j * p.gamma * j


def finite_T_propagator(p: QubitParams, t: float) -> np.ndarray:
    """Closed-form ``exp(-i H_eff t)`` (4x4).

    Populations ``(ee, gg)`` mix through the block

        1/(2N+1) [[N + (N+1)E, N(1-E)], [(N+1)(1-E), N+1 + N E]],  E = exp(-(2N+1) gamma t)

    and the coherences ``eg``, ``ge`` pick up ``exp(-+i rabi t - (N+1/2) gamma t)``.
    The ``1/(2N+1)`` factor belongs to the population block only.
    """
    t = float(t)
    nb, g = p.nbar, p.gamma
    decay = math.exp(-(2 * nb + 1) * g * t)
    norm = 2 * nb + 1
    damp = math.exp(-(nb + 0.5) * g * t)
    u = np.zeros((4, 4), dtype=np.complex128)
    u[0, 0] = (nb + (nb + 1) * decay) / norm
    u[0, 3] = nb * (1 - decay) / norm
    u[3, 0] = (nb + 1) * (1 - decay) / norm
    u[3, 3] = (nb + 1 + nb * decay) / norm
    u[1, 1] = np.exp(-1j * p.rabi * t) * damp
    u[2, 2] = np.exp(1j * p.rabi * t) * damp
    return u


def evolve_qubit(rho0, p: QubitParams, t: float) -> np.ndarray:
    rho0 = require_square(rho0, "rho0")
    if rho0.shape != (2, 2):
        raise ContractViolation(f"qubit state must be 2x2, got {rho0.shape}")
    return devectorize(finite_T_propagator(p, t) @ vectorize(rho0).amplitudes)
