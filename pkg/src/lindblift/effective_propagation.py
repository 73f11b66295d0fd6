"""Propagation of a master equation as a Schroedinger-like equation on system (x) ancilla.

The lifted generator is

    H_eff = H (x) I - I (x) conj(H) + i sum_a gamma_a L_a (x) conj(L_a)

so that ``-i H_eff vectorize(rho) == vectorize(rhs(model, rho))``.  The density
matrix at time ``t`` is read back from ``exp(-i H_eff t) vectorize(rho0)``.
The lifted vector is never renormalized.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import ContractViolation, DimensionMismatch, HermiticityWarning, SizeGuardError
from .lindblad_model import MasterEquation
from .operator_algebra import (
    devectorize,
    entrywise_conjugate,
    matrix_exponential,
    require_square,
    swap_permutation,
    tensor_product,
    vectorize,
)

__all__ = [
    "MAX_SYSTEM_DIM",
    "EffectiveHamiltonian",
    "build_effective_hamiltonian",
    "propagator_matrix",
    "propagate",
]

MAX_SYSTEM_DIM = 64


@dataclass(frozen=True, eq=False)
class EffectiveHamiltonian:
    matrix: np.ndarray
    source: MasterEquation

    @property
    def dim_lifted(self) -> int:
        return self.matrix.shape[0]

    def swap_symmetry_residual(self) -> float:
        """Max-abs of ``S conj(H_eff) S + H_eff`` with ``S`` the system/ancilla swap."""
        swap = swap_permutation(self.source.dim)
        return float(np.max(np.abs(swap @ self.matrix.conj() @ swap + self.matrix)))

    def propagator(self, t: float) -> np.ndarray:
        return matrix_exponential(-1j * float(t) * self.matrix)


def build_effective_hamiltonian(model: MasterEquation) -> EffectiveHamiltonian:
    n = model.dim
    if n > MAX_SYSTEM_DIM:
        raise SizeGuardError(
            f"system dimension {n} exceeds {MAX_SYSTEM_DIM}; the dense lifted "
            f"generator would be {n * n}x{n * n}"
        )
    ident = np.eye(n, dtype=np.complex128)
    h = model.drift
    h_eff = tensor_product(h, ident) - tensor_product(ident, entrywise_conjugate(h))
    for ch in model.channels:
        h_eff = h_eff + 1j * ch.rate * tensor_product(ch.operator, entrywise_conjugate(ch.operator))
    return EffectiveHamiltonian(h_eff, model)


def _time(t) -> float:
    t = float(t)
    if not math.isfinite(t):
        raise ContractViolation("evolution time must be finite")
    return t


def propagator_matrix(model: MasterEquation, t: float, h_eff: EffectiveHamiltonian | None = None) -> np.ndarray:
    """The ``N^2 x N^2`` map ``exp(-i H_eff t)`` acting on vectorized operators."""
    t = _time(t)
    if h_eff is None:
        h_eff = build_effective_hamiltonian(model)
    return h_eff.propagator(t)


def apply_propagator(prop: np.ndarray, rho0) -> np.ndarray:
    psi = vectorize(rho0)
    if psi.amplitudes.size != prop.shape[1]:
        raise DimensionMismatch(f"rho0 of dim {psi.dim} does not match propagator {prop.shape}")
    return devectorize(prop @ psi.amplitudes)


def propagate(model: MasterEquation, rho0, t: float, h_eff: EffectiveHamiltonian | None = None) -> np.ndarray:
    """Density matrix at time ``t`` via the lifted exponential.

    Non-Hermitian ``rho0`` is accepted (the map is linear on all operators)
    but triggers :class:`HermiticityWarning`.
    """
    rho0 = require_square(rho0, "rho0")
    if rho0.shape != model.drift.shape:
        raise DimensionMismatch(f"rho0 has shape {rho0.shape}, model dimension is {model.dim}")
    if np.max(np.abs(rho0 - rho0.conj().T)) > DEFAULT_TOLERANCES.hermiticity:
        warnings.warn("rho0 is not Hermitian; propagating anyway", HermiticityWarning, stacklevel=2)
    return apply_propagator(propagator_matrix(model, t, h_eff), rho0)
