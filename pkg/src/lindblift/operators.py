"""Concrete operators and named states for the two-level atom and the cavity mode.

Qubit matrices use the basis order ``(|e>, |g>)`` so that ``sigma_plus |g> = |e>``
and index 0 is the excited level.  Cavity matrices live on the truncated Fock
space ``|0>, ..., |n_max>``.
"""
from __future__ import annotations

import numpy as np
from scipy.special import gammaln

from .errors import ContractViolation

SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=np.complex128)
IDENTITY_2 = np.eye(2, dtype=np.complex128)

EXCITED = np.array([[1, 0], [0, 0]], dtype=np.complex128)
GROUND = np.array([[0, 0], [0, 1]], dtype=np.complex128)


def _check_cutoff(n_max: int) -> int:
    n_max = int(n_max)
    if n_max < 1:
        raise ContractViolation(f"n_max must be >= 1, got {n_max}")
    return n_max


def destroy(n_max: int) -> np.ndarray:
    """Truncated annihilation operator on ``n_max + 1`` Fock levels."""
    n_max = _check_cutoff(n_max)
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), k=1).astype(np.complex128)


def number(n_max: int) -> np.ndarray:
    n_max = _check_cutoff(n_max)
    return np.diag(np.arange(n_max + 1)).astype(np.complex128)


def fock_dm(n: int, n_max: int) -> np.ndarray:
    n_max = _check_cutoff(n_max)
    if not 0 <= n <= n_max:
        raise ContractViolation(f"Fock level {n} outside 0..{n_max}")
    rho = np.zeros((n_max + 1, n_max + 1), dtype=np.complex128)
    rho[n, n] = 1.0
    return rho


def coherent_ket(alpha: complex, n_max: int, normalize: bool = True) -> np.ndarray:
    """Coherent-state amplitudes ``e^{-|a|^2/2} a^n / sqrt(n!)``, truncated."""
    n_max = _check_cutoff(n_max)
    n = np.arange(n_max + 1)
    alpha = complex(alpha)
    if alpha == 0:
        ket = (n == 0).astype(np.complex128)
    else:
        log_mag = n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1) - 0.5 * abs(alpha) ** 2
        ket = np.exp(log_mag) * np.exp(1j * np.angle(alpha) * n)
    if normalize:
        ket = ket / np.linalg.norm(ket)
    return ket


def coherent_dm(alpha: complex, n_max: int) -> np.ndarray:
    ket = coherent_ket(alpha, n_max)
    return np.outer(ket, ket.conj())


def thermal_dm(beta: float, n_max: int) -> np.ndarray:
    """Normalized ``exp(-beta a^dagger a)`` on the truncated space."""
    n_max = _check_cutoff(n_max)
    if not beta > 0:
        raise ContractViolation(f"inverse temperature must be positive, got {beta}")
    weights = np.exp(-beta * np.arange(n_max + 1))
    return np.diag(weights / weights.sum()).astype(np.complex128)
