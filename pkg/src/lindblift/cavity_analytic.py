"""Closed-form dynamics of a single damped cavity mode on a truncated Fock space.

Master equation: ``d(rho)/dt = -i[w a^dag a, rho] + (k/2)(2 a rho a^dag - a^dag a rho - rho a^dag a)``.

The lifted generator ``(w - ik/2) a^dag a - (w + ik/2) b^dag b + i k a b``
factorizes, giving

    rho_pq(t) = e^{-i w (p-q) t} e^{-k (p+q) t / 2}
                * sum_m (g^m / m!) sqrt((p+m)! (q+m)! / (p! q!)) rho_{p+m, q+m}

with ``g = 1 - e^{-k t}``.  Since the dynamics only ever lower the excitation
number, all of the routines here are exact for the truncated model; the
truncation only matters when the state being represented was itself cut off.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .config import DEFAULT_TOLERANCES
from .errors import ContractViolation, DimensionMismatch, TruncationWarning
from .lindblad_model import MasterEquation, StandardForm, from_standard_form
from .operator_algebra import matrix_exponential, require_square, tensor_product
from .operators import destroy, number

__all__ = [
    "CavityParams",
    "KrausFamily",
    "g_factor",
    "cavity_standard_form",
    "cavity_model",
    "edge_weight",
    "factorized_propagator",
    "fock_solution",
    "thermal_beta",
    "kraus_family",
    "dilation_angle",
    "dilation_unitary",
    "extract_kraus",
    "dilation_evolve",
    "partial_trace_env",
]


@dataclass(frozen=True)
class CavityParams:
    omega_f: float
    kappa: float
    n_max: int = 24

    def __post_init__(self):
        if not (math.isfinite(self.omega_f) and math.isfinite(self.kappa)):
            raise ContractViolation("omega_f and kappa must be finite")
        if self.kappa < 0:
            raise ContractViolation(f"kappa must be >= 0, got {self.kappa}")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ContractViolation(f"n_max must be a positive integer, got {self.n_max}")
        object.__setattr__(self, "n_max", int(self.n_max))

    @property
    def levels(self) -> int:
        return self.n_max + 1


def g_factor(kappa: float, t: float) -> float:
    """``1 - exp(-kappa t)``."""
    if t < 0:
        raise ContractViolation(f"time must be nonnegative, got {t}")
    return -math.expm1(-kappa * t)


def cavity_standard_form(p: CavityParams) -> StandardForm:
    return StandardForm(p.omega_f * number(p.n_max), lowering_channels=((destroy(p.n_max), p.kappa),))


def cavity_model(p: CavityParams) -> MasterEquation:
    return from_standard_form(cavity_standard_form(p))


def edge_weight(rho, buffer: int | None = None) -> float:
    """Population held in the top ``buffer`` Fock levels."""
    buffer = DEFAULT_TOLERANCES.truncation_buffer if buffer is None else buffer
    diag = np.real(np.diagonal(rho))
    start = max(0, diag.size - buffer)
    return float(np.sum(diag[start:]))


def _check_state(rho0, p: CavityParams) -> np.ndarray:
    rho0 = require_square(rho0, "rho0")
    if rho0.shape[0] != p.levels:
        raise DimensionMismatch(f"rho0 has {rho0.shape[0]} levels, cavity has {p.levels}")
    weight = edge_weight(rho0)
    if weight > DEFAULT_TOLERANCES.truncation_weight:
        warnings.warn(
            f"initial state has weight {weight:.2e} within {DEFAULT_TOLERANCES.truncation_buffer} "
            f"levels of the cutoff n_max={p.n_max}",
            TruncationWarning,
            stacklevel=3,
        )
    return rho0


def factorized_propagator(p: CavityParams, t: float) -> np.ndarray:
    """Lifted propagator as the ordered product of its three commuting-algebra factors.

    ``exp(-i(w - ik/2) a^dag a t) exp(i(w + ik/2) b^dag b t) exp(g a b)``
    """
    n = np.arange(p.levels)
    sys_phase = np.exp(-1j * (p.omega_f - 0.5j * p.kappa) * n * t)
    anc_phase = np.exp(1j * (p.omega_f + 0.5j * p.kappa) * n * t)
    free = np.diag(np.kron(sys_phase, anc_phase))
    a = destroy(p.n_max)
    pair = matrix_exponential(g_factor(p.kappa, t) * tensor_product(a, a))
    return free @ pair


def fock_solution(rho0, p: CavityParams, t: float) -> np.ndarray:
    """Evolve ``rho0`` to time ``t`` with the closed-form Fock-basis solution."""
    rho0 = _check_state(rho0, p)
    g = g_factor(p.kappa, t)
    dim = p.levels
    n = np.arange(dim)
    lf = gammaln(n + 1)

    phase = np.exp(-1j * p.omega_f * t * (n[:, None] - n[None, :]))
    out = np.zeros_like(rho0)
    m_top = dim - 1 if g > 0 else 0
    for m in range(m_top + 1):
        k = dim - m
        pp = n[:k]
        half = 0.5 * (lf[pp + m] - lf[pp])
        log_c = (
            (m * math.log(g) if m else 0.0)
            - gammaln(m + 1)
            - 0.5 * p.kappa * t * (pp[:, None] + pp[None, :])
            + half[:, None]
            + half[None, :]
        )
        out[:k, :k] += np.exp(log_c) * rho0[m:, m:]
    return phase * out


def thermal_beta(beta: float, kappa: float, t: float) -> float:
    """Inverse temperature of an initially thermal mode after damping for ``t``.

    ``beta + kappa t + log(1 - e^{-beta} (1 - e^{-kappa t}))``
    """
    if not beta > 0:
        raise ContractViolation(f"beta must be positive, got {beta}")
    if t < 0 or kappa < 0:
        raise ContractViolation("kappa and t must be nonnegative")
    arg = 1.0 - math.exp(-beta) * g_factor(kappa, t)
    assert arg > 0, "log argument must be positive for beta > 0"
    return beta + kappa * t + math.log(arg)


@dataclass(frozen=True, eq=False)
class KrausFamily:
    operators: tuple
    time: float
    params: CavityParams
    m_max: int

    @property
    def reliable_max_level(self) -> int:
        """Highest Fock level on which the family is complete.

        Level ``n`` needs every term up to ``m = n``; with no loss all levels are.
        """
        if len(self.operators) == 1:
            return self.params.n_max
        return min(self.m_max, self.params.n_max)

    def apply(self, rho) -> np.ndarray:
        rho = require_square(rho, "rho")
        return sum(a @ rho @ a.conj().T for a in self.operators)

    def completeness(self) -> np.ndarray:
        return sum(a.conj().T @ a for a in self.operators)

    def completeness_defect(self, max_level: int | None = None) -> float:
        """Max-abs deviation of ``sum A^dag A`` from the identity on levels ``<= max_level``."""
        top = self.reliable_max_level if max_level is None else max_level
        block = self.completeness()[: top + 1, : top + 1]
        return float(np.max(np.abs(block - np.eye(top + 1))))


def kraus_family(p: CavityParams, t: float, m_max: int) -> KrausFamily:
    """``A_m = sqrt(g^m / m!) exp(-(i w + k/2) a^dag a t) a^m`` for ``m = 0..m_max``.

    Terms that vanish identically (``m >= 1`` when ``g == 0``) are omitted.
    """
    if m_max > p.n_max or m_max < 0:
        raise ContractViolation(f"m_max must lie in 0..n_max={p.n_max}, got {m_max}")
    g = g_factor(p.kappa, t)
    dim = p.levels
    n = np.arange(dim)
    lf = gammaln(n + 1)
    ops = []
    for m in range(m_max + 1 if g > 0 else 1):
        src = n[m:]
        dst = src - m
        log_amp = 0.5 * ((m * math.log(g) if m else 0.0) - lf[m] + lf[src] - lf[dst])
        amp = np.exp(log_amp) * np.exp(-(1j * p.omega_f + 0.5 * p.kappa) * dst * t)
        op = np.zeros((dim, dim), dtype=np.complex128)
        op[dst, src] = amp
        ops.append(op)
    return KrausFamily(tuple(ops), float(t), p, m_max)


def dilation_angle(kappa: float, t: float) -> float:
    """Mixing angle with ``cos(theta) = exp(-kappa t / 2)``.

    The negative branch is used so that ``<m_b|U|0_b>`` reproduces the Kraus
    operators with no ``(-1)^m`` sign.
    """
    return -math.acos(math.exp(-0.5 * kappa * t))


def dilation_unitary(p: CavityParams, t: float) -> np.ndarray:
    """``exp(-i w t a^dag a) exp(theta (a^dag b - b^dag a))`` on cavity (x) environment mode."""
    if t < 0:
        raise ContractViolation(f"time must be nonnegative, got {t}")
    dim = p.levels
    a = destroy(p.n_max)
    ident = np.eye(dim, dtype=np.complex128)
    a_sys, b_env = tensor_product(a, ident), tensor_product(ident, a)
    generator = a_sys.conj().T @ b_env - b_env.conj().T @ a_sys
    mixer = matrix_exponential(dilation_angle(p.kappa, t) * generator)
    free = np.kron(np.exp(-1j * p.omega_f * t * np.arange(dim)), np.ones(dim))
    return free[:, None] * mixer


def extract_kraus(u: np.ndarray, m: int, dims: tuple[int, int]) -> np.ndarray:
    """System operator ``<m_E| U |0_E>``."""
    ns, ne = dims
    return u.reshape(ns, ne, ns, ne)[:, m, :, 0].copy()


def partial_trace_env(rho_joint, dims: tuple[int, int]) -> np.ndarray:
    """Trace out the second (environment) factor of a system-major joint operator."""
    rho_joint = require_square(rho_joint, "rho_joint")
    ns, ne = (int(d) for d in dims)
    if ns < 1 or ne < 1 or ns * ne != rho_joint.shape[0]:
        raise DimensionMismatch(f"dims {dims} do not factor a matrix of size {rho_joint.shape[0]}")
    return np.einsum("ikjk->ij", rho_joint.reshape(ns, ne, ns, ne))


def dilation_evolve(rho0, p: CavityParams, t: float, u: np.ndarray | None = None) -> np.ndarray:
    """``Tr_E[U (rho0 (x) |0><0|_E) U^dag]``."""
    rho0 = _check_state(rho0, p)
    if u is None:
        u = dilation_unitary(p, t)
    vac = np.zeros((p.levels, p.levels), dtype=np.complex128)
    vac[0, 0] = 1.0
    joint = u @ np.kron(rho0, vac) @ u.conj().T
    return partial_trace_env(joint, (p.levels, p.levels))
