"""Master equations in the general drift-plus-jumps form.

The general form is

    i d(rho)/dt = H rho - rho H^dagger + i sum_a gamma_a L_a rho L_a^dagger

with a generally non-Hermitian drift ``H``.  :func:`from_standard_form` converts
a Lindblad equation written with a Hermitian free Hamiltonian and
lowering/raising eigenoperators into this form, and :func:`rk4_evolve`
integrates it directly on density matrices as an independent check of the
lifted propagation.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import (
    ContractViolation,
    DimensionMismatch,
    EigenoperatorWarning,
    StepSizeError,
)
from .operator_algebra import dagger, require_square

__all__ = [
    "JumpChannel",
    "MasterEquation",
    "StandardForm",
    "from_standard_form",
    "standard_form_rhs",
    "rhs",
    "generator_norm_bound",
    "rk4_evolve",
]

MAX_RK4_STEP_NORM = 0.1


@dataclass(frozen=True, eq=False)
class JumpChannel:
    operator: np.ndarray
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "operator", require_square(self.operator, "jump operator"))
        rate = float(self.rate)
        if not math.isfinite(rate) or rate < 0:
            raise ContractViolation(f"jump rate must be a finite nonnegative number, got {self.rate}")
        object.__setattr__(self, "rate", rate)


@dataclass(frozen=True, eq=False)
class MasterEquation:
    """Drift ``H`` plus jump channels.

    ``trace_preserving_by_construction`` is only ever set by the constructors
    :meth:`lindblad` and :func:`from_standard_form`; it is never inferred from
    the numbers.
    """

    drift: np.ndarray
    channels: tuple = ()
    trace_preserving_by_construction: bool = False
    dim: int = field(init=False)

    def __post_init__(self):
        drift = require_square(self.drift, "drift")
        object.__setattr__(self, "drift", drift)
        chans = tuple(
            ch if isinstance(ch, JumpChannel) else JumpChannel(*ch) for ch in self.channels
        )
        n = drift.shape[0]
        for k, ch in enumerate(chans):
            if ch.operator.shape != (n, n):
                raise DimensionMismatch(
                    f"channel {k} operator has shape {ch.operator.shape}, model dimension is {n}"
                )
        object.__setattr__(self, "channels", chans)
        object.__setattr__(self, "dim", n)

    @classmethod
    def lindblad(cls, hamiltonian, channels: Sequence = ()) -> "MasterEquation":
        """GKSL model with Hermitian ``hamiltonian`` and ``(L, gamma)`` channels.

        The drift becomes ``H - (i/2) sum gamma L^dagger L`` which makes the
        evolution trace preserving.
        """
        h = require_square(hamiltonian, "hamiltonian")
        chans = tuple(ch if isinstance(ch, JumpChannel) else JumpChannel(*ch) for ch in channels)
        drift = h.copy()
        for ch in chans:
            if ch.operator.shape != h.shape:
                raise DimensionMismatch("jump operator and Hamiltonian dimensions differ")
            drift = drift - 0.5j * ch.rate * (dagger(ch.operator) @ ch.operator)
        chans = tuple(ch for ch in chans if ch.rate > 0)
        return cls(drift, chans, trace_preserving_by_construction=True)

    def anti_hermitian_residual(self) -> float:
        """Frobenius norm of ``(H - H^dagger) + i sum gamma L^dagger L``."""
        back_action = sum(
            (ch.rate * dagger(ch.operator) @ ch.operator for ch in self.channels),
            np.zeros_like(self.drift),
        )
        return float(np.linalg.norm(self.drift - dagger(self.drift) + 1j * back_action))


@dataclass(frozen=True, eq=False)
class StandardForm:
    """Free Hamiltonian with lowering ``(X^-, K)`` and raising ``(X^+, G)`` channels.

    The partner of each channel operator is its adjoint.
    """

    h0: np.ndarray
    lowering_channels: tuple = ()
    raising_channels: tuple = ()

    def __post_init__(self):
        h0 = require_square(self.h0, "h0")
        if np.max(np.abs(h0 - dagger(h0))) > DEFAULT_TOLERANCES.kernel:
            raise ContractViolation("free Hamiltonian h0 must be Hermitian")
        object.__setattr__(self, "h0", h0)
        for attr in ("lowering_channels", "raising_channels"):
            chans = tuple(JumpChannel(op, rate) for op, rate in getattr(self, attr))
            for k, ch in enumerate(chans):
                if ch.operator.shape != h0.shape:
                    raise DimensionMismatch(
                        f"{attr}[{k}] has shape {ch.operator.shape}, h0 has {h0.shape}"
                    )
            object.__setattr__(self, attr, chans)

    @property
    def dim(self) -> int:
        return self.h0.shape[0]


def _eigenoperator_residual(h0: np.ndarray, x: np.ndarray) -> tuple[float, float]:
    """Best-fit frequency ``w`` with ``[h0, x] ~ w x`` and the relative residual."""
    comm = h0 @ x - x @ h0
    norm_x = np.linalg.norm(x)
    if norm_x == 0:
        return 0.0, 0.0
    w = np.vdot(x, comm).real / norm_x**2
    return float(w), float(np.linalg.norm(comm - w * x) / norm_x)


def from_standard_form(sf: StandardForm) -> MasterEquation:
    """Convert to drift form: ``H = H0 - (i/2) sum(K X+X- + G X-X+)``.

    Zero-rate channels are dropped.  Emits :class:`EigenoperatorWarning` when
    a channel operator fails ``[H0, X] = w X`` for every real ``w``; the
    conversion itself does not depend on that relation.
    """
    tol = DEFAULT_TOLERANCES.eigenoperator
    drift = sf.h0.copy()
    channels = []
    for kind, group in (("lowering", sf.lowering_channels), ("raising", sf.raising_channels)):
        for k, ch in enumerate(group):
            w, resid = _eigenoperator_residual(sf.h0, ch.operator)
            if resid > tol:
                warnings.warn(
                    f"{kind} channel {k} is not an eigenoperator of h0 "
                    f"(fitted frequency {w:.3g}, residual {resid:.2e})",
                    EigenoperatorWarning,
                    stacklevel=2,
                )
            if ch.rate == 0:
                continue
            drift = drift - 0.5j * ch.rate * (dagger(ch.operator) @ ch.operator)
            channels.append(ch)
    return MasterEquation(drift, tuple(channels), trace_preserving_by_construction=True)


def standard_form_rhs(sf: StandardForm, rho) -> np.ndarray:
    """Right-hand side written with commutator and symmetric dissipators."""
    rho = require_square(rho, "rho")
    out = -1j * (sf.h0 @ rho - rho @ sf.h0)
    for ch in sf.lowering_channels + sf.raising_channels:
        x, xd = ch.operator, dagger(ch.operator)
        out = out + 0.5 * ch.rate * (2 * x @ rho @ xd - xd @ x @ rho - rho @ xd @ x)
    return out


def rhs(model: MasterEquation, rho) -> np.ndarray:
    """``d(rho)/dt = -i(H rho - rho H^dagger) + sum gamma L rho L^dagger``."""
    rho = require_square(rho, "rho")
    if rho.shape != model.drift.shape:
        raise DimensionMismatch(f"rho has shape {rho.shape}, model dimension is {model.dim}")
    h = model.drift
    out = -1j * (h @ rho - rho @ dagger(h))
    for ch in model.channels:
        out = out + ch.rate * (ch.operator @ rho @ dagger(ch.operator))
    return out


def _rhs_kernel(model: MasterEquation):
    """Unchecked right-hand side with adjoints hoisted, for inner loops."""
    minus_ih = -1j * model.drift
    minus_ih_dag = minus_ih.conj().T  # == i H^dagger
    jumps = [(ch.rate * ch.operator, dagger(ch.operator)) for ch in model.channels]

    def f(rho):
        out = minus_ih @ rho + rho @ minus_ih_dag
        for lg, ld in jumps:
            out += lg @ rho @ ld
        return out

    return f


def generator_norm_bound(model: MasterEquation) -> float:
    """Upper bound on the generator norm induced by the Frobenius norm."""
    bound = 2 * np.linalg.norm(model.drift, 2)
    for ch in model.channels:
        bound += ch.rate * np.linalg.norm(ch.operator, 2) ** 2
    return float(bound)


def rk4_evolve(model: MasterEquation, rho0, t: float, steps: int) -> np.ndarray:
    """Classical fixed-step RK4 on the density matrix.

    Raises :class:`StepSizeError` when ``(t / steps) * generator_norm_bound``
    exceeds 0.1.
    """
    rho = require_square(rho0, "rho0").copy()
    if rho.shape != model.drift.shape:
        raise DimensionMismatch(f"rho0 has shape {rho.shape}, model dimension is {model.dim}")
    steps = int(steps)
    if steps < 1:
        raise ContractViolation(f"steps must be positive, got {steps}")
    t = float(t)
    if not math.isfinite(t):
        raise ContractViolation("evolution time must be finite")
    if t == 0:
        return rho
    dt = t / steps
    if abs(dt) * generator_norm_bound(model) > MAX_RK4_STEP_NORM:
        raise StepSizeError(
            f"{steps} steps over t={t} give step*norm={abs(dt) * generator_norm_bound(model):.3g} "
            f"> {MAX_RK4_STEP_NORM}"
        )
    f = _rhs_kernel(model)
    for _ in range(steps):
        k1 = f(rho)
        k2 = f(rho + 0.5 * dt * k1)
        k3 = f(rho + 0.5 * dt * k2)
        k4 = f(rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def min_rk4_steps(model: MasterEquation, t: float) -> int:
    """Smallest step count that satisfies the :func:`rk4_evolve` guard."""
    return max(1, math.ceil(abs(t) * generator_norm_bound(model) / MAX_RK4_STEP_NORM))
