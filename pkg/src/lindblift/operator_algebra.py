"""Dense complex linear algebra and the density-matrix lifting.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  The
lifting sends an ``N x N`` operator ``rho`` to a length ``N**2`` vector whose
component ``m*N + n`` holds ``rho[m, n]`` (system index major, ancilla index
minor).  With this ordering

    vectorize(A @ rho @ B) == tensor_product(A, B.T) @ vectorize(rho)

and every ancilla operator is the entrywise conjugate of its system partner.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, DimensionMismatch, NumericalRangeError

__all__ = [
    "LiftedState",
    "as_matrix",
    "require_square",
    "tensor_product",
    "entrywise_conjugate",
    "transpose",
    "dagger",
    "matrix_exponential",
    "vectorize",
    "devectorize",
    "swap_permutation",
]


def as_matrix(value, name: str = "matrix") -> np.ndarray:
    """Coerce ``value`` to a finite 2-D complex128 array."""
    m = np.asarray(value, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ContractViolation(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractViolation(f"{name} has non-finite entries")
    return m


def require_square(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    m = as_matrix(m, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    return m


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product, entry ``(i*rB + k, j*cB + l)`` equal to ``a[i, j] * b[k, l]``."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def entrywise_conjugate(m) -> np.ndarray:
    """Ancilla partner of a system operator: ``<m|M_A|n> = <n|M^dagger|m> = conj(M[m, n])``."""
    return np.conj(require_square(m))


def transpose(m) -> np.ndarray:
    return as_matrix(m).T.copy()


def dagger(m) -> np.ndarray:
    return as_matrix(m).conj().T


# Pade coefficients and theta thresholds from Higham (2005),
# "The scaling and squaring method for the matrix exponential revisited".
_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}
_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}


def _pade_low(a: np.ndarray, ident: np.ndarray, order: int):
    b = _PADE[order]
    a2 = a @ a
    powers = [ident, a2]
    for _ in range(order // 2 - 1):
        powers.append(powers[-1] @ a2)
    u_inner = sum(b[2 * k + 1] * powers[k] for k in range(len(powers)))
    v = sum(b[2 * k] * powers[k] for k in range(len(powers)))
    return a @ u_inner, v


def _pade13(a: np.ndarray, ident: np.ndarray):
    b = _PADE[13]
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    return u, v


def matrix_exponential(m) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a diagonal Pade approximant.

    Works for general (non-normal, possibly defective) square matrices; no
    eigendecomposition is used.

    Raises
    ------
    NumericalRangeError
        If the result cannot be represented in double precision.
    """
    a = require_square(m)
    n = a.shape[0]
    ident = np.eye(n, dtype=np.complex128)
    if not np.any(a):
        return ident

    norm1 = float(np.max(np.sum(np.abs(a), axis=0)))
    with np.errstate(over="ignore", invalid="ignore"):
        for order in (3, 5, 7, 9):
            if norm1 <= _THETA[order]:
                u, v = _pade_low(a, ident, order)
                result = np.linalg.solve(v - u, v + u)
                break
        else:
            s = max(0, math.ceil(math.log2(norm1 / _THETA[13])))
            u, v = _pade13(a / 2.0**s, ident)
            result = np.linalg.solve(v - u, v + u)
            for _ in range(s):
                result = result @ result
                if not np.all(np.isfinite(result)):
                    break

    if not np.all(np.isfinite(result)):
        raise NumericalRangeError(
            f"matrix exponential overflowed (1-norm of argument {norm1:.3g})"
        )
    return result


@dataclass(frozen=True, eq=False)
class LiftedState:
    """Vectorized operator: ``amplitudes[m*dim + n] == rho[m, n]``.

    The squared norm equals ``Tr(rho^dagger rho)``, so it is one only for a
    normalized pure state.
    """

    dim: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size != self.dim * self.dim:
            raise ContractViolation(
                f"LiftedState of dim {self.dim} needs {self.dim ** 2} amplitudes, got shape {amps.shape}"
            )
        object.__setattr__(self, "amplitudes", amps)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def __len__(self):
        return self.amplitudes.size


def vectorize(rho) -> LiftedState:
    rho = require_square(rho, "rho")
    return LiftedState(rho.shape[0], rho.reshape(-1).copy())


def devectorize(psi) -> np.ndarray:
    """Inverse of :func:`vectorize`; also accepts a bare 1-D array of length N**2."""
    if isinstance(psi, LiftedState):
        return psi.amplitudes.reshape(psi.dim, psi.dim).copy()
    amps = np.asarray(psi, dtype=np.complex128)
    if amps.ndim != 1:
        raise ContractViolation(f"expected a 1-D amplitude vector, got shape {amps.shape}")
    dim = math.isqrt(amps.size)
    if dim == 0 or dim * dim != amps.size:
        raise ContractViolation(f"amplitude count {amps.size} is not a perfect square")
    return amps.reshape(dim, dim).copy()


def swap_permutation(dim: int) -> np.ndarray:
    """Permutation matrix exchanging system and ancilla factors of ``C^dim (x) C^dim``."""
    idx = np.arange(dim * dim)
    swapped = (idx % dim) * dim + idx // dim
    perm = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    perm[swapped, idx] = 1.0
    return perm
