"""Open-system dynamics by propagating the vectorized density matrix with an
effective non-Hermitian Hamiltonian on system (x) ancilla.

Natural units throughout: hbar = k_B = 1.
"""
from .config import DEFAULT_TOLERANCES, Tolerances
from .effective_propagation import (
    EffectiveHamiltonian,
    build_effective_hamiltonian,
    propagate,
    propagator_matrix,
)
from .errors import (
    ContractViolation,
    DimensionMismatch,
    LindbliftError,
    NumericalRangeError,
    SizeGuardError,
    StepSizeError,
)
from .lindblad_model import (
    JumpChannel,
    MasterEquation,
    StandardForm,
    from_standard_form,
    rhs,
    rk4_evolve,
)
from .operator_algebra import (
    LiftedState,
    devectorize,
    entrywise_conjugate,
    matrix_exponential,
    tensor_product,
    vectorize,
)

__version__ = "0.1.0"
