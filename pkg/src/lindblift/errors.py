"""Exception and warning types raised by lindblift."""


class LindbliftError(Exception):
    """Base class for all library errors."""


class ContractViolation(LindbliftError, ValueError):
    """An input broke a documented precondition (shape, length, sign)."""


class DimensionMismatch(ContractViolation):
    """Operands have incompatible dimensions."""


class NumericalRangeError(LindbliftError, ArithmeticError):
    """A computation left the representable floating-point range."""


class StepSizeError(LindbliftError, ValueError):
    """A fixed-step integrator was asked to take steps that are too large."""


class SizeGuardError(ContractViolation):
    """A dense lifted operator would exceed the supported size."""


class EigenoperatorWarning(UserWarning):
    """A jump operator is not an eigenoperator of the free Hamiltonian."""


class HermiticityWarning(UserWarning):
    """An initial state is not Hermitian within tolerance."""


class TruncationWarning(UserWarning):
    """A Fock-space state carries weight close to the truncation edge."""
