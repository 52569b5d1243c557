# utils/exceptions.py


class SasakiError(Exception):
    """Base class for every error raised by the engine."""


class UsageError(SasakiError):
    """Invalid input: unknown space id, bad size, shape mismatch, bad parameters."""


class ConstructionError(SasakiError):
    """A builder produced data that fails one of its defining identities.

    Args:
        message: Human readable description
        identity: Name of the failed identity (e.g. "jacobi", "phi_square")
        where: Offending index or pair, when one is known
        residual: Size of the violation
    """

    def __init__(self, message: str, identity: str = None, where=None, residual: float = None):
        super().__init__(message)
        self.identity = identity
        self.where = where
        self.residual = residual


class BudgetExceededError(SasakiError):
    """A linear system is larger than the configured unknown-count budget."""

    def __init__(self, message: str, unknowns: int, budget: int):
        super().__init__(message)
        self.unknowns = unknowns
        self.budget = budget


class ConsistencyError(SasakiError):
    """Two independent computations of the same quantity disagree."""

    def __init__(self, message: str, residual: float = None):
        super().__init__(message)
        self.residual = residual
