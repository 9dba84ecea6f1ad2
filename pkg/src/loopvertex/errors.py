"""Exception hierarchy shared by all modules.

Exit-code mapping used by the CLI: ContractError/DomainError -> 2,
NumericalError -> 3, verification failures -> 4.
"""


class LoopVertexError(Exception):
    """Base class for all errors raised by this package."""


class ContractError(LoopVertexError):
    """A caller violated a documented precondition (bad order, size, shape...)."""


class SizeError(ContractError):
    """Requested problem size exceeds the supported desk-scale cap."""


class DomainError(LoopVertexError):
    """Input lies outside the mathematical domain (on the cut, outside the
    pacman domain, forbidden sector)."""


class NumericalError(LoopVertexError):
    """A numerical procedure failed to reach its accuracy contract.

    ``best_estimate`` and ``error_estimate`` carry the last usable values
    when the failing routine has them.
    """

    def __init__(self, message, best_estimate=None, error_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class SlowConvergenceWarning(UserWarning):
    """A truncated series was evaluated close to its convergence radius."""
