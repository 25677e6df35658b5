"""Exception types shared across the library and mapped to CLI exit codes."""


class DomainError(ValueError):
    """A parameter is outside its admissible range."""


class GridError(ValueError):
    """A grid does not satisfy the interface required by an operation."""


class UnsupportedRegimeError(ValueError):
    """Parameters fall in a regime the implementation refuses to compute."""


class SingularPointError(ValueError):
    """A kernel was evaluated exactly on its singular set."""


class FactorizationError(RuntimeError):
    """Cholesky failed even at the maximum jitter level."""

    def __init__(self, message, pivot_index=None):
        super().__init__(message)
        self.pivot_index = pivot_index


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound
