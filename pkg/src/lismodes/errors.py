"""Exception types raised by the solver.

Argument problems subclass ``ValueError`` so callers can catch them the
usual way; numerical failures subclass ``RuntimeError``.
"""


class InvalidArgument(ValueError):
    pass


class InvalidInput(ValueError):
    """Non-finite or otherwise unusable numeric data."""


class InvalidUse(ValueError):
    """An operation was applied to an object that does not support it."""


class GeometryError(ValueError):
    pass


class SingularKernelError(ValueError):
    """Zero source-observer distance in the Green function."""


class ResourceLimitError(MemoryError):
    def __init__(self, required_bytes: int, cap_bytes: int):
        self.required_bytes = int(required_bytes)
        self.cap_bytes = int(cap_bytes)
        super().__init__(
            f"dense coupling matrix needs {self.required_bytes} bytes, "
            f"cap is {self.cap_bytes} bytes"
        )


class ConvergenceError(RuntimeError):
    """Adaptive procedure stopped before reaching its tolerance.

    ``estimate`` and ``error_estimate`` carry the best result obtained.
    """

    def __init__(self, message: str, estimate: float, error_estimate: float):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate
