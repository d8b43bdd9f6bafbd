"""
errors.py - Exception hierarchy for jcspectra

Actions map these onto exit codes: ConfigError -> 2, everything else -> 1.
"""


class JcSpectraError(Exception):
    """Base class for every error raised on purpose by jcspectra."""


class ConfigError(JcSpectraError):
    """Malformed or invalid experiment configuration."""


class TruncationError(JcSpectraError, ValueError):
    """A finite block does not contain the support needed for exactness."""


class ConvergenceError(JcSpectraError):
    """An adaptive procedure reached its cap without stabilising."""


class CertificateError(JcSpectraError):
    """A numerical certificate (orthogonality, Sturm bracket) failed."""


class ContractionError(JcSpectraError, ValueError):
    """The phase perturbation is too large for the circle map to be inverted."""


class WindowDegenerateError(JcSpectraError):
    """The counting window lies partly below the first lattice index."""


class InsufficientDataError(JcSpectraError, ValueError):
    """Fewer than three usable points were left for a rate fit."""


class ExperimentError(JcSpectraError):
    """A grid point failed; carries the experiment kind, n and operation."""

    def __init__(self, kind: str, n: int, operation: str, cause: Exception) -> None:
        self.kind = kind
        self.n = n
        self.operation = operation
        self.cause = cause
        super().__init__(f"{kind} experiment failed at n={n} in {operation}: {cause}")

    def __reduce__(self) -> tuple[type["ExperimentError"], tuple[str, int, str, Exception]]:
        return (type(self), (self.kind, self.n, self.operation, self.cause))
