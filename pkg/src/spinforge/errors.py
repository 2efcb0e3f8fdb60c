"""Exception hierarchy. CLI exit codes hang off the ``exit_code`` attribute."""


class SpinforgeError(Exception):
    exit_code = 1


class DimensionError(SpinforgeError, ValueError):
    """Operands act on different numbers of qubits."""


class ResourceError(SpinforgeError):
    """A dense oracle was requested beyond the configured qubit limit."""

    exit_code = 3


class ConfigurationError(SpinforgeError, ValueError):
    exit_code = 2


class ContractError(SpinforgeError):
    """A numerical contract (Hermiticity, normalization, ...) was violated."""

    exit_code = 3


class FailureDominatedError(ContractError):
    """Post-selection success probability collapsed to ~0."""


class EmptySectorError(SpinforgeError):
    """Projection onto a sector with (numerically) zero weight."""

    exit_code = 4

    def __init__(self, message, leakage=0.0):
        super().__init__(message)
        self.leakage = leakage


class WeightAliasingError(SpinforgeError):
    """Hamming-weight register too small to single out the requested weight."""

    exit_code = 4
