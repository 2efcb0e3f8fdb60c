"""Statevector toolkit for spin-adapted ground-state preparation."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigurationError,
    ContractError,
    DimensionError,
    EmptySectorError,
    FailureDominatedError,
    ResourceError,
    SpinforgeError,
    WeightAliasingError,
)
from .pauli import PauliString, PauliSum  # noqa: E402
from .simulator import StateVector  # noqa: E402
from .spin_models import SpinRegister  # noqa: E402
