"""
Flat ``key = value`` run configuration.

Every field of :class:`RunConfig` is a scalar, so a config serializes to one
line per field and parses back to an equal object.  Blank values mean None.
"""
from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import get_type_hints

from .errors import ConfigurationError

EXPERIMENTS = ("ate", "pite", "postselect", "scaling", "spectrum")
MODELS = ("ring", "mn")


@dataclass(frozen=True)
class RunConfig:
    experiment: str = "pite"
    model: str = "ring"
    # ring
    n: int = 6
    J: float = 2.0
    # Mn trimer (couplings in cm^-1, converted with energy_unit)
    J01: float = -1.0
    J12: float = -50.0
    J20: float = -50.0
    energy_unit: str = "eV"
    # penalty
    s_star: str = "0"
    s_z_star: str | None = None
    penalty: str = "linear"
    C_S: float = 7.5
    C_z: float | None = None
    # evolution
    evolver: str = "exact"
    initial: str = "auto"
    T: float = 1.0
    steps: int = 20000
    schedule: str = "sine_squared"
    amplitude: float = 1e-4
    m0: float = 0.8
    dt: float = 0.015
    pite_steps: int = 2000
    oracle: bool = False
    seed: int | None = None
    sample_every: int = 50
    extra_fidelity: bool = False
    # post-selection
    input_state: str = ""
    ancillas: int | None = None
    # scaling
    n_list: str = "4..14"
    kinds: str = "linear,quartic"
    # outputs
    output: str = ""
    dump_hamiltonian: str = ""
    dump_state: str = ""
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigurationError(f"unknown experiment {self.experiment!r}")
        if self.model not in MODELS:
            raise ConfigurationError(f"unknown model {self.model!r}")
        if self.workers < 1 or self.sample_every < 1:
            raise ConfigurationError("workers and sample_every must be >= 1")

    @property
    def s_star_value(self) -> Fraction:
        return Fraction(self.s_star)

    @property
    def s_z_star_value(self) -> Fraction:
        return self.s_star_value if self.s_z_star is None else Fraction(self.s_z_star)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        return "".join(f"{f.name} = {_dump(getattr(self, f.name))}\n" for f in fields(self))

    @classmethod
    def from_text(cls, text: str, base: "RunConfig | None" = None) -> "RunConfig":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigurationError(f"line {lineno}: expected key = value, got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key] = value
        return (base or cls()).with_strings(values)

    def with_strings(self, values: dict[str, str]) -> "RunConfig":
        """Apply string-valued overrides, converting with the field types."""
        hints = _hints()
        changes = {}
        for key, value in values.items():
            if key not in hints:
                raise ConfigurationError(f"unknown config key {key!r}")
            changes[key] = _parse(key, value, hints[key])
        return dataclasses.replace(self, **changes)

    def digest(self) -> str:
        """Hash of the physics-relevant fields (output locations and worker count excluded)."""
        keep = self.replace(**{k: v for k, v in _LOCATION_DEFAULTS.items()})
        return hashlib.sha256(keep.to_text().encode()).hexdigest()[:16]


_LOCATION_DEFAULTS = {"output": "", "dump_hamiltonian": "", "dump_state": "", "workers": 1}


def _hints() -> dict[str, type]:
    hints = get_type_hints(RunConfig)
    return {f.name: hints[f.name] for f in fields(RunConfig)}


def _dump(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(key: str, text: str, typ):
    optional = type(None) in getattr(typ, "__args__", ())
    base = next((a for a in getattr(typ, "__args__", (typ,)) if a is not type(None)), typ)
    if text == "":
        if optional:
            return None
        if base is str:
            return ""
        raise ConfigurationError(f"{key} needs a value")
    try:
        if base is bool:
            low = text.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return low in ("true", "1", "yes")
        if base is int:
            return int(text)
        if base is float:
            return float(text)
        if key in ("s_star", "s_z_star"):
            return str(Fraction(text))
        return text
    except ValueError as exc:
        raise ConfigurationError(f"bad value for {key}: {text!r}") from exc


def parse_n_list(text: str) -> list[int]:
    """``"4..14"`` (step 2), ``"4..14:1"`` or ``"4,6,8"``."""
    text = text.strip()
    try:
        if ".." in text:
            span, _, step = text.partition(":")
            lo, hi = (int(x) for x in span.split(".."))
            return list(range(lo, hi + 1, int(step) if step else 2))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse n list {text!r}") from exc
