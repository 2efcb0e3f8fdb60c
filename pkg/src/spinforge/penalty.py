"""
Penalty Hamiltonians that pin the total-spin sector.

quartic:  C_S (S^2 - s*(s*+1))^2 + C_z (S_z - s_z*)^2
linear:   C_S (S^2 - s*(s*+1))   - C_z (S_z - s*)

The linear form only works for the maximal-S_z member of the target
multiplet and only when 2 s* < C_z / C_S < 2 (s* + 1).
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import ConfigurationError
from .pauli import PauliSum, total
from .spin_models import DIRECT, SpinRegister, as_half_integer, total_spin_operators

log = logging.getLogger(__name__)

LINEAR, QUARTIC = "linear", "quartic"


@dataclass(frozen=True)
class PenaltyConfig:
    s_star: Fraction
    s_z_star: Fraction | None = None
    C_S: float = 1.0
    C_z: float | None = None
    kind: str = LINEAR

    def __post_init__(self):
        s = as_half_integer(self.s_star)
        sz = s if self.s_z_star is None else as_half_integer(self.s_z_star)
        object.__setattr__(self, "s_star", s)
        object.__setattr__(self, "s_z_star", sz)
        if self.C_z is None:
            object.__setattr__(self, "C_z", default_c_z(self.C_S, s))
        if self.kind not in (LINEAR, QUARTIC):
            raise ConfigurationError(f"unknown penalty kind {self.kind!r}")
        if s < 0 or abs(sz) > s or (s - sz).denominator != 1:
            raise ConfigurationError(f"invalid target sector s*={s}, s_z*={sz}")
        if self.C_S < 0 or self.C_z < 0:
            raise ConfigurationError("penalty strengths must be non-negative")

    @property
    def ratio(self) -> float:
        return self.C_z / self.C_S if self.C_S else float("inf")

    def with_kind(self, kind: str) -> "PenaltyConfig":
        return replace(self, kind=kind)

    def check_register(self, reg: SpinRegister) -> None:
        if self.s_star > reg.max_spin or (reg.max_spin - self.s_star).denominator != 1:
            raise ConfigurationError(f"s*={self.s_star} unreachable with total spin {reg.max_spin}")


def default_c_z(C_S: float, s_star) -> float:
    """Midpoint of the admissible window: C_z = C_S (2 s* + 1)."""
    return C_S * (2 * float(s_star) + 1)


def validate_ratio(cfg: PenaltyConfig) -> tuple[bool, str]:
    s = float(cfg.s_star)
    if cfg.C_S <= 0:
        return False, "C_S must be positive"
    r = cfg.ratio
    if r <= 2 * s:
        return False, f"C_z/C_S = {r:g} <= 2 s* = {2 * s:g} (lower bound violated)"
    if r >= 2 * (s + 1):
        return False, f"C_z/C_S = {r:g} >= 2 (s*+1) = {2 * (s + 1):g} (upper bound violated)"
    return True, f"{2 * s:g} < C_z/C_S = {r:g} < {2 * (s + 1):g}"


def _casimir(s) -> float:
    s = float(s)
    return s * (s + 1)


def penalty_linear(reg: SpinRegister, cfg: PenaltyConfig, spin_ops=None, validate: bool = True) -> PauliSum:
    """``validate=False`` skips the ratio-window check (for studying its failure)."""
    if cfg.kind != LINEAR:
        raise ConfigurationError("penalty_linear needs kind='linear'")
    if cfg.s_z_star != cfg.s_star:
        raise ConfigurationError("linear penalty targets s_z* = s* only")
    ok, why = validate_ratio(cfg)
    if validate and not ok:
        raise ConfigurationError(f"penalty ratio outside window: {why}")
    cfg.check_register(reg)
    _, _, sz, s2 = spin_ops or total_spin_operators(reg)
    s = float(cfg.s_star)
    return cfg.C_S * (s2 - _casimir(s)) - cfg.C_z * (sz - s)


def penalty_quartic(reg: SpinRegister, cfg: PenaltyConfig, spin_ops=None) -> PauliSum:
    if cfg.kind != QUARTIC:
        raise ConfigurationError("penalty_quartic needs kind='quartic'")
    cfg.check_register(reg)
    _, _, sz, s2 = spin_ops or total_spin_operators(reg)
    shifted_s2 = s2 - _casimir(cfg.s_star)
    shifted_sz = sz - float(cfg.s_z_star)
    return cfg.C_S * (shifted_s2 * shifted_s2) + cfg.C_z * (shifted_sz * shifted_sz)


def penalty(reg: SpinRegister, cfg: PenaltyConfig, spin_ops=None) -> PauliSum:
    build = penalty_linear if cfg.kind == LINEAR else penalty_quartic
    return build(reg, cfg, spin_ops)


def penalty_eigenvalue(s, s_z, cfg: PenaltyConfig) -> float:
    """Closed-form penalty eigenvalue on a |s, s_z> state."""
    s, s_z = as_half_integer(s), as_half_integer(s_z)
    if abs(s_z) > s:
        raise ConfigurationError(f"|s_z| > s for s={s}, s_z={s_z}")
    ds = _casimir(s) - _casimir(cfg.s_star)
    if cfg.kind == LINEAR:
        return cfg.C_S * ds - cfg.C_z * float(s_z - cfg.s_star)
    return cfg.C_S * ds ** 2 + cfg.C_z * float(s_z - cfg.s_z_star) ** 2


def penalty_gap(cfg: PenaltyConfig) -> float:
    """Smallest linear-penalty cost of leaving the target sector."""
    s = float(cfg.s_star)
    r = cfg.ratio
    lower = 2 * s + 2 - r
    upper = r - 2 * s
    return cfg.C_S * min(lower, upper, r)


def check_penalty_strength(H_system: PauliSum, cfg: PenaltyConfig, max_qubits: int = 10) -> bool:
    """Warn when the penalty gap is below the spectral spread of H_system.

    Returns True when the penalty dominates (or the check is skipped).
    """
    if H_system.n_qubits > max_qubits:
        return True
    evals = np.linalg.eigvalsh(H_system.to_dense())
    spread = float(evals[-1] - evals[0])
    gap = penalty_gap(cfg) if cfg.kind == LINEAR else cfg.C_S
    if gap < spread:
        warnings.warn(
            f"penalty gap {gap:g} is smaller than the H_system spread {spread:g}; "
            "the ground state may leave the target sector",
            RuntimeWarning,
            stacklevel=2,
        )
        return False
    return True


def swap_operator(n: int, i: int, j: int) -> PauliSum:
    """Swap of spin-1/2 qubits i and j: (I + sigma_i . sigma_j) / 2."""
    terms = [PauliSum.identity(n)]
    for a in "XYZ":
        terms.append(PauliSum.single(n, i, a) * PauliSum.single(n, j, a))
    return total(terms, n) * 0.5


def swap_expansion(reg: SpinRegister) -> PauliSum:
    """S^2 = n (4 - n) / 4 + sum_{i>j} U_ij for spin-1/2 registers."""
    if not all(s.encoding == DIRECT for s in reg.sites):
        raise ConfigurationError("swap expansion needs spin-1/2 sites only")
    n = reg.n_qubits
    swaps = (swap_operator(n, i, j) for j, i in combinations(range(n), 2))
    return total(swaps, n) + n * (4 - n) / 4


def sector_dimensions(spins) -> dict[Fraction, int]:
    """Multiplicity of each total-spin multiplet for the given site spins."""
    mult = {Fraction(0): 1}
    for s in spins:
        s = as_half_integer(s)
        new: dict[Fraction, int] = {}
        for S, m in mult.items():
            k = abs(S - s)
            while k <= S + s:
                new[k] = new.get(k, 0) + m
                k += 1
        mult = new
    return dict(sorted(mult.items()))


def closed_form_spectrum(spins, cfg: PenaltyConfig) -> np.ndarray:
    """All penalty eigenvalues (with multiplicity) over the physical space."""
    values = []
    for S, mult in sector_dimensions(spins).items():
        for k in range(int(2 * S) + 1):
            values.extend([penalty_eigenvalue(S, S - k, cfg)] * mult)
    return np.sort(np.array(values))
