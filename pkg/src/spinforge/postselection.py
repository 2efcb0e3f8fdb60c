"""
Stage two: rotate a |s*, s*> state about y and keep the wanted S_z component.

Spin-1/2 registers are projected with the ancilla Hamming-weight circuit;
binary-encoded registers use a direct S_z projector that reports leakage into
unphysical codes.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from .errors import ConfigurationError, EmptySectorError, WeightAliasingError
from .simulator import StateVector
from .spin_models import DIRECT, SpinRegister, _local_spin_matrices, as_half_integer

log = logging.getLogger(__name__)

EMPTY_TOL = 1e-12


def _check_qn(s, s_z) -> tuple[Fraction, Fraction]:
    s, s_z = as_half_integer(s), as_half_integer(s_z)
    if s < 0 or abs(s_z) > s or (s - s_z).denominator != 1:
        raise ConfigurationError(f"invalid quantum numbers s={s}, s_z={s_z}")
    return s, s_z


def wigner_d(s, s_z, theta: float) -> float:
    """<s, s_z| exp(-i theta S_y) |s, s>."""
    s, s_z = _check_qn(s, s_z)
    up, down = int(s + s_z), int(s - s_z)
    c, sn = math.cos(theta / 2), math.sin(theta / 2)
    return math.sqrt(comb(up + down, up)) * c ** up * sn ** down


def theta_opt(s, s_z) -> float:
    s, s_z = _check_qn(s, s_z)
    if s == 0:
        log.info("s = 0: no rotation needed")
        return 0.0
    return 2 * math.asin(math.sqrt(float((s - s_z) / (2 * s))))


def wigner_weight_exact(s, s_z) -> Fraction:
    s, s_z = _check_qn(s, s_z)
    up, down = int(s + s_z), int(s - s_z)
    two_s = up + down
    if two_s == 0:
        return Fraction(1)
    # 0**0 == 1 for Python ints, which is the convention we want
    return Fraction(comb(two_s, up) * up ** up * down ** down, two_s ** two_s)


def wigner_weight(s, s_z) -> float:
    """Best achievable |d^s_{s_z, s}|^2, reached at theta_opt(s, s_z)."""
    return float(wigner_weight_exact(s, s_z))


@dataclass(frozen=True)
class RotationPlan:
    s_star: Fraction
    s_z_star: Fraction
    theta_opt: float
    expected_weight: float

    @classmethod
    def for_target(cls, s_star, s_z_star) -> "RotationPlan":
        s, sz = _check_qn(s_star, s_z_star)
        return cls(s, sz, theta_opt(s, sz), wigner_weight(s, sz))


# -- rotation --------------------------------------------------------------


def _apply_local(amps: np.ndarray, U: np.ndarray, offset: int, width: int, n_qubits: int) -> np.ndarray:
    view = amps.reshape(1 << (n_qubits - offset - width), 1 << width, 1 << offset)
    return np.einsum("ab,xby->xay", U, view).reshape(-1)


def local_y_rotation(site, theta: float) -> np.ndarray:
    if site.encoding == DIRECT:
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    _, sy, _ = _local_spin_matrices(site.spin, site.qubit_count)
    return expm(-1j * theta * sy)


def global_y_rotation(psi: StateVector, reg: SpinRegister, theta: float) -> StateVector:
    """exp(-i theta S_y) as a product of single-site rotations."""
    if psi.n_qubits != reg.n_qubits:
        raise ConfigurationError("state and register sizes differ")
    amps = psi.amplitudes
    for site in reg.sites:
        amps = _apply_local(amps, local_y_rotation(site, theta), site.qubit_offset, site.qubit_count, reg.n_qubits)
    return StateVector(amps)


# -- projection ------------------------------------------------------------


def _popcount(n_qubits: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n_qubits, dtype=np.uint64)).astype(int)


def _finish(amps: np.ndarray, leakage: float = 0.0) -> tuple[StateVector, float]:
    p = float(np.vdot(amps, amps).real)
    if p < EMPTY_TOL:
        raise EmptySectorError(f"post-selection probability {p:.3e} is below {EMPTY_TOL}", leakage=leakage)
    return StateVector(amps / math.sqrt(p)), p


def hamming_project_direct(psi: StateVector, weight: int) -> tuple[StateVector, float]:
    n = psi.n_qubits
    if not 0 <= weight <= n:
        raise ConfigurationError(f"weight {weight} outside 0..{n}")
    keep = _popcount(n) == weight
    return _finish(np.where(keep, psi.amplitudes, 0))


def default_ancillas(n_qubits: int) -> int:
    return max(1, math.ceil(math.log2(n_qubits))) if n_qubits > 1 else 1


def outcome_for_weight(n_qubits: int, weight: int, ancillas: int) -> int:
    """Ancilla readout that flags Hamming weight ``weight``.

    The phases add up to 2 pi 2^(k-1) (n - w) / 2^m on ancilla k, so the
    inverse Fourier transform returns (n - w) mod 2^m.
    """
    return (n_qubits - weight) % (1 << ancillas)


def aliased_weights(n_qubits: int, weight: int, ancillas: int) -> list[int]:
    target = outcome_for_weight(n_qubits, weight, ancillas)
    return [w for w in range(n_qubits + 1) if w != weight and outcome_for_weight(n_qubits, w, ancillas) == target]


def _inverse_qft(m: int) -> np.ndarray:
    d = 1 << m
    k = np.arange(d)
    return np.exp(-2j * np.pi * np.outer(k, k) / d) / np.sqrt(d)


def hamming_circuit_state(psi: StateVector, ancillas: int) -> np.ndarray:
    """Joint (ancilla, system) amplitudes right before the ancilla readout.

    Row a of the result is the system branch for ancilla outcome a; ancilla
    k (1-based) is bit k-1 of a.
    """
    n, m = psi.n_qubits, ancillas
    dim_a = 1 << m
    joint = np.zeros((dim_a, psi.dim), dtype=complex)
    joint[0] = psi.amplitudes
    hadamard = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    bits_sys = [(np.arange(psi.dim) >> q) & 1 for q in range(n)]
    a_idx = np.arange(dim_a)

    def on_ancilla(state, k, U):
        view = state.reshape(1 << (m - k), 2, 1 << (k - 1), psi.dim)
        return np.einsum("ab,xbyz->xayz", U, view).reshape(dim_a, psi.dim)

    for k in range(1, m + 1):
        joint = on_ancilla(joint, k, hadamard)
    for k in range(1, m + 1):
        a_bit = (a_idx >> (k - 1)) & 1
        vartheta = 2.0 ** (k - m) * np.pi * n
        varphi = -(2.0 ** (k - m)) * np.pi
        joint *= np.exp(1j * vartheta * a_bit)[:, None]
        for q in range(n):
            # controlled phase between system qubit q and ancilla k
            joint *= np.exp(1j * varphi * np.outer(a_bit, bits_sys[q]))
    return _inverse_qft(m) @ joint


def hamming_project_circuit(psi: StateVector, weight: int, ancillas: int | None = None) -> tuple[StateVector, float]:
    """Hamming-weight projection through the phase-estimation ancilla circuit."""
    n = psi.n_qubits
    if not 0 <= weight <= n:
        raise ConfigurationError(f"weight {weight} outside 0..{n}")
    m = default_ancillas(n) if ancillas is None else ancillas
    clash = aliased_weights(n, weight, m)
    if clash:
        raise WeightAliasingError(
            f"{m} ancillas cannot separate weight {weight} from {clash} on {n} qubits; "
            f"use ancillas={math.ceil(math.log2(n + 1))}"
        )
    branch = hamming_circuit_state(psi, m)[outcome_for_weight(n, weight, m)]
    return _finish(branch)


class ProjectionResult(NamedTuple):
    state: StateVector
    probability: float
    leakage: float


def sz_projection(psi: StateVector, reg: SpinRegister, s_z) -> ProjectionResult:
    s_z = as_half_integer(s_z)
    sz, physical = reg.sz_diagonal()
    amps = psi.amplitudes
    leakage = float(np.sum(np.abs(amps[~physical]) ** 2))
    keep = physical & np.isclose(sz, float(s_z))
    state, p = _finish(np.where(keep, amps, 0), leakage)
    if leakage > 1e-10:
        log.warning("removed %.3e probability on unphysical codes", leakage)
    return ProjectionResult(state, p, leakage)


def project_sz_encoded(psi: StateVector, reg: SpinRegister, s_z) -> tuple[StateVector, float]:
    res = sz_projection(psi, reg, s_z)
    return res.state, res.probability


@dataclass
class StageTwoResult:
    plan: RotationPlan
    state: StateVector
    probability: float
    leakage: float
    method: str


def stage_two(psi: StateVector, reg: SpinRegister, s_star, s_z_star, ancillas: int | None = None) -> StageTwoResult:
    """Rotate by theta_opt and post-select S_z = s_z_star."""
    plan = RotationPlan.for_target(s_star, s_z_star)
    rotated = global_y_rotation(psi, reg, plan.theta_opt)
    if reg.all_direct:
        weight = Fraction(reg.n_qubits, 2) - plan.s_z_star
        if weight.denominator != 1:
            raise ConfigurationError(f"S_z={plan.s_z_star} impossible on {reg.n_qubits} qubits")
        state, p = hamming_project_circuit(rotated, int(weight), ancillas)
        return StageTwoResult(plan, state, p, 0.0, "hamming_circuit")
    res = sz_projection(rotated, reg, plan.s_z_star)
    return StageTwoResult(plan, res.state, res.probability, res.leakage, "sz_projector")
