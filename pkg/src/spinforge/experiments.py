"""
Model/penalty assembly and the per-experiment runners used by the CLI and
the scripts.  Everything here is deterministic given a RunConfig.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .config import RunConfig, parse_n_list
from .errors import ConfigurationError
from .evolution import AteSchedule, EvolutionRecord, PiteConfig, ate_initial_hamiltonian, ate_run, pite_run
from .pauli import PauliSum
from .penalty import PenaltyConfig, penalty
from .postselection import StageTwoResult, stage_two
from .complexity import ScalingRecord, scaling_sweep
from .simulator import StateVector, dense_hermitian
from .spin_models import (
    MN_INITIAL_LABELS,
    SpinRegister,
    basis_state,
    heisenberg_ring,
    mn_trimer,
    sz_balanced_labels,
    total_spin_operators,
)

log = logging.getLogger(__name__)

# multiply a coupling in cm^-1 by this to get the unit
ENERGY_UNITS = {
    "cm-1": 1.0,
    "meV": 0.1239841984,
    "eV": 1.239841984e-4,
    "hartree": 4.556335253e-6,
}


@dataclass
class Problem:
    reg: SpinRegister
    H_system: PauliSum
    spin_ops: tuple[PauliSum, PauliSum, PauliSum, PauliSum]
    penalty_cfg: PenaltyConfig | None
    H_problem: PauliSum

    @property
    def observables(self) -> dict[str, PauliSum]:
        return {"s2": self.spin_ops[3], "sz": self.spin_ops[2]}


def build_system(cfg: RunConfig) -> tuple[PauliSum, SpinRegister]:
    if cfg.model == "ring":
        return heisenberg_ring(cfg.n, cfg.J), SpinRegister.spin_half_chain(cfg.n)
    if cfg.energy_unit not in ENERGY_UNITS:
        raise ConfigurationError(f"unknown energy unit {cfg.energy_unit!r}; choose from {sorted(ENERGY_UNITS)}")
    return mn_trimer(cfg.J01, cfg.J12, cfg.J20, energy_scale=ENERGY_UNITS[cfg.energy_unit])


def penalty_config(cfg: RunConfig) -> PenaltyConfig:
    return PenaltyConfig(cfg.s_star_value, cfg.s_z_star_value, C_S=cfg.C_S, C_z=cfg.C_z, kind=cfg.penalty)


def build_problem(cfg: RunConfig, with_penalty: bool = True) -> Problem:
    H_sys, reg = build_system(cfg)
    ops = total_spin_operators(reg)
    pcfg = penalty_config(cfg) if with_penalty else None
    H = H_sys + penalty(reg, pcfg, ops) if pcfg else H_sys
    pb = Problem(reg, H_sys, ops, pcfg, H)
    if pcfg is not None and reg.n_qubits <= 10:
        target_is_ground(pb)
    return pb


def initial_labels(cfg: RunConfig, reg: SpinRegister):
    """Computational-basis start state for PITE and for diagonal-Z ATE."""
    if cfg.initial not in ("auto", "alternating_x"):
        # "000,001,100" gives per-site codes; a bare bit string covers spin-1/2 registers
        return tuple(cfg.initial.split(",")) if "," in cfg.initial else cfg.initial
    if cfg.model == "ring":
        return sz_balanced_labels(cfg.n, cfg.s_z_star_value)
    key = int(cfg.s_star_value) if cfg.s_star_value.denominator == 1 else None
    if key not in MN_INITIAL_LABELS:
        raise ConfigurationError(f"no default Mn start state for s*={cfg.s_star}; pass initial=")
    return MN_INITIAL_LABELS[key]


def run_ate(cfg: RunConfig, problem: Problem | None = None) -> EvolutionRecord:
    pb = problem or build_problem(cfg)
    if cfg.model == "ring" and cfg.initial in ("auto", "alternating_x"):
        H0, psi0 = ate_initial_hamiltonian("alternating_x", pb.reg)
    else:
        H0, psi0 = ate_initial_hamiltonian("diagonal_z", pb.reg, initial_labels(cfg, pb.reg))
    sched = AteSchedule(cfg.T, cfg.steps, cfg.schedule, cfg.amplitude)
    rec = ate_run(H0, pb.H_problem, psi0, sched, cfg.evolver, cfg.sample_every,
                  pb.observables, pb.H_system, extra_fidelity=cfg.extra_fidelity)
    rec.metadata["target_energy"] = sector_ground_energy(pb)
    return rec


def run_pite(cfg: RunConfig, problem: Problem | None = None) -> EvolutionRecord:
    pb = problem or build_problem(cfg)
    psi0 = basis_state(pb.reg, initial_labels(cfg, pb.reg))
    pcfg = PiteConfig(cfg.m0, cfg.dt, cfg.pite_steps)
    return pite_run(pb.H_problem, psi0, pcfg, cfg.evolver, cfg.sample_every, pb.observables,
                    pb.H_system, oracle=cfg.oracle, seed=cfg.seed)


def target_state(pb: Problem) -> StateVector:
    """Lowest physical eigenvector of H_problem (dense), used when no input state is given."""
    mat = dense_hermitian(pb.H_problem)
    _, physical = pb.reg.sz_diagonal()
    idx = np.flatnonzero(physical)
    _, vecs = np.linalg.eigh(mat[np.ix_(idx, idx)])
    amps = np.zeros(mat.shape[0], dtype=complex)
    amps[idx] = vecs[:, 0]
    return StateVector(amps)


def run_postselect(cfg: RunConfig, psi: StateVector | None = None) -> StageTwoResult:
    # the penalty targets |s*, s*>; the projection then picks s_z*
    pb = build_problem(cfg.replace(s_z_star=None))
    if psi is None:
        psi = StateVector.from_csv(cfg.input_state) if cfg.input_state else target_state(pb)
    return stage_two(psi, pb.reg, cfg.s_star_value, cfg.s_z_star_value, cfg.ancillas)


def run_scaling(cfg: RunConfig) -> ScalingRecord:
    kinds = tuple(k.strip() for k in cfg.kinds.split(",") if k.strip())
    return scaling_sweep(parse_n_list(cfg.n_list), cfg.s_star_value, cfg.C_S, cfg.dt, cfg.m0, kinds, cfg.workers)


@dataclass
class Level:
    energy: float
    degeneracy: int
    s2: float

    @property
    def spin(self) -> float:
        return (-1 + np.sqrt(1 + 4 * max(self.s2, 0.0))) / 2


def physical_levels(H: PauliSum, reg: SpinRegister, s2: PauliSum, tol: float = 1e-6) -> list[Level]:
    """Eigenlevels of H on the physical subspace with their mean <S^2>."""
    _, physical = reg.sz_diagonal()
    idx = np.flatnonzero(physical)
    mat = dense_hermitian(H)[np.ix_(idx, idx)]
    s2m = dense_hermitian(s2)[np.ix_(idx, idx)]
    vals, vecs = np.linalg.eigh(mat)
    out, start = [], 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[start] > tol * max(1.0, abs(vals[start])):
            sub = vecs[:, start:i]
            out.append(Level(float(vals[start:i].mean()), i - start,
                             float(np.real(np.trace(sub.conj().T @ s2m @ sub))) / (i - start)))
            start = i
    return out


def run_spectrum(cfg: RunConfig) -> list[Level]:
    pb = build_problem(cfg, with_penalty=False)
    return physical_levels(pb.H_system, pb.reg, pb.spin_ops[3])


def sector_ground_energy(pb: Problem, s=None, s_z=None) -> float:
    """Lowest H_system energy among states with S^2 = s(s+1) and S_z = s_z."""
    cfg = pb.penalty_cfg
    s = float(cfg.s_star if s is None else s)
    s_z = float(cfg.s_z_star if s_z is None else s_z)
    sz, physical = pb.reg.sz_diagonal()
    idx = np.flatnonzero(physical & np.isclose(sz, s_z))
    H = dense_hermitian(pb.H_system)[np.ix_(idx, idx)]
    S2 = dense_hermitian(pb.spin_ops[3])[np.ix_(idx, idx)]
    # S^2 and H commute: diagonalize S^2 first, then H inside the s block
    w, V = np.linalg.eigh(S2)
    block = V[:, np.abs(w - s * (s + 1)) < 1e-6]
    if block.shape[1] == 0:
        raise ConfigurationError(f"no states with s={s}, s_z={s_z}")
    return float(np.linalg.eigvalsh(block.conj().T @ H @ block)[0])


def target_is_ground(pb: Problem, tol: float = 1e-8) -> bool:
    """Check that the target sector holds the physical ground state of H_problem.

    The penalty vanishes on the target multiplet member, so its lowest
    H_problem energy is the sector's H_system ground energy.
    """
    target = sector_ground_energy(pb)
    _, physical = pb.reg.sz_diagonal()
    idx = np.flatnonzero(physical)
    lowest = float(np.linalg.eigvalsh(dense_hermitian(pb.H_problem)[np.ix_(idx, idx)])[0])
    if lowest < target - tol * max(1.0, abs(target)):
        warnings.warn(
            f"H_problem ground energy {lowest:.6g} lies below the target-sector energy {target:.6g}; "
            "the penalty is too weak for this energy scale",
            RuntimeWarning,
            stacklevel=2,
        )
        return False
    return True
