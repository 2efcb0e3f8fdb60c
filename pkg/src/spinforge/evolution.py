"""
ATE and PITE drivers.

Both drivers follow a single deterministic trajectory and record observables
every ``sample_every`` steps.  The "exact" evolver applies e^{-iH dt} without
decomposition error (dense matrix exponential restricted to the block of the
computational basis reachable from the start state); the "trotter" evolver
uses first-order product formulas over the Pauli terms.
"""
from __future__ import annotations

import csv
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse.linalg import expm_multiply

from .errors import ConfigurationError, FailureDominatedError
from .pauli import PauliString, PauliSum, apply_pauli_masks, check_dense, total
from .simulator import (
    Spectrum,
    StateVector,
    dense_hermitian,
    diagonalize,
    evolve_with_spectrum,
    require_hermitian,
    trotter_amplitudes,
)
from .spin_models import SpinRegister, basis_index

log = logging.getLogger(__name__)

EXACT, TROTTER = "exact", "trotter"
SINE_SQUARED, CONSTANT = "sine_squared", "constant"

CSV_COLUMNS = (
    "step", "t", "energy_problem", "energy_system", "s2", "sz", "fidelity",
    "p_step", "p_cum", "ref_energy", "ref_s2", "ref_sz",
)
P_FLOOR = 1e-12


# -- records ---------------------------------------------------------------


@dataclass
class EvolutionRecord:
    kind: str
    rows: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    final_state: StateVector | None = None
    extra_columns: tuple[str, ...] = ()

    def column(self, name: str) -> np.ndarray:
        return np.array([np.nan if r.get(name) is None else r[name] for r in self.rows], dtype=float)

    @property
    def final(self) -> dict:
        return self.rows[-1]

    @property
    def columns(self) -> tuple[str, ...]:
        return CSV_COLUMNS + self.extra_columns

    def write_csv(self, fh, header_lines: Sequence[str] = ()) -> None:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow(["" if row.get(c) is None else _fmt(row[c]) for c in self.columns])


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


# -- evolvers --------------------------------------------------------------


def reachable_block(mats: Sequence[np.ndarray], start: np.ndarray, rtol: float = 1e-11) -> np.ndarray:
    """Basis indices connected to the support of ``start`` through any matrix.

    Entries below ``rtol`` times the largest magnitude count as round-off.
    """
    pattern = np.zeros(mats[0].shape, dtype=bool)
    for m in mats:
        mag = np.abs(m)
        pattern |= mag > rtol * max(1.0, float(mag.max(initial=0.0)))
    pattern |= pattern.T
    seen = np.abs(start) > 0
    frontier = seen.copy()
    while frontier.any():
        nxt = pattern[frontier].any(axis=0) & ~seen
        seen |= nxt
        frontier = nxt
    return np.nonzero(seen)[0]


class _Block:
    """Dense observables restricted to an invariant block of basis states."""

    def __init__(self, block: np.ndarray, dim: int):
        self.block = block
        self.dim = dim

    def restrict(self, mat: np.ndarray) -> np.ndarray:
        return mat[np.ix_(self.block, self.block)]

    def embed(self, amps: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dim, dtype=complex)
        out[self.block] = amps
        return out


def _expect(mat: np.ndarray, amps: np.ndarray) -> float:
    return float(np.vdot(amps, mat @ amps).real)


class _Observables:
    def __init__(self, ops: dict[str, PauliSum], blk: _Block):
        self.mats = {k: blk.restrict(dense_hermitian(op)) for k, op in ops.items()}

    def __call__(self, amps: np.ndarray) -> dict:
        return {k: _expect(m, amps) for k, m in self.mats.items()}


def _ground_stats(spec_vals, spec_vecs, obs: _Observables, amps, tol) -> dict:
    ground = spec_vals - spec_vals[0] < tol
    sub = spec_vecs[:, ground]
    d = sub.shape[1]
    out = {
        "ref_energy": float(spec_vals[0]),
        "fidelity": min(1.0, float(np.sum(np.abs(sub.conj().T @ amps) ** 2))),
    }
    for key in ("s2", "sz"):
        m = obs.mats[key]
        out[f"ref_{key}"] = float(np.real(np.trace(sub.conj().T @ m @ sub))) / d
    return out


# -- ATE -------------------------------------------------------------------


@dataclass(frozen=True)
class AteSchedule:
    total_time: float = 1.0
    steps: int = 20000
    rule: str = SINE_SQUARED
    amplitude: float = 1e-4
    dt: float | None = None

    def __post_init__(self):
        if self.steps < 1 or self.total_time <= 0:
            raise ConfigurationError("schedule needs steps >= 1 and total_time > 0")
        if self.rule == SINE_SQUARED and self.amplitude <= 0:
            raise ConfigurationError("sine-squared amplitude must be positive")
        if self.rule == CONSTANT and (self.dt or 0) <= 0 and self.dt is not None:
            raise ConfigurationError("constant dt must be positive")
        if self.rule not in (SINE_SQUARED, CONSTANT):
            raise ConfigurationError(f"unknown schedule rule {self.rule!r}")

    def increments(self) -> np.ndarray:
        """Step sizes; the sine phase runs over the nominal grid i/steps."""
        if self.rule == CONSTANT:
            dt = self.dt if self.dt is not None else self.total_time / self.steps
            return np.full(self.steps, dt)
        phase = np.arange(self.steps) / self.steps
        return self.amplitude * np.sin(2 * np.pi * phase) ** 2

    @property
    def final_time(self) -> float:
        return float(np.sum(self.increments()))


def ate_initial_hamiltonian(kind: str, reg: SpinRegister, labels=None) -> tuple[PauliSum, StateVector]:
    """Initial Hamiltonian and its ground state.

    ``alternating_x``: sum_i (-1)^i X_i, ground state |-> on even and |+> on
    odd qubits.  ``diagonal_z``: sum_i (-1)^{f(i)} Z_i with f(i) = 1 - b_i so
    that the basis state with bits b (from ``labels``) is the unique ground
    state.
    """
    n = reg.n_qubits
    if kind == "alternating_x":
        H = total((PauliSum.single(n, q, "X", (-1.0) ** q) for q in range(n)), n)
        plus = np.array([1, 1]) / np.sqrt(2)
        minus = np.array([1, -1]) / np.sqrt(2)
        amps = np.ones(1, dtype=complex)
        for q in range(n):
            amps = np.kron(plus if q % 2 else minus, amps)
        return H, StateVector(amps)
    if kind == "diagonal_z":
        if labels is None:
            raise ConfigurationError("diagonal_z needs the start-state labels")
        index = basis_index(reg, labels)
        bits = [(index >> q) & 1 for q in range(n)]
        H = total((PauliSum.single(n, q, "Z", (-1.0) ** (1 - b)) for q, b in enumerate(bits)), n)
        return H, StateVector.basis(n, index)
    raise ConfigurationError(f"unknown initial Hamiltonian kind {kind!r}")


def ate_run(
    H_initial: PauliSum,
    H_problem: PauliSum,
    psi0: StateVector,
    sched: AteSchedule,
    evolver: str = EXACT,
    sample_every: int = 50,
    observables: dict[str, PauliSum] | None = None,
    H_system: PauliSum | None = None,
    extra_fidelity: bool = False,
    degeneracy_tol: float = 1e-8,
) -> EvolutionRecord:
    """Adiabatic evolution along (1 - t/T) H_initial + (t/T) H_problem.

    ``observables`` must provide ``s2`` and ``sz``; references come from
    diagonalizing H_t inside the block reachable from ``psi0``.
    """
    require_hermitian(H_initial)
    require_hermitian(H_problem)
    if evolver not in (EXACT, TROTTER):
        raise ConfigurationError(f"unknown evolver {evolver!r}")
    check_dense(H_problem.n_qubits)
    n = H_problem.n_qubits
    ops = dict(observables or {})
    ops["energy_problem"] = H_problem
    ops["energy_system"] = H_system if H_system is not None else H_problem

    D_init, D_prob = dense_hermitian(H_initial), dense_hermitian(H_problem)
    blk = _Block(reachable_block([D_init, D_prob], psi0.amplitudes), 1 << n)
    D_init, D_prob = blk.restrict(D_init), blk.restrict(D_prob)
    obs = _Observables(ops, blk)
    amps = psi0.amplitudes[blk.block].copy()

    init_vals, init_vecs = np.linalg.eigh(D_init)
    f0 = float(np.sum(np.abs(init_vecs[:, init_vals - init_vals[0] < degeneracy_tol].conj().T @ amps) ** 2))
    if f0 < 0.99:
        warnings.warn(f"initial state has only {f0:.3f} ground-state weight for H_initial", RuntimeWarning)
    final_spec = np.linalg.eigh(D_prob) if extra_fidelity else None

    if evolver == TROTTER:
        trotter_terms = _mixing_terms(H_initial, H_problem)

    dts = sched.increments()
    T = sched.total_time
    record = EvolutionRecord("ate", extra_columns=("fidelity_final",) if extra_fidelity else ())
    t = 0.0

    def sample(step: int, t: float, amps: np.ndarray) -> None:
        r = min(max(t / T, 0.0), 1.0)
        H_t = (1 - r) * D_init + r * D_prob
        vals, vecs = np.linalg.eigh(H_t)
        row = {"step": step, "t": t, **obs(amps), **_ground_stats(vals, vecs, obs, amps, degeneracy_tol)}
        if final_spec is not None:
            fv, fV = final_spec
            row["fidelity_final"] = min(1.0, float(np.sum(np.abs(fV[:, fv - fv[0] < degeneracy_tol].conj().T @ amps) ** 2)))
        record.rows.append(row)

    sample(0, 0.0, amps)
    full = None
    for i, dt in enumerate(dts):
        r = min(max(t / T, 0.0), 1.0)
        if dt != 0.0:
            if evolver == EXACT:
                H_t = (1 - r) * D_init + r * D_prob
                amps = expm_multiply(-1j * dt * H_t, amps)
            else:
                full = blk.embed(amps)
                for P, ci, cp in trotter_terms:
                    full = _rotate(full, P, ((1 - r) * ci + r * cp) * dt)
                amps = full[blk.block]
        t += dt
        step = i + 1
        if step % sample_every == 0 or step == len(dts):
            sample(step, t, amps)

    record.final_state = StateVector(blk.embed(amps))
    record.metadata.update(
        evolver=evolver, t_final=t, block_dim=len(blk.block), initial_fidelity=f0,
        leakage=float(1 - np.linalg.norm(amps) ** 2),
    )
    return record


def _mixing_terms(H_initial: PauliSum, H_problem: PauliSum) -> list[tuple[PauliString, float, float]]:
    keys = sorted(set(H_initial.terms) | set(H_problem.terms), key=lambda p: p.letters)
    return [(P, H_initial.coeff(P).real, H_problem.coeff(P).real) for P in keys]


def _rotate(amps: np.ndarray, P: PauliString, theta: float) -> np.ndarray:
    if P.is_identity():
        return amps * np.exp(-1j * theta)
    return np.cos(theta) * amps - 1j * np.sin(theta) * apply_pauli_masks(amps, P.x, P.z)


# -- PITE ------------------------------------------------------------------


@dataclass(frozen=True)
class PiteConfig:
    m0: float = 0.8
    dt: float = 0.015
    steps: int = 2000

    def __post_init__(self):
        if not 0 < self.m0 < 1 or math.isclose(self.m0, 1 / math.sqrt(2), rel_tol=0, abs_tol=1e-12):
            raise ConfigurationError("m0 must lie in (0, 1) and differ from 1/sqrt(2)")
        if self.dt <= 0 or self.steps < 1:
            raise ConfigurationError("PITE needs dt > 0 and steps >= 1")

    @property
    def s(self) -> float:
        return self.m0 / math.sqrt(1 - self.m0 ** 2)

    @property
    def kappa(self) -> int:
        return 1 if self.m0 > 1 / math.sqrt(2) else -1

    @property
    def theta0(self) -> float:
        return self.kappa * math.acos((self.m0 + math.sqrt(1 - self.m0 ** 2)) / math.sqrt(2))


# ancilla gates, basis (|0>, |1>)
_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_W = np.array([[1, -1j], [1, 1j]], dtype=complex) / np.sqrt(2)


def _rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


class Propagator:
    """Applies e^{-iHt} for a fixed H, exactly (spectral) or by Trotter steps.

    ``spectrum`` may be supplied to propagate inside an invariant block.
    """

    def __init__(self, H: PauliSum, evolver: str = EXACT, trotter_slices: int = 1,
                 spectrum: Spectrum | None = None):
        require_hermitian(H)
        if evolver not in (EXACT, TROTTER):
            raise ConfigurationError(f"unknown evolver {evolver!r}")
        self.H = H
        self.evolver = evolver
        self.slices = trotter_slices
        if evolver == EXACT:
            self.spectrum = spectrum if spectrum is not None else diagonalize(H)
        else:
            self.spectrum = None

    def __call__(self, amps: np.ndarray, t: float) -> np.ndarray:
        if self.spectrum is not None:
            return evolve_with_spectrum(amps, self.spectrum, t)
        for _ in range(self.slices):
            amps = trotter_amplitudes(amps, self.H, t / self.slices)
        return amps


def _circuit_branch(amps: np.ndarray, cfg: "PiteConfig", prop: Propagator) -> tuple[np.ndarray, float]:
    # ancilla |0>, then W H
    a = _W @ _HADAMARD @ np.array([1.0, 0.0])
    # controlled real-time evolutions on the two ancilla branches
    angle = cfg.s * cfg.dt
    b0 = prop(a[0] * amps, angle)
    b1 = prop(a[1] * amps, -angle)
    # W^dag Rz(-2 theta0), keep the |0> branch
    g = _W.conj().T @ _rz(-2 * cfg.theta0)
    out = g[0, 0] * b0 + g[0, 1] * b1
    return out, _success(out)


def _exact_branch(amps: np.ndarray, cfg: "PiteConfig", spec: Spectrum) -> tuple[np.ndarray, float]:
    out = cfg.m0 * evolve_with_spectrum(amps, spec, -1j * cfg.dt)
    return out, _success(out)


def _success(out: np.ndarray) -> float:
    p = float(np.vdot(out, out).real)
    if p < P_FLOOR:
        raise FailureDominatedError(f"PITE success probability {p:.3e} below {P_FLOOR}")
    return p


def pite_step_circuit(psi: StateVector, H: PauliSum, cfg: PiteConfig, evolver: str = EXACT,
                      propagator: Propagator | None = None) -> tuple[StateVector, float]:
    """One first-order PITE step simulated with an explicit ancilla.

    The register is carried as the pair of ancilla branches (|0>, |1>).
    """
    prop = propagator or Propagator(H, evolver)
    out, p = _circuit_branch(psi.amplitudes, cfg, prop)
    return StateVector(out / math.sqrt(p)), p


def pite_step_exact(psi: StateVector, H: PauliSum, cfg: PiteConfig,
                    spectrum: Spectrum | None = None) -> tuple[StateVector, float]:
    """Apply m0 e^{-H dt} via the spectrum; returns (renormalized state, p)."""
    out, p = _exact_branch(psi.amplitudes, cfg, spectrum or diagonalize(H))
    return StateVector(out / math.sqrt(p)), p


def pite_run(
    H_problem: PauliSum,
    psi0: StateVector,
    cfg: PiteConfig,
    evolver: str = EXACT,
    sample_every: int = 1,
    observables: dict[str, PauliSum] | None = None,
    H_system: PauliSum | None = None,
    ground: Spectrum | None = None,
    oracle: bool = False,
    seed: int | None = None,
    degeneracy_tol: float = 1e-8,
) -> EvolutionRecord:
    """Follow the post-selected success branch for ``cfg.steps`` steps.

    ``oracle=True`` replaces the circuit by the exact map m0 e^{-H dt}.
    With ``seed`` set, each post-selection is sampled and the run stops at the
    first failure (demonstration mode).
    """
    ops = dict(observables or {})
    ops["energy_problem"] = H_problem
    ops["energy_system"] = H_system if H_system is not None else H_problem
    full_mats = {k: dense_hermitian(v) for k, v in ops.items()}
    dim = psi0.dim
    # The exact map never leaves the block reachable from psi0.  Working inside
    # it keeps round-off in other sectors from being amplified by the circuit's
    # periodic filter.  Trotter factors need not respect the block.
    if evolver == EXACT or oracle:
        blk = _Block(reachable_block([full_mats["energy_problem"]], psi0.amplitudes), dim)
    else:
        blk = _Block(np.arange(dim), dim)
    mats = {k: blk.restrict(m) for k, m in full_mats.items()}
    if ground is None:
        vals, vecs = np.linalg.eigh(mats["energy_problem"])
        ground_vecs = vecs
    else:
        vals, ground_vecs = ground.eigenvalues, ground.vectors[blk.block]
    spec = Spectrum(vals, ground_vecs)
    if oracle:
        prop = None
    elif evolver == EXACT:
        prop = Propagator(H_problem, EXACT, spectrum=Spectrum(*np.linalg.eigh(mats["energy_problem"])))
    else:
        prop = Propagator(H_problem, evolver)
    rng = np.random.default_rng(seed) if seed is not None else None

    record = EvolutionRecord("pite")
    p_cum, log10_p_cum = 1.0, 0.0
    amps = psi0.amplitudes[blk.block].copy()

    def sample(step: int, p_step) -> None:
        row = {"step": step, "t": step * cfg.dt, "p_step": p_step, "p_cum": p_cum}
        row.update({k: _expect(m, amps) for k, m in mats.items()})
        row["fidelity"] = min(1.0, spec.ground_projector_weight(amps, degeneracy_tol))
        record.rows.append(row)

    sample(0, None)
    for step in range(1, cfg.steps + 1):
        if oracle:
            out, p = _exact_branch(amps, cfg, spec)
        else:
            out, p = _circuit_branch(amps, cfg, prop)
        amps = out / math.sqrt(p)
        p_cum *= p
        log10_p_cum += math.log10(p)
        if rng is not None and rng.random() >= p:
            record.metadata["aborted_at"] = step
            sample(step, p)
            break
        if step % sample_every == 0 or step == cfg.steps:
            sample(step, p)

    record.final_state = StateVector(blk.embed(amps))
    record.metadata.update(
        evolver="oracle" if oracle else evolver, m0=cfg.m0, dt=cfg.dt, block_dim=len(blk.block),
        s=cfg.s, kappa=cfg.kappa, theta0=cfg.theta0, exact_ground_energy=spec.ground_energy,
        log10_p_cum=log10_p_cum,
    )
    return record
