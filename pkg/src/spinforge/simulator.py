"""
Statevector engine.

Pauli-term operations act by index permutation and sign masks (O(2^n) per
term); the dense routines (``exact_evolve``, ``diagonalize`` and friends) are
the oracles the approximate paths are checked against.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError, DimensionError
from .pauli import PauliString, PauliSum, apply_pauli_masks, check_dense

NORM_TOL = 1e-10
HERMITIAN_RESIDUE = 1e-8
DEGENERACY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        dim = amps.shape[0]
        if amps.ndim != 1 or dim < 2 or dim & (dim - 1):
            raise DimensionError("amplitude vector length must be a power of two >= 2")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex)
        return cls(amps / np.linalg.norm(amps))

    @classmethod
    def random(cls, n_qubits: int, rng: np.random.Generator) -> "StateVector":
        dim = 1 << n_qubits
        return cls.normalized(rng.normal(size=dim) + 1j * rng.normal(size=dim))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) < tol

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.overlap(other)) ** 2

    def distance(self, other: "StateVector") -> float:
        return float(np.linalg.norm(self.amplitudes - other.amplitudes))

    def phase_distance(self, other: "StateVector") -> float:
        """Distance after removing the relative global phase."""
        ov = self.overlap(other)
        phase = ov / abs(ov) if abs(ov) > 0 else 1.0
        return float(np.linalg.norm(self.amplitudes * phase - other.amplitudes))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "re", "im"])
            for i, a in enumerate(self.amplitudes):
                w.writerow([i, repr(float(a.real)), repr(float(a.imag))])

    @classmethod
    def from_csv(cls, path) -> "StateVector":
        rows = [r for r in csv.reader(Path(path).read_text(encoding="utf-8").splitlines())
                if r and not r[0].startswith("#")]
        body = rows[1:] if rows[0][0] == "index" else rows
        amps = np.zeros(len(body), dtype=complex)
        for r in body:
            amps[int(r[0])] = complex(float(r[1]), float(r[2]))
        return cls(amps)


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    vectors: np.ndarray  # columns are eigenvectors

    @property
    def eigenvectors(self) -> list[StateVector]:
        return [StateVector(self.vectors[:, i]) for i in range(self.vectors.shape[1])]

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    def ground_indices(self, degeneracy_tol: float = DEGENERACY_TOL) -> np.ndarray:
        return np.nonzero(self.eigenvalues - self.eigenvalues[0] < degeneracy_tol)[0]

    def ground_projector_weight(self, psi, degeneracy_tol: float = DEGENERACY_TOL) -> float:
        amps = _amps(psi)
        sub = self.vectors[:, self.ground_indices(degeneracy_tol)]
        return float(np.sum(np.abs(sub.conj().T @ amps) ** 2))

    def levels(self, tol: float = 1e-6) -> list[tuple[float, np.ndarray]]:
        """Group eigenvalues into degenerate levels: [(energy, column indices)]."""
        out, start = [], 0
        ev = self.eigenvalues
        for i in range(1, len(ev) + 1):
            if i == len(ev) or ev[i] - ev[start] > tol:
                out.append((float(ev[start:i].mean()), np.arange(start, i)))
                start = i
        return out


def _amps(psi) -> np.ndarray:
    return psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi, dtype=complex)


def _check_dims(psi: StateVector, n_qubits: int) -> None:
    if psi.n_qubits != n_qubits:
        raise DimensionError(f"state has {psi.n_qubits} qubits, operator {n_qubits}")


def require_hermitian(H: PauliSum, tol: float = 1e-12) -> None:
    if not H.is_hermitian(tol):
        raise ContractError("operator is not Hermitian (complex Pauli coefficient)")


def apply_pauli_rotation(psi: StateVector, P: PauliString, theta: float) -> StateVector:
    """exp(-i theta P) psi, exact since P^2 = I."""
    _check_dims(psi, P.n_qubits)
    amps = psi.amplitudes
    return StateVector(np.cos(theta) * amps - 1j * np.sin(theta) * apply_pauli_masks(amps, P.x, P.z))


def _rotate_inplace(amps: np.ndarray, P: PauliString, theta: float) -> np.ndarray:
    if P.is_identity():
        return amps * np.exp(-1j * theta)
    return np.cos(theta) * amps - 1j * np.sin(theta) * apply_pauli_masks(amps, P.x, P.z)


def trotter_step(psi: StateVector, H: PauliSum, t: float) -> StateVector:
    """First-order product formula over H's terms in canonical order."""
    require_hermitian(H)
    _check_dims(psi, H.n_qubits)
    amps = psi.amplitudes
    for P, c in H.items():
        amps = _rotate_inplace(amps, P, c.real * t)
    return StateVector(amps)


def trotter_amplitudes(amps: np.ndarray, H: PauliSum, t: float) -> np.ndarray:
    """Raw-array variant of ``trotter_step`` used by the drivers."""
    for P, c in H.items():
        amps = _rotate_inplace(amps, P, c.real * t)
    return amps


def dense_hermitian(H: PauliSum) -> np.ndarray:
    require_hermitian(H)
    check_dense(H.n_qubits)
    mat = H.to_dense()
    return 0.5 * (mat + mat.conj().T)


def diagonalize(H: PauliSum) -> Spectrum:
    evals, evecs = np.linalg.eigh(dense_hermitian(H))
    return Spectrum(evals, evecs)


def evolve_with_spectrum(amps: np.ndarray, spec: Spectrum, t: complex) -> np.ndarray:
    """exp(-i H t) amps with H given by its spectrum (t may be complex)."""
    coeffs = spec.vectors.conj().T @ amps
    return spec.vectors @ (np.exp(-1j * spec.eigenvalues * t) * coeffs)


def exact_evolve(psi: StateVector, H: PauliSum, t: float) -> StateVector:
    _check_dims(psi, H.n_qubits)
    return StateVector(evolve_with_spectrum(psi.amplitudes, diagonalize(H), t))


def imaginary_time_dense(psi: StateVector, H: PauliSum, tau: float) -> tuple[StateVector, float]:
    """Renormalized exp(-H tau) psi and the squared norm of the unnormalized image."""
    _check_dims(psi, H.n_qubits)
    out = evolve_with_spectrum(psi.amplitudes, diagonalize(H), -1j * tau)
    norm2 = float(np.vdot(out, out).real)
    return StateVector(out / np.sqrt(norm2)), norm2


def expectation(psi: StateVector, A: PauliSum) -> float:
    _check_dims(psi, A.n_qubits)
    amps = psi.amplitudes
    value = np.vdot(amps, A.apply(amps))
    return _real_or_raise(value)


def expectation_dense(amps: np.ndarray, mat: np.ndarray) -> float:
    return _real_or_raise(np.vdot(amps, mat @ amps))


def _real_or_raise(value: complex) -> float:
    if abs(value.imag) > HERMITIAN_RESIDUE:
        raise ContractError(f"expectation has imaginary residue {value.imag:.3e}")
    return float(value.real)


def ground_subspace_fidelity(psi: StateVector, H: PauliSum, degeneracy_tol: float = DEGENERACY_TOL) -> float:
    """Weight of psi in the (possibly degenerate) ground eigenspace of H."""
    _check_dims(psi, H.n_qubits)
    return min(1.0, diagonalize(H).ground_projector_weight(psi, degeneracy_tol))
