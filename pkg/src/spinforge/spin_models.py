"""
Spin registers, encoded spin operators and the two model Hamiltonians.

Each site carries a spin ``s`` stored either directly (``s = 1/2``, one qubit,
``|0> = up``) or in standard binary encoding: level ``|s, m>`` maps to the code
``k = s - m`` written on ``ceil(log2(2s+1))`` qubits, with qubit ``offset + j``
holding bit ``j`` of ``k``.  Codes ``k > 2s`` are unphysical and every encoded
operator annihilates them (zero padding).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, log2
from typing import Sequence

import numpy as np

from .errors import ConfigurationError
from .pauli import PauliSum, pauli_decompose, total
from .simulator import StateVector

DIRECT, BINARY = "direct", "binary"


def as_half_integer(value) -> Fraction:
    """Parse 2.5, "5/2", Fraction(5, 2), ... into an exact half-integer."""
    if isinstance(value, str):
        frac = Fraction(value)
    else:
        frac = Fraction(value).limit_denominator(2)
        if abs(float(frac) - float(value)) > 1e-9:
            raise ConfigurationError(f"{value!r} is not a half-integer")
    if (2 * frac).denominator != 1:
        raise ConfigurationError(f"{value!r} is not a half-integer")
    return frac


@dataclass(frozen=True)
class SpinSite:
    spin: Fraction
    encoding: str = DIRECT
    qubit_offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "spin", as_half_integer(self.spin))
        if self.spin < Fraction(1, 2):
            raise ConfigurationError("site spin must be >= 1/2")
        if self.encoding == DIRECT and self.spin != Fraction(1, 2):
            raise ConfigurationError("direct encoding requires s = 1/2")
        if self.encoding not in (DIRECT, BINARY):
            raise ConfigurationError(f"unsupported encoding {self.encoding!r}")

    @property
    def levels(self) -> int:
        return int(2 * self.spin + 1)

    @property
    def qubit_count(self) -> int:
        return 1 if self.encoding == DIRECT else max(1, ceil(log2(self.levels)))

    @property
    def qubits(self) -> range:
        return range(self.qubit_offset, self.qubit_offset + self.qubit_count)

    def code_of(self, m) -> int:
        m = as_half_integer(m)
        if abs(m) > self.spin or (self.spin - m).denominator != 1:
            raise ConfigurationError(f"m={m} invalid for s={self.spin}")
        return int(self.spin - m)

    def m_of(self, code: int) -> Fraction | None:
        """S_z value of a local code, or None when the code is unphysical."""
        return self.spin - code if code < self.levels else None


@dataclass(frozen=True)
class SpinRegister:
    sites: tuple[SpinSite, ...]

    def __post_init__(self):
        expect = 0
        for site in self.sites:
            if site.qubit_offset != expect:
                raise ConfigurationError("site qubit spans must be contiguous and ordered")
            expect += site.qubit_count
        if not self.sites:
            raise ConfigurationError("empty register")

    @classmethod
    def from_spins(cls, spins: Sequence, encoding: str | None = None) -> "SpinRegister":
        sites, offset = [], 0
        for s in spins:
            s = as_half_integer(s)
            enc = encoding or (DIRECT if s == Fraction(1, 2) else BINARY)
            site = SpinSite(s, enc, offset)
            sites.append(site)
            offset += site.qubit_count
        return cls(tuple(sites))

    @classmethod
    def spin_half_chain(cls, n: int) -> "SpinRegister":
        return cls.from_spins([Fraction(1, 2)] * n)

    @property
    def n_qubits(self) -> int:
        last = self.sites[-1]
        return last.qubit_offset + last.qubit_count

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def max_spin(self) -> Fraction:
        return sum((s.spin for s in self.sites), Fraction(0))

    @property
    def all_direct(self) -> bool:
        return all(s.encoding == DIRECT for s in self.sites)

    def local_codes(self, index: int | np.ndarray):
        """Per-site codes of a basis index (vectorized over numpy arrays)."""
        return [(index >> s.qubit_offset) & ((1 << s.qubit_count) - 1) for s in self.sites]

    def sz_diagonal(self) -> tuple[np.ndarray, np.ndarray]:
        """(S_z value, physical mask) for every basis index."""
        idx = np.arange(1 << self.n_qubits)
        sz = np.zeros(idx.shape, dtype=float)
        physical = np.ones(idx.shape, dtype=bool)
        for site, code in zip(self.sites, self.local_codes(idx)):
            ok = code < site.levels
            physical &= ok
            sz += np.where(ok, float(site.spin) - code, 0.0)
        return sz, physical


@lru_cache(maxsize=None)
def _local_spin_matrices(spin: Fraction, qubits: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Zero-padded (Sx, Sy, Sz) in code ordering k = s - m."""
    levels = int(2 * spin + 1)
    dim = 1 << qubits
    s = float(spin)
    splus = np.zeros((dim, dim), dtype=complex)
    for k in range(1, levels):
        m = s - k
        splus[k - 1, k] = np.sqrt(s * (s + 1) - m * (m + 1))
    sminus = splus.conj().T
    sx = (splus + sminus) / 2
    sy = (splus - sminus) / 2j
    sz = np.zeros((dim, dim), dtype=complex)
    sz[np.arange(levels), np.arange(levels)] = s - np.arange(levels)
    return sx, sy, sz


@lru_cache(maxsize=None)
def _local_spin_paulis(spin: Fraction, encoding: str) -> tuple[PauliSum, PauliSum, PauliSum]:
    if encoding == DIRECT:
        return tuple(PauliSum.single(1, 0, a, 0.5) for a in "XYZ")
    qubits = SpinSite(spin, encoding).qubit_count
    return tuple(pauli_decompose(m).real() for m in _local_spin_matrices(spin, qubits))


def site_spin_operators(site: SpinSite, n_qubits: int | None = None) -> tuple[PauliSum, PauliSum, PauliSum]:
    """(Sx, Sy, Sz) of one site, embedded in an ``n_qubits`` register."""
    n_qubits = n_qubits or site.qubit_offset + site.qubit_count
    return tuple(op.embed(n_qubits, site.qubit_offset) for op in _local_spin_paulis(site.spin, site.encoding))


def site_operators(reg: SpinRegister) -> list[tuple[PauliSum, PauliSum, PauliSum]]:
    return [site_spin_operators(site, reg.n_qubits) for site in reg.sites]


def dot(a: Sequence[PauliSum], b: Sequence[PauliSum]) -> PauliSum:
    return total((p * q for p, q in zip(a, b)), a[0].n_qubits)


def total_spin_operators(reg: SpinRegister) -> tuple[PauliSum, PauliSum, PauliSum, PauliSum]:
    ops = site_operators(reg)
    n = reg.n_qubits
    sx, sy, sz = (total((o[mu] for o in ops), n) for mu in range(3))
    s2 = dot((sx, sy, sz), (sx, sy, sz))
    return sx, sy, sz, s2


def heisenberg_ring(n: int, J) -> PauliSum:
    """(1/2) sum_i J_i sigma_i . sigma_{i+1} with periodic closure."""
    if n < 2:
        raise ConfigurationError("ring needs at least two sites")
    J = [float(J)] * n if np.isscalar(J) else [float(j) for j in J]
    if len(J) != n:
        raise ConfigurationError(f"expected {n} couplings, got {len(J)}")
    terms = []
    for i in range(n):
        j = (i + 1) % n
        for a in "XYZ":
            terms.append(PauliSum.single(n, i, a, 0.5 * J[i]) * PauliSum.single(n, j, a))
    return total(terms, n)


MN_SPINS = (Fraction(5, 2), Fraction(5, 2), Fraction(2))
MN_COUPLINGS = (-1.0, -50.0, -50.0)  # J01 (II-II), J12 and J20 (II-III), cm^-1


def mn_trimer(J01: float = MN_COUPLINGS[0], J12: float = MN_COUPLINGS[1], J20: float = MN_COUPLINGS[2],
              spins=MN_SPINS, energy_scale: float = 1.0) -> tuple[PauliSum, SpinRegister]:
    """-2 J01 S0.S1 - 2 J12 S1.S2 - 2 J20 S2.S0 on binary-encoded sites.

    ``energy_scale`` multiplies the couplings (unit conversion hook).
    """
    reg = SpinRegister.from_spins(spins, encoding=BINARY)
    s0, s1, s2 = site_operators(reg)
    bonds = ((J01, s0, s1), (J12, s1, s2), (J20, s2, s0))
    H = total((dot(a, b) * (-2.0 * J * energy_scale) for J, a, b in bonds), reg.n_qubits)
    return H, reg


def basis_index(reg: SpinRegister, labels) -> int:
    """Basis index from per-site labels.

    ``labels`` is either one bit string for an all-direct register (character
    ``i`` is site ``i``) or a per-site sequence whose entries are bit strings
    (most significant bit first) or S_z values.
    """
    if isinstance(labels, str):
        if not reg.all_direct:
            raise ConfigurationError("single bit string labels need an all-direct register")
        labels = list(labels)
    if len(labels) != reg.n_sites:
        raise ConfigurationError(f"expected {reg.n_sites} site labels, got {len(labels)}")
    index = 0
    for site, label in zip(reg.sites, labels):
        if isinstance(label, str) and set(label) <= {"0", "1"} and label:
            if len(label) != site.qubit_count:
                raise ConfigurationError(f"label {label!r} has wrong width for site {site}")
            code = int(label, 2)
        else:
            code = site.code_of(label)
        if code >= site.levels:
            raise ConfigurationError(f"label {label!r} is an unphysical code for s={site.spin}")
        index |= code << site.qubit_offset
    return index


def basis_state(reg: SpinRegister, labels) -> StateVector:
    return StateVector.basis(reg.n_qubits, basis_index(reg, labels))


def sz_balanced_labels(n: int, s_z) -> str:
    """Spin-1/2 basis label with the given S_z: up spins first.

    For n = 6 this is the |0...01...1> start state of the ring PITE runs.
    """
    downs = Fraction(n, 2) - as_half_integer(s_z)
    if downs.denominator != 1 or not 0 <= downs <= n:
        raise ConfigurationError(f"S_z={s_z} impossible for {n} spin-1/2 sites")
    return "0" * (n - int(downs)) + "1" * int(downs)


# Mn trimer start states (site codes, MSB first) keyed by target s*; chosen so
# that the total S_z equals s*.
MN_INITIAL_LABELS = {
    2: ("000", "001", "100"),
    3: ("000", "000", "100"),
    4: ("000", "000", "011"),
}
