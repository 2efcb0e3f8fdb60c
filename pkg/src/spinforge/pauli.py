"""
Symbolic Pauli-string algebra.

A Pauli string on ``n`` qubits is stored as a pair of bit masks ``(x, z)``:
bit ``q`` of ``x`` (``z``) is set when the letter on qubit ``q`` has an X (Z)
component, with Y carrying both.  The operator is

    P(x, z) = i^{|x & z|} X^x Z^z

so that every string is Hermitian and phase-free.  Letters are written with
qubit 0 first, i.e. ``"XIZ"`` is X on qubit 0 and Z on qubit 2.  Basis-state
indices follow the same convention: qubit ``q`` is bit ``q`` of the index.

PauliSum keeps its terms in canonical form at all times: coefficients with
modulus below ``PRUNE_TOL`` are dropped and iteration order is lexicographic
over the letter strings (``I < X < Y < Z``).
"""
from __future__ import annotations

import os
from functools import cached_property
from numbers import Number
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import DimensionError, ResourceError

PRUNE_TOL = 1e-12
DEFAULT_DENSE_LIMIT = 12

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_I_POW = (1, 1j, -1, -1j)


def dense_limit() -> int:
    """Qubit limit for dense oracles; ``SPINFORGE_DENSE_LIMIT`` overrides."""
    value = os.environ.get("SPINFORGE_DENSE_LIMIT")
    return int(value) if value else DEFAULT_DENSE_LIMIT


def check_dense(n_qubits: int) -> None:
    limit = dense_limit()
    if n_qubits > limit:
        raise ResourceError(f"{n_qubits} qubits exceeds dense limit {limit}")


def _popcount(v: int) -> int:
    return bin(v).count("1")


class PauliString:
    """Phase-free tensor product of I, X, Y, Z."""

    __slots__ = ("n_qubits", "x", "z", "_letters")

    def __init__(self, letters: str):
        letters = letters.upper()
        if not letters or any(c not in _LETTER_BITS for c in letters):
            raise ValueError(f"invalid Pauli letters {letters!r}")
        x = z = 0
        for q, c in enumerate(letters):
            bx, bz = _LETTER_BITS[c]
            x |= bx << q
            z |= bz << q
        self.n_qubits = len(letters)
        self.x, self.z = x, z
        self._letters = letters

    @classmethod
    def from_masks(cls, n_qubits: int, x: int, z: int) -> "PauliString":
        obj = object.__new__(cls)
        obj.n_qubits, obj.x, obj.z = n_qubits, x, z
        obj._letters = None
        return obj

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls.from_masks(n_qubits, 0, 0)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, letter: str) -> "PauliString":
        bx, bz = _LETTER_BITS[letter.upper()]
        return cls.from_masks(n_qubits, bx << qubit, bz << qubit)

    @property
    def letters(self) -> str:
        if self._letters is None:
            self._letters = "".join(
                _BITS_LETTER[((self.x >> q) & 1, (self.z >> q) & 1)]
                for q in range(self.n_qubits)
            )
        return self._letters

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def support(self) -> int:
        """Bit mask of qubits acted on non-trivially."""
        return self.x | self.z

    def is_identity(self) -> bool:
        return not (self.x or self.z)

    def __eq__(self, other):
        if not isinstance(other, PauliString):
            return NotImplemented
        return (self.n_qubits, self.x, self.z) == (other.n_qubits, other.x, other.z)

    def __hash__(self):
        return hash((self.n_qubits, self.x, self.z))

    def __lt__(self, other: "PauliString") -> bool:
        return self.letters < other.letters

    def __repr__(self):
        return f"PauliString({self.letters!r})"

    def __str__(self):
        return self.letters

    def to_dense(self) -> np.ndarray:
        return PauliSum({self: 1.0}, self.n_qubits).to_dense()


def _mul_masks(x1: int, z1: int, x2: int, z2: int) -> tuple[int, int, int]:
    """Return (i-exponent mod 4, x, z) of the product P1 P2."""
    x, z = x1 ^ x2, z1 ^ z2
    k = _popcount(x1 & z1) + _popcount(x2 & z2) + 2 * _popcount(z1 & x2) - _popcount(x & z)
    return k % 4, x, z


def pauli_mul(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Product ``a·b`` as ``(phase, string)`` with phase in {1, i, -1, -i}."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    k, x, z = _mul_masks(a.x, a.z, b.x, b.z)
    return _I_POW[k], PauliString.from_masks(a.n_qubits, x, z)


class PauliSum:
    """Immutable linear combination of Pauli strings in canonical form."""

    __slots__ = ("n_qubits", "_terms", "__dict__")

    def __init__(self, terms: Mapping[PauliString | str, complex] | None = None, n_qubits: int | None = None):
        raw: dict[tuple[int, int], complex] = {}
        for key, coeff in (terms or {}).items():
            p = PauliString(key) if isinstance(key, str) else key
            if n_qubits is None:
                n_qubits = p.n_qubits
            elif p.n_qubits != n_qubits:
                raise DimensionError(f"term {p} does not act on {n_qubits} qubits")
            raw[(p.x, p.z)] = raw.get((p.x, p.z), 0.0) + complex(coeff)
        if n_qubits is None or n_qubits < 1:
            raise ValueError("PauliSum needs a positive qubit count")
        self.n_qubits = n_qubits
        self._terms = _prune(raw)

    @classmethod
    def _from_raw(cls, n_qubits: int, raw: dict) -> "PauliSum":
        obj = object.__new__(cls)
        obj.n_qubits = n_qubits
        obj._terms = _prune(raw)
        return obj

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls._from_raw(n_qubits, {})

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliSum":
        return cls._from_raw(n_qubits, {(0, 0): complex(coeff)})

    @classmethod
    def single(cls, n_qubits: int, qubit: int, letter: str, coeff: complex = 1.0) -> "PauliSum":
        p = PauliString.single(n_qubits, qubit, letter)
        return cls._from_raw(n_qubits, {(p.x, p.z): complex(coeff)})

    # -- views -------------------------------------------------------------

    @cached_property
    def _sorted(self) -> list[tuple[PauliString, complex]]:
        items = [(PauliString.from_masks(self.n_qubits, x, z), c) for (x, z), c in self._terms.items()]
        items.sort(key=lambda item: item[0].letters)
        return items

    @property
    def terms(self) -> dict[PauliString, complex]:
        return dict(self._sorted)

    def items(self) -> Iterator[tuple[PauliString, complex]]:
        return iter(self._sorted)

    def __iter__(self):
        return iter(p for p, _ in self._sorted)

    def __len__(self):
        return len(self._terms)

    def coeff(self, key: PauliString | str) -> complex:
        p = PauliString(key) if isinstance(key, str) else key
        return self._terms.get((p.x, p.z), 0.0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_hermitian(self, tol: float = PRUNE_TOL) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    # -- algebra -----------------------------------------------------------

    def _check(self, other: "PauliSum") -> None:
        if self.n_qubits != other.n_qubits:
            raise DimensionError(f"qubit counts differ: {self.n_qubits} vs {other.n_qubits}")

    def __add__(self, other):
        if isinstance(other, Number):
            other = PauliSum.identity(self.n_qubits, other)
        if not isinstance(other, PauliSum):
            return NotImplemented
        return sum_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        if isinstance(other, Number):
            other = PauliSum.identity(self.n_qubits, other)
        return sum_add(self, -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return self.scale(other)
        if not isinstance(other, PauliSum):
            return NotImplemented
        return sum_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        return self.scale(1.0 / other)

    def scale(self, factor: complex) -> "PauliSum":
        return PauliSum._from_raw(self.n_qubits, {k: c * factor for k, c in self._terms.items()})

    def adjoint(self) -> "PauliSum":
        return PauliSum._from_raw(self.n_qubits, {k: c.conjugate() for k, c in self._terms.items()})

    def real(self) -> "PauliSum":
        """Drop imaginary parts of coefficients (Hermitian part up to residue)."""
        return PauliSum._from_raw(self.n_qubits, {k: complex(c.real) for k, c in self._terms.items()})

    def embed(self, n_qubits: int, offset: int) -> "PauliSum":
        """Shift this operator onto qubits ``offset..`` of a larger register."""
        if offset < 0 or offset + self.n_qubits > n_qubits:
            raise DimensionError("embedding out of range")
        return PauliSum._from_raw(
            n_qubits, {(x << offset, z << offset): c for (x, z), c in self._terms.items()}
        )

    def allclose(self, other: "PauliSum", atol: float = 1e-12) -> bool:
        self._check(other)
        return (self - other).max_abs_coeff() <= atol

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"({c:.6g})*{p.letters}" for p, c in self._sorted[:6])
        more = f" + ... [{len(self)} terms]" if len(self) > 6 else ""
        return f"PauliSum({body or '0'}{more})"

    # -- realization -------------------------------------------------------

    def to_dense(self) -> np.ndarray:
        check_dense(self.n_qubits)
        dim = 1 << self.n_qubits
        idx = np.arange(dim)
        mat = np.zeros((dim, dim), dtype=complex)
        for (x, z), c in self._terms.items():
            mat[idx ^ x, idx] += c * _I_POW[_popcount(x & z) % 4] * _signs(z, idx)
        return mat

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Matrix-free action on an amplitude vector."""
        if psi.shape[0] != 1 << self.n_qubits:
            raise DimensionError("state dimension does not match operator")
        out = np.zeros_like(psi, dtype=complex)
        for (x, z), c in self._terms.items():
            out += c * apply_pauli_masks(psi, x, z)
        return out

    def to_text(self) -> str:
        return "".join(f"{c.real!r} {c.imag!r} {p.letters}\n" for p, c in self._sorted)

    @classmethod
    def from_text(cls, text: str) -> "PauliSum":
        terms: dict[PauliString, complex] = {}
        n = None
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            re_s, im_s, letters = line.split()
            p = PauliString(letters)
            n = p.n_qubits
            terms[p] = terms.get(p, 0.0) + complex(float(re_s), float(im_s))
        if n is None:
            raise ValueError("empty Pauli dump; qubit count unknown")
        return cls(terms, n)


def _prune(raw: dict) -> dict:
    return {k: c for k, c in raw.items() if abs(c) > PRUNE_TOL}


def _signs(z: int, idx: np.ndarray) -> np.ndarray:
    return 1 - 2 * (np.bitwise_count(idx & z) & 1).astype(np.int8)


def apply_pauli_masks(psi: np.ndarray, x: int, z: int) -> np.ndarray:
    """(P psi) for the string with masks (x, z); O(2^n) via index permutation."""
    idx = np.arange(psi.shape[0])
    src = idx ^ x
    phase = _I_POW[_popcount(x & z) % 4]
    if z:
        return phase * _signs(z, src) * psi[src]
    return phase * psi[src]


def sum_add(a: PauliSum, b: PauliSum) -> PauliSum:
    a._check(b)
    raw = dict(a._terms)
    for k, c in b._terms.items():
        raw[k] = raw.get(k, 0.0) + c
    return PauliSum._from_raw(a.n_qubits, raw)


def sum_mul(a: PauliSum, b: PauliSum) -> PauliSum:
    a._check(b)
    raw: dict[tuple[int, int], complex] = {}
    b_items = list(b._terms.items())
    for (x1, z1), c1 in a._terms.items():
        for (x2, z2), c2 in b_items:
            k, x, z = _mul_masks(x1, z1, x2, z2)
            key = (x, z)
            raw[key] = raw.get(key, 0.0) + _I_POW[k] * c1 * c2
    return PauliSum._from_raw(a.n_qubits, raw)


def term_count(a: PauliSum) -> int:
    return len(a)


def to_dense(a: PauliSum) -> np.ndarray:
    return a.to_dense()


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    return a * b - b * a


def total(ops: Iterable[PauliSum], n_qubits: int) -> PauliSum:
    """Sum an iterable of PauliSums in one pass."""
    raw: dict = {}
    for op in ops:
        if op.n_qubits != n_qubits:
            raise DimensionError("qubit counts differ")
        for k, c in op._terms.items():
            raw[k] = raw.get(k, 0.0) + c
    return PauliSum._from_raw(n_qubits, raw)


def pauli_decompose(matrix: np.ndarray) -> PauliSum:
    """Expand a 2^m x 2^m matrix in Pauli strings via trace inner products."""
    dim = matrix.shape[0]
    n = dim.bit_length() - 1
    if matrix.shape != (dim, dim) or dim != 1 << n or n < 1:
        raise DimensionError("matrix must be square with power-of-two size >= 2")
    idx = np.arange(dim)
    raw = {}
    for x in range(dim):
        # entries M[b ^ x, b]; coefficient = Tr(P^dag M) / dim
        col = matrix[idx ^ x, idx]
        for z in range(dim):
            phase = _I_POW[_popcount(x & z) % 4]
            c = np.conj(phase) * np.sum(_signs(z, idx) * col) / dim
            if abs(c) > PRUNE_TOL:
                raw[(x, z)] = complex(c)
    return PauliSum._from_raw(n, raw)
