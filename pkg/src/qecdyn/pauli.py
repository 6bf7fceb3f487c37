"""Exact arithmetic on phased n-qubit Pauli operators and rational sums of them.

A Pauli string is stored in symplectic form: bit vectors ``x`` and ``z`` of
length n, where site j carries I, X, Z or Y for (x_j, z_j) = (0,0), (1,0),
(0,1), (1,1).  The (1,1) site denotes the genuine Pauli matrix Y (so the
convention Y = iXZ is folded into the phase bookkeeping).  The global phase
is a power of i, i.e. one of {+1, +i, -1, -i}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

__all__ = ["PauliOperator", "OperatorSum", "LETTERS"]

LETTERS = "IXYZ"

_LETTER_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_LETTER = {v: k for k, v in _LETTER_TO_BITS.items()}

# Phase (as a power of i) picked up when multiplying two single-site
# letters: letter(a) * letter(b) = i^k * letter(a XOR b).
_SITE_PHASE = {
    ("I", "I"): 0, ("I", "X"): 0, ("I", "Y"): 0, ("I", "Z"): 0,
    ("X", "I"): 0, ("X", "X"): 0, ("X", "Y"): 1, ("X", "Z"): 3,
    ("Y", "I"): 0, ("Y", "X"): 3, ("Y", "Y"): 0, ("Y", "Z"): 1,
    ("Z", "I"): 0, ("Z", "X"): 1, ("Z", "Y"): 3, ("Z", "Z"): 0,
}

_PHASE_VALUE = {0: 1, 1: 1j, 2: -1, 3: -1j}
_PHASE_PREFIX = {0: "", 1: "+i", 2: "-", 3: "-i"}
_PREFIX_PHASE = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}


@dataclass(frozen=True)
class PauliOperator:
    """A phased Pauli string on n qubits.

    Attributes
    ----------
    n : int
        Number of qubits.
    x, z : tuple[int, ...]
        Symplectic bit vectors, qubit 0 first.
    phase : int
        Power of i in {0, 1, 2, 3}; the operator is i**phase times the
        unphased string.
    """

    n: int
    x: tuple[int, ...]
    z: tuple[int, ...]
    phase: int = 0

    def __post_init__(self) -> None:
        if len(self.x) != self.n or len(self.z) != self.n:
            raise ValueError("x and z bit vectors must have length n")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_string(cls, s: str) -> "PauliOperator":
        """Parse text like ``"XYZII"`` with optional phase prefix (+, -, +i, -i)."""
        prefix = ""
        body = s
        for p in ("+i", "-i", "+", "-"):
            if s.startswith(p):
                prefix, body = p, s[len(p):]
                break
        bits = [_LETTER_TO_BITS[c] for c in body.upper()]
        x = tuple(b[0] for b in bits)
        z = tuple(b[1] for b in bits)
        return cls(len(bits), x, z, _PREFIX_PHASE[prefix])

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n, (0,) * n, (0,) * n, 0)

    def letters(self) -> str:
        """Unphased letter string, e.g. ``"XYZ"``."""
        return "".join(_BITS_TO_LETTER[xz] for xz in zip(self.x, self.z))

    def __str__(self) -> str:
        return _PHASE_PREFIX[self.phase] + self.letters()

    @property
    def phase_value(self) -> complex:
        return _PHASE_VALUE[self.phase]

    def weight(self) -> int:
        """Number of non-identity sites."""
        return sum(1 for xb, zb in zip(self.x, self.z) if xb or zb)

    def sigma_weight(self, sigma: str) -> int:
        """Count of tensor factors equal to ``sigma`` (one of X, Y, Z); phase ignored."""
        target = _LETTER_TO_BITS[sigma]
        return sum(1 for xz in zip(self.x, self.z) if xz == target)

    def multiply(self, other: "PauliOperator") -> "PauliOperator":
        """Exact operator product self * other."""
        if self.n != other.n:
            raise ValueError(f"size mismatch: {self.n} vs {other.n}")
        k = self.phase + other.phase
        a, b = self.letters(), other.letters()
        for ca, cb in zip(a, b):
            k += _SITE_PHASE[(ca, cb)]
        x = tuple(p ^ q for p, q in zip(self.x, other.x))
        z = tuple(p ^ q for p, q in zip(self.z, other.z))
        return PauliOperator(self.n, x, z, k % 4)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return self.multiply(other)

    def eta(self, other: "PauliOperator") -> int:
        """+1 if the operators commute, -1 if they anticommute."""
        if self.n != other.n:
            raise ValueError(f"size mismatch: {self.n} vs {other.n}")
        acc = 0
        for xa, za, xb, zb in zip(self.x, self.z, other.x, other.z):
            acc ^= (xa & zb) ^ (za & xb)
        return -1 if acc else 1

    def commutes_with(self, other: "PauliOperator") -> bool:
        return self.eta(other) == 1


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    return p.multiply(q)


def eta(p: PauliOperator, q: PauliOperator) -> int:
    return p.eta(q)


def sigma_weight(p: PauliOperator, sigma: str) -> int:
    return p.sigma_weight(sigma)


@dataclass(frozen=True)
class OperatorSum:
    """Rational linear combination of unphased Pauli strings on n qubits.

    Phases of contributing operators are folded into the coefficients; a
    contribution with imaginary phase (i or -i) is rejected, since every
    operator this package constructs (projectors, E and D operators) is
    Hermitian with real rational expansion coefficients.

    Zero coefficients are never stored.
    """

    n: int
    terms: dict[str, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cleaned = {k: Fraction(v) for k, v in self.terms.items() if v != 0}
        object.__setattr__(self, "terms", cleaned)

    @classmethod
    def zero(cls, n: int) -> "OperatorSum":
        return cls(n, {})

    @classmethod
    def from_operator(cls, p: PauliOperator, coeff: Fraction | int = 1) -> "OperatorSum":
        c = Fraction(coeff) * _real_phase(p)
        return cls(p.n, {p.letters(): c})

    def coefficient(self, key: str) -> Fraction:
        return self.terms.get(key, Fraction(0))

    def __len__(self) -> int:
        return len(self.terms)

    def items(self) -> Iterator[tuple[str, Fraction]]:
        return iter(sorted(self.terms.items()))

    def add(self, other: "OperatorSum") -> "OperatorSum":
        if self.n != other.n:
            raise ValueError(f"size mismatch: {self.n} vs {other.n}")
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return OperatorSum(self.n, out)

    def __add__(self, other: "OperatorSum") -> "OperatorSum":
        return self.add(other)

    def scale(self, alpha: Fraction | int) -> "OperatorSum":
        a = Fraction(alpha)
        return OperatorSum(self.n, {k: a * v for k, v in self.terms.items()})

    def __rmul__(self, alpha: Fraction | int) -> "OperatorSum":
        return self.scale(alpha)

    def tensor(self, other: "OperatorSum") -> "OperatorSum":
        """Concatenate qubit registers."""
        out: dict[str, Fraction] = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                out[ka + kb] = out.get(ka + kb, Fraction(0)) + va * vb
        return OperatorSum(self.n + other.n, out)

    def mul_operator(self, p: PauliOperator) -> "OperatorSum":
        """Right-multiply every term by the Pauli operator ``p``, exactly."""
        if self.n != p.n:
            raise ValueError(f"size mismatch: {self.n} vs {p.n}")
        out: dict[str, Fraction] = {}
        for k, v in self.terms.items():
            prod = PauliOperator.from_string(k).multiply(p)
            key = prod.letters()
            out[key] = out.get(key, Fraction(0)) + v * _real_phase(prod)
        return OperatorSum(self.n, out)

    @classmethod
    def accumulate(cls, n: int, contributions: Iterable[tuple[PauliOperator, Fraction]]) -> "OperatorSum":
        out: dict[str, Fraction] = {}
        for p, c in contributions:
            key = p.letters()
            out[key] = out.get(key, Fraction(0)) + c * _real_phase(p)
        return cls(n, out)


def _real_phase(p: PauliOperator) -> int:
    if p.phase == 0:
        return 1
    if p.phase == 2:
        return -1
    raise ValueError(f"imaginary phase i^{p.phase} cannot be folded into a rational coefficient")
