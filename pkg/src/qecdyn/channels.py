"""Logical-qubit effective channels in the Pauli transfer representation.

A single-qubit channel is the 4x4 real matrix G with G[s, s'] = tr(s E[s'/2]),
rows and columns ordered (I, X, Y, Z).  The effective channel of an encoded
qubit contracts the decoding operators against the channel image of the
encoding operators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .codes import SIGMAS, StabilizerCode, decoding_ops, encoding_ops, recovery_table
from .pauli import LETTERS

__all__ = [
    "QubitChannel",
    "DiagonalChannel",
    "ProductRegisterChannel",
    "LogicalState",
    "depolarizing",
    "pauli_error",
    "effective_channel",
    "alpha_beta",
    "is_completely_positive",
    "fidelity",
]

_IDX = {c: i for i, c in enumerate(LETTERS)}

# Single-qubit Pauli matrices, for Choi-matrix construction.
_PAULI_MATS = [
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


@dataclass(frozen=True)
class QubitChannel:
    """4x4 real Pauli transfer matrix of a single (logical) qubit."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise ValueError("channel matrix must be 4x4")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "QubitChannel":
        return cls(np.eye(4))

    @classmethod
    def diagonal(cls, x: float, y: float, z: float) -> "QubitChannel":
        return cls(np.diag([1.0, x, y, z]))

    def is_trace_preserving(self, tol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix[0], [1, 0, 0, 0], atol=tol))

    def is_diagonal(self, tol: float = 1e-12) -> bool:
        off = self.matrix - np.diag(np.diag(self.matrix))
        return bool(np.max(np.abs(off)) <= tol) and abs(self.matrix[0, 0] - 1) <= tol

    def apply(self, state: "LogicalState") -> "LogicalState":
        return LogicalState(tuple(self.matrix @ np.asarray(state.vector)))

    def to_json(self) -> list[list[float]]:
        return [[float(v) for v in row] for row in self.matrix]

    @classmethod
    def from_json(cls, rows: list[list[float]]) -> "QubitChannel":
        return cls(np.array(rows, dtype=float))


@dataclass(frozen=True)
class DiagonalChannel:
    """Diagonal channel G = diag(1, x, y, z), written [x, y, z]."""

    x: float
    y: float
    z: float

    def as_channel(self) -> QubitChannel:
        return QubitChannel.diagonal(self.x, self.y, self.z)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def to_json(self) -> list[float]:
        return [float(self.x), float(self.y), float(self.z)]


@dataclass(frozen=True)
class ProductRegisterChannel:
    """Uncorrelated register dynamics E_1 x ... x E_n, one factor per qubit."""

    factors: tuple[QubitChannel, ...]

    @classmethod
    def uniform(cls, factor: QubitChannel, n: int) -> "ProductRegisterChannel":
        return cls((factor,) * n)

    @property
    def n(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class LogicalState:
    """Expectation-value vector (<I>, <X>, <Y>, <Z>) with <I> = 1."""

    vector: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        v = tuple(float(c) for c in self.vector)
        if abs(v[0] - 1.0) > 1e-12:
            raise ValueError("<I> must be 1")
        if v[1] ** 2 + v[2] ** 2 + v[3] ** 2 > 1 + 1e-9:
            raise ValueError("Bloch vector has norm > 1")
        object.__setattr__(self, "vector", v)

    def bloch_norm(self) -> float:
        return math.sqrt(sum(c * c for c in self.vector[1:]))


def depolarizing(tau: float) -> DiagonalChannel:
    """Depolarizing channel at dimensionless time tau: [e^-tau, e^-tau, e^-tau]."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    u = math.exp(-tau)
    return DiagonalChannel(u, u, u)


def pauli_error(p: float, strict: bool = False) -> DiagonalChannel:
    """Random single-qubit Pauli error with probability p: [1-4p/3]^3.

    Outside 0 <= p <= 3/4 the channel is not completely positive; with
    ``strict`` such p raises, otherwise the channel is still returned.
    """
    if strict and not 0 <= p <= 0.75:
        raise ValueError("p outside [0, 3/4] gives a non-CP channel")
    u = 1 - 4 * p / 3
    return DiagonalChannel(u, u, u)


def alpha_beta(code: StabilizerCode) -> tuple[dict[str, dict[str, Fraction]], dict[str, dict[str, Fraction]]]:
    """Pauli-basis coefficient tables of the encoding and decoding operators.

    alpha[sigma] maps a Pauli letter string to the coefficient of the
    normalized product (mu_1/2) x ... x (mu_n/2) in E_sigma, i.e. 2^n times
    the raw expansion coefficient; beta[sigma] holds the raw coefficients of
    D_sigma.  All values are exact rationals.
    """
    table = recovery_table(code)
    enc = encoding_ops(code)
    dec = decoding_ops(code, table)
    scale = Fraction(2) ** code.n
    alpha = {s: {k: scale * v for k, v in enc[s].terms.items()} for s in SIGMAS}
    beta = {s: dict(dec[s].terms) for s in SIGMAS}
    return alpha, beta


def contract_channel(
    alpha: dict[str, dict[str, Fraction]],
    beta: dict[str, dict[str, Fraction]],
    factors: list[np.ndarray],
) -> QubitChannel:
    """Contract alpha/beta tables against per-qubit transfer matrices.

    Computes G~[s, s'] = sum over (nu, mu) string pairs of
    beta^s_nu alpha^s'_mu prod_j factors[j][nu_j, mu_j].
    """
    n = len(factors)
    out = np.zeros((4, 4))
    cache: dict[str, tuple[np.ndarray, np.ndarray]] = {}

    def arrays(table: dict[str, Fraction], tag: str) -> tuple[np.ndarray, np.ndarray]:
        if tag not in cache:
            keys = sorted(table)
            idx = np.array([[_IDX[c] for c in k] for k in keys], dtype=np.intp).reshape(len(keys), n)
            coeff = np.array([float(table[k]) for k in keys])
            cache[tag] = (idx, coeff)
        return cache[tag]

    for si, s in enumerate(SIGMAS):
        bidx, bc = arrays(beta[s], "b" + s)
        if bc.size == 0:
            continue
        for sj, sp in enumerate(SIGMAS):
            aidx, ac = arrays(alpha[sp], "a" + sp)
            if ac.size == 0:
                continue
            prod = np.ones((bc.size, ac.size))
            for j in range(n):
                prod *= factors[j][np.ix_(bidx[:, j], aidx[:, j])]
            out[si, sj] = bc @ prod @ ac
    return QubitChannel(out)


def effective_channel(code: StabilizerCode, dynamics: ProductRegisterChannel) -> QubitChannel:
    """Effective channel of the logical qubit: G[s, s'] = tr(D_s E[E_s'])."""
    if dynamics.n != code.n:
        raise ValueError(f"dynamics has {dynamics.n} factors, code has {code.n} qubits")
    alpha, beta = alpha_beta(code)
    return contract_channel(alpha, beta, [f.matrix for f in dynamics.factors])


def is_completely_positive(G: QubitChannel, tol: float = 1e-10) -> tuple[bool, float]:
    """Whether the channel is completely positive, plus the CP margin.

    For diagonal channels the margin is the smallest of the four Pauli-twirl
    probabilities (1 +/- x +/- y +/- z)/4; otherwise it is the minimum
    eigenvalue of the Choi matrix.  CP means margin >= -tol.
    """
    m = G.matrix
    if G.is_diagonal():
        x, y, z = m[1, 1], m[2, 2], m[3, 3]
        margin = min(
            (1 + x + y + z) / 4,
            (1 + x - y - z) / 4,
            (1 - x + y - z) / 4,
            (1 - x - y + z) / 4,
        )
    else:
        choi = np.zeros((4, 4), dtype=complex)
        for i in range(4):
            for j in range(4):
                choi += m[i, j] * np.kron(_PAULI_MATS[i], _PAULI_MATS[j].T) / 4
        margin = float(np.min(np.linalg.eigvalsh(choi)))
    return margin >= -tol, float(margin)


def fidelity(state: LogicalState, G: QubitChannel) -> float:
    """Fidelity (1/2) rho^T G rho of a pure logical state under the channel."""
    if abs(state.bloch_norm() - 1.0) > 1e-9:
        raise ValueError("fidelity formula requires a pure state")
    v = np.asarray(state.vector)
    return float(v @ G.matrix @ v) / 2
