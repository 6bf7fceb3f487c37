"""State-space realizations (A, B, C) of scalar impulse responses.

A realization represents f(tau) = C e^(A tau) B.  Exponential sums become
diagonal realizations; sums, scalar multiples and pointwise products have
direct constructions (block-diagonal and Kronecker), so any polynomial in
realized functions is again realized.  This is what lets the concatenation
polynomials act directly on reduced models.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .concat import DiagonalPolynomialMap
from .expseries import ExpSeries

__all__ = ["Realization", "from_series", "apply_polynomial"]

_EIG_COND_LIMIT = 1e10


@dataclass(frozen=True)
class Realization:
    """Single-input single-output linear system with impulse response C e^(At) B."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self) -> None:
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.asarray(self.B, dtype=float).reshape(-1)
        C = np.asarray(self.C, dtype=float).reshape(-1)
        n = A.shape[0]
        if A.shape != (n, n) or B.shape != (n,) or C.shape != (n,):
            raise ValueError("A must be n x n with matching n-vectors B and C")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def order(self) -> int:
        return self.A.shape[0]

    def is_diagonal(self) -> bool:
        return bool(np.count_nonzero(self.A - np.diag(np.diag(self.A))) == 0)

    def spectral_abscissa(self) -> float:
        return float(np.max(np.linalg.eigvals(self.A).real))

    def is_stable(self, margin: float = 0.0) -> bool:
        return self.spectral_abscissa() < -margin

    @cached_property
    def _modal(self) -> tuple[np.ndarray, np.ndarray, np.ndarray] | None:
        """(eigenvalues, C V, V^-1 B) when the eigenbasis is well conditioned."""
        if self.is_diagonal():
            lam = np.diag(self.A).astype(complex)
            return lam, self.C.astype(complex), self.B.astype(complex)
        lam, V = np.linalg.eig(self.A)
        if np.linalg.cond(V) > _EIG_COND_LIMIT:
            return None
        return lam, self.C @ V, np.linalg.solve(V, self.B.astype(complex))

    def evaluate(self, tau: float) -> float:
        """Impulse response at tau >= 0."""
        return self.evaluate_grid(np.array([tau]))[0]

    def evaluate_grid(self, taus: np.ndarray) -> np.ndarray:
        """Impulse response on a grid, via eigendecomposition when possible.

        Falls back to the scaling-and-squaring matrix exponential for an
        ill-conditioned eigenbasis; checks that the imaginary residue of the
        modal path is negligible.
        """
        taus = np.asarray(taus, dtype=float)
        if np.any(taus < 0):
            raise ValueError("tau must be nonnegative")
        modal = self._modal
        if modal is not None:
            lam, cv, vb = modal
            vals = np.exp(np.outer(taus, lam)) @ (cv * vb)
            if np.max(np.abs(vals.imag)) > 1e-10 * max(1.0, np.max(np.abs(vals.real))):
                raise ArithmeticError("modal evaluation produced a non-real response")
            return vals.real
        return np.array([float(self.C @ scipy.linalg.expm(self.A * t) @ self.B) for t in taus])

    def frequency_response(self, omegas: np.ndarray) -> np.ndarray:
        """Transfer function H(i omega) = C (i omega I - A)^-1 B."""
        eye = np.eye(self.order)
        return np.array([
            complex(self.C @ np.linalg.solve(1j * w * eye - self.A, self.B + 0j))
            for w in np.asarray(omegas)
        ])

    def product(self, other: "Realization") -> "Realization":
        """Realize the pointwise product of the two impulse responses."""
        A = np.kron(self.A, np.eye(other.order)) + np.kron(np.eye(self.order), other.A)
        return Realization(A, np.kron(self.B, other.B), np.kron(self.C, other.C))

    def add(self, other: "Realization") -> "Realization":
        """Realize the pointwise sum (block-diagonal direct sum)."""
        A = scipy.linalg.block_diag(self.A, other.A)
        return Realization(A, np.concatenate([self.B, other.B]), np.concatenate([self.C, other.C]))

    def scale(self, alpha: float) -> "Realization":
        return Realization(self.A, self.B, float(alpha) * self.C)

    def __mul__(self, other: "Realization") -> "Realization":
        return self.product(other)

    def __add__(self, other: "Realization") -> "Realization":
        return self.add(other)

    def to_json(self) -> dict[str, object]:
        return {
            "A": [[float(v) for v in row] for row in self.A],
            "B": [float(v) for v in self.B],
            "C": [float(v) for v in self.C],
        }

    @classmethod
    def from_json(cls, data: dict[str, object]) -> "Realization":
        return cls(np.array(data["A"], dtype=float),
                   np.array(data["B"], dtype=float),
                   np.array(data["C"], dtype=float))


def from_series(s: ExpSeries) -> Realization:
    """Minimal diagonal realization of an exponential sum.

    A = diag(-a_i), B = (b_i), C = (1, ..., 1); minimal because the rates are
    distinct and the weights nonzero by the series invariants.
    """
    if not s.terms:
        raise ValueError("cannot realize the empty series")
    rates = np.array([a for a, _ in s.terms], dtype=float)
    weights = np.array([float(b) for _, b in s.terms])
    return Realization(np.diag(-rates), weights, np.ones_like(weights))


def apply_polynomial(
    pmap: DiagonalPolynomialMap,
    rx: Realization,
    ry: Realization,
    rz: Realization,
) -> tuple[Realization, Realization, Realization]:
    """Apply a concatenation map to realizations of the three components.

    Each output component is assembled monomial by monomial in graded-lex
    order: repeated products for the powers (left-associated), then scaled
    direct sums.
    """
    inputs = (rx, ry, rz)
    powers: dict[tuple[int, int], Realization] = {}

    def power(var: int, e: int) -> Realization:
        key = (var, e)
        if key not in powers:
            powers[key] = inputs[var] if e == 1 else power(var, e - 1).product(inputs[var])
        return powers[key]

    out = []
    for poly in pmap.components():
        acc: Realization | None = None
        for (ex, ey, ez), coeff in poly.monomials():
            term: Realization | None = None
            for var, e in enumerate((ex, ey, ez)):
                if e:
                    p = power(var, e)
                    term = p if term is None else term.product(p)
            if term is None:
                raise ValueError("constant term cannot be realized")
            term = term.scale(float(coeff))
            acc = term if acc is None else acc.add(term)
        if acc is None:
            raise ValueError("empty polynomial component")
        out.append(acc)
    return out[0], out[1], out[2]
