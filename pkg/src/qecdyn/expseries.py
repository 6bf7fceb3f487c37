"""Exact exponential sums sum_i b_i e^(-a_i tau) and careful evaluation.

The rates a_i are positive integers and the weights b_i arbitrary-precision
rationals.  At deep concatenation levels the |b_i| exceed 1e60 while the sum
stays in [0, 1], so evaluation pads the working precision to survive the
cancellation and verifies the result with interval arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

__all__ = ["ExpSeries", "PrecisionError"]


class PrecisionError(ArithmeticError):
    """Raised when the requested precision cannot certify the result."""


@dataclass(frozen=True)
class ExpSeries:
    """Immutable exponential sum with strictly increasing integer rates."""

    terms: tuple[tuple[int, Fraction], ...]

    def __post_init__(self) -> None:
        for a, b in self.terms:
            if a <= 0:
                raise ValueError("rates must be positive integers")
            if b == 0:
                raise ValueError("zero coefficients must be collected out")
        rates = [a for a, _ in self.terms]
        if rates != sorted(set(rates)):
            raise ValueError("rates must be strictly increasing")

    @classmethod
    def from_terms(cls, pairs: Iterable[tuple[int, Fraction | int]]) -> "ExpSeries":
        acc: dict[int, Fraction] = {}
        for a, b in pairs:
            acc[a] = acc.get(a, Fraction(0)) + Fraction(b)
        return cls(tuple(sorted((a, b) for a, b in acc.items() if b != 0)))

    @classmethod
    def exponential(cls, rate: int = 1) -> "ExpSeries":
        """The single term e^(-rate * tau)."""
        return cls(((rate, Fraction(1)),))

    @classmethod
    def zero(cls) -> "ExpSeries":
        return cls(())

    def term_count(self) -> int:
        return len(self.terms)

    def coefficient_census(self, threshold: float) -> int:
        """Number of terms with |b_i| > threshold."""
        t = Fraction(threshold)
        return sum(1 for _, b in self.terms if abs(b) > t)

    def sum_b(self) -> Fraction:
        """Exact value at tau = 0."""
        return sum((b for _, b in self.terms), Fraction(0))

    def add(self, other: "ExpSeries") -> "ExpSeries":
        return ExpSeries.from_terms(list(self.terms) + list(other.terms))

    def __add__(self, other: "ExpSeries") -> "ExpSeries":
        return self.add(other)

    def scale(self, alpha: Fraction | int) -> "ExpSeries":
        a = Fraction(alpha)
        if a == 0:
            return ExpSeries.zero()
        return ExpSeries(tuple((r, a * b) for r, b in self.terms))

    def multiply(self, other: "ExpSeries") -> "ExpSeries":
        # Convolve over common denominators with plain integer arithmetic;
        # per-product Fraction normalization (gcd of huge integers) dominates
        # the cost at deep levels otherwise.
        d1 = math.lcm(*(b.denominator for _, b in self.terms)) if self.terms else 1
        d2 = math.lcm(*(b.denominator for _, b in other.terms)) if other.terms else 1
        n1 = [(a, b.numerator * (d1 // b.denominator)) for a, b in self.terms]
        n2 = [(a, b.numerator * (d2 // b.denominator)) for a, b in other.terms]
        acc: dict[int, int] = {}
        for a1, b1 in n1:
            for a2, b2 in n2:
                a = a1 + a2
                acc[a] = acc.get(a, 0) + b1 * b2
        den = d1 * d2
        return ExpSeries(tuple(sorted((a, Fraction(b, den)) for a, b in acc.items() if b != 0)))

    def __mul__(self, other: "ExpSeries") -> "ExpSeries":
        return self.multiply(other)

    def power(self, k: int) -> "ExpSeries":
        """k-th pointwise power, by binary exponentiation (exact)."""
        if k < 0:
            raise ValueError("negative powers are not exponential sums")
        if k == 0:
            raise ValueError("the constant 1 is not representable (no zero rate)")
        result: "ExpSeries" | None = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        assert result is not None
        return result

    def default_precision(self) -> int:
        """Working mantissa bits: 64 plus the cancellation scale of the b_i."""
        if not self.terms:
            return 64
        extra = max(b.numerator.bit_length() - b.denominator.bit_length() for _, b in self.terms)
        return 64 + max(extra, 0)

    def evaluate(self, tau: float, precision: int | None = None, tol: float = 1e-12) -> float:
        """Evaluate at tau >= 0 with certified accuracy.

        Runs in interval arithmetic at ``precision`` bits (default padded for
        the coefficient magnitudes); raises PrecisionError if the enclosing
        interval is wider than ``tol``.
        """
        if tau < 0:
            raise ValueError("tau must be nonnegative")
        if not self.terms:
            return 0.0
        bits = precision if precision is not None else self.default_precision()
        iv = mpmath.iv
        old = iv.prec
        try:
            iv.prec = bits
            t = iv.mpf(repr(float(tau)))
            u = iv.exp(-t)
            total = iv.mpf(0)
            for a, b in self.terms:
                total += (iv.mpf(b.numerator) / iv.mpf(b.denominator)) * (u ** a)
            width = float(mpmath.mpf(total.delta))
            if width > tol:
                raise PrecisionError(
                    f"interval width {width:.3e} exceeds {tol:.1e} at {bits} bits; "
                    "increase the precision"
                )
            return float(mpmath.mpf(total.mid))
        finally:
            iv.prec = old

    def evaluate_grid(self, taus: Sequence[float], precision: int | None = None, tol: float = 1e-12) -> list[float]:
        return [self.evaluate(t, precision=precision, tol=tol) for t in taus]

    def evaluate_float(self, tau: float) -> float:
        """Plain double-precision evaluation; unreliable for deep levels."""
        return math.fsum(float(b) * math.exp(-a * tau) for a, b in self.terms)

    def to_json(self) -> list[dict[str, object]]:
        """Digit-preserving serialization: [{a, num, den}, ...]."""
        return [{"a": a, "num": str(b.numerator), "den": str(b.denominator)} for a, b in self.terms]

    @classmethod
    def from_json(cls, data: list[dict[str, object]]) -> "ExpSeries":
        return cls.from_terms(
            (int(item["a"]), Fraction(int(str(item["num"])), int(str(item["den"])))) for item in data
        )
