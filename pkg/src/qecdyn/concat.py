"""The concatenation map on effective channels, in numeric, polynomial and
series-valued forms.

Each matrix element of the concatenated channel is a polynomial in the inner
channel's entries with exact rational coefficients (products of the outer
code's encoding/decoding expansion coefficients).  For diagonal inner
channels the map reduces to three polynomials in (x, y, z).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .channels import DiagonalChannel, QubitChannel, alpha_beta, contract_channel
from .codes import SIGMAS, StabilizerCode, decoding_coefficients, recovery_table
from .expseries import ExpSeries

__all__ = [
    "Polynomial",
    "DiagonalPolynomialMap",
    "ConcatMap",
    "build_concat_map",
    "apply_numeric",
    "diagonal_polynomials",
    "diagonal_polynomials_stabilizer",
    "compose",
    "apply_to_series",
]

Monomial = tuple[int, int, int]  # exponents of (x, y, z)


def _graded_lex(m: Monomial) -> tuple[int, Monomial]:
    return (sum(m), m)


@dataclass(frozen=True)
class Polynomial:
    """Sparse polynomial in (x, y, z) with exact rational coefficients."""

    coeffs: dict[Monomial, Fraction]

    def __post_init__(self) -> None:
        cleaned = {m: Fraction(c) for m, c in self.coeffs.items() if c != 0}
        object.__setattr__(self, "coeffs", cleaned)

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls({})

    @classmethod
    def variable(cls, name: str) -> "Polynomial":
        m = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}[name]
        return cls({m: Fraction(1)})

    @classmethod
    def constant(cls, c: Fraction | int) -> "Polynomial":
        return cls({(0, 0, 0): Fraction(c)})

    def monomials(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in graded-lexicographic order."""
        return [(m, self.coeffs[m]) for m in sorted(self.coeffs, key=_graded_lex)]

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Polynomial(out)

    def scale(self, alpha: Fraction | int) -> "Polynomial":
        a = Fraction(alpha)
        return Polynomial({m: a * c for m, c in self.coeffs.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Polynomial(out)

    def power(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def evaluate(self, x: float, y: float, z: float) -> float:
        return float(sum(float(c) * x ** m[0] * y ** m[1] * z ** m[2] for m, c in self.coeffs.items()))

    def substitute(self, px: "Polynomial", py: "Polynomial", pz: "Polynomial") -> "Polynomial":
        out = Polynomial.zero()
        for (ex, ey, ez), c in self.coeffs.items():
            term = Polynomial.constant(c)
            if ex:
                term = term * px.power(ex)
            if ey:
                term = term * py.power(ey)
            if ez:
                term = term * pz.power(ez)
            out = out + term
        return out

    def substitute_series(self, sx: ExpSeries, sy: ExpSeries, sz: ExpSeries) -> ExpSeries:
        """Exact series-valued substitution; requires no constant term."""
        out = ExpSeries.zero()
        for (ex, ey, ez), c in self.coeffs.items():
            if ex + ey + ez == 0:
                raise ValueError("constant term has no exponential-sum representation")
            term: ExpSeries | None = None
            for s, e in ((sx, ex), (sy, ey), (sz, ez)):
                if e:
                    p = s.power(e)
                    term = p if term is None else term * p
            assert term is not None
            out = out + term.scale(c)
        return out


@dataclass(frozen=True)
class DiagonalPolynomialMap:
    """The concatenation map restricted to diagonal channels: three
    polynomials (P_x, P_y, P_z) applied componentwise."""

    px: Polynomial
    py: Polynomial
    pz: Polynomial
    name: str = ""

    @classmethod
    def identity(cls) -> "DiagonalPolynomialMap":
        return cls(Polynomial.variable("x"), Polynomial.variable("y"), Polynomial.variable("z"), "identity")

    def components(self) -> tuple[Polynomial, Polynomial, Polynomial]:
        return (self.px, self.py, self.pz)

    def apply(self, channel: DiagonalChannel) -> DiagonalChannel:
        x, y, z = channel.as_tuple()
        return DiagonalChannel(
            self.px.evaluate(x, y, z),
            self.py.evaluate(x, y, z),
            self.pz.evaluate(x, y, z),
        )

    def apply_tuple(self, v: tuple[float, float, float]) -> tuple[float, float, float]:
        x, y, z = v
        return (self.px.evaluate(x, y, z), self.py.evaluate(x, y, z), self.pz.evaluate(x, y, z))

    def iterate(self, channel: DiagonalChannel, times: int) -> DiagonalChannel:
        out = channel
        for _ in range(times):
            out = self.apply(out)
        return out

    def to_json(self) -> list[dict[str, object]]:
        out = []
        for sigma, poly in zip("xyz", self.components()):
            out.append({
                "sigma": sigma,
                "monomials": [
                    {"ex": m[0], "ey": m[1], "ez": m[2], "num": str(c.numerator), "den": str(c.denominator)}
                    for m, c in poly.monomials()
                ],
            })
        return out


@dataclass(frozen=True)
class ConcatMap:
    """Full (not necessarily diagonal) concatenation map of an outer code.

    Holds the exact alpha/beta coefficient tables of Pauli strings; applying
    the map contracts them against the inner channel entries.
    """

    code: StabilizerCode
    alpha: dict[str, dict[str, Fraction]]
    beta: dict[str, dict[str, Fraction]]

    @property
    def n(self) -> int:
        return self.code.n


def build_concat_map(code: StabilizerCode) -> ConcatMap:
    alpha, beta = alpha_beta(code)
    return ConcatMap(code, alpha, beta)


def apply_numeric(cmap: ConcatMap, inner: list[QubitChannel]) -> QubitChannel:
    """Apply the concatenation map to numeric inner channels.

    ``inner`` is either a single channel (replicated across the register) or
    one heterogeneous channel per register qubit.
    """
    if len(inner) == 1:
        factors = [inner[0].matrix] * cmap.n
    elif len(inner) == cmap.n:
        factors = [g.matrix for g in inner]
    else:
        raise ValueError(f"need 1 or {cmap.n} inner channels, got {len(inner)}")
    return contract_channel(cmap.alpha, cmap.beta, factors)


def _string_monomial(s: str) -> Monomial:
    return (s.count("X"), s.count("Y"), s.count("Z"))


def diagonal_polynomials(code: StabilizerCode) -> DiagonalPolynomialMap:
    """Exact diagonal-restriction polynomials, from the alpha/beta tables.

    For diagonal inner channels only identical string pairs survive the
    contraction, and each string contributes its letter-count monomial.
    """
    alpha, beta = alpha_beta(code)
    polys = []
    for s in ("X", "Y", "Z"):
        acc: dict[Monomial, Fraction] = {}
        for key, b in beta[s].items():
            a = alpha[s].get(key)
            if a is None:
                continue
            m = _string_monomial(key)
            acc[m] = acc.get(m, Fraction(0)) + a * b
        polys.append(Polynomial(acc))
    return DiagonalPolynomialMap(polys[0], polys[1], polys[2], name=code.name)


def diagonal_polynomials_stabilizer(code: StabilizerCode) -> DiagonalPolynomialMap:
    """Independent route to the diagonal polynomials via the stabilizer sum
    (1/|S|) sum_i f_i,sigma x^wX(S_i sigma_bar) y^wY(..) z^wZ(..)."""
    table = recovery_table(code)
    f = decoding_coefficients(code, table)
    elements = code.group_elements()
    inv = Fraction(1, code.group_order)
    polys = []
    for s in ("X", "Y", "Z"):
        bar = code.logical(s)
        acc: dict[Monomial, Fraction] = {}
        for g, fi in zip(elements, f[s]):
            if fi == 0:
                continue
            p = g.multiply(bar)
            m = (p.sigma_weight("X"), p.sigma_weight("Y"), p.sigma_weight("Z"))
            acc[m] = acc.get(m, Fraction(0)) + inv * fi
        polys.append(Polynomial(acc))
    return DiagonalPolynomialMap(polys[0], polys[1], polys[2], name=code.name)


def compose(outer: DiagonalPolynomialMap, inner: DiagonalPolynomialMap) -> DiagonalPolynomialMap:
    """Map composition outer(inner(.)) by exact polynomial substitution."""
    ix, iy, iz = inner.components()
    return DiagonalPolynomialMap(
        outer.px.substitute(ix, iy, iz),
        outer.py.substitute(ix, iy, iz),
        outer.pz.substitute(ix, iy, iz),
        name=f"{outer.name}({inner.name})" if outer.name and inner.name else "",
    )


def apply_to_series(
    pmap: DiagonalPolynomialMap, series: tuple[ExpSeries, ExpSeries, ExpSeries]
) -> tuple[ExpSeries, ExpSeries, ExpSeries]:
    """Push exact exponential series through the map componentwise."""
    sx, sy, sz = series
    return (
        pmap.px.substitute_series(sx, sy, sz),
        pmap.py.substitute_series(sx, sy, sz),
        pmap.pz.substitute_series(sx, sy, sz),
    )
