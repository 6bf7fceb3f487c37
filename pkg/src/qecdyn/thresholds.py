"""Asymptotic analysis of iterated concatenation maps.

Finds fixed points of the componentwise polynomials, storage thresholds
t*_sigma (the discontinuity times of the infinite-concatenation step
functions), the matching Pauli-error probabilities, and finite-level
profiles of the iterated map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .channels import DiagonalChannel, depolarizing
from .codes import StabilizerCode, builtin
from .concat import DiagonalPolynomialMap, Polynomial, compose, diagonal_polynomials

__all__ = [
    "FixedPoint",
    "FixedPointReport",
    "ThresholdReport",
    "fixed_points",
    "storage_thresholds",
    "pauli_threshold",
    "asymptotic_profile",
    "threshold_map",
]

COMPONENTS = ("x", "y", "z")

_CONVERGE_TOL = 1e-9
_MAX_ITER = 10_000
_CYCLE_TOL = 1e-12


class NonConvergenceError(RuntimeError):
    """Iterated map failed to settle within the iteration cap."""

    def __init__(self, tau_interval: tuple[float, float]):
        self.tau_interval = tau_interval
        super().__init__(f"iteration did not converge for tau in {tau_interval}")


@dataclass(frozen=True)
class FixedPoint:
    value: float
    derivative: float
    stability: str  # "stable" | "unstable" | "marginal"


@dataclass(frozen=True)
class FixedPointReport:
    component: str
    points: tuple[FixedPoint, ...]
    degenerate_identity: bool = False

    @property
    def unstable_interior(self) -> float | None:
        for p in self.points:
            if p.stability == "unstable" and 0 < p.value < 1:
                return p.value
        return None


@dataclass(frozen=True)
class ThresholdReport:
    code: str
    t_star: dict[str, float]
    p_star: dict[str, float]
    p_th: float
    period: dict[str, int]
    degenerate: bool = False
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict[str, object]:
        return {
            "code": self.code,
            "t_star": {k: round(v, 10) for k, v in self.t_star.items()},
            "p_star": {k: round(v, 10) for k, v in self.p_star.items()},
            "p_th": round(self.p_th, 10),
            "period": self.period,
            "degenerate": self.degenerate,
            "notes": list(self.notes),
        }

    def table_text(self) -> str:
        """Plain-text table with thresholds to four decimal places."""
        lines = [f"code: {self.code}"]
        header = "sigma      " + "  ".join(f"{c:>8s}" for c in COMPONENTS)
        lines.append(header)
        lines.append("gamma t*   " + "  ".join(f"{self.t_star[c]:8.4f}" for c in COMPONENTS))
        lines.append("p*         " + "  ".join(f"{self.p_star[c]:8.4f}" for c in COMPONENTS))
        lines.append(f"p_th       {self.p_th:8.4f}")
        for note in self.notes:
            lines.append(f"# {note}")
        return "\n".join(lines) + "\n"


def _univariate(poly: Polynomial) -> int | None:
    """Index of the single variable the polynomial uses, or None if mixed."""
    used = {i for m in poly.coeffs for i in range(3) if m[i]}
    if len(used) == 1:
        return used.pop()
    return None


def _poly1d(poly: Polynomial, var: int) -> list[tuple[int, Fraction]]:
    return [(m[var], c) for m, c in poly.coeffs.items()]


def _eval1d(terms: list[tuple[int, Fraction]], v: float) -> float:
    return float(sum(float(c) * v**e for e, c in terms))


def _deriv1d(terms: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    return [(e - 1, e * c) for e, c in terms if e >= 1]


def fixed_points(poly: Polynomial, component: str = "") -> FixedPointReport:
    """All fixed points of a single-variable polynomial map on [0, 1].

    Roots of Q(v) - v are located by sign-change scanning on a 1000-cell
    grid plus bisection refinement to 1e-14; stability is classified from
    |Q'| at the root.
    """
    var = _univariate(poly)
    if var is None and poly.coeffs:
        raise ValueError("fixed_points requires a single-variable polynomial")
    terms = _poly1d(poly, var if var is not None else 0)
    deriv = _deriv1d(terms)

    def f(v: float) -> float:
        return _eval1d(terms, v) - v

    # Identity map: every point is fixed.
    if terms == [(1, Fraction(1))]:
        return FixedPointReport(component, (), degenerate_identity=True)

    cells = 1000
    roots: list[float] = []
    grid = [i / cells for i in range(cells + 1)]
    vals = [f(v) for v in grid]
    for i in range(cells):
        lo, hi, flo, fhi = grid[i], grid[i + 1], vals[i], vals[i + 1]
        if flo == 0.0:
            roots.append(lo)
            continue
        if flo * fhi < 0:
            for _ in range(200):
                mid = (lo + hi) / 2
                fm = f(mid)
                if fm == 0.0 or hi - lo < 1e-14:
                    break
                if flo * fm < 0:
                    hi, fhi = mid, fm
                else:
                    lo, flo = mid, fm
            roots.append((lo + hi) / 2)
    if vals[-1] == 0.0:
        roots.append(1.0)

    points = []
    for r in roots:
        d = _eval1d(deriv, r)
        if abs(abs(d) - 1) < 1e-9:
            stability = "marginal"
        elif abs(d) < 1:
            stability = "stable"
        else:
            stability = "unstable"
        points.append(FixedPoint(r, d, stability))
    return FixedPointReport(component, tuple(points))


def _iterate_limit(pmap: DiagonalPolynomialMap, tau: float, comp: int) -> tuple[float | None, int]:
    """Limit (0 or 1) of the given component under pairs of map applications.

    Returns (limit, period); the limit refers to even iterate counts, and
    period is 2 when the odd iterates settle on the opposite step (the two
    subsequences interchange).  Limit is None on non-convergence.
    """
    v = depolarizing(tau).as_tuple()
    period = 1
    prev = v
    for _ in range(0, _MAX_ITER, 2):
        v1 = pmap.apply_tuple(prev)
        v2 = pmap.apply_tuple(v1)
        if abs(v2[comp] - prev[comp]) < _CYCLE_TOL and abs(v1[comp] - prev[comp]) > 1e-6:
            period = 2
        c = v2[comp]
        if c > 1 - _CONVERGE_TOL:
            if v1[comp] < 0.5:
                period = 2
            return 1.0, period
        if c < _CONVERGE_TOL:
            if v1[comp] > 0.5:
                period = 2
            return 0.0, period
        prev = v2
    return None, period


def threshold_map(code: StabilizerCode | str) -> DiagonalPolynomialMap:
    """Concatenation map used for threshold analysis of a code.

    This is the code's own diagonal map; for the shor builtin it coincides
    exactly with the composition of the phaseflip and bitflip maps, since the
    builtin carries the two-stage block-correction recovery table.
    """
    if isinstance(code, str):
        code = builtin(code)
    return diagonal_polynomials(code)


def storage_thresholds(
    pmap: DiagonalPolynomialMap,
    tau_resolution: float = 1e-7,
    tau_max: float = 2.0,
) -> ThresholdReport:
    """Storage thresholds t*_sigma and p_th of a diagonal concatenation map.

    Components whose polynomial involves only their own variable are handled
    through the unstable fixed point (t* = -ln sigma*); coupled components by
    bisection on tau of the infinite-iteration limit, stepping the map twice
    per iteration so period-2 limit cycles converge as well.
    """
    comps = pmap.components()
    if all(p.coeffs == Polynomial.variable(c).coeffs for p, c in zip(comps, COMPONENTS)):
        zeros = {c: 0.0 for c in COMPONENTS}
        return ThresholdReport(
            pmap.name or "?", zeros, dict(zeros), 0.0, {c: 1 for c in COMPONENTS},
            degenerate=True, notes=("identity map: no protection at any tau > 0",),
        )

    t_star: dict[str, float] = {}
    period: dict[str, int] = {}
    notes: list[str] = []
    for i, name in enumerate(COMPONENTS):
        poly = comps[i]
        if _univariate(poly) == i:
            report = fixed_points(poly, name)
            star = report.unstable_interior
            period[name] = 1
            if star is not None:
                t_star[name] = -math.log(star)
            else:
                # Only the endpoints are fixed: the basin boundary sits at an
                # end of [0, 1], so the component is protected either always
                # or never.
                one_stable = any(p.value == 1.0 and p.stability == "stable" for p in report.points)
                t_star[name] = math.inf if one_stable else 0.0
                if not one_stable:
                    notes.append(f"component {name}: no protection at any tau > 0")
            continue
        lo, hi = tau_resolution, tau_max
        limit_lo, per = _iterate_limit(pmap, lo, i)
        period[name] = per
        if limit_lo != 1.0:
            t_star[name] = 0.0
            notes.append(f"component {name}: not protected even at tau = {lo}")
            continue
        while hi - lo > tau_resolution:
            mid = (lo + hi) / 2
            limit, per = _iterate_limit(pmap, mid, i)
            if per == 2:
                period[name] = 2
            if limit is None:
                notes.append(f"component {name}: ambiguous convergence near tau = {mid:.6f}")
                limit = 0.0
            if limit == 1.0:
                lo = mid
            else:
                hi = mid
        t_star[name] = (lo + hi) / 2

    p_star = {c: 0.75 * (1 - math.exp(-t)) for c, t in t_star.items()}
    return ThresholdReport(
        pmap.name or "?",
        t_star,
        p_star,
        min(p_star.values()),
        period,
        notes=tuple(notes),
    )


def pauli_threshold(report: ThresholdReport) -> float:
    """Threshold error probability p_th = min over sigma of 3/4 (1 - e^-t*)."""
    return min(0.75 * (1 - math.exp(-t)) for t in report.t_star.values())


def asymptotic_profile(
    pmap: DiagonalPolynomialMap,
    taus: Sequence[float],
    levels: int,
) -> dict[str, list[list[float]]]:
    """Numeric iterates of the map on a tau grid.

    Returns, per component, a list indexed by level 0..levels of value lists
    over the grid; level 0 is e^-tau itself.
    """
    out: dict[str, list[list[float]]] = {c: [[] for _ in range(levels + 1)] for c in COMPONENTS}
    for tau in taus:
        v = depolarizing(tau).as_tuple()
        for lvl in range(levels + 1):
            for i, c in enumerate(COMPONENTS):
                out[c][lvl].append(v[i])
            if lvl < levels:
                v = pmap.apply_tuple(v)
    return out
