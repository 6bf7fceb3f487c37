"""Balanced truncation of stable realizations, and the iterative scheme that
keeps concatenation-level models small.

The controllability/observability Gramians give Hankel singular values; the
square-root balancing transform orders the state by HSV so truncation is a
slice, with the a priori error bound twice the sum of the discarded HSVs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .concat import DiagonalPolynomialMap
from .expseries import ExpSeries
from .statespace import Realization, apply_polynomial, from_series
from .thresholds import COMPONENTS

__all__ = [
    "GramianPair",
    "BalanceResult",
    "ReductionReport",
    "gramians",
    "balance",
    "truncate",
    "reduce_realization",
    "iterative_reduce",
    "exact_reduce",
    "approximation_error",
]

# Relative floor below which computed Hankel singular values are treated as
# numerical noise rather than true system modes.
_HSV_NOISE_FLOOR = 1e-13


@dataclass(frozen=True)
class GramianPair:
    """Controllability and observability Gramians of a stable realization."""

    Wc: np.ndarray
    Wo: np.ndarray

    def residuals(self, r: Realization) -> tuple[float, float]:
        """Relative residuals of the two Lyapunov equations."""
        rc = r.A @ self.Wc + self.Wc @ r.A.T + np.outer(r.B, r.B)
        ro = r.A.T @ self.Wo + self.Wo @ r.A + np.outer(r.C, r.C)
        nc = max(np.linalg.norm(self.Wc), np.linalg.norm(np.outer(r.B, r.B)))
        no = max(np.linalg.norm(self.Wo), np.linalg.norm(np.outer(r.C, r.C)))
        return (
            float(np.linalg.norm(rc)) / max(nc, 1e-300),
            float(np.linalg.norm(ro)) / max(no, 1e-300),
        )


@dataclass(frozen=True)
class BalanceResult:
    """Balanced realization plus the full Hankel singular value spectrum.

    ``realization`` has order equal to the numerical rank; ``hsv`` keeps one
    entry per original state dimension (noise-level values included) so the
    spectrum length always matches the input order.
    """

    realization: Realization
    hsv: np.ndarray
    noise_flagged: int = 0


def gramians(r: Realization) -> GramianPair:
    """Solve the two Lyapunov equations for a stable realization.

    A diagonal A admits the closed form W[i, j] = v_i v_j / (-A_ii - A_jj);
    otherwise the dense Bartels-Stewart solver is used.
    """
    if not r.is_stable():
        raise ValueError("Gramians require a Hurwitz-stable A")
    if r.is_diagonal():
        d = np.diag(r.A)
        denom = -(d[:, None] + d[None, :])
        Wc = np.outer(r.B, r.B) / denom
        Wo = np.outer(r.C, r.C) / denom
        return GramianPair(Wc, Wo)
    Wc = scipy.linalg.solve_continuous_lyapunov(r.A, -np.outer(r.B, r.B))
    Wo = scipy.linalg.solve_continuous_lyapunov(r.A.T, -np.outer(r.C, r.C))
    return GramianPair((Wc + Wc.T) / 2, (Wo + Wo.T) / 2)


def _psd_factor(W: np.ndarray) -> np.ndarray:
    """Factor W = L L^T; Cholesky when possible, eigenvalue clip otherwise."""
    try:
        return np.linalg.cholesky(W + np.eye(len(W)) * 0.0)
    except np.linalg.LinAlgError:
        w, V = np.linalg.eigh((W + W.T) / 2)
        w = np.clip(w, 0.0, None)
        keep = w > max(w[-1], 0.0) * 1e-15
        return V[:, keep] * np.sqrt(w[keep])


def balance(r: Realization) -> BalanceResult:
    """Square-root balancing.

    Computes the SVD of L_o^T L_c; states with singular value below the noise
    floor (relative to the largest) are dropped from the balanced realization
    but kept, flagged, in the reported spectrum.
    """
    g = gramians(r)
    Lc = _psd_factor(g.Wc)
    Lo = _psd_factor(g.Wo)
    U, s, Vt = np.linalg.svd(Lo.T @ Lc)
    hsv = np.zeros(r.order)
    hsv[: len(s)] = s
    if len(s) == 0 or s[0] == 0.0:
        raise ValueError("zero system: nothing to balance")
    keep = s > s[0] * _HSV_NOISE_FLOOR
    k = int(np.count_nonzero(keep))
    inv_sqrt = 1.0 / np.sqrt(s[:k])
    Tr = Lc @ Vt[:k].T * inv_sqrt
    Tl = Lo @ U[:, :k] * inv_sqrt
    balanced = Realization(Tl.T @ r.A @ Tr, Tl.T @ r.B, r.C @ Tr)
    return BalanceResult(balanced, hsv, noise_flagged=len(s) - k)


def truncate(
    result: BalanceResult,
    h_min: float | None = None,
    order: int | None = None,
) -> tuple[Realization, float]:
    """Slice a balanced realization to the dominant states.

    Keep states with HSV >= ``h_min``, or the leading ``order`` states.
    Returns the reduced realization and the a priori error bound, twice the
    sum of every discarded HSV.
    """
    if (h_min is None) == (order is None):
        raise ValueError("specify exactly one of h_min or order")
    hsv = result.hsv
    n = result.realization.order
    if h_min is not None:
        k = int(np.count_nonzero(hsv[:n] >= h_min))
        if k == 0:
            raise ValueError(f"h_min={h_min} would discard every state (max HSV {hsv[0]:.3e})")
    else:
        k = min(order, n)
        if k <= 0:
            raise ValueError("order must be positive")
    r = result.realization
    reduced = Realization(r.A[:k, :k], r.B[:k], r.C[:k])
    bound = 2.0 * float(np.sum(hsv[k:]))
    return reduced, bound


def reduce_realization(r: Realization, h_min: float) -> tuple[Realization, np.ndarray, float]:
    """Balance then truncate; returns (reduced, hsv spectrum, error bound)."""
    res = balance(r)
    reduced, bound = truncate(res, h_min=h_min)
    return reduced, res.hsv, bound


@dataclass(frozen=True)
class StageRecord:
    stage: str  # name of the 3-qubit map applied
    orders_before: dict[str, int]
    orders_after: dict[str, int]
    truncation_bound: dict[str, float]


@dataclass(frozen=True)
class LevelRecord:
    level: int
    orders: dict[str, int]
    max_deviation: dict[str, float]
    hsv: dict[str, tuple[float, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class ReductionReport:
    h_min: float
    levels: tuple[LevelRecord, ...]
    stages: tuple[StageRecord, ...]
    realizations: dict[int, dict[str, Realization]]  # per level, per component

    def to_json(self) -> dict[str, object]:
        return {
            "h_min": self.h_min,
            "levels": [
                {
                    "level": rec.level,
                    "orders": rec.orders,
                    "max_deviation": {k: float(v) for k, v in rec.max_deviation.items()},
                    "hsv": {k: [float(h) for h in v] for k, v in rec.hsv.items()},
                }
                for rec in self.levels
            ],
            "stages": [
                {
                    "stage": rec.stage,
                    "orders_before": rec.orders_before,
                    "orders_after": rec.orders_after,
                    "truncation_bound": {k: float(v) for k, v in rec.truncation_bound.items()},
                }
                for rec in self.stages
            ],
            "realizations": {
                str(level): {c: r.to_json() for c, r in comps.items()}
                for level, comps in self.realizations.items()
            },
        }

    @property
    def final(self) -> dict[str, Realization]:
        return self.realizations[max(self.realizations)]


def iterative_reduce(
    stage_maps: Sequence[DiagonalPolynomialMap],
    levels: int,
    h_min: float,
    oracle: DiagonalPolynomialMap,
    tau_grid: np.ndarray | None = None,
    order_cap: int = 4096,
) -> ReductionReport:
    """Grow level-l models by alternating low-degree stages with truncation.

    Each level applies ``stage_maps`` in order (their composition must equal
    ``oracle``, the per-level map), balancing and truncating every component
    after each stage so intermediate orders stay small.  Per level the reduced
    model is compared pointwise against numerically iterating ``oracle`` on
    ``tau_grid``.
    """
    if tau_grid is None:
        tau_grid = np.linspace(0.0, 1.5, 301)
    tau_grid = np.asarray(tau_grid, dtype=float)

    current = tuple(from_series(ExpSeries.exponential()) for _ in COMPONENTS)
    exact = _oracle_curves(oracle, tau_grid, levels)

    stage_records: list[StageRecord] = []
    level_records: list[LevelRecord] = []
    realizations: dict[int, dict[str, Realization]] = {}
    for level in range(1, levels + 1):
        spectra: dict[str, tuple[float, ...]] = {}
        for smap in stage_maps:
            grown = apply_polynomial(smap, *current)
            before = {c: g.order for c, g in zip(COMPONENTS, grown)}
            for g in grown:
                if g.order > order_cap:
                    raise RuntimeError(
                        f"intermediate order {g.order} exceeds cap {order_cap} at level {level}, "
                        f"stage {smap.name!r}; raise h_min or the cap"
                    )
            reduced, bounds = [], {}
            for c, g in zip(COMPONENTS, grown):
                red, hsv, bound = reduce_realization(g, h_min)
                reduced.append(red)
                bounds[c] = bound
                spectra[c] = tuple(float(h) for h in hsv)
            current = tuple(reduced)
            stage_records.append(StageRecord(
                smap.name or "stage",
                before,
                {c: g.order for c, g in zip(COMPONENTS, current)},
                bounds,
            ))
        dev = {}
        for c, g in zip(COMPONENTS, current):
            approx = g.evaluate_grid(tau_grid)
            dev[c] = float(np.max(np.abs(approx - exact[c][level])))
        level_records.append(LevelRecord(
            level,
            {c: g.order for c, g in zip(COMPONENTS, current)},
            dev,
            spectra,
        ))
        realizations[level] = dict(zip(COMPONENTS, current))
    return ReductionReport(
        h_min,
        tuple(level_records),
        tuple(stage_records),
        realizations,
    )


def exact_reduce(
    oracle: DiagonalPolynomialMap,
    levels: int,
    tau_grid: np.ndarray | None = None,
) -> ReductionReport:
    """Exact counterpart of :func:`iterative_reduce`: minimal diagonal
    realizations of the exact level-l exponential sums, no truncation.

    Orders grow combinatorially with the level; levels above 4 are refused.
    """
    if levels > 4:
        raise ValueError("exact route is limited to 4 levels")
    if tau_grid is None:
        tau_grid = np.linspace(0.0, 1.5, 301)
    tau_grid = np.asarray(tau_grid, dtype=float)
    from .concat import apply_to_series

    exact = _oracle_curves(oracle, tau_grid, levels)
    series = tuple(ExpSeries.exponential() for _ in COMPONENTS)
    level_records: list[LevelRecord] = []
    realizations: dict[int, dict[str, Realization]] = {}
    for level in range(1, levels + 1):
        series = apply_to_series(oracle, series)
        reals = {c: from_series(s) for c, s in zip(COMPONENTS, series)}
        spectra = {c: tuple(float(h) for h in balance(r).hsv) for c, r in reals.items()}
        dev = {
            c: float(np.max(np.abs(r.evaluate_grid(tau_grid) - exact[c][level])))
            for c, r in reals.items()
        }
        level_records.append(LevelRecord(
            level, {c: r.order for c, r in reals.items()}, dev, spectra,
        ))
        realizations[level] = reals
    return ReductionReport(0.0, tuple(level_records), (), realizations)


def _oracle_curves(
    pmap: DiagonalPolynomialMap, tau_grid: np.ndarray, levels: int
) -> dict[str, list[np.ndarray]]:
    """Per-component iterates of the map over the grid, levels 0..levels."""
    vals = np.array([np.exp(-tau_grid)] * 3)
    out: dict[str, list[np.ndarray]] = {c: [vals[i].copy()] for i, c in enumerate(COMPONENTS)}
    for _ in range(levels):
        vals = np.array([
            np.array([poly.evaluate(x, y, z) for x, y, z in vals.T])
            for poly in pmap.components()
        ])
        for i, c in enumerate(COMPONENTS):
            out[c].append(vals[i])
    return out


def approximation_error(
    approx: Realization,
    oracle: DiagonalPolynomialMap,
    component: str,
    level: int,
    tau_grid: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pointwise deviation of a reduced model from the iterated-map oracle.

    Returns (tau, exact, delta) arrays for the requested component.
    """
    if tau_grid is None:
        tau_grid = np.linspace(0.0, 1.5, 301)
    tau_grid = np.asarray(tau_grid, dtype=float)
    exact = _oracle_curves(oracle, tau_grid, level)[component][level]
    delta = approx.evaluate_grid(tau_grid) - exact
    return tau_grid, exact, delta
