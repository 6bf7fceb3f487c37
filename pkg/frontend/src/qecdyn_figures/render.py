"""Render the four standard figures from qecdyn CSV outputs.

Reads only the documented CSV schemas, renders with matplotlib, writes one
image per invocation.  Nothing is recomputed here: every plotted number comes
from the input files.
"""

from __future__ import annotations

import argparse
import csv
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureSpec", "FigureError", "render", "main"]

FIGURE_IDS = ("fig1", "fig2", "fig3", "fig4")


class FigureError(ValueError):
    """Input files missing or not matching the documented schema."""


@dataclass(frozen=True)
class FigureSpec:
    figure: str
    inputs: tuple[Path, ...]
    output: Path

    def __post_init__(self) -> None:
        if self.figure not in FIGURE_IDS:
            raise FigureError(f"unknown figure id {self.figure!r}; expected one of {FIGURE_IDS}")
        if not self.inputs:
            raise FigureError("no input files given")
        for p in self.inputs:
            if not p.exists():
                raise FigureError(f"input file does not exist: {p}")


def _read_csv(path: Path, expected_prefix: list[str] | None = None) -> tuple[list[str], np.ndarray]:
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FigureError(f"{path}: empty file") from None
        rows = list(reader)
    if expected_prefix and header[: len(expected_prefix)] != expected_prefix:
        raise FigureError(
            f"{path}: header {header} does not start with {expected_prefix}"
        )
    if not rows:
        raise FigureError(f"{path}: no data rows")
    try:
        data = np.array([[float(v) for v in row] for row in rows])
    except ValueError as exc:
        raise FigureError(f"{path}: non-numeric cell ({exc})") from None
    if data.shape[1] != len(header):
        raise FigureError(f"{path}: ragged rows")
    return header, data


def _fig1_level_overlay(inputs: tuple[Path, ...], output: Path) -> None:
    """Overlay of the level-l z responses with their common crossing marked."""
    if len(inputs) != 1:
        raise FigureError("fig1 takes exactly one curves CSV (tau,l0,l1,...)")
    header, data = _read_csv(inputs[0], ["tau"])
    if len(header) < 3 or any(not re.fullmatch(r"l\d+", h) for h in header[1:]):
        raise FigureError(f"{inputs[0]}: expected columns tau,l0,l1,...")
    tau = data[:, 0]
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for i, name in enumerate(header[1:], start=1):
        ax.plot(tau, data[:, i], label=rf"$\ell = {name[1:]}$", lw=1.3)
    # Locate the common crossing from the data: the first and last level
    # curves intersect once away from tau = 0.
    diff = data[:, 1] - data[:, -1]
    sign_changes = np.nonzero(np.diff(np.sign(diff)) != 0)[0]
    interior = [i for i in sign_changes if tau[i] > 0.05]
    if interior:
        i = interior[0]
        frac = diff[i] / (diff[i] - diff[i + 1])
        t_cross = tau[i] + frac * (tau[i + 1] - tau[i])
        v_cross = np.interp(t_cross, tau, data[:, 1])
        ax.plot([t_cross], [v_cross], "ko", ms=5, zorder=5)
        ax.annotate(
            f"({t_cross:.3f}, {v_cross:.3f})",
            (t_cross, v_cross),
            textcoords="offset points",
            xytext=(8, 8),
            fontsize=9,
        )
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$\tilde z_\ell(\tau)$")
    ax.set_xlim(tau[0], tau[-1])
    ax.set_ylim(0, 1.02)
    ax.legend(fontsize=8, loc="upper right")
    fig.tight_layout()
    fig.savefig(output, dpi=160)
    plt.close(fig)


def _fig2_hsv_scatter(inputs: tuple[Path, ...], output: Path) -> None:
    """Largest HSVs per concatenation level, log scale."""
    if len(inputs) != 1:
        raise FigureError("fig2 takes exactly one HSV CSV (level,component,index,hsv)")
    path = inputs[0]
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        rows = list(reader)
    if header != ["level", "component", "index", "hsv"]:
        raise FigureError(f"{path}: expected header level,component,index,hsv")
    by_level: dict[int, list[tuple[int, float]]] = {}
    for row in rows:
        if len(row) != 4:
            raise FigureError(f"{path}: ragged row {row}")
        level, comp, idx, hsv = int(row[0]), row[1], int(row[2]), float(row[3])
        if comp == "z":
            by_level.setdefault(level, []).append((idx, hsv))
    if not by_level:
        raise FigureError(f"{path}: no z-component rows")
    fig, ax = plt.subplots(figsize=(6, 4.2))
    markers = "osD^v<>"
    for k, level in enumerate(sorted(by_level)):
        pts = sorted(by_level[level])
        idx = [i + 1 for i, h in pts if h > 0]
        hsv = [h for _, h in pts if h > 0]
        ax.semilogy(idx, hsv, markers[k % len(markers)] + "-", ms=4, lw=0.8,
                    label=rf"$\ell = {level}$")
    ax.set_xlabel("singular value index")
    ax.set_ylabel("Hankel singular value")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(output, dpi=160)
    plt.close(fig)


def _fig3_truncation_overlay(inputs: tuple[Path, ...], output: Path) -> None:
    """Exact response against low-order truncations, with a zoom inset."""
    if len(inputs) != 1:
        raise FigureError("fig3 takes exactly one truncation-study CSV")
    header, data = _read_csv(inputs[0], ["tau", "exact"])
    if len(header) < 3:
        raise FigureError(f"{inputs[0]}: expected tau,exact,order...,")
    tau = data[:, 0]
    fig, ax = plt.subplots(figsize=(6, 4.2))
    ax.plot(tau, data[:, 1], "k-", lw=1.6, label=header[1])
    styles = ["--", "-.", ":"]
    for i, name in enumerate(header[2:], start=2):
        ax.plot(tau, data[:, i], styles[(i - 2) % 3], lw=1.2, label=name)
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$\tilde z_2(\tau)$")
    ax.legend(fontsize=8)
    # Zoom on the region of largest disagreement between exact and the
    # crudest approximation.
    worst = int(np.argmax(np.abs(data[:, 1] - data[:, -1])))
    lo, hi = max(worst - len(tau) // 8, 0), min(worst + len(tau) // 8, len(tau) - 1)
    axins = ax.inset_axes([0.55, 0.45, 0.4, 0.4])
    axins.plot(tau, data[:, 1], "k-", lw=1.4)
    for i in range(2, data.shape[1]):
        axins.plot(tau, data[:, i], styles[(i - 2) % 3], lw=1.0)
    axins.set_xlim(tau[lo], tau[hi])
    ys = data[lo:hi + 1, 1:]
    axins.set_ylim(ys.min(), ys.max())
    axins.tick_params(labelsize=7)
    ax.indicate_inset_zoom(axins, edgecolor="gray")
    fig.tight_layout()
    fig.savefig(output, dpi=160)
    plt.close(fig)


def _fig4_error_curves(inputs: tuple[Path, ...], output: Path) -> None:
    """Approximation error curves, one per input file."""
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for path in inputs:
        header, data = _read_csv(path, ["tau", "exact", "approx", "delta"])
        m = re.search(r"l(\d+)", path.stem)
        label = rf"$\ell = {m.group(1)}$" if m else path.stem
        ax.plot(data[:, 0], data[:, 3], lw=1.2, label=label)
    ax.axhline(0.0, color="k", lw=0.6)
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$\Delta\tilde z_\ell(\tau)$")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(output, dpi=160)
    plt.close(fig)


_RENDERERS = {
    "fig1": _fig1_level_overlay,
    "fig2": _fig2_hsv_scatter,
    "fig3": _fig3_truncation_overlay,
    "fig4": _fig4_error_curves,
}


def render(spec: FigureSpec) -> Path:
    _RENDERERS[spec.figure](spec.inputs, spec.output)
    return spec.output


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Render figures from qecdyn CSV outputs.")
    parser.add_argument("--fig", required=True, choices=FIGURE_IDS)
    parser.add_argument("--in", dest="inputs", required=True, nargs="+", type=Path,
                        help="input CSV file(s)")
    parser.add_argument("--out", required=True, type=Path, help="output image path")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(args.fig, tuple(args.inputs), args.out)
        render(spec)
    except FigureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
