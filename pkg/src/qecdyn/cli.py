"""Command-line front end: code inspection, effective channels, thresholds,
exact series, and model reduction, with table/figure data as JSON/CSV.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import functools
import json
import sys
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from . import baltrunc as bt
from .channels import (
    QubitChannel,
    ProductRegisterChannel,
    depolarizing,
    effective_channel,
    pauli_error,
)
from .codes import BUILTIN_NAMES, StabilizerCode, builtin, decoding_ops, encoding_ops
from .concat import apply_to_series
from .expseries import ExpSeries, PrecisionError
from .pauli import OperatorSum
from .statespace import Realization, from_series
from .thresholds import (
    COMPONENTS,
    NonConvergenceError,
    storage_thresholds,
    threshold_map,
)

EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _json(data: object) -> str:
    return json.dumps(data, indent=2) + "\n"


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _csv(header: list[str], rows: list[list[float]]) -> str:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _parse_grid(spec: str) -> np.ndarray:
    try:
        start, stop, count = spec.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError as exc:
        raise click.UsageError(f"grid must be start:stop:count, got {spec!r}") from exc
    if count < 2:
        raise click.UsageError("grid count must be >= 2")
    return np.linspace(start, stop, count)


def _load_code(name: str, file: str | None) -> StabilizerCode:
    if file:
        return StabilizerCode.from_text(Path(file).read_text(), name=name or Path(file).stem)
    return builtin(name)


def _load_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    config: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise click.UsageError(f"config line is not key=value: {line!r}")
        key, _, value = line.partition("=")
        config[key.strip()] = value.strip()
    return config


def _apply_config(ctx: click.Context, config: dict[str, str]) -> None:
    """Use config values as defaults for flags not given on the command line."""
    for key, value in config.items():
        param = key.replace("-", "_")
        if param not in ctx.params:
            raise click.UsageError(f"unknown config key {key!r}")
        src = ctx.get_parameter_source(param)
        if src is not None and src.name == "DEFAULT":
            ptype = type(ctx.params[param]) if ctx.params[param] is not None else str
            ctx.params[param] = ptype(value) if ptype in (int, float, str) else value


def _handled(fn):
    """Map input errors to exit code 2 and numerical failures to 3."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.UsageError:
            raise
        except (KeyError, ValueError, FileNotFoundError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INVALID)
        except (PrecisionError, NonConvergenceError, ArithmeticError, RuntimeError) as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(EXIT_NUMERICAL)

    return wrapper


@click.group()
def main() -> None:
    """Exact dynamics of concatenated stabilizer codes."""


# ---------------------------------------------------------------- codes


@main.group()
def codes() -> None:
    """Inspect built-in or user-supplied codes."""


@codes.command("list")
@click.option("--json", "as_json", is_flag=True, help="emit a JSON list")
def codes_list(as_json: bool) -> None:
    if as_json:
        _emit(_json(list(BUILTIN_NAMES)), None)
    else:
        for name in BUILTIN_NAMES:
            click.echo(name)


def _opsum_text(s: OperatorSum) -> str:
    parts = []
    for key, c in s.items():
        sign = "-" if c < 0 else "+"
        mag = -c if c < 0 else c
        coeff = "" if mag == 1 else f"{mag} "
        parts.append(f"{sign} {coeff}{key}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def _opsum_json(s: OperatorSum) -> list[dict[str, str]]:
    return [{"string": k, "num": str(c.numerator), "den": str(c.denominator)} for k, c in s.items()]


@codes.command("show")
@click.argument("name", default="")
@click.option("--file", "file", type=click.Path(exists=True), help="code in text format")
@click.option("--json", "as_json", is_flag=True)
@click.option("--out", default=None, type=click.Path())
@_handled
def codes_show(name: str, file: str | None, as_json: bool, out: str | None) -> None:
    """Print generators, logicals, and the encoder/decoder expansions."""
    if not name and not file:
        raise click.UsageError("give a builtin name or --file")
    code = _load_code(name, file)
    enc = encoding_ops(code)
    dec = decoding_ops(code)
    if as_json:
        data = {
            "name": code.name,
            "n": code.n,
            "generators": [g.letters() for g in code.generators],
            "logical_x": code.logical_x.letters(),
            "logical_z": code.logical_z.letters(),
            "encoding": {s: _opsum_json(enc[s]) for s in "IXYZ"},
            "decoding": {s: _opsum_json(dec[s]) for s in "IXYZ"},
        }
        _emit(_json(data), out)
        return
    lines = [f"code: {code.name}  (n = {code.n})"]
    for g in code.generators:
        lines.append(f"  generator  {g.letters()}")
    lines.append(f"  logical X  {code.logical_x.letters()}")
    lines.append(f"  logical Z  {code.logical_z.letters()}")
    for s in "IXYZ":
        lines.append(f"  E_{s} = {_opsum_text(enc[s])}")
    for s in "IXYZ":
        lines.append(f"  D_{s} = {_opsum_text(dec[s])}")
    _emit("\n".join(lines) + "\n", out)


# ---------------------------------------------------------------- effchan


@main.command()
@click.argument("name", default="")
@click.option("--file", "file", type=click.Path(exists=True))
@click.option("--dep", type=float, default=None, help="depolarizing channel at time tau")
@click.option("--pauli", type=float, default=None, help="symmetric Pauli error with probability p")
@click.option("--channel", type=click.Path(exists=True), default=None,
              help="JSON file with a 4x4 transfer matrix")
@click.option("--out", default=None, type=click.Path())
@_handled
def effchan(name: str, file: str | None, dep: float | None, pauli: float | None,
            channel: str | None, out: str | None) -> None:
    """Effective single-qubit channel of a code under product noise."""
    given = [v is not None for v in (dep, pauli, channel)]
    if sum(given) != 1:
        raise click.UsageError("give exactly one of --dep, --pauli, --channel")
    code = _load_code(name, file)
    if dep is not None:
        inner = depolarizing(dep).as_channel()
    elif pauli is not None:
        inner = pauli_error(pauli).as_channel()
    else:
        inner = QubitChannel.from_json(json.loads(Path(channel).read_text()))
    g = effective_channel(code, ProductRegisterChannel.uniform(inner, code.n))
    _emit(_json(g.to_json()), out)


# ---------------------------------------------------------------- threshold


@main.command()
@click.argument("name", default="")
@click.option("--file", "file", type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True)
@click.option("--out", default=None, type=click.Path())
@_handled
def threshold(name: str, file: str | None, as_json: bool, out: str | None) -> None:
    """Storage thresholds, fixed-point structure, and p_th for a code."""
    code = _load_code(name, file)
    report = storage_thresholds(threshold_map(code))
    _emit(_json(report.to_json()) if as_json else report.table_text(), out)


# ---------------------------------------------------------------- series


def _exact_series(code: StabilizerCode, level: int) -> tuple[ExpSeries, ExpSeries, ExpSeries]:
    pmap = threshold_map(code)
    series = (ExpSeries.exponential(),) * 3
    for _ in range(level):
        series = apply_to_series(pmap, series)
    return series


@main.command()
@click.argument("name", default="shor")
@click.option("--file", "file", type=click.Path(exists=True))
@click.option("--level", type=int, default=1, show_default=True)
@click.option("--stats", is_flag=True, help="term counts and exact tau=0 values")
@click.option("--census", type=float, default=None, help="count terms with |b_i| above this")
@click.option("--grid", default=None, help="start:stop:count evaluation grid (CSV out)")
@click.option("--component", type=click.Choice(["x", "y", "z"]), default="z", show_default=True)
@click.option("--method", type=click.Choice(["exact", "numeric"]), default="numeric",
              show_default=True, help="grid evaluation route")
@click.option("--precision", type=int, default=None, help="mantissa bits for exact evaluation")
@click.option("--config", type=click.Path(exists=True), default=None)
@click.option("--out", default=None, type=click.Path())
@click.pass_context
@_handled
def series(ctx: click.Context, name: str, file: str | None, level: int, stats: bool,
           census: float | None, grid: str | None, component: str, method: str,
           precision: int | None, config: str | None, out: str | None) -> None:
    """Level-l exponential sums of the iterated concatenation map."""
    _apply_config(ctx, _load_config(config))
    level, grid, out = ctx.params["level"], ctx.params["grid"], ctx.params["out"]
    method, component = ctx.params["method"], ctx.params["component"]
    if level < 0:
        raise click.UsageError("level must be >= 0")
    code = _load_code(name, file)

    if stats or census is not None:
        exact = _exact_series(code, level)
        data: dict[str, object] = {"code": code.name, "level": level}
        if stats:
            data["terms"] = {c: s.term_count() for c, s in zip(COMPONENTS, exact)}
            data["sum_b"] = {c: str(s.sum_b()) for c, s in zip(COMPONENTS, exact)}
        if census is not None:
            data["census_threshold"] = census
            data["census"] = {c: s.coefficient_census(census) for c, s in zip(COMPONENTS, exact)}
        _emit(_json(data), out)
        return

    if grid is None:
        raise click.UsageError("give --stats, --census, or --grid")
    taus = _parse_grid(grid)
    comp_idx = COMPONENTS.index(component)
    columns: list[list[float]] = []
    if method == "exact":
        current = (ExpSeries.exponential(),) * 3
        pmap = threshold_map(code)
        for lvl in range(level + 1):
            s = current[comp_idx]
            columns.append([s.evaluate(t, precision=precision) for t in taus])
            if lvl < level:
                current = apply_to_series(pmap, current)
    else:
        pmap = threshold_map(code)
        vals = np.stack([np.exp(-taus)] * 3)
        for lvl in range(level + 1):
            columns.append(list(vals[comp_idx]))
            if lvl < level:
                vals = np.array([
                    [poly.evaluate(x, y, z) for x, y, z in vals.T]
                    for poly in pmap.components()
                ])
    header = ["tau"] + [f"l{lvl}" for lvl in range(level + 1)]
    rows = [[t] + [col[i] for col in columns] for i, t in enumerate(taus)]
    _emit(_csv(header, rows), out)


# ---------------------------------------------------------------- reduce


def _stage_maps(code: StabilizerCode):
    if code.name == "shor":
        return [threshold_map("bitflip"), threshold_map("phaseflip")]
    return [threshold_map(code)]


def _write_reduce_outputs(report: bt.ReductionReport, oracle, taus: np.ndarray, outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "report.json").write_text(_json(report.to_json()))
    hsv_lines = ["level,component,index,hsv"]
    for rec in report.levels:
        for c in COMPONENTS:
            for i, h in enumerate(rec.hsv.get(c, ())):
                hsv_lines.append(f"{rec.level},{c},{i},{_fmt(h)}")
    (outdir / "hsvs.csv").write_text("\n".join(hsv_lines) + "\n")
    for level, comps in report.realizations.items():
        for c, r in comps.items():
            (outdir / f"realization_l{level}_{c}.json").write_text(_json(r.to_json()))
            grid, exact, delta = bt.approximation_error(r, oracle, c, level, taus)
            rows = [[t, e, e + d, d] for t, e, d in zip(grid, exact, delta)]
            (outdir / f"error_l{level}_{c}.csv").write_text(
                _csv(["tau", "exact", "approx", "delta"], rows))


@main.command("reduce")
@click.argument("name", default="shor")
@click.option("--file", "file", type=click.Path(exists=True))
@click.option("--levels", type=int, default=4, show_default=True)
@click.option("--hmin", type=float, default=4e-5, show_default=True)
@click.option("--exact", "exact_route", is_flag=True,
              help="minimal realizations of the exact series, no truncation")
@click.option("--grid", default="0:1.5:301", show_default=True)
@click.option("--outdir", type=click.Path(), default=None,
              help="write report, realizations, HSV and error CSVs here")
@click.option("--truncation-study", is_flag=True,
              help="also emit the exact level-2 z response against order 4/3/2 truncations")
@click.option("--config", type=click.Path(exists=True), default=None)
@click.pass_context
@_handled
def reduce_cmd(ctx: click.Context, name: str, file: str | None, levels: int, hmin: float,
               exact_route: bool, grid: str, outdir: str | None,
               truncation_study: bool, config: str | None) -> None:
    """Iterative balanced-truncation reduction of the level-l responses."""
    _apply_config(ctx, _load_config(config))
    levels, hmin, grid = ctx.params["levels"], ctx.params["hmin"], ctx.params["grid"]
    outdir = ctx.params["outdir"]
    if levels < 1:
        raise click.UsageError("levels must be >= 1")
    code = _load_code(name, file)
    taus = _parse_grid(grid)
    oracle = threshold_map(code)
    if exact_route or hmin == 0.0:
        report = bt.exact_reduce(oracle, levels, taus)
    else:
        report = bt.iterative_reduce(_stage_maps(code), levels, hmin, oracle, taus)
    if outdir:
        outpath = Path(outdir)
        _write_reduce_outputs(report, oracle, taus, outpath)
        if truncation_study:
            _truncation_study(code, taus, outpath)
        click.echo(f"wrote reduction outputs to {outpath}")
    else:
        _emit(_json(report.to_json()), None)


def _truncation_study(code: StabilizerCode, taus: np.ndarray, outdir: Path) -> None:
    """Exact level-2 z response versus its order-4/3/2 truncations (CSV)."""
    sz = _exact_series(code, 2)[2]
    full = from_series(sz)
    balanced = bt.balance(full)
    exact_vals = full.evaluate_grid(taus)
    cols = [exact_vals]
    orders = (4, 3, 2)
    for k in orders:
        reduced, _ = bt.truncate(balanced, order=k)
        cols.append(reduced.evaluate_grid(taus))
    header = ["tau", "exact"] + [f"order{k}" for k in orders]
    rows = [[t] + [c[i] for c in cols] for i, t in enumerate(taus)]
    (outdir / "truncation_study.csv").write_text(_csv(header, rows))


if __name__ == "__main__":
    main()
