"""CLI for ucover."""

import logging
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import click
import numpy as np
import typer
from pydantic import BaseModel, Field, ValidationError
from rich.console import Console

from ucover import __version__
from ucover.bounds import bound_report, lambda_matrix
from ucover.config import ExperimentConfig, ScheduleSpec, get_settings
from ucover.core import SampleStream, UniformTorus, make_measure
from ucover.covering import (
    GridCover,
    box_counts,
    covered_fraction,
    dump_grid,
    estimate_box_dim,
    zero_one_probe,
)
from ucover.covering.export import grid_csv_header, grid_csv_rows
from ucover.covering.grid import CAVEAT
from ucover.covering.probe import experiment_grid
from ucover.criteria import (
    SERIES_COLUMNS,
    classify_dichotomy,
    dimension_sandwich,
    series_csv_rows,
    series_partial_diagnostics,
    series_terms,
)
from ucover.errors import UcoverError, UndefinedDimensionError, exit_code_for
from ucover.growth import (
    TRACE_COLUMNS,
    containment_check,
    greedy_cover_trace,
    recursion_check,
    second_moment_mc,
)
from ucover.hitting import hitting_records, pooled_exponent_stats
from ucover.hitting.times import DEFAULT_WINDOW, hitting_csv_header, hitting_csv_rows
from ucover.logging_setup import configure_logging
from ucover.parallel import substream_seed, trial_map, trial_seeds
from ucover.reporting import envelope, write_csv, write_json

logger = logging.getLogger(__name__)

USAGE_EXIT = 64

app = typer.Typer(
    name="ucover",
    help="Simulate and check uniform random covering sets on the d-torus",
    no_args_is_help=True,
)

console = Console(stderr=True)


class RunConfig(BaseModel):
    """Everything that determines a run's output, embedded in every report."""

    command: str
    version: str = __version__
    format: str = "json"
    options: Dict[str, Any] = Field(default_factory=dict)


def _schedule_spec(
    family: str, c: float, alpha: Optional[float], values: Optional[str]
) -> ScheduleSpec:
    parsed = [float(v) for v in values.split(",")] if values else None
    return ScheduleSpec(family=family, c=c, alpha=alpha, values=parsed)


def _resolve(path: Optional[str]) -> Optional[str]:
    """Place relative output paths under settings.output_dir."""
    if path is None or Path(path).is_absolute():
        return path
    return str(Path(get_settings().output_dir) / path)


def _emit(
    run_config: RunConfig,
    results: Any,
    output: Optional[str],
    header: Optional[Sequence[str]] = None,
    rows: Optional[Iterable[Sequence[Any]]] = None,
) -> None:
    config = run_config.model_dump(mode="json")
    output = _resolve(output)
    if run_config.format == "csv":
        if header is None or rows is None:
            raise click.UsageError(f"{run_config.command} has no CSV output")
        write_csv(output, header, rows, config)
    else:
        write_json(output, envelope(config, results))
    if output:
        console.print(f"[green]✓[/green] Wrote {run_config.command} report to {output}")


FamilyOpt = typer.Option("power", "--family", help="Schedule family: power, critical, explicit")
FormatOpt = typer.Option("json", "--format", help="Output format: json or csv")
OutputOpt = typer.Option(None, "--output", "-o", help="Output path (stdout when omitted)")
GridOutOpt = typer.Option(None, "--grid-out", help="Grid dump path")
GridFormatOpt = typer.Option("ucgr", "--grid-format", help="Grid dump format: ucgr or csv")


@app.callback()
def main_callback(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Logging level"),
    log_format: Optional[str] = typer.Option(None, "--log-format", help="text or json"),
):
    """Simulate and check uniform random covering sets on the d-torus."""
    settings = get_settings()
    configure_logging(log_level or settings.log_level, log_format or settings.log_format)


@app.command()
def bounds(
    c: float = typer.Option(..., "--c", help="Scale constant of l_n = c n^(-1/d)"),
    d: int = typer.Option(1, "--d", help="Dimension"),
    fmt: str = FormatOpt,
    output: Optional[str] = OutputOpt,
):
    """Dimension bounds for the critical family."""
    run_config = RunConfig(command="bounds", format=fmt, options={"c": c, "d": d})
    report = bound_report(c, d)
    row = report.model_dump(mode="json")
    _emit(run_config, report, output, header=list(row), rows=[list(row.values())])


@app.command()
def classify(
    family: str = FamilyOpt,
    c: float = typer.Option(1.0, "--c", help="Scale constant"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Power-law exponent"),
    values: Optional[str] = typer.Option(None, "--values", help="Comma-separated radii"),
    d: int = typer.Option(1, "--d", help="Dimension"),
    support_dim: Optional[int] = typer.Option(None, "--support-dim", help="Sub-torus dimension"),
    output: Optional[str] = OutputOpt,
):
    """Measure dichotomy verdict for a schedule and a uniform measure."""
    spec = _schedule_spec(family, c, alpha, values)
    run_config = RunConfig(
        command="classify",
        options={"schedule": spec.model_dump(mode="json"), "d": d, "support_dim": support_dim},
    )
    measure = make_measure(d, support_dim)
    schedule = spec.build(d)
    results: Dict[str, Any] = classify_dichotomy(schedule, measure).model_dump(mode="json")
    if family != "explicit":
        results["dimension_sandwich"] = list(dimension_sandwich(schedule.alpha, measure))
    _emit(run_config, results, output)


def _experiment(
    family: str,
    c: float,
    alpha: Optional[float],
    values: Optional[str],
    d: int,
    support_dim: Optional[int],
    seeds: List[int],
    grid_bits: int,
    p: int,
    n_max: int,
    m_lo: Optional[int] = None,
    m_hi: Optional[int] = None,
    statistic: str = "box_dim",
    config: Optional[str] = None,
) -> ExperimentConfig:
    if config:
        return ExperimentConfig.from_yaml(config)
    return ExperimentConfig(
        d=d,
        support_dim=support_dim,
        schedule=_schedule_spec(family, c, alpha, values),
        seeds=seeds,
        m=grid_bits,
        p=p,
        n_max=n_max,
        m_lo=m_lo,
        m_hi=m_hi,
        statistic=statistic,
    )


def _write_grid(
    grid: GridCover, path: Optional[str], grid_format: str, run_config: RunConfig
) -> None:
    if not path:
        return
    path = _resolve(path)
    if grid_format == "csv":
        config = run_config.model_dump(mode="json")
        write_csv(path, grid_csv_header(grid), grid_csv_rows(grid), config)
    elif grid_format == "ucgr":
        dump_grid(grid, path)
    else:
        raise click.UsageError(f"unknown grid format {grid_format!r}")


def _grid_summary(grid: GridCover) -> Dict[str, Any]:
    return {
        "covered_fraction": covered_fraction(grid),
        "cells_set": grid.count,
        "full_cover": grid.count == grid.cells.size,
        "caveat": CAVEAT,
    }


@app.command()
def simulate(
    family: str = FamilyOpt,
    c: float = typer.Option(1.0, "--c"),
    alpha: Optional[float] = typer.Option(None, "--alpha"),
    values: Optional[str] = typer.Option(None, "--values"),
    d: int = typer.Option(1, "--d"),
    support_dim: Optional[int] = typer.Option(None, "--support-dim"),
    seed: int = typer.Option(1, "--seed", help="Stream seed"),
    grid_bits: int = typer.Option(16, "--grid-bits", "-m", help="Resolution bits per axis"),
    p: int = typer.Option(256, "--p", help="Tail index"),
    n_max: int = typer.Option(65536, "--n-max", help="Last checkpoint"),
    config: Optional[str] = typer.Option(None, "--config", help="YAML experiment file"),
    grid_out: Optional[str] = GridOutOpt,
    grid_format: str = GridFormatOpt,
    output: Optional[str] = OutputOpt,
):
    """Build a finite-window covering grid and report its covered fraction."""
    experiment = _experiment(
        family, c, alpha, values, d, support_dim, [seed], grid_bits, p, n_max, config=config
    )
    run_config = RunConfig(command="simulate", options=experiment.model_dump(mode="json"))
    grid = experiment_grid(experiment, experiment.seeds[0])
    _write_grid(grid, grid_out, grid_format, run_config)
    _emit(run_config, _grid_summary(grid), output)


@app.command()
def boxdim(
    family: str = FamilyOpt,
    c: float = typer.Option(1.0, "--c"),
    alpha: Optional[float] = typer.Option(None, "--alpha"),
    values: Optional[str] = typer.Option(None, "--values"),
    d: int = typer.Option(1, "--d"),
    support_dim: Optional[int] = typer.Option(None, "--support-dim"),
    seed: int = typer.Option(1, "--seed"),
    grid_bits: int = typer.Option(16, "--grid-bits", "-m"),
    p: int = typer.Option(256, "--p"),
    n_max: int = typer.Option(65536, "--n-max"),
    m_lo: Optional[int] = typer.Option(None, "--m-lo", help="Coarsest box level"),
    m_hi: Optional[int] = typer.Option(None, "--m-hi", help="Finest box level"),
    config: Optional[str] = typer.Option(None, "--config"),
    grid_out: Optional[str] = GridOutOpt,
    grid_format: str = GridFormatOpt,
    output: Optional[str] = OutputOpt,
):
    """Box-counting dimension estimate of a covering grid."""
    experiment = _experiment(
        family, c, alpha, values, d, support_dim, [seed], grid_bits, p, n_max, m_lo, m_hi,
        config=config,
    )
    run_config = RunConfig(command="boxdim", options=experiment.model_dump(mode="json"))
    grid = experiment_grid(experiment, experiment.seeds[0])
    _write_grid(grid, grid_out, grid_format, run_config)
    lo, hi = experiment.box_window()
    results = _grid_summary(grid)
    results["m_lo"], results["m_hi"] = lo, hi
    results["box_counts"] = box_counts(grid, lo, hi)
    try:
        results["box_dim"] = estimate_box_dim(grid, lo, hi)
        results["empty"] = False
    except UndefinedDimensionError:
        results["box_dim"] = 0.0
        results["empty"] = True
    _emit(run_config, results, output)


@app.command()
def hitting(
    d: int = typer.Option(1, "--d"),
    support_dim: Optional[int] = typer.Option(None, "--support-dim"),
    probes: int = typer.Option(16, "--probes", help="Number of uniform random probes"),
    r_hi: float = typer.Option(0.25, "--r-hi", help="Largest radius"),
    ladder_k: int = typer.Option(10, "--ladder-k", help="Number of halving radii"),
    n_max: int = typer.Option(1_000_000, "--n-max", help="Scan limit"),
    window: float = typer.Option(DEFAULT_WINDOW, "--window", help="Deepest fraction of hit radii"),
    seed: int = typer.Option(1, "--seed"),
    fmt: str = typer.Option("csv", "--format", help="Output format: json or csv"),
    output: Optional[str] = OutputOpt,
):
    """Hitting-time ladders at random probes."""
    run_config = RunConfig(
        command="hitting",
        format=fmt,
        options={
            "d": d,
            "support_dim": support_dim,
            "probes": probes,
            "r_hi": r_hi,
            "ladder_k": ladder_k,
            "n_max": n_max,
            "window": window,
            "seed": seed,
        },
    )
    stream = SampleStream(seed, make_measure(d, support_dim))
    points = SampleStream(substream_seed(seed, 0), UniformTorus(d=d)).block(1, probes + 1)
    records = hitting_records(stream, list(points), r_hi, ladder_k, n_max, window)
    results = {"records": records, "pooled": pooled_exponent_stats(records)}
    _emit(run_config, results, output, hitting_csv_header(d), hitting_csv_rows(records))


@app.command("greedy-cover")
def greedy_cover(
    c: float = typer.Option(0.1, "--c"),
    d: int = typer.Option(1, "--d"),
    theta: float = typer.Option(2.0, "--theta", help="Ladder ratio"),
    l: int = typer.Option(3, "--l", help="First level"),
    i_max: int = typer.Option(12, "--i-max", help="Last level"),
    seeds: int = typer.Option(8, "--seeds", help="Number of trials"),
    seed: int = typer.Option(1, "--seed", help="Base seed"),
    check_bits: Optional[int] = typer.Option(
        None, "--check-bits", help="Also run the grid containment check at this resolution"
    ),
    fmt: str = FormatOpt,
    output: Optional[str] = OutputOpt,
):
    """Greedy cover growth against the count recursion."""
    run_config = RunConfig(
        command="greedy-cover",
        format=fmt,
        options={
            "c": c, "d": d, "theta": theta, "l": l, "i_max": i_max, "seeds": seeds,
            "seed": seed, "check_bits": check_bits,
        },
    )

    def trial(trial_seed: int) -> Dict[str, Any]:
        stream = SampleStream(trial_seed, UniformTorus(d=d))
        trace = greedy_cover_trace(stream, c, d, theta, l, i_max)
        escapes = None
        if check_bits is not None:
            escapes = containment_check(trace, stream, check_bits).total_escapes
        return {"trace": trace, "escapes": escapes}

    outcomes = trial_map(trial, trial_seeds(seed, seeds))
    traces = [o["trace"] for o in outcomes]
    results = {
        "traces": traces,
        "mean_fitted_rate": float(np.mean([t.fitted_rate for t in traces])),
        "log_lambda": float(np.log(lambda_matrix(c, d, theta).lam)),
        "recursion": recursion_check(traces, c, d, theta),
        "containment_escapes": [o["escapes"] for o in outcomes],
    }
    rows = ([t.seed, *row] for t in traces for row in t.csv_rows())
    _emit(run_config, results, output, ["seed", *TRACE_COLUMNS], rows)


@app.command("second-moment")
def second_moment(
    c: float = typer.Option(2.0, "--c"),
    d: int = typer.Option(1, "--d"),
    theta: float = typer.Option(4.0, "--theta"),
    l: int = typer.Option(2, "--l"),
    q: int = typer.Option(5, "--q"),
    grid_bits: int = typer.Option(12, "--grid-bits", "-m"),
    trials: int = typer.Option(200, "--trials"),
    s: float = typer.Option(0.1, "--s", help="Energy exponent"),
    seed: int = typer.Option(1, "--seed"),
    strict: bool = typer.Option(
        True, "--strict/--no-strict", help="Fail when the energy hypothesis does not hold"
    ),
    output: Optional[str] = OutputOpt,
):
    """Witness mass and energy moments over independent trials."""
    run_config = RunConfig(
        command="second-moment",
        options={
            "c": c, "d": d, "theta": theta, "l": l, "q": q, "m": grid_bits, "trials": trials,
            "s": s, "seed": seed, "strict": strict,
        },
    )
    report = second_moment_mc(c, d, theta, l, q, grid_bits, trials, s, seed=seed, strict=strict)
    _emit(run_config, report, output)


@app.command("zero-one")
def zero_one(
    family: str = FamilyOpt,
    c: float = typer.Option(1.0, "--c"),
    alpha: Optional[float] = typer.Option(None, "--alpha"),
    values: Optional[str] = typer.Option(None, "--values"),
    d: int = typer.Option(1, "--d"),
    support_dim: Optional[int] = typer.Option(None, "--support-dim"),
    seeds: int = typer.Option(8, "--seeds", help="Number of seeds"),
    seed: int = typer.Option(1, "--seed", help="Base seed"),
    grid_bits: int = typer.Option(14, "--grid-bits", "-m"),
    p: int = typer.Option(256, "--p"),
    n_max: int = typer.Option(65536, "--n-max"),
    m_lo: Optional[int] = typer.Option(None, "--m-lo"),
    m_hi: Optional[int] = typer.Option(None, "--m-hi"),
    statistic: str = typer.Option("box_dim", "--statistic"),
    config: Optional[str] = typer.Option(None, "--config"),
    fmt: str = FormatOpt,
    output: Optional[str] = OutputOpt,
):
    """Spread of a covering statistic across seeds."""
    experiment = _experiment(
        family, c, alpha, values, d, support_dim, trial_seeds(seed, seeds), grid_bits, p, n_max,
        m_lo, m_hi, statistic, config,
    )
    run_config = RunConfig(command="zero-one", format=fmt, options=experiment.model_dump(mode="json"))
    result = zero_one_probe(experiment, experiment.seeds)
    rows = ([o.seed, o.value, o.covered_fraction, o.empty] for o in result.outcomes)
    _emit(run_config, result, output, ["seed", "value", "covered_fraction", "empty"], rows)


@app.command()
def series(
    family: str = FamilyOpt,
    c: float = typer.Option(1.0, "--c"),
    alpha: Optional[float] = typer.Option(None, "--alpha"),
    values: Optional[str] = typer.Option(None, "--values"),
    d: int = typer.Option(1, "--d"),
    support_dim: Optional[int] = typer.Option(None, "--support-dim"),
    n: int = typer.Option(10_000, "--n", help="Number of terms"),
    stride: int = typer.Option(1, "--stride", help="CSV row stride"),
    fmt: str = FormatOpt,
    output: Optional[str] = OutputOpt,
):
    """Partial sums of the dichotomy series."""
    spec = _schedule_spec(family, c, alpha, values)
    run_config = RunConfig(
        command="series",
        format=fmt,
        options={
            "schedule": spec.model_dump(mode="json"), "d": d, "support_dim": support_dim,
            "n": n, "stride": stride,
        },
    )
    schedule, measure = spec.build(d), make_measure(d, support_dim)
    diagnostics = series_partial_diagnostics(schedule, measure, n)
    rows = series_csv_rows(series_terms(schedule, measure, n), stride)
    _emit(run_config, diagnostics, output, SERIES_COLUMNS, rows)


@app.command()
def version():
    """Show version information."""
    typer.echo(f"ucover {__version__}")


def run(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and return its exit code.

    Args:
        argv: Arguments after the program name (default: sys.argv[1:])

    Returns:
        0 on success, 1 on a ucover error, 2 on a resource limit, 64 on bad usage
    """
    args = sys.argv[1:] if argv is None else list(argv)
    try:
        result = app(args=args, prog_name="ucover", standalone_mode=False)
    except click.UsageError as e:
        e.show(file=sys.stderr)
        return USAGE_EXIT
    except ValidationError as e:
        console.print(f"[red]Invalid parameters:[/red] {e}")
        return USAGE_EXIT
    except UcoverError as e:
        console.print(f"[red]Error:[/red] {e}")
        logger.debug("Run failed", exc_info=True)
        return exit_code_for(e)
    except (FileNotFoundError, ValueError) as e:
        console.print(f"[red]Error:[/red] {e}")
        return 1
    except click.exceptions.Abort:
        return 1
    return result if isinstance(result, int) else 0


def main() -> None:
    """Console-script entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
