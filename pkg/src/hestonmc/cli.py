"""Command-line interface: simulate, price, bench, reproduce.

Exit codes: 0 success, 2 configuration error, 3 numerical failure (a
singular regression under --strict).  Environment overrides:
HESTONMC_SEED (base seed) and HESTONMC_THREADS (numba thread count).
"""

from __future__ import annotations

import os
import sys

import click
import numpy as np

from .bench.configs import ConfigError, ExperimentConfig, load_config
from .bench.experiments import price_once, run_break_frequency, run_rms
from .bench.report import (
    BREAK_COLUMNS,
    PRICE_COLUMNS,
    RMS_COLUMNS,
    price_report_row,
    write_csv,
    write_json,
)
from .bench.tables import REPRODUCE_TABLES, run_table
from .engine import EngineConfig, dump_paths, simulate
from .params import ModelParams, ParameterError
from .payoffs import Instrument, make_hook
from .pricing import SingularRegressionError

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _apply_env() -> int | None:
    threads = os.environ.get("HESTONMC_THREADS")
    if threads:
        import numba

        numba.set_num_threads(int(threads))
    seed = os.environ.get("HESTONMC_SEED")
    return int(seed) if seed else None


def _config_from(ctx_config, overrides) -> ExperimentConfig:
    try:
        cfg = load_config(ctx_config) if ctx_config else ExperimentConfig()
        for key, val in overrides.items():
            if val is None:
                continue
            if key in ("mu", "nu", "rho", "varrho", "kappa", "s0", "v0"):
                from dataclasses import asdict

                fields = asdict(cfg.params)
                fields[key] = val
                cfg.params = ModelParams(**fields)
            elif key == "instrument":
                cfg.instrument = Instrument(kind=val, strike=cfg.instrument.strike)
            elif key == "strike":
                cfg.instrument = Instrument(
                    kind=cfg.instrument.kind, strike=val,
                    lockout=cfg.instrument.lockout,
                )
            elif key == "seed":
                cfg.seeds = [val]
            elif key == "refine":
                cfg.refine = val if val == "auto" else int(val)
            else:
                setattr(cfg, key, val)
        return cfg
    except (ConfigError, ParameterError, ValueError) as exc:
        raise click.exceptions.Exit(EXIT_CONFIG) from _echo_err(exc)


def _echo_err(exc) -> None:
    click.echo(f"error: {exc}", err=True)


_MODEL_OPTIONS = [
    click.option("--config", "config_path", type=str, default=None,
                 help="Flat key=value or JSON config file."),
    click.option("--mu", type=float, default=None),
    click.option("--nu", type=float, default=None),
    click.option("--rho", type=float, default=None),
    click.option("--varrho", type=float, default=None),
    click.option("--kappa", type=float, default=None),
    click.option("--s0", type=float, default=None),
    click.option("--v0", type=float, default=None),
    click.option("--seed", type=int, default=None),
    click.option("--particles", "n_particles", type=int, default=None),
    click.option("--substeps", type=int, default=None),
    click.option("--periods", type=int, default=None),
    click.option("--rule", type=click.Choice(["trapezoidal", "simpson13", "simpson38"]),
                 default=None),
    click.option("--epsilon", type=float, default=None),
    click.option("--refine", type=str, default=None,
                 help="Internal substep refinement: integer or 'auto'."),
]


def _add_options(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return wrap


@click.group()
def main():
    """Monte Carlo engines and pricers for path-dependent options."""
    _apply_env()


@main.command()
@_add_options(_MODEL_OPTIONS)
@click.option("--engine", type=click.Choice(["explicit", "weighted"]), default=None)
@click.option("--instrument", type=str, default=None,
              help="Track payoffs/averages for this instrument while simulating.")
@click.option("--strike", type=float, default=None)
@click.option("--out", type=str, default="paths.csv")
@click.option("--format", "fmt", type=click.Choice(["csv", "binary"]), default="csv")
def simulate_cmd(config_path, engine, instrument, strike, out, fmt, **overrides):
    """Simulate a path set and dump it (columns j,t,s,v,l,eta_flag,r)."""
    cfg = _config_from(config_path, overrides)
    if engine:
        cfg.engine = engine
    if instrument:
        cfg.instrument = Instrument(kind=instrument, strike=strike or 100.0)
    env_seed = _apply_env()
    seed = cfg.seeds[0] if cfg.seeds else (env_seed or 0)
    try:
        econfig = EngineConfig(
            n_particles=cfg.n_particles, periods=cfg.periods, substeps=cfg.substeps,
            rule=cfg.rule, epsilon=cfg.epsilon, mode=cfg.engine,
            track_average=cfg.instrument.on_average if instrument else False,
            refine=cfg.refine,
        )
        hook = make_hook(cfg.instrument, cfg.params.mu, cfg.periods) if instrument else None
        paths = simulate(cfg.params, econfig, seed, payoff_hook=hook)
    except (ParameterError, ValueError) as exc:
        _echo_err(exc)
        sys.exit(EXIT_CONFIG)
    dump_paths(paths, out, fmt=fmt)
    click.echo(f"wrote {out} ({paths.n_particles} particles x {paths.periods + 1} times, "
               f"eta triggers: {paths.eta_trigger_count})")


main.add_command(simulate_cmd, name="simulate")


@main.command(name="price")
@_add_options(_MODEL_OPTIONS)
@click.option("--engine", type=click.Choice(["explicit", "weighted", "euler", "milstein"]),
              default=None)
@click.option("--pricer", type=click.Choice(["sa", "lsm"]), default=None)
@click.option("--instrument", type=str, default=None)
@click.option("--strike", type=float, default=None)
@click.option("--per-dim", type=int, default=None, help="Basis functions per dimension.")
@click.option("--basis", type=click.Choice(["laguerre", "haar"]), default=None)
@click.option("--gamma", type=float, default=None)
@click.option("--strict", is_flag=True, default=False,
              help="Exit 3 if the regression matrix is singular.")
@click.option("--json", "as_json", is_flag=True, default=False)
@click.option("--csv", "as_csv", is_flag=True, default=False)
@click.option("--out", type=str, default=None)
def price_cmd(config_path, engine, pricer, instrument, strike, per_dim, basis,
              gamma, strict, as_json, as_csv, out, **overrides):
    """Price an instrument with the SA or LSM backward induction."""
    cfg = _config_from(config_path, overrides)
    for key, val in (("engine", engine), ("pricer", pricer), ("per_dim", per_dim),
                     ("basis", basis), ("gamma", gamma)):
        if val is not None:
            setattr(cfg, key, val)
    if instrument or strike:
        cfg.instrument = Instrument(
            kind=instrument or cfg.instrument.kind,
            strike=strike or cfg.instrument.strike,
        )
    cfg.strict = cfg.strict or strict
    env_seed = _apply_env()
    seed = cfg.seeds[0] if cfg.seeds else (env_seed or 0)
    try:
        report = price_once(
            cfg.params, cfg.instrument, engine=cfg.engine, pricer=cfg.pricer,
            n_particles=cfg.n_particles, substeps=cfg.substeps, periods=cfg.periods,
            per_dim=cfg.per_dim, gamma=cfg.gamma, seed=seed, rule=cfg.rule,
            epsilon=cfg.epsilon, refine=cfg.refine, basis_kind=cfg.basis,
            strict=cfg.strict,
        )
    except SingularRegressionError as exc:
        _echo_err(exc)
        sys.exit(EXIT_NUMERICAL)
    except (ParameterError, ValueError) as exc:
        _echo_err(exc)
        sys.exit(EXIT_CONFIG)
    row = price_report_row(report)
    if out and as_json:
        write_json(out, dict(zip(PRICE_COLUMNS, row)))
    elif out:
        write_csv(out, PRICE_COLUMNS, [row])
    click.echo(
        f"{report.method} {report.engine_mode} N={report.n_particles} "
        f"M={report.substeps} J={report.n_basis}: price {report.price:.6f} "
        f"+- {report.std_error:.6f} ({report.wall_time_s:.2f}s)"
    )
    if report.singular:
        click.echo(
            f"note: singular regression at {len(report.singular_times)} times "
            f"(max condition {report.condition_max:.3g})"
        )


@main.group()
def bench():
    """Benchmark experiments: break frequencies, RMS, canned tables."""


@bench.command(name="break")
@_add_options(_MODEL_OPTIONS)
@click.option("--scheme", type=click.Choice(["euler", "milstein"]), required=True)
@click.option("--steps", "steps_per_period", type=int, default=100)
@click.option("--out", type=str, default=None)
def bench_break(config_path, scheme, steps_per_period, out, **overrides):
    """First-break interval masses for a baseline scheme."""
    cfg = _config_from(config_path, overrides)
    env_seed = _apply_env()
    seed = cfg.seeds[0] if cfg.seeds else (env_seed or 0)
    res = run_break_frequency(
        cfg.params, scheme, cfg.n_particles, steps_per_period,
        periods=cfg.periods, seed=seed,
    )
    rows = [
        (scheme, cfg.n_particles, steps_per_period, interval, repr(mass))
        for interval, mass in res.rows()
    ]
    if out:
        write_csv(out, BREAK_COLUMNS, rows)
    for _, _, _, interval, mass in rows:
        click.echo(f"{interval}: {float(mass):.6f}")


@bench.command(name="rms")
@_add_options(_MODEL_OPTIONS)
@click.option("--paths", "n_paths", type=int, default=500)
@click.option("--fine", type=int, default=6000)
@click.option("--out", type=str, default=None)
def bench_rms(config_path, n_paths, fine, out, **overrides):
    """Shared-noise RMS comparison with production timings."""
    cfg = _config_from(config_path, overrides)
    env_seed = _apply_env()
    seed = cfg.seeds[0] if cfg.seeds else (env_seed or 0)
    try:
        res = run_rms(cfg.params, periods=cfg.periods if cfg.periods != 50 else 10,
                      n_paths=n_paths, fine=fine, seed=seed)
    except ValueError as exc:
        _echo_err(exc)
        sys.exit(EXIT_CONFIG)
    rows = [
        (label, repr(res.rms[label]), repr(res.times.get(label, float("nan"))))
        for label in res.labels
    ]
    if out:
        write_csv(out, RMS_COLUMNS, rows)
    for label in res.labels:
        click.echo(f"{label}: rms {res.rms[label]:.5f} time {res.times.get(label, float('nan')):.4f}s")


@bench.command(name="table")
@click.argument("table_id")
@click.option("--out", "out_dir", type=str, default="reports")
@click.option("--seed", type=int, default=None)
@click.option("--json", "as_json", is_flag=True, default=False)
def bench_table(table_id, out_dir, seed, as_json):
    """Run one canned table configuration (same ids as `reproduce`)."""
    _reproduce_impl(table_id, out_dir, seed, as_json)


@main.command(name="reproduce")
@click.argument("table_id")
@click.option("--out", "out_dir", type=str, default="reports")
@click.option("--seed", type=int, default=None)
@click.option("--json", "as_json", is_flag=True, default=False)
def reproduce(table_id, out_dir, seed, as_json):
    """Reproduce a canned benchmark table (table1 .. table15)."""
    _reproduce_impl(table_id, out_dir, seed, as_json)


def _reproduce_impl(table_id, out_dir, seed, as_json):
    env_seed = _apply_env()
    if seed is None:
        seed = env_seed if env_seed is not None else 0
    try:
        result = run_table(table_id, out_dir, seed=seed,
                           fmt="json" if as_json else "csv")
    except KeyError as exc:
        _echo_err(exc)
        sys.exit(EXIT_CONFIG)
    click.echo(f"{table_id}: {result['description']}")
    click.echo(f"notes: {result['notes']}")
    for path in result["files"]:
        click.echo(f"wrote {path}")


@main.command(name="tables")
def list_tables():
    """List the reproducible table ids."""
    for tid in sorted(REPRODUCE_TABLES, key=lambda x: int(x.replace("table", ""))):
        click.echo(f"{tid}: {REPRODUCE_TABLES[tid]['description']}")


if __name__ == "__main__":
    main()
