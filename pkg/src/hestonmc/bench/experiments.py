"""Experiment runners: break frequencies, shared-noise RMS, price comparisons."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..baselines import break_interval_masses, simulate_baseline
from ..basis import uniform_basis
from ..engine import EngineConfig, simulate
from ..params import ModelParams, closest_explicit, derive_constants, validate
from ..payoffs import Instrument, make_hook
from ..pricing import PriceReport, run_pricer
from ..quadrature import weights
from ..rng import stream_bases
from .rms_kernel import N_REFINED, shared_noise_paths


def timed_median(fn, warmup: int = 3, reps: int = 5):
    """Median wall time of ``fn()`` over ``reps`` runs after ``warmup`` runs."""
    for _ in range(warmup):
        fn()
    times = []
    result = None
    for _ in range(reps):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return result, float(np.median(times))


@dataclass
class BreakFrequencyResult:
    scheme: str
    n_paths: int
    steps_per_period: int
    periods: int
    masses: np.ndarray  # per-interval first-break mass, survivors last

    def rows(self, head: int = 5):
        out = []
        for t in range(1, head + 1):
            out.append((f"tau in ({t - 1},{t}]", self.masses[t - 1]))
        out.append((f"tau > {self.periods}", self.masses[-1]))
        return out


def run_break_frequency(
    params: ModelParams,
    scheme: str,
    n_paths: int,
    steps_per_period: int,
    periods: int = 50,
    seed: int = 0,
) -> BreakFrequencyResult:
    """First-break interval masses for a baseline scheme.

    The factorized engines keep the variance nonnegative by construction, so
    asking for their break frequency is rejected outright.
    """
    if scheme in ("explicit", "weighted"):
        raise ValueError("explicit engine cannot break: variance is a sum of squares")
    path = simulate_baseline(params, scheme, periods, steps_per_period, n_paths, seed)
    masses = break_interval_masses(path.break_time, periods)
    return BreakFrequencyResult(scheme, n_paths, steps_per_period, periods, masses)


@dataclass
class RmsResult:
    """RMS against the shared-noise ground truth plus production timings."""

    labels: list[str]
    rms: dict[str, float]
    times: dict[str, float] = field(default_factory=dict)
    fine_steps: int = 0
    n_paths: int = 0


def _rms(s, v, gt_s, gt_v) -> float:
    ds = s[1:] - gt_s[1:]
    dv = v[1:] - gt_v[1:]
    return float(np.sqrt(np.mean(np.sum(ds * ds + dv * dv, axis=0))))


def run_rms(
    params: ModelParams,
    periods: int = 10,
    n_paths: int = 500,
    fine: int = 6000,
    coarse_ms: tuple[int, ...] = (200, 400, 1000),
    explicit_specs: tuple[tuple[str, int], ...] = (
        ("trapezoidal", 1),
        ("trapezoidal", 6),
        ("simpson13", 6),
        ("simpson38", 6),
    ),
    seed: int = 0,
    time_paths: int = 10_000,
    timing_reps: tuple[int, int] = (3, 5),
) -> RmsResult:
    """Pathwise RMS of every scheme against the fine-mesh ground truth.

    Accuracy uses the shared-noise protocol (common Brownian increments for
    ground truth, coarse schemes, and the factor engine with its fine-grid
    price integrals).  Timings run the production code paths instead - the
    explicit engine at its configured substep count without refinement - so
    the reported seconds reflect what each scheme costs in normal use.
    """
    validate(params)
    ce = closest_explicit(params)
    if ce.n != 1 or not ce.exact:
        raise ValueError("shared-noise protocol requires the one-factor exact case")
    for m in coarse_ms:
        if fine % m:
            raise ValueError(f"fine grid {fine} must be divisible by coarse M={m}")
    if fine % N_REFINED:
        raise ValueError(f"fine grid {fine} must be divisible by {N_REFINED}")

    n_m = len(coarse_ms)
    bases = stream_bases(seed, np.arange(n_paths, dtype=np.uint64))
    gt_s = np.empty((periods + 1, n_paths))
    gt_v = np.empty((periods + 1, n_paths))
    eul_s = np.empty((n_m, periods + 1, n_paths))
    eul_v = np.empty_like(eul_s)
    mil_s = np.empty_like(eul_s)
    mil_v = np.empty_like(eul_s)
    ex_grid = np.empty((periods, N_REFINED + 1, n_paths))
    ex_intsqdb = np.empty((periods, n_paths))
    shared_noise_paths(
        bases, periods, fine, params.mu, params.nu, params.rho, params.varrho,
        params.kappa, params.s0, params.v0, np.asarray(coarse_ms, dtype=np.int64),
        gt_s, gt_v, eul_s, eul_v, mil_s, mil_v, ex_grid, ex_intsqdb,
    )

    labels = []
    rms = {}
    for i, m in enumerate(coarse_ms):
        labels.append(f"euler_{m}")
        rms[f"euler_{m}"] = _rms(eul_s[i], eul_v[i], gt_s, gt_v)
    for i, m in enumerate(coarse_ms):
        labels.append(f"milstein_{m}")
        rms[f"milstein_{m}"] = _rms(mil_s[i], mil_v[i], gt_s, gt_v)

    consts = derive_constants(params, ce)
    ex_v = np.vstack([gt_v[:1] * 0 + params.v0, ex_grid[:, N_REFINED, :]])
    for rule, m_sub in explicit_specs:
        w = weights(rule, N_REFINED)
        int_v = np.tensordot(w, ex_grid, axes=(0, 1))  # (periods, N)
        s = np.empty_like(gt_s)
        s[0] = params.s0
        for t in range(1, periods + 1):
            s[t] = s[t - 1] * np.exp(
                consts.a * ex_intsqdb[t - 1]
                + consts.b
                + consts.c * int_v[t - 1]
                + consts.d * (ex_v[t] - ex_v[t - 1])
            )
        label = f"explicit_{rule}_{m_sub}"
        labels.append(label)
        rms[label] = _rms(s, ex_v, gt_s, gt_v)

    # production-path timings (engine work only, no shared-noise bookkeeping)
    times = {}
    warmup, reps = timing_reps
    for m in coarse_ms:
        _, sec = timed_median(
            lambda m=m: simulate_baseline(params, "euler", periods, m, time_paths, seed),
            warmup, reps,
        )
        times[f"euler_{m}"] = sec
        _, sec = timed_median(
            lambda m=m: simulate_baseline(params, "milstein", periods, m, time_paths, seed),
            warmup, reps,
        )
        times[f"milstein_{m}"] = sec
    for rule, m_sub in explicit_specs:
        cfg = EngineConfig(
            n_particles=time_paths, periods=periods, substeps=m_sub, rule=rule,
            mode="explicit", refine=1,
        )
        _, sec = timed_median(lambda cfg=cfg: simulate(params, cfg, seed), warmup, reps)
        times[f"explicit_{rule}_{m_sub}"] = sec
    return RmsResult(labels=labels, rms=rms, times=times, fine_steps=fine, n_paths=n_paths)


@dataclass
class GainReport:
    """Runtime (or accuracy) ratio of a reference method to a candidate."""

    reference: str
    candidate: str
    metric: str
    reference_value: float
    candidate_value: float
    reference_time: float
    candidate_time: float

    @property
    def gain(self) -> float:
        return self.reference_time / self.candidate_time


@dataclass
class PriceComparisonEntry:
    label: str
    report: PriceReport
    mean_price: float
    mean_abs_error: float | None
    seeds: list[int]


def baseline_pathset(
    params: ModelParams,
    scheme: str,
    periods: int,
    steps_per_period: int,
    n_paths: int,
    seed: int,
    track_average: bool = False,
):
    """Integer-time sections of a baseline scheme packaged for the pricers.

    Variance sections are floored at zero (full truncation) before they feed
    basis evaluations.
    """
    from ..engine import EngineConfig as _Cfg, PathSet

    path = simulate_baseline(params, scheme, periods, steps_per_period, n_paths, seed)
    r = None
    if track_average:
        r = np.zeros_like(path.s)
        for t in range(1, periods + 1):
            r[t] = ((t - 1) * r[t - 1] + path.s[t]) / t
    cfg = _Cfg(
        n_particles=n_paths, periods=periods, substeps=steps_per_period,
        mode="weighted", track_average=track_average,
    )
    return PathSet(
        s=path.s, v=np.maximum(path.v, 0.0), l=None,
        eta=np.full(n_paths, periods, dtype=np.int64), r=r, z=None,
        seed=seed, params=params, config=cfg,
    )


def price_once(
    params: ModelParams,
    inst: Instrument,
    engine: str,
    pricer: str,
    n_particles: int,
    substeps: int,
    periods: int,
    per_dim: int,
    gamma: float,
    seed: int,
    rule: str = "trapezoidal",
    epsilon: float = 1e-4,
    refine: int | str = "auto",
    basis_kind: str = "laguerre",
    strict: bool = False,
) -> PriceReport:
    """Simulate one path set and price it; engine+pricer wall time recorded.

    ``engine`` may be explicit/weighted (the factor engine) or euler/milstein
    (baseline discretizations at ``substeps`` steps per period).
    """
    dims = 3 if inst.on_average else 2
    basis = uniform_basis(basis_kind, per_dim, dims)
    t0 = time.perf_counter()
    if engine in ("euler", "milstein"):
        paths = baseline_pathset(
            params, engine, periods, substeps, n_particles, seed,
            track_average=inst.on_average,
        )
    else:
        cfg = EngineConfig(
            n_particles=n_particles, periods=periods, substeps=substeps, rule=rule,
            epsilon=epsilon, mode=engine, track_average=inst.on_average, refine=refine,
        )
        hook = make_hook(inst, params.mu, periods)
        paths = simulate(params, cfg, seed, payoff_hook=hook)
    report = run_pricer(paths, basis, inst, method=pricer, gamma=gamma, strict=strict)
    report.wall_time_s = time.perf_counter() - t0
    if engine in ("euler", "milstein"):
        report.engine_mode = engine
    return report


def run_price_comparison(
    params: ModelParams,
    inst: Instrument,
    variants: list[dict],
    seeds: list[int],
    ground_truth: float | None = None,
    reference: str | None = None,
) -> tuple[list[PriceComparisonEntry], list[GainReport]]:
    """Run each variant over the seed list; report mean prices, errors, gains.

    ``variants`` are keyword dictionaries for ``price_once`` plus a 'label'.
    The mean absolute error follows the per-seed |P - ground_truth| average;
    gains are wall-time ratios of the reference variant to each other one.
    """
    entries = []
    for var in variants:
        var = dict(var)
        label = var.pop("label")
        prices = []
        times = []
        last = None
        for seed in seeds:
            rep = price_once(params, inst, seed=seed, **var)
            prices.append(rep.price)
            times.append(rep.wall_time_s)
            last = rep
        mean_price = float(np.mean(prices))
        mae = (
            float(np.mean([abs(p - ground_truth) for p in prices]))
            if ground_truth is not None
            else None
        )
        last.wall_time_s = float(np.mean(times))
        entries.append(PriceComparisonEntry(label, last, mean_price, mae, list(seeds)))

    gains = []
    if reference is not None:
        ref = next(e for e in entries if e.label == reference)
        for entry in entries:
            if entry.label == reference:
                continue
            gains.append(
                GainReport(
                    reference=reference,
                    candidate=entry.label,
                    metric="mean_abs_error",
                    reference_value=ref.mean_abs_error or float("nan"),
                    candidate_value=entry.mean_abs_error or float("nan"),
                    reference_time=ref.report.wall_time_s,
                    candidate_time=entry.report.wall_time_s,
                )
            )
    return entries, gains
