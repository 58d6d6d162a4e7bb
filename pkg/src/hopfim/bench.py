"""Batch experiment harness: instance grids, statistics, bootstrap CIs.

The reported final energy of a trial is the integer unsatisfied-clause count
of the binarized final state, so "solved" means exactly zero unsatisfied
clauses and cross-model comparisons are exact. Per-trial initial conditions
derive from SeedSequence(base_seed, spawn_key=(instance_index, trial_index)),
so reports are reproducible for a fixed config regardless of worker count.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from itertools import repeat
from pathlib import Path

import numpy as np

from hopfim.binarization import BinarizationStrategy, apply_strategy, binarize, phase_distances
from hopfim.cnf_io import DimacsError, parse_dimacs_file
from hopfim.dynamics import IntegratorConfig, LocalDynamicsParams, initialize, integrate
from hopfim.pubo_map import formula_to_pubo, pubo_eval_batch


@dataclass(frozen=True)
class BenchConfig:
    instances: tuple[str, ...]
    trials: int = 100
    model: str = "proposed"
    strategy: BinarizationStrategy = BinarizationStrategy("none")
    integrator: IntegratorConfig = IntegratorConfig()
    params: LocalDynamicsParams = LocalDynamicsParams()
    base_seed: int = 0
    init_mode: str = "random_phase_unit_amp"
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


@dataclass
class InstanceResult:
    name: str
    n: int
    m: int
    unsat: np.ndarray      # (trials,) int final unsatisfied-clause counts
    solved: np.ndarray     # (trials,) bool
    status: np.ndarray     # (trials,) integrator status codes
    sharpness: np.ndarray  # (trials,) fraction of oscillators near the axis
    phases: np.ndarray     # (trials, n) final phases in (-pi, pi]
    wall_time: float

    @property
    def solvable(self) -> bool:
        return bool(self.solved.any())


@dataclass
class BenchReport:
    config: BenchConfig
    instances: list[InstanceResult] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def total_trials(self) -> int:
        return sum(len(r.unsat) for r in self.instances)

    @property
    def all_unsat(self) -> np.ndarray:
        if not self.instances:
            return np.zeros(0, dtype=int)
        return np.concatenate([r.unsat for r in self.instances])

    @property
    def solvable_flags(self) -> np.ndarray:
        return np.array([r.solvable for r in self.instances], dtype=float)

    @property
    def solvable_fraction(self) -> float:
        flags = self.solvable_flags
        return float(flags.mean()) if len(flags) else 0.0

    def solvable_ci(self, resamples: int = 10000, level: float = 0.99):
        return bootstrap_ci(self.solvable_flags, "fraction", resamples, level,
                            seed=self.config.base_seed)


def _instance_model(config: BenchConfig, problem, spec_override=None):
    """Resolve the model for one instance, optionally swapping in custom
    potential weights (only meaningful for non-scheduled strategies)."""
    model = apply_strategy(config.strategy, config.model, problem,
                           config.integrator)
    if spec_override is not None and config.model != "baseline":
        model = replace(model, spec=spec_override)
    return model


def _run_instance(config: BenchConfig, index: int,
                  spec_override=None) -> InstanceResult:
    path = Path(config.instances[index])
    formula = parse_dimacs_file(path)
    problem = formula_to_pubo(formula)
    model = _instance_model(config, problem, spec_override)
    t0 = time.perf_counter()
    inits = np.stack([
        initialize(problem.n,
                   np.random.SeedSequence(config.base_seed,
                                          spawn_key=(index, trial)),
                   config.init_mode)
        for trial in range(config.trials)
    ])
    if config.model == "kuramoto":
        inits = -np.angle(inits)
    res = integrate(model, problem, config.integrator, inits,
                    params=config.params,
                    record_stride=config.integrator.n_steps)
    final = res.final
    if config.model == "kuramoto":
        final = np.exp(-1j * final)
    spins = binarize(final)
    energies = pubo_eval_batch(problem, spins)
    rounded = np.rint(energies)
    if np.max(np.abs(energies - rounded)) > 1e-9:
        raise AssertionError("binarized energy is not an integer clause count")
    unsat = rounded.astype(int)
    solved = (unsat == 0) & (res.status == 0)
    dist = phase_distances(final)
    sharp = np.mean(dist <= 0.2, axis=1)
    wall = time.perf_counter() - t0
    return InstanceResult(
        name=path.name, n=formula.num_vars, m=formula.num_clauses,
        unsat=unsat, solved=solved, status=res.status.copy(),
        sharpness=sharp, phases=np.angle(final), wall_time=wall)


def run_bench(config: BenchConfig, spec_override=None) -> BenchReport:
    """Run the instance x trial grid. Unreadable or malformed instance files
    are skipped with a warning entry."""
    report = BenchReport(config=config)
    readable = []
    for i, path in enumerate(config.instances):
        try:
            parse_dimacs_file(path)
            readable.append(i)
        except (OSError, DimacsError) as err:
            report.warnings.append(f"{path}: {err}")
    if config.jobs > 1 and len(readable) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_instance, repeat(config), readable,
                                    repeat(spec_override)))
    else:
        results = [_run_instance(config, i, spec_override) for i in readable]
    report.instances.extend(results)
    return report


def bootstrap_ci(samples, statistic: str = "mean", resamples: int = 10000,
                 level: float = 0.99, seed: int = 0) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean (or a 0/1 fraction)."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValueError("empty sample")
    if statistic not in ("mean", "fraction"):
        raise ValueError(f"unknown statistic {statistic!r}")
    if statistic == "fraction" and not np.all(np.isin(samples, (0.0, 1.0))):
        raise ValueError("fraction statistic expects 0/1 samples")
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    rng = np.random.default_rng(seed)
    n = samples.size
    idx = rng.integers(0, n, size=(resamples, n))
    stats = samples[idx].mean(axis=1)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(stats, [alpha, 1.0 - alpha])
    return float(lo), float(hi)


def energy_cdf(report_or_values) -> list[tuple[float, float]]:
    """(energy level, cumulative fraction) pairs, monotone and ending at 1."""
    if isinstance(report_or_values, BenchReport):
        values = report_or_values.all_unsat
    else:
        values = np.asarray(report_or_values)
    if values.size == 0:
        raise ValueError("no trial energies")
    levels, counts = np.unique(values, return_counts=True)
    cum = np.cumsum(counts) / values.size
    return [(float(lv), float(c)) for lv, c in zip(levels, cum)]


def cdf_at(report_or_values, level: float = 0.0) -> float:
    """Cumulative fraction of trials at or below an energy level."""
    pairs = energy_cdf(report_or_values)
    frac = 0.0
    for lv, c in pairs:
        if lv <= level:
            frac = c
    return frac


def write_report(report: BenchReport, outdir) -> None:
    """Write report.json, summary.csv, hist.csv, cdf.csv, phases.csv.

    Column definitions are documented in the README.
    """
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)

    doc = {
        "config": asdict(report.config),
        "warnings": report.warnings,
        "aggregates": {
            "instances": len(report.instances),
            "total_trials": report.total_trials,
            "solvable_fraction": report.solvable_fraction,
            "solvable_fraction_ci99": (report.solvable_ci()
                                       if report.instances else None),
        },
        "instances": [
            {
                "name": r.name, "n": r.n, "m": r.m,
                "wall_time_s": r.wall_time,
                "unsat": r.unsat.tolist(),
                "solved": r.solved.astype(int).tolist(),
                "status": r.status.astype(int).tolist(),
                "sharpness": r.sharpness.tolist(),
            }
            for r in report.instances
        ],
    }
    (out / "report.json").write_text(json.dumps(doc, indent=1))

    with open(out / "summary.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["instance", "n", "m", "trials", "solved_trials",
                    "solvable", "min_unsat", "mean_unsat", "median_sharpness",
                    "wall_time_s"])
        for r in report.instances:
            w.writerow([r.name, r.n, r.m, len(r.unsat),
                        int(r.solved.sum()), int(r.solvable),
                        int(r.unsat.min()), float(r.unsat.mean()),
                        float(np.median(r.sharpness)), f"{r.wall_time:.3f}"])

    with open(out / "hist.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["energy", "count"])
        if report.instances:
            levels, counts = np.unique(report.all_unsat, return_counts=True)
            for lv, c in zip(levels, counts):
                w.writerow([int(lv), int(c)])

    with open(out / "cdf.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["energy", "cumulative_fraction"])
        if report.instances:
            for lv, c in energy_cdf(report):
                w.writerow([int(lv), c])

    with open(out / "phases.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["instance", "trial", "oscillator", "phase",
                    "axis_distance"])
        for r in report.instances:
            for trial in range(r.phases.shape[0]):
                for osc in range(r.phases.shape[1]):
                    phase = r.phases[trial, osc]
                    a = abs(phase)
                    w.writerow([r.name, trial, osc, f"{phase:.6f}",
                                f"{min(a, np.pi - a):.6f}"])
