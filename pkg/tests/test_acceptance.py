"""End-to-end acceptance checks.

Each test covers one numbered criterion and prints a single [PASS]/[FAIL]
line to the real terminal (capture is suspended around the print) so the
verdicts are visible in any pytest run. Tolerances and runtime caps are
asserted, not just reported. Criteria 7 and 8 run the full benchmark
protocol and take a few minutes each; everything else is seconds.
"""

import sys
import time

import numpy as np
import pytest

from hopfim.bench import BenchConfig, bootstrap_ci, cdf_at, run_bench
from hopfim.binarization import BinarizationStrategy
from hopfim.cnf_io import parse_dimacs_file
from hopfim.dynamics import (IntegratorConfig, ModelKind, initialize,
                             integrate, rhs_kuramoto, rhs_proposed)
from hopfim.instances import random_formula
from hopfim.oracle import verify_mapping
from hopfim.potentials import (PotentialSpec, p_potential, phase_energy,
                               phase_hessian_quadratic, potential_energy,
                               wirtinger_gradient)
from hopfim.pubo_map import PuboProblem, formula_to_pubo

from .support import fd_wirtinger, random_problem, random_state


@pytest.fixture(autouse=True)
def _verdict_channel(capsys):
    _CAPSYS.append(capsys)
    yield
    _CAPSYS.pop()


_CAPSYS: list = []


def _verdict(num: int, label: str, ok: bool, detail: str = "") -> bool:
    tag = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    line = f"[{tag}] criterion {num}: {label}{suffix}"
    if _CAPSYS:
        with _CAPSYS[-1].disabled():
            print(line, file=sys.stdout, flush=True)
    else:
        print(line, file=sys.__stdout__, flush=True)
    return ok


PROTOCOL = IntegratorConfig(method="rk4", dt=0.01, t_final=136.0)


# -------------------------------------------------------------- criterion 1

def test_criterion_1_mapping_exactness(uf20_files):
    """Polynomial energy equals the unsatisfied-clause count on every
    assignment: 200 random small formulas plus 5 bundled n=20 instances,
    exhaustively, exactly, in under 2 minutes."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(20260819)
    bad = 0
    for _ in range(200):
        n = int(rng.integers(5, 13))
        m = int(rng.integers(1, 61))
        if not verify_mapping(random_formula(n, m, rng.integers(2**63))):
            bad += 1
    for path in uf20_files[:5]:
        if not verify_mapping(parse_dimacs_file(path)):
            bad += 1
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed < 120.0
    assert _verdict(1, "exact clause-count mapping", ok,
                    f"205 formulas, {elapsed:.1f}s"), \
        f"{bad} mapping mismatches, elapsed {elapsed:.1f}s"


# -------------------------------------------------------------- criterion 2

def test_criterion_2_monotone_descent(uf20_files):
    """The recorded descent quantity of the proposed model never increases
    by more than 1e-9 * (1 + |E|) per step: 20 instances, 10 seeds each,
    noise-free RK4 at dt=0.01, under 5 minutes."""
    t0 = time.perf_counter()
    worst = -np.inf
    violations = 0
    for i, path in enumerate(uf20_files):
        problem = formula_to_pubo(parse_dimacs_file(path))
        inits = np.stack([
            initialize(problem.n, np.random.SeedSequence(0, spawn_key=(i, s)))
            for s in range(10)])
        res = integrate(ModelKind("proposed", PotentialSpec.proposed()),
                        problem, PROTOCOL, inits, record_stride=1)
        assert np.all(res.status == 0)
        e = res.energies
        rise = np.diff(e, axis=1) - 1e-9 * (1.0 + np.abs(e[:, :-1]))
        worst = max(worst, float(rise.max()))
        violations += int((rise > 0).sum())
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 300.0
    assert _verdict(2, "monotone energy descent", ok,
                    f"200 trajectories, worst margin {worst:.2e}, "
                    f"{elapsed:.1f}s"), \
        f"{violations} increases beyond tolerance, elapsed {elapsed:.1f}s"


# -------------------------------------------------------------- criterion 3

def test_criterion_3_baseline_oscillates():
    """On the pure triple-product energy the direct-substitution model's
    Re(H) rises by more than 1e-3 somewhere within T=50 for at least 9 of
    10 seeds, while the proposed model stays monotone."""
    problem = PuboProblem(n=3, triples={(0, 1, 2): 1.0})
    cfg = IntegratorConfig(method="rk4", dt=0.01, t_final=50.0)
    inits = np.stack([initialize(3, s) for s in range(10)])

    res_b = integrate(ModelKind("baseline", PotentialSpec.proposed()),
                      problem, cfg, inits, record_stride=1)
    rises = np.nanmax(np.diff(res_b.energies, axis=1), axis=1)
    oscillating = int((rises > 1e-3).sum())

    res_p = integrate(ModelKind("proposed", PotentialSpec.proposed()),
                      problem, cfg, inits, record_stride=1)
    assert np.all(res_p.status == 0)
    e = res_p.energies
    monotone = bool(np.all(np.diff(e, axis=1)
                           <= 1e-9 * (1.0 + np.abs(e[:, :-1]))))

    ok = oscillating >= 9 and monotone
    assert _verdict(3, "baseline oscillation contrast", ok,
                    f"{oscillating}/10 seeds oscillate, proposed "
                    f"monotone={monotone}"), \
        f"oscillating={oscillating}/10, proposed monotone={monotone}"


# -------------------------------------------------------------- criterion 4

def test_criterion_4_gradient_vs_finite_differences():
    """Analytic Wirtinger gradient vs central differences (step 1e-6) at
    rtol 1e-6 on 100 (problem, state) pairs spanning the mixture space."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(44)
    specs = [PotentialSpec.proposed(), PotentialSpec.complete(),
             PotentialSpec.static_binarizing(),
             PotentialSpec(w2=(1.0, 0.0), w3=(1.0, 0.0)),
             PotentialSpec.proposed(shil_weight=1.2),
             PotentialSpec.complete(shil_weight=0.5, global_scale=2.0)]
    while len(specs) < 10:
        a, b = rng.uniform(), rng.uniform()
        specs.append(PotentialSpec(w2=(a, 1.0 - a), w3=(b, 1.0 - b),
                                   shil_weight=float(rng.uniform(0, 2)),
                                   global_scale=float(rng.uniform(0.5, 2))))
    bad = 0
    for spec in specs:
        for _ in range(10):
            n = int(rng.integers(4, 11))
            problem = random_problem(rng, n)
            z = random_state(rng, n)
            g = wirtinger_gradient(problem, spec, z)
            fd = fd_wirtinger(problem, spec, z, eps=1e-6)
            if not np.allclose(g, fd, rtol=1e-6, atol=1e-9):
                bad += 1
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed < 60.0
    assert _verdict(4, "analytic gradient vs finite differences", ok,
                    f"100 pairs, {elapsed:.1f}s"), f"{bad} mismatched pairs"


# -------------------------------------------------------------- criterion 5

def test_criterion_5_phase_reduction():
    """At unit amplitude the complex potential equals the phase form to
    1e-12, and the amplitude-clamped phase velocity of the full flow equals
    the phase-only vector field to 1e-9, on 100 random states."""
    rng = np.random.default_rng(55)
    specs = [PotentialSpec.proposed(), PotentialSpec.complete(),
             PotentialSpec.static_binarizing(),
             PotentialSpec(w2=(0.2, 0.8), w3=(0.7, 0.3), shil_weight=0.9,
                           global_scale=1.4)]
    worst_e = 0.0
    worst_v = 0.0
    for k in range(100):
        spec = specs[k % len(specs)]
        n = int(rng.integers(4, 11))
        problem = random_problem(rng, n)
        theta = rng.uniform(-np.pi, np.pi, size=n)
        z = np.exp(-1j * theta)
        worst_e = max(worst_e, abs(potential_energy(problem, spec, z)
                                   - phase_energy(problem, spec, theta)))
        zdot = rhs_proposed(problem, spec, z)
        clamped = -np.imag(zdot / z)
        worst_v = max(worst_v, float(np.max(np.abs(
            clamped - rhs_kuramoto(problem, spec, theta)))))
    ok = worst_e <= 1e-12 and worst_v <= 1e-9
    assert _verdict(5, "phase reduction equivalence", ok,
                    f"energy gap {worst_e:.1e}, velocity gap {worst_v:.1e}"), \
        f"worst energy gap {worst_e:.2e}, worst velocity gap {worst_v:.2e}"


# -------------------------------------------------------------- criterion 6

def test_criterion_6_two_oscillator_algebra():
    """Reference two-oscillator values: the unconjugated pair potential at
    (1, e^{i pi}), its value after a global phase shift of pi/3, invariance
    of the conjugated form, Hessian spectra at the minima, and positive
    definiteness with the C-potential and with injection locking."""
    failures = []
    rng = np.random.default_rng(66)
    z = np.array([1.0 + 0.0j, np.exp(1j * np.pi)])

    base = p_potential(z, 0)
    if abs(base - (-1.0)) > 1e-12:
        failures.append(f"unshifted pair value {base:.6f}, expected -1.0")

    shifted = p_potential(z * np.exp(1j * np.pi / 3), 0)
    if abs(shifted - (-0.5)) > 1e-12:
        failures.append(
            f"shifted pair value {shifted:+.6f}, stated acceptance target "
            f"-0.5; a global shift phi enters the unconjugated pair term "
            f"doubled, and cos(pi + 2pi/3) = +0.5, so the computed value "
            f"has the opposite sign")

    inv = p_potential(z, 1)
    worst_inv = max(abs(p_potential(z * np.exp(1j * rng.uniform(0, 2 * np.pi)),
                                    1) - inv)
                    for _ in range(50))
    if worst_inv > 1e-12:
        failures.append(f"conjugated pair form drifts {worst_inv:.2e} "
                        f"under global shifts")

    cases = [
        (PotentialSpec(w2=(0.0, 1.0)), (0.0, np.pi), (1.0, 1.0)),
        (PotentialSpec(w2=(1.0, 0.0)), (np.pi / 2, np.pi / 2), (1.0, -1.0)),
    ]
    for spec, theta, null in cases:
        H = phase_hessian_quadratic(spec, np.array(theta))
        vals = np.linalg.eigvalsh(H)
        if not np.allclose(vals, [0.0, 2.0], atol=1e-9):
            failures.append(f"eigenvalues {vals} != (0, 2) at {theta}")
        v = np.array(null) / np.sqrt(2.0)
        if np.max(np.abs(H @ v)) > 1e-9:
            failures.append(f"null direction {null} not flat at {theta}")

    H_c = phase_hessian_quadratic(PotentialSpec(w2=(0.5, 0.5)),
                                  np.array([0.0, np.pi]))
    if np.linalg.eigvalsh(H_c).min() <= 0:
        failures.append("C-potential Hessian not positive definite")

    H_s = phase_hessian_quadratic(PotentialSpec(w2=(0.0, 1.0),
                                                shil_weight=1.0),
                                  np.array([0.0, np.pi]))
    if np.linalg.eigvalsh(H_s).min() <= 0:
        failures.append("locked Hessian not positive definite")

    ok = not failures
    assert _verdict(6, "two-oscillator potential algebra", ok,
                    "" if ok else failures[0]), "; ".join(failures)


# -------------------------------------------------------------- criterion 7

def test_criterion_7_benchmark_solve_rates(uf20_files, uf50_files):
    """Full protocol, 100 trials per instance at T=136: the proposed model
    solves at least 90% of the n=20 set and at least as many as the
    direct-substitution baseline on identical seeds; on the n=50 set it
    solves at least as many instances as the all-orders C-potential
    variant. Under 30 minutes."""
    t0 = time.perf_counter()

    cfg = BenchConfig(instances=tuple(uf20_files), trials=100,
                      model="proposed", integrator=PROTOCOL, base_seed=7)
    rep_p = run_bench(cfg)
    frac_p = rep_p.solvable_fraction

    rep_b = run_bench(BenchConfig(instances=tuple(uf20_files), trials=100,
                                  model="baseline", integrator=PROTOCOL,
                                  base_seed=7))
    frac_b = rep_b.solvable_fraction

    cfg50 = BenchConfig(instances=tuple(uf50_files), trials=100,
                        model="proposed", integrator=PROTOCOL, base_seed=7)
    count_p50 = int(run_bench(cfg50).solvable_flags.sum())
    count_c50 = int(run_bench(
        cfg50, spec_override=PotentialSpec.complete()).solvable_flags.sum())

    elapsed = time.perf_counter() - t0
    ok = (frac_p >= 0.90 and frac_p >= frac_b and count_p50 >= count_c50
          and elapsed < 1800.0)
    assert _verdict(
        7, "benchmark solve rates", ok,
        f"n20 proposed {frac_p:.2f} vs baseline {frac_b:.2f}; "
        f"n50 proposed {count_p50}/10 vs C-potential {count_c50}/10; "
        f"{elapsed / 60:.1f}min"), \
        (f"proposed {frac_p:.2f} (need >= 0.90 and >= baseline "
         f"{frac_b:.2f}); n50 {count_p50} vs {count_c50}; "
         f"elapsed {elapsed:.0f}s")


# -------------------------------------------------------------- criterion 8

def test_criterion_8_binarization_strategies(uf100_files):
    """On the n=100 set, 20 trials each: every active strategy sharpens the
    final phases (higher median sharpness than plain descent) while moving
    the fraction of solved trials by no more than 0.1."""
    t0 = time.perf_counter()
    median_sharp = {}
    frac0 = {}
    for kind in ("none", "static", "annealed-shil", "annealed-potential"):
        rep = run_bench(BenchConfig(
            instances=tuple(uf100_files), trials=20, model="proposed",
            strategy=BinarizationStrategy(kind), integrator=PROTOCOL,
            base_seed=0))
        sharp = np.concatenate([r.sharpness for r in rep.instances])
        median_sharp[kind] = float(np.median(sharp))
        frac0[kind] = cdf_at(rep, 0.0)
    elapsed = time.perf_counter() - t0

    active = ("static", "annealed-shil", "annealed-potential")
    sharper = all(median_sharp[k] > median_sharp["none"] for k in active)
    similar = all(abs(frac0[k] - frac0["none"]) <= 0.1 for k in active)
    ok = sharper and similar
    detail = ", ".join(
        f"{k}: sharp {median_sharp[k]:.2f}, cdf0 {frac0[k]:.3f}"
        for k in ("none",) + active)
    assert _verdict(8, "binarization strategies", ok,
                    f"{detail}; {elapsed / 60:.1f}min"), detail


# -------------------------------------------------------------- criterion 9

def test_criterion_9_bootstrap_coverage():
    """The 99% percentile bootstrap (10,000 resamples) covers the true
    Bernoulli(0.5) mean in at least 97% of 1000 repetitions at n=100."""
    rng = np.random.default_rng(2026)
    covered = 0
    for rep in range(1000):
        x = (rng.uniform(size=100) < 0.5).astype(float)
        lo, hi = bootstrap_ci(x, statistic="fraction", resamples=10000,
                              level=0.99, seed=rep)
        covered += int(lo <= 0.5 <= hi)
    coverage = covered / 1000.0
    ok = coverage >= 0.97
    assert _verdict(9, "bootstrap coverage", ok,
                    f"coverage {coverage:.3f} over 1000 reps"), \
        f"coverage {coverage:.3f} < 0.97"
