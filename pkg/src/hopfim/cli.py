"""Command-line front end.

Exit codes are a stable contract: 0 solved (zero unsatisfied clauses),
1 not solved, 2 usage or runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import glob
import sys
from pathlib import Path

import numpy as np

from hopfim.bench import BenchConfig, _run_instance, run_bench, write_report
from hopfim.binarization import STRATEGY_KINDS, BinarizationStrategy
from hopfim.cnf_io import DimacsError, parse_dimacs_file
from hopfim.dynamics import IntegrationError, IntegratorConfig, initialize, integrate
from hopfim.instances import planted_formula, satisfiable_uniform_formula
from hopfim.oracle import brute_force_ground, verify_mapping
from hopfim.potentials import PotentialSpec
from hopfim.pubo_map import formula_to_pubo


def _parse_potential_config(path: str) -> PotentialSpec:
    """Read key=value lines (w1, w2, w3 as comma lists; shil_weight,
    global_scale as floats). Blank lines and # comments are ignored."""
    fields = {}
    for ln, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{ln}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key in ("w1", "w2", "w3"):
            fields[key] = tuple(float(x) for x in val.split(","))
        elif key in ("shil_weight", "global_scale"):
            fields[key] = float(val)
        else:
            raise ValueError(f"{path}:{ln}: unknown key {key!r}")
    return PotentialSpec(**fields)


def _add_dynamics_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=("proposed", "baseline", "kuramoto"),
                   default="proposed", help="dynamical model")
    p.add_argument("--strategy", choices=STRATEGY_KINDS, default="none",
                   help="binarization strategy")
    p.add_argument("--trials", type=int, default=100,
                   help="independent random restarts")
    p.add_argument("--t-final", type=float, default=136.0,
                   help="integration horizon")
    p.add_argument("--dt", type=float, default=0.01, help="integrator step")
    p.add_argument("--method", choices=("rk4", "euler"), default="rk4",
                   help="integration scheme")
    p.add_argument("--seed", type=int, default=0, help="base RNG seed")
    p.add_argument("--noise-sigma", type=float, default=0.0,
                   help="additive noise amplitude (0 disables)")
    p.add_argument("--kappa-s-max", type=float, default=1.0,
                   help="peak injection-locking strength for annealed-shil")
    p.add_argument("--config", metavar="FILE", default=None,
                   help="potential weights file (key=value lines); "
                        "only valid with --strategy none or static")


def _bench_config(args, instances: tuple[str, ...]) -> BenchConfig:
    integrator = IntegratorConfig(method=args.method, dt=args.dt,
                                  t_final=args.t_final,
                                  noise_sigma=args.noise_sigma,
                                  seed=args.seed)
    strategy = BinarizationStrategy(args.strategy, kappa_s_max=args.kappa_s_max)
    return BenchConfig(instances=instances, trials=args.trials,
                       model=args.model, strategy=strategy,
                       integrator=integrator, base_seed=args.seed,
                       jobs=getattr(args, "jobs", 1))


def _custom_spec_override(args):
    """Return the PotentialSpec from --config, or None. Scheduled strategies
    drive the weights themselves, so combining is a usage error."""
    if args.config is None:
        return None
    if args.strategy not in ("none", "static"):
        raise ValueError("--config cannot be combined with a scheduled "
                         "strategy (annealed-shil / annealed-potential)")
    return _parse_potential_config(args.config)


def cmd_solve(args) -> int:
    formula = parse_dimacs_file(args.file)
    config = _bench_config(args, (args.file,))
    if args.trials < 1:
        raise ValueError("--trials must be >= 1")
    override = _custom_spec_override(args)
    result = _run_instance(config, 0, spec_override=override)
    best = int(np.argmin(result.unsat))
    best_unsat = int(result.unsat[best])
    spins = np.where(np.cos(result.phases[best]) >= 0.0, 1, -1)
    assignment = " ".join(str((i + 1) * int(s))
                          for i, s in enumerate(spins))
    print(f"instance: {args.file} (n={formula.num_vars}, "
          f"m={formula.num_clauses})")
    print(f"model={args.model} strategy={args.strategy} "
          f"trials={args.trials} seed={args.seed}")
    print(f"best unsat count: {best_unsat} (trial {best})")
    print(f"solved trials: {int(result.solved.sum())}/{args.trials}")
    print(f"assignment: {assignment}")
    if args.trace is not None:
        _write_trace(args, config, best, override)
        print(f"energy trace: {args.trace}")
    print("SATISFIED" if best_unsat == 0 else "NOT SATISFIED")
    return 0 if best_unsat == 0 else 1


def _write_trace(args, config: BenchConfig, trial: int, override) -> None:
    from hopfim.bench import _instance_model

    problem = formula_to_pubo(parse_dimacs_file(args.file))
    model = _instance_model(config, problem, override)
    z0 = initialize(problem.n,
                    np.random.SeedSequence(config.base_seed,
                                           spawn_key=(0, trial)),
                    config.init_mode)
    if config.model == "kuramoto":
        z0 = -np.angle(z0)
    stride = max(1, config.integrator.n_steps // 500)
    res = integrate(model, problem, config.integrator, z0,
                    record_stride=stride)
    with open(args.trace, "w") as f:
        f.write("time,energy\n")
        for t, e in zip(res.times, res.energies):
            f.write(f"{t:.6f},{e:.10g}\n")


def _expand_instances(patterns) -> tuple[str, ...]:
    paths: list[str] = []
    for pat in patterns:
        p = Path(pat)
        if p.is_dir():
            paths.extend(sorted(str(q) for q in p.glob("*.cnf")))
        elif glob.has_magic(pat):
            paths.extend(sorted(glob.glob(pat)))
        else:
            paths.append(pat)
    return tuple(paths)


def cmd_bench(args) -> int:
    if args.trials < 1:
        raise ValueError("--trials must be >= 1")
    instances = _expand_instances(args.instances)
    if not instances:
        raise ValueError("no instance files matched")
    override = _custom_spec_override(args)
    config = _bench_config(args, instances)
    report = run_bench(config, spec_override=override)
    for warning in report.warnings:
        print(f"warning: skipped {warning}", file=sys.stderr)
    if not report.instances:
        raise ValueError("no instance files could be loaded")
    write_report(report, args.out)
    lo, hi = (report.solvable_ci() if report.instances else (0.0, 0.0))
    print(f"instances: {len(report.instances)} "
          f"(skipped {len(report.warnings)})")
    print(f"solvable fraction: {report.solvable_fraction:.3f} "
          f"(99% CI [{lo:.3f}, {hi:.3f}])")
    print(f"report written to {args.out}/")
    return 0


def cmd_oracle(args) -> int:
    formula = parse_dimacs_file(args.file)
    problem = formula_to_pubo(formula)
    energy, spins, count = brute_force_ground(problem, max_n=args.max_n)
    unsat = int(round(energy))
    assignment = " ".join(str((i + 1) * int(s)) for i, s in enumerate(spins))
    print(f"instance: {args.file} (n={formula.num_vars}, "
          f"m={formula.num_clauses})")
    print(f"ground-state energy: {unsat} unsatisfied clauses")
    print(f"optimal assignments: {count}")
    print(f"assignment: {assignment}")
    if args.verify:
        ok = verify_mapping(formula, max_n=args.max_n)
        print(f"mapping check: {'ok' if ok else 'MISMATCH'}")
        if not ok:
            return 2
    return 0 if unsat == 0 else 1


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        seed = args.seed + i
        if args.planted:
            formula = planted_formula(args.n, args.m, seed)
        else:
            formula = satisfiable_uniform_formula(args.n, args.m, seed)
        name = f"n{args.n:03d}-m{args.m:03d}-{i:02d}.cnf"
        from hopfim.cnf_io import serialize_dimacs

        (out / name).write_text(serialize_dimacs(formula))
        print(f"wrote {out / name}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hopfim",
        description="Oscillator-network solver for 3-SAT via cubic PUBO "
                    "energy descent.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "solve", help="solve a single DIMACS CNF instance",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("file", help="DIMACS CNF path")
    _add_dynamics_flags(p)
    p.add_argument("--trace", metavar="FILE", default=None,
                   help="write best-trial energy trace CSV here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser(
        "bench", help="benchmark over instance files, dirs, or globs",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("instances", nargs="+",
                   help="CNF files, directories, or glob patterns")
    _add_dynamics_flags(p)
    p.add_argument("--out", default="bench_out",
                   help="output directory for report files")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel worker processes over instances")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser(
        "oracle", help="brute-force ground state of a small instance",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("file", help="DIMACS CNF path")
    p.add_argument("--max-n", type=int, default=24,
                   help="refuse instances with more variables than this")
    p.add_argument("--verify", action="store_true",
                   help="also check the PUBO mapping against clause counts")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser(
        "gen", help="generate random satisfiable 3-SAT instances",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--out", default="instances", help="output directory")
    p.add_argument("--n", type=int, default=20, help="variables")
    p.add_argument("--m", type=int, default=91, help="clauses")
    p.add_argument("--count", type=int, default=1, help="instances to write")
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--planted", action="store_true",
                   help="plant a hidden assignment instead of filtering "
                        "uniform instances through the oracle")
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as err:
        print(f"error: file not found: {err.filename}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: I/O failure: {err}", file=sys.stderr)
        return 2
    except DimacsError as err:
        print(f"error: CNF parse failure: {err}", file=sys.stderr)
        return 2
    except IntegrationError as err:
        print(f"error: integration diverged: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
