"""hopfim: phase-amplitude oscillator Ising machine for 3-SAT/PUBO.

The package maps 3-CNF formulas to cubic spin Hamiltonians, relaxes them
with coupled Hopf-oscillator gradient flows built from real-valued
Wirtinger potentials, and benchmarks solution statistics.
"""

from hopfim.cnf_io import CnfFormula, Literal, count_unsat, parse_dimacs, serialize_dimacs
from hopfim.pubo_map import PuboProblem, clause_to_pubo, formula_to_pubo, pubo_eval
from hopfim.potentials import (
    PotentialSpec,
    phase_energy,
    potential_energy,
    wirtinger_gradient,
)
from hopfim.dynamics import (
    IntegratorConfig,
    LocalDynamicsParams,
    ModelKind,
    Schedule,
    initialize,
    integrate,
)
from hopfim.binarization import BinarizationStrategy, apply_strategy, binarize
from hopfim.oracle import brute_force_ground, verify_mapping
from hopfim.bench import BenchConfig, bootstrap_ci, energy_cdf, run_bench

__version__ = "0.1.0"

__all__ = [
    "BenchConfig",
    "BinarizationStrategy",
    "CnfFormula",
    "IntegratorConfig",
    "Literal",
    "LocalDynamicsParams",
    "ModelKind",
    "PotentialSpec",
    "PuboProblem",
    "Schedule",
    "apply_strategy",
    "binarize",
    "bootstrap_ci",
    "brute_force_ground",
    "clause_to_pubo",
    "count_unsat",
    "energy_cdf",
    "formula_to_pubo",
    "initialize",
    "integrate",
    "parse_dimacs",
    "phase_energy",
    "potential_energy",
    "pubo_eval",
    "run_bench",
    "serialize_dimacs",
    "verify_mapping",
    "wirtinger_gradient",
]
