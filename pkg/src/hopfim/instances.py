"""Random 3-SAT instance generation for benchmark fixtures.

Two families: uniform random instances filtered for satisfiability through
the brute-force oracle (small n only), and planted instances where every
clause is forced to agree with a hidden assignment (any n, satisfiable by
construction but a statistically easier ensemble).
"""

from __future__ import annotations

import numpy as np

from hopfim.cnf_io import Clause, CnfFormula, Literal
from hopfim.oracle import satisfiable


def _random_clause(rng: np.random.Generator, n: int) -> Clause:
    vs = rng.choice(n, size=3, replace=False) + 1
    neg = rng.integers(0, 2, size=3).astype(bool)
    return tuple(Literal(int(v), bool(s)) for v, s in zip(vs, neg))


def _clause_key(clause: Clause) -> frozenset[int]:
    return frozenset(lit.to_signed() for lit in clause)


def random_formula(n: int, m: int, seed) -> CnfFormula:
    """Uniform random 3-SAT with distinct variables per clause and no
    duplicate clauses (up to literal order)."""
    if n < 3:
        raise ValueError("need at least 3 variables")
    rng = np.random.default_rng(seed)
    clauses: list[Clause] = []
    seen: set[frozenset[int]] = set()
    guard = 0
    while len(clauses) < m:
        clause = _random_clause(rng, n)
        key = _clause_key(clause)
        if key in seen:
            guard += 1
            if guard > 1000 * m:
                raise ValueError(f"cannot draw {m} distinct clauses on "
                                 f"{n} variables")
            continue
        seen.add(key)
        clauses.append(clause)
    return CnfFormula(n, tuple(clauses))


def planted_formula(n: int, m: int, seed) -> CnfFormula:
    """Random 3-SAT conditioned on satisfying a hidden uniform assignment.

    Each candidate clause is redrawn until the hidden assignment satisfies
    it, which keeps clauses uniform over the satisfied 7/8 of sign patterns.
    """
    rng = np.random.default_rng(seed)
    hidden = rng.integers(0, 2, size=n).astype(bool)
    clauses: list[Clause] = []
    seen: set[frozenset[int]] = set()
    guard = 0
    while len(clauses) < m:
        clause = _random_clause(rng, n)
        if not any(lit.value(hidden) for lit in clause):
            continue
        key = _clause_key(clause)
        if key in seen:
            guard += 1
            if guard > 1000 * m:
                raise ValueError(f"cannot draw {m} distinct clauses on "
                                 f"{n} variables")
            continue
        seen.add(key)
        clauses.append(clause)
    return CnfFormula(n, tuple(clauses))


def satisfiable_uniform_formula(n: int, m: int, seed,
                                max_attempts: int = 200) -> CnfFormula:
    """Draw uniform random instances until the oracle certifies one
    satisfiable. Restricted to oracle-sized n."""
    if n > 24:
        raise ValueError("oracle filtering only supports n <= 24; "
                         "use planted_formula for larger instances")
    for attempt in range(max_attempts):
        formula = random_formula(n, m, (seed, attempt))
        if satisfiable(formula):
            return formula
    raise ValueError(f"no satisfiable instance found in {max_attempts} "
                     f"attempts (n={n}, m={m})")
