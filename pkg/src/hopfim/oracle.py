"""Exhaustive ground-truth solver for small instances.

Enumerates all 2^n spin assignments in lexicographic order (s_1 most
significant, -1 before +1) in vectorized chunks. Used to validate the
SAT-to-PUBO mapping and to supply reference optima for benchmarks.
"""

from __future__ import annotations

import numpy as np

from hopfim.cnf_io import CnfFormula, clause_arrays
from hopfim.pubo_map import PuboProblem, formula_to_pubo, pubo_eval_batch

_CHUNK_BITS = 16


def _spin_chunk(start: int, count: int, n: int) -> np.ndarray:
    """Rows start..start+count-1 of the lexicographic spin enumeration.

    Row b has s_i = +1 iff bit (n-1-i) of b is set, so (-1,...,-1) comes
    first and s_1 is the most significant position.
    """
    idx = np.arange(start, start + count, dtype=np.uint64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    bits = (idx[:, None] >> shifts[None, :]) & np.uint64(1)
    return bits.astype(np.float64) * 2.0 - 1.0


def brute_force_ground(
    problem: PuboProblem, max_n: int = 24
) -> tuple[float, np.ndarray, int]:
    """Exact minimum over all 2^n assignments.

    Returns (min energy, lexicographically first argmin, number of optima).
    """
    if problem.n > max_n:
        raise ValueError(f"n={problem.n} exceeds exhaustive limit {max_n}")
    total = 1 << problem.n
    chunk = min(total, 1 << _CHUNK_BITS)
    best = np.inf
    best_idx = -1
    count = 0
    for start in range(0, total, chunk):
        S = _spin_chunk(start, min(chunk, total - start), problem.n)
        e = pubo_eval_batch(problem, S)
        lo = e.min()
        if lo < best:
            best = lo
            best_idx = start + int(np.argmax(e == lo))
            count = int(np.count_nonzero(e == lo))
        elif lo == best:
            count += int(np.count_nonzero(e == best))
    argmin = _spin_chunk(best_idx, 1, problem.n)[0]
    return float(best), argmin, count


def verify_mapping(formula: CnfFormula, max_n: int = 20) -> bool:
    """True iff the polynomial equals the unsatisfied-clause count on ALL
    2^n assignments, exactly."""
    if formula.num_vars > max_n:
        raise ValueError(f"n={formula.num_vars} exceeds exhaustive limit {max_n}")
    problem = formula_to_pubo(formula)
    return _mapping_matches(formula, problem)


def _mapping_matches(formula: CnfFormula, problem: PuboProblem) -> bool:
    """Exhaustive pubo-vs-clause-count comparison; factored out so tests can
    probe deliberately corrupted problems."""
    n = formula.num_vars
    vs, neg = clause_arrays(formula)
    total = 1 << n
    chunk = min(total, 1 << _CHUNK_BITS)
    for start in range(0, total, chunk):
        S = _spin_chunk(start, min(chunk, total - start), n)
        e = pubo_eval_batch(problem, S)
        assign = S > 0
        lit_true = assign[:, vs] ^ neg
        unsat = np.sum(~lit_true.any(axis=2), axis=1)
        if not np.array_equal(e, unsat.astype(float)):
            return False
    return True


def satisfiable(formula: CnfFormula, max_n: int = 24) -> bool:
    """Exhaustive satisfiability check with early exit."""
    if formula.num_vars > max_n:
        raise ValueError(f"n={formula.num_vars} exceeds exhaustive limit {max_n}")
    n = formula.num_vars
    vs, neg = clause_arrays(formula)
    total = 1 << n
    chunk = min(total, 1 << _CHUNK_BITS)
    for start in range(0, total, chunk):
        S = _spin_chunk(start, min(chunk, total - start), n)
        lit_true = (S > 0)[:, vs] ^ neg
        unsat = np.sum(~lit_true.any(axis=2), axis=1)
        if (unsat == 0).any():
            return True
    return False
