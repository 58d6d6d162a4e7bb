"""3-CNF to cubic spin polynomial (PUBO) mapping and discrete evaluation.

A clause over spins s in {-1,+1} becomes the product

    H_C = prod_q (1 + eps_q * s_q) / 2,   eps_q = -1 for a positive literal,
                                          eps_q = +1 for a negated one,

which is 0 when the clause is satisfied and 1 when all three literals are
false. Expanding the product gives a constant 1/8 plus linear, pairwise, and
triple terms with coefficients +-1/8. Summing clause polynomials yields an
energy that counts unsatisfied clauses exactly.

Storage convention: ``pairs`` and ``triples`` map canonically ordered index
tuples (0-based, strictly ascending) to the TOTAL weight of that monomial, so
evaluation visits each monomial once. All coefficients are dyadic rationals
(multiples of 1/8), hence evaluation on +-1 spins is exact in floating point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from hopfim.cnf_io import Clause, CnfFormula


@dataclass(eq=False)
class PuboProblem:
    """Degree-3 spin polynomial: constant + h.s + pair terms + triple terms."""

    n: int
    constant: float = 0.0
    h: np.ndarray = None  # type: ignore[assignment]
    pairs: dict[tuple[int, int], float] = field(default_factory=dict)
    triples: dict[tuple[int, int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if self.h is None:
            self.h = np.zeros(self.n)
        self.h = np.asarray(self.h, dtype=float)
        if self.h.shape != (self.n,):
            raise ValueError(f"h must have shape ({self.n},)")
        for key in self.pairs:
            if not (0 <= key[0] < key[1] < self.n):
                raise ValueError(f"bad pair key {key}")
        for key in self.triples:
            if not (0 <= key[0] < key[1] < key[2] < self.n):
                raise ValueError(f"bad triple key {key}")
        if not (
            np.isfinite(self.constant)
            and np.all(np.isfinite(self.h))
            and all(np.isfinite(v) for v in self.pairs.values())
            and all(np.isfinite(v) for v in self.triples.values())
        ):
            raise ValueError("non-finite coefficient")

    def pair_weight(self, i: int, j: int) -> float:
        """Total weight of the s_i s_j monomial; index order does not matter."""
        if i == j:
            raise ValueError("no diagonal pair terms")
        return self.pairs.get((min(i, j), max(i, j)), 0.0)

    def triple_weight(self, i: int, j: int, k: int) -> float:
        """Total weight of s_i s_j s_k under any of the 6 index orders."""
        key = tuple(sorted((i, j, k)))
        if len(set(key)) != 3:
            raise ValueError("triple indices must be distinct")
        return self.triples.get(key, 0.0)  # type: ignore[arg-type]

    @cached_property
    def pair_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(ia, ib, w) arrays over pairs in ascending canonical order."""
        keys = sorted(self.pairs)
        ia = np.array([k[0] for k in keys], dtype=np.int64)
        ib = np.array([k[1] for k in keys], dtype=np.int64)
        w = np.array([self.pairs[k] for k in keys], dtype=float)
        return ia, ib, w

    @cached_property
    def triple_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(ia, ib, ic, w) arrays over triples in ascending canonical order."""
        keys = sorted(self.triples)
        ia = np.array([k[0] for k in keys], dtype=np.int64)
        ib = np.array([k[1] for k in keys], dtype=np.int64)
        ic = np.array([k[2] for k in keys], dtype=np.int64)
        w = np.array([self.triples[k] for k in keys], dtype=float)
        return ia, ib, ic, w


def clause_to_pubo(clause: Clause, n: int) -> PuboProblem:
    """Expand one width-3 clause into its cubic spin polynomial."""
    vs = [lit.var - 1 for lit in clause]
    if len(set(vs)) != 3:
        raise ValueError("clause must reference 3 distinct variables")
    eps = [1.0 if lit.negated else -1.0 for lit in clause]
    prob = PuboProblem(n=n, constant=0.125)
    for q in range(3):
        prob.h[vs[q]] += eps[q] / 8.0
    for q in range(3):
        for r in range(q + 1, 3):
            key = (min(vs[q], vs[r]), max(vs[q], vs[r]))
            prob.pairs[key] = prob.pairs.get(key, 0.0) + eps[q] * eps[r] / 8.0
    tkey = tuple(sorted(vs))
    prob.triples[tkey] = eps[0] * eps[1] * eps[2] / 8.0  # type: ignore[index]
    return prob


def formula_to_pubo(formula: CnfFormula) -> PuboProblem:
    """Sum of clause polynomials; evaluates to the unsatisfied-clause count."""
    n = formula.num_vars
    prob = PuboProblem(n=n)
    for clause in formula.clauses:
        cp = clause_to_pubo(clause, n)
        prob.constant += cp.constant
        prob.h += cp.h
        for key, w in cp.pairs.items():
            prob.pairs[key] = prob.pairs.get(key, 0.0) + w
        for key, w in cp.triples.items():
            prob.triples[key] = prob.triples.get(key, 0.0) + w
    return prob


def _check_spins(s: np.ndarray, n: int) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.shape[-1] != n:
        raise ValueError(f"spin vector length {s.shape[-1]} != n={n}")
    if not np.all(np.abs(s) == 1.0):
        raise ValueError("spin entries must be exactly +-1")
    return s


def pubo_eval(problem: PuboProblem, s) -> float:
    """Evaluate the polynomial at a single +-1 spin vector. Exact for dyadic
    coefficients."""
    s = _check_spins(np.asarray(s), problem.n)
    if s.ndim != 1:
        raise ValueError("expected a single spin vector; see pubo_eval_batch")
    return float(pubo_eval_batch(problem, s[None, :])[0])

def pubo_eval_batch(problem: PuboProblem, S) -> np.ndarray:
    """Evaluate on a (B, n) matrix of +-1 spins, returning (B,) energies."""
    S = _check_spins(np.asarray(S), problem.n)
    if S.ndim != 2:
        raise ValueError("expected a (B, n) spin matrix")
    e = np.full(S.shape[0], problem.constant)
    e += S @ problem.h
    ia, ib, w = problem.pair_arrays
    if len(w):
        e += (S[:, ia] * S[:, ib]) @ w
    ia, ib, ic, w = problem.triple_arrays
    if len(w):
        e += (S[:, ia] * S[:, ib] * S[:, ic]) @ w
    return e


def pubo_to_json(problem: PuboProblem) -> str:
    """Sparse JSON form: coefficient lists in canonical ascending index order."""
    ia, ib, wp = problem.pair_arrays
    ta, tb, tc, wt = problem.triple_arrays
    doc = {
        "n": problem.n,
        "constant": problem.constant,
        "h": problem.h.tolist(),
        "pairs": [[int(a), int(b), float(w)] for a, b, w in zip(ia, ib, wp)],
        "triples": [
            [int(a), int(b), int(c), float(w)] for a, b, c, w in zip(ta, tb, tc, wt)
        ],
    }
    return json.dumps(doc, indent=1)


def pubo_from_json(text: str) -> PuboProblem:
    doc = json.loads(text)
    return PuboProblem(
        n=int(doc["n"]),
        constant=float(doc["constant"]),
        h=np.array(doc["h"], dtype=float),
        pairs={(int(a), int(b)): float(w) for a, b, w in doc["pairs"]},
        triples={(int(a), int(b), int(c)): float(w) for a, b, c, w in doc["triples"]},
    )


def problems_equal(p1: PuboProblem, p2: PuboProblem, tol: float = 0.0) -> bool:
    """Field-wise equality check (exact by default)."""
    if p1.n != p2.n:
        return False
    keys = set(p1.pairs) | set(p2.pairs)
    tkeys = set(p1.triples) | set(p2.triples)
    return (
        abs(p1.constant - p2.constant) <= tol
        and np.all(np.abs(p1.h - p2.h) <= tol)
        and all(abs(p1.pairs.get(k, 0.0) - p2.pairs.get(k, 0.0)) <= tol for k in keys)
        and all(abs(p1.triples.get(k, 0.0) - p2.triples.get(k, 0.0)) <= tol for k in tkeys)
    )
