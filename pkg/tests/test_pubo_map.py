import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hopfim.cnf_io import Literal, count_unsat
from hopfim.instances import random_formula
from hopfim.pubo_map import (PuboProblem, clause_to_pubo, formula_to_pubo,
                             problems_equal, pubo_eval, pubo_eval_batch,
                             pubo_from_json, pubo_to_json)

from .support import TINY_SAT, clause


def all_assignments(n):
    return np.array(list(itertools.product([False, True], repeat=n)))


def test_single_clause_reference_values():
    """(x1 OR NOT x2 OR x3) with the s=+1 <=> x=true encoding."""
    p = clause_to_pubo(clause(1, -2, 3), 3)
    assert p.constant == 0.125
    assert np.array_equal(p.h, [-0.125, 0.125, -0.125])
    assert p.pair_weight(0, 1) == -0.125
    assert p.pair_weight(0, 2) == 0.125
    assert p.pair_weight(1, 2) == -0.125
    assert p.triple_weight(0, 1, 2) == 0.125


@pytest.mark.parametrize("signs", list(itertools.product((1, -1), repeat=3)))
def test_clause_sign_structure(signs):
    # eps_q = +1 for a negated literal, -1 otherwise
    p = clause_to_pubo(clause(*(s * v for s, v in zip(signs, (1, 2, 3)))), 3)
    eps = [-s for s in signs]
    assert p.constant == 0.125
    for q in range(3):
        assert p.h[q] == eps[q] / 8.0
    for q, r in ((0, 1), (0, 2), (1, 2)):
        assert p.pair_weight(q, r) == eps[q] * eps[r] / 8.0
    assert p.triple_weight(0, 1, 2) == eps[0] * eps[1] * eps[2] / 8.0


def test_clause_polynomial_is_unsat_indicator():
    c = clause(2, -4, 1)
    p = clause_to_pubo(c, 5)
    for bits in all_assignments(5):
        s = np.where(bits, 1.0, -1.0)
        sat = any(lit.value(bits) for lit in c)
        assert pubo_eval(p, s) == (0.0 if sat else 1.0)


def test_clause_with_repeated_variable_rejected():
    bad = (Literal(1), Literal(1, True), Literal(2))
    with pytest.raises(ValueError):
        clause_to_pubo(bad, 3)


def test_formula_accumulates_duplicate_clauses():
    from hopfim.cnf_io import CnfFormula

    c = clause(1, 2, 3)
    f = CnfFormula(num_vars=3, clauses=(c, c))
    p = formula_to_pubo(f)
    single = clause_to_pubo(c, 3)
    assert p.constant == 2 * single.constant
    assert np.array_equal(p.h, 2 * single.h)
    assert p.pairs == {k: 2 * w for k, w in single.pairs.items()}
    assert p.triples == {k: 2 * w for k, w in single.triples.items()}


@settings(deadline=None, max_examples=40)
@given(st.integers(0, 10_000), st.integers(4, 9), st.integers(1, 20))
def test_energy_counts_unsat_clauses_exactly(seed, n, m):
    f = random_formula(n, min(m, 3 * n), seed)
    p = formula_to_pubo(f)
    bits = np.random.default_rng(seed).integers(0, 2, size=n).astype(bool)
    s = np.where(bits, 1.0, -1.0)
    assert pubo_eval(p, s) == count_unsat(f, bits)


def test_mean_energy_over_all_assignments_is_m_over_8():
    # each clause is violated by exactly 1 of the 8 local sign patterns
    f = random_formula(6, 15, 3)
    p = formula_to_pubo(f)
    S = np.where(all_assignments(6), 1.0, -1.0)
    assert pubo_eval_batch(p, S).mean() == pytest.approx(f.num_clauses / 8.0,
                                                         abs=1e-12)


def test_batch_matches_scalar(rng):
    p = formula_to_pubo(TINY_SAT)
    S = np.where(rng.integers(0, 2, size=(16, 4)).astype(bool), 1.0, -1.0)
    batch = pubo_eval_batch(p, S)
    assert batch.shape == (16,)
    for row, e in zip(S, batch):
        assert pubo_eval(p, row) == e


def test_spin_validation():
    p = formula_to_pubo(TINY_SAT)
    with pytest.raises(ValueError, match="exactly"):
        pubo_eval(p, [0.5, 1, 1, 1])
    with pytest.raises(ValueError, match="exactly"):
        pubo_eval(p, [2, 1, 1, 1])
    with pytest.raises(ValueError, match="length"):
        pubo_eval(p, [1, 1, 1])
    with pytest.raises(ValueError, match="single"):
        pubo_eval(p, np.ones((2, 4)))
    with pytest.raises(ValueError, match="matrix"):
        pubo_eval_batch(p, np.ones(4))


def test_key_canonicalization_guards():
    with pytest.raises(ValueError, match="bad pair key"):
        PuboProblem(n=3, pairs={(2, 1): 1.0})
    with pytest.raises(ValueError, match="bad pair key"):
        PuboProblem(n=3, pairs={(1, 1): 1.0})
    with pytest.raises(ValueError, match="bad triple key"):
        PuboProblem(n=3, triples={(0, 2, 1): 1.0})
    with pytest.raises(ValueError, match="non-finite"):
        PuboProblem(n=2, constant=float("nan"))
    with pytest.raises(ValueError, match="shape"):
        PuboProblem(n=3, h=np.zeros(2))


def test_weight_lookups_symmetric():
    p = PuboProblem(n=4, pairs={(1, 3): 0.25}, triples={(0, 1, 2): -0.5})
    assert p.pair_weight(3, 1) == 0.25
    assert p.pair_weight(0, 1) == 0.0
    assert p.triple_weight(2, 0, 1) == -0.5
    with pytest.raises(ValueError):
        p.pair_weight(2, 2)
    with pytest.raises(ValueError):
        p.triple_weight(0, 0, 1)


def test_json_round_trip():
    p = formula_to_pubo(TINY_SAT)
    q = pubo_from_json(pubo_to_json(p))
    assert problems_equal(p, q)
    q.pairs[(0, 1)] = q.pairs.get((0, 1), 0.0) + 1e-3
    assert not problems_equal(p, q)
    assert problems_equal(p, q, tol=1e-2)


def test_constant_equals_m_eighths():
    f = random_formula(8, 24, 11)
    assert formula_to_pubo(f).constant == 24 / 8.0
