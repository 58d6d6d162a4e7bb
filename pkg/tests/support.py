"""Shared helpers for the test suite: finite-difference oracles and
random problem/state generators that do not depend on the code under test
beyond the public dataclasses."""

from __future__ import annotations

import numpy as np

from hopfim.cnf_io import CnfFormula, Literal
from hopfim.potentials import PotentialSpec, potential_energy
from hopfim.pubo_map import PuboProblem


def fd_wirtinger(problem, spec, z, eps=1e-6):
    """Central finite-difference estimate of dE/dz_i = (dE/dx - i dE/dy)/2.

    E is real, so the holomorphic-side Wirtinger derivative is recovered
    from the two real partials per coordinate.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    for i in range(z.size):
        dx = np.zeros_like(z)
        dx[i] = eps
        de_dx = (potential_energy(problem, spec, z + dx)
                 - potential_energy(problem, spec, z - dx)) / (2 * eps)
        dy = np.zeros_like(z)
        dy[i] = 1j * eps
        de_dy = (potential_energy(problem, spec, z + dy)
                 - potential_energy(problem, spec, z - dy)) / (2 * eps)
        out[i] = 0.5 * (de_dx - 1j * de_dy)
    return out


def fd_scalar(fun, x, eps=1e-6):
    """Central finite differences of a scalar function of a real vector."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        d = np.zeros_like(x)
        d[i] = eps
        g[i] = (fun(x + d) - fun(x - d)) / (2 * eps)
    return g


def random_problem(rng, n, n_pairs=None, n_triples=None, scale=1.0):
    """A dense-ish random PUBO on n spins with O(n) pair/triple terms."""
    if n_pairs is None:
        n_pairs = 2 * n
    if n_triples is None:
        n_triples = 2 * n
    h = rng.normal(scale=scale, size=n)
    pairs = {}
    for _ in range(n_pairs):
        i, j = sorted(rng.choice(n, size=2, replace=False))
        pairs[(int(i), int(j))] = float(rng.normal(scale=scale))
    triples = {}
    if n >= 3:
        for _ in range(n_triples):
            i, j, k = sorted(rng.choice(n, size=3, replace=False))
            triples[(int(i), int(j), int(k))] = float(rng.normal(scale=scale))
    return PuboProblem(n=n, constant=float(rng.normal()), h=h,
                       pairs=pairs, triples=triples)


def random_spec(rng, with_shil=True):
    """A PotentialSpec with random convex mixtures (and optional SHIL)."""
    a = rng.uniform()
    b = rng.uniform()
    return PotentialSpec(
        w2=(a, 1.0 - a),
        w3=(b, 1.0 - b),
        shil_weight=float(rng.uniform(0.0, 2.0)) if with_shil else 0.0,
        global_scale=float(rng.uniform(0.5, 2.0)),
    )


SPEC_CORPUS = (
    PotentialSpec.proposed(),
    PotentialSpec.complete(),
    PotentialSpec.static_binarizing(),
    PotentialSpec(w2=(0.3, 0.7), w3=(0.6, 0.4), shil_weight=0.8,
                  global_scale=1.5),
)


def random_state(rng, n, radius=(0.2, 1.8)):
    r = rng.uniform(*radius, size=n)
    th = rng.uniform(-np.pi, np.pi, size=n)
    return r * np.exp(1j * th)


def clause(*signed):
    return tuple(Literal.from_signed(s) for s in signed)


def formula(num_vars, *clauses):
    return CnfFormula(num_vars=num_vars,
                      clauses=tuple(clause(*c) for c in clauses))


# small reference formulas used by several test files
TINY_SAT = formula(4, (1, -2, 3), (-1, 2, 4), (2, 3, -4))

# all eight sign patterns over three variables: unsatisfiable
TINY_UNSAT = formula(3, *[tuple(s * v for s, v in zip(signs, (1, 2, 3)))
                          for signs in
                          [(a, b, c) for a in (1, -1) for b in (1, -1)
                           for c in (1, -1)]])
