"""Real-valued Wirtinger-potential energies for cubic spin polynomials.

Each degree-k spin monomial with total weight c lifts to a complex-oscillator
term built from the order-k p-potential family (p = number of conjugated
factors in the leading product):

    Phi_k^p(z_I) = (1 / (2 C(k,p))) * sum_{|A|=p} [ prod_{q not in A} z_q
                                                    prod_{q in A} z_q^*  + c.c. ]

normalized so that Phi_k^p equals the discrete monomial prod s at binarized
states z in {+1,-1}^n. A PotentialSpec picks a convex mixture over p per
order; the C-potential is the binomial mixture that arises from expanding
prod (z + z^*)/2 per factor. The optional SHIL term

    (kappa_S / 2) * sum_i (1 - Re(z_i^2))

adds wells at phase 0 and pi with value 0, so binarized-state energies are
unchanged. Energies are real by construction; evaluation asserts that the
floating-point imaginary residue is negligible and discards it.

The gradient functions return the non-conjugated Wirtinger partial
g_i = dH/dz_i (z^* held constant); for real H the conjugate partial is its
complex conjugate, which is what the dynamics module uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from weakref import WeakKeyDictionary

import numpy as np

from hopfim.pubo_map import PuboProblem

REALNESS_TOL = 1e-9


@dataclass(frozen=True)
class PotentialSpec:
    """Per-order p-potential weights, SHIL weight, and global scale.

    w2 = (weight of p=0, weight of p=1) for pair terms; w3 likewise for
    triples. w1 is the trivial order-1 vector (only p=0 exists). Weights are
    convex per order.
    """

    w1: tuple[float, ...] = (1.0,)
    w2: tuple[float, float] = (0.0, 1.0)
    w3: tuple[float, float] = (0.0, 1.0)
    shil_weight: float = 0.0
    global_scale: float = 1.0

    def __post_init__(self):
        for name, w, size in (("w1", self.w1, 1), ("w2", self.w2, 2), ("w3", self.w3, 2)):
            if len(w) != size:
                raise ValueError(f"{name} must have {size} entries")
            if min(w) < 0 or abs(sum(w) - 1.0) > 1e-9:
                raise ValueError(f"{name} must be convex weights, got {w}")
        if self.shil_weight < 0:
            raise ValueError("shil_weight must be >= 0")
        if not self.global_scale > 0:
            raise ValueError("global_scale must be > 0")

    @classmethod
    def proposed(cls, shil_weight: float = 0.0, global_scale: float = 1.0) -> "PotentialSpec":
        """Pure 1-potential pairs and triples."""
        return cls(w2=(0.0, 1.0), w3=(0.0, 1.0), shil_weight=shil_weight,
                   global_scale=global_scale)

    @classmethod
    def complete(cls, shil_weight: float = 0.0, global_scale: float = 1.0) -> "PotentialSpec":
        """Binomial C-potential mixture at every order."""
        return cls(w2=(0.5, 0.5), w3=(0.25, 0.75), shil_weight=shil_weight,
                   global_scale=global_scale)

    @classmethod
    def static_binarizing(cls, shil_weight: float = 0.0,
                          global_scale: float = 1.0) -> "PotentialSpec":
        """C-potential pairs with 1-potential triples: quadratic terms pin the
        binarization axis while the cubic part keeps the plain mixed form."""
        return cls(w2=(0.5, 0.5), w3=(0.0, 1.0), shil_weight=shil_weight,
                   global_scale=global_scale)


# --------------------------------------------------------------------------
# general p-potential machinery (order k <= small; the SAT pipeline uses k<=3)

def p_potential(zvals, p: int) -> float:
    """Phi_k^p on a length-k complex vector; equals prod(s) at binarized z."""
    z = np.asarray(zvals, dtype=complex)
    k = z.shape[0]
    if not 0 <= p <= k // 2:
        raise ValueError(f"p must be in 0..{k // 2} for order {k}")
    acc = 0.0 + 0.0j
    for conj_set in combinations(range(k), p):
        term = 1.0 + 0.0j
        for q in range(k):
            term *= z[q].conjugate() if q in conj_set else z[q]
        acc += term + term.conjugate()
    return float((acc / (2 * math.comb(k, p))).real)


def c_potential_weights(k: int) -> np.ndarray:
    """Convex weights over p = 0..k//2 equivalent to prod_q (z_q + z_q^*)/2."""
    w = np.zeros(k // 2 + 1)
    for p in range(k // 2 + 1):
        mult = 1 if (2 * p == k) else 2
        w[p] = mult * math.comb(k, p) / 2.0**k
    return w


# --------------------------------------------------------------------------
# vectorized evaluation over a problem

class _CouplingPlan:
    """Problem-derived index arrays plus a column-grouped scatter layout so a
    batched gradient needs one sorted segmented reduction."""

    def __init__(self, problem: PuboProblem):
        self.n = problem.n
        self.pa, self.pb, self.pw = problem.pair_arrays
        self.ta, self.tb, self.tc, self.tw = problem.triple_arrays
        cols = np.concatenate([self.pa, self.pb, self.ta, self.tb, self.tc])
        self.order = np.argsort(cols, kind="stable")
        sorted_cols = cols[self.order]
        if sorted_cols.size:
            starts = np.flatnonzero(
                np.diff(sorted_cols, prepend=sorted_cols[0] - 1))
        else:
            starts = np.empty(0, dtype=np.intp)
        self.starts = starts
        self.out_cols = sorted_cols[starts]

    def scatter(self, blocks: list[np.ndarray], G: np.ndarray) -> None:
        if not self.out_cols.size:
            return
        V = np.concatenate(blocks, axis=1)[:, self.order]
        G[:, self.out_cols] += np.add.reduceat(V, self.starts, axis=1)


_plans: "WeakKeyDictionary[PuboProblem, _CouplingPlan]" = WeakKeyDictionary()


def coupling_plan(problem: PuboProblem) -> _CouplingPlan:
    plan = _plans.get(problem)
    if plan is None:
        plan = _CouplingPlan(problem)
        _plans[problem] = plan
    return plan


def _as_batch(z, n: int) -> tuple[np.ndarray, bool]:
    Z = np.asarray(z, dtype=complex)
    single = Z.ndim == 1
    if single:
        Z = Z[None, :]
    if Z.ndim != 2 or Z.shape[1] != n:
        raise ValueError(f"state must have {n} oscillators")
    if not np.all(np.isfinite(Z)):
        raise ValueError("non-finite oscillator state")
    return Z, single


def _real_with_check(acc: np.ndarray) -> np.ndarray:
    residue = np.abs(acc.imag)
    bound = REALNESS_TOL * (1.0 + np.abs(acc.real))
    if np.any(residue > bound):
        raise ValueError(f"imaginary residue {residue.max():g} exceeds tolerance")
    return acc.real


def potential_energy_batch(problem: PuboProblem, spec: PotentialSpec, Z) -> np.ndarray:
    """Energy of each row of a (B, n) complex state matrix."""
    Z, single = _as_batch(Z, problem.n)
    plan = coupling_plan(problem)
    acc = np.full(Z.shape[0], problem.constant, dtype=complex)

    X = Z @ problem.h.astype(complex)
    acc += 0.5 * (X + X.conj())

    if len(plan.pw):
        Za, Zb = Z[:, plan.pa], Z[:, plan.pb]
        w20, w21 = spec.w2
        if w21:
            X = (Za * Zb.conj()) @ plan.pw
            acc += w21 * 0.5 * (X + X.conj())
        if w20:
            X = (Za * Zb) @ plan.pw
            acc += w20 * 0.5 * (X + X.conj())

    if len(plan.tw):
        Za, Zb, Zc = Z[:, plan.ta], Z[:, plan.tb], Z[:, plan.tc]
        w30, w31 = spec.w3
        if w31:
            X = (Za * Zb * Zc.conj() + Za * Zb.conj() * Zc + Za.conj() * Zb * Zc) @ plan.tw
            acc += w31 * (X + X.conj()) / 6.0
        if w30:
            X = (Za * Zb * Zc) @ plan.tw
            acc += w30 * 0.5 * (X + X.conj())

    acc *= spec.global_scale
    if spec.shil_weight:
        acc += shil_energy_batch(Z, spec.shil_weight)
    return _real_with_check(acc)


def potential_energy(problem: PuboProblem, spec: PotentialSpec, z) -> float:
    """Energy of a single state vector (length n)."""
    Z, single = _as_batch(z, problem.n)
    if not single:
        raise ValueError("expected a single state; use potential_energy_batch")
    return float(potential_energy_batch(problem, spec, Z)[0])


def shil_energy_batch(Z, kappa_s: float) -> np.ndarray:
    Z = np.asarray(Z, dtype=complex)
    sq = Z * Z
    return kappa_s * 0.5 * (Z.shape[-1] - 0.5 * (sq + sq.conj()).sum(axis=-1))


def shil_energy(state_or_theta, kappa_s: float) -> float:
    """SHIL well energy: (kappa_s/2) sum (1 - Re z^2), or the phase form
    (kappa_s/2) sum (1 - cos 2 theta) when given a real phase vector."""
    if kappa_s < 0:
        raise ValueError("kappa_s must be >= 0")
    arr = np.asarray(state_or_theta)
    if np.iscomplexobj(arr):
        return float(_real_with_check(shil_energy_batch(arr, kappa_s)))
    return float(kappa_s * 0.5 * np.sum(1.0 - np.cos(2.0 * arr)))


def wirtinger_gradient_batch(problem: PuboProblem, spec: PotentialSpec, Z) -> np.ndarray:
    """g_i = dH/dz_i for each row of a (B, n) state matrix."""
    Z, single = _as_batch(Z, problem.n)
    plan = coupling_plan(problem)
    B = Z.shape[0]
    G = np.broadcast_to(0.5 * problem.h.astype(complex), (B, problem.n)).copy()

    blocks: list[np.ndarray] = []
    if len(plan.pw):
        Za, Zb = Z[:, plan.pa], Z[:, plan.pb]
        w20, w21 = spec.w2
        half_w = 0.5 * plan.pw
        pair_a = pair_b = 0.0
        if w21:
            pair_a = w21 * half_w * Zb.conj()
            pair_b = w21 * half_w * Za.conj()
        if w20:
            pair_a = pair_a + w20 * half_w * Zb
            pair_b = pair_b + w20 * half_w * Za
        blocks += [pair_a, pair_b]
    if len(plan.tw):
        Za, Zb, Zc = Z[:, plan.ta], Z[:, plan.tb], Z[:, plan.tc]
        w30, w31 = spec.w3
        tri_a = tri_b = tri_c = 0.0
        if w31:
            wk = w31 * plan.tw / 6.0
            tri_a = wk * (Zb * Zc.conj() + Zb.conj() * Zc + (Zb * Zc).conj())
            tri_b = wk * (Za * Zc.conj() + Za.conj() * Zc + (Za * Zc).conj())
            tri_c = wk * (Za * Zb.conj() + Za.conj() * Zb + (Za * Zb).conj())
        if w30:
            wk = 0.5 * w30 * plan.tw
            tri_a = tri_a + wk * Zb * Zc
            tri_b = tri_b + wk * Za * Zc
            tri_c = tri_c + wk * Za * Zb
        blocks += [tri_a, tri_b, tri_c]
    if blocks:
        plan.scatter(blocks, G)

    G *= spec.global_scale
    if spec.shil_weight:
        G -= 0.5 * spec.shil_weight * Z
    if not np.all(np.isfinite(G)):
        raise ValueError("non-finite gradient")
    return G[0] if single else G


def wirtinger_gradient(problem: PuboProblem, spec: PotentialSpec, z) -> np.ndarray:
    """Wirtinger partial dH/dz for a single state vector."""
    Z, single = _as_batch(z, problem.n)
    if not single:
        raise ValueError("expected a single state; use wirtinger_gradient_batch")
    return wirtinger_gradient_batch(problem, spec, Z)[0]


# --------------------------------------------------------------------------
# phase-only reduction (unit amplitudes, z_i = exp(-i theta_i))

def phase_energy(problem: PuboProblem, spec: PotentialSpec, theta) -> float:
    theta = np.asarray(theta, dtype=float)
    single = theta.ndim == 1
    T = theta[None, :] if single else theta
    if T.shape[1] != problem.n:
        raise ValueError(f"theta must have {problem.n} entries")
    plan = coupling_plan(problem)
    e = np.full(T.shape[0], problem.constant)
    e += np.cos(T) @ problem.h
    if len(plan.pw):
        Ta, Tb = T[:, plan.pa], T[:, plan.pb]
        w20, w21 = spec.w2
        if w21:
            e += w21 * (np.cos(Ta - Tb) @ plan.pw)
        if w20:
            e += w20 * (np.cos(Ta + Tb) @ plan.pw)
    if len(plan.tw):
        Ta, Tb, Tc = T[:, plan.ta], T[:, plan.tb], T[:, plan.tc]
        w30, w31 = spec.w3
        if w31:
            e += (w31 / 3.0) * (
                (np.cos(Ta + Tb - Tc) + np.cos(Ta - Tb + Tc) + np.cos(-Ta + Tb + Tc))
                @ plan.tw
            )
        if w30:
            e += w30 * (np.cos(Ta + Tb + Tc) @ plan.tw)
    e *= spec.global_scale
    if spec.shil_weight:
        e += spec.shil_weight * 0.5 * np.sum(1.0 - np.cos(2.0 * T), axis=1)
    return float(e[0]) if single else e


def phase_gradient(problem: PuboProblem, spec: PotentialSpec, theta) -> np.ndarray:
    """d(phase energy)/d(theta), batched like the energy."""
    theta = np.asarray(theta, dtype=float)
    single = theta.ndim == 1
    T = theta[None, :] if single else theta
    if T.shape[1] != problem.n:
        raise ValueError(f"theta must have {problem.n} entries")
    plan = coupling_plan(problem)
    G = np.broadcast_to(0.0, T.shape).copy()
    G -= np.sin(T) * problem.h

    blocks: list[np.ndarray] = []
    if len(plan.pw):
        Ta, Tb = T[:, plan.pa], T[:, plan.pb]
        w20, w21 = spec.w2
        ga = gb = 0.0
        if w21:
            s = w21 * plan.pw * np.sin(Ta - Tb)
            ga = -s
            gb = +s
        if w20:
            s = w20 * plan.pw * np.sin(Ta + Tb)
            ga = ga - s
            gb = gb - s
        blocks += [ga, gb]
    if len(plan.tw):
        Ta, Tb, Tc = T[:, plan.ta], T[:, plan.tb], T[:, plan.tc]
        w30, w31 = spec.w3
        ga = gb = gc = 0.0
        if w31:
            wk = w31 * plan.tw / 3.0
            s1 = np.sin(Ta + Tb - Tc)
            s2 = np.sin(Ta - Tb + Tc)
            s3 = np.sin(-Ta + Tb + Tc)
            ga = -wk * (s1 + s2 - s3)
            gb = -wk * (s1 - s2 + s3)
            gc = -wk * (-s1 + s2 + s3)
        if w30:
            s = w30 * plan.tw * np.sin(Ta + Tb + Tc)
            ga = ga - s
            gb = gb - s
            gc = gc - s
        blocks += [ga, gb, gc]
    if blocks:
        plan.scatter(blocks, G)

    G *= spec.global_scale
    if spec.shil_weight:
        G += spec.shil_weight * np.sin(2.0 * T)
    return G[0] if single else G


def phase_hessian_quadratic(spec: PotentialSpec, theta) -> np.ndarray:
    """Analytic 2x2 phase Hessian for two oscillators coupled by a single
    pair term of total weight 1, including the SHIL contribution."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (2,):
        raise ValueError("expected exactly two phases")
    w20, w21 = spec.w2
    cd = math.cos(theta[0] - theta[1])
    cs = math.cos(theta[0] + theta[1])
    k = spec.global_scale
    H = np.empty((2, 2))
    H[0, 0] = k * (-w21 * cd - w20 * cs)
    H[1, 1] = H[0, 0]
    H[0, 1] = H[1, 0] = k * (w21 * cd - w20 * cs)
    if spec.shil_weight:
        H[0, 0] += 2.0 * spec.shil_weight * math.cos(2.0 * theta[0])
        H[1, 1] += 2.0 * spec.shil_weight * math.cos(2.0 * theta[1])
    return H
