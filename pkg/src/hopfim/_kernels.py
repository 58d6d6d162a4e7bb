"""Compiled inner loops for the oscillator integrators.

Explicit per-trial, per-monomial loops compiled with numba. One kernel runs a
whole trajectory batch to the final time so the Python-level overhead per
step vanishes. Schedules are pre-evaluated into per-step weight arrays by the
caller (weights are held fixed across the stages of a step). The numpy
fallback in dynamics.py implements identical semantics; an equivalence test
keeps the two paths honest.

Status codes per trial: 0 ok, 1 divergence guard (|z| > 10), 2 non-finite.
Frozen trials keep their last state and record NaN energies afterwards.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def _rhs_complex(Z, out, active, baseline, pa, pb, pw, ta, tb, tc, tw, h,
                 w20, w21, w30, w31, ks, scale, lam, rho, omega, gbuf):
    """dz/dt for every active row: local Hopf term minus gradient coupling.

    baseline True: holomorphic derivative of the direct-substitution
    polynomial. baseline False: conjugated Wirtinger gradient of the
    potential-mix energy (plus SHIL).
    """
    B, n = Z.shape
    P = pa.shape[0]
    T = ta.shape[0]
    for b in range(B):
        if not active[b]:
            continue
        g = gbuf[b]
        if baseline:
            for i in range(n):
                g[i] = h[i]
        else:
            for i in range(n):
                g[i] = scale * 0.5 * h[i] - 0.5 * ks * Z[b, i]
        if baseline:
            for p in range(P):
                i, j = pa[p], pb[p]
                w = pw[p]
                g[i] += w * Z[b, j]
                g[j] += w * Z[b, i]
            for t in range(T):
                i, j, k = ta[t], tb[t], tc[t]
                w = tw[t]
                g[i] += w * Z[b, j] * Z[b, k]
                g[j] += w * Z[b, i] * Z[b, k]
                g[k] += w * Z[b, i] * Z[b, j]
        else:
            c1 = scale * 0.5 * w21
            c0 = scale * 0.5 * w20
            for p in range(P):
                i, j = pa[p], pb[p]
                w = pw[p]
                zi, zj = Z[b, i], Z[b, j]
                if w21 != 0.0:
                    g[i] += c1 * w * np.conj(zj)
                    g[j] += c1 * w * np.conj(zi)
                if w20 != 0.0:
                    g[i] += c0 * w * zj
                    g[j] += c0 * w * zi
            d1 = scale * w31 / 6.0
            d0 = scale * 0.5 * w30
            for t in range(T):
                i, j, k = ta[t], tb[t], tc[t]
                w = tw[t]
                zi, zj, zk = Z[b, i], Z[b, j], Z[b, k]
                if w31 != 0.0:
                    cw = d1 * w
                    g[i] += cw * (zj * np.conj(zk) + np.conj(zj) * zk
                                  + np.conj(zj * zk))
                    g[j] += cw * (zi * np.conj(zk) + np.conj(zi) * zk
                                  + np.conj(zi * zk))
                    g[k] += cw * (zi * np.conj(zj) + np.conj(zi) * zj
                                  + np.conj(zi * zj))
                if w30 != 0.0:
                    cw = d0 * w
                    g[i] += cw * zj * zk
                    g[j] += cw * zi * zk
                    g[k] += cw * zi * zj
        for i in range(n):
            z = Z[b, i]
            f = (lam + 1j * omega) * z + rho * z * (z.real * z.real + z.imag * z.imag)
            if baseline:
                out[b, i] = f - g[i]
            else:
                out[b, i] = f - np.conj(g[i])


@njit(cache=True)
def _energy_complex(Z, active, baseline, pa, pb, pw, ta, tb, tc, tw, h, const,
                    w20, w21, w30, w31, ks, scale, lam, rho, out):
    """Recorded energy per row: potential-mix energy (with SHIL) plus the
    local radial potential for the proposed model, Re of the holomorphic
    polynomial for the baseline."""
    B, n = Z.shape
    P = pa.shape[0]
    T = ta.shape[0]
    for b in range(B):
        if not active[b]:
            out[b] = np.nan
            continue
        e = const
        if baseline:
            for i in range(n):
                e += h[i] * Z[b, i].real
            for p in range(P):
                e += pw[p] * (Z[b, pa[p]] * Z[b, pb[p]]).real
            for t in range(T):
                e += tw[t] * (Z[b, ta[t]] * Z[b, tb[t]] * Z[b, tc[t]]).real
            out[b] = e
        else:
            for i in range(n):
                e += h[i] * Z[b, i].real
            for p in range(P):
                zi, zj = Z[b, pa[p]], Z[b, pb[p]]
                w = pw[p]
                if w21 != 0.0:
                    e += w21 * w * (zi * np.conj(zj)).real
                if w20 != 0.0:
                    e += w20 * w * (zi * zj).real
            for t in range(T):
                zi, zj, zk = Z[b, ta[t]], Z[b, tb[t]], Z[b, tc[t]]
                w = tw[t]
                if w31 != 0.0:
                    e += (w31 / 3.0) * w * ((zi * zj * np.conj(zk)).real
                                            + (zi * np.conj(zj) * zk).real
                                            + (np.conj(zi) * zj * zk).real)
                if w30 != 0.0:
                    e += w30 * w * (zi * zj * zk).real
            e *= scale
            if ks != 0.0:
                for i in range(n):
                    z = Z[b, i]
                    e += ks * 0.5 * (1.0 - (z * z).real)
            for i in range(n):
                a2 = Z[b, i].real * Z[b, i].real + Z[b, i].imag * Z[b, i].imag
                e += -lam * a2 - 0.5 * rho * a2 * a2
            out[b] = e


@njit(cache=True)
def run_complex(Z, baseline, pa, pb, pw, ta, tb, tc, tw, h, const,
                w20s, w21s, w30s, w31s, kss, scale, lam, rho, omega,
                dt, nsteps, rk4, sample_steps, energies, status, event_step,
                event_index):
    """Integrate a (B, n) complex batch in place over nsteps fixed steps.

    Weight arrays carry one value per step index (evaluated at step start).
    Energies are recorded at the listed sample steps before stepping; the
    entry for sample step nsteps is the final state's energy.
    """
    B, n = Z.shape
    active = np.ones(B, dtype=np.bool_)
    gbuf = np.empty((B, n), dtype=np.complex128)
    k1 = np.empty((B, n), dtype=np.complex128)
    k2 = np.empty((B, n), dtype=np.complex128)
    k3 = np.empty((B, n), dtype=np.complex128)
    k4 = np.empty((B, n), dtype=np.complex128)
    ztmp = np.empty((B, n), dtype=np.complex128)
    erow = np.empty(B, dtype=np.float64)
    si = 0
    for step in range(nsteps + 1):
        if si < sample_steps.shape[0] and step == sample_steps[si]:
            _energy_complex(Z, active, baseline, pa, pb, pw, ta, tb, tc, tw,
                            h, const, w20s[step], w21s[step], w30s[step],
                            w31s[step], kss[step], scale, lam, rho, erow)
            for b in range(B):
                energies[b, si] = erow[b]
            si += 1
        if step == nsteps:
            break
        w20 = w20s[step]
        w21 = w21s[step]
        w30 = w30s[step]
        w31 = w31s[step]
        ks = kss[step]
        if rk4:
            _rhs_complex(Z, k1, active, baseline, pa, pb, pw, ta, tb, tc, tw,
                         h, w20, w21, w30, w31, ks, scale, lam, rho, omega, gbuf)
            for b in range(B):
                if active[b]:
                    for i in range(n):
                        ztmp[b, i] = Z[b, i] + 0.5 * dt * k1[b, i]
            _rhs_complex(ztmp, k2, active, baseline, pa, pb, pw, ta, tb, tc, tw,
                         h, w20, w21, w30, w31, ks, scale, lam, rho, omega, gbuf)
            for b in range(B):
                if active[b]:
                    for i in range(n):
                        ztmp[b, i] = Z[b, i] + 0.5 * dt * k2[b, i]
            _rhs_complex(ztmp, k3, active, baseline, pa, pb, pw, ta, tb, tc, tw,
                         h, w20, w21, w30, w31, ks, scale, lam, rho, omega, gbuf)
            for b in range(B):
                if active[b]:
                    for i in range(n):
                        ztmp[b, i] = Z[b, i] + dt * k3[b, i]
            _rhs_complex(ztmp, k4, active, baseline, pa, pb, pw, ta, tb, tc, tw,
                         h, w20, w21, w30, w31, ks, scale, lam, rho, omega, gbuf)
            for b in range(B):
                if active[b]:
                    for i in range(n):
                        Z[b, i] = Z[b, i] + (dt / 6.0) * (
                            k1[b, i] + 2.0 * k2[b, i] + 2.0 * k3[b, i] + k4[b, i])
        else:
            _rhs_complex(Z, k1, active, baseline, pa, pb, pw, ta, tb, tc, tw,
                         h, w20, w21, w30, w31, ks, scale, lam, rho, omega, gbuf)
            for b in range(B):
                if active[b]:
                    for i in range(n):
                        Z[b, i] = Z[b, i] + dt * k1[b, i]
        for b in range(B):
            if not active[b]:
                continue
            for i in range(n):
                z = Z[b, i]
                a2 = z.real * z.real + z.imag * z.imag
                if not (a2 <= 100.0):
                    active[b] = False
                    finite = (np.isfinite(z.real) and np.isfinite(z.imag))
                    status[b] = 1 if finite else 2
                    event_step[b] = step + 1
                    event_index[b] = i
                    break
