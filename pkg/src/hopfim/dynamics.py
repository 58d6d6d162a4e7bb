"""Coupled oscillator ODEs: local Hopf dynamics plus gradient coupling.

Three models:

* proposed: dz/dt = f(z) - (dH/dz)^*, the conjugated-Wirtinger-gradient flow
  of the real potential-mix energy. Descends the energy (up to the local
  term's transient amplitude motion, which vanishes on the unit cycle).
* baseline: dz/dt = f(z) - dH/dz with the holomorphic polynomial obtained by
  substituting z for s directly. Real and imaginary parts of H oscillate.
* kuramoto: phase-only reduction; dtheta/dt = -(1/2) grad of the phase
  energy, which equals the proposed model's phase velocity at clamped unit
  amplitude.

The local term f(z) = (lambda + i omega) z + rho z |z|^2 has a stable limit
cycle at |z| = 1 (lambda = -rho enforced). Fixed-step explicit Euler and RK4
integrators; schedules are evaluated at step start and held across RK4
stages. A divergence guard freezes any trial whose amplitude leaves |z| <= 10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from hopfim import _kernels
from hopfim.potentials import (
    PotentialSpec,
    coupling_plan,
    phase_energy,
    phase_gradient,
    potential_energy_batch,
    wirtinger_gradient_batch,
)
from hopfim.pubo_map import PuboProblem


class IntegrationError(RuntimeError):
    """Non-finite state during integration; carries time and oscillator."""

    def __init__(self, message: str, time: float, index: int):
        super().__init__(message)
        self.time = time
        self.index = index


@dataclass(frozen=True)
class LocalDynamicsParams:
    """Hopf local dynamics f(z) = (lam + i omega) z + rho z |z|^2."""

    lam: float = 1.0
    rho: float = -1.0
    omega: float = 0.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be > 0")
        if not self.rho < 0:
            raise ValueError("rho must be < 0")
        if abs(self.lam + self.rho) > 1e-12:
            raise ValueError("unit limit cycle requires lam = -rho")


@dataclass(frozen=True)
class Schedule:
    """Scalar schedule: constant, or linear ramp clamped to [t_start, t_end]."""

    kind: str = "constant"
    start_value: float = 0.0
    end_value: float = 0.0
    t_start: float = 0.0
    t_end: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "linear_ramp"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.t_start > self.t_end:
            raise ValueError("t_start must be <= t_end")

    def value(self, t: float) -> float:
        if self.kind == "constant":
            return self.start_value
        if t <= self.t_start:
            return self.start_value
        if t >= self.t_end:
            return self.end_value
        u = (t - self.t_start) / (self.t_end - self.t_start)
        return self.start_value + u * (self.end_value - self.start_value)


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"
    dt: float = 0.01
    t_final: float = 136.0
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("rk4", "euler"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if self.t_final < self.dt:
            raise ValueError("t_final must be >= dt")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_final / self.dt)))


@dataclass(frozen=True)
class ModelKind:
    """A model selection plus its (possibly scheduled) potential spec.

    shil_schedule overrides spec.shil_weight over time; w2_target with
    w2_schedule linearly interpolates the quadratic weights from spec.w2
    (schedule value 0) to w2_target (schedule value 1). The baseline model
    ignores the potential spec entirely.
    """

    kind: str
    spec: PotentialSpec
    shil_schedule: Schedule | None = None
    w2_target: tuple[float, float] | None = None
    w2_schedule: Schedule | None = None

    def __post_init__(self):
        if self.kind not in ("proposed", "baseline", "kuramoto"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if (self.w2_target is None) != (self.w2_schedule is None):
            raise ValueError("w2_target and w2_schedule go together")

    @property
    def scheduled(self) -> bool:
        return self.shil_schedule is not None or self.w2_schedule is not None

    def spec_at(self, t: float) -> PotentialSpec:
        spec = self.spec
        if self.w2_schedule is not None:
            u = self.w2_schedule.value(t)
            w2 = tuple(
                (1.0 - u) * a + u * b for a, b in zip(spec.w2, self.w2_target)
            )
            spec = replace(spec, w2=w2)
        if self.shil_schedule is not None:
            spec = replace(spec, shil_weight=self.shil_schedule.value(t))
        return spec


@dataclass
class IntegrationResult:
    """Trajectory samples and final state for one batch (or one trial).

    energies holds each model's own descent quantity: the potential-mix
    energy plus the local radial potential for the proposed model (its
    Lyapunov function), Re of the holomorphic polynomial for the baseline,
    and the phase energy for the Kuramoto model."""

    times: np.ndarray        # (S,) sample times
    energies: np.ndarray     # (B, S) or (S,); NaN after a trial froze
    final: np.ndarray        # (B, n) or (n,) final state
    status: np.ndarray       # (B,) or scalar: 0 ok, 1 diverged, 2 non-finite
    event_time: np.ndarray   # (B,) or scalar: freeze time, NaN if none
    event_index: np.ndarray  # (B,) or scalar: offending oscillator, -1 if none

    @property
    def ok(self) -> bool:
        return bool(np.all(np.asarray(self.status) == 0))


def f_local(Z, params: LocalDynamicsParams):
    """Local Hopf dynamics, elementwise over any state array."""
    Z = np.asarray(Z, dtype=complex)
    return (params.lam + 1j * params.omega) * Z + params.rho * Z * np.abs(Z) ** 2


def local_potential(state, params: LocalDynamicsParams = LocalDynamicsParams()):
    """Radial potential of the local dynamics, summed over oscillators:
    V = sum_i (-lam |z_i|^2 - rho/2 |z_i|^4).

    Satisfies f(z) = -(dV/dz)^* at omega = 0, so the proposed flow is exact
    gradient descent of potential_energy + local_potential. That sum is the
    quantity integrate() records for the proposed model; the coupling energy
    alone can rise transiently while amplitudes trade against it."""
    Z = np.asarray(state, dtype=complex)
    a2 = Z.real**2 + Z.imag**2
    v = -params.lam * a2 - 0.5 * params.rho * a2**2
    return v.sum(axis=-1)


def rhs_proposed(problem: PuboProblem, spec: PotentialSpec, state,
                 params: LocalDynamicsParams = LocalDynamicsParams()):
    """dz/dt = f(z) - conj(dH/dz) for a single state or a (B, n) batch."""
    Z = np.asarray(state, dtype=complex)
    g = wirtinger_gradient_batch(problem, spec, Z)
    out = f_local(Z, params) - np.conj(g)
    if not np.all(np.isfinite(out)):
        raise ValueError("non-finite rhs")
    return out


def baseline_energy(problem: PuboProblem, state) -> np.ndarray:
    """Holomorphic direct-substitution polynomial H(z); complex values."""
    Z = np.asarray(state, dtype=complex)
    single = Z.ndim == 1
    if single:
        Z = Z[None, :]
    plan = coupling_plan(problem)
    e = np.full(Z.shape[0], problem.constant, dtype=complex)
    e += Z @ problem.h.astype(complex)
    if len(plan.pw):
        e += (Z[:, plan.pa] * Z[:, plan.pb]) @ plan.pw
    if len(plan.tw):
        e += (Z[:, plan.ta] * Z[:, plan.tb] * Z[:, plan.tc]) @ plan.tw
    return e[0] if single else e


def baseline_gradient(problem: PuboProblem, state) -> np.ndarray:
    """Ordinary complex derivative dH/dz of the holomorphic polynomial."""
    Z = np.asarray(state, dtype=complex)
    single = Z.ndim == 1
    if single:
        Z = Z[None, :]
    plan = coupling_plan(problem)
    B = Z.shape[0]
    G = np.broadcast_to(problem.h.astype(complex), (B, problem.n)).copy()
    blocks = []
    if len(plan.pw):
        Za, Zb = Z[:, plan.pa], Z[:, plan.pb]
        blocks += [plan.pw * Zb, plan.pw * Za]
    if len(plan.tw):
        Za, Zb, Zc = Z[:, plan.ta], Z[:, plan.tb], Z[:, plan.tc]
        blocks += [plan.tw * Zb * Zc, plan.tw * Za * Zc, plan.tw * Za * Zb]
    if blocks:
        plan.scatter(blocks, G)
    return G[0] if single else G


def rhs_baseline(problem: PuboProblem, state,
                 params: LocalDynamicsParams = LocalDynamicsParams()):
    """dz/dt = f(z) - dH/dz with the holomorphic polynomial H."""
    Z = np.asarray(state, dtype=complex)
    out = f_local(Z, params) - baseline_gradient(problem, Z)
    if not np.all(np.isfinite(out)):
        raise ValueError("non-finite rhs")
    return out


def rhs_kuramoto(problem: PuboProblem, spec: PotentialSpec, theta) -> np.ndarray:
    """Phase-only velocities: half the negative phase-energy gradient, which
    matches the proposed model's phase velocity at clamped unit amplitude."""
    return -0.5 * phase_gradient(problem, spec, theta)


def initialize(n: int, seed, mode: str = "random_phase_unit_amp") -> np.ndarray:
    """Random initial state; seed may be an int or a numpy SeedSequence."""
    rng = np.random.default_rng(seed)
    if mode == "random_phase_unit_amp":
        theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
        return np.exp(1j * theta)
    if mode == "small_random":
        xy = rng.uniform(-0.1, 0.1, size=(2, n))
        return xy[0] + 1j * xy[1]
    raise ValueError(f"unknown init mode {mode!r}")


def _sample_steps(n_steps: int, stride: int) -> np.ndarray:
    if stride < 1:
        raise ValueError("record_stride must be >= 1")
    steps = list(range(0, n_steps, stride)) + [n_steps]
    return np.array(steps, dtype=np.int64)


def _schedule_arrays(model: ModelKind, config: IntegratorConfig):
    steps = config.n_steps
    w20s = np.empty(steps + 1)
    w21s = np.empty(steps + 1)
    w30s = np.empty(steps + 1)
    w31s = np.empty(steps + 1)
    kss = np.empty(steps + 1)
    if model.scheduled:
        for k in range(steps + 1):
            spec = model.spec_at(k * config.dt)
            w20s[k], w21s[k] = spec.w2
            w30s[k], w31s[k] = spec.w3
            kss[k] = spec.shil_weight
    else:
        spec = model.spec
        w20s[:], w21s[:] = spec.w2
        w30s[:], w31s[:] = spec.w3
        kss[:] = spec.shil_weight
    return w20s, w21s, w30s, w31s, kss


def integrate(model: ModelKind, problem: PuboProblem, config: IntegratorConfig,
              initial, params: LocalDynamicsParams = LocalDynamicsParams(),
              record_stride: int = 1, engine: str = "auto") -> IntegrationResult:
    """Integrate one trial (1-D initial state) or a batch (2-D, one row per
    trial). Deterministic for a fixed config and batch.

    engine: "auto" picks the compiled path when available and the run is
    noise-free; "numpy" forces the reference implementation; "numba" requires
    the compiled path.
    """
    arr = np.asarray(initial)
    single = arr.ndim == 1
    if model.kind == "kuramoto":
        state = np.array(arr, dtype=float, ndmin=2)
    else:
        state = np.array(arr, dtype=complex, ndmin=2)
    if state.shape[1] != problem.n:
        raise ValueError(f"initial state must have {problem.n} oscillators")
    if not np.all(np.isfinite(state)):
        raise ValueError("non-finite initial state")

    if engine not in ("auto", "numba", "numpy"):
        raise ValueError(f"unknown engine {engine!r}")
    use_numba = (
        _kernels.HAVE_NUMBA
        and model.kind in ("proposed", "baseline")
        and config.noise_sigma == 0.0
    )
    if engine == "numpy":
        use_numba = False
    if engine == "numba" and not use_numba:
        raise ValueError("compiled path unavailable for this configuration")

    steps = config.n_steps
    samples = _sample_steps(steps, record_stride)
    times = samples * config.dt
    B = state.shape[0]
    energies = np.full((B, len(samples)), np.nan)
    status = np.zeros(B, dtype=np.int8)
    event_step = np.full(B, -1, dtype=np.int64)
    event_index = np.full(B, -1, dtype=np.int64)

    if use_numba:
        plan = coupling_plan(problem)
        w20s, w21s, w30s, w31s, kss = _schedule_arrays(model, config)
        _kernels.run_complex(
            state, model.kind == "baseline",
            plan.pa, plan.pb, plan.pw, plan.ta, plan.tb, plan.tc, plan.tw,
            problem.h, problem.constant,
            w20s, w21s, w30s, w31s, kss, model.spec.global_scale,
            params.lam, params.rho, params.omega,
            config.dt, steps, config.method == "rk4",
            samples, energies, status, event_step, event_index,
        )
    else:
        _integrate_numpy(model, problem, config, params, state, samples,
                         energies, status, event_step, event_index)

    event_time = np.where(event_step >= 0, event_step * config.dt, np.nan)
    result = IntegrationResult(times, energies, state, status, event_time,
                               event_index)
    if single:
        result = IntegrationResult(
            times, energies[0], state[0], status[0], event_time[0],
            event_index[0])
        if result.status == 2:
            raise IntegrationError(
                f"non-finite state at t={result.event_time:g}, oscillator "
                f"{int(result.event_index)}", float(result.event_time),
                int(result.event_index))
    return result


def _integrate_numpy(model, problem, config, params, state, samples,
                     energies, status, event_step, event_index):
    """Reference implementation; also the only path with noise support."""
    kind = model.kind
    rng = np.random.default_rng(config.seed)
    dt = config.dt
    B, n = state.shape
    active = np.ones(B, dtype=bool)

    def rhs(Z, spec):
        if kind == "proposed":
            return f_local(Z, params) - np.conj(
                wirtinger_gradient_batch(problem, spec, Z))
        if kind == "baseline":
            return f_local(Z, params) - baseline_gradient(problem, Z)
        return rhs_kuramoto(problem, spec, Z)

    def energy(Z, spec):
        if kind == "baseline":
            return np.real(baseline_energy(problem, Z))
        if kind == "kuramoto":
            return phase_energy(problem, spec, Z)
        return potential_energy_batch(problem, spec, Z) + local_potential(Z, params)

    si = 0
    for step in range(config.n_steps + 1):
        t = step * dt
        spec = model.spec_at(t)
        if si < len(samples) and step == samples[si]:
            e = energy(state[active], spec)
            energies[active, si] = e
            si += 1
        if step == config.n_steps:
            break
        sub = state[active]
        if config.method == "rk4":
            k1 = rhs(sub, spec)
            k2 = rhs(sub + 0.5 * dt * k1, spec)
            k3 = rhs(sub + 0.5 * dt * k2, spec)
            k4 = rhs(sub + dt * k3, spec)
            sub = sub + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        else:
            sub = sub + dt * rhs(sub, spec)
        if config.noise_sigma > 0.0:
            scale_n = config.noise_sigma * math.sqrt(dt)
            if kind == "kuramoto":
                sub = sub + scale_n * rng.standard_normal(sub.shape)
            else:
                noise = rng.standard_normal((2,) + sub.shape)
                sub = sub + scale_n * (noise[0] + 1j * noise[1])
        state[active] = sub

        if kind == "kuramoto":
            bad = ~np.isfinite(state).all(axis=1)
            codes = np.full(B, 2, dtype=np.int8)
        else:
            a2 = state.real**2 + state.imag**2
            finite = np.isfinite(state).all(axis=1)
            bad = ~(a2 <= 100.0).all(axis=1)
            codes = np.where(finite, 1, 2).astype(np.int8)
        newly = bad & active
        if newly.any():
            for b in np.flatnonzero(newly):
                if kind == "kuramoto":
                    idx = int(np.argmax(~np.isfinite(state[b])))
                else:
                    ok_i = (state[b].real**2 + state[b].imag**2) <= 100.0
                    idx = int(np.argmax(~ok_i))
                status[b] = codes[b]
                event_step[b] = step + 1
                event_index[b] = idx
            active &= ~newly
