"""Stochastic Landau-Lifshitz-Gilbert integration for a monodomain magnet.

The equation of motion, with ``a = 1 / (q Ns)`` converting a spin current in
amperes into a torque rate, is

    (1 + alpha^2) dm/dt = -gamma m x H - alpha gamma m x (m x H)
                          + a m x (Is x m) + alpha a m x Is

with ``H`` the anisotropy field plus a Langevin field of variance
``2 alpha kBT / (gamma MsOmega dt)`` per component. It is integrated with the
stochastic Heun scheme (the same noise sample in predictor and corrector), so
the result is the Stratonovich solution, followed by renormalization.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numba import njit

from .errors import IntegrationError, ParameterError
from .magnet import CONSTANTS, AnisotropyClass, MagnetSpec, PhysicalConstants, derive

CHUNK = 1 << 17

DEFAULT_DT = {
    AnisotropyClass.IMA_CIRCULAR: 1e-13,
    AnisotropyClass.PMA_COMPENSATED: 1e-12,
}


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    duration: float
    seed: int | Sequence[int] = 0
    decimation: int = 1
    scheme: str = "Heun"
    warmup: float = 0.0  # discarded before t = 0

    def __post_init__(self):
        if not self.dt > 0:
            raise ParameterError("dt must be positive")
        if self.duration != 0 and self.duration < self.dt:
            raise ParameterError("duration must be zero or at least dt")
        if self.duration < 0 or self.warmup < 0:
            raise ParameterError("duration and warmup must be non-negative")
        if int(self.decimation) < 1:
            raise ParameterError("decimation must be >= 1")
        if self.scheme != "Heun":
            raise ParameterError(f"unsupported scheme {self.scheme!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    @property
    def n_warmup(self) -> int:
        return int(round(self.warmup / self.dt))


@dataclass
class Trajectory:
    times: np.ndarray
    m_samples: np.ndarray  # (n, 3)
    spec: MagnetSpec
    config: SolverConfig

    @property
    def dt_sample(self) -> float:
        return self.config.dt * self.config.decimation

    @property
    def mx(self):
        return self.m_samples[:, 0]

    @property
    def my(self):
        return self.m_samples[:, 1]

    @property
    def mz(self):
        return self.m_samples[:, 2]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "mx", "my", "mz"])
            for t, m in zip(self.times, self.m_samples):
                w.writerow([repr(float(t)), repr(float(m[0])), repr(float(m[1])), repr(float(m[2]))])


@dataclass(frozen=True)
class PiecewiseConstant:
    """Input waveform: ``values[k]`` holds from ``breaks[k]`` until the next break.

    Values are rows of any fixed width: 3-vectors of spin current (A) for the
    magnet alone, scalars for circuit inputs.
    """

    breaks: np.ndarray
    values: np.ndarray  # (k, dim)

    def __post_init__(self):
        b = np.atleast_1d(np.asarray(self.breaks, dtype=float))
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v.reshape(b.size, -1)
        if b.ndim != 1 or v.ndim != 2 or v.shape[0] != b.size:
            raise ParameterError("waveform needs one value per breakpoint")
        if b.size == 0 or b[0] != 0.0 or np.any(np.diff(b) <= 0):
            raise ParameterError("breakpoints must start at 0 and increase")
        if not np.all(np.isfinite(v)):
            raise ParameterError("spin current must be finite")
        object.__setattr__(self, "breaks", b)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, value) -> "PiecewiseConstant":
        return cls(np.array([0.0]), np.asarray(value, dtype=float).reshape(1, -1))

    @classmethod
    def step(cls, before, after, t_step: float) -> "PiecewiseConstant":
        v = np.array([np.atleast_1d(before), np.atleast_1d(after)], dtype=float)
        return cls(np.array([0.0, t_step]), v)

    def segments(self, n_steps: int, dt: float):
        """Yield (start, stop, value) step-index ranges of constant input."""
        done = 0
        while done < n_steps:
            t = done * dt
            k = int(np.searchsorted(self.breaks, t + 0.5 * dt, side="right")) - 1
            stop = n_steps
            if k + 1 < self.breaks.size:
                stop = min(n_steps, int(math.ceil(self.breaks[k + 1] / dt - 0.5)))
                stop = max(stop, done + 1)
            yield done, stop, self.values[max(k, 0)]
            done = stop

    def __call__(self, t: float) -> np.ndarray:
        k = np.searchsorted(self.breaks, t, side="right") - 1
        return self.values[max(k, 0)]


def as_waveform(Is, dim: int = 3) -> PiecewiseConstant:
    if Is is None:
        wave = PiecewiseConstant.constant(np.zeros(dim))
    elif isinstance(Is, PiecewiseConstant):
        wave = Is
    else:
        wave = PiecewiseConstant.constant(Is)
    if wave.values.shape[1] != dim:
        raise ParameterError(f"waveform values must have width {dim}")
    return wave


@njit(cache=True, inline="always")
def _rhs(mx, my, mz, hx, hy, hz, sx, sy, sz, gamma, alpha, a):
    # m x H
    cx = my * hz - mz * hy
    cy = mz * hx - mx * hz
    cz = mx * hy - my * hx
    # m x (m x H)
    dx = my * cz - mz * cy
    dy = mz * cx - mx * cz
    dz = mx * cy - my * cx
    # m x Is and m x (Is x m)
    px = my * sz - mz * sy
    py = mz * sx - mx * sz
    pz = mx * sy - my * sx
    qx = -(my * pz - mz * py)
    qy = -(mz * px - mx * pz)
    qz = -(mx * py - my * px)
    k = 1.0 / (1.0 + alpha * alpha)
    fx = k * (-gamma * cx - alpha * gamma * dx + a * qx + alpha * a * px)
    fy = k * (-gamma * cy - alpha * gamma * dy + a * qy + alpha * a * py)
    fz = k * (-gamma * cz - alpha * gamma * dz + a * qz + alpha * a * pz)
    return fx, fy, fz


@njit(cache=True, inline="always")
def _heun(mx, my, mz, tx, ty, tz, sx, sy, sz, hkp, hki, gamma, alpha, a, dt):
    f1x, f1y, f1z = _rhs(mx, my, mz, hkp * mx + tx, ty, hki * mz + tz, sx, sy, sz, gamma, alpha, a)
    px = mx + dt * f1x
    py = my + dt * f1y
    pz = mz + dt * f1z
    f2x, f2y, f2z = _rhs(px, py, pz, hkp * px + tx, ty, hki * pz + tz, sx, sy, sz, gamma, alpha, a)
    nx = mx + 0.5 * dt * (f1x + f2x)
    ny = my + 0.5 * dt * (f1y + f2y)
    nz = mz + 0.5 * dt * (f1z + f2z)
    inv = 1.0 / math.sqrt(nx * nx + ny * ny + nz * nz)
    return nx * inv, ny * inv, nz * inv


@njit(cache=True)
def _run_chunk(m, noise, sigma, s_vec, hkp, hki, gamma, alpha, a, dt, decim, step0, out, out_pos):
    """Advance ``m`` in place over ``len(noise)`` steps; returns (out_pos, bad_step)."""
    mx, my, mz = m[0], m[1], m[2]
    sx, sy, sz = s_vec[0], s_vec[1], s_vec[2]
    for i in range(noise.shape[0]):
        mx, my, mz = _heun(
            mx, my, mz, sigma * noise[i, 0], sigma * noise[i, 1], sigma * noise[i, 2],
            sx, sy, sz, hkp, hki, gamma, alpha, a, dt,
        )
        if not (math.isfinite(mx) and math.isfinite(my) and math.isfinite(mz)):
            return out_pos, step0 + i
        if decim > 0 and (step0 + i + 1) % decim == 0:
            out[out_pos, 0] = mx
            out[out_pos, 1] = my
            out[out_pos, 2] = mz
            out_pos += 1
    m[0], m[1], m[2] = mx, my, mz
    return out_pos, -1


def thermal_sigma(spec: MagnetSpec, dt: float, constants: PhysicalConstants = CONSTANTS) -> float:
    """Per-component standard deviation of the Langevin field, Oe."""
    if not dt > 0:
        raise ParameterError("dt must be positive")
    d = derive(spec, constants)
    return math.sqrt(2.0 * spec.alpha * d.kBT / (constants.gamma * d.MsOmega * dt))


def stt_rate(spec: MagnetSpec, constants: PhysicalConstants = CONSTANTS) -> float:
    """1 / (q Ns): torque rate per ampere of spin current."""
    return 1.0 / (constants.q * derive(spec, constants).Ns)


def effective_field(m, spec: MagnetSpec, thermal=(0.0, 0.0, 0.0)) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    return np.array([spec.Hkp * m[0], 0.0, spec.Hki * m[2]]) + np.asarray(thermal, dtype=float)


def thermal_field_sample(spec: MagnetSpec, dt: float, rng: np.random.Generator,
                         constants: PhysicalConstants = CONSTANTS) -> np.ndarray:
    return thermal_sigma(spec, dt, constants) * rng.standard_normal(3)


def random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def step(state, spec: MagnetSpec, Is, dt: float, rng: np.random.Generator,
         constants: PhysicalConstants = CONSTANTS) -> np.ndarray:
    """One Heun step from unit vector ``state``; returns the new unit vector."""
    m = np.asarray(state, dtype=float)
    th = thermal_field_sample(spec, dt, rng, constants)
    s = np.zeros(3) if Is is None else np.asarray(Is, dtype=float)
    out = _heun(m[0], m[1], m[2], th[0], th[1], th[2], s[0], s[1], s[2],
                spec.Hkp, spec.Hki, constants.gamma, spec.alpha, stt_rate(spec, constants), dt)
    out = np.array(out)
    if not np.all(np.isfinite(out)):
        raise IntegrationError("non-finite magnetization", step_index=0)
    return out


def make_rng(seed) -> np.random.Generator:
    """Generator for a seed or a (base_seed, replica, ...) key."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence(seed))


def _integrate(m, rng, n_steps, decim, out, out_pos, sigma, wave, dt, pars):
    """Drive the kernel over ``n_steps``, cutting chunks at waveform breakpoints."""
    hkp, hki, gamma, alpha, a = pars
    for start, stop, s_vec in wave.segments(n_steps, dt):
        for lo in range(start, stop, CHUNK):
            n = min(CHUNK, stop - lo)
            noise = rng.standard_normal((n, 3))
            out_pos, bad = _run_chunk(m, noise, sigma, s_vec, hkp, hki, gamma, alpha, a, dt,
                                      decim, lo, out, out_pos)
            if bad >= 0:
                raise IntegrationError(f"non-finite magnetization at step {bad}", step_index=bad)
    return out_pos


def simulate(spec: MagnetSpec, Is=None, config: SolverConfig | None = None, m0=None,
             constants: PhysicalConstants = CONSTANTS) -> Trajectory:
    """Integrate one trajectory; a deterministic function of (spec, Is, config.seed, m0).

    ``Is`` is None, a constant 3-vector or a :class:`PiecewiseConstant`
    waveform (time measured from the end of warm-up). The initial state is
    drawn uniformly on the sphere unless ``m0`` is given.
    """
    if config is None:
        raise ParameterError("a SolverConfig is required")
    wave = as_waveform(Is)
    rng = make_rng(config.seed)
    m = random_unit_vector(rng) if m0 is None else np.asarray(m0, dtype=float) / np.linalg.norm(m0)
    m = m.copy()
    dt = config.dt
    pars = (spec.Hkp, spec.Hki, constants.gamma, spec.alpha, stt_rate(spec, constants))
    sigma = thermal_sigma(spec, dt, constants)
    scratch = np.empty((0, 3))
    if config.n_warmup:
        warm = PiecewiseConstant.constant(wave.values[0])
        _integrate(m, rng, config.n_warmup, 0, scratch, 0, sigma, warm, dt, pars)
    decim = int(config.decimation)
    n_steps = config.n_steps
    n_rec = n_steps // decim + 1
    out = np.empty((n_rec, 3))
    out[0] = m
    _integrate(m, rng, n_steps, decim, out, 1, sigma, wave, dt, pars)
    times = np.arange(n_rec) * dt * decim
    return Trajectory(times=times, m_samples=out, spec=spec, config=config)


def run_ensemble(fn: Callable, tasks: Sequence, threads: int = 1) -> list:
    """Map ``fn`` over ``tasks``; results come back in task order regardless of threads."""
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))
