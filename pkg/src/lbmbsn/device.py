"""Hardware binary stochastic neurons built from a fluctuating MTJ.

Two designs share one readout chain (MTJ -> resistive divider -> inverter):

* ``A_sot``: an input charge current is converted to a spin current that
  pins the free layer; the divider resistor is fixed (``+`` divider).
* ``B_series_fet``: the input voltage sets the resistance of a series
  transistor; the magnet only sees the small read current (``-`` divider).

The transistor and the inverter are behavioural analytic models; see
:class:`CircuitParams` for their calibration. The module also carries the
ideal software neuron ``m = sgn(tanh(I) - r)`` and its synapse.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from numba import njit
from scipy.optimize import minimize_scalar

from .errors import ConfigError, FitError, IntegrationError, ParameterError
from .magnet import CONSTANTS, MagnetSpec, PhysicalConstants, derive, ip_ima, tau_c
from .sllg import (CHUNK, DEFAULT_DT, PiecewiseConstant, _heun, as_waveform, make_rng,
                   random_unit_vector, run_ensemble, stt_rate, thermal_sigma)

R_MIN, R_MAX = 10.0, 1e12


class Variant(str, enum.Enum):
    A_SOT = "A_sot"
    B_SERIES_FET = "B_series_fet"


@dataclass(frozen=True)
class MtjParams:
    G0: float = 1.0 / 25e3  # S
    TMR: float = 1.1
    P: float = math.sqrt(1.1 / 3.1)  # ~0.596, the polarization implied by TMR = 110%

    def __post_init__(self):
        if not self.G0 > 0:
            raise ParameterError("G0 must be positive")
        if not 0 < self.P < 1:
            raise ParameterError("polarization must lie in (0, 1)")
        if not 0 <= self.TMR < 2:
            raise ParameterError("TMR must lie in [0, 2) for a positive conductance")
        implied = 2 * self.P**2 / (1 - self.P**2)
        if abs(implied - self.TMR) > 0.02 * implied:
            raise ParameterError(f"TMR {self.TMR} inconsistent with P={self.P} (2P^2/(1-P^2)={implied:.3f})")

    @classmethod
    def from_polarization(cls, P: float, G0: float = 1.0 / 25e3) -> "MtjParams":
        return cls(G0=G0, TMR=2 * P**2 / (1 - P**2), P=P)

    @property
    def k(self) -> float:
        """Relative conductance modulation TMR / (2 + TMR)."""
        return self.TMR / (2.0 + self.TMR)


@dataclass(frozen=True)
class CircuitParams:
    """Supply, divider and behavioural transistor/inverter parameters.

    ``V0_fet`` is chosen so the fitted input scale of design B is about
    50 mV; ``Rinv_mid`` so the inverter draws Vdd^2/R = 10 uW at threshold;
    ``Vinv`` sets the inverter transition width.
    """

    Vdd: float = 0.8  # V, sources at +-Vdd/2
    R0_ref: float = 25e3  # ohm
    V0_fet: float = 0.13  # V
    Vinv: float = 0.035  # V
    Rinv_mid: float = 64e3  # ohm
    Cnode: float = 1e-15  # F
    beta_she: float = 1.0
    read_disturb: bool = True

    def __post_init__(self):
        for name in ("Vdd", "R0_ref", "V0_fet", "Vinv", "Rinv_mid", "Cnode", "beta_she"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        if not self.Vinv < self.Vdd / 4:
            raise ParameterError("Vinv must be small compared with Vdd")


@dataclass(frozen=True)
class BsnDesign:
    variant: Variant
    magnet: MagnetSpec
    mtj: MtjParams = MtjParams()
    circuit: CircuitParams = CircuitParams()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))

    @property
    def divider_sign(self) -> int:
        return 1 if self.variant is Variant.A_SOT else -1

    @property
    def label(self) -> str:
        return self.name or f"{self.variant.value[0]}-{self.magnet.name or 'magnet'}"


@dataclass
class ScalingFit:
    vout0_V: float
    input_scale: float  # A for design A, V for design B
    t0_s: float
    rms_residual: float

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)


@dataclass
class BsnTrace:
    t: np.ndarray
    Vi: np.ndarray
    Vout: np.ndarray
    P_mtj: np.ndarray
    P_inv: np.ndarray
    m: np.ndarray  # (n, 3)
    R_mtj: np.ndarray
    R0: np.ndarray

    def to_csv(self, path) -> None:
        cols = [self.t, self.Vi, self.Vout, self.P_mtj, self.P_inv, self.m[:, 2]]
        _write_columns(path, ["t_s", "Vi_V", "Vout_V", "P_mtj_W", "P_inv_W", "mz"], cols)


@dataclass
class SigmoidPoints:
    inputs: np.ndarray
    vout_mean: np.ndarray
    vout_err: np.ndarray
    vout_lo: np.ndarray  # raw (unaveraged) band, 5th percentile
    vout_hi: np.ndarray  # 95th percentile
    p_up: np.ndarray  # fraction of time with Vout > 0
    p_mtj_mean: np.ndarray
    p_mtj_estimate: np.ndarray  # Vdd^2 / (<R_mtj> + <R0>)
    p_inv_mean: np.ndarray

    def to_csv(self, path) -> None:
        _write_columns(
            path,
            ["input", "vout_mean_V", "vout_err_V", "vout_p05_V", "vout_p95_V", "p_up",
             "p_mtj_W", "p_mtj_estimate_W", "p_inv_W"],
            [self.inputs, self.vout_mean, self.vout_err, self.vout_lo, self.vout_hi, self.p_up,
             self.p_mtj_mean, self.p_mtj_estimate, self.p_inv_mean],
        )


@dataclass
class StepResponse:
    t: np.ndarray
    vout: np.ndarray  # ensemble average
    v_initial: float
    v_final: float
    t0: float
    settled: bool
    p_mtj: np.ndarray = field(repr=False, default=None)
    p_inv: np.ndarray = field(repr=False, default=None)

    def normalized(self) -> np.ndarray:
        swing = self.v_final - self.v_initial
        if swing == 0:
            return np.zeros_like(self.vout)
        return (self.vout - self.v_initial) / swing

    def to_csv(self, path) -> None:
        cols = [self.t, self.vout]
        header = ["t_s", "vout_avg_V"]
        if self.p_mtj is not None:
            cols += [self.p_mtj, self.p_inv]
            header += ["p_mtj_avg_W", "p_inv_avg_W"]
        _write_columns(path, header, cols)


def _write_columns(path, header, cols):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([repr(float(v)) for v in row])


# --- readout chain -----------------------------------------------------------

def mtj_resistance(mz, mtj: MtjParams):
    g = mtj.G0 * (1.0 + np.asarray(mz, dtype=float) * mtj.k)
    if np.any(g <= 0):
        raise ParameterError("non-positive MTJ conductance")
    r = 1.0 / g
    return float(r) if np.ndim(r) == 0 else r


def divider_voltage(Rmtj, R0, Vdd: float, sign: int):
    Rmtj = np.asarray(Rmtj, dtype=float)
    R0 = np.asarray(R0, dtype=float)
    v = sign * (Vdd / 2.0) * (Rmtj - R0) / (Rmtj + R0)
    return float(v) if np.ndim(v) == 0 else v


def fet_resistance(Vin, circuit: CircuitParams):
    r = circuit.R0_ref * np.exp(-np.clip(np.asarray(Vin, dtype=float) / circuit.V0_fet, -700, 700))
    r = np.clip(r, R_MIN, R_MAX)
    return float(r) if np.ndim(r) == 0 else r


def inverter(Vi, circuit: CircuitParams):
    """Returns (Vout, branch_resistance) of the behavioural inverter."""
    x = np.asarray(Vi, dtype=float) / circuit.Vinv
    vout = -(circuit.Vdd / 2.0) * np.tanh(x)
    r = np.minimum(circuit.Rinv_mid * np.cosh(np.clip(x / 2.0, -300, 300)) ** 2, R_MAX)
    if np.ndim(vout) == 0:
        return float(vout), float(r)
    return vout, r


def delta_vi_estimate(P: float, Vdd: float) -> float:
    """Half peak-to-peak inverter-input swing, P^2 Vdd / (4 - P^4)."""
    return P**2 * Vdd / (4.0 - P**4)


def nominal_input_scale(design: BsnDesign, constants: PhysicalConstants = CONSTANTS) -> float:
    """Expected input scale: the pinning current (A) or the transistor-set voltage (B)."""
    if design.variant is Variant.A_SOT:
        return ip_ima(derive(design.magnet, constants)) / design.circuit.beta_she
    return 0.05


# --- co-simulation -----------------------------------------------------------

@njit(cache=True)
def _bsn_chunk(m, vi_state, noise, sigma, hkp, hki, gamma, alpha, a, dt, u, is_b,
               G0, k, Vdd, R0_ref, V0, Vinv, Rinv, Cnode, beta, P, disturb, sign,
               decim, step0, out, out_pos):
    mx, my, mz = m[0], m[1], m[2]
    vi = vi_state[0]
    if is_b:
        x = -u / V0
        if x > 700.0:
            x = 700.0
        R0 = R0_ref * math.exp(x)
        if R0 < 10.0:
            R0 = 10.0
        elif R0 > 1e12:
            R0 = 1e12
    else:
        R0 = R0_ref
    for i in range(noise.shape[0]):
        R = 1.0 / (G0 * (1.0 + k * mz))
        if is_b:
            sz = P * Vdd / (R + R0) if disturb else 0.0
        else:
            sz = beta * u
        mx, my, mz = _heun(mx, my, mz, sigma * noise[i, 0], sigma * noise[i, 1],
                           sigma * noise[i, 2], 0.0, 0.0, sz, hkp, hki, gamma, alpha, a, dt)
        if not (math.isfinite(mx) and math.isfinite(my) and math.isfinite(mz)):
            return out_pos, step0 + i
        R = 1.0 / (G0 * (1.0 + k * mz))
        target = sign * 0.5 * Vdd * (R - R0) / (R + R0)
        tau = R * R0 / (R + R0) * Cnode
        vi += (target - vi) * (1.0 - math.exp(-dt / tau))
        if decim > 0 and (step0 + i + 1) % decim == 0:
            xv = vi / Vinv
            out[out_pos, 0] = mx
            out[out_pos, 1] = my
            out[out_pos, 2] = mz
            out[out_pos, 3] = vi
            out[out_pos, 4] = -0.5 * Vdd * math.tanh(xv)
            out[out_pos, 5] = R
            out[out_pos, 6] = R0
            h = 0.5 * xv
            if h > 300.0:
                h = 300.0
            elif h < -300.0:
                h = -300.0
            rb = Rinv * math.cosh(h) ** 2
            if rb > 1e12:
                rb = 1e12
            out[out_pos, 7] = rb
            out_pos += 1
    m[0], m[1], m[2] = mx, my, mz
    vi_state[0] = vi
    return out_pos, -1


def simulate_bsn(design: BsnDesign, input_waveform, duration: float, dt: float | None = None,
                 seed=0, decimation: int = 10, warmup: float = 0.0, m0=None,
                 constants: PhysicalConstants = CONSTANTS) -> BsnTrace:
    """Co-simulate the magnet and the readout circuit.

    ``input_waveform`` is a scalar (charge current in A for design A, input
    voltage in V for design B) or a scalar :class:`PiecewiseConstant`; time
    zero is the end of the warm-up, which runs at the initial input value.
    """
    wave = as_waveform(input_waveform, dim=1)
    spec = design.magnet
    dt = DEFAULT_DT[spec.anisotropy_class] if dt is None else dt
    if not (dt > 0 and duration >= 0 and warmup >= 0 and decimation >= 1):
        raise ParameterError("invalid time grid")
    c, mtj = design.circuit, design.mtj
    rng = make_rng(seed)
    m = random_unit_vector(rng) if m0 is None else np.asarray(m0, float) / np.linalg.norm(m0)
    m = m.copy()
    sigma = thermal_sigma(spec, dt, constants)
    is_b = design.variant is Variant.B_SERIES_FET
    kpars = (sigma, spec.Hkp, spec.Hki, constants.gamma, spec.alpha, stt_rate(spec, constants), dt)
    cpars = (mtj.G0, mtj.k, c.Vdd, c.R0_ref, c.V0_fet, c.Vinv, c.Rinv_mid, c.Cnode, c.beta_she,
             mtj.P, c.read_disturb, float(design.divider_sign))

    u_init = float(wave.values[0, 0])
    R0_init = fet_resistance(u_init, c) if is_b else c.R0_ref
    vi = np.array([divider_voltage(mtj_resistance(m[2], mtj), R0_init, c.Vdd, design.divider_sign)])

    def run(n_steps, wv, decim, out, pos):
        for start, stop, val in wv.segments(n_steps, dt):
            for lo in range(start, stop, CHUNK):
                n = min(CHUNK, stop - lo)
                noise = rng.standard_normal((n, 3))
                pos, bad = _bsn_chunk(m, vi, noise, *kpars, float(val[0]), is_b, *cpars,
                                      decim, lo, out, pos)
                if bad >= 0:
                    raise IntegrationError(f"non-finite magnetization at step {bad}", step_index=bad)
        return pos

    n_warm = int(round(warmup / dt))
    if n_warm:
        run(n_warm, PiecewiseConstant.constant([u_init]), 0, np.empty((0, 8)), 0)
    n_steps = int(round(duration / dt))
    n_rec = n_steps // decimation + 1
    out = np.empty((n_rec, 8))
    R = mtj_resistance(m[2], mtj)
    vout0, rb0 = inverter(vi[0], c)
    out[0] = [m[0], m[1], m[2], vi[0], vout0, R, R0_init, rb0]
    run(n_steps, wave, decimation, out, 1)
    Vdd2 = c.Vdd**2
    return BsnTrace(
        t=np.arange(n_rec) * dt * decimation,
        Vi=out[:, 3], Vout=out[:, 4],
        P_mtj=Vdd2 / (out[:, 5] + out[:, 6]), P_inv=Vdd2 / out[:, 7],
        m=out[:, :3], R_mtj=out[:, 5], R0=out[:, 6],
    )


def _block_err(x, n_blocks=20):
    b = x.size // n_blocks
    if b < 1:
        return float("nan")
    means = x[: b * n_blocks].reshape(n_blocks, b).mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(n_blocks))


def _sigmoid_point(task):
    design, u, window, warmup, dt, decim, seed, constants = task
    tr = simulate_bsn(design, u, window, dt=dt, seed=seed, decimation=decim, warmup=warmup,
                      constants=constants)
    v = tr.Vout[1:]
    Vdd2 = design.circuit.Vdd**2
    return (float(v.mean()), _block_err(v), float(np.percentile(v, 5)), float(np.percentile(v, 95)),
            float(np.mean(v > 0)), float(tr.P_mtj[1:].mean()),
            Vdd2 / float(tr.R_mtj[1:].mean() + tr.R0[1:].mean()), float(tr.P_inv[1:].mean()))


def steady_state_sweep(design: BsnDesign, input_grid, avg_window: float, warmup: float | None = None,
                       dt: float | None = None, base_seed=0, threads: int = 1,
                       constants: PhysicalConstants = CONSTANTS) -> SigmoidPoints:
    """Time-averaged output at each input value (one independent run per point)."""
    tc = tau_c(derive(design.magnet, constants))
    if avg_window < 100 * tc * (1 - 1e-9):
        raise ConfigError(f"averaging window {avg_window:.3g} s is below 100 tau_c ({100 * tc:.3g} s)",
                          path="avg_window")
    dt = DEFAULT_DT[design.magnet.anisotropy_class] if dt is None else dt
    warmup = 10 * tc if warmup is None else warmup
    decim = max(1, int(round(1e-12 / dt)))
    key = base_seed if isinstance(base_seed, tuple) else (base_seed,)
    tasks = [(design, float(u), avg_window, warmup, dt, decim, (*key, i), constants)
             for i, u in enumerate(input_grid)]
    res = np.array(run_ensemble(_sigmoid_point, tasks, threads))
    return SigmoidPoints(np.asarray(input_grid, dtype=float), *res.T)


def _step_replica(task):
    design, u_from, u_to, pre, duration, dt, decim, seed, constants = task
    n_pre = int(round(pre / dt))
    n_pre -= n_pre % decim
    if n_pre == 0:
        wave = PiecewiseConstant.constant([u_to])
    else:
        wave = PiecewiseConstant.step([u_from], [u_to], n_pre * dt)
    tr = simulate_bsn(design, wave, n_pre * dt + duration, dt=dt, seed=seed, decimation=decim,
                      constants=constants)
    k = n_pre // decim
    return tr.Vout[k:], tr.P_mtj[k:], tr.P_inv[k:]


def step_response(design: BsnDesign, input_step, ensemble_size: int, duration: float,
                  pre: float | None = None, dt: float | None = None, base_seed=0, threads: int = 1,
                  decimation: int | None = None, constants: PhysicalConstants = CONSTANTS) -> StepResponse:
    """Ensemble-averaged output after the input jumps ``input_step = (from, to)`` at t = 0.

    t0 is the first time the average covers half of the final-minus-initial
    swing; ``settled`` is False when the last 10% of the trace still drifts.
    """
    if ensemble_size < 100:
        raise ConfigError("ensemble_size must be at least 100", path="ensemble_size")
    u_from, u_to = (float(v) for v in input_step)
    tc = tau_c(derive(design.magnet, constants))
    pre = 10 * tc if pre is None else pre
    dt = DEFAULT_DT[design.magnet.anisotropy_class] if dt is None else dt
    decim = decimation or max(1, int(round(1e-12 / dt)))
    key = base_seed if isinstance(base_seed, tuple) else (base_seed,)
    tasks = [(design, u_from, u_to, pre, duration, dt, decim, (*key, r), constants)
             for r in range(ensemble_size)]
    res = run_ensemble(_step_replica, tasks, threads)
    vouts = np.array([r[0] for r in res])
    avg = vouts.mean(axis=0)
    t = np.arange(avg.size) * dt * decim
    v_init = float(avg[0])
    tail = avg[int(0.9 * avg.size):]
    v_final = float(tail.mean())
    half = tail.size // 2
    se = vouts[:, int(0.9 * avg.size):].mean(axis=1).std(ddof=1) / math.sqrt(ensemble_size)
    settled = abs(tail[:half].mean() - tail[half:].mean()) <= 3 * max(se, 1e-12) * math.sqrt(2)
    t0 = half_swing_time(t, avg, v_init, v_final)
    return StepResponse(t, avg, v_init, v_final, t0, bool(settled),
                        np.mean([r[1] for r in res], axis=0), np.mean([r[2] for r in res], axis=0))


def half_swing_time(t, v, v_init, v_final) -> float:
    swing = v_final - v_init
    if swing == 0:
        return float("nan")
    y = (np.asarray(v) - v_init) / swing
    idx = np.nonzero(y >= 0.5)[0]
    if idx.size == 0:
        return float("nan")
    k = idx[0]
    if k == 0:
        return float(t[0])
    return float(t[k - 1] + (0.5 - y[k - 1]) * (t[k] - t[k - 1]) / (y[k] - y[k - 1]))


# --- scaling collapse --------------------------------------------------------

def fit_scaling(points: SigmoidPoints, step: StepResponse | None = None, span: float = 3.0) -> ScalingFit:
    """Fit <Vout>/Vout0 = tanh(u / input_scale) and read t0 off the step response.

    Vout0 is half the distance between the two saturation plateaus (mean of
    the two outermost points at each end). The reported residual is the RMS
    deviation over |u| <= ``span`` input scales.
    """
    u = np.asarray(points.inputs, dtype=float)
    v = np.asarray(points.vout_mean, dtype=float)
    if u.size < 9:
        raise FitError("need at least 9 sigmoid points")
    order = np.argsort(u)
    u, v = u[order], v[order]
    hi, lo = v[-2:], v[:2]
    vout0 = (hi.mean() - lo.mean()) / 2.0
    if not vout0 > 0:
        raise FitError("output does not increase across the sweep")
    if abs(hi[1] - hi[0]) > 0.05 * vout0 or abs(lo[1] - lo[0]) > 0.05 * vout0:
        raise FitError("sweep does not reach saturation at both ends")
    y = v / vout0
    umax = np.max(np.abs(u))
    res = minimize_scalar(lambda s: np.sum((y - np.tanh(u / s)) ** 2),
                          bounds=(umax * 1e-3, umax * 10), method="bounded",
                          options={"xatol": umax * 1e-9})
    s = float(res.x)
    inside = np.abs(u) <= span * s * (1 + 1e-9)
    rms = float(np.sqrt(np.mean((y[inside] - np.tanh(u[inside] / s)) ** 2)))
    t0 = step.t0 if step is not None else float("nan")
    return ScalingFit(vout0_V=float(vout0), input_scale=s, t0_s=float(t0), rms_residual=rms)


def collapse_rms(points: SigmoidPoints, fit: ScalingFit, span: float = 3.0) -> float:
    u = np.asarray(points.inputs) / fit.input_scale
    y = np.asarray(points.vout_mean) / fit.vout0_V
    inside = np.abs(u) <= span * (1 + 1e-9)
    return float(np.sqrt(np.mean((y[inside] - np.tanh(u[inside])) ** 2)))


def step_collapse_rms(steps, t0s=None, t_max: float = 4.0, n: int = 200) -> float:
    """RMS spread of normalized step traces on a common t/t0 grid (0..t_max)."""
    grid = np.linspace(0.0, t_max, n)
    curves = []
    for i, s in enumerate(steps):
        t0 = s.t0 if t0s is None else t0s[i]
        curves.append(np.interp(grid, s.t / t0, s.normalized()))
    curves = np.array(curves)
    return float(np.sqrt(np.mean((curves - curves.mean(axis=0)) ** 2)))


def energy_per_evaluation(p_mtj: float, p_inv: float, t0: float, tau_c_s: float = 0.0) -> float:
    """Energy in J: operating-point power times the response window max(t0, tau_c)."""
    return (p_mtj + p_inv) * max(t0, tau_c_s)


# --- behavioural neuron ------------------------------------------------------

@dataclass
class BehavioralBsn:
    update_interval: float = 1e-9  # s
    seed: int | tuple = 0
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if not self.update_interval > 0:
            raise ParameterError("update_interval must be positive")
        self.rng = make_rng(self.seed)


def behavioral_update(bsn: BehavioralBsn, Ii):
    """sgn(tanh(Ii) - r) with r uniform on [-1, 1]; elementwise for arrays."""
    Ii = np.asarray(Ii, dtype=float)
    r = bsn.rng.uniform(-1.0, 1.0, size=Ii.shape)
    out = np.where(np.tanh(Ii) - r >= 0, 1, -1)
    return int(out) if out.ndim == 0 else out


def synapse_input(W, m) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    m = np.asarray(m, dtype=float)
    if W.ndim != 2 or m.ndim != 1 or W.shape[1] != m.shape[0]:
        raise ParameterError(f"weight matrix {W.shape} does not conform to state {m.shape}")
    return W @ m


def run_network(W, n_sweeps: int, bsn: BehavioralBsn, m0=None, h=None) -> np.ndarray:
    """Sequential-sweep network of behavioural neurons; returns states after each sweep."""
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    h = np.zeros(n) if h is None else np.asarray(h, dtype=float)
    m = np.ones(n) if m0 is None else np.asarray(m0, dtype=float).copy()
    states = np.empty((n_sweeps, n), dtype=int)
    r = bsn.rng.uniform(-1.0, 1.0, size=(n_sweeps, n))
    for s in range(n_sweeps):
        for i in range(n):
            Ii = W[i] @ m + h[i]
            m[i] = 1.0 if math.tanh(Ii) - r[s, i] >= 0 else -1.0
        states[s] = m
    return states


def binarized_p_up(trace: BsnTrace) -> float:
    return float(np.mean(trace.Vout[1:] > 0))


def default_designs(magnets: dict[str, MagnetSpec], circuit: CircuitParams | None = None,
                    mtj: MtjParams | None = None) -> list[BsnDesign]:
    circuit = circuit or CircuitParams()
    mtj = mtj or MtjParams()
    return [BsnDesign(v, mag, mtj, circuit, name=f"{v.value[0]}-{name}")
            for v in Variant for name, mag in magnets.items()]
