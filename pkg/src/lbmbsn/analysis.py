"""Measured quantities from magnetization trajectories.

Autocorrelation and FWHM correlation times, the exponential/Gaussian shape
test, pinning currents (from bias sweeps and from the correlation integral)
and equilibrium histograms of the out-of-plane component.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FitError, InsufficientDataError, RangeError, TruncationError
from .magnet import CONSTANTS, MagnetSpec, PhysicalConstants, derive, tau_c
from .sllg import DEFAULT_DT, SolverConfig, run_ensemble, simulate

N_BLOCKS = 20
N_BOOTSTRAP = 200


@dataclass
class Fit:
    model: str  # "exponential" | "gaussian"
    rate_or_width: float  # 1/s for exponential, s for gaussian
    r_squared: float
    other_r_squared: float = float("nan")


@dataclass
class CorrelationResult:
    lags: np.ndarray  # s, non-negative; C is even so negative lags mirror these
    C: np.ndarray
    tau_c_fwhm: float
    tau_c_err: float = float("nan")
    fit: Fit | None = None

    def symmetric(self):
        """Lags and values over negative and positive lags."""
        return (np.concatenate([-self.lags[:0:-1], self.lags]),
                np.concatenate([self.C[:0:-1], self.C]))

    def to_csv(self, path) -> None:
        _write_columns(path, ["lag_s", "C"], [self.lags, self.C])


@dataclass
class PinningSweep:
    Is_values: np.ndarray  # A
    m_avg: np.ndarray
    m_err: np.ndarray
    Ip_fit: float
    Ip_err: float
    fit_window: tuple[int, ...]  # indices used in the slope fit

    def to_csv(self, path) -> None:
        _write_columns(path, ["Is_A", "m_avg", "m_err"], [self.Is_values, self.m_avg, self.m_err])


@dataclass
class Histogram:
    edges: np.ndarray
    densities: np.ndarray
    sample_sigma: float
    sample_mean: float
    n_samples: int
    samples: np.ndarray = field(repr=False, default=None)


def _write_columns(path, header, cols):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([repr(float(v)) for v in row])


def write_summary(path, measured: float, analytic: float, **extra) -> dict:
    """JSON summary of one measured scalar against its closed form."""
    summary = {
        "measured": measured,
        "analytic": analytic,
        "relative_deviation": (measured - analytic) / analytic if analytic else float("nan"),
        **extra,
    }
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    return summary


def _autocov(x: np.ndarray, n_lags: int) -> np.ndarray:
    """Biased autocovariance sum_i x_i x_{i+k} / N for k < n_lags, rows independent."""
    n = x.shape[-1]
    nfft = 1 << int(math.ceil(math.log2(2 * n - 1)))
    f = np.fft.rfft(x, nfft, axis=-1)
    acov = np.fft.irfft(f * np.conj(f), nfft, axis=-1)[..., :n_lags]
    return acov / n


def fwhm(lags: np.ndarray, C: np.ndarray) -> float:
    """Full width at half maximum of an even function given on lags >= 0."""
    below = np.nonzero(C < 0.5)[0]
    if below.size == 0:
        raise TruncationError("correlation never falls below one half in the lag window")
    k = below[0]
    t0, t1, c0, c1 = lags[k - 1], lags[k], C[k - 1], C[k]
    return 2.0 * (t0 + (c0 - 0.5) * (t1 - t0) / (c0 - c1))


def autocorrelation(series, dt_sample: float, max_lag: float, remove_mean: bool = True,
                    seed: int = 0) -> CorrelationResult:
    """Normalized autocorrelation of one series, or the pooled estimate of several rows.

    Rows of a 2-D ``series`` are independent realizations (replicas, or
    equivalent components); their autocovariances are averaged before
    normalizing. The error on the FWHM comes from a bootstrap over
    contiguous blocks, or over rows when blocks would be shorter than the
    lag window.
    """
    x = np.atleast_2d(np.asarray(series, dtype=float))
    n = x.shape[1]
    n_lags = int(round(max_lag / dt_sample)) + 1
    if n < 10 * (n_lags - 1) or n_lags < 3:
        raise InsufficientDataError(
            f"series of {n} samples is shorter than 10 x max_lag ({10 * (n_lags - 1)})")
    scale = np.mean(x * x)
    if remove_mean:
        x = x - x.mean(axis=1, keepdims=True)
    var = np.mean(x * x)
    if not var > 1e-24 * scale or not var > 1e-300:
        raise InsufficientDataError("series has zero variance")

    acov = _autocov(x, n_lags).mean(axis=0)
    C = acov / acov[0]
    lags = np.arange(n_lags) * dt_sample
    tau = fwhm(lags, C)

    # bootstrap on the FWHM: over contiguous blocks when they are long enough
    # to hold the lag window, otherwise over the independent rows
    tau_err = float("nan")
    block = n // N_BLOCKS
    units = None
    if block >= 10 * (n_lags - 1) // 4 and block > n_lags:
        blocks = x[:, : block * N_BLOCKS].reshape(x.shape[0], N_BLOCKS, block)
        units = _autocov(blocks, n_lags).mean(axis=0)  # (N_BLOCKS, n_lags)
    elif x.shape[0] >= 4:
        units = _autocov(x, n_lags)
    if units is not None:
        rng = np.random.default_rng(seed)
        k = units.shape[0]
        taus = []
        for _ in range(N_BOOTSTRAP):
            pick = units[rng.integers(0, k, k)].mean(axis=0)
            try:
                taus.append(fwhm(lags, pick / pick[0]))
            except TruncationError:
                pass
        if len(taus) > 10:
            tau_err = float(np.std(taus))
    result = CorrelationResult(lags=lags, C=C, tau_c_fwhm=tau, tau_c_err=tau_err)
    try:
        result.fit = classify_correlation(result)
    except FitError:
        pass
    return result


def _r_squared(y, yhat):
    ss_res = np.sum((y - yhat) ** 2)
    ss_tot = np.sum((y - y.mean()) ** 2)
    return 1.0 - ss_res / ss_tot if ss_tot > 0 else float("nan")


def classify_correlation(result: CorrelationResult) -> Fit:
    """Fit ln C = -r|t| and ln C = -t^2/(2 s^2) over the leading C > 0.1 region.

    Both fits go through C(0) = 1. r^2 is scored on C itself; the model with
    the larger score wins.
    """
    C, t = result.C, result.lags
    if not np.any(C[1:] > 0):
        raise FitError("correlation is non-positive at every non-zero lag")
    stop = np.nonzero(C <= 0.1)[0]
    k = stop[0] if stop.size else C.size
    if k < 3:
        raise FitError("too few lags above C = 0.1 to fit")
    tt, cc = t[1:k], C[1:k]
    y = np.log(cc)
    rate = -np.sum(y * tt) / np.sum(tt * tt)
    b = -np.sum(y * tt**2) / np.sum(tt**4)
    r2_exp = _r_squared(cc, np.exp(-rate * tt))
    width = 1.0 / math.sqrt(2 * b) if b > 0 else float("inf")
    r2_gauss = _r_squared(cc, np.exp(-b * tt**2))
    if r2_gauss > r2_exp:
        return Fit("gaussian", width, r2_gauss, r2_exp)
    return Fit("exponential", rate, r2_exp, r2_gauss)


def sustained_cutoff(C: np.ndarray, level: float = 0.01) -> int | None:
    """First index from which |C| stays below ``level`` for at least as many lags again."""
    below = np.abs(C) < level
    n = C.size
    k = 1
    while k < n:
        if below[k]:
            end = min(n, 2 * k + 1)
            run = below[k:end]
            if run.all():
                return k
            k += int(np.argmin(run))
        k += 1
    return None


def ip_from_correlation(result: CorrelationResult, Ns: float,
                        constants: PhysicalConstants = CONSTANTS) -> float:
    """Pinning current q Ns C(0) / integral of C over t >= 0, in amperes."""
    C, t = result.C, result.lags
    k = sustained_cutoff(C)
    if k is None:
        integral = np.trapezoid(C, t)
        bound = abs(C[-1]) * t[-1] / integral if integral > 0 else float("inf")
        if np.min(C) >= 0.05 or C[-1] >= 0.05:
            raise TruncationError("correlation has not decayed within the lag window", bound=bound)
        k = C.size - 1
    integral = np.trapezoid(C[: k + 1], t[: k + 1])
    if not integral > 0:
        raise FitError("non-positive correlation integral")
    return constants.q * Ns * C[0] / integral


def fit_pinning(Is_values, m_avg, m_err=None, window: float = 0.4) -> tuple[float, float, tuple]:
    """Zero-intercept slope of <m> against Is over |<m>| <= window; returns (Ip, err, idx)."""
    Is_values = np.asarray(Is_values, dtype=float)
    m_avg = np.asarray(m_avg, dtype=float)
    if np.all(np.abs(m_avg[Is_values != 0]) > 0.8):
        raise RangeError("every bias point is saturated (|<m>| > 0.8)")
    idx = np.nonzero((np.abs(m_avg) <= window) & (Is_values != 0))[0]
    if idx.size < 2:
        raise RangeError("fewer than two bias points inside the linear-response window")
    x, y = Is_values[idx], m_avg[idx]
    slope = np.sum(x * y) / np.sum(x * x)
    if not slope > 0:
        raise FitError("pinning slope is not positive")
    if m_err is not None:
        e = np.asarray(m_err, dtype=float)[idx]
        s_err = math.sqrt(np.sum((x * e) ** 2)) / np.sum(x * x)
    else:
        resid = y - slope * x
        s_err = math.sqrt(np.sum(resid**2) / max(idx.size - 1, 1) / np.sum(x * x))
    return 1.0 / slope, s_err / slope**2, tuple(int(i) for i in idx)


def block_mean_error(x: np.ndarray, seed: int = 0) -> float:
    """Standard error of the mean by a 20-block bootstrap."""
    x = np.asarray(x, dtype=float)
    block = x.size // N_BLOCKS
    if block < 1:
        return float("nan")
    means = x[: block * N_BLOCKS].reshape(N_BLOCKS, block).mean(axis=1)
    rng = np.random.default_rng(seed)
    boot = means[rng.integers(0, N_BLOCKS, (N_BOOTSTRAP, N_BLOCKS))].mean(axis=1)
    return float(np.std(boot))


def _bias_point(task):
    spec, Is, duration, dt, warmup, decim, seed, constants = task
    cfg = SolverConfig(dt=dt, duration=duration, seed=seed, decimation=decim, warmup=warmup)
    tr = simulate(spec, np.array([0.0, 0.0, Is]), cfg, constants=constants)
    mz = tr.mz[1:]
    return float(mz.mean()), block_mean_error(mz)


def bias_sweep(spec: MagnetSpec, Is_values, per_point_duration: float, dt: float | None = None,
               base_seed=0, threads: int = 1, warmup: float | None = None,
               constants: PhysicalConstants = CONSTANTS):
    """Long-time <mz> at each spin current (polarized along z); returns (m_avg, m_err)."""
    d = derive(spec, constants)
    dt = DEFAULT_DT[spec.anisotropy_class] if dt is None else dt
    tc = tau_c(d)
    warmup = 10 * tc if warmup is None else warmup
    decim = max(1, int(tc / dt / 20))
    key = base_seed if isinstance(base_seed, tuple) else (base_seed,)
    tasks = [(spec, float(I), per_point_duration, dt, warmup, decim, (*key, i), constants)
             for i, I in enumerate(Is_values)]
    res = run_ensemble(_bias_point, tasks, threads)
    return np.array([r[0] for r in res]), np.array([r[1] for r in res])


def pinning_from_sweep(spec: MagnetSpec, Is_range, per_point_duration: float,
                       config: SolverConfig | None = None, threads: int = 1,
                       constants: PhysicalConstants = CONSTANTS) -> PinningSweep:
    """Pinning current from the small-signal slope of <mz> against Is.

    ``config`` supplies dt, base seed and warm-up; its duration is ignored in
    favour of ``per_point_duration``.
    """
    Is_values = np.asarray(Is_range, dtype=float)
    dt = config.dt if config is not None else None
    seed = config.seed if config is not None else 0
    warmup = config.warmup if (config is not None and config.warmup > 0) else None
    m_avg, m_err = bias_sweep(spec, Is_values, per_point_duration, dt=dt, base_seed=seed,
                              threads=threads, warmup=warmup, constants=constants)
    ip, ip_err, idx = fit_pinning(Is_values, m_avg, m_err)
    return PinningSweep(Is_values, m_avg, m_err, ip, ip_err, idx)


def mx_histogram(trajectory, bins: int = 101, spacing: float | None = None,
                 constants: PhysicalConstants = CONSTANTS) -> Histogram:
    """Density of mx over [-1, 1] from samples thinned to ``spacing`` (default 2 tau_c)."""
    if spacing is None:
        spacing = 2.0 * tau_c(derive(trajectory.spec, constants))
    stride = max(1, int(round(spacing / trajectory.dt_sample)))
    samples = np.asarray(trajectory.mx[::stride])
    if samples.size < 1000:
        raise InsufficientDataError(f"only {samples.size} decorrelated samples (need 1000)")
    dens, edges = np.histogram(samples, bins=bins, range=(-1.0, 1.0), density=True)
    return Histogram(edges=edges, densities=dens, sample_sigma=float(samples.std()),
                     sample_mean=float(samples.mean()), n_samples=int(samples.size),
                     samples=samples)
