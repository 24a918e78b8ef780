"""Estimators checked against surrogate series whose statistics are known exactly."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.signal import lfilter

from lbmbsn.analysis import (CorrelationResult, autocorrelation, block_mean_error, classify_correlation,
                             fit_pinning, fwhm, ip_from_correlation, mx_histogram, sustained_cutoff)
from lbmbsn.errors import FitError, InsufficientDataError, RangeError, TruncationError
from lbmbsn.magnet import CONSTANTS, autocorr_analytic, derive, ip_ima, preset, tau_c_ima
from lbmbsn.sllg import SolverConfig, Trajectory


def ou(n, tau_steps, seed, rows=1):
    """Unit-variance AR(1) series with C(k) = exp(-k / tau_steps)."""
    phi = math.exp(-1.0 / tau_steps)
    xi = np.random.default_rng(seed).standard_normal((rows, n)) * math.sqrt(1 - phi**2)
    x = lfilter([1.0], [1.0, -phi], xi, axis=1)
    return x[:, 2000:]


def result_from(kind, d, lags):
    C = autocorr_analytic(kind, d, None, lags)
    return CorrelationResult(lags=lags, C=C, tau_c_fwhm=fwhm(lags, C))


def test_fwhm_of_ou_surrogate():
    tau = 20.0
    r = autocorrelation(ou(400_000, tau, 1), 1.0, 5 * tau)
    assert r.tau_c_fwhm == pytest.approx(2 * tau * math.log(2), rel=0.05)
    assert 0 < r.tau_c_err < 0.05 * r.tau_c_fwhm
    assert r.fit.model == "exponential"
    assert r.fit.rate_or_width == pytest.approx(1 / tau, rel=0.05)


def test_pooled_rows_match_single_series():
    x = ou(100_000, 10.0, 2, rows=6)
    r = autocorrelation(x, 1.0, 50)
    assert r.tau_c_fwhm == pytest.approx(20 * math.log(2), rel=0.05)
    assert np.isfinite(r.tau_c_err)


def test_white_noise_decorrelates():
    n = 200_000
    r = autocorrelation(np.random.default_rng(3).standard_normal(n), 1.0, 50)
    assert r.C[0] == 1.0
    assert np.max(np.abs(r.C[1:])) < 3 / math.sqrt(n) * 1.5
    assert r.tau_c_fwhm < 1.0


def test_constant_series_rejected():
    with pytest.raises(InsufficientDataError):
        autocorrelation(np.full(10_000, 0.3), 1.0, 10)


def test_short_series_rejected():
    with pytest.raises(InsufficientDataError):
        autocorrelation(np.random.default_rng(0).standard_normal(99), 1.0, 10)


def test_no_half_crossing():
    with pytest.raises(TruncationError):
        fwhm(np.arange(5.0), np.ones(5))


def test_classify_analytic_forms(d1):
    tc = tau_c_ima(d1)
    lags = np.linspace(0, 3 * tc, 301)
    g = classify_correlation(result_from("IMA_circular", d1, lags))
    assert g.model == "gaussian" and g.r_squared > 0.999
    assert g.rate_or_width == pytest.approx(tc / (2 * math.sqrt(2 * math.log(2))), rel=1e-9)
    e = classify_correlation(result_from("PMA_compensated", d1, lags * 1000))
    assert e.model == "exponential" and e.r_squared > 0.999
    with pytest.raises(FitError):
        classify_correlation(CorrelationResult(lags=lags, C=np.r_[1.0, -np.ones(300)], tau_c_fwhm=1.0))


def test_ip_from_analytic_gaussian(d1):
    tc = tau_c_ima(d1)
    lags = np.linspace(0, 6 * tc, 6001)
    r = result_from("IMA_circular", d1, lags)
    assert ip_from_correlation(r, d1.Ns) == pytest.approx(ip_ima(d1), rel=0.01)
    # stretching time by 2 halves the pinning current
    r2 = CorrelationResult(lags=2 * lags, C=r.C, tau_c_fwhm=2 * r.tau_c_fwhm)
    assert ip_from_correlation(r2, d1.Ns) == pytest.approx(ip_from_correlation(r, d1.Ns) / 2, rel=1e-12)


def test_ip_truncated_window(d1):
    tc = tau_c_ima(d1)
    lags = np.linspace(0, 0.4 * tc, 101)
    C = autocorr_analytic("IMA_circular", d1, None, lags)
    with pytest.raises(TruncationError) as exc:
        ip_from_correlation(CorrelationResult(lags=lags, C=C, tau_c_fwhm=float("nan")), d1.Ns)
    assert exc.value.bound > 0


def test_sustained_cutoff():
    C = np.array([1.0, 0.5, 0.005, 0.02, 0.001, 0.0, 0.001, 0.0, 0.0, 0.0])
    assert sustained_cutoff(C) == 4
    assert sustained_cutoff(np.ones(5)) is None


@given(st.floats(min_value=1e-7, max_value=1e-2), st.integers(min_value=2, max_value=12))
@settings(max_examples=50, deadline=None)
def test_fit_pinning_identity(ip, n):
    Is = np.linspace(-0.3 * ip, 0.3 * ip, 2 * n + 1)
    got, err, idx = fit_pinning(Is, Is / ip)
    assert got == pytest.approx(ip, rel=1e-9)
    assert err == pytest.approx(0.0, abs=1e-9 * ip)
    assert len(idx) >= 2 * n  # the centre point may round to a tiny non-zero bias


def test_fit_pinning_window_and_errors():
    Is = np.array([-3.0, -1.0, 0.0, 1.0, 3.0])
    m = np.tanh(Is / 3)
    _, _, idx = fit_pinning(Is, m)
    assert idx == (1, 3)
    with pytest.raises(RangeError):
        fit_pinning(Is, np.sign(Is) * 0.9)
    with pytest.raises(RangeError):
        fit_pinning(Is, np.array([-0.9, -0.9, 0.0, 0.1, 0.9]))
    with pytest.raises(FitError):
        fit_pinning(Is, -Is / 10)


def test_fit_pinning_propagates_point_errors():
    Is = np.array([-1.0, 1.0])
    ip, err, _ = fit_pinning(Is, Is / 4, m_err=np.array([0.01, 0.01]))
    # slope 1/4 with error 0.01/sqrt(2); Ip error is slope_err / slope^2
    assert ip == pytest.approx(4.0)
    assert err == pytest.approx(0.01 / math.sqrt(2) * 16, rel=1e-12)


def test_block_mean_error_white():
    x = np.random.default_rng(5).standard_normal(100_000)
    assert block_mean_error(x) == pytest.approx(1 / math.sqrt(x.size), rel=0.3)
    assert math.isnan(block_mean_error(np.ones(5)))


def _fake_trajectory(mx, dt_sample):
    spec = preset("M1")
    m = np.zeros((mx.size, 3))
    m[:, 0] = mx
    m[:, 2] = np.sqrt(1 - mx**2)
    cfg = SolverConfig(dt=dt_sample, duration=dt_sample * (mx.size - 1), seed=0)
    return Trajectory(times=np.arange(mx.size) * dt_sample, m_samples=m, spec=spec, config=cfg)


def test_mx_histogram():
    mx = 0.03 * np.random.default_rng(9).standard_normal(50_000)
    h = mx_histogram(_fake_trajectory(mx, 1e-11), spacing=2e-11)
    assert h.n_samples == 25_000
    assert h.sample_sigma == pytest.approx(0.03, rel=0.02)
    assert np.sum(h.densities * np.diff(h.edges)) == pytest.approx(1.0)
    assert h.edges[0] == -1 and h.edges[-1] == 1
    with pytest.raises(InsufficientDataError):
        mx_histogram(_fake_trajectory(mx[:1500], 1e-11), spacing=2e-11)


def test_ip_comes_out_in_amperes():
    # CONSTANTS.q is the SI charge: amperes come out directly
    d = derive(preset("M1"))
    lags = np.linspace(0, 6 * tau_c_ima(d), 3001)
    ip = ip_from_correlation(result_from("IMA_circular", d, lags), d.Ns, CONSTANTS)
    assert 1e-4 < ip < 1e-3
