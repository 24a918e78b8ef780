"""Magnet parameters and closed-form fluctuation analytics.

Reference numbers were computed independently in SI units (A/m, m^3, J/T,
tesla) at 30 significant digits and frozen here; the package computes in
CGS, so agreement also checks the unit handling.
"""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from lbmbsn.errors import LowBarrierWarning, ParameterError
from lbmbsn.magnet import (CONSTANTS, NM, AnisotropyClass, MagnetSpec, PhysicalConstants,
                           anisotropy_energy, autocorr_analytic, boltzmann_mx_sigma,
                           dephasing_damping_product, derive, ip_ima, ip_pma, preset, tau_c,
                           tau_c_ima, tau_c_ima_damped, tau_c_pma)

# SI-path reference values
HD_M1 = 13823.0076757950902
MOMENT_M1 = 2.76460153515901805e-15  # emu
NS_M1 = 298102.386797392501
NS_M2 = 7631421.10201324801
TAU_PMA_M1 = 2.62869864136793896e-7
TAU_IMA_M1 = 2.94007077651587555e-10
TAU_IMA_M2 = 1.48757122174240849e-9
IP_IMA_M1 = 3.05017059264971327e-4
IP_IMA_M2 = 1.54327781197419746e-3
IP_PMA = 3.77563535839316803e-7
SIGMA_M1 = 0.0329218871336012191
SIGMA_M2 = 0.00650675926332324599

volumes = st.floats(min_value=1e-20, max_value=1e-16)


def test_constants_positive_and_g2_consistent():
    c = CONSTANTS
    assert all(v > 0 for v in (c.kB, c.gamma, c.muB, c.q, c.hbar, c.erg_per_joule))
    assert abs(c.gamma / (2 * c.muB / c.hbar_cgs) - 1) < 5e-3


def test_constants_reject_non_positive():
    with pytest.raises(ParameterError):
        PhysicalConstants(kB=0.0)


def test_self_consistent_gamma():
    c = PhysicalConstants.self_consistent()
    assert c.gamma == pytest.approx(2 * c.muB / c.hbar_cgs, rel=1e-15)


def test_volume_from_geometry(m1, m2):
    assert m1.volume == pytest.approx(math.pi * (20 * NM) ** 2 * 2 * NM, rel=1e-14)
    assert m1.volume == pytest.approx(800 * math.pi * NM**3, rel=1e-14)
    assert m2.volume == pytest.approx(20480 * math.pi * NM**3, rel=1e-14)


def test_derive_m1(d1):
    assert d1.HD == pytest.approx(HD_M1, rel=1e-12)
    assert abs(d1.HD - 1.382e4) / 1.382e4 < 1e-3  # the -13.8 kOe hard-axis field
    assert d1.MsOmega == pytest.approx(MOMENT_M1, rel=1e-12)
    assert d1.Ns == pytest.approx(NS_M1, rel=1e-12)
    assert d1.delta_ima == 0.0
    assert d1.delta_pma == pytest.approx(-HD_M1 * MOMENT_M1 / 2, rel=1e-12)


def test_derive_m2(d2):
    assert d2.Ns == pytest.approx(NS_M2, rel=1e-12)


def test_hkp_from_surface_anisotropy():
    t = 2.0
    ks = 4 * math.pi * 1100 * t * NM / 2  # exactly compensating
    spec = MagnetSpec(Ms=1100, diameter=40, thickness=t, Ks=ks,
                      anisotropy_class=AnisotropyClass.PMA_COMPENSATED)
    assert abs(spec.Hkp) < 1e-9
    assert derive(spec).delta_pma == pytest.approx(0.0, abs=1e-25)


@pytest.mark.parametrize("kw", [dict(Ms=0.0), dict(Ms=-1.0), dict(alpha=0.0), dict(temperature=0.0),
                                dict(diameter=0.0), dict(thickness=-2.0)])
def test_invalid_spec(kw):
    base = dict(Ms=1100.0, diameter=40.0, thickness=2.0)
    with pytest.raises(ParameterError):
        MagnetSpec(**{**base, **kw})


def test_class_field_consistency():
    with pytest.raises(ParameterError):
        MagnetSpec(Ms=1100, diameter=40, thickness=2, Hkp=0.0)  # IMA needs -4 pi Ms
    with pytest.raises(ParameterError):
        MagnetSpec(Ms=1100, diameter=40, thickness=2, Hkp=-1e4,
                   anisotropy_class=AnisotropyClass.PMA_COMPENSATED)


def test_tau_c_pma(d1):
    assert tau_c_pma(d1) == pytest.approx(TAU_PMA_M1, rel=1e-10)
    assert tau_c_pma(d1, alpha=0.02) == pytest.approx(TAU_PMA_M1 / 2, rel=1e-12)


def test_tau_c_ima(d1, d2):
    assert tau_c_ima(d1) == pytest.approx(TAU_IMA_M1, rel=1e-10)
    assert tau_c_ima(d2) == pytest.approx(TAU_IMA_M2, rel=1e-10)
    assert 850 < tau_c_pma(d1) / tau_c_ima(d1) < 950


def test_ip(d1, d2):
    assert ip_pma() == pytest.approx(IP_PMA, rel=1e-10)
    assert ip_pma(alpha=0.0) == 0.0
    assert ip_ima(d1) == pytest.approx(IP_IMA_M1, rel=1e-10)
    assert ip_ima(d2) == pytest.approx(IP_IMA_M2, rel=1e-10)


def test_boltzmann_sigma(d1, d2):
    assert boltzmann_mx_sigma(d1) == pytest.approx(SIGMA_M1, rel=1e-10)
    assert boltzmann_mx_sigma(d2) == pytest.approx(SIGMA_M2, rel=1e-10)


def test_hard_plane_limit(m1):
    big = derive(MagnetSpec(Ms=1e6, diameter=1e4, thickness=10.0))
    assert boltzmann_mx_sigma(big) < 1e-4 * boltzmann_mx_sigma(derive(m1))


@given(volumes)
@settings(max_examples=40, deadline=None)
def test_volume_scaling(v):
    base = preset("M1").with_volume(v)
    d, d2, d4 = derive(base), derive(base.with_volume(2 * v)), derive(base.with_volume(4 * v))
    assert tau_c_pma(d2) == pytest.approx(2 * tau_c_pma(d), rel=1e-9)
    assert tau_c_ima(d4) == pytest.approx(2 * tau_c_ima(d), rel=1e-9)
    assert ip_ima(d4) == pytest.approx(2 * ip_ima(d), rel=1e-9)
    assert tau_c_ima(d2) > tau_c_ima(d) and ip_ima(d2) > ip_ima(d)
    pma = preset("M1", AnisotropyClass.PMA_COMPENSATED)
    assert ip_pma(alpha=pma.alpha) == ip_pma(alpha=pma.with_volume(v).alpha)


@given(volumes)
@settings(max_examples=40, deadline=None)
def test_fwhm_consistency(v):
    d = derive(preset("M1").with_volume(v))
    for kind, tc in ((AnisotropyClass.PMA_COMPENSATED, tau_c_pma(d)), (AnisotropyClass.IMA_CIRCULAR, tau_c_ima(d))):
        assert autocorr_analytic(kind, d, None, tc / 2) == pytest.approx(0.5, rel=1e-12)
        assert autocorr_analytic(kind, d, None, 0.0) == 1.0
        t = np.linspace(-3 * tc, 3 * tc, 11)
        c = autocorr_analytic(kind, d, None, t)
        np.testing.assert_allclose(c, c[::-1], rtol=1e-14)


def test_unit_consistency_si_vs_cgs(d1):
    # same closed forms evaluated directly in SI
    kT = 1.380649e-23 * 300
    m = 1.1e6 * 800 * math.pi * 1e-27
    hd = 4 * math.pi * 1e-7 * 1.1e6
    g = 1.76e11
    assert tau_c_pma(d1) == pytest.approx(m * math.log(2) / (0.01 * g * kT), rel=1e-10)
    assert tau_c_ima(d1) == pytest.approx(math.sqrt(8 * math.log(2)) / g * math.sqrt(m / (hd * kT)), rel=1e-10)


def test_correlation_integral_identity():
    c = PhysicalConstants.self_consistent()
    d = derive(preset("M1"), c)
    integral, _ = quad(lambda t: autocorr_analytic("IMA_circular", d, None, t), 0, 50 * tau_c_ima(d),
                       epsabs=0, epsrel=1e-13, limit=200)
    assert c.q * d.Ns / integral == pytest.approx(ip_ima(d), rel=1e-9)


def test_low_barrier_flag(m1):
    d = derive(m1.with_barrier(2.0))
    assert d.barrier / d.kBT == pytest.approx(2.0, rel=1e-12)
    with pytest.warns(LowBarrierWarning):
        tau_c_ima(d)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        tau_c_ima(derive(m1.with_barrier(1.0)))


def test_damped_dephasing_limits(d1, d2):
    assert dephasing_damping_product(d1) < 1 < dephasing_damping_product(d2)
    assert tau_c_ima_damped(d1) / tau_c_ima(d1) == pytest.approx(1.063, abs=0.002)
    assert tau_c_ima_damped(d2) > 1.3 * tau_c_ima(d2)
    tiny = derive(MagnetSpec(Ms=1100, diameter=40, thickness=2, alpha=1e-6))
    assert tau_c_ima_damped(tiny) == pytest.approx(tau_c_ima(tiny), rel=1e-5)


def test_anisotropy_energy(m1):
    e = anisotropy_energy(np.array([[1.0, 0, 0], [0, 0, 1.0]]), m1)
    assert e[0] == pytest.approx(0.0, abs=1e-30)
    assert e[1] == pytest.approx(0.5 * m1.Ms * m1.volume * m1.Hkp, rel=1e-12)


def test_preset_class_switch():
    p = preset("M2", "PMA_compensated")
    assert p.Hkp == 0.0 and p.volume == preset("M2").volume
    assert tau_c(derive(p)) == pytest.approx(derive(p).MsOmega * math.log(2) / (0.01 * 1.76e7 * derive(p).kBT))
    with pytest.raises(ParameterError):
        preset("M9")
