"""Nanomagnet parameters, physical constants and closed-form fluctuation analytics.

Fields, moments and energies are Gaussian-CGS (Oe, emu, erg). Currents are SI
amperes; the ``q/hbar`` prefactors are SI and energies are converted erg -> J
where they meet.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .errors import LowBarrierWarning, ParameterError

NM = 1e-7  # cm


@dataclass(frozen=True)
class PhysicalConstants:
    kB: float = 1.380649e-16  # erg/K
    gamma: float = 1.76e7  # rad/(s Oe)
    muB: float = 9.274e-21  # emu
    q: float = 1.602177e-19  # C
    hbar: float = 1.054572e-34  # J s
    erg_per_joule: float = 1e7

    def __post_init__(self):
        for name in ("kB", "gamma", "muB", "q", "hbar", "erg_per_joule"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"constant {name} must be positive")

    @property
    def hbar_cgs(self) -> float:
        return self.hbar * self.erg_per_joule

    @classmethod
    def self_consistent(cls, **overrides) -> "PhysicalConstants":
        """Constants with gamma tied exactly to 2 muB / hbar (g = 2)."""
        base = cls(**overrides)
        return replace(base, gamma=2.0 * base.muB / base.hbar_cgs)


CONSTANTS = PhysicalConstants()


class AnisotropyClass(str, enum.Enum):
    PMA_COMPENSATED = "PMA_compensated"
    IMA_CIRCULAR = "IMA_circular"


@dataclass(frozen=True)
class MagnetSpec:
    """One monodomain nanomagnet.

    ``Hkp`` is the net anisotropy field along the x (out-of-plane) axis and
    ``Hki`` the in-plane anisotropy field along z. When ``Hkp`` is left as
    None it is derived from ``Ks`` (if given) as 2 Ks / t - 4 pi Ms, or else
    from the anisotropy class.
    """

    Ms: float  # emu/cm^3
    diameter: float  # nm
    thickness: float  # nm
    alpha: float = 0.01
    anisotropy_class: AnisotropyClass = AnisotropyClass.IMA_CIRCULAR
    Hki: float = 0.0  # Oe
    Hkp: float | None = None  # Oe
    Ks: float | None = None  # erg/cm^2
    temperature: float = 300.0  # K
    name: str = ""
    volume: float = field(init=False)  # cm^3

    def __post_init__(self):
        object.__setattr__(self, "anisotropy_class", AnisotropyClass(self.anisotropy_class))
        if not self.Ms > 0:
            raise ParameterError("Ms must be positive")
        if not (self.diameter > 0 and self.thickness > 0):
            raise ParameterError("diameter and thickness must be positive")
        if not self.alpha > 0:
            raise ParameterError("alpha must be positive")
        if not self.temperature > 0:
            raise ParameterError("temperature must be positive")
        volume = math.pi * (self.diameter * NM / 2) ** 2 * (self.thickness * NM)
        object.__setattr__(self, "volume", volume)
        if self.Hkp is None:
            if self.Ks is not None:
                hkp = 2.0 * self.Ks / (self.thickness * NM) - 4.0 * math.pi * self.Ms
            elif self.anisotropy_class is AnisotropyClass.IMA_CIRCULAR:
                hkp = -4.0 * math.pi * self.Ms
            else:
                hkp = 0.0
            object.__setattr__(self, "Hkp", hkp)
        hd = 4.0 * math.pi * self.Ms
        if self.anisotropy_class is AnisotropyClass.IMA_CIRCULAR:
            if abs(self.Hkp + hd) > 0.05 * hd:
                raise ParameterError("IMA_circular magnet needs Hkp close to -4 pi Ms")
        elif abs(self.Hkp) > 0.05 * hd:
            raise ParameterError("PMA_compensated magnet needs Hkp close to 0")

    def with_volume(self, volume_cm3: float) -> "MagnetSpec":
        """Same magnet, diameter rescaled at fixed thickness to hit ``volume_cm3``."""
        if not volume_cm3 > 0:
            raise ParameterError("volume must be positive")
        t_cm = self.thickness * NM
        diameter = 2.0 * math.sqrt(volume_cm3 / (math.pi * t_cm)) / NM
        return replace(self, diameter=diameter, Hkp=None if self.Ks is not None else self.Hkp)

    def with_spins(self, ns: float, constants: PhysicalConstants = CONSTANTS) -> "MagnetSpec":
        return self.with_volume(ns * constants.muB / self.Ms)

    def as_class(self, kind: AnisotropyClass | str) -> "MagnetSpec":
        """Same moment, switched to the other low-barrier anisotropy class."""
        return replace(self, anisotropy_class=AnisotropyClass(kind), Hkp=None, Ks=None, Hki=0.0)

    def with_barrier(self, delta_over_kT: float, constants: PhysicalConstants = CONSTANTS) -> "MagnetSpec":
        """Set the class-appropriate anisotropy field to give barrier ``delta_over_kT`` kBT."""
        kbt = constants.kB * self.temperature
        h = 2.0 * delta_over_kT * kbt / (self.Ms * self.volume)
        if self.anisotropy_class is AnisotropyClass.IMA_CIRCULAR:
            return replace(self, Hki=h)
        return replace(self, Hkp=h)


@dataclass(frozen=True)
class DerivedMagnet:
    HD: float  # Oe
    MsOmega: float  # emu
    Ns: float
    delta_pma: float  # erg
    delta_ima: float  # erg
    kBT: float  # erg
    alpha: float
    anisotropy_class: AnisotropyClass
    constants: PhysicalConstants = CONSTANTS

    @property
    def barrier(self) -> float:
        """Barrier of the magnet's own anisotropy class, in erg."""
        if self.anisotropy_class is AnisotropyClass.IMA_CIRCULAR:
            return self.delta_ima
        return self.delta_pma

    @property
    def low_barrier(self) -> bool:
        return abs(self.barrier) <= self.kBT * (1 + 1e-12)


def derive(spec: MagnetSpec, constants: PhysicalConstants = CONSTANTS) -> DerivedMagnet:
    ms_omega = spec.Ms * spec.volume
    if not ms_omega > 0:
        raise ParameterError("magnetic moment must be positive")
    return DerivedMagnet(
        HD=4.0 * math.pi * spec.Ms,
        MsOmega=ms_omega,
        Ns=ms_omega / constants.muB,
        delta_pma=spec.Hkp * ms_omega / 2.0,
        delta_ima=spec.Hki * ms_omega / 2.0,
        kBT=constants.kB * spec.temperature,
        alpha=spec.alpha,
        anisotropy_class=spec.anisotropy_class,
        constants=constants,
    )


def _flag(d: DerivedMagnet):
    if not d.low_barrier:
        warnings.warn(
            f"barrier {d.barrier / d.kBT:.2f} kBT exceeds 1 kBT; closed form is approximate",
            LowBarrierWarning,
            stacklevel=3,
        )


def tau_c_pma(d: DerivedMagnet, alpha: float | None = None) -> float:
    """FWHM correlation time of a compensated PMA magnet, in seconds."""
    alpha = d.alpha if alpha is None else alpha
    if not (alpha > 0 and d.kBT > 0):
        raise ParameterError("alpha and kBT must be positive")
    _flag(d)
    return d.MsOmega * math.log(2.0) / (alpha * d.constants.gamma * d.kBT)


def tau_c_ima(d: DerivedMagnet) -> float:
    """FWHM correlation time of a circular in-plane magnet (precessional dephasing)."""
    if not d.HD > 0:
        raise ParameterError("HD must be positive")
    _flag(d)
    return math.sqrt(8.0 * math.log(2.0)) / d.constants.gamma * math.sqrt(d.MsOmega / (d.HD * d.kBT))


def dephasing_damping_product(d: DerivedMagnet) -> float:
    """alpha gamma HD tau_c: how far mx relaxes during one IMA correlation time.

    The Gaussian IMA form assumes mx is frozen while the in-plane phase
    dephases; it holds while this product stays below about one.
    """
    return d.alpha * d.constants.gamma * d.HD * tau_c_ima(d)


def tau_c_ima_damped(d: DerivedMagnet) -> float:
    """IMA FWHM correlation time when mx relaxes at rate lam = alpha gamma HD / (1 + alpha^2).

    Treats mx as an Ornstein-Uhlenbeck process driving the precession phase,
    C(t) = exp(-(w/lam)^2 (lam t - 1 + exp(-lam t))) with w^2 = gamma^2 HD kBT / MsOmega.
    Reduces to the Gaussian form as lam -> 0.
    """
    g = d.constants.gamma
    w2 = g**2 * d.HD * d.kBT / d.MsOmega
    lam = d.alpha * g * d.HD / (1.0 + d.alpha**2)
    x = lam * lam * math.log(2.0) / w2  # need lam t - 1 + exp(-lam t) = x
    if x < 1e-6:
        return math.sqrt(8.0 * math.log(2.0) / w2)
    y = brentq(lambda y: y - 1.0 + math.exp(-y) - x, 0.0, x + 2.0)
    return 2.0 * y / lam


def tau_c(d: DerivedMagnet) -> float:
    if d.anisotropy_class is AnisotropyClass.IMA_CIRCULAR:
        return tau_c_ima(d)
    return tau_c_pma(d)


def autocorr_analytic(kind, d: DerivedMagnet, alpha, t):
    """Normalized autocorrelation C(t); exponential for PMA, Gaussian for IMA."""
    kind = AnisotropyClass(kind)
    alpha = d.alpha if alpha is None else alpha
    t = np.asarray(t, dtype=float)
    g = d.constants.gamma
    if kind is AnisotropyClass.PMA_COMPENSATED:
        out = np.exp(-2.0 * alpha * g * d.kBT / d.MsOmega * np.abs(t))
    else:
        out = np.exp(-(g**2) * (d.HD * d.kBT / d.MsOmega) * t**2 / 2.0)
    return out if out.ndim else float(out)


def ip_pma(constants: PhysicalConstants = CONSTANTS, alpha: float = 0.01, temperature: float = 300.0) -> float:
    """Pinning current of a compensated PMA magnet (independent of volume), amperes."""
    if not (alpha >= 0 and temperature > 0):
        raise ParameterError("alpha must be non-negative and temperature positive")
    kbt_j = constants.kB * temperature / constants.erg_per_joule
    return 6.0 * constants.q / constants.hbar * alpha * kbt_j


def ip_ima(d: DerivedMagnet, constants: PhysicalConstants | None = None) -> float:
    """Pinning current of a circular in-plane magnet, amperes."""
    c = d.constants if constants is None else constants
    if not d.HD > 0:
        raise ParameterError("HD must be positive")
    _flag(d)
    # HD * MsOmega and kBT are both erg; their product is erg^2
    energy_sq_j = d.HD * d.MsOmega * d.kBT / c.erg_per_joule**2
    return 2.0 * c.q / c.hbar * math.sqrt(2.0 / math.pi) * math.sqrt(energy_sq_j)


def ip_analytic(d: DerivedMagnet) -> float:
    if d.anisotropy_class is AnisotropyClass.IMA_CIRCULAR:
        return ip_ima(d)
    return ip_pma(d.constants, d.alpha, d.kBT / d.constants.kB)


def boltzmann_mx_sigma(d: DerivedMagnet) -> float:
    """Standard deviation of the out-of-plane component in the hard-plane limit."""
    if not d.HD > 0:
        raise ParameterError("HD must be positive")
    return math.sqrt(d.kBT / (d.HD * d.MsOmega))


def anisotropy_energy(m, spec: MagnetSpec) -> np.ndarray:
    """Uniaxial energy of the unit vector(s) ``m`` in erg, up to a constant."""
    m = np.asarray(m, dtype=float)
    ms_omega = spec.Ms * spec.volume
    return 0.5 * ms_omega * (spec.Hkp * (1 - m[..., 0] ** 2) + spec.Hki * (1 - m[..., 2] ** 2))


# Named presets: circular IMA magnets used for the hardware neuron designs.
M1_VOLUME = 800 * math.pi * NM**3
M2_VOLUME = 20480 * math.pi * NM**3

PRESETS = {
    "M1": MagnetSpec(Ms=1100.0, diameter=40.0, thickness=2.0, alpha=0.01, name="M1"),
    "M2": MagnetSpec(Ms=1100.0, diameter=128.0, thickness=5.0, alpha=0.01, name="M2"),
}


def preset(name: str, kind: AnisotropyClass | str = AnisotropyClass.IMA_CIRCULAR) -> MagnetSpec:
    try:
        spec = PRESETS[name]
    except KeyError:
        raise ParameterError(f"unknown magnet preset {name!r}") from None
    kind = AnisotropyClass(kind)
    if kind is not spec.anisotropy_class:
        spec = spec.as_class(kind)
    return spec
