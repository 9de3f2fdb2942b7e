"""Fourier-reduced Green functions of the magnetoelectric cavity.

The cavity is bounded by perfectly conducting plates at ``z = 0`` and
``z = a``; the transverse wave vector points along x. All functions take
a :class:`SpectralPoint` that carries either a real frequency ``omega``
or an imaginary-axis frequency ``zeta`` (``omega = i zeta``). The
rotation is applied by substituting the complex ``omega`` everywhere,
including inside the shifted constants ``K`` and ``L``, so results are
complex in general. On the imaginary axis with ``chi = 0`` they are real.

Exponentials ``exp(2 K a)`` are never formed: every ratio is rewritten in
terms of decaying exponentials so that ``K a`` in the hundreds is safe.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DegeneratePoint
from .material import MaterialParams


@dataclass(frozen=True)
class RealFrequency:
    omega: float

    @property
    def complex_omega(self) -> complex:
        return complex(self.omega)


@dataclass(frozen=True)
class ImaginaryFrequency:
    zeta: float

    @property
    def complex_omega(self) -> complex:
        return 1j * self.zeta


Frequency = Union[RealFrequency, ImaginaryFrequency]


@dataclass(frozen=True)
class SpectralPoint:
    """Evaluation coordinates ``(k_x, frequency, z, z')``.

    ``freq`` must be a :class:`RealFrequency` or an
    :class:`ImaginaryFrequency`; plain numbers are rejected so the two
    branches cannot be mixed up.
    """

    k_x: float
    freq: Frequency
    z: float = 0.0
    z_prime: float = 0.0

    def __post_init__(self):
        if not isinstance(self.freq, (RealFrequency, ImaginaryFrequency)):
            raise TypeError("freq must be RealFrequency or ImaginaryFrequency")

    @property
    def rotated(self) -> bool:
        return isinstance(self.freq, ImaginaryFrequency)

    @property
    def omega(self) -> complex:
        return self.freq.complex_omega

    def validate(self, a: float) -> None:
        if a <= 0:
            raise ValueError(f"plate separation must be positive, got {a}")
        for name in ("z", "z_prime"):
            value = getattr(self, name)
            if not 0.0 <= value <= a:
                raise ValueError(f"{name}={value} outside [0, {a}]")

    def with_(self, **changes) -> "SpectralPoint":
        values = dict(k_x=self.k_x, freq=self.freq, z=self.z, z_prime=self.z_prime)
        values.update(changes)
        return SpectralPoint(**values)


@dataclass(frozen=True)
class KappaTriple:
    kappa: complex
    K: complex
    L: complex


def kappa(k_x: float, freq: Frequency, m: MaterialParams):
    """Transverse decay constant.

    Returns a positive float on the imaginary axis and the principal
    complex square root of ``k_x**2 - eps mu omega**2`` on the real axis.
    """
    if isinstance(freq, ImaginaryFrequency):
        k2 = k_x * k_x + m.eps * m.mu * freq.zeta * freq.zeta
        if k2 == 0.0:
            raise DegeneratePoint("k_x = zeta = 0 has no decay constant")
        return float(np.sqrt(k2))
    k2 = k_x * k_x - m.eps * m.mu * freq.omega * freq.omega
    if k2 == 0.0:
        raise DegeneratePoint("point lies on the light cone k_x^2 = eps mu omega^2")
    return complex(np.sqrt(complex(k2)))


def shifted_constants(k_x: float, freq: Frequency, m: MaterialParams) -> KappaTriple:
    """Decay constants for ``g_xx`` (``K``) and ``g_yy`` (``L``)."""
    kap = kappa(k_x, freq, m)
    omega = freq.complex_omega
    K = kap * (1 + m.mu * k_x * omega * m.chi_zy / kap**2)
    L = kap * (1 - m.mu * k_x * omega * m.chi_yz / kap**2)
    return KappaTriple(kappa=kap, K=K, L=L)


# ---------------------------------------------------------------------------
# overflow-safe building blocks

def _cosh_ratio(K, u, a):
    """cosh(K u) / (exp(2 K a) - 1) for |u| <= 2a, Re K >= 0."""
    return (np.exp(K * (u - 2 * a)) + np.exp(-K * (u + 2 * a))) / (2 * (-np.expm1(-2 * K * a)))


def _sinh_ratio(K, u, a):
    """sinh(K u) / (exp(2 K a) - 1) for |u| <= 2a, Re K >= 0."""
    return (np.exp(K * (u - 2 * a)) - np.exp(-K * (u + 2 * a))) / (2 * (-np.expm1(-2 * K * a)))


def _full_bracket(K, z, zp, a):
    u = z - zp
    s = z + zp
    return (np.exp(-K * np.abs(u)) - np.exp(-K * s)
            + 2 * (_cosh_ratio(K, u, a) - _cosh_ratio(K, s, a)))


# ---------------------------------------------------------------------------
# full solutions (kept for verification only)

def g_yy_full(p: SpectralPoint, m: MaterialParams, a: float):
    """Complete ``g_yy`` including the source and image terms."""
    p.validate(a)
    L = shifted_constants(p.k_x, p.freq, m).L
    return m.mu * p.omega**2 / (2 * L) * _full_bracket(L, p.z, p.z_prime, a)


def g_xx_full(p: SpectralPoint, m: MaterialParams, a: float):
    """Complete ``g_xx`` including the source and image terms."""
    p.validate(a)
    K = shifted_constants(p.k_x, p.freq, m).K
    return -K / (2 * m.eps) * _full_bracket(K, p.z, p.z_prime, a)


def g_yy_omitted(p: SpectralPoint, m: MaterialParams, a: float):
    """The source (``|z-z'|``) and image (``z+z'``) terms dropped from ``g_yy``."""
    L = shifted_constants(p.k_x, p.freq, m).L
    u, s = p.z - p.z_prime, p.z + p.z_prime
    return m.mu * p.omega**2 / (2 * L) * (
        np.exp(-L * abs(u)) - np.exp(-L * s) - 2 * _cosh_ratio(L, s, a))


def g_xx_omitted(p: SpectralPoint, m: MaterialParams, a: float):
    K = shifted_constants(p.k_x, p.freq, m).K
    u, s = p.z - p.z_prime, p.z + p.z_prime
    return -K / (2 * m.eps) * (np.exp(-K * abs(u)) - np.exp(-K * s) - 2 * _cosh_ratio(K, s, a))


# ---------------------------------------------------------------------------
# effective solutions

def g_xx_eff(p: SpectralPoint, m: MaterialParams, a: float):
    p.validate(a)
    K = shifted_constants(p.k_x, p.freq, m).K
    return -K / m.eps * _cosh_ratio(K, p.z - p.z_prime, a)


def g_yy_eff(p: SpectralPoint, m: MaterialParams, a: float):
    p.validate(a)
    L = shifted_constants(p.k_x, p.freq, m).L
    return m.mu * p.omega**2 / L * _cosh_ratio(L, p.z - p.z_prime, a)


def g_zx_eff(p: SpectralPoint, m: MaterialParams, a: float):
    p.validate(a)
    K = shifted_constants(p.k_x, p.freq, m).K
    pref = 1j / m.eps * (p.k_x + m.mu * p.omega * m.chi_zy)
    return pref * _sinh_ratio(K, p.z - p.z_prime, a)


def dz_g_zx_eff(p: SpectralPoint, m: MaterialParams, a: float):
    """Exact z-derivative of :func:`g_zx_eff`."""
    p.validate(a)
    K = shifted_constants(p.k_x, p.freq, m).K
    pref = 1j / m.eps * (p.k_x + m.mu * p.omega * m.chi_zy)
    return pref * K * _cosh_ratio(K, p.z - p.z_prime, a)


def g_xz_eff(p: SpectralPoint, m: MaterialParams, a: float):
    """``g_xz`` obtained from ``g_zx`` by reciprocity, with ``K(-k_x) = kappa^2/K``."""
    p.validate(a)
    tri = shifted_constants(p.k_x, p.freq, m)
    Kr = tri.kappa**2 / tri.K
    pref = 1j / m.eps * (p.k_x - m.mu * p.omega * m.chi_zy)
    return pref * _sinh_ratio(Kr, p.z - p.z_prime, a)


def g_zz_eff(p: SpectralPoint, m: MaterialParams, a: float):
    """``g_zz`` with the delta-function part omitted."""
    p.validate(a)
    tri = shifted_constants(p.k_x, p.freq, m)
    Kr = tri.kappa**2 / tri.K
    return tri.kappa**2 * p.k_x**2 / (tri.K**3 * m.eps) * _cosh_ratio(Kr, p.z - p.z_prime, a)


# ---------------------------------------------------------------------------
# first-order expansions at coincidence

@dataclass(frozen=True)
class ChiExpansions:
    """Coincidence-limit Green data, first order (``o1``) or zeroth order (``o0``) in chi.

    ``dz_g_zx_o1`` is the derivative with respect to ``z``; the derivative
    with respect to ``z'`` is its negative.
    """

    g_yy_o1: complex
    dz_g_zx_o1: complex
    g_zz_o1: complex
    dzz_g_xx_o0: complex
    dz_g_zx_o0: complex
    g_yy_o0: complex
    g_zz_o0: complex

    @property
    def dz_g_xz_o0(self) -> complex:
        return self.dz_g_zx_o0


def _inv_d_and_growth(kap, a):
    """Return ``1/d`` and ``2 kappa a e^{2 kappa a}/d`` with ``d = e^{2 kappa a} - 1``."""
    x = 2 * kap * a
    one_minus = -np.expm1(-x)
    return np.exp(-x) / one_minus, x / one_minus


def chi_expansions(p: SpectralPoint, m: MaterialParams, a: float) -> ChiExpansions:
    """Expansions of the effective Green functions to first order in chi at ``z = z'``."""
    p.validate(a)
    if p.z != p.z_prime:
        raise ValueError("expansions are defined at coincidence z = z'")
    k = p.k_x
    w = p.omega
    kap = kappa(k, p.freq, m)
    inv_d, F = _inv_d_and_growth(kap, a)
    eps, mu = m.eps, m.mu
    g_yy_o0 = mu * w**2 / kap * inv_d
    g_zz_o0 = k**2 / (kap * eps) * inv_d
    return ChiExpansions(
        g_yy_o1=g_yy_o0 * (1 + mu * k * w / kap**2 * (1 + F) * m.chi_yz),
        dz_g_zx_o1=1j * kap / eps * inv_d * (k + mu * w * (1 + k**2 / kap**2 * (1 - F)) * m.chi_zy),
        g_zz_o1=g_zz_o0 * (1 - 3 * mu * k * w / kap**2 * (1 - F / 3) * m.chi_zy),
        dzz_g_xx_o0=-kap**3 / eps * inv_d,
        dz_g_zx_o0=1j * kap * k / eps * inv_d,
        g_yy_o0=g_yy_o0,
        g_zz_o0=g_zz_o0,
    )
