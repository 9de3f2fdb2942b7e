"""Vacuum-fluctuation momentum in the magnetoelectric cavity.

The Wick-rotated momentum density along x is a double integral over the
imaginary frequency ``zeta`` and the wavenumber ``k_x``. It splits into
two channels proportional to ``chi_yz`` and ``chi_zy``. In polar
variables ``k_x = kappa cos(theta)``, ``sqrt(eps mu) zeta = kappa sin(theta)``
the integrand is regular everywhere and material independent up to the
prefactor ``sqrt(mu/eps) / pi^2``; that form is the production path.
The Cartesian form and the correlator assembly are kept as independent
cross-checks, and the radial and angular moments give a closed form.

Natural units throughout (hbar = c = eps0 = mu0 = 1).
"""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

from . import _core
from .errors import DegeneratePoint, ToleranceNotMet
from .greens import ImaginaryFrequency, SpectralPoint, chi_expansions, kappa
from .material import MaterialParams


# ---------------------------------------------------------------------------
# zeta(3) by direct summation

def zeta_series(s: float, n_terms: int = 100_000):
    """Riemann zeta for ``s > 1`` by partial sum plus bracketed integral tail.

    Returns
    -------
    value, bound : float
        Estimate and a rigorous bound on its truncation error.
    """
    if s <= 1:
        raise ValueError("series diverges for s <= 1")
    n = np.arange(n_terms, 0, -1, dtype=float)
    partial = math.fsum(n ** -s)
    upper = n_terms ** (1 - s) / (s - 1)
    lower = (n_terms + 1) ** (1 - s) / (s - 1)
    return partial + 0.5 * (upper + lower), 0.5 * (upper - lower)


@functools.lru_cache(maxsize=None)
def zeta3() -> float:
    value, bound = zeta_series(3.0)
    assert bound < 1e-12
    return value


# ---------------------------------------------------------------------------
# configuration and results

@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    kappa_a_max: float = 40.0
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.kappa_a_max < 20:
            raise ValueError("kappa_a_max must be at least 20")
        if int(self.max_subdivisions) < 1:
            raise ValueError("max_subdivisions must be positive")


@dataclass(frozen=True)
class VacuumMomentumResult:
    """Outcome of :func:`vacuum_momentum`.

    ``coeff_zy`` and ``coeff_yz`` are the momentum density per unit
    coupling at separation ``a`` (they scale as ``a**-3``); ``g`` is their
    combination with the medium's couplings and ``g_hat = g a^3`` the
    separation-free form. ``abs_err_est`` bounds the error of the
    coefficients.
    """

    g: float
    g_hat: float
    coeff_zy: float
    coeff_yz: float
    abs_err_est: float
    n_evals: int
    converged: bool
    a: float
    backend: str

    @property
    def coeff_zy_hat(self) -> float:
        return self.coeff_zy * self.a**3

    @property
    def coeff_yz_hat(self) -> float:
        return self.coeff_yz * self.a**3


# ---------------------------------------------------------------------------
# correlators and integrands

@dataclass(frozen=True)
class Correlators:
    """Spectral two-point functions at coincidence, with ``hbar/eps0 = 1``."""

    ey_bz: complex
    ez_by: complex
    by_by: complex
    bz_bz: complex


def correlators(p: SpectralPoint, m: MaterialParams, a: float) -> Correlators:
    """Field correlators built from the first-order Green data."""
    g = chi_expansions(p, m, a)
    k = p.k_x
    w = p.omega
    dzp_g_zx = -g.dz_g_zx_o1
    return Correlators(
        ey_bz=-1j * k / w * g.g_yy_o1,
        ez_by=(dzp_g_zx + 1j * k * g.g_zz_o1) / w,
        by_by=1j / w**2 * (g.dzz_g_xx_o0 - 1j * k * g.dz_g_zx_o0
                           - 1j * k * g.dz_g_xz_o0 - k**2 * g.g_zz_o0),
        bz_bz=-1j * k**2 / w**2 * g.g_yy_o0,
    )


def bracket(p: SpectralPoint, m: MaterialParams, a: float) -> complex:
    """Integrand of the frequency/wavenumber momentum integral, ``omega`` times
    ``eps <EyBz> - eps <EzBy> - chi_zy <ByBy> + chi_yz <BzBz>``."""
    c = correlators(p, m, a)
    return p.omega * (m.eps * c.ey_bz - m.eps * c.ez_by
                      - m.chi_zy * c.by_by + m.chi_yz * c.bz_bz)


def integrand_from_correlators(zeta: float, k_x: float, m: MaterialParams, a: float):
    """Cartesian channels obtained by Wick-rotating :func:`bracket`.

    Only the real part survives the rotation; the integrand is
    ``Re<> / (pi^2 zeta)`` after folding both axes onto the positive
    quadrant. The bracket is exactly linear in chi, so each channel is
    the difference quotient at a finite coupling.
    """
    if zeta == 0:
        raise DegeneratePoint("zeta = 0 is excluded from the rotated integrand")
    p = SpectralPoint(k_x, ImaginaryFrequency(zeta))
    h = m.chi_max
    base = MaterialParams.from_couplings(m.eps, m.mu, chi_max=m.chi_max)
    b0 = bracket(p, base, a)
    byz = bracket(p, base.replace(chi_yz=h), a)
    bzy = bracket(p, base.replace(chi_zy=h), a)
    scale = 1.0 / (math.pi**2 * zeta * h)
    return float(np.real(byz - b0)) * scale, float(np.real(bzy - b0)) * scale


def integrand_cartesian(zeta: float, k_x: float, m: MaterialParams, a: float):
    """Cartesian-variable integrand per unit coupling, ``(chi_yz, chi_zy)`` channels.

    Integrated over ``zeta, k_x in [0, inf)`` it gives the momentum
    density coefficients directly.
    """
    kap = kappa(k_x, ImaginaryFrequency(zeta), m)
    x = 2 * kap * a
    one_minus = -math.expm1(-x)
    inv_d = math.exp(-x) / one_minus
    growth = x / one_minus              # 2 kappa a e^{2 kappa a} / d
    pref = m.mu / math.pi**2            # (4 mu / c) / (2 pi)^2
    k2 = k_x * k_x
    yz = pref * inv_d / kap**3 * (k2 * k2 - k2 * m.eps * m.mu * zeta**2 * growth)
    zy = -pref * inv_d * 2 * k2 / kap * (
        1 + 1.5 * k2 / kap**2 - 0.5 * growth * (1 + k2 / kap**2))
    return yz, zy


def polar_brackets(kap, theta, a):
    """The two curly-bracket factors of the polar integrand.

    Written with ``cos^2 sin^2`` instead of ``cos^4 tan^2`` after the
    ``cos^4`` factor is pulled in, so see :func:`integrand_polar` for the
    regular product form; these brackets themselves diverge at pi/2.
    """
    kap = np.asarray(kap, dtype=float)
    x = 2 * kap * a
    growth = x / -np.expm1(-x)
    t2 = np.tan(theta) ** 2
    return 1 - t2 * growth, -(5 + 2 * t2 - (2 + t2) * growth)


def integrand_polar(kap, theta, a):
    """Polar integrand per unit coupling, without the ``sqrt(mu/eps)/pi^2`` prefactor.

    Vectorized over ``kap`` and ``theta``; returns ``(chi_yz, chi_zy)`` channels.
    Regular at ``kappa -> 0`` (vanishes linearly) and at ``theta = pi/2``.
    """
    kap = np.asarray(kap, dtype=float)
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta)
    s = np.sin(theta)
    c4 = c**4
    c2s2 = c * c * s * s
    with np.errstate(divide="ignore", invalid="ignore"):
        x = 2 * kap * a
        one_minus = -np.expm1(-x)
        base = np.where(kap > 0, kap * kap * np.exp(-x) / one_minus, 0.0)
        growth = np.where(kap > 0, x / one_minus, 1.0)
    yz = base * (c4 - c2s2 * growth)
    zy = -base * (5 * c4 + 2 * c2s2 - (2 * c4 + c2s2) * growth)
    return yz, zy


def polar_prefactor(m: MaterialParams) -> float:
    return math.sqrt(m.mu / m.eps) / math.pi**2


# ---------------------------------------------------------------------------
# analytic oracles

def closed_form(m: MaterialParams, a: float) -> float:
    """Momentum density ``zeta(3) sqrt(mu/eps) chi_zy / (16 pi a^3)``."""
    return zeta3() / (16 * math.pi * a**3) * math.sqrt(m.mu / m.eps) * m.chi_zy


def closed_form_coefficient(m: MaterialParams, a: float) -> float:
    """:func:`closed_form` per unit ``chi_zy``."""
    return zeta3() / (16 * math.pi * a**3) * math.sqrt(m.mu / m.eps)


@dataclass(frozen=True)
class RadialMoments:
    I1: float
    I2: float
    I1_series: float
    I2_series: float
    max_defect: float


def _bose_moment(power: int, weight: int) -> float:
    """``sum_n n^weight Gamma(power+1) / n^(power+1)``: the term-by-term integral
    of ``x^power sum_n n^weight e^{-n x}``."""
    value, _ = zeta_series(power + 1 - weight)
    return math.gamma(power + 1) * value


def radial_moments(a: float, tol: float = 1e-10) -> RadialMoments:
    """``int kappa^2/d`` and ``int kappa^2 (2 kappa a e^{2 kappa a})/d^2`` over ``(0, inf)``.

    Each is computed by adaptive quadrature and by the Bose series; the
    routes must agree to relative ``tol`` or :class:`ToleranceNotMet` is raised.
    """
    if a <= 0:
        raise ValueError("plate separation must be positive")

    def f1(k):
        x = 2 * k * a
        return k * k * math.exp(-x) / -math.expm1(-x) if k > 0 else 0.0

    def f2(k):
        x = 2 * k * a
        if k == 0:
            return 0.0
        om = -math.expm1(-x)
        return k * k * x * math.exp(-x) / (om * om)

    opts = dict(epsabs=0.0, epsrel=1e-13, limit=200)
    I1 = integrate.quad(f1, 0, 2 / a, **opts)[0] + integrate.quad(f1, 2 / a, np.inf, **opts)[0]
    I2 = integrate.quad(f2, 0, 2 / a, **opts)[0] + integrate.quad(f2, 2 / a, np.inf, **opts)[0]
    scale = 1 / (8 * a**3)
    I1s = scale * _bose_moment(2, 0)
    I2s = scale * _bose_moment(3, 1)
    defect = max(abs(I1 - I1s) / abs(I1s), abs(I2 - I2s) / abs(I2s))
    out = RadialMoments(I1, I2, I1s, I2s, defect)
    if defect > tol:
        raise ToleranceNotMet(f"radial moments disagree by {defect:.3g}", out)
    return out


def theta_moments():
    """Quadrature of ``cos^4`` and ``cos^2 sin^2`` over ``[0, pi/2]``.

    Returns ``((quad4, exact4), (quad22, exact22))`` with exact values
    ``3 pi / 16`` and ``pi / 16``.
    """
    opts = dict(epsabs=0.0, epsrel=1e-13)
    q4 = integrate.quad(lambda t: math.cos(t) ** 4, 0, math.pi / 2, **opts)[0]
    q22 = integrate.quad(lambda t: (math.cos(t) * math.sin(t)) ** 2, 0, math.pi / 2, **opts)[0]
    return (q4, 3 * math.pi / 16), (q22, math.pi / 16)


def moment_chain(a: float):
    """Channel integrals assembled from angular and radial moments.

    Returns ``(yz, zy)`` without the material prefactor, i.e. the values
    the polar quadrature must reproduce.
    """
    (c4, _), (c22, _) = theta_moments()
    r = radial_moments(a)
    yz = c4 * r.I1 - c22 * r.I2
    zy = -(5 * c4 * r.I1 + 2 * c22 * r.I1 - (2 * c4 + c22) * r.I2)
    return yz, zy


# ---------------------------------------------------------------------------
# production integral

def _polar_raw(a, cfg, backend):
    kern = _core.get_backend(backend)
    return kern.polar_integral(a, cfg.kappa_a_max / a, cfg.rel_tol, cfg.abs_tol,
                               int(cfg.max_subdivisions)) + (kern.NAME,)


@functools.lru_cache(maxsize=32)
def truncation_defect(cfg: QuadratureConfig, backend: str | None = None) -> float:
    """Relative change of the ``chi_zy`` channel when the radial cut-off doubles.

    The polar integrand depends on ``kappa a`` only, so the defect is
    independent of the medium and of ``a``; it is computed once per config.
    """
    yz1, zy1, *_ = _polar_raw(1.0, cfg, backend)
    doubled = replace(cfg, kappa_a_max=2 * cfg.kappa_a_max)
    yz2, zy2, *_ = _polar_raw(1.0, doubled, backend)
    return abs(zy2 - zy1) / abs(zy2)


def vacuum_momentum(m: MaterialParams, a: float, cfg: QuadratureConfig | None = None,
                    backend: str | None = None, check_truncation: bool = True) -> VacuumMomentumResult:
    """Adaptive 2D quadrature of the polar integrand.

    Raises
    ------
    ToleranceNotMet
        If the error estimate misses the tolerance within the subdivision
        budget, or the cut-off doubling test moves the result by more than
        ``rel_tol``. The best estimate is attached to the exception.
    """
    if a <= 0:
        raise ValueError("plate separation must be positive")
    cfg = cfg or QuadratureConfig()
    yz, zy, err, n_evals, ok, name = _polar_raw(a, cfg, backend)
    pref = polar_prefactor(m)
    coeff_yz = pref * yz
    coeff_zy = pref * zy
    g = coeff_zy * m.chi_zy + coeff_yz * m.chi_yz
    result = VacuumMomentumResult(
        g=g, g_hat=g * a**3, coeff_zy=coeff_zy, coeff_yz=coeff_yz,
        abs_err_est=pref * err, n_evals=int(n_evals), converged=bool(ok), a=a, backend=name)
    if not ok:
        raise ToleranceNotMet(
            f"quadrature error {pref * err:.3g} above tolerance after "
            f"{cfg.max_subdivisions} subdivisions", result)
    if check_truncation:
        defect = truncation_defect(cfg, backend)
        if defect > cfg.rel_tol:
            raise ToleranceNotMet(
                f"radial cut-off kappa a = {cfg.kappa_a_max:g} changes the result by {defect:.3g}",
                result)
    return result


def cartesian_integral(m: MaterialParams, a: float, kappa_a_max: float = 40.0, epsrel: float = 1e-12):
    """Both channels from the Cartesian integrand, by SciPy's nested QUADPACK.

    An independent route to :func:`vacuum_momentum`: different variables,
    different quadrature engine. Returns ``(coeff_yz, coeff_zy)``.
    """
    kmax = kappa_a_max / a
    zmax = kmax / m.index
    # the chi_yz channel integrates to zero; a relative target alone is unreachable
    floor = 1e-3 * epsrel * closed_form_coefficient(m, a)

    def channel(i):
        def f(zeta, k):
            if zeta == 0 and k == 0:
                return 0.0
            return integrand_cartesian(zeta, k, m, a)[i]
        # split at kappa a ~ 2 where the integrand peaks
        total = 0.0
        with warnings.catch_warnings():
            # inner roundoff warnings on the vanishing channel are benign
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            for klo, khi in ((0, 2 / a), (2 / a, kmax)):
                for zlo, zhi in ((0, 2 / (a * m.index)), (2 / (a * m.index), zmax)):
                    total += integrate.dblquad(f, klo, khi, zlo, zhi, epsabs=floor, epsrel=epsrel)[0]
        return total

    return channel(0), channel(1)
