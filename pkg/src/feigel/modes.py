"""Single TE cavity mode in the magnetoelectric medium.

The mode has ``E`` along y, transverse wavenumber ``k_n = pi n / a`` and
propagates along x with signed wavenumber ``k_x``. Observables are per
unit length and width, in natural units, using the ``sqrt(2/a)`` field
normalization and the ``(1/2) Re(X Y*)`` time-average convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .material import FieldState, MaterialParams


@dataclass(frozen=True)
class ModeSpec:
    k_x: float
    n: int
    a: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"mode index n must be a positive integer, got {self.n}")
        if not self.a > 0:
            raise ValueError(f"plate separation must be positive, got {self.a}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def k_n(self) -> float:
        return math.pi * self.n / self.a

    @property
    def q(self) -> float:
        """Magnitude of the full wave vector, sqrt(k_x^2 + k_n^2)."""
        return math.hypot(self.k_x, self.k_n)

    def reversed(self) -> "ModeSpec":
        return ModeSpec(-self.k_x, self.n, self.a)


@dataclass(frozen=True)
class ModeObservables:
    omega: float
    W: float
    q_x: float
    u_x: float
    G_x: float


def dispersion(mode: ModeSpec, m: MaterialParams) -> float:
    """Eigenfrequency to first order in ``chi_yz``."""
    q = mode.q
    return q / m.index * (1 - math.sqrt(m.mu / m.eps) * mode.k_x / q * m.chi_yz)


def dispersion_exact(mode: ModeSpec, m: MaterialParams) -> float:
    """Positive root of ``q^2 - eps mu w^2 - 2 mu k_x w chi_yz = 0``."""
    b = m.mu * mode.k_x * m.chi_yz
    em = m.eps * m.mu
    return (-b + math.sqrt(b * b + em * mode.q**2)) / em


def dispersion_residual(mode: ModeSpec, m: MaterialParams, omega: float) -> float:
    return (mode.q**2 - m.eps * m.mu * omega**2
            - 2 * m.mu * mode.k_x * omega * m.chi_yz)


def te_amplitudes(mode: ModeSpec, omega: float, z):
    """Complex E and B amplitudes (without the propagation phase) at height z."""
    A = math.sqrt(2 / mode.a)
    kn = mode.k_n
    s = np.sin(kn * z)
    c = np.cos(kn * z)
    zero = np.zeros_like(s, dtype=complex)
    E = np.array([zero, A * s + 0j, zero])
    B = np.array([A * 1j * kn / omega * c, zero, A * mode.k_x / omega * s + 0j])
    return E, B


def te_fields(mode: ModeSpec, m: MaterialParams, z: float, phase: float = 0.0,
              omega: float | None = None) -> FieldState:
    """Complex TE field amplitudes at height ``z`` times ``exp(i phase)``."""
    if not 0 <= z <= mode.a:
        raise ValueError(f"z={z} outside [0, {mode.a}]")
    if omega is None:
        omega = dispersion(mode, m)
    E, B = te_amplitudes(mode, omega, z)
    ph = np.exp(1j * phase)
    return FieldState(E * ph, B * ph, m)


def te_field_function(mode: ModeSpec, m: MaterialParams, exact: bool = False, phase: float = 0.0):
    """Real instantaneous TE fields as a function of ``(x, y, z, t)``.

    With ``exact=True`` the frequency solves the quadratic dispersion
    relation, which makes the fields an exact Maxwell solution for any
    ``chi_yz``; otherwise the first-order frequency is used.
    """
    omega = dispersion_exact(mode, m) if exact else dispersion(mode, m)

    def field(x, y, z, t):
        E, B = te_amplitudes(mode, omega, z)
        ph = np.exp(1j * (mode.k_x * x - omega * t + phase))
        return FieldState((E * ph).real, (B * ph).real, m)

    field.omega = omega
    return field


def mode_energy(mode: ModeSpec, m: MaterialParams) -> float:
    """Integrated energy per unit length and width.

    The first-order frequency is substituted into the unexpanded
    expression; expanding by hand afterwards is not needed.
    """
    w = dispersion(mode, m)
    return m.eps / 4 * (1 + mode.q**2 / (m.eps * m.mu * w**2))


def mode_flux(mode: ModeSpec, m: MaterialParams) -> float:
    """Energy flux along x integrated across the gap."""
    q = mode.q
    return 0.5 * (math.sqrt(m.eps / m.mu) * mode.k_x / q - mode.k_n**2 / q**2 * m.chi_yz)


def mode_group_velocity(mode: ModeSpec, m: MaterialParams) -> float:
    return mode.k_x / (m.index * mode.q) - m.chi_yz / m.eps


def group_velocity_fd(mode: ModeSpec, m: MaterialParams, step: float | None = None) -> float:
    """Central finite difference of :func:`dispersion` in ``k_x``."""
    h = 1e-6 * mode.k_n if step is None else step
    up = dispersion(ModeSpec(mode.k_x + h, mode.n, mode.a), m)
    down = dispersion(ModeSpec(mode.k_x - h, mode.n, mode.a), m)
    return (up - down) / (2 * h)


def mode_momentum(mode: ModeSpec, m: MaterialParams) -> float:
    """Integrated Minkowski momentum along x."""
    w = dispersion(mode, m)
    return m.eps / 2 * mode.k_x / w * (1 + mode.k_x * m.chi_yz / (m.eps * w))


def poynting_density(mode: ModeSpec, m: MaterialParams, z) -> float:
    """Time-averaged ``S_x`` at height ``z`` in closed form."""
    w = dispersion(mode, m)
    return (mode.k_x / (m.mu * mode.a * w) - m.chi_yz / mode.a) * np.sin(mode.k_n * z) ** 2


def momentum_density(mode: ModeSpec, m: MaterialParams, z) -> float:
    """Time-averaged Minkowski ``g_x`` at height ``z`` in closed form."""
    w = dispersion(mode, m)
    return (m.eps / mode.a * mode.k_x / w * (1 + mode.k_x * m.chi_yz / (m.eps * w))
            * np.sin(mode.k_n * z) ** 2)


def energy_density(mode: ModeSpec, m: MaterialParams, z) -> float:
    """Time-averaged energy density at height ``z`` in closed form."""
    w = dispersion(mode, m)
    kz = mode.k_n * z
    return (m.eps / (2 * mode.a) * (1 + mode.k_x**2 / (m.eps * m.mu * w**2)) * np.sin(kz) ** 2
            + mode.k_n**2 / (2 * m.mu * mode.a * w**2) * np.cos(kz) ** 2)


def observables(mode: ModeSpec, m: MaterialParams) -> ModeObservables:
    return ModeObservables(
        omega=dispersion(mode, m),
        W=mode_energy(mode, m),
        q_x=mode_flux(mode, m),
        u_x=mode_group_velocity(mode, m),
        G_x=mode_momentum(mode, m),
    )


def paired_momentum(mode: ModeSpec, m: MaterialParams) -> float:
    """Net momentum of the right- and left-moving partners, ``G(+k) + G(-k)``."""
    right = ModeSpec(abs(mode.k_x), mode.n, mode.a)
    return mode_momentum(right, m) + mode_momentum(right.reversed(), m)
