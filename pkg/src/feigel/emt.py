"""Energy and momentum bookkeeping for fields in the medium.

Quadratic quantities accept a :class:`~feigel.material.FieldState`. For
complex (monochromatic) fields they return time averages built from
``(1/2) Re(X Y*)``; for real fields they return the instantaneous
bilinears. The tensor builders read only ``E, D, B, H`` and never the
coupling tensor itself.
"""
from __future__ import annotations

import numpy as np

from .errors import StepTooLarge
from .material import FieldState, MaterialParams

_EPS = np.finfo(float).eps


def _averaged(f: FieldState, averaged):
    return f.is_complex if averaged is None else averaged


def _bilinear_cross(X, Y, averaged):
    if averaged:
        return 0.5 * np.real(np.cross(X, np.conj(Y)))
    return np.real(np.cross(X, Y))


def _bilinear_outer(X, Y, averaged):
    if averaged:
        return 0.5 * np.real(np.outer(X, np.conj(Y)))
    return np.real(np.outer(X, Y))


def poynting(f: FieldState, averaged=None) -> np.ndarray:
    """Poynting vector ``E x H``."""
    return _bilinear_cross(f.E, f.H, _averaged(f, averaged))


def energy_density(f: FieldState, averaged=None) -> float:
    """``(E.D + H.B) / 2`` (halved again when time-averaged)."""
    if _averaged(f, averaged):
        return 0.25 * float(np.real(np.vdot(f.D, f.E) + np.vdot(f.B, f.H)))
    return 0.5 * float(np.real(np.dot(f.E, f.D) + np.dot(f.H, f.B)))


def stress_minkowski(f: FieldState, averaged=None) -> np.ndarray:
    """Minkowski tensor ``T_ik = E_i D_k + H_i B_k - delta_ik w``."""
    av = _averaged(f, averaged)
    T = _bilinear_outer(f.E, f.D, av) + _bilinear_outer(f.H, f.B, av)
    return T - np.eye(3) * energy_density(f, av)


def stress_abraham(f: FieldState, averaged=None) -> np.ndarray:
    """Symmetrized (Abraham) stress tensor."""
    av = _averaged(f, averaged)
    P = _bilinear_outer(f.E, f.D, av) + _bilinear_outer(f.H, f.B, av)
    return 0.5 * (P + P.T) - np.eye(3) * energy_density(f, av)


def momentum_minkowski(f: FieldState, averaged=None) -> np.ndarray:
    """``g = D x B``."""
    return _bilinear_cross(f.D, f.B, _averaged(f, averaged))


def momentum_abraham(f: FieldState, averaged=None) -> np.ndarray:
    """``g = E x H`` (c = 1)."""
    return _bilinear_cross(f.E, f.H, _averaged(f, averaged))


def abraham_impulse(E0, H0, m: MaterialParams) -> np.ndarray:
    """Momentum density left in the fluid when static crossed fields are switched on."""
    return (m.eps * m.mu - 1) * np.cross(np.asarray(E0, dtype=float), np.asarray(H0, dtype=float))


# ---------------------------------------------------------------------------
# conservation residuals

def _momentum_residual_raw(field_fn, point, h):
    x = np.asarray(point, dtype=float)
    out = np.zeros(3)
    scale = 0.0
    for k in range(3):
        dx = np.zeros(4)
        dx[k] = h
        Tp = stress_minkowski(field_fn(*(x + dx)), averaged=False)
        Tm = stress_minkowski(field_fn(*(x - dx)), averaged=False)
        out += (Tp[:, k] - Tm[:, k]) / (2 * h)
        scale = max(scale, np.max(np.abs(Tp)), np.max(np.abs(Tm)))
    dt = np.array([0, 0, 0, h])
    gp = momentum_minkowski(field_fn(*(x + dt)), averaged=False)
    gm = momentum_minkowski(field_fn(*(x - dt)), averaged=False)
    out -= (gp - gm) / (2 * h)
    scale = max(scale, np.max(np.abs(gp)), np.max(np.abs(gm)))
    return out, scale


def _energy_residual_raw(field_fn, point, h):
    x = np.asarray(point, dtype=float)
    total = 0.0
    scale = 0.0
    for k in range(3):
        dx = np.zeros(4)
        dx[k] = h
        Sp = poynting(field_fn(*(x + dx)), averaged=False)
        Sm = poynting(field_fn(*(x - dx)), averaged=False)
        total += (Sp[k] - Sm[k]) / (2 * h)
        scale = max(scale, abs(Sp[k]), abs(Sm[k]))
    dt = np.array([0, 0, 0, h])
    wp = energy_density(field_fn(*(x + dt)), averaged=False)
    wm = energy_density(field_fn(*(x - dt)), averaged=False)
    total += (wp - wm) / (2 * h)
    scale = max(scale, abs(wp), abs(wm))
    return np.array([total]), scale


def _richardson_guard(raw, field_fn, point, step, check):
    r1, scale = raw(field_fn, point, step)
    if check:
        r2, _ = raw(field_fn, point, step / 2)
        # below this the residual is rounding noise and has no convergence order
        floor = 1e3 * _EPS * max(scale, 1.0) / step
        n1 = np.max(np.abs(r1))
        n2 = np.max(np.abs(r2))
        if n1 > floor and n2 > 0:
            ratio = n1 / n2
            if not 2.0 <= ratio <= 6.0:
                raise StepTooLarge(
                    f"Richardson ratio {ratio:.3g} between step {step:g} and {step / 2:g} "
                    "is not close to 4")
    return r1


def conservation_residual(field_fn, point, step, check=True) -> np.ndarray:
    """Momentum balance ``d_k T_ik - d_t g_i`` by central differences.

    Parameters
    ----------
    field_fn : callable
        ``field_fn(x, y, z, t)`` returning a real :class:`FieldState`.
        It must be safe to call concurrently if callers parallelize.
    point : sequence of 4 floats
        ``(x, y, z, t)``.
    step : float
        Finite-difference spacing, shared by all four coordinates.
    check : bool
        Also evaluate at ``step/2`` and raise :class:`StepTooLarge` unless
        the residual shrinks by roughly 4.
    """
    return _richardson_guard(_momentum_residual_raw, field_fn, point, step, check)


def energy_residual(field_fn, point, step, check=True) -> float:
    """Energy balance ``div S + d_t w`` by central differences."""
    return float(_richardson_guard(_energy_residual_raw, field_fn, point, step, check)[0])


def richardson_ratio(field_fn, point, step, kind="momentum") -> float:
    """Ratio of residual norms at ``step`` and ``step/2``."""
    raw = _momentum_residual_raw if kind == "momentum" else _energy_residual_raw
    r1, _ = raw(field_fn, point, step)
    r2, _ = raw(field_fn, point, step / 2)
    return float(np.max(np.abs(r1)) / np.max(np.abs(r2)))


def plane_wave(m: MaterialParams, direction=(1.0, 0.0, 0.0), polarization=(0.0, 1.0, 0.0),
               wavenumber=2 * np.pi, amplitude=1.0, phase=0.0):
    """Real plane wave in a non-chiral medium as a ``field_fn(x, y, z, t)``."""
    n_hat = np.asarray(direction, dtype=float)
    n_hat = n_hat / np.linalg.norm(n_hat)
    e_hat = np.asarray(polarization, dtype=float)
    e_hat = e_hat - np.dot(e_hat, n_hat) * n_hat
    e_hat = e_hat / np.linalg.norm(e_hat)
    omega = wavenumber / m.index
    kvec = wavenumber * n_hat
    b_hat = np.cross(kvec, e_hat) / omega

    def field(x, y, z, t):
        c = amplitude * np.cos(kvec @ np.array([x, y, z]) - omega * t + phase)
        return FieldState(e_hat * c, b_hat * c, m)

    field.omega = omega
    return field
