"""Pure-Python nested adaptive quadrature of the polar vacuum integrand.

Mirrors ``_kernels.pyx`` step for step; used when the compiled module is
unavailable or ``FEIGEL_PURE_PYTHON`` is set.
"""
import math

import numpy as np

from ._gk import GAUSS, KRONROD, NODES, RADIAL_BREAKS

NAME = "python"


def _channels(kap, c4, c2s2, a):
    x = 2.0 * kap * a
    one_minus = -np.expm1(-x)
    base = kap * kap * np.exp(-x) / one_minus
    F = x / one_minus
    yz = base * (c4 - c2s2 * F)
    zy = -base * (5.0 * c4 + 2.0 * c2s2 - (2.0 * c4 + c2s2) * F)
    return yz, zy


def polar_channels(kap, theta, a):
    c = math.cos(theta)
    s = math.sin(theta)
    if kap == 0.0:
        return 0.0, 0.0
    yz, zy = _channels(np.float64(kap), c ** 4, c * c * s * s, a)
    return float(yz), float(zy)


def _panel(lo, hi, c4, c2s2, a):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    yz, zy = _channels(mid + half * NODES, c4, c2s2, a)
    kyz = half * float(KRONROD @ yz)
    kzy = half * float(KRONROD @ zy)
    err = abs(kyz - half * float(GAUSS @ yz)) + abs(kzy - half * float(GAUSS @ zy))
    return kyz, kzy, err


def _adapt(panel_fn, breaks, rel_tol, abs_tol, max_sub):
    """Global adaptive bisection; returns (yz, zy, err, n_panels_evaluated, converged)."""
    panels = []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        panels.append((lo, hi) + panel_fn(lo, hi))
    n_eval = len(panels)
    while True:
        tyz = 0.0
        tzy = 0.0
        terr = 0.0
        worst = 0
        for i, (_, _, vyz, vzy, e) in enumerate(panels):
            tyz += vyz
            tzy += vzy
            terr += e
            if e > panels[worst][4]:
                worst = i
        if terr <= max(abs_tol, rel_tol * (abs(tyz) + abs(tzy))):
            return tyz, tzy, terr, n_eval, True
        if len(panels) >= max_sub:
            return tyz, tzy, terr, n_eval, False
        lo, hi = panels[worst][:2]
        mid = 0.5 * (lo + hi)
        panels[worst] = (lo, mid) + panel_fn(lo, mid)
        panels.insert(worst + 1, (mid, hi) + panel_fn(mid, hi))
        n_eval += 2


def polar_integral(a, kappa_max, rel_tol, abs_tol, max_sub):
    """Integrate both channels over ``theta in [0, pi/2]``, ``kappa in [0, kappa_max]``.

    Returns ``(I_yz, I_zy, err, n_evals, converged)`` without the overall
    material prefactor.
    """
    kbreaks = [b / a for b in RADIAL_BREAKS if b / a < kappa_max] + [kappa_max]
    inner_rel = 0.1 * rel_tol
    state = {"evals": 0, "ok": True}

    def inner(theta):
        c = math.cos(theta)
        s = math.sin(theta)
        c4, c2s2 = c ** 4, c * c * s * s
        yz, zy, err, n, ok = _adapt(lambda lo, hi: _panel(lo, hi, c4, c2s2, a),
                                    kbreaks, inner_rel, abs_tol, max_sub)
        state["evals"] += 21 * n
        state["ok"] = state["ok"] and ok
        return yz, zy, err

    def outer_panel(lo, hi):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        vals = np.array([inner(mid + half * t) for t in NODES])
        kyz = half * float(KRONROD @ vals[:, 0])
        kzy = half * float(KRONROD @ vals[:, 1])
        err = (abs(kyz - half * float(GAUSS @ vals[:, 0]))
               + abs(kzy - half * float(GAUSS @ vals[:, 1]))
               + half * float(KRONROD @ vals[:, 2]))
        return kyz, kzy, err

    yz, zy, err, _, ok = _adapt(outer_panel, [0.0, 0.5 * math.pi], rel_tol, abs_tol, max_sub)
    return yz, zy, err, state["evals"], ok and state["ok"]
