"""One test per acceptance criterion, each printing a single PASS/FAIL line."""
import math
import time

import numpy as np
import pytest
from scipy import special

from feigel import _core, cli, emt, greens as G, modes as M, vacuum as V
from feigel.material import FieldState, MaterialParams

Z3 = float(special.zeta(3))
TARGET = Z3 / (16 * math.pi)
MEDIA = [(1, 1), (2, 1), (1, 2), (4, 1)]


def test_ac1_closed_form(report):
    elapsed = {}
    for name in sorted(_core.available_backends()):
        start = time.perf_counter()
        base = V.vacuum_momentum(MaterialParams.from_couplings(chi_zy=1e-3), 1.0, backend=name,
                                 check_truncation=False)
        elapsed[name] = time.perf_counter() - start
    rel = abs(base.coeff_zy / TARGET - 1)
    scaling = 0.0
    for eps, mu in MEDIA[1:]:
        r = V.vacuum_momentum(MaterialParams.from_couplings(eps=eps, mu=mu, chi_zy=1e-3), 1.0)
        scaling = max(scaling, abs(r.coeff_zy / (base.coeff_zy * math.sqrt(mu / eps)) - 1))
    ok = rel <= 1e-6 and max(elapsed.values()) < 5 and scaling <= 1e-6
    assert report("AC1 closed form", ok,
                  f"coeff_zy={base.coeff_zy:.12g} rel={rel:.2e} "
                  f"time={ {k: round(v, 4) for k, v in elapsed.items()} }s "
                  f"sqrt(mu/eps) scaling defect={scaling:.2e}")


def test_ac2_chi_yz_null(report):
    worst = max(abs(V.vacuum_momentum(MaterialParams(eps=e, mu=m), 1.0).coeff_yz_hat) for e, m in MEDIA)
    assert report("AC2 chi_yz null", worst <= 1e-8, f"max |coeff_yz|={worst:.2e}")


def test_ac3_oracle_chain(report):
    r = V.radial_moments(1.0, tol=np.inf)
    (q4, e4), (q22, e22) = V.theta_moments()
    theta = max(abs(q4 / e4 - 1), abs(q22 / e22 - 1))
    rng = np.random.default_rng(7)
    pts = 0.0
    for _ in range(100):
        eps, mu = rng.uniform(0.5, 4, 2)
        m = MaterialParams(eps=eps, mu=mu)
        kap = rng.uniform(1e-3, 20)
        th = rng.uniform(0, math.pi / 2)
        cart = V.integrand_cartesian(kap * math.sin(th) / m.index, kap * math.cos(th), m, 1.0)
        pol = V.integrand_polar(kap, th, 1.0)
        for c, p in zip(cart, pol):
            rhs = V.polar_prefactor(m) * float(p)
            pts = max(pts, abs(c * kap / m.index - rhs) / abs(rhs))
    m = MaterialParams(eps=2.0, mu=1.0)
    cyz, czy = V.cartesian_integral(m, 1.0)
    pol = V.vacuum_momentum(m, 1.0)
    full = max(abs(czy / pol.coeff_zy - 1), abs(cyz - pol.coeff_yz) / abs(pol.coeff_zy))
    ok = r.max_defect <= 1e-10 and theta <= 1e-10 and pts <= 1e-9 and full <= 1e-9
    assert report("AC3 oracle chain", ok,
                  f"radial={r.max_defect:.2e} theta={theta:.2e} points={pts:.2e} integral={full:.2e}")


def test_ac4_a_cubed(report):
    seps = (0.5, 1.0, 2.0, 5.0)
    vals = [V.vacuum_momentum(MaterialParams.from_couplings(chi_zy=1e-3), a).coeff_zy for a in seps]
    hats = [v * a**3 for v, a in zip(vals, seps)]
    spread = max(abs(h / hats[1] - 1) for h in hats)
    monotone = all(x > y > 0 for x, y in zip(vals, vals[1:]))
    assert report("AC4 a^-3 law", spread <= 1e-6 and monotone,
                  f"spread={spread:.2e} monotone={monotone}")


def _green_suite():
    m = MaterialParams.from_couplings(eps=2.0, mu=1.5, chi_yz=3e-3, chi_zy=-4e-3)
    a = 1.0
    pt = lambda k, zeta, z, zp: G.SpectralPoint(k, G.ImaginaryFrequency(zeta), z, zp)
    bc = 0.0
    for k in np.linspace(-4, 4, 20):
        for zeta in np.linspace(0.05, 5, 20):
            for fn in (G.g_yy_full, G.g_xx_full):
                ref = abs(fn(pt(k, zeta, 0.5, 0.3), m, a))
                bc = max(bc, max(abs(fn(pt(k, zeta, z, 0.3), m, a)) for z in (0.0, a)) / ref)
    ratios = []
    for fn, which in ((G.g_xx_full, "K"), (G.g_yy_full, "L")):
        K = getattr(G.shifted_constants(1.0, G.ImaginaryFrequency(0.5), m), which)
        p = pt(1.0, 0.5, 0.7, 0.35)
        g = lambda z: fn(p.with_(z=z), m, a)

        def res(h):
            d2 = (g(0.7 + h) - 2 * g(0.7) + g(0.7 - h)) / h**2
            return abs(d2 - K**2 * g(0.7))
        ratios.append(res(1e-2) / res(5e-3))
    rec = 0.0
    for chi in (0.0, 1e-7):
        mm = MaterialParams.from_couplings(eps=1.5, mu=2.0, chi_zy=chi)
        for k in (-2.0, 0.6, 1.7):
            for zeta in (0.3, 2.5):
                for z, zp in [(0.1, 0.7), (0.8, 0.2)]:
                    lhs = G.g_xz_eff(pt(k, zeta, z, zp), mm, a)
                    rec = max(rec, abs(lhs - G.g_zx_eff(pt(-k, zeta, zp, z), mm, a)) / abs(lhs))
    taylor = []
    base = MaterialParams(eps=1.5, mu=1.2)
    p = pt(0.8, 0.6, 0.4, 0.4)
    for eff, o1, entry in ((G.g_yy_eff, "g_yy_o1", "chi_yz"), (G.dz_g_zx_eff, "dz_g_zx_o1", "chi_zy"),
                           (G.g_zz_eff, "g_zz_o1", "chi_zy")):
        coeff = (getattr(G.chi_expansions(p, base.replace(chi_max=2.0, **{entry: 1.0}), a), o1)
                 - getattr(G.chi_expansions(p, base, a), o1))
        errs = [abs((eff(p, base.replace(**{entry: h}), a) - eff(p, base, a)) / h - coeff)
                for h in (1e-4, 1e-5)]
        taylor.append(errs[0] / errs[1])
    return bc, ratios, rec, taylor


def test_ac5_green_suite(report):
    bc, ratios, rec, taylor = _green_suite()
    ok = (bc <= 1e-12 and all(abs(r - 4) <= 0.5 for r in ratios) and rec <= 1e-12
          and all(abs(t - 10) <= 1 for t in taylor))
    assert report("AC5 Green functions", ok,
                  f"boundary={bc:.1e} ode_ratios={[round(float(r), 3) for r in ratios]} reciprocity={rec:.1e} "
                  f"taylor_ratios={[round(float(t), 3) for t in taylor]}")


def test_ac6_single_mode(report):
    worst = 0.0
    media = [(1.0, 1.0, 1e-2), (2.0, 1.0, 1e-3), (1.0, 3.0, -5e-3), (4.0, 0.5, 2e-3)]
    for kx in (-3.0, -0.5, 0.2, 1.0, 4.0):
        for n in range(1, 6):
            for eps, mu, chi in media:
                obs = M.observables(M.ModeSpec(kx, n, 1.0), MaterialParams.from_couplings(eps=eps, mu=mu, chi_yz=chi))
                worst = max(worst, abs(obs.q_x - obs.W * obs.u_x) / abs(obs.q_x) / chi**2)
    fd = 0.0
    for kx in (-2.0, 0.5, 3.0):
        for chi in (0.0, 1e-3):
            mode, m = M.ModeSpec(kx, 2, 1.0), MaterialParams.from_couplings(eps=1.7, chi_yz=chi)
            u = M.mode_group_velocity(mode, m)
            fd = max(fd, abs(M.group_velocity_fd(mode, m) / u - 1))
    mode = M.ModeSpec(1.3, 1, 1.0)
    zero = M.paired_momentum(mode, MaterialParams(eps=2.0))
    chis = np.array([1e-4, 3e-4, 1e-3, 3e-3])
    pairs = np.array([M.paired_momentum(mode, MaterialParams.from_couplings(eps=2.0, chi_yz=c)) for c in chis])
    slope = np.polyfit(np.log(chis), np.log(np.abs(pairs)), 1)[0]
    ok = worst <= 50 and fd <= 1e-8 and zero == 0 and abs(slope - 1) <= 0.02
    assert report("AC6 single mode", ok,
                  f"max defect/chi^2={worst:.3g} (bound 50) u_x fd={fd:.1e} pair(chi=0)={zero} "
                  f"slope={slope:.4f}")


def test_ac7_conservation(report):
    vac = MaterialParams()
    pw = emt.plane_wave(vac, direction=(1, 1, 0), polarization=(0, 0, 1))
    te = M.te_field_function(M.ModeSpec(1.3, 1, 1.0), MaterialParams(eps=2.0))
    ratios = [emt.richardson_ratio(pw, (0.1, 0.2, 0.3, 0.05), 1e-2, kind)
              for kind in ("momentum", "energy")]
    ratios += [emt.richardson_ratio(te, (0.2, 0.0, 0.4, 0.1), 1e-2, kind)
               for kind in ("momentum", "energy")]
    rng = np.random.default_rng(11)
    sym = 0.0
    for _ in range(50):
        f = FieldState(rng.normal(size=3), rng.normal(size=3),
                       MaterialParams(eps=rng.uniform(0.5, 4), mu=rng.uniform(0.5, 4)))
        TM, TA = emt.stress_minkowski(f), emt.stress_abraham(f)
        sym = max(sym, np.max(np.abs(TM - TA)) / np.max(np.abs(TM)))
    ok = all(abs(r - 4) <= 0.5 for r in ratios) and sym <= 1e-12
    assert report("AC7 conservation", ok,
                  f"richardson={[round(float(r), 4) for r in ratios]} |T^M-T^A|={sym:.1e}")


def test_ac8_determinism(report, tmp_path):
    cfg = tmp_path / "sweep.ini"
    cfg.write_text("[run]\ntask = sweep\n[material]\nchi_zy = 1e-3\nchi_yz = 2e-3\n"
                   "[sweep]\nparameter = a\nstart = 0.5\nstop = 5\ncount = 9\nspacing = log\n")
    outs = []
    for jobs in ("1", "8"):
        out = tmp_path / f"j{jobs}.csv"
        assert cli.main(["run", str(cfg), "--jobs", jobs, "--out", str(out)]) == 0
        outs.append([ln for ln in out.read_bytes().splitlines() if not ln.startswith(b"#")])
    same = outs[0] == outs[1] and len(outs[0]) == 10
    assert report("AC8 determinism", same, f"{len(outs[0]) - 1} rows, byte-identical={same}")
