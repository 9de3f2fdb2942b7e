"""Batch front end.

Usage::

    feigel run CONFIG [--task T] [--set section.key=value]... [--jobs N] [--out PATH]

``CONFIG`` is an INI file with the sections ``run``, ``material``,
``geometry``, ``quadrature``, ``sweep``, ``modes`` and ``output``. Every
output file embeds the fully resolved configuration so that a run can
be repeated from its artifact alone.

Exit codes: 0 success, 1 a verification check failed, 2 invalid
configuration, 3 tolerance not met.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import constants

from . import _core, modes, vacuum
from .errors import ConfigInvalid, ToleranceNotMet
from .material import DEFAULT_CHI_MAX, MaterialParams

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3

TASKS = ("vacuum", "mode-table", "sweep", "verify")
SWEEPABLE = ("a", "eps", "mu", "chi_yz", "chi_zy")
# only chi_yz and chi_zy nonzero; the second spelling is a legacy alias
PAIR_FORMS = ("pair", "eq21")
_CHI_KEYS = tuple(f"chi_{i}{j}" for i in "xyz" for j in "xyz")

DEFAULTS = {
    "run": {"task": "vacuum"},
    "material": {"eps": "1", "mu": "1", "chi": "pair", "chi_yz": "0", "chi_zy": "0",
                 "chi_max": repr(DEFAULT_CHI_MAX)},
    "geometry": {"a": "1", "units": "natural"},
    "quadrature": {"rel_tol": "1e-9", "abs_tol": "1e-14", "kappa_a_max": "40",
                   "max_subdivisions": "2000"},
    "modes": {"n_max": "3", "k_x": "1"},
    "output": {"path": "", "format": "csv", "precision": "", "timing": "false"},
}


# ---------------------------------------------------------------------------
# configuration

@dataclass
class SweepSpec:
    parameter: str
    start: float
    stop: float
    count: int
    spacing: str = "linear"

    def values(self):
        if self.spacing == "log":
            return list(np.geomspace(self.start, self.stop, self.count))
        return list(np.linspace(self.start, self.stop, self.count))


@dataclass
class RunConfig:
    task: str
    material: dict
    a: float
    units: str
    quadrature: vacuum.QuadratureConfig
    sweep: SweepSpec | None
    n_max: int
    k_x: list
    output_path: str
    output_format: str
    precision: int | None
    timing: bool
    resolved: dict = field(default_factory=dict)

    def build_material(self, **overrides) -> MaterialParams:
        params = dict(self.material)
        params.update(overrides)
        chi_max = params.pop("chi_max")
        eps = params.pop("eps")
        mu = params.pop("mu")
        return MaterialParams.from_entries(eps=eps, mu=mu, chi_max=chi_max, **params)


def _get(cp, section, key, conv, what):
    raw = cp.get(section, key, fallback=None)
    if raw is None:
        raise ConfigInvalid(f"{section}.{key}: missing")
    try:
        return conv(raw.strip())
    except (TypeError, ValueError):
        raise ConfigInvalid(f"{section}.{key}: expected {what}, got {raw!r}") from None


def _bool(text):
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _float_list(text):
    return [float(part) for part in text.replace(";", ",").split(",") if part.strip()]


def load_config(path, task=None, overrides=(), out=None) -> RunConfig:
    """Read ``path``, apply ``--set`` overrides and validate.

    Raises
    ------
    ConfigInvalid
        With a message naming the offending ``section.key``.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.read_dict(DEFAULTS)
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigInvalid(f"malformed config: {exc}") from None
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigInvalid(f"--set expects section.key=value, got {item!r}")
        dotted, value = item.split("=", 1)
        section, key = dotted.strip().split(".", 1)
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, key, value.strip())
    if task is not None:
        cp.set("run", "task", task)
    if out is not None:
        cp.set("output", "path", out)

    known = {s: set(DEFAULTS.get(s, ())) for s in DEFAULTS}
    known["material"] |= set(_CHI_KEYS)
    known["sweep"] = {"parameter", "start", "stop", "count", "spacing"}
    for section in cp.sections():
        if section not in known:
            raise ConfigInvalid(f"{section}: unknown section")
        for key in cp[section]:
            if key not in known[section]:
                raise ConfigInvalid(f"{section}.{key}: unknown key")

    task_name = cp.get("run", "task").strip()
    if task_name not in TASKS:
        raise ConfigInvalid(f"run.task: expected one of {', '.join(TASKS)}, got {task_name!r}")

    chi_form = cp.get("material", "chi").strip()
    material = {
        "eps": _get(cp, "material", "eps", float, "a number"),
        "mu": _get(cp, "material", "mu", float, "a number"),
        "chi_max": _get(cp, "material", "chi_max", float, "a number"),
    }
    if chi_form in PAIR_FORMS:
        for key in _CHI_KEYS:
            if key not in ("chi_yz", "chi_zy") and cp.has_option("material", key):
                raise ConfigInvalid(f"material.{key}: only chi_yz and chi_zy are allowed with chi = pair")
        material["chi_yz"] = _get(cp, "material", "chi_yz", float, "a number")
        material["chi_zy"] = _get(cp, "material", "chi_zy", float, "a number")
    elif chi_form == "full":
        for key in _CHI_KEYS:
            if cp.has_option("material", key):
                material[key] = _get(cp, "material", key, float, "a number")
    else:
        raise ConfigInvalid(f"material.chi: expected pair or full, got {chi_form!r}")

    a = _get(cp, "geometry", "a", float, "a number")
    if not a > 0:
        raise ConfigInvalid(f"geometry.a: must be positive, got {a}")
    units = cp.get("geometry", "units").strip()
    if units not in ("natural", "SI"):
        raise ConfigInvalid(f"geometry.units: expected natural or SI, got {units!r}")

    try:
        quad = vacuum.QuadratureConfig(
            rel_tol=_get(cp, "quadrature", "rel_tol", float, "a number"),
            abs_tol=_get(cp, "quadrature", "abs_tol", float, "a number"),
            kappa_a_max=_get(cp, "quadrature", "kappa_a_max", float, "a number"),
            max_subdivisions=_get(cp, "quadrature", "max_subdivisions", int, "an integer"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigInvalid):
            raise
        raise ConfigInvalid(f"quadrature: {exc}") from None

    sweep = None
    if cp.has_section("sweep"):
        if task_name != "sweep":
            raise ConfigInvalid(f"sweep: section present but run.task is {task_name!r}")
        parameter = _get(cp, "sweep", "parameter", str, "a name")
        if parameter not in SWEEPABLE:
            raise ConfigInvalid(f"sweep.parameter: expected one of {', '.join(SWEEPABLE)}, "
                                f"got {parameter!r}")
        spacing = cp.get("sweep", "spacing", fallback="linear").strip()
        if spacing not in ("linear", "log"):
            raise ConfigInvalid(f"sweep.spacing: expected linear or log, got {spacing!r}")
        sweep = SweepSpec(
            parameter=parameter,
            start=_get(cp, "sweep", "start", float, "a number"),
            stop=_get(cp, "sweep", "stop", float, "a number"),
            count=_get(cp, "sweep", "count", int, "an integer"),
            spacing=spacing,
        )
        if sweep.count < 1:
            raise ConfigInvalid("sweep.count: must be at least 1")
        if not sweep.start <= sweep.stop:
            raise ConfigInvalid("sweep.stop: range must be ordered (start <= stop)")
        if spacing == "log" and sweep.start <= 0:
            raise ConfigInvalid("sweep.start: log spacing needs a positive range")
    elif task_name == "sweep":
        raise ConfigInvalid("sweep: section required when run.task = sweep")

    n_max = _get(cp, "modes", "n_max", int, "an integer")
    if n_max < 1:
        raise ConfigInvalid("modes.n_max: must be at least 1")
    k_list = _get(cp, "modes", "k_x", _float_list, "a comma-separated list of numbers")
    if task_name == "mode-table" and not k_list:
        raise ConfigInvalid("modes.k_x: empty list")

    fmt = cp.get("output", "format").strip()
    if fmt not in ("csv", "json"):
        raise ConfigInvalid(f"output.format: expected csv or json, got {fmt!r}")
    prec_raw = cp.get("output", "precision").strip()
    precision = None
    if prec_raw:
        precision = _get(cp, "output", "precision", int, "an integer")
        if not 1 <= precision <= 17:
            raise ConfigInvalid("output.precision: must be between 1 and 17")
    timing = _get(cp, "output", "timing", _bool, "true or false")
    path = cp.get("output", "path").strip() or f"feigel_{task_name}.{fmt}"

    resolved = {s: dict(cp[s]) for s in cp.sections()}
    resolved["output"]["path"] = path
    config = RunConfig(
        task=task_name, material=material, a=a, units=units, quadrature=quad, sweep=sweep,
        n_max=n_max, k_x=k_list, output_path=path, output_format=fmt, precision=precision,
        timing=timing, resolved=resolved)
    try:
        config.build_material()
    except ValueError as exc:
        raise ConfigInvalid(f"material: {exc}") from None
    return config


# ---------------------------------------------------------------------------
# units

HBAR = constants.hbar
C_LIGHT = constants.c
EPS0 = constants.epsilon_0
SI_FORMULA = "g_si = g_hat * hbar / a^3  [J s m^-3], a in metres"


def si_convert(g_hat: float, a_si: float) -> float:
    """Momentum density in SI from the separation-free value ``g_hat = g a^3 / hbar``.

    Only wavenumbers along x are summed, so the result carries units of
    J s m^-3 (momentum density times a length).
    """
    return g_hat * HBAR / a_si**3


# ---------------------------------------------------------------------------
# tasks

def _vacuum_row(args):
    config, overrides = args
    m = config.build_material(**{k: v for k, v in overrides.items() if k != "a"})
    a = overrides.get("a", config.a)
    a_nat = 1.0 if config.units == "SI" else a
    start = time.perf_counter()
    ok = True
    try:
        res = vacuum.vacuum_momentum(m, a_nat, config.quadrature)
    except ToleranceNotMet as exc:
        res = exc.result
        ok = False
        if res is None:
            raise
    row = {
        "a": a, "eps": m.eps, "mu": m.mu, "chi_yz": m.chi_yz, "chi_zy": m.chi_zy,
        "g_hat": res.g_hat, "coeff_zy_hat": res.coeff_zy_hat, "coeff_yz_hat": res.coeff_yz_hat,
    }
    if config.units == "SI":
        row["g_si"] = si_convert(res.g_hat, a)
        row["coeff_zy"] = si_convert(res.coeff_zy_hat, a)
        row["coeff_yz"] = si_convert(res.coeff_yz_hat, a)
    else:
        row["g"] = res.g
        row["coeff_zy"] = res.coeff_zy
        row["coeff_yz"] = res.coeff_yz
    row["abs_err_est"] = res.abs_err_est * (a_nat**3)
    row["n_evals"] = res.n_evals
    row["converged"] = ok
    if config.timing:
        row["wall_time"] = time.perf_counter() - start
    return row


def run_vacuum(config: RunConfig, jobs: int = 1):
    return [_vacuum_row((config, {}))]


def run_sweep(config: RunConfig, jobs: int = 1):
    values = config.sweep.values()
    tasks = [(config, {config.sweep.parameter: float(v)}) for v in values]
    # each row is computed independently; map preserves sweep order
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_vacuum_row, tasks))
    return [_vacuum_row(t) for t in tasks]


def mode_table(config: RunConfig, jobs: int = 1):
    """One row per ``(+-k_x, n)`` with the five observables and the pair sum."""
    m = config.build_material()
    si = config.units == "SI"
    rows = []
    for k in config.k_x:
        for n in range(1, config.n_max + 1):
            for sign in (1.0, -1.0):
                mode = modes.ModeSpec(sign * abs(k), n, config.a)
                obs = modes.observables(mode, m)
                pair = modes.paired_momentum(mode, m)
                row = {"k_x": mode.k_x, "n": n, "a": config.a, "eps": m.eps, "mu": m.mu,
                       "chi_yz": m.chi_yz, "chi_zy": m.chi_zy}
                if si:
                    row.update(omega=C_LIGHT * obs.omega, W=EPS0 * obs.W, q_x=EPS0 * C_LIGHT * obs.q_x,
                               u_x=C_LIGHT * obs.u_x, G_x=EPS0 / C_LIGHT * obs.G_x,
                               G_pair=EPS0 / C_LIGHT * pair)
                else:
                    row.update(omega=obs.omega, W=obs.W, q_x=obs.q_x, u_x=obs.u_x, G_x=obs.G_x,
                               G_pair=pair)
                row["flux_ratio"] = obs.q_x / (obs.W * obs.u_x)
                rows.append(row)
    return rows


def verify(config: RunConfig, jobs: int = 1):
    """Run the oracle chain; one row per check."""
    m = config.build_material()
    quad = config.quadrature
    rows = []

    def check(name, value, reference, tol, passed=None):
        if passed is None:
            passed = abs(value - reference) <= tol * max(abs(reference), 1.0 if reference == 0 else 0.0)
        rows.append({"check": name, "value": float(value), "reference": float(reference),
                     "tolerance": tol, "passed": bool(passed)})

    z3, bound = vacuum.zeta_series(3.0)
    check("zeta3_series_bound", bound, 0.0, 1e-12, bound < 1e-12)
    r = vacuum.radial_moments(config.a, tol=np.inf)
    check("radial_I1_quad_vs_series", r.I1, r.I1_series, 1e-10)
    check("radial_I2_quad_vs_series", r.I2, r.I2_series, 1e-10)
    (q4, e4), (q22, e22) = vacuum.theta_moments()
    check("theta_cos4", q4, e4, 1e-10)
    check("theta_cos2sin2", q22, e22, 1e-10)
    try:
        res = vacuum.vacuum_momentum(m, 1.0, quad)
    except ToleranceNotMet as exc:
        res = exc.result
    ref = vacuum.closed_form_coefficient(m, 1.0)
    check("polar_vs_closed_form", res.coeff_zy_hat, ref, 1e-6)
    check("chi_yz_null", abs(res.coeff_yz_hat), 0.0, 1e-8, abs(res.coeff_yz_hat) <= 1e-8)
    chain_yz, chain_zy = vacuum.moment_chain(1.0)
    pref = vacuum.polar_prefactor(m)
    check("moment_chain_vs_closed_form", pref * chain_zy, ref, 1e-9)
    check("moment_chain_chi_yz", abs(pref * chain_yz), 0.0, 1e-10, abs(pref * chain_yz) <= 1e-10)

    rng = np.random.default_rng(20240101)
    worst = 0.0
    for _ in range(100):
        kap = rng.uniform(0.01, 10.0)
        theta = rng.uniform(0.0, 0.5 * math.pi)
        k = kap * math.cos(theta)
        zeta = kap * math.sin(theta) / m.index
        cart = vacuum.integrand_cartesian(zeta, k, m, 1.0)
        pol = vacuum.integrand_polar(kap, theta, 1.0)
        for c, p_ in zip(cart, pol):
            lhs = c * kap / m.index
            rhs = pref * float(p_)
            worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    check("cartesian_vs_polar_points", worst, 0.0, 1e-9, worst <= 1e-9)
    cyz, czy = vacuum.cartesian_integral(m, 1.0, quad.kappa_a_max)
    check("cartesian_vs_polar_integral", czy, res.coeff_zy_hat, 1e-9)
    check("cartesian_chi_yz_null", abs(cyz), 0.0, 1e-8, abs(cyz) <= 1e-8)

    worst = 0.0
    for _ in range(25):
        zeta = rng.uniform(0.05, 3.0)
        k = rng.uniform(-3.0, 3.0)
        a1 = vacuum.integrand_cartesian(zeta, k, m, 1.0)
        a2 = vacuum.integrand_from_correlators(zeta, k, m, 1.0)
        for x1, x2 in zip(a1, a2):
            worst = max(worst, abs(x1 - x2) / max(abs(x1), 1e-300))
    check("correlators_vs_cartesian_integrand", worst, 0.0, 1e-12, worst <= 1e-12)

    defect = vacuum.truncation_defect(quad)
    check("truncation_doubling", defect, 0.0, quad.rel_tol, defect <= quad.rel_tol)

    scaled = []
    for a in (0.5, 1.0, 2.0, 5.0):
        r_a = vacuum.vacuum_momentum(m, a, quad)
        scaled.append((a, r_a.coeff_zy))
    spread = max(abs(c * a**3 / (scaled[1][1]) - 1) for a, c in scaled)
    monotone = all(c1 > c2 > 0 for (_, c1), (_, c2) in zip(scaled, scaled[1:]))
    check("a_cubed_law", spread, 0.0, 1e-6, spread <= 1e-6 and monotone)
    return rows


TASK_RUNNERS = {"vacuum": run_vacuum, "sweep": run_sweep, "mode-table": mode_table,
                "verify": verify}


# ---------------------------------------------------------------------------
# output

def _fmt(value, precision):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return repr(value) if precision is None else format(value, f".{precision}g")
    return str(value)


def _metadata(config: RunConfig):
    meta = {"task": config.task, "units": config.units, "backend": _core.BACKEND}
    if config.units == "SI":
        meta["si_formula"] = SI_FORMULA
        meta["constants"] = {"hbar": HBAR, "c": C_LIGHT, "epsilon_0": EPS0}
    return meta


def render(rows, config: RunConfig) -> str:
    """Serialize rows with the resolved configuration embedded."""
    meta = _metadata(config)
    if config.output_format == "json":
        formatted = []
        for row in rows:
            formatted.append({k: (float(_fmt(v, config.precision))
                                  if isinstance(v, (float, np.floating)) else v)
                              for k, v in row.items()})
        return json.dumps({"config": config.resolved, "meta": meta, "rows": formatted},
                          indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# config: {json.dumps(config.resolved, sort_keys=True)}\n")
    buf.write(f"# meta: {json.dumps(meta, sort_keys=True)}\n")
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        header = list(rows[0])
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[k], config.precision) for k in header])
    return buf.getvalue()


def _summary(config: RunConfig, rows) -> str:
    if config.task == "vacuum":
        row = rows[0]
        closed = vacuum.closed_form_coefficient(config.build_material(), 1.0)
        return (f"g_hat/chi_zy = {row['coeff_zy_hat']:.10g} +/- {row['abs_err_est']:.2g} "
                f"(closed form {closed:.10g}); g_hat = {row['g_hat']:.6g}; "
                f"g_hat/chi_yz = {row['coeff_yz_hat']:.3g}")
    if config.task == "sweep":
        return f"sweep over {config.sweep.parameter}: {len(rows)} rows"
    if config.task == "mode-table":
        worst = max(abs(r["flux_ratio"] - 1) for r in rows)
        return f"mode table: {len(rows)} rows, max |q_x/(W u_x) - 1| = {worst:.3g}"
    failed = [r["check"] for r in rows if not r["passed"]]
    return f"verify: {len(rows) - len(failed)}/{len(rows)} checks passed" + (
        f"; failed: {', '.join(failed)}" if failed else "")


def execute(config: RunConfig, jobs: int = 1, stream=None) -> int:
    stream = stream or sys.stdout
    rows = TASK_RUNNERS[config.task](config, jobs)
    text = render(rows, config)
    with open(config.output_path, "w", newline="") as fh:
        fh.write(text)
    if config.task == "verify":
        for r in rows:
            print(f"{'PASS' if r['passed'] else 'FAIL'} {r['check']}: value={r['value']:.6g} "
                  f"reference={r['reference']:.6g} tol={r['tolerance']:g}", file=stream)
    print(_summary(config, rows), file=stream)
    if config.task == "verify":
        return EXIT_OK if all(r["passed"] for r in rows) else EXIT_CHECK_FAILED
    if any(not r.get("converged", True) for r in rows):
        return EXIT_TOLERANCE
    return EXIT_OK


def _jobs(value):
    if value is not None:
        return value
    env = os.environ.get("FEIGEL_JOBS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigInvalid(f"FEIGEL_JOBS: expected an integer, got {env!r}") from None
    return 1


def build_parser():
    parser = argparse.ArgumentParser(prog="feigel", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="execute a run configuration")
    run.add_argument("config", help="INI run configuration")
    run.add_argument("--task", choices=TASKS, help="override run.task")
    run.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="SECTION.KEY=VALUE", help="override one configuration value")
    run.add_argument("--jobs", type=int, default=None,
                     help="parallel sweep workers (default: $FEIGEL_JOBS or 1)")
    run.add_argument("--out", help="override output.path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, task=args.task, overrides=args.overrides, out=args.out)
        jobs = _jobs(args.jobs)
        if jobs < 1:
            raise ConfigInvalid("--jobs: must be at least 1")
        return execute(config, jobs)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ToleranceNotMet as exc:
        print(f"tolerance not met: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
