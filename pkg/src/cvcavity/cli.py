"""Command-line front end: simulate | sweep | optimize | validate | decay.

Configuration can come from a YAML file (--config) with flags taking
precedence.  Output tables are CSV (comment header lines prefixed '#',
12 significant digits) or JSON; identical configuration produces
byte-identical files.

Exit codes: 0 success, 1 validation deviation beyond tolerance, 2 bad
configuration, 3 integration failure, 4 oracle truncation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np
import yaml

from .analysis import GridSpec, g0_curve, refine_global_minimum, sweep_offset
from .dynamics import IntegratorConfig, find_minimum_variance, integrate
from .errors import FockTruncationError, IntegrationError
from .fock import evolve as oracle_evolve
from .pump import (ConstantPump, GaussianPump, RingGaussianPump, RingParams,
                   g0_from_physical, optimum_sigma, optimum_tau,
                   peak_strength, peak_strength_coefficient,
                   predicted_min_variance)
from .states import CavityParams, SqueezedThermalState, thermal_decay

EXIT_OK = 0
EXIT_DEVIATION = 1
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_TRUNCATION = 4

VALIDATE_TOLERANCE = 1e-3


class ConfigError(ValueError):
    pass


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def _write_table(path: str, fmt: str, params: dict, columns, rows) -> None:
    rows = [list(r) for r in rows]
    if fmt == "csv":
        lines = [f"# {k} = {_fmt(v) if isinstance(v, float) else v}"
                 for k, v in params.items()]
        lines.append("# " + ",".join(columns))
        lines.extend(",".join(v if isinstance(v, str) else _fmt(v) for v in row)
                     for row in rows)
        Path(path).write_text("\n".join(lines) + "\n")
    elif fmt == "json":
        doc = {"parameters": params, "columns": list(columns),
               "rows": [[v if isinstance(v, str) else float(v) for v in row]
                        for row in rows]}
        Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        raise ConfigError(f"unknown output format {fmt!r}")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    data = yaml.safe_load(p.read_text())
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config file must contain a mapping")
    return data


def _get(cfg: dict, *keys, default=None):
    node = cfg
    for key in keys:
        if not isinstance(node, dict) or key not in node:
            return default
        node = node[key]
    return node


def _first(*values, default=None):
    for v in values:
        if v is not None:
            return v
    return default


def _as_float(value, name: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None


def _resolve_sigma(sigma_raw, a_p: float) -> float:
    if sigma_raw is None or (isinstance(sigma_raw, str)
                             and sigma_raw.lower() == "optimal"):
        return optimum_sigma(a_p)
    return _as_float(sigma_raw, "sigma-p")


def _resolve_tau(tau_raw) -> float:
    if tau_raw is None or (isinstance(tau_raw, str)
                           and tau_raw.lower() == "optimal"):
        return optimum_tau()
    return _as_float(tau_raw, "tau")


_PHYSICAL_KEYS = ("chi2_pm_v", "e0_mv_cm", "lambda_p_nm", "radius_um", "n_eff")


def _resolve_pump(ns, cfg):
    """Build the pump model plus a parameter dict for the output header."""
    variant = _first(getattr(ns, "pump", None), _get(cfg, "pump", "variant"),
                     default="ring")
    if variant not in ("ring", "gaussian", "constant"):
        raise ConfigError(f"unknown pump variant {variant!r}")
    phys = {k: _first(getattr(ns, k, None), _get(cfg, "physical", k))
            for k in _PHYSICAL_KEYS}
    phys_given = any(v is not None for v in phys.values())
    g0_raw = _first(ns.g0, _get(cfg, "pump", "g0"))
    a_p = _as_float(_first(ns.ap, _get(cfg, "ring", "a_p"), default=0.99), "ap")
    sigma = _resolve_sigma(_first(ns.sigma_p, _get(cfg, "ring", "sigma_p")), a_p)
    if phys_given:
        if variant != "ring":
            raise ConfigError("physical pump inputs require the ring variant")
        if g0_raw is not None:
            raise ConfigError("give either --g0 or the physical pump inputs, not both")
        missing = [k for k, v in phys.items() if v is None]
        if missing:
            raise ConfigError(f"missing physical pump inputs: {', '.join(missing)}")
        g0 = g0_from_physical(
            chi2_pm_per_v=_as_float(phys["chi2_pm_v"], "chi2-pm-v"),
            e0_mv_per_cm=_as_float(phys["e0_mv_cm"], "e0-mv-cm"),
            lambda_p_nm=_as_float(phys["lambda_p_nm"], "lambda-p-nm"),
            radius_um=_as_float(phys["radius_um"], "radius-um"),
            n_eff=_as_float(phys["n_eff"], "n-eff"),
            a_p=a_p, sigma_p=sigma)
    else:
        g0 = _as_float(g0_raw, "g0") if g0_raw is not None else 4.0
    if g0 < 0.0:
        raise ConfigError("g0 must be >= 0")
    tau = _resolve_tau(_first(ns.tau, _get(cfg, "pump", "tau")))
    params = {"pump": variant, "g0": g0}
    if variant == "constant":
        return ConstantPump(g=g0), None, params
    params["tau_tilde"] = tau
    if variant == "gaussian":
        return GaussianPump(g0=g0, tau_tilde=tau), tau, params
    params.update({"a_p": a_p, "sigma_p": sigma})
    ring = RingParams(sigma_p=sigma, a_p=a_p)
    return RingGaussianPump(g0=g0, tau_tilde=tau, ring=ring), tau, params


def _resolve_window(ns, cfg, tau: float | None, step_default: float = 1e-3):
    step = _as_float(_first(ns.step, _get(cfg, "integrator", "step"),
                            default=step_default), "step")
    if tau is None:
        t_start_default, t_end_default = 0.0, 10.0
    else:
        t_start_default, t_end_default = -5.0 * tau, max(5.0 * tau, 10.0)
    t_start = _as_float(_first(ns.t_start, _get(cfg, "integrator", "t_start"),
                               default=t_start_default), "t-start")
    t_end = _as_float(_first(ns.t_end, _get(cfg, "integrator", "t_end"),
                             default=t_end_default), "t-end")
    try:
        return IntegratorConfig(t_start=t_start, t_end=t_end, step=step)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _out_and_format(ns, cfg, default_name: str):
    out = _first(ns.out, _get(cfg, "output", "path"), default=default_name)
    fmt = _first(ns.format, _get(cfg, "output", "format"), default="csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown output format {fmt!r}")
    return out, fmt


def _resolve_zeta(ns, cfg) -> float:
    zeta = _as_float(_first(ns.zeta, _get(cfg, "zeta"), default=0.0), "zeta")
    if abs(zeta) >= 1.0:
        raise ConfigError(f"zeta must satisfy |zeta| < 1, got {zeta}")
    return zeta


def cmd_simulate(ns, cfg) -> int:
    pump, tau, params = _resolve_pump(ns, cfg)
    zeta = _resolve_zeta(ns, cfg)
    icfg = _resolve_window(ns, cfg, tau)
    out, fmt = _out_and_format(ns, cfg, "simulate.csv")
    traj = integrate(SqueezedThermalState.vacuum(), pump, zeta, icfg)
    params.update({"zeta": zeta, "t_start": icfg.t_start, "t_end": icfg.t_end,
                   "step": icfg.step})
    rows = zip(traj.t_tilde, traj.u, traj.n1, traj.n2, traj.g, traj.delta_sq)
    _write_table(out, fmt, params,
                 ("t_tilde", "u", "n1", "n2", "g", "delta_sq"), rows)
    found = find_minimum_variance(traj)
    print(f"wrote {out} ({len(traj)} samples); min delta_sq = "
          f"{found.delta_sq_min:.6g} at t_tilde = {found.t_min:.6g}")
    return EXIT_OK


def cmd_sweep(ns, cfg) -> int:
    pump, _, params = _resolve_pump(ns, cfg)
    if not isinstance(pump, RingGaussianPump):
        raise ConfigError("sweeps use the ring pump variant")
    offset_mrad = _as_float(_first(ns.offset_mrad, _get(cfg, "offset_mrad"),
                                   default=0.0), "offset-mrad")
    step = _as_float(_first(ns.step, _get(cfg, "integrator", "step"),
                            default=1e-3), "step")
    tau_min = _as_float(_first(ns.tau_min, _get(cfg, "sweep", "tau_min"),
                               default=0.5), "tau-min")
    tau_max = _as_float(_first(ns.tau_max, _get(cfg, "sweep", "tau_max"),
                               default=5.0), "tau-max")
    tau_points = int(_first(ns.tau_points, _get(cfg, "sweep", "tau_points"),
                            default=81))
    zeta_min = _as_float(_first(ns.zeta_min, _get(cfg, "sweep", "zeta_min"),
                                default=-0.8), "zeta-min")
    zeta_max = _as_float(_first(ns.zeta_max, _get(cfg, "sweep", "zeta_max"),
                                default=0.8), "zeta-max")
    zeta_points = int(_first(ns.zeta_points, _get(cfg, "sweep", "zeta_points"),
                             default=81))
    out, fmt = _out_and_format(ns, cfg, "sweep.csv")
    if tau_points < 1 or zeta_points < 1:
        raise ConfigError("grid must have at least one point per axis")
    taus = np.linspace(tau_min, tau_max, tau_points)
    zetas = np.linspace(zeta_min, zeta_max, zeta_points)
    t_start = _first(ns.t_start, _get(cfg, "integrator", "t_start"))
    t_end = _first(ns.t_end, _get(cfg, "integrator", "t_end"))
    try:
        spec = GridSpec(tau_values=tuple(taus), zeta_values=tuple(zetas),
                        g0=params["g0"], ring=pump.ring, step=step,
                        t_start=None if t_start is None else float(t_start),
                        t_end=None if t_end is None else float(t_end))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    delta_theta = offset_mrad * 1e-3
    grid = sweep_offset(spec, delta_theta)
    best = refine_global_minimum(grid)
    params.update({"offset_mrad": offset_mrad, "step": step,
                   "t_start": grid.t_start, "t_end": grid.t_end,
                   "global_min_delta_sq": best.delta_sq_min,
                   "global_min_tau": best.tau_tilde,
                   "global_min_zeta": best.zeta, "global_min_t": best.t_min})
    _write_table(out, fmt, params,
                 ("tau_tilde", "zeta", "delta_sq_min", "t_min", "n1_min", "n2_min"),
                 grid.rows())
    print(f"wrote {out} ({tau_points * zeta_points} grid points); global min "
          f"delta_sq = {best.delta_sq_min:.6g} at tau = {best.tau_tilde:.6g}, "
          f"zeta = {best.zeta:.6g}")
    return EXIT_OK


def cmd_optimize(ns, cfg) -> int:
    a_p_raw = _first(ns.ap, _get(cfg, "ring", "a_p"))
    if a_p_raw is None:
        raise ConfigError("optimize requires --ap")
    a_p = _as_float(a_p_raw, "ap")
    try:
        sigma = _resolve_sigma(_first(ns.sigma_p, _get(cfg, "ring", "sigma_p")), a_p)
        ring = RingParams(sigma_p=sigma, a_p=a_p)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    g0 = _as_float(_first(ns.g0, _get(cfg, "pump", "g0"), default=4.0), "g0")
    out, fmt = _out_and_format(ns, cfg, "optimize.csv")
    tau_opt = optimum_tau()
    _, g_max = peak_strength(RingGaussianPump(g0=g0, tau_tilde=tau_opt, ring=ring))
    predicted = predicted_min_variance(g0, ring)
    taus = np.linspace(0.8, 4.0, 33)
    curve = g0_curve([g0], a_p, use_optimum_sigma=False, sigma_p=sigma,
                     tau_values=taus, step=2e-3)
    numeric = float(curve.delta_sq_min_numeric[0])
    rel_gap = abs(numeric - predicted) / numeric
    quantities = [
        ("a_p", a_p),
        ("sigma_p", sigma),
        ("sigma_p_optimal", optimum_sigma(a_p)),
        ("g0", g0),
        ("tau_opt", tau_opt),
        ("peak_strength_coefficient", peak_strength_coefficient()),
        ("g_max", g_max),
        ("predicted_min_delta_sq", predicted),
        ("numeric_min_delta_sq", numeric),
        ("numeric_tau_at_min", float(curve.tau_at_min[0])),
        ("numeric_t_min", float(curve.t_min[0])),
        ("relative_gap", rel_gap),
    ]
    _write_table(out, fmt, {"command": "optimize"}, ("quantity", "value"),
                 [(k, v) for k, v in quantities] if fmt == "json" else quantities)
    print(f"wrote {out}; predicted {predicted:.6g} vs numeric {numeric:.6g} "
          f"({100 * rel_gap:.2f}% apart)")
    return EXIT_OK


def cmd_validate(ns, cfg) -> int:
    g0 = _as_float(_first(ns.g0, _get(cfg, "pump", "g0"), default=0.5), "g0")
    if not (0.0 < g0 <= 1.0):
        raise ConfigError("validate requires 0 < g0 <= 1 (truncation budget)")
    zeta = _resolve_zeta(ns, cfg)
    n_max = int(_first(ns.nmax, _get(cfg, "oracle", "n_max"), default=14))
    oracle_step = _as_float(_first(ns.oracle_step, _get(cfg, "oracle", "step"),
                                   default=5e-3), "oracle-step")
    a_p = _as_float(_first(ns.ap, _get(cfg, "ring", "a_p"), default=0.99), "ap")
    sigma = _resolve_sigma(_first(ns.sigma_p, _get(cfg, "ring", "sigma_p")), a_p)
    tau = _resolve_tau(_first(ns.tau, _get(cfg, "pump", "tau")))
    n_samples = int(_first(ns.samples, _get(cfg, "oracle", "samples"), default=21))
    out, fmt = _out_and_format(ns, cfg, "validate.csv")
    t_start = _as_float(_first(ns.t_start, _get(cfg, "integrator", "t_start"),
                               default=-5.0 * tau), "t-start")
    t_end = _as_float(_first(ns.t_end, _get(cfg, "integrator", "t_end"),
                             default=5.0 * tau), "t-end")
    pump = RingGaussianPump(g0=g0, tau_tilde=tau,
                            ring=RingParams(sigma_p=sigma, a_p=a_p))
    run = oracle_evolve(pump, zeta, n_max, t_start, t_end, oracle_step,
                        n_samples=n_samples)
    # analytic trajectory on a grid that contains the oracle sample times
    fine = oracle_step / 5.0
    traj = integrate(SqueezedThermalState.vacuum(), pump, zeta,
                     IntegratorConfig(t_start=t_start, t_end=t_end, step=fine))
    rows = []
    worst = 0.0
    for t, mom in zip(run.t_tilde, run.moments):
        i = int(round((t - t_start) / fine))
        c2 = math.cosh(traj.u[i]) ** 2
        s2 = math.sinh(traj.u[i]) ** 2
        a_n1 = traj.n1[i] * c2 + (traj.n2[i] + 1.0) * s2
        a_n2 = traj.n2[i] * c2 + (traj.n1[i] + 1.0) * s2
        a_d = traj.delta_sq[i]
        worst = max(worst, abs(mom.mean_n1 - a_n1), abs(mom.mean_n2 - a_n2),
                    abs(mom.delta_sq - a_d))
        rows.append((t, a_n1, mom.mean_n1, a_n2, mom.mean_n2, a_d, mom.delta_sq))
    params = {"g0": g0, "zeta": zeta, "n_max": n_max, "tau_tilde": tau,
              "a_p": a_p, "sigma_p": sigma, "oracle_step": oracle_step,
              "t_start": t_start, "t_end": t_end,
              "max_abs_deviation": worst,
              "max_trace_error": run.max_trace_error,
              "max_shell_population": run.max_shell_population}
    _write_table(out, fmt, params,
                 ("t_tilde", "mean_n1_analytic", "mean_n1_oracle",
                  "mean_n2_analytic", "mean_n2_oracle", "delta_sq_analytic",
                  "delta_sq_oracle"), rows)
    print(f"wrote {out}; max |analytic - oracle| = {worst:.3e} "
          f"(tolerance {VALIDATE_TOLERANCE:g})")
    return EXIT_OK if worst <= VALIDATE_TOLERANCE else EXIT_DEVIATION


def cmd_decay(ns, cfg) -> int:
    n1_0 = _as_float(_first(ns.n1, _get(cfg, "decay", "n1"), default=2.0), "n1")
    n2_0 = _as_float(_first(ns.n2, _get(cfg, "decay", "n2"), default=2.0), "n2")
    if n1_0 < 0.0 or n2_0 < 0.0:
        raise ConfigError("initial occupations must be >= 0")
    zeta = _resolve_zeta(ns, cfg)
    step = _as_float(_first(ns.step, _get(cfg, "integrator", "step"),
                            default=1e-3), "step")
    t_end = _as_float(_first(ns.t_end, _get(cfg, "integrator", "t_end"),
                             default=5.0), "t-end")
    out, fmt = _out_and_format(ns, cfg, "decay.csv")
    try:
        icfg = IntegratorConfig(t_start=0.0, t_end=t_end, step=step)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    params_dimless = CavityParams(gamma1=1.0 + zeta, gamma2=1.0 - zeta)
    initial = SqueezedThermalState(u=0.0, phi=0.0, n1=n1_0, n2=n2_0)
    traj = integrate(initial, ConstantPump(g=0.0), zeta, icfg)
    rows = []
    worst = 0.0
    for i, t in enumerate(traj.t_tilde):
        c1, c2 = thermal_decay(n1_0, n2_0, params_dimless, float(t))
        worst = max(worst, abs(c1 - traj.n1[i]), abs(c2 - traj.n2[i]))
        rows.append((t, c1, c2, traj.n1[i], traj.n2[i]))
    params = {"n1_0": n1_0, "n2_0": n2_0, "zeta": zeta, "step": step,
              "t_end": t_end, "max_abs_ode_error": worst}
    _write_table(out, fmt, params,
                 ("t_tilde", "n1_closed", "n2_closed", "n1_ode", "n2_ode"), rows)
    print(f"wrote {out}; max |closed form - ODE| = {worst:.3e}")
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML configuration file; flags override it")
    p.add_argument("--g0", type=float, help="dimensionless pump amplitude")
    p.add_argument("--tau", help="pulse duration in 1/Gamma_plus units, or 'optimal'")
    p.add_argument("--zeta", type=float, help="loss asymmetry (Gamma1-Gamma2)/(Gamma1+Gamma2)")
    p.add_argument("--ap", type=float, help="ring round-trip amplitude attenuation")
    p.add_argument("--sigma-p", dest="sigma_p",
                   help="ring self-coupling, or 'optimal'")
    p.add_argument("--step", type=float, help="integrator step in dimensionless time")
    p.add_argument("--t-start", dest="t_start", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", help="output file path")


def _add_physical(p: argparse.ArgumentParser) -> None:
    p.add_argument("--chi2-pm-v", dest="chi2_pm_v", type=float,
                   help="effective chi(2) in pm/V")
    p.add_argument("--e0-mv-cm", dest="e0_mv_cm", type=float,
                   help="pump amplitude in MV/cm")
    p.add_argument("--lambda-p-nm", dest="lambda_p_nm", type=float,
                   help="pump wavelength in nm")
    p.add_argument("--radius-um", dest="radius_um", type=float,
                   help="ring radius in um")
    p.add_argument("--n-eff", dest="n_eff", type=float, help="effective index")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvcavity",
        description="Two-mode squeezed-thermal-state dynamics in lossy cavities")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one trajectory and tabulate it")
    _add_common(p)
    _add_physical(p)
    p.add_argument("--pump", choices=("ring", "gaussian", "constant"))
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("sweep", help="minimum-variance landscape over (tau, zeta)")
    _add_common(p)
    _add_physical(p)
    p.add_argument("--pump", choices=("ring",))
    p.add_argument("--offset-mrad", dest="offset_mrad", type=float,
                   help="homodyne angle offset in mrad")
    p.add_argument("--tau-min", dest="tau_min", type=float)
    p.add_argument("--tau-max", dest="tau_max", type=float)
    p.add_argument("--tau-points", dest="tau_points", type=int)
    p.add_argument("--zeta-min", dest="zeta_min", type=float)
    p.add_argument("--zeta-max", dest="zeta_max", type=float)
    p.add_argument("--zeta-points", dest="zeta_points", type=int)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("optimize", help="optimum pulse/coupling report for a ring")
    _add_common(p)
    p.set_defaults(handler=cmd_optimize)

    p = sub.add_parser("validate", help="compare the closed form against the Fock oracle")
    _add_common(p)
    p.add_argument("--nmax", type=int, help="per-mode photon-number cutoff")
    p.add_argument("--oracle-step", dest="oracle_step", type=float)
    p.add_argument("--samples", type=int, help="number of comparison samples")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("decay", help="pump-off thermal decay against the closed form")
    _add_common(p)
    p.add_argument("--n1", type=float, help="initial occupation of mode 1")
    p.add_argument("--n2", type=float, help="initial occupation of mode 2")
    p.set_defaults(handler=cmd_decay)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = _load_config(ns.config)
        return ns.handler(ns, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FockTruncationError as exc:
        print(f"oracle truncation error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except IntegrationError as exc:
        print(f"integration error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
