"""Command-line entry point.

Subcommands: spectrum, steady, dips, delay, delay-map, map2d, oracle,
defaults. Outputs are CSV tables (schemas in sweep/delay), a JSON run
manifest alongside every file output, and optional self-contained SVG plots.

Exit codes: 0 success, 1 configuration/usage error, 2 numerical failure.

Unit conventions at this boundary: powers in W except the delay-map power
grid (mW, matching its CSV column); lengths in m; kappa in rad/s (config
files may use {"value", "unit"} wrappers, including Hz); detuning-like flags
(--delta, --delta-prime, --delta0) in units of omega_m.
"""

import argparse
import json
import os
import sys
import time
from dataclasses import replace as dc_replace

import numpy as np

from . import __version__
from .delay import delay_map, group_delay
from .errors import ConfigError, NumericalError
from .model import (FixedEffective, SelfConsistent, config_fingerprint,
                    config_from_json, config_to_dict, config_to_json,
                    default_config, derive_constants, effective_params)
from .oracle import oracle_check
from .steadystate import solve_steady, steady_state_self_consistent
from .svgplot import heatmap_svg, line_svg
from .sweep import (delay_map_csv, find_dips, map_csv, spectrum_csv,
                    spectrum_sweep, sweep_2d)
from .util import atomic_write, resolve_threads

_KAPPA_NOTE = ("kappa default 2*pi*15e6 rad/s; the reference parameter list "
               "also quotes 15*pi*1e6 Hz, which contradicts its own "
               "kappa/omega_m = 0.187, so the ratio fixes the convention.")


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(p):
    p.add_argument("--config", help="JSON config file (defaults to the reference point)")
    p.add_argument("--out", help="output file path")
    p.add_argument("--svg", action="store_true", help="also write an SVG plot")
    p.add_argument("--seed", type=int, default=42, help="seed recorded in the manifest")
    p.add_argument("--threads", type=int, default=None,
                   help="parallelism degree (or OMITLAB_THREADS; default: cores)")
    p.add_argument("--branch", type=int, default=0,
                   help="steady-state branch in self-consistent mode")
    for name, help_ in (
            ("--P", "coupling power [W]"),
            ("--P-p", "probe power [W]"),
            ("--cav-len", "cavity length [m]"),
            ("--kappa", "cavity decay rate [rad/s]"),
            ("--Q1", "quality factor of mirror 1"),
            ("--Q2", "quality factor of mirror 2"),
            ("--omega-phi1", "mirror 1 frequency [rad/s]"),
            ("--omega-phi2", "mirror 2 frequency [rad/s]")):
        p.add_argument(name, type=float, default=None, help=help_ + " (overrides config)")
    p.add_argument("--L", type=int, default=None,
                   help="orbital angular momentum number (overrides config)")
    p.add_argument("--delta-prime", type=float, default=None,
                   help="fixed effective detuning [units of omega_m] (overrides config)")
    p.add_argument("--delta0", type=float, default=None,
                   help="bare detuning [units of omega_m], self-consistent mode")


def _resolve_config(args):
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = config_from_json(fh.read())
        except OSError as e:
            raise ConfigError(f"cannot read config {args.config!r}: {e}")
    else:
        cfg = default_config()
    over = {}
    for flag, field in (("P", "P"), ("P_p", "P_p"), ("L", "L"),
                        ("cav_len", "cav_len"), ("kappa", "kappa"),
                        ("Q1", "Q1"), ("Q2", "Q2"),
                        ("omega_phi1", "omega_phi1"),
                        ("omega_phi2", "omega_phi2")):
        v = getattr(args, flag)
        if v is not None:
            over[field] = v
    if over:
        cfg = dc_replace(cfg, **over)
    if args.delta_prime is not None and args.delta0 is not None:
        raise ConfigError("--delta-prime and --delta0 are mutually exclusive")
    if args.delta_prime is not None:
        cfg = dc_replace(cfg, detuning_mode=FixedEffective(args.delta_prime * cfg.omega_m))
    if args.delta0 is not None:
        cfg = dc_replace(cfg, detuning_mode=SelfConsistent(args.delta0 * cfg.omega_m))
    return cfg


def _write_manifest(anchor, subcommand, cfg, outputs, t0, args, stats=None):
    manifest = {
        "subcommand": subcommand,
        "tool_version": __version__,
        "config": config_to_dict(cfg),
        "config_fingerprint": config_fingerprint(cfg),
        "outputs": [os.path.basename(p) for p in outputs],
        "duration_s": time.time() - t0,
        "seed": args.seed,
        "threads": resolve_threads(args.threads),
        "stats": stats or {},
    }
    path = f"{os.path.splitext(anchor)[0]}.manifest.json"
    atomic_write(path, json.dumps(manifest, indent=2) + "\n")
    return path


def _svg_path(out):
    return f"{os.path.splitext(out)[0]}.svg"


def _cmd_defaults(args):
    text = config_to_json(default_config(), notes=_KAPPA_NOTE)
    if args.out:
        t0 = time.time()
        atomic_write(args.out, text)
        _write_manifest(args.out, "defaults", default_config(), [args.out], t0, args)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_steady(args):
    t0 = time.time()
    cfg = _resolve_config(args)
    dc = derive_constants(cfg)
    mode = cfg.detuning_mode
    if mode.mode == "fixed_effective":
        states = [solve_steady(cfg, dc=dc)]
    else:
        states = steady_state_self_consistent(cfg, dc, mode.value)
    lines = [f"{'branch':>6} {'n':>22} {'Re_a0':>22} {'Im_a0':>22} "
             f"{'delta_prime/omega_m':>20} {'residual':>12}"]
    for s in states:
        resid = abs(s.a0 * (cfg.kappa + 1j * s.delta_prime) - dc.eps_c)
        lines.append(f"{s.branch_index:>6d} {s.n:>22.15e} {s.a0.real:>22.15e} "
                     f"{s.a0.imag:>22.15e} {s.delta_prime / cfg.omega_m:>20.15f} "
                     f"{resid:>12.3e}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        atomic_write(args.out, text)
        _write_manifest(args.out, "steady", cfg, [args.out], t0, args,
                        stats={"n_branches": len(states)})
    return 0


def _spectrum_series(args, cfg):
    if args.delta_min >= args.delta_max:
        raise ConfigError("--delta-min must be below --delta-max")
    if args.points < 2:
        raise ConfigError("--points must be at least 2")
    grid = np.linspace(args.delta_min * cfg.omega_m,
                       args.delta_max * cfg.omega_m, args.points)
    return spectrum_sweep(cfg, grid, branch=args.branch)


def _cmd_spectrum(args):
    t0 = time.time()
    cfg = _resolve_config(args)
    series = _spectrum_series(args, cfg)
    out = args.out or "spectrum.csv"
    atomic_write(out, spectrum_csv(series))
    outputs = [out]
    if args.svg:
        sv = _svg_path(out)
        xs = series.delta_grid / series.omega_m
        atomic_write(sv, line_svg(
            xs, [("nu_p", series.nu_p), ("u_p", series.u_p)],
            title="probe response", xlabel="Delta / omega_m", ylabel="quadrature"))
        outputs.append(sv)
    _write_manifest(out, "spectrum", cfg, outputs, t0, args,
                    stats={"n_points": int(series.delta_grid.size)})
    return 0


def _cmd_dips(args):
    t0 = time.time()
    cfg = _resolve_config(args)
    series = _spectrum_series(args, cfg)
    rep = find_dips(series)
    om = series.omega_m
    sys.stdout.write(f"dips: {rep.count}\n")
    for k in range(rep.count):
        sys.stdout.write(
            f"  at Delta/omega_m = {rep.positions[k] / om:.9f}  "
            f"nu_p = {rep.depths[k]:.6e}  width/omega_m = {rep.widths[k] / om:.6e}\n")
    if args.out:
        payload = {
            "count": rep.count,
            "positions_over_omega_m": [p / om for p in rep.positions],
            "depths": list(map(float, rep.depths)),
            "widths_over_omega_m": [w / om for w in rep.widths],
        }
        atomic_write(args.out, json.dumps(payload, indent=2) + "\n")
        _write_manifest(args.out, "dips", cfg, [args.out], t0, args,
                        stats={"count": rep.count})
    return 0


def _cmd_delay(args):
    t0 = time.time()
    cfg = _resolve_config(args)
    ss = solve_steady(cfg, branch=args.branch)
    ep = effective_params(cfg, ss)
    h = args.fd_step * cfg.omega_m if args.fd_step is not None else None
    res = group_delay(ep, ss.a0, args.delta * cfg.omega_m,
                      method=args.method, h=h)
    sys.stdout.write(
        f"tau_g = {res.tau_g * 1e6:.9g} us  [{res.classification}]  "
        f"method={res.method}  |t_p|={res.t_p_magnitude:.6e}\n")
    if args.out:
        payload = {"delta_over_omega_m": args.delta,
                   "tau_g_us": res.tau_g * 1e6,
                   "classification": res.classification,
                   "method": res.method,
                   "t_p_magnitude": res.t_p_magnitude}
        atomic_write(args.out, json.dumps(payload, indent=2) + "\n")
        _write_manifest(args.out, "delay", cfg, [args.out], t0, args)
    return 0


def _cmd_delay_map(args):
    t0 = time.time()
    cfg = _resolve_config(args)
    for name, n in (("--p-points", args.p_points), ("--l-points", args.l_points)):
        if n < 1:
            raise ConfigError(f"{name} must be >= 1")
    P_grid = np.linspace(args.p_start, args.p_stop, args.p_points) * 1e-3
    L_grid = np.linspace(args.l_start, args.l_stop, args.l_points)
    dm = delay_map(cfg, P_grid, L_grid, args.delta * cfg.omega_m,
                   method=args.method, threads=args.threads)
    out = args.out or "delay_map.csv"
    atomic_write(out, delay_map_csv(dm))
    outputs = [out]
    tau_us = dm.tau_g * 1e6
    finite = tau_us[np.isfinite(tau_us)]
    stats = {
        "max_abs_tau_g_us": float(np.max(np.abs(finite))) if finite.size else None,
        "min_tau_g_us": float(finite.min()) if finite.size else None,
        "max_tau_g_us": float(finite.max()) if finite.size else None,
        "n_slow": int(sum(c is not None and c.classification == "slow"
                          for r in dm.cells for c in r)),
        "n_fast": int(sum(c is not None and c.classification == "fast"
                          for r in dm.cells for c in r)),
        "n_error": int(sum(f != "" for r in dm.flags for f in r)),
    }
    if args.svg:
        sv = _svg_path(out)
        atomic_write(sv, heatmap_svg(
            dm.L_grid, dm.P_grid * 1e3, tau_us,
            title="group delay [us]", xlabel="L", ylabel="P [mW]"))
        outputs.append(sv)
    _write_manifest(out, "delay-map", cfg, outputs, t0, args, stats=stats)
    return 0


def _parse_axis_grid(spec_str, name):
    parts = spec_str.split(":")
    if len(parts) != 3:
        raise ConfigError(f"{name} must be start:stop:points, got {spec_str!r}")
    try:
        start, stop, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"{name} must be start:stop:points, got {spec_str!r}")
    if n < 1:
        raise ConfigError(f"{name}: points must be >= 1")
    return np.linspace(start, stop, n)


def _cmd_map2d(args):
    t0 = time.time()
    cfg = _resolve_config(args)
    disp1 = _parse_axis_grid(args.grid1, "--grid1")
    disp2 = _parse_axis_grid(args.grid2, "--grid2")
    g1 = disp1 * cfg.omega_m if args.axis1 == "Delta" else disp1
    g2 = disp2 * cfg.omega_m if args.axis2 == "Delta" else disp2
    delta = args.delta * cfg.omega_m if args.delta is not None else None
    m = sweep_2d(cfg, (args.axis1, g1), (args.axis2, g2),
                 observable=args.observable, delta=delta,
                 branch=args.branch, threads=args.threads)
    m = dc_replace(m, axis1_grid=disp1, axis2_grid=disp2)
    out = args.out or "map2d.csv"
    atomic_write(out, map_csv(m))
    outputs = [out]
    if args.svg:
        sv = _svg_path(out)
        atomic_write(sv, heatmap_svg(
            disp2, disp1, m.values,
            title=f"{args.observable} map",
            xlabel=args.axis2, ylabel=args.axis1))
        outputs.append(sv)
    _write_manifest(out, "map2d", cfg, outputs, t0, args,
                    stats={"observable": args.observable})
    return 0


def _cmd_oracle(args):
    t0 = time.time()
    cfg = _resolve_config(args)
    rep = oracle_check(cfg, args.delta * cfg.omega_m,
                       q_override=args.relax_q, tol=args.tol)
    rows = (("a0", rep.a0_rel_err, 1e-6),
            ("a_plus", rep.a_plus_rel_err, 1e-3),
            ("a_minus", rep.a_minus_rel_err, 1e-2),
            ("linearity", rep.linearity_rel_change, 1e-3))
    sys.stdout.write(f"{'quantity':<12} {'rel_error':>12} {'threshold':>12}\n")
    for name, err, thr in rows:
        sys.stdout.write(f"{name:<12} {err:>12.3e} {thr:>12.0e}\n")
    sys.stdout.write(f"fit residual {rep.fit_residual:.3e}\n")
    sys.stdout.write(f"pass: {str(rep.passed).lower()}\n")
    sys.stdout.write(json.dumps(rep.as_dict()) + "\n")
    if args.out:
        atomic_write(args.out, json.dumps(rep.as_dict(), indent=2) + "\n")
        _write_manifest(args.out, "oracle", cfg, [args.out], t0, args,
                        stats={"pass": rep.passed})
    return 0


def build_parser():
    p = _Parser(prog="omitlab",
                description="Double transparency windows and fast/slow light "
                            "of a rotational-mirror cavity")
    p.add_argument("--version", action="version", version=f"omitlab {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser("defaults", help="print the reference config as JSON")
    _add_common(sp)
    sp.set_defaults(func=_cmd_defaults)

    sp = sub.add_parser("steady", help="steady-state branch table")
    _add_common(sp)
    sp.set_defaults(func=_cmd_steady)

    for name, func, help_ in (("spectrum", _cmd_spectrum, "response spectrum CSV"),
                              ("dips", _cmd_dips, "transparency dip report")):
        sp = sub.add_parser(name, help=help_)
        _add_common(sp)
        sp.add_argument("--delta-min", type=float, default=0.5,
                        help="grid start [units of omega_m]")
        sp.add_argument("--delta-max", type=float, default=1.5,
                        help="grid stop [units of omega_m]")
        sp.add_argument("--points", type=int, default=4001, help="grid size")
        sp.set_defaults(func=func)

    sp = sub.add_parser("delay", help="group delay at one detuning")
    _add_common(sp)
    sp.add_argument("--delta", type=float, required=True,
                    help="detuning [units of omega_m]")
    sp.add_argument("--method", choices=("analytic", "fd"), default="analytic")
    sp.add_argument("--fd-step", type=float, default=None,
                    help="finite-difference step [units of omega_m]")
    sp.set_defaults(func=_cmd_delay)

    sp = sub.add_parser("delay-map", help="group delay over a (P, L) grid")
    _add_common(sp)
    sp.add_argument("--p-start", type=float, default=0.000125, help="P grid start [mW]")
    sp.add_argument("--p-stop", type=float, default=0.005, help="P grid stop [mW]")
    sp.add_argument("--p-points", type=int, default=40)
    sp.add_argument("--l-start", type=float, default=0.0, help="L grid start")
    sp.add_argument("--l-stop", type=float, default=200.0, help="L grid stop")
    sp.add_argument("--l-points", type=int, default=40)
    sp.add_argument("--delta", type=float, default=1.1,
                    help="detuning [units of omega_m]")
    sp.add_argument("--method", choices=("analytic", "fd"), default="analytic")
    sp.set_defaults(func=_cmd_delay_map)

    sp = sub.add_parser("map2d", help="observable over two parameter axes")
    _add_common(sp)
    sp.add_argument("--axis1", required=True,
                    choices=("P", "L", "kappa", "Q1", "Q2", "Delta"))
    sp.add_argument("--grid1", required=True, help="start:stop:points "
                    "(Delta in units of omega_m, others SI)")
    sp.add_argument("--axis2", required=True,
                    choices=("P", "L", "kappa", "Q1", "Q2", "Delta"))
    sp.add_argument("--grid2", required=True, help="start:stop:points")
    sp.add_argument("--observable", choices=("nu_p", "tau_g"), default="nu_p")
    sp.add_argument("--delta", type=float, default=None,
                    help="fixed detuning [units of omega_m] when no Delta axis")
    sp.set_defaults(func=_cmd_map2d)

    sp = sub.add_parser("oracle", help="time-domain vs closed-form check")
    _add_common(sp)
    sp.add_argument("--delta", type=float, default=1.0,
                    help="detuning [units of omega_m]")
    sp.add_argument("--relax-q", type=float, default=50.0,
                    help="quality factor override for the integration")
    sp.add_argument("--tol", type=float, default=1e-10,
                    help="integrator relative tolerance")
    sp.set_defaults(func=_cmd_oracle)

    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        sys.stderr.write(f"omitlab: error: {e}\n")
        return 1
    except NumericalError as e:
        sys.stderr.write(f"omitlab: numerical error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
