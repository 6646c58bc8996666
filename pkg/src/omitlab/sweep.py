"""Spectra over detuning grids, transparency-dip detection and 2-D parameter
maps, plus the CSV renderings of all of them.

The default detuning grid is 4001 uniform points over [0.5, 1.5] omega_m with
automatic refinement to gamma_j/4 spacing within +-10 gamma_j of each mirror
resonance: at Q = 1.2e5 the transparency windows are gamma-narrow and a
uniform grid would step right over them.
"""

from dataclasses import dataclass, replace as dc_replace

import numpy as np
from scipy.signal import find_peaks, peak_widths

from .delay import _TP_FLOOR, tau_g_analytic, unwrap_phase
from .errors import ConfigError, NumericalError
from .model import config_fingerprint, effective_params
from .response import probe_response
from .steadystate import solve_steady
from .util import parallel_map, render_csv

_DIP_PROMINENCE = 1e-3
_AXIS_NAMES = ("P", "L", "kappa", "Q1", "Q2", "Delta")


def default_delta_grid(ep):
    """4001 uniform points over [0.5, 1.5] omega_m plus resonance refinement."""
    base = np.linspace(0.5 * ep.omega_m, 1.5 * ep.omega_m, 4001)
    return _refine_grid(base, ep)


def _refine_grid(grid, ep):
    """Insert gamma/4-spaced points within +-10 gamma of each mirror resonance
    wherever the grid is coarser than that."""
    pieces = [np.asarray(grid, dtype=float)]
    for om, gam in ((ep.omega_phi1, ep.gamma1), (ep.omega_phi2, ep.gamma2)):
        lo, hi = om - 10.0 * gam, om + 10.0 * gam
        inside = pieces[0][(pieces[0] >= lo) & (pieces[0] <= hi)]
        if inside.size < 2 or np.max(np.diff(inside)) > gam / 4.0:
            pieces.append(np.linspace(lo, hi, 81))
    out = np.unique(np.concatenate(pieces))
    return out


@dataclass(frozen=True)
class SpectrumSeries:
    """Aligned response series over a strictly increasing detuning grid."""

    delta_grid: object
    omega_m: float
    nu_p: object
    u_p: object
    phase_unwrapped: object
    tau_g: object
    flags: object
    config_fingerprint: str

    def __post_init__(self):
        n = len(self.delta_grid)
        for name in ("nu_p", "u_p", "phase_unwrapped", "tau_g", "flags"):
            if len(getattr(self, name)) != n:
                raise ConfigError(f"series {name} length mismatch")
        if np.any(np.diff(self.delta_grid) <= 0):
            raise ConfigError("delta_grid must be strictly increasing")


def spectrum_sweep(cfg, delta_grid=None, branch=0):
    """Evaluate nu_p, u_p, unwrapped phase and tau_g over a detuning grid.

    The steady state is computed once for the configuration (selected branch
    in self-consistent mode); a user grid is refined near the mirror
    resonances if it is too coarse there.
    """
    ss = solve_steady(cfg, branch=branch)
    ep = effective_params(cfg, ss)
    if delta_grid is None:
        grid = default_delta_grid(ep)
    else:
        grid = _refine_grid(np.sort(np.asarray(delta_grid, dtype=float)), ep)

    pr = probe_response(ep, grid, a0=ss.a0)
    tau = tau_g_analytic(ep, grid)
    phase = unwrap_phase(np.angle(pr.t_p))

    flags = []
    tp_small = np.abs(pr.t_p) < _TP_FLOOR
    for i in range(grid.size):
        parts = []
        if pr.degenerate[i]:
            parts.append("degenerate_denominator")
        if tp_small[i]:
            parts.append("near_zero_transmission")
        flags.append(";".join(parts))

    return SpectrumSeries(
        delta_grid=grid, omega_m=ep.omega_m,
        nu_p=np.asarray(pr.nu_p, dtype=float),
        u_p=np.asarray(pr.u_p, dtype=float),
        phase_unwrapped=phase, tau_g=tau, flags=flags,
        config_fingerprint=config_fingerprint(cfg))


@dataclass(frozen=True)
class DipReport:
    """Local minima of nu_p: refined positions, values there, and full widths
    at half depth measured between the flanking maxima."""

    positions: object
    depths: object
    widths: object
    count: int


def _parabolic_refine(x, y, i):
    """Vertex of the parabola through the three samples around index i.

    Falls back to the grid point when the fit is not a minimum or the vertex
    escapes the bracket (flat or asymmetric data).
    """
    xs, ys = x[i - 1:i + 2], y[i - 1:i + 2]
    a, b, c = np.polyfit(xs - x[i], ys, 2)
    if a <= 0:
        return x[i], y[i]
    xv = -b / (2.0 * a)
    if not (xs[0] - x[i] < xv < xs[2] - x[i]):
        return x[i], y[i]
    return x[i] + xv, c - b * b / (4.0 * a)


def find_dips(series):
    """Transparency dips of a spectrum.

    Minima are detected on -nu_p with absolute prominence 1e-3, their
    positions and depths refined with a 3-point parabola, and widths taken at
    half prominence (half depth relative to the flanking maxima), with
    fractional sample indices interpolated back onto the detuning grid so a
    non-uniform grid is handled correctly.
    """
    x = np.asarray(series.delta_grid, dtype=float)
    y = np.asarray(series.nu_p, dtype=float)
    idx, _ = find_peaks(-y, prominence=_DIP_PROMINENCE)
    if idx.size == 0:
        return DipReport(np.array([]), np.array([]), np.array([]), 0)

    positions, depths = [], []
    for i in idx:
        if 0 < i < x.size - 1:
            xv, yv = _parabolic_refine(x, y, i)
        else:
            xv, yv = x[i], y[i]
        positions.append(xv)
        depths.append(yv)

    w, _, left_ips, right_ips = peak_widths(-y, idx, rel_height=0.5)
    samples = np.arange(x.size, dtype=float)
    widths = np.interp(right_ips, samples, x) - np.interp(left_ips, samples, x)

    return DipReport(np.asarray(positions), np.asarray(depths),
                     np.asarray(widths), int(idx.size))


@dataclass(frozen=True)
class Map2D:
    """Long-format 2-D map: values[i, j] at (axis1_grid[i], axis2_grid[j])."""

    axis1_name: str
    axis1_grid: object
    axis2_name: str
    axis2_grid: object
    observable: str
    delta: object
    values: object
    flags: object
    config_fingerprint: str


def _apply_axis(cfg, name, value):
    if name == "L":
        return dc_replace(cfg, L=int(round(float(value))))
    return dc_replace(cfg, **{name: float(value)})


def sweep_2d(cfg, axis1, axis2, observable="nu_p", delta=None, branch=0,
             threads=None):
    """Observable over a 2-D parameter grid.

    axis1/axis2 are (name, grid) pairs with names among P, L, kappa, Q1, Q2,
    Delta; the Delta axis feeds the response detuning directly instead of the
    configuration. observable is "nu_p" or "tau_g", evaluated at the Delta
    axis values or at the fixed delta argument. L grids are rounded to
    integer quantum numbers. Per-cell numerical failures are flagged, not
    raised.
    """
    (n1, g1), (n2, g2) = axis1, axis2
    for n in (n1, n2):
        if n not in _AXIS_NAMES:
            raise ConfigError(f"axis name {n!r} not in {_AXIS_NAMES}")
    if n1 == n2:
        raise ConfigError("the two axes must differ")
    if observable not in ("nu_p", "tau_g"):
        raise ConfigError(f"observable must be nu_p or tau_g, got {observable!r}")
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    if g1.size == 0 or g2.size == 0:
        raise ConfigError("axis grids must be nonempty")
    if "Delta" not in (n1, n2) and delta is None:
        raise ConfigError("a fixed delta is required when no axis is Delta")

    def eval_cell(c, dlt):
        ss = solve_steady(c, branch=branch)
        ep = effective_params(c, ss)
        if observable == "nu_p":
            return float(probe_response(ep, float(dlt), a0=ss.a0).nu_p)
        return float(tau_g_analytic(ep, float(dlt)))

    def one_row(v1):
        vals = np.empty(g2.size)
        frow = []
        for j, v2 in enumerate(g2):
            try:
                c = cfg
                dlt = delta
                for name, val in ((n1, v1), (n2, v2)):
                    if name == "Delta":
                        dlt = val
                    else:
                        c = _apply_axis(c, name, val)
                vals[j] = eval_cell(c, dlt)
                frow.append("")
            except NumericalError as e:
                vals[j] = np.nan
                frow.append(type(e).__name__)
        return vals, frow

    rows = parallel_map(one_row, g1, threads=threads)
    values = np.vstack([v for v, _ in rows])
    flags = [f for _, f in rows]
    return Map2D(axis1_name=n1, axis1_grid=g1, axis2_name=n2, axis2_grid=g2,
                 observable=observable, delta=delta, values=values,
                 flags=flags, config_fingerprint=config_fingerprint(cfg))


# ---------------------------------------------------------------------------
# CSV renderings

SPECTRUM_HEADER = ("delta_over_omega_m", "nu_p", "u_p", "phase_rad",
                   "tau_g_us", "flag")
MAP_HEADER = ("axis1", "axis2", "value", "flag")
DELAY_MAP_HEADER = ("P_mW", "L", "tau_g_us", "classification", "flag")


def spectrum_csv(series):
    rows = []
    for i in range(len(series.delta_grid)):
        rows.append((
            float(series.delta_grid[i] / series.omega_m),
            float(series.nu_p[i]), float(series.u_p[i]),
            float(series.phase_unwrapped[i]),
            float(series.tau_g[i] * 1e6),
            series.flags[i]))
    return render_csv(SPECTRUM_HEADER, rows)


def map_csv(m):
    rows = []
    for i, v1 in enumerate(m.axis1_grid):
        for j, v2 in enumerate(m.axis2_grid):
            rows.append((float(v1), float(v2), float(m.values[i, j]),
                         m.flags[i][j]))
    return render_csv(MAP_HEADER, rows)


def delay_map_csv(dm):
    rows = []
    for i, P in enumerate(dm.P_grid):
        for j, Lval in enumerate(dm.L_grid):
            cell = dm.cells[i][j]
            if cell is None:
                rows.append((float(P * 1e3), int(round(float(Lval))),
                             float("nan"), "", dm.flags[i][j]))
            else:
                rows.append((float(P * 1e3), int(round(float(Lval))),
                             float(cell.tau_g * 1e6), cell.classification,
                             dm.flags[i][j]))
    return render_csv(DELAY_MAP_HEADER, rows)
