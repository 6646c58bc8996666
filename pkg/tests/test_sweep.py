"""Detuning grids, spectra, dip detection, 2-D maps and CSV rendering."""

from dataclasses import replace

import numpy as np
import pytest

from omitlab import (ConfigError, SpectrumSeries, default_config,
                     default_delta_grid, delay_map, delay_map_csv, find_dips,
                     map_csv, probe_response, spectrum_csv, spectrum_sweep,
                     sweep_2d)
from omitlab.sweep import DELAY_MAP_HEADER, MAP_HEADER, SPECTRUM_HEADER


def test_default_grid_spans_and_refines(ep):
    grid = default_delta_grid(ep)
    assert grid[0] == 0.5 * ep.omega_m
    assert grid[-1] == 1.5 * ep.omega_m
    assert np.all(np.diff(grid) > 0)
    assert grid.size > 4001
    for om, gam in ((ep.omega_phi1, ep.gamma1), (ep.omega_phi2, ep.gamma2)):
        inside = grid[(grid >= om - 10 * gam) & (grid <= om + 10 * gam)]
        assert inside.size >= 2
        assert np.max(np.diff(inside)) <= gam / 4.0 + 1e-9 * gam


def test_spectrum_series_validation():
    g = np.array([1.0, 2.0, 3.0])
    z = np.zeros(3)
    with pytest.raises(ConfigError, match="length"):
        SpectrumSeries(g, 1.0, z[:2], z, z, z, ["", "", ""], "fp")
    with pytest.raises(ConfigError, match="increasing"):
        SpectrumSeries(g[::-1], 1.0, z, z, z, z, ["", "", ""], "fp")


def test_undriven_spectrum_is_single_lorentzian(undriven_cfg):
    series = spectrum_sweep(undriven_cfg)
    cfg = undriven_cfg
    expect = 2.0 * cfg.kappa ** 2 / (cfg.kappa ** 2 +
                                     (cfg.omega_m - series.delta_grid) ** 2)
    np.testing.assert_allclose(series.nu_p, expect, rtol=1e-12)
    i = np.argmax(series.nu_p)
    assert series.delta_grid[i] == pytest.approx(cfg.omega_m, rel=1e-3)
    assert find_dips(series).count == 0
    assert all(f == "" for f in series.flags)


def test_driven_spectrum_has_two_dips(cfg):
    series = spectrum_sweep(cfg)
    rep = find_dips(series)
    assert rep.count == 2
    # dips sit close to (not exactly at) the mirror frequencies
    assert abs(rep.positions[0] - cfg.omega_phi2) < 0.01 * cfg.omega_m
    assert abs(rep.positions[1] - cfg.omega_phi1) < 0.01 * cfg.omega_m
    assert np.all(rep.depths < 0.1)
    assert np.all(rep.widths > 0)


def test_degenerate_mirrors_give_single_dip(degenerate_cfg):
    series = spectrum_sweep(degenerate_cfg)
    rep = find_dips(series)
    assert rep.count == 1


def test_windows_widen_with_power(cfg):
    widths = []
    for P in (1e-3, 4e-3):
        series = spectrum_sweep(replace(cfg, P=P))
        rep = find_dips(series)
        assert rep.count == 2
        widths.append(rep.widths)
    assert widths[1][0] > widths[0][0]
    assert widths[1][1] > widths[0][1]


def test_user_grid_is_refined_when_coarse(cfg):
    coarse = np.linspace(0.5, 1.5, 101) * cfg.omega_m
    series = spectrum_sweep(cfg, coarse)
    assert series.delta_grid.size > 101
    assert find_dips(series).count == 2


def test_dip_refinement_is_subgrid():
    x = np.linspace(0.0, 1.0, 101)
    true_pos = 0.413
    y = 1.0 + 5.0 * (x - true_pos) ** 2
    z = np.zeros_like(x)
    series = SpectrumSeries(x, 1.0, y, z, z, z, [""] * x.size, "fp")
    rep = find_dips(series)
    assert rep.count == 1
    # parabola vertex recovered far below the 0.01 grid spacing
    assert rep.positions[0] == pytest.approx(true_pos, abs=1e-6)
    assert rep.depths[0] == pytest.approx(1.0, abs=1e-6)


def test_sweep2d_delta_axis_matches_pointwise(cfg, ep, ss):
    grid_L = np.array([0.0, 100.0])
    grid_d = np.array([0.9, 1.0, 1.1]) * cfg.omega_m
    m = sweep_2d(cfg, ("L", grid_L), ("Delta", grid_d))
    assert m.values.shape == (2, 3)
    # L = 0 row is the bare cavity
    bare = 2.0 * cfg.kappa ** 2 / (cfg.kappa ** 2 + (cfg.omega_m - grid_d) ** 2)
    np.testing.assert_allclose(m.values[0], bare, rtol=1e-12)
    # L = 100 row matches the direct response evaluation
    direct = [float(probe_response(ep, float(d), a0=ss.a0).nu_p) for d in grid_d]
    np.testing.assert_allclose(m.values[1], direct, rtol=1e-12)
    assert all(f == "" for row in m.flags for f in row)


def test_sweep2d_tau_over_power_and_kappa(cfg):
    m = sweep_2d(cfg, ("P", np.array([1e-6, 2e-3])),
                 ("kappa", np.array([0.5, 1.0, 1.5]) * cfg.kappa),
                 observable="tau_g", delta=1.1 * cfg.omega_m)
    assert m.values.shape == (2, 3)
    assert np.all(np.isfinite(m.values))


def test_sweep2d_validation(cfg):
    d = np.array([1.0]) * cfg.omega_m
    with pytest.raises(ConfigError, match="axis"):
        sweep_2d(cfg, ("volume", d), ("Delta", d))
    with pytest.raises(ConfigError, match="differ"):
        sweep_2d(cfg, ("P", np.array([1e-3])), ("P", np.array([2e-3])))
    with pytest.raises(ConfigError, match="observable"):
        sweep_2d(cfg, ("P", np.array([1e-3])), ("Delta", d), observable="phase")
    with pytest.raises(ConfigError, match="delta"):
        sweep_2d(cfg, ("P", np.array([1e-3])), ("L", np.array([10.0])))
    with pytest.raises(ConfigError, match="nonempty"):
        sweep_2d(cfg, ("P", np.array([])), ("Delta", d))


def test_sweep2d_threads_agree(cfg):
    axes = (("Q1", np.array([1e4, 1e5])), ("Delta",
            np.array([0.9, 1.1]) * cfg.omega_m))
    one = sweep_2d(cfg, *axes, threads=1)
    four = sweep_2d(cfg, *axes, threads=4)
    np.testing.assert_array_equal(one.values, four.values)


# ---------------------------------------------------------------------------
# CSV

def test_spectrum_csv_schema_and_determinism(cfg):
    series = spectrum_sweep(cfg, np.linspace(0.8, 1.2, 51) * cfg.omega_m)
    text = spectrum_csv(series)
    lines = text.splitlines()
    assert lines[0] == ",".join(SPECTRUM_HEADER)
    assert len(lines) == series.delta_grid.size + 1
    assert text.endswith("\n")
    # byte-for-byte reproducible
    again = spectrum_csv(spectrum_sweep(cfg, np.linspace(0.8, 1.2, 51) * cfg.omega_m))
    assert again == text
    first = lines[1].split(",")
    assert float(first[0]) == pytest.approx(series.delta_grid[0] / cfg.omega_m)
    assert float(first[4]) == pytest.approx(series.tau_g[0] * 1e6)
    # values round-trip exactly through the shortest-repr rendering
    assert float(first[1]) == series.nu_p[0]


def test_map_csv_long_format(cfg):
    m = sweep_2d(cfg, ("L", np.array([0.0, 50.0])),
                 ("Delta", np.array([0.9, 1.1]) * cfg.omega_m))
    text = map_csv(m)
    lines = text.splitlines()
    assert lines[0] == ",".join(MAP_HEADER)
    assert len(lines) == 1 + 2 * 2
    assert lines[1].split(",")[3] == ""


def test_delay_map_csv_schema(cfg):
    dm = delay_map(cfg, [1e-6, 2e-6], [0, 100], 1.1 * cfg.omega_m)
    text = delay_map_csv(dm)
    lines = text.splitlines()
    assert lines[0] == ",".join(DELAY_MAP_HEADER)
    assert len(lines) == 5
    cells = lines[1].split(",")
    assert cells[0] == "0.001"          # 1e-6 W rendered in mW
    assert cells[1] == "0"              # integer angular momentum
    assert cells[3] in ("slow", "fast", "neutral")
