from dataclasses import replace

import pytest

from omitlab import default_config, derive_constants, effective_params, solve_steady


@pytest.fixture(scope="session")
def cfg():
    return default_config()


@pytest.fixture(scope="session")
def dc(cfg):
    return derive_constants(cfg)


@pytest.fixture(scope="session")
def ss(cfg):
    return solve_steady(cfg)


@pytest.fixture(scope="session")
def ep(cfg, ss):
    return effective_params(cfg, ss)


@pytest.fixture(scope="session")
def degenerate_cfg():
    """Both mirrors at omega_m: the two transparency windows merge."""
    c = default_config()
    return replace(c, omega_phi1=c.omega_m, omega_phi2=c.omega_m)


@pytest.fixture(scope="session")
def undriven_cfg():
    """P = 0: bare-cavity limit, G1 = G2 = 0."""
    return replace(default_config(), P=0.0)
