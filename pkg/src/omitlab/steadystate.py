"""Zeroth-order steady state of the driven cavity with two rotating mirrors.

Two entry points: ``steady_state_fixed`` takes the effective detuning Delta'
as given (the operating mode of all the spectra), and
``steady_state_self_consistent`` takes the bare detuning Delta_0 and solves
the back-action condition, which is cubic in the intracavity photon number
n = |a0|^2 and can have one or three real branches (optical bistability).

With chi = g1^2/omega_phi1 + g2^2/omega_phi2 the cubic reads

    n * [kappa^2 + (Delta_0 - chi*n)^2] = eps_c^2,

and every real root gives Delta' = Delta_0 - chi*n, a0 = eps_c/(kappa + i Delta').
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError, RootRefinementError
from .model import config_fingerprint, derive_constants

# Newton polish of the cubic roots: hard iteration cap and relative residual target
_POLISH_MAX_ITER = 50
_POLISH_RTOL = 1e-12


@dataclass(frozen=True)
class SteadyState:
    """One steady-state branch.

    a0 is the complex intracavity amplitude, phi10/phi20 the static angular
    displacements (phi10 <= 0 <= phi20 whenever the cavity is driven, from the
    signs of the two couplings), lz1 = lz2 = 0 always. n_branches counts the
    real solutions at this drive; branch_index identifies this one (ascending
    photon number).
    """

    a0: complex
    phi10: float
    phi20: float
    lz1: float
    lz2: float
    delta_prime: float
    n_branches: int
    branch_index: int
    config_fingerprint: str

    @property
    def n(self):
        """Intracavity photon number |a0|^2."""
        return abs(self.a0) ** 2


def _make_state(cfg, dc, delta_prime, n_branches, branch_index):
    a0 = dc.eps_c / (cfg.kappa + 1j * delta_prime)
    n = abs(a0) ** 2
    residual = abs(a0 * (cfg.kappa + 1j * delta_prime) - dc.eps_c)
    if residual > 1e-10 * max(dc.eps_c, cfg.kappa):
        raise NumericalError(
            f"steady-state residual {residual:.3e} exceeds tolerance at "
            f"delta_prime={delta_prime!r}")
    return SteadyState(
        a0=a0,
        phi10=dc.g_alpha1 * n / cfg.omega_phi1,
        phi20=dc.g_alpha2 * n / cfg.omega_phi2,
        lz1=0.0, lz2=0.0,
        delta_prime=float(delta_prime),
        n_branches=n_branches, branch_index=branch_index,
        config_fingerprint=config_fingerprint(cfg))


def steady_state_fixed(cfg, dc, delta_prime):
    """Steady state at a prescribed effective detuning."""
    if not np.isfinite(delta_prime):
        raise ConfigError(f"delta_prime must be finite, got {delta_prime!r}")
    return _make_state(cfg, dc, float(delta_prime), n_branches=1, branch_index=0)


def _cubic_residual(n, kappa, delta0, chi, eps2):
    det = delta0 - chi * n
    return n * (kappa * kappa + det * det) - eps2


def _polish_root(n, kappa, delta0, chi, eps2):
    """Newton iterations on the cubic residual, at most _POLISH_MAX_ITER."""
    target = _POLISH_RTOL * eps2
    for _ in range(_POLISH_MAX_ITER):
        det = delta0 - chi * n
        f = n * (kappa * kappa + det * det) - eps2
        if abs(f) <= target:
            return n
        fp = kappa * kappa + det * det - 2.0 * chi * n * det
        if fp == 0:
            break
        n = n - f / fp
    det = delta0 - chi * n
    if abs(n * (kappa * kappa + det * det) - eps2) <= target:
        return n
    raise RootRefinementError(
        f"root polish stalled at n={n!r} (residual target {target:.3e})")


def steady_state_self_consistent(cfg, dc, delta0):
    """All real steady-state branches at a prescribed bare detuning.

    Returns a list of SteadyState sorted by ascending photon number. Three
    branches (bistability) are surfaced with a warning; dynamical stability
    of the branches is not classified here.
    """
    if not np.isfinite(delta0):
        raise ConfigError(f"delta0 must be finite, got {delta0!r}")
    delta0 = float(delta0)
    kappa = cfg.kappa
    chi = dc.g1 ** 2 / cfg.omega_phi1 + dc.g2 ** 2 / cfg.omega_phi2
    eps2 = dc.eps_c ** 2

    if eps2 == 0.0:
        roots = [0.0]
    elif chi == 0.0:
        # cubic degenerates to a linear equation (no back-action at L = 0)
        roots = [eps2 / (kappa * kappa + delta0 * delta0)]
    else:
        coeffs = [chi * chi, -2.0 * delta0 * chi, kappa * kappa + delta0 * delta0, -eps2]
        raw = np.roots(coeffs)
        scale = eps2 / (kappa * kappa)
        real = [z.real for z in raw if abs(z.imag) <= 1e-7 * max(abs(z), scale)]
        roots = []
        for n in real:
            if n < -1e-18 * scale:
                continue
            n = max(n, 0.0)
            n = _polish_root(n, kappa, delta0, chi, eps2)
            # polish can re-converge two nearly-degenerate roots onto one another
            if all(abs(n - m) > 1e-9 * max(abs(n), abs(m), scale) for m in roots):
                roots.append(n)
        roots.sort()
        if not roots:
            raise NumericalError(
                f"no physical steady-state root found at delta0={delta0!r}")

    if len(roots) == 3:
        warnings.warn("bistable point: three steady-state branches", stacklevel=2)

    states = []
    for k, n in enumerate(roots):
        dp = delta0 - chi * n
        states.append(_make_state(cfg, dc, dp, n_branches=len(roots), branch_index=k))
    return states


def solve_steady(cfg, branch=0, dc=None):
    """Steady state dispatch on cfg.detuning_mode.

    In fixed mode there is a single branch and branch must be 0. In
    self-consistent mode branch selects among the ascending-n roots
    (default 0, the lowest branch).
    """
    if dc is None:
        dc = derive_constants(cfg)
    mode = cfg.detuning_mode
    if mode.mode == "fixed_effective":
        if branch != 0:
            raise ConfigError("fixed effective detuning has a single branch (0)")
        return steady_state_fixed(cfg, dc, mode.value)
    states = steady_state_self_consistent(cfg, dc, mode.value)
    if not 0 <= branch < len(states):
        raise ConfigError(
            f"branch {branch} out of range: {len(states)} branch(es) at this drive")
    return states[branch]
