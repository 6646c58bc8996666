"""Optical response and group delay of a two-rotating-mirror cavity.

A driven optical cavity couples to the orbital angular momentum of two
rotating mirrors. The package solves the classical mean-value dynamics:
steady state (single-branch at fixed effective detuning, or all branches of
the self-consistent cubic), the closed-form probe sidebands with an
independent linear-solve cross-check, transparency-dip structure of the
output quadratures, and the probe group delay with slow/fast classification,
validated against direct time-domain integration.
"""

__version__ = "0.1.0"

from .delay import (DelayMap, DelayResult, delay_map, group_delay,
                    tau_g_analytic, unwrap_phase)
from .errors import (BlowUp, ConfigError, DegenerateDenominator,
                     IllConditionedFit, NearZeroTransmission, NumericalError,
                     OmitlabError, RootRefinementError, SingularSystem,
                     StepFailure, StepTooLarge)
from .model import (C_LIGHT, HBAR, DerivedConstants, EffectiveParams,
                    FixedEffective, PhysicalConfig, SelfConsistent,
                    config_fingerprint, config_from_dict, config_from_json,
                    config_to_dict, config_to_json, default_config,
                    derive_constants, effective_params)
from .oracle import (DemodulationReport, OdeSeries, OracleReport, demodulate,
                     integrate, oracle_check)
from .response import (ProbeResponse, SidebandAmplitudes, eps_out_zero,
                       lambda_j, probe_response, sideband_amplitudes,
                       sideband_linear_solve)
from .steadystate import (SteadyState, solve_steady, steady_state_fixed,
                          steady_state_self_consistent)
from .sweep import (DipReport, Map2D, SpectrumSeries, default_delta_grid,
                    delay_map_csv, find_dips, map_csv, spectrum_csv,
                    spectrum_sweep, sweep_2d)

__all__ = [
    "__version__",
    "BlowUp", "ConfigError", "DegenerateDenominator", "IllConditionedFit",
    "NearZeroTransmission", "NumericalError", "OmitlabError",
    "RootRefinementError", "SingularSystem", "StepFailure", "StepTooLarge",
    "C_LIGHT", "HBAR", "DerivedConstants", "EffectiveParams",
    "FixedEffective", "PhysicalConfig", "SelfConsistent",
    "config_fingerprint", "config_from_dict", "config_from_json",
    "config_to_dict", "config_to_json", "default_config", "derive_constants",
    "effective_params",
    "SteadyState", "solve_steady", "steady_state_fixed",
    "steady_state_self_consistent",
    "ProbeResponse", "SidebandAmplitudes", "eps_out_zero", "lambda_j",
    "probe_response", "sideband_amplitudes", "sideband_linear_solve",
    "DelayMap", "DelayResult", "delay_map", "group_delay", "tau_g_analytic",
    "unwrap_phase",
    "DemodulationReport", "OdeSeries", "OracleReport", "demodulate",
    "integrate", "oracle_check",
    "DipReport", "Map2D", "SpectrumSeries", "default_delta_grid",
    "delay_map_csv", "find_dips", "map_csv", "spectrum_csv", "spectrum_sweep",
    "sweep_2d",
]
