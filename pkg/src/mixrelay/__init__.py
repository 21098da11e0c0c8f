"""Mixed-resolution amplify-and-forward relay array laboratory.

Closed-form achievable-rate engine for a half-duplex multipair relay whose
antenna front end splits between high- and low-resolution converters, plus
a Monte Carlo verification simulator, a geometric-programming power
allocator, and a front-end energy-efficiency model.
"""

from .aqnm import QuantizedSignal, quantize_rx, quantize_tx
from .alloc import (AllocationResult, CgpModel, NonMonotoneError, allocate,
                    build_cgp, trace_to_csv, uniform_allocation)
from .channel import (ChannelRealization, LargeScaleProfile, complex_normal,
                      draw_channel, drop_users, large_scale_gain,
                      profile_to_csv)
from .config import (INFINITE_BITS, QuantizerParams, SystemConfig,
                     distortion_factor, prelog, quantizer_params)
from .energy import (DEFAULT_HIGH_RES_BITS, PowerBreakdown, PowerModel,
                     energy_efficiency, p_adc, p_dac, power_breakdown,
                     total_power)
from .gp import (GeometricProgram, GpError, GpInfeasibleError, GpSolution,
                 Posynomial, monomial, solve_gp)
from .mcsim import (McEstimate, McLinkSample, McRateResult, estimate_tx_power,
                    collect_trials, records_to_csv, simulate_link,
                    simulated_rate)
from .rate import (CompactCoefficients, RateBreakdown, RateComponents,
                   approx_rate, compact_coefficients, compact_rate,
                   exact_rate, gamma_norm, gap_factor_low_er,
                   gap_factor_low_es, mu_per_antenna, scaling_limit,
                   sinr_from_powers)

__version__ = "0.1.0"

__all__ = [
    "AllocationResult", "CgpModel", "ChannelRealization",
    "CompactCoefficients", "DEFAULT_HIGH_RES_BITS", "GeometricProgram",
    "GpError", "GpInfeasibleError", "GpSolution", "INFINITE_BITS",
    "LargeScaleProfile", "McEstimate", "McLinkSample", "McRateResult",
    "NonMonotoneError", "Posynomial", "PowerBreakdown", "PowerModel",
    "QuantizedSignal", "QuantizerParams", "RateBreakdown", "RateComponents",
    "SystemConfig", "allocate", "approx_rate", "build_cgp",
    "collect_trials", "compact_coefficients", "compact_rate",
    "complex_normal", "distortion_factor", "draw_channel", "drop_users",
    "energy_efficiency", "estimate_tx_power", "exact_rate", "gamma_norm",
    "gap_factor_low_er", "gap_factor_low_es", "large_scale_gain",
    "monomial", "mu_per_antenna", "p_adc", "p_dac", "power_breakdown",
    "prelog", "profile_to_csv", "quantize_rx", "quantize_tx",
    "quantizer_params", "records_to_csv", "scaling_limit", "simulate_link",
    "simulated_rate", "sinr_from_powers", "total_power", "trace_to_csv",
    "uniform_allocation",
]
