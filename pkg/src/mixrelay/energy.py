"""Circuit power model and energy efficiency of the relay architecture.

Absolute milliwatt numbers here are survey-style reference values; every
conclusion the package draws from them is a ratio or an ordering, never an
absolute Joule figure.  All values are stored in SI units (watts).

Converter power laws:

* DAC:  ``0.5 * V_dd * I_0 * (2**b - 1) + b * C_p * (2 B + f_cor) * V_dd**2``
  (static current-steering term plus dynamic switching term);
* ADC:  ``3 V_dd**2 L_min (2 B + f_cor) / 10**(-0.1525 b + 4.838)``
  (figure-of-merit fit; one extra bit costs a fixed factor
  ``10**0.1525 ~ 1.42``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import LargeScaleProfile
from .config import SystemConfig, quantizer_params
from . import rate

DEFAULT_HIGH_RES_BITS = 12


@dataclass(frozen=True)
class PowerModel:
    """Per-block circuit powers (watts) and converter technology constants."""

    p_mix: float = 30.3e-3    # mixer
    p_filt: float = 2.5e-3    # transmit-side filter
    p_filr: float = 2.5e-3    # receive-side filter
    p_syn: float = 50.0e-3    # frequency synthesizer (one per hop direction)
    p_lna: float = 20.0e-3    # low-noise amplifier
    p_ifa: float = 3.0e-3     # intermediate-frequency amplifier
    p_agc: float = 2.0e-3     # automatic gain control
    v_dd: float = 3.0         # converter supply voltage, V
    i_0: float = 10e-6        # unit current source, A
    c_p: float = 1e-12        # parasitic switching capacitance, F
    l_min: float = 0.5e-6     # minimum CMOS channel length, m
    f_cor: float = 1e6        # 1/f corner frequency, Hz
    bandwidth_hz: float = 20e6

    def __post_init__(self) -> None:
        for name in ("p_mix", "p_filt", "p_filr", "p_syn", "p_lna", "p_ifa",
                     "p_agc", "v_dd", "i_0", "c_p", "l_min", "f_cor",
                     "bandwidth_hz"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")


def _check_bits(bits: float) -> int:
    if not (np.isfinite(bits) and bits == int(bits) and bits >= 1):
        raise ValueError(f"converter power needs a finite resolution >= 1, got {bits!r}")
    return int(bits)


def p_dac(bits: float, model: PowerModel = PowerModel()) -> float:
    """Digital-to-analog converter power, watts."""
    b = _check_bits(bits)
    static = 0.5 * model.v_dd * model.i_0 * (2.0 ** b - 1.0)
    dynamic = b * model.c_p * (2.0 * model.bandwidth_hz + model.f_cor) * model.v_dd ** 2
    return static + dynamic


def p_adc(bits: float, model: PowerModel = PowerModel()) -> float:
    """Analog-to-digital converter power, watts."""
    b = _check_bits(bits)
    return (3.0 * model.v_dd ** 2 * model.l_min
            * (2.0 * model.bandwidth_hz + model.f_cor)
            / 10.0 ** (-0.1525 * b + 4.838))


@dataclass(frozen=True)
class PowerBreakdown:
    """Relay power by component group; ``total`` is their exact sum."""

    rf_chain: float      # mixers, filters, amplifiers on all antennas
    synthesizers: float
    agc: float
    adc: float
    dac: float

    @property
    def total(self) -> float:
        return self.rf_chain + self.synthesizers + self.agc + self.adc + self.dac


def power_breakdown(cfg: SystemConfig, model: PowerModel = PowerModel(),
                    bits_low: float | None = None,
                    bits_high: float = DEFAULT_HIGH_RES_BITS) -> PowerBreakdown:
    """Total relay circuit power split into auditable groups.

    ``bits_low`` defaults to the config's converter resolution; an
    unquantized config maps to ``bits_high`` (ideal converters still burn
    the power of the best hardware modeled).  The AGC of a low-resolution
    chain is counted only above one-bit resolution.
    """
    if bits_low is None:
        bits_low = cfg.bits
    if math.isinf(bits_low):
        bits_low = bits_high
    b_lo = _check_bits(bits_low)
    b_hi = _check_bits(bits_high)
    m, m0, m1 = cfg.M, cfg.M0, cfg.M1
    c_flag = quantizer_params(b_lo).c_flag

    rf_chain = m * (model.p_mix + model.p_filt) \
        + m * (model.p_lna + model.p_mix + model.p_ifa + model.p_filr)
    synthesizers = 2.0 * model.p_syn
    # AGC shows up with each converter bank: receive side and transmit side
    agc = (m0 * model.p_agc + m1 * c_flag * model.p_agc) * 2.0
    adc = m0 * p_adc(b_hi, model) + m1 * p_adc(b_lo, model)
    dac = m0 * p_dac(b_hi, model) + m1 * p_dac(b_lo, model)
    return PowerBreakdown(rf_chain=rf_chain, synthesizers=synthesizers,
                          agc=agc, adc=adc, dac=dac)


def total_power(cfg: SystemConfig, model: PowerModel = PowerModel(),
                bits_low: float | None = None,
                bits_high: float = DEFAULT_HIGH_RES_BITS) -> float:
    """Total relay circuit power, watts."""
    return power_breakdown(cfg, model, bits_low, bits_high).total


def energy_efficiency(profile: LargeScaleProfile, cfg: SystemConfig,
                      model: PowerModel = PowerModel(),
                      bits_high: float = DEFAULT_HIGH_RES_BITS) -> float:
    """Throughput per watt: ``sum_rate * bandwidth / total_power``, bit/J.

    The rate is the exact closed form; the bandwidth is the config's
    transmission bandwidth.
    """
    r = rate.exact_rate(profile, cfg).sum_rate
    return r * cfg.bandwidth_hz / total_power(cfg, model, bits_high=bits_high)
