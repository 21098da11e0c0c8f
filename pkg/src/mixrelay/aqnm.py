"""Additive-noise quantizer model for the relay's converter banks.

A quantizer of finite resolution is replaced by a linear gain ``alpha_q``
plus uncorrelated Gaussian noise whose variance is ``alpha_q * rho`` times
the per-antenna input power.  High-resolution antennas (the first ``M0``
rows) pass through untouched.

On the receive side the per-antenna input power is taken in expectation
over data and noise conditioned on the channel; on the transmit side it is
the instantaneous ``|x|**2`` of the precoded sample being converted, which
reproduces the analytical long-run noise power in expectation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, complex_normal
from .config import SystemConfig


@dataclass(frozen=True)
class QuantizedSignal:
    """Result of one converter-bank pass.

    ``signal`` is the full stacked output (high-resolution rows first),
    ``noise`` and ``noise_var`` cover only the low-resolution rows.
    """

    signal: np.ndarray
    noise: np.ndarray
    noise_var: np.ndarray


def _as_rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def quantize_rx(y_r: np.ndarray, channel: ChannelRealization, cfg: SystemConfig,
                rng) -> QuantizedSignal:
    """Apply the ADC bank to relay receive samples ``y_r`` of shape (..., M).

    The noise variance on low-resolution antenna ``m`` is
    ``alpha * rho * (sum_k p_k |g_sr1[m, k]|**2 + 1)``: the average receive
    power at that antenna given the channel draw.
    """
    q = cfg.adc
    y0 = y_r[..., : cfg.M0]
    y1 = y_r[..., cfg.M0:]
    var = q.alpha_q * q.rho * (
        np.sum(cfg.p_s * np.abs(channel.g_sr1) ** 2, axis=-1) + 1.0
    )
    if q.rho == 0.0 or cfg.M1 == 0:
        noise = np.zeros_like(y1)
        var = np.zeros(y1.shape, dtype=float)
    else:
        noise = complex_normal(_as_rng(rng), y1.shape, var)
    out = np.concatenate([y0, q.alpha_q * y1 + noise], axis=-1)
    return QuantizedSignal(signal=out, noise=noise, noise_var=var)


def quantize_tx(x_r: np.ndarray, cfg: SystemConfig, rng) -> QuantizedSignal:
    """Apply the DAC bank to precoded relay samples ``x_r`` of shape (..., M).

    Noise variance follows the instantaneous sample power
    ``alpha * rho * |x|**2`` on each low-resolution antenna.
    """
    q = cfg.dac
    x0 = x_r[..., : cfg.M0]
    x1 = x_r[..., cfg.M0:]
    var = q.alpha_q * q.rho * np.abs(x1) ** 2
    if q.rho == 0.0 or cfg.M1 == 0:
        noise = np.zeros_like(x1)
        var = np.zeros(x1.shape, dtype=float)
    else:
        noise = complex_normal(_as_rng(rng), x1.shape, var)
    out = np.concatenate([x0, q.alpha_q * x1 + noise], axis=-1)
    return QuantizedSignal(signal=out, noise=noise, noise_var=var)
