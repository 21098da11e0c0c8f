"""Closed-form spectral efficiency of the mixed-resolution relay link.

Two independent evaluation routes are provided for the exact ergodic rate:

* :func:`exact_rate` sums the seven effective-noise components of the
  statistical-decoder signal model (desired-gain uncertainty, inter-pair
  interference, thermal noise on both converter banks, ADC and DAC
  quantization noise, destination noise);
* :func:`compact_rate` evaluates the same quantity through per-pair
  coefficient tables that expose how the SINR depends on the transmit
  powers (the form consumed by the power allocator).

Both routes must agree to high precision; the test suite enforces 1e-9.
A large-array approximation drops the vanishing parts of the quantization
noise, and :func:`scaling_limit` gives the non-vanishing rate when transmit
powers are cut as ``1/M``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import LargeScaleProfile
from .config import SystemConfig, prelog


def _require_shared_resolution(cfg: SystemConfig) -> None:
    if not cfg.shared_resolution:
        raise ValueError(
            "closed forms assume equal ADC and DAC resolutions; "
            f"got bits={cfg.bits}, bits_dac={cfg.bits_dac}"
        )


def _first_hop_sums(profile: LargeScaleProfile, cfg: SystemConfig):
    """Shared large-scale sums: receive power, cross gain, weighted cross gain."""
    bsr, brd, p = profile.beta_sr, profile.beta_rd, cfg.p_s
    rx_sum = float(np.sum(p * bsr))               # total received source power / antenna
    gain_sum = float(np.sum(bsr * brd))           # sum of two-hop gain products
    wgt_sum = float(np.sum(p * bsr ** 2 * brd))   # power-weighted first-hop-squared sum
    return rx_sum, gain_sum, wgt_sum


def mu_per_antenna(profile: LargeScaleProfile, cfg: SystemConfig) -> float:
    """Average transmit power per effective antenna before normalization.

    Composed of four pieces: the high-resolution bank's own power, two
    identical cross terms between the banks, and the low-resolution bank's
    power including its quantization-noise inflation.
    """
    _require_shared_resolution(cfg)
    bsr, brd, p = profile.beta_sr, profile.beta_rd, cfg.p_s
    a, r = cfg.alpha_q, cfg.rho
    m0, m1 = float(cfg.M0), float(cfg.M1)
    rx_sum, _, wgt_sum = _first_hop_sums(profile, cfg)
    q1 = m0 * float(np.sum(bsr * brd * (rx_sum + m0 * p * bsr + 1.0)))
    q2 = a * m0 * m1 * wgt_sum          # equal cross terms, counted twice below
    q4 = a * m1 * float(np.sum(bsr * brd * (rx_sum + (a * m1 + r) * p * bsr + 1.0)))
    mu = q1 + 2.0 * q2 + q4
    if not mu > 0.0:
        raise ValueError("degenerate link: per-antenna transmit power is zero")
    return mu


def gamma_norm(profile: LargeScaleProfile, cfg: SystemConfig) -> float:
    """Amplification factor meeting the relay power budget in expectation."""
    _require_shared_resolution(cfg)
    g_sig = cfg.M0 + cfg.alpha_q * cfg.M1
    return float(np.sqrt(cfg.p_r / (mu_per_antenna(profile, cfg) * g_sig)))


@dataclass(frozen=True)
class RateComponents:
    """Per-pair effective-noise decomposition (all shape ``(K,)``)."""

    desired: np.ndarray        # coherent desired-signal power
    est_error: np.ndarray      # desired-gain uncertainty seen by the decoder
    interference: np.ndarray   # inter-pair interference
    noise_hi: np.ndarray       # thermal noise through the high-res bank
    noise_lo: np.ndarray       # thermal noise through the low-res bank
    qn_adc: np.ndarray         # receive-side quantization noise
    qn_dac: np.ndarray         # transmit-side quantization noise

    def as_dict(self) -> dict[str, np.ndarray]:
        return {
            "desired": self.desired,
            "est_error": self.est_error,
            "interference": self.interference,
            "noise_hi": self.noise_hi,
            "noise_lo": self.noise_lo,
            "qn_adc": self.qn_adc,
            "qn_dac": self.qn_dac,
        }

    def sinr(self) -> np.ndarray:
        denom = (self.est_error + self.interference + self.noise_hi
                 + self.noise_lo + self.qn_adc + self.qn_dac + 1.0)
        return self.desired / denom


@dataclass(frozen=True)
class RateBreakdown:
    """Full result of one closed-form rate evaluation."""

    mu: float
    gamma: float
    sinr: np.ndarray
    rates: np.ndarray
    sum_rate: float
    components: RateComponents | None = None
    approximate: bool = False


def _finish(profile, cfg, mu, gamma, sinr, components=None, approximate=False):
    pl = prelog(cfg)
    rates = pl * np.log2(1.0 + sinr)
    return RateBreakdown(mu=mu, gamma=gamma, sinr=sinr, rates=rates,
                         sum_rate=float(np.sum(rates)), components=components,
                         approximate=approximate)


def _components(profile: LargeScaleProfile, cfg: SystemConfig,
                approximate: bool) -> tuple[float, float, RateComponents]:
    bsr, brd, p = profile.beta_sr, profile.beta_rd, cfg.p_s
    a, r = cfg.alpha_q, cfg.rho
    m0, m1 = float(cfg.M0), float(cfg.M1)
    g_sig = m0 + a * m1            # coherent combining gain of the mixed banks
    g_noise = m0 + a * a * m1      # incoherent (power) combining gain
    rx_sum, gain_sum, wgt_sum = _first_hop_sums(profile, cfg)
    mu = mu_per_antenna(profile, cfg)
    g2 = cfg.p_r / (mu * g_sig)    # gamma squared
    gamma = float(np.sqrt(g2))

    bb = bsr * brd
    desired = p * g2 * g_sig ** 4 * bb ** 2
    est_error = p * g2 * g_noise * bb * (2.0 * g_sig ** 2 * bb + g_noise * gain_sum)

    # interference: all-pairs sum minus the own-pair term
    inner = (g_sig ** 2 * (np.outer(bsr * brd ** 2, bsr) + np.outer(brd, bsr ** 2 * brd))
             + g_noise * np.outer(brd, bsr) * gain_sum)
    weighted = inner * p[None, :]
    interference = g2 * g_noise * (np.sum(weighted, axis=1) - np.diag(weighted))

    common = g_sig ** 2 * bsr * brd ** 2 + g_noise * brd * gain_sum
    noise_hi = g2 * m0 * common
    noise_lo = g2 * a * a * m1 * common

    if approximate:
        qn_adc = g2 * a * r * (rx_sum + 1.0) * m1 * brd * (
            g_sig ** 2 * bb + g_noise * gain_sum
        )
        qn_dac = g2 * a * r * mu * m1 * brd
    else:
        adc_sum = float(np.sum(bsr * brd * (rx_sum + p * bsr + 1.0)))
        qn_adc = a * r * g2 * m1 * brd * (
            g_noise * adc_sum + g_sig ** 2 * bb * (rx_sum + p * bsr + 1.0)
        )
        dac_sum = float(np.sum(bsr * brd * (rx_sum + 1.0 + g_sig * p * bsr)))
        qn_dac = (a * r * g2 * m1 * g_sig * brd * (
            bb * (rx_sum + 1.0 + g_sig * p * bsr) + dac_sum
        ) + (a * r * m1) ** 2 * g2 * brd * (wgt_sum + p * bsr ** 2 * brd))

    comps = RateComponents(desired=desired, est_error=est_error,
                           interference=interference, noise_hi=noise_hi,
                           noise_lo=noise_lo, qn_adc=qn_adc, qn_dac=qn_dac)
    return mu, gamma, comps


def exact_rate(profile: LargeScaleProfile, cfg: SystemConfig) -> RateBreakdown:
    """Exact ergodic rate from the seven-component decomposition."""
    _require_shared_resolution(cfg)
    mu, gamma, comps = _components(profile, cfg, approximate=False)
    return _finish(profile, cfg, mu, gamma, comps.sinr(), comps)


def approx_rate(profile: LargeScaleProfile, cfg: SystemConfig) -> RateBreakdown:
    """Large-array approximation: quantization-noise terms keep only their
    channel-averaged parts.  Coincides with :func:`exact_rate` when the
    distortion factor is zero."""
    _require_shared_resolution(cfg)
    mu, gamma, comps = _components(profile, cfg, approximate=True)
    return _finish(profile, cfg, mu, gamma, comps.sinr(), comps, approximate=True)


# ----------------------------------------------------------------------
# compact coefficient form


@dataclass(frozen=True)
class CompactCoefficients:
    """SINR written as ``p_k / xi_k`` with
    ``xi_k = sum_i p_i a[k,i] + (sum_i p_i b[k,i] + c[k]) / p_r + d[k]``.

    Only large-scale gains, the antenna split, and the quantizer parameters
    enter the tables; powers stay symbolic, which is what the geometric
    program builder needs.
    """

    a: np.ndarray  # (K, K)
    b: np.ndarray  # (K, K)
    c: np.ndarray  # (K,)
    d: np.ndarray  # (K,)
    approximate: bool = False


def compact_coefficients(profile: LargeScaleProfile, cfg: SystemConfig,
                         approximate: bool = False) -> CompactCoefficients:
    """Coefficient tables of the power-explicit SINR form.

    Transcribed independently from the component form; the two routes are
    cross-checked by the test suite.
    """
    _require_shared_resolution(cfg)
    bsr, brd = profile.beta_sr, profile.beta_rd
    a_q, r = cfg.alpha_q, cfg.rho
    m0, m1 = float(cfg.M0), float(cfg.M1)
    gs = m0 + a_q * m1
    _, gain_sum, _ = _first_hop_sums(profile, cfg)
    bb = bsr * brd

    lo = a_q * r * m1                   # low-res distortion mass
    ratio_sr = bsr[None, :] / bsr[:, None]          # bsr_i / bsr_k
    ratio_bb = bb[None, :] / bb[:, None]            # (bsr_i brd_i) / (bsr_k brd_k)
    w_term = gain_sum / (gs * bb)                   # (K,) indexed by k

    if approximate:
        a_tab = (ratio_sr / gs) * (
            1.0 + ratio_bb * (1.0 + (a_q * r * m1) ** 2 / gs ** 3) + w_term[:, None]
        )
        d_tab = 1.0 / (gs * bsr) + gain_sum / (gs ** 2 * bsr ** 2 * brd)
    else:
        off = (ratio_sr / gs) * (
            1.0 + lo / gs ** 2
            + ratio_bb * (1.0 + lo / gs ** 2)
            + w_term[:, None]
        )
        diag = (1.0 / gs) * (
            2.0 + (lo / gs) * (2.0 + 2.0 / gs + lo / gs ** 2) + w_term
        )
        a_tab = off.copy()
        np.fill_diagonal(a_tab, diag)
        d_tab = (1.0 / gs + lo / gs ** 3) / bsr + gain_sum / (gs ** 2 * bsr ** 2 * brd)

    b_tab = (
        (bsr[None, :] ** 2 * brd[None, :]) * (1.0 + lo / gs ** 2)
        / (gs * (bsr ** 2 * brd ** 2)[:, None])
        + bsr[None, :] * gain_sum / (gs ** 2 * (bsr ** 2 * brd ** 2)[:, None])
    )
    c_tab = gain_sum / (gs ** 2 * bsr ** 2 * brd ** 2)
    return CompactCoefficients(a=a_tab, b=b_tab, c=c_tab, d=d_tab,
                               approximate=approximate)


def sinr_from_powers(coeffs: CompactCoefficients, p_s: np.ndarray,
                     p_r: float) -> np.ndarray:
    """Evaluate the compact SINR at explicit powers."""
    p_s = np.asarray(p_s, dtype=float)
    xi = (coeffs.a @ p_s + (coeffs.b @ p_s + coeffs.c) / p_r + coeffs.d)
    return p_s / xi


def compact_rate(profile: LargeScaleProfile, cfg: SystemConfig,
                 approximate: bool = False) -> RateBreakdown:
    """Rate via the coefficient route; must match the component route."""
    coeffs = compact_coefficients(profile, cfg, approximate=approximate)
    sinr = sinr_from_powers(coeffs, cfg.p_s, cfg.p_r)
    mu = mu_per_antenna(profile, cfg)
    gamma = gamma_norm(profile, cfg)
    return _finish(profile, cfg, mu, gamma, sinr, components=None,
                   approximate=approximate)


# ----------------------------------------------------------------------
# power-scaling behaviour


def _scaling_quality(cfg: SystemConfig) -> float:
    """Residual converter quality ``alpha + rho * kappa`` in ``(0, 1]``."""
    return cfg.alpha_q + cfg.rho * cfg.kappa


def scaling_limit(profile: LargeScaleProfile, cfg: SystemConfig) -> np.ndarray:
    """Per-pair rate limits as the array grows with powers cut as ``E / M``.

    Uses the config's ``e_s`` / ``e_r`` budgets; the antenna split enters
    only through ``alpha + rho * kappa``.
    """
    _require_shared_resolution(cfg)
    if cfg.e_s <= 0.0 or cfg.e_r <= 0.0:
        raise ValueError("scaling limit needs positive e_s and e_r budgets")
    bsr, brd = profile.beta_sr, profile.beta_rd
    q = _scaling_quality(cfg)
    es, er = cfg.e_s, cfg.e_r
    bb2 = bsr ** 2 * brd ** 2
    _, gain_sum, _ = _first_hop_sums(profile, cfg)
    cross = float(np.sum(bsr ** 2 * brd))
    sinr = (es * er * q ** 2) / (
        es * q * cross / bb2 + gain_sum / bb2 + er * q / bsr
    )
    return prelog(cfg) * np.log2(1.0 + sinr)


def gap_factor_low_es(profile: LargeScaleProfile, cfg: SystemConfig) -> np.ndarray:
    """Ratio of quantized to unquantized limit rate as ``e_s`` vanishes.

    Depends on the fixed ``e_r`` budget; equals one for ideal converters.
    """
    _require_shared_resolution(cfg)
    if cfg.e_r <= 0.0:
        raise ValueError("needs a positive e_r budget")
    bsr, brd = profile.beta_sr, profile.beta_rd
    q = _scaling_quality(cfg)
    _, gain_sum, _ = _first_hop_sums(profile, cfg)
    x = cfg.e_r * bsr * brd ** 2
    return q ** 2 * (x + gain_sum) / (q * x + gain_sum)


def gap_factor_low_er(profile: LargeScaleProfile, cfg: SystemConfig) -> np.ndarray:
    """Ratio of quantized to unquantized limit rate as ``e_r`` vanishes."""
    _require_shared_resolution(cfg)
    if cfg.e_s <= 0.0:
        raise ValueError("needs a positive e_s budget")
    bsr, brd = profile.beta_sr, profile.beta_rd
    q = _scaling_quality(cfg)
    _, gain_sum, _ = _first_hop_sums(profile, cfg)
    x = cfg.e_s * float(np.sum(bsr ** 2 * brd))
    factor = q ** 2 * (x + gain_sum) / (q * x + gain_sum)
    return np.full(profile.K, factor)
