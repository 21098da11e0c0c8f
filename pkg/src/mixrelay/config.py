"""System configuration and quantizer parameters.

All powers are linear-scale throughout the library (the noise variance at
every receiver is normalized to one, so powers double as SNRs).  Decibel
conversion happens only at the CLI boundary.

``bits`` is the resolution of the low-resolution converter bank.  The value
``INFINITE_BITS`` (``math.inf``) selects the unquantized model, in which the
distortion factor is zero and the quantizer collapses to the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

INFINITE_BITS = math.inf

# Distortion factor of an optimal non-uniform scalar quantizer for a Gaussian
# input, resolutions 1-5 bits.  Above 5 bits the standard high-resolution
# approximation (pi * sqrt(3) / 2) * 2**(-2 b) is used instead.
_DISTORTION_TABLE = {
    1: 0.3634,
    2: 0.1175,
    3: 0.03454,
    4: 0.009497,
    5: 0.002499,
}


def distortion_factor(bits: float) -> float:
    """Quantizer distortion factor (inverse signal-to-distortion ratio).

    Parameters
    ----------
    bits : int or math.inf
        Converter resolution.  Must be a positive integer or infinity.

    Returns
    -------
    float
        Distortion factor in ``[0, 1)``; zero for infinite resolution.
    """
    if math.isinf(bits) and bits > 0:
        return 0.0
    if not math.isfinite(bits) or bits != int(bits) or bits < 1:
        raise ValueError(f"converter resolution must be a positive integer or inf, got {bits!r}")
    b = int(bits)
    if b in _DISTORTION_TABLE:
        return _DISTORTION_TABLE[b]
    return (math.pi * math.sqrt(3.0) / 2.0) * 2.0 ** (-2 * b)


@dataclass(frozen=True)
class QuantizerParams:
    """Additive-noise-model parameters of one converter bank."""

    rho: float      # distortion factor
    alpha_q: float  # linear gain, 1 - rho
    c_flag: int     # AGC present? 0 for one-bit converters, else 1


def quantizer_params(bits: float) -> QuantizerParams:
    """Build :class:`QuantizerParams` for a converter resolution."""
    rho = distortion_factor(bits)
    c_flag = 0 if bits == 1 else 1
    return QuantizerParams(rho=rho, alpha_q=1.0 - rho, c_flag=c_flag)


@dataclass(frozen=True)
class SystemConfig:
    """Static parameters of one relay link configuration.

    Attributes
    ----------
    M : int
        Relay antenna pairs (one receive + one transmit antenna each).
    M0 : int
        Antenna pairs wired to high-resolution (ideal) converters.  The
        remaining ``M1 = M - M0`` pairs use ``bits``-bit converters.
    K : int
        Communicating user pairs.
    bits : float
        Low-resolution ADC bits; ``INFINITE_BITS`` for the unquantized model.
    p_s : numpy.ndarray
        Per-source transmit powers, shape ``(K,)``, linear scale.
    p_r : float
        Relay transmit power budget, linear scale.
    tau_c, tau_p : int
        Coherence interval and pilot length in symbols.  Training overhead
        enters only through the rate prefactor.
    e_s, e_r : float
        Fixed energy budgets used by power-scaling runs (``p = E / M``).
        Zero when unused.
    bits_dac : float or None
        DAC bits; ``None`` means "same as the ADC".  The closed forms assume
        equal resolutions and refuse to run when they differ; the sample-level
        simulator honors a distinct value.
    bandwidth_hz : float
        Transmission bandwidth, used by throughput/energy figures.
    """

    M: int
    M0: int
    K: int
    bits: float
    p_s: np.ndarray
    p_r: float
    tau_c: int
    tau_p: int
    e_s: float = 0.0
    e_r: float = 0.0
    bits_dac: float | None = None
    bandwidth_hz: float = 20e6

    def __post_init__(self) -> None:
        if self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")
        if not 0 <= self.M0 <= self.M:
            raise ValueError(f"M0 must lie in [0, M], got M0={self.M0}, M={self.M}")
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        distortion_factor(self.bits)  # validates the resolution
        if self.bits_dac is not None:
            distortion_factor(self.bits_dac)
        p_s = np.atleast_1d(np.asarray(self.p_s, dtype=float))
        if p_s.size == 1 and self.K > 1:
            p_s = np.full(self.K, float(p_s[0]))
        if p_s.shape != (self.K,):
            raise ValueError(f"p_s must have shape ({self.K},), got {p_s.shape}")
        if np.any(p_s < 0.0) or self.p_r < 0.0:
            raise ValueError("powers must be non-negative")
        object.__setattr__(self, "p_s", p_s)
        if not self.tau_c > 2 * self.tau_p >= 0:
            raise ValueError(
                f"need tau_c > 2 tau_p >= 0, got tau_c={self.tau_c}, tau_p={self.tau_p}"
            )
        if self.e_s < 0.0 or self.e_r < 0.0:
            raise ValueError("energy budgets must be non-negative")
        if self.bandwidth_hz <= 0.0:
            raise ValueError("bandwidth must be positive")

    # ------------------------------------------------------------------
    # derived quantities

    @property
    def M1(self) -> int:
        """Antenna pairs on low-resolution converters."""
        return self.M - self.M0

    @property
    def kappa(self) -> float:
        """High-resolution fraction ``M0 / M``."""
        return self.M0 / self.M

    @property
    def rho(self) -> float:
        """ADC distortion factor."""
        return distortion_factor(self.bits)

    @property
    def alpha_q(self) -> float:
        """ADC linear gain ``1 - rho``.

        Named with the ``_q`` suffix to keep it clearly apart from the
        path-loss exponent, which lives on the large-scale profile.
        """
        return 1.0 - self.rho

    @property
    def adc(self) -> QuantizerParams:
        return quantizer_params(self.bits)

    @property
    def dac(self) -> QuantizerParams:
        return quantizer_params(self.bits if self.bits_dac is None else self.bits_dac)

    @property
    def shared_resolution(self) -> bool:
        """True when ADC and DAC resolutions agree (closed forms require it)."""
        return self.bits_dac is None or self.bits_dac == self.bits

    # ------------------------------------------------------------------
    # construction helpers

    @classmethod
    def from_kappa(
        cls,
        M: int,
        kappa: float,
        K: int,
        bits: float,
        p_s: np.ndarray | float,
        p_r: float,
        tau_c: int | None = None,
        tau_p: int | None = None,
        **kwargs,
    ) -> "SystemConfig":
        """Build a config from the high-resolution fraction ``kappa``.

        ``M0 = round(kappa * M)`` with ties rounded up; ``kappa`` is then
        recomputed as ``M0 / M`` so the stored value is always consistent.
        Defaults ``tau_c = 20 K`` and ``tau_p = K`` when omitted.
        """
        if not 0.0 <= kappa <= 1.0:
            raise ValueError(f"kappa must lie in [0, 1], got {kappa}")
        m0 = int(math.floor(kappa * M + 0.5))  # round half up
        if tau_c is None:
            tau_c = 20 * K
        if tau_p is None:
            tau_p = K
        return cls(M=M, M0=m0, K=K, bits=bits, p_s=np.asarray(p_s, dtype=float),
                   p_r=p_r, tau_c=tau_c, tau_p=tau_p, **kwargs)


def prelog(cfg: SystemConfig) -> float:
    """Rate prefactor: half duplex plus training overhead.

    ``(tau_c - 2 tau_p) / (2 tau_c)``, in ``(0, 1/2]``.
    """
    return (cfg.tau_c - 2 * cfg.tau_p) / (2.0 * cfg.tau_c)
