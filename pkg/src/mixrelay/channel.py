"""User geometry, large-scale fading, and small-scale channel draws.

Users are dropped uniformly in a hexagonal cell (circumradius
``cell_radius``) with a guard disc of radius ``r_min`` around the relay.
Each user pair gets one log-normal shadowing draw shared by its two hops;
source-side and destination-side positions are drawn independently.

Small-scale fading is i.i.d. circularly-symmetric complex Gaussian per
antenna, with per-column variance equal to the large-scale gain.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import SystemConfig

_SHADOW_STD_DB = 8.0


def large_scale_gain(r: np.ndarray | float, z: np.ndarray | float,
                     r_min: float = 100.0, pathloss_exp: float = 3.8):
    """Distance-based gain ``z * (r / r_min) ** -pathloss_exp``."""
    return z * (np.asarray(r, dtype=float) / r_min) ** (-pathloss_exp)


@dataclass(frozen=True)
class LargeScaleProfile:
    """Per-pair large-scale gains for both hops plus the generating geometry."""

    beta_sr: np.ndarray      # (K,) source -> relay gains
    beta_rd: np.ndarray      # (K,) relay -> destination gains
    r_sr: np.ndarray         # (K,) source distances, metres
    r_rd: np.ndarray         # (K,) destination distances, metres
    z: np.ndarray            # (K,) shadowing factors, linear
    r_min: float = 100.0
    cell_radius: float = 1000.0
    pathloss_exp: float = 3.8

    def __post_init__(self) -> None:
        for name in ("beta_sr", "beta_rd", "r_sr", "r_rd", "z"):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            object.__setattr__(self, name, arr)
        k = self.beta_sr.shape[0]
        for name in ("beta_rd", "r_sr", "r_rd", "z"):
            if getattr(self, name).shape != (k,):
                raise ValueError(f"{name} must have shape ({k},)")
        if np.any(self.beta_sr <= 0.0) or np.any(self.beta_rd <= 0.0):
            raise ValueError("large-scale gains must be positive")

    @property
    def K(self) -> int:
        return self.beta_sr.shape[0]

    @classmethod
    def from_gains(cls, beta_sr, beta_rd, r_min: float = 100.0,
                   pathloss_exp: float = 3.8) -> "LargeScaleProfile":
        """Synthesize a profile directly from gain vectors (for tests/demos).

        Shadowing is set to one and distances back-computed from the gains,
        so the stored fields stay mutually consistent.
        """
        beta_sr = np.atleast_1d(np.asarray(beta_sr, dtype=float))
        beta_rd = np.atleast_1d(np.asarray(beta_rd, dtype=float))
        if np.any(beta_sr <= 0.0) or np.any(beta_rd <= 0.0):
            raise ValueError("large-scale gains must be positive")
        r_sr = r_min * beta_sr ** (-1.0 / pathloss_exp)
        r_rd = r_min * beta_rd ** (-1.0 / pathloss_exp)
        return cls(beta_sr=beta_sr, beta_rd=beta_rd, r_sr=r_sr, r_rd=r_rd,
                   z=np.ones_like(beta_sr), r_min=r_min, pathloss_exp=pathloss_exp)


def _sample_hex_distances(rng: np.random.Generator, n: int, cell_radius: float,
                          r_min: float, max_tries: int = 10**6) -> np.ndarray:
    """Distances of n points uniform over the hexagon minus the guard disc.

    Rejection sampling from the circumscribed circle.  A point (x, y) lies in
    the flat-edge-top hexagon of circumradius R iff |y| <= a and
    a |x| + (R/2) |y| <= a R, with apothem a = R sqrt(3) / 2.
    """
    apothem = cell_radius * math.sqrt(3.0) / 2.0
    out = np.empty(n)
    filled = 0
    tries = 0
    while filled < n:
        if tries >= max_tries:
            raise RuntimeError(
                f"hexagon sampling failed to place {n} users within {max_tries} draws"
            )
        batch = max(64, 2 * (n - filled))
        tries += batch
        r = cell_radius * np.sqrt(rng.random(batch))
        theta = 2.0 * math.pi * rng.random(batch)
        x = np.abs(r * np.cos(theta))
        y = np.abs(r * np.sin(theta))
        ok = (y <= apothem) & (apothem * x + 0.5 * cell_radius * y <= apothem * cell_radius)
        ok &= r >= r_min
        take = min(int(ok.sum()), n - filled)
        out[filled:filled + take] = r[ok][:take]
        filled += take
    return out


def drop_users(seed: int | np.random.SeedSequence, k: int, *,
               r_min: float = 100.0, cell_radius: float = 1000.0,
               pathloss_exp: float = 3.8, shadow_std_db: float = _SHADOW_STD_DB,
               max_tries: int = 10**6) -> LargeScaleProfile:
    """Drop ``k`` user pairs and return their large-scale profile.

    One shadowing draw per pair is shared by both hops; the source and
    destination positions are independent.  Deterministic per seed.
    """
    if k < 1:
        raise ValueError(f"need at least one user pair, got {k}")
    if not 0.0 < r_min < cell_radius:
        raise ValueError("need 0 < r_min < cell_radius")
    rng = np.random.default_rng(seed)
    r_sr = _sample_hex_distances(rng, k, cell_radius, r_min, max_tries)
    r_rd = _sample_hex_distances(rng, k, cell_radius, r_min, max_tries)
    z = 10.0 ** (shadow_std_db * rng.standard_normal(k) / 10.0)
    return LargeScaleProfile(
        beta_sr=large_scale_gain(r_sr, z, r_min, pathloss_exp),
        beta_rd=large_scale_gain(r_rd, z, r_min, pathloss_exp),
        r_sr=r_sr, r_rd=r_rd, z=z,
        r_min=r_min, cell_radius=cell_radius, pathloss_exp=pathloss_exp,
    )


@dataclass(frozen=True)
class ChannelRealization:
    """One (or a batch of) small-scale fading draw(s).

    ``g_sr`` and ``g_rd`` have shape ``(..., M, K)``; leading axes index
    Monte Carlo trials.  Rows ``[:M0]`` belong to the high-resolution
    converter bank, rows ``[M0:]`` to the low-resolution bank.
    """

    g_sr: np.ndarray
    g_rd: np.ndarray
    m0: int

    def __post_init__(self) -> None:
        if self.g_sr.shape != self.g_rd.shape:
            raise ValueError("both hops must share the same array shape")
        if not 0 <= self.m0 <= self.g_sr.shape[-2]:
            raise ValueError("m0 out of range")

    @property
    def m(self) -> int:
        return self.g_sr.shape[-2]

    @property
    def k(self) -> int:
        return self.g_sr.shape[-1]

    @property
    def g_sr0(self) -> np.ndarray:
        return self.g_sr[..., : self.m0, :]

    @property
    def g_sr1(self) -> np.ndarray:
        return self.g_sr[..., self.m0:, :]

    @property
    def g_rd0(self) -> np.ndarray:
        return self.g_rd[..., : self.m0, :]

    @property
    def g_rd1(self) -> np.ndarray:
        return self.g_rd[..., self.m0:, :]


def complex_normal(rng: np.random.Generator, shape, var=1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian draws with the given variance."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return np.sqrt(np.asarray(var) / 2.0) * (re + 1j * im)


def draw_channel(seed: int | np.random.Generator, profile: LargeScaleProfile,
                 cfg: SystemConfig, trials: int | None = None) -> ChannelRealization:
    """Draw the two-hop fading; per-column variance is the large-scale gain.

    ``trials`` adds a leading batch axis.  Accepts a seed or an existing
    generator (the latter draws from the caller's stream).
    """
    if profile.K != cfg.K:
        raise ValueError(f"profile has K={profile.K} but config has K={cfg.K}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    shape = (cfg.M, cfg.K) if trials is None else (trials, cfg.M, cfg.K)
    g_sr = complex_normal(rng, shape, profile.beta_sr)
    g_rd = complex_normal(rng, shape, profile.beta_rd)
    return ChannelRealization(g_sr=g_sr, g_rd=g_rd, m0=cfg.M0)


def profile_to_csv(profile: LargeScaleProfile, path: str | Path) -> None:
    """Write the per-pair geometry and gains for experiment logging."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "r_sr", "r_rd", "z", "beta_sr", "beta_rd"])
        for i in range(profile.K):
            writer.writerow([
                i,
                f"{profile.r_sr[i]:.9g}",
                f"{profile.r_rd[i]:.9g}",
                f"{profile.z[i]:.9g}",
                f"{profile.beta_sr[i]:.9g}",
                f"{profile.beta_rd[i]:.9g}",
            ])
