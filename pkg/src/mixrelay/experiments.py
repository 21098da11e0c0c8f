"""Parameter-sweep runners behind the command-line experiments.

Each runner returns ``(fieldnames, rows)`` where ``rows`` is a list of
plain dicts sorted deterministically, ready for CSV serialization.  Grid
points are independent, so they are dispatched to a small thread pool;
every Monte Carlo point derives its own integer seed from the master seed
ahead of dispatch, which keeps results independent of scheduling order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import mcsim, rate
from .alloc import allocate, uniform_allocation
from .channel import LargeScaleProfile, drop_users
from .config import SystemConfig
from .energy import DEFAULT_HIGH_RES_BITS, PowerModel, energy_efficiency, total_power

_MAX_WORKERS = 4


def _dispatch(fn, args_list):
    """Evaluate ``fn`` over ``args_list``, preserving input order."""
    if len(args_list) <= 1:
        return [fn(*a) for a in args_list]
    with ThreadPoolExecutor(max_workers=min(_MAX_WORKERS, len(args_list))) as pool:
        return list(pool.map(lambda a: fn(*a), args_list))


def _point_seeds(master_seed: int, count: int) -> list[int]:
    state = np.random.SeedSequence(master_seed).generate_state(max(count, 1))
    return [int(s) for s in state[:count]]


def bits_label(bits: float) -> str:
    return "inf" if math.isinf(bits) else str(int(bits))


def _bits_sort_key(bits: float) -> float:
    return float("inf") if math.isinf(bits) else float(bits)


def run_rate_vs_m(m_list, bits_list, *, k: int = 10, kappa: float = 0.5,
                  p_s: float = 10.0, p_r: float = 10.0, trials: int = 2000,
                  seed: int = 1, profile: LargeScaleProfile | None = None):
    """Sum rate against array size: Monte Carlo, exact, and approximate.

    One user drop is shared by the whole grid so the curves differ only
    through the array size and converter resolution.
    """
    if profile is None:
        profile = drop_users(seed, k)
    grid = [(m, b) for m in sorted(m_list) for b in sorted(bits_list, key=_bits_sort_key)]
    seeds = _point_seeds(seed, len(grid))

    def point(m, bits, sub_seed):
        cfg = SystemConfig.from_kappa(M=m, kappa=kappa, K=k, bits=bits,
                                      p_s=p_s, p_r=p_r)
        mc = mcsim.simulated_rate(profile, cfg, trials=trials, seed=sub_seed)
        ex = rate.exact_rate(profile, cfg)
        ap = rate.approx_rate(profile, cfg)
        label = bits_label(bits)
        return [
            {"m": m, "bits": label, "source": "mc", "sum_rate": mc.sum_rate},
            {"m": m, "bits": label, "source": "exact", "sum_rate": ex.sum_rate},
            {"m": m, "bits": label, "source": "approx", "sum_rate": ap.sum_rate},
        ]

    results = _dispatch(point, [(m, b, s) for (m, b), s in zip(grid, seeds)])
    rows = [row for group in results for row in group]
    rows.sort(key=lambda r: (r["m"], _bits_sort_key(float(r["bits"]) if r["bits"] != "inf"
                                                    else math.inf), r["source"]))
    return ["m", "bits", "source", "sum_rate"], rows


def run_power_scaling(m_list, kappa_list, *, k: int = 2, bits: float = 2,
                      e_s: float = 10.0, e_r: float = 10.0, seed: int = 1,
                      profile: LargeScaleProfile | None = None):
    """Rate under the ``p = E/M`` power-scaling regime, with its limit."""
    if profile is None:
        profile = drop_users(seed, k)

    def point(m, kappa):
        cfg = SystemConfig.from_kappa(M=m, kappa=kappa, K=k, bits=bits,
                                      p_s=e_s / m, p_r=e_r / m,
                                      e_s=e_s, e_r=e_r)
        ex = rate.exact_rate(profile, cfg).sum_rate
        ap = rate.approx_rate(profile, cfg).sum_rate
        lim = float(np.sum(rate.scaling_limit(profile, cfg)))
        return {"m": m, "kappa": kappa, "exact": ex, "approx": ap,
                "limit": lim}

    grid = [(m, kap) for kap in sorted(kappa_list) for m in sorted(m_list)]
    rows = _dispatch(point, grid)
    rows.sort(key=lambda r: (r["kappa"], r["m"]))
    return ["m", "kappa", "exact", "approx", "limit"], rows


def run_allocate(m_list, *, k: int = 10, kappa: float = 0.5, bits: float = 2,
                 p_total: float = 10.0, theta: float = 1.1, eps: float = 1e-4,
                 max_iter: int = 50, seed: int = 1,
                 profile: LargeScaleProfile | None = None):
    """Uniform versus optimized power split across array sizes.

    Returns the row table plus the per-M allocation results (for optional
    trace export).
    """
    if profile is None:
        profile = drop_users(seed, k)

    def point(m):
        cfg = SystemConfig.from_kappa(M=m, kappa=kappa, K=k, bits=bits,
                                      p_s=1.0, p_r=1.0)
        _, _, uni = uniform_allocation(profile, cfg, p_total)
        res = allocate(profile, cfg, p_total, theta=theta, eps=eps,
                       max_iter=max_iter)
        return m, uni, res

    results = _dispatch(point, [(m,) for m in sorted(m_list)])
    rows = []
    traces = {}
    for m, uni, res in results:
        rows.append({"m": m, "scheme": "uniform", "sum_rate": uni})
        rows.append({"m": m, "scheme": "optimized", "sum_rate": res.sum_rate})
        traces[m] = res
    rows.sort(key=lambda r: (r["m"], r["scheme"]))
    return ["m", "scheme", "sum_rate"], rows, traces


def run_energy(bits_list, kappa_list, *, m: int = 128, k: int = 10,
               p_s: float = 10.0, p_r: float = 10.0,
               bits_high: float = DEFAULT_HIGH_RES_BITS, seed: int = 1,
               model: PowerModel | None = None,
               profile: LargeScaleProfile | None = None):
    """Energy-efficiency sweep over low-resolution bit widths and kappa."""
    if profile is None:
        profile = drop_users(seed, k)
    if model is None:
        model = PowerModel()

    def point(bits, kappa):
        cfg = SystemConfig.from_kappa(M=m, kappa=kappa, K=k, bits=bits,
                                      p_s=p_s, p_r=p_r)
        sr = rate.exact_rate(profile, cfg).sum_rate
        watts = total_power(cfg, model, bits_high=bits_high)
        ee = energy_efficiency(profile, cfg, model, bits_high=bits_high)
        return {"b_low": int(bits), "kappa": kappa, "sum_rate": sr,
                "p_total_mw": watts * 1e3, "ee_bits_per_joule": ee}

    grid = [(b, kap) for kap in sorted(kappa_list) for b in sorted(bits_list)]
    rows = _dispatch(point, grid)
    rows.sort(key=lambda r: (r["kappa"], r["b_low"]))
    return ["b_low", "kappa", "sum_rate", "p_total_mw", "ee_bits_per_joule"], rows


def best_bits_per_kappa(rows) -> dict[float, int]:
    """Argmax resolution of the EE sweep, one entry per kappa."""
    best: dict[float, tuple[float, int]] = {}
    for row in rows:
        kap = row["kappa"]
        if kap not in best or row["ee_bits_per_joule"] > best[kap][0]:
            best[kap] = (row["ee_bits_per_joule"], row["b_low"])
    return {kap: b for kap, (_, b) in sorted(best.items())}
