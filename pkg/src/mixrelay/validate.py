"""Self-check suite: Monte Carlo oracles against the closed forms.

These checks are smaller, faster versions of the test-suite oracles, meant
for the ``validate`` subcommand: a few seconds of simulation that catch
gross regressions in the rate engine, the simulator, or the GP solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mcsim, rate
from .channel import LargeScaleProfile
from .config import INFINITE_BITS, SystemConfig
from .gp import GeometricProgram, Posynomial, solve_gp


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


_PROFILE = LargeScaleProfile.from_gains([0.9, 0.35, 0.12], [0.45, 0.8, 0.2])


def check_tx_power(seed: int = 7, trials: int = 20_000) -> CheckResult:
    """Relay transmit power: simulator versus its closed-form mean."""
    worst = 0.0
    for kappa in (0.0, 0.5, 1.0):
        for bits in (1, INFINITE_BITS):
            cfg = SystemConfig.from_kappa(M=32, kappa=kappa, K=3, bits=bits,
                                          p_s=10.0, p_r=10.0)
            mu = rate.mu_per_antenna(_PROFILE, cfg)
            combine = cfg.M0 + cfg.alpha_q * cfg.M1
            est = mcsim.estimate_tx_power(_PROFILE, cfg, trials=trials, seed=seed)
            worst = max(worst, abs(est.mean / combine - mu) / mu)
    passed = worst <= 0.03
    return CheckResult("relay-tx-power", passed,
                       f"worst relative deviation {worst:.2%} (tolerance 3%)")


def check_rate_terms(seed: int = 7, trials: int = 4000) -> CheckResult:
    """Each closed-form interference/noise term against its MC estimate."""
    cfg = SystemConfig.from_kappa(M=64, kappa=0.5, K=3, bits=2,
                                  p_s=10.0, p_r=10.0)
    analytic = rate.exact_rate(_PROFILE, cfg)
    result = mcsim.simulated_rate(_PROFILE, cfg, trials=trials, seed=seed)
    worst_sig = 0.0
    worst_name = ""
    for name, est in result.terms.items():
        ref = getattr(analytic.components, name)
        sig = float(np.max(np.abs(est.mean - ref)
                           / np.maximum(est.std_error, 1e-300)))
        if sig > worst_sig:
            worst_sig, worst_name = sig, name
    sinr_dev = float(np.max(np.abs(result.sinr - analytic.sinr) / analytic.sinr))
    passed = worst_sig <= 4.0 and sinr_dev <= 0.10
    return CheckResult(
        "rate-term-decomposition", passed,
        f"worst term {worst_name} at {worst_sig:.2f} std errors (limit 4); "
        f"SINR deviation {sinr_dev:.2%} (limit 10%)")


def check_dual_form(seed: int = 7, configs: int = 25) -> CheckResult:
    """Component-sum and coefficient-table rates must agree to rounding."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    worst_inf = 0.0
    for _ in range(configs):
        k = int(rng.integers(1, 5))
        prof = LargeScaleProfile.from_gains(10 ** rng.uniform(-1.5, 0.5, k),
                                            10 ** rng.uniform(-1.5, 0.5, k))
        m = int(rng.integers(2, 65))
        m0 = int(rng.integers(0, m + 1))
        bits = rng.choice([1, 2, 3, 5, 8, INFINITE_BITS])
        p_s = 10 ** rng.uniform(-1, 1.5, k)
        cfg = SystemConfig(M=m, M0=m0, K=k, bits=float(bits), p_s=p_s,
                           p_r=10 ** rng.uniform(-1, 1.5), tau_c=20 * k, tau_p=k)
        a = rate.exact_rate(prof, cfg).rates
        b = rate.compact_rate(prof, cfg).rates
        worst = max(worst, float(np.max(np.abs(a - b) / np.abs(a))))
        cfg_inf = SystemConfig(M=m, M0=m0, K=k, bits=INFINITE_BITS, p_s=p_s,
                               p_r=cfg.p_r, tau_c=20 * k, tau_p=k)
        ai = rate.exact_rate(prof, cfg_inf).rates
        pi = rate.approx_rate(prof, cfg_inf).rates
        worst_inf = max(worst_inf, float(np.max(np.abs(ai - pi) / np.abs(ai))))
    passed = worst <= 1e-9 and worst_inf <= 1e-12
    return CheckResult(
        "dual-form-identity", passed,
        f"exact vs table {worst:.2e} (limit 1e-9); "
        f"approx vs exact at infinite bits {worst_inf:.2e} (limit 1e-12)")


def check_gp_solver(seed: int = 7, instances: int = 8) -> CheckResult:
    """Random standard-form programs against a zooming grid search."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(instances):
        gp, lo, hi = random_gp(rng)
        oracle = grid_search_gp(gp, lo, hi)
        sol = solve_gp(gp, tol=1e-9)
        worst = max(worst, abs(sol.objective - oracle) / oracle)
    passed = worst <= 0.01
    return CheckResult("gp-vs-grid", passed,
                       f"worst objective deviation {worst:.2%} (tolerance 1%)")


def random_gp(rng: np.random.Generator):
    """A bounded, feasible standard-form program with 2-4 variables.

    Box constraints keep the domain compact; extra posynomial constraints
    are normalized to value 0.5 at the box's log-midpoint so a strictly
    feasible anchor always exists.  Returns ``(program, lower, upper)``.
    """
    n = int(rng.integers(2, 5))
    lo = np.exp(rng.uniform(-1.5, -0.5, n))
    hi = np.exp(rng.uniform(0.5, 1.5, n))
    anchor = np.sqrt(lo * hi)
    cons = []
    names = []
    for i in range(n):
        up = np.zeros((1, n))
        up[0, i] = 1.0
        cons.append(Posynomial(np.array([1.0 / hi[i]]), up))
        names.append(f"upper[{i}]")
        dn = np.zeros((1, n))
        dn[0, i] = -1.0
        cons.append(Posynomial(np.array([lo[i]]), dn))
        names.append(f"lower[{i}]")
    for j in range(int(rng.integers(1, 3))):
        terms = int(rng.integers(2, 4))
        exps = rng.uniform(-2.0, 2.0, (terms, n))
        coefs = np.exp(rng.uniform(-1.0, 1.0, terms))
        at_anchor = float(np.sum(coefs * np.prod(anchor ** exps, axis=1)))
        cons.append(Posynomial(coefs / at_anchor * 0.5, exps))
        names.append(f"posy[{j}]")
    terms = int(rng.integers(2, 5))
    objective = Posynomial(np.exp(rng.uniform(-1.0, 1.0, terms)),
                           rng.uniform(-2.0, 2.0, (terms, n)))
    return GeometricProgram(objective, cons, tuple(names)), lo, hi


def grid_search_gp(gp: GeometricProgram, lo: np.ndarray, hi: np.ndarray,
                   rounds: int = 7, points: int = 17) -> float:
    """Brute-force oracle: log-space grid with window refinement."""
    llo, lhi = np.log(lo), np.log(hi)
    box_lo, box_hi = llo.copy(), lhi.copy()
    best_val, best_y = np.inf, None
    n = len(lo)
    for _ in range(rounds):
        axes = [np.linspace(llo[i], lhi[i], points) for i in range(n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        y_grid = np.stack([m.ravel() for m in mesh], axis=1)
        x_grid = np.exp(y_grid)
        feasible = np.ones(len(x_grid), dtype=bool)
        for con in gp.constraints:
            feasible &= con.value_many(x_grid) <= 1.0
        values = np.where(feasible, gp.objective.value_many(x_grid), np.inf)
        idx = int(np.argmin(values))
        if values[idx] < best_val:
            best_val, best_y = float(values[idx]), y_grid[idx]
        step = (lhi - llo) / (points - 1)
        llo = np.maximum(box_lo, best_y - 2.0 * step)
        lhi = np.minimum(box_hi, best_y + 2.0 * step)
    return best_val


def run_all(seed: int = 7) -> list[CheckResult]:
    return [
        check_tx_power(seed),
        check_rate_terms(seed),
        check_dual_form(seed),
        check_gp_solver(seed),
    ]


def format_report(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<{width}}  {mark}  {r.detail}")
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} checks passed")
    return "\n".join(lines)
