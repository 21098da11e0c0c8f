"""Sum-rate power allocation by successive geometric programming.

The power-explicit SINR form makes ``sinr_k * p_k**-1 * xi_k <= 1`` a
posynomial constraint, but maximizing ``prod (1 + sinr_k)`` is not a GP.
Each outer iteration therefore replaces ``1 + sinr_k`` by its best
monomial minorant at the current SINR point (exponent
``sinr / (1 + sinr)``), restricts the SINR variables to a multiplicative
trust region around that point, solves the resulting GP, and re-expands.
Because the minorant touches at the expansion point, the true sum rate is
non-decreasing across iterations; the loop asserts this and raises
:class:`NonMonotoneError` on violation (beyond a 1e-9 slack).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rate
from .channel import LargeScaleProfile
from .config import SystemConfig, prelog
from .gp import GeometricProgram, Posynomial, monomial, solve_gp


class NonMonotoneError(RuntimeError):
    """The surrogate update decreased the true objective: numerical trouble."""


@dataclass(frozen=True)
class CgpModel:
    """Condensed problem data: coefficient tables plus the power budget.

    Variable layout of every generated GP: ``[p_1..p_K, p_r, s_1..s_K]``
    where the ``s_k`` are the per-pair SINR variables.
    """

    coeffs: rate.CompactCoefficients
    p_total: float
    k: int
    pl: float  # rate prefactor

    def sinr(self, p_s: np.ndarray, p_r: float) -> np.ndarray:
        return rate.sinr_from_powers(self.coeffs, p_s, p_r)

    def sum_rate(self, p_s: np.ndarray, p_r: float) -> float:
        return float(np.sum(self.pl * np.log2(1.0 + self.sinr(p_s, p_r))))

    def coupling_posynomial(self, k: int) -> Posynomial:
        """SINR-definition constraint of pair ``k``:
        ``s_k * p_k**-1 * xi_k(p) <= 1``.

        Contains K monomials from the direct-interference table, K from the
        relay-coupled table (each carrying ``p_r**-1``), one bare
        ``p_r**-1`` term, and one power-free term.
        """
        kk = self.k
        n = 2 * kk + 1
        a, b = self.coeffs.a, self.coeffs.b
        c, d = self.coeffs.c, self.coeffs.d
        coefs = []
        exps = []
        base = np.zeros(n)
        base[kk + 1 + k] = 1.0   # s_k
        base[k] = -1.0           # p_k**-1
        for i in range(kk):
            e = base.copy()
            e[i] += 1.0
            coefs.append(a[k, i])
            exps.append(e)
        for i in range(kk):
            e = base.copy()
            e[i] += 1.0
            e[kk] -= 1.0
            coefs.append(b[k, i])
            exps.append(e)
        e = base.copy()
        e[kk] -= 1.0
        coefs.append(c[k])
        exps.append(e)
        coefs.append(d[k])
        exps.append(base.copy())
        return Posynomial(np.asarray(coefs), np.asarray(exps))

    def budget_posynomial(self) -> Posynomial:
        n = 2 * self.k + 1
        exps = np.zeros((self.k + 1, n))
        for i in range(self.k + 1):
            exps[i, i] = 1.0
        return Posynomial(np.full(self.k + 1, 1.0 / self.p_total), exps)

    def iteration_gp(self, sinr_point: np.ndarray, theta: float) -> GeometricProgram:
        """GP of one condensation step around ``sinr_point``."""
        kk = self.k
        n = 2 * kk + 1
        delta = sinr_point / (1.0 + sinr_point)
        obj_exp = np.zeros(n)
        obj_exp[kk + 1:] = -delta
        constraints = [self.coupling_posynomial(k) for k in range(kk)]
        names = [f"sinr-definition[{k}]" for k in range(kk)]
        constraints.append(self.budget_posynomial())
        names.append("power-budget")
        for k in range(kk):
            up = np.zeros(n)
            up[kk + 1 + k] = 1.0
            constraints.append(monomial(1.0 / (theta * sinr_point[k]), up))
            names.append(f"trust-upper[{k}]")
            constraints.append(monomial(sinr_point[k] / theta, -up))
            names.append(f"trust-lower[{k}]")
        return GeometricProgram(objective=monomial(1.0, obj_exp),
                                constraints=constraints, names=names)


def build_cgp(profile: LargeScaleProfile, cfg: SystemConfig,
              p_total: float) -> CgpModel:
    """Assemble the condensed-program data for a total power budget."""
    if p_total <= 0.0:
        raise ValueError(f"total power budget must be positive, got {p_total}")
    coeffs = rate.compact_coefficients(profile, cfg)
    return CgpModel(coeffs=coeffs, p_total=p_total, k=cfg.K, pl=prelog(cfg))


def uniform_allocation(profile: LargeScaleProfile, cfg: SystemConfig,
                       p_total: float) -> tuple[np.ndarray, float, float]:
    """Benchmark split: half the budget to the relay, the rest evenly
    across sources.  Returns ``(p_s, p_r, sum_rate)``."""
    model = build_cgp(profile, cfg, p_total)
    p_s = np.full(cfg.K, p_total / (2.0 * cfg.K))
    p_r = p_total / 2.0
    return p_s, p_r, model.sum_rate(p_s, p_r)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    p_s: np.ndarray
    p_r: float
    sinr: np.ndarray
    sum_rate: float
    max_step: float


@dataclass(frozen=True)
class AllocationResult:
    p_s: np.ndarray
    p_r: float
    sinr: np.ndarray
    sum_rate: float
    converged: bool
    iterations: int
    trace: list[IterationRecord] = field(default_factory=list)


def _interior_start(model: CgpModel, p_s: np.ndarray, p_r: float,
                    sinr_point: np.ndarray, theta: float) -> np.ndarray | None:
    """Strictly feasible start near the expansion point, if one exists."""
    shrink = 1.0 - 1e-3
    p_s0 = p_s * shrink
    p_r0 = p_r * shrink
    s_true = model.sinr(p_s0, p_r0)
    s0 = np.minimum(s_true * shrink, sinr_point * theta * shrink)
    s0 = np.maximum(s0, sinr_point / theta / shrink)
    x0 = np.concatenate([p_s0, [p_r0], s0])
    # verify strict feasibility; trust bounds can exclude the shrunk point
    if np.any(s0 * (1.0 + 1e-12) >= sinr_point * theta):
        return None
    if np.any(s0 <= sinr_point / theta * (1.0 + 1e-12)):
        return None
    if np.any(s0 / p_s0 * _xi(model, p_s0, p_r0) >= 1.0):
        return None
    return x0


def _xi(model: CgpModel, p_s: np.ndarray, p_r: float) -> np.ndarray:
    co = model.coeffs
    return co.a @ p_s + (co.b @ p_s + co.c) / p_r + co.d


def allocate(profile: LargeScaleProfile, cfg: SystemConfig, p_total: float,
             theta: float = 1.1, eps: float = 1e-4, max_iter: int = 50,
             init_p_s: np.ndarray | None = None,
             init_p_r: float | None = None) -> AllocationResult:
    """Optimize source and relay powers for sum rate under a total budget.

    Parameters mirror the condensation loop: ``theta`` is the trust-region
    half-width (multiplicative), ``eps`` the SINR-step convergence
    threshold, ``max_iter`` the outer iteration cap.  Starts from the
    uniform benchmark split unless an initial allocation is supplied.
    """
    if theta <= 1.0:
        raise ValueError("trust-region factor must exceed 1")
    model = build_cgp(profile, cfg, p_total)
    if init_p_s is None:
        p_s = np.full(cfg.K, p_total / (2.0 * cfg.K))
    else:
        p_s = np.asarray(init_p_s, dtype=float).copy()
    p_r = p_total / 2.0 if init_p_r is None else float(init_p_r)
    if np.any(p_s <= 0.0) or p_r <= 0.0 or p_s.sum() + p_r > p_total * (1 + 1e-12):
        raise ValueError("initial allocation must be positive and within budget")

    sinr_point = model.sinr(p_s, p_r)
    best_rate = model.sum_rate(p_s, p_r)
    trace: list[IterationRecord] = [IterationRecord(0, p_s.copy(), p_r,
                                                    sinr_point.copy(), best_rate,
                                                    max_step=np.inf)]
    converged = False
    iterations = 0
    for it in range(1, max_iter + 1):
        iterations = it
        gpm = model.iteration_gp(sinr_point, theta)
        x0 = _interior_start(model, p_s, p_r, sinr_point, theta)
        sol = solve_gp(gpm, tol=1e-10, x0=x0)
        p_s = sol.x[: cfg.K]
        p_r = float(sol.x[cfg.K])
        s_gp = sol.x[cfg.K + 1:]
        new_rate = model.sum_rate(p_s, p_r)
        if new_rate < best_rate - 1e-9 * max(1.0, abs(best_rate)):
            raise NonMonotoneError(
                f"iteration {it} decreased the sum rate from {best_rate!r} "
                f"to {new_rate!r}")
        best_rate = max(best_rate, new_rate)
        max_step = float(np.max(np.abs(s_gp - sinr_point)))
        trace.append(IterationRecord(it, p_s.copy(), p_r, s_gp.copy(),
                                     new_rate, max_step))
        # re-expand at the true SINR of the accepted powers: the GP's SINR
        # variables can sit below it when a trust bound clamps them, and
        # expanding there would forfeit the monotone-ascent guarantee
        sinr_point = model.sinr(p_s, p_r)
        if max_step < eps:
            converged = True
            break

    final_sinr = model.sinr(p_s, p_r)
    return AllocationResult(p_s=p_s, p_r=p_r, sinr=final_sinr,
                            sum_rate=model.sum_rate(p_s, p_r),
                            converged=converged, iterations=iterations,
                            trace=trace)


def trace_to_csv(result: AllocationResult, path, extra: dict | None = None) -> None:
    """Write the iterate trace: powers, SINR variables, and sum rate."""
    import csv as _csv

    k = result.p_s.shape[0]
    lead = list(extra.keys()) if extra else []
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(lead + ["iteration", "sum_rate", "p_r"]
                        + [f"p_s_{i}" for i in range(k)]
                        + [f"sinr_{i}" for i in range(k)])
        for rec in result.trace:
            row = [extra[key] for key in lead] if extra else []
            row += [rec.iteration, f"{rec.sum_rate:.9g}", f"{rec.p_r:.9g}"]
            row += [f"{v:.9g}" for v in rec.p_s]
            row += [f"{v:.9g}" for v in rec.sinr]
            writer.writerow(row)
