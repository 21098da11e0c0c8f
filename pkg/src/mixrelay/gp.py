"""Minimal geometric-program solver (log-domain barrier Newton method).

A posynomial ``sum_t c_t * prod_j x_j**E[t, j]`` with positive coefficients
becomes a convex log-sum-exp function after the substitution ``y = log x``.
Standard-form programs -- minimize a posynomial subject to posynomials
``<= 1`` -- are solved by a log-barrier path-following method: damped
Newton centering with backtracking line search, barrier parameter grown
geometrically until the duality-gap bound ``m / t`` meets the tolerance.

A phase-I problem (minimize the maximum constraint log-value) supplies a
strictly feasible start when the caller cannot provide one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GpError(Exception):
    """Base class for solver failures."""


class GpInfeasibleError(GpError):
    """No strictly feasible point exists (or none could be found)."""

    def __init__(self, message: str, worst_constraint: int | None = None,
                 violation: float | None = None):
        super().__init__(message)
        self.worst_constraint = worst_constraint
        self.violation = violation


@dataclass(frozen=True)
class Posynomial:
    """Positive combination of monomials in ``n_vars`` positive variables."""

    coeffs: np.ndarray     # (T,) strictly positive
    exponents: np.ndarray  # (T, n_vars)

    def __post_init__(self) -> None:
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        exponents = np.atleast_2d(np.asarray(self.exponents, dtype=float))
        if coeffs.ndim != 1 or exponents.shape[0] != coeffs.shape[0]:
            raise ValueError("coefficient/exponent shapes do not match")
        if np.any(coeffs <= 0.0) or not np.all(np.isfinite(coeffs)):
            raise ValueError("posynomial coefficients must be positive and finite")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "exponents", exponents)

    @property
    def n_terms(self) -> int:
        return self.coeffs.shape[0]

    @property
    def n_vars(self) -> int:
        return self.exponents.shape[1]

    def value(self, x: np.ndarray) -> float:
        """Evaluate at positive ``x`` (vectorized over leading axes)."""
        x = np.asarray(x, dtype=float)
        logs = np.log(x)
        return float(np.sum(self.coeffs * np.exp(self.exponents @ logs)))

    def value_many(self, x: np.ndarray) -> np.ndarray:
        """Evaluate at an array of points with shape (..., n_vars)."""
        logs = np.log(np.asarray(x, dtype=float))
        return np.exp(logs @ self.exponents.T + np.log(self.coeffs)).sum(axis=-1)


def monomial(coeff: float, exponents) -> Posynomial:
    return Posynomial(np.array([coeff]), np.atleast_2d(np.asarray(exponents, dtype=float)))


@dataclass(frozen=True)
class GeometricProgram:
    """Standard form: minimize ``objective`` s.t. each constraint ``<= 1``."""

    objective: Posynomial
    constraints: list[Posynomial] = field(default_factory=list)
    names: list[str] | None = None

    def __post_init__(self) -> None:
        n = self.objective.n_vars
        for i, con in enumerate(self.constraints):
            if con.n_vars != n:
                raise ValueError(f"constraint {i} has {con.n_vars} variables, expected {n}")

    @property
    def n_vars(self) -> int:
        return self.objective.n_vars

    def constraint_name(self, i: int) -> str:
        if self.names is not None and i < len(self.names):
            return self.names[i]
        return f"constraint[{i}]"


@dataclass(frozen=True)
class GpSolution:
    x: np.ndarray
    objective: float
    converged: bool
    iterations: int      # total Newton steps
    duality_gap: float   # barrier bound m / t at exit
    barrier_t: float = 0.0  # final barrier weight; seed for warm restarts


# ----------------------------------------------------------------------
# log-domain evaluation


def _lse(A: np.ndarray, logc: np.ndarray, y: np.ndarray):
    """Stable log-sum-exp value and softmax weights of one posynomial."""
    z = A @ y + logc
    zmax = z.max()
    w = np.exp(z - zmax)
    s = w.sum()
    return zmax + np.log(s), w / s


def _lse_grad_hess(A: np.ndarray, w: np.ndarray):
    g = A.T @ w
    H = (A * w[:, None]).T @ A - np.outer(g, g)
    return g, H


def _solve_newton_system(H: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Solve ``H d = -g`` for a barrier Hessian.

    Near-binding constraints push the condition number toward 1/eps, so the
    system is Jacobi-equilibrated and the Cholesky solve is polished with
    iterative refinement to keep the low-curvature (valley) component of
    the direction accurate.
    """
    n = H.shape[0]
    scale = np.sqrt(np.clip(np.diag(H), 1e-300, None))
    Hs = H / scale[:, None] / scale[None, :]
    gs = g / scale
    ridge = 1e-14
    for _ in range(10):
        try:
            L = np.linalg.cholesky(Hs + ridge * np.eye(n))
        except np.linalg.LinAlgError:
            ridge *= 100.0
            continue
        z = np.linalg.solve(L.T, np.linalg.solve(L, -gs))
        for _ in range(2):
            r = -gs - Hs @ z
            z += np.linalg.solve(L.T, np.linalg.solve(L, r))
        return z / scale
    raise GpError("Newton system is numerically singular")


class _LogProgram:
    """Pre-processed exponent/log-coefficient arrays of one program.

    Constraints are packed into one ``(m, T_max, n)`` exponent tensor with
    log-coefficient ``-inf`` on padded slots, so every barrier quantity
    falls out of a single batched log-sum-exp evaluation.
    """

    def __init__(self, gp: GeometricProgram):
        self.obj = (gp.objective.exponents, np.log(gp.objective.coeffs))
        self.cons = [(c.exponents, np.log(c.coeffs)) for c in gp.constraints]
        self.n = gp.n_vars
        m = len(self.cons)
        tmax = max((A.shape[0] for A, _ in self.cons), default=1)
        self.cons_A = np.zeros((m, tmax, self.n))
        self.cons_logc = np.full((m, tmax), -np.inf)
        for i, (A, b) in enumerate(self.cons):
            self.cons_A[i, : A.shape[0]] = A
            self.cons_logc[i, : b.shape[0]] = b

    def constraint_lse(self, y: np.ndarray):
        """Log-values ``(m,)`` and softmax weights ``(m, T_max)``."""
        z = self.cons_A @ y + self.cons_logc
        zmax = np.max(z, axis=1)
        w = np.exp(z - zmax[:, None])
        s = w.sum(axis=1)
        return zmax + np.log(s), w / s[:, None]

    def constraint_values(self, y: np.ndarray) -> np.ndarray:
        if not self.cons:
            return np.zeros(0)
        return self.constraint_lse(y)[0]


def _center(lp: _LogProgram, y: np.ndarray, t: float, max_steps: int,
            dec_tol: float = 1e-9, stall_tol: float = 1e-3):
    """Newton centering of ``t * F0 - sum log(-Fi)``; y must be strictly
    feasible on entry and stays so through the backtracked steps.

    Once the barrier weight is large, the objective magnitude makes the
    remaining decrease fall below floating-point resolution: line searches
    then fail, or succeed without measurable progress, while the computed
    decrement sits on its rounding floor.  Either way the stage exits and
    counts as centered when the decrement is already small (``stall_tol``).
    """

    has_cons = len(lp.cons) > 0

    def value(yv):
        f0, _ = _lse(*lp.obj, yv)
        total = t * f0
        if has_cons:
            fv = lp.constraint_lse(yv)[0]
            if np.any(fv >= 0.0):
                return None
            total -= float(np.sum(np.log(-fv)))
        return total

    steps = 0
    stalled = 0
    for _ in range(max_steps):
        f0, w0 = _lse(*lp.obj, y)
        g0, H0 = _lse_grad_hess(lp.obj[0], w0)
        g = t * g0
        H = t * H0
        if has_cons:
            fv, wv = lp.constraint_lse(y)
            if np.any(fv >= 0.0):  # pragma: no cover - guarded by line search
                raise GpError("centering lost feasibility")
            gi = np.einsum("mt,mtn->mn", wv, lp.cons_A)
            hi = np.einsum("mt,mtn,mtk->mnk", wv, lp.cons_A, lp.cons_A)
            hi -= gi[:, :, None] * gi[:, None, :]
            inv = 1.0 / (-fv)
            g += inv @ gi
            H += np.einsum("m,mnk->nk", inv, hi)
            H += np.einsum("m,mn,mk->nk", inv ** 2, gi, gi)
        d = _solve_newton_system(H, g)
        lam2 = float(-g @ d)
        if lam2 / 2.0 <= dec_tol:
            return y, steps, True
        phi0 = value(y)
        step = 1.0
        accepted = False
        while step > 1e-12:
            cand = y + step * d
            phi = value(cand)
            if phi is not None and phi <= phi0 + 0.25 * step * float(g @ d):
                y = cand
                accepted = True
                break
            step *= 0.5
        if not accepted:
            return y, steps, lam2 / 2.0 <= stall_tol
        steps += 1
        if phi0 - phi <= 4.0 * np.spacing(abs(phi0)):
            stalled += 1
            if stalled >= 2:
                return y, steps, lam2 / 2.0 <= stall_tol
        else:
            stalled = 0
    return y, steps, False


def _phase_one(lp: _LogProgram, max_steps: int = 400) -> np.ndarray:
    """Find strictly feasible y by minimizing a shared constraint slack.

    A small quadratic regularizer on y keeps the Newton system positive
    definite (monomial constraints contribute no curvature of their own)
    and steers the search toward moderate feasible points.
    """
    n = lp.n
    reg = 1e-2
    y = np.zeros(n)
    vals = lp.constraint_values(y)
    s = float(vals.max()) + 1.0
    t = 1.0
    total = 0
    m = max(len(lp.cons), 1)
    while total < max_steps:
        # Newton on (y, s) for t*s + reg/2 |y|^2 - sum log(s - Fi(y))
        for _ in range(60):
            g = np.zeros(n + 1)
            H = np.zeros((n + 1, n + 1))
            g[n] = t
            fv, wv = lp.constraint_lse(y)
            gap = s - fv
            gi = np.einsum("mt,mtn->mn", wv, lp.cons_A)
            hi = np.einsum("mt,mtn,mtk->mnk", wv, lp.cons_A, lp.cons_A)
            hi -= gi[:, :, None] * gi[:, None, :]
            inv = 1.0 / gap
            g[:n] = inv @ gi + reg * y
            g[n] = t - float(np.sum(inv))
            H[:n, :n] = np.einsum("m,mnk->nk", inv, hi) \
                + np.einsum("m,mn,mk->nk", inv ** 2, gi, gi) \
                + reg * np.eye(n)
            H[:n, n] = -(inv ** 2) @ gi
            H[n, :n] = H[:n, n]
            H[n, n] = float(np.sum(inv ** 2))
            d = _solve_newton_system(H, g)
            lam2 = float(-g @ d)
            total += 1
            if lam2 / 2.0 <= 1e-10 or total >= max_steps:
                break
            # cap the move per coordinate: an unbounded-below constraint would
            # otherwise let one line search run off to a remote feasible point
            # that the main centering path cannot pull back
            step = min(1.0, 4.0 / float(np.max(np.abs(d))))
            while step > 1e-12:
                yc = y + step * d[:n]
                sc = s + step * d[n]
                if np.all(sc - lp.constraint_values(yc) > 0.0):
                    y, s = yc, sc
                    break
                step *= 0.5
            else:
                break
            if s < -1e-3:  # comfortably feasible already
                return y
        if s < 0.0:
            return y
        if m / t < 1e-9:
            break
        t *= 20.0
    vals = lp.constraint_values(y)
    worst = int(np.argmax(vals))
    raise GpInfeasibleError(
        f"no strictly feasible point found; worst constraint index {worst} "
        f"has log-value {vals[worst]:.3e}", worst_constraint=worst,
        violation=float(np.expm1(vals[worst])))


def solve_gp(gp: GeometricProgram, tol: float = 1e-8, max_newton: int = 4000,
             x0: np.ndarray | None = None, t0: float = 1.0) -> GpSolution:
    """Solve a standard-form program to duality gap ``tol``.

    ``x0`` may supply a strictly feasible start; otherwise phase I runs
    first.  ``t0`` sets the initial barrier weight — pass the previous
    solution's ``barrier_t`` (with its ``x``) to resume the path when
    re-solving a slightly perturbed program.  Infeasible programs raise
    :class:`GpInfeasibleError`; running out of Newton steps returns the
    best iterate with ``converged=False``.
    """
    lp = _LogProgram(gp)
    m = len(lp.cons)
    t = max(float(t0), 1.0)
    if x0 is not None:
        y = np.log(np.asarray(x0, dtype=float))
        if m and lp.constraint_values(y).max() >= 0.0:
            y = _phase_one(lp)
            t = 1.0
    elif m:
        y = _phase_one(lp)
        t = 1.0
    else:
        y = np.zeros(lp.n)

    total = 0
    converged = False
    while total < max_newton:
        y, steps, centered = _center(lp, y, t, max_newton - total)
        total += max(steps, 1)
        gap = m / t
        if gap < tol:
            converged = centered
            break
        t *= 20.0
    x = np.exp(y)
    return GpSolution(x=x, objective=gp.objective.value(x), converged=converged,
                      iterations=total, duality_gap=m / t, barrier_t=t)
