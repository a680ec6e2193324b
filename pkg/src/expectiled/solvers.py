"""Expectiled utility E_beta[U] of a finite act, four ways.

``expectile_balance``
    root of the elation/disappointment balance gap, by bisection over the
    support followed by an exact secant step on the final linear piece.
``gul_fixed_point``
    root of ``v -> E[k_v(U)] - v`` (Gul's transform), by Brent's method.
``iterative_reweighting``
    the finite reweighting recursion started at the mean.
``als_minimize``
    direct minimization of the asymmetric quadratic loss, piece by piece.

They share nothing beyond the act itself, which is what makes the
cross-check in :func:`expectile` worth running.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import UtilityAct, check_beta

__all__ = [
    "SolverConfig",
    "ConvergenceTrace",
    "ConvergenceError",
    "CrossCheckError",
    "CrossCheck",
    "balance_gap",
    "expectile_balance",
    "gul_fixed_point",
    "iterative_reweighting",
    "als_minimize",
    "als_objective",
    "loss",
    "binary_closed_form",
    "expectile",
    "solve_all",
    "expectile_fast",
    "dual_beta",
    "ALGORITHMS",
]


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, bracket: tuple[float, float] | None = None):
        super().__init__(message)
        self.bracket = bracket


class CrossCheckError(RuntimeError):
    def __init__(self, values: dict[str, float], discrepancy: float, tol: float):
        detail = ", ".join(f"{k}={v!r}" for k, v in values.items())
        super().__init__(f"solvers disagree by {discrepancy:.3e} (> {tol:.1e}): {detail}")
        self.values = values
        self.discrepancy = discrepancy


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances for the iterative solvers.

    ``abs_tol=None`` means ``1e-12 * max(1, range(U))``, resolved per act.
    """

    abs_tol: float | None = None
    rel_tol: float = 0.0
    max_iter: int = 200

    def __post_init__(self):
        if self.abs_tol is not None and not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if not self.rel_tol >= 0:
            raise ValueError("rel_tol must be nonnegative")
        if int(self.max_iter) < 1:
            raise ValueError("max_iter must be at least 1")

    def tol_for(self, U: UtilityAct) -> float:
        scale = max(1.0, U.range())
        base = 1e-12 * scale if self.abs_tol is None else self.abs_tol
        if self.rel_tol:
            base += self.rel_tol * max(abs(x) for x in U._bounds)
        return base


DEFAULT = SolverConfig()


@dataclass(frozen=True)
class ConvergenceTrace:
    """Reference values v^(k) and the reweighted masses that produced them."""

    iterates: tuple[tuple[float, tuple[float, ...]], ...]
    converged: bool
    steps: int

    @property
    def values(self) -> list[float]:
        return [v for v, _ in self.iterates]


def dual_beta(beta: float) -> float:
    """Coefficient b' with E_b[-U] = -E_{b'}[U]."""
    beta = check_beta(beta)
    return -beta / (1.0 + beta)


def loss(s: float, beta: float) -> float:
    """Asymmetric quadratic loss: s^2 above zero, (1+beta) s^2 below."""
    check_beta(beta)
    return s * s if s >= 0 else (1.0 + beta) * s * s


def _gap(u: np.ndarray, p: np.ndarray, beta: float, v: float) -> float:
    d = u - v
    return float(p @ np.where(d > 0.0, d, (1.0 + beta) * d))


def balance_gap(U: UtilityAct, beta: float, v: float) -> float:
    """Expected elation minus (1+beta) times expected disappointment at ``v``."""
    return _gap(U.u, U.space.p, check_beta(beta), float(v))


def expectile_balance(U: UtilityAct, beta: float, cfg: SolverConfig = DEFAULT) -> float:
    beta = check_beta(beta)
    if U.is_constant():
        return float(U.u[0])
    u, p = U.u, U.space.p
    knots = np.unique(u)
    # the gap is decreasing and piecewise linear with kinks at the knots:
    # bisect the knot indices, then the root on the last piece is a secant step
    lo, hi = 0, len(knots) - 1
    g_lo, g_hi = _gap(u, p, beta, knots[lo]), _gap(u, p, beta, knots[hi])
    it = 0
    while hi - lo > 1:
        it += 1
        if it > cfg.max_iter:
            raise ConvergenceError(
                "balance solver exhausted its iteration budget",
                (float(knots[lo]), float(knots[hi])),
            )
        mid = (lo + hi) // 2
        g_mid = _gap(u, p, beta, knots[mid])
        if g_mid == 0.0:
            return float(knots[mid])
        if g_mid > 0:
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    a, b = float(knots[lo]), float(knots[hi])
    if g_lo == 0.0:
        return a
    v = a + g_lo * (b - a) / (g_lo - g_hi)
    return min(max(v, a), b)


def _gul_excess(v: float, u: np.ndarray, p: np.ndarray, beta: float) -> float:
    k = np.where(u >= v, (u + beta * v) / (1.0 + beta), u)
    return float(p @ k) - v


def gul_fixed_point(U: UtilityAct, beta: float, cfg: SolverConfig = DEFAULT) -> float:
    """Solve v = E[k_v(U)] by Brent's method, bracketed by the mean and an extreme of U."""
    beta = check_beta(beta)
    if U.is_constant() or beta == 0.0:
        return float(U.u[0]) if U.is_constant() else U.mean()
    u, p = U.u, U.space.p
    # the fixed point sits between the mean and the minimum (beta > 0) or maximum (beta < 0)
    lo, hi = U._bounds
    mean = float(p @ u)
    a, b = (lo, mean) if beta > 0 else (mean, hi)
    fa, fb = _gul_excess(a, u, p, beta), _gul_excess(b, u, p, beta)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa < 0.0 or fb > 0.0:  # the mean is off by rounding: fall back to the full range
        a, b = lo, hi
    try:
        v, info = brentq(
            _gul_excess, a, b, args=(u, p, beta),
            xtol=cfg.tol_for(U), rtol=4 * np.finfo(float).eps,
            maxiter=cfg.max_iter, full_output=True, disp=False,
        )
    except ValueError as exc:  # no sign change: cannot happen for valid input
        raise ConvergenceError(str(exc), (a, b)) from exc
    if not info.converged:
        raise ConvergenceError("Gul fixed-point solver exhausted its iteration budget", (a, b))
    return float(v)


def iterative_reweighting(U: UtilityAct, beta: float) -> tuple[float, ConvergenceTrace]:
    """Reweight disappointing states by (1+beta) until the set stops moving.

    Starts at the mean. Terminates after at most (#distinct values - 1)
    reweightings; for beta >= 0 the reference values never increase, for
    beta <= 0 they never decrease.
    """
    beta = check_beta(beta)
    u, p = U.u, U.space.p
    v = float(p @ u)
    iterates = [(v, tuple(U.space.probs))]
    if beta == 0.0 or U.is_constant():
        if U.is_constant():
            v = float(u[0])
            iterates = [(v, iterates[0][1])]
        return v, ConvergenceTrace(tuple(iterates), True, 0)

    factor = 1.0 + beta
    direction = -1.0 if beta > 0 else 1.0
    seen = set()
    low = u < v
    steps = 0
    while True:
        key = low.tobytes()
        if key in seen:  # a tie at the fixed point flipping under rounding
            break
        seen.add(key)
        w = np.where(low, factor * p, p)
        masses = w / w.sum()
        v_new = float(masses @ u)
        if direction * (v_new - v) < 0:  # rounding against the monotone direction
            break
        steps += 1
        v = v_new
        iterates.append((v, tuple(masses.tolist())))
        new_low = u < v
        if np.array_equal(new_low, low):
            break
        low = new_low
    return v, ConvergenceTrace(tuple(iterates), True, steps)


def als_objective(U: UtilityAct, beta: float, v: float) -> float:
    """E[loss(U - v)]."""
    beta = check_beta(beta)
    d = U.u - float(v)
    return float(U.space.p @ np.where(d >= 0, d * d, (1.0 + beta) * d * d))


def als_minimize(U: UtilityAct, beta: float, cfg: SolverConfig = DEFAULT) -> float:
    """Minimize the asymmetric least-squares objective exactly.

    Between consecutive support points the objective is a single quadratic;
    each piece's unconstrained minimizer is clipped into the piece, the
    candidates are scored on the objective, and among near-ties (within
    rounding of the best score) an unclipped candidate wins since it is the
    exact stationary point.
    """
    beta = check_beta(beta)
    if U.is_constant():
        return float(U.u[0])
    u, p = U.u, U.space.p
    order = np.argsort(u, kind="stable")
    x, q = u[order], p[order]
    start = np.concatenate(([0], np.flatnonzero(np.diff(x)) + 1))
    knots = x[start]
    mass = np.add.reduceat(q, start)
    first = np.add.reduceat(q * x, start)
    # piece j spans [knots[j], knots[j+1]]: atoms <= knots[j] sit below v
    below_m, below_f = np.cumsum(mass)[:-1], np.cumsum(first)[:-1]
    total_m, total_f = mass.sum(), first.sum()
    w_below = 1.0 + beta
    num = w_below * below_f + (total_f - below_f)
    den = w_below * below_m + (total_m - below_m)
    raw = num / den
    cand = np.clip(raw, knots[:-1], knots[1:])
    inside = raw == cand
    d = u[None, :] - cand[:, None]
    scores = (np.where(d >= 0, d * d, w_below * d * d)) @ p
    best = scores.min()
    near = scores <= best + 8 * np.finfo(float).eps * max(best, 1.0) * max(1.0, len(u))
    pick = np.flatnonzero(near & inside)
    if pick.size == 0:
        pick = np.flatnonzero(near)
    return float(cand[pick[np.argmin(scores[pick])]])


def binary_closed_form(pE: float, ux: float, uy: float, beta: float) -> float:
    """Expectiled utility of a bet paying ``ux`` on E and ``uy`` otherwise."""
    beta = check_beta(beta)
    if not 0.0 <= pE <= 1.0:
        raise ValueError(f"P(E) must lie in [0, 1], got {pE!r}")
    if ux < uy:
        raise ValueError("the outcome on E must be the better one (ux >= uy)")
    pD = 1.0 - pE
    den = 1.0 + beta * pD
    return (pE * ux + (1.0 + beta) * pD * uy) / den


ALGORITHMS = {
    "balance": lambda U, beta, cfg: expectile_balance(U, beta, cfg),
    "gul": lambda U, beta, cfg: gul_fixed_point(U, beta, cfg),
    "iterative": lambda U, beta, cfg: iterative_reweighting(U, beta)[0],
    "als": lambda U, beta, cfg: als_minimize(U, beta, cfg),
}


@dataclass(frozen=True)
class CrossCheck:
    values: dict[str, float]
    max_discrepancy: float
    tol: float

    @property
    def agrees(self) -> bool:
        return self.max_discrepancy <= self.tol


def solve_all(U: UtilityAct, beta: float, cfg: SolverConfig = DEFAULT) -> CrossCheck:
    """Run all four solvers and measure their largest pairwise gap."""
    values = {name: fn(U, beta, cfg) for name, fn in ALGORITHMS.items()}
    spread = max(values.values()) - min(values.values())
    tol = max(1e-9 * max(1.0, U.range()), 10 * cfg.tol_for(U))
    return CrossCheck(values, spread, tol)


def expectile(
    U: UtilityAct,
    beta: float,
    cfg: SolverConfig = DEFAULT,
    cross_check: bool = False,
    algorithm: str = "iterative",
) -> float:
    """Expectiled utility E_beta[U].

    The iterative recursion is exact after finitely many steps and is the
    default. With ``cross_check`` the other three solvers run too and a
    :class:`CrossCheckError` carrying every value is raised if they disagree.
    """
    if cross_check:
        report = solve_all(U, beta, cfg)
        if not report.agrees:
            raise CrossCheckError(report.values, report.max_discrepancy, report.tol)
        return report.values[algorithm]
    try:
        return ALGORITHMS[algorithm](U, beta, cfg)
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}") from None


def expectile_fast(u: np.ndarray, p: np.ndarray, beta: float) -> float:
    """Array-level reweighting for hot loops; no validation, no trace."""
    v = float(p @ u)
    if beta == 0.0:
        return v
    lo_val, hi_val = u.min(), u.max()
    if lo_val == hi_val:
        return float(lo_val)
    factor = 1.0 + beta
    low = u < v
    for _ in range(len(u) + 1):
        w = np.where(low, factor * p, p)
        v_new = float(w @ u) / float(w.sum())
        if (v_new - v) * beta > 0:
            break
        v = v_new
        new_low = u < v
        if np.array_equal(new_low, low):
            break
        low = new_low
    return v
