"""Agent-level evaluation of outcome acts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    Agent,
    FiniteSpace,
    ModelError,
    OutcomeAct,
    UtilityAct,
    apply_utility,
    check_beta,
)
from .solvers import expectile

TIE_TOL = 1e-10
CE_TOL = 1e-9
AFFINE_TOL = 1e-9


def evaluate(X: OutcomeAct, agent: Agent) -> float:
    """Expectiled utility of ``X`` for ``agent``."""
    return expectile(apply_utility(X, agent), agent.beta)


def rank(acts: Sequence[tuple[str, OutcomeAct]], agent: Agent) -> list[tuple[tuple[str, ...], float]]:
    """Indifference classes, best first.

    Acts whose values lie within 1e-10 of the first member of a class join
    that class; the class carries that first (largest) value.
    """
    if not acts:
        raise ValueError("nothing to rank")
    scored = sorted(
        ((evaluate(X, agent), i, name) for i, (name, X) in enumerate(acts)),
        key=lambda t: (-t[0], t[1]),
    )
    classes: list[tuple[list[str], float]] = []
    for value, _, name in scored:
        if classes and classes[-1][1] - value <= TIE_TOL:
            classes[-1][0].append(name)
        else:
            classes.append(([name], value))
    return [(tuple(names), value) for names, value in classes]


def outcome_worth(value: float, agent: Agent) -> str | None:
    """The outcome whose utility is within 1e-9 of ``value``, nearest first, then by label."""
    hits = [label for label, u in agent.utility.items() if abs(u - value) <= CE_TOL]
    if not hits:
        return None
    return min(hits, key=lambda label: (abs(agent.utility[label] - value), label))


def certainty_equivalent(X: OutcomeAct, agent: Agent) -> tuple[float, str | None]:
    """Value of ``X`` in utils, plus an outcome worth exactly that much if the table has one."""
    value = evaluate(X, agent)
    return value, outcome_worth(value, agent)


def midpoint_value(x: str, y: str, agent: Agent) -> float:
    return 0.5 * agent.u(x) + 0.5 * agent.u(y)


def beta_sweep(U: UtilityAct, betas: Sequence[float]) -> list[tuple[float, float]]:
    return [(b, expectile(U, check_beta(b))) for b in betas]


@dataclass(frozen=True)
class AgentComparison:
    affine_related: bool
    affine_coeffs: tuple[float, float] | None
    max_residual: float
    beta_order: str
    more_averse: bool
    empirical_relation_holds: bool
    trials: int
    counterexample: tuple[tuple[str, ...], str] | None = None

    @property
    def verdict(self) -> str:
        return self.describe()

    def describe(self, a: str = "A", b: str = "B") -> str:
        if not self.affine_related:
            if self.affine_coeffs is not None and self.max_residual <= AFFINE_TOL:
                return "utilities related by a non-increasing transform; not comparable"
            return "utilities not affinely related; not comparable"
        if self.beta_order == "=":
            return f"{a} and {b} equally disappointment averse"
        if self.beta_order == ">":
            return f"{a} more disappointment averse than {b}"
        return f"{b} more disappointment averse than {a}"


def _fit_affine(ua: np.ndarray, ub: np.ndarray) -> tuple[float, float, float]:
    lo, hi = int(np.argmin(ub)), int(np.argmax(ub))
    a = (ua[hi] - ua[lo]) / (ub[hi] - ub[lo])
    b = ua[lo] - a * ub[lo]
    scale = max(1.0, float(np.abs(ua).max()))
    residual = float(np.abs(ua - (a * ub + b)).max()) / scale
    return float(a), float(b), residual


def compare_agents(
    A: Agent, B: Agent, space: FiniteSpace, trials: int = 1000, seed: int = 0
) -> AgentComparison:
    """Comparative disappointment aversion of A relative to B.

    Fits u_A = a * u_B + b on the shared labels, orders the coefficients, and
    samples (act, constant) pairs to test that whenever A weakly prefers the
    act to the constant, so does B.
    """
    labels = sorted(set(A.utility) & set(B.utility))
    ub = np.array([B.utility[k] for k in labels])
    ua = np.array([A.utility[k] for k in labels])
    if len(labels) < 2 or np.unique(ub).size < 2 or np.unique(ua).size < 2:
        raise ModelError("need at least two distinct utility values on the shared labels")

    a, b, residual = _fit_affine(ua, ub)
    related = residual <= AFFINE_TOL and a > 0
    order = ">" if A.beta > B.beta else ("=" if A.beta == B.beta else "<")

    rng = np.random.default_rng(seed)
    scale = max(1.0, float(np.abs(ua).max()), float(np.abs(ub).max()))
    holds, witness = True, None
    for _ in range(trials):
        outcomes = tuple(rng.choice(labels, size=space.n).tolist())
        y = str(rng.choice(labels))
        X = OutcomeAct(space, outcomes)
        if evaluate(X, A) >= A.u(y) and evaluate(X, B) < B.u(y) - 1e-9 * scale:
            holds, witness = False, (outcomes, y)
            break
    return AgentComparison(
        affine_related=related,
        affine_coeffs=(a, b),
        max_residual=residual,
        beta_order=order,
        more_averse=related and A.beta >= B.beta,
        empirical_relation_holds=holds,
        trials=trials,
        counterexample=witness,
    )
