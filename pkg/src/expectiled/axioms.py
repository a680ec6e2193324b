"""Executable checks of the functional properties and axioms of expectiles.

Every check draws its randomness from ``numpy.random.default_rng((seed, trial))``
so any single trial can be replayed, and trials are independent of the order
in which they run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .core import (
    DisappointmentSet,
    Dominance,
    FiniteSpace,
    ModelError,
    UtilityAct,
    check_beta,
    disappointment_set,
    fosd_compare,
)
from .solvers import binary_closed_form, expectile, expectile_fast

INDIFFERENCE_TOL = 1e-10


class PreconditionError(ValueError):
    """The inputs do not satisfy an axiom's hypothesis (not a failure of it)."""


class Property(str, Enum):
    LAW_INVARIANCE = "law_invariance"
    STRONG_MONOTONICITY = "strong_monotonicity"
    CONSTANT_ADDITIVITY = "constant_additivity"
    POSITIVE_HOMOGENEITY = "positive_homogeneity"
    SUPERADDITIVITY = "superadditivity"
    CONTINUITY = "continuity"
    CONCORDANT_ADDITIVITY = "concordant_additivity"
    DISAPPOINTMENT_HEDGING = "disappointment_hedging"
    DISAPPOINTMENT_STACKING = "disappointment_stacking"


LEMMA_PROPERTIES = (
    Property.LAW_INVARIANCE,
    Property.STRONG_MONOTONICITY,
    Property.CONSTANT_ADDITIVITY,
    Property.POSITIVE_HOMOGENEITY,
    Property.SUPERADDITIVITY,
    Property.CONTINUITY,
    Property.CONCORDANT_ADDITIVITY,
)


@dataclass(frozen=True)
class PropertyReport:
    property_id: str
    beta: float
    trials: int
    failures: int
    worst_violation: float
    seed: int
    first_failure: int | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _e(U: UtilityAct, beta: float) -> float:
    return expectile_fast(U.u, U.space.p, beta)


def random_act(space: FiniteSpace, rng: np.random.Generator) -> UtilityAct:
    """Continuous values most of the time, small integers (ties) otherwise."""
    if rng.random() < 0.3:
        values = rng.integers(-5, 6, space.n).astype(float)
    else:
        values = rng.uniform(-100.0, 100.0, space.n)
    return UtilityAct(space, tuple(values))


def random_event(n: int, rng: np.random.Generator) -> DisappointmentSet:
    """A nonempty proper subset of the states."""
    if n < 2:
        raise ModelError("need at least two states for a nonempty proper event")
    k = int(rng.integers(1, n))
    return DisappointmentSet(frozenset(rng.choice(n, size=k, replace=False).tolist()))


def _equal_prob_permutation(space: FiniteSpace, rng: np.random.Generator) -> np.ndarray:
    """A permutation of states that only swaps states of equal probability."""
    perm = np.arange(space.n)
    groups: dict[float, list[int]] = {}
    for i, q in enumerate(space.probs):
        groups.setdefault(q, []).append(i)
    for idx in groups.values():
        perm[idx] = rng.permutation(idx)
    return perm


def gen_act_with_disappointment_set(
    space: FiniteSpace, D: DisappointmentSet, beta: float, seed: int | np.random.Generator
) -> UtilityAct:
    """An act W with E_beta[W] = 0 whose disappointment set is exactly ``D``.

    Positive values are drawn off ``D`` and negative ones on ``D``; the
    negative part is then scaled so that expected elation equals (1+beta)
    times expected disappointment at zero.
    """
    beta = check_beta(beta)
    mask = D.mask(space.n)
    if not mask.any() or mask.all():
        raise ModelError("the event must be nonempty and proper")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    draws = rng.uniform(0.5, 10.0, space.n)
    p = space.p
    lam = float(p[~mask] @ draws[~mask]) / ((1.0 + beta) * float(p[mask] @ draws[mask]))
    return UtilityAct(space, tuple(np.where(mask, -lam * draws, draws)))


def concordant_copy(X: UtilityAct, beta: float, scale: float) -> UtilityAct:
    """``scale * (X - E_beta[X])``: zero expectile, same disappointment set as X."""
    if not scale > 0:
        raise ValueError("scale must be positive")
    return (X - expectile(X, beta)) * scale


def _dset(U: UtilityAct, beta: float) -> DisappointmentSet:
    return disappointment_set(U, _e(U, beta))


def _check_indifferent(X: UtilityAct, Y: UtilityAct, beta: float) -> None:
    ex, ey = _e(X, beta), _e(Y, beta)
    if abs(ex - ey) > INDIFFERENCE_TOL:
        raise PreconditionError(f"acts are not indifferent: {ex!r} vs {ey!r}")


def _check_same_set(W: UtilityAct, X: UtilityAct, beta: float) -> None:
    dw, dx = _dset(W, beta), _dset(X, beta)
    if dw != dx:
        raise PreconditionError(
            f"disappointment sets differ: {dw.sorted()} vs {dx.sorted()}"
        )


def hedging_margin(W: UtilityAct, X: UtilityAct, Y: UtilityAct, beta: float) -> float:
    """Signed slack of the hedging inequality; negative means violated."""
    _check_indifferent(X, Y, beta)
    _check_same_set(W, X, beta)
    gap = _e((W + Y) / 2, beta) - _e((W + X) / 2, beta)
    return gap if beta >= 0 else -gap


def check_disappointment_hedging(
    W: UtilityAct, X: UtilityAct, Y: UtilityAct, beta: float, tol: float = 1e-9
) -> bool:
    """Mixing with an act that disappoints alongside X does not favour X over Y.

    For beta >= 0 checks E[(W+X)/2] <= E[(W+Y)/2]; for beta < 0 the reverse.
    Raises :class:`PreconditionError` unless X ~ Y and W shares X's
    disappointment set.
    """
    return hedging_margin(W, X, Y, check_beta(beta)) >= -tol


def stacking_margins(
    Z: UtilityAct, U: UtilityAct, V: UtilityAct, beta: float
) -> tuple[float, float]:
    _check_indifferent(U, V, beta)
    _check_same_set(Z, U, beta)
    ezu = _e(Z + U, beta)
    gap = _e(Z + V, beta) - ezu
    additivity = abs(ezu - _e(Z, beta) - _e(U, beta))
    return (gap if beta >= 0 else -gap), additivity


def check_disappointment_stacking(
    Z: UtilityAct, U: UtilityAct, V: UtilityAct, beta: float, tol: float = 1e-9
) -> bool:
    """Holding Z, adding U (which disappoints with Z) is no better than adding V.

    Also requires the concordant-sum identity E[Z+U] = E[Z] + E[U].
    """
    margin, additivity = stacking_margins(Z, U, V, check_beta(beta))
    return margin >= -tol and additivity <= tol


def _matched(Y: UtilityAct, target: float, beta: float) -> UtilityAct:
    return Y + (target - _e(Y, beta))


def _hedging_triple(space, beta, rng):
    D = random_event(space.n, rng)
    W = gen_act_with_disappointment_set(space, D, beta, rng)
    X = gen_act_with_disappointment_set(space, D, beta, rng) * rng.uniform(0.1, 5.0)
    X = X + rng.uniform(-50.0, 50.0)
    Y = _matched(random_act(space, rng), _e(X, beta), beta)
    return W, X, Y


def _trial_violation(prop: Property, space: FiniteSpace, beta: float,
                     rng: np.random.Generator) -> float:
    """Amount by which one random instance violates ``prop`` (<= 0 when it holds)."""
    if prop is Property.LAW_INVARIANCE:
        X = random_act(space, rng)
        Y = X.with_values(X.u[_equal_prob_permutation(space, rng)])
        return abs(_e(X, beta) - _e(Y, beta))

    if prop is Property.STRONG_MONOTONICITY:
        X = random_act(space, rng)
        shuffled = X.u[_equal_prob_permutation(space, rng)]
        drop = rng.uniform(0.0, 5.0, space.n) * (rng.random(space.n) < 0.5)
        drop[rng.integers(space.n)] += rng.uniform(1e-3, 5.0)
        Y = X.with_values(shuffled - drop)
        if fosd_compare(X, Y) is not Dominance.DOMINATES_STRICTLY:
            return math.inf
        diff = _e(X, beta) - _e(Y, beta)
        return math.inf if not diff > 0 else 0.0

    if prop is Property.CONSTANT_ADDITIVITY:
        X = random_act(space, rng)
        m = rng.uniform(-100.0, 100.0)
        return abs(_e(X + m, beta) - _e(X, beta) - m)

    if prop is Property.POSITIVE_HOMOGENEITY:
        X = random_act(space, rng)
        lam = rng.uniform(0.0, 10.0)
        return abs(_e(X * lam, beta) - lam * _e(X, beta))

    if prop is Property.SUPERADDITIVITY:
        X, Y = random_act(space, rng), random_act(space, rng)
        gap = _e(X + Y, beta) - _e(X, beta) - _e(Y, beta)
        return -gap if beta >= 0 else gap

    if prop is Property.CONTINUITY:
        X = random_act(space, rng)
        eps = 1e-9
        Y = X.with_values(X.u + rng.uniform(-eps, eps, space.n))
        return abs(_e(X, beta) - _e(Y, beta)) - eps

    if prop is Property.CONCORDANT_ADDITIVITY:
        D = random_event(space.n, rng)
        X = gen_act_with_disappointment_set(space, D, beta, rng) + rng.uniform(-50, 50)
        Y = gen_act_with_disappointment_set(space, D, beta, rng) * rng.uniform(0.1, 5.0)
        return abs(_e(X + Y, beta) - _e(X, beta) - _e(Y, beta))

    if prop is Property.DISAPPOINTMENT_HEDGING:
        W, X, Y = _hedging_triple(space, beta, rng)
        return -hedging_margin(W, X, Y, beta)

    if prop is Property.DISAPPOINTMENT_STACKING:
        Z, U, V = _hedging_triple(space, beta, rng)
        margin, additivity = stacking_margins(Z, U, V, beta)
        return max(-margin, additivity)

    raise ValueError(f"unknown property {prop!r}")


def run_property(
    property_id: str | Property,
    space: FiniteSpace,
    beta: float,
    trials: int,
    seed: int,
    tol: float = 1e-9,
) -> PropertyReport:
    """Check one property on ``trials`` random instances.

    ``superadditivity`` checks the superadditive inequality for beta >= 0 and
    the subadditive one for beta < 0. Concordant-sum properties and the two
    axioms need at least two states.
    """
    try:
        prop = Property(property_id)
    except ValueError:
        raise ValueError(f"unknown property {property_id!r}") from None
    beta = check_beta(beta)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    failures, worst, first = 0, 0.0, None
    for t in range(trials):
        rng = np.random.default_rng((seed, t))
        violation = _trial_violation(prop, space, beta, rng)
        if violation > tol:
            failures += 1
            first = t if first is None else first
        worst = max(worst, violation)
    return PropertyReport(prop.value, beta, trials, failures, max(worst, 0.0), seed, first)


def infer_beta(
    space: FiniteSpace, E: DisappointmentSet, observed_value: float, ux: float, uy: float
) -> float:
    """Coefficient that makes the bet ``ux`` on E / ``uy`` off E worth ``observed_value``."""
    if not ux > uy:
        raise ValueError("need ux > uy")
    pE = space.prob(E)
    if not 0.0 < pE < 1.0:
        raise ValueError("the event must have probability strictly between 0 and 1")
    return infer_beta_from_prob(pE, observed_value, ux, uy)


def infer_beta_from_prob(pE: float, observed_value: float, ux: float, uy: float) -> float:
    if not ux > uy:
        raise ValueError("need ux > uy")
    if not 0.0 < pE < 1.0:
        raise ValueError("P(E) must lie strictly between 0 and 1")
    if not uy < observed_value < ux:
        raise ValueError(f"observed value {observed_value!r} is not inside ({uy!r}, {ux!r})")
    t = (observed_value - uy) / (ux - uy)
    return (pE - t) / ((1.0 - pE) * t)


@dataclass(frozen=True)
class Fingerprint:
    verdict: str
    beta_hat: float | None
    witness: UtilityAct | None
    discrepancy: float

    @property
    def consistent(self) -> bool:
        return self.verdict == "consistent"


def _calibration_event(space: FiniteSpace) -> DisappointmentSet:
    if space.n < 2:
        raise ModelError("fingerprinting needs at least two states")
    order = np.argsort(space.p, kind="stable")
    best, acc, members = None, 0.0, []
    for i in order[:-1]:
        acc += space.p[i]
        members.append(int(i))
        if best is None or abs(acc - 0.5) < abs(best[0] - 0.5):
            best = (acc, list(members))
    return DisappointmentSet(frozenset(best[1]))


def fingerprint_functional(
    evaluator: Callable[[UtilityAct], float],
    space: FiniteSpace,
    trials: int = 100,
    seed: int = 0,
    tol: float = 1e-9,
) -> Fingerprint:
    """Is ``evaluator`` an expectile, and for which coefficient?

    The coefficient is read off the evaluator's price of a single bet; the
    evaluator is then compared with that expectile on random acts. The first
    act on which they differ by more than ``tol`` is returned as witness.
    """

    def call(U: UtilityAct) -> float:
        value = float(evaluator(U))
        if not math.isfinite(value):
            raise ValueError(f"evaluator returned {value!r} for {U.values}")
        return value

    E = _calibration_event(space)
    bet = UtilityAct(space, tuple(E.mask(space.n).astype(float)))
    price = call(bet)
    if not 0.0 < price < 1.0:
        return Fingerprint("inconsistent", None, bet, abs(price - space.prob(E)))
    beta_hat = infer_beta(space, E, price, 1.0, 0.0)
    if beta_hat <= -1.0:
        return Fingerprint("inconsistent", None, bet, math.inf)

    worst = abs(binary_closed_form(space.prob(E), 1.0, 0.0, beta_hat) - price)
    for t in range(trials):
        rng = np.random.default_rng((seed, t))
        U = random_act(space, rng)
        diff = abs(call(U) - expectile(U, beta_hat))
        if diff > tol:
            return Fingerprint("inconsistent", beta_hat, U, diff)
        worst = max(worst, diff)
    return Fingerprint("consistent", beta_hat, None, worst)


def mean_functional(U: UtilityAct) -> float:
    return U.mean()


def max_functional(U: UtilityAct) -> float:
    return float(U.u.max())


def second_state_functional(U: UtilityAct) -> float:
    """Reads off the value in the second state, a median-like non-expectile."""
    return float(U.u[1 % U.n])


def mad_functional(U: UtilityAct, weight: float = 0.5) -> float:
    """Mean minus a multiple of the mean absolute deviation."""
    m = U.mean()
    return m - weight * float(U.space.p @ np.abs(U.u - m))


def expectile_functional(beta: float) -> Callable[[UtilityAct], float]:
    beta = check_beta(beta)
    return lambda U: expectile(U, beta)


REFERENCE_FUNCTIONALS: dict[str, Callable[[UtilityAct], float]] = {
    "mean": mean_functional,
    "max": max_functional,
    "median-like": second_state_functional,
    "mad": mad_functional,
}
