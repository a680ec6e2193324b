"""Maxmin (robust) representation of expectiled utility.

An adversarial Nature picks an event D and inflates its probability by
(1+beta), renormalizing. For beta >= 0 the expectile is the smallest
expected utility Nature can force this way; for beta <= 0 it is the largest.
The attaining event is the act's own disappointment set.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations
from typing import Iterator

import numpy as np

from .core import (
    DisappointmentSet,
    FiniteSpace,
    ModelError,
    Scenario,
    SpaceMismatchError,
    UtilityAct,
    check_beta,
    disappointment_set,
)
from .solvers import expectile

ENUMERATION_GUARD = 24
TIE_TOL = 1e-12


class EnumerationTooLarge(ModelError):
    pass


def _event_density(mask: np.ndarray, pD: float, beta: float) -> np.ndarray:
    return np.where(mask, 1.0 + beta, 1.0) / (1.0 + beta * pD)


def event_scenario(space: FiniteSpace, D: DisappointmentSet, beta: float) -> Scenario:
    """Scenario inflating the probability of ``D`` by the factor (1+beta)."""
    beta = check_beta(beta)
    mask = D.mask(space.n)
    return Scenario(space, tuple(_event_density(mask, space.prob(D), beta).tolist()))


def scenario_value(U: UtilityAct, Q: Scenario) -> float:
    """Expected utility of ``U`` under ``Q``."""
    if U.space != Q.space:
        raise SpaceMismatchError("act and scenario live on different spaces")
    return math.fsum(q * d * x for q, d, x in zip(U.space.probs, Q.density, U.values))


def optimal_scenario(U: UtilityAct, beta: float, weak: bool = False) -> Scenario:
    """The attaining scenario Q*.

    By default the inflated event is the strict disappointment set
    ``{U < E_beta[U]}``; ``weak=True`` uses ``{U <= E_beta[U]}`` instead.
    States sitting exactly at the expectile carry zero weight in the balance,
    so both choices attain the same value.
    """
    v = expectile(U, beta)
    if weak:
        D = DisappointmentSet(frozenset(np.flatnonzero(U.u <= v).tolist()))
    else:
        D = disappointment_set(U, v)
    return event_scenario(U.space, D, beta)


def scenario_in_density_set(Q: Scenario, beta: float) -> bool:
    """Membership in the density-ratio ball: max/min density <= max(1+b, 1/(1+b))."""
    beta = check_beta(beta)
    phi = Q.phi
    if np.any(phi <= 0):
        return False
    gamma = max(1.0 + beta, 1.0 / (1.0 + beta))
    return float(phi.max() / phi.min()) <= gamma + 1e-12


@lru_cache(maxsize=32)
def _bit_block(n_bits: int) -> np.ndarray:
    codes = np.arange(1 << n_bits, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n_bits)) & 1).astype(float)


def _event_values(U: UtilityAct, beta: float, masks: np.ndarray) -> np.ndarray:
    """Scenario values for a (k, n) block of 0/1 event indicators."""
    p, u = U.space.p, U.u
    a = p * u
    num = a.sum() + beta * (masks @ a)
    den = 1.0 + beta * (masks @ p)
    return num / den


def _check_guard(n: int, allow_large: bool) -> None:
    if n > ENUMERATION_GUARD and not allow_large:
        raise EnumerationTooLarge(
            f"{n} states means 2^{n} events; the limit is {ENUMERATION_GUARD} "
            "(pass allow_large to override)"
        )


def brute_force_dual(
    U: UtilityAct, beta: float, allow_large: bool = False
) -> tuple[float, DisappointmentSet]:
    """Optimize over every event scenario by enumeration.

    Minimum for beta >= 0, maximum for beta < 0. Among events whose value is
    within rounding of the optimum the lexicographically smallest sorted
    index tuple is returned.
    """
    beta = check_beta(beta)
    n = U.n
    _check_guard(n, allow_large)
    sign = 1.0 if beta >= 0 else -1.0
    low_bits = min(n, 16)
    low = _bit_block(low_bits)
    high_bits = n - low_bits
    tol = TIE_TOL * max(1.0, float(np.abs(U.u).max()))

    blocks: list[tuple[float, tuple[int, ...]]] = []
    for hi_code in range(1 << high_bits):
        masks = low
        if high_bits:
            hi_row = ((hi_code >> np.arange(high_bits)) & 1).astype(float)
            masks = np.hstack([low, np.broadcast_to(hi_row, (low.shape[0], high_bits))])
        vals = sign * _event_values(U, beta, masks)
        m = float(vals.min())
        blocks.append((m, _lexmin(masks[vals <= m + tol] > 0)))
    best = min(m for m, _ in blocks)
    winner = min(t for m, t in blocks if m <= best + tol)
    return sign * best, DisappointmentSet(frozenset(winner))


def _lexmin(rows: np.ndarray) -> tuple[int, ...]:
    """Lexicographically smallest sorted index tuple among boolean rows."""
    prefix: list[int] = []
    start = 0
    while True:
        rest = rows[:, start:]
        if not rest.any(axis=1).all():
            return tuple(prefix)
        first = rest.argmax(axis=1)
        m = int(first.min())
        rows = rows[first == m]
        prefix.append(start + m)
        start += m + 1


def iter_events(n: int) -> Iterator[DisappointmentSet]:
    """All events, by size and then lexicographically."""
    for k in range(n + 1):
        for members in combinations(range(n), k):
            yield DisappointmentSet(frozenset(members))


def event_table(
    U: UtilityAct, beta: float, allow_large: bool = False
) -> list[tuple[DisappointmentSet, float]]:
    """Value of every event scenario, in :func:`iter_events` order."""
    beta = check_beta(beta)
    _check_guard(U.n, allow_large)
    rows = []
    for D in iter_events(U.n):
        mask = D.mask(U.n)[None, :].astype(float)
        rows.append((D, float(_event_values(U, beta, mask)[0])))
    return rows
