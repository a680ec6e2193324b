"""Finite probability spaces, acts, agents and scenarios.

Everything here is immutable. Numeric payloads are stored as tuples of
floats so that models compare field-for-field; the matching numpy views
(``.p``, ``.u``, ``.phi``) are built lazily and marked read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

PROB_SUM_TOL = 1e-9
BETA_FLOOR = -1.0 + np.finfo(float).eps


class ModelError(ValueError):
    """Invalid model data (probabilities, utilities, coefficients)."""


class SpaceMismatchError(ModelError):
    pass


class MissingOutcomeError(KeyError):
    """An outcome label has no entry in the agent's utility table."""

    def __init__(self, label: str):
        super().__init__(label)
        self.label = label

    def __str__(self) -> str:
        return f"outcome {self.label!r} has no utility"


def check_beta(beta: float) -> float:
    beta = float(beta)
    if not math.isfinite(beta) or beta <= BETA_FLOOR:
        raise ModelError(f"beta must be a finite number > -1, got {beta!r}")
    return beta


def _readonly(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    arr.flags.writeable = False
    return arr


def _normalize(probs: Sequence[float]) -> tuple[float, ...]:
    arr = np.asarray(probs, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ModelError("a space needs at least one state")
    if not np.all(np.isfinite(arr)):
        raise ModelError("probabilities must be finite")
    if np.any(arr <= 0):
        raise ModelError("probabilities must be strictly positive")
    total = math.fsum(arr)
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise ModelError(f"probabilities sum to {total!r}, not 1")
    # already-normalized input is kept bit-for-bit so that parse/serialize round-trips
    if abs(total - 1.0) > 4 * arr.size * np.finfo(float).eps:
        arr = arr / total
    return tuple(float(x) for x in arr)


@dataclass(frozen=True)
class FiniteSpace:
    """Labeled states carrying strictly positive probabilities."""

    states: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        states = tuple(str(s) for s in self.states)
        if len(set(states)) != len(states):
            raise ModelError("state labels must be unique")
        probs = _normalize(self.probs)
        if len(probs) != len(states):
            raise ModelError(f"{len(states)} states but {len(probs)} probabilities")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, states: int | Iterable[str]) -> FiniteSpace:
        if isinstance(states, int):
            labels = tuple(f"s{i}" for i in range(states))
        else:
            labels = tuple(states)
        n = len(labels)
        if n == 0:
            raise ModelError("a space needs at least one state")
        return cls(labels, (1.0 / n,) * n)

    @classmethod
    def from_probs(cls, probs: Sequence[float]) -> FiniteSpace:
        return cls(tuple(f"s{i}" for i in range(len(probs))), tuple(probs))

    @property
    def n(self) -> int:
        return len(self.states)

    @cached_property
    def p(self) -> np.ndarray:
        return _readonly(self.probs)

    def index(self, label: str) -> int:
        try:
            return self.states.index(label)
        except ValueError:
            raise ModelError(f"unknown state {label!r}") from None

    def prob(self, event: DisappointmentSet | Iterable[int]) -> float:
        members = event.members if isinstance(event, DisappointmentSet) else event
        return math.fsum(self.probs[i] for i in members)

    def is_uniform(self) -> bool:
        return all(abs(q - self.probs[0]) <= 1e-15 for q in self.probs)


def _finite_tuple(values: Sequence[float], what: str) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if not all(math.isfinite(v) for v in out):
        raise ModelError(f"{what} must be finite")
    return out


@dataclass(frozen=True)
class UtilityAct:
    """A simple random variable in utils: one value per state."""

    space: FiniteSpace
    values: tuple[float, ...]

    def __post_init__(self):
        values = _finite_tuple(self.values, "utility values")
        if len(values) != self.space.n:
            raise ModelError(f"act has {len(values)} values for {self.space.n} states")
        object.__setattr__(self, "values", values)

    @classmethod
    def of(cls, values: Sequence[float], probs: Sequence[float] | None = None) -> UtilityAct:
        """Convenience constructor; uniform probabilities unless given."""
        space = FiniteSpace.uniform(len(values)) if probs is None else FiniteSpace.from_probs(probs)
        return cls(space, tuple(values))

    @cached_property
    def u(self) -> np.ndarray:
        return _readonly(self.values)

    @property
    def n(self) -> int:
        return self.space.n

    def mean(self) -> float:
        return float(self.u @ self.space.p)

    @cached_property
    def _bounds(self) -> tuple[float, float]:
        return float(self.u.min()), float(self.u.max())

    def range(self) -> float:
        lo, hi = self._bounds
        return hi - lo

    def is_constant(self) -> bool:
        lo, hi = self._bounds
        return lo == hi

    def with_values(self, values: Sequence[float]) -> UtilityAct:
        return UtilityAct(self.space, tuple(values))

    def __neg__(self) -> UtilityAct:
        return self.with_values(-self.u)

    def __add__(self, other: UtilityAct | float) -> UtilityAct:
        if isinstance(other, UtilityAct):
            _same_space(self, other)
            return self.with_values(self.u + other.u)
        return self.with_values(self.u + float(other))

    __radd__ = __add__

    def __sub__(self, other: UtilityAct | float) -> UtilityAct:
        return self + (-other)

    def __mul__(self, scalar: float) -> UtilityAct:
        return self.with_values(self.u * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> UtilityAct:
        return self.with_values(self.u / float(scalar))


@dataclass(frozen=True)
class OutcomeAct:
    """An act delivering an outcome label in each state."""

    space: FiniteSpace
    outcomes: tuple[str, ...]

    def __post_init__(self):
        outcomes = tuple(str(o) for o in self.outcomes)
        if len(outcomes) != self.space.n:
            raise ModelError(f"act has {len(outcomes)} outcomes for {self.space.n} states")
        object.__setattr__(self, "outcomes", outcomes)


@dataclass(frozen=True)
class Agent:
    """Disappointment aversion coefficient plus a utility table over outcomes."""

    beta: float
    utility: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "beta", check_beta(self.beta))
        table = {str(k): float(v) for k, v in dict(self.utility).items()}
        if not all(math.isfinite(v) for v in table.values()):
            raise ModelError("utility values must be finite")
        object.__setattr__(self, "utility", table)

    @property
    def alpha(self) -> float:
        """Asymmetry level of the equivalent Newey-Powell expectile."""
        return 1.0 / (2.0 + self.beta)

    def u(self, label: str) -> float:
        try:
            return self.utility[label]
        except KeyError:
            raise MissingOutcomeError(label) from None

    def is_nonconstant(self) -> bool:
        return len(set(self.utility.values())) >= 2


@dataclass(frozen=True)
class Scenario:
    """Alternative probability measure, stored as its density against P."""

    space: FiniteSpace
    density: tuple[float, ...]

    def __post_init__(self):
        density = _finite_tuple(self.density, "densities")
        if len(density) != self.space.n:
            raise ModelError(f"scenario has {len(density)} densities for {self.space.n} states")
        if any(d < 0 for d in density):
            raise ModelError("densities must be nonnegative")
        mass = math.fsum(d * q for d, q in zip(density, self.space.probs))
        if abs(mass - 1.0) > PROB_SUM_TOL:
            raise ModelError(f"scenario has total mass {mass!r}, not 1")
        object.__setattr__(self, "density", density)

    @cached_property
    def phi(self) -> np.ndarray:
        return _readonly(self.density)

    @property
    def probs(self) -> np.ndarray:
        """State probabilities under the scenario."""
        return self.phi * self.space.p


@dataclass(frozen=True)
class DisappointmentSet:
    members: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(int(i) for i in self.members))
        if any(i < 0 for i in self.members):
            raise ModelError("state indices must be nonnegative")

    @classmethod
    def of(cls, *members: int) -> DisappointmentSet:
        return cls(frozenset(members))

    def __contains__(self, i: int) -> bool:
        return i in self.members

    def __len__(self) -> int:
        return len(self.members)

    def sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))

    def mask(self, n: int) -> np.ndarray:
        self.check(n)
        out = np.zeros(n, dtype=bool)
        out[list(self.members)] = True
        return out

    def check(self, n: int) -> None:
        if self.members and max(self.members) >= n:
            raise ModelError(f"event {self.sorted()} refers to states outside 0..{n - 1}")

    def labels(self, space: FiniteSpace) -> list[str]:
        self.check(space.n)
        return [space.states[i] for i in self.sorted()]

    def complement(self, n: int) -> DisappointmentSet:
        return DisappointmentSet(frozenset(range(n)) - self.members)


class Dominance(str, Enum):
    DOMINATES_STRICTLY = "dominates_strictly"
    DOMINATES_WEAKLY = "dominates_weakly"
    DOMINATED = "dominated"
    EQUAL_IN_LAW = "equal_in_law"
    INCOMPARABLE = "incomparable"


def _same_space(a, b) -> None:
    if a.space != b.space:
        raise SpaceMismatchError("acts live on different spaces")


def disappointment_set(U: UtilityAct, v: float) -> DisappointmentSet:
    """States whose utility falls strictly below the reference ``v``."""
    return DisappointmentSet(frozenset(np.flatnonzero(U.u < v).tolist()))


def apply_utility(X: OutcomeAct, agent: Agent) -> UtilityAct:
    return UtilityAct(X.space, tuple(agent.u(o) for o in X.outcomes))


def distribution(U: UtilityAct) -> list[tuple[float, float]]:
    """Law of ``U`` as sorted ``(value, probability)`` atoms."""
    atoms: dict[float, list[float]] = {}
    for v, q in zip(U.values, U.space.probs):
        atoms.setdefault(v, []).append(q)
    return [(v, math.fsum(atoms[v])) for v in sorted(atoms)]


def _survival(atoms: list[tuple[float, float]], points: np.ndarray) -> np.ndarray:
    vals = np.array([a for a, _ in atoms])
    masses = np.array([m for _, m in atoms])
    return np.array([masses[vals >= t].sum() for t in points])


def fosd_compare(U: UtilityAct, V: UtilityAct, tol: float = 1e-12) -> Dominance:
    """First-order stochastic dominance of ``U`` over ``V``.

    Survival functions ``t -> P(U >= t)`` are compared at every jump point of
    either act. ``DOMINATES_WEAKLY`` is returned when ``U`` is nowhere below
    ``V`` and the two laws differ only by amounts within ``tol``, i.e. they are
    numerically indistinguishable but not identical.
    """
    if U.space.probs != V.space.probs:
        raise SpaceMismatchError("acts must share the probability vector")
    du, dv = distribution(U), distribution(V)
    points = np.unique(np.concatenate([[a for a, _ in du], [a for a, _ in dv]]))
    diff = _survival(du, points) - _survival(dv, points)
    if np.all(np.abs(diff) <= tol):
        if du == dv or np.any(diff < 0):
            return Dominance.EQUAL_IN_LAW
        return Dominance.DOMINATES_WEAKLY
    if np.all(diff >= -tol):
        return Dominance.DOMINATES_STRICTLY
    if np.all(diff <= tol):
        return Dominance.DOMINATED
    return Dominance.INCOMPARABLE
