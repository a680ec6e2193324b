"""Seeded random acts shared by the acceptance and property tests."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from expectiled import FiniteSpace, UtilityAct

CORPUS_SIZE = 5000
CORPUS_BETAS = (-0.9, -0.5, 0.0, 0.5, 1.0, 5.0, 50.0)


def random_space(n: int, rng: np.random.Generator) -> FiniteSpace:
    w = rng.uniform(0.01, 1.0, n)
    return FiniteSpace.from_probs(tuple(w / w.sum()))


def corpus_act(i: int, seed: int = 20240) -> UtilityAct:
    rng = np.random.default_rng((seed, i))
    n = int(rng.integers(2, 13))
    space = random_space(n, rng)
    return UtilityAct(space, tuple(rng.uniform(-100.0, 100.0, n)))


@lru_cache(maxsize=4)
def corpus(size: int = CORPUS_SIZE, seed: int = 20240) -> tuple[UtilityAct, ...]:
    """Acts with 2..12 states, random positive probabilities, utils uniform in [-100, 100]."""
    return tuple(corpus_act(i, seed) for i in range(size))
