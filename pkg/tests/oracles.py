"""Exact rational reference implementations, kept independent of the package."""

from fractions import Fraction
from itertools import product


def exact_expectile(values, probs, beta):
    """Root of E[(U-v)+] = (1+beta) E[(v-U)+], solved piece by piece in rationals."""
    u = [Fraction(x) for x in values]
    p = [Fraction(q) for q in probs]
    b = Fraction(beta)
    total = sum(p)
    p = [q / total for q in p]
    knots = sorted(set(u))
    if len(knots) == 1:
        return knots[0]
    for lo, hi in zip(knots, knots[1:]):
        below = [(x, q) for x, q in zip(u, p) if x <= lo]
        above = [(x, q) for x, q in zip(u, p) if x >= hi]
        # sum_above q (x - v) = (1+b) sum_below q (v - x), linear in v
        num = sum(q * x for x, q in above) + (1 + b) * sum(q * x for x, q in below)
        den = sum(q for _, q in above) + (1 + b) * sum(q for _, q in below)
        v = num / den
        if lo <= v <= hi:
            return v
    raise AssertionError("no root found")


def exact_event_values(values, probs, beta):
    """Scenario value for every subset, keyed by sorted index tuple."""
    u = [Fraction(x) for x in values]
    total = sum(Fraction(q) for q in probs)
    p = [Fraction(q) / total for q in probs]
    b = Fraction(beta)
    out = {}
    for bits in product((0, 1), repeat=len(u)):
        pD = sum(q for q, k in zip(p, bits) if k)
        num = sum(q * x * (1 + b * k) for q, x, k in zip(p, u, bits))
        out[tuple(i for i, k in enumerate(bits) if k)] = num / (1 + b * pD)
    return out
