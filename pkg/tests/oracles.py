"""Brute-force reference implementations used only by the tests.

Everything here works from plain Python counters and ``math.log2`` so it
shares no code with the package under test.
"""

import math
from collections import Counter


def h(values):
    n = len(values)
    return -sum((c / n) * math.log2(c / n) for c in Counter(values).values())


def joint_h(x, y):
    return h(list(zip(x, y)))


def cond_h(x, y):
    """H(x|y) straight from the definition: sum over y of P(y) H(x | y)."""
    n = len(y)
    total = 0.0
    for yv, cy in Counter(y).items():
        xs = [a for a, b in zip(x, y) if b == yv]
        total += (cy / n) * h(xs)
    return total


def ig(x, y):
    return h(x) - cond_h(x, y)


def su(x, y):
    denom = h(x) + h(y)
    if denom == 0:
        return 0.0
    return 2.0 * ig(x, y) / denom
