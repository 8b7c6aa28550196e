"""Slow, independent reference implementations used only by the tests."""

import math
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from majvote.knapsack import TIE_TOL


def poly_count(total, parts, cap):
    """Coefficient of x^total in (1 + x + ... + x^cap)^parts."""
    coef = [1]
    for _ in range(parts):
        nxt = [0] * (len(coef) + cap)
        for i, c in enumerate(coef):
            for j in range(cap + 1):
                nxt[i + j] += c
        coef = nxt
    return coef[total] if 0 <= total < len(coef) else 0


def pnk_by_placement(n, k, classes, model):
    """Exact p_{n,k} by listing every placement of the n-k residual votes.

    ``classes`` counts the true class. ``model`` is "wrong" or "all".
    """
    r = n - k
    labels = range(1, classes) if model == "wrong" else range(classes)
    total = Fraction(0)
    count = 0
    for votes in product(labels, repeat=r):
        tally = [0] * classes
        tally[0] = k
        for v in votes:
            tally[v] += 1
        top = max(tally)
        if tally[0] == top:
            total += Fraction(1, tally.count(top))
        count += 1
    return total / count


def naive_knapsack(acc, times, budget, scheme):
    """Best subset over all 2^n candidates with the library's tie-break."""
    n = len(acc)
    best = (0.0, None)
    best_key = None
    for size in range(1, n + 1):
        for idx in combinations(range(n), size):
            t = math.fsum(times[i] for i in idx)
            if t > budget:
                continue
            q = accuracy_by_enumeration([acc[i] for i in idx], scheme.profile(size).as_array())
            key = (t, sorted(f"c{i}" for i in idx))
            if best_key is None or q > best[0] + TIE_TOL or (abs(q - best[0]) <= TIE_TOL and key < best_key):
                best, best_key = (q, idx), key
    return best


def accuracy_by_enumeration(ps, coef):
    total = 0.0
    for outcome in product((0, 1), repeat=len(ps)):
        w = 1.0
        for o, p in zip(outcome, ps):
            w *= p if o else 1 - p
        total += w * coef[sum(outcome)]
    return total


def count_distribution_oracle(ps):
    """Success-count pmf by polynomial multiplication."""
    poly = np.array([1.0])
    for p in ps:
        poly = np.convolve(poly, [1 - p, p])
    return poly
