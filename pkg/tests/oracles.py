"""Brute-force reference computations used to freeze expected values.

Nothing here imports riskgrid; each oracle recomputes its quantity from
first principles so it stays independent of the library path it checks.
"""
from fractions import Fraction
from itertools import permutations


def F(x):
    return Fraction(x) if not isinstance(x, str) else Fraction(x)


def lower_quantile(values, u):
    """inf{x : #{v <= x}/n >= u} found by scanning candidate values."""
    n = len(values)
    for x in sorted(set(values)):
        if Fraction(sum(1 for v in values if v <= x), n) >= u:
            return x
    raise AssertionError("unreachable for u <= 1")


def avar_by_integration(values, alpha):
    """(1/(1-alpha)) * integral of the lower quantile over [alpha, 1].

    The quantile is a step function that can only jump at multiples of 1/n,
    so integrating piece by piece (evaluating at each piece's midpoint) is
    exact.
    """
    n = len(values)
    alpha = Fraction(alpha)
    cuts = sorted({alpha, Fraction(1)} | {Fraction(k, n) for k in range(n + 1) if Fraction(k, n) > alpha})
    total = Fraction(0)
    for a, b in zip(cuts, cuts[1:]):
        total += (b - a) * lower_quantile(values, (a + b) / 2)
    return total / (1 - alpha)


def ru_objective(values, alpha, s):
    n = len(values)
    return s + sum(max(v - s, 0) for v in values) / (n * (1 - Fraction(alpha)))


def integrated_cdf_by_pieces(values, t):
    """Integrate the empirical CDF step by step from min(values) to t."""
    n = len(values)
    pts = sorted(set(values))
    if t <= pts[0]:
        return Fraction(0)
    knots = [p for p in pts if p < t] + [t]
    total = Fraction(0)
    for a, b in zip(knots, knots[1:]):
        total += (b - a) * Fraction(sum(1 for v in values if v <= a), n)
    return total


def top_sums(values):
    s = sorted(values, reverse=True)
    out, acc = [], Fraction(0)
    for v in s:
        acc += v
        out.append(acc)
    return out


def all_permutation_values(fn, values):
    return {fn(list(p)) for p in permutations(values)}


def avar_by_tail_mass(values, alpha):
    """Average of the top n(1-alpha) atoms, counting the last one fractionally."""
    n = len(values)
    alpha = Fraction(alpha)
    desc = sorted((Fraction(v) for v in values), reverse=True)
    if alpha == 1:
        return desc[0]
    mass = n * (1 - alpha)
    total, left = Fraction(0), mass
    for x in desc:
        take = min(left, 1)
        total += take * x
        left -= take
        if left == 0:
            break
    return total / mass
