"""Value-at-Risk and Average Value-at-Risk on the uniform n-point space.

AVaR is computed along four independent routes that must agree exactly:

* tail averages of order statistics at grid levels i/n, linearly blended
  between neighbouring grid levels (:func:`avar`);
* integration of the lower quantile function (:func:`avar_quantile_integral`);
* the Rockafellar-Uryasev minimisation ``min_s s + E[(X - s)^+]/(1 - alpha)``
  (:func:`avar_ru`);
* the dual linear program over capped densities (:func:`avar_dual`).

Outcomes are losses: larger values are riskier, and AVaR averages the
upper tail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import OutcomeVector, RationalLike, as_outcomes, order_statistics, to_rational


class LevelError(ValueError):
    """A confidence level or grid index is outside its admissible range."""


def as_level(alpha: RationalLike) -> Fraction:
    alpha = to_rational(alpha)
    if not 0 <= alpha <= 1:
        raise LevelError(f"level must lie in [0, 1], got {alpha}")
    return alpha


def value_at_risk(X, p: RationalLike) -> Fraction:
    """Lower p-quantile: the smallest outcome x with F_X(x) >= p.

    For p = 0 the infimum is -inf; by convention min(X) is returned.
    """
    X = as_outcomes(X)
    p = as_level(p)
    xs = order_statistics(X).sorted
    if p == 0:
        return xs[0]
    return xs[math.ceil(p * X.n) - 1]


def avar_closed_form(X, i: int) -> Fraction:
    """AVaR at grid level i/n: the mean of the n - i largest outcomes."""
    X = as_outcomes(X)
    if not 0 <= i <= X.n - 1:
        raise LevelError(f"grid index must lie in [0, {X.n - 1}], got {i}")
    tail = order_statistics(X).sorted[i:]
    return sum(tail, Fraction(0)) / (X.n - i)


def interpolation_weight(n: int, alpha: RationalLike) -> tuple[int, Fraction]:
    """Locate alpha in the grid and return ``(i, lam)``.

    ``i`` is the grid index with (i-1)/n < alpha <= i/n (i = 0 only for
    alpha = 0) and ``lam`` the weight on AVaR_{i/n} such that

        AVaR_alpha = lam * AVaR_{i/n} + (1 - lam) * AVaR_{(i-1)/n}.

    At grid points lam = 1.
    """
    alpha = as_level(alpha)
    i = math.ceil(alpha * n)
    if alpha * n == i:
        return i, Fraction(1)
    lam = (n * (1 - alpha) - (n - i + 1) * (i - n * alpha)) / (n * (1 - alpha))
    return i, lam


def _grid_value(X: OutcomeVector, i: int) -> Fraction:
    # AVaR_1 is the essential supremum by convention
    if i == X.n:
        return X.max()
    return avar_closed_form(X, i)


def avar(X, alpha: RationalLike) -> Fraction:
    """Average Value-at-Risk at level alpha in [0, 1].

    alpha = 1 returns max(X), the limit of AVaR as alpha -> 1.
    """
    X = as_outcomes(X)
    i, lam = interpolation_weight(X.n, alpha)
    if lam == 1:
        return _grid_value(X, i)
    return lam * _grid_value(X, i) + (1 - lam) * _grid_value(X, i - 1)


def avar_quantile_integral(X, alpha: RationalLike) -> Fraction:
    """AVaR as (1/(1 - alpha)) * integral_alpha^1 VaR_u du, integrated exactly.

    VaR_u equals sorted[k-1] for u in ((k-1)/n, k/n], so the integral is a
    finite sum of (piece length) * (piece value).
    """
    X = as_outcomes(X)
    alpha = as_level(alpha)
    if alpha == 1:
        return X.max()
    n = X.n
    xs = order_statistics(X).sorted
    total = Fraction(0)
    for k in range(1, n + 1):
        lo = max(Fraction(k - 1, n), alpha)
        hi = Fraction(k, n)
        if hi > lo:
            total += (hi - lo) * xs[k - 1]
    return total / (1 - alpha)


@dataclass(frozen=True)
class Interval:
    """Closed interval [lower, upper]; ``lower=None`` means unbounded below."""

    lower: Optional[Fraction]
    upper: Fraction

    def __contains__(self, s) -> bool:
        s = to_rational(s)
        return (self.lower is None or self.lower <= s) and s <= self.upper


@dataclass(frozen=True)
class RUResult:
    value: Fraction
    minimizers: Interval


def ru_objective(X, alpha: RationalLike, s: RationalLike) -> Fraction:
    """g(s) = s + E[(X - s)^+] / (1 - alpha)."""
    X = as_outcomes(X)
    alpha = as_level(alpha)
    s = to_rational(s)
    excess = sum((x - s for x in X if x > s), Fraction(0))
    return s + excess / (X.n * (1 - alpha))


def avar_ru(X, alpha: RationalLike) -> RUResult:
    """Minimise the Rockafellar-Uryasev objective exactly.

    The objective is convex and piecewise linear with kinks at the distinct
    outcome values, so its minimum over the reals is attained at one of
    them. Its slope left of min(X) is 1 - 1/(1 - alpha), which vanishes
    only for alpha = 0; in that case the minimiser set is unbounded below.
    Right of max(X) the slope is 1.
    """
    X = as_outcomes(X)
    alpha = as_level(alpha)
    if alpha == 1:
        raise LevelError("the Rockafellar-Uryasev objective has no minimiser at alpha = 1")
    xs = order_statistics(X).sorted
    scale = X.n * (1 - alpha)
    breakpoints, values = [], []
    # walking down from the top, tail = sum of outcomes strictly above s
    tail, above = Fraction(0), 0
    for k in range(X.n - 1, -1, -1):
        s = xs[k]
        if k == X.n - 1 or s != xs[k + 1]:
            breakpoints.append(s)
            values.append(s + (tail - above * s) / scale)
        tail += s
        above += 1
    breakpoints.reverse()
    values.reverse()
    best = min(values)
    attained = [s for s, v in zip(breakpoints, values) if v == best]
    # the minimiser set of a convex function is an interval, so the attaining
    # breakpoints are contiguous and their hull is the full set
    lower = None if alpha == 0 else attained[0]
    return RUResult(best, Interval(lower, attained[-1]))


@dataclass(frozen=True)
class DualResult:
    value: Fraction
    density: tuple[Fraction, ...]


def density_cap(n: int, alpha: RationalLike) -> Fraction:
    alpha = as_level(alpha)
    if alpha == 1:
        raise LevelError("the dual density cap is unbounded at alpha = 1")
    return 1 / (n * (1 - alpha))


def avar_dual(X, alpha: RationalLike) -> DualResult:
    """Solve max sum w_j x_j s.t. 0 <= w_j <= 1/(n(1-alpha)), sum w_j = 1.

    Greedy is optimal for this LP: fill the largest outcomes to the cap and
    give what is left to the next one. Equal outcomes are filled in atom
    order.
    """
    X = as_outcomes(X)
    cap = density_cap(X.n, alpha)
    order = sorted(range(X.n), key=lambda j: (-X[j], j))
    weights = [Fraction(0)] * X.n
    remaining = Fraction(1)
    for j in order:
        if remaining == 0:
            break
        w = min(cap, remaining)
        weights[j] = w
        remaining -= w
    value = sum((w * x for w, x in zip(weights, X)), Fraction(0))
    return DualResult(value, tuple(weights))


def is_feasible_density(density, alpha: RationalLike) -> bool:
    """Check that ``density`` lies in the capped density set for alpha."""
    weights = [to_rational(w) for w in density]
    cap = density_cap(len(weights), alpha)
    return sum(weights, Fraction(0)) == 1 and all(0 <= w <= cap for w in weights)


def avar_grid(X) -> tuple[Fraction, ...]:
    """(AVaR_{0/n}, ..., AVaR_{(n-1)/n}, AVaR_1) in one pass over the sorted tail."""
    X = as_outcomes(X)
    xs = order_statistics(X).sorted
    n = X.n
    out = []
    tail = Fraction(0)
    for i in range(n - 1, -1, -1):
        tail += xs[i]
        out.append(tail / (n - i))
    out.reverse()
    out.append(xs[-1])
    return tuple(out)
