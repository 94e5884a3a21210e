"""Exact outcome vectors on the uniform n-point probability space.

Every atom carries probability exactly 1/n. All arithmetic is done with
:class:`fractions.Fraction`, so identities between representations can be
checked with ``==`` rather than a tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str, float]


class DimensionError(ValueError):
    """Raised when two objects that must share a dimension n do not."""


def to_rational(value: RationalLike) -> Fraction:
    """Convert ``value`` to an exact Fraction.

    Strings may be integers, finite decimals ("0.8" -> 4/5) or "p/q".
    Floats are read through their shortest repr, so ``0.8`` also becomes
    4/5 instead of the nearest binary double.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not outcome values")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text.lower() for c in ("inf", "nan", "e")):
            raise ValueError(f"not an exact rational literal: {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational literal: {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def format_rational(value: Fraction) -> str:
    """Render as "p/q", or "p" when the denominator is 1."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class OutcomeVector:
    """A random variable on the uniform n-point space, one value per atom."""

    outcomes: tuple[Fraction, ...]

    def __init__(self, outcomes: Iterable[RationalLike]):
        values = tuple(to_rational(v) for v in outcomes)
        if not values:
            raise ValueError("an outcome vector needs at least one atom")
        object.__setattr__(self, "outcomes", values)

    @property
    def n(self) -> int:
        return len(self.outcomes)

    def __len__(self) -> int:
        return len(self.outcomes)

    def __iter__(self):
        return iter(self.outcomes)

    def __getitem__(self, index):
        return self.outcomes[index]

    def __repr__(self) -> str:
        body = ", ".join(format_rational(v) for v in self.outcomes)
        return f"OutcomeVector([{body}])"

    def _check_same_n(self, other: "OutcomeVector") -> None:
        if other.n != self.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if isinstance(other, OutcomeVector):
            self._check_same_n(other)
            return OutcomeVector(a + b for a, b in zip(self.outcomes, other.outcomes))
        c = to_rational(other)
        return OutcomeVector(a + c for a in self.outcomes)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, OutcomeVector):
            self._check_same_n(other)
            return OutcomeVector(a - b for a, b in zip(self.outcomes, other.outcomes))
        c = to_rational(other)
        return OutcomeVector(a - c for a in self.outcomes)

    def __mul__(self, scalar):
        k = to_rational(scalar)
        return OutcomeVector(k * a for a in self.outcomes)

    __rmul__ = __mul__

    def __neg__(self):
        return OutcomeVector(-a for a in self.outcomes)

    def __le__(self, other: "OutcomeVector") -> bool:
        """Componentwise (almost sure) ordering."""
        self._check_same_n(other)
        return all(a <= b for a, b in zip(self.outcomes, other.outcomes))

    def permuted(self, perm: Sequence[int]) -> "OutcomeVector":
        """Return X_pi = (x[perm[0]], ..., x[perm[n-1]]) (0-based)."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError(f"not a permutation of 0..{self.n - 1}: {perm!r}")
        return OutcomeVector(self.outcomes[p] for p in perm)

    def mean(self) -> Fraction:
        return sum(self.outcomes, Fraction(0)) / self.n

    def max(self) -> Fraction:
        return max(self.outcomes)

    def min(self) -> Fraction:
        return min(self.outcomes)


def as_outcomes(X) -> OutcomeVector:
    return X if isinstance(X, OutcomeVector) else OutcomeVector(X)


@dataclass(frozen=True)
class OrderStatistics:
    """Nondecreasing rearrangement of an outcome vector.

    ``permutation[k]`` is the (0-based) atom whose value sits at sorted
    position ``k``, so ``sorted[k] == X[permutation[k]]``.
    """

    sorted: tuple[Fraction, ...]
    permutation: tuple[int, ...]

    def unsort(self) -> OutcomeVector:
        out: list[Fraction] = [Fraction(0)] * len(self.sorted)
        for k, atom in enumerate(self.permutation):
            out[atom] = self.sorted[k]
        return OutcomeVector(out)


def order_statistics(X) -> OrderStatistics:
    """Sort outcomes ascending; ties keep their original atom order."""
    X = as_outcomes(X)
    perm = tuple(sorted(range(X.n), key=lambda i: X[i]))
    return OrderStatistics(tuple(X[i] for i in perm), perm)


def cdf(X, t: RationalLike) -> Fraction:
    """F_X(t) = #{i : x_i <= t} / n."""
    X = as_outcomes(X)
    t = to_rational(t)
    return Fraction(sum(1 for x in X if x <= t), X.n)


def integrated_cdf(X, t: RationalLike) -> Fraction:
    """Integral of F_X over (-inf, t], via (1/n) * sum of (t - x_i)^+."""
    X = as_outcomes(X)
    t = to_rational(t)
    return sum((t - x for x in X if x < t), Fraction(0)) / X.n


def integrated_cdf_curve(X, ts) -> list[Fraction]:
    """:func:`integrated_cdf` at each point of the ascending sequence ``ts``, in one sweep."""
    X = as_outcomes(X)
    xs = order_statistics(X).sorted
    out = []
    k, below = 0, Fraction(0)
    prev = None
    for t in ts:
        t = to_rational(t)
        if prev is not None and t < prev:
            raise ValueError("evaluation points must be ascending")
        while k < X.n and xs[k] < t:
            below += xs[k]
            k += 1
        out.append((k * t - below) / X.n)
        prev = t
    return out
