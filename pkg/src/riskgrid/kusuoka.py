"""Spectral and Kusuoka representations of law-invariant coherent risk.

On the uniform n-point space a comonotone additive coherent risk measure
is a mixture of the grid AVaRs, and equivalently a nondecreasing weight
vector applied to the order statistics::

    rho(X) = sum_{i=0}^{n} mu_i AVaR_{i/n}(X) = sum_j w_j X_[j]

Matching the coefficient of X_[j] gives the conversions used here::

    w_j  = sum_{i<j} mu_i / (n - i)          (mu_n is added to w_n)
    mu_i = (n - i) * (w_{i+1} - w_i),  w_0 := 0

AVaR_1 and AVaR_{(n-1)/n} both equal max(X) on this space, so mass at
level 1 is value-equivalent to mass at level (n-1)/n.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .avar import avar_grid
from .core import DimensionError, RationalLike, as_outcomes, order_statistics, to_rational


class RepresentationError(ValueError):
    """A weight vector or mixing measure violates its invariants."""


def _rationals(values: Iterable[RationalLike]) -> tuple[Fraction, ...]:
    return tuple(to_rational(v) for v in values)


@dataclass(frozen=True)
class SpectralWeights:
    """Weights 0 <= w_1 <= ... <= w_n <= 1 summing to 1."""

    w: tuple[Fraction, ...]

    def __init__(self, w: Iterable[RationalLike]):
        w = _rationals(w)
        if not w:
            raise RepresentationError("spectral weights need n >= 1 entries")
        if w[0] < 0:
            raise RepresentationError("spectral weights must be nonnegative")
        if any(a > b for a, b in zip(w, w[1:])):
            raise RepresentationError("spectral weights must be nondecreasing")
        if sum(w) != 1:
            raise RepresentationError(f"spectral weights must sum to 1, got {sum(w)}")
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return len(self.w)

    def __iter__(self):
        return iter(self.w)


@dataclass(frozen=True)
class KusuokaMeasure:
    """Mixing weights mu_0..mu_n over the levels 0, 1/n, ..., (n-1)/n, 1."""

    mu: tuple[Fraction, ...]

    def __init__(self, mu: Iterable[RationalLike]):
        mu = _rationals(mu)
        if len(mu) < 2:
            raise RepresentationError("a Kusuoka measure has n + 1 >= 2 entries")
        if any(m < 0 or m > 1 for m in mu):
            raise RepresentationError("Kusuoka weights must lie in [0, 1]")
        if sum(mu) != 1:
            raise RepresentationError(f"Kusuoka weights must sum to 1, got {sum(mu)}")
        object.__setattr__(self, "mu", mu)

    @property
    def n(self) -> int:
        return len(self.mu) - 1

    def __iter__(self):
        return iter(self.mu)

    @classmethod
    def point_mass(cls, n: int, i: int) -> "KusuokaMeasure":
        """delta_i: all mass at level i/n (i = n is level 1)."""
        if not 0 <= i <= n:
            raise RepresentationError(f"level index must lie in [0, {n}]")
        return cls(1 if k == i else 0 for k in range(n + 1))

    def canonical(self) -> "KusuokaMeasure":
        """Value-equivalent form with the level-1 mass folded into level (n-1)/n."""
        mu = list(self.mu)
        mu[-2] += mu[-1]
        mu[-1] = Fraction(0)
        return KusuokaMeasure(mu)


@dataclass(frozen=True)
class KusuokaFamily:
    """A finite, nonempty, ordered collection of Kusuoka measures.

    Order matters only for the argmax tie-break in :func:`eval_family`;
    duplicates are kept unless :meth:`deduplicated` is called.
    """

    members: tuple[KusuokaMeasure, ...]

    def __init__(self, members: Iterable):
        members = tuple(m if isinstance(m, KusuokaMeasure) else KusuokaMeasure(m) for m in members)
        if not members:
            raise RepresentationError("a Kusuoka family must be nonempty")
        if len({m.n for m in members}) != 1:
            raise DimensionError("family members have different dimensions")
        object.__setattr__(self, "members", members)

    @property
    def n(self) -> int:
        return self.members[0].n

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def deduplicated(self) -> "KusuokaFamily":
        seen: dict[tuple, KusuokaMeasure] = {}
        for m in self.members:
            seen.setdefault(m.mu, m)
        return KusuokaFamily(seen.values())


@dataclass(frozen=True)
class NaturalRiskStatistic:
    """max over a finite family of spectral weight vectors."""

    family: tuple[SpectralWeights, ...]

    def __init__(self, family: Iterable):
        family = tuple(w if isinstance(w, SpectralWeights) else SpectralWeights(w) for w in family)
        if not family:
            raise RepresentationError("a natural risk statistic needs at least one weight vector")
        if len({w.n for w in family}) != 1:
            raise DimensionError("weight vectors have different dimensions")
        object.__setattr__(self, "family", family)

    @property
    def n(self) -> int:
        return self.family[0].n

    def __iter__(self):
        return iter(self.family)


def _check_n(expected: int, X) -> None:
    if X.n != expected:
        raise DimensionError(f"expected an outcome vector of dimension {expected}, got {X.n}")


def eval_spectral(W: SpectralWeights, X) -> Fraction:
    """<W, X_os> with X_os sorted ascending."""
    X = as_outcomes(X)
    _check_n(W.n, X)
    xs = order_statistics(X).sorted
    return sum((w * x for w, x in zip(W.w, xs)), Fraction(0))


def eval_kusuoka(mu: KusuokaMeasure, X) -> Fraction:
    X = as_outcomes(X)
    _check_n(mu.n, X)
    return sum((m * a for m, a in zip(mu.mu, avar_grid(X))), Fraction(0))


def eval_family(M: KusuokaFamily, X) -> tuple[Fraction, int]:
    """Largest member value and the lowest (0-based) index attaining it."""
    X = as_outcomes(X)
    if not len(M):
        raise RepresentationError("empty family")
    grid = avar_grid(X)
    _check_n(M.n, X)
    best, arg = None, -1
    for k, mu in enumerate(M.members):
        v = sum((m * a for m, a in zip(mu.mu, grid)), Fraction(0))
        if best is None or v > best:
            best, arg = v, k
    return best, arg


def eval_nrs(Wfam: NaturalRiskStatistic, X) -> Fraction:
    X = as_outcomes(X)
    return max(eval_spectral(W, X) for W in Wfam.family)


def spectral_to_kusuoka(W) -> KusuokaMeasure:
    W = W if isinstance(W, SpectralWeights) else SpectralWeights(W)
    n = W.n
    w = (Fraction(0),) + W.w
    mu = [(n - i) * (w[i + 1] - w[i]) for i in range(n)]
    mu.append(Fraction(0))
    return KusuokaMeasure(mu)


def kusuoka_to_spectral(mu) -> SpectralWeights:
    mu = mu if isinstance(mu, KusuokaMeasure) else KusuokaMeasure(mu)
    n = mu.n
    w = []
    acc = Fraction(0)
    for j in range(n):
        acc += mu.mu[j] / (n - j)
        w.append(acc)
    w[-1] += mu.mu[n]
    return SpectralWeights(w)


def family_to_nrs(M: KusuokaFamily) -> NaturalRiskStatistic:
    return NaturalRiskStatistic(kusuoka_to_spectral(mu) for mu in M.members)


class Comonotonicity(enum.Enum):
    COMONOTONE_BY_FORM = "ComonotoneByForm"
    NOT_COMONOTONE_BY_FORM = "NotComonotoneByForm"


def classify_comonotone(rf) -> Comonotonicity:
    """Classify by the shape of the representation, not by behaviour.

    A single mixture with no mass at level 1 has the comonotone additive
    form; mass at level 1 or a family of several members does not. Note
    that delta_n and delta_{n-1} give identical values on this space, yet
    only the latter is classified comonotone. The behavioural verdict is
    produced by :func:`riskgrid.axioms.check_comonotone_additivity`.

    ``rf`` may be a KusuokaMeasure, a KusuokaFamily, or a RiskFunctional
    wrapping either.
    """
    payload = getattr(rf, "payload", rf)
    if isinstance(payload, KusuokaMeasure):
        members: Sequence[KusuokaMeasure] = (payload,)
    elif isinstance(payload, KusuokaFamily):
        members = payload.members
    else:
        raise TypeError(f"cannot classify a {type(payload).__name__} by Kusuoka form")
    if len(members) == 1 and members[0].mu[-1] == 0:
        return Comonotonicity.COMONOTONE_BY_FORM
    return Comonotonicity.NOT_COMONOTONE_BY_FORM
