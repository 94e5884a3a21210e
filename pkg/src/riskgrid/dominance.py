"""Second-order dominance, comonotonicity and doubly stochastic machinery.

Orientation: outcomes are losses. ``X <= Y`` (X is dominated by Y, Y is
the riskier variable) means that for every l = 1..n the sum of the l
largest outcomes of X is at most that of Y (weak submajorization). The
three tests below decide this relation independently:

* ``WEAK_MAJORIZATION``: compare the sums of the l largest outcomes;
* ``AVAR_GRID``: AVaR_{i/n}(X) <= AVaR_{i/n}(Y) for i = 0..n-1;
* ``INTEGRATED_CDF``: the integrated CDF of the gains -X lies below that
  of -Y everywhere, i.e. -X second-order dominates -Y.

Under this relation every law-invariant coherent risk measure satisfies
rho(X) <= rho(Y), and there is a doubly stochastic A with X <= A Y.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .avar import avar_grid
from .core import DimensionError, OutcomeVector, as_outcomes, integrated_cdf_curve, to_rational


class DominanceError(ValueError):
    """A dominance precondition does not hold (e.g. X is not dominated by Y)."""


class InconsistentMethodsError(RuntimeError):
    """The dominance tests disagree. Never expected; signals a bug."""


class NotDoublyStochasticError(ValueError):
    pass


def _same_n(X: OutcomeVector, Y: OutcomeVector) -> None:
    if X.n != Y.n:
        raise DimensionError(f"dimension mismatch: {X.n} vs {Y.n}")


def is_comonotone(X, Y) -> tuple[bool, Optional[tuple[int, int]]]:
    """Check (x_i - x_j)(y_i - y_j) >= 0 for every pair of atoms.

    Returns ``(True, None)`` or ``(False, (i, j))`` with the first violating
    pair in lexicographic order (0-based atom indices).
    """
    X, Y = as_outcomes(X), as_outcomes(Y)
    _same_n(X, Y)
    for i in range(X.n):
        for j in range(i + 1, X.n):
            if (X[i] - X[j]) * (Y[i] - Y[j]) < 0:
                return False, (i, j)
    return True, None


class Method(enum.Enum):
    INTEGRATED_CDF = "IntegratedCdf"
    AVAR_GRID = "AvarGrid"
    WEAK_MAJORIZATION = "WeakMajorization"
    ALL = "All"


class Relation(enum.Enum):
    LEFT_DOMINATED = "LeftDominated"  # X <= Y
    RIGHT_DOMINATED = "RightDominated"  # Y <= X
    EQUIVALENT = "Equivalent"
    INCOMPARABLE = "Incomparable"


@dataclass(frozen=True)
class MethodEvidence:
    """Outcome of one test in both directions.

    ``x_fails`` is the first point where "X <= Y" fails (None if it holds)
    and ``y_fails`` the same for "Y <= X". Points are a prefix length l, a
    grid index i, or a threshold t, depending on the method.
    """

    method: Method
    x_fails: Optional[object]
    y_fails: Optional[object]

    @property
    def relation(self) -> Relation:
        return _relation(self.x_fails is None, self.y_fails is None)


@dataclass(frozen=True)
class DominanceVerdict:
    relation: Relation
    witnesses: dict = field(default_factory=dict)

    @property
    def methods_agree(self) -> bool:
        return all(ev.relation == self.relation for ev in self.witnesses.values())

    @property
    def left_dominated(self) -> bool:
        """True when X <= Y holds (including equivalence)."""
        return self.relation in (Relation.LEFT_DOMINATED, Relation.EQUIVALENT)


def _relation(x_le_y: bool, y_le_x: bool) -> Relation:
    if x_le_y and y_le_x:
        return Relation.EQUIVALENT
    if x_le_y:
        return Relation.LEFT_DOMINATED
    if y_le_x:
        return Relation.RIGHT_DOMINATED
    return Relation.INCOMPARABLE


def _first_failure(points, lhs, rhs):
    for p, a, b in zip(points, lhs, rhs):
        if a > b:
            return p
    return None


def top_sums(X) -> list[Fraction]:
    """Sums of the l largest outcomes for l = 1..n."""
    out, acc = [], Fraction(0)
    for v in sorted(as_outcomes(X), reverse=True):
        acc += v
        out.append(acc)
    return out


def _by_majorization(X, Y) -> MethodEvidence:
    sx, sy = top_sums(X), top_sums(Y)
    ls = range(1, X.n + 1)
    return MethodEvidence(Method.WEAK_MAJORIZATION, _first_failure(ls, sx, sy), _first_failure(ls, sy, sx))


def _by_avar_grid(X, Y) -> MethodEvidence:
    gx, gy = avar_grid(X)[:-1], avar_grid(Y)[:-1]
    levels = range(X.n)
    return MethodEvidence(Method.AVAR_GRID, _first_failure(levels, gx, gy), _first_failure(levels, gy, gx))


def _by_integrated_cdf(X, Y) -> MethodEvidence:
    # Piecewise linear in t with kinks only at outcome values of -X, -Y, and
    # both have slope 1 beyond the last kink, so the kinks suffice.
    nx, ny = -X, -Y
    ts = sorted(set(nx) | set(ny))
    fx = integrated_cdf_curve(nx, ts)
    fy = integrated_cdf_curve(ny, ts)
    # X <= Y  iff  the gains -X dominate -Y  iff  int F_{-X} <= int F_{-Y}
    return MethodEvidence(Method.INTEGRATED_CDF, _first_failure(ts, fx, fy), _first_failure(ts, fy, fx))


_TESTS = {
    Method.WEAK_MAJORIZATION: _by_majorization,
    Method.AVAR_GRID: _by_avar_grid,
    Method.INTEGRATED_CDF: _by_integrated_cdf,
}


def ssd_compare(X, Y, method: Method = Method.ALL) -> DominanceVerdict:
    """Decide the dominance relation between X and Y.

    With ``Method.ALL`` the three tests run independently and
    :class:`InconsistentMethodsError` is raised if they disagree.
    """
    X, Y = as_outcomes(X), as_outcomes(Y)
    _same_n(X, Y)
    method = Method(method)
    chosen = list(_TESTS) if method is Method.ALL else [method]
    evidence = {m: _TESTS[m](X, Y) for m in chosen}
    relations = {ev.relation for ev in evidence.values()}
    if len(relations) != 1:
        detail = ", ".join(f"{m.value}={ev.relation.value}" for m, ev in evidence.items())
        raise InconsistentMethodsError(f"dominance tests disagree: {detail}")
    return DominanceVerdict(relations.pop(), evidence)


Matrix = tuple[tuple[Fraction, ...], ...]


def as_matrix(rows) -> Matrix:
    rows = tuple(tuple(to_rational(v) for v in row) for row in rows)
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise DimensionError("matrix must be square and nonempty")
    return rows


def identity_matrix(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def permutation_matrix(perm: Sequence[int]) -> Matrix:
    """Row i has its single 1 in column perm[i]."""
    n = len(perm)
    return tuple(tuple(Fraction(int(perm[i] == j)) for j in range(n)) for i in range(n))


def matmul(A: Matrix, B: Matrix) -> Matrix:
    n = len(A)
    return tuple(
        tuple(sum((A[i][k] * B[k][j] for k in range(n) if A[i][k]), Fraction(0)) for j in range(n))
        for i in range(n)
    )


def apply(A: Matrix, X) -> OutcomeVector:
    X = as_outcomes(X)
    if len(A) != X.n:
        raise DimensionError(f"matrix of size {len(A)} applied to a vector of size {X.n}")
    return OutcomeVector(sum((a * x for a, x in zip(row, X)), Fraction(0)) for row in A)


def is_doubly_stochastic(A) -> bool:
    A = as_matrix(A)
    n = len(A)
    return (
        all(v >= 0 for row in A for v in row)
        and all(sum(row) == 1 for row in A)
        and all(sum(A[i][j] for i in range(n)) == 1 for j in range(n))
    )


@dataclass(frozen=True)
class BirkhoffDecomposition:
    """A = sum_k weight_k * P(perm_k), with P(perm)[i][perm[i]] = 1."""

    terms: tuple[tuple[Fraction, tuple[int, ...]], ...]

    def reconstruct(self) -> Matrix:
        n = len(self.terms[0][1])
        out = [[Fraction(0)] * n for _ in range(n)]
        for weight, perm in self.terms:
            for i, j in enumerate(perm):
                out[i][j] += weight
        return tuple(tuple(r) for r in out)


def _perfect_matching(support: list[list[bool]]) -> Optional[list[int]]:
    """Kuhn's augmenting-path matching; rows and columns tried in index order."""
    n = len(support)
    match_col: list[int] = [-1] * n  # column -> row

    def augment(i: int, seen: list[bool]) -> bool:
        for j in range(n):
            if support[i][j] and not seen[j]:
                seen[j] = True
                if match_col[j] == -1 or augment(match_col[j], seen):
                    match_col[j] = i
                    return True
        return False

    for i in range(n):
        if not augment(i, [False] * n):
            return None
    perm = [0] * n
    for j, i in enumerate(match_col):
        perm[i] = j
    return perm


def birkhoff_decompose(A) -> BirkhoffDecomposition:
    """Write a doubly stochastic matrix as a convex combination of permutations.

    Each round finds a perfect matching on the positive entries (one exists
    by Hall's theorem), removes the smallest matched entry times that
    permutation, and repeats. Every round drops the residual to a face of
    lower dimension, so at most n^2 - 2n + 2 terms are produced.
    """
    A = as_matrix(A)
    if not is_doubly_stochastic(A):
        raise NotDoublyStochasticError("input is not doubly stochastic")
    n = len(A)
    R = [list(row) for row in A]
    terms = []
    remaining = Fraction(1)
    while remaining > 0:
        perm = _perfect_matching([[v > 0 for v in row] for row in R])
        if perm is None:  # pragma: no cover - excluded by Birkhoff's theorem
            raise RuntimeError("no perfect matching on the positive support")
        weight = min(R[i][perm[i]] for i in range(n))
        for i in range(n):
            R[i][perm[i]] -= weight
        remaining -= weight
        terms.append((weight, tuple(perm)))
    return BirkhoffDecomposition(tuple(terms))


def _water_fill(x_desc: list[Fraction], total: Fraction) -> list[Fraction]:
    """Raise the smallest entries of x_desc to a common floor c so the sum is ``total``.

    Returns max(x_i, c) for the unique c that hits the total. Requires
    sum(x_desc) <= total.
    """
    n = len(x_desc)
    surplus = total - sum(x_desc)
    if surplus == 0:
        return list(x_desc)
    # raise the bottom m entries to a floor c with x_{n-m} >= c >= x_{n-m-1}
    for m in range(1, n + 1):
        bottom = x_desc[n - m:]
        c = (sum(bottom) + surplus) / m
        if m == n or c <= x_desc[n - m - 1]:
            return x_desc[: n - m] + [c] * m
    raise AssertionError("unreachable")


def hlp_transfer_matrix(X, Y) -> Matrix:
    """Build a doubly stochastic A with X <= A Y componentwise.

    Requires X <= Y in the dominance order. Working on both vectors sorted
    in decreasing order: first lift X to Z >= X with sum(Z) = sum(Y) by
    raising its smallest entries to a common floor, which keeps Z majorized
    by Y; then move Y to Z by a chain of T-transforms, each averaging two
    coordinates. The product of the chain is mapped back to the original
    atom order through the two sorting permutations.
    """
    X, Y = as_outcomes(X), as_outcomes(Y)
    _same_n(X, Y)
    if not ssd_compare(X, Y, Method.WEAK_MAJORIZATION).left_dominated:
        raise DominanceError("X is not dominated by Y; no transfer matrix exists")
    n = X.n
    sx = sorted(range(n), key=lambda i: (-X[i], i))
    sy = sorted(range(n), key=lambda i: (-Y[i], i))
    z = _water_fill([X[i] for i in sx], sum(Y, Fraction(0)))
    y = [Y[i] for i in sy]

    P = [list(row) for row in identity_matrix(n)]
    while y != z:
        # j: last index with y_j > z_j; k: first index after j with y_k < z_k
        j = max(i for i in range(n) if y[i] > z[i])
        k = min(i for i in range(j + 1, n) if y[i] < z[i])
        delta = min(y[j] - z[j], z[k] - y[k])
        lam = 1 - delta / (y[j] - y[k])
        # T = lam*I + (1-lam)*swap(j, k), applied on the left of P
        row_j, row_k = P[j], P[k]
        P[j] = [lam * a + (1 - lam) * b for a, b in zip(row_j, row_k)]
        P[k] = [(1 - lam) * a + lam * b for a, b in zip(row_j, row_k)]
        y[j], y[k] = y[j] - delta, y[k] + delta

    A = [[Fraction(0)] * n for _ in range(n)]
    for r in range(n):
        for s in range(n):
            A[sx[r]][sy[s]] = P[r][s]
    return tuple(tuple(row) for row in A)
