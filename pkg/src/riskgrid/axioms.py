"""Seeded property auditor for risk functionals on the uniform n-point space.

Each check draws random inputs, evaluates the functional exactly, and
records the first violation it sees as a :class:`Counterexample`. Since
arithmetic is exact, a recorded counterexample is a proof of violation and
:meth:`Counterexample.replay` reproduces it.

Randomness for trial ``t`` comes from ``random.Random(f"{tag}:{seed}:{t}")``,
so a report depends only on the config, never on execution order.

Sampling: outcome values are uniform on the lattice
``lo + k * (hi - lo) / lattice`` for k = 0..lattice; mixing weights
lambda are uniform on {0, 1/q, ..., 1} with q = ``lattice``; scale factors
are p/q with p in 1..2q, q in 1..4.
"""
from __future__ import annotations

import enum
import functools
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .avar import as_level, avar
from . import kusuoka as _k
from .core import OutcomeVector, RationalLike, as_outcomes, to_rational
from .dominance import Relation, apply, is_comonotone, ssd_compare


class Kind(enum.Enum):
    SPECTRAL = "spectral"
    KUSUOKA = "kusuoka"
    KUSUOKA_FAMILY = "family"
    NATURAL_RISK_STATISTIC = "nrs"
    AVAR = "avar"
    MEAN = "mean"
    MAX = "max"


@dataclass(frozen=True)
class RiskFunctional:
    """A closed-world risk statistic: one of the representable kinds.

    Build instances with the classmethods; payloads are validated by their
    own types, so an invalid spectral vector is rejected before any audit.
    """

    kind: Kind
    n: int
    payload: object = None

    @classmethod
    def spectral(cls, w) -> "RiskFunctional":
        W = w if isinstance(w, _k.SpectralWeights) else _k.SpectralWeights(w)
        return cls(Kind.SPECTRAL, W.n, W)

    @classmethod
    def kusuoka(cls, mu) -> "RiskFunctional":
        mu = mu if isinstance(mu, _k.KusuokaMeasure) else _k.KusuokaMeasure(mu)
        return cls(Kind.KUSUOKA, mu.n, mu)

    @classmethod
    def family(cls, members) -> "RiskFunctional":
        M = members if isinstance(members, _k.KusuokaFamily) else _k.KusuokaFamily(members)
        return cls(Kind.KUSUOKA_FAMILY, M.n, M)

    @classmethod
    def natural(cls, weights) -> "RiskFunctional":
        W = weights if isinstance(weights, _k.NaturalRiskStatistic) else _k.NaturalRiskStatistic(weights)
        return cls(Kind.NATURAL_RISK_STATISTIC, W.n, W)

    @classmethod
    def builtin_avar(cls, n: int, alpha: RationalLike) -> "RiskFunctional":
        return cls(Kind.AVAR, n, as_level(alpha))

    @classmethod
    def builtin_mean(cls, n: int) -> "RiskFunctional":
        return cls(Kind.MEAN, n)

    @classmethod
    def builtin_max(cls, n: int) -> "RiskFunctional":
        return cls(Kind.MAX, n)

    @property
    def name(self) -> str:
        if self.kind is Kind.AVAR:
            return f"avar({self.payload})"
        return self.kind.value

    def evaluate(self, X) -> Fraction:
        X = as_outcomes(X)
        if X.n != self.n:
            raise _k.DimensionError(f"functional of dimension {self.n} given {X.n} outcomes")
        kind, p = self.kind, self.payload
        if kind is Kind.SPECTRAL:
            return _k.eval_spectral(p, X)
        if kind is Kind.KUSUOKA:
            return _k.eval_kusuoka(p, X)
        if kind is Kind.KUSUOKA_FAMILY:
            return _k.eval_family(p, X)[0]
        if kind is Kind.NATURAL_RISK_STATISTIC:
            return _k.eval_nrs(p, X)
        if kind is Kind.AVAR:
            return avar(X, p)
        if kind is Kind.MEAN:
            return X.mean()
        return X.max()

    __call__ = evaluate


@dataclass(frozen=True)
class AuditConfig:
    trials: int = 1000
    seed: int = 0
    value_range: tuple[Fraction, Fraction] = (Fraction(-10), Fraction(10))
    n: int = 4
    lattice: int = 20

    def __post_init__(self):
        lo, hi = (to_rational(v) for v in self.value_range)
        object.__setattr__(self, "value_range", (lo, hi))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not lo < hi:
            raise ValueError("value_range must be a nondegenerate interval")
        if self.n < 1 or self.lattice < 1:
            raise ValueError("n and lattice must be positive")


def _rng(tag: str, seed: int, trial: int) -> random.Random:
    return random.Random(f"{tag}:{seed}:{trial}")


def sample_value(rng: random.Random, value_range, lattice: int) -> Fraction:
    lo, hi = value_range
    return lo + (hi - lo) * Fraction(rng.randint(0, lattice), lattice)


def sample_vector(rng: random.Random, n: int, value_range, lattice: int) -> OutcomeVector:
    return OutcomeVector(sample_value(rng, value_range, lattice) for _ in range(n))


def _sample_unit(rng: random.Random, q: int) -> Fraction:
    return Fraction(rng.randint(0, q), q)


def _sample_scale(rng: random.Random, q: int) -> Fraction:
    d = rng.randint(1, 4)
    return Fraction(rng.randint(1, 2 * q), d)


# --- counterexamples -------------------------------------------------------

def _sides(axiom: str, rho, inputs: dict) -> tuple[Fraction, Fraction]:
    """Recompute (lhs, rhs) of an axiom's inequality or equality from inputs."""
    if axiom == "monotonicity":
        return rho(inputs["Y1"]), rho(inputs["Y2"])
    if axiom == "positive_homogeneity":
        k = inputs["k"]
        return rho(inputs["Y"] * k), k * rho(inputs["Y"])
    if axiom == "convexity":
        lam = inputs["lambda"]
        Y0, Y1 = inputs["Y0"], inputs["Y1"]
        return rho(Y0 * (1 - lam) + Y1 * lam), (1 - lam) * rho(Y0) + lam * rho(Y1)
    if axiom == "translation_invariance":
        c = inputs["c"]
        return rho(inputs["Y"] + c), rho(inputs["Y"]) + c
    if axiom == "permutation_invariance":
        X = inputs["X"]
        return rho(X.permuted(inputs["permutation"])), rho(X)
    if axiom == "comonotone_additivity":
        X, Y = inputs["X"], inputs["Y"]
        return rho(X + Y), rho(X) + rho(Y)
    if axiom == "ssd_preservation":
        return rho(inputs["X"]), rho(inputs["Y"])
    raise KeyError(axiom)


# axioms stated as "lhs <= rhs"; all others are equalities
_INEQUALITIES = {"monotonicity", "convexity", "ssd_preservation"}


def _violated(axiom: str, lhs: Fraction, rhs: Fraction) -> bool:
    return lhs > rhs if axiom in _INEQUALITIES else lhs != rhs


@dataclass(frozen=True)
class Counterexample:
    axiom: str
    inputs: dict
    lhs: Fraction
    rhs: Fraction

    @property
    def relation(self) -> str:
        return "<=" if self.axiom in _INEQUALITIES else "=="

    def replay(self, rho) -> bool:
        """True if ``rho`` still violates the axiom on these inputs, with the same sides."""
        lhs, rhs = _sides(self.axiom, rho, self.inputs)
        return (lhs, rhs) == (self.lhs, self.rhs) and _violated(self.axiom, lhs, rhs)


@dataclass(frozen=True)
class AxiomResult:
    axiom: str
    trials: int
    counterexample: Optional[Counterexample] = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None


@dataclass(frozen=True)
class AuditReport:
    functional: str
    results: tuple[AxiomResult, ...]
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, axiom: str) -> AxiomResult:
        for r in self.results:
            if r.axiom == axiom:
                return r
        raise KeyError(axiom)

    def counterexamples(self) -> list[Counterexample]:
        return [r.counterexample for r in self.results if r.counterexample is not None]


class _Tracker:
    """First-failure bookkeeping for one axiom across trials."""

    def __init__(self, axiom: str, rho):
        self.axiom, self.rho = axiom, rho
        self.trials = 0
        self.failure: Optional[Counterexample] = None

    def check(self, **inputs) -> None:
        if self.failure is not None:
            return
        self.trials += 1
        lhs, rhs = _sides(self.axiom, self.rho, inputs)
        if _violated(self.axiom, lhs, rhs):
            self.failure = Counterexample(self.axiom, inputs, lhs, rhs)

    def result(self) -> AxiomResult:
        return AxiomResult(self.axiom, self.trials, self.failure)


def _name(rho) -> str:
    return getattr(rho, "name", getattr(rho, "__name__", type(rho).__name__))


# --- checks ----------------------------------------------------------------

COHERENCE_AXIOMS = ("monotonicity", "positive_homogeneity", "convexity", "translation_invariance")


def check_coherence(rho, cfg: AuditConfig, axioms: Optional[Iterable[str]] = None) -> AuditReport:
    """Monotonicity, positive homogeneity, convexity, translation invariance.

    ``rho`` is a RiskFunctional or any object with ``n`` and a call
    returning an exact value (used for planted test doubles). ``axioms``
    restricts the check to a subset; the sampled inputs do not change.
    """
    names = COHERENCE_AXIOMS if axioms is None else tuple(a for a in COHERENCE_AXIOMS if a in set(axioms))
    if axioms is not None and len(names) != len(set(axioms)):
        raise ValueError(f"unknown coherence axioms: {sorted(set(axioms) - set(COHERENCE_AXIOMS))}")
    track = {a: _Tracker(a, rho) for a in names}
    vr, q = cfg.value_range, cfg.lattice
    width = vr[1] - vr[0]
    for t in range(cfg.trials):
        if all(tr.failure for tr in track.values()):
            break
        rng = _rng("coherence", cfg.seed, t)
        Y0 = sample_vector(rng, cfg.n, vr, q)
        Y1 = sample_vector(rng, cfg.n, vr, q)
        bump = OutcomeVector(width * _sample_unit(rng, q) for _ in range(cfg.n))
        lam = _sample_unit(rng, q)
        k = _sample_scale(rng, q)
        c = sample_value(rng, (-width, width), 2 * q)
        inputs = {
            "monotonicity": {"Y1": Y0, "Y2": Y0 + bump},
            "positive_homogeneity": {"Y": Y0, "k": k},
            "convexity": {"Y0": Y0, "Y1": Y1, "lambda": lam},
            "translation_invariance": {"Y": Y0, "c": c},
        }
        for a, tr in track.items():
            tr.check(**inputs[a])
    return AuditReport(_name(rho), tuple(track[a].result() for a in names))


def check_permutation_invariance(rho, cfg: AuditConfig, sweep_vectors: int = 3) -> AuditReport:
    """Random permutations, plus every permutation of a few vectors when n <= 6."""
    tr = _Tracker("permutation_invariance", rho)
    for t in range(cfg.trials):
        if tr.failure:
            break
        rng = _rng("permutation", cfg.seed, t)
        X = sample_vector(rng, cfg.n, cfg.value_range, cfg.lattice)
        perm = list(range(cfg.n))
        rng.shuffle(perm)
        tr.check(X=X, permutation=tuple(perm))
    if cfg.n <= 6:
        for v in range(sweep_vectors):
            X = sample_vector(_rng("permutation-sweep", cfg.seed, v), cfg.n, cfg.value_range, cfg.lattice)
            for perm in itertools.permutations(range(cfg.n)):
                tr.check(X=X, permutation=perm)
    return AuditReport(_name(rho), (tr.result(),))


def gen_comonotone_pair(
    seed: int,
    n: int,
    value_range=(Fraction(-10), Fraction(10)),
    lattice: int = 20,
    step_functions: Optional[tuple[Callable, Callable]] = None,
) -> tuple[OutcomeVector, OutcomeVector]:
    """Draw a latent Z and return (f(Z), g(Z)) for nondecreasing f, g.

    By default f and g are random nondecreasing step functions on the
    distinct values of Z, with steps drawn from the value lattice. Pass
    ``step_functions`` to use fixed maps instead (they must be
    nondecreasing for the output to be comonotone).
    """
    rng = _rng("comonotone", seed, 0)
    vr = tuple(to_rational(v) for v in value_range)
    Z = [rng.randint(0, n - 1) for _ in range(n)]
    if step_functions is not None:
        f, g = step_functions
        return OutcomeVector(f(z) for z in Z), OutcomeVector(g(z) for z in Z)
    levels = sorted(set(Z))
    fx = sorted(sample_value(rng, vr, lattice) for _ in levels)
    gy = sorted(sample_value(rng, vr, lattice) for _ in levels)
    rank = {z: r for r, z in enumerate(levels)}
    return OutcomeVector(fx[rank[z]] for z in Z), OutcomeVector(gy[rank[z]] for z in Z)


@functools.lru_cache(maxsize=8)
def _lattice_comonotone_pairs(n: int, values: tuple) -> tuple:
    """Every comonotone pair with entries in ``values`` (small n only)."""
    vectors = [OutcomeVector(v) for v in itertools.product(values, repeat=n)]
    return tuple((X, Y) for X in vectors for Y in vectors if is_comonotone(X, Y)[0])


def check_comonotone_additivity(rho, cfg: AuditConfig, sweep: bool = True) -> AuditReport:
    """Exact additivity on generated comonotone pairs.

    For n <= 4 the pairs on the lattice {-1, 0, 1, 2}^n are swept
    exhaustively as well. When ``rho`` has a Kusuoka form the report's
    ``extra`` carries both the behavioural and the by-form verdict.
    """
    tr = _Tracker("comonotone_additivity", rho)
    for t in range(cfg.trials):
        if tr.failure:
            break
        X, Y = gen_comonotone_pair(
            cfg.seed * 1_000_003 + t, cfg.n, cfg.value_range, cfg.lattice
        )
        tr.check(X=X, Y=Y)
    if sweep and cfg.n <= 4:
        values = (-1, 0, 1, 2) if cfg.n <= 3 else (-1, 0, 1)
        for X, Y in _lattice_comonotone_pairs(cfg.n, values):
            if tr.failure is not None:
                break
            tr.check(X=X, Y=Y)
    result = tr.result()
    extra = {"behavioral": "pass" if result.passed else "fail"}
    try:
        extra["by_form"] = _k.classify_comonotone(rho).value
    except TypeError:
        pass
    return AuditReport(_name(rho), (result,), extra)


def random_doubly_stochastic(rng: random.Random, n: int, terms: Optional[int] = None, q: int = 12):
    """Random convex combination of ``terms`` random permutation matrices."""
    terms = terms or rng.randint(1, 2 * n)
    raw = [rng.randint(1, q) for _ in range(terms)]
    total = sum(raw)
    A = [[Fraction(0)] * n for _ in range(n)]
    for r in raw:
        perm = list(range(n))
        rng.shuffle(perm)
        for i, j in enumerate(perm):
            A[i][j] += Fraction(r, total)
    return tuple(tuple(row) for row in A)


def gen_dominated_pair(rng: random.Random, cfg: AuditConfig, constructive: bool):
    """Return (X, Y) with X dominated by Y, or None if rejection sampling misses.

    Constructive: Y random, X = A Y - slack for a random doubly stochastic
    A and a nonnegative lattice slack.
    """
    vr, q = cfg.value_range, cfg.lattice
    Y = sample_vector(rng, cfg.n, vr, q)
    if constructive:
        A = random_doubly_stochastic(rng, cfg.n)
        width = vr[1] - vr[0]
        slack = OutcomeVector(
            width * _sample_unit(rng, q) if rng.random() < 0.5 else 0 for _ in range(cfg.n)
        )
        return apply(A, Y) - slack, Y
    X = sample_vector(rng, cfg.n, vr, q)
    verdict = ssd_compare(X, Y)
    if verdict.left_dominated:
        return X, Y
    if verdict.relation is Relation.RIGHT_DOMINATED:
        return Y, X
    return None


def check_ssd_preservation(rho, cfg: AuditConfig) -> AuditReport:
    """rho(X) <= rho(Y) whenever X is dominated by Y.

    Trials alternate between rejection sampling (pairs filtered through
    ssd_compare) and constructive generation (X = A Y - slack).
    """
    tr = _Tracker("ssd_preservation", rho)
    for t in range(cfg.trials):
        if tr.failure:
            break
        rng = _rng("ssd", cfg.seed, t)
        pair = gen_dominated_pair(rng, cfg, constructive=t % 2 == 0)
        if pair is not None:
            tr.check(X=pair[0], Y=pair[1])
    return AuditReport(_name(rho), (tr.result(),))


def audit(rho, cfg: AuditConfig) -> list[AuditReport]:
    """Run every check; the comonotone check only reports, it is not an axiom."""
    return [
        check_coherence(rho, cfg),
        check_permutation_invariance(rho, cfg),
        check_ssd_preservation(rho, cfg),
        check_comonotone_additivity(rho, cfg),
    ]


def replay_all(rho, report: AuditReport) -> bool:
    return all(cx.replay(rho) for cx in report.counterexamples())


__all__ = [
    "AuditConfig",
    "AuditReport",
    "AxiomResult",
    "Counterexample",
    "Kind",
    "RiskFunctional",
    "audit",
    "check_coherence",
    "check_comonotone_additivity",
    "check_permutation_invariance",
    "check_ssd_preservation",
    "gen_comonotone_pair",
    "gen_dominated_pair",
    "random_doubly_stochastic",
    "replay_all",
    "sample_vector",
]
