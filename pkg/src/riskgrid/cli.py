"""Command-line front end.

Input files are UTF-8 JSON objects with any of the members ``outcomes``,
``outcomes_y``, ``spectral``, ``kusuoka``, ``family`` and ``matrix``.
Numbers are strings ("3", "0.8", "2/5") and are parsed exactly. Results
are printed as JSON on stdout.

Exit codes: 0 success, 2 malformed input, 3 audit found a violation,
4 precondition failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional

from .avar import LevelError, avar, avar_dual, avar_grid, avar_quantile_integral, avar_ru, value_at_risk
from . import kusuoka as _k
from .axioms import (
    AuditConfig,
    AuditReport,
    Counterexample,
    RiskFunctional,
    check_coherence,
    check_comonotone_additivity,
    check_permutation_invariance,
    check_ssd_preservation,
)
from .core import DimensionError, OutcomeVector, format_rational, to_rational
from .dominance import (
    DominanceError,
    Method,
    NotDoublyStochasticError,
    birkhoff_decompose,
    hlp_transfer_matrix,
    is_comonotone,
    ssd_compare,
)

EXIT_OK = 0
EXIT_MALFORMED = 2
EXIT_VIOLATION = 3
EXIT_PRECONDITION = 4

SEED_ENV = "RISKGRID_SEED"


class MalformedInput(ValueError):
    pass


class PreconditionFailed(ValueError):
    pass


# --- parsing ---------------------------------------------------------------

def parse_number(text) -> Fraction:
    if not isinstance(text, (str, int)) or isinstance(text, bool):
        raise MalformedInput(f"numbers must be strings like \"3\", \"0.8\" or \"2/5\", got {text!r}")
    try:
        return to_rational(text)
    except (TypeError, ValueError) as exc:
        raise MalformedInput(str(exc)) from exc


def _number_list(doc: dict, key: str) -> list[Fraction]:
    value = doc.get(key)
    if not isinstance(value, list) or not value:
        raise MalformedInput(f"\"{key}\" must be a nonempty list of number strings")
    return [parse_number(v) for v in value]


def parse_level(text: str, n: Optional[int] = None) -> Fraction:
    """Parse a level: "1/2", "0.25", or "grid:i" meaning i/n."""
    if text.startswith("grid:"):
        if n is None:
            raise MalformedInput("grid:i levels need outcomes to fix n")
        try:
            i = int(text[5:])
        except ValueError as exc:
            raise MalformedInput(f"bad grid level {text!r}") from exc
        return Fraction(i, n)
    value = parse_number(text)
    if not 0 <= value <= 1:
        raise MalformedInput(f"level must lie in [0, 1], got {text}")
    return value


def load_document(path: Optional[str], csv_path: Optional[str]) -> dict:
    doc: dict = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedInput(f"cannot read {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise MalformedInput("input document must be a JSON object")
    if csv_path:
        try:
            with open(csv_path, encoding="utf-8") as fh:
                doc["outcomes"] = [line.strip() for line in fh if line.strip()]
        except OSError as exc:
            raise MalformedInput(f"cannot read {csv_path}: {exc}") from exc
    return doc


def _outcomes(doc: dict, key: str = "outcomes") -> OutcomeVector:
    return OutcomeVector(_number_list(doc, key))


def _kusuoka_measure(values) -> _k.KusuokaMeasure:
    if not isinstance(values, list):
        raise MalformedInput("Kusuoka weights must be a list")
    return _k.KusuokaMeasure(parse_number(v) for v in values)


def _family(doc: dict) -> _k.KusuokaFamily:
    members = doc.get("family")
    if not isinstance(members, list) or not members:
        raise MalformedInput("\"family\" must be a nonempty list of Kusuoka weight lists")
    return _k.KusuokaFamily(_kusuoka_measure(m) for m in members)


# --- rendering -------------------------------------------------------------

def render_decimal(value: Fraction, digits: int) -> str:
    """Round half-even to ``digits`` places using integer arithmetic only."""
    scaled = round(value * 10**digits)
    sign = "-" if scaled < 0 else ""
    body = str(abs(scaled)).rjust(digits + 1, "0")
    if digits == 0:
        return sign + body
    return f"{sign}{body[:-digits]}.{body[-digits:]}"


class Renderer:
    def __init__(self, fmt: str = "exact", digits: int = 6):
        self.fmt, self.digits = fmt, digits

    def __call__(self, value: Fraction) -> str:
        if self.fmt == "decimal":
            return render_decimal(value, self.digits)
        return format_rational(value)

    def many(self, values) -> list[str]:
        return [self(v) for v in values]


EXACT = Renderer()


def _exact_input(value):
    if isinstance(value, OutcomeVector):
        return [format_rational(v) for v in value]
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, tuple):
        return list(value)
    return value


def counterexample_to_json(cx: Counterexample, render: Renderer = EXACT) -> dict:
    # inputs are always exact so the certificate replays
    return {
        "axiom": cx.axiom,
        "inputs": {k: _exact_input(v) for k, v in sorted(cx.inputs.items())},
        "lhs": render(cx.lhs),
        "rhs": render(cx.rhs),
        "relation": cx.relation,
    }


def counterexample_from_json(doc: dict) -> Counterexample:
    inputs = {}
    for key, value in doc["inputs"].items():
        if key == "permutation":
            inputs[key] = tuple(value)
        elif isinstance(value, list):
            inputs[key] = OutcomeVector(parse_number(v) for v in value)
        else:
            inputs[key] = parse_number(value)
    return Counterexample(doc["axiom"], inputs, parse_number(doc["lhs"]), parse_number(doc["rhs"]))


def report_to_json(report: AuditReport, render: Renderer = EXACT) -> dict:
    checks = {}
    for r in report.results:
        entry = {"status": "pass" if r.passed else "fail", "trials": r.trials}
        if r.counterexample is not None:
            entry["counterexample"] = counterexample_to_json(r.counterexample, render)
        checks[r.axiom] = entry
    out = {"functional": report.functional, "checks": checks}
    if report.extra:
        out["comonotone"] = dict(report.extra)
    return out


def merge_reports(reports: list[AuditReport]) -> AuditReport:
    results, extra = [], {}
    for rep in reports:
        results.extend(rep.results)
        extra.update(rep.extra)
    return AuditReport(reports[0].functional, tuple(results), extra)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def render_report(report: AuditReport, fmt: str = "exact", digits: int = 6) -> str:
    """Deterministic JSON serialization of an audit report."""
    return dumps(report_to_json(report, Renderer(fmt, digits)))


# --- subcommands -----------------------------------------------------------

def cmd_avar(args, doc, render):
    X = _outcomes(doc)
    alpha = parse_level(args.alpha, X.n)
    if args.route == "ru":
        res = avar_ru(X, alpha)
        lower = None if res.minimizers.lower is None else render(res.minimizers.lower)
        return {"value": render(res.value), "minimizers": [lower, render(res.minimizers.upper)]}
    if args.route == "dual":
        res = avar_dual(X, alpha)
        return {"value": render(res.value), "density": render.many(res.density)}
    if args.route == "integral":
        return {"value": render(avar_quantile_integral(X, alpha))}
    return {"value": render(avar(X, alpha))}


def cmd_var(args, doc, render):
    X = _outcomes(doc)
    return {"value": render(value_at_risk(X, parse_level(args.p, X.n)))}


def cmd_grid(args, doc, render):
    return {"grid": render.many(avar_grid(_outcomes(doc)))}


def cmd_eval(args, doc, render):
    X = _outcomes(doc)
    if "family" in doc:
        value, arg = _k.eval_family(_family(doc), X)
        return {"value": render(value), "argmax": arg}
    if "kusuoka" in doc:
        return {"value": render(_k.eval_kusuoka(_kusuoka_measure(doc["kusuoka"]), X))}
    if "spectral" in doc:
        return {"value": render(_k.eval_spectral(_k.SpectralWeights(_number_list(doc, "spectral")), X))}
    raise MalformedInput("eval needs one of \"spectral\", \"kusuoka\" or \"family\"")


def cmd_convert(args, doc, render):
    if args.direction == "spectral-to-kusuoka":
        mu = _k.spectral_to_kusuoka(_number_list(doc, "spectral"))
        return {"kusuoka": render.many(mu.mu)}
    W = _k.kusuoka_to_spectral(_number_list(doc, "kusuoka"))
    return {"spectral": render.many(W.w)}


def cmd_ssd(args, doc, render):
    X, Y = _outcomes(doc), _outcomes(doc, "outcomes_y")
    verdict = ssd_compare(X, Y, Method(args.method))
    out = {"relation": verdict.relation.value, "methods_agree": verdict.methods_agree}
    if args.witnesses:
        def point(p):
            return render(p) if isinstance(p, Fraction) else p
        out["witnesses"] = {
            m.value: {"x_fails": point(ev.x_fails), "y_fails": point(ev.y_fails)}
            for m, ev in verdict.witnesses.items()
        }
    return out


def cmd_comonotone(args, doc, render):
    ok, witness = is_comonotone(_outcomes(doc), _outcomes(doc, "outcomes_y"))
    return {"comonotone": ok, "witness": None if witness is None else list(witness)}


def _matrix(doc) -> list[list[Fraction]]:
    rows = doc.get("matrix")
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise MalformedInput("\"matrix\" must be a nonempty list of rows")
    return [[parse_number(v) for v in row] for row in rows]


def cmd_birkhoff(args, doc, render):
    try:
        dec = birkhoff_decompose(_matrix(doc))
    except NotDoublyStochasticError as exc:
        raise PreconditionFailed(str(exc)) from exc
    return {"terms": [{"weight": render(w), "permutation": list(p)} for w, p in dec.terms]}


def cmd_hlp(args, doc, render):
    try:
        A = hlp_transfer_matrix(_outcomes(doc), _outcomes(doc, "outcomes_y"))
    except DominanceError as exc:
        raise PreconditionFailed(str(exc)) from exc
    return {"matrix": [render.many(row) for row in A]}


def _functional(args, doc) -> RiskFunctional:
    kind = args.kind
    if kind == "spectral":
        return RiskFunctional.spectral(_number_list(doc, "spectral"))
    if kind == "kusuoka":
        return RiskFunctional.kusuoka(_kusuoka_measure(doc.get("kusuoka")))
    if kind == "family":
        return RiskFunctional.family(_family(doc))
    if args.n is None:
        raise MalformedInput(f"--n is required for --kind {kind}")
    if kind == "avar":
        if args.alpha is None:
            raise MalformedInput("--alpha is required for --kind avar")
        return RiskFunctional.builtin_avar(args.n, parse_level(args.alpha, args.n))
    if kind == "mean":
        return RiskFunctional.builtin_mean(args.n)
    return RiskFunctional.builtin_max(args.n)


_CHECKS = {
    "coherence": check_coherence,
    "permutation": check_permutation_invariance,
    "ssd": check_ssd_preservation,
    "comonotone": check_comonotone_additivity,
}


def cmd_audit(args, doc, render):
    rf = _functional(args, doc)
    lo, hi = parse_number(args.low), parse_number(args.high)
    try:
        cfg = AuditConfig(trials=args.trials, seed=args.seed, value_range=(lo, hi), n=rf.n)
    except ValueError as exc:
        raise MalformedInput(str(exc)) from exc
    names = args.checks.split(",")
    unknown = [c for c in names if c not in _CHECKS]
    if unknown:
        raise MalformedInput(f"unknown checks: {', '.join(unknown)}")
    report = merge_reports([_CHECKS[c](rf, cfg) for c in names])
    return report_to_json(report, render), (EXIT_OK if report.passed else EXIT_VIOLATION)


COMMANDS = {
    "avar": cmd_avar,
    "var": cmd_var,
    "grid": cmd_grid,
    "eval": cmd_eval,
    "convert": cmd_convert,
    "ssd": cmd_ssd,
    "comonotone": cmd_comonotone,
    "birkhoff": cmd_birkhoff,
    "hlp": cmd_hlp,
    "audit": cmd_audit,
}


def _default_seed() -> int:
    try:
        return int(os.environ.get(SEED_ENV, "0"))
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="input", help="JSON input document")
    common.add_argument("--csv", help="plain outcome vector, one value per line")
    common.add_argument("--format", choices=("exact", "decimal"), default="exact")
    common.add_argument("--digits", type=int, default=6)

    parser = argparse.ArgumentParser(prog="riskgrid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("avar", parents=[common], help="average value-at-risk")
    p.add_argument("--alpha", required=True)
    p.add_argument("--route", choices=("closed", "integral", "ru", "dual"), default="closed")
    p = sub.add_parser("var", parents=[common], help="value-at-risk (lower quantile)")
    p.add_argument("--p", required=True)
    sub.add_parser("grid", parents=[common], help="AVaR at every grid level")
    sub.add_parser("eval", parents=[common], help="evaluate a spectral/Kusuoka/family measure")
    p = sub.add_parser("convert", parents=[common], help="convert between representations")
    p.add_argument("--direction", choices=("spectral-to-kusuoka", "kusuoka-to-spectral"), required=True)
    p = sub.add_parser("ssd", parents=[common], help="second-order dominance of outcomes vs outcomes_y")
    p.add_argument("--method", choices=[m.value for m in Method], default="All")
    p.add_argument("--witnesses", action="store_true")
    sub.add_parser("comonotone", parents=[common], help="pairwise comonotonicity test")
    sub.add_parser("birkhoff", parents=[common], help="Birkhoff decomposition of a matrix")
    sub.add_parser("hlp", parents=[common], help="doubly stochastic A with outcomes <= A outcomes_y")
    p = sub.add_parser("audit", parents=[common], help="randomized axiom audit")
    p.add_argument("--kind", choices=("spectral", "kusuoka", "family", "avar", "mean", "max"), required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--alpha")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--low", default="-10")
    p.add_argument("--high", default="10")
    p.add_argument("--checks", default="coherence,permutation,ssd")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_MALFORMED
    code = EXIT_OK
    try:
        doc = load_document(args.input, args.csv)
        render = Renderer(args.format, args.digits)
        result = COMMANDS[args.command](args, doc, render)
        if isinstance(result, tuple):
            result, code = result
    except (PreconditionFailed, LevelError) as exc:
        print(f"riskgrid: precondition failed: {exc}", file=stderr)
        return EXIT_PRECONDITION
    except (MalformedInput, _k.RepresentationError, DimensionError, ValueError, TypeError) as exc:
        print(f"riskgrid: malformed input: {exc}", file=stderr)
        return EXIT_MALFORMED
    print(dumps(result), file=stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
