"""Command-line front end.

    qamean mean --generator power:2 --entries 1,7 --weights 0.5,0.5
    qamean diagnose --family exp-seq@0,1 --tests deriv-ratio --points 0,1 --n 1..64
    qamean construct prop51 --target midpoint --eps 0.1 --n-max 64 --certify --emit-family fam.json
    qamean diagnose --family file:fam.json --tests integral --points 0.2,0.8
    qamean compare --f power:2 --g power:3 --grid 1,2,50

Exit codes: 0 success, 2 validation error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .comparison import INCOMPARABLE, compare_generators
from .constructions import TargetSetSpec, build_prop51_family, build_prop53_family
from .diagnostics import (
    NGrid,
    TrendConfig,
    derivative_ratio_test,
    empirical_max_test,
    integral_test,
    ratio_test,
)
from .domain import Interval
from .errors import ConstructionInfeasibleError, DomainError, InvalidParameterError, QAMError
from .generators import Generator, GeneratorFamily, affine_transform, arrow_profile_family, builtin_generator, builtin_family
from .means import TwoPointQuery, WeightedSample, qa_mean
from .profiles import ArrowProfile
from .quadrature import QuadratureConfig

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC = 0, 2, 3
TESTS = ("ratio", "deriv-ratio", "integral", "empirical")
WEIGHT_NORMALIZE_TOL = 1e-9


class ValidationError(Exception):
    pass


# -- spec parsing -------------------------------------------------------------


def parse_floats(text: str, count: int | None = None, what: str = "list") -> list[float]:
    try:
        vals = [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise ValidationError(f"cannot parse {what} {text!r} as comma-separated numbers") from None
    if count is not None and len(vals) != count:
        raise ValidationError(f"{what} needs {count} values, got {len(vals)}")
    if any(not math.isfinite(v) for v in vals):
        raise ValidationError(f"{what} must be finite")
    return vals


def parse_domain(text: str) -> Interval:
    lo, hi = parse_floats(text, 2, "domain")
    try:
        return Interval(lo, hi)
    except QAMError as e:
        raise ValidationError(str(e)) from None


def parse_generator(spec: str, domain: Interval) -> Generator:
    """``identity``, ``log``, ``power:p``, ``exp:t`` or ``affine(SPEC,alpha,beta)``, optionally ``@lo,hi``."""
    spec = spec.strip()
    head, at, dom = spec.rpartition("@")
    if at and ")" not in dom:
        spec, domain = head, parse_domain(dom)
    if spec.startswith("affine(") and spec.endswith(")"):
        try:
            inner, a, b = spec[len("affine("):-1].rsplit(",", 2)
            alpha, beta = float(a), float(b)
        except ValueError:
            raise ValidationError(f"cannot parse {spec!r}; expected affine(SPEC,alpha,beta)") from None
        return affine_transform(parse_generator(inner, domain), alpha, beta)
    kind, _, params = spec.partition(":")
    params = parse_floats(params, what="generator parameters") if params else []
    return builtin_generator(kind, params, domain)


def load_family_artifact(path: str, quad: QuadratureConfig | None = None) -> GeneratorFamily:
    try:
        data = json.loads(Path(path).read_text())
        domain = Interval(data["domain"]["lo"], data["domain"]["hi"])
        profiles = {
            int(p["n"]): ArrowProfile.from_knots((k["x"], k["a"]) for k in p["knots"]) for p in data["profiles"]
        }
        anchor = float(data["anchor"])
    except (OSError, KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"cannot load family artifact {path!r}: {e}") from None
    return arrow_profile_family(profiles, domain, anchor=anchor, quad=quad, label=f"file:{path}")


def parse_family(spec: str, quad: QuadratureConfig | None = None) -> GeneratorFamily:
    """``kind[:p1[,p2]]@lo,hi`` or ``file:path.json``.

    kinds: exp-seq, power-seq (optional scale c: parameter c*n), identity, log,
    constant:GENERATOR (e.g. constant:power:2@1,2).
    """
    if spec.startswith("file:"):
        return load_family_artifact(spec[len("file:"):], quad)
    if "@" not in spec:
        raise ValidationError(f"family spec {spec!r} needs a domain suffix @lo,hi")
    body, dom = spec.rsplit("@", 1)
    domain = parse_domain(dom)
    kind, _, params = body.partition(":")
    if kind in ("exp-seq", "power-seq"):
        return builtin_family(kind, parse_floats(params, what="family parameters") if params else (), domain)
    if kind in ("identity", "log"):
        return builtin_family("constant", builtin_generator(kind, [], domain), domain)
    if kind == "constant":
        return builtin_family("constant", parse_generator(params, domain), domain)
    raise ValidationError(f"unknown family kind {kind!r}")


def parse_ngrid(text: str | None, n_list: str | None) -> NGrid:
    try:
        if n_list:
            return NGrid(tuple(int(t) for t in n_list.split(",") if t.strip()))
        parts = (text or "1..64").split("..")
        if len(parts) not in (2, 3):
            raise ValueError
        start, stop = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
        return NGrid.range(start, stop, step)
    except (ValueError, QAMError):
        raise ValidationError(f"bad n-grid {text or n_list!r}; use a..b[..step] or --n-list") from None


# -- run configuration ----------------------------------------------------------

CONFIG_KEYS = {
    "family", "tests", "points", "pq", "queries", "xi", "n", "n_list",
    "thresholds", "quadrature", "format", "output",
}


@dataclass
class RunConfig:
    command: str
    family: str
    tests: list
    ns: NGrid
    xyz: tuple | None = None
    pq: tuple | None = None
    queries: list = field(default_factory=list)
    trend: TrendConfig = field(default_factory=TrendConfig)
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    format: str = "csv"
    output: str | None = None

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "family": self.family,
            "tests": list(self.tests),
            "n": list(self.ns.indices),
            "points": None if self.xyz is None else list(self.xyz),
            "pq": None if self.pq is None else list(self.pq),
            "queries": [q.to_dict() for q in self.queries],
            "thresholds": self.trend.to_dict(),
            "quadrature": self.quad.to_dict(),
            "format": self.format,
        }


def _load_config_file(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, ValueError) as e:
        raise ValidationError(f"cannot read config {path!r}: {e}") from None
    if not isinstance(data, dict):
        raise ValidationError("config file must hold a JSON object")
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
    return data


def build_run_config(args) -> RunConfig:
    file_cfg = _load_config_file(args.config) if args.config else {}

    def pick(name, default=None):
        v = getattr(args, name, None)
        return v if v is not None else file_cfg.get(name, default)

    family = pick("family")
    if not family:
        raise ValidationError("--family is required")
    tests = pick("tests", "ratio,deriv-ratio,integral,empirical")
    tests = [t.strip() for t in tests.split(",")] if isinstance(tests, str) else list(tests)
    bad = [t for t in tests if t not in TESTS]
    if bad or not tests:
        raise ValidationError(f"unknown tests {bad}; choose from {','.join(TESTS)}")

    thr = dict(file_cfg.get("thresholds", {}))
    for key in ("div_threshold", "zero_tol", "stability_tol", "window"):
        if getattr(args, key, None) is not None:
            thr[key] = getattr(args, key)
    qcfg = dict(file_cfg.get("quadrature", {}))
    for key, attr in (("method", "quad_method"), ("max_step", "max_step"), ("abs_tol", "abs_tol")):
        if getattr(args, attr, None) is not None:
            qcfg[key] = getattr(args, attr)
    try:
        trend = TrendConfig(**thr)
        quad = QuadratureConfig(**qcfg)
    except (TypeError, QAMError) as e:
        raise ValidationError(f"bad thresholds/quadrature settings: {e}") from None

    def as_text(v):
        return ",".join(str(t) for t in v) if isinstance(v, (list, tuple)) else v

    points = pick("points")
    xyz = pq = None
    default_queries = []
    xi = float(pick("xi", 0.5))
    if points is not None:
        pts = parse_floats(as_text(points), what="--points")
        if len(pts) == 3:
            xyz, pq = tuple(pts), (pts[0], pts[2])
        elif len(pts) == 2:
            pq = tuple(pts)
        else:
            raise ValidationError("--points takes x,y,z or p,q")
        default_queries = [(pq[0], pq[1], xi)]
    if pick("pq") is not None:
        pq = tuple(parse_floats(as_text(pick("pq")), 2, "--pq"))
    raw_queries = pick("queries") or []
    query_triples = [parse_floats(as_text(q), 3, "--query") for q in raw_queries] or default_queries
    try:
        queries = [TwoPointQuery(*q) for q in query_triples]
    except QAMError as e:
        raise ValidationError(str(e)) from None

    if "ratio" in tests and xyz is None:
        raise ValidationError("ratio test needs --points x,y,z")
    if any(t in tests for t in ("deriv-ratio", "integral")) and pq is None:
        raise ValidationError("derivative-ratio/integral tests need --points or --pq")
    if "empirical" in tests and not queries:
        raise ValidationError("empirical test needs --points or --query x,z,xi")

    n_list = pick("n_list")
    ns = parse_ngrid(pick("n"), as_text(n_list) if n_list is not None else None)
    fmt = pick("format", "csv")
    if fmt not in ("csv", "json"):
        raise ValidationError("--format must be csv or json")
    return RunConfig("diagnose", family, tests, ns, xyz, pq, queries, trend, quad, fmt, pick("output"))


# -- report encoding --------------------------------------------------------------


def fmt_float(v) -> str:
    return "" if v is None else repr(float(v))


def _summary_params(report, cfg: RunConfig) -> dict:
    out = {"params": report.params, "thresholds": cfg.trend.to_dict(), "evidence": report.verdict.evidence}
    if report.test == "integral":
        out["quadrature"] = cfg.quad.to_dict()
        out["cross_check"] = report.extras.get("cross_check")
    return out


def encode_csv(reports, cfg: RunConfig) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["test", "n", "value", "status"])
    for r in reports:
        for n, v, s in zip(r.ns, r.values, r.status):
            w.writerow([r.test, n, fmt_float(v), s])
        w.writerow([r.test, "summary", r.verdict.classification,
                    json.dumps(_summary_params(r, cfg), sort_keys=True, separators=(",", ":"))])
    return buf.getvalue()


def encode_json(reports, cfg: RunConfig) -> str:
    doc = {
        "config": cfg.to_dict(),
        "reports": [
            {
                "test": r.test,
                "params": r.params,
                "values": [{"n": n, "value": v, "status": s} for n, v, s in zip(r.ns, r.values, r.status)],
                "verdict": r.verdict.classification,
                "evidence": r.verdict.evidence,
                **({"cross_check": r.extras.get("cross_check")} if r.test == "integral" else {}),
            }
            for r in reports
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def run_diagnose(cfg: RunConfig) -> tuple[list, str]:
    fam = parse_family(cfg.family, cfg.quad)
    reports = []
    for test in cfg.tests:
        if test == "ratio":
            reports.append(ratio_test(fam, *cfg.xyz, cfg.ns, cfg.trend))
        elif test == "deriv-ratio":
            reports.append(derivative_ratio_test(fam, *cfg.pq, cfg.ns, cfg.trend))
        elif test == "integral":
            reports.append(integral_test(fam, *cfg.pq, cfg.ns, cfg.quad, cfg.trend))
        elif test == "empirical":
            reports.extend(empirical_max_test(fam, cfg.queries, cfg.ns, cfg.trend))
    text = encode_csv(reports, cfg) if cfg.format == "csv" else encode_json(reports, cfg)
    return reports, text


# -- commands -------------------------------------------------------------------------


def _emit(text: str, path: str | None):
    if path:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def cmd_mean(args) -> int:
    entries = parse_floats(args.entries, what="--entries")
    weights = parse_floats(args.weights, what="--weights") if args.weights else [1.0] * len(entries)
    if len(weights) != len(entries) or not entries:
        raise ValidationError("--entries and --weights must have the same nonzero length")
    total = math.fsum(weights)
    if args.weights is not None and abs(total - 1.0) > 1e-12:
        if args.strict_weights or abs(total - 1.0) > WEIGHT_NORMALIZE_TOL:
            raise ValidationError(f"weights sum to {total!r}, not 1")
        print(f"warning: weights sum to {total!r}; normalising", file=sys.stderr)
    lo, hi = min(entries), max(entries)
    domain = Interval(lo, hi) if lo < hi else Interval(lo - 1e-9 * max(1.0, abs(lo)), hi + 1e-9 * max(1.0, abs(hi)))
    try:
        g = parse_generator(args.generator, domain)
        sample = WeightedSample.normalized(entries, weights)
    except QAMError as e:
        raise ValidationError(str(e)) from None
    value = qa_mean(g, sample)
    print(f"{value:.15g}")
    return EXIT_OK


def cmd_diagnose(args) -> int:
    cfg = build_run_config(args)
    reports, text = run_diagnose(cfg)
    _emit(text, cfg.output)
    completed = any(s == "ok" for r in reports for s in r.status)
    return EXIT_OK if completed else EXIT_NUMERIC


def cmd_construct(args) -> int:
    U = parse_domain(args.interval)
    quad = QuadratureConfig()
    try:
        if args.which == "prop51":
            target = args.target
            if target == "midpoint":
                V = TargetSetSpec.midpoint(U)
            elif target.startswith("cantor:"):
                base = Interval(U.lo + U.width / 4, U.hi - U.width / 4)
                V = TargetSetSpec.cantor(int(target.split(":", 1)[1]), base)
            elif target.startswith("points:"):
                V = TargetSetSpec("finite-points", U, tuple(parse_floats(target.split(":", 1)[1], what="target points")))
            else:
                raise ValidationError(f"unknown target {target!r}; use midpoint, cantor:DEPTH or points:a,b,...")
            n_max = args.n_max or 64
            fam, cert = build_prop51_family(V, args.eps, U, n_max, quad)
        else:
            n_max = args.k_max or 32
            query = tuple(parse_floats(args.query, 2, "--query"))
            fam, cert = build_prop53_family(U, n_max, args.rationals, query, quad)
    except ConstructionInfeasibleError as e:
        raise ValidationError(f"infeasible construction: {e}") from None
    except QAMError as e:
        raise ValidationError(str(e)) from None
    doc = {
        "domain": U.to_dict(),
        "anchor": fam.anchor,
        "profiles": [{"n": n, "knots": fam.profiles(n).to_knots()} for n in range(1, n_max + 1)],
    }
    if args.certify:
        doc["certificate"] = cert.to_dict()
    _emit(json.dumps(doc, separators=(",", ":")) + "\n", args.emit_family)
    return EXIT_OK


def cmd_compare(args) -> int:
    lo, hi, count = parse_floats(args.grid, 3, "--grid")
    if int(count) != count or count < 1:
        raise ValidationError("grid count must be a positive integer")
    domain = parse_domain(f"{lo},{hi}")
    try:
        f = parse_generator(args.f, domain)
        g = parse_generator(args.g, domain)
    except QAMError as e:
        raise ValidationError(str(e)) from None
    for gen in (f, g):
        if not gen.domain.contains_interval(domain):
            raise ValidationError(f"grid [{lo}, {hi}] is outside the domain of {gen.label}")
    verdict = compare_generators(f, g, domain.grid(int(count)))
    print(verdict.relation)
    if verdict.relation == INCOMPARABLE:
        above, below = verdict.witness
        print(f"witness: A_f > A_g at {above!r}; A_f < A_g at {below!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qamean", description="Quasi-arithmetic means and max-family diagnostics.")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mean", help="evaluate a weighted quasi-arithmetic mean")
    m.add_argument("--generator", required=True)
    m.add_argument("--entries", required=True)
    m.add_argument("--weights")
    m.add_argument("--strict-weights", action="store_true", help="reject weights that do not sum to 1")
    m.set_defaults(func=cmd_mean)

    d = sub.add_parser("diagnose", help="run max-family criteria over an n-grid")
    d.add_argument("--config", help="JSON run configuration; flags override it")
    d.add_argument("--family")
    d.add_argument("--tests")
    d.add_argument("--points", help="x,y,z (ratio; p=x, q=z) or p,q")
    d.add_argument("--pq")
    d.add_argument("--query", dest="queries", action="append", help="x,z,xi (repeatable)")
    d.add_argument("--xi", type=float)
    d.add_argument("--n", help="a..b[..step], default 1..64")
    d.add_argument("--n-list", dest="n_list")
    d.add_argument("--div-threshold", dest="div_threshold", type=float)
    d.add_argument("--zero-tol", dest="zero_tol", type=float)
    d.add_argument("--stability-tol", dest="stability_tol", type=float)
    d.add_argument("--window", type=int)
    d.add_argument("--quad-method", dest="quad_method", choices=["composite-Simpson", "adaptive-Simpson"])
    d.add_argument("--max-step", dest="max_step", type=float)
    d.add_argument("--abs-tol", dest="abs_tol", type=float)
    d.add_argument("--format", choices=["csv", "json"])
    d.add_argument("--output")
    d.set_defaults(func=cmd_diagnose)

    c = sub.add_parser("construct", help="build a bump-sum Arrow-profile family")
    c.add_argument("which", choices=["prop51", "prop53"])
    c.add_argument("--interval", default="0,1")
    c.add_argument("--target", default="midpoint")
    c.add_argument("--eps", type=float, default=0.1)
    c.add_argument("--n-max", dest="n_max", type=int)
    c.add_argument("--k-max", dest="k_max", type=int)
    c.add_argument("--rationals", type=int)
    c.add_argument("--query", default="0.2,0.8")
    c.add_argument("--emit-family", dest="emit_family")
    c.add_argument("--certify", action="store_true")
    c.set_defaults(func=cmd_construct)

    k = sub.add_parser("compare", help="order two generators by their Arrow operators")
    k.add_argument("--f", required=True)
    k.add_argument("--g", required=True)
    k.add_argument("--grid", required=True, help="lo,hi,count")
    k.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, InvalidParameterError, DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (QAMError, ArithmeticError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
