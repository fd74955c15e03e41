"""Command line interface: load a fan/pair JSON file, run one command, emit a JSON report."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from .bounds import (
    FORMULAS,
    BigMagnitude,
    BoundsError,
    bound_covers,
    explicit_bound,
    explicit_bound_details,
    verify_volume_bounds,
)
from .difficulty import (
    coefficient_monoid,
    delta_M,
    difficulty_bound,
    difficulty_vector,
    e_plus,
    lex_compare,
    rho_pair,
    s_invariant,
    theorem_M,
)
from .kernel import GeometryError, primitive
from .mmp import BudgetExceeded, LoopDetected, enumerate_runs, mmp_run, mori_walls
from .nvol import ConeSingularity, minimize_nvol, relative_cone
from .pair import (
    ToricError,
    ToricPair,
    alpha_invariant,
    build_pair,
    is_terminal,
    lct,
    mld,
    numerical_invariants,
    topological_invariants,
)
from .stringy import asymptotic_compare, stringy_E

COMMANDS = (
    "check",
    "invariants",
    "nvol",
    "mld",
    "lct",
    "alpha",
    "mmp-run",
    "mmp-enumerate",
    "difficulty",
    "stringy",
    "cone",
    "bounds",
    "verify",
)
VERIFY_CHECKS = ("delta", "lex", "stringy", "bound")
OPTIONAL_CHECKS = ("volume",)
CACHE_ENV = "TORICMMP_CACHE_DIR"
REQUIRED_FIELDS = ("rank", "rays", "max_cones")


class ParseError(ValueError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        super().__init__(message)
        self.field = field
        self.line = line


class ValidationError(ValueError):
    pass


class UnknownCommand(ValueError):
    pass


# ---------------------------------------------------------------------------
# input


@dataclass
class LoadedInput:
    pair: ToricPair
    data: dict
    digest: str
    warnings: list[str] = field(default_factory=list)


def _digest(data) -> str:
    text = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def _read_json(path: str | None) -> dict:
    if path in (None, "-"):
        text, name = sys.stdin.read(), "<stdin>"
    else:
        try:
            text, name = Path(path).read_text(), path
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{name}: line {exc.lineno} column {exc.colno}: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(data, dict):
        raise ParseError(f"{name}: top level must be a JSON object")
    return data


def _int_vector(x, where: str) -> list[int]:
    if not isinstance(x, list) or not x or any(isinstance(e, bool) or not isinstance(e, int) for e in x):
        raise ParseError(f"field {where!r} must be a nonempty list of integers", field=where)
    return x


def _coefficient(x, where: str) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise ParseError(f"field {where!r} must be an integer or a 'p/q' string", field=where)
    try:
        return Fraction(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"field {where!r}: cannot parse {x!r} as a rational", field=where) from exc


def parse_pair(data: dict, require_complete: bool = False) -> tuple[ToricPair, list[str]]:
    """Validate the fan/pair schema and build the pair; returns the pair and warnings."""
    for name in REQUIRED_FIELDS:
        if name not in data:
            raise ParseError(f"missing field {name!r}", field=name)
    rank = data["rank"]
    if isinstance(rank, bool) or not isinstance(rank, int) or rank < 1:
        raise ParseError("field 'rank' must be a positive integer", field="rank")
    if not isinstance(data["rays"], list):
        raise ParseError("field 'rays' must be a list", field="rays")
    if not isinstance(data["max_cones"], list):
        raise ParseError("field 'max_cones' must be a list", field="max_cones")
    warnings = []
    rays = []
    for i, r in enumerate(data["rays"]):
        r = _int_vector(r, f"rays[{i}]")
        if len(r) != rank:
            raise ParseError(f"rays[{i}] has length {len(r)}, expected {rank}", field=f"rays[{i}]")
        if all(x == 0 for x in r):
            raise ParseError(f"rays[{i}] is the zero vector", field=f"rays[{i}]")
        v = list(primitive(r))
        if v != r:
            warnings.append(f"ray {i} {r} is not primitive; normalized to {v}")
        rays.append(v)
    cones = [_int_vector(c, f"max_cones[{j}]") for j, c in enumerate(data["max_cones"])]
    raw = data.get("coeffs", {})
    if isinstance(raw, dict):
        coeffs = {}
        for k, x in raw.items():
            try:
                idx = int(k)
            except ValueError as exc:
                raise ParseError(f"coeffs key {k!r} is not a ray index", field="coeffs") from exc
            coeffs[idx] = _coefficient(x, f"coeffs[{k}]")
    elif isinstance(raw, list):
        coeffs = {i: _coefficient(x, f"coeffs[{i}]") for i, x in enumerate(raw)}
    else:
        raise ParseError("field 'coeffs' must be an object or a list", field="coeffs")
    mode = data.get("mode", "pair")
    if mode not in ("pair", "subpair"):
        raise ParseError(f"field 'mode' must be 'pair' or 'subpair', got {mode!r}", field="mode")
    try:
        pair = build_pair((rank, rays, cones), coeffs, mode, require_complete=require_complete)
    except (ToricError, GeometryError, IndexError) as exc:
        raise ValidationError(f"{type(exc).__name__}: {exc}") from exc
    return pair, warnings


def load_input(path: str | None, require_complete: bool = False) -> LoadedInput:
    data = _read_json(path)
    pair, warnings = parse_pair(data, require_complete)
    return LoadedInput(pair, data, _digest(data), warnings)


# ---------------------------------------------------------------------------
# report plumbing


def jsonable(x):
    if isinstance(x, (Fraction, Decimal)):
        return str(x)
    if isinstance(x, BigMagnitude):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return x.to_json()
    if x == float("inf"):
        return "inf"
    return x


@dataclass
class Report:
    command: str
    input_digest: str | None = None
    results: dict = field(default_factory=dict)
    checks: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    def check(self, name: str, status, details=None) -> None:
        if isinstance(status, bool):
            status = "pass" if status else "fail"
        self.checks.append({"name": name, "status": status, "details": jsonable(details or {})})

    @property
    def failed(self) -> bool:
        return any(c["status"] == "fail" for c in self.checks)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "input_digest": self.input_digest,
            "results": jsonable(self.results),
            "checks": self.checks,
            "timing": self.timing,
            "warnings": self.warnings,
        }


def render_pretty(report: dict) -> str:
    lines = [f"command       {report['command']}", f"input digest  {report['input_digest']}"]
    for w in report["warnings"]:
        lines.append(f"warning       {w}")
    lines.append("results")
    for k, v in report["results"].items():
        text = json.dumps(v) if not isinstance(v, str) else v
        if len(text) > 100:
            text = text[:97] + "..."
        lines.append(f"  {k:<24}{text}")
    if report["checks"]:
        lines.append("checks")
        for c in report["checks"]:
            lines.append(f"  {c['status']:<8}{c['name']}")
    lines.append(f"time          {report['timing'].get('seconds', 0):.3f} s")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# argument helpers


def _csv_ints(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ParseError(f"cannot parse {text!r} as comma separated integers") from exc


def _csv_fracs(text: str | None) -> list[Fraction] | None:
    if text is None:
        return None
    try:
        return [Fraction(x.strip()) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"cannot parse {text!r} as comma separated rationals") from exc


def _divisor(args, data: dict, n_rays: int, key: str) -> list[Fraction] | None:
    """A divisor from --divisor, or from the input file under ``key`` (list or index map)."""
    if args.divisor is not None:
        d = _csv_fracs(args.divisor)
    elif key in data:
        raw = data[key]
        if isinstance(raw, dict):
            d = [Fraction(0)] * n_rays
            for k, x in raw.items():
                d[int(k)] = _coefficient(x, f"{key}[{k}]")
        else:
            d = [_coefficient(x, f"{key}[{i}]") for i, x in enumerate(raw)]
    else:
        return None
    if len(d) != n_rays:
        raise ParseError(f"divisor has {len(d)} entries, expected one per ray ({n_rays})", field=key)
    return d


def _cones(args, p: ToricPair) -> list[tuple[int, ...]]:
    if args.cone is None:
        return list(p.max_cones)
    cone = tuple(sorted(_csv_ints(args.cone)))
    if not p.fan.is_cone(cone):
        raise ValidationError(f"NotInFan: {list(cone)} is not a cone of the fan")
    return [cone]


def _cache_path(kind: str, digest: str, extra: str) -> Path | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    key = hashlib.sha256(f"{kind}:{digest}:{extra}".encode()).hexdigest()[:32]
    return Path(root) / f"{kind}-{key}.json"


# ---------------------------------------------------------------------------
# commands on a loaded pair


def cmd_check(report: Report, inp: LoadedInput, args) -> None:
    p = inp.pair
    fan = p.fan
    report.results.update(
        rank=p.rank,
        rays=len(p.rays),
        max_cones=len(p.max_cones),
        mode=p.mode,
        complete=fan.complete,
        smooth=fan.is_smooth(),
        projective=p.projective,
        projectivity_witness=p.projectivity_witness,
        pair=p.to_json(),
    )
    report.check("simplicial", True)
    defects = p.alpha.continuity_defects()
    report.check("log_discrepancy_continuous", not defects, {"walls": defects})
    if p.mode == "pair" and p.max_cones:
        values = {str(list(c)): mld(p, c) for c in p.max_cones}
        report.check("klt", all(v > 0 for v in values.values()), {"mld": values})


def cmd_invariants(report: Report, inp: LoadedInput, args) -> None:
    p = inp.pair
    p.require_complete()
    t = topological_invariants(p)
    report.results.update(
        picard=t.picard,
        boundary_picard=t.boundary_picard,
        h_alg=t.h_alg,
        h_vector=t.betti,
        gorenstein_index=t.gorenstein_index,
        cartier_indices=t.cartier_indices,
        rho_pair=t.rho_pair,
        notes=t.notes,
    )
    h = _divisor(args, inp.data, len(p.rays), "H")
    if h is not None:
        num = numerical_invariants(p, h)
        report.results.update(
            vol_boundary=num.vol_boundary,
            vol_log_canonical=num.vol_log_canonical,
            boundary_degree=num.boundary_degree,
            max_coeff=num.max_coeff,
            volume_lower_bound=num.volume_lower_bound,
        )


def cmd_nvol(report: Report, inp: LoadedInput, args) -> None:
    p = inp.pair
    points = []
    for cone in _cones(args, p):
        if len(cone) != p.rank:
            raise ValidationError("nvol needs full dimensional cones")
        s = ConeSingularity.of([p.rays[i] for i in cone], [p.coeffs[i] for i in cone])
        res = minimize_nvol(s, args.tol)
        row = {"cone": list(cone)}
        row.update(res.to_json())
        points.append(row)
        report.check(
            f"nvol_certificate[{','.join(map(str, cone))}]",
            res.grid_certificate <= res.exact_value,
            {"grid_certificate": res.grid_certificate, "exact_value": res.exact_value},
        )
    report.results["points"] = points
    if len(points) == 1:
        report.results["value"] = points[0]["value"]
    report.results["min_value"] = min((Decimal(r["value"]) for r in points), default=None)


def cmd_mld(report: Report, inp: LoadedInput, args) -> None:
    p = inp.pair
    values = [{"cone": list(c), "mld": mld(p, c)} for c in _cones(args, p)]
    report.results["values"] = values
    report.results["min"] = min((v["mld"] for v in values), default=None)


def cmd_lct(report: Report, inp: LoadedInput, args) -> None:
    p = inp.pair
    d = _divisor(args, inp.data, len(p.rays), "D")
    if d is None:
        raise ParseError("lct needs a divisor (--divisor or field 'D')", field="D")
    at = _cones(args, p)[0] if args.cone is not None else None
    value = lct(p, d, at)
    report.results.update(divisor=d, at=list(at) if at else "global", lct=value)


def cmd_alpha(report: Report, inp: LoadedInput, args) -> None:
    p = inp.pair
    L = _divisor(args, inp.data, len(p.rays), "L")
    if L is None:
        raise ParseError("alpha needs a nef divisor (--divisor or field 'L')", field="L")
    report.results.update(divisor=L, alpha=alpha_invariant(p, L), restriction="torus invariant members of the linear series")


def cmd_mmp_run(report: Report, inp: LoadedInput, args) -> None:
    p = inp.pair
    report.results["walls"] = [w.to_json() for w in mori_walls(p)]
    try:
        run = mmp_run(p, args.strategy, args.seed, args.index, args.budget)
    except BudgetExceeded as exc:
        report.results["run"] = exc.partial.to_json()
        report.check("within_budget", False, {"budget": args.budget, "steps": len(exc.partial.steps)})
        return
    report.results["run"] = run.to_json()
    report.check("within_budget", True, {"budget": args.budget, "steps": len(run.steps)})


def _enumeration_summary(enum) -> dict:
    kinds: dict[str, int] = {}
    for step in enum.all_steps():
        kinds[step.kind] = kinds.get(step.kind, 0) + 1
    return {
        "nodes": len(enum.edges),
        "steps_computed": enum.steps_computed,
        "runs": enum.count_runs(),
        "max_length": enum.max_length(),
        "step_kinds": dict(sorted(kinds.items())),
    }


def cmd_mmp_enumerate(report: Report, inp: LoadedInput, args) -> None:
    p = inp.pair
    cache = _cache_path("enumerate", inp.digest, str(args.budget))
    if cache is not None and cache.exists():
        report.results.update(json.loads(cache.read_text()))
        report.results["cached"] = True
        report.check("terminates", True, {"budget": args.budget})
        return
    try:
        enum = enumerate_runs(p, args.budget, args.jobs)
    except BudgetExceeded as exc:
        report.results.update(_enumeration_summary(exc.partial))
        report.check("terminates", False, {"budget": args.budget, "steps_computed": exc.partial.steps_computed})
        return
    except LoopDetected as exc:
        report.check("terminates", False, {"loop": str(exc)})
        return
    summary = _enumeration_summary(enum)
    report.results.update(summary)
    report.check("terminates", True, {"budget": args.budget})
    if cache is not None:
        cache.parent.mkdir(parents=True, exist_ok=True)
        cache.write_text(json.dumps(jsonable(summary), sort_keys=True))


def cmd_difficulty(report: Report, inp: LoadedInput, args) -> None:
    p = inp.pair
    levels = _csv_fracs(args.b) if args.b is not None else None
    v = difficulty_vector(p, levels)
    monoid = coefficient_monoid(v.levels)
    M = theorem_M(monoid)
    delta = delta_M(v, M)
    bound = difficulty_bound(v, M)
    report.results.update(
        vector=v.to_json(),
        sequence=v.sequence(),
        S=monoid.elements,
        M=M,
        delta_M=delta,
        delta_bound=bound,
        e_plus=e_plus(p),
        s=s_invariant(p),
    )
    report.check("delta_bound", delta <= bound, {"delta_M": delta, "bound": bound})
    if not v.exact:
        report.check("d_count_exact", "flagged", {"reason": "fan is not smooth; d counts torus invariant valuations only"})


def cmd_stringy(report: Report, inp: LoadedInput, args) -> None:
    p = inp.pair
    p.require_complete()
    e = stringy_E(p, args.strategy if args.strategy in ("first", "random") else "first", args.seed)
    report.results.update(E=e.to_json(), text=str(e), is_polynomial=e.is_polynomial(), value_at_one=e.at_one())


def cmd_cone(report: Report, inp: LoadedInput, args) -> None:
    p = inp.pair
    r = args.r if args.r is not None else int(inp.data.get("r", 1))
    L = _divisor(args, inp.data, len(p.rays), "L")
    if L is None:
        L = [r * (1 - b) for b in p.coeffs]
    rc = relative_cone(p, L, r)
    s = rc.singularity
    res = minimize_nvol(s, args.tol)
    report.results.update(
        base=rc.base,
        rays=[list(v) for v in s.cone.rays],
        coeffs=s.coeffs,
        grading_ray=rc.grading_ray,
        A_E=rc.log_discrepancy_E,
        lam=rc.lam,
        nvol=res.to_json(),
    )
    for name, ok in rc.checks.items():
        report.check(name, ok)


def _verify_steps(p: ToricPair, args):
    """Birational steps to check, with their run structure: one run or a full enumeration."""
    if args.strategy != "enumerate":
        run = mmp_run(p, args.strategy, args.seed, args.index, args.budget)
        return [s for s in run.birational_steps], [run.pairs()], len(run.birational_steps)
    enum = enumerate_runs(p, args.budget, args.jobs)
    steps = [s for s in enum.all_steps() if s.birational]
    runs = [r.pairs() for r in enum.runs(limit=args.run_limit)]
    return steps, runs, enum.max_length()


def cmd_verify(report: Report, inp: LoadedInput, args) -> None:
    p = inp.pair
    p.require_complete()
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    known = VERIFY_CHECKS + OPTIONAL_CHECKS
    unknown = [c for c in checks if c not in known]
    if unknown:
        raise ParseError(f"unknown check(s) {unknown}; known: {', '.join(known)}", field="checks")
    if "volume" in checks:
        cmd_volume(report, inp, args)
    if not any(c in VERIFY_CHECKS for c in checks):
        return
    try:
        steps, runs, longest = _verify_steps(p, args)
    except (BudgetExceeded, LoopDetected) as exc:
        report.check("terminates", False, {"error": str(exc)})
        return
    report.check("terminates", True, {"budget": args.budget})
    levels = sorted({b for b in p.coeffs if b}, reverse=True)
    M = theorem_M(coefficient_monoid(levels))
    report.results.update(strategy=args.strategy, birational_steps=len(steps), runs_checked=len(runs), max_length=longest, M=M)

    if "delta" in checks or "lex" in checks:
        vectors: dict[int, object] = {}

        def vec(q: ToricPair):
            if id(q) not in vectors:
                vectors[id(q)] = difficulty_vector(q, levels)
            return vectors[id(q)]

        lex_bad, delta_bad = [], []
        for i, s in enumerate(steps):
            va, vb = vec(s.before), vec(s.after)
            if lex_compare(va, vb) != "Greater":
                lex_bad.append({"step": i, "before": va.sequence(), "after": vb.sequence()})
            if not delta_M(vb, M) < delta_M(va, M):
                delta_bad.append({"step": i, "before": delta_M(va, M), "after": delta_M(vb, M)})
        if "lex" in checks:
            report.check("lex_decrease", not lex_bad, {"violations": lex_bad, "steps": len(steps)})
        if "delta" in checks:
            report.check("delta_decrease", not delta_bad, {"violations": delta_bad, "steps": len(steps), "M": M})
        exact = all(v.exact for v in vectors.values())
        if not exact:
            report.check("d_count_exact", "flagged", {"reason": "some pair along the runs has a singular fan"})

    if "stringy" in checks:
        values: dict[int, object] = {}

        def E(q: ToricPair):
            if id(q) not in values:
                values[id(q)] = stringy_E(q)
            return values[id(q)]

        bad = []
        for i, s in enumerate(steps):
            res = asymptotic_compare(E(s.before), E(s.after))
            if res != "Greater":
                bad.append({"step": i, "result": res})
        dup = []
        for j, pairs in enumerate(runs):
            seen: dict = {}
            for i, q in enumerate(pairs):
                e = E(q)
                if e in seen:
                    dup.append({"run": j, "index": i, "duplicate_of": seen[e]})
                seen.setdefault(e, i)
        report.check("stringy_decrease", not bad, {"violations": bad, "steps": len(steps)})
        report.check("stringy_distinct", not dup, {"violations": dup, "runs": len(runs)})

    if "bound" in checks:
        v0 = difficulty_vector(p, levels)
        potential = delta_M(v0, M)
        report.check("length_below_delta", longest <= potential, {"max_length": longest, "delta_M": potential})
        if is_terminal(p):
            rd = rho_pair(p) + v0.d_plain
            bound = explicit_bound("cor_terminal", {"b": levels, "rho_plus_d": rd})
            status = bound_covers(bound, longest)
            report.check(
                "terminal_bound",
                status if status != "Incomparable" else "flagged",
                {"max_length": longest, "bound": bound, "rho_plus_d": rd},
            )
        else:
            report.check("terminal_bound", "flagged", {"reason": "initial pair is not terminal"})


def cmd_bounds(report: Report, args) -> None:
    params: dict = {}
    for name in ("N", "n", "e", "k", "s"):
        if getattr(args, name) is not None:
            params[name] = getattr(args, name)
    if args.rho_d is not None:
        params["rho_plus_d"] = args.rho_d
    if args.eps is not None:
        params["eps"] = _csv_fracs(args.eps)[0]
    if args.b is not None:
        params["b"] = _csv_fracs(args.b)
    if args.S is not None:
        params["S"] = _csv_fracs(args.S)
    if args.formula is None:
        raise ParseError("bounds needs --formula", field="formula")
    report.input_digest = _digest({"formula": args.formula, "params": jsonable(params)})
    details = explicit_bound_details(args.formula, params)
    report.results.update(formula=args.formula, description=FORMULAS[args.formula][0], params=params)
    report.results.update(details)
    report.results["kind"] = details["bound"].kind


def cmd_volume(report: Report, inp: LoadedInput, args) -> None:
    """verify --checks volume: local volume chains at every fixed point."""
    p = inp.pair
    H = _divisor(args, inp.data, len(p.rays), "H")
    if H is None:
        raise ParseError("volume checks need an ample divisor (--divisor or field 'H')", field="H")
    res = verify_volume_bounds(p, H, args.tol)
    report.results["volume"] = res
    report.check("volume_bounds", res["pass"], {"points": res["points"]})


PAIR_COMMANDS: dict[str, Callable] = {
    "check": cmd_check,
    "invariants": cmd_invariants,
    "nvol": cmd_nvol,
    "mld": cmd_mld,
    "lct": cmd_lct,
    "alpha": cmd_alpha,
    "mmp-run": cmd_mmp_run,
    "mmp-enumerate": cmd_mmp_enumerate,
    "difficulty": cmd_difficulty,
    "stringy": cmd_stringy,
    "cone": cmd_cone,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toricmmp", description=__doc__)
    parser.add_argument("command", help="one of: " + ", ".join(COMMANDS))
    parser.add_argument("input", nargs="?", help="fan/pair JSON file ('-' for stdin)")
    parser.add_argument("--tol", type=float, default=1e-6, help="relative tolerance for volume minimization")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--budget", type=int, default=10_000, help="maximum number of MMP steps")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for enumeration")
    parser.add_argument("--pretty", action="store_true", help="human readable output instead of JSON")
    parser.add_argument("--checks", default=",".join(VERIFY_CHECKS), help="verify: comma separated subset of delta,lex,stringy,bound,volume")
    parser.add_argument("--strategy", default=None, help="first, random, index or enumerate (verify default)")
    parser.add_argument("--index", type=int, default=0, help="class index for --strategy index")
    parser.add_argument("--run-limit", type=int, default=1000, help="verify: runs checked for pairwise distinctness")
    parser.add_argument("--cone", default=None, help="comma separated ray indices of a cone")
    parser.add_argument("--divisor", default=None, help="comma separated coefficients, one per ray")
    parser.add_argument("--r", type=int, default=None, help="cone: index r with L = -r(K + Delta)")
    parser.add_argument("--formula", default=None, help="bounds: one of " + ", ".join(FORMULAS))
    parser.add_argument("--N", type=int, default=None)
    parser.add_argument("--n", type=int, default=None)
    parser.add_argument("--e", type=int, default=None)
    parser.add_argument("--k", type=int, default=None)
    parser.add_argument("--s", type=int, default=None)
    parser.add_argument("--rho-d", type=int, default=None, help="rho + d for cor_terminal")
    parser.add_argument("--eps", default=None)
    parser.add_argument("--b", default=None, help="comma separated coefficients")
    parser.add_argument("--S", default=None, help="comma separated elements of S")
    return parser


def execute(command: str, args) -> tuple[int, Report]:
    """Run one command; returns the exit code and the report."""
    if command not in COMMANDS:
        raise UnknownCommand(f"unknown command {command!r}; known: {', '.join(COMMANDS)}")
    report = Report(command)
    start = time.perf_counter()
    try:
        if command == "bounds":
            cmd_bounds(report, args)
        else:
            inp = load_input(args.input)
            report.input_digest = inp.digest
            report.warnings += inp.warnings
            if command == "verify" and args.strategy is None:
                args.strategy = "enumerate"
            if command in ("mmp-run",) and args.strategy is None:
                args.strategy = "first"
            PAIR_COMMANDS[command](report, inp, args)
    except (ParseError, ValidationError) as exc:
        report.results = {"error": str(exc), "type": type(exc).__name__}
        code = 2
    except (ToricError, GeometryError, BoundsError) as exc:
        report.results = {"error": str(exc), "type": type(exc).__name__}
        code = 2
    else:
        code = 1 if report.failed else 0
    report.timing = {"seconds": round(time.perf_counter() - start, 6)}
    return code, report


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.checks is not None:
        args.checks = args.checks.replace(" ", "")
    try:
        code, report = execute(args.command, args)
    except UnknownCommand as exc:
        print(f"toricmmp: {exc}", file=sys.stderr)
        return 2
    data = report.to_json()
    if args.pretty:
        print(render_pretty(data))
    else:
        print(json.dumps(data, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
