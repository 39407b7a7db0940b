"""Command-line front end: ``k0calc [options] COMMAND ...``.

Exit codes: 0 for any computed answer (including false, Distinct, Unknown,
NoFit), 2 for input errors, 3 when an enumeration or field-size cap is hit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

from .constructible import DEFAULT_BUDGET
from .errors import InputError, NotABijection, SizeLimit
from .formula import Formula, free_vars, parse, parse_polynomial, pretty
from .k0 import (DEFAULT_DEPTH, CertificateRegistry, K0Element, class_of, compare, register_bijection)
from .poly import FieldTag
from .qe import EliminationTrace, decide, eliminate_all, quantifier_free
from .realize import (NoFit, count_class, count_table, euler_characteristic, fibration_check,
                      interpolate_qpoly, poincare_proxy)

SCHEMA = "k0calc.report/1"


@dataclass
class SessionConfig:
    char: int = 0
    ext: int = 1
    max_ext: int = 3
    budget: int = DEFAULT_BUDGET
    rewrite_depth: int = DEFAULT_DEPTH
    registry_path: str | None = None
    append_registry: bool = False
    format: str = "json"
    trace: bool = False
    timing: bool = False

    @property
    def field(self) -> FieldTag:
        return FieldTag(self.char)

    def to_json(self) -> dict:
        return {
            "char": self.char,
            "ext": self.ext,
            "max_ext": self.max_ext,
            "budget": self.budget,
            "rewrite_depth": self.rewrite_depth,
            "registry": self.registry_path,
        }


def _common_flags(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--char", type=int, default=d(0), help="characteristic: a prime <= 97, or 0 for Q")
    p.add_argument("--ext", type=int, default=d(1), help="extension degree k for count")
    p.add_argument("--max-ext", type=int, default=d(3), help="largest k tried by compare and tables")
    p.add_argument("--budget", type=int, default=d(DEFAULT_BUDGET), help="max tuples enumerated per count")
    p.add_argument("--rewrite-depth", type=int, default=d(DEFAULT_DEPTH))
    p.add_argument("--registry", default=d(None), help="certificate registry (JSON lines)")
    p.add_argument("--append-registry", action="store_true", default=d(False))
    p.add_argument("--format", choices=("json", "text"), default=d("json"))
    p.add_argument("--trace", action="store_true", default=d(False), help="include the elimination tree")
    p.add_argument("--timing", action="store_true", default=d(False), help="add wall-clock timing to reports")
    p.add_argument("--vars", default=d(None), help="comma-separated ambient variables")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="k0calc", description="Exact calculator for classes of constructible sets.")
    _common_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, help_text, *args):
        p = sub.add_parser(name, help=help_text)
        for a in args:
            p.add_argument(a)
        _common_flags(p, suppress=True)
        return p

    cmd("qe", "eliminate quantifiers", "formula")
    cmd("decide", "decide a sentence", "sentence")
    cmd("count", "count points over F_{p^k}", "formula")
    cmd("class", "class in the Grothendieck ring with its count table", "formula")
    c = cmd("compare", "compare the classes of two formulas", "formula_a", "formula_b")
    c.add_argument("--vars-b", default=None, help="ambient variables of the second formula (default: --vars)")
    c = cmd("certify", "verify a definable bijection certificate", "phi", "psi", "eta")
    c.add_argument("--source-vars", default=None)
    c.add_argument("--target-vars", default=None)
    cmd("fibcheck", "fibration counting check", "formula", "m", "fiber")
    return parser


def _config(ns) -> SessionConfig:
    cfg = SessionConfig(ns.char, ns.ext, ns.max_ext, ns.budget, ns.rewrite_depth, ns.registry,
                        ns.append_registry, ns.format, ns.trace, ns.timing)
    if cfg.char:
        FieldTag(cfg.char)
    if cfg.ext < 1 or cfg.max_ext < 1:
        raise InputError("--ext and --max-ext must be >= 1")
    if cfg.budget < 1:
        raise InputError("--budget must be positive")
    if cfg.rewrite_depth < 0:
        raise InputError("--rewrite-depth must be >= 0")
    return cfg


def _vars(text):
    if text is None:
        return None
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _ambient(f: Formula, declared):
    fv = free_vars(f)
    if declared is None:
        return fv
    missing = [v for v in fv if v not in declared]
    if missing:
        raise InputError(f"free variables {missing} not in --vars")
    return declared


def _load_registry(cfg: SessionConfig) -> CertificateRegistry:
    if not cfg.registry_path or not os.path.exists(cfg.registry_path):
        return CertificateRegistry()
    with open(cfg.registry_path, encoding="utf-8") as fh:
        try:
            return CertificateRegistry.from_jsonl(fh.read(), cfg.field)
        except NotABijection as exc:
            raise InputError(f"registry certificate fails verification: {exc}") from exc
        except (ValueError, KeyError) as exc:
            raise InputError(f"malformed registry file: {exc}") from exc


def _jsonable(x):
    return x if isinstance(x, int) else str(x)


def _fiber_class(text: str, fld: FieldTag) -> K0Element:
    """Integer polynomial in L, e.g. ``L^2 - 1``."""
    poly = parse_polynomial(text, FieldTag(0))
    if poly.variables - {"L"}:
        raise InputError(f"fiber class must be a polynomial in L, got {text!r}")
    out = K0Element.zero(fld)
    for mono, c in poly.items():
        if c.denominator != 1:
            raise InputError("fiber class coefficients must be integers")
        e = dict(mono).get("L", 0)
        out = out + K0Element.lefschetz(fld, e).scale(int(c))
    return out


def _table_json(a: K0Element, K: int, budget: int) -> dict:
    table = count_table(a, K, budget)
    fit = interpolate_qpoly(table) if K >= 2 else NoFit()
    out = table.to_json(fit, euler_characteristic(fit) if fit else fit)
    out["qpoly"] = str(fit) if fit else None
    proxy = poincare_proxy(fit) if fit else fit
    out["poincare"] = str(proxy) if proxy else None
    return out


def run(ns, cfg: SessionConfig) -> tuple:
    """Returns (inputs, free_vars, result, provenance)."""
    fld = cfg.field
    declared = _vars(ns.vars)
    trace = EliminationTrace() if cfg.trace else None
    c = ns.command
    if c == "qe":
        f = parse(ns.formula, fld)
        amb = _ambient(f, declared)
        qf = eliminate_all(f, trace)
        C = quantifier_free(qf, ambient=amb)
        result = {"formula": pretty(qf), "cells": [str(x) for x in C.cells]}
        return {"formula": ns.formula}, amb, result, {"trace": trace.to_json()} if trace else {}
    if c == "decide":
        f = parse(ns.sentence, fld)
        verdict = decide(f, trace)
        return {"sentence": ns.sentence}, (), {"verdict": verdict}, {"trace": trace.to_json()} if trace else {}
    if c == "count":
        f = parse(ns.formula, fld)
        amb = _ambient(f, declared)
        a = class_of(quantifier_free(f, trace, ambient=amb))
        n = count_class(a, cfg.ext, cfg.budget)
        return {"formula": ns.formula}, amb, {"count": _jsonable(n), "k": cfg.ext, "q": fld.p**cfg.ext}, {}
    if c == "class":
        f = parse(ns.formula, fld)
        amb = _ambient(f, declared)
        a = class_of(quantifier_free(f, trace, ambient=amb))
        result = {"class": str(a), "terms": a.to_json()}
        if fld.p:
            result["table"] = _table_json(a, cfg.max_ext, cfg.budget)
        return {"formula": ns.formula}, amb, result, {}
    if c == "compare":
        fa, fb = parse(ns.formula_a, fld), parse(ns.formula_b, fld)
        declared_b = _vars(ns.vars_b) if ns.vars_b is not None else declared
        amb_a, amb_b = _ambient(fa, declared), _ambient(fb, declared_b)
        a = class_of(quantifier_free(fa, ambient=amb_a))
        b = class_of(quantifier_free(fb, ambient=amb_b))
        registry = _load_registry(cfg)
        res = compare(a, b, registry, cfg.max_ext, cfg.rewrite_depth)
        payload = {"verdict": res.verdict.value, "class_a": str(a), "class_b": str(b)}
        if res.k is not None:
            payload["k"] = res.k
            payload["counts"] = [_jsonable(x) for x in res.counts]
        prov = {"branch": res.branch, "certificates": res.certificates, "registry_size": len(registry)}
        return ({"formula_a": ns.formula_a, "formula_b": ns.formula_b},
                {"a": list(amb_a), "b": list(amb_b)}, payload, prov)
    if c == "certify":
        phi, psi, eta = parse(ns.phi, fld), parse(ns.psi, fld), parse(ns.eta, fld)
        registry = _load_registry(cfg)
        xs, ys = _vars(ns.source_vars), _vars(ns.target_vars)
        inputs = {"phi": ns.phi, "psi": ns.psi, "eta": ns.eta}
        try:
            cert = register_bijection(phi, psi, eta, registry, xs, ys)
        except NotABijection as exc:
            return inputs, None, {"verified": False, "failed_check": exc.check, "sentence": exc.sentence}, {}
        if cfg.append_registry:
            if not cfg.registry_path:
                raise InputError("--append-registry needs --registry PATH")
            with open(cfg.registry_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(cert.record(), sort_keys=True) + "\n")
        result = {"verified": True, "record": cert.record(), "sentences": cert.sentences}
        return inputs, {"source": list(cert.source_vars), "target": list(cert.target_vars)}, result, {
            "appended": bool(cfg.append_registry)}
    if c == "fibcheck":
        f = parse(ns.formula, fld)
        amb = _ambient(f, declared)
        try:
            m = int(ns.m)
        except ValueError as exc:
            raise InputError(f"m must be an integer, got {ns.m!r}") from exc
        Z = _fiber_class(ns.fiber, fld)
        rep = fibration_check(quantifier_free(f, ambient=amb), m, Z, cfg.max_ext, cfg.budget)
        return {"formula": ns.formula, "m": m, "fiber": ns.fiber}, amb, rep.to_json(), {}
    raise InputError(f"unknown command {c}")


def _text(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    if report.get("free_vars") is not None:
        lines.append(f"free_vars: {json.dumps(report['free_vars'])}")
    for k, v in report["result"].items():
        lines.append(f"{k}: {v if isinstance(v, str) else json.dumps(v)}")
    for k, v in report.get("provenance", {}).items():
        if k == "trace":
            continue
        lines.append(f"{k}: {json.dumps(v)}")
    return "\n".join(lines)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = _config(ns)
        t0 = time.perf_counter()
        inputs, fv, result, prov = run(ns, cfg)
        report = {
            "schema": SCHEMA,
            "command": ns.command,
            "argv": argv,
            "config": cfg.to_json(),
            "inputs": inputs,
            "free_vars": list(fv) if isinstance(fv, tuple) else fv,
            "result": result,
            "provenance": prov,
        }
        if cfg.timing:
            report["timing"] = {"seconds": round(time.perf_counter() - t0, 6)}
    except SizeLimit as exc:
        print(json.dumps({"schema": SCHEMA, "error": "SizeLimit", "message": str(exc), "cap": exc.cap}),
              file=sys.stderr)
        return 3
    except InputError as exc:
        print(json.dumps({"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    if cfg.format == "text":
        print(_text(report))
        if cfg.trace and "trace" in prov:
            print(EliminationTrace.from_json(prov["trace"]).to_text())
    else:
        print(json.dumps(report, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
