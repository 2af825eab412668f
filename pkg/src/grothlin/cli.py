"""``grothlin`` command line.

Exit codes: 0 success, 1 a property was checked and found false, 2 bad
input (unreadable file, syntax error, malformed JSON or corpus), 3 a
semantic error such as an unknown variable name.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .arith import DimensionError
from .cell import DecompositionError
from .checks import SUITES, run_suites
from .corpus import CorpusError, FormulaFile, load_corpus, read_formula_text, split_vars
from .euler import bd_check
from .formula import FormulaSyntaxError, UnknownIdentifierError, _tokenize, parse
from .plmap import DomainError, PLMap, apply, certify_bijection, default_names, image, is_injective_on
from .qe import EliminationLimit, prune_disjuncts, qe
from .report import dumps, make_report, set_from_text

OK, VIOLATION, INPUT_ERROR, SEMANTIC_ERROR = 0, 1, 2, 3


class InputError(Exception):
    """Bad command-line input; maps to exit code 2."""


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc


def _formula_file(args: argparse.Namespace, path: str | None) -> FormulaFile:
    if getattr(args, "expr", None) is not None:
        return FormulaFile(args.expr, {})
    if path is None:
        raise InputError("give a formula file or --expr")
    ff = read_formula_text(_read(path))
    if not ff.text:
        raise InputError(f"{path}: no formula")
    return ff


def infer_vars(text: str) -> list[str]:
    """Free identifiers of a formula in alphabetical order."""
    toks = _tokenize(text)
    bound = {toks[i + 1][1] for i, t in enumerate(toks)
             if t[0] == "kw" and t[1] in ("EX", "ALL") and i + 1 < len(toks)}
    return sorted({v for kind, v, _ in toks if kind == "ident"} - bound)


def _names(ff: FormulaFile, flag: str | None) -> list[str]:
    if flag is not None:
        return split_vars(flag)
    if ff.vars is not None:
        return ff.vars
    return infer_vars(ff.text)


def _verify(args: argparse.Namespace) -> bool:
    return not args.no_verify


def _emit(doc: dict | str, as_json: bool) -> None:
    print(dumps(doc) if as_json else doc)


# ---------------------------------------------------------------------------
# subcommands

def cmd_eval(args: argparse.Namespace) -> int:
    ff = _formula_file(args, args.file)
    names = _names(ff, args.vars)
    rep, _ = make_report(ff.text, names, _verify(args))
    _emit(rep.to_json() if args.json else rep.text(), args.json)
    return OK


def cmd_qe(args: argparse.Namespace) -> int:
    ff = _formula_file(args, args.file)
    names = _names(ff, args.vars)
    s = prune_disjuncts(qe(parse(ff.text, names), len(names)))
    out = s.text(names)
    _emit({"input": ff.text, "vars": names, "result": out} if args.json else out, args.json)
    return OK


def cmd_cells(args: argparse.Namespace) -> int:
    ff = _formula_file(args, args.file)
    names = _names(ff, args.vars)
    _, d = make_report(ff.text, names, _verify(args))
    cells = sorted(d.cells, key=lambda c: c.sample)
    if args.json:
        _emit({"input": ff.text, "vars": names, "cell_count": len(cells),
               "cells": [c.to_json() for c in cells]}, True)
    else:
        print(f"{len(cells)} cell(s)")
        for c in cells:
            print(f"[{c.kind.value} dim={c.dim}] {c.render(names)}")
    return OK


def _parse_point(raw: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(v.strip()) for v in raw.split(",") if v.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad point {raw!r}: {exc}") from exc


def _load_map(path: str) -> tuple[PLMap, list[str]]:
    try:
        doc = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    try:
        f = PLMap.from_json(doc)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (FormulaSyntaxError, UnknownIdentifierError)):
            raise
        raise InputError(f"{path}: malformed map: {exc}") from exc
    return f, list(doc.get("vars") or default_names(f.src))


def cmd_map(args: argparse.Namespace) -> int:
    f, src_names = _load_map(args.map)
    if args.action == "apply":
        if args.point is None:
            raise InputError("apply needs --point")
        pt = _parse_point(args.point)
        if len(pt) != f.src:
            raise InputError(f"point has {len(pt)} coordinates, map source is Q^{f.src}")
        out = [str(v) for v in apply(f, pt)]
        _emit({"point": [str(v) for v in pt], "value": out} if args.json else ", ".join(out), args.json)
        return OK
    if args.set is None:
        raise InputError(f"{args.action} needs --set")
    sf = read_formula_text(_read(args.set))
    s = set_from_text(sf.text, sf.vars or src_names)
    if s.dim != f.src:
        raise InputError(f"set lives in Q^{s.dim}, map source is Q^{f.src}")
    out_names = split_vars(args.out_vars) if args.out_vars else (
        src_names if f.dst == f.src else [f"y{i + 1}" for i in range(f.dst)])
    if args.action == "image":
        text = image(f, s).text(out_names)
        _emit({"image": text, "vars": out_names} if args.json else text, args.json)
        return OK
    if args.action == "injective":
        ok = is_injective_on(f, s)
    else:
        if args.target is None:
            raise InputError("bijection needs --target")
        tf = read_formula_text(_read(args.target))
        t = set_from_text(tf.text, tf.vars or out_names)
        if t.dim != f.dst:
            raise InputError(f"target lives in Q^{t.dim}, map target is Q^{f.dst}")
        ok = certify_bijection(f, s, t)
    _emit({args.action: ok} if args.json else str(ok).lower(), args.json)
    return OK if ok else VIOLATION


def cmd_bd(args: argparse.Namespace) -> int:
    sf = read_formula_text(_read(args.set))
    names = split_vars(args.vars) if args.vars else (sf.vars or infer_vars(sf.text))
    s = set_from_text(sf.text, names)
    df = read_formula_text(_read(args.dist))
    if args.tvar in names:
        raise InputError(f"value variable {args.tvar!r} clashes with a set variable")
    d = set_from_text(df.text, [args.tvar] + names)
    rep = bd_check(s, d, verify=_verify(args))
    doc = rep.as_dict()
    if args.json:
        _emit(doc, True)
    else:
        for k, v in doc["checks"].items():
            print(f"{k}: {v}")
        print(f"mu: {doc['mu'] if doc['mu'] is not None else 'none'}")
        print(f"chi_b: {doc['chi_b']}")
        for smp in doc["samples"]:
            print(f"t = {smp['t']}: chi_g = {smp['chi_g']} ({'ok' if smp['ok'] else 'MISMATCH'})")
        print("ok" if rep.ok else "FAILED")
    return OK if rep.ok else VIOLATION


def cmd_selftest(args: argparse.Namespace) -> int:
    names = [n for part in (args.filter or []) for n in part.split(",") if n]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise InputError(f"unknown suite(s) {', '.join(unknown)}; known: {', '.join(SUITES)}")
    corpus = load_corpus(args.corpus) if args.corpus else load_corpus()
    results = run_suites(names or None, seed=args.seed, verify=_verify(args), corpus=corpus)
    if args.json:
        _emit({"suites": [r.as_dict() for r in results], "ok": all(r.ok for r in results)}, True)
    else:
        for r in results:
            print(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.checked} checks, {r.seconds:.2f}s")
            for msg in r.failures[:10]:
                print(f"    {msg}")
            for note in r.notes:
                print(f"    note: {note}")
    return OK if all(r.ok for r in results) else VIOLATION


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grothlin",
                                description="Euler characteristics and classes of semilinear sets over Q.")
    sub = p.add_subparsers(dest="command", required=True)

    def formula_cmd(name: str, help_: str, verify: bool = True) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", nargs="?", help="formula file ('-' for stdin)")
        sp.add_argument("-e", "--expr", help="formula text instead of a file")
        sp.add_argument("--vars", help="comma separated coordinate order")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        if verify:
            sp.add_argument("--no-verify", action="store_true", help="skip certification of cell decompositions")
        return sp

    formula_cmd("eval", "characteristics and class of a set").set_defaults(run=cmd_eval)
    formula_cmd("qe", "quantifier-free equivalent", verify=False).set_defaults(run=cmd_qe)
    formula_cmd("cells", "list the cells of a decomposition").set_defaults(run=cmd_cells)

    m = sub.add_parser("map", help="apply or analyse a piecewise-affine map")
    m.add_argument("action", choices=["apply", "image", "injective", "bijection"])
    m.add_argument("--map", required=True, help="map JSON file")
    m.add_argument("--set", help="formula file for the source set")
    m.add_argument("--target", help="formula file for the expected image (bijection)")
    m.add_argument("--point", help="comma separated rationals (apply)")
    m.add_argument("--out-vars", help="names for target coordinates")
    m.add_argument("--json", action="store_true")
    m.set_defaults(run=cmd_map)

    b = sub.add_parser("bd", help="check stabilisation of sublevel-set Euler characteristics")
    b.add_argument("--set", required=True, help="formula file for X")
    b.add_argument("--dist", required=True, help="formula file for the graph of d, value variable first")
    b.add_argument("--vars", help="coordinate order of X")
    b.add_argument("--tvar", default="t", help="name of the value variable in the --dist file")
    b.add_argument("--json", action="store_true")
    b.add_argument("--no-verify", action="store_true")
    b.set_defaults(run=cmd_bd)

    s = sub.add_parser("selftest", help="run the invariant suites over the corpus")
    s.add_argument("--filter", action="append", help="suite name(s), comma separated; repeatable")
    s.add_argument("--corpus", help="corpus directory instead of the bundled one")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json", action="store_true")
    s.add_argument("--no-verify", action="store_true")
    s.set_defaults(run=cmd_selftest)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except UnknownIdentifierError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return SEMANTIC_ERROR
    except (InputError, FormulaSyntaxError, CorpusError, DomainError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except DecompositionError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return VIOLATION
    except (EliminationLimit, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
