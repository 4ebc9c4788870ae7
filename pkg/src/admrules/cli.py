"""Command line front end: ``admrules <subcommand> ...``.

Exit codes: 0 pass, 1 logical failure (invalid / refuted / non-theorem),
2 usage or parse error, 3 budget or cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Sequence

from . import config as caps
from .algebra import (AlgebraFormatError, FiniteHeytingAlgebra, HeytingLawError, boolean, chain,
                      direct_product, enumerate_algebras, format_algebra, is_well_connected, power,
                      read_algebras)
from .freealg import NotAdmissible, check_admissible_bounded, free_algebra, refute_derivability
from .prover import is_theorem
from .semantics import find_refuting_algebra, refute
from .suite import SUITES, Config, format_report, run_suites
from .syntax import (MRule, ParseError, RuleFileError, format_substitution, parse_formula,
                     parse_rule, read_rules)
from .transforms import (BasisKindError, find_independence_witness, format_basis,
                         m_basis_from_s_basis, read_basis, s_basis_from_m_basis)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(args, obj: dict, text: str) -> None:
    if args.json:
        print(json.dumps(obj, sort_keys=True))
    else:
        print(text)


# --- algebra sources ---------------------------------------------------------

_FACTOR = re.compile(r"(B2|C(\d+))(?:\^(\d+))?")


def builtin_algebra(spec: str) -> FiniteHeytingAlgebra:
    """Algebra named like ``B2``, ``C3``, ``B2^2`` or ``C3xB2``."""
    out = None
    for part in spec.split("x"):
        m = _FACTOR.fullmatch(part)
        if not m:
            raise UsageError(f"unknown algebra {spec!r} (not a file, not like B2, C3, B2^2, C3xB2)")
        base = boolean(1) if m.group(1) == "B2" else chain(int(m.group(2)))
        a = power(base, int(m.group(3))) if m.group(3) else base
        out = a if out is None else direct_product(out, a)
    return out


def load_pool(args) -> list[FiniteHeytingAlgebra]:
    pool: list[FiniteHeytingAlgebra] = []
    for spec in args.algebra or ():
        if Path(spec).exists():
            pool.extend(read_algebras(spec))
        else:
            pool.append(builtin_algebra(spec))
    if getattr(args, "enumerate", None):
        pool.extend(enumerate_algebras(args.enumerate))
    if getattr(args, "well_connected", False):
        pool = [a for a in pool if is_well_connected(a)]
    if not pool:
        raise UsageError("no algebras given (use --algebra or --enumerate)")
    return pool


def load_rules(args) -> list[tuple[str, MRule]]:
    """Rules from ``--rule`` texts and rule files, tagged with their origin."""
    out = [(f"<arg{i}>", parse_rule(t)) for i, t in enumerate(args.rule or ())]
    for path in args.rules_file or ():
        out.extend((f"{path}:{ln}", r) for ln, r in read_rules(path))
    if not out:
        raise UsageError("no rules given")
    return out


def _alg_name(a: FiniteHeytingAlgebra) -> str:
    return a.name or f"algebra of size {a.n}"


# --- subcommands -----------------------------------------------------------

def cmd_parse(args) -> int:
    for text in args.text:
        if "/" in text:
            r = parse_rule(text)
            _emit(args, {"input": text, "rule": str(r), "single_conclusion": r.is_single_conclusion,
                         "vars": sorted(r.vars)}, str(r))
        else:
            f = parse_formula(text)
            _emit(args, {"input": text, "formula": str(f), "tree": repr(f),
                         "vars": sorted(f.vars)}, str(f))
    return EXIT_OK


def cmd_check(args) -> int:
    pool = load_pool(args)
    rules = load_rules(args)
    status = EXIT_OK
    witnesses = []
    for where, r in rules:
        hit = find_refuting_algebra(r, pool, args.budget)
        if hit is None:
            _emit(args, {"rule": str(r), "source": where, "valid": True, "pool": len(pool)},
                  f"valid    {r}")
            continue
        status = EXIT_FAIL
        a, ref = hit
        witnesses.append(a)
        _emit(args, {"rule": str(r), "source": where, "valid": False, "witness": ref.to_json()},
              f"INVALID  {r}\n         refuted in {ref}")
    if args.emit_witness and witnesses:
        seen = []
        for a in witnesses:
            if all(a is not b for b in seen):
                seen.append(a)
        Path(args.emit_witness).write_text("".join(format_algebra(a) for a in seen), encoding="utf-8")
    return status


def cmd_enumerate(args) -> int:
    algs = list(enumerate_algebras(args.n, include_degenerate=args.include_degenerate))
    if args.well_connected:
        algs = [a for a in algs if is_well_connected(a)]
    if args.output:
        Path(args.output).write_text("".join(format_algebra(a) for a in algs), encoding="utf-8")
    for a in algs:
        _emit(args, {"name": a.name, "size": a.n, "well_connected": is_well_connected(a)},
              f"{a.name}\tsize {a.n}\t{'well-connected' if is_well_connected(a) else ''}".rstrip())
    return EXIT_OK


def cmd_free(args) -> int:
    K = load_pool(args)
    F = free_algebra(K, args.rank)
    if args.output:
        Path(args.output).write_text(format_algebra(F.algebra), encoding="utf-8")
    if args.json:
        print(json.dumps({"name": F.algebra.name, "rank": F.rank, "size": F.n,
                          "well_connected": is_well_connected(F.algebra),
                          "elements": [str(t) for t in F.traces]}, sort_keys=True))
    else:
        print(f"{F.algebra.name}: {F.n} elements")
        if not args.quiet:
            for i, t in enumerate(F.traces):
                print(f"  {i}\t{t}")
    return EXIT_OK


def cmd_admissible(args) -> int:
    K = load_pool(args)
    status = EXIT_OK
    for where, r in load_rules(args):
        v = check_admissible_bounded(r, K, args.rank, budget=args.budget)
        if isinstance(v, NotAdmissible):
            status = EXIT_FAIL
            _emit(args, {"rule": str(r), "source": where, "verdict": "not-admissible", "rank": v.rank,
                         "substitution": {k: str(f) for k, f in sorted(v.substitution.items())}},
                  f"NOT ADMISSIBLE  {r}\n  rank {v.rank}; substitution {format_substitution(v.substitution)}")
        else:
            _emit(args, {"rule": str(r), "source": where, "verdict": "admissible-up-to-rank",
                         "rank": v.rank, "checked": list(v.checked)},
                  f"admissible up to rank {v.rank} (bounded)  {r}")
    return status


def cmd_refute_derivability(args) -> int:
    base = [r for _, r in read_rules(args.from_rules)]
    pool = load_pool(args)
    status = EXIT_OK
    for where, r in load_rules(args):
        hit = refute_derivability(base, r, pool, args.budget)
        if hit is None:
            _emit(args, {"rule": str(r), "source": where, "refuted": False},
                  f"no witness (inconclusive)  {r}")
            continue
        status = EXIT_FAIL
        a, ref = hit
        if args.emit_witness:
            Path(args.emit_witness).write_text(format_algebra(a), encoding="utf-8")
        _emit(args, {"rule": str(r), "source": where, "refuted": True, "witness": ref.to_json()},
              f"NOT DERIVABLE  {r}\n  {_alg_name(a)} validates all {len(base)} rules; {ref}")
    return status


def cmd_transform(args) -> int:
    want = {"m": "s", "s": "m"}[args.to]
    b = read_basis(args.basis, kind=None)
    if b.kind != want:
        raise BasisKindError(f"--to {args.to} needs a {want}-basis, {args.basis} is a {b.kind}-basis")
    q = None
    if args.to == "m":
        out = m_basis_from_s_basis(b)
    else:
        out, q = s_basis_from_m_basis(b)
    text = format_basis(out)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    if args.json:
        print(json.dumps({"kind": out.kind, "fresh": q, "rules": [str(r) for r in out]}, sort_keys=True))
    else:
        if q is not None:
            print(f"# fresh variable: {q}")
        sys.stdout.write(text)
    return EXIT_OK


def cmd_independence(args) -> int:
    rules = [r for _, r in read_rules(args.basis)]
    target = parse_rule(args.target) if args.target else rules[args.index]
    pool = load_pool(args)
    hit = find_independence_witness(rules, target, pool, args.budget)
    if hit is None:
        _emit(args, {"rule": str(target), "witness": None}, f"no witness found (inconclusive)  {target}")
        return EXIT_FAIL
    a, ref = hit
    if args.output:
        Path(args.output).write_text(format_algebra(a), encoding="utf-8")
    _emit(args, {"rule": str(target), "witness": ref.to_json()},
          f"independent  {target}\n  well-connected {_alg_name(a)} validates the others and DP; {ref}")
    return EXIT_OK


def cmd_prove(args) -> int:
    f = parse_formula(args.formula)
    ok = is_theorem(f)
    obj = {"formula": str(f), "theorem": ok}
    text = f"{'theorem' if ok else 'not a theorem'}: {f}"
    if not ok and args.countermodel:
        hit = find_refuting_algebra(f, enumerate_algebras(args.countermodel), args.budget)
        if hit:
            obj["countermodel"] = hit[1].to_json()
            text += f"\n  countermodel {hit[1]}"
    _emit(args, obj, text)
    return EXIT_OK if ok else EXIT_FAIL


def _sizes(text: str) -> tuple[int, ...]:
    m = re.fullmatch(r"(\d+)\.\.(\d+)", text)
    if m:
        return tuple(range(int(m.group(1)), int(m.group(2)) + 1))
    return tuple(int(x) for x in text.split(","))


def cmd_verify_suite(args) -> int:
    cfg = Config(
        count_sizes=_sizes(args.sizes), seed=args.seed, budget=args.budget,
        random_formulas=args.random, corpus=args.corpus, fixtures=tuple(args.fixture or ()),
        only=tuple(args.only or ()), jobs=args.jobs,
    )
    results = run_suites(cfg)
    sys.stdout.write(format_report(cfg, results, as_json=args.json))
    if any(r.status == "fail" for r in results):
        return EXIT_FAIL
    if any(r.status == "skip" for r in results):
        return EXIT_BUDGET
    return EXIT_OK


# --- argument parsing ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="JSON-lines output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=None,
                        help="max formula evaluations per search (env ADMRULES_BUDGET)")

    def pool_args(p, enumerate_=True):
        p.add_argument("--algebra", "-a", action="append",
                       help="algebra file or builtin name (B2, C3, B2^2, C3xB2); repeatable")
        if enumerate_:
            p.add_argument("--enumerate", "-e", type=int, metavar="N",
                           help="add all algebras of size <= N")
            p.add_argument("--well-connected", action="store_true", help="keep well-connected algebras only")

    def rule_args(p):
        p.add_argument("rules_file", nargs="*", help="rule files (one rule per line)")
        p.add_argument("--rule", "-r", action="append", help="rule text; repeatable")

    parser = argparse.ArgumentParser(
        prog="admrules", description="Check rules and m-rules of intuitionistic logic in finite Heyting algebras.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse and print formulas or rules")
    p.add_argument("text", nargs="+")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("check", parents=[common], help="check rules in algebras")
    rule_args(p)
    pool_args(p)
    p.add_argument("--emit-witness", metavar="FILE", help="write refuting algebras to FILE")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("enumerate", parents=[common], help="list Heyting algebras up to isomorphism")
    p.add_argument("n", type=int)
    p.add_argument("--include-degenerate", action="store_true")
    p.add_argument("--well-connected", action="store_true")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("free", parents=[common], help="free algebra of the variety of given algebras")
    pool_args(p, enumerate_=False)
    p.add_argument("--rank", "-k", type=int, required=True)
    p.add_argument("--output", "-o")
    p.add_argument("--quiet", "-q", action="store_true")
    p.set_defaults(func=cmd_free)

    p = sub.add_parser("admissible", parents=[common], help="bounded admissibility via free algebras")
    rule_args(p)
    pool_args(p, enumerate_=False)
    p.add_argument("--rank", "-k", type=int, default=None, help="rank bound (default max(vars, 3))")
    p.set_defaults(func=cmd_admissible)

    p = sub.add_parser("refute-derivability", parents=[common],
                       help="find an algebra validating a rule set but refuting a rule")
    p.add_argument("--from", dest="from_rules", required=True, metavar="FILE", help="rule set")
    rule_args(p)
    pool_args(p)
    p.add_argument("--emit-witness", metavar="FILE")
    p.set_defaults(func=cmd_refute_derivability)

    p = sub.add_parser("transform", parents=[common], help="convert between s-bases and m-bases")
    p.add_argument("basis")
    p.add_argument("--to", choices=("m", "s"), required=True)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("independence", parents=[common], help="search an independence witness")
    p.add_argument("basis")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--target", "-t", help="rule text (must be in the basis)")
    g.add_argument("--index", "-i", type=int, help="0-based rule index in the file")
    pool_args(p)
    p.add_argument("--output", "-o", help="write the witness algebra here")
    p.set_defaults(func=cmd_independence)

    p = sub.add_parser("prove", parents=[common], help="intuitionistic theoremhood")
    p.add_argument("formula")
    p.add_argument("--countermodel", type=int, metavar="N", help="search algebras of size <= N on failure")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("verify-suite", parents=[common], help="run the verification suites")
    p.add_argument("--sizes", default="1..6", help="enumeration-count sizes, e.g. 1..6")
    p.add_argument("--random", type=int, default=500, help="random formulas for prover soundness")
    p.add_argument("--corpus", help="rule corpus file (default: bundled)")
    p.add_argument("--fixture", action="append", help="extra algebra file for the validate suite")
    p.add_argument("--only", action="append", choices=sorted(SUITES))
    p.add_argument("--jobs", "-j", type=int, default=1)
    p.set_defaults(func=cmd_verify_suite)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (caps.BudgetExceeded, caps.CapExceeded) as e:
        print(f"admrules: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, RuleFileError, AlgebraFormatError, HeytingLawError, BasisKindError,
            UsageError, OSError, ValueError) as e:
        print(f"admrules: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
