"""Acceptance criteria, one test each.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion. Criteria 6 and 7 are expected to fail, see the
README for the reasons.
"""

import itertools
import subprocess
import sys
import time

import oracles
from admrules.algebra import (boolean, chain, check_laws, direct_product, enumerate_algebras,
                              is_isomorphic, is_well_connected, power, validate)
from admrules.corpus import (CURATED_NON_THEOREMS, corpus_rules, random_formulas,
                             single_conclusion_rules)
from admrules.freealg import NotAdmissible, check_admissible_bounded, free_algebra
from admrules.prover import equivalent, is_theorem
from admrules.semantics import find_refuting_algebra, models_mrule, refute
from admrules.syntax import BOT, apply_substitution, big_and, big_or, fresh_variable, parse_formula
from admrules.transforms import dp_rule, q_reduce, reduce


def report(n, ok, detail=""):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    return ok


def test_criterion_01_dp_product_failure():
    t0 = time.perf_counter()
    b2, dp = boolean(), dp_rule()
    holds = models_mrule(b2, dp)
    ref = refute(power(b2, 2), dp)
    elapsed = time.perf_counter() - t0
    ok = (holds and ref is not None
          and ref.labelled_valuation() == {"p": "(1,0)", "q": "(0,1)"}
          and elapsed < 1.0)
    assert report(1, ok, f"({elapsed:.3f}s)")


def test_criterion_02_product_validity():
    t0 = time.perf_counter()
    algs = list(enumerate_algebras(5, include_degenerate=True))
    rules = single_conclusion_rules()
    exceptions = []
    for a, b in itertools.combinations_with_replacement(algs, 2):
        ab = direct_product(a, b)
        for r in rules:
            if (models_mrule(a, r) and models_mrule(b, r)) != models_mrule(ab, r):
                exceptions.append((a.name, b.name, str(r)))
    elapsed = time.perf_counter() - t0
    ok = len(rules) == 50 and not exceptions and elapsed < 60
    assert report(2, ok, f"({len(algs)} algebras, {len(rules)} rules, {len(exceptions)} exceptions, "
                         f"{elapsed:.1f}s)")


def test_criterion_03_well_connected_reductions():
    t0 = time.perf_counter()
    wc = [a for a in enumerate_algebras(8) if is_well_connected(a)]
    exceptions = []
    for a in wc:
        for r in corpus_rules():
            v = models_mrule(a, r)
            if not v == models_mrule(a, reduce(r)) == models_mrule(a, q_reduce(r, fresh_variable(r))):
                exceptions.append((a.name, str(r)))
    sq = power(boolean(), 2)
    gap = models_mrule(sq, reduce(dp_rule())) and not models_mrule(sq, dp_rule())
    elapsed = time.perf_counter() - t0
    ok = not exceptions and gap and elapsed < 300
    assert report(3, ok, f"({len(wc)} well-connected algebras, {len(exceptions)} exceptions, "
                         f"{elapsed:.1f}s)")


def test_criterion_04_enumeration_counts():
    counts, agree = [], True
    for n in range(1, 7):
        mine = [a for a in enumerate_algebras(6, include_degenerate=True) if a.n == n]
        theirs = oracles.distributive_lattices_by_brute_force(n)
        counts.append(len(mine))
        for leq in theirs:
            meet, join = oracles.lattice_tables_from_order(n, leq)
            ref = validate(meet, join, oracles.heyting_imp(n, leq, meet), 0, n - 1)
            agree &= sum(is_isomorphic(ref, a) for a in mine) == 1
        agree &= len(theirs) == len(mine)
    ok = counts == [1, 1, 1, 2, 3, 5] and agree
    assert report(4, ok, f"(counts {counts})")


def test_criterion_05_free_algebra_sizes():
    t0 = time.perf_counter()
    ok = True
    sizes = []
    for K, k, want in (([boolean()], 1, 4), ([boolean()], 2, 16), ([chain(3)], 1, 6)):
        F = free_algebra(K, k)
        a = F.algebra
        sizes.append(F.n)
        ok &= F.n == want == oracles.naive_free_algebra_size([oracles.as_tables(x) for x in K], k)
        ok &= not check_laws(a.meet, a.join, a.imp, a.bot, a.top)
        ok &= len(set(F.generators)) == k
        ok &= [str(F.traces[g]) for g in F.generators] == [f"x{i + 1}" for i in range(k)]
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 10
    assert report(5, ok, f"(sizes {sizes}, {elapsed:.2f}s)")


def test_criterion_06_prover_cross_validation():
    t0 = time.perf_counter()
    pool = list(enumerate_algebras(8))
    unsound, accepted = [], 0
    for f in random_formulas(500, seed=0, depth=4):
        if is_theorem(f):
            accepted += 1
            if find_refuting_algebra(f, pool) is not None:
                unsound.append(str(f))
    missing = []
    for s in CURATED_NON_THEOREMS:
        f = parse_formula(s)
        if not is_theorem(f) and find_refuting_algebra(f, pool) is None:
            missing.append(s)
    elapsed = time.perf_counter() - t0
    ok = not unsound and not missing and elapsed < 300
    assert report(6, ok, f"({accepted} accepted, {len(unsound)} unsound, "
                         f"no countermodel <= 8 for {missing}, {elapsed:.1f}s)")


def test_criterion_07_admissibility_negative_case():
    v = check_admissible_bounded(dp_rule(), [boolean()], 2)
    ok = isinstance(v, NotAdmissible)
    detail = ""
    if ok:
        sigma = v.substitution
        premise = apply_substitution(sigma, parse_formula("p | q"))
        accepted = is_theorem(premise)
        ok = (accepted and not is_theorem(apply_substitution(sigma, parse_formula("p")))
              and not is_theorem(apply_substitution(sigma, parse_formula("q"))))
        detail = f"(substitution p := {sigma['p']}, q := {sigma['q']}; prover on {premise}: {accepted})"
    assert report(7, ok, detail)


def test_criterion_08_square_refutes_dp():
    rules = single_conclusion_rules()
    exceptions = []
    algs = list(enumerate_algebras(5))
    for a in algs:
        a2 = power(a, 2)
        if models_mrule(a2, dp_rule()):
            exceptions.append((a.name, "DP"))
        exceptions += [(a.name, str(r)) for r in rules if models_mrule(a, r) and not models_mrule(a2, r)]
    ok = not exceptions
    assert report(8, ok, f"({len(algs)} algebras, {len(exceptions)} exceptions)")


def test_criterion_09_q_to_bottom():
    exceptions = []
    rules = corpus_rules()
    for r in rules:
        q = fresh_variable(r)
        out = apply_substitution({q: BOT}, q_reduce(r, q))
        (prem,), (concl,) = out.premises, out.conclusions
        if not (equivalent(prem, big_and(r.premises)) and equivalent(concl, big_or(r.conclusions))):
            exceptions.append(str(r))
    ok = not exceptions
    assert report(9, ok, f"({len(rules)} rules, {len(exceptions)} exceptions)")


def test_criterion_10_determinism():
    cmd = [sys.executable, "-m", "admrules.cli", "verify-suite", "--seed", "0"]
    first = subprocess.run(cmd, capture_output=True, check=False)
    second = subprocess.run(cmd, capture_output=True, check=False)
    ok = first.returncode == 0 and first.stdout and first.stdout == second.stdout
    assert report(10, ok, f"({len(first.stdout)} bytes)")
