"""Named verification suites run by ``admrules verify-suite``.

Each suite re-checks one structural fact on enumerated algebras and the rule
corpus, and reports the number of checks plus the first counterexample.
Reports contain no timings, so equal configurations give identical output.
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable

from . import config as caps
from .algebra import (HeytingLawError, check_laws, direct_product,
                      enumerate_algebras, is_well_connected, parse_algebras, power, boolean, chain)
from .corpus import corpus_rules, curated_non_theorems, random_formulas, single_conclusion_rules
from .freealg import NotAdmissible, check_admissible_bounded, free_algebra, homomorphism_from
from .prover import equivalent, is_theorem
from .semantics import find_refuting_algebra, models_mrule, refute
from .syntax import BOT, MRule, apply_substitution, fresh_variable
from .transforms import (Basis, dp_rule, find_independence_witness, m_basis_from_s_basis,
                         q_reduce, reduce, s_basis_from_m_basis)

__all__ = ["Config", "SuiteResult", "SUITES", "run_suites", "format_report", "KNOWN_COUNTS"]

# number of distributive lattices (= finite Heyting algebras) of each size
KNOWN_COUNTS = {1: 1, 2: 1, 3: 1, 4: 2, 5: 3, 6: 5, 7: 8, 8: 15, 9: 26, 10: 47, 11: 82, 12: 151}


@dataclass(frozen=True)
class Config:
    count_sizes: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    product_max: int = 5
    wc_max: int = 8
    prover_max: int = 8
    countermodel_max: int = 9
    random_formulas: int = 500
    formula_depth: int = 4
    admissibility_rank: int = 2
    seed: int = 0
    budget: int | None = None
    corpus: str | None = None
    fixtures: tuple[str, ...] = ()
    only: tuple[str, ...] = ()
    jobs: int = 1


@dataclass
class SuiteResult:
    name: str
    status: str  # pass | fail | skip
    checks: int = 0
    counterexample: str | None = None
    note: str = ""

    def line(self) -> str:
        tag = {"pass": "PASS", "fail": "FAIL", "skip": "SKIP"}[self.status]
        out = f"[{tag}] {self.name}: {self.checks} checks"
        if self.note:
            out += f"; {self.note}"
        if self.counterexample:
            out += f"; first counterexample: {self.counterexample}"
        return out


class _Fail(Exception):
    pass


class _Counter:
    def __init__(self):
        self.n = 0

    def check(self, ok: bool, what: Callable[[], str] | str):
        self.n += 1
        if not ok:
            raise _Fail(what() if callable(what) else what)


# --- suites ----------------------------------------------------------------

def suite_dp_product(cfg: Config, c: _Counter) -> str:
    b2 = boolean(1)
    b22 = direct_product(b2, b2)
    dp = dp_rule()
    c.check(models_mrule(b2, dp, cfg.budget), "B2 refutes DP")
    ref = refute(b22, dp, cfg.budget)
    c.check(ref is not None, "B2^2 validates DP")
    got = ref.labelled_valuation()
    c.check(got == {"p": "(1,0)", "q": "(0,1)"}, lambda: f"unexpected witness {got}")
    c.check(ref.replay(), "witness does not replay")
    return f"witness {ref}"


def suite_enumeration_counts(cfg: Config, c: _Counter) -> str:
    algs = list(enumerate_algebras(max(cfg.count_sizes), include_degenerate=True))
    counts = {n: sum(1 for a in algs if a.n == n) for n in cfg.count_sizes}
    for n in cfg.count_sizes:
        c.check(counts[n] == KNOWN_COUNTS[n], lambda n=n: f"size {n}: {counts[n]} != {KNOWN_COUNTS[n]}")
    return "counts " + ",".join(str(counts[n]) for n in cfg.count_sizes)


def suite_validate(cfg: Config, c: _Counter) -> str:
    for a in enumerate_algebras(cfg.wc_max, include_degenerate=True):
        v = check_laws(a.meet, a.join, a.imp, a.bot, a.top)
        c.check(not v, lambda: f"{a.name}: {v[0]}")
    b = boolean(1)
    for x in (direct_product(b, chain(3)), power(chain(3), 2)):
        v = check_laws(x.meet, x.join, x.imp, x.bot, x.top)
        c.check(not v, lambda: f"{x.name}: {v[0]}")
    for path in cfg.fixtures:
        with open(path, encoding="utf-8") as fh:
            fixtures = parse_algebras(fh.read(), path, check=False)
        for i, a in enumerate(fixtures):
            v = check_laws(a.meet, a.join, a.imp, a.bot, a.top)
            c.check(not v, lambda: f"{path}#{i}: {v[0]}")
    return ""


def suite_product_validity(cfg: Config, c: _Counter) -> str:
    algs = list(enumerate_algebras(cfg.product_max))
    rules = single_conclusion_rules(cfg.corpus)
    for a, b in itertools.combinations_with_replacement(algs, 2):
        ab = direct_product(a, b)
        for r in rules:
            lhs = models_mrule(a, r, cfg.budget) and models_mrule(b, r, cfg.budget)
            rhs = models_mrule(ab, r, cfg.budget)
            c.check(lhs == rhs, lambda: f"{a.name} x {b.name}, rule {r}: factors {lhs}, product {rhs}")
    b2 = boolean(1)
    c.check(models_mrule(b2, dp_rule()) and not models_mrule(power(b2, 2), dp_rule()),
            "DP should hold in B2 and fail in B2^2")
    return f"{len(algs)} algebras, {len(rules)} rules"


def suite_well_connected_reductions(cfg: Config, c: _Counter) -> str:
    rules = corpus_rules(cfg.corpus)
    wc = [a for a in enumerate_algebras(cfg.wc_max) if is_well_connected(a)]
    for a in wc:
        for r in rules:
            q = fresh_variable(r)
            va = models_mrule(a, r, cfg.budget)
            vb = models_mrule(a, reduce(r), cfg.budget)
            vc = models_mrule(a, q_reduce(r, q), cfg.budget)
            c.check(va == vb == vc, lambda: f"{a.name}, rule {r}: R={va} R°={vb} Rq={vc}")
    # the converse needs well-connectedness: DP on B2^2
    b22 = power(boolean(1), 2)
    gap = models_mrule(b22, reduce(dp_rule())) and not models_mrule(b22, dp_rule())
    c.check(gap, "DP on B2^2 does not separate R from its reduction")
    return f"{len(wc)} well-connected algebras, {len(rules)} rules; gap witnessed by DP on B2^2"


def suite_square_refutes_dp(cfg: Config, c: _Counter) -> str:
    rules = single_conclusion_rules(cfg.corpus)
    dp = dp_rule()
    for a in enumerate_algebras(cfg.product_max):
        a2 = power(a, 2)
        c.check(not models_mrule(a2, dp, cfg.budget), lambda: f"{a.name}^2 validates DP")
        for r in rules:
            if models_mrule(a, r, cfg.budget):
                c.check(models_mrule(a2, r, cfg.budget), lambda: f"{a.name}^2 refutes {r}")
    return ""


def suite_q_bottom(cfg: Config, c: _Counter) -> str:
    for r in corpus_rules(cfg.corpus):
        q = fresh_variable(r)
        s = apply_substitution({q: BOT}, q_reduce(r, q))
        red = reduce(r)
        (sp,), (sc,) = s.premises, s.conclusions
        (rp,), (rc,) = red.premises, red.conclusions
        c.check(equivalent(sp, rp) and equivalent(sc, rc), lambda: f"rule {r}: {s} vs {red}")
    return ""


def suite_free_algebras(cfg: Config, c: _Counter) -> str:
    b2, c3 = boolean(1), chain(3)
    for K, k, size in (([b2], 1, 4), ([b2], 2, 16), ([c3], 1, 6)):
        F = free_algebra(K, k)
        a = F.algebra
        c.check(F.n == size, lambda: f"|{a.name}| = {F.n}, expected {size}")
        v = check_laws(a.meet, a.join, a.imp, a.bot, a.top)
        c.check(not v, lambda: f"{a.name}: {v[0]}")
        # generated by the generators: every trace evaluates back to its own element
        nu = {f"x{i + 1}": g for i, g in enumerate(F.generators)}
        c.check(homomorphism_from(F, a, [nu[f"x{i + 1}"] for i in range(k)]).tolist()
                == list(range(F.n)), lambda: f"{a.name}: traces do not regenerate the algebra")
    F = free_algebra([b2], 1)
    for img in range(b2.n):
        h = homomorphism_from(F, b2, [img])
        for name in ("meet", "join", "imp"):
            tf, tb = getattr(F.algebra, name), getattr(b2, name)
            c.check(bool((h[tf] == tb[h[:, None], h[None, :]]).all()),
                    lambda: f"generator -> {img}: map does not preserve {name}")
    return "sizes 4, 16, 6"


def suite_admissibility(cfg: Config, c: _Counter) -> str:
    b2 = boolean(1)
    dp = dp_rule()
    v = check_admissible_bounded(dp, [b2], cfg.admissibility_rank, budget=cfg.budget)
    c.check(isinstance(v, NotAdmissible), lambda: f"DP over B2: {v}")
    sig = v.substitution
    inst = apply_substitution(sig, dp)
    (prem,) = inst.premises
    # theoremhood in the logic of K is validity in every member of K
    c.check(models_mrule(b2, MRule((), (prem,))), lambda: f"{prem} not valid in B2")
    for f in inst.conclusions:
        c.check(not models_mrule(b2, MRule((), (f,))), lambda: f"{f} valid in B2")
    # refutations persist at higher rank
    v3 = check_admissible_bounded(dp, [b2], cfg.admissibility_rank + 1, budget=cfg.budget)
    c.check(isinstance(v3, NotAdmissible), "refutation lost at higher rank")
    return str(v)


def suite_prover_soundness(cfg: Config, c: _Counter) -> str:
    pool = list(enumerate_algebras(cfg.prover_max))
    formulas = random_formulas(cfg.random_formulas, cfg.seed, cfg.formula_depth)
    accepted = 0
    for f in formulas:
        if is_theorem(f):
            accepted += 1
            hit = find_refuting_algebra(f, pool, cfg.budget)
            c.check(hit is None, lambda: f"prover accepts {f} but {hit[1]}")
        else:
            c.n += 1
    return f"{accepted} of {len(formulas)} accepted"


def suite_prover_countermodels(cfg: Config, c: _Counter) -> str:
    pool = list(enumerate_algebras(cfg.countermodel_max))
    largest = 0
    for f in curated_non_theorems():
        c.check(not is_theorem(f), lambda: f"prover accepts {f}")
        hit = find_refuting_algebra(f, pool, cfg.budget)
        c.check(hit is not None, lambda: f"no countermodel of size <= {cfg.countermodel_max} for {f}")
        largest = max(largest, hit[0].n)
    return f"largest smallest-countermodel size {largest}"


def suite_bases(cfg: Config, c: _Counter) -> str:
    dp = dp_rule()
    m = m_basis_from_s_basis(Basis("s", []))
    c.check(m.rules == {dp}, f"empty s-basis -> {set(map(str, m.rules))}")
    s, q = s_basis_from_m_basis(m)
    c.check(s.rules == {q_reduce(dp, q)} and q == "q0", lambda: f"{{DP}} -> {set(map(str, s.rules))}")
    harrop = single_conclusion_rules(cfg.corpus)[1]
    round_trip, q = s_basis_from_m_basis(m_basis_from_s_basis(Basis("s", [harrop])))
    c.check(round_trip.rules == {q_reduce(harrop, q), q_reduce(dp, q)},
            lambda: f"s -> m -> s gave {sorted(map(str, round_trip.rules))}")
    # DP is not derivable from rules valid in B2^2
    b22 = power(boolean(1), 2)
    rules = [r for r in single_conclusion_rules(cfg.corpus) if models_mrule(b22, r)]
    ref = refute(b22, dp)
    c.check(ref is not None and all(models_mrule(b22, r) for r in rules), "B2^2 does not separate DP")
    # Kuznetsov's rule is independent of DP: a well-connected refuter exists
    kuz = single_conclusion_rules(cfg.corpus)[3]
    hit = find_independence_witness({dp, kuz}, kuz, enumerate_algebras(cfg.wc_max), cfg.budget)
    c.check(hit is not None, lambda: f"no independence witness for {kuz}")
    return f"{len(rules)} corpus rules valid in B2^2; {kuz} separated by {hit[0].name}"


SUITES: dict[str, Callable[[Config, _Counter], str]] = {
    "admissibility-oracle": suite_admissibility,
    "bases": suite_bases,
    "dp-product": suite_dp_product,
    "enumeration-counts": suite_enumeration_counts,
    "free-algebras": suite_free_algebras,
    "product-validity": suite_product_validity,
    "well-connected-reductions": suite_well_connected_reductions,
    "prover-countermodels": suite_prover_countermodels,
    "prover-soundness": suite_prover_soundness,
    "q-bottom-substitution": suite_q_bottom,
    "square-refutes-dp": suite_square_refutes_dp,
    "validate": suite_validate,
}


def run_suite(name: str, cfg: Config) -> SuiteResult:
    c = _Counter()
    try:
        note = SUITES[name](cfg, c)
    except _Fail as e:
        return SuiteResult(name, "fail", c.n, str(e))
    except (caps.BudgetExceeded, caps.CapExceeded) as e:
        return SuiteResult(name, "skip", c.n, note=f"skipped: {e}")
    except HeytingLawError as e:
        return SuiteResult(name, "fail", c.n, str(e))
    return SuiteResult(name, "pass", c.n, note=note or "")


def run_suites(cfg: Config) -> list[SuiteResult]:
    names = sorted(cfg.only or SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(run_suite, names, itertools.repeat(cfg)))
    else:
        results = [run_suite(n, cfg) for n in names]
    return sorted(results, key=lambda r: r.name)


def format_report(cfg: Config, results: list[SuiteResult], as_json: bool = False) -> str:
    counts = {s: sum(1 for r in results if r.status == s) for s in ("pass", "fail", "skip")}
    if as_json:
        lines = [json.dumps({"suite": r.name, **{k: v for k, v in asdict(r).items() if k != "name"}},
                            sort_keys=True) for r in results]
        lines.append(json.dumps({"summary": counts, "seed": cfg.seed}, sort_keys=True))
        return "\n".join(lines) + "\n"
    head = (f"verify-suite seed={cfg.seed} sizes={min(cfg.count_sizes)}..{max(cfg.count_sizes)} "
            f"random={cfg.random_formulas}")
    body = [r.line() for r in results]
    tail = f"summary: {counts['pass']} passed, {counts['fail']} failed, {counts['skip']} skipped"
    return "\n".join([head, *body, tail]) + "\n"
