"""Bundled rule corpus, curated non-theorems and a seeded random formula source."""

from __future__ import annotations

import random
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .syntax import BOT, TOP, And, Formula, Imp, MRule, Not, Or, Var, parse_formula, parse_rule

__all__ = [
    "load_corpus", "corpus_rules", "single_conclusion_rules", "mrules",
    "CURATED_NON_THEOREMS", "curated_non_theorems", "random_formula", "random_formulas",
]


def load_corpus(path: str | Path | None = None) -> tuple[MRule, ...]:
    if path is None:
        text = resources.files("admrules").joinpath("data/corpus.rules").read_text("utf-8")
        return _parse_corpus(text)
    return _parse_corpus(Path(path).read_text("utf-8"))


@lru_cache(maxsize=None)
def _parse_corpus(text: str) -> tuple[MRule, ...]:
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse_rule(line))
    return tuple(dict.fromkeys(out))


def corpus_rules(path=None) -> tuple[MRule, ...]:
    return load_corpus(path)


def single_conclusion_rules(path=None) -> tuple[MRule, ...]:
    return tuple(r for r in load_corpus(path) if r.is_single_conclusion)


def mrules(path=None) -> tuple[MRule, ...]:
    return tuple(r for r in load_corpus(path) if not r.is_single_conclusion)


CURATED_NON_THEOREMS = (
    "p | ~p",
    "~~p -> p",
    "((p -> q) -> p) -> p",
    "(~p -> q | r) -> (~p -> q) | (~p -> r)",
    "((~~p -> p) -> p | ~p) -> ((~~p -> p) -> ~p) | ((~~p -> p) -> ~~p)",
    "((p -> q) -> p | r) -> ((p -> q) -> p) | ((p -> q) -> r)",
    "(p -> q) | (q -> p)",
    "~p | ~~p",
    "(~q -> ~p) -> p -> q",
    "~(p & q) -> ~p | ~q",
    "((p -> q) -> q) -> p | q",
    "(~~p -> p) -> p | ~p",
    "(p -> q | r) -> (p -> q) | (p -> r)",
    "(p -> q) -> ~p | q",
    "~~(p | q) -> ~~p | ~~q",
    "p | (p -> q)",
    "~~p | ~p | p",
    "(p -> q) | (q -> r) | (r -> p) -> (p -> q) | (q -> p)",
    "((p -> q) -> p) -> p | q",
    "~(p -> q) -> p & ~q",
)


def curated_non_theorems() -> tuple[Formula, ...]:
    return tuple(parse_formula(s) for s in CURATED_NON_THEOREMS)


_LEAVES = (BOT, TOP)


def random_formula(rng: random.Random, depth: int, variables=("p", "q", "r")) -> Formula:
    """Random formula of depth at most ``depth`` over ``variables``."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.1:
            return rng.choice(_LEAVES)
        return Var(rng.choice(variables))
    op = rng.choice(("and", "or", "imp", "imp", "not"))
    if op == "not":
        return Not(random_formula(rng, depth - 1, variables))
    ctor = {"and": And, "or": Or, "imp": Imp}[op]
    return ctor(random_formula(rng, depth - 1, variables), random_formula(rng, depth - 1, variables))


def random_formulas(count: int, seed: int, depth: int = 4, variables=("p", "q", "r")) -> list[Formula]:
    rng = random.Random(seed)
    return [random_formula(rng, depth, variables) for _ in range(count)]
