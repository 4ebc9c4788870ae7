"""Intuitionistic propositional theoremhood via the contraction-free calculus G4ip.

Negation is read as ``A -> 0`` and ``1`` as ``0 -> 0``. Invertible rules are
applied eagerly; the only choice points are right disjunction and the
``(C -> D) -> B`` left rule. Every rule application decreases a multiset
measure on the sequent, so the search terminates without loop checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .syntax import BOT, And, Bot, Formula, Imp, Not, Or, Top, Var, big_and

__all__ = ["Sequent", "is_theorem", "proves", "provable", "equivalent"]


@dataclass(frozen=True)
class Sequent:
    antecedent: frozenset[Formula]
    succedent: Formula


def _core(f: Formula) -> Formula:
    """Rewrite into the {and, or, imp, 0} fragment."""
    if isinstance(f, Not):
        return Imp(_core(f.arg), BOT)
    if isinstance(f, Top):
        return Imp(BOT, BOT)
    if isinstance(f, (And, Or, Imp)):
        return type(f)(_core(f.left), _core(f.right))
    return f


def _atomic(f: Formula) -> bool:
    return isinstance(f, (Var, Bot))


@lru_cache(maxsize=200_000)
def _prove(gamma: frozenset[Formula], goal: Formula) -> bool:
    if isinstance(goal, Imp) and goal.left == BOT:
        return True
    if goal in gamma or BOT in gamma:
        return True

    # invertible left rules
    for f in gamma:
        rest = gamma - {f}
        if isinstance(f, And):
            return _prove(rest | {f.left, f.right}, goal)
        if isinstance(f, Or):
            return _prove(rest | {f.left}, goal) and _prove(rest | {f.right}, goal)
        if isinstance(f, Imp):
            a, b = f.left, f.right
            if a == BOT:
                return _prove(rest, goal)
            if isinstance(a, Var) and a in gamma:
                return _prove(rest | {b}, goal)
            if isinstance(a, And):
                return _prove(rest | {Imp(a.left, Imp(a.right, b))}, goal)
            if isinstance(a, Or):
                return _prove(rest | {Imp(a.left, b), Imp(a.right, b)}, goal)
            if isinstance(a, Imp) and a.left == BOT:
                # 1 -> b is equivalent to b
                return _prove(rest | {b}, goal)

    # invertible right rules
    if isinstance(goal, And):
        return _prove(gamma, goal.left) and _prove(gamma, goal.right)
    if isinstance(goal, Imp):
        return _prove(gamma | {goal.left}, goal.right)

    # choice points
    if isinstance(goal, Or):
        if _prove(gamma, goal.left) or _prove(gamma, goal.right):
            return True
    for f in gamma:
        if isinstance(f, Imp) and isinstance(f.left, Imp):
            c, d = f.left.left, f.left.right
            b = f.right
            rest = gamma - {f}
            if _prove(rest | {Imp(d, b)}, Imp(c, d)) and _prove(rest | {b}, goal):
                return True
    return False


def provable(seq: Sequent) -> bool:
    return _prove(frozenset(_core(f) for f in seq.antecedent), _core(seq.succedent))


def is_theorem(f: Formula) -> bool:
    """True iff ``f`` is an intuitionistic tautology."""
    return _prove(frozenset(), _core(f))


def proves(gamma: Iterable[Formula], b: Formula) -> bool:
    """Intuitionistic derivability ``gamma |- b``, decided as theoremhood of ``/\\gamma -> b``."""
    return is_theorem(Imp(big_and(gamma), b))


def equivalent(f: Formula, g: Formula) -> bool:
    return proves([f], g) and proves([g], f)
