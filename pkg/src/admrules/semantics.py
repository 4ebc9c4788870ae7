"""Validity of formulas, rules and m-rules in finite Heyting algebras.

Valuations over a sorted variable list are enumerated in lexicographic order
(first variable most significant), vectorised in chunks with numpy. The first
refuting valuation in that order is the reported witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union

import numpy as np

from . import config
from .algebra import FiniteHeytingAlgebra
from .syntax import And, Bot, Formula, Imp, MRule, Not, Or, Top, Var

__all__ = [
    "UnboundVariable", "Refutation", "evaluate", "evaluate_all", "models_formula",
    "models_mrule", "models", "refute", "find_refuting_algebra", "valuations",
]

CHUNK = 1 << 18


class UnboundVariable(KeyError):
    pass


def evaluate(a: FiniteHeytingAlgebra, valuation: Mapping[str, int], f: Formula) -> int:
    """Value of ``f`` in ``a`` under ``valuation``."""
    if isinstance(f, Var):
        try:
            return int(valuation[f.name])
        except KeyError:
            raise UnboundVariable(f.name) from None
    if isinstance(f, Bot):
        return a.bot
    if isinstance(f, Top):
        return a.top
    if isinstance(f, Not):
        return int(a.neg[evaluate(a, valuation, f.arg)])
    x = evaluate(a, valuation, f.left)
    y = evaluate(a, valuation, f.right)
    if isinstance(f, And):
        return int(a.meet[x, y])
    if isinstance(f, Or):
        return int(a.join[x, y])
    return int(a.imp[x, y])


def evaluate_all(a: FiniteHeytingAlgebra, columns: Mapping[str, np.ndarray], f: Formula,
                 memo: dict | None = None) -> np.ndarray:
    """Vectorised :func:`evaluate`: ``columns`` maps variables to value arrays."""
    memo = {} if memo is None else memo
    hit = memo.get(f)
    if hit is not None:
        return hit
    if isinstance(f, Var):
        try:
            out = columns[f.name]
        except KeyError:
            raise UnboundVariable(f.name) from None
    elif isinstance(f, (Bot, Top)):
        size = len(next(iter(columns.values()))) if columns else 1
        out = np.full(size, a.bot if isinstance(f, Bot) else a.top, dtype=np.int32)
    elif isinstance(f, Not):
        out = a.neg[evaluate_all(a, columns, f.arg, memo)]
    else:
        x = evaluate_all(a, columns, f.left, memo)
        y = evaluate_all(a, columns, f.right, memo)
        table = a.meet if isinstance(f, And) else a.join if isinstance(f, Or) else a.imp
        out = table[x, y]
    memo[f] = out
    return out


def valuations(n: int, k: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Rows ``start..stop`` of the lexicographic table of ``k``-tuples over ``0..n-1``."""
    stop = n**k if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    cols = np.empty((k, len(idx)), dtype=np.int32)
    for i in range(k - 1, -1, -1):
        cols[i] = idx % n
        idx //= n
    return cols


@dataclass(frozen=True)
class Refutation:
    """A valuation under which every premise is top and no conclusion is."""

    algebra: FiniteHeytingAlgebra
    target: MRule
    valuation: dict[str, int]
    premise_values: tuple[int, ...]
    conclusion_values: tuple[int, ...]

    def replay(self) -> bool:
        """Re-evaluate; True iff this is still a refutation of ``target``."""
        a = self.algebra
        prem = tuple(evaluate(a, self.valuation, f) for f in self.target.sorted_premises)
        concl = tuple(evaluate(a, self.valuation, f) for f in self.target.sorted_conclusions)
        return (prem == self.premise_values and concl == self.conclusion_values
                and all(v == a.top for v in prem) and all(v != a.top for v in concl))

    def labelled_valuation(self) -> dict[str, str]:
        return {v: self.algebra.labels[x] for v, x in sorted(self.valuation.items())}

    def __str__(self) -> str:
        lab = self.algebra.labels
        val = ", ".join(f"{v}={lab[x]}" for v, x in sorted(self.valuation.items()))
        concl = ", ".join(f"{f}={lab[x]}" for f, x in zip(self.target.sorted_conclusions,
                                                          self.conclusion_values))
        name = self.algebra.name or f"algebra of size {self.algebra.n}"
        return f"{name}: {val or '(no variables)'}; conclusions {concl or '(none)'}"

    def to_json(self) -> dict:
        lab = self.algebra.labels
        return {
            "algebra": self.algebra.name,
            "size": self.algebra.n,
            "valuation": {v: x for v, x in sorted(self.valuation.items())},
            "valuation_labels": self.labelled_valuation(),
            "premise_values": [lab[x] for x in self.premise_values],
            "conclusion_values": [lab[x] for x in self.conclusion_values],
        }


def _as_rule(x: Union[MRule, Formula]) -> MRule:
    return x if isinstance(x, MRule) else MRule((), (x,))


def refute(a: FiniteHeytingAlgebra, x: Union[MRule, Formula],
           budget: int | None = None) -> Refutation | None:
    """Lexicographically first refuting valuation of ``x`` in ``a``, or None.

    A formula is treated as the rule with no premises and itself as the only
    conclusion. Raises :class:`config.BudgetExceeded` if the search would
    need more than ``budget`` formula evaluations.
    """
    r = _as_rule(x)
    budget = config.evaluation_budget() if budget is None else budget
    vs = sorted(r.vars)
    k = len(vs)
    total = a.n**k
    prems = r.sorted_premises
    concls = r.sorted_conclusions
    cost = total * max(1, len(prems) + len(concls))
    if cost > budget:
        raise config.BudgetExceeded(f"{a.n}^{k} valuations x {len(prems) + len(concls)} formulas "
                                    f"= {cost} exceeds budget {budget}")
    for start in range(0, total, CHUNK):
        stop = min(total, start + CHUNK)
        cols = valuations(a.n, k, start, stop)
        columns = dict(zip(vs, cols))
        size = stop - start
        memo: dict = {}
        ok = np.ones(size, dtype=bool)
        for f in prems:
            ok &= evaluate_all(a, columns, f, memo) == a.top
            if not ok.any():
                break
        if not ok.any():
            continue
        for f in concls:
            ok &= evaluate_all(a, columns, f, memo) != a.top
            if not ok.any():
                break
        hits = np.flatnonzero(ok)
        if len(hits):
            i = int(hits[0])
            nu = {v: int(cols[j, i]) for j, v in enumerate(vs)}
            return Refutation(
                a, r, nu,
                tuple(evaluate(a, nu, f) for f in prems),
                tuple(evaluate(a, nu, f) for f in concls),
            )
    return None


def models_formula(a: FiniteHeytingAlgebra, f: Formula, budget: int | None = None) -> bool:
    return refute(a, f, budget) is None


def models_mrule(a: FiniteHeytingAlgebra, r: MRule, budget: int | None = None) -> bool:
    """True iff every valuation making all premises top makes some conclusion top.

    With no conclusions this means no valuation makes all premises top.
    """
    return refute(a, r, budget) is None


def models(a: FiniteHeytingAlgebra, x: Union[MRule, Formula, Iterable[MRule]],
           budget: int | None = None) -> bool:
    if isinstance(x, (MRule, Formula)):
        return refute(a, x, budget) is None
    return all(refute(a, r, budget) is None for r in x)


def find_refuting_algebra(x: Union[MRule, Formula], pool: Iterable[FiniteHeytingAlgebra],
                          budget: int | None = None) -> tuple[FiniteHeytingAlgebra, Refutation] | None:
    """First member of ``pool`` (in pool order) refuting ``x``."""
    for a in pool:
        ref = refute(a, x, budget)
        if ref is not None:
            return a, ref
    return None
