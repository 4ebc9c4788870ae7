"""Reductions of m-rules to rules and conversions between bases.

All constructions are purely syntactic: no simplification of the folded
conjunctions and disjunctions is ever attempted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal

from .algebra import FiniteHeytingAlgebra, is_well_connected
from .semantics import Refutation, models_mrule, refute
from .syntax import MRule, Or, Var, big_and, big_or, fresh_variable, parse_formula, parse_rule_lines

__all__ = [
    "Basis", "BasisKindError", "reduce", "q_reduce", "dp_rule",
    "m_basis_from_s_basis", "s_basis_from_m_basis", "find_independence_witness",
    "read_basis", "format_basis",
]

BasisKind = Literal["s", "m"]


class BasisKindError(ValueError):
    pass


@dataclass(frozen=True)
class Basis:
    """A finite set of rules, tagged as an s-basis (rules) or an m-basis (m-rules)."""

    kind: BasisKind
    rules: frozenset[MRule]
    source: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rules", frozenset(self.rules))
        if self.kind not in ("s", "m"):
            raise BasisKindError(f"unknown basis kind {self.kind!r}")
        if self.kind == "s":
            bad = [r for r in self.rules if not r.is_single_conclusion]
            if bad:
                raise BasisKindError(f"s-basis contains m-rule {bad[0]}")

    def sorted_rules(self) -> list[MRule]:
        return sorted(self.rules, key=str)

    def __iter__(self):
        return iter(self.sorted_rules())

    def __len__(self) -> int:
        return len(self.rules)


def reduce(r: MRule) -> MRule:
    """The single-conclusion rule ``/\\premises / \\/conclusions`` (empty sides give 1 and 0)."""
    return MRule([big_and(r.premises)], [big_or(r.conclusions)])


def q_reduce(r: MRule, q: str | None = None) -> MRule:
    """The rule ``(/\\premises) | q / (\\/conclusions) | q`` for a variable ``q`` not in ``r``."""
    q = fresh_variable(r) if q is None else q
    if q in r.vars:
        raise ValueError(f"variable {q!r} occurs in rule {r}")
    qv = Var(q)
    return MRule([Or(big_and(r.premises), qv)], [Or(big_or(r.conclusions), qv)])


_DP = MRule([parse_formula("p | q")], [parse_formula("p"), parse_formula("q")])


def dp_rule() -> MRule:
    """``p | q / p, q``: the disjunction property as an m-rule."""
    return _DP


def m_basis_from_s_basis(b: Basis) -> Basis:
    if b.kind != "s":
        raise BasisKindError(f"expected an s-basis, got a {b.kind}-basis")
    return Basis("m", b.rules | {dp_rule()}, b.source)


def s_basis_from_m_basis(b: Basis) -> tuple[Basis, str]:
    """q-reduce every rule with one variable fresh for the whole basis.

    Returns the new basis and the chosen variable.
    """
    if b.kind != "m":
        raise BasisKindError(f"expected an m-basis, got a {b.kind}-basis")
    q = fresh_variable(b.rules)
    return Basis("s", {q_reduce(r, q) for r in b.rules}, b.source), q


def find_independence_witness(rules: Iterable[MRule], r: MRule,
                              pool: Iterable[FiniteHeytingAlgebra],
                              budget: int | None = None) -> tuple[FiniteHeytingAlgebra, Refutation] | None:
    """Well-connected algebra validating ``(rules - {r}) | {DP}`` and refuting ``r``.

    A hit shows ``r`` is not derivable from the other rules together with DP.
    Pool order decides which witness is returned; None is inconclusive.
    """
    rules = set(rules)
    if r not in rules:
        raise ValueError(f"rule {r} is not in the given set")
    others = sorted((rules - {r}) | {dp_rule()}, key=str)
    for a in pool:
        if not is_well_connected(a):
            continue
        ref = refute(a, r, budget)
        if ref is None:
            continue
        if all(models_mrule(a, s, budget) for s in others):
            return a, ref
    return None


# --- files -----------------------------------------------------------------

def read_basis(path: str | Path, kind: BasisKind | None = None) -> Basis:
    """Read a rule file as a basis.

    The kind comes from a ``basis s`` / ``basis m`` header line if present,
    else from ``kind``, else it is ``s`` when every rule is single-conclusion.
    """
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    header = None
    for line in lines:
        s = line.split("#", 1)[0].strip()
        m = re.fullmatch(r"basis\s+([sm])", s)
        if m:
            header = m.group(1)
            break
        if s:
            break
    rules = [r for _, r in parse_rule_lines(lines, str(path))]
    if header and kind and header != kind:
        raise BasisKindError(f"{path}: file declares a {header}-basis, expected {kind}")
    if header is None and kind is None:
        kind = "s" if all(r.is_single_conclusion for r in rules) else "m"
    return Basis(header or kind, rules, str(path))


def format_basis(b: Basis) -> str:
    lines = [f"basis {b.kind}"] + [str(r) for r in b.sorted_rules()]
    return "\n".join(lines) + "\n"
