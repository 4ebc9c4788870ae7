"""Propositional formulas, m-rules and substitutions, plus the text syntax.

Grammar (loosest to tightest)::

    formula := disj ('->' formula)?          right associative
    disj    := conj ('|' conj)*              left associative
    conj    := unary ('&' unary)*            left associative
    unary   := '~' unary | atom
    atom    := VAR | '0' | '1' | '(' formula ')'

A rule is ``F1, ..., Fn / G1, ..., Gm`` where either side may be empty.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Union

__all__ = [
    "Formula", "Var", "Bot", "Top", "Not", "And", "Or", "Imp",
    "BOT", "TOP", "MRule", "Substitution", "ParseError",
    "parse_formula", "parse_rule", "apply_substitution", "compose",
    "fresh_variable", "big_and", "big_or", "formula_vars", "read_rules", "parse_rule_lines",
    "format_substitution", "RuleFileError",
]


class ParseError(ValueError):
    """Syntax error in formula or rule text; ``pos`` is a 0-based column."""

    def __init__(self, msg: str, pos: int | None = None, text: str | None = None):
        self.msg = msg
        self.pos = pos
        self.text = text
        where = f" at column {pos + 1}" if pos is not None else ""
        super().__init__(f"{msg}{where}")


class Formula:
    """Base class of formula nodes. Nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        return _show(self)

    @property
    def vars(self) -> frozenset[str]:
        return formula_vars(self)

    # operator sugar, handy in tests and corpora
    def __and__(self, other: Formula) -> Formula:
        return And(self, other)

    def __or__(self, other: Formula) -> Formula:
        return Or(self, other)

    def __rshift__(self, other: Formula) -> Formula:
        return Imp(self, other)

    def __invert__(self) -> Formula:
        return Not(self)


@dataclass(frozen=True, slots=True)
class Var(Formula):
    name: str

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


@dataclass(frozen=True, slots=True)
class Bot(Formula):
    def __repr__(self) -> str:
        return "Bot()"


@dataclass(frozen=True, slots=True)
class Top(Formula):
    def __repr__(self) -> str:
        return "Top()"


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Imp(Formula):
    left: Formula
    right: Formula


BOT = Bot()
TOP = Top()

Substitution = Mapping[str, Formula]

_PREC = {Imp: 1, Or: 2, And: 3}
_SYM = {Imp: "->", Or: "|", And: "&"}


def _show(f: Formula) -> str:
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Bot):
        return "0"
    if isinstance(f, Top):
        return "1"
    if isinstance(f, Not):
        inner = _show(f.arg)
        if isinstance(f.arg, (And, Or, Imp)):
            inner = f"({inner})"
        return "~" + inner
    prec = _PREC[type(f)]
    left, right = _show(f.left), _show(f.right)
    lp = _PREC.get(type(f.left), 9)
    rp = _PREC.get(type(f.right), 9)
    if isinstance(f, Imp):
        # right associative
        if lp <= prec:
            left = f"({left})"
        if rp < prec:
            right = f"({right})"
    else:
        if lp < prec:
            left = f"({left})"
        if rp <= prec:
            right = f"({right})"
    return f"{left} {_SYM[type(f)]} {right}"


def formula_vars(f: Formula) -> frozenset[str]:
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Var):
            out.add(g.name)
        elif isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, (And, Or, Imp)):
            stack.append(g.left)
            stack.append(g.right)
    return frozenset(out)


# --- n-ary folds -----------------------------------------------------------

def _canonical(fs: Iterable[Formula]) -> list[Formula]:
    return sorted(set(fs), key=str)


def big_and(fs: Iterable[Formula]) -> Formula:
    """Conjunction of a formula set; empty set gives ``1``.

    Members are folded left-associatively in order of their printed form.
    """
    items = _canonical(fs)
    if not items:
        return TOP
    acc = items[0]
    for f in items[1:]:
        acc = And(acc, f)
    return acc


def big_or(fs: Iterable[Formula]) -> Formula:
    """Disjunction of a formula set; empty set gives ``0``."""
    items = _canonical(fs)
    if not items:
        return BOT
    acc = items[0]
    for f in items[1:]:
        acc = Or(acc, f)
    return acc


# --- rules -----------------------------------------------------------------

@dataclass(frozen=True)
class MRule:
    """Multiple-conclusion rule ``premises / conclusions``."""

    premises: frozenset[Formula]
    conclusions: frozenset[Formula]

    def __init__(self, premises: Iterable[Formula] = (), conclusions: Iterable[Formula] = ()):
        object.__setattr__(self, "premises", frozenset(premises))
        object.__setattr__(self, "conclusions", frozenset(conclusions))

    @property
    def is_single_conclusion(self) -> bool:
        return len(self.conclusions) == 1

    @cached_property
    def vars(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for f in self.premises | self.conclusions:
            out |= formula_vars(f)
        return out

    @property
    def sorted_premises(self) -> list[Formula]:
        return _canonical(self.premises)

    @property
    def sorted_conclusions(self) -> list[Formula]:
        return _canonical(self.conclusions)

    def __str__(self) -> str:
        lhs = ", ".join(map(str, self.sorted_premises))
        rhs = ", ".join(map(str, self.sorted_conclusions))
        return f"{lhs} / {rhs}".strip()

    def __repr__(self) -> str:
        return f"MRule({str(self)!r})"


# --- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(->)|([&|~()])|([a-zA-Z][a-zA-Z0-9_]*)|([01])(?![a-zA-Z0-9_])|(\S))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        arrow, op, ident, const, junk = m.groups()
        start = m.start(m.lastindex)
        if arrow:
            toks.append(("op", "->", start))
        elif op:
            toks.append(("op", op, start))
        elif ident:
            toks.append(("var", ident, start))
        elif const:
            toks.append(("const", const, start))
        else:
            if junk in "01":
                raise ParseError("constants 0 and 1 cannot start an identifier", start, text)
            raise ParseError(f"unexpected character {junk!r}", start, text)
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i][1] if self.i < len(self.toks) else None

    def pos(self) -> int:
        return self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)

    def expect(self, sym: str) -> None:
        if self.peek() != sym:
            got = self.peek()
            raise ParseError(f"expected {sym!r}, got {got!r}" if got else f"expected {sym!r} at end of input",
                             self.pos(), self.text)
        self.i += 1

    def formula(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.i += 1
            return Imp(left, self.formula())
        return left

    def disj(self) -> Formula:
        acc = self.conj()
        while self.peek() == "|":
            self.i += 1
            acc = Or(acc, self.conj())
        return acc

    def conj(self) -> Formula:
        acc = self.unary()
        while self.peek() == "&":
            self.i += 1
            acc = And(acc, self.unary())
        return acc

    def unary(self) -> Formula:
        if self.peek() == "~":
            self.i += 1
            return Not(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        if self.i >= len(self.toks):
            raise ParseError("unexpected end of input", len(self.text), self.text)
        kind, val, pos = self.toks[self.i]
        if kind == "var":
            self.i += 1
            return Var(val)
        if kind == "const":
            self.i += 1
            return TOP if val == "1" else BOT
        if val == "(":
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        raise ParseError(f"unexpected {val!r}", pos, self.text)


def parse_formula(text: str) -> Formula:
    """Parse a formula.

    >>> parse_formula("~p -> (q | r)")
    Imp(left=Not(arg=Var('p')), right=Or(left=Var('q'), right=Var('r')))
    """
    p = _Parser(text)
    f = p.formula()
    if p.i != len(p.toks):
        raise ParseError(f"trailing input {p.peek()!r}", p.pos(), text)
    return f


def _parse_side(text: str, offset: int) -> list[Formula]:
    if not text.strip():
        return []
    out = []
    start = 0
    for chunk in text.split(","):
        if not chunk.strip():
            raise ParseError("empty formula in list", offset + start, text)
        try:
            out.append(parse_formula(chunk))
        except ParseError as e:
            raise ParseError(e.msg, None if e.pos is None else offset + start + e.pos) from None
        start += len(chunk) + 1
    return out


def parse_rule(text: str) -> MRule:
    """Parse ``F1, ..., Fn / G1, ..., Gm``."""
    if "/" not in text:
        raise ParseError("missing '/' between premises and conclusions", None, text)
    if text.count("/") > 1:
        raise ParseError("more than one '/'", text.index("/", text.index("/") + 1), text)
    lhs, rhs = text.split("/")
    return MRule(_parse_side(lhs, 0), _parse_side(rhs, len(lhs) + 1))


class RuleFileError(ValueError):
    def __init__(self, path: str, lineno: int, msg: str):
        self.path, self.lineno = path, lineno
        super().__init__(f"{path}:{lineno}: {msg}")


def read_rules(path: str | Path) -> Iterator[tuple[int, MRule]]:
    """Yield ``(line_number, rule)`` from a rule file.

    Blank lines and ``#`` comments are skipped; a ``basis s|m`` header is
    skipped too (see :func:`admrules.transforms.read_basis`).
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        yield from parse_rule_lines(fh, str(path))


def parse_rule_lines(lines: Iterable[str], where: str = "<string>") -> Iterator[tuple[int, MRule]]:
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line or re.fullmatch(r"basis\s+[sm]", line):
            continue
        try:
            yield lineno, parse_rule(line)
        except ParseError as e:
            raise RuleFileError(where, lineno, str(e)) from None


# --- substitutions ---------------------------------------------------------

def _subst(sigma: Substitution, f: Formula) -> Formula:
    if isinstance(f, Var):
        return sigma.get(f.name, f)
    if isinstance(f, Not):
        return Not(_subst(sigma, f.arg))
    if isinstance(f, (And, Or, Imp)):
        return type(f)(_subst(sigma, f.left), _subst(sigma, f.right))
    return f


def apply_substitution(sigma: Substitution, x: Union[Formula, MRule]):
    """Apply ``sigma`` homomorphically to a formula or to both sides of a rule."""
    if isinstance(x, MRule):
        return MRule((_subst(sigma, f) for f in x.premises),
                     (_subst(sigma, f) for f in x.conclusions))
    return _subst(sigma, x)


def compose(first: Substitution, second: Substitution) -> dict[str, Formula]:
    """Substitution equal to applying ``first`` and then ``second``."""
    out = {v: _subst(second, f) for v, f in first.items()}
    for v, f in second.items():
        out.setdefault(v, f)
    return out


def format_substitution(sigma: Substitution) -> str:
    return ", ".join(f"{v} := {sigma[v]}" for v in sorted(sigma))


def fresh_variable(*items: Union[MRule, Formula, Iterable[MRule]], prefix: str = "q") -> str:
    """First name ``q0, q1, ...`` not occurring in any of the given rules/formulas."""
    used: set[str] = set()

    def collect(x):
        if isinstance(x, MRule):
            used.update(x.vars)
        elif isinstance(x, Formula):
            used.update(formula_vars(x))
        else:
            for y in x:
                collect(y)

    for x in items:
        collect(x)
    i = 0
    while f"{prefix}{i}" in used:
        i += 1
    return f"{prefix}{i}"
