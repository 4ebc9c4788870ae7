"""Finite Heyting algebras given by operation tables.

Every finite distributive lattice is a Heyting algebra, so the algebras here
are built either from explicit tables (checked by :func:`validate`) or as
lattices of downsets of a finite poset (:func:`from_poset`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import config

__all__ = [
    "FiniteHeytingAlgebra", "Poset", "HeytingLawError", "Violation",
    "validate", "check_laws", "from_poset", "direct_product", "power",
    "is_well_connected", "connectedness_witness", "canonical_form",
    "is_isomorphic", "enumerate_algebras", "enumerate_posets",
    "chain", "boolean", "degenerate", "read_algebras", "format_algebra",
    "read_poset", "format_poset", "parse_algebras", "AlgebraFormatError",
]


@dataclass(frozen=True)
class Violation:
    law: str
    witness: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.law} at {self.witness}"


class HeytingLawError(ValueError):
    """Raised when tables do not define a Heyting algebra."""

    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(map(str, self.violations)))


class FiniteHeytingAlgebra:
    """Heyting algebra on the carrier ``0..n-1``.

    ``meet``, ``join`` and ``imp`` are ``n x n`` integer tables. Instances are
    immutable; the tables are read-only numpy arrays. Use :func:`validate` to
    build one from untrusted tables.
    """

    __slots__ = ("meet", "join", "imp", "bot", "top", "labels", "name", "__dict__")

    def __init__(self, meet, join, imp, bot: int, top: int, labels: Sequence[str] | None = None,
                 name: str | None = None):
        self.meet = _freeze(meet)
        self.join = _freeze(join)
        self.imp = _freeze(imp)
        self.bot = int(bot)
        self.top = int(top)
        n = self.meet.shape[0]
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
        self.name = name

    @property
    def n(self) -> int:
        return self.meet.shape[0]

    def __len__(self) -> int:
        return self.n

    @cached_property
    def neg(self) -> np.ndarray:
        return _freeze(self.imp[:, self.bot])

    @cached_property
    def leq(self) -> np.ndarray:
        """Boolean matrix, ``leq[a, b]`` iff ``a <= b``."""
        idx = np.arange(self.n)
        return _freeze(self.meet == idx[:, None])

    @property
    def is_degenerate(self) -> bool:
        return self.n == 1

    def __repr__(self) -> str:
        tag = f" {self.name}" if self.name else ""
        return f"<FiniteHeytingAlgebra{tag} n={self.n}>"

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteHeytingAlgebra):
            return NotImplemented
        return (self.bot == other.bot and self.top == other.top
                and np.array_equal(self.meet, other.meet)
                and np.array_equal(self.join, other.join)
                and np.array_equal(self.imp, other.imp))

    def __hash__(self) -> int:
        return hash((self.n, self.bot, self.top, self.meet.tobytes(), self.imp.tobytes()))

    def relabel(self, order: Sequence[int]) -> FiniteHeytingAlgebra:
        """Isomorphic copy in which new element ``i`` is old element ``order[i]``."""
        order = np.asarray(order)
        inv = np.empty_like(order)
        inv[order] = np.arange(len(order))
        sub = np.ix_(order, order)
        return FiniteHeytingAlgebra(inv[self.meet[sub]], inv[self.join[sub]], inv[self.imp[sub]],
                                    inv[self.bot], inv[self.top],
                                    [self.labels[i] for i in order], self.name)


def _freeze(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int32)
    arr.setflags(write=False)
    return arr


# --- law checking ----------------------------------------------------------

def _first(mask: np.ndarray) -> tuple[int, ...] | None:
    hits = np.argwhere(mask)
    return tuple(int(x) for x in hits[0]) if len(hits) else None


def check_laws(meet, join, imp, bot: int, top: int) -> list[Violation]:
    """Return the violated Heyting-algebra laws, each with its first witness.

    Checks stop at the first failing group (lattice, then distributivity,
    then residuation) since later laws presuppose earlier ones.
    """
    meet, join, imp = (np.asarray(t) for t in (meet, join, imp))
    n = meet.shape[0] if meet.ndim == 2 else 0
    out: list[Violation] = []
    for nm, t in (("meet", meet), ("join", join), ("imp", imp)):
        if t.shape != (n, n) or n == 0:
            return [Violation(f"table-shape:{nm}", tuple(t.shape))]
        bad = _first((t < 0) | (t >= n))
        if bad is not None:
            out.append(Violation(f"table-range:{nm}", bad))
    if not (0 <= bot < n and 0 <= top < n):
        out.append(Violation("constant-range", (bot, top)))
    if out:
        return out

    a = np.arange(n)
    A, B, C = a[:, None, None], a[None, :, None], a[None, None, :]
    for nm, t in (("meet", meet), ("join", join)):
        for law, mask in (
            (f"not-a-lattice:{nm}-idempotent", t[a, a] != a),
            (f"not-a-lattice:{nm}-commutative", t != t.T),
            (f"not-a-lattice:{nm}-associative", t[t[A, B], C] != t[A, t[B, C]]),
        ):
            w = _first(mask)
            if w is not None:
                out.append(Violation(law, w))
    for law, mask in (
        ("not-a-lattice:absorption-meet", meet[a[:, None], join] != a[:, None]),
        ("not-a-lattice:absorption-join", join[a[:, None], meet] != a[:, None]),
        ("not-a-lattice:bot", meet[bot] != bot),
        ("not-a-lattice:top", join[top] != top),
    ):
        w = _first(mask)
        if w is not None:
            out.append(Violation(law, w))
    if out:
        return out

    w = _first(meet[A, join[B, C]] != join[meet[A, B], meet[A, C]])
    if w is not None:
        return [Violation("non-distributive", w)]

    leq = meet == a[:, None]
    # meet(a, c) <= b  <=>  c <= imp(a, b), indexed [a, b, c]
    lhs = leq[meet[A, C], B]
    rhs = leq[C, imp[A, B]]
    w = _first(lhs != rhs)
    if w is not None:
        out.append(Violation("residuation", w))
    return out


def validate(meet, join, imp, bot: int, top: int, labels=None, name=None) -> FiniteHeytingAlgebra:
    """Build an algebra from tables, raising :class:`HeytingLawError` on failure."""
    violations = check_laws(meet, join, imp, bot, top)
    if violations:
        raise HeytingLawError(violations)
    return FiniteHeytingAlgebra(meet, join, imp, bot, top, labels, name)


# --- posets and downset lattices -------------------------------------------

@dataclass(frozen=True)
class Poset:
    """Finite strict partial order on ``0..size-1``."""

    size: int
    less: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "less", frozenset(self.less))
        for i, j in self.less:
            if not (0 <= i < self.size and 0 <= j < self.size):
                raise ValueError(f"pair {(i, j)} outside 0..{self.size - 1}")
            if i == j:
                raise ValueError(f"order not irreflexive at {i}")
        for (i, j), (k, l) in itertools.product(self.less, repeat=2):
            if j == k and (i, l) not in self.less:
                raise ValueError(f"order not transitive: {i}<{j}<{l}")

    @classmethod
    def from_relation(cls, size: int, pairs: Iterable[tuple[int, int]]) -> Poset:
        """Transitive closure of ``pairs``."""
        below = [0] * size
        for i, j in pairs:
            below[j] |= 1 << i
        changed = True
        while changed:
            changed = False
            for j in range(size):
                acc = below[j]
                for i in range(size):
                    if below[j] >> i & 1:
                        acc |= below[i]
                if acc != below[j]:
                    below[j], changed = acc, True
        return cls(size, frozenset((i, j) for j in range(size) for i in range(size) if below[j] >> i & 1))

    @cached_property
    def below_masks(self) -> tuple[int, ...]:
        masks = [0] * self.size
        for i, j in self.less:
            masks[j] |= 1 << i
        return tuple(masks)

    def downsets(self) -> list[int]:
        return _downsets(self.size, self.below_masks)


def _downsets(size: int, below: Sequence[int]) -> list[int]:
    out = []
    for mask in range(1 << size):
        if all(below[i] & ~mask == 0 for i in range(size) if mask >> i & 1):
            out.append(mask)
    return out


def from_poset(p: Poset, name: str | None = None) -> FiniteHeytingAlgebra:
    """Lattice of downsets of ``p`` ordered by inclusion.

    Elements are sorted by (cardinality, bitmask), so the empty downset is
    ``0`` and the whole poset is ``n-1``.
    """
    return _downset_algebra(p.size, p.below_masks, name)


def _downset_algebra(size: int, below: Sequence[int], name=None) -> FiniteHeytingAlgebra:
    ds = sorted(_downsets(size, below), key=lambda m: (bin(m).count("1"), m))
    index = {m: i for i, m in enumerate(ds)}
    n = len(ds)
    meet = np.empty((n, n), dtype=np.int32)
    join = np.empty((n, n), dtype=np.int32)
    imp = np.empty((n, n), dtype=np.int32)
    # principal downsets, inclusive
    principal = [below[x] | 1 << x for x in range(size)]
    for i, a in enumerate(ds):
        for j, b in enumerate(ds):
            meet[i, j] = index[a & b]
            join[i, j] = index[a | b]
            c = 0
            for x in range(size):
                if principal[x] & a & ~b == 0:
                    c |= 1 << x
            imp[i, j] = index[c]
    labels = ["{" + ",".join(str(x) for x in range(size) if m >> x & 1) + "}" for m in ds]
    return FiniteHeytingAlgebra(meet, join, imp, 0, n - 1, labels, name)


def chain(n: int) -> FiniteHeytingAlgebra:
    """The ``n``-element chain ``0 < ... < n-1``."""
    if n < 1:
        raise ValueError("chain needs at least one element")
    a = np.arange(n)
    meet = np.minimum.outer(a, a)
    join = np.maximum.outer(a, a)
    imp = np.where(a[:, None] <= a[None, :], n - 1, a[None, :])
    if n == 1:
        labels = ["0"]
    elif n == 3:
        labels = ["0", "a", "1"]
    else:
        labels = ["0"] + [f"a{i}" for i in range(1, n - 1)] + ["1"]
    return FiniteHeytingAlgebra(meet, join, imp, 0, n - 1, labels, name=f"C{n}")


def degenerate() -> FiniteHeytingAlgebra:
    return FiniteHeytingAlgebra([[0]], [[0]], [[0]], 0, 0, ["0"], name="C1")


def boolean(k: int = 1) -> FiniteHeytingAlgebra:
    """Boolean algebra with ``2**k`` elements (``B2`` to the power ``k``)."""
    b2 = chain(2)
    b2.name = "B2"
    out = b2
    for _ in range(k - 1):
        out = direct_product(out, b2)
    if k > 1:
        out.name = f"B2^{k}"
    return out


# --- products and connectedness ---------------------------------------------

def direct_product(a: FiniteHeytingAlgebra, b: FiniteHeytingAlgebra,
                   cap: int | None = None) -> FiniteHeytingAlgebra:
    """Componentwise product. Element ``(i, j)`` is encoded as ``i + |a| * j``.

    The first coordinate varies fastest, so lexicographic valuation search
    meets ``(1,0)`` before ``(0,1)``.
    """
    cap = config.product_cap() if cap is None else cap
    na, nb = a.n, b.n
    if na * nb > cap:
        raise config.CapExceeded(f"product of sizes {na}x{nb} = {na * nb} exceeds cap {cap}")

    def combine(ta, tb):
        # [i1 + na*j1, i2 + na*j2] -> ta[i1,i2] + na*tb[j1,j2]
        t = ta[None, :, None, :] + na * tb[:, None, :, None]
        return t.reshape(na * nb, na * nb)

    labels = [_pair_label(a.labels[i], b.labels[j]) for j in range(nb) for i in range(na)]
    name = f"{a.name}x{b.name}" if a.name and b.name else None
    return FiniteHeytingAlgebra(combine(a.meet, b.meet), combine(a.join, b.join),
                                combine(a.imp, b.imp), a.bot + na * b.bot, a.top + na * b.top,
                                labels, name)


def _pair_label(x: str, y: str) -> str:
    strip = lambda s: s[1:-1] if s.startswith("(") else s  # noqa: E731
    return f"({strip(x)},{strip(y)})"


def power(a: FiniteHeytingAlgebra, k: int, cap: int | None = None) -> FiniteHeytingAlgebra:
    out = a
    for _ in range(k - 1):
        out = direct_product(out, a, cap)
    if a.name and k > 1:
        out.name = f"{a.name}^{k}"
    return out


def connectedness_witness(a: FiniteHeytingAlgebra) -> tuple[int, int] | None:
    """First pair ``x < y`` (by index) of non-top elements with ``x | y == top``."""
    nt = np.arange(a.n) != a.top
    mask = (a.join == a.top) & nt[:, None] & nt[None, :]
    mask = np.triu(mask)
    return _first(mask)


def is_well_connected(a: FiniteHeytingAlgebra) -> bool:
    return connectedness_witness(a) is None


# --- canonical forms and isomorphism ---------------------------------------

def _invariants(a: FiniteHeytingAlgebra) -> list[tuple[int, ...]]:
    leq = a.leq
    down = leq.sum(axis=0)
    up = leq.sum(axis=1)
    strict = leq & ~np.eye(a.n, dtype=bool)
    # covers: x < y with nothing strictly between
    between = (strict.astype(np.int32) @ strict.astype(np.int32)) > 0
    cover = strict & ~between
    return [(int(down[x]), int(up[x]), int(cover[:, x].sum()), int(cover[x].sum()),
             int(a.neg[x] == a.bot)) for x in range(a.n)]


_CANON_CACHE: dict[int, tuple] = {}


def canonical_form(a: FiniteHeytingAlgebra, max_candidates: int = 2_000_000) -> tuple[tuple[int, ...], FiniteHeytingAlgebra]:
    """Return ``(key, relabelled_algebra)``, both isomorphism invariant.

    Elements are first ordered by an isomorphism-invariant signature; the key
    is the lexicographically least meet table over all relabellings that
    respect that ordering. The meet table determines join and implication, so
    equal keys mean isomorphic algebras.
    """
    h = hash(a)
    hit = _CANON_CACHE.get(h)
    if hit is not None and hit[0] == a:
        return hit[1], hit[2]
    inv = _invariants(a)
    classes: dict[tuple, list[int]] = {}
    for x in sorted(range(a.n), key=lambda x: inv[x]):
        classes.setdefault(inv[x], []).append(x)
    groups = [classes[k] for k in sorted(classes)]
    count = math.prod(math.factorial(len(g)) for g in groups)
    if count > max_candidates:
        raise config.CapExceeded(f"canonical form needs {count} relabellings (cap {max_candidates})")
    best_key = None
    best_order = None
    for parts in itertools.product(*(itertools.permutations(g) for g in groups)):
        order = np.fromiter(itertools.chain.from_iterable(parts), dtype=np.int64, count=a.n)
        invp = np.empty_like(order)
        invp[order] = np.arange(a.n)
        key = tuple(invp[a.meet[np.ix_(order, order)]].ravel().tolist())
        if best_key is None or key < best_key:
            best_key, best_order = key, order
    canon = a.relabel(best_order)
    canon.name = a.name
    _CANON_CACHE[h] = (a, best_key, canon)
    return best_key, canon


def is_isomorphic(a: FiniteHeytingAlgebra, b: FiniteHeytingAlgebra) -> bool:
    if a.n != b.n or sorted(_invariants(a)) != sorted(_invariants(b)):
        return False
    return canonical_form(a)[0] == canonical_form(b)[0]


# --- enumeration -----------------------------------------------------------

def _poset_key(size: int, below: Sequence[int]) -> tuple:
    """Canonical key of a poset given by strict-below bitmasks."""
    def sig(x):
        up = sum(1 for y in range(size) if below[y] >> x & 1)
        return (bin(below[x]).count("1"), up)

    classes: dict[tuple, list[int]] = {}
    for x in sorted(range(size), key=sig):
        classes.setdefault(sig(x), []).append(x)
    groups = [classes[k] for k in sorted(classes)]
    best = None
    for parts in itertools.product(*(itertools.permutations(g) for g in groups)):
        order = list(itertools.chain.from_iterable(parts))
        pos = {old: new for new, old in enumerate(order)}
        key = tuple(sum(1 << pos[i] for i in range(size) if below[old] >> i & 1) for old in order)
        if best is None or key < best:
            best = key
    return best if best is not None else ()


def enumerate_posets(max_downsets: int) -> Iterator[tuple[int, tuple[int, ...]]]:
    """Posets up to isomorphism whose downset lattice has at most ``max_downsets`` elements.

    Yields ``(size, below_masks)``. Each poset of size ``k + 1`` arises from
    one of size ``k`` by adding a maximal element above some downset, and the
    number of downsets only grows under that step, so pruning is exact.
    """
    level = {(): ()}
    size = 0
    while level:
        for key in sorted(level):
            yield size, key
        nxt: dict[tuple, tuple] = {}
        for below in level.values():
            for d in _downsets(size, below):
                ext = tuple(below) + (d,)
                if len(_downsets(size + 1, ext)) > max_downsets:
                    continue
                k = _poset_key(size + 1, ext)
                nxt.setdefault(k, k)
        level = nxt
        size += 1


def enumerate_algebras(n_max: int, include_degenerate: bool = False) -> Iterator[FiniteHeytingAlgebra]:
    """Finite Heyting algebras of size ``<= n_max``, one per isomorphism class.

    Order is by size, then by canonical key; every algebra is in canonical
    presentation with ``0`` as bottom and ``n-1`` as top.
    """
    cap = config.enumeration_cap()
    if n_max > cap:
        raise config.CapExceeded(f"enumeration size {n_max} exceeds cap {cap}")
    found: dict[tuple, FiniteHeytingAlgebra] = {}
    for size, below in enumerate_posets(n_max):
        alg = _downset_algebra(size, below)
        key, canon = canonical_form(alg)
        found.setdefault((alg.n, key), canon)
    for (n, key) in sorted(found):
        if n == 1 and not include_degenerate:
            continue
        alg = found[(n, key)]
        alg.name = alg.name or _auto_name(alg, n, key, found)
        yield alg


def _auto_name(alg, n, key, found) -> str:
    if alg.leq.sum() == n * (n + 1) // 2:
        return f"C{n}"
    same = sorted(k for (m, k) in found if m == n)
    return f"H{n}.{same.index(key)}"


# --- text formats ----------------------------------------------------------

def format_algebra(a: FiniteHeytingAlgebra) -> str:
    lines = []
    if a.name:
        lines.append(f"# {a.name}")
    lines += [f"heyting {a.n}", f"bot {a.bot}", f"top {a.top}"]
    if any(lab != str(i) for i, lab in enumerate(a.labels)):
        lines.append("labels " + " ".join(a.labels))
    for nm, t in (("meet", a.meet), ("join", a.join), ("imp", a.imp)):
        lines.append(nm)
        lines += [" ".join(str(int(v)) for v in row) for row in t]
    return "\n".join(lines) + "\n"


class AlgebraFormatError(ValueError):
    pass


def _parse_algebra_lines(lines: list[tuple[int, str]], where: str, name: str | None, check: bool = True):
    it = iter(lines)

    def take(expect=None):
        try:
            ln, s = next(it)
        except StopIteration:
            raise AlgebraFormatError(f"{where}: unexpected end of algebra") from None
        parts = s.split()
        if expect and parts[0] != expect:
            raise AlgebraFormatError(f"{where}:{ln}: expected '{expect}', got {s!r}")
        return ln, parts

    ln, parts = take("heyting")
    try:
        n = int(parts[1])
        bot = int(take("bot")[1][1])
        top = int(take("top")[1][1])
    except (IndexError, ValueError):
        raise AlgebraFormatError(f"{where}:{ln}: malformed header") from None
    labels = None
    tables = {}
    ln, parts = take()
    if parts[0] == "labels":
        labels = parts[1:]
        if len(labels) != n:
            raise AlgebraFormatError(f"{where}:{ln}: expected {n} labels")
        ln, parts = take()
    for nm in ("meet", "join", "imp"):
        if parts != [nm]:
            raise AlgebraFormatError(f"{where}:{ln}: expected table '{nm}'")
        rows = []
        for _ in range(n):
            ln, row = take()
            try:
                vals = [int(v) for v in row]
            except ValueError:
                raise AlgebraFormatError(f"{where}:{ln}: non-integer table entry") from None
            if len(vals) != n:
                raise AlgebraFormatError(f"{where}:{ln}: expected {n} entries, got {len(vals)}")
            rows.append(vals)
        tables[nm] = rows
        if nm != "imp":
            ln, parts = take()
    if not check:
        return FiniteHeytingAlgebra(tables["meet"], tables["join"], tables["imp"], bot, top, labels, name)
    return validate(tables["meet"], tables["join"], tables["imp"], bot, top, labels, name)


def read_algebras(path: str | Path) -> list[FiniteHeytingAlgebra]:
    """Read one or more algebras (each starting with ``heyting n``) from a file.

    A ``# name`` comment directly before a header names that algebra.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_algebras(text, str(path))


def parse_algebras(text: str, where: str = "<string>", check: bool = True) -> list[FiniteHeytingAlgebra]:
    """Parse algebras from text; ``check=False`` skips law checking (for fixtures)."""
    blocks: list[tuple[str | None, list[tuple[int, str]]]] = []
    pending_name = None
    for ln, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if s.startswith("#"):
            pending_name = s[1:].strip() or None
            continue
        s = s.split("#", 1)[0].strip()
        if not s:
            continue
        if s.startswith("heyting"):
            blocks.append((pending_name, []))
            pending_name = None
        elif not blocks:
            raise AlgebraFormatError(f"{where}:{ln}: expected 'heyting n' header")
        blocks[-1][1].append((ln, s))
    return [_parse_algebra_lines(lines, where, name, check) for name, lines in blocks]


def format_poset(p: Poset) -> str:
    return "\n".join([f"poset {p.size}"] + [f"< {i} {j}" for i, j in sorted(p.less)]) + "\n"


def read_poset(text: str) -> Poset:
    lines = [s.split("#", 1)[0].strip() for s in text.splitlines()]
    lines = [s for s in lines if s]
    if not lines or lines[0].split()[0] != "poset":
        raise AlgebraFormatError("expected 'poset n' header")
    size = int(lines[0].split()[1])
    pairs = []
    for s in lines[1:]:
        parts = s.split()
        if len(parts) != 3 or parts[0] != "<":
            raise AlgebraFormatError(f"bad poset line {s!r}")
        pairs.append((int(parts[1]), int(parts[2])))
    return Poset(size, frozenset(pairs))
