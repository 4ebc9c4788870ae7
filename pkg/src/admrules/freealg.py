"""Finitely generated free algebras of varieties generated by finite algebras.

The free algebra of rank ``k`` of the variety generated by ``K`` is the
subalgebra of ``prod_{A in K} A^(A^k)`` generated by the ``k`` projections.
Each element keeps the first formula (over ``x1..xk``) that produced it, so a
refuting valuation in the free algebra reads back as a substitution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import config
from .algebra import FiniteHeytingAlgebra
from .semantics import Refutation, evaluate, models_mrule, refute
from .syntax import BOT, TOP, And, Formula, Imp, MRule, Not, Or, Var

__all__ = [
    "FreeAlgebra", "free_algebra", "required_size", "generator_name",
    "AdmissibleUpToRank", "NotAdmissible", "check_admissible_bounded",
    "refute_derivability", "homomorphism_from",
]

TABLE_CAP = 4096


def generator_name(i: int) -> str:
    return f"x{i + 1}"


def required_size(K: Sequence[FiniteHeytingAlgebra], k: int) -> int:
    """Size of the ambient product ``prod_{A in K} |A|^(|A|^k)``."""
    return math.prod(a.n ** (a.n ** k) for a in K)


@dataclass
class FreeAlgebra:
    algebra: FiniteHeytingAlgebra
    generators: tuple[int, ...]
    K: tuple[FiniteHeytingAlgebra, ...]
    rank: int
    traces: list[Formula]
    vectors: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.algebra.n

    def substitution(self, valuation: dict[str, int]) -> dict[str, Formula]:
        """Read a valuation into this algebra back as a substitution."""
        return {v: self.traces[x] for v, x in valuation.items()}


class _Ambient:
    """Componentwise operations on vectors indexed by (A in K, k-tuple over A)."""

    def __init__(self, K: Sequence[FiniteHeytingAlgebra], k: int):
        self.blocks = []
        start = 0
        gens = []
        for a in K:
            width = a.n ** k
            self.blocks.append((a, slice(start, start + width)))
            # lexicographic k-tuples, first coordinate most significant
            idx = np.arange(width)
            cols = []
            for i in range(k - 1, -1, -1):
                cols.append(idx % a.n)
                idx = idx // a.n
            gens.append(cols[::-1])
            start += width
        self.width = start
        self.generators = [np.concatenate([g[i] for g in gens]).astype(np.int32) for i in range(k)]
        self.bot = np.concatenate([np.full(a.n ** k, a.bot) for a in K]).astype(np.int32)
        self.top = np.concatenate([np.full(a.n ** k, a.top) for a in K]).astype(np.int32)
        # mixed radix code of a vector
        radix = np.concatenate([np.full(a.n ** k, a.n) for a in K]).astype(np.int64)
        self.weights = np.ones(self.width, dtype=np.int64)
        for c in range(self.width - 2, -1, -1):
            self.weights[c] = self.weights[c + 1] * radix[c + 1]

    def binop(self, name: str, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        out = np.empty(np.broadcast_shapes(X.shape, Y.shape), dtype=np.int32)
        for a, sl in self.blocks:
            out[..., sl] = getattr(a, name)[X[..., sl], Y[..., sl]]
        return out

    def neg(self, X: np.ndarray) -> np.ndarray:
        out = np.empty_like(X)
        for a, sl in self.blocks:
            out[..., sl] = a.neg[X[..., sl]]
        return out

    def code(self, X: np.ndarray) -> np.ndarray:
        return X.astype(np.int64) @ self.weights


# ambient sizes up to this get a dense code -> element array, larger ones a dict
DENSE_LIMIT = 1 << 24


class _Index:
    """Element lookup for ambient vectors, by mixed-radix code or raw bytes."""

    def __init__(self, amb: _Ambient, bound: int):
        self.amb = amb
        self.dense = np.full(bound, -1, dtype=np.int64) if bound <= DENSE_LIMIT else None
        self.by_code = bound < (1 << 62)
        self.table: dict = {}

    def keys(self, rows: np.ndarray) -> list:
        if self.by_code:
            return self.amb.code(rows).tolist()
        return [r.tobytes() for r in np.ascontiguousarray(rows, dtype=np.int32)]

    def get(self, key) -> int:
        if self.dense is not None:
            return int(self.dense[key])
        return self.table.get(key, -1)

    def put(self, key, value: int) -> None:
        if self.dense is not None:
            self.dense[key] = value
        else:
            self.table[key] = value

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        if self.dense is not None:
            return self.dense[self.amb.code(rows)]
        return np.array([self.table[key] for key in self.keys(rows)], dtype=np.int64)

    def missing(self, rows: np.ndarray) -> list[int]:
        """Row positions whose vectors are not yet elements."""
        if self.dense is not None:
            return np.flatnonzero(self.dense[self.amb.code(rows)] < 0).tolist()
        return [j for j, key in enumerate(self.keys(rows)) if key not in self.table]


_OPS = (("meet", And), ("join", Or), ("imp", Imp))


def free_algebra(K: Iterable[FiniteHeytingAlgebra], k: int, cap: int | None = None) -> FreeAlgebra:
    """Free algebra of rank ``k`` of the variety generated by ``K``.

    Raises :class:`config.CapExceeded` if the ambient product would exceed
    ``cap`` elements (reported with the required size).
    """
    K = tuple(K)
    if not K:
        raise ValueError("need at least one generating algebra")
    cap = config.free_cap() if cap is None else cap
    bound = required_size(K, k)
    if bound > cap:
        raise config.CapExceeded(f"free algebra of rank {k} needs an ambient product of "
                                 f"{bound} elements (cap {cap})")
    amb = _Ambient(K, k)

    vectors: list[np.ndarray] = []
    traces: list[Formula] = []
    seen = _Index(amb, bound)

    def add(vec: np.ndarray, trace: Formula) -> int:
        key = seen.keys(vec[None, :])[0]
        if seen.get(key) < 0:
            seen.put(key, len(vectors))
            vectors.append(vec)
            traces.append(trace)
        return seen.get(key)

    bot = add(amb.bot, BOT)
    top = add(amb.top, TOP)
    gens = tuple(add(g, Var(generator_name(i))) for i, g in enumerate(amb.generators))

    i = 0
    while i < len(vectors):
        x, tx = vectors[i], traces[i]
        add(amb.neg(x), Not(tx))
        block = np.stack(vectors[: i + 1])
        for name, ctor in _OPS:
            batches = [(amb.binop(name, x[None, :], block), False)]
            if name == "imp":
                batches.append((amb.binop(name, block, x[None, :]), True))
            for res, flipped in batches:
                for j in seen.missing(res):
                    add(res[j], ctor(traces[j], tx) if flipped else ctor(tx, traces[j]))
        i += 1
        if len(vectors) > TABLE_CAP:
            raise config.CapExceeded(f"free algebra exceeds {TABLE_CAP} elements")

    vec = np.stack(vectors)
    tables = {}
    for name, _ in _OPS:
        res = amb.binop(name, vec[:, None, :], vec[None, :, :])
        flat = res.reshape(-1, amb.width)
        tables[name] = seen.lookup(flat).reshape(len(vec), len(vec))
    labels = [str(t) for t in traces]
    names = "+".join(a.name or f"A{a.n}" for a in K)
    alg = FiniteHeytingAlgebra(tables["meet"], tables["join"], tables["imp"], bot, top, labels,
                               name=f"F[{names}]({k})")
    return FreeAlgebra(alg, gens, K, k, traces, vec)


def homomorphism_from(F: FreeAlgebra, target: FiniteHeytingAlgebra,
                      images: Sequence[int]) -> np.ndarray:
    """Map sending generator ``i`` to ``images[i]``, defined through the traces."""
    nu = {generator_name(i): int(x) for i, x in enumerate(images)}
    return np.array([evaluate(target, nu, t) for t in F.traces], dtype=np.int32)


# --- admissibility verdicts -------------------------------------------------

@dataclass(frozen=True)
class NotAdmissible:
    """Definitive: the rule fails in a free algebra, hence under a substitution."""

    rank: int
    refutation: Refutation
    substitution: dict[str, Formula]

    definitive = True

    def __str__(self) -> str:
        sub = ", ".join(f"{v} := {self.substitution[v]}" for v in sorted(self.substitution))
        return f"not admissible (rank {self.rank}); substitution {sub}"


@dataclass(frozen=True)
class AdmissibleUpToRank:
    """Bounded claim: valid in the free algebras of every checked rank."""

    rank: int
    checked: tuple[int, ...]

    definitive = False

    def __str__(self) -> str:
        return f"admissible up to rank {self.rank} (bounded check only)"


def check_admissible_bounded(r: MRule, K: Sequence[FiniteHeytingAlgebra], n_max: int | None = None,
                             cap: int | None = None, budget: int | None = None):
    """Test ``r`` in the free algebras of ranks ``|vars(r)|..n_max``.

    Returns :class:`NotAdmissible` with a substitution witness, or
    :class:`AdmissibleUpToRank`, which never claims more than it checked.
    """
    nv = len(r.vars)
    n_max = max(nv, 3) if n_max is None else n_max
    checked = []
    for k in range(min(nv, n_max), n_max + 1):
        F = free_algebra(K, k, cap)
        ref = refute(F.algebra, r, budget)
        if ref is not None:
            return NotAdmissible(k, ref, F.substitution(ref.valuation))
        checked.append(k)
    return AdmissibleUpToRank(n_max, tuple(checked))


def refute_derivability(rules: Iterable[MRule], r: MRule, pool: Iterable[FiniteHeytingAlgebra],
                        budget: int | None = None) -> tuple[FiniteHeytingAlgebra, Refutation] | None:
    """First algebra validating every rule in ``rules`` but refuting ``r``.

    Such an algebra certifies that ``r`` is not derivable from ``rules``;
    None is inconclusive.
    """
    rules = list(rules)
    for a in pool:
        ref = refute(a, r, budget)
        if ref is None:
            continue
        if all(models_mrule(a, s, budget) for s in rules):
            return a, ref
    return None
