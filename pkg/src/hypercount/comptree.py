"""Computation tree for the marginal ratio R(C, x) = Pr(x=0) / Pr(x=1).

Each node (C, x) is preprocessed, the clauses containing x are ordered
(increasing arity, arity-2 clauses last), and every child (C_ij, x_ij) is
built by deleting and 0-pinning occurrences.  The node's value is

    F(r) = prod_i (1 - prod_j r_ij / (1 + r_ij)).

The truncated variant charges depth l_w = ceil(log6(w+1)) per level and
returns 1 once the budget L is spent.  Internally formulas are tuples of
clause bitmasks (bit v set for variable v), which keeps child construction and
memo keys cheap.  The value at (C, x) only depends on the connected component
of x, so nodes are cut down to that component before memoisation.  Float
evaluation of formulas with n <= 63 is delegated to a numba kernel that
follows exactly the same steps.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

from .errors import BudgetExceeded, ForcedQuery, FreeVariable, IndexOutOfRange
from .formula import MonotoneFormula

try:
    from . import _kernel
except ImportError:  # numba missing: the pure-Python evaluator still works
    _kernel = None

Masks = tuple[int, ...]
Number = Union[float, Fraction]
TraceFn = Callable[[int, int, tuple[int, ...], Optional[int], float], None]


@dataclass(frozen=True)
class QueryNode:
    formula: MonotoneFormula
    x: int


@dataclass(frozen=True)
class OccurrenceOrdering:
    """Clauses of the preprocessed formula that contain ``x``, in tree order.

    ``clause_indices`` point into ``formula.clauses``; ``w`` holds arity - 1.
    """

    x: int
    clause_indices: tuple[int, ...]
    w: tuple[int, ...]

    @property
    def d(self) -> int:
        return len(self.w)


def depth_cost(w: int) -> int:
    """Smallest l with 6**l >= w + 1, i.e. ceil(log6(w + 1)) in exact integers."""
    if w < 1:
        raise ValueError("w must be a positive integer")
    l, p = 0, 1
    while p < w + 1:
        p *= 6
        l += 1
    return l


# ---------------------------------------------------------------------------
# bitmask primitives

def _popcount(m: int) -> int:
    return m.bit_count()


def _bits(m: int) -> list[int]:
    out = []
    while m:
        low = m & -m
        out.append(low.bit_length() - 1)
        m ^= low
    return out


def _prep(masks: Masks) -> tuple[Masks, int]:
    """Bitmask version of ``formula.preprocess``: returns (masks, forced bits)."""
    if not masks:
        return masks, 0
    seen = set()
    uniq = []
    for mk in masks:
        if mk not in seen:
            seen.add(mk)
            uniq.append(mk)
    by_size = sorted(uniq, key=_popcount)
    redundant = set()
    kept: list[int] = []
    for mk in by_size:
        if any(s & mk == s and s != mk for s in kept):
            redundant.add(mk)
        else:
            kept.append(mk)
    forced = 0
    out = []
    for mk in uniq:
        if mk in redundant:
            continue
        if mk & (mk - 1) == 0:
            forced |= mk
        else:
            out.append(mk)
    return tuple(out), forced


def _component(masks: Masks, x: int) -> Masks:
    reach = 1 << x
    taken = [False] * len(masks)
    grew = True
    while grew:
        grew = False
        for i, mk in enumerate(masks):
            if not taken[i] and mk & reach:
                taken[i] = True
                reach |= mk
                grew = True
    return tuple(mk for i, mk in enumerate(masks) if taken[i])


def _order(masks: Masks, x: int) -> list[int]:
    bit = 1 << x
    occ = [i for i, mk in enumerate(masks) if mk & bit]
    occ.sort(key=lambda i: (_popcount(masks[i]) == 2, _popcount(masks[i]), i))
    return occ


def _child(masks: Masks, x: int, occ: list[int], i: int, j: int) -> tuple[Masks, int]:
    """0-based (i, j).  Returns (raw child masks, child query variable)."""
    bit = 1 << x
    others = _bits(masks[occ[i]] & ~bit)
    xij = others[j]
    pin0 = bit
    for v in others[:j]:
        pin0 |= 1 << v
    dropped = set(occ[: i + 1])
    out = []
    for idx, mk in enumerate(masks):
        if idx in dropped:
            continue
        nm = mk & ~pin0
        assert nm, "child construction emptied a clause"
        out.append(nm)
    return tuple(out), xij


def _child_prepped(masks: Masks, x: int, occ: list[int], i: int, j: int) -> tuple[Masks, int]:
    """Child built from an already preprocessed ``masks``, then preprocessed itself.

    Only clauses that lost variables can create new redundancy: if a shrunken
    clause contained an untouched one, its original would already have been
    redundant.  So it suffices to drop supersets (and later duplicates) of the
    shrunken clauses, then the unit clauses.
    """
    bit = 1 << x
    others = _bits(masks[occ[i]] & ~bit)
    xij = others[j]
    pin0 = bit
    for v in others[:j]:
        pin0 |= 1 << v
    dropped = set(occ[: i + 1])
    out = []
    changed = []
    for idx, mk in enumerate(masks):
        if idx in dropped:
            continue
        nm = mk & ~pin0
        if nm != mk:
            assert nm, "child construction emptied a clause"
            changed.append(len(out))
        out.append(nm)
    if not changed:
        return tuple(out), xij
    alive = [True] * len(out)
    units = 0
    for ci in changed:
        if not alive[ci]:
            continue
        s = out[ci]
        for t, c in enumerate(out):
            if t == ci or not alive[t] or c & s != s:
                continue
            if c != s or t > ci:
                alive[t] = False
            else:
                alive[ci] = False
                break
        if alive[ci] and s & (s - 1) == 0:
            units |= s
    assert not units >> xij & 1, "child query variable is forced"
    return tuple(c for t, c in enumerate(out) if alive[t] and not (c & (c - 1) == 0)), xij


# ---------------------------------------------------------------------------
# public single-step API

def _formula_from_masks(n: int, masks: Masks) -> MonotoneFormula:
    return MonotoneFormula(n, tuple(tuple(_bits(mk)) for mk in masks))


def order_occurrences(ctilde: MonotoneFormula, x: int) -> OccurrenceOrdering:
    occ = _order(ctilde.masks, x)
    if not occ:
        raise FreeVariable(f"variable {x} occurs in no clause")
    return OccurrenceOrdering(x, tuple(occ), tuple(len(ctilde.clauses[i]) - 1 for i in occ))


def build_child(ctilde: MonotoneFormula, x: int, ordering: OccurrenceOrdering, i: int, j: int) -> QueryNode:
    """Child (C_ij, x_ij) for 1-based ``i`` in 1..d and ``j`` in 1..w_i."""
    if not 1 <= i <= ordering.d or not 1 <= j <= ordering.w[i - 1]:
        raise IndexOutOfRange(f"(i={i}, j={j}) outside ordering with w={ordering.w}")
    masks, xij = _child(ctilde.masks, x, list(ordering.clause_indices), i - 1, j - 1)
    return QueryNode(_formula_from_masks(ctilde.n, masks), xij)


# ---------------------------------------------------------------------------
# recursive evaluation

@dataclass
class TreeEvaluator:
    """Evaluates R(C, x, L) (float) or R(C, x) (exact Fraction) with memoisation.

    One evaluator may be reused across many queries; its memo tables persist.
    ``budget`` caps the number of non-memoised node expansions per evaluator.
    """

    budget: Optional[int] = None
    memoize: bool = True
    trace: Optional[TraceFn] = None
    backend: str = "auto"
    nodes_visited: int = 0
    _exact_memo: dict = field(default_factory=dict, repr=False)
    _float_exact: dict = field(default_factory=dict, repr=False)
    _float_trunc: dict = field(default_factory=dict, repr=False)
    _kmemo: object = field(default=None, repr=False)

    def _tick(self):
        self.nodes_visited += 1
        if self.budget is not None and self.nodes_visited > self.budget:
            raise BudgetExceeded(self.budget)

    def _use_kernel(self, masks: Masks) -> bool:
        if self.backend == "python" or self.trace is not None or not self.memoize:
            return False
        if _kernel is None:
            if self.backend == "compiled":
                raise RuntimeError("numba is not available")
            return False
        return all(mk < (1 << 64) for mk in masks)

    def _kernel_truncated(self, masks: Masks, x: int, L: Optional[int]) -> tuple[float, bool]:
        if self._kmemo is None:
            self._kmemo = _kernel.new_memo()
        stats = np.array([self.nodes_visited, -1 if self.budget is None else self.budget], dtype=np.int64)
        arr = np.array(masks, dtype=np.uint64)
        depth = _kernel.NO_LIMIT if L is None else L
        value, exact = _kernel.truncated(arr, x, depth, self._kmemo, stats)
        self.nodes_visited = int(stats[0])
        if value < 0:
            raise BudgetExceeded(self.budget)
        return value, bool(exact)

    def _enter(self, masks: Masks, x: int) -> Masks:
        masks, forced = _prep(masks)
        if forced >> x & 1:
            raise ForcedQuery(f"variable {x} is forced")
        return masks

    # float, truncated -------------------------------------------------
    def truncated(self, masks: Masks, x: int, L: Optional[int]) -> tuple[float, bool]:
        """Returns (value, exact) where ``exact`` means no branch was cut at L."""
        masks = self._enter(masks, x)
        if self._use_kernel(masks):
            return self._kernel_truncated(masks, x, L)
        return self._truncated(masks, x, L, 0)

    def _truncated(self, masks: Masks, x: int, L: Optional[int], depth: int) -> tuple[float, bool]:
        masks = _component(masks, x)
        if not masks:
            return 1.0, True
        if L is not None and L <= 0:
            return 1.0, False
        if self.memoize:
            key = (masks, x)
            hit = self._float_exact.get(key)
            if hit is not None:
                return hit, True
            hit = self._float_trunc.get((key, L))
            if hit is not None:
                return hit, False
        self._tick()
        occ = _order(masks, x)
        value = 1.0
        all_exact = True
        ws = []
        for i, ci in enumerate(occ):
            w = _popcount(masks[ci]) - 1
            ws.append(w)
            sub = None if L is None else L - depth_cost(w)
            prod = 1.0
            for j in range(w):
                cm, xij = _child_prepped(masks, x, occ, i, j)
                r, ex = self._truncated(cm, xij, sub, depth + 1)
                all_exact &= ex
                prod *= r / (1.0 + r)
            value *= 1.0 - prod
        if self.trace is not None:
            self.trace(depth, len(occ), tuple(ws), L, value)
        if self.memoize:
            if all_exact:
                self._float_exact[key] = value
            else:
                self._float_trunc[(key, L)] = value
        return value, all_exact

    # exact rational ---------------------------------------------------
    def exact(self, masks: Masks, x: int) -> Fraction:
        return self._exact(self._enter(masks, x), x, 0)

    def _exact(self, masks: Masks, x: int, depth: int) -> Fraction:
        masks = _component(masks, x)
        if not masks:
            return Fraction(1)
        if self.memoize:
            key = (masks, x)
            hit = self._exact_memo.get(key)
            if hit is not None:
                return hit
        self._tick()
        occ = _order(masks, x)
        value = Fraction(1)
        ws = []
        for i, ci in enumerate(occ):
            w = _popcount(masks[ci]) - 1
            ws.append(w)
            prod = Fraction(1)
            for j in range(w):
                cm, xij = _child_prepped(masks, x, occ, i, j)
                r = self._exact(cm, xij, depth + 1)
                prod *= r / (1 + r)
            value *= 1 - prod
        if self.trace is not None:
            self.trace(depth, len(occ), tuple(ws), None, float(value))
        if self.memoize:
            self._exact_memo[key] = value
        return value


def ratio_truncated(node: QueryNode, L: int, evaluator: Optional[TreeEvaluator] = None) -> float:
    """R(C, x, L) in double precision."""
    ev = evaluator or TreeEvaluator()
    return ev.truncated(node.formula.masks, node.x, L)[0]


def ratio_exact(node: QueryNode, evaluator: Optional[TreeEvaluator] = None) -> Fraction:
    """R(C, x) by the untruncated recursion in exact rationals."""
    ev = evaluator or TreeEvaluator()
    return ev.exact(node.formula.masks, node.x)
