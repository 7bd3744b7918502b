"""Model counting: the telescoping approximation driver and exact oracles.

The driver writes Z(C) as a product of (1 + R(C_i, x_{i+1})) where C_i is C
with x_1..x_i set to 1 (clauses containing them deleted).  Each ratio comes
from the truncated computation tree.  The exact oracles enumerate all 2^n
assignments with numpy bitmask arithmetic, in chunks that may run on
several threads.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

from .comptree import TreeEvaluator
from .errors import BudgetExceeded, InvalidEps, NegativeLambda, TooLarge
from .formula import MonotoneFormula, RegimeTag, classify_regime
from .graphs import Graph

BigCount = Union[int, Fraction]
Rational = Union[int, Fraction, str]

DEFAULT_LIMIT = 30
_CHUNK_BITS = 20


# ---------------------------------------------------------------------------
# enumeration helpers

def _check_size(n: int, limit: int):
    if n > limit:
        raise TooLarge(f"{n} variables exceeds the brute-force limit of {limit}")


def _chunks(n: int):
    total = 1 << n
    step = 1 << min(n, _CHUNK_BITS)
    return [(s, min(total, s + step)) for s in range(0, total, step)]


def _map_chunks(fn: Callable[[np.ndarray], object], n: int, threads: int) -> list:
    def run(bounds):
        lo, hi = bounds
        return fn(np.arange(lo, hi, dtype=np.int64))

    parts = _chunks(n)
    if threads <= 1 or len(parts) == 1:
        return [run(p) for p in parts]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, parts))


def _popcount_array(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.uint64)
    c = np.zeros(a.shape, dtype=np.int64)
    while True:
        nz = a != 0
        if not nz.any():
            return c
        c += (a & np.uint64(1)).astype(np.int64)
        a = a >> np.uint64(1)


def _as_fraction(x: Rational) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------------------
# formula oracles (bit v-1 of an assignment is variable v; set bit = value 1)

def _clause_arrays(f: MonotoneFormula) -> list[int]:
    return [mk >> 1 for mk in f.masks]


def _satisfying(a: np.ndarray, clause_masks: list[int]) -> np.ndarray:
    ok = np.ones(a.shape, dtype=bool)
    for cm in clause_masks:
        ok &= (a & cm) != 0
    return ok


def exact_count(f: MonotoneFormula, limit: int = DEFAULT_LIMIT, threads: int = 1) -> int:
    """Number of satisfying assignments by exhaustive enumeration."""
    _check_size(f.n, limit)
    cms = _clause_arrays(f.deduplicated())
    parts = _map_chunks(lambda a: int(_satisfying(a, cms).sum()), f.n, threads)
    return sum(parts)


def bruteforce_ratio(f: MonotoneFormula, x: int, limit: int = DEFAULT_LIMIT) -> Fraction:
    """Pr(x=0) / Pr(x=1) over satisfying assignments, by enumeration."""
    _check_size(f.n, limit)
    cms = _clause_arrays(f)
    bit = 1 << (x - 1)
    zero = one = 0
    for lo, hi in _chunks(f.n):
        a = np.arange(lo, hi, dtype=np.int64)
        ok = _satisfying(a, cms)
        with_x = (a & bit) != 0
        one += int((ok & with_x).sum())
        zero += int((ok & ~with_x).sum())
    return Fraction(zero, one)


def pinned_prefix(f: MonotoneFormula, i: int) -> MonotoneFormula:
    """C_i: variables 1..i set to 1, so every clause touching them is deleted."""
    keep_below = 1 << (i + 1)
    cl = tuple(c for c, mk in zip(f.clauses, f.masks) if mk & (keep_below - 2) == 0)
    return MonotoneFormula(f.n, cl)


def _is_forced(f: MonotoneFormula, x: int) -> bool:
    return any(len(c) == 1 and c[0] == x for c in f.clauses)


def telescoping_exact(f: MonotoneFormula, evaluator: Optional[TreeEvaluator] = None) -> Fraction:
    """Z(C) as the product over x = 1..n of (1 + R(C_{x-1}, x)) with exact ratios."""
    ev = evaluator or TreeEvaluator()
    f = f.deduplicated()
    z = Fraction(1)
    for x in range(1, f.n + 1):
        ci = pinned_prefix(f, x - 1)
        if _is_forced(ci, x):
            continue
        z *= 1 + ev.exact(ci.masks, x)
    return z


# ---------------------------------------------------------------------------
# approximation driver

@dataclass(frozen=True)
class DepthPolicy:
    """How deep to run the truncated tree.

    ``fixed`` pins one depth L.  Otherwise depths ``start, start+1, ...`` are
    tried until the run stops for one of three reasons:

    * every ratio resolved without truncation (the estimate is exact);
    * the instance has no clause of arity above 6, so every level costs one
      unit of depth and consecutive depths give an upper and a lower bound
      on each ratio; once the two products agree within eps, both lie
      within eps of Z (``certified``);
    * otherwise, two successive estimates differ relatively by < eps/4.
    """

    fixed: Optional[int] = None
    start: int = 1
    budget: Optional[int] = None

    @classmethod
    def proof_depth(cls, L: int, budget: Optional[int] = None) -> "DepthPolicy":
        return cls(fixed=L, budget=budget)


@dataclass
class Estimate:
    value: float
    log2_value: float
    eps: float
    depth_used: int
    regime: RegimeTag
    guaranteed: bool
    wall_time_ms: float = 0.0
    nodes_visited: int = 0
    certified: bool = False
    converged: bool = True
    levels: list = field(default_factory=list)

    def decimal_string(self, digits: int = 12) -> str:
        return _pow2_decimal(self.log2_value, digits)

    def as_record(self) -> dict:
        return {
            "estimate": self.decimal_string(),
            "log2_value": round(self.log2_value, 12),
            "eps": self.eps,
            "depth_used": self.depth_used,
            "regime": self.regime.value,
            "guaranteed": self.guaranteed,
            "certified": self.certified,
            "wall_time_ms": round(self.wall_time_ms, 3),
            "nodes_visited": self.nodes_visited,
        }


def _pow2_decimal(log2v: float, digits: int) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        v = (Decimal(2) ** Decimal(repr(log2v))).normalize()
        return format(v, "f") if abs(v.adjusted()) < digits else str(v)


def _telescoping_float(f: MonotoneFormula, ev: TreeEvaluator, L: Optional[int]) -> tuple[float, bool]:
    root_min = f.min_arity()
    log2z = 0.0
    all_exact = True
    for x in range(1, f.n + 1):
        ci = pinned_prefix(f, x - 1)
        if ci.clauses:
            assert root_min is not None and ci.min_arity() >= root_min
        if _is_forced(ci, x):
            continue
        r, ex = ev.truncated(ci.masks, x, L)
        all_exact &= ex
        log2z += math.log2(1.0 + r)
    return log2z, all_exact


def brackets(f: MonotoneFormula) -> bool:
    """True when consecutive depths bound the count from both sides.

    Needs every depth cost to be 1, i.e. no clause wider than 6.
    """
    return all(len(c) <= 6 for c in f.clauses)


def approx_count(
    f: MonotoneFormula,
    eps: float,
    policy: DepthPolicy = DepthPolicy(),
    evaluator: Optional[TreeEvaluator] = None,
) -> Estimate:
    """Approximate Z(C) with the truncated-tree telescoping product.

    ``guaranteed`` is set only when every ratio was computed without
    truncation: the decay constant that would turn a depth into an error
    bound is not known numerically, so no depth alone certifies eps.
    ``certified`` additionally covers the two-sided bracket described on
    ``DepthPolicy``.
    """
    if not eps > 0 or math.isnan(eps):
        raise InvalidEps(f"eps must be positive, got {eps}")
    t0 = time.perf_counter()
    f = f.deduplicated()
    regime = classify_regime(f)
    ev = evaluator or TreeEvaluator(budget=policy.budget)
    levels: list[tuple[int, float]] = []
    certified = False

    if policy.fixed is not None:
        log2z, exact = _telescoping_float(f, ev, policy.fixed)
        depth, converged = policy.fixed, True
        levels.append((depth, log2z))
    else:
        two_sided = brackets(f)
        L = policy.start
        prev = None
        converged = False
        while True:
            try:
                log2z, exact = _telescoping_float(f, ev, L)
            except BudgetExceeded:
                if prev is None:
                    raise
                L, log2z, exact = prev[0], prev[1], False
                break
            levels.append((L, log2z))
            if exact:
                converged = True
                break
            if prev is not None:
                gap = 2.0 ** abs(log2z - prev[1]) - 1.0
                if two_sided and gap <= eps:
                    converged = certified = True
                    break
                if not two_sided and gap < eps / 4:
                    converged = True
                    break
            prev = (L, log2z)
            L += 1
        depth = L
    value = 2.0 ** log2z if log2z < 1000 else math.inf
    return Estimate(
        value=value,
        log2_value=log2z,
        eps=eps,
        depth_used=depth,
        regime=regime,
        guaranteed=exact,
        wall_time_ms=(time.perf_counter() - t0) * 1e3,
        nodes_visited=ev.nodes_visited,
        certified=certified or exact,
        converged=converged,
        levels=levels,
    )


# ---------------------------------------------------------------------------
# graph partition functions

def _edge_arrays(g: Graph):
    return [(1 << (u - 1), 1 << (v - 1)) for u, v in g.sorted_edges()]


def hardcore_partition(g: Graph, lam: Rational, limit: int = DEFAULT_LIMIT) -> Fraction:
    """Sum of lam^|I| over independent sets I of g."""
    lam = _as_fraction(lam)
    if lam < 0:
        raise NegativeLambda(f"lambda must be nonnegative, got {lam}")
    _check_size(g.n, limit)
    edges = _edge_arrays(g)
    by_size = np.zeros(g.n + 1, dtype=object)
    for lo, hi in _chunks(g.n):
        a = np.arange(lo, hi, dtype=np.int64)
        ok = np.ones(a.shape, dtype=bool)
        for bu, bv in edges:
            ok &= ~(((a & bu) != 0) & ((a & bv) != 0))
        sizes = _popcount_array(a[ok])
        by_size += np.bincount(sizes, minlength=g.n + 1).astype(object)
    return sum((Fraction(int(c)) * lam ** s for s, c in enumerate(by_size) if c), Fraction(0))


def twospin_partition(g: Graph, beta: Rational, gamma: Rational, lam: Rational, limit: int = DEFAULT_LIMIT) -> Fraction:
    """Two-spin partition function; a set bit marks a vertex with spin 0."""
    beta, gamma, lam = map(_as_fraction, (beta, gamma, lam))
    _check_size(g.n, limit)
    edges = _edge_arrays(g)
    m = len(edges)
    tally: dict[tuple[int, int, int], int] = {}
    for lo, hi in _chunks(g.n):
        a = np.arange(lo, hi, dtype=np.int64)
        zeros = _popcount_array(a)
        both0 = np.zeros(a.shape, dtype=np.int64)
        both1 = np.zeros(a.shape, dtype=np.int64)
        for bu, bv in edges:
            iu, iv = (a & bu) != 0, (a & bv) != 0
            both0 += iu & iv
            both1 += ~iu & ~iv
        key = (zeros * (m + 1) + both0) * (m + 1) + both1
        vals, counts = np.unique(key, return_counts=True)
        for kv, c in zip(vals.tolist(), counts.tolist()):
            rest, b1 = divmod(kv, m + 1)
            z, b0 = divmod(rest, m + 1)
            tally[(z, b0, b1)] = tally.get((z, b0, b1), 0) + c
    total = Fraction(0)
    for (z, b0, b1), c in tally.items():
        total += c * lam ** z * beta ** b0 * gamma ** b1
    return total


def domsets_bruteforce(g: Graph, limit: int = DEFAULT_LIMIT, threads: int = 1) -> int:
    """Number of dominating sets of g."""
    _check_size(g.n, limit)
    nb = g.neighbours()
    closed = []
    for v in range(1, g.n + 1):
        mk = 1 << (v - 1)
        for u in nb[v]:
            mk |= 1 << (u - 1)
        closed.append(mk)
    return sum(_map_chunks(lambda a: int(_satisfying(a, closed).sum()), g.n, threads))


def hardcore_lambda_c(delta: int) -> Fraction:
    """Tree uniqueness threshold (D-1)^(D-1) / (D-2)^D of the hard-core model."""
    if delta < 3:
        raise ValueError("defined for delta >= 3")
    return Fraction((delta - 1) ** (delta - 1), (delta - 2) ** delta)
