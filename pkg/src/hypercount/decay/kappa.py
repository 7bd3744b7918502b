"""Deficits, suitable arity vectors and the amortized decay rate kappa*.

One step of the tree recursion maps child ratios r_{i,j} to
``F(r) = prod_i (1 - prod_j r_ij / (1 + r_ij))``.  The decay rate weighs each
partial derivative of F, measured in potential coordinates, by how much
deficit budget the corresponding child consumes.

Every term of kappa* simplifies to

    coef_ij * (psi - r_ij**chi) / (1 + r_ij) * P_i / (1 - P_i) / (psi - F**chi)

with ``P_i = prod_j r_ij / (1 + r_ij)``, which is what the batched evaluator
uses; the per-term definition is kept in :func:`kappa_star_terms` as a
readable cross-check.
"""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..comptree import depth_cost
from ..errors import DomainError, NotSuitable
from ..formula import MonotoneFormula
from .potential import DEFAULT_POTENTIAL, PotentialParams, RegimeConstants, phi


# ---------------------------------------------------------------------------
# deficits

@dataclass(frozen=True)
class DeficitLedger:
    """Per-clause deficits ``max(0, k - |c|)`` and their sum D(C)."""

    k: int
    per_clause: Tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.per_clause)


def deficit(C: MonotoneFormula, k: int) -> DeficitLedger:
    """Deficit ledger of ``C`` measured against the root arity ``k``."""
    if k < 2:
        raise DomainError(f"k must be at least 2, got {k}")
    return DeficitLedger(k, tuple(max(0, k - len(c)) for c in C.clauses))


# ---------------------------------------------------------------------------
# suitable vectors

@dataclass(frozen=True)
class SuitableVector:
    """Arity vector ``w``: a nondecreasing prefix of entries >= 2, then ones.

    ``b(l)`` counts entries equal to ``l - 1``; ``split`` is the length of the
    prefix (the index t after which every entry is 1).
    """

    w: Tuple[int, ...]

    def __post_init__(self):
        w = tuple(int(x) for x in self.w)
        object.__setattr__(self, "w", w)
        if not w:
            raise NotSuitable("suitable vectors have at least one entry")
        if any(x < 1 for x in w):
            raise NotSuitable(f"entries must be positive integers: {w}")
        prev = 2
        t = 0
        while t < len(w) and w[t] >= prev:
            prev = w[t]
            t += 1
        if any(x != 1 for x in w[t:]):
            raise NotSuitable(f"{w} is not a nondecreasing prefix followed by ones")
        object.__setattr__(self, "_split", t)

    @property
    def d(self) -> int:
        return len(self.w)

    @property
    def split(self) -> int:
        return self._split

    def b(self, ell: int) -> int:
        return sum(1 for x in self.w if x == ell - 1)

    def b_prime(self, k: int) -> int:
        """Entries with 2 <= w_i <= k - 1, i.e. b_3 + ... + b_k."""
        return sum(1 for x in self.w if 2 <= x <= k - 1)

    def s(self, i: int, k: int) -> int:
        """Prefix deficit: sum over the first i entries of max(0, k - w - 1)."""
        return sum(max(0, k - x - 1) for x in self.w[:i])

    @property
    def size(self) -> int:
        return sum(self.w)


def _as_suitable(w) -> SuitableVector:
    return w if isinstance(w, SuitableVector) else SuitableVector(tuple(w))


def enumerate_suitable(d: int, cap: int) -> Iterator[SuitableVector]:
    """All suitable vectors of length ``d`` whose entries are at most ``cap``."""
    for t in range(d + 1):
        for prefix in itertools.combinations_with_replacement(range(2, cap + 1), t):
            yield SuitableVector(prefix + (1,) * (d - t))


def random_suitable(d: int, max_entry: int, rng: np.random.Generator) -> SuitableVector:
    t = int(rng.integers(0, d + 1))
    prefix = sorted(int(x) for x in rng.integers(2, max_entry + 1, size=t))
    return SuitableVector(tuple(prefix) + (1,) * (d - t))


# ---------------------------------------------------------------------------
# the recursion and its derivatives

def _split_r(w: SuitableVector, r) -> List[np.ndarray]:
    nested = len(r) > 0 and np.ndim(r[0]) > 0
    flat = np.asarray(list(itertools.chain.from_iterable(r)) if nested else r, dtype=float)
    if flat.size != w.size:
        raise DomainError(f"expected {w.size} ratios for w={w.w}, got {flat.size}")
    if np.any(~np.isfinite(flat)) or np.any(flat <= 0) or np.any(flat > 1):
        raise DomainError("ratios must lie in (0, 1]")
    out, pos = [], 0
    for wi in w.w:
        out.append(flat[pos:pos + wi])
        pos += wi
    return out


def recursion_F(w, r) -> float:
    """F^{d,w}(r) = prod_i (1 - prod_j r_ij / (1 + r_ij))."""
    groups = _split_r(_as_suitable(w), r)
    return float(np.prod([1 - np.prod(g / (1 + g)) for g in groups]))


def recursion_partials(w, r) -> List[np.ndarray]:
    """Closed-form |dF/dr_ij| = F * P_i / (1 - P_i) / (r_ij (1 + r_ij))."""
    w = _as_suitable(w)
    groups = _split_r(w, r)
    F = float(np.prod([1 - np.prod(g / (1 + g)) for g in groups]))
    out = []
    for g in groups:
        P = float(np.prod(g / (1 + g)))
        out.append(F * P / (1 - P) / (g * (1 + g)))
    return out


def _exponent(w: SuitableVector, i: int, j: int, k: int, Delta: int) -> int:
    d, b2 = w.d, w.b(2)
    lead = d - b2
    e = b2 * (k - 2) + w.s(min(i, lead), k) - max(0, w.b_prime(k) - i)
    if i <= lead:
        e -= (j - 1) * (Delta - 1)
    return e


def star_coefficients(w, k: int, Delta: int, rc: RegimeConstants) -> np.ndarray:
    """alpha**(-l_{w_i}) * delta**exponent for each (i, j), flattened i-major."""
    w = _as_suitable(w)
    coef = []
    for i, wi in enumerate(w.w, start=1):
        a = rc.alpha ** (-depth_cost(wi))
        for j in range(1, wi + 1):
            coef.append(a * rc.delta ** _exponent(w, i, j, k, Delta))
    return np.array(coef)


def crude_coefficients(w, Delta: int, rc: RegimeConstants) -> np.ndarray:
    """Coefficients of the cruder rate used for k = 3.

    Each deficit credit that kappa* spends is dropped, except that the b_3
    entries equal to 2 keep the factor (1/delta)**(b_3 - i).
    """
    w = _as_suitable(w)
    b2, b3 = w.b(2), w.b(3)
    coef = []
    for i, wi in enumerate(w.w, start=1):
        a = rc.alpha ** (-depth_cost(wi)) * rc.delta ** b2
        if i <= b3:
            a *= rc.delta ** -(b3 - i)
        for j in range(1, wi + 1):
            coef.append(a * rc.delta ** -((j - 1) * (Delta - 1)))
    return np.array(coef)


def _group_index(w: SuitableVector) -> np.ndarray:
    return np.repeat(np.arange(w.d), w.w)


def _rate_batch(w: SuitableVector, coef: np.ndarray, R: np.ndarray,
                p: PotentialParams) -> np.ndarray:
    """Evaluate sum_ij coef_ij * phi(F)/phi(r_ij) * |dF/dr_ij| for each row of R."""
    chi, psi = p.chi_f, p.psi_f
    T = R / (1 + R)
    idx = _group_index(w)
    logT = np.log(T)
    logP = np.zeros((R.shape[0], w.d))
    np.add.at(logP.T, idx, logT.T)
    P = np.exp(logP)
    F = np.prod(1 - P, axis=1)
    odds = P / (1 - P)
    per = coef * (psi - R ** chi) / (1 + R) * odds[:, idx]
    return per.sum(axis=1) / (psi - F ** chi)


def kappa_star(d: int, w, r, k: int, Delta: int,
               rc: Optional[RegimeConstants] = None,
               p: PotentialParams = DEFAULT_POTENTIAL) -> float:
    """Amortized decay rate kappa*^{d,w}(r).

    ``r`` holds sum(w) ratios, either flat (i-major) or as one sequence per
    clause.  ``rc`` defaults to the constants of the regime of (k, Delta).
    """
    w = _as_suitable(w)
    if w.d != d:
        raise NotSuitable(f"d={d} but w has {w.d} entries")
    if not 1 <= d <= Delta:
        raise DomainError(f"need 1 <= d <= Delta, got d={d}, Delta={Delta}")
    rc = rc or RegimeConstants.for_params(k, Delta)
    flat = np.concatenate(_split_r(w, r))
    coef = star_coefficients(w, k, Delta, rc)
    return float(_rate_batch(w, coef, flat[None, :], p)[0])


def kappa_star_terms(d: int, w, r, k: int, Delta: int,
                     rc: Optional[RegimeConstants] = None,
                     p: PotentialParams = DEFAULT_POTENTIAL) -> List[float]:
    """Per-term values of kappa*, written directly from phi and dF/dr."""
    w = _as_suitable(w)
    rc = rc or RegimeConstants.for_params(k, Delta)
    F = recursion_F(w, r)
    groups = _split_r(w, r)
    partials = recursion_partials(w, r)
    terms = []
    for i, (g, dg) in enumerate(zip(groups, partials), start=1):
        for j, (rij, dij) in enumerate(zip(g, dg), start=1):
            scale = rc.alpha ** (-depth_cost(w.w[i - 1])) * rc.delta ** _exponent(w, i, j, k, Delta)
            terms.append(scale * phi(F, p) / phi(float(rij), p) * float(dij))
    return terms


def kappa_crude(d: int, w, r, Delta: int = 6,
                rc: Optional[RegimeConstants] = None,
                p: PotentialParams = DEFAULT_POTENTIAL) -> float:
    """The cruder rate that dominates kappa* when k = 3."""
    w = _as_suitable(w)
    if w.d != d:
        raise NotSuitable(f"d={d} but w has {w.d} entries")
    rc = rc or RegimeConstants.for_params(3, Delta)
    flat = np.concatenate(_split_r(w, r))
    return float(_rate_batch(w, crude_coefficients(w, Delta, rc), flat[None, :], p)[0])


# ---------------------------------------------------------------------------
# numeric maximization

LARGE_DELTA_FLOOR = 1e-6


@dataclass
class MaxSearchReport:
    """Outcome of :func:`kappa_star_max_search`."""

    k: int
    Delta: int
    max_found: float
    argmax_w: Tuple[int, ...]
    argmax_r: Tuple[float, ...]
    bound: float
    vectors: int
    evaluations: int
    lower: float
    wall_time_ms: float
    per_d: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_found <= self.bound

    @property
    def argmax(self) -> Tuple[Tuple[int, ...], Tuple[float, ...]]:
        return self.argmax_w, self.argmax_r


def _search_one(w: SuitableVector, coef: np.ndarray, lo: float, grid: int,
                samples: int, steps: int, starts: int, rng: np.random.Generator,
                p: PotentialParams) -> Tuple[float, np.ndarray, int]:
    n = w.size
    axis = np.geomspace(lo, 1.0, grid)
    if grid ** n <= max(samples, grid):
        pts = np.array(list(itertools.product(axis, repeat=n)))
    else:
        pts = axis[rng.integers(0, grid, size=(samples, n))]
        # the diagonal and the two corners are cheap and often extremal
        pts = np.vstack([pts, np.repeat(axis[:, None], n, axis=1)])
    vals = _rate_batch(w, coef, pts, p)
    evals = len(pts)
    order = np.argsort(vals)[::-1][:starts]
    cur, cur_v = pts[order].copy(), vals[order].copy()
    log_lo = math.log(lo)
    for step in range(steps):
        c = step % n
        # candidate values: the global axis plus a shrinking bracket around each start
        width = (-log_lo) * 0.5 ** (1 + step // n)
        local = np.exp(np.clip(np.log(cur[:, c:c + 1]) + np.linspace(-width, width, 17), log_lo, 0.0))
        cand = np.concatenate([np.broadcast_to(axis, (len(cur), grid)), local], axis=1)
        trial = np.repeat(cur[:, None, :], cand.shape[1], axis=1)
        trial[:, :, c] = cand
        tv = _rate_batch(w, coef, trial.reshape(-1, n), p).reshape(len(cur), -1)
        evals += tv.size
        best = tv.argmax(axis=1)
        better = tv[np.arange(len(cur)), best] > cur_v
        cur[better, c] = cand[better, best[better]]
        cur_v[better] = tv[better, best[better]]
    b = int(cur_v.argmax())
    return float(cur_v[b]), cur[b], evals


def kappa_star_max_search(k: int, Delta: int, d_max: int, w_entry_cap: int = 4,
                          grid: int = 33, samples: int = 2000, seed: int = 0, *,
                          d_min: int = 1, extra_vectors: int = 8, steps: int = 200,
                          starts: int = 8, floor: float = LARGE_DELTA_FLOOR,
                          threads: int = 1, vectors: Sequence = (),
                          rc: Optional[RegimeConstants] = None,
                          p: PotentialParams = DEFAULT_POTENTIAL) -> MaxSearchReport:
    """Largest kappa* found over suitable vectors with d_min <= d <= d_max.

    For each vector the ratios range over ``[lower, 1]`` with ``lower = eta``
    in the (3, 6) regime and ``lower = floor`` for large Delta.  Small
    dimensions are searched on the full log-spaced product grid; larger ones
    on ``samples`` random grid points.  The best ``starts`` points are then
    refined by ``steps`` coordinate-ascent moves.  ``extra_vectors`` random
    vectors with entries up to ``3 * w_entry_cap`` are added per d, and any
    explicit ``vectors`` are searched as well.  The result depends only on
    the arguments.
    """
    t0 = time.perf_counter()
    rc = rc or RegimeConstants.for_params(k, Delta)
    lo = rc.eta if Delta < 200 else max(rc.eta, floor)
    rng = np.random.default_rng(seed)
    explicit = [_as_suitable(w) for w in vectors]
    vectors: List[SuitableVector] = []
    seen = set()
    for d in range(d_min, d_max + 1):
        for w in enumerate_suitable(d, w_entry_cap):
            seen.add(w.w)
            vectors.append(w)
        for _ in range(extra_vectors):
            w = random_suitable(d, 3 * w_entry_cap, rng)
            if w.w not in seen:
                seen.add(w.w)
                vectors.append(w)
    for w in explicit:
        if w.d > Delta:
            raise DomainError(f"vector {w.w} is longer than Delta={Delta}")
        if w.w not in seen:
            seen.add(w.w)
            vectors.append(w)

    def run(job):
        idx, w = job
        sub = np.random.default_rng([seed, idx])
        coef = star_coefficients(w, k, Delta, rc)
        return (w,) + _search_one(w, coef, lo, grid, samples, steps, starts, sub, p)

    jobs = list(enumerate(vectors))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    best_v, best_w, best_r, evals = -math.inf, (), (), 0
    per_d: dict = {}
    for w, v, r, e in results:
        evals += e
        per_d[w.d] = max(per_d.get(w.d, -math.inf), v)
        if v > best_v:
            best_v, best_w, best_r = v, w.w, tuple(float(x) for x in r)
    bound = 1.0 if max(per_d) <= Delta - 1 else math.inf
    return MaxSearchReport(k, Delta, best_v, best_w, best_r, bound, len(vectors),
                           evals, lo, (time.perf_counter() - t0) * 1e3, per_d)
