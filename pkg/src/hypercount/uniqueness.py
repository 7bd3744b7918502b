"""Independent sets on the infinite (Delta-1)-ary k-uniform hypertree.

On that tree the probability that the root is occupied, given that its
parent edge is absent, obeys ``p' = f(p)`` with
``f(z) = (1 - z**(k-1))**(Delta-1) / (1 + (1 - z**(k-1))**(Delta-1))``.
``f`` is decreasing, so it has one fixed point x; whether boundary effects
die out (uniqueness) is decided by ``|f'(x)| < 1``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple, Union

import numpy as np

from .errors import DomainError, InvalidTolerance, NotAntiferromagnetic

DEFAULT_TOL = 1e-12
DEFAULT_MARGIN = 1e-6

Number = Union[int, float, Fraction]


class Classification(str, enum.Enum):
    UNIQUENESS = "Uniqueness"
    NON_UNIQUENESS = "NonUniqueness"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class TreeParams:
    k: int
    Delta: int

    def __post_init__(self):
        if self.k < 2 or self.Delta < 2:
            raise DomainError(f"need k >= 2 and Delta >= 2, got k={self.k}, Delta={self.Delta}")


@dataclass(frozen=True)
class FixedPointResult:
    x: float
    fprime_abs: float
    classification: Classification
    residual: float


def _pow_term(z: float, tp: TreeParams) -> float:
    """(1 - z**(k-1))**(Delta-1), via logs so large k and Delta do not underflow early."""
    zk = z ** (tp.k - 1)
    if zk >= 1.0:
        return 0.0
    return math.exp((tp.Delta - 1) * math.log1p(-zk))


def tree_f(z: float, tp: TreeParams) -> float:
    """One level of the occupation recursion."""
    if not 0 <= z <= 1:
        raise DomainError(f"z must lie in [0, 1], got {z}")
    a = _pow_term(z, tp)
    return a / (1 + a)


def _g(z: float, tp: TreeParams) -> float:
    return z - (1 - z) * _pow_term(z, tp)


def fprime_abs(x: float, tp: TreeParams) -> float:
    """|f'(x)| at a fixed point x, in the simplified closed form."""
    k, D = tp.k, tp.Delta
    xk = x ** (k - 1)
    return (D - 1) * (k - 1) * xk * (1 - x) / (1 - xk)


def fixed_point(tp: TreeParams, tol: float = DEFAULT_TOL,
                margin: float = DEFAULT_MARGIN) -> FixedPointResult:
    """Bisect g(z) = z - (1 - z)(1 - z**(k-1))**(Delta-1), which climbs from -1 to 1."""
    if not tol > 0:
        raise InvalidTolerance(f"tolerance must be positive, got {tol}")
    lo, hi = 0.0, 1.0
    x = 0.5
    for _ in range(2000):
        x = 0.5 * (lo + hi)
        gx = _g(x, tp)
        if abs(gx) <= tol or hi - lo <= 4 * math.ulp(x):
            break
        if gx < 0:
            lo = x
        else:
            hi = x
    fp = fprime_abs(x, tp)
    if fp < 1 - margin:
        cls = Classification.UNIQUENESS
    elif fp > 1 + margin:
        cls = Classification.NON_UNIQUENESS
    else:
        cls = Classification.BOUNDARY
    return FixedPointResult(x, fp, cls, abs(_g(x, tp)))


def critical_delta(k: int, tol: float = DEFAULT_TOL) -> int:
    """Largest Delta whose tree is in uniqueness (1 if none is)."""
    if k < 2:
        raise DomainError(f"k must be at least 2, got {k}")

    def unique(D: int) -> bool:
        return fixed_point(TreeParams(k, D), tol).classification is Classification.UNIQUENESS

    if not unique(2):
        return 1
    lo, hi = 2, 4
    while unique(hi):
        lo, hi = hi, hi * 2
    # invariant: unique(lo) and not unique(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if unique(mid):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class LevelGap:
    p: Tuple[float, ...]
    gaps: Tuple[float, ...]

    @property
    def final_gap(self) -> float:
        return self.gaps[-1]


def level_gap(tp: TreeParams, levels: int) -> LevelGap:
    """Iterate p_{n+1} = f(p_n) from p_0 = 1 and record |p_{n+1} - p_n|."""
    if levels < 1:
        raise DomainError(f"levels must be at least 1, got {levels}")
    p = [1.0]
    for _ in range(levels):
        p.append(tree_f(p[-1], tp))
    gaps = tuple(abs(b - a) for a, b in zip(p, p[1:]))
    return LevelGap(tuple(p), gaps)


# ---------------------------------------------------------------------------
# two-spin systems on the (Delta-1)-ary tree

def _twospin_map(x, beta: float, gamma: float, lam: float, Delta: int):
    return lam * ((beta * x + 1) / (x + gamma)) ** (Delta - 1)


def twospin_fixed_points(beta: Number, gamma: Number, lam: Number, Delta: int,
                         grid: int = 10_000, tol: float = DEFAULT_TOL) -> List[Tuple[float, float]]:
    """Positive solutions of x = T(y), y = T(x) for the two-spin tree map T.

    Scans ``grid`` log-spaced x values, takes y = T(x), and bisects every
    sign change of x - T(y).  Solutions closer than 1e-8 (relative) merge.
    """
    beta, gamma, lam = float(beta), float(gamma), float(lam)
    if gamma <= 0 or lam <= 0 or beta < 0:
        raise DomainError("need gamma > 0, lambda > 0 and beta >= 0")
    if beta * gamma >= 1:
        raise NotAntiferromagnetic(f"beta * gamma = {beta * gamma} is not below 1")
    if Delta < 2:
        raise DomainError(f"Delta must be at least 2, got {Delta}")

    def resid(x):
        return x - _twospin_map(_twospin_map(x, beta, gamma, lam, Delta), beta, gamma, lam, Delta)

    top = lam * max(1.0, 1.0 / gamma) ** (Delta - 1) * 1e3
    xs = np.geomspace(1e-9, top, grid)
    rs = resid(xs)
    roots: List[float] = []
    for i in range(len(xs) - 1):
        a, b = xs[i], xs[i + 1]
        ra, rb = rs[i], rs[i + 1]
        if ra == 0:
            roots.append(float(a))
            continue
        if ra * rb > 0:
            continue
        for _ in range(200):
            m = 0.5 * (a + b)
            rm = resid(m)
            if rm == 0 or (b - a) <= tol * max(1.0, m):
                break
            if ra * rm < 0:
                b, rb = m, rm
            else:
                a, ra = m, rm
        roots.append(0.5 * (a + b))
    roots.sort()
    out: List[Tuple[float, float]] = []
    for x in roots:
        if out and abs(x - out[-1][0]) <= 1e-8 * max(1.0, x):
            continue
        out.append((float(x), float(_twospin_map(x, beta, gamma, lam, Delta))))
    return out
