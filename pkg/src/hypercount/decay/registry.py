"""Registry of closed-form inequalities behind the decay-rate bounds.

Each entry is a scalar expression, a box domain and a bound.  Checking an
entry samples the box on a product grid, adds uniform random points, then
polishes the worst few points with a bounded derivative-free local search.
These are numeric spot checks and certify nothing.

Expressions take ``(X, K)`` where ``X`` has one column per domain axis and
``K`` is a constants namespace in either double or extended (80-bit long
double) precision, so the same code serves both modes.  Concavity entries
estimate derivatives by central differences.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DomainError, UnknownName

Box = Tuple[Tuple[float, float], ...]
Expr = Callable[[np.ndarray, "Consts"], np.ndarray]

DEFAULT_GRID = 401
MAX_GRID_POINTS = 250_000
DEFAULT_REFINE = 2000
TIGHT_MARGIN = 1e-3


# ---------------------------------------------------------------------------
# constants in a chosen precision

@dataclass(frozen=True)
class Consts:
    dtype: type
    psi: float
    chi: float
    alpha: float
    c: float
    delta: float
    c5: float
    tau2: float
    tau6: float
    K2: float
    Y0: float
    Y1: float

    def q(self, num, den=1):
        """Exact rational num/den in this precision."""
        return self.dtype(num) / self.dtype(den)


@lru_cache(maxsize=None)
def consts(extended: bool = False) -> Consts:
    dt = np.longdouble if extended else np.float64
    q = lambda a, b=1: dt(a) / dt(b)
    c = q(7, 10)
    return Consts(
        dtype=dt,
        psi=q(13, 10),
        chi=q(1, 2),
        alpha=q(1) - q(1, 10 ** 4),
        c=c,
        delta=q(9789, 10000),
        c5=c ** (q(1) - q(6, 200)),
        tau2=q(45932, 10 ** 4),
        tau6=q(27805, 10 ** 4),
        K2=q(111614, 10 ** 5),
        Y0=(q(16276, 10 ** 4) - q(2279, 10 ** 4)) / q(15, 10),
        Y1=(q(8052, 10 ** 3) - q(16276, 10 ** 4)) / q(65, 10),
    )


# ---------------------------------------------------------------------------
# registry data model

@dataclass(frozen=True)
class Case:
    """One inequality ``expr(x) <sense> bound`` for all x in ``domain``."""

    label: str
    expr: Expr
    domain: Box
    bound: float
    sense: str = "<="

    def __post_init__(self):
        if self.sense not in ("<=", "<", ">=", ">"):
            raise ValueError(f"bad sense {self.sense!r}")


@dataclass(frozen=True)
class Inequality:
    name: str
    summary: str
    cases: Tuple[Case, ...]
    extended: bool = False


@dataclass
class CheckResult:
    """Worst case over every sub-case of one registry entry."""

    name: str
    passed: bool
    case: str
    extremal: float
    bound: float
    sense: str
    witness: Tuple[float, ...]
    slack: float
    points: int
    cases: int
    domain: Box
    precision: str
    wall_time_ms: float
    failures: List[str] = field(default_factory=list)

    def as_record(self) -> dict:
        return {
            "name": self.name,
            "case": self.case,
            "domain": " x ".join(f"[{lo:.6g},{hi:.6g}]" for lo, hi in self.domain) or "-",
            "bound": f"{self.sense} {self.bound:.10g}",
            "extremal": f"{self.extremal:.10g}",
            "pass": "pass" if self.passed else "FAIL",
            "grid_points": self.points,
            "wall_time_ms": round(self.wall_time_ms, 1),
        }


REGISTRY: Dict[str, Inequality] = {}


def _register(name: str, summary: str, cases: Sequence[Case], extended: bool = False):
    if name in REGISTRY:
        raise ValueError(f"duplicate registry entry {name}")
    REGISTRY[name] = Inequality(name, summary, tuple(cases), extended)


def names() -> List[str]:
    return list(REGISTRY)


def _const(label: str, fn: Callable[["Consts"], float], bound: float, sense: str = "<=") -> Case:
    return Case(label, lambda X, K: np.full(len(X), fn(K), dtype=K.dtype), (), bound, sense)


# ---------------------------------------------------------------------------
# shared scalar pieces

def _h_pot(t, K):
    """(1 - t)(psi - (t/(1-t))**chi)."""
    return (1 - t) * (K.psi - (t / (1 - t)) ** K.chi)


def _ploqaz(w, t, K):
    return t ** w / (1 - t ** w) * _h_pot(t, K)


def _hmin(y, K):
    return np.minimum(-K.q(15, 10) * y + K.q(16276, 10 ** 4), -8 * y + K.q(8052, 10 ** 3))


def _second_diff(f: Callable, x, step):
    return (f(x + step) - 2 * f(x) + f(x - step)) / (step * step)


def _first_diff(f: Callable, x, step):
    return (f(x + step) - f(x - step)) / (2 * step)


# -- large-degree regime ----------------------------------------------------

_register(
    "psi1plusr",
    "contribution of one arity-2 clause in the large-degree bound",
    [Case("r in [0,1]",
          lambda X, K: 1 / (K.psi - (1 + X[:, 0]) ** -K.chi)
          * X[:, 0] * (K.psi - X[:, 0] ** K.chi) / (K.alpha * (1 + X[:, 0])),
          ((0.0, 1.0),), 0.42)],
)


def _con23(X, K):
    def fhat(t):
        r = np.exp(t) / (1 - np.exp(t))
        return (K.psi - r ** K.chi) / (1 + r)
    t = X[:, 0]
    return _second_diff(fhat, t, K.q(1, 10 ** 3))


_register(
    "con23con45",
    "(psi - r**chi)/(1 + r) is concave in t = log(r/(1+r)) (second difference)",
    [Case("t in [-40, log 1/2]", _con23, ((-40.0, math.log(0.5) - 2e-3),), 1e-9)],
    extended=True,
)

_PLOQAZ_K = {2: (111614, 10 ** 5), 3: (103, 100), 4: (101, 100), 5: (1, 1)}
for _w, (_n, _d) in _PLOQAZ_K.items():
    _register(
        f"ploqaz1_w{_w}",
        f"t**{_w}/(1-t**{_w}) * h(t) is at most K_{_w} times its value at t = 1/2",
        [Case("t in (0,1/2]",
              (lambda w: lambda X, K: _ploqaz(w, X[:, 0], K) / _ploqaz(w, K.q(1, 2), K))(_w),
              ((1e-9, 0.5),), _n / _d)],
    )


def _gh1(w):
    def g(y, K):
        s = 1 - y * y
        u = s ** (K.q(1) / w)
        return (K.c ** -w / K.alpha * w * s / (y * y) * (1 - u)
                * (K.psi - (u / (1 - u)) ** K.chi))
    return g


for _w in range(2, 6):
    _g = _gh1(_w)
    _dom = (((1 - 2.0 ** -_w) ** 0.5, 1 - 1e-12),)
    _register(
        f"gh1yup_w{_w}",
        f"piecewise-linear upper envelope of g(y, {_w})",
        [
            Case("g <= 0.2279", (lambda g: lambda X, K: g(X[:, 0], K))(_g), _dom, 0.2279),
            Case("g + 1.5y <= 1.6276",
                 (lambda g: lambda X, K: g(X[:, 0], K) + K.q(15, 10) * X[:, 0])(_g), _dom, 1.6276),
            Case("g + 8y <= 8.052",
                 (lambda g: lambda X, K: g(X[:, 0], K) + 8 * X[:, 0])(_g), _dom, 8.052),
        ],
    )


def _mwac(w):
    return lambda K: (K.q(105, 100) / (2 * K.alpha * K.c) * (1 + K.q(1, w))
                      * (1 - K.q(2) ** -w) / (1 - K.q(2) ** (-w - 1)))


_register(
    "xi_decreasing",
    "constants making the per-clause weight decrease in the arity",
    [_const(f"w={w}", _mwac(w), 1.0, "<") for w in range(2, 6)]
    + [_const("w=6", lambda K: 2 / (1 + K.c) / (2 * K.alpha * K.c) * (1 + K.q(1, 6)), 1.0, "<"),
       _const("tail sum", lambda K: 1 + K.c ** (1 - K.q(7, 200)) / (1 - K.c ** (1 - K.q(7, 200)))
              * (1 - K.c ** K.q(1, 200)), 1.05, "<")],
)

_register(
    "xi2t",
    "weight of a width-2 clause chain",
    [_const("value", lambda K: 1 / K.alpha * (2 * K.c) ** -2 * 2 / (1 - K.q(1, 4))
            / (1 - K.c ** (1 - K.q(3, 200))), 4.5931, "<")],
)
_register(
    "xi6t",
    "weight of a width-6 clause chain",
    [_const("value", lambda K: K.alpha ** -2 * (2 * K.c) ** -6 * 6 / (1 - K.q(1, 64))
            / (1 - K.c ** (1 - K.q(7, 200))), 2.78045, "<")],
)
_register(
    "kapwidewide",
    "bound when every clause is wide",
    [_const("value", lambda K: K.c ** K.q(264, 100) / (K.psi - 1) * K.q(15, 100)
            * K.K2 * K.tau2, 1.0, "<")],
)




def _sigma(y, K, tail):
    """c/(psi - prod y) * (sum_i c5**(i-1) h(y_i) + tail)."""
    weights = K.c5 ** np.arange(y.shape[1]).astype(K.dtype)
    return K.c / (K.psi - np.prod(y, axis=1)) * ((_hmin(y, K) * weights).sum(axis=1) + tail)


def _y_box(t: int) -> Box:
    return tuple((float(consts().Y0), 1.0) for _ in range(t))


def _sigma_cases(t: int, tail: Callable[["Consts"], float], geom_n: int,
                 y1_power: int) -> List[Case]:
    """Steps reducing sup sigma_t <= 1 to one variable, plus the direct maximum.

    ``geom_n`` copies of h(Y1) follow h(y1); the reduced bound puts
    ``y1 * Y1**y1_power`` in the denominator.
    """
    def bracket(h1, K):
        return h1 + K.c5 * _hmin(K.Y1, K) * (1 - K.c5 ** geom_n) / (1 - K.c5) + tail(K)

    cases: List[Case] = []
    for i in range(3, t + 1):
        cases.append(_const(
            f"increasing in y_{i}",
            (lambda i: lambda K: K.Y0 ** (t - 1) - K.q(15, 10) * K.c * K.c5 ** (i - 1))(i),
            0.0, ">"))
    cases.append(_const("increasing in y_2",
                        lambda K: K.Y0 * K.Y1 ** (t - 2) - K.q(15, 10) * K.c * K.c5, 0.0, ">"))
    for i in range(2, min(5, t) + 1):
        cases.append(_const(
            f"decreasing in y_{i} above Y1",
            (lambda i: lambda K: K.c / (K.psi - 1) * bracket(_hmin(K.Y0, K), K)
             - 8 * K.c * K.c5 ** (i - 1))(i),
            0.0, "<"))
    cases.append(Case(
        "reduced one-variable bound",
        lambda X, K: K.c / (K.psi - X[:, 0] * K.Y1 ** y1_power) * bracket(_hmin(X[:, 0], K), K),
        _y_box(1), 1.0))
    cases.append(Case(
        f"sigma over [Y0,1]^{t}",
        lambda X, K: _sigma(X, K, tail(K)), _y_box(t), 1.0))
    return cases


def _tail6(t: int):
    return lambda K: K.q(15, 100) * K.c5 ** t * K.tau6


_register(
    "sigma6_t0",
    "sigma with no narrow clause ahead of the first width-6 one",
    [_const("value", lambda K: K.q(15, 100) * K.c * K.tau6 / (K.psi - 1), 1.0, "<")],
)
_register(
    "sigma6_t1",
    "sigma with one narrow clause ahead of the first width-6 one",
    [Case("y1 in [Y0,1]",
          lambda X, K: K.c / (K.psi - X[:, 0]) * (_hmin(X[:, 0], K) + K.q(15, 100) * K.c5 * K.tau6),
          _y_box(1), 1.0)],
)
for _t in range(2, 8):
    _register(
        f"sigma6_t{_t}",
        f"sigma with {_t} narrow clauses ahead of the first width-6 one",
        _sigma_cases(_t, _tail6(_t), geom_n=_t - 1, y1_power=min(_t - 1, 4)),
    )


def _sigma2_cases() -> List[Case]:
    tail = lambda K: K.q(15, 100) * K.c5 ** 8 * K.K2 * K.tau2
    cases = _sigma_cases(8, tail, geom_n=7, y1_power=5)

    def bracket(h1, K):
        return h1 + K.c5 * _hmin(K.Y1, K) * (1 - K.c5 ** 7) / (1 - K.c5) + tail(K)

    cases.insert(-2, Case(
        "decreasing in y_6 above Y1",
        lambda X, K: K.c * K.Y1 ** 4 / (K.psi - X[:, 0] * K.Y1 ** 4) * bracket(_hmin(X[:, 0], K), K)
        - 8 * K.c * K.c5 ** 5,
        _y_box(1), 0.0, "<"))
    return cases


_register("sigma2", "sigma with eight narrow clauses ahead of a width-2 tail", _sigma2_cases())


# -- (k, Delta) = (3, 6) ----------------------------------------------------

_EPS_B = {0: (0, 1), 1: (6, 10), 2: (7, 10), 3: (83, 100), 4: (91, 100)}


def _eps(B, K):
    return K.alpha if B == 5 else K.q(*_EPS_B[B])


_register(
    "numerical123",
    "per-B budget: (eps_B + (5 - B) M / (psi - 1)) / alpha <= 1",
    [_const(f"B={B}", (lambda B: lambda K: (_eps(B, K) + (5 - B) * K.q(25, 1000) / (K.psi - 1))
                       / K.alpha)(B), 1.0)
     for B in range(6)]
    + [_const(f"B={B} without the 1/(psi-1) factor",
              (lambda B: lambda K: (_eps(B, K) + (5 - B) * K.q(25, 1000)) / K.alpha)(B), 1.0)
       for B in range(6)],
)


def _kw6(K):
    return (1 / K.delta) ** 25 * 6 * K.q(7) ** (K.q(11, 10 ** 5) / np.log(K.q(6)))


_register(
    "thnmi",
    "clauses of width >= 6 contribute at most M each",
    [Case("t**6/(1-t**6) h(t) on [0,1/2]",
          lambda X, K: _ploqaz(6, X[:, 0], K), ((0.0, 0.5),), 1 / 410)]
    + [Case(f"width {w} against width 6",
            (lambda w: lambda X, K: (X[:, 0] ** w / (1 - X[:, 0] ** w))
             / (K.q(63) / (2 ** w - 1) * X[:, 0] ** 6 / (1 - X[:, 0] ** 6)))(w),
            ((1e-3, 0.5),), 1.0)
       for w in range(7, 41)]
    + [_const("f(6) <= M", lambda K: K.q(63, 410) / 63 * _kw6(K), 0.025),
       _const("f(w+1)/f(w) < 1", lambda K: K.q(1, 2) * (1 / K.delta) ** 5 * K.q(7, 6)
              * K.q(8, 7) ** (K.q(11, 10 ** 5) / np.log(K.q(6))), 1.0, "<")],
)


def _concav1(X, K):
    f = lambda y: _h_pot(np.exp(y), K)
    return _second_diff(f, X[:, 0], K.q(1, 10 ** 3))


_register(
    "concav1",
    "(1-t)(psi - (t/(1-t))**chi) is concave in y = log t (second difference)",
    [Case("y in [-40, log 1/2]", _concav1, ((-40.0, math.log(0.5) - 2e-3),), 1e-9)],
    extended=True,
)


def _concav2(w):
    def expr(X, K):
        z = X[:, 0]
        f = lambda z: (1 - np.exp(z)) / np.exp(z) * _h_pot((1 - np.exp(z)) ** (K.q(1) / w), K)
        step = np.minimum(K.q(1, 10 ** 4), -z / 4)
        return _second_diff(f, z, step)
    return expr


for _w in range(1, 6):
    _register(
        f"concav2_w{_w}",
        f"g_{_w}(e**z) is concave in z (second difference)",
        [Case("T = e**z in [1 - 2**-w, 1)", _concav2(_w),
              ((math.log(1 - 2.0 ** -_w), -1e-7),), 1e-9)],
        extended=True,
    )


def _g2q(X, K):
    y = X[:, 0]
    g2 = lambda y: (1 - y) / y * _h_pot((1 - y) ** K.q(1, 2), K)
    step = K.q(1, 10 ** 5)
    d1 = _first_diff(g2, y, step)
    d2 = _second_diff(g2, y, step)
    return (K.q(27, 25) - 1) * y * d1 * d1 + g2(y) * (d1 + y * d2)


_register(
    "g2q",
    "the q-convexity condition for g_2 with q = 27/25",
    [Case("y in [3/4, 1 - 1/33**2]", _g2q, ((0.75, 1 - 1 / 33 ** 2),), 0.0)],
    extended=True,
)


def _hgeneral(a1, a2, a):
    def parts(X, K):
        x1, x2 = X[:, 0], X[:, 1]
        A1, A2, A = a1(K), a2(K), a(K)
        s1, s2 = 1 + x1 * x1, 1 + x2 * x2
        lhs = 4 * x1 * x2 / (s1 * s2 - 4 * x1 * x2)
        num = (A1 * (1 - x1 * x1) ** 2 / s1 ** 2 * (K.psi - 2 * x1 / (1 - x1 * x1))
               + A2 * (1 - x2 * x2) ** 2 / s2 ** 2 * (K.psi - 2 * x2 / (1 - x2 * x2)))
        rhs = K.psi - num / (A * (1 - 4 * x1 * x2 / (s1 * s2)))
        return lhs, rhs
    box = ((0.0, math.sqrt(2) - 1),) * 2
    return [Case("rhs >= 0", lambda X, K: parts(X, K)[1], box, 0.0, ">="),
            Case("rhs**2 - lhs >= 0", lambda X, K: parts(X, K)[1] ** 2 - parts(X, K)[0],
                 box, 0.0, ">=")]


_K2S, _K4S = (1069, 1000), (1225, 1000)
_register(
    "w2aa",
    "two-variable merge for width-2 clauses",
    _hgeneral(lambda K: K.q(1), lambda K: 1 / K.delta ** 5, lambda K: 2 * K.q(*_K2S)),
)
_register(
    "w3aa",
    "two-variable merge for width-3 clauses",
    _hgeneral(lambda K: K.q(2), lambda K: 2 * K.q(*_K2S) / K.delta ** 5,
              lambda K: 4 * K.q(1120, 1000)),
)
_register(
    "w4aa",
    "two-variable merges for width-4 clauses",
    [Case("first merge: " + c.label, c.expr, c.domain, c.bound, c.sense)
     for c in _hgeneral(lambda K: K.q(1), lambda K: 1 / K.delta ** 15, lambda K: K.q(5, 2))]
    + [Case("second merge: " + c.label, c.expr, c.domain, c.bound, c.sense)
       for c in _hgeneral(lambda K: 2 * K.q(*_K2S) / K.delta ** 5, lambda K: K.q(5, 2),
                          lambda K: 4 * K.q(*_K4S))],
)

_CB3 = {1: (1, 1), 2: (102, 100), 3: (103, 100), 4: (104, 100), 5: (105, 100)}


def _assym(b3):
    def val(K):
        p = K.q(27, 2)
        return (1 / K.delta) ** (b3 - 1) * ((1 - K.delta ** (b3 * p)) / (b3 * (1 - K.delta ** p))) ** (1 / p)
    return val


_register(
    "assym2",
    "the averaging constants C^(b3) for p = 27/2",
    [_const(f"b3={b3}", _assym(b3), _CB3[b3][0] / _CB3[b3][1]) for b3 in range(1, 6)],
)

_TAU = {
    (0, 0): (0, 1), (0, 1): (42, 100), (1, 0): (42, 100),
    (0, 2): (54, 100), (1, 1): (59, 100), (2, 0): (63, 100),
    (0, 3): (72, 100), (1, 2): (74, 100), (2, 1): (76, 100), (3, 0): (79, 100),
    (0, 4): (864, 1000), (1, 3): (868, 1000), (2, 2): (876, 1000), (3, 1): (886, 1000),
    (4, 0): (901, 1000),
}


def _tau(b2, b3, K):
    return K.alpha if b2 + b3 == 5 else K.q(*_TAU[(b2, b3)])


def _tau_f(b2, b3) -> float:
    return float(_tau(b2, b3, consts()))


def _u(v, K):
    """(v/(1-v))**chi."""
    return (v / (1 - v)) ** K.chi


_CC = {0: (0, 1), **_CB3}


def _boot1(b2, b3):
    def expr(X, K):
        v1, v2 = X[:, 0], X[:, 1]
        num = (b2 * v1 * (K.psi - _u(v1, K))
               + 2 * b3 * K.q(*_K2S) * K.q(*_CC[b3]) * v2 * v2 / (1 + v2) * (K.psi - _u(v2, K)))
        den = K.psi - (1 - v1) ** (b2 * K.chi) * (1 - v2 * v2) ** (b3 * K.chi)
        return K.delta ** b2 * num / den
    return expr


_HALF2 = ((0.0, 0.5), (0.0, 0.5))
_register(
    "bootphase1",
    "clauses of width at most 2: kappa <= tau_{b2,b3}",
    [Case(f"b2={b2} b3={b3}", _boot1(b2, b3), _HALF2, _tau_f(b2, b3))
     for b2 in range(6) for b3 in range(6 - b2)],
)


def _boot_step(width, K_w, count_of, prev_tau):
    """(tau_prev (psi - A) + width K_w b v**w/(1+...+v**(w-1)) (psi - u(v))) / (psi - A (1-v**w)**(b chi))."""
    def expr(X, K):
        A, v = X[:, 0], X[:, 1]
        geo = sum(v ** e for e in range(width))
        add = width * K_w(K) * count_of * v ** width / geo * (K.psi - _u(v, K))
        return (prev_tau(K) * (K.psi - A) + add) / (K.psi - A * (1 - v ** width) ** (count_of * K.chi))
    return expr


_AV = ((0.0, 1.0), (0.0, 0.5))


def _boot2a():
    cases = []
    for b2 in range(6):
        for b3 in range(1, 6 - b2):
            for b4 in range(1, 6 - b2 - b3):
                K3 = lambda K, b2=b2: K.delta ** b2 * K.q(1160, 1000)
                cases.append(Case(
                    f"A-form b2={b2} b3={b3} b4={b4}",
                    _boot_step(3, K3, b4, lambda K, b2=b2, b3=b3: _tau(b2, b3, K)),
                    _AV, _tau_f(b2 + b3 + b4, 0)))
    return cases


def _boot2b(b2, b4):
    def expr(X, K):
        v1, v3 = X[:, 0], X[:, 1]
        num = (b2 * v1 * (K.psi - _u(v1, K))
               + 3 * K.q(1160, 1000) * b4 * v3 ** 3 / (1 + v3 + v3 * v3) * (K.psi - _u(v3, K)))
        den = K.psi - (1 - v1) ** (b2 * K.chi) * (1 - v3 ** 3) ** (b4 * K.chi)
        return K.delta ** b2 * num / den
    return expr


_register(
    "bootphase2",
    "adding width-3 clauses: kappa <= tau_{B,0}",
    _boot2a()
    + [Case(f"no width-2 b2={b2} b4={b4}", _boot2b(b2, b4), _HALF2, _tau_f(b2 + b4, 0))
       for b2 in range(6) for b4 in range(1, 6 - b2)],
)


def _boot_late(width, K_w):
    return [Case(f"Bp={bp} b={b}",
                 _boot_step(width, K_w, b, lambda K, bp=bp: _tau(bp, 0, K)),
                 _AV, _tau_f(bp + b, 0))
            for bp in range(6) for b in range(1, 6 - bp)]


_register("bootphase3", "adding width-4 clauses: kappa <= tau_{B,0}",
          _boot_late(4, lambda K: K.q(1225, 1000)))
_register("bootphase4", "adding width-5 clauses: kappa <= tau_{B,0}",
          _boot_late(5, lambda K: K.q(1532, 1000))
          + [_const("K_5 = (1/delta)**20 <= 1.532", lambda K: (1 / K.delta) ** 20, 1.532)])


# ---------------------------------------------------------------------------
# evaluation

def _slack(values: np.ndarray, bound: float, sense: str) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    s = (bound - v) if sense in ("<=", "<") else (v - bound)
    # undefined points (0/0 on a domain edge) are skipped rather than scored
    return np.where(np.isnan(s), np.inf, s)


def _passes(slack: float, bound: float, sense: str) -> bool:
    if sense in ("<", ">"):
        return slack > 0
    return slack >= -1e-12 * max(1.0, abs(bound))


def _grid_points(domain: Box, grid: int) -> np.ndarray:
    dim = len(domain)
    if dim == 0:
        return np.zeros((1, 0))
    per = grid if dim == 1 else max(3, min(grid, int(MAX_GRID_POINTS ** (1.0 / dim))))
    axes = [np.linspace(lo, hi, per) for lo, hi in domain]
    return np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=1)


def _compass(fun, x0: np.ndarray, f0: float, lo: np.ndarray, hi: np.ndarray,
             grid: int, iters: int = 400) -> Tuple[np.ndarray, float, int]:
    """Bounded compass search minimizing ``fun`` from ``x0``.

    Every iteration tries +/- step along each axis (batched into one call)
    and halves the step when nothing improves.
    """
    x, f = x0.astype(float).copy(), f0
    step = (hi - lo) / max(grid - 1, 1)
    dim = len(x)
    moves = np.vstack([np.eye(dim), -np.eye(dim)])
    evals = 0
    for _ in range(iters):
        trial = np.clip(x + moves * step, lo, hi)
        vals = fun(trial)
        evals += len(trial)
        k = int(np.argmin(vals))
        if vals[k] < f:
            x, f = trial[k], float(vals[k])
        else:
            step = step / 2
            if np.all(step <= 1e-15 * np.maximum(1.0, np.abs(hi - lo))):
                break
    return x, f, evals


@dataclass
class _CaseOutcome:
    case: Case
    value: float
    slack: float
    witness: np.ndarray
    points: int
    precision: str


def _eval(case: Case, X: np.ndarray, K: Consts) -> np.ndarray:
    with np.errstate(all="ignore"):
        return np.asarray(case.expr(np.asarray(X, dtype=K.dtype), K))


def _check_case(case: Case, grid: int, refine: int, rng: np.random.Generator,
                extended: bool) -> _CaseOutcome:
    K = consts(extended)
    X = _grid_points(case.domain, grid)
    if case.domain and refine:
        lo = np.array([d[0] for d in case.domain])
        hi = np.array([d[1] for d in case.domain])
        X = np.vstack([X, lo + (hi - lo) * rng.random((refine, len(lo)))])
    vals = _eval(case, X, K)
    sl = _slack(vals, case.bound, case.sense)
    points = len(X)
    worst = int(np.argmin(sl))
    best_x, best_s = X[worst].copy(), float(sl[worst])

    if case.domain:
        bounds = list(case.domain)
        lo = np.array([b[0] for b in bounds])
        hi = np.array([b[1] for b in bounds])
        fun = lambda Z: _slack(_eval(case, Z, K), case.bound, case.sense)
        for idx in np.argsort(sl)[:3]:
            x, s, n = _compass(fun, X[idx], float(sl[idx]), lo, hi, grid)
            points += n
            if s < best_s:
                best_x, best_s = x, s

    precision = "extended" if extended else "double"
    value = float(_eval(case, best_x[None, :], K)[0])
    if not extended and abs(best_s) < TIGHT_MARGIN:
        # re-evaluate a tight witness in extended precision
        K = consts(True)
        value = float(_eval(case, best_x[None, :], K)[0])
        best_s = float(_slack(np.array([value]), case.bound, case.sense)[0])
        precision = "extended"
    return _CaseOutcome(case, value, best_s, best_x, points, precision)


def inequality_check(name: str, grid: int = DEFAULT_GRID, *, refine: int = DEFAULT_REFINE,
                     seed: int = 0, extended: Optional[bool] = None) -> CheckResult:
    """Evaluate registry entry ``name`` and report its tightest case.

    ``grid`` is the number of points per axis for one-dimensional domains;
    higher-dimensional boxes use fewer per axis so the product stays below
    ``MAX_GRID_POINTS``.  ``extended`` forces (or, when False, forbids the
    default of) long-double evaluation; by default entries flagged as needing
    it use it and any witness within 1e-3 of its bound is re-evaluated in it.
    """
    if name not in REGISTRY:
        raise UnknownName(f"no inequality named {name!r}; known: {', '.join(REGISTRY)}")
    if grid < 2:
        raise DomainError("grid needs at least 2 points per axis")
    entry = REGISTRY[name]
    ext = entry.extended if extended is None else extended
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    outcomes = [_check_case(c, grid, refine, rng, ext) for c in entry.cases]
    worst = min(outcomes, key=lambda o: o.slack)
    failures = [o.case.label for o in outcomes if not _passes(o.slack, o.case.bound, o.case.sense)]
    return CheckResult(
        name=name,
        passed=not failures,
        case=worst.case.label,
        extremal=worst.value,
        bound=worst.case.bound,
        sense=worst.case.sense,
        witness=tuple(float(x) for x in worst.witness),
        slack=worst.slack,
        points=sum(o.points for o in outcomes),
        cases=len(outcomes),
        domain=worst.case.domain,
        precision=worst.precision,
        wall_time_ms=(time.perf_counter() - t0) * 1e3,
        failures=failures,
    )


def check_all(grid: int = DEFAULT_GRID, **kw) -> List[CheckResult]:
    return [inequality_check(n, grid, **kw) for n in REGISTRY]
