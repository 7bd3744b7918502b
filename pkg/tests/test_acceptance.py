"""Acceptance suite: one test per headline criterion.

Each test records a single ``PASS``/``FAIL`` line; the lines are printed
together at the end of the pytest run (see ``conftest.py``) and also when
this file is executed directly with ``python3 tests/test_acceptance.py``.
A criterion that the mathematics does not support is left failing.
"""
from __future__ import annotations

import contextlib
import os
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from hypercount.comptree import TreeEvaluator
from hypercount.counting import (
    approx_count,
    bruteforce_ratio,
    domsets_bruteforce,
    exact_count,
    hardcore_partition,
    telescoping_exact,
    twospin_partition,
)
from hypercount.decay import inequality_check, kappa_star_max_search, names
from hypercount.decay.kappa import random_suitable
from hypercount.formula import preprocess, random_formula
from hypercount.graphs import clique, cycle, petersen, small_corpus
from hypercount.reductions import domset_hardness_gadget, domset_to_hyperis, hardcore_gadget
from hypercount.uniqueness import TreeParams, critical_delta, fixed_point, twospin_fixed_points

THREADS = os.cpu_count() or 1
RESULTS: list[str] = []


@contextlib.contextmanager
def criterion(label: str, limit_s: float | None = None):
    """Time the block, record one line, and re-raise any assertion."""
    info: dict = {}
    t0 = time.perf_counter()
    try:
        yield info
        elapsed = time.perf_counter() - t0
        if limit_s is not None:
            assert elapsed < limit_s, f"took {elapsed:.1f} s, limit {limit_s} s"
    except AssertionError as e:
        RESULTS.append(f"FAIL  {label}: {e}".splitlines()[0])
        raise
    detail = info.get("detail", "")
    RESULTS.append(f"PASS  {label} ({time.perf_counter() - t0:.2f} s){': ' + detail if detail else ''}")


def _random_formulas(count, seed, n_range, min_arity, max_arity=4, max_degree=6):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(*n_range)
        f = random_formula(n, rng.randint(max(1, n // 2), 2 * n), rng,
                           min_arity=min_arity, max_arity=max_arity, max_degree=max_degree)
        if f.clauses:
            out.append(f)
    return out


def test_uniqueness_boundary():
    with criterion("uniqueness boundary at k=6", limit_s=1.0) as info:
        dc = critical_delta(6)
        at = fixed_point(TreeParams(6, 28)).fprime_abs
        above = fixed_point(TreeParams(6, 29)).fprime_abs
        info["detail"] = f"Delta_c={dc}, |f'|(28)={at:.5f}, |f'|(29)={above:.5f}"
        assert dc == 28, f"Delta_c(6) = {dc}"
        assert 0.99 - 1e-4 < at < 0.996 + 1e-4, f"|f'| at 28 is {at}"
        assert above > 1.01 - 1e-4, f"|f'| at 29 is {above}"


def test_twospin_multiplicity():
    with criterion("two-spin multiplicity at (1/2, 1, 1/2, 17)", limit_s=1.0) as info:
        sols = twospin_fixed_points(Fraction(1, 2), 1, Fraction(1, 2), 17)
        info["detail"] = f"{len(sols)} positive solutions"
        assert len(sols) >= 2 and all(x > 0 and y > 0 for x, y in sols), sols


def test_gadget_identity_hardcore():
    with criterion("hard-core gadget identity, n <= 8, k in {2,4,6}", limit_s=30.0) as info:
        checked = 0
        for name, g in small_corpus(8).items():
            for k in (2, 4, 6):
                kp = -(-k // 2)
                lam = Fraction(1, 2 ** kp - 1)
                gad = hardcore_gadget(g, k)
                lhs = exact_count(gad.hypergraph, threads=THREADS)
                rhs = (2 ** kp - 1) ** g.n * hardcore_partition(g, lam)
                assert lhs == rhs, f"{name}, k={k}: {lhs} != {rhs}"
                checked += 1
        info["detail"] = f"{checked} (graph, k) pairs exact"


def test_gadget_identity_domsets():
    with criterion("dominating-set gadget identity, n <= 6") as info:
        checked = 0
        half = Fraction(1, 2)
        for name, g in small_corpus(6).items():
            g2 = domset_hardness_gadget(g)
            lhs = domsets_bruteforce(g2, threads=THREADS)
            rhs = 2 ** (g.n + g.m) * twospin_partition(g, half, 1, half)
            assert lhs == rhs, f"{name}: {lhs} != {rhs}"
            checked += 1
        info["detail"] = f"{checked} graphs exact"


def test_regdomset_reduction():
    with criterion("regular dominating-set reduction on C3, K4, C5, Petersen") as info:
        got = {}
        for name, g in (("C3", cycle(3)), ("K4", clique(4)), ("C5", cycle(5)), ("Petersen", petersen())):
            z = exact_count(domset_to_hyperis(g))
            assert z == domsets_bruteforce(g), name
            got[name] = z
        info["detail"] = ", ".join(f"{k}={v}" for k, v in got.items())


def test_oracle_equivalence():
    with criterion("oracle equivalence on 200 random formulas") as info:
        ratios = 0
        for f in _random_formulas(200, seed=1, n_range=(2, 12), min_arity=2):
            ct, forced = preprocess(f)
            ev = TreeEvaluator()
            for x in range(1, f.n + 1):
                if x in forced:
                    continue
                assert ev.exact(f.masks, x) == bruteforce_ratio(f, x), (f.clauses, x)
                ratios += 1
            assert exact_count(f) == telescoping_exact(f), f.clauses
        info["detail"] = f"{ratios} ratios and 200 counts exact"


def test_fptas_accuracy():
    with criterion("approx_count within eps=0.05 on 100 formulas", limit_s=300.0) as info:
        worst = 0.0
        for f in _random_formulas(100, seed=2, n_range=(6, 22), min_arity=3, max_arity=5):
            z = exact_count(f, threads=THREADS)
            err = abs(approx_count(f, 0.05).value - z) / z
            worst = max(worst, err)
            assert err <= 0.05, (f.clauses, err)
        info["detail"] = f"worst relative error {worst:.4g}"


def test_message_bounds():
    with criterion("message bounds (1/2)^d <= R <= 1") as info:
        seen = []

        def trace(depth, d, ws, L, value):
            seen.append((d, value))

        for f in _random_formulas(200, seed=3, n_range=(2, 12), min_arity=2):
            ct, forced = preprocess(f)
            for x in sorted(ct.occurring()):
                for L in (1, 2, 3, None):
                    r, _ = TreeEvaluator(trace=trace).truncated(f.masks, x, L)
                    seen.append((ct.degree(x), r))
        bad = [(d, v) for d, v in seen if not 0.5 ** d <= v <= 1.0]
        info["detail"] = f"{len(seen)} evaluations, {len(bad)} violations"
        assert not bad, bad[:5]


def test_kappa_sweep():
    with criterion("kappa* sweep for k=3, Delta=6", limit_s=600.0) as info:
        rng = np.random.default_rng(2024)
        larger = set()
        while len(larger) < 1000:
            w = random_suitable(int(rng.integers(1, 6)), 20, rng)
            if max(w.w) > 6:
                larger.add(w.w)
        rep = kappa_star_max_search(3, 6, 5, w_entry_cap=6, extra_vectors=0,
                                    vectors=sorted(larger), threads=THREADS)
        top = kappa_star_max_search(3, 6, 6, w_entry_cap=4, d_min=6, threads=THREADS)
        info["detail"] = (f"max {rep.max_found:.6f} at w={rep.argmax_w} over {rep.vectors} vectors; "
                          f"d=6 max {top.max_found:.4f}")
        assert rep.max_found <= 1 + 1e-9, rep.argmax
        assert np.isfinite(top.max_found)


def test_inequality_registry():
    with criterion("inequality registry passes at default grids", limit_s=300.0) as info:
        results = {n: inequality_check(n) for n in names()}
        failed = [n for n, r in results.items() if not r.passed]
        info["detail"] = (f"{len(results)} checks; psi1plusr={results['psi1plusr'].extremal:.5f}, "
                          f"xi2t={results['xi2t'].extremal:.7f}, xi6t={results['xi6t'].extremal:.7f}, "
                          f"kapwidewide={results['kapwidewide'].extremal:.5f}")
        assert not failed, failed
        assert results["psi1plusr"].extremal <= 0.42
        assert results["xi2t"].extremal <= 4.5931
        assert results["xi6t"].extremal <= 2.78045
        assert results["kapwidewide"].extremal < 1
        assert all(results[f"bootphase{i}"].passed for i in range(1, 5))


def test_asymptotic_trend():
    with criterion("Delta_c(k) * k / 2^k in (0.5, 1.5) for k = 10..16") as info:
        scaled = {k: critical_delta(k) * k / 2 ** k for k in range(10, 17)}
        info["detail"] = ", ".join(f"k={k}: {v:.3f}" for k, v in scaled.items())
        outside = {k: round(v, 3) for k, v in scaled.items() if not 0.5 < v < 1.5}
        assert not outside, f"scaled values outside the window: {outside}"


if __name__ == "__main__":
    import sys

    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    sys.exit(code)
