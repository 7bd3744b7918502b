import math
import random
from fractions import Fraction

import pytest
from hypothesis import given

import oracles
from conftest import formulas
from hypercount.counting import (
    DepthPolicy,
    approx_count,
    bruteforce_ratio,
    domsets_bruteforce,
    exact_count,
    hardcore_partition,
    pinned_prefix,
    telescoping_exact,
    twospin_partition,
)
from hypercount.errors import InvalidEps, NegativeLambda, TooLarge
from hypercount.formula import MonotoneFormula, RegimeTag, random_formula
from hypercount.graphs import clique, cycle, empty, path, petersen, small_corpus


def F(n, *clauses):
    return MonotoneFormula.from_clauses(n, clauses)


def test_exact_count_examples():
    c5 = F(5, *[(i, i % 5 + 1) for i in range(1, 6)])
    assert exact_count(c5) == 11
    for k in range(1, 7):
        assert exact_count(F(k, tuple(range(1, k + 1)))) == 2 ** k - 1
    assert exact_count(MonotoneFormula(6, ())) == 64


def test_exact_count_limit():
    with pytest.raises(TooLarge):
        exact_count(MonotoneFormula(40, ()))
    with pytest.raises(TooLarge):
        exact_count(MonotoneFormula(12, ()), limit=10)
    assert exact_count(MonotoneFormula(12, ()), limit=12) == 4096


def test_threads_agree():
    f = random_formula(18, 14, random.Random(5), min_arity=2, max_arity=4)
    assert exact_count(f, threads=1) == exact_count(f, threads=4)


@given(formulas(max_n=9))
def test_oracles_agree(nc):
    n, cl = nc
    f = MonotoneFormula(n, tuple(cl))
    z = oracles.count(n, cl)
    assert exact_count(f) == z
    assert telescoping_exact(f) == z
    assert z >= 1


def test_bruteforce_ratio():
    assert bruteforce_ratio(F(3, (1, 2), (1, 3)), 1) == Fraction(1, 4)


def test_pinned_prefix_deletes_satisfied_clauses():
    f = F(4, (1, 2), (2, 3), (3, 4))
    assert pinned_prefix(f, 2).clauses == ((3, 4),)
    assert pinned_prefix(f, 0) == f


# approximation -----------------------------------------------------------

def test_approx_empty_formula():
    est = approx_count(MonotoneFormula(3, ()), 0.1)
    assert est.value == 8 and est.guaranteed


def test_approx_single_clause():
    est = approx_count(F(3, (1, 2, 3)), 0.05)
    assert abs(est.value - 7) <= 0.05 * 7


@pytest.mark.parametrize("eps", [0, -1, float("nan")])
def test_invalid_eps(eps):
    with pytest.raises(InvalidEps):
        approx_count(F(2, (1, 2)), eps)


def test_approx_record_fields():
    est = approx_count(F(4, (1, 2, 3), (2, 3, 4)), 0.05)
    rec = est.as_record()
    assert set(rec) >= {"estimate", "log2_value", "eps", "depth_used", "regime",
                        "guaranteed", "wall_time_ms", "nodes_visited"}
    assert est.regime is RegimeTag.COVERED36


def test_fixed_depth_policy_and_levels():
    f = random_formula(16, 16, random.Random(9), min_arity=3, max_arity=4)
    z = exact_count(f)
    shallow = approx_count(f, 0.05, DepthPolicy.proof_depth(1))
    assert shallow.depth_used == 1 and len(shallow.levels) == 1
    deep = approx_count(f, 0.01)
    assert abs(deep.value - z) <= 0.01 * z
    assert [L for L, _ in deep.levels] == list(range(1, deep.depth_used + 1))


def test_brackets_alternate():
    # depth L and L+1 estimates straddle the truth when every clause has arity <= 6
    f = random_formula(14, 14, random.Random(21), min_arity=3, max_arity=4)
    logz = math.log2(exact_count(f))
    est = approx_count(f, 1e-9)
    vals = [v for _, v in est.levels]
    for a, b in zip(vals, vals[1:]):
        assert min(a, b) - 1e-9 <= logz <= max(a, b) + 1e-9


def test_huge_log_value():
    est = approx_count(MonotoneFormula(1200, ()), 0.1)
    assert est.value == math.inf and est.log2_value == 1200
    assert est.decimal_string(6).startswith("1.72")


# graph partition functions -------------------------------------------------

def test_hardcore_examples():
    assert hardcore_partition(path(2), Fraction(1, 3)) == Fraction(5, 3)
    assert hardcore_partition(empty(2), 2) == 9
    assert hardcore_partition(cycle(5), 1) == 11
    with pytest.raises(NegativeLambda):
        hardcore_partition(path(2), -1)


def test_twospin_examples():
    half = Fraction(1, 2)
    assert twospin_partition(path(2), half, 1, half) == Fraction(17, 8)
    assert twospin_partition(empty(1), 3, 5, Fraction(2, 7)) == 1 + Fraction(2, 7)


def test_partition_functions_match_enumeration():
    for name, g in small_corpus(6).items():
        edges = g.sorted_edges()
        lam = Fraction(2, 5)
        assert hardcore_partition(g, lam) == oracles.hardcore(g.n, edges, lam), name
        assert twospin_partition(g, 0, 1, lam) == hardcore_partition(g, lam), name
        assert twospin_partition(g, Fraction(1, 3), 2, lam) == oracles.twospin(
            g.n, edges, Fraction(1, 3), 2, lam), name
        assert domsets_bruteforce(g) == oracles.dominating_sets(g.n, edges), name


def test_domsets_examples():
    assert domsets_bruteforce(cycle(3)) == 7
    assert domsets_bruteforce(path(5)) == 17
    assert domsets_bruteforce(empty(1)) == 1
    assert domsets_bruteforce(clique(4)) == 15
    assert domsets_bruteforce(petersen()) == oracles.dominating_sets(10, petersen().sorted_edges())
