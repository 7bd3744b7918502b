import pytest
from hypothesis import given

from conftest import formulas
from hypercount.counting import exact_count
from hypercount.errors import EmptyClause, FormatSyntaxError, IdOutOfRange, NonMonotone
from hypercount.formula import (
    MonotoneFormula,
    RegimeTag,
    classify_params,
    classify_regime,
    parse_hygraph,
    parse_instance,
    parse_mcnf,
    preprocess,
    serialize_mcnf,
)


def test_parse_single_clause():
    f = parse_mcnf("p mcnf 3 1\n1 2 3 0")
    assert f.n == 3 and f.clauses == ((1, 2, 3),)


def test_parse_keeps_declaration_order_and_skips_comments():
    f = parse_mcnf("c hello\np mcnf 4 2\n3 4 0\nc mid\n2 1 0\n")
    assert f.clauses == ((3, 4), (1, 2))


@pytest.mark.parametrize(
    "text, err",
    [
        ("p mcnf 2 1\n-1 2 0", NonMonotone),
        ("p mcnf 2 1\n0", EmptyClause),
        ("p mcnf 2 1\n1 3 0", IdOutOfRange),
        ("p mcnf 2 1\n1 2", FormatSyntaxError),
        ("p mcnf 2 2\n1 2 0", FormatSyntaxError),
        ("1 2 0", FormatSyntaxError),
        ("p mcnf x 1\n1 0", FormatSyntaxError),
        ("p mcnf 2 1\n1 1 0", FormatSyntaxError),
        ("p cnf 2 1\n1 2 0", FormatSyntaxError),
    ],
)
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_mcnf(text)


def test_parse_collapses_exact_duplicates():
    f = parse_mcnf("p mcnf 3 3\n1 2 0\n2 1 0\n2 3 0\n")
    assert f.clauses == ((1, 2), (2, 3))


def test_hygraph_and_dispatch():
    text = "p hygraph 4 2\n1 2 3 0\n2 4 0\n"
    assert parse_hygraph(text) == parse_instance(text)
    assert parse_instance(text.replace("hygraph", "mcnf")).clauses == ((1, 2, 3), (2, 4))


def test_degrees():
    f = MonotoneFormula.from_clauses(4, [(1, 2), (1, 3), (1, 2, 4)])
    assert [f.degree(v) for v in range(1, 5)] == [3, 2, 1, 1]
    assert f.max_degree() == 3 and f.min_arity() == 2


@given(formulas())
def test_round_trip(nc):
    n, cl = nc
    f = MonotoneFormula(n, tuple(cl)).deduplicated()
    assert parse_mcnf(serialize_mcnf(f)) == f
    assert parse_mcnf(serialize_mcnf(parse_mcnf(serialize_mcnf(f)))) == f


# preprocessing ------------------------------------------------------------

def test_preprocess_unit_absorbs_superset():
    ct, forced = preprocess(MonotoneFormula.from_clauses(2, [(1,), (1, 2)]))
    assert ct.clauses == () and forced == {1}


def test_preprocess_superset_removal():
    ct, forced = preprocess(MonotoneFormula.from_clauses(3, [(1, 2), (1, 2, 3)]))
    assert ct.clauses == ((1, 2),) and forced == set()


def test_preprocess_identity():
    f = MonotoneFormula.from_clauses(3, [(1, 2), (2, 3)])
    assert preprocess(f) == (f, frozenset())


@given(formulas(min_arity=1))
def test_preprocess_properties(nc):
    n, cl = nc
    f = MonotoneFormula(n, tuple(cl))
    ct, forced = preprocess(f)
    assert set(ct.clauses) <= set(f.clauses)
    assert all(len(c) >= 2 for c in ct.clauses)
    for a in ct.clauses:
        for b in ct.clauses:
            assert a == b or not set(a) < set(b)
    assert len(set(ct.clauses)) == len(ct.clauses)
    assert preprocess(ct) == (ct, frozenset())
    # forced variables are 1 in every model and vanish from the residual
    assert not forced & ct.occurring()
    assert exact_count(f) * 2 ** len(forced) == exact_count(ct)


@given(formulas())
def test_clause_deletion_never_decreases_count(nc):
    n, cl = nc
    f = MonotoneFormula(n, tuple(cl))
    for i in range(len(cl)):
        g = MonotoneFormula(n, tuple(cl[:i] + cl[i + 1:]))
        assert exact_count(g) >= exact_count(f)


# regimes ------------------------------------------------------------------

@pytest.mark.parametrize(
    "k, delta, tag",
    [
        (3, 6, RegimeTag.COVERED36),
        (200, 200, RegimeTag.COVERED_LARGE),
        (2, 6, RegimeTag.HARD_REGION),
        (3, 7, RegimeTag.UNPROVEN),
        (5, 6, RegimeTag.COVERED36),
        (199, 200, RegimeTag.UNPROVEN),
    ],
)
def test_classify_params(k, delta, tag):
    assert classify_params(k, delta) is tag


def test_classify_regime_uses_min_arity_and_degree():
    f = MonotoneFormula.from_clauses(5, [(1, 2, 3), (1, 4, 5), (2, 3, 4, 5)])
    assert classify_regime(f) is RegimeTag.COVERED36
    assert classify_regime(MonotoneFormula(3, ())) is RegimeTag.COVERED36
