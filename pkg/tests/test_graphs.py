import pytest

from hypercount.errors import FormatSyntaxError, IdOutOfRange
from hypercount.graphs import (
    Graph,
    clique,
    cycle,
    parse_graph,
    path,
    petersen,
    random_regular,
    serialize_graph,
    small_corpus,
    star,
)


def test_shapes():
    assert path(5).m == 4 and cycle(5).m == 5 and clique(5).m == 10
    assert star(3).degrees() == [3, 1, 1, 1]
    p = petersen()
    assert p.n == 10 and p.m == 15 and p.regular_degree() == 3


def test_random_regular_is_regular_and_seeded():
    g = random_regular(10, 3, seed=4)
    assert g.regular_degree() == 3
    assert g == random_regular(10, 3, seed=4)


def test_round_trip():
    for g in small_corpus(7).values():
        assert parse_graph(serialize_graph(g)) == g


@pytest.mark.parametrize(
    "text, err",
    [
        ("p graph 2 1\n1 1", FormatSyntaxError),
        ("p graph 2 1\n1 3", IdOutOfRange),
        ("p graph 2 2\n1 2\n2 1", FormatSyntaxError),
        ("p graph 2 1\n1 2 3", FormatSyntaxError),
        ("1 2", FormatSyntaxError),
    ],
)
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_graph(text)


def test_corpus_contents():
    c = small_corpus(6)
    assert {"P1", "C3", "K6", "cubic4", "cubic6"} <= set(c)
    assert all(isinstance(g, Graph) and g.n <= 6 for g in c.values())
