"""Simple undirected graphs, the ``p graph`` text format, and a small corpus."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable

from .errors import FormatSyntaxError, IdOutOfRange


@dataclass(frozen=True)
class Graph:
    """Simple graph on vertices 1..n; edges stored as sorted pairs (u < v)."""

    n: int
    edges: frozenset[tuple[int, int]]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        es = set()
        for u, v in edges:
            if u == v:
                raise FormatSyntaxError(f"self-loop at {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise IdOutOfRange(f"edge ({u},{v}) outside 1..{n}")
            es.add((min(u, v), max(u, v)))
        return cls(n, frozenset(es))

    @property
    def m(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def neighbours(self) -> dict[int, set[int]]:
        nb: dict[int, set[int]] = {v: set() for v in range(1, self.n + 1)}
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return nb

    def degrees(self) -> list[int]:
        nb = self.neighbours()
        return [len(nb[v]) for v in range(1, self.n + 1)]

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def regular_degree(self) -> int | None:
        """Common degree if the graph is regular, else None."""
        ds = set(self.degrees())
        return ds.pop() if len(ds) == 1 else None


def parse_graph(text: str) -> Graph:
    header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line == "c" or line.startswith("c "):
            continue
        toks = line.split()
        if toks[0] == "p":
            if header is not None or len(toks) != 4 or toks[1] != "graph":
                raise FormatSyntaxError(f"line {lineno}: expected 'p graph <n> <m>'")
            try:
                header = (int(toks[2]), int(toks[3]))
            except ValueError:
                raise FormatSyntaxError(f"line {lineno}: non-integer header field") from None
            continue
        if header is None:
            raise FormatSyntaxError(f"line {lineno}: edge before header")
        if len(toks) != 2:
            raise FormatSyntaxError(f"line {lineno}: edge lines hold exactly two ids")
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError:
            raise FormatSyntaxError(f"line {lineno}: non-integer token") from None
        edges.append((u, v))
    if header is None:
        raise FormatSyntaxError("missing header line")
    n, m = header
    if len(edges) != m:
        raise FormatSyntaxError(f"header declares {m} edges, found {len(edges)}")
    g = Graph.from_edges(n, edges)
    if g.m != m:
        raise FormatSyntaxError("repeated edge")
    return g


def serialize_graph(g: Graph) -> str:
    lines = [f"p graph {g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.sorted_edges())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# corpus

def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(1, n)])


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)])


def clique(n: int) -> Graph:
    return Graph.from_edges(n, [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)])


def empty(n: int) -> Graph:
    return Graph(n, frozenset())


def star(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(1, i) for i in range(2, leaves + 2)])


def petersen() -> Graph:
    outer = [(i, i % 5 + 1) for i in range(1, 6)]
    spokes = [(i, i + 5) for i in range(1, 6)]
    inner = [(6 + i, 6 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def random_regular(n: int, d: int, seed: int) -> Graph:
    """Random d-regular simple graph by the pairing model with restarts."""
    if (n * d) % 2 or d >= n:
        raise ValueError("no d-regular simple graph with these parameters")
    rng = random.Random(seed)
    while True:
        points = [v for v in range(1, n + 1) for _ in range(d)]
        rng.shuffle(points)
        pairs = set()
        ok = True
        for a, b in zip(points[::2], points[1::2]):
            e = (min(a, b), max(a, b))
            if a == b or e in pairs:
                ok = False
                break
            pairs.add(e)
        if ok:
            return Graph(n, frozenset(pairs))


def small_corpus(max_n: int, seed: int = 7) -> dict[str, Graph]:
    """Paths, cycles, cliques and random cubic graphs with at most ``max_n`` vertices."""
    out: dict[str, Graph] = {}
    for n in range(1, max_n + 1):
        out[f"P{n}"] = path(n)
        if n >= 3:
            out[f"C{n}"] = cycle(n)
        out[f"K{n}"] = clique(n)
    for n in range(4, max_n + 1, 2):
        out[f"cubic{n}"] = random_regular(n, 3, seed + n)
    return out
