"""Gadget constructions linking graphs, hypergraphs and dominating sets.

Each construction comes with an exact count identity, exposed through
``predicted_multiplier`` helpers so callers (and the CLI sidecar record) can
state what the construction promises.

Hypergraphs are returned as :class:`MonotoneFormula` objects: a hyperedge is
a clause, and a vertex set is independent exactly when the assignment that
sets its vertices to 0 and every other vertex to 1 satisfies all clauses.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .comptree import TreeEvaluator
from .counting import DepthPolicy, Estimate, approx_count
from .errors import DomainError, NotRegular
from .formula import MonotoneFormula, classify_params
from .graphs import Graph


def _regular_degree(G: Graph) -> int:
    d = G.regular_degree()
    if d is None or d < 1:
        raise NotRegular(f"graph with degrees {sorted(set(G.degrees()))} is not regular of degree >= 1")
    return d


def domset_to_hyperis(G: Graph) -> MonotoneFormula:
    """One hyperedge {v} + N(v) per vertex; its independent sets are complements of dominating sets.

    Repeated hyperedges (for example all of them in a clique) are kept, so
    every vertex lies in exactly Delta + 1 hyperedges.
    """
    _regular_degree(G)
    nb = G.neighbours()
    return MonotoneFormula(G.n, tuple(tuple(sorted({v} | nb[v])) for v in range(1, G.n + 1)))


@dataclass(frozen=True)
class HardcoreGadget:
    hypergraph: MonotoneFormula
    lam: Fraction
    block_size: int

    @property
    def multiplier(self) -> int:
        """(2**k' - 1)**n, so that Z_H = multiplier * Z_G(lam)."""
        n = self.hypergraph.n // self.block_size
        return (2 ** self.block_size - 1) ** n


def hardcore_gadget(G: Graph, k: int) -> HardcoreGadget:
    """Blow each vertex into ceil(k/2) fresh vertices; each edge becomes the union of its two blocks.

    Vertex v of G owns the block ``(v-1)*k' + 1 .. v*k'`` of H.
    """
    if k < 2:
        raise DomainError(f"k must be at least 2, got {k}")
    kp = -(-k // 2)
    block = lambda v: tuple(range((v - 1) * kp + 1, v * kp + 1))
    clauses = tuple(block(u) + block(v) for u, v in G.sorted_edges())
    return HardcoreGadget(MonotoneFormula(G.n * kp, clauses), Fraction(1, 2 ** kp - 1), kp)


def domset_hardness_gadget(G: Graph) -> Graph:
    """Attach a pendant to every vertex and subdivide every edge.

    Pendant of v_i is ``n + i``; the vertex subdividing the t-th edge (in
    sorted order) is ``2n + t``.  The result has 2n + m vertices and
    2m + n edges, and #DomSets(G') = 2**(n+m) * Z_G(1/2, 1, 1/2).
    """
    n = G.n
    edges = [(i, n + i) for i in range(1, n + 1)]
    for t, (u, v) in enumerate(G.sorted_edges(), start=1):
        w = 2 * n + t
        edges += [(u, w), (v, w)]
    return Graph.from_edges(2 * n + G.m, edges)


def domset_gadget_multiplier(G: Graph) -> int:
    return 2 ** (G.n + G.m)


DOMSET_GADGET_PARAMS = (Fraction(1, 2), Fraction(1), Fraction(1, 2))


def count_regdomset(G: Graph, eps: float, policy: DepthPolicy = DepthPolicy(),
                    evaluator: Optional[TreeEvaluator] = None) -> Estimate:
    """Approximate #DomSets of a regular graph through its hypergraph.

    The regime tag is that of (k', Delta') = (Delta + 1, Delta + 1).
    """
    d = _regular_degree(G)
    est = approx_count(domset_to_hyperis(G), eps, policy, evaluator)
    return dataclasses.replace(est, regime=classify_params(d + 1, d + 1))
