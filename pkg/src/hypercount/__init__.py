"""Approximate counting of hypergraph independent sets (monotone CNF models)
by a truncated computation tree, with exact oracles and decay/uniqueness analysis."""

__version__ = "0.1.0"
