"""Decay-rate analysis: potential, deficits, kappa* and the inequality registry."""
from .kappa import (
    DeficitLedger,
    MaxSearchReport,
    SuitableVector,
    deficit,
    enumerate_suitable,
    kappa_crude,
    kappa_star,
    kappa_star_max_search,
    kappa_star_terms,
    recursion_F,
    recursion_partials,
)
from .potential import (
    DEFAULT_POTENTIAL,
    PotentialParams,
    RegimeConstants,
    inverse_potential,
    phi,
    potential,
)
from .registry import REGISTRY, CheckResult, check_all, inequality_check, names

__all__ = [
    "DEFAULT_POTENTIAL", "DeficitLedger", "MaxSearchReport", "PotentialParams",
    "REGISTRY", "CheckResult", "RegimeConstants", "SuitableVector", "check_all",
    "deficit", "enumerate_suitable", "inequality_check", "inverse_potential",
    "kappa_crude", "kappa_star", "kappa_star_max_search", "kappa_star_terms",
    "names", "phi", "potential", "recursion_F", "recursion_partials",
]
