"""Potential function and the named constants used by the decay analysis.

The potential maps a ratio z in (0, 1] to
``Phi(z) = log(z**chi / (psi - z**chi)) / (chi * psi)`` and its derivative is
``phi(z) = 1 / (z * (psi - z**chi))``.  Contraction is measured in the
coordinates Phi provides, so every decay-rate expression carries phi factors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Optional

from ..errors import DomainError

ALPHA = 1 - 1e-4
LARGE_C = 0.7
SMALL_DELTA = 0.9789


@dataclass(frozen=True)
class PotentialParams:
    """Shape parameters of the potential (defaults chi = 1/2, psi = 13/10)."""

    chi: Fraction = Fraction(1, 2)
    psi: Fraction = Fraction(13, 10)

    def __post_init__(self):
        chi, psi = Fraction(self.chi), Fraction(self.psi)
        if not 0 < chi <= 1:
            raise DomainError(f"chi must lie in (0, 1], got {chi}")
        if psi <= 1:
            raise DomainError(f"psi must exceed 1, got {psi}")
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "psi", psi)

    @property
    def chi_f(self) -> float:
        return float(self.chi)

    @property
    def psi_f(self) -> float:
        return float(self.psi)


DEFAULT_POTENTIAL = PotentialParams()


def _check_unit(z: float):
    if not (0 < z <= 1):
        raise DomainError(f"potential argument must lie in (0, 1], got {z}")


def potential(z: float, p: PotentialParams = DEFAULT_POTENTIAL) -> float:
    """Phi(z); strictly increasing on (0, 1]."""
    _check_unit(z)
    zc = z ** p.chi_f
    return math.log(zc / (p.psi_f - zc)) / (p.chi_f * p.psi_f)


def phi(z: float, p: PotentialParams = DEFAULT_POTENTIAL) -> float:
    """Derivative of :func:`potential`, positive on (0, 1]."""
    _check_unit(z)
    return 1.0 / (z * (p.psi_f - z ** p.chi_f))


def inverse_potential(y: float, p: PotentialParams = DEFAULT_POTENTIAL) -> float:
    """Solve Phi(z) = y for z (y must be at most Phi(1))."""
    e = math.exp(y * p.chi_f * p.psi_f)
    zc = p.psi_f * e / (1 + e)
    if zc > 1 + 1e-12:
        raise DomainError(f"{y} exceeds Phi(1)")
    return min(1.0, zc) ** (1 / p.chi_f)


# Tables of named constants.  The first group is used for (k, Delta) = (3, 6),
# the second for the large-degree regime with delta = c**(1/Delta).
_K_SMALL = {1: 1.0, 2: 1.069, 3: 1.160, 4: 1.225}
_C_B3 = {0: 0.0, 1: 1.0, 2: 1.02, 3: 1.03, 4: 1.04, 5: 1.05}
_EPS_B = {0: 0.0, 1: 0.6, 2: 0.7, 3: 0.83, 4: 0.91, 5: ALPHA}
_TAU_B2B3 = {
    (0, 0): 0.0,
    (0, 1): 0.42, (1, 0): 0.42,
    (0, 2): 0.54, (1, 1): 0.59, (2, 0): 0.63,
    (0, 3): 0.72, (1, 2): 0.74, (2, 1): 0.76, (3, 0): 0.79,
    (0, 4): 0.864, (1, 3): 0.868, (2, 2): 0.876, (3, 1): 0.886, (4, 0): 0.901,
    **{(b, 5 - b): ALPHA for b in range(6)},
}
_K_LARGE = {2: 1.11614, 3: 1.03, 4: 1.01, 5: 1.0, 6: 1.0}
_M_SMALL = 0.025


def _large_tables(c: float) -> dict:
    y0 = (1.6276 - 0.2279) / 1.5
    y1 = (8.052 - 1.6276) / 6.5
    return {"tau2": 4.5932, "tau6": 2.7805, "Y0": y0, "Y1": y1,
            "c5": c ** (1 - 6 / 200)}


@dataclass(frozen=True)
class RegimeConstants:
    """alpha, delta, c and eta together with the named constant tables.

    Use :meth:`for_params` to get the constants of one of the two covered
    regimes; the plain constructor accepts any ``0 < delta < 1`` so callers
    can probe other values.
    """

    delta: float
    Delta: int
    alpha: float = ALPHA
    c: float = LARGE_C
    tables: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise DomainError(f"delta must lie in (0, 1), got {self.delta}")
        if self.Delta < 1:
            raise DomainError(f"Delta must be positive, got {self.Delta}")
        base = {
            "K_delta": MappingProxyType(dict(_K_SMALL)),
            "C_b3": MappingProxyType(dict(_C_B3)),
            "eps_B": MappingProxyType(dict(_EPS_B)),
            "tau_b2b3": MappingProxyType(dict(_TAU_B2B3)),
            "M": _M_SMALL,
            "K_large": MappingProxyType(dict(_K_LARGE)),
            **_large_tables(self.c),
        }
        base.update(self.tables)
        object.__setattr__(self, "tables", MappingProxyType(base))

    @property
    def eta(self) -> float:
        """Smallest ratio the tree can produce: (1/2)**(Delta - 1)."""
        return 0.5 ** (self.Delta - 1)

    def k_delta(self, w: int) -> float:
        """K_delta^(w) for the (3, 6) analysis; (1/delta)**((w-1)(Delta-1)) once w >= 5."""
        if w < 1:
            raise DomainError(f"w must be positive, got {w}")
        if w in self.tables["K_delta"]:
            return self.tables["K_delta"][w]
        return (1 / self.delta) ** ((w - 1) * (self.Delta - 1))

    def __getitem__(self, name: str):
        return self.tables[name]

    @classmethod
    def for_params(cls, k: Optional[int], Delta: int) -> "RegimeConstants":
        """Constants of the covered regime that (k, Delta) belongs to.

        (3, 6) uses delta = 0.9789; Delta >= 200 uses delta = c**(1/Delta).
        Other pairs fall back to the large-degree formula, which is only a
        heuristic choice there.
        """
        if Delta == 6 and (k is None or k == 3):
            return cls(delta=SMALL_DELTA, Delta=Delta)
        return cls(delta=LARGE_C ** (1.0 / Delta), Delta=Delta)
