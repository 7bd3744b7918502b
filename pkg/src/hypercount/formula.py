"""Monotone CNF formulas: data model, text format, preprocessing, regime tags.

A formula over variables 1..n is a list of clauses, each a set of positive
variable ids.  Reading it as a hypergraph, a satisfying assignment is the
complement of an independent set: a vertex outside the set is a variable set
to 1.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import EmptyClause, FormatSyntaxError, IdOutOfRange, NonMonotone

Clause = tuple[int, ...]


@dataclass(frozen=True)
class MonotoneFormula:
    """Immutable monotone CNF formula.

    ``clauses`` keeps declaration order; each clause is a sorted tuple of
    distinct ids in ``1..n``.  Bitmasks (bit ``v`` for variable ``v``) are
    precomputed because subset tests dominate preprocessing and brute force.
    """

    n: int
    clauses: tuple[Clause, ...]
    masks: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        norm = []
        for c in self.clauses:
            t = tuple(sorted(c))
            if not t:
                raise EmptyClause("clause with no variables")
            if len(set(t)) != len(t):
                raise FormatSyntaxError(f"repeated variable in clause {t}")
            if t[0] < 1 or t[-1] > self.n:
                raise IdOutOfRange(f"clause {t} has ids outside 1..{self.n}")
            norm.append(t)
        object.__setattr__(self, "clauses", tuple(norm))
        object.__setattr__(self, "masks", tuple(_mask(c) for c in norm))

    @classmethod
    def from_clauses(cls, n: int, clauses: Iterable[Iterable[int]]) -> "MonotoneFormula":
        return cls(n, tuple(tuple(c) for c in clauses))

    @property
    def m(self) -> int:
        return len(self.clauses)

    def degree(self, x: int) -> int:
        """Number of clauses containing ``x``."""
        bit = 1 << x
        return sum(1 for mk in self.masks if mk & bit)

    def max_degree(self) -> int:
        counts = [0] * (self.n + 1)
        for c in self.clauses:
            for v in c:
                counts[v] += 1
        return max(counts)

    def min_arity(self) -> int | None:
        return min((len(c) for c in self.clauses), default=None)

    def occurring(self) -> set[int]:
        out: set[int] = set()
        for c in self.clauses:
            out.update(c)
        return out

    def deduplicated(self) -> "MonotoneFormula":
        """Drop exact repeats of a clause, keeping the first copy."""
        seen = set()
        keep = []
        for c in self.clauses:
            if c not in seen:
                seen.add(c)
                keep.append(c)
        return MonotoneFormula(self.n, tuple(keep))

    def is_satisfied_by(self, true_mask: int) -> bool:
        """``true_mask`` has bit ``v`` set when variable ``v`` is 1."""
        return all(mk & true_mask for mk in self.masks)

    def to_mcnf(self) -> str:
        return serialize_mcnf(self)


def _mask(clause: Sequence[int]) -> int:
    m = 0
    for v in clause:
        m |= 1 << v
    return m


# ---------------------------------------------------------------------------
# text format

def _parse_clause_file(text: str, kind: str) -> MonotoneFormula:
    header = None
    clauses: list[Clause] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line == "c" or line.startswith("c "):
            continue
        toks = line.split()
        if toks[0] == "p":
            if header is not None:
                raise FormatSyntaxError(f"line {lineno}: second header")
            if len(toks) != 4 or toks[1] != kind:
                raise FormatSyntaxError(f"line {lineno}: expected 'p {kind} <n> <m>'")
            try:
                header = (int(toks[2]), int(toks[3]))
            except ValueError:
                raise FormatSyntaxError(f"line {lineno}: non-integer header field") from None
            if header[0] < 0 or header[1] < 0:
                raise FormatSyntaxError(f"line {lineno}: negative header field")
            continue
        if header is None:
            raise FormatSyntaxError(f"line {lineno}: clause before header")
        try:
            lits = [int(t) for t in toks]
        except ValueError:
            raise FormatSyntaxError(f"line {lineno}: non-integer token") from None
        if lits[-1] != 0 or 0 in lits[:-1]:
            raise FormatSyntaxError(f"line {lineno}: clause must end with a single 0")
        body = lits[:-1]
        if not body:
            raise EmptyClause(f"line {lineno}: empty clause")
        if any(v < 0 for v in body):
            raise NonMonotone(f"line {lineno}: negative literal")
        n = header[0]
        if any(v > n for v in body):
            raise IdOutOfRange(f"line {lineno}: id exceeds n={n}")
        if len(set(body)) != len(body):
            raise FormatSyntaxError(f"line {lineno}: repeated variable")
        clauses.append(tuple(sorted(body)))
    if header is None:
        raise FormatSyntaxError("missing header line")
    n, m = header
    if len(clauses) != m:
        raise FormatSyntaxError(f"header declares {m} clauses, found {len(clauses)}")
    return MonotoneFormula(n, tuple(clauses)).deduplicated()


def parse_mcnf(text: str) -> MonotoneFormula:
    """Parse ``p mcnf n m`` text.  Exact duplicate clauses are collapsed."""
    return _parse_clause_file(text, "mcnf")


def parse_hygraph(text: str) -> MonotoneFormula:
    """Parse ``p hygraph n m`` text; hyperedges map one-to-one onto clauses."""
    return _parse_clause_file(text, "hygraph")


def parse_instance(text: str) -> MonotoneFormula:
    """Accept either clause-file flavour, dispatching on the header."""
    for raw in text.splitlines():
        toks = raw.split()
        if toks and toks[0] == "p":
            if len(toks) > 1 and toks[1] == "hygraph":
                return parse_hygraph(text)
            return parse_mcnf(text)
    raise FormatSyntaxError("missing header line")


def serialize_mcnf(f: MonotoneFormula, kind: str = "mcnf") -> str:
    lines = [f"p {kind} {f.n} {f.m}"]
    lines.extend(" ".join(map(str, c)) + " 0" for c in f.clauses)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# preprocessing

def preprocess(f: MonotoneFormula) -> tuple[MonotoneFormula, frozenset[int]]:
    """Drop redundant clauses, then unit clauses.

    Returns the residual formula and the set of variables that were forced
    to 1 by unit clauses.  Exact duplicates count as redundant here (only the
    first copy survives).  Ids are never renumbered.
    """
    masks = f.masks
    m = len(masks)
    keep = [True] * m
    seen: dict[int, int] = {}
    for idx, mk in enumerate(masks):
        if mk in seen:
            keep[idx] = False
        else:
            seen[mk] = idx
    # Only a smaller clause can be a strict subset, so compare against those.
    order = sorted((i for i in range(m) if keep[i]), key=lambda i: len(f.clauses[i]))
    survivors: list[int] = []
    for i in order:
        mk = masks[i]
        if any((masks[j] & mk) == masks[j] for j in survivors if len(f.clauses[j]) < len(f.clauses[i])):
            keep[i] = False
        else:
            survivors.append(i)
    forced = set()
    out = []
    for i in range(m):
        if not keep[i]:
            continue
        c = f.clauses[i]
        if len(c) == 1:
            forced.add(c[0])
        else:
            out.append(c)
    if len(out) == m and not forced:
        return f, frozenset()
    return MonotoneFormula(f.n, tuple(out)), frozenset(forced)


# ---------------------------------------------------------------------------
# regimes

class RegimeTag(str, enum.Enum):
    COVERED36 = "Covered36"
    COVERED_LARGE = "CoveredLarge"
    HARD_REGION = "HardRegion"
    UNPROVEN = "Unproven"


def hardness_condition(k: int, delta: int) -> bool:
    """Hard-core reduction criterion: 2^ceil(k/2) - 1 < (D-2)^D / (D-1)^(D-1).

    Evaluated in exact integers to avoid rounding at the boundary.
    """
    if k < 2 or delta < 3:
        return False
    kp = -(-k // 2)
    return (2 ** kp - 1) * (delta - 1) ** (delta - 1) < (delta - 2) ** delta


def classify_params(k: int | None, delta: int) -> RegimeTag:
    """Tag a (min arity, max degree) pair.  ``k=None`` means no clauses."""
    if k is None:
        return RegimeTag.COVERED36
    if k >= 3 and delta <= 6:
        return RegimeTag.COVERED36
    if k >= delta and delta >= 200:
        return RegimeTag.COVERED_LARGE
    if hardness_condition(k, delta):
        return RegimeTag.HARD_REGION
    return RegimeTag.UNPROVEN


def classify_regime(f: MonotoneFormula) -> RegimeTag:
    return classify_params(f.min_arity(), f.max_degree() if f.clauses else 0)


def random_formula(
    n: int,
    m: int,
    rng,
    min_arity: int = 2,
    max_arity: int = 4,
    max_degree: int = 6,
) -> MonotoneFormula:
    """Random monotone formula with every variable degree capped at ``max_degree``.

    Clauses that cannot be placed within the degree cap are skipped, so the
    result may hold fewer than ``m`` clauses.  ``rng`` is a ``random.Random``.
    """
    deg = [0] * (n + 1)
    clauses: list[Clause] = []
    for _ in range(m):
        k = rng.randint(min_arity, max_arity)
        pool = [v for v in range(1, n + 1) if deg[v] < max_degree]
        if len(pool) < k:
            break
        c = tuple(sorted(rng.sample(pool, k)))
        for v in c:
            deg[v] += 1
        clauses.append(c)
    return MonotoneFormula(n, tuple(clauses)).deduplicated()
