import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def formulas(draw, max_n=8, min_arity=2, max_arity=4, max_clauses=7):
    """Small monotone formulas as (n, list of clause tuples)."""
    n = draw(st.integers(min_value=max(1, min_arity), max_value=max_n))
    top = min(max_arity, n)
    clause = st.integers(min_value=min(min_arity, top), max_value=top).flatmap(
        lambda a: st.lists(st.integers(1, n), min_size=a, max_size=a, unique=True)
    )
    clauses = draw(st.lists(clause, max_size=max_clauses))
    return n, [tuple(sorted(c)) for c in clauses]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
