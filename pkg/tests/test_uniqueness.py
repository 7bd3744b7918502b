import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypercount.errors import DomainError, InvalidTolerance, NotAntiferromagnetic
from hypercount.uniqueness import (
    Classification,
    TreeParams,
    critical_delta,
    fixed_point,
    fprime_abs,
    level_gap,
    tree_f,
    twospin_fixed_points,
)

params = st.builds(TreeParams, st.integers(2, 12), st.integers(2, 400))


def _mp_fprime(k, D, dps=50):
    """|f'(x)| at the fixed point, by mpmath root finding and differentiation."""
    with mpmath.workdps(dps):
        f = lambda z: (1 - z ** (k - 1)) ** (D - 1) / (1 + (1 - z ** (k - 1)) ** (D - 1))
        x = mpmath.findroot(lambda z: f(z) - z, (mpmath.mpf("1e-30"), 1), solver="bisect")
        return float(abs(mpmath.diff(f, x))), float(x)


def test_tree_f_values():
    tp = TreeParams(2, 2)
    assert tree_f(0, tp) == 0.5 and tree_f(1, tp) == 0
    for z in (0.1, 0.5, 0.9):
        assert tree_f(z, tp) == pytest.approx((1 - z) / (2 - z))
    with pytest.raises(DomainError):
        tree_f(1.5, tp)


def test_tree_params_validation():
    with pytest.raises(DomainError):
        TreeParams(1, 5)
    with pytest.raises(InvalidTolerance):
        fixed_point(TreeParams(3, 3), tol=0)


def test_golden_fixed_point():
    r = fixed_point(TreeParams(2, 2))
    assert r.x == pytest.approx((3 - math.sqrt(5)) / 2, abs=1e-11)
    assert r.fprime_abs == pytest.approx(0.381966, abs=1e-6)
    assert r.classification is Classification.UNIQUENESS


@pytest.mark.parametrize("k, D", [(6, 28), (6, 29), (3, 7), (10, 269), (10, 270), (2, 5), (2, 6)])
def test_fprime_against_mpmath(k, D):
    expected, x = _mp_fprime(k, D)
    r = fixed_point(TreeParams(k, D))
    assert r.x == pytest.approx(x, abs=1e-10)
    assert r.fprime_abs == pytest.approx(expected, abs=1e-8)


def test_critical_values():
    # frozen from the mpmath-backed bisection above and a scan over Delta
    assert [critical_delta(k) for k in range(2, 11)] == [5, 7, 10, 17, 28, 48, 84, 149, 269]


@given(params, st.floats(0, 1), st.floats(0, 1))
def test_f_decreasing(tp, a, b):
    lo, hi = min(a, b), max(a, b)
    assert tree_f(lo, tp) >= tree_f(hi, tp)


@given(params, st.floats(1e-6, 1 - 1e-6))
def test_g_slope_at_least_one(tp, z):
    h = 1e-7

    def g(t):
        return t - (1 - t) * (1 - t ** (tp.k - 1)) ** (tp.Delta - 1)

    slope = (g(min(1, z + h)) - g(max(0, z - h))) / (min(1, z + h) - max(0, z - h))
    assert slope >= 1 - 1e-5


@given(params)
def test_fixed_point_is_fixed(tp):
    r = fixed_point(tp)
    assert abs(tree_f(r.x, tp) - r.x) <= 1e-10
    assert r.fprime_abs == pytest.approx(fprime_abs(r.x, tp))


@given(st.integers(2, 12), st.integers(2, 300))
def test_monotone_in_delta(k, D):
    a, b = fixed_point(TreeParams(k, D)), fixed_point(TreeParams(k, D + 1))
    assert b.x < a.x
    assert b.fprime_abs > a.fprime_abs


@given(params)
def test_level_parity_monotone(tp):
    lg = level_gap(tp, 60)
    assert lg.p[0] == 1 and lg.p[1] == 0
    even, odd = lg.p[0::2], lg.p[1::2]
    assert all(b <= a + 1e-15 for a, b in zip(even, even[1:]))
    assert all(b >= a - 1e-15 for a, b in zip(odd, odd[1:]))


def test_level_gap_values():
    # values frozen from a 50-digit mpmath iteration of the same map
    assert level_gap(TreeParams(6, 28), 500).final_gap == pytest.approx(0.0039430, abs=2e-7)
    assert level_gap(TreeParams(6, 40), 500).final_gap == pytest.approx(0.249225, abs=1e-5)
    assert level_gap(TreeParams(3, 3), 200).final_gap < 1e-12
    with pytest.raises(DomainError):
        level_gap(TreeParams(3, 3), 0)


def test_twospin_solutions():
    sols = twospin_fixed_points(0.5, 1, 0.5, 17)
    assert len(sols) >= 2
    for x, y in sols:
        assert x > 0 and y > 0
        assert y == pytest.approx(0.5 * ((0.5 * x + 1) / (x + 1)) ** 16, rel=1e-9)
        assert x == pytest.approx(0.5 * ((0.5 * y + 1) / (y + 1)) ** 16, rel=1e-6)
    assert len(twospin_fixed_points(0, 1, 0.1, 4)) == 1
    with pytest.raises(NotAntiferromagnetic):
        twospin_fixed_points(1, 1, 0.5, 5)


def test_twospin_hardcore_threshold():
    # lambda_c(4) = 27/16 separates one solution from three
    assert len(twospin_fixed_points(0, 1, 1.5, 4)) == 1
    assert len(twospin_fixed_points(0, 1, 2.0, 4)) == 3


def test_scaled_critical_degree_approaches_e():
    # observed: k * Delta_c(k) / 2^k climbs toward e rather than 1
    scaled = [critical_delta(k) * k / 2 ** k for k in (10, 16, 20)]
    assert all(2.6 < s < math.e for s in scaled)
    assert scaled[0] < scaled[1] < scaled[2]
