from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from odegadget.bump import (BUMP, DEFAULT_MAX_ORDER, SHIPPED_S, BumpFunction, df_eval, f_eval)
from odegadget.exactreal import Dyadic

ZERO, ONE, HALF = Dyadic(0), Dyadic(1), Dyadic(1, -1)


def to_mpf(d):
    return mpmath.mpf(d.mantissa) * mpmath.mpf(2) ** d.exponent


def mp_f(t):
    A = lambda x: mpmath.exp(-1 / x) if x > 0 else mpmath.mpf(0)
    return A(t) / (A(t) + A(1 - t))


def test_endpoints_exact():
    assert f_eval(ZERO, 50) == 0
    assert f_eval(ONE, 50) == 1
    assert abs(f_eval(HALF, 50) - HALF) <= Dyadic(1, -50)


@pytest.mark.parametrize("m", range(1, DEFAULT_MAX_ORDER + 1))
def test_derivatives_vanish_at_ends(m):
    assert df_eval(m, ZERO, 40) == 0
    assert df_eval(m, ONE, 40) == 0


def test_order_cap():
    with pytest.raises(ValueError):
        df_eval(DEFAULT_MAX_ORDER + 1, HALF, 10)


def test_outside_unit_interval():
    with pytest.raises(ValueError):
        f_eval(Dyadic(3, -1), 10)


def test_derivative_at_half_matches_central_difference():
    h = Dyadic(1, -12)
    n = 60
    fd = (f_eval(HALF + h, n) - f_eval(HALF - h, n)).shift(11)
    d1 = df_eval(1, HALF, n)
    # |fd - f'| <= h^2/6 max|f'''| + 2^{1-n}/h
    env = Dyadic(1, -24 + SHIPPED_S[3]) + Dyadic(1, 1 - n + 12)
    assert abs(fd - d1) <= env


@pytest.mark.parametrize("m", range(0, 5))
def test_against_mpmath(m):
    mpmath.mp.prec = 200
    for k in range(1, 32, 3):
        t = Dyadic(k, -5)
        got = to_mpf(df_eval(m, t, 50))
        want = mpmath.diff(mp_f, mpmath.mpf(k) / 32, m)
        assert abs(got - want) <= mpmath.mpf(2) ** -48


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**16))
def test_symmetry(k):
    t = Dyadic(k, -16)
    for n in (10, 40):
        assert abs(f_eval(t, n) + f_eval(ONE - t, n) - 1) <= Dyadic(1, 1 - n)


def test_monotone_at_resolution():
    # 2^10 pairs t1 < t2 = t1 + 2^-8; the precision must resolve e^(-1/t)
    for k in range(0, (1 << 10) - 3):
        lo, hi = Dyadic(k, -10), Dyadic(k + 4, -10)
        edge = min(k, 1020 - k) or 1
        n = 16 + (3 * 1024) // (2 * edge)
        assert f_eval(hi, n) > f_eval(lo, n), (lo, hi)


@pytest.mark.parametrize("m", range(1, 5))
def test_derivative_consistency(m):
    h = Dyadic(1, -10)
    n = 50
    for k in range(1, 16):
        t = Dyadic(k, -4)
        fd = (df_eval(m - 1, t + h, n) - df_eval(m - 1, t - h, n)).shift(9)
        env = Dyadic(1, -20 + SHIPPED_S[m + 2] - 2) + Dyadic(1, 1 - n + 10)
        assert abs(fd - df_eval(m, t, n)) <= env


def test_shipped_table_shape():
    assert SHIPPED_S[0] == 0
    assert SHIPPED_S[1] >= 0
    assert list(SHIPPED_S) == sorted(SHIPPED_S)
    assert [BUMP.s(m) for m in range(len(SHIPPED_S))] == list(SHIPPED_S)


@pytest.mark.parametrize("m", range(1, 5))
def test_recertify_low_orders(m):
    fresh = BumpFunction()
    assert fresh.certify_bound(m) == SHIPPED_S[m]


@pytest.mark.parametrize("m", range(1, 5))
def test_dense_sampling_under_bound(m):
    assert BUMP.sample_max(m, points=1 << 10, n=30) <= Dyadic(1, SHIPPED_S[m])


def test_cell_bound_encloses_samples():
    t0, t1 = Dyadic(3, -4), Dyadic(1, -2)
    b = BUMP.cell_bound(3, t0, t1)
    for k in range(17):
        t = t0 + (t1 - t0) * Dyadic(k, -4)
        assert abs(df_eval(3, t, 40)) <= b
