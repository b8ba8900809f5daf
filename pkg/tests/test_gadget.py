import pytest
from hypothesis import given, settings, strategies as st

from conftest import CONTRADICTION, SMOKE, TAUTOLOGY2
from odegadget.bump import BUMP, df_eval
from odegadget.diffeq import DifferenceEquation, build_gadget, normalize
from odegadget.exactreal import Dyadic
from odegadget.formula import parse_instance, truth_value
from odegadget.gadget import (Gadget, GadgetParams, ParameterError, Polynomial, gadget_for,
                              make_params)
from odegadget.gadget.params import capped_s, positioning

ZERO, ONE = Dyadic(0), Dyadic(1)
ID = Polynomial.identity()


@pytest.fixture(scope="module")
def smoke():
    return gadget_for(parse_instance(SMOKE), 1)


@pytest.fixture(scope="module")
def taut2():
    return gadget_for(parse_instance(TAUTOLOGY2), 2)


# ----------------------------------------------------------------- params

def test_polynomial():
    p = Polynomial.parse("2x+2")
    assert p(0) == 2 and p(5) == 12
    q = Polynomial.parse("x^2 + 3")
    assert q(4) == 19
    assert (p + q)(1) == 8
    assert (p * q)(2) == 6 * 7
    assert p.compose(q)(1) == 10
    with pytest.raises(ValueError):
        Polynomial((-1,))


def test_linear_positioning_for_k1(smoke):
    p = smoke.params
    assert p.d == tuple(range(p.p + 1))
    assert p.sigma == p.p


def test_exponential_positioning():
    assert positioning(2, 2) == (1, 3, 9)
    d = positioning(3, 3)
    assert d == (1, 4, 16, 64)
    with pytest.raises(ParameterError):
        positioning(2, 40)


def test_param_formulas(main_corpus):
    for e in main_corpus.entries:
        gad = gadget_for(e.instance, e.k, e.gamma)
        p = gad.params
        size = e.instance.padded_length
        assert p.size == size and p.r == size
        # B recomputed from the formula
        assert p.B == 2 ** (p.gamma(size) + size + BUMP.s(p.k) + p.k + 3)
        assert p.rho == p.sigma * (p.gamma(size) + size + BUMP.s(p.k) + p.k + 3)
        for i in range(4):
            assert p.mu(i) == (i + 1) * p.q + capped_s(i + 1)
        if p.k >= 2:
            assert all(p.d[i] == (p.k + 1) ** i for i in range(p.p))
            assert p.d[p.p] >= (p.k + 1) ** p.p


def test_make_params_errors():
    ng = normalize(build_gadget(parse_instance(SMOKE)))
    with pytest.raises(ParameterError):
        make_params(ng, 0, ID)
    with pytest.raises(ParameterError):
        make_params(ng, 1, ID, mode="fast")
    with pytest.raises(ParameterError):
        make_params(ng, 1, ID, mode="toy")


def test_toy_mode_is_smaller():
    inst = parse_instance(SMOKE)
    faithful = Gadget.from_instance(inst, 1)
    toy = Gadget.from_instance(inst, 1, mode="toy")
    assert toy.params.log2B < faithful.params.log2B
    assert toy.final_value() == Dyadic(truth_value(inst), -toy.params.rho)


# ---------------------------------------------------------- decomposition

def test_decomposition_exact(taut2):
    p = taut2.params
    for t in [Dyadic(5, -7), Dyadic(77, -9), Dyadic(1, -1)]:
        for frac in [Dyadic(0), Dyadic(3, -3), Dyadic(-1, -3), Dyadic(5, -3)]:
            T, _ = taut2.split_t(t)
            j = taut2.active_row(T)
            y = (Dyadic(3) + frac).shift(-p.digit_exp(j))
            dec = taut2.decompose(t, y)
            assert (Dyadic(dec.T) + dec.theta).shift(-p.q) == t
            assert (Dyadic(dec.Y) + dec.eta).shift(-p.digit_exp(dec.j)) == y
            assert Dyadic(-1, -2) <= dec.eta < Dyadic(3, -2)
            assert 0 <= dec.theta < 1


def test_split_t_range(smoke):
    with pytest.raises(ValueError):
        smoke.split_t(Dyadic(3, -1))


# ----------------------------------------------------------------- g_tilde

def test_g_tilde_on_grid_is_zero(taut2):
    q = taut2.params.q
    for T in range(0, taut2.width, 7):
        for Y in range(3):
            assert taut2.g_tilde(Y, Dyadic(T, -q), 200) == 0


def test_g_tilde_recomposition(taut2):
    p = taut2.params
    checked = 0
    for T in range(taut2.width):
        j = taut2.active_row(T)
        for Y in range(3):
            G = taut2.G(T, Y)
            theta = Dyadic(13, -5)
            t = (Dyadic(T) + theta).shift(-p.q)
            n = 64 + p.digit_exp(j + 1) - p.q
            got = taut2.g_tilde(Y, t, n)
            if G == 0:
                assert got == 0
                continue
            # 2^q Df(theta) / B^{d(j+1)} * G, rebuilt from df_eval
            want = df_eval(1, theta, n + 4 - p.q + p.digit_exp(j + 1)).shift(
                p.q - p.digit_exp(j + 1)) * G
            assert abs(got - want) <= Dyadic(1, 1 - n)
            checked += 1
    assert checked > 0


# ---------------------------------------------------------------- g_u, h_u

def test_g_u_vanishes_at_t0(taut2):
    for y in [ZERO, Dyadic(1, -3), Dyadic(-1, -1), Dyadic(1)]:
        assert taut2.g_u(ZERO, y, 300) == 0


def test_zero_gadget():
    eq = DifferenceEquation(2, 8, 16, lambda i, T, Y: 0)
    ng = normalize(eq)
    gad = Gadget(ng, make_params(ng, 1, ID, size=4))
    for k in range(1, 32, 5):
        t = Dyadic(k, -5)
        assert gad.g_u(t, Dyadic(1, -3), 100) == 0
        assert gad.h_u(t, 100) == 0


def test_h_u_examples(main_corpus):
    for e in main_corpus.entries[:20]:
        gad = gadget_for(e.instance, e.k, e.gamma)
        assert gad.h_u(ZERO, 10) == 0
        assert gad.h_u(ONE, 10) == Dyadic(truth_value(e.instance), -gad.params.rho)


def test_grid_identity(taut2):
    p = taut2.params
    sol = taut2.solution
    for T in range(taut2.width + 1):
        want = sum((Dyadic(sol(i, T), -p.digit_exp(i)) for i in range(p.p + 1)), ZERO)
        assert taut2.h_u(Dyadic(T, -p.q), 8) == want


def test_h_u_bounded(taut2):
    for k in range(0, 1 << 8, 3):
        assert abs(taut2.h_u(Dyadic(k, -8), 400)) <= 1


def test_deriv_dead_zone(taut2):
    p = taut2.params
    for T in range(1, taut2.width, 5):
        j = taut2.active_row(T)
        t = (Dyadic(T) + Dyadic(1, -2)).shift(-p.q)
        for Y in (0, 1, 2):
            y = Dyadic(Y).shift(-p.digit_exp(j))          # eta = 0
            for i in range(3):
                assert taut2.deriv(i, 1, t, y, 500) == 0
                assert taut2.deriv(i, 2, t, y, 500) == 0


def test_deriv_on_grid_zero(taut2):
    p = taut2.params
    for T in range(0, taut2.width, 3):
        t = Dyadic(T, -p.q)
        for y in (ZERO, Dyadic(3, -2).shift(-p.digit_exp(taut2.active_row(T)))):
            assert taut2.deriv(1, 0, t, y, 600) == 0


def test_order_caps(taut2):
    with pytest.raises(ValueError):
        taut2.deriv(0, 3, Dyadic(1, -1), ZERO, 10)
    with pytest.raises(ValueError):
        taut2.deriv(8, 0, Dyadic(1, -1), ZERO, 10)


def test_deriv_matches_finite_difference(taut2):
    """``D^(1,0) g_u`` against a central difference of ``g_u`` in ``t``."""
    p = taut2.params
    checked = 0
    for T in range(taut2.width):
        j = taut2.active_row(T)
        y = taut2.solution(j, T)
        if taut2.G(T, y) == 0:
            continue
        yv = Dyadic(y).shift(-p.digit_exp(j))
        t = (Dyadic(T) + Dyadic(5, -4)).shift(-p.q)
        h = Dyadic(1, -14 - p.q)
        scale = p.digit_exp(j + 1) - 2 * p.q
        n = 80 + scale
        fd = (taut2.g_u(t + h, yv, n + 20) - taut2.g_u(t - h, yv, n + 20)).shift(13 + p.q)
        d = taut2.deriv(1, 0, t, yv, n)
        # h^2/6 max|D_t^3 g|, where D_t^3 g = 2^{4q} D^4 f / B^{d(j+1)}; plus rounding
        env = Dyadic(1, -28 - 2 * p.q + 4 * p.q + BUMP.s(4) - 2 - p.digit_exp(j + 1)) \
            + Dyadic(1, -n + 2)
        assert abs(fd - d) <= env
        checked += 1
    assert checked >= 4


def test_memo_cache():
    inst = parse_instance(CONTRADICTION)
    assert gadget_for(inst, 1) is gadget_for(inst, 1)
    assert gadget_for(inst, 1) is not gadget_for(inst, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, (1 << 12) - 1), st.integers(-(1 << 10), 1 << 10))
def test_seam_continuity(tk, yk):
    """``g_u`` is continuous across ``eta = 1/4`` to within the Lipschitz bound."""
    gad = gadget_for(parse_instance(TAUTOLOGY2), 2)
    p = gad.params
    t = Dyadic(tk, -12)
    T, _ = gad.split_t(t)
    j = gad.active_row(T)
    base = Dyadic(abs(yk) % 3)
    eps = Dyadic(1, -20)
    lo = (base + Dyadic(1, -2) - eps).shift(-p.digit_exp(j))
    hi = (base + Dyadic(1, -2) + eps).shift(-p.digit_exp(j))
    n = 64 + p.digit_exp(j + 1) - p.q
    gap = abs(gad.g_u(t, hi, n) - gad.g_u(t, lo, n))
    # the y-derivative is bounded by 2^{mu(0) - gamma}; distance is 2 eps in y
    bound = Dyadic(1, gad.bound_exp(0) + 1) * (hi - lo) + Dyadic(1, 1 - n)
    assert gap <= bound
