import pytest

from odegadget.exactreal import Dyadic, RealName, name_of
from odegadget.formula import truth_value
from odegadget.gadget import (FinalValueParams, HorizonError, decode_tally, final_value_name,
                              tally_instance)
from odegadget.gadget.finalvalue import series_value

LANGS = {
    "empty": lambda n: False,
    "first": lambda n: n == 0,
    "alternating": lambda n: n % 2 == 0,
    "primes": lambda n: n in (2, 3, 5, 7),
}


@pytest.fixture(scope="module")
def params():
    return FinalValueParams.build(1, horizon=8)


def test_exponents_strictly_increasing(params):
    e = params.exponents()
    assert len(e) == 8
    # at least two clear bits between consecutive terms
    assert all(b >= a + 2 for a, b in zip(e, e[1:]))


def test_gamma_formula(params):
    for x in range(6):
        assert params.lam(x) == x + 1
        assert params.gamma(x) >= x * params.lam(x)


def test_tally_instances():
    assert truth_value(tally_instance(3, True)) == 1
    assert truth_value(tally_instance(3, False)) == 0
    assert tally_instance(3, True).padded_length == tally_instance(3, False).padded_length


def test_empty_language(params):
    name = final_value_name(LANGS["empty"], params)
    assert name.query(3000) == 0
    assert [decode_tally(name, n, params) for n in range(8)] == [0] * 8


def test_single_term(params):
    name = final_value_name(LANGS["first"], params)
    e0 = params.gamma(0) + params.rho_bar(1)
    assert e0 == params.exponent(0)
    assert series_value(LANGS["first"], params) == Dyadic(1, -e0)
    assert decode_tally(name, 0, params) == 1


@pytest.mark.parametrize("lang", sorted(LANGS))
def test_round_trip(params, lang):
    name = final_value_name(LANGS[lang], params)
    assert [decode_tally(name, n, params) for n in range(8)] == \
        [int(LANGS[lang](n)) for n in range(8)]


def test_decode_tolerates_ceiling(params):
    """Any valid name works, including one that rounds up everywhere."""
    value = series_value(LANGS["primes"], params)

    def up(n):
        return Dyadic(value.scaled_ceil(n), -n)

    name = RealName(up)
    assert [decode_tally(name, n, params) for n in range(8)] == [0, 0, 1, 1, 0, 1, 0, 1]


def test_horizon(params):
    name = final_value_name(LANGS["empty"], params)
    with pytest.raises(HorizonError):
        decode_tally(name, 8, params)


def test_reduction_must_keep_length():
    from odegadget.formula import parse_instance

    def bad(n, member):
        return parse_instance("blocks 1\nblock 1 vars a threshold 1\nformula a\n" if member
                              else "blocks 1\nblock 1 vars abc threshold 1\nformula abc\n")
    with pytest.raises(ValueError):
        FinalValueParams.build(1, horizon=2, reduction=bad)
