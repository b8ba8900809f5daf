import itertools

import pytest
from hypothesis import given, settings, strategies as st

import oracle
from conftest import SMOKE
from odegadget.formula import (And, CapacityError, FormulaSyntaxError, InstanceError, Not, Or,
                               Var, count_models, eval_formula, eval_phi_i, format_formula,
                               instance_from_parts, parse_formula, parse_instance, truth_value)


def test_minimal_instance():
    inst = parse_instance(SMOKE)
    assert inst.n == 1
    assert inst.block_sizes == (1,)
    assert inst.thresholds == (1,)
    assert inst.formula == Var("a")


def test_grammar_reading():
    phi = parse_formula("(a & b) | !c")
    assert phi == Or(And(Var("a"), Var("b")), Not(Var("c")))


def test_precedence():
    assert parse_formula("a | b & !c") == Or(Var("a"), And(Var("b"), Not(Var("c"))))


def test_unclosed_parenthesis():
    text = "blocks 1\nblock 1 vars a threshold 1\nformula (a &\n"
    with pytest.raises(FormulaSyntaxError) as err:
        parse_instance(text)
    assert err.value.line == 3


@pytest.mark.parametrize("text", [
    "blocks 1\nblock 1 vars a a threshold 1\nformula a\n",
    "blocks 1\nblock 1 vars a threshold 1\nformula b\n",
    "blocks 1\nblock 1 vars a threshold -1\nformula a\n",
    "blocks 1\nblock 1 vars a threshold x\nformula a\n",
])
def test_bad_instances(text):
    with pytest.raises((FormulaSyntaxError, InstanceError)):
        parse_instance(text)


def test_round_trip(main_corpus_dir):
    for path in sorted(main_corpus_dir.glob("*.cqbf")):
        inst = parse_instance(path.read_text())
        again = parse_instance(inst.serialize())
        assert again == inst
        assert again.serialize() == inst.serialize()


def test_eval_formula():
    phi = parse_formula("(a & b) | !c")
    assert eval_formula(Var("a"), {"a": 1}) == 1
    assert eval_formula(phi, {"a": 0, "b": 0, "c": 0}) == 1
    assert eval_formula(phi, {"a": 0, "b": 1, "c": 1}) == 0


def test_eval_missing_variable():
    with pytest.raises((KeyError, ValueError)):
        eval_formula(parse_formula("a & b"), {"a": 1})


def test_count_models():
    assert count_models(Var("a"), ["a"], {}) == 1
    assert count_models(parse_formula("a | b"), ["a", "b"], {}) == 3
    assert count_models(parse_formula("a & !a"), ["a"], {}) == 0


def test_count_models_cap():
    names = [f"v{i}" for i in range(5)]
    with pytest.raises(CapacityError):
        count_models(Var("v0"), names, {}, cap=4)


def test_eval_phi_i():
    assert eval_phi_i(parse_instance(SMOKE), 1, {}) == 1
    xor = instance_from_parts("(a & !b) | (!a & b)", [["a"], ["b"]], [1, 2])
    assert eval_phi_i(xor, 2, {}) == 1
    unreachable = instance_from_parts("a | b", [["a", "b"]], [5])
    assert truth_value(unreachable) == 0


def test_level_zero_is_formula():
    inst = instance_from_parts("(a & b) | !c", [["a", "b"], ["c"]], [1, 1])
    for bits in itertools.product((0, 1), repeat=3):
        a = dict(zip("abc", bits))
        assert eval_phi_i(inst, 0, a) == eval_formula(inst.formula, a)


def test_corpus_matches_truth_table(main_corpus_dir):
    for path in sorted(main_corpus_dir.glob("*.cqbf")):
        text = path.read_text()
        assert truth_value(parse_instance(text)) == oracle.truth(text), path.name


# ---------------------------------------------------------------- properties

NAMES = ["a", "b", "c", "d"]


def formulas(names):
    leaves = st.sampled_from(names).map(Var)
    return st.recursive(leaves, lambda ch: st.one_of(
        ch.map(Not), st.tuples(ch, ch).map(lambda p: And(*p)),
        st.tuples(ch, ch).map(lambda p: Or(*p))), max_leaves=8)


@st.composite
def instances(draw):
    names = draw(st.permutations(NAMES))
    cut = sorted(draw(st.lists(st.integers(1, 3), min_size=0, max_size=2, unique=True)))
    bounds = [0] + cut + [4]
    blocks = [names[a:b] for a, b in zip(bounds, bounds[1:]) if b > a]
    phi = draw(formulas(NAMES))
    ths = [draw(st.integers(0, (1 << len(b)) + 1)) for b in blocks]
    return instance_from_parts(format_formula(phi), blocks, ths)


@settings(max_examples=150, deadline=None)
@given(instances())
def test_truth_value_matches_oracle(inst):
    assert truth_value(inst) == oracle.truth(inst.serialize())


@settings(max_examples=100, deadline=None)
@given(formulas(NAMES), formulas(NAMES))
def test_weakening_is_monotone(phi, psi):
    block = NAMES
    assert count_models(Or(phi, psi), block, {}) >= count_models(phi, block, {})


@settings(max_examples=100, deadline=None)
@given(formulas(NAMES))
def test_format_parse_round_trip(phi):
    assert parse_formula(format_formula(phi)) == phi
