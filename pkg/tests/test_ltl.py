# -*- coding: utf-8 -*-

# Third party import
import pytest
from hypothesis import given, settings, strategies as st

# Package import
from rpdsmc.ltl import (TrueConst, Atom, Not, And, Next, Until, parse_ltl, eval_word, to_buchi,
                        eventually, always, lor, atoms)
from rpdsmc.utils import LtlSyntaxError


a, b, c = Atom("a"), Atom("b"), Atom("c")


@pytest.mark.parametrize("text,expected", [
    ("a U b U c", Until(a, Until(b, c))),
    ("a & b & c", And(And(a, b), c)),
    ("a | b | c", lor(lor(a, b), c)),
    ("!a & b", And(Not(a), b)),
    ("a | b & c", lor(a, And(b, c))),
    ("X a U b", Until(Next(a), b)),
    ("F G a", eventually(always(a))),
    ("(a U b) U c", Until(Until(a, b), c)),
    ("tt", TrueConst()),
    ("!!a", Not(Not(a))),
])
def test_parse_precedence(text, expected):
    assert parse_ltl(text) == expected


def test_atoms():
    assert atoms(parse_ltl("G !in_p1 & F (a U b-c)")) == {"in_p1", "a", "b-c"}


@pytest.mark.parametrize("text,position", [
    ("", 0),
    ("a &", 3),
    ("a b", 2),
    ("(a U b", 6),
    ("a # b", 2),
    ("U a", 0),
    ("a & )", 4),
])
def test_syntax_error_positions(text, position):
    with pytest.raises(LtlSyntaxError) as info:
        parse_ltl(text)
    assert info.value.position == position


def formulas(depth):
    leaves = st.sampled_from([TrueConst(), a, b])
    return st.recursive(leaves, lambda children: st.one_of(
        st.builds(Not, children), st.builds(Next, children),
        st.builds(And, children, children), st.builds(Until, children, children)),
        max_leaves=depth)


@settings(max_examples=150, deadline=None)
@given(formulas(8))
def test_printed_formula_parses_back(f):
    assert parse_ltl(str(f)) == f


def test_eval_word_goldens():
    stem, cycle = [{"a"}, {"a"}], [{"b"}, set()]
    assert eval_word(parse_ltl("a U b"), stem, cycle)
    assert eval_word(parse_ltl("G F b"), stem, cycle)
    assert not eval_word(parse_ltl("F G b"), stem, cycle)
    assert eval_word(parse_ltl("X a & X X b"), stem, cycle)
    assert not eval_word(parse_ltl("G (a | b)"), stem, cycle)
    assert eval_word(parse_ltl("G (!b | X !b)"), stem, cycle)
    assert eval_word(parse_ltl("F G !a"), [], [set()])
    with pytest.raises(ValueError):
        eval_word(a, stem, [])


letters = st.lists(st.sampled_from([frozenset(), frozenset("a"), frozenset("b"),
                                    frozenset("ab")]), max_size=3)


@settings(max_examples=1000, deadline=None)
@given(formulas(6), letters, letters.filter(lambda cycle: len(cycle) > 0))
def test_buchi_agrees_with_lasso_semantics(f, stem, cycle):
    automaton = to_buchi(f, alphabet=("a", "b"))
    assert automaton.accepts_lasso(stem, cycle) == eval_word(f, stem, cycle)


def test_buchi_alphabet_must_cover_atoms():
    with pytest.raises(ValueError):
        to_buchi(And(a, c), alphabet=("a", "b"))
    assert to_buchi(a).atoms == ("a", )
