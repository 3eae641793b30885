from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import FIXTURES, load
from oracles import all_lassos
from quantsafe.core import (Automaton, LassoWord, ParseError, TotalityError, ValidationError, ValueFunction,
                            constant_automaton, decimal_string, dsum, format_rational, isomorphic,
                            parse_automaton, rational, reroot, serialize_automaton, to_dot)
from quantsafe.evaluate import evaluate_lasso
from quantsafe.generate import random_automaton

VALFNS = ["inf", "sup", "liminf", "limsup", "liminfavg", "limsupavg", "dsum"]


def test_parse_fig1a(fig1a):
    text = (FIXTURES / "fig1a.qa").read_text()
    assert sum("-->" in line for line in text.splitlines()) == 13
    assert fig1a.n_states == 4
    assert fig1a.valfn.tag == "limsup"
    # the sink's "*" line expands to one transition per letter
    assert len(fig1a.transitions) == 16
    assert fig1a.deterministic


def test_parse_single_state_inf():
    a = parse_automaton("valfn: inf\nalphabet: a\ninitial: q\nq -- a:0 --> q\n")
    assert a.n_states == 1 and a.valfn.tag == "inf"


def test_missing_transition_names_state_and_letter():
    with pytest.raises(TotalityError) as exc:
        parse_automaton("valfn: inf\nalphabet: a b\ninitial: q\nq -- a:0 --> q\n")
    assert exc.value.state == "q" and exc.value.letter == "b"


@pytest.mark.parametrize("text,line", [
    ("valfn: limsup\nalphabet: a\ninitial: q\nq -- a:x --> q\n", 4),
    ("valfn: nope\nalphabet: a\ninitial: q\nq -- a:0 --> q\n", 1),
    ("valfn: dsum\nalphabet: a\ninitial: q\nq -- a:0 --> q\n", 1),
    ("valfn: dsum\ndiscount: 2\nalphabet: a\ninitial: q\nq -- a:0 --> q\n", 2),
    ("valfn: inf\nalphabet: a\ninitial: q\nq -- c:0 --> q\n", 4),
    ("valfn: inf\nalphabet: a\ninitial: q\nq -- a:0 -> q\n", 4),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_automaton(text)
    assert exc.value.line == line


def test_float_weights_rejected():
    with pytest.raises(TypeError):
        rational(0.5)


def test_hash_letter_survives_comments():
    a = parse_automaton("# gadget-like\nvalfn: sup\nalphabet: a #\ninitial: q  # start\n"
                        "q -- a:0 --> q\nq -- #:1 --> q\n")
    assert a.alphabet == ("a", "#")
    assert evaluate_lasso(a, LassoWord([], ["#"])) == 1


def test_round_trip_fig1a(fig1a):
    assert isomorphic(parse_automaton(serialize_automaton(fig1a)), fig1a)


def test_round_trip_keeps_discount(dsum_ab):
    b = parse_automaton(serialize_automaton(dsum_ab))
    assert b.valfn.discount == Fraction(1, 2)


def test_round_trip_keeps_parallel_transitions():
    a = Automaton.build("a", [("q", "a", 0, "q"), ("q", "a", 1, "q")], "limsup", initial="q")
    b = parse_automaton(serialize_automaton(a))
    assert sorted(t.weight for t in b.transitions) == [0, 1]


def test_reroot_fig1a_sink_is_zero(fig1a):
    r = reroot(fig1a, "p3")
    assert all(evaluate_lasso(r, w) == 0 for w in all_lassos(fig1a.alphabet, 1, 2))


def test_reroot_initial_is_identity(fig1a):
    assert isomorphic(reroot(fig1a, fig1a.initial), fig1a)


def test_reroot_fig2_q2_is_zero(fig2):
    r = reroot(fig2, "q2")
    assert all(evaluate_lasso(r, w) == 0 for w in all_lassos(fig2.alphabet, 2, 2))


def test_constant_automaton_dsum_value():
    a = constant_automaton("ab", 3, dsum("1/3"))
    assert evaluate_lasso(a, LassoWord("a", "b")) == 3


def test_lasso_canonical():
    assert LassoWord("ab", "abab").canonical() == LassoWord("", "ab")
    assert LassoWord("b", "ab").canonical() == LassoWord("", "ba")
    with pytest.raises(ValidationError):
        LassoWord("a", "")


def test_lasso_json_round_trip():
    w = LassoWord(["err"], ["on"])
    assert LassoWord.from_json(w.to_json()) == w


def test_valfn_validation():
    with pytest.raises(ValidationError):
        ValueFunction("dsum", Fraction(1))
    with pytest.raises(ValidationError):
        ValueFunction("sup", Fraction(1, 2))


def test_rational_rendering():
    assert format_rational(Fraction(6, 4)) == "3/2"
    assert format_rational(Fraction(2)) == "2"
    assert decimal_string(Fraction(2, 3), 3) == "0.667"


def test_dot_export(fig2):
    assert to_dot(fig2).startswith("digraph")


fractions = st.fractions(max_denominator=50).filter(lambda x: abs(x) < 10 ** 6)


@given(fractions, fractions)
def test_rational_field_laws(a, b):
    assert (a + b) - b == a
    if a != 0:
        assert a * (1 / a) == 1


@given(st.integers(0, 10 ** 6), st.sampled_from(VALFNS), st.booleans())
def test_round_trip_generated(seed, valfn, det):
    a = random_automaton(seed, 3, ("a", "b"), (0, 1, 2, "1/2"), valfn, det)
    b = parse_automaton(serialize_automaton(a))
    assert isomorphic(a, b)


@given(st.integers(0, 10 ** 6))
def test_removing_last_transition_breaks_totality(seed):
    a = random_automaton(seed, 3, ("a", "b"), (0, 1), "limsup", True)
    drop = a.transitions[seed % len(a.transitions)]
    rest = tuple(t for t in a.transitions if t is not drop)
    with pytest.raises(TotalityError):
        Automaton(a.alphabet, a.state_names, a.initial, rest, a.valfn)


def test_fixtures_parse():
    for name in ("fig1a.qa", "fig1b.qa", "fig1c.qa", "fig2.qa", "dsum.qa", "limavg.qa"):
        load(name)
