import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incppm.ltl import (And, Atom, Eventually, Globally, Implies, LtlSyntaxError, Not, Or, Until,
                        evaluate, label_log, labels_to_csv, parse_formula)

from . import oracles
from .conftest import make_case, make_log

a, b, c = Atom("a"), Atom("b"), Atom("c")


@pytest.mark.parametrize("text, tree", [
    ('F("Accept Claim")', Eventually(Atom("Accept Claim"))),
    ('!"a" U "b"', Until(Not(a), b)),
    ('F("x") & F("y")', And(Eventually(Atom("x")), Eventually(Atom("y")))),
    ("a | b & c", Or(a, And(b, c))),
    ("a -> b -> c", Implies(a, Implies(b, c))),
    ("a U b U c", Until(a, Until(b, c))),
    ("a & b U c", And(a, Until(b, c))),
    ("G(a -> F(b))", Globally(Implies(a, Eventually(b)))),
    ("!F a", Not(Eventually(a))),
    ("a | b -> c", Implies(Or(a, b), c)),
])
def test_parse(text, tree):
    assert parse_formula(text) == tree


@pytest.mark.parametrize("text, pos", [("F(a", 3), ("a &", 3), ("a $ b", 2), ('"abc', 0), ("", 0), ("a b", 2)])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(LtlSyntaxError) as err:
        parse_formula(text)
    assert err.value.position == pos


@pytest.mark.parametrize("formula, trace, expected", [
    ("F(a)", ["b", "a", "c"], True),
    ("G(a -> F(b))", ["a", "c"], False),
    ("!a U b", ["c", "b", "a"], True),
    ("a U b", ["a", "a"], False),
    ("G(a)", ["a"], True),
])
def test_evaluate_examples(formula, trace, expected):
    f = parse_formula(formula)
    assert evaluate(f, trace) is expected
    assert oracles.ltl_holds(f, trace) is expected


def test_evaluate_rejects_empty_trace():
    with pytest.raises(ValueError):
        evaluate(a, [])


def test_atoms_match_after_trimming():
    assert evaluate(parse_formula('F(" x ")'), ["y", "x "])
    assert not evaluate(parse_formula("F(x)"), ["X"])


@st.composite
def formulas(draw, depth=4):
    return oracles.random_formula(random.Random(draw(st.integers(0, 2**32))), depth)


traces = st.lists(st.sampled_from("abc"), min_size=1, max_size=12)


@settings(max_examples=200)
@given(formulas(), traces)
def test_matches_brute_force(f, trace):
    assert evaluate(f, trace) == oracles.ltl_holds(f, trace)


@settings(max_examples=200)
@given(formulas(), traces)
def test_globally_eventually_duality(f, trace):
    assert evaluate(Globally(f), trace) == evaluate(Not(Eventually(Not(f))), trace)


@settings(max_examples=200)
@given(formulas(3), formulas(3), traces)
def test_until_expansion(f, g, trace):
    for i in range(len(trace)):
        rest = trace[i:]
        nxt = evaluate(Until(f, g), rest[1:]) if len(rest) > 1 else False
        assert evaluate(Until(f, g), rest) == (evaluate(g, rest) or (evaluate(f, rest) and nxt))


@settings(max_examples=200)
@given(formulas())
def test_str_round_trips(f):
    assert parse_formula(str(f)) == f


def test_label_log():
    log = make_log([make_case("c1", ["A", "B"]), make_case("c2", ["B"])])
    labels = label_log(log, parse_formula("F(A)"))
    assert labels == {"c1": True, "c2": False}
    assert labels_to_csv(labels) == b"case_id,label\nc1,true\nc2,false\n"
    assert set(label_log(log, parse_formula("F(B)")).values()) == {True}


def test_label_rejects_empty_case():
    from incppm.event_log import Case, EventLog
    with pytest.raises(ValueError):
        label_log(EventLog((Case("e", (), {}),), {}, {}), a)


def test_drift_log_phi41_is_mixed(small_drift_log):
    labels = label_log(small_drift_log.log, parse_formula('F("Accept Claim")'))
    assert 0 < sum(labels.values()) < len(labels)
