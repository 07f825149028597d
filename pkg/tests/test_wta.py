from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tropa.errors import AutomatonSyntaxError
from tropa.formats import format_wta, load_fixture, parse_wta
from tropa.terms import HOLE_TERM, enumerate_terms, parse_context, parse_term
from tropa.wta import (
    MAX,
    MIN,
    best_context,
    best_to_state,
    count_accepting_runs,
    decide_ambiguity,
    disjoint_union,
    evaluate,
    evaluate_by_runs,
    is_unambiguous,
)

from helpers import a_n


def test_fixture_values():
    assert evaluate(load_fixture("E1max"), parse_term("a(a(e()))")) == 2
    assert evaluate(load_fixture("E1min"), parse_term("a(a(e()))")) == 4


def test_best_to_state():
    E1 = load_fixture("E1max")
    assert best_to_state(E1, parse_term("e()")) == {"q": 0}
    assert best_to_state(E1, parse_term("a(e())")) == {"q": 1}


def test_context_tables():
    E1max, E1min = load_fixture("E1max"), load_fixture("E1min")
    assert best_context(E1max, parse_context("a(□)"))[("q", "q")] == 1
    assert best_context(E1min, parse_context("a(a(□))"))[("r", "r")] == 4
    AMB = load_fixture("AMB")
    ident = best_context(AMB, HOLE_TERM)
    assert ident[("u", "u")] == 0 and ident[("u", "v")] is None


def test_amb_runs():
    AMB = load_fixture("AMB")
    assert count_accepting_runs(AMB, parse_term("e()")) == 2
    assert count_accepting_runs(load_fixture("E1max"), parse_term("e()")) == 1
    assert decide_ambiguity(AMB) == parse_term("e()")
    assert decide_ambiguity(load_fixture("E1max")) is None


def test_two_finals_one_run_is_unambiguous():
    A = parse_wta("alphabet { e/0 }\nmode max\nstates p q\nfinal p : 0\nfinal q : 0\ntrans e() -> p : 0\n")
    assert is_unambiguous(A)


def test_disjoint_union_shape():
    biA = disjoint_union(load_fixture("E1max"), load_fixture("E1min"))
    assert set(biA.states) == {"q", "r"}
    assert biA.state_mode("q") == MAX and biA.state_mode("r") == MIN
    assert len(biA.transitions) == 4


def test_disjoint_union_renames_collisions():
    biA = disjoint_union(load_fixture("E1max"), load_fixture("E2min"))
    assert set(biA.states) == {"q@max", "q@min"}
    with pytest.raises(ValueError):
        disjoint_union(load_fixture("E1min"), load_fixture("E1max"))


def test_bot_when_no_run():
    A = parse_wta("alphabet { e/0, a/1 }\nmode min\nstates p\nfinal p : 0\ntrans a(p) -> p : 1\n")
    assert evaluate(A, a_n(3)) is None


def test_rational_weights_roundtrip():
    text = "alphabet { e/0, a/1 }\nmode max\nstates q0\nfinal q0 : -1/3\ntrans e() -> q0 : 1/2\ntrans a(q0) -> q0 : 5/4\n"
    A = parse_wta(text)
    assert evaluate(A, a_n(2)) == Fraction(1, 2) + Fraction(5, 2) - Fraction(1, 3)
    assert parse_wta(format_wta(A)).transitions == A.transitions


def test_duplicate_transition_rejected():
    with pytest.raises(AutomatonSyntaxError):
        parse_wta("alphabet { e/0 }\nmode max\nstates q\nfinal q : 0\ntrans e() -> q : 0\ntrans e() -> q : 1\n")


# Random small automata: dynamic programming must agree with run enumeration.
weights = st.integers(-3, 3)


@st.composite
def automata(draw, mode):
    states = ["p", "q"]
    lines = ["alphabet { e/0, a/1, b/2 }", f"mode {mode}", "states p q"]
    finals = [f"final {s} : {draw(weights)}" for s in states if draw(st.booleans())]
    lines.extend(finals or ["final p : 0"])
    for s in states:
        if draw(st.booleans()):
            lines.append(f"trans e() -> {s} : {draw(weights)}")
        for c in states:
            if draw(st.booleans()):
                lines.append(f"trans a({c}) -> {s} : {draw(weights)}")
            for d in states:
                if draw(st.integers(0, 3)) == 0:
                    lines.append(f"trans b({c},{d}) -> {s} : {draw(weights)}")
    return parse_wta("\n".join(lines) + "\n")


SMALL = list(enumerate_terms(load_fixture("B2max").alphabet, 2))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([MAX, MIN]).flatmap(automata))
def test_dp_agrees_with_runs(A):
    for t in SMALL:
        assert evaluate(A, t) == evaluate_by_runs(A, t)


@settings(max_examples=40, deadline=None)
@given(automata(MAX))
def test_ambiguity_decision_agrees_with_counting(A):
    witness = decide_ambiguity(A)
    counts = {t: count_accepting_runs(A, t) for t in SMALL}
    if witness is None:
        assert all(n <= 1 for n in counts.values())
    else:
        assert count_accepting_runs(A, witness) > 1
