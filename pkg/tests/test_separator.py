import pytest

from tropa.errors import BudgetExceeded, HypothesisViolation
from tropa.formats import load_fixture
from tropa.separator import evaluate_sep, materialize, run_sep, sidecar
from tropa.terms import enumerate_terms, parse_term
from tropa.wta import MIN, decide_ambiguity, evaluate

from helpers import a_n, bi


def test_e1_values():
    biA = bi("E1max", "E1min")
    v = evaluate_sep(biA, a_n(3))
    assert 3 <= v <= 6


def test_corollary_instance():
    biA = bi("E1max", "E2min")
    assert [evaluate_sep(biA, a_n(n)) for n in range(8)] == list(range(8))


def test_leaf_run():
    run = run_sep(bi("E1max", "E1min"), parse_term("e()"))
    assert list(run.states) == [()] and run.total_shift == 0


def test_two_node_run():
    run = run_sep(bi("E1max", "E1min"), a_n(1))
    assert len(run.states) == 2 and run.root.t.height <= 1


def test_swapped_violation():
    with pytest.raises(HypothesisViolation) as info:
        evaluate_sep(bi("SWmax", "SWmin"), a_n(2))
    assert info.value.witness is not None


def test_materialize_agrees_and_is_unambiguous(tmp_path):
    biA = bi("E1max", "E1min")
    A = materialize(biA, 100)
    assert decide_ambiguity(A) is None
    for n in range(11):
        assert evaluate(A, a_n(n)) == evaluate_sep(biA, a_n(n))
        assert evaluate(A.with_mode(MIN), a_n(n)) == evaluate_sep(biA, a_n(n))
    assert sidecar(biA, A).startswith("{")


def test_materialize_b2_agrees():
    biA = bi("B2max", "B2min")
    A = materialize(biA, 1000)
    assert decide_ambiguity(A) is None
    for t in enumerate_terms(biA.alphabet, 3):
        assert evaluate(A, t) == evaluate_sep(biA, t)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        materialize(bi("E1max", "E1min"), 0)


def test_b2_bot_coincides():
    amax, amin = load_fixture("B2max"), load_fixture("B2min")
    biA = bi("B2max", "B2min")
    for t in enumerate_terms(biA.alphabet, 3):
        v = evaluate_sep(biA, t)
        lo, hi = evaluate(amax, t), evaluate(amin, t)
        assert (v is None) == (lo is None) == (hi is None)
        if v is not None:
            assert lo <= v <= hi
