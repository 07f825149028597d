from tropa.formats import load_fixture, parse_wta
from tropa.reachprod import (
    annotate,
    bottom_up_R,
    families,
    pro_automaton,
    prod,
    reach,
    top_down_P,
)
from tropa.terms import HOLE_TERM, enumerate_contexts, enumerate_terms, parse_context, parse_term
from tropa.wta import disjoint_union

from helpers import bi

QR = frozenset({"q", "r"})


def test_reach_and_prod_e1():
    biA = bi("E1max", "E1min")
    assert reach(biA, parse_term("e()")) == QR
    assert reach(biA, parse_term("a(e())")) == QR
    assert prod(biA, HOLE_TERM) == QR
    assert prod(biA, parse_context("a(□)")) == QR
    assert bottom_up_R(biA, "a", [QR]) == QR
    assert top_down_P(biA, "a", [QR], QR, 0) == QR


def test_reach_without_leaf_transition():
    amin = parse_wta("alphabet { e/0, a/1 }\nmode min\nstates r\nfinal r : 0\ntrans a(r) -> r : 2\n")
    biA = disjoint_union(load_fixture("E1max"), amin)
    assert reach(biA, parse_term("e()")) == {"q"}


def test_empty_final_set_gives_empty_prod():
    amax = parse_wta("alphabet { e/0, a/1 }\nmode max\nstates q\ntrans e() -> q : 0\n")
    amin = parse_wta("alphabet { e/0, a/1 }\nmode min\nstates r\ntrans e() -> r : 0\n")
    assert prod(disjoint_union(amax, amin), HOLE_TERM) == frozenset()


def test_families_e1():
    fam = families(bi("E1max", "E1min"))
    assert fam.reachable == {QR} and fam.productive == {QR}
    assert fam.reach_witness[QR] == parse_term("e()")


def test_families_match_enumeration_b2():
    biA = bi("B2max", "B2min")
    fam = families(biA)
    assert {reach(biA, t) for t in enumerate_terms(biA.alphabet, 3)} == fam.reachable
    assert {prod(biA, c) for c in enumerate_contexts(biA.alphabet, 2)} == fam.productive
    for R, t in fam.reach_witness.items():
        assert reach(biA, t) == R
    for P, c in fam.prod_witness.items():
        assert prod(biA, c) == P


def test_annotate():
    biA = bi("E1max", "E1min")
    ann = annotate(biA, parse_term("a(e())"), QR)
    assert ann[()] == (QR, QR) and ann[(0,)] == (QR, QR)
    assert list(annotate(biA, parse_term("e()"), QR)) == [()]


def test_pro_automaton_weights_are_zero():
    pro = pro_automaton(bi("B2max", "B2min"))
    assert set(pro.transitions.values()) == {0}
