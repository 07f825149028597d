import json
from fractions import Fraction

import pytest

from tropa.errors import HypothesisViolation
from tropa.refine import (
    ShiftCertificate,
    check_certificate,
    check_refinement,
    check_refinement_by_runs,
    congruence_compose,
    emitted_certificates,
    k_bound,
    pumping_shift,
    reduce_once,
    reduction_certificate,
    refinement_transitive_compose,
    shift_reduce,
)
from tropa.terms import enumerate_terms, parse_context, parse_term

from helpers import a_n, bi

QR = frozenset({"q", "r"})


@pytest.fixture
def e1():
    return bi("E1max", "E1min")


def test_check_refinement_examples(e1):
    s, t = a_n(2), a_n(1)
    assert check_refinement(e1, s, t, QR, 1)
    assert check_refinement_by_runs(e1, s, t, QR, 1)
    assert not check_refinement(e1, s, t, QR, 5)


def test_transitive_compose(e1):
    first = ShiftCertificate(a_n(3), a_n(2), QR, Fraction(1))
    second = ShiftCertificate(a_n(2), a_n(1), QR, Fraction(1))
    both = refinement_transitive_compose(first, second)
    assert (both.s, both.t, both.x) == (a_n(3), a_n(1), 2)
    assert check_certificate(e1, both)
    with pytest.raises(ValueError):
        refinement_transitive_compose(second, first)


def test_congruence_compose(e1):
    child = ShiftCertificate(a_n(1), a_n(0), QR, Fraction(1))
    lifted = congruence_compose(e1, "a", [child], QR)
    assert (lifted.s, lifted.t, lifted.x) == (a_n(2), a_n(1), 1)
    assert check_certificate(e1, lifted)


def test_pumping_shift(e1):
    assert pumping_shift(e1, parse_context("a(□)"), QR, QR) == 1


def test_pumping_shift_swapped_raises():
    sw = bi("SWmax", "SWmin")
    with pytest.raises(HypothesisViolation) as info:
        pumping_shift(sw, parse_context("a(□)"), sw.final_set, sw.final_set)
    assert info.value.max_cycle_weight == 2 and info.value.min_cycle_weight == 1
    assert info.value.witness is not None


def test_reduce_once_example(e1):
    red = reduce_once(e1, a_n(2), QR)
    assert (red.t, red.x) == (a_n(1), 1)
    assert check_refinement(e1, a_n(2), red.t, QR, red.x)


def test_k_bound_values(e1):
    assert k_bound(bi("E1max", "E1min")) == 64
    assert k_bound(bi("B2max", "B2min")) == 16 ** 4


def test_shift_reduce_examples(e1):
    # Leaves are admissible cut points, so a^5(e) goes all the way down.
    t, x = shift_reduce(e1, a_n(5), QR)
    assert (t, x) == (a_n(0), 5)
    assert check_refinement(e1, a_n(5), t, QR, x)
    assert shift_reduce(e1, t, QR) == (t, 0)


def test_shift_reduce_swapped_raises():
    sw = bi("SWmax", "SWmin")
    with pytest.raises(HypothesisViolation):
        shift_reduce(sw, a_n(2), sw.final_set)


def test_shift_reduce_requires_productive_set(e1):
    with pytest.raises(ValueError):
        shift_reduce(e1, a_n(2), frozenset({"q"}))


def test_reduce_once_normal_form(e1):
    assert reduce_once(e1, a_n(0), QR) is None


def test_reduce_once_swapped_raises():
    sw = bi("SWmax", "SWmin")
    with pytest.raises(HypothesisViolation):
        reduce_once(sw, a_n(2), sw.final_set)


def test_reduction_certificates_valid_b2():
    biA = bi("B2max", "B2min")
    from tropa.reachprod import families

    for s in enumerate_terms(biA.alphabet, 3):
        for P in families(biA).productive:
            cert = reduction_certificate(biA, s, P)
            assert cert.t.height <= s.height
            assert check_certificate(biA, cert)
    assert emitted_certificates(biA)


def test_certificate_json_roundtrip(e1):
    cert = reduction_certificate(e1, a_n(3), QR)
    again = ShiftCertificate.from_json(cert.to_json(), e1.alphabet)
    assert again == cert
    assert json.loads(cert.to_json())["x"] == "3"
