from tropa.formats import load_fixture
from tropa.terms import Term, unary_power
from tropa.wta import disjoint_union


def bi(max_name, min_name):
    return disjoint_union(load_fixture(max_name), load_fixture(min_name))


def a_n(n):
    return unary_power("a", n, Term("e"))
