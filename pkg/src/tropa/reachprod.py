"""Reachable / productive state sets and the annotation automaton built on them."""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import InternalError
from .terms import HOLE_TERM, NodePath, Term, compose
from .wta import MAX, BiAutomaton, Transition, Wta, reach_set

StateSet = frozenset


class ProState(NamedTuple):
    R: frozenset
    P: frozenset


@dataclass(frozen=True)
class Families:
    """The reachable and productive families, with a smallest witness for each set."""

    reachable: frozenset
    productive: frozenset
    reach_witness: dict = field(compare=False, repr=False)
    prod_witness: dict = field(compare=False, repr=False)


_families_lock = threading.Lock()


def set_key(biA: BiAutomaton, states) -> tuple:
    """Deterministic sort key for a set of states (by declaration order)."""
    return (len(states), tuple(sorted(biA.state_index(q) for q in states)))


def reach(biA: BiAutomaton, t: Term) -> frozenset:
    """States reachable at the root of ``t``."""
    return reach_set(biA, t)


def bottom_up_R(biA: BiAutomaton, letter: str, Rs) -> frozenset:
    return frozenset(
        target
        for children, target, _ in biA.transitions_on(letter)
        if all(p in R for p, R in zip(children, Rs))
    )


def top_down_P(biA: BiAutomaton, letter: str, Rs, P, i: int) -> frozenset:
    """States at child ``i`` extendable, through ``letter`` and reachable siblings, into ``P``."""
    return frozenset(
        children[i]
        for children, target, _ in biA.transitions_on(letter)
        if target in P
        and all(p in R for j, (p, R) in enumerate(zip(children, Rs)) if j != i)
    )


def prod(biA: BiAutomaton, c: Term) -> frozenset:
    """States from which the hole of ``c`` extends to an accepting run."""
    P = biA.final_set
    node = c
    for i in c.hole_path():
        Rs = [None if j == i else reach(biA, ch) for j, ch in enumerate(node.children)]
        P = top_down_P(biA, node.letter, Rs, P, i)
        node = node.children[i]
    return P


def families(biA: BiAutomaton) -> Families:
    """Least-fixpoint computation of both families; memoized per bi-automaton."""
    memo = biA.memo("families")
    got = memo.get("value")
    if got is not None:
        return got
    with _families_lock:
        got = memo.get("value")
        if got is None:
            got = memo["value"] = _compute_families(biA)
    return got


def _compute_families(biA: BiAutomaton) -> Families:
    alphabet = biA.alphabet
    reach_wit: dict[frozenset, Term] = {}
    for a in alphabet.letters_of_rank(0):
        R = bottom_up_R(biA, a, ())
        reach_wit.setdefault(R, Term(a))
    while True:
        known = sorted(reach_wit, key=lambda S: set_key(biA, S))
        new = {}
        for a, n in alphabet.items():
            if n == 0:
                continue
            for Rs in itertools.product(known, repeat=n):
                R = bottom_up_R(biA, a, Rs)
                if R not in reach_wit and R not in new:
                    new[R] = Term(a, [reach_wit[X] for X in Rs])
        if not new:
            break
        reach_wit.update(new)

    reachable = sorted(reach_wit, key=lambda S: set_key(biA, S))
    prod_wit: dict[frozenset, Term] = {biA.final_set: HOLE_TERM}
    while True:
        known = sorted(prod_wit, key=lambda S: set_key(biA, S))
        new = {}
        for a, n in alphabet.items():
            for i in range(n):
                for Rs in itertools.product(reachable, repeat=n - 1):
                    Rs = list(Rs[:i]) + [None] + list(Rs[i:])
                    for P in known:
                        Pi = top_down_P(biA, a, Rs, P, i)
                        if Pi in prod_wit or Pi in new:
                            continue
                        kids = [HOLE_TERM if j == i else reach_wit[R] for j, R in enumerate(Rs)]
                        new[Pi] = compose(prod_wit[P], Term(a, kids))
        if not new:
            break
        prod_wit.update(new)
    return Families(
        reachable=frozenset(reach_wit),
        productive=frozenset(prod_wit),
        reach_witness=reach_wit,
        prod_witness=prod_wit,
    )


def annotate(biA: BiAutomaton, t: Term, P_root) -> dict[NodePath, ProState]:
    """The unique annotation run over ``t`` whose root has productive set ``P_root``.

    One bottom-up pass for the reachable sets, one top-down pass for the
    productive sets.
    """
    P_root = frozenset(P_root)
    out: dict[NodePath, ProState] = {}
    stack = [((), t, P_root)]
    while stack:
        path, node, P = stack.pop()
        R = reach(biA, node)
        out[path] = ProState(R, P)
        Rs = [reach(biA, ch) for ch in node.children]
        for i, ch in enumerate(node.children):
            stack.append((path + (i,), ch, top_down_P(biA, node.letter, Rs, P, i)))
    if out[()].R != reach(biA, t):
        raise InternalError("annotation root disagrees with reach")
    return out


def pro_automaton(biA: BiAutomaton) -> Wta:
    """Materialize the annotation automaton (debugging and oracle tests only).

    States are :class:`ProState` pairs; all weights are zero.
    """
    fam = families(biA)
    reachable = sorted(fam.reachable, key=lambda S: set_key(biA, S))
    productive = sorted(fam.productive, key=lambda S: set_key(biA, S))
    states = [ProState(R, P) for R in reachable for P in productive]
    transitions: dict[Transition, Fraction] = {}
    for a, n in biA.alphabet.items():
        for Rs in itertools.product(reachable, repeat=n):
            R = bottom_up_R(biA, a, Rs)
            for P in productive:
                kids = tuple(
                    ProState(Rs[i], top_down_P(biA, a, Rs, P, i)) for i in range(n)
                )
                transitions[Transition(kids, a, ProState(R, P))] = Fraction(0)
    final = {ProState(R, biA.final_set): Fraction(0) for R in reachable}
    return Wta(biA.alphabet, states, final, transitions, MAX)
