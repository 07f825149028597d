"""The separating unambiguous automaton.

States are triples ``(R, P, t)``: a reachable set, a productive set and a
reduced representative term.  :func:`run_sep` computes the unique run over an
input directly; :func:`materialize` explores the reachable part of the
automaton under a state budget.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import BudgetExceeded, HypothesisViolation
from .formats import escape_name
from .reachprod import families, reach, set_key, top_down_P
from .refine import shift_reduce
from .terms import NodePath, Term, print_term
from .wta import MAX, BiAutomaton, SemValue, Transition, Wta, _check_alphabet, _evaluate


class SepState(NamedTuple):
    R: frozenset
    P: frozenset
    t: Term


@dataclass
class SepRun:
    """The unique run of the separator over a term.

    ``shifts`` holds the weight of the transition taken at each node and
    ``below`` the accumulated weight of the sub-run rooted there.
    """

    term: Term
    states: dict[NodePath, SepState]
    shifts: dict[NodePath, Fraction]
    below: dict[NodePath, Fraction]

    @property
    def root(self) -> SepState:
        return self.states[()]

    @property
    def total_shift(self) -> Fraction:
        return self.below[()]


def _node_result(biA: BiAutomaton, node: Term, P: frozenset, kids: list) -> tuple:
    memo = biA.memo("sep_node")
    key = (node, P)
    got = memo.get(key)
    if got is None:
        rep = Term(node.letter, [t for t, _ in kids])
        t, x = shift_reduce(biA, rep, P)
        got = memo[key] = (t, x, x + sum((c for _, c in kids), Fraction(0)))
    return got


def run_sep(biA: BiAutomaton, s: Term) -> SepRun:
    """Reach bottom-up, productive sets top-down from the final states, then
    representatives and shifts bottom-up."""
    _check_alphabet(biA, s)
    order: list[tuple[NodePath, Term, frozenset]] = []
    stack = [((), s, biA.final_set)]
    while stack:
        path, node, P = stack.pop()
        order.append((path, node, P))
        Rs = [reach(biA, ch) for ch in node.children]
        for i, ch in enumerate(node.children):
            stack.append((path + (i,), ch, top_down_P(biA, node.letter, Rs, P, i)))
    states: dict[NodePath, SepState] = {}
    shifts: dict[NodePath, Fraction] = {}
    below: dict[NodePath, Fraction] = {}
    reps: dict[NodePath, Term] = {}
    for path, node, P in reversed(order):
        kids = [(reps[path + (i,)], below[path + (i,)]) for i in range(len(node.children))]
        t, x, total = _node_result(biA, node, P, kids)
        reps[path] = t
        shifts[path] = x
        below[path] = total
        states[path] = SepState(reach(biA, node), P, t)
    return SepRun(s, states, shifts, below)


def evaluate_sep(biA: BiAutomaton, s: Term) -> SemValue:
    """Value of the separating automaton on ``s``.

    Raises :class:`HypothesisViolation` if the construction runs into
    evidence that the max automaton is not below the min automaton.
    """
    run = run_sep(biA, s)
    root = run.root
    if not root.R & biA.final_set:
        return None
    v = _evaluate(biA.max_half, root.t)
    if v is None:
        raise HypothesisViolation(
            f"{print_term(s)} is accepted by the min automaton only", s
        )
    return v + run.total_shift


def sep_state_name(biA: BiAutomaton, st: SepState) -> str:
    def fmt(S):
        return "{" + ",".join(str(q) for q in sorted(S, key=biA.state_index)) + "}"

    return escape_name(f"{fmt(st.R)}|{fmt(st.P)}|{print_term(st.t)}")


def materialize(biA: BiAutomaton, budget: int, mode: str = MAX) -> Wta:
    """Explore the separator's states reachable from the leaves.

    Raises :class:`BudgetExceeded` as soon as more than ``budget`` states are
    discovered.  States of the returned automaton are :class:`SepState`.
    """
    fam = families(biA)
    productive = sorted(fam.productive, key=lambda S: set_key(biA, S))
    states: dict[SepState, None] = {}
    by_rp: dict[tuple, list[SepState]] = {}
    transitions: dict[Transition, Fraction] = {}
    done: set = set()

    def add(st: SepState, pending: int):
        if st in states:
            return
        if len(states) >= budget:
            raise BudgetExceeded(
                f"more than {budget} separator states", frontier=pending + 1, states=len(states)
            )
        states[st] = None
        by_rp.setdefault((st.R, st.P), []).append(st)

    letters = sorted(biA.alphabet.items(), key=lambda kv: (kv[1], kv[0]))
    while True:
        size_before = len(states)
        new: list[tuple[Transition, Fraction, SepState]] = []
        reachable = sorted({st.R for st in states}, key=lambda S: set_key(biA, S))
        for a, n in letters:
            for Rs in itertools.product(reachable, repeat=n):
                for P in productive:
                    need = [top_down_P(biA, a, Rs, P, i) for i in range(n)]
                    pools = [by_rp.get((Rs[i], need[i]), []) for i in range(n)]
                    for kids in itertools.product(*pools):
                        key = (a, kids, P)
                        if key in done:
                            continue
                        done.add(key)
                        t, x = shift_reduce(biA, Term(a, [k.t for k in kids]), P)
                        target = SepState(reach(biA, t), P, t)
                        new.append((Transition(tuple(kids), a, target), x, target))
        for i, (tr, x, target) in enumerate(new):
            add(target, len(new) - i - 1)
            transitions[tr] = x
        if not new and len(states) == size_before:
            break
    final = {}
    for st in states:
        if st.P == biA.final_set and st.R & biA.final_set:
            v = _evaluate(biA.max_half, st.t)
            if v is None:
                raise HypothesisViolation(
                    f"{print_term(st.t)} is accepted by the min automaton only", st.t
                )
            final[st] = v
    return Wta(biA.alphabet, list(states), final, transitions, mode)


def sidecar(biA: BiAutomaton, A: Wta) -> str:
    """JSON map from rendered state names to their components."""
    entries = {}
    for st in A.states:
        entries[sep_state_name(biA, st)] = {
            "R": [str(q) for q in sorted(st.R, key=biA.state_index)],
            "P": [str(q) for q in sorted(st.P, key=biA.state_index)],
            "t": print_term(st.t),
        }
    return json.dumps(entries, indent=2, ensure_ascii=False)
