"""Refinement with shift, the pumping shift, and the size-reducing map.

A certificate ``(s, t, P, x)`` says that ``t`` may replace ``s`` below any
context whose productive set is ``P``, at the price of adding ``x``: every
max-half run on ``s`` to a state of ``P`` is matched up to ``+x`` by a run on
``t``, and symmetrically for the min half.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

from .errors import HypothesisViolation, InternalError
from .reachprod import families, reach, set_key, top_down_P
from .terms import HOLE_TERM, NodePath, Term, compose, longest_branch, parse_term, print_term
from .wta import (
    MAX,
    BiAutomaton,
    _evaluate,
    accept_from,
    best_table,
    context_tables,
    enumerate_runs,
    run_weight,
)

_cache_lock = threading.Lock()

# Violations whose explicit counterexample would need more pumping rounds than
# this are reported without a witness term.
MAX_WITNESS_PUMPING = 256


@dataclass(frozen=True)
class ShiftCertificate:
    s: Term
    t: Term
    P: frozenset
    x: Fraction

    def to_json(self) -> str:
        return json.dumps(
            {
                "s": print_term(self.s),
                "t": print_term(self.t),
                "P": sorted(str(q) for q in self.P),
                "x": str(self.x),
            }
        )

    @classmethod
    def from_json(cls, text: str, alphabet=None) -> "ShiftCertificate":
        data = json.loads(text)
        return cls(
            parse_term(data["s"], alphabet),
            parse_term(data["t"], alphabet),
            frozenset(data["P"]),
            Fraction(str(data["x"])),
        )

    def shifted(self, dx) -> "ShiftCertificate":
        return ShiftCertificate(self.s, self.t, self.P, self.x + dx)


def check_refinement(biA: BiAutomaton, s: Term, t: Term, P, x) -> bool:
    """Decide whether ``t`` refines ``s`` for ``P`` with shift ``x``.

    One optimal run on ``t`` answers every challenge run on ``s``, so the
    per-run definition reduces to comparing optimal weights.
    """
    bs, bt = best_table(biA, s), best_table(biA, t)
    if bs.keys() != bt.keys():
        return False
    for p in P:
        ws = bs.get(p)
        if ws is None:
            continue
        if biA.state_mode(p) == MAX:
            if not ws <= bt[p] + x:
                return False
        elif not bt[p] + x <= ws:
            return False
    return True


def check_certificate(biA: BiAutomaton, cert: ShiftCertificate) -> bool:
    return check_refinement(biA, cert.s, cert.t, cert.P, cert.x)


def check_refinement_by_runs(biA: BiAutomaton, s: Term, t: Term, P, x, budget: int = 48) -> bool:
    """Reference decision quantifying over every run (small terms only)."""
    runs_s = [(r[()], run_weight(biA, s, r)) for r in enumerate_runs(biA, s, budget=budget)]
    runs_t = [(r[()], run_weight(biA, t, r)) for r in enumerate_runs(biA, t, budget=budget)]
    if {q for q, _ in runs_s} != {q for q, _ in runs_t}:
        return False
    for p, w in runs_s:
        if p not in P:
            continue
        answers = [w2 for q, w2 in runs_t if q == p]
        if biA.state_mode(p) == MAX:
            ok = any(w <= w2 + x for w2 in answers)
        else:
            ok = any(w2 + x <= w for w2 in answers)
        if not ok:
            return False
    return True


def refinement_transitive_compose(
    first: ShiftCertificate, second: ShiftCertificate
) -> ShiftCertificate:
    """Chain ``s -> t`` (shift x) and ``t -> u`` (shift y) into ``s -> u`` (shift x + y)."""
    if first.t != second.s:
        raise ValueError("certificates do not chain: middle terms differ")
    if first.P != second.P:
        raise ValueError("certificates are for different state sets")
    return ShiftCertificate(first.s, second.t, first.P, first.x + second.x)


def congruence_compose(
    biA: BiAutomaton, letter: str, certs: list[ShiftCertificate], P
) -> ShiftCertificate:
    """Lift child certificates through ``letter`` to a certificate for ``P``.

    Child ``i`` must be certified at least for the set the annotation
    automaton assigns to it below ``P``; a larger set is also accepted.
    """
    P = frozenset(P)
    if biA.alphabet[letter] != len(certs):
        raise ValueError(f"letter {letter!r} needs {biA.alphabet[letter]} certificates")
    Rs = [reach(biA, c.t) for c in certs]
    for i, c in enumerate(certs):
        need = top_down_P(biA, letter, Rs, P, i)
        if not need <= c.P:
            missing = sorted(map(str, need - c.P))
            raise ValueError(f"child {i} certificate does not cover {missing}")
    return ShiftCertificate(
        Term(letter, [c.s for c in certs]),
        Term(letter, [c.t for c in certs]),
        P,
        sum((c.x for c in certs), Fraction(0)),
    )


def k_bound(biA: BiAutomaton) -> int:
    """Height threshold above which a reduction is guaranteed to exist."""
    n = len(biA.states)
    return (4 * n) ** n


def pumping_shift(biA: BiAutomaton, m: Term, P, R) -> Fraction:
    """A shift between every max-half cycle weight and every min-half cycle weight of ``m``.

    Cycles are runs over ``m`` from ``p`` back to ``p`` for ``p`` in ``P & R``.
    Returns the largest max-half cycle weight (else the smallest min-half one,
    else 0).  Raises :class:`HypothesisViolation` when a max cycle outweighs a
    min cycle.
    """
    if m.letter == HOLE_TERM.letter:
        raise ValueError("pumping needs a non-empty context")
    tables = context_tables(biA, m)
    best_max = best_min = None
    arg_max = arg_min = None
    for p in sorted(frozenset(P) & frozenset(R), key=biA.state_index):
        w = tables.get(p, {}).get(p)
        if w is None:
            continue
        if biA.state_mode(p) == MAX:
            if best_max is None or w > best_max:
                best_max, arg_max = w, p
        elif best_min is None or w < best_min:
            best_min, arg_min = w, p
    if best_max is not None and best_min is not None and best_max > best_min:
        witness = _pumping_counterexample(biA, m, P, R, arg_max, arg_min, best_max - best_min)
        raise HypothesisViolation(
            f"cycle over {print_term(m)}: max-half weight {best_max} at {arg_max} "
            f"exceeds min-half weight {best_min} at {arg_min}",
            witness,
            cycle=m,
            max_state=arg_max,
            min_state=arg_min,
            max_cycle_weight=best_max,
            min_cycle_weight=best_min,
        )
    if best_max is not None:
        return best_max
    if best_min is not None:
        return best_min
    return Fraction(0)


def _pumping_counterexample(biA, m, P, R, p, q, gap) -> Optional[Term]:
    """Build ``c . m^n . t`` on which the max half exceeds the min half."""
    fam = families(biA)
    t = fam.reach_witness.get(frozenset(R))
    c = fam.prod_witness.get(frozenset(P))
    if t is None or c is None:
        return None
    acc = accept_from(biA, c)
    below = best_table(biA, t)
    if p not in acc or q not in acc or p not in below or q not in below:
        return None
    slack = acc[q] + below[q] - acc[p] - below[p]
    n = max(1, int(slack // gap) + 1)
    if n > MAX_WITNESS_PUMPING:
        return None
    u = t
    for _ in range(n):
        u = compose(m, u)
    u = compose(c, u)
    vmax, vmin = _evaluate(biA.max_half, u), _evaluate(biA.min_half, u)
    if vmax is None or vmin is None or not vmax > vmin:
        raise InternalError(f"pumped counterexample {print_term(u)} does not violate")
    return u


class Redex(NamedTuple):
    t: Term
    x: Fraction
    upper: NodePath
    lower: NodePath
    m: Term


def canonical_branch_states(biA: BiAutomaton, s: Term, branch: list[NodePath], p) -> Optional[list]:
    """States of the canonical optimal run to ``p`` along ``branch``.

    Ties between optimal transitions are broken by the least child-state
    tuple in declaration order.  ``None`` when no run to ``p`` exists.
    """
    top = best_table(biA, s)
    if p not in top:
        return None
    idx = biA.state_index
    states = [p]
    node, q = s, p
    for d in range(len(branch) - 1):
        child = branch[d + 1][-1]
        tables = [best_table(biA, ch) for ch in node.children]
        target_w = best_table(biA, node)[q]
        choice = None
        for children, target, w in biA.transitions_on(node.letter):
            if target != q:
                continue
            total = w
            for table, r in zip(tables, children):
                v = table.get(r)
                if v is None:
                    break
                total += v
            else:
                if total == target_w:
                    key = tuple(idx(r) for r in children)
                    if choice is None or key < choice[0]:
                        choice = (key, children)
        if choice is None:
            raise InternalError("optimal run could not be reconstructed")
        q = choice[1][child]
        node = node.children[child]
        states.append(q)
    return states


def reduce_once(biA: BiAutomaton, s: Term, P0) -> Optional[Redex]:
    """Cut one pumpable context out of the longest branch of ``s``, or ``None``.

    Branch nodes are labelled with (reachable set, productive set seeded by
    ``P0``, state of each canonical optimal run).  The pair of equal labels
    with the deepest lower node, then the shortest gap, is cut.  Results are
    memoized on the bi-automaton.
    """
    P0 = frozenset(P0)
    cache = biA.memo("reduce_once")
    key = (s, P0)
    if key in cache:
        return cache[key]
    red = _reduce_once(biA, s, P0)
    with _cache_lock:
        cache[key] = red
    return red


def _reduce_once(biA: BiAutomaton, s: Term, P0: frozenset) -> Optional[Redex]:
    branch = longest_branch(s)
    if len(branch) < 2:
        return None
    nodes = [s.subterm(path) for path in branch]
    R = [reach(biA, v) for v in nodes]
    P = [P0]
    for d in range(len(branch) - 1):
        v = nodes[d]
        i = branch[d + 1][-1]
        Rs = [reach(biA, ch) for ch in v.children]
        P.append(top_down_P(biA, v.letter, Rs, P[-1], i))
    runs = [
        canonical_branch_states(biA, s, branch, p)
        for p in sorted(P0, key=biA.state_index)
    ]
    sigs = [
        (R[d], P[d], tuple(None if r is None else r[d] for r in runs))
        for d in range(len(branch))
    ]
    for j in range(len(branch) - 1, 0, -1):
        for i in range(j - 1, -1, -1):
            if sigs[i] == sigs[j]:
                upper, lower = branch[i], branch[j]
                s_low = nodes[j]
                m = nodes[i].replace(lower[len(upper):], HOLE_TERM)
                x = pumping_shift(biA, m, P[i], R[j])
                return Redex(s.replace(upper, s_low), x, upper, lower, m)
    return None


def shift_reduce(biA: BiAutomaton, s: Term, P0) -> tuple[Term, Fraction]:
    """Iterate :func:`reduce_once` to a normal form, summing the shifts.

    Deterministic in ``(biA, s, P0)``; results (including every intermediate
    term) are memoized on the bi-automaton.
    """
    P0 = frozenset(P0)
    cache = biA.memo("shift_reduce")
    key = (s, P0)
    got = cache.get(key)
    if got is not None:
        return got
    if P0 not in families(biA).productive:
        raise ValueError(f"{sorted(map(str, P0))} is not a productive set")
    chain = [(s, Fraction(0))]
    cur = s
    while True:
        hit = cache.get((cur, P0))
        if hit is not None and cur is not s:
            end, tail = hit
            break
        red = reduce_once(biA, cur, P0)
        if red is None:
            end, tail = cur, Fraction(0)
            break
        cur = red.t
        chain.append((cur, red.x))
    # shift from chain[i] to the normal form
    total = tail
    results = []
    for term, step in reversed(chain):
        results.append((term, total))
        total += step
    with _cache_lock:
        for term, rest in results:
            cache.setdefault((term, P0), (end, rest))
    return cache[key]


def emitted_certificates(biA: BiAutomaton) -> list[ShiftCertificate]:
    """Every certificate produced so far by :func:`shift_reduce` on ``biA``."""
    cache = biA.memo("shift_reduce")
    out = [ShiftCertificate(s, t, P, x) for (s, P), (t, x) in list(cache.items())]
    out.sort(key=lambda c: (c.s.size, print_term(c.s), set_key(biA, c.P)))
    return out


def reduction_certificate(biA: BiAutomaton, s: Term, P0) -> ShiftCertificate:
    t, x = shift_reduce(biA, s, P0)
    return ShiftCertificate(s, t, frozenset(P0), x)


def certificate_value_chain(biA: BiAutomaton, cert: ShiftCertificate, c: Term):
    """The four values around ``c``: max(c.s), max(c.t)+x, min(c.t)+x, min(c.s)."""
    cs, ct = compose(c, cert.s), compose(c, cert.t)
    vals = (
        _evaluate(biA.max_half, cs),
        _evaluate(biA.max_half, ct),
        _evaluate(biA.min_half, ct),
        _evaluate(biA.min_half, cs),
    )
    return (
        vals[0],
        None if vals[1] is None else vals[1] + cert.x,
        None if vals[2] is None else vals[2] + cert.x,
        vals[3],
    )


def chain_holds(values) -> bool:
    """Non-decreasing chain of defined values, or all undefined."""
    if all(v is None for v in values):
        return True
    if any(v is None for v in values):
        return False
    return all(a <= b for a, b in zip(values, values[1:]))
