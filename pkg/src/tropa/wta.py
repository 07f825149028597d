"""Weighted tree automata over the tropical semirings, with exact weights.

Weights are :class:`fractions.Fraction`; the undefined value (no accepting
run) is ``None`` throughout and is never compared with a weight.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Mapping, NamedTuple, Optional

from .errors import AlphabetMismatch
from .terms import HOLE, NodePath, RankedAlphabet, Term

MAX = "max"
MIN = "min"

Weight = Fraction
SemValue = Optional[Fraction]
State = Hashable
Run = dict  # NodePath -> State

DEFAULT_RUN_BUDGET = 48


class Transition(NamedTuple):
    children: tuple
    letter: str
    target: State


class Wta:
    """A tropical tree automaton.

    ``transitions`` maps :class:`Transition` tuples to their weight, so two
    weights for the same structural transition cannot coexist.  ``mode`` is
    ``"max"`` or ``"min"`` and selects the semantics.
    """

    def __init__(
        self,
        alphabet: RankedAlphabet,
        states: Iterable[State],
        final: Mapping[State, Fraction],
        transitions: Mapping[Transition, Fraction],
        mode: Optional[str],
    ):
        if mode not in (MAX, MIN, None):
            raise ValueError(f"mode must be 'max' or 'min', got {mode!r}")
        self.alphabet = alphabet
        self.states = tuple(states)
        self.mode = mode
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state")
        known = set(self.states)
        self.final = {q: Fraction(w) for q, w in final.items()}
        for q in self.final:
            if q not in known:
                raise ValueError(f"final state {q!r} is not declared")
        self.transitions: dict[Transition, Fraction] = {}
        by_letter: dict[str, list[tuple[tuple, State, Fraction]]] = {}
        for tr, w in transitions.items():
            tr = Transition(tuple(tr[0]), tr[1], tr[2])
            if tr.letter not in alphabet:
                raise AlphabetMismatch(f"letter {tr.letter!r} not in alphabet")
            if alphabet[tr.letter] != len(tr.children):
                raise AlphabetMismatch(
                    f"transition on {tr.letter!r} has {len(tr.children)} children, "
                    f"rank is {alphabet[tr.letter]}"
                )
            for q in tr.children + (tr.target,):
                if q not in known:
                    raise ValueError(f"transition uses undeclared state {q!r}")
            w = Fraction(w)
            self.transitions[tr] = w
            by_letter.setdefault(tr.letter, []).append((tr.children, tr.target, w))
        self._by_letter = by_letter
        self._index = {q: i for i, q in enumerate(self.states)}
        self._max_states = frozenset(q for q in self.states if self.state_mode(q) == MAX)
        self._best_cache: dict[Term, dict] = {}

    def state_mode(self, q: State) -> str:
        return self.mode

    def state_index(self, q: State) -> int:
        return self._index[q]

    def transitions_on(self, letter: str) -> list[tuple[tuple, State, Fraction]]:
        return self._by_letter.get(letter, [])

    def with_mode(self, mode: str) -> "Wta":
        return Wta(self.alphabet, self.states, self.final, self.transitions, mode)

    def clear_caches(self) -> None:
        self._best_cache.clear()

    def __repr__(self):
        return (
            f"<Wta mode={self.mode} states={len(self.states)} "
            f"transitions={len(self.transitions)} final={len(self.final)}>"
        )


class BiAutomaton(Wta):
    """Disjoint union of a max automaton and a min automaton.

    Each state carries the origin tag of the half it came from; the two halves
    are kept (after renaming) as ``max_half`` and ``min_half``.
    """

    def __init__(self, max_half: Wta, min_half: Wta):
        self.max_half = max_half
        self.min_half = min_half
        self.origin = {q: MAX for q in max_half.states}
        self.origin.update({q: MIN for q in min_half.states})
        final = dict(max_half.final)
        final.update(min_half.final)
        transitions = dict(max_half.transitions)
        transitions.update(min_half.transitions)
        super().__init__(
            max_half.alphabet,
            max_half.states + min_half.states,
            final,
            transitions,
            None,
        )
        self.final_set = frozenset(self.final)
        self._memo: dict = {}

    def state_mode(self, q: State) -> str:
        return self.origin[q]

    @property
    def max_states(self) -> frozenset:
        return self._max_states

    @property
    def min_states(self) -> frozenset:
        return frozenset(self.states) - self._max_states

    def memo(self, name: str) -> dict:
        """A named per-automaton cache; values must be pure functions of the key."""
        return self._memo.setdefault(name, {})

    def clear_caches(self) -> None:
        super().clear_caches()
        self._memo.clear()

    def __repr__(self):
        return (
            f"<BiAutomaton max={len(self.max_half.states)} min={len(self.min_half.states)} "
            f"transitions={len(self.transitions)}>"
        )


# -- optimal-run tables -----------------------------------------------------


def _combine(A: Wta, letter: str, child_tables: list[dict]) -> dict:
    out: dict = {}
    maxish = A._max_states
    for children, target, w in A.transitions_on(letter):
        total = w
        for table, p in zip(child_tables, children):
            v = table.get(p)
            if v is None:
                break
            total += v
        else:
            old = out.get(target)
            if old is None or (total > old if target in maxish else total < old):
                out[target] = total
    return out


def best_table(A: Wta, t: Term) -> dict:
    """Sparse optimal-run table: state -> best run weight, for reachable states only."""
    cache = A._best_cache
    got = cache.get(t)
    if got is not None:
        return got
    if t.holes:
        raise ValueError(f"{t} is a context; use best_context")
    stack = [t]
    while stack:
        node = stack[-1]
        if node in cache:
            stack.pop()
            continue
        missing = [c for c in node.children if c not in cache]
        if missing:
            stack.extend(missing)
            continue
        stack.pop()
        cache[node] = _combine(A, node.letter, [cache[c] for c in node.children])
    return cache[t]


def best_to_state(A: Wta, t: Term) -> dict:
    """Optimal weight of a run over ``t`` to each state, ``None`` where no run exists.

    Max-origin states take the maximum, min-origin states the minimum.
    """
    table = best_table(A, t)
    return {q: table.get(q) for q in A.states}


def reach_set(A: Wta, t: Term) -> frozenset:
    return frozenset(best_table(A, t))


def _check_alphabet(A: Wta, t: Term) -> None:
    try:
        A.alphabet.check(t)
    except ValueError as exc:
        raise AlphabetMismatch(str(exc)) from None


def evaluate(A: Wta, t: Term) -> SemValue:
    """The tropical semantics of ``A`` on ``t`` (``None`` when no accepting run)."""
    if A.mode is None:
        raise ValueError("a bi-automaton has no semantics of its own")
    _check_alphabet(A, t)
    return _evaluate(A, t)


def _evaluate(A: Wta, t: Term) -> SemValue:
    table = best_table(A, t)
    pick = max if A.mode == MAX else min
    vals = [w + A.final[q] for q, w in table.items() if q in A.final]
    return pick(vals) if vals else None


def context_tables(A: Wta, c: Term) -> dict:
    """Sparse context table: from-state -> {to-state -> best run weight}."""
    hole_path = c.hole_path()
    spine = [c.subterm(hole_path[:k]) for k in range(len(hole_path) + 1)]
    out = {}
    for p in A.states:
        table = {p: Fraction(0)}
        for depth in range(len(hole_path) - 1, -1, -1):
            node = spine[depth]
            i = hole_path[depth]
            kids = [table if j == i else best_table(A, ch) for j, ch in enumerate(node.children)]
            table = _combine(A, node.letter, kids)
            if not table:
                break
        if table:
            out[p] = table
    return out


def best_context(A: Wta, c: Term) -> dict:
    """Optimal run weight over context ``c`` for every ``(from, to)`` state pair."""
    tables = context_tables(A, c)
    return {
        (p, q): tables.get(p, {}).get(q)
        for p in A.states
        for q in A.states
    }


def accept_from(A: Wta, c: Term) -> dict:
    """Best accepting weight (final weight included) over ``c`` from each hole state."""
    out = {}
    for p, table in context_tables(A, c).items():
        for q, w in table.items():
            if q in A.final:
                v = w + A.final[q]
                old = out.get(p)
                if old is None or (v > old if p in A._max_states else v < old):
                    out[p] = v
    return out


# -- run enumeration (oracle support) ---------------------------------------


def enumerate_runs(
    A: Wta,
    t: Term,
    hole_state: Optional[State] = None,
    budget: int = DEFAULT_RUN_BUDGET,
) -> list[Run]:
    """Every run of ``A`` over ``t``, exhaustively.

    On a context the hole carries ``hole_state`` (every state if ``None``).
    Intended for small inputs only: refuses terms larger than ``budget``.
    """
    if t.size > budget:
        raise ValueError(f"term of size {t.size} exceeds the run-enumeration budget {budget}")

    def runs(node: Term, path: NodePath) -> list[tuple[State, list]]:
        if node.letter == HOLE:
            states = A.states if hole_state is None else (hole_state,)
            return [(q, [(path, q)]) for q in states]
        child_runs = [runs(ch, path + (i,)) for i, ch in enumerate(node.children)]
        out = []
        for children, target, _ in A.transitions_on(node.letter):
            options = [
                [assign for q, assign in cr if q == p] for cr, p in zip(child_runs, children)
            ]
            for combo in itertools.product(*options):
                assign = [(path, target)]
                for part in combo:
                    assign.extend(part)
                out.append((target, assign))
        return out

    return [dict(assign) for _, assign in runs(t, ())]


def run_weight(A: Wta, t: Term, run: Run) -> Fraction:
    """Sum of transition weights over the inner nodes of ``t``."""
    total = Fraction(0)
    for path, node in t.paths():
        if node.letter == HOLE:
            continue
        tr = Transition(
            tuple(run[path + (i,)] for i in range(len(node.children))), node.letter, run[path]
        )
        total += A.transitions[tr]
    return total


def accepting_runs(A: Wta, t: Term, **kwargs) -> list[Run]:
    return [r for r in enumerate_runs(A, t, **kwargs) if r[()] in A.final]


def evaluate_by_runs(A: Wta, t: Term, **kwargs) -> SemValue:
    """Reference semantics by folding over every accepting run."""
    vals = [run_weight(A, t, r) + A.final[r[()]] for r in accepting_runs(A, t, **kwargs)]
    if not vals:
        return None
    return max(vals) if A.mode == MAX else min(vals)


def count_runs(A: Wta, t: Term) -> dict:
    """Number of runs over ``t`` to each state (exact integers)."""
    memo: dict[Term, dict] = {}

    def go(node: Term) -> dict:
        got = memo.get(node)
        if got is not None:
            return got
        kids = [go(c) for c in node.children]
        out: dict = {}
        for children, target, _ in A.transitions_on(node.letter):
            n = 1
            for table, p in zip(kids, children):
                n *= table.get(p, 0)
                if not n:
                    break
            if n:
                out[target] = out.get(target, 0) + n
        memo[node] = out
        return out

    return go(t)


def count_accepting_runs(A: Wta, t: Term) -> int:
    return sum(n for q, n in count_runs(A, t).items() if q in A.final)


# -- disjoint union -----------------------------------------------------------


def rename_states(A: Wta, mapping: Mapping[State, State]) -> Wta:
    final = {mapping[q]: w for q, w in A.final.items()}
    transitions = {
        Transition(tuple(mapping[p] for p in tr.children), tr.letter, mapping[tr.target]): w
        for tr, w in A.transitions.items()
    }
    return Wta(A.alphabet, [mapping[q] for q in A.states], final, transitions, A.mode)


def disjoint_union(amax: Wta, amin: Wta) -> BiAutomaton:
    """Combine a max automaton and a min automaton into one bi-automaton.

    When state names collide, every state is suffixed with ``@max`` or
    ``@min``.
    """
    if amax.mode != MAX or amin.mode != MIN:
        raise ValueError("expected a max automaton and a min automaton")
    if amax.alphabet != amin.alphabet:
        raise AlphabetMismatch("the two automata use different alphabets")
    if set(amax.states) & set(amin.states):
        amax = rename_states(amax, {q: f"{q}@max" for q in amax.states})
        amin = rename_states(amin, {q: f"{q}@min" for q in amin.states})
        if set(amax.states) & set(amin.states):
            raise ValueError("could not make the state sets disjoint")
    return BiAutomaton(amax, amin)


# -- ambiguity ---------------------------------------------------------------


def decide_ambiguity(A: Wta) -> Optional[Term]:
    """Return ``None`` if ``A`` is unambiguous, otherwise a witness term.

    Saturates the self-product whose states are ``(p, q, differ)``, where
    ``differ`` records that the two runs already disagree somewhere below.
    Pairs are discovered height by height, so the witness has minimal height.
    """
    witness: dict[tuple, Term] = {}
    letters = list(A.alphabet.items())
    while True:
        known = dict(witness)
        by_pair: dict[tuple, list[bool]] = {}
        for (p, q, f) in known:
            by_pair.setdefault((p, q), []).append(f)
        found = {}
        for a, n in letters:
            trs = A.transitions_on(a)
            for (c1, p, _), (c2, q, _) in itertools.product(trs, trs):
                options = [by_pair.get((x, y), []) for x, y in zip(c1, c2)]
                for flags in itertools.product(*options):
                    key = (p, q, p != q or any(flags))
                    if key in known or key in found:
                        continue
                    kids = [known[(x, y, f)] for x, y, f in zip(c1, c2, flags)]
                    found[key] = Term(a, kids)
        if not found:
            break
        witness.update(found)
    best = None
    for (p, q, f), t in witness.items():
        if f and p in A.final and q in A.final:
            if best is None or (t.height, t.size, str(t)) < (best.height, best.size, str(best)):
                best = t
    return best


def is_unambiguous(A: Wta) -> bool:
    return decide_ambiguity(A) is None
