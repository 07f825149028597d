"""Brute-force verification at desk scale.

Every check walks an exhaustive, deterministically ordered enumeration of
terms or contexts and stops at the first counterexample.  A pass is bounded
evidence only.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .errors import HypothesisViolation
from .reachprod import families, pro_automaton, prod, reach, set_key, top_down_P
from .refine import (
    ShiftCertificate,
    certificate_value_chain,
    chain_holds,
    check_certificate,
    check_refinement,
    check_refinement_by_runs,
    congruence_compose,
    pumping_shift,
    reduce_once,
    reduction_certificate,
    refinement_transitive_compose,
)
from .separator import evaluate_sep, run_sep
from .terms import RankedAlphabet, Term, enumerate_contexts, enumerate_terms, print_term
from .wta import MAX, BiAutomaton, Wta, _evaluate, disjoint_union, enumerate_runs, run_weight

PASS, FAIL, VIOLATION = "pass", "fail", "violation"


def _fmt(v) -> str:
    return "bot" if v is None else str(v)


@dataclass
class Report:
    name: str
    verdict: str = PASS
    checked: int = 0
    seconds: float = 0.0
    witness: Optional[str] = None
    detail: str = ""
    values: dict = field(default_factory=dict)
    parts: list["Report"] = field(default_factory=list)
    rows: list = field(default_factory=list, repr=False)

    @property
    def ok(self) -> bool:
        return self.verdict == PASS

    def fail(self, witness, detail: str, **values) -> "Report":
        self.verdict = FAIL
        self.witness = witness if isinstance(witness, str) or witness is None else print_term(witness)
        self.detail = detail
        self.values = {k: _fmt(v) if v is None or isinstance(v, Fraction) else v for k, v in values.items()}
        return self

    def violation(self, exc: HypothesisViolation) -> "Report":
        self.verdict = VIOLATION
        self.witness = None if exc.witness is None else print_term(exc.witness)
        self.detail = str(exc)
        return self

    def merge(self, other: "Report") -> "Report":
        """Combine two partial reports of the same check; the earlier failure wins."""
        out = Report(self.name, checked=self.checked + other.checked,
                     seconds=self.seconds + other.seconds, rows=self.rows + other.rows)
        first = self if not self.ok else other if not other.ok else None
        if first is not None:
            out.verdict, out.witness, out.detail, out.values = (
                first.verdict, first.witness, first.detail, first.values
            )
        return out

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "verdict": self.verdict,
            "checked": self.checked,
            "seconds": round(self.seconds, 3),
        }
        if self.witness is not None:
            d["witness"] = self.witness
        if self.detail:
            d["detail"] = self.detail
        if self.values:
            d["values"] = self.values
        if self.parts:
            d["parts"] = [p.to_dict() for p in self.parts]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def to_text(self, indent: int = 0) -> str:
        pad = "  " * indent
        line = f"{pad}{self.name}: {self.verdict.upper()} ({self.checked} checked, {self.seconds:.2f}s)"
        lines = [line]
        if self.witness is not None:
            lines.append(f"{pad}  witness: {self.witness}")
        if self.detail:
            lines.append(f"{pad}  {self.detail}")
        for k, v in self.values.items():
            lines.append(f"{pad}  {k} = {v}")
        for p in self.parts:
            lines.append(p.to_text(indent + 1))
        return "\n".join(lines)


def aggregate(name: str, parts: list[Report]) -> Report:
    out = Report(name, parts=parts)
    out.checked = sum(p.checked for p in parts)
    out.seconds = sum(p.seconds for p in parts)
    bad = [p for p in parts if not p.ok]
    if bad:
        out.verdict = VIOLATION if any(p.verdict == VIOLATION for p in bad) else FAIL
        out.detail = "failing: " + ", ".join(p.name for p in bad)
    return out


def default_height(alphabet: RankedAlphabet) -> int:
    return 10 if alphabet.max_rank <= 1 else 4


class _Clock:
    def __init__(self, report: Report):
        self.report = report

    def __enter__(self):
        self.start = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.seconds += time.perf_counter() - self.start
        return False


# -- whole-function checks -----------------------------------------------------


def _scan_hypothesis(amax: Wta, amin: Wta, terms: list[Term]) -> Report:
    rep = Report("hypothesis")
    for s in terms:
        vmax, vmin = _evaluate(amax, s), _evaluate(amin, s)
        rep.checked += 1
        if (vmax is None) != (vmin is None):
            return rep.fail(s, "supports differ", max=vmax, min=vmin)
        if vmax is not None and vmax > vmin:
            return rep.fail(s, "max automaton exceeds min automaton", max=vmax, min=vmin)
    return rep


def _scan_separation(amax: Wta, amin: Wta, terms: list[Term], record: bool = False) -> Report:
    biA = disjoint_union(amax, amin)
    rep = Report("separation")
    for s in terms:
        vmax, vmin = _evaluate(biA.max_half, s), _evaluate(biA.min_half, s)
        try:
            v = evaluate_sep(biA, s)
        except HypothesisViolation as exc:
            return rep.violation(exc)
        rep.checked += 1
        if record:
            rep.rows.append((print_term(s), vmax, v, vmin))
        if vmax is None or v is None or vmin is None:
            if not (vmax is None and v is None and vmin is None):
                return rep.fail(s, "undefined values do not coincide", max=vmax, sep=v, min=vmin)
        elif not vmax <= v <= vmin:
            return rep.fail(s, "separator leaves the interval", max=vmax, sep=v, min=vmin)
    return rep


def _scan_corollary(amax: Wta, amin: Wta, terms: list[Term]) -> Report:
    biA = disjoint_union(amax, amin)
    rep = Report("corollary")
    for s in terms:
        vmax, vmin = _evaluate(biA.max_half, s), _evaluate(biA.min_half, s)
        rep.checked += 1
        if vmax != vmin:
            return rep.fail(s, "not a corollary instance: the two automata differ", max=vmax, min=vmin)
        try:
            v = evaluate_sep(biA, s)
        except HypothesisViolation as exc:
            return rep.violation(exc)
        if v != vmax:
            return rep.fail(s, "separator differs from the common value", max=vmax, sep=v, min=vmin)
    return rep


_SCANS = {"hypothesis": _scan_hypothesis, "separation": _scan_separation, "corollary": _scan_corollary}


def _scan_chunk(kind, amax, amin, texts, record):
    from .terms import parse_term

    terms = [parse_term(t) for t in texts]
    if kind == "separation":
        return _scan_separation(amax, amin, terms, record)
    return _SCANS[kind](amax, amin, terms)


def _scan(kind: str, amax: Wta, amin: Wta, H: int, workers: int = 1, record: bool = False) -> Report:
    terms = list(enumerate_terms(amax.alphabet, H))
    start = time.perf_counter()
    if workers <= 1 or len(terms) < 2 * workers:
        rep = _scan_separation(amax, amin, terms, record) if kind == "separation" else _SCANS[kind](amax, amin, terms)
    else:
        size = -(-len(terms) // workers)
        chunks = [[print_term(t) for t in terms[i:i + size]] for i in range(0, len(terms), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_chunk, [kind] * len(chunks), [amax] * len(chunks),
                                  [amin] * len(chunks), chunks, [record] * len(chunks)))
        rep = parts[0]
        for p in parts[1:]:
            rep = rep.merge(p)
    rep.seconds = time.perf_counter() - start
    return rep


def check_hypothesis(amax: Wta, amin: Wta, H: int, workers: int = 1) -> Report:
    """``max <= min`` with equal supports on every term of height at most ``H``."""
    if amax.alphabet != amin.alphabet:
        return Report("hypothesis").fail(None, "alphabets differ")
    return _scan("hypothesis", amax, amin, H, workers)


def verify_separation(amax: Wta, amin: Wta, H: int, workers: int = 1, record: bool = False) -> Report:
    """``max <= separator <= min`` exactly on every term of height at most ``H``."""
    return _scan("separation", amax, amin, H, workers, record)


def check_lm_corollary(amax: Wta, amin: Wta, H: int, workers: int = 1) -> Report:
    """The separator equals both automata on every term of height at most ``H``."""
    return _scan("corollary", amax, amin, H, workers)


# -- lemma-level checks ---------------------------------------------------------


def _productive(biA: BiAutomaton) -> list[frozenset]:
    return sorted(families(biA).productive, key=lambda S: set_key(biA, S))


def _reachable(biA: BiAutomaton) -> list[frozenset]:
    return sorted(families(biA).reachable, key=lambda S: set_key(biA, S))


def _names(S) -> str:
    return "{" + ", ".join(sorted(map(str, S))) + "}"


def check_reflexivity(biA: BiAutomaton, terms: Iterable[Term]) -> Report:
    rep = Report("reflexivity")
    with _Clock(rep):
        for s in terms:
            for P in _productive(biA):
                rep.checked += 1
                if not check_refinement(biA, s, s, P, 0):
                    return rep.fail(s, f"does not refine itself for {_names(P)}")
    return rep


def check_transitivity(biA: BiAutomaton, terms: Iterable[Term], shift_mutation=0) -> Report:
    """Chain the single reduction steps and re-validate every composite."""
    rep = Report("transitivity")
    with _Clock(rep):
        for s in terms:
            for P in _productive(biA):
                try:
                    cert = ShiftCertificate(s, s, P, Fraction(0))
                    cur = s
                    while (red := reduce_once(biA, cur, P)) is not None:
                        step = ShiftCertificate(cur, red.t, P, red.x)
                        cert = refinement_transitive_compose(cert, step)
                        cur = red.t
                        rep.checked += 1
                        if not check_certificate(biA, cert.shifted(shift_mutation)):
                            return rep.fail(s, f"composite {print_term(cur)} (shift {cert.x}) "
                                               f"fails for {_names(P)}")
                except HypothesisViolation as exc:
                    return rep.violation(exc)
    return rep


def check_congruence(biA: BiAutomaton, terms: Iterable[Term], shift_mutation=0) -> Report:
    rep = Report("congruence")
    with _Clock(rep):
        for s in terms:
            if not s.children:
                continue
            Rs = [reach(biA, c) for c in s.children]
            for P in _productive(biA):
                try:
                    kids = [
                        reduction_certificate(biA, c, top_down_P(biA, s.letter, Rs, P, i))
                        for i, c in enumerate(s.children)
                    ]
                except HypothesisViolation as exc:
                    return rep.violation(exc)
                cert = congruence_compose(biA, s.letter, kids, P)
                rep.checked += 1
                if not check_certificate(biA, cert.shifted(shift_mutation)):
                    return rep.fail(s, f"lifted certificate fails for {_names(P)}", shift=cert.x)
    return rep


def contexts_by_prod(biA: BiAutomaton, contexts: Iterable[Term]) -> dict:
    out: dict[frozenset, list[Term]] = {}
    for c in contexts:
        out.setdefault(prod(biA, c), []).append(c)
    return out


def check_shift_refine_improves(
    biA: BiAutomaton,
    certs: Iterable[ShiftCertificate],
    contexts: Iterable[Term],
    shift_mutation=0,
) -> Report:
    """The four-value chain around every context whose productive set is the certificate's."""
    rep = Report("shift-refine-improves")
    with _Clock(rep):
        grouped = contexts_by_prod(biA, contexts)
        for cert in certs:
            cert = cert.shifted(shift_mutation)
            for c in grouped.get(cert.P, ()):
                rep.checked += 1
                vals = certificate_value_chain(biA, cert, c)
                if not chain_holds(vals):
                    return rep.fail(
                        c,
                        f"chain broken for s={print_term(cert.s)} t={print_term(cert.t)} "
                        f"P={_names(cert.P)} x={cert.x}",
                        max_cs=vals[0], max_ct_x=vals[1], min_ct_x=vals[2], min_cs=vals[3],
                    )
    return rep


def check_pumping(biA: BiAutomaton, contexts: Iterable[Term]) -> Report:
    """Every enumerated cycle weight sits on the correct side of the pumping shift."""
    rep = Report("pumping")
    pairs = [(P, R) for P in _productive(biA) for R in _reachable(biA)]
    with _Clock(rep):
        for m in contexts:
            if not m.children:
                continue
            cycles = {}
            for p in biA.states:
                cycles[p] = [run_weight(biA, m, r) for r in enumerate_runs(biA, m, hole_state=p)
                             if r[()] == p]
            for P, R in pairs:
                try:
                    x = pumping_shift(biA, m, P, R)
                except HypothesisViolation as exc:
                    return rep.violation(exc)
                for p in P & R:
                    for w in cycles[p]:
                        rep.checked += 1
                        ok = w <= x if biA.state_mode(p) == MAX else x <= w
                        if not ok:
                            return rep.fail(m, f"cycle at {p} for P={_names(P)} R={_names(R)}",
                                            cycle_weight=w, shift=x)
    return rep


def check_lookahead(biA: BiAutomaton, terms: Iterable[Term], contexts: Iterable[Term]) -> Report:
    """Exactly one annotation run per productive set (terms) / reachable set (contexts)."""
    rep = Report("lookahead")
    with _Clock(rep):
        pro = pro_automaton(biA)
        productive, reachable = _productive(biA), _reachable(biA)
        for t in terms:
            roots = [r[()] for r in enumerate_runs(pro, t)]
            R_t = reach(biA, t)
            for P in productive:
                rep.checked += 1
                hits = [st for st in roots if st.P == P]
                if len(hits) != 1:
                    return rep.fail(t, f"{len(hits)} annotation runs to P={_names(P)}")
                if hits[0].R != R_t:
                    return rep.fail(t, "annotation R differs from Reach(t)",
                                    annotated=_names(hits[0].R), reach=_names(R_t))
        for c in contexts:
            P_c = prod(biA, c)
            hole = c.hole_path()
            runs = [r for r in enumerate_runs(pro, c) if r[()] in pro.final]
            for R in reachable:
                rep.checked += 1
                hits = [r[hole] for r in runs if r[hole].R == R]
                if len(hits) != 1:
                    return rep.fail(c, f"{len(hits)} accepting annotation runs from R={_names(R)}")
                if hits[0].P != P_c:
                    return rep.fail(c, "annotation P differs from Prod(c)",
                                    annotated=_names(hits[0].P), prod=_names(P_c))
    return rep


def check_sep_chain(biA: BiAutomaton, terms: Iterable[Term]) -> Report:
    """At every node of every separator run, the representative refines the subterm."""
    rep = Report("sep-chain")
    with _Clock(rep):
        for s in terms:
            try:
                run = run_sep(biA, s)
            except HypothesisViolation as exc:
                return rep.violation(exc)
            for path, st in run.states.items():
                rep.checked += 1
                sub = s.subterm(path)
                if not check_refinement(biA, sub, st.t, st.P, run.below[path]):
                    return rep.fail(s, f"node {list(path)}: {print_term(st.t)} does not refine "
                                       f"{print_term(sub)} with shift {run.below[path]}")
    return rep


def check_refinement_equivalence(
    biA: BiAutomaton, terms: list[Term], shifts: Iterable[Fraction]
) -> Report:
    """Optimal-weight decision versus the per-run definition, on all pairs and state sets."""
    rep = Report("refinement-equivalence")
    subsets = _all_subsets(biA)
    shifts = list(shifts)
    with _Clock(rep):
        for s in terms:
            for t in terms:
                for P in subsets:
                    for x in shifts:
                        rep.checked += 1
                        fast = check_refinement(biA, s, t, P, x)
                        slow = check_refinement_by_runs(biA, s, t, P, x)
                        if fast != slow:
                            return rep.fail(
                                f"s={print_term(s)} t={print_term(t)}",
                                f"P={_names(P)} x={x}: optimal-weight says {fast}, runs say {slow}",
                            )
    return rep


def _all_subsets(biA: BiAutomaton) -> list[frozenset]:
    states = list(biA.states)
    out = []
    for mask in range(1 << len(states)):
        out.append(frozenset(q for i, q in enumerate(states) if mask >> i & 1))
    return out


def verify_lemma_suite(biA: BiAutomaton, H: int, shift_mutation=0) -> Report:
    """Every lemma-level oracle, over terms of height <= H and contexts of height <= H-1.

    The four-value chain is checked for reductions of terms of height <= H-1.

    ``shift_mutation`` is added to every certificate shift before checking;
    a non-zero value must make the suite fail.
    """
    terms = list(enumerate_terms(biA.alphabet, H))
    contexts = list(enumerate_contexts(biA.alphabet, H - 1))
    parts = [check_reflexivity(biA, terms)]
    parts.append(check_transitivity(biA, terms, shift_mutation))
    parts.append(check_congruence(biA, terms, shift_mutation))
    # Certificates come from terms no taller than the contexts; every chain
    # then covers composites up to height 2H-1.
    certs = []
    for s in terms:
        if s.height > H - 1:
            break
        for P in _productive(biA):
            try:
                certs.append(reduction_certificate(biA, s, P))
            except HypothesisViolation:
                break
    parts.append(check_shift_refine_improves(biA, certs, contexts, shift_mutation))
    parts.append(check_pumping(biA, contexts))
    parts.append(check_lookahead(biA, terms, contexts))
    parts.append(check_sep_chain(biA, terms))
    return aggregate("lemmas", parts)
