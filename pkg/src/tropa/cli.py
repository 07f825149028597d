"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 hypothesis violation,
3 resource budget exceeded, 64 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .errors import AutomatonSyntaxError, BudgetExceeded, HypothesisViolation
from .formats import FIXTURES, format_wta, load_fixture, load_wta
from .oracle import (
    aggregate,
    check_hypothesis,
    check_lm_corollary,
    default_height,
    verify_lemma_suite,
    verify_separation,
)
from .reachprod import families, prod, reach, set_key
from .refine import ShiftCertificate, check_certificate
from .separator import evaluate_sep, materialize, run_sep, sep_state_name, sidecar
from .terms import ArityError, TermSyntaxError, parse_context, parse_term, print_term, word_to_term
from .wta import MAX, MIN, AlphabetMismatch, disjoint_union, evaluate

EXIT_OK, EXIT_FAIL, EXIT_VIOLATION, EXIT_BUDGET, EXIT_USAGE = 0, 1, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _value(v) -> str:
    return "bot" if v is None else str(v)


def _load(path):
    try:
        return load_wta(path)
    except (OSError, KeyError, AutomatonSyntaxError) as exc:
        raise UsageError(f"cannot load automaton {path}: {exc}") from None


def _input_term(alphabet, term: Optional[str], word: Optional[str]):
    try:
        if term is not None:
            return parse_term(term, alphabet)
        return word_to_term(word, alphabet)
    except (TermSyntaxError, ArityError) as exc:
        raise UsageError(str(exc)) from None


def _fmt_set(biA, S) -> str:
    return "{" + ", ".join(str(q) for q in sorted(S, key=biA.state_index)) + "}"


def _pair(max_path, min_path):
    """Load a pair; the flag, not the file's mode line, decides each role."""
    amax, amin = _load(max_path), _load(min_path)
    if amax.mode != MAX:
        amax = amax.with_mode(MAX)
    if amin.mode != MIN:
        amin = amin.with_mode(MIN)
    try:
        return amax, amin, disjoint_union(amax, amin)
    except (ValueError, AlphabetMismatch) as exc:
        raise UsageError(str(exc)) from None


def _print_violation(exc: HypothesisViolation, out) -> None:
    print(f"hypothesis violation: {exc}", file=out)
    if exc.witness is not None:
        print(f"witness: {print_term(exc.witness)}", file=out)


# -- subcommands -----------------------------------------------------------------


def cmd_eval(args, out) -> int:
    A = _load(args.automaton)
    t = _input_term(A.alphabet, args.term, args.word)
    print(_value(evaluate(A, t)), file=out)
    return EXIT_OK


def _bi(args):
    return _pair(args.max, args.min)


def cmd_separate(args, out) -> int:
    amax, amin, biA = _bi(args)
    if args.check is not None:
        rep = check_hypothesis(amax, amin, args.check)
        if not rep.ok:
            print(f"hypothesis fails at height <= {args.check}: {rep.detail}", file=out)
            for k, v in rep.values.items():
                print(f"{k} = {v}", file=out)
            print(f"witness: {rep.witness}", file=out)
            return EXIT_VIOLATION
        print(f"hypothesis holds on {rep.checked} terms of height <= {args.check} (bounded check)",
              file=out)
    inputs = [_input_term(biA.alphabet, t, None) for t in args.eval_term or []]
    inputs += [_input_term(biA.alphabet, None, w) for w in args.eval_word or []]
    try:
        for s in inputs:
            if args.trace:
                run = run_sep(biA, s)
                for path, st in sorted(run.states.items(), key=lambda kv: (len(kv[0]), kv[0])):
                    print(f"  node {list(path)}: R={_fmt_set(biA, st.R)} P={_fmt_set(biA, st.P)} "
                          f"t={print_term(st.t)} shift={run.shifts[path]} below={run.below[path]}",
                          file=out)
            print(f"{print_term(s)}\t{_value(evaluate_sep(biA, s))}", file=out)
        if args.materialize:
            A = materialize(biA, args.budget)
            text = format_wta(A, lambda st: sep_state_name(biA, st))
            if args.out:
                Path(args.out).write_text(text, encoding="utf-8")
                Path(str(args.out) + ".states.json").write_text(sidecar(biA, A), encoding="utf-8")
                print(f"wrote {len(A.states)} states, {len(A.transitions)} transitions to {args.out}",
                      file=out)
            else:
                out.write(text)
        if args.report_dir:
            from .plotting import write_report_artifacts

            H = args.height if args.height is not None else default_height(biA.alphabet)
            rep = verify_separation(amax, amin, H, record=True)
            for p in write_report_artifacts(rep.rows, args.report_dir, title=f"height <= {H}"):
                print(f"wrote {p}", file=out)
    except HypothesisViolation as exc:
        _print_violation(exc, out)
        return EXIT_VIOLATION
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc} (frontier {exc.frontier})", file=out)
        return EXIT_BUDGET
    return EXIT_OK


def cmd_verify(args, out) -> int:
    amax, amin, biA = _bi(args)
    if args.certificate:
        try:
            cert = ShiftCertificate.from_json(Path(args.certificate).read_text(), biA.alphabet)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read certificate: {exc}") from None
        ok = check_certificate(biA, cert)
        print("valid" if ok else "invalid", file=out)
        return EXIT_OK if ok else EXIT_FAIL
    H = args.height if args.height is not None else default_height(biA.alphabet)
    suites = ["hypothesis", "separation", "lemmas"] if args.suite == "all" else [args.suite]
    parts = []
    for name in suites:
        if name == "hypothesis":
            parts.append(check_hypothesis(amax, amin, H, workers=args.workers))
        elif name == "separation":
            parts.append(verify_separation(amax, amin, H, workers=args.workers,
                                           record=bool(args.report_dir)))
        elif name == "corollary":
            parts.append(check_lm_corollary(amax, amin, H, workers=args.workers))
        elif name == "lemmas":
            parts.append(verify_lemma_suite(biA, H))
    rep = aggregate(f"verify (height <= {H})", parts)
    if args.report_dir:
        from .plotting import write_report_artifacts

        rows = next((p.rows for p in parts if p.name == "separation"), None)
        if rows is None:
            rows = verify_separation(amax, amin, H, record=True).rows
        write_report_artifacts(rows, args.report_dir, title=f"height <= {H}")
    print(rep.to_json() if args.json else rep.to_text(), file=out)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_reachprod(args, out) -> int:
    _, _, biA = _pair(*args.bi_of)
    try:
        if args.term is not None:
            print(_fmt_set(biA, reach(biA, parse_term(args.term, biA.alphabet))), file=out)
        if args.context is not None:
            print(_fmt_set(biA, prod(biA, parse_context(args.context, biA.alphabet))), file=out)
    except (TermSyntaxError, ArityError) as exc:
        raise UsageError(str(exc)) from None
    if args.families or (args.term is None and args.context is None):
        fam = families(biA)
        for R in sorted(fam.reachable, key=lambda S: set_key(biA, S)):
            print(f"reachable {_fmt_set(biA, R)}  e.g. {print_term(fam.reach_witness[R])}", file=out)
        for P in sorted(fam.productive, key=lambda S: set_key(biA, S)):
            print(f"productive {_fmt_set(biA, P)}  e.g. {print_term(fam.prod_witness[P])}", file=out)
    return EXIT_OK


def cmd_fixtures(args, out) -> int:
    if args.name:
        try:
            out.write(format_wta(load_fixture(args.name)))
        except KeyError as exc:
            raise UsageError(str(exc)) from None
    else:
        for name in FIXTURES:
            print(name, file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tropa", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate an automaton on a term or word")
    p.add_argument("--automaton", required=True, help="automaton file or fixture:NAME")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--term")
    g.add_argument("--word", help="word over unary letters, read as a unary tree")
    p.set_defaults(func=cmd_eval)

    def pair(p):
        p.add_argument("--max", required=True, help="max automaton file or fixture:NAME")
        p.add_argument("--min", required=True, help="min automaton file or fixture:NAME")

    p = sub.add_parser("separate", help="build and run the separating automaton")
    pair(p)
    p.add_argument("--check", type=int, metavar="H", help="bounded hypothesis check first")
    p.add_argument("--eval-term", action="append", metavar="TERM")
    p.add_argument("--eval-word", action="append", metavar="WORD")
    p.add_argument("--trace", action="store_true", help="print the separator run node by node")
    p.add_argument("--materialize", action="store_true")
    p.add_argument("--budget", type=int, default=1000, help="state budget for --materialize")
    p.add_argument("--out", help="output file for --materialize (default: stdout)")
    p.add_argument("--report-dir", help="write separation.csv and separation.png here")
    p.add_argument("--height", type=int, help="height bound for --report-dir")
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("verify", help="bounded brute-force verification")
    pair(p)
    p.add_argument("--height", type=int)
    p.add_argument("--suite", default="all",
                   choices=["all", "hypothesis", "separation", "lemmas", "corollary"])
    p.add_argument("--certificate", help="check a JSON refinement certificate instead")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.add_argument("--report-dir", help="write separation.csv and separation.png here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reachprod", help="reachable / productive state sets")
    p.add_argument("--bi-of", nargs=2, required=True, metavar=("MAX", "MIN"))
    p.add_argument("--term")
    p.add_argument("--context")
    p.add_argument("--families", action="store_true")
    p.set_defaults(func=cmd_reachprod)

    p = sub.add_parser("fixtures", help="list or print the bundled fixtures")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"tropa: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AlphabetMismatch as exc:
        print(f"tropa: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
