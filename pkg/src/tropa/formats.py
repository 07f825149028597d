"""Text formats: automata, certificates and materialized state names.

Automaton files look like::

    alphabet { e/0, a/1, b/2 }
    mode max            # or: min
    states q0 q1
    final q0 : 0
    trans e() -> q0 : 1/2
    trans b(q0,q1) -> q0 : -2
"""

from __future__ import annotations

import re
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable, Optional
from urllib.parse import quote, unquote

from .errors import AutomatonSyntaxError
from .terms import RankedAlphabet, TermSyntaxError, format_alphabet, parse_alphabet
from .wta import MAX, MIN, Transition, Wta

_NAME = r"[^\s(),:#{}]+"
_WEIGHT = r"[-+]?[0-9./eE+-]+"
_FINAL_RE = re.compile(rf"final\s+({_NAME})(?:\s*:\s*({_WEIGHT}))?$")
_TRANS_RE = re.compile(
    rf"trans\s+({_NAME})\s*\(([^)]*)\)\s*->\s*({_NAME})(?:\s*:\s*({_WEIGHT}))?$"
)
_ALPHA_RE = re.compile(r"alphabet\s*\{(.*)\}$")

FIXTURES = ("E1max", "E1min", "E2min", "AMB", "SWmax", "SWmin", "B2max", "B2min")


def parse_weight(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise AutomatonSyntaxError(f"bad weight {text!r}") from None


def parse_wta(text: str) -> Wta:
    alphabet: Optional[RankedAlphabet] = None
    mode: Optional[str] = None
    states: list[str] = []
    final: dict[str, Fraction] = {}
    transitions: dict[Transition, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue

        def fail(msg: str):
            raise AutomatonSyntaxError(f"line {lineno}: {msg}: {raw.strip()!r}")

        keyword = line.split(None, 1)[0]
        if keyword.startswith("alphabet"):
            m = _ALPHA_RE.match(line)
            if not m:
                fail("expected 'alphabet { name/rank, ... }'")
            try:
                alphabet = parse_alphabet(m.group(1))
            except (TermSyntaxError, ValueError) as exc:
                fail(str(exc))
        elif keyword == "mode":
            value = line[4:].strip()
            if value not in (MAX, MIN):
                fail("mode must be max or min")
            mode = value
        elif keyword == "states":
            names = line.split()[1:]
            for q in names:
                if not re.fullmatch(_NAME, q):
                    fail(f"bad state name {q!r}")
                if q in states:
                    fail(f"state {q!r} declared twice")
                states.append(q)
        elif keyword == "final":
            m = _FINAL_RE.match(line)
            if not m:
                fail("expected 'final STATE : WEIGHT'")
            q = m.group(1)
            if q in final:
                fail(f"state {q!r} is final twice")
            final[q] = parse_weight(m.group(2)) if m.group(2) else Fraction(0)
        elif keyword == "trans":
            m = _TRANS_RE.match(line)
            if not m:
                fail("expected 'trans LETTER(STATE,...) -> STATE : WEIGHT'")
            inner = m.group(2).strip()
            children = tuple(p.strip() for p in inner.split(",")) if inner else ()
            tr = Transition(children, m.group(1), m.group(3))
            if tr in transitions:
                fail("duplicate transition")
            transitions[tr] = parse_weight(m.group(4)) if m.group(4) else Fraction(0)
        else:
            fail(f"unknown directive {keyword!r}")
    if alphabet is None:
        raise AutomatonSyntaxError("missing 'alphabet' line")
    if mode is None:
        raise AutomatonSyntaxError("missing 'mode' line")
    try:
        return Wta(alphabet, states, final, transitions, mode)
    except ValueError as exc:
        raise AutomatonSyntaxError(str(exc)) from None


def format_weight(w: Fraction) -> str:
    return str(w)


def format_wta(A: Wta, name: Callable[[object], str] = str) -> str:
    idx = A.state_index
    lines = [
        f"alphabet {{ {format_alphabet(A.alphabet)} }}",
        f"mode {A.mode}",
        "states " + " ".join(name(q) for q in A.states),
    ]
    for q in sorted(A.final, key=idx):
        lines.append(f"final {name(q)} : {format_weight(A.final[q])}")
    order = sorted(
        A.transitions,
        key=lambda tr: (tr.letter, tuple(idx(p) for p in tr.children), idx(tr.target)),
    )
    for tr in order:
        kids = ",".join(name(p) for p in tr.children)
        lines.append(f"trans {tr.letter}({kids}) -> {name(tr.target)} : {format_weight(A.transitions[tr])}")
    return "\n".join(lines) + "\n"


def load_wta(path) -> Wta:
    """Load an automaton from a file, or a bundled fixture via ``fixture:NAME``."""
    path = str(path)
    if path.startswith("fixture:"):
        return load_fixture(path[len("fixture:"):])
    return parse_wta(Path(path).read_text(encoding="utf-8"))


def load_fixture(name: str) -> Wta:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
    text = resources.files("tropa.fixtures").joinpath(f"{name}.wta").read_text(encoding="utf-8")
    return parse_wta(text)


# -- state sets and materialized names ----------------------------------------


def format_state_set(states, order=None) -> str:
    items = sorted(states, key=order) if order else sorted(states, key=str)
    return "{" + ", ".join(str(q) for q in items) + "}"


_NAME_SAFE = "|@.-_~!*'+=;[]<>"


def escape_name(text: str) -> str:
    """Make arbitrary text a valid state name of the automaton format."""
    return quote(text, safe=_NAME_SAFE)


def unescape_name(text: str) -> str:
    return unquote(text)
