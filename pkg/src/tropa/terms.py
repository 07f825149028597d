"""Ranked alphabets, terms and contexts.

Terms are immutable trees.  A context is an ordinary :class:`Term` that
contains exactly one occurrence of the reserved hole letter ``□``.
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Iterator, Mapping, Optional, Sequence

HOLE = "□"

NodePath = tuple  # tuple[int, ...], child indices from the root


class TermSyntaxError(ValueError):
    """Malformed term or alphabet text."""

    def __init__(self, message: str, position: Optional[int] = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ArityError(ValueError):
    pass


class RankedAlphabet(Mapping[str, int]):
    """Finite map from letter name to rank."""

    def __init__(self, letters: Mapping[str, int] | Iterable[tuple[str, int]]):
        items = letters.items() if isinstance(letters, Mapping) else letters
        ranks: dict[str, int] = {}
        for name, rank in items:
            if name == HOLE:
                raise ValueError(f"{HOLE!r} is reserved for the context hole")
            if not _NAME_RE.fullmatch(name):
                raise ValueError(f"invalid letter name {name!r}")
            if name in ranks:
                raise ValueError(f"duplicate letter {name!r}")
            if rank < 0:
                raise ValueError(f"negative rank for {name!r}")
            ranks[name] = int(rank)
        if not any(r == 0 for r in ranks.values()):
            raise ValueError("alphabet needs at least one letter of rank 0")
        self._ranks = dict(sorted(ranks.items()))

    def __getitem__(self, name: str) -> int:
        return self._ranks[name]

    def __iter__(self):
        return iter(self._ranks)

    def __len__(self):
        return len(self._ranks)

    def __hash__(self):
        return hash(tuple(self._ranks.items()))

    def __eq__(self, other):
        if isinstance(other, RankedAlphabet):
            return self._ranks == other._ranks
        return NotImplemented

    def __repr__(self):
        return f"RankedAlphabet({format_alphabet(self)})"

    def letters_of_rank(self, n: int) -> list[str]:
        return [a for a, r in self._ranks.items() if r == n]

    @property
    def max_rank(self) -> int:
        return max(self._ranks.values())

    def check(self, t: "Term") -> None:
        """Raise :class:`ArityError` if ``t`` is not a term (or context) over this alphabet."""
        for node in t.iter_nodes():
            if node.letter == HOLE:
                continue
            if node.letter not in self._ranks:
                raise ArityError(f"unknown letter {node.letter!r}")
            if self._ranks[node.letter] != len(node.children):
                raise ArityError(
                    f"letter {node.letter!r} has rank {self._ranks[node.letter]}, "
                    f"got {len(node.children)} children"
                )


class Term:
    """An immutable ranked tree.

    Height and size are computed at construction; the hash is cached so that
    terms can be used as dictionary keys cheaply.
    """

    __slots__ = ("letter", "children", "height", "size", "holes", "_hash")

    def __init__(self, letter: str, children: Sequence["Term"] = ()):
        children = tuple(children)
        self.letter = letter
        self.children = children
        if children:
            self.height = 1 + max(c.height for c in children)
            self.size = 1 + sum(c.size for c in children)
            self.holes = sum(c.holes for c in children)
        else:
            self.height = 0
            self.size = 1
            self.holes = 1 if letter == HOLE else 0
        self._hash = hash((letter, children))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        if self._hash != other._hash:
            return False
        if self.height < 256:
            return self.letter == other.letter and self.children == other.children
        stack = [(self, other)]
        while stack:
            x, y = stack.pop()
            if x is y:
                continue
            if (x._hash != y._hash or x.letter != y.letter
                    or len(x.children) != len(y.children)):
                return False
            stack.extend(zip(x.children, y.children))
        return True

    def __lt__(self, other: "Term") -> bool:
        return term_key(self) < term_key(other)

    def __repr__(self):
        return f"Term({print_term(self)!r})"

    def __str__(self):
        return print_term(self)

    @property
    def is_context(self) -> bool:
        return self.holes == 1

    def iter_nodes(self) -> Iterator["Term"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def paths(self) -> Iterator[tuple[NodePath, "Term"]]:
        """Pre-order ``(path, subterm)`` pairs."""
        stack: list[tuple[NodePath, Term]] = [((), self)]
        while stack:
            path, node = stack.pop()
            yield path, node
            for i in reversed(range(len(node.children))):
                stack.append((path + (i,), node.children[i]))

    def subterm(self, path: NodePath) -> "Term":
        node = self
        for i in path:
            node = node.children[i]
        return node

    def replace(self, path: NodePath, new: "Term") -> "Term":
        if not path:
            return new
        i = path[0]
        kids = list(self.children)
        kids[i] = kids[i].replace(path[1:], new)
        return Term(self.letter, kids)

    def hole_path(self) -> NodePath:
        if self.holes != 1:
            raise ValueError(f"{self} is not a context")
        path = []
        node = self
        while node.letter != HOLE:
            for i, c in enumerate(node.children):
                if c.holes:
                    path.append(i)
                    node = c
                    break
        return tuple(path)


def term_key(t: Term):
    """Sort key consistent with the enumeration order: height, then letters."""
    return (t.height, t.letter, tuple(term_key(c) for c in t.children))


def leaf(letter: str) -> Term:
    return Term(letter, ())


HOLE_TERM = Term(HOLE)


def compose(c: Term, t: Term) -> Term:
    """Plug ``t`` into the hole of context ``c``."""
    if not c.holes:
        raise ValueError(f"{c} has no hole")
    if c.letter == HOLE:
        return t
    kids = tuple(compose(k, t) if k.holes else k for k in c.children)
    return Term(c.letter, kids)


def height(t: Term) -> int:
    return t.height


def size(t: Term) -> int:
    return t.size


def longest_branch(t: Term) -> list[NodePath]:
    """Node paths of the leftmost longest root-to-leaf branch."""
    path: list[int] = []
    out = [()]
    node = t
    while node.children:
        best = max(range(len(node.children)), key=lambda i: (node.children[i].height, -i))
        path.append(best)
        out.append(tuple(path))
        node = node.children[best]
    return out


def _terms_by_height(alphabet: RankedAlphabet, h: int) -> list[list[Term]]:
    layers: list[list[Term]] = [[leaf(a) for a in alphabet.letters_of_rank(0)]]
    upto: list[Term] = list(layers[0])
    for k in range(1, h + 1):
        layer = []
        for a, n in alphabet.items():
            if n == 0:
                continue
            for kids in itertools.product(upto, repeat=n):
                if max(c.height for c in kids) == k - 1:
                    layer.append(Term(a, kids))
        layers.append(layer)
        upto = upto + layer
    return layers


def enumerate_terms(alphabet: RankedAlphabet, h: int) -> Iterator[Term]:
    """Every term of height at most ``h``, height-major then by letter name."""
    if h < 0:
        return
    for layer in _terms_by_height(alphabet, h):
        yield from layer


def enumerate_contexts(alphabet: RankedAlphabet, h: int) -> Iterator[Term]:
    """Every context of height at most ``h``; same ordering discipline as terms.

    Within a letter, contexts are ordered by hole position, then by children.
    """
    if h < 0:
        return
    term_layers = _terms_by_height(alphabet, max(h - 1, 0))
    yield HOLE_TERM
    terms_upto: list[Term] = []
    ctx_upto: list[Term] = [HOLE_TERM]
    for k in range(1, h + 1):
        terms_upto = terms_upto + term_layers[k - 1]
        layer = []
        for a, n in alphabet.items():
            if n == 0:
                continue
            for i in range(n):
                pools = [ctx_upto if j == i else terms_upto for j in range(n)]
                for kids in itertools.product(*pools):
                    if max(c.height for c in kids) == k - 1:
                        layer.append(Term(a, kids))
        ctx_upto = ctx_upto + layer
        yield from layer


def count_terms(alphabet: RankedAlphabet, h: int) -> int:
    """Number of terms of height at most ``h`` (closed recurrence)."""
    total = 0
    for _ in range(h + 1):
        total = sum(total**n for n in alphabet.values())
    return total


# -- text format ----------------------------------------------------------

_NAME_RE = re.compile(r"[^\s(),/{}#:□]+")
_TOKEN_RE = re.compile(r"\s*(?:(?P<name>[^\s(),/{}#:□]+)|(?P<hole>□)|(?P<punct>[(),]))")


def print_term(t: Term) -> str:
    if t.letter == HOLE:
        return HOLE
    parts = []
    stack: list = [t]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
            continue
        if item.letter == HOLE:
            parts.append(HOLE)
            continue
        parts.append(item.letter + "(")
        stack.append(")")
        for i in reversed(range(len(item.children))):
            stack.append(item.children[i])
            if i:
                stack.append(",")
    return "".join(parts)


def parse_term(text: str, alphabet: Optional[RankedAlphabet] = None) -> Term:
    """Parse ``letter(child,...,child)`` notation; ``□`` is the hole."""
    pos = 0
    n = len(text)

    def next_token():
        nonlocal pos
        m = _TOKEN_RE.match(text, pos)
        if not m:
            rest = text[pos:].lstrip()
            if not rest:
                return None, None, n
            return "error", None, n - len(rest)
        start = m.start(m.lastgroup)
        pos = m.end()
        return m.lastgroup, m.group(m.lastgroup), start

    def peek():
        nonlocal pos
        saved = pos
        tok = next_token()
        pos = saved
        return tok

    # explicit stack of (letter, children) frames
    frames: list[tuple[str, list[Term]]] = []
    result: Optional[Term] = None
    while True:
        kind, val, at = next_token()
        if kind == "hole":
            node = HOLE_TERM
        elif kind == "name":
            k2, v2, at2 = next_token()
            if k2 != "punct" or v2 != "(":
                raise TermSyntaxError(f"expected '(' after {val!r}", at2)
            k3, v3, at3 = peek()
            if k3 == "punct" and v3 == ")":
                next_token()
                node = Term(val, ())
            else:
                frames.append((val, []))
                continue
        elif kind is None:
            raise TermSyntaxError("unexpected end of input", at)
        else:
            raise TermSyntaxError(f"unexpected {text[at]!r}", at)
        # node complete: attach and close finished frames
        while True:
            if not frames:
                result = node
                break
            frames[-1][1].append(node)
            k, v, at = next_token()
            if k == "punct" and v == ",":
                break
            if k == "punct" and v == ")":
                letter, kids = frames.pop()
                node = Term(letter, kids)
                continue
            if k is None:
                raise TermSyntaxError("unexpected end of input, expected ',' or ')'", at)
            raise TermSyntaxError("expected ',' or ')'", at)
        if result is not None:
            break
    k, v, at = next_token()
    if k is not None:
        raise TermSyntaxError("trailing input", at)
    if result.holes > 1:
        raise TermSyntaxError("more than one hole")
    if alphabet is not None:
        alphabet.check(result)
    return result


def parse_context(text: str, alphabet: Optional[RankedAlphabet] = None) -> Term:
    c = parse_term(text, alphabet)
    if c.holes != 1:
        raise TermSyntaxError(f"context {text!r} must contain exactly one {HOLE}")
    return c


def parse_alphabet(text: str) -> RankedAlphabet:
    """Parse ``name/rank`` entries separated by newlines or commas."""
    letters = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        for item in line.split(","):
            item = item.strip()
            if not item:
                continue
            name, sep, rank = item.partition("/")
            if not sep or not rank.strip().isdigit():
                raise TermSyntaxError(f"line {lineno}: expected name/rank, got {item!r}")
            letters.append((name.strip(), int(rank)))
    return RankedAlphabet(letters)


def format_alphabet(alphabet: RankedAlphabet) -> str:
    return ", ".join(f"{a}/{n}" for a, n in alphabet.items())


def word_to_term(word: str, alphabet: RankedAlphabet) -> Term:
    """Encode a word as a unary tree; ``"ab"`` becomes ``a(b(end()))``.

    The alphabet must consist of unary letters plus exactly one constant.
    Letters are single characters unless the word contains whitespace, in
    which case it is split on whitespace.
    """
    constants = alphabet.letters_of_rank(0)
    others = [a for a, n in alphabet.items() if n != 0]
    if len(constants) != 1 or any(alphabet[a] != 1 for a in others):
        raise ArityError("word mode needs unary letters plus exactly one constant")
    letters = word.split() if any(ch.isspace() for ch in word) else list(word)
    t = leaf(constants[0])
    for a in reversed(letters):
        if alphabet.get(a) != 1:
            raise ArityError(f"{a!r} is not a unary letter of the alphabet")
        t = Term(a, (t,))
    return t


def unary_power(letter: str, n: int, base: Term) -> Term:
    """``letter`` applied ``n`` times on top of ``base``."""
    t = base
    for _ in range(n):
        t = Term(letter, (t,))
    return t
