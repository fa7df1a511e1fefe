"""Signatures, terms and k-dimensional sentences, plus the ASCII surface syntax.

Surface syntax (lowest to highest binding)::

    s ~= t              2-dimensional sentence
    <t1, ..., tk>       k-dimensional sentence
    a -> b              implication (right associative)
    a \\/ b             disjunction
    a /\\ b             conjunction
    ~a  box a  dia a    negation and modalities
    top  bot  p  f(a,b) constants, variables, generic connectives
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Union


class RejectedInput(ValueError):
    """Raised when an operation receives input outside its contract."""


class ParseError(RejectedInput):
    def __init__(self, message: str, offset: int = 0):
        super().__init__(message)
        self.message = message
        self.offset = offset


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    op: str
    args: tuple = ()

    def __str__(self) -> str:
        return format_term(self)


Term = Union[Var, App]


@dataclass(frozen=True)
class Sentence:
    """A k-tuple of terms; k = 1 for formulas, k = 2 for equations."""

    components: tuple

    @property
    def dimension(self) -> int:
        return len(self.components)

    def __str__(self) -> str:
        return format_sentence(self)

    def __repr__(self) -> str:
        return f"Sentence({format_sentence(self)!r})"


def formula(t: Term) -> Sentence:
    return Sentence((t,))


def equation(s: Term, t: Term) -> Sentence:
    return Sentence((s, t))


@dataclass(frozen=True)
class Signature:
    id: str
    dimension: int
    connectives: tuple
    variables: tuple
    _arity: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise RejectedInput(f"signature {self.id}: dimension must be >= 1")
        object.__setattr__(self, "connectives", tuple((str(s), int(a)) for s, a in self.connectives))
        object.__setattr__(self, "variables", tuple(self.variables))
        symbols = [s for s, _ in self.connectives]
        if len(set(symbols)) != len(symbols):
            raise RejectedInput(f"signature {self.id}: duplicate connective symbols")
        if len(set(self.variables)) != len(self.variables):
            raise RejectedInput(f"signature {self.id}: duplicate variables")
        if set(symbols) & set(self.variables):
            raise RejectedInput(f"signature {self.id}: variables clash with connectives")
        for s, a in self.connectives:
            if a < 0:
                raise RejectedInput(f"signature {self.id}: negative arity for {s}")
        object.__setattr__(self, "_arity", dict(self.connectives))

    def arity(self, op: str) -> int:
        try:
            return self._arity[op]
        except KeyError:
            raise RejectedInput(f"connective {op!r} not in signature {self.id}") from None

    def has_connective(self, op: str) -> bool:
        return op in self._arity

    @cached_property
    def variable_set(self) -> frozenset:
        return frozenset(self.variables)

    def is_term(self, t: Term) -> bool:
        try:
            self.check_term(t)
        except RejectedInput:
            return False
        return True

    def check_term(self, t: Term) -> None:
        stack = [t]
        while stack:
            u = stack.pop()
            if isinstance(u, Var):
                if u.name not in self.variable_set:
                    raise RejectedInput(f"variable {u.name!r} not in signature {self.id}")
            elif isinstance(u, App):
                if u.op not in self._arity:
                    raise RejectedInput(f"connective {u.op!r} not in signature {self.id}")
                if self._arity[u.op] != len(u.args):
                    raise RejectedInput(
                        f"connective {u.op!r} expects {self._arity[u.op]} arguments, got {len(u.args)}"
                    )
                stack.extend(u.args)
            else:
                raise RejectedInput(f"not a term: {u!r}")

    def check_sentence(self, s: Sentence) -> None:
        if not isinstance(s, Sentence):
            raise RejectedInput(f"not a sentence: {s!r}")
        if s.dimension != self.dimension:
            raise RejectedInput(
                f"sentence {s} has dimension {s.dimension}, signature {self.id} expects {self.dimension}"
            )
        for c in s.components:
            self.check_term(c)

    def is_sentence(self, s: Sentence) -> bool:
        try:
            self.check_sentence(s)
        except RejectedInput:
            return False
        return True

    def contained_in(self, other: "Signature") -> bool:
        """True when every sentence over ``self`` is also a sentence over ``other``."""
        if self.dimension != other.dimension:
            return False
        if not set(self.variables) <= set(other.variables):
            return False
        return all(other._arity.get(s) == a for s, a in self.connectives)

    def restrict(self, variables: Iterable[str], id: str | None = None) -> "Signature":
        vs = tuple(variables)
        return Signature(id or f"{self.id}[{','.join(vs)}]", self.dimension, self.connectives, vs)


# ---------------------------------------------------------------- term utilities


def subterms(t: Term) -> Iterator[Term]:
    """Post-order walk: children before parents."""
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)
    yield t


def depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(depth(a) for a in t.args)


def variables_of(t: Term, acc: set | None = None) -> set:
    acc = set() if acc is None else acc
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            acc.add(u.name)
        else:
            stack.extend(u.args)
    return acc


def sentence_variables(sentences: Iterable[Sentence]) -> set:
    acc: set = set()
    for s in sentences:
        for c in s.components:
            variables_of(c, acc)
    return acc


def substitute(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if not t.args:
        return t
    return App(t.op, tuple(substitute(a, mapping) for a in t.args))


def rename(t: Term, ops: Mapping[str, str], variables: Mapping[str, str]) -> Term:
    if isinstance(t, Var):
        return Var(variables.get(t.name, t.name))
    return App(ops.get(t.op, t.op), tuple(rename(a, ops, variables) for a in t.args))


def sorted_sentences(sentences: Iterable[Sentence]) -> list:
    return sorted(sentences, key=str)


# ---------------------------------------------------------------- printing

_BINARY = {"->": (1, "right"), "\\/": (2, "left"), "/\\": (3, "left")}
_UNARY = {"~": "~", "box": "box ", "dia": "dia "}
_ATOM_PREC = 5


def _prec(t: Term) -> int:
    if isinstance(t, App):
        if t.op in _BINARY and len(t.args) == 2:
            return _BINARY[t.op][0]
        if t.op in _UNARY and len(t.args) == 1:
            return 4
    return _ATOM_PREC


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if t.op in _BINARY and len(t.args) == 2:
        p, assoc = _BINARY[t.op]
        left, right = t.args
        lmin, rmin = (p, p + 1) if assoc == "left" else (p + 1, p)
        ls = format_term(left)
        rs = format_term(right)
        if _prec(left) < lmin:
            ls = f"({ls})"
        if _prec(right) < rmin:
            rs = f"({rs})"
        return f"{ls} {t.op} {rs}"
    if t.op in _UNARY and len(t.args) == 1:
        inner = format_term(t.args[0])
        if _prec(t.args[0]) < 4:
            inner = f"({inner})"
        return f"{_UNARY[t.op]}{inner}"
    if not t.args:
        return t.op
    return f"{t.op}({', '.join(format_term(a) for a in t.args)})"


def format_sentence(s: Sentence) -> str:
    if s.dimension == 1:
        return format_term(s.components[0])
    if s.dimension == 2:
        return f"{format_term(s.components[0])} ~= {format_term(s.components[1])}"
    return "<" + ", ".join(format_term(c) for c in s.components) + ">"


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<sym>~=|->|/\\|\\/|[~(),<>])
  | (?P<name>\$[0-9]*|[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)

_RESERVED_UNARY = {"~", "box", "dia"}


def tokenize(text: str, base: int = 0) -> list:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", base + pos)
        if m.lastgroup != "ws":
            out.append((m.group(), base + pos))
        pos = m.end()
    return out


class _TermParser:
    def __init__(self, tokens: list, end_offset: int):
        self.toks = tokens
        self.i = 0
        self.end_offset = end_offset

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def offset(self) -> int:
        return self.toks[self.i][1] if self.i < len(self.toks) else self.end_offset

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"expected {expected or 'a term'}, found end of input", self.offset())
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", self.offset())
        self.i += 1
        return tok

    def sentence(self) -> Sentence:
        if self.peek() == "<":
            self.take("<")
            comps = [self.term()]
            while self.peek() == ",":
                self.take(",")
                comps.append(self.term())
            self.take(">")
            return Sentence(tuple(comps))
        first = self.term()
        if self.peek() == "~=":
            self.take("~=")
            return Sentence((first, self.term()))
        return Sentence((first,))

    def term(self) -> Term:
        left = self.disj()
        if self.peek() == "->":
            self.take("->")
            return App("->", (left, self.term()))
        return left

    def disj(self) -> Term:
        t = self.conj()
        while self.peek() == "\\/":
            self.take()
            t = App("\\/", (t, self.conj()))
        return t

    def conj(self) -> Term:
        t = self.unary()
        while self.peek() == "/\\":
            self.take()
            t = App("/\\", (t, self.unary()))
        return t

    def unary(self) -> Term:
        tok = self.peek()
        if tok in _RESERVED_UNARY:
            self.take()
            return App(tok, (self.unary(),))
        return self.atom()

    def atom(self) -> Term:
        at = self.offset()
        tok = self.take()
        if tok == "(":
            t = self.term()
            self.take(")")
            return t
        if tok in ("top", "bot"):
            return App(tok, ())
        if not re.fullmatch(r"\$[0-9]*|[A-Za-z_][A-Za-z0-9_']*", tok):
            raise ParseError(f"unexpected {tok!r}", at)
        if self.peek() == "(":
            self.take("(")
            args = [] if self.peek() == ")" else [self.term()]
            while self.peek() == ",":
                self.take(",")
                args.append(self.term())
            self.take(")")
            return App(tok, tuple(args))
        return Var(tok)


def _finish(p: _TermParser) -> None:
    if p.i != len(p.toks):
        raise ParseError(f"unexpected {p.peek()!r} after complete expression", p.offset())


def _resolve(t: Term, signature: Signature | None) -> Term:
    # a bare name that is a nullary connective of the signature is a constant, not a variable
    if signature is None:
        return t
    if isinstance(t, Var):
        if t.name not in signature.variable_set and signature._arity.get(t.name) == 0:
            return App(t.name, ())
        return t
    return App(t.op, tuple(_resolve(a, signature) for a in t.args))


def parse_term(text: str, signature: Signature | None = None, base: int = 0) -> Term:
    p = _TermParser(tokenize(text, base), base + len(text))
    t = p.term()
    _finish(p)
    t = _resolve(t, signature)
    if signature is not None:
        signature.check_term(t)
    return t


def parse_sentence(text: str, signature: Signature | None = None, base: int = 0) -> Sentence:
    p = _TermParser(tokenize(text, base), base + len(text))
    s = p.sentence()
    _finish(p)
    s = Sentence(tuple(_resolve(c, signature) for c in s.components))
    if signature is not None:
        if s.dimension == 1 and signature.dimension == 2:
            raise RejectedInput(f"{text.strip()!r}: signature {signature.id} expects equations 's ~= t'")
        signature.check_sentence(s)
    return s
