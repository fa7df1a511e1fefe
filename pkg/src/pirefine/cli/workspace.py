"""Workspace files: named institutions, morphisms, translations, specifications and corpora.

Grammar::

    file        := decl*
    decl        := "institution" NAME "=" inst ";"
                 | "morphism" NAME ":" NAME "->" NAME "=" "{" (VAR "|->" term ";")* "}" ";"
                 | "translation" NAME ":" NAME "->" NAME "=" "{" rule* "}" ";"
                 | "spec" NAME "=" spec ";"
                 | "corpus" NAME "=" corpus ";"
    inst        := "builtin" LOGIC ["vars" VAR+] | "extend" NAME "{" (sentence ";")* "}"
    rule        := "sentence" "=>" template ";" | "op" SYMBOL "=>" template ";"
                 | "var" VAR "=>" VAR ";" | "case" sentence "=>" sentence ";"
    spec        := "flat" NAME "{" (sentence ";")* "}" | "union" NAME NAME
                 | "translate" NAME "through" NAME | "derive" NAME "through" NAME
    corpus      := "generate" NAME ["size" INT] ["seed" INT] ["depth" INT]
                 | "items" NAME "{" ([sentence ("," sentence)*] "|-" sentence ";")* "}"

``#`` starts a comment.  Parsing never stops at the first error: each bad
declaration yields a positioned diagnostic and parsing resumes after it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..corpus import CheckCorpus, CorpusItem
from ..kernel import PiInstitution, substitution
from ..logics import BUILTIN_NAMES, builtin_system, extend_institution, institution_of
from ..specs import Derive, Flat, Translate, Union
from ..syntax import ParseError, RejectedInput, parse_sentence, parse_term
from ..translation import HomomorphicMap, Translation, parse_template

KEYWORDS = ("institution", "morphism", "translation", "spec", "corpus")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_LOGIC = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")
_COMMENT = re.compile(r"#[^\n]*")
_INT = re.compile(r"-?[0-9]+")


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str
    file: str = "<workspace>"

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}: error: {self.message}"


class WorkspaceError(RejectedInput):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass
class Workspace:
    institutions: dict = field(default_factory=dict)
    systems: dict = field(default_factory=dict)  # institution name -> DeductiveSystem, builtins only
    morphisms: dict = field(default_factory=dict)  # name -> (institution name, morphism)
    translations: dict = field(default_factory=dict)
    specs: dict = field(default_factory=dict)
    corpora: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)

    def kind_of(self, name: str) -> str | None:
        for table, kind in (
            ("institutions", "institution"),
            ("morphisms", "morphism"),
            ("translations", "translation"),
            ("specs", "spec"),
            ("corpora", "corpus"),
        ):
            if name in getattr(self, table):
                return kind
        return None

    def lookup(self, kind: str, name: str):
        table = {
            "institution": self.institutions,
            "translation": self.translations,
            "spec": self.specs,
            "corpus": self.corpora,
        }.get(kind)
        if kind == "morphism":
            if name in self.morphisms:
                return self.morphisms[name][1]
        elif name in table:
            return table[name]
        other = self.kind_of(name)
        if other:
            raise RejectedInput(f"{name!r} is {_article(other)}, not {_article(kind)}")
        raise RejectedInput(f"unknown {kind} {name!r}")


def _article(kind: str) -> str:
    return ("an " if kind[0] in "aeiou" else "a ") + kind


class _Skip(Exception):
    """Abandon the current declaration."""


class _Parser:
    def __init__(self, text: str, filename: str):
        # comments become blanks so offsets stay put
        self.text = _COMMENT.sub(lambda m: " " * len(m.group()), text)
        self.file = filename
        self.pos = 0
        self.ws = Workspace()
        self._lines = [0] + [m.end() for m in re.finditer(r"\n", text)]

    # ---- positions and diagnostics

    def where(self, offset: int) -> tuple:
        lo, hi = 0, len(self._lines) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self._lines[mid] <= offset:
                lo = mid
            else:
                hi = mid - 1
        return lo + 1, offset - self._lines[lo] + 1

    def error(self, offset: int, message: str):
        line, col = self.where(offset)
        self.ws.diagnostics.append(Diagnostic(line, col, message, self.file))
        raise _Skip

    # ---- scanning

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek_word(self) -> str | None:
        self.skip_ws()
        m = _NAME.match(self.text, self.pos)
        return m.group() if m else None

    def name(self, what: str = "a name") -> tuple:
        self.skip_ws()
        m = _NAME.match(self.text, self.pos)
        if not m:
            self.error(self.pos, f"expected {what}, found {self._found()}")
        self.pos = m.end()
        return m.group(), m.start()

    def keyword(self, kw: str) -> None:
        w, at = self.name(repr(kw))
        if w != kw:
            self.error(at, f"expected {kw!r}, found {w!r}")

    def integer(self) -> int:
        self.skip_ws()
        m = _INT.match(self.text, self.pos)
        if not m:
            self.error(self.pos, f"expected an integer, found {self._found()}")
        self.pos = m.end()
        return int(m.group())

    def punct(self, sym: str) -> None:
        self.skip_ws()
        if not self.text.startswith(sym, self.pos):
            self.error(self.pos, f"expected {sym!r}, found {self._found()}")
        self.pos += len(sym)

    def try_punct(self, sym: str) -> bool:
        self.skip_ws()
        if self.text.startswith(sym, self.pos):
            self.pos += len(sym)
            return True
        return False

    def symbol(self) -> tuple:
        self.skip_ws()
        m = re.compile(r"\S+").match(self.text, self.pos)
        if not m:
            self.error(self.pos, "expected a connective symbol")
        self.pos = m.end()
        return m.group(), m.start()

    def raw(self, stops: tuple) -> tuple:
        """Text up to the first stop string outside brackets; returns (text, offset)."""
        self.skip_ws()
        start = i = self.pos
        depth = 0
        while i < len(self.text):
            c = self.text[i]
            if c in "(<":
                depth += 1
            elif c == ")" or (c == ">" and self.text[i - 1] not in "-~"):
                depth -= 1
            elif depth <= 0 and any(self.text.startswith(s, i) for s in stops):
                break
            i += 1
        self.pos = i
        return self.text[start:i].rstrip(), start

    def _found(self) -> str:
        if self.pos >= len(self.text):
            return "end of file"
        m = re.compile(r"\S+").match(self.text, self.pos)
        return repr(m.group()[:20]) if m else "end of file"

    def recover(self) -> None:
        """Skip to just after the next ';' outside braces."""
        depth = 0
        while self.pos < len(self.text):
            c = self.text[self.pos]
            self.pos += 1
            if c == "{":
                depth += 1
            elif c == "}":
                depth = max(depth - 1, 0)
            elif c == ";" and depth == 0:
                return

    # ---- sentences

    def sentence(self, text: str, offset: int, sig):
        if not text.strip():
            self.error(offset, "expected a sentence")
        try:
            return parse_sentence(text, sig, base=offset)
        except ParseError as e:
            self.error(e.offset, e.message)
        except RejectedInput as e:
            self.error(offset, str(e))

    def braced_sentences(self, sig) -> list:
        self.punct("{")
        out = []
        while not self.try_punct("}"):
            if self.at_end():
                self.error(self.pos, "unterminated '{'")
            text, at = self.raw((";", "}"))
            if not text:
                self.error(at, "expected a sentence")
            out.append(self.sentence(text, at, sig))
            if not self.try_punct(";"):
                self.skip_ws()
                if not self.text.startswith("}", self.pos):
                    self.error(self.pos, f"expected ';' or '}}', found {self._found()}")
        return out

    # ---- resolution

    def ref(self, kind: str, name: str, at: int):
        try:
            return self.ws.lookup(kind, name)
        except RejectedInput as e:
            self.error(at, str(e))

    def single_signature(self, inst: PiInstitution, at: int):
        if len(inst.signatures) != 1:
            self.error(at, f"institution {inst.name} has several signatures")
        return inst.signature()

    def define(self, name: str, at: int) -> None:
        if self.ws.kind_of(name):
            self.error(at, f"duplicate name {name!r} (already {_article(self.ws.kind_of(name))})")
        if name in KEYWORDS:
            self.error(at, f"{name!r} is a keyword")

    # ---- declarations

    def parse(self) -> Workspace:
        while not self.at_end():
            start = self.pos
            try:
                kw, at = self.name("a declaration")
                handler = getattr(self, f"decl_{kw}", None)
                if handler is None:
                    self.error(at, f"unknown declaration {kw!r}; expected one of {', '.join(KEYWORDS)}")
                handler()
                self.punct(";")
            except _Skip:
                # rescan the whole declaration so braces are counted from its start
                self.pos = start
                self.recover()
        return self.ws

    def decl_institution(self) -> None:
        name, at = self.name("an institution name")
        self.define(name, at)
        self.punct("=")
        how, hat = self.name("'builtin' or 'extend'")
        if how == "builtin":
            self.skip_ws()
            m = _LOGIC.match(self.text, self.pos)
            if not m:
                self.error(self.pos, f"expected a logic name, found {self._found()}")
            logic, lat = m.group(), m.start()
            self.pos = m.end()
            if logic not in BUILTIN_NAMES:
                self.error(lat, f"unknown builtin logic {logic!r}; expected one of {', '.join(BUILTIN_NAMES)}")
            variables = None
            if self.peek_word() == "vars":
                self.keyword("vars")
                variables = []
                while self.peek_word() is not None:
                    variables.append(self.name()[0])
                if not variables:
                    self.error(self.pos, "expected at least one variable after 'vars'")
            try:
                D = builtin_system(logic, tuple(variables)) if variables else builtin_system(logic)
            except RejectedInput as e:
                self.error(lat, str(e))
            self.ws.systems[name] = D
            self.ws.institutions[name] = institution_of(D, name)
        elif how == "extend":
            base_name, bat = self.name("an institution name")
            base = self.ref("institution", base_name, bat)
            sig = self.single_signature(base, bat)
            extra = self.braced_sentences(sig)
            self.ws.institutions[name] = extend_institution(base, extra, name)
        else:
            self.error(hat, f"expected 'builtin' or 'extend', found {how!r}")

    def _endpoints(self):
        src, sat = self.name("a source institution")
        self.punct("->")
        tgt, tat = self.name("a target institution")
        return self.ref("institution", src, sat), sat, self.ref("institution", tgt, tat), tat

    def decl_morphism(self) -> None:
        name, at = self.name("a morphism name")
        self.define(name, at)
        self.punct(":")
        src, sat, tgt, tat = self._endpoints()
        if src is not tgt:
            self.error(tat, "morphisms live inside one institution: source and target must be the same")
        sig = self.single_signature(src, sat)
        self.punct("=")
        self.punct("{")
        mapping = {}
        while not self.try_punct("}"):
            if self.at_end():
                self.error(self.pos, "unterminated '{'")
            v, vat = self.name("a variable")
            if v not in sig.variable_set:
                self.error(vat, f"{v!r} is not a variable of {src.name}")
            if v in mapping:
                self.error(vat, f"variable {v!r} mapped twice")
            self.punct("|->")
            text, tat2 = self.raw((";", "}"))
            try:
                mapping[v] = parse_term(text, sig, base=tat2)
            except ParseError as e:
                self.error(e.offset, e.message)
            except RejectedInput as e:
                self.error(tat2, str(e))
            self.try_punct(";")
        self.ws.morphisms[name] = (src.name, substitution(sig, mapping))

    def decl_translation(self) -> None:
        name, at = self.name("a translation name")
        self.define(name, at)
        self.punct(":")
        src, sat, tgt, tat = self._endpoints()
        ssig = self.single_signature(src, sat)
        tsig = self.single_signature(tgt, tat)
        self.punct("=")
        self.punct("{")
        ops, var_images, sentences, overrides = {}, {}, [], {}
        while not self.try_punct("}"):
            if self.at_end():
                self.error(self.pos, "unterminated '{'")
            kind, kat = self.name("'sentence', 'op', 'var' or 'case'")
            if kind == "sentence":
                self.punct("=>")
                text, tat2 = self.raw((";", "}"))
                sentences.append((text, tat2))
            elif kind == "op":
                sym, symat = self.symbol()
                if not ssig.has_connective(sym):
                    self.error(symat, f"{sym!r} is not a connective of {src.name}")
                self.punct("=>")
                text, tat2 = self.raw((";", "}"))
                ops[sym] = (text, tat2)
            elif kind == "var":
                v, vat = self.name("a variable")
                self.punct("=>")
                w, _ = self.name("a variable")
                var_images[v] = w
            elif kind == "case":
                text, cat = self.raw(("=>",))
                phi = self.sentence(text, cat, ssig)
                self.punct("=>")
                text2, cat2 = self.raw((";", "}"))
                overrides.setdefault(phi, []).append(self.sentence(text2, cat2, tsig))
            else:
                self.error(kat, f"unknown rule {kind!r}; expected 'sentence', 'op', 'var' or 'case'")
            self.try_punct(";")
        holes = ["$"] + [f"${i + 1}" for i in range(ssig.dimension)]
        templates = []
        for text, tat2 in sentences or [("$", at)]:
            try:
                templates.append(parse_template(text, tsig, holes, base=tat2, sentence=True))
            except ParseError as e:
                self.error(e.offset, e.message)
            except RejectedInput as e:
                self.error(tat2, str(e))
        op_templates = {}
        for sym, (text, tat2) in ops.items():
            try:
                op_templates[sym] = parse_template(text, tsig, [f"${i + 1}" for i in range(ssig.arity(sym))], base=tat2)
            except ParseError as e:
                self.error(e.offset, e.message)
            except RejectedInput as e:
                self.error(tat2, str(e))
        try:
            alpha = HomomorphicMap(ssig, tsig, op_templates, var_images, templates, name, overrides)
            self.ws.translations[name] = Translation(name, src, tgt, {ssig.id: tsig.id}, {ssig.id: alpha})
        except RejectedInput as e:
            self.error(at, str(e))

    def decl_spec(self) -> None:
        name, at = self.name("a specification name")
        self.define(name, at)
        self.punct("=")
        how, hat = self.name("'flat', 'union', 'translate' or 'derive'")
        try:
            if how == "flat":
                iname, iat = self.name("an institution name")
                inst = self.ref("institution", iname, iat)
                sig = self.single_signature(inst, iat)
                sp = Flat(sig, frozenset(self.braced_sentences(sig)), inst)
            elif how == "union":
                a, aat = self.name("a specification name")
                b, bat = self.name("a specification name")
                sp = Union(self.ref("spec", a, aat), self.ref("spec", b, bat))
            elif how in ("translate", "derive"):
                a, aat = self.name("a specification name")
                base = self.ref("spec", a, aat)
                self.keyword("through")
                m, mat = self.name("a morphism name")
                mor = self.ref("morphism", m, mat)
                sp = (Translate if how == "translate" else Derive)(base, mor)
            else:
                self.error(hat, f"expected 'flat', 'union', 'translate' or 'derive', found {how!r}")
        except RejectedInput as e:
            self.error(hat, str(e))
        self.ws.specs[name] = sp

    def decl_corpus(self) -> None:
        name, at = self.name("a corpus name")
        self.define(name, at)
        self.punct("=")
        how, hat = self.name("'generate' or 'items'")
        iname, iat = self.name("an institution name")
        inst = self.ref("institution", iname, iat)
        sig = self.single_signature(inst, iat)
        if how == "generate":
            params = {"size": None, "seed": None, "depth": None}
            while self.peek_word() in params:
                key, _ = self.name()
                params[key] = self.integer()
            self.ws.corpora[name] = ("generate", iname, params)
        elif how == "items":
            self.punct("{")
            items = []
            while not self.try_punct("}"):
                if self.at_end():
                    self.error(self.pos, "unterminated '{'")
                premises = []
                self.skip_ws()
                if not self.text.startswith("|-", self.pos):
                    while True:
                        text, tat2 = self.raw((",", "|-"))
                        premises.append(self.sentence(text, tat2, sig))
                        if not self.try_punct(","):
                            break
                self.punct("|-")
                text, tat2 = self.raw((";", "}"))
                items.append(CorpusItem(sig.id, frozenset(premises), self.sentence(text, tat2, sig)))
                self.try_punct(";")
            self.ws.corpora[name] = ("items", iname, CheckCorpus(0, items, [], 0, len(items)))
        else:
            self.error(hat, f"expected 'generate' or 'items', found {how!r}")


def parse_workspace(text: str, filename: str = "<workspace>") -> Workspace:
    """Parse and resolve a workspace; problems are collected in ``.diagnostics``."""
    return _Parser(text, filename).parse()


def load_workspace(path: str, display_name: str | None = None) -> Workspace:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    ws = parse_workspace(text, display_name or path)
    if ws.diagnostics:
        raise WorkspaceError(ws.diagnostics)
    return ws


def standard_workspace_path() -> str:
    from importlib import resources

    return str(resources.files("pirefine") / "data" / "standard.pi")
