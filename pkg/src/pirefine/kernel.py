"""pi-institutions: signature morphisms, closure oracles and the closure-axiom harness.

A closure operator is only ever queried as a finite-premise membership test
``phi in C(Phi)``; the (possibly infinite) closure sets are never built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .report import FAIL, PASS, UNKNOWN, VACUOUS, CheckReport
from .syntax import (
    RejectedInput,
    Sentence,
    Signature,
    Term,
    Var,
    format_term,
    rename,
    sorted_sentences,
    substitute,
)

DEFAULT_BUDGET = 16


# ---------------------------------------------------------------- morphisms


@dataclass(frozen=True)
class Substitution:
    """Endomorphism of a one-object signature category: variable -> term.

    ``images`` is total over the variable pool, in pool order.
    """

    signature: Signature
    images: tuple

    @property
    def source(self) -> Signature:
        return self.signature

    @property
    def target(self) -> Signature:
        return self.signature

    def as_dict(self) -> dict:
        return dict(zip(self.signature.variables, self.images))

    def is_identity(self) -> bool:
        return all(t == Var(v) for v, t in zip(self.signature.variables, self.images))

    def __str__(self) -> str:
        moved = [f"{v} |-> {format_term(t)}" for v, t in zip(self.signature.variables, self.images) if t != Var(v)]
        return "{" + "; ".join(moved) + "}"


@dataclass(frozen=True)
class SymbolMap:
    """Signature morphism renaming connectives (arity-preserving) and variables."""

    source: Signature
    target: Signature
    ops: tuple
    var_images: tuple

    def is_identity(self) -> bool:
        return (
            self.source == self.target
            and all(a == b for a, b in self.ops)
            and all(v == w for v, w in zip(self.source.variables, self.var_images))
        )

    def __str__(self) -> str:
        parts = [f"{a} => {b}" for a, b in self.ops if a != b]
        parts += [f"{v} => {w}" for v, w in zip(self.source.variables, self.var_images) if v != w]
        return "{" + "; ".join(parts) + "}"


Morphism = Substitution | SymbolMap


def substitution(signature: Signature, mapping: Mapping[str, Term] | None = None) -> Substitution:
    mapping = dict(mapping or {})
    for v, t in mapping.items():
        if v not in signature.variable_set:
            raise RejectedInput(f"substitution maps {v!r}, which is not a variable of {signature.id}")
        signature.check_term(t)
    return Substitution(signature, tuple(mapping.get(v, Var(v)) for v in signature.variables))


def identity(signature: Signature) -> Substitution:
    return substitution(signature)


def symbol_map(
    source: Signature,
    target: Signature,
    ops: Mapping[str, str] | None = None,
    variables: Mapping[str, str] | None = None,
) -> SymbolMap:
    ops = dict(ops or {})
    variables = dict(variables or {})
    if source.dimension != target.dimension:
        raise RejectedInput("symbol map between signatures of different dimension")
    op_pairs = []
    for s, a in source.connectives:
        t = ops.get(s, s)
        if not target.has_connective(t):
            raise RejectedInput(f"connective {s!r} maps to {t!r}, absent from {target.id}")
        if target.arity(t) != a:
            raise RejectedInput(f"connective {s!r}/{a} maps to {t!r}/{target.arity(t)}: arity mismatch")
        op_pairs.append((s, t))
    var_images = []
    for v in source.variables:
        w = variables.get(v, v)
        if w not in target.variable_set:
            raise RejectedInput(f"variable {v!r} maps to {w!r}, absent from {target.id}")
        var_images.append(w)
    return SymbolMap(source, target, tuple(op_pairs), tuple(var_images))


def apply_term(f: Morphism, t: Term) -> Term:
    if isinstance(f, Substitution):
        return substitute(t, f.as_dict())
    return rename(t, dict(f.ops), dict(zip(f.source.variables, f.var_images)))


def apply_morphism(f: Morphism, phi: Sentence) -> Sentence:
    """SEN(f)(phi), componentwise over the sentence tuple."""
    if phi.dimension != f.source.dimension:
        raise RejectedInput(f"sentence {phi} has dimension {phi.dimension}, morphism expects {f.source.dimension}")
    f.source.check_sentence(phi)
    return Sentence(tuple(apply_term(f, c) for c in phi.components))


def apply_set(f: Morphism, sentences: Iterable[Sentence]) -> frozenset:
    return frozenset(apply_morphism(f, s) for s in sentences)


def compose(g: Morphism, f: Morphism) -> Morphism:
    """g o f: first f, then g, so SEN(g o f) = SEN(g) o SEN(f)."""
    if f.target != g.source:
        raise RejectedInput(f"cannot compose: {f.target.id} is not the source {g.source.id}")
    if g.is_identity():
        return f
    if f.is_identity():
        return g
    if isinstance(f, Substitution) and isinstance(g, Substitution):
        gd = g.as_dict()
        return Substitution(f.signature, tuple(substitute(t, gd) for t in f.images))
    if isinstance(f, SymbolMap) and isinstance(g, SymbolMap):
        gops = dict(g.ops)
        gvars = dict(zip(g.source.variables, g.var_images))
        return SymbolMap(
            f.source,
            g.target,
            tuple((s, gops[t]) for s, t in f.ops),
            tuple(gvars[w] for w in f.var_images),
        )
    raise RejectedInput("cannot compose a substitution with a symbol map")


# ---------------------------------------------------------------- verdicts


class Verdict:
    label = ""

    def to_dict(self) -> dict:
        return {"verdict": self.label}


@dataclass(frozen=True)
class Entailed(Verdict):
    label = "Entailed"

    def __str__(self) -> str:
        return "Entailed"


@dataclass(frozen=True)
class NotEntailed(Verdict):
    witness: object
    label = "NotEntailed"

    def __str__(self) -> str:
        return f"NotEntailed (witness: {self.witness})"

    def to_dict(self) -> dict:
        return {"verdict": self.label, "witness": witness_json(self.witness)}


@dataclass(frozen=True)
class Unknown(Verdict):
    reason: str
    label = "Unknown"

    def __str__(self) -> str:
        return f"Unknown ({self.reason})"

    def to_dict(self) -> dict:
        return {"verdict": self.label, "reason": self.reason}


ENTAILED = Entailed()


def witness_json(w):
    if w is None:
        return None
    if hasattr(w, "to_json"):
        return w.to_json()
    return str(w)


# ---------------------------------------------------------------- oracles


class ClosureOracle:
    """Decides ``conclusion in C_sigma(premises)`` for finite premise sets.

    Implementations must be deterministic and monotone in ``budget``: a
    certain verdict at some budget stays the same at every larger budget.
    """

    signature: Signature

    def decide(self, premises: frozenset, conclusion: Sentence, budget: int = DEFAULT_BUDGET) -> Verdict:
        raise NotImplementedError

    def replay(self, premises: frozenset, conclusion: Sentence, witness) -> bool:
        """True iff ``witness`` satisfies every premise and falsifies the conclusion."""
        raise NotImplementedError


class FunctionOracle(ClosureOracle):
    """Adapter turning a plain function into an oracle (tests, negative controls)."""

    def __init__(self, signature: Signature, fn: Callable, replay: Callable | None = None):
        self.signature = signature
        self._fn = fn
        self._replay = replay

    def decide(self, premises, conclusion, budget=DEFAULT_BUDGET):
        return self._fn(frozenset(premises), conclusion, budget)

    def replay(self, premises, conclusion, witness):
        if self._replay is None:
            return False
        return self._replay(frozenset(premises), conclusion, witness)


@dataclass
class PiInstitution:
    """A finite presentation of <Sign, SEN, (C_sigma)>.

    With ``substitutions`` set, every substitution over a listed signature is
    a morphism (the one-object categories of deductive systems); ``morphisms``
    lists any further declared morphisms.
    """

    name: str
    signatures: tuple
    oracles: Mapping[str, ClosureOracle]
    morphisms: tuple = ()
    substitutions: bool = True
    _by_id: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.signatures = tuple(self.signatures)
        self.morphisms = tuple(self.morphisms)
        self._by_id = {}
        for s in self.signatures:
            if s.id in self._by_id:
                raise RejectedInput(f"institution {self.name}: duplicate signature id {s.id}")
            self._by_id[s.id] = s
        for s in self.signatures:
            oracle = self.oracles.get(s.id)
            if oracle is None:
                raise RejectedInput(f"institution {self.name}: no closure oracle for {s.id}")
            if oracle.signature != s:
                raise RejectedInput(f"institution {self.name}: oracle for {s.id} is over {oracle.signature.id}")
        for m in self.morphisms:
            for end in (m.source, m.target):
                if self._by_id.get(end.id) != end:
                    raise RejectedInput(f"institution {self.name}: morphism endpoint {end.id} not listed")

    def signature(self, id: str | None = None) -> Signature:
        if id is None:
            if len(self.signatures) != 1:
                raise RejectedInput(f"institution {self.name} has several signatures; name one")
            return self.signatures[0]
        try:
            return self._by_id[id]
        except KeyError:
            raise RejectedInput(f"signature {id!r} not in institution {self.name}") from None

    def has_signature(self, sig: Signature) -> bool:
        return self._by_id.get(sig.id) == sig

    def oracle(self, sig: Signature) -> ClosureOracle:
        if not self.has_signature(sig):
            raise RejectedInput(f"signature {sig.id!r} not in institution {self.name}")
        return self.oracles[sig.id]

    def is_morphism(self, f: Morphism) -> bool:
        if not (self.has_signature(f.source) and self.has_signature(f.target)):
            return False
        if f.is_identity() or f in self.morphisms:
            return True
        return self.substitutions and isinstance(f, Substitution)

    def entails(self, sig: Signature, premises, conclusion: Sentence, budget: int = DEFAULT_BUDGET) -> Verdict:
        return entails(self, sig, premises, conclusion, budget)


def entails(I: PiInstitution, sig: Signature, premises, conclusion: Sentence, budget: int = DEFAULT_BUDGET) -> Verdict:
    oracle = I.oracle(sig)
    premises = frozenset(premises)
    for s in premises:
        sig.check_sentence(s)
    sig.check_sentence(conclusion)
    return oracle.decide(premises, conclusion, budget)


# ---------------------------------------------------------------- closure axioms


def show(sentences) -> list:
    return [str(s) for s in sorted_sentences(sentences)]


def _w(v: Verdict):
    return witness_json(v.witness) if isinstance(v, NotEntailed) else None


def check_closure_axioms(I: PiInstitution, corpus, budget: int = DEFAULT_BUDGET) -> CheckReport:
    """Finite-premise restatement of the four closure axioms over a corpus.

    (a) reflexivity, (b) as the cut rule, (c) monotonicity, (d) structurality
    under the corpus's morphisms.
    """
    report = CheckReport(f"closure axioms of {I.name}")
    items = list(corpus.items)
    squares = list(getattr(corpus, "squares", ()))
    report.meta = {"institution": I.name, "corpus_size": len(items), "seed": getattr(corpus, "seed", None)}
    cache: dict = {}

    def ask(sig, premises, phi):
        key = (sig.id, frozenset(premises), phi)
        if key not in cache:
            cache[key] = entails(I, sig, premises, phi, budget)
        return cache[key]

    for n, item in enumerate(items):
        sig = I.signature(item.signature)
        A = frozenset(item.premises)
        phi = item.conclusion
        same_sig = [it for it in items[n + 1 :] + items[:n] if it.signature == item.signature]

        for psi in sorted_sentences(A):
            v = ask(sig, A, psi)
            status = PASS if isinstance(v, Entailed) else UNKNOWN if isinstance(v, Unknown) else FAIL
            report.add("a-reflexivity", status, {"item": n, "premises": show(A), "conclusion": str(psi)}, _w(v))

        base = ask(sig, A, phi)

        # (b) as cut: D = {phi}; A |- D and A u D |- chi imply A |- chi
        for other in same_sig[:2]:
            chi = other.conclusion
            subj = {"item": n, "premises": show(A), "cut": str(phi), "conclusion": str(chi)}
            v_ext = ask(sig, A | {phi}, chi)
            if isinstance(base, Unknown) or isinstance(v_ext, Unknown):
                report.add("b-cut", UNKNOWN, subj)
            elif not (isinstance(base, Entailed) and isinstance(v_ext, Entailed)):
                report.add("b-cut", VACUOUS, subj)
            else:
                v = ask(sig, A, chi)
                status = PASS if isinstance(v, Entailed) else UNKNOWN if isinstance(v, Unknown) else FAIL
                report.add("b-cut", status, subj, _w(v))

        # (c) monotonicity: A subset of B
        if same_sig:
            B = A | frozenset(same_sig[0].premises)
            subj = {"item": n, "premises": show(A), "superset": show(B), "conclusion": str(phi)}
            if isinstance(base, Unknown):
                report.add("c-monotone", UNKNOWN, subj)
            elif not isinstance(base, Entailed):
                report.add("c-monotone", VACUOUS, subj)
            else:
                v = ask(sig, B, phi)
                status = PASS if isinstance(v, Entailed) else UNKNOWN if isinstance(v, Unknown) else FAIL
                report.add("c-monotone", status, subj, _w(v))

        # (d) structurality along a morphism out of this signature
        morphs = [f for f, _ in squares if f.source == sig and I.is_morphism(f)]
        if morphs:
            f = morphs[n % len(morphs)]
            tgt = f.target
            fA = apply_set(f, A)
            fphi = apply_morphism(f, phi)
            subj = {
                "item": n,
                "morphism": str(f),
                "premises": show(A),
                "conclusion": str(phi),
                "image_premises": show(fA),
                "image_conclusion": str(fphi),
            }
            if isinstance(base, Unknown):
                report.add("d-structural", UNKNOWN, subj)
            elif not isinstance(base, Entailed):
                report.add("d-structural", VACUOUS, subj)
            else:
                v = ask(tgt, fA, fphi)
                status = PASS if isinstance(v, Entailed) else UNKNOWN if isinstance(v, Unknown) else FAIL
                report.add("d-structural", status, subj, _w(v))
    return report
