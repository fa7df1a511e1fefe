"""Multifunction translations <F, alpha> and corpus verdicts on (semi-)interpretations."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .kernel import (
    DEFAULT_BUDGET,
    ENTAILED,
    Entailed,
    NotEntailed,
    PiInstitution,
    Substitution,
    Unknown,
    Verdict,
    apply_morphism,
    compose,
    entails,
    identity,
    show,
    substitution,
    symbol_map,
    witness_json,
)
from .report import FAIL, PASS, UNKNOWN, VACUOUS, CheckReport
from .syntax import (
    App,
    RejectedInput,
    Sentence,
    Signature,
    Term,
    Var,
    _resolve,
    parse_sentence,
    parse_term,
    sorted_sentences,
    substitute,
)

_PLACEHOLDER = re.compile(r"\$[0-9]*")


class Multifunction:
    """Set-valued sentence map with finite nonempty images over ``target``."""

    def __init__(self, source: Signature, target: Signature, fn: Callable[[Sentence], Iterable[Sentence]], name: str = ""):
        self.source = source
        self.target = target
        self._fn = fn
        self.name = name or "multifunction"

    def __call__(self, phi: Sentence) -> frozenset:
        self.source.check_sentence(phi)
        image = frozenset(self._fn(phi))
        if not image:
            raise RejectedInput(f"{self.name}: empty image for {phi}")
        for s in image:
            if not self.target.is_sentence(s):
                raise RejectedInput(f"{self.name}: image {s} of {phi} is not a sentence over {self.target.id}")
        return image

    def image_set(self, sentences: Iterable[Sentence]) -> frozenset:
        out: set = set()
        for s in sentences:
            out |= self(s)
        return frozenset(out)

    def __repr__(self) -> str:
        return f"<{self.name}: {self.source.id} -> {self.target.id}>"


def parse_template(text: str, target: Signature, placeholders: Iterable[str], base: int = 0, sentence: bool = False):
    """Parse a term (or sentence) over ``target`` that may also use the given ``$`` placeholders."""
    allowed = set(placeholders)
    raw = parse_sentence(text, None, base) if sentence else parse_term(text, None, base)
    comps = raw.components if sentence else (raw,)
    out = []
    for c in comps:
        c = _resolve(c, target)
        stack = [c]
        while stack:
            u = stack.pop()
            if isinstance(u, Var):
                if _PLACEHOLDER.fullmatch(u.name):
                    if u.name not in allowed:
                        raise RejectedInput(f"template {text!r}: placeholder {u.name} not available here")
                elif u.name not in target.variable_set:
                    raise RejectedInput(f"template {text!r}: variable {u.name!r} not in {target.id}")
            else:
                if not target.has_connective(u.op):
                    raise RejectedInput(f"template {text!r}: connective {u.op!r} not in {target.id}")
                if target.arity(u.op) != len(u.args):
                    raise RejectedInput(f"template {text!r}: {u.op!r} expects {target.arity(u.op)} arguments")
                stack.extend(u.args)
        out.append(c)
    return Sentence(tuple(out)) if sentence else out[0]


class HomomorphicMap(Multifunction):
    """Rule-table translation extended homomorphically.

    ``ops`` maps a source connective to a target term template in ``$1..$n``
    (default: the same connective); ``var_images`` maps source variables to
    target variables (default: same name).  ``sentences`` lists sentence
    templates in ``$`` (or ``$1..$k`` for k-dimensional sources); each gives
    one image sentence, so the image size is ``len(sentences)``.
    ``overrides`` replaces the image of individual source sentences.
    """

    def __init__(
        self,
        source: Signature,
        target: Signature,
        ops: Mapping[str, object] | None = None,
        var_images: Mapping[str, str] | None = None,
        sentences: Iterable[object] = ("$",),
        name: str = "",
        overrides: Mapping[Sentence, Iterable[Sentence]] | None = None,
    ):
        super().__init__(source, target, self._image, name or f"{source.id}->{target.id}")
        ops = dict(ops or {})
        var_images = dict(var_images or {})
        self.ops: dict = {}
        for op, arity in source.connectives:
            tpl = ops.pop(op, None)
            holes = [f"${i + 1}" for i in range(arity)]
            if tpl is None:
                if target.has_connective(op) and target.arity(op) == arity:
                    tpl = App(op, tuple(Var(h) for h in holes))
                else:
                    raise RejectedInput(f"{self.name}: no rule for connective {op!r}, absent from {target.id}")
            elif isinstance(tpl, str):
                tpl = parse_template(tpl, target, holes)
            self.ops[op] = tpl
        if ops:
            raise RejectedInput(f"{self.name}: rules for unknown connectives {sorted(ops)}")
        self.var_images: dict = {}
        for v in source.variables:
            w = var_images.pop(v, v)
            if w not in target.variable_set:
                raise RejectedInput(f"{self.name}: variable {v!r} maps to {w!r}, absent from {target.id}")
            self.var_images[v] = w
        if var_images:
            raise RejectedInput(f"{self.name}: images given for unknown variables {sorted(var_images)}")
        holes = ["$"] + [f"${i + 1}" for i in range(source.dimension)]
        self.templates = []
        for tpl in sentences:
            if isinstance(tpl, str):
                tpl = parse_template(tpl, target, holes, sentence=True)
            if tpl.dimension != target.dimension:
                raise RejectedInput(f"{self.name}: sentence template {tpl} is not {target.dimension}-dimensional")
            self.templates.append(tpl)
        if not self.templates:
            raise RejectedInput(f"{self.name}: at least one sentence template is required")
        self.overrides = {}
        for src, imgs in (overrides or {}).items():
            source.check_sentence(src)
            self.overrides[src] = tuple(imgs)

    def term(self, t: Term) -> Term:
        if isinstance(t, Var):
            return Var(self.var_images[t.name])
        args = {f"${i + 1}": self.term(a) for i, a in enumerate(t.args)}
        return substitute(self.ops[t.op], args)

    def _image(self, phi: Sentence):
        if phi in self.overrides:
            return self.overrides[phi]
        holes = {f"${i + 1}": self.term(c) for i, c in enumerate(phi.components)}
        holes["$"] = holes["$1"]
        return [Sentence(tuple(substitute(c, holes) for c in tpl.components)) for tpl in self.templates]

    def map_morphism(self, f):
        """F(f) for a substitution f: h(v) |-> h(f(v)), so that F(f) h = h f on terms."""
        if not isinstance(f, Substitution) or f.signature != self.source:
            raise RejectedInput(f"{self.name}: can only map substitutions over {self.source.id}")
        mapping: dict = {}
        for v, t in zip(f.signature.variables, f.images):
            w = self.var_images[v]
            img = self.term(t)
            if mapping.get(w, img) != img:
                raise RejectedInput(f"{self.name}: variable images collide, F({f}) is ill-defined")
            mapping[w] = img
        return substitution(self.target, {w: t for w, t in mapping.items() if t != Var(w)})


# ---------------------------------------------------------------- translations


@dataclass
class Translation:
    """<F, alpha>: ``obj_map`` and ``mor_map`` are F; ``alpha`` maps source signature ids to multifunctions."""

    name: str
    source: PiInstitution
    target: PiInstitution
    obj_map: Mapping[str, str]
    alpha: Mapping[str, Multifunction]
    mor_map: Callable | None = None
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        for sig in self.source.signatures:
            if sig.id not in self.obj_map:
                raise RejectedInput(f"translation {self.name}: F is undefined on {sig.id}")
            tgt = self.target.signature(self.obj_map[sig.id])
            a = self.alpha.get(sig.id)
            if a is None:
                raise RejectedInput(f"translation {self.name}: no alpha component at {sig.id}")
            if a.source != sig or a.target != tgt:
                raise RejectedInput(f"translation {self.name}: alpha at {sig.id} must map {sig.id} to {tgt.id}")

    def F(self, sig: Signature) -> Signature:
        if not self.source.has_signature(sig):
            raise RejectedInput(f"signature {sig.id} not in {self.source.name}")
        return self.target.signature(self.obj_map[sig.id])

    def F_mor(self, f):
        if f.is_identity():
            tgt = self.F(f.source)
            return identity(tgt) if isinstance(f, Substitution) else symbol_map(tgt, tgt)
        if self.mor_map is not None:
            return self.mor_map(f)
        a = self.alpha[f.source.id]
        if isinstance(a, HomomorphicMap):
            return a.map_morphism(f)
        raise RejectedInput(f"translation {self.name}: no morphism map for {f}")

    def image(self, sig: Signature, phi: Sentence) -> frozenset:
        key = (sig.id, phi)
        out = self._cache.get(key)
        if out is None:
            if not self.source.has_signature(sig):
                raise RejectedInput(f"signature {sig.id} not in {self.source.name}")
            out = self.alpha[sig.id](phi)
            self._cache[key] = out
        return out

    def image_set(self, sig: Signature, sentences) -> frozenset:
        out: set = set()
        for s in sentences:
            out |= self.image(sig, s)
        return frozenset(out)


def translate_sentence(T: Translation, sig: Signature, phi: Sentence) -> frozenset:
    return T.image(sig, phi)


def translate_set(T: Translation, sig: Signature, sentences) -> frozenset:
    return T.image_set(sig, sentences)


def identity_translation(I: PiInstitution, name: str | None = None) -> Translation:
    alpha = {s.id: HomomorphicMap(s, s, name=f"id[{s.id}]") for s in I.signatures}
    return Translation(name or f"id[{I.name}]", I, I, {s.id: s.id for s in I.signatures}, alpha, lambda f: f)


def cpc_to_ba(cpc: PiInstitution, ba: PiInstitution, name: str = "cpc2ba", template: str = "$ ~= top", **rules) -> Translation:
    """phi |-> {phi ~= top}, the algebraizing translation of CPC into boolean equations."""
    src, tgt = cpc.signature(), ba.signature()
    alpha = HomomorphicMap(src, tgt, sentences=[template], name=name, **rules)
    return Translation(name, cpc, ba, {src.id: tgt.id}, {src.id: alpha})


def multifunction_translation(name: str, source: PiInstitution, target: PiInstitution, alpha: Multifunction, mor_map=None) -> Translation:
    """Translation between one-object institutions from a single multifunction."""
    src, tgt = source.signature(), target.signature()
    return Translation(name, source, target, {src.id: tgt.id}, {src.id: alpha}, mor_map)


# ---------------------------------------------------------------- classification and naturality


def _corpus_pairs(corpus):
    """(signature id, sentence) pairs touched by a corpus."""
    seen: dict = {}
    for it in getattr(corpus, "items", ()):
        for s in sorted_sentences(it.premises) + [it.conclusion]:
            seen.setdefault((it.signature, s), None)
    for f, s in getattr(corpus, "squares", ()):
        seen.setdefault((f.source.id, s), None)
    return list(seen)


def is_self_translation(T: Translation, corpus=None) -> bool:
    if T.source is not T.target and (
        T.source.signatures != T.target.signatures or T.source.name != T.target.name
    ):
        return False
    if any(T.obj_map[s.id] != s.id for s in T.source.signatures):
        return False
    morphs = list(T.source.morphisms) + [f for f, _ in getattr(corpus, "squares", ())]
    try:
        return all(T.F_mor(f) == f for f in morphs)
    except RejectedInput:
        return False


def classify(T: Translation, corpus=None) -> frozenset:
    """Flags among {"self", "functional", "identity"}, judged on the corpus sentences."""
    flags = set()
    pairs = _corpus_pairs(corpus) if corpus is not None else []
    if is_self_translation(T, corpus):
        flags.add("self")
    images = [(phi, T.image(T.source.signature(sid), phi)) for sid, phi in pairs]
    if all(len(img) == 1 for _, img in images):
        flags.add("functional")
    if "self" in flags and all(img == {phi} for phi, img in images):
        flags.add("identity")
    return frozenset(flags)


def check_naturality(T: Translation, corpus) -> CheckReport:
    """alpha(SEN(f) phi) = SEN'(F f)(alpha phi) per square, plus F on identities and composites."""
    report = CheckReport(f"naturality of {T.name}")
    report.meta = {"translation": T.name, "squares": len(corpus.squares), "seed": corpus.seed}
    for sig in T.source.signatures:
        Fid = T.F_mor(identity(sig))
        ok = Fid.is_identity() and Fid.source == T.F(sig)
        report.add("functor-identity", PASS if ok else FAIL, {"signature": sig.id, "F(id)": str(Fid)})
    prev = None
    for n, (f, phi) in enumerate(corpus.squares):
        subj = {"square": n, "morphism": str(f), "sentence": str(phi)}
        try:
            Ff = T.F_mor(f)
            lhs = T.image(f.target, apply_morphism(f, phi))
            rhs = frozenset(apply_morphism(Ff, psi) for psi in T.image(f.source, phi))
        except RejectedInput as e:
            report.add("square", FAIL, subj, note=str(e))
            prev = None
            continue
        subj["F(morphism)"] = str(Ff)
        if lhs == rhs:
            report.add("square", PASS, subj)
        else:
            report.add("square", FAIL, subj, {"alpha(SEN(f)(phi))": show(lhs), "SEN'(F f)(alpha(phi))": show(rhs)})
        if prev is not None and prev[0].target == f.source:
            # F(f o g) and F(f) o F(g) must act alike on the images of g's sentence
            g, psi = prev
            csubj = {"square": n, "first": str(g), "then": str(f), "sentence": str(psi)}
            try:
                a = T.F_mor(compose(f, g))
                b = compose(Ff, T.F_mor(g))
                same = all(apply_morphism(a, s) == apply_morphism(b, s) for s in T.image(g.source, psi))
                report.add("functor-composition", PASS if same else FAIL, csubj)
            except RejectedInput as e:
                report.add("functor-composition", FAIL, csubj, note=str(e))
        prev = (f, phi)
    return report


# ---------------------------------------------------------------- (semi-)interpretation


def image_entailed(I: PiInstitution, sig: Signature, premises, conclusions, budget: int = DEFAULT_BUDGET) -> Verdict:
    """Verdict on ``conclusions`` being a subset of C(premises): NotEntailed if any member fails."""
    unknown = None
    for psi in sorted_sentences(conclusions):
        v = entails(I, sig, premises, psi, budget)
        if isinstance(v, NotEntailed):
            return NotEntailed({"sentence": str(psi), "countermodel": witness_json(v.witness)})
        if isinstance(v, Unknown):
            unknown = unknown or v
    return unknown or ENTAILED


@dataclass
class _ItemResult:
    subject: dict
    source: Verdict
    target: Verdict


def _evaluate(T: Translation, corpus, budget: int, target: PiInstitution | None):
    tgt_inst = target or T.target
    out = []
    for n, it in enumerate(corpus.items):
        sig = T.source.signature(it.signature)
        tsig = tgt_inst.signature(T.obj_map[sig.id])
        a_prem = T.image_set(sig, it.premises)
        a_concl = T.image(sig, it.conclusion)
        subj = {
            "item": n,
            "premises": show(it.premises),
            "conclusion": str(it.conclusion),
            "alpha(premises)": show(a_prem),
            "alpha(conclusion)": show(a_concl),
        }
        v_src = entails(T.source, sig, it.premises, it.conclusion, budget)
        v_tgt = image_entailed(tgt_inst, tsig, a_prem, a_concl, budget)
        subj["verdicts"] = [v_src.label, v_tgt.label]
        out.append(_ItemResult(subj, v_src, v_tgt))
    return out


def _preservation(report: CheckReport, r: _ItemResult) -> None:
    if isinstance(r.source, Unknown):
        report.add("preservation", UNKNOWN, r.subject, note=r.source.reason)
    elif isinstance(r.source, NotEntailed):
        report.add("preservation", VACUOUS, r.subject)
    elif isinstance(r.target, Entailed):
        report.add("preservation", PASS, r.subject)
    elif isinstance(r.target, Unknown):
        report.add("preservation", UNKNOWN, r.subject, note=r.target.reason)
    else:
        report.add("preservation", FAIL, r.subject, r.target.witness, "source entails, target image does not")


def _reflection(report: CheckReport, r: _ItemResult) -> None:
    if isinstance(r.source, Unknown):
        report.add("reflection", UNKNOWN, r.subject, note=r.source.reason)
    elif isinstance(r.source, Entailed):
        report.add("reflection", VACUOUS, r.subject)
    elif isinstance(r.target, NotEntailed):
        report.add("reflection", PASS, r.subject)
    elif isinstance(r.target, Unknown):
        report.add("reflection", UNKNOWN, r.subject, note=r.target.reason)
    else:
        report.add(
            "reflection",
            FAIL,
            r.subject,
            {"source_countermodel": witness_json(r.source.witness)},
            "source does not entail, target image does",
        )


def _direction_meta(report: CheckReport, check: str, n: int) -> str:
    bad = sum(1 for i in report.items if i.check == check and i.status in (FAIL, UNKNOWN))
    return f"{n - bad}/{n}"


def is_semi_interpretation(T: Translation, corpus, budget: int = DEFAULT_BUDGET, target: PiInstitution | None = None) -> CheckReport:
    tgt = target or T.target
    report = CheckReport(f"{T.name} is a semi-interpretation of {T.source.name} in {tgt.name}")
    results = _evaluate(T, corpus, budget, target)
    for r in results:
        _preservation(report, r)
    report.meta = {
        "translation": T.name,
        "corpus_size": len(corpus.items),
        "seed": corpus.seed,
        "preservation": _direction_meta(report, "preservation", len(results)),
    }
    return report


def is_interpretation(T: Translation, corpus, budget: int = DEFAULT_BUDGET, target: PiInstitution | None = None) -> CheckReport:
    """Both directions of the biconditional; preservation and reflection failures are listed separately."""
    tgt = target or T.target
    report = CheckReport(f"{T.name} is an interpretation of {T.source.name} in {tgt.name}")
    results = _evaluate(T, corpus, budget, target)
    for r in results:
        _preservation(report, r)
    for r in results:
        _reflection(report, r)
    report.meta = {
        "translation": T.name,
        "corpus_size": len(corpus.items),
        "seed": corpus.seed,
        "preservation": _direction_meta(report, "preservation", len(results)),
        "reflection": _direction_meta(report, "reflection", len(results)),
    }
    return report


def union_preserved(T: Translation, sig: Signature, A, B) -> bool:
    return T.image_set(sig, set(A) | set(B)) == T.image_set(sig, A) | T.image_set(sig, B)
