"""Structured specifications inside one pi-institution, local refinement, and rho-hat."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .corpus import CheckCorpus, CorpusItem
from .kernel import (
    DEFAULT_BUDGET,
    ENTAILED,
    Entailed,
    NotEntailed,
    PiInstitution,
    Unknown,
    Verdict,
    apply_morphism,
    apply_set,
    entails,
    show,
    witness_json,
)
from .report import FAIL, PASS, UNKNOWN, VACUOUS, CheckReport
from .syntax import RejectedInput, Sentence, Signature, Var, sentence_variables, sorted_sentences
from .translation import Multifunction, Translation


# ---------------------------------------------------------------- specification terms


class Specification:
    institution: PiInstitution
    signature: Signature

    def has_derive(self) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class Flat(Specification):
    signature: Signature
    axioms: frozenset
    institution: PiInstitution = field(compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "axioms", frozenset(self.axioms))
        if not self.institution.has_signature(self.signature):
            raise RejectedInput(f"signature {self.signature.id} not in {self.institution.name}")
        for s in self.axioms:
            self.signature.check_sentence(s)

    def has_derive(self) -> bool:
        return False

    def __str__(self) -> str:
        return f"flat {self.signature.id} {{{'; '.join(show(self.axioms))}}}"


@dataclass(frozen=True)
class Union(Specification):
    left: Specification
    right: Specification

    def __post_init__(self):
        if self.left.institution is not self.right.institution:
            raise RejectedInput("union operands live in different institutions")
        if self.left.signature != self.right.signature:
            raise RejectedInput(
                f"union operands must share a signature: {self.left.signature.id} vs {self.right.signature.id}"
            )

    @property
    def institution(self):
        return self.left.institution

    @property
    def signature(self):
        return self.left.signature

    def has_derive(self) -> bool:
        return self.left.has_derive() or self.right.has_derive()

    def __str__(self) -> str:
        return f"union ({self.left}) ({self.right})"


@dataclass(frozen=True)
class Translate(Specification):
    spec: Specification
    morphism: object

    def __post_init__(self):
        if self.morphism.source != self.spec.signature:
            raise RejectedInput(f"translate: morphism starts at {self.morphism.source.id}, spec is over {self.spec.signature.id}")
        if not self.spec.institution.is_morphism(self.morphism):
            raise RejectedInput(f"translate: {self.morphism} is not a morphism of {self.spec.institution.name}")
        if self.spec.has_derive():
            raise RejectedInput(
                "translate over a derive is not supported: membership would need preimages along the morphism"
            )

    @property
    def institution(self):
        return self.spec.institution

    @property
    def signature(self):
        return self.morphism.target

    def has_derive(self) -> bool:
        return False

    def __str__(self) -> str:
        return f"translate ({self.spec}) through {self.morphism}"


@dataclass(frozen=True)
class Derive(Specification):
    """derive SP' through sigma: the sentences psi over sigma's source with SEN(sigma)(psi) true in SP'."""

    spec: Specification
    morphism: object

    def __post_init__(self):
        if self.morphism.target != self.spec.signature:
            raise RejectedInput(f"derive: morphism ends at {self.morphism.target.id}, spec is over {self.spec.signature.id}")
        if not self.spec.institution.is_morphism(self.morphism):
            raise RejectedInput(f"derive: {self.morphism} is not a morphism of {self.spec.institution.name}")

    @property
    def institution(self):
        return self.spec.institution

    @property
    def signature(self):
        return self.morphism.source

    def has_derive(self) -> bool:
        return True

    def __str__(self) -> str:
        return f"derive ({self.spec}) through {self.morphism}"


def flat(I: PiInstitution, axioms, signature: Signature | None = None) -> Flat:
    return Flat(signature or I.signature(), frozenset(axioms), I)


def normalize(sp: Specification) -> Flat:
    """Flat presentation of a derive-free specification."""
    if isinstance(sp, Flat):
        return sp
    if isinstance(sp, Union):
        a, b = normalize(sp.left), normalize(sp.right)
        return Flat(a.signature, a.axioms | b.axioms, a.institution)
    if isinstance(sp, Translate):
        a = normalize(sp.spec)
        return Flat(sp.signature, apply_set(sp.morphism, a.axioms), a.institution)
    if isinstance(sp, Derive):
        raise RejectedInput(
            "cannot normalize a derive: its axiom set is the generally infinite preimage of a closure; "
            "query it with holds instead"
        )
    raise RejectedInput(f"not a specification: {sp!r}")


def holds(sp: Specification, phi: Sentence, budget: int = DEFAULT_BUDGET) -> Verdict:
    """phi in the meaning (closure) of ``sp``."""
    sp.signature.check_sentence(phi)
    if not sp.has_derive():
        n = normalize(sp)
        return entails(n.institution, n.signature, n.axioms, phi, budget)
    if isinstance(sp, Derive):
        return holds(sp.spec, apply_morphism(sp.morphism, phi), budget)
    if isinstance(sp, Union):
        # only a positive answer is sound without extracting the derived axioms
        for part in (sp.left, sp.right):
            v = holds(part, phi, budget)
            if isinstance(v, Entailed):
                return v
        return Unknown("union over a derive: not entailed by either part alone; joint consequence not decidable here")
    raise RejectedInput(f"cannot evaluate {sp}")


# ---------------------------------------------------------------- local (semi-)interpretation


def _sentences(corpus, sig: Signature) -> list:
    if isinstance(corpus, (list, tuple)):
        return [s for s in corpus if sig.is_sentence(s)]
    seen: dict = {}
    for s in corpus.sentences():
        if sig.is_sentence(s):
            seen.setdefault(s, None)
    return list(seen)


def _all_hold(sp: Specification, sentences, budget) -> Verdict:
    unknown = None
    for psi in sorted_sentences(sentences):
        v = holds(sp, psi, budget)
        if isinstance(v, NotEntailed):
            return NotEntailed({"sentence": str(psi), "countermodel": witness_json(v.witness)})
        if isinstance(v, Unknown):
            unknown = unknown or v
    return unknown or ENTAILED


def _check_i(i: Multifunction, sp: Specification, sp2: Specification) -> None:
    if i.source != sp.signature or i.target != sp2.signature:
        raise RejectedInput(
            f"{i.name} maps {i.source.id} to {i.target.id}; specifications are over {sp.signature.id} and {sp2.signature.id}"
        )


def _local(report, i, sp, sp2, sentences, budget, reflect: bool):
    for n, phi in enumerate(sentences):
        img = i(phi)
        subj = {"sentence": str(phi), "image": show(img)}
        v = holds(sp, phi, budget)
        w = _all_hold(sp2, img, budget)
        subj["verdicts"] = [v.label, w.label]
        if isinstance(v, Unknown):
            report.add("preservation", UNKNOWN, subj)
            if reflect:
                report.add("reflection", UNKNOWN, subj)
            continue
        if isinstance(w, Unknown):
            entailed = isinstance(v, Entailed)
            report.add("preservation", UNKNOWN if entailed else VACUOUS, subj)
            if reflect:
                report.add("reflection", VACUOUS if entailed else UNKNOWN, subj)
            continue
        if isinstance(v, Entailed):
            ok = isinstance(w, Entailed)
            report.add("preservation", PASS if ok else FAIL, subj, None if ok else w.witness)
            if reflect:
                report.add("reflection", VACUOUS, subj)
        else:
            report.add("preservation", VACUOUS, subj)
            if reflect:
                ok = isinstance(w, NotEntailed)
                report.add("reflection", PASS if ok else FAIL, subj, None if ok else {"source_countermodel": witness_json(v.witness)})


def is_local_semi_interpretation(i: Multifunction, sp, sp2, corpus, budget: int = DEFAULT_BUDGET) -> CheckReport:
    _check_i(i, sp, sp2)
    sentences = _sentences(corpus, sp.signature)
    report = CheckReport(f"{i.name} is a local semi-interpretation")
    report.meta = {"sentences": len(sentences)}
    _local(report, i, sp, sp2, sentences, budget, reflect=False)
    return report


def is_local_interpretation(i: Multifunction, sp, sp2, corpus, budget: int = DEFAULT_BUDGET) -> CheckReport:
    """phi true in sp iff i(phi) true in sp2, on the corpus sentences over sp's signature."""
    _check_i(i, sp, sp2)
    sentences = _sentences(corpus, sp.signature)
    report = CheckReport(f"{i.name} is a local interpretation")
    report.meta = {"sentences": len(sentences)}
    _local(report, i, sp, sp2, sentences, budget, reflect=True)
    return report


def local_refines(i: Multifunction, sp, sp2, corpus, budget: int = DEFAULT_BUDGET, witness: Specification | None = None) -> CheckReport:
    """sp refines to sp2 via i: every phi true in sp has i(phi) true in sp2.

    With ``witness``, also checks that i interprets sp in it (the premise that i interprets sp).
    """
    _check_i(i, sp, sp2)
    sentences = _sentences(corpus, sp.signature)
    report = CheckReport(f"refinement via {i.name}")
    report.meta = {"sentences": len(sentences)}
    _local(report, i, sp, sp2, sentences, budget, reflect=False)
    if witness is not None:
        report.parts["interprets"] = is_local_interpretation(i, sp, witness, sentences, budget)
    return report


def induced_translation(sigma) -> Multifunction:
    """phi |-> {SEN(sigma)(phi)}."""
    return Multifunction(sigma.source, sigma.target, lambda phi: [apply_morphism(sigma, phi)], f"SEN({sigma})")


def is_conservative(sigma, I: PiInstitution, corpus, budget: int = DEFAULT_BUDGET) -> CheckReport:
    """phi in C(Phi) iff SEN(sigma)(phi) in C'(SEN(sigma)(Phi)), per corpus item.

    Forward failures can only come from a broken oracle; reflection failures
    show that sigma is not conservative.
    """
    if not I.is_morphism(sigma):
        raise RejectedInput(f"{sigma} is not a morphism of {I.name}")
    report = CheckReport(f"{sigma} is conservative in {I.name}")
    report.meta = {"corpus_size": len(corpus.items), "seed": corpus.seed}
    for n, it in enumerate(corpus.items):
        if it.signature != sigma.source.id:
            continue
        img_prem = apply_set(sigma, it.premises)
        img_concl = apply_morphism(sigma, it.conclusion)
        subj = {
            "item": n,
            "premises": show(it.premises),
            "conclusion": str(it.conclusion),
            "image_premises": show(img_prem),
            "image_conclusion": str(img_concl),
        }
        v = entails(I, sigma.source, it.premises, it.conclusion, budget)
        w = entails(I, sigma.target, img_prem, img_concl, budget)
        subj["verdicts"] = [v.label, w.label]
        if isinstance(v, Unknown) or isinstance(w, Unknown):
            report.add("forward", UNKNOWN, subj)
            report.add("reflection", UNKNOWN, subj)
        elif isinstance(v, Entailed):
            ok = isinstance(w, Entailed)
            report.add("forward", PASS if ok else FAIL, subj, None if ok else witness_json(w.witness), "" if ok else "oracle bug: structurality violated")
            report.add("reflection", VACUOUS, subj)
        else:
            report.add("forward", VACUOUS, subj)
            ok = isinstance(w, NotEntailed)
            report.add(
                "reflection",
                PASS if ok else FAIL,
                subj,
                None if ok else {"source_countermodel": witness_json(v.witness)},
                "" if ok else "not conservative",
            )
    return report


def conservativity_probes(sigma, limit: int = 6) -> list:
    """Items ({a} |- b) and ( |- a) over the atoms sigma moves or produces.

    A substitution identifying two atoms fails reflection on one of these.
    Only 1-dimensional signatures get probes.
    """
    sig = sigma.source
    if sig.dimension != 1:
        return []
    moved = []
    for v in sig.variables:
        img = apply_morphism(sigma, _atom(v))
        if img != _atom(v):
            moved.append(v)
            moved.extend(sorted(sentence_variables([img])))
    atoms = list(dict.fromkeys(moved))[:limit]
    items = [CorpusItem(sig.id, frozenset(), _atom(a)) for a in atoms]
    items += [CorpusItem(sig.id, frozenset({_atom(a)}), _atom(b)) for a in atoms for b in atoms if a != b]
    return items


def _atom(v: str) -> Sentence:
    return Sentence((Var(v),))


def check_conservative_refinement(
    sigma, sp: Flat, axioms2, corpus, budget: int = DEFAULT_BUDGET, conservativity_corpus=None
) -> CheckReport:
    """Replay of: sigma conservative and SEN(sigma)(Phi) in C(Phi') give sp refines <Sigma', Phi'> via SEN(sigma)."""
    I = sp.institution
    target = Flat(sigma.target, frozenset(axioms2), I)
    i = induced_translation(sigma)
    report = CheckReport(f"conservative refinement along {sigma}")
    # conservativity quantifies over every axiom set, so Phi itself is probed with each checked sentence
    base = conservativity_corpus or corpus
    if not isinstance(base, CheckCorpus):
        base = CheckCorpus(0)
    probes = [CorpusItem(sp.signature.id, sp.axioms, phi) for phi in _sentences(corpus, sp.signature)]
    cons = CheckCorpus(base.seed, list(base.items) + probes, base.squares, base.depth, len(base.items) + len(probes))
    report.preconditions["conservative"] = is_conservative(sigma, I, cons, budget)
    hyp = CheckReport("SEN(sigma)(Phi) holds in the target")
    for phi in sorted_sentences(sp.axioms):
        v = holds(target, apply_morphism(sigma, phi), budget)
        hyp.add("hypothesis", PASS if isinstance(v, Entailed) else UNKNOWN if isinstance(v, Unknown) else FAIL, {"axiom": str(phi)})
    report.preconditions["hypothesis"] = hyp
    sp_sigma = Flat(sigma.target, apply_set(sigma, sp.axioms), I)
    report.parts["conclusion"] = local_refines(i, sp, target, corpus, budget, witness=sp_sigma)
    report.meta = {"target_axioms": show(target.axioms), "violations": report.parts["conclusion"].n_failures}
    return report


def check_union_preservation(
    i: Multifunction, sp1, sp2, sp1t, sp2t, corpus, budget: int = DEFAULT_BUDGET, witness: Specification | None = None
) -> CheckReport:
    """Replay of the union lemma: hypotheses per operand, then the conclusion on the unions.

    The hypotheses gate the run: if one fails the report is inconclusive.
    """
    report = CheckReport(f"union preserves refinement via {i.name}")
    sentences = _sentences(corpus, sp1.signature)
    u, ut = Union(sp1, sp2), Union(sp1t, sp2t)
    report.preconditions["left"] = local_refines(i, sp1, sp1t, sentences, budget)
    report.preconditions["right"] = local_refines(i, sp2, sp2t, sentences, budget)
    if witness is not None:
        report.preconditions["interprets-union"] = is_local_interpretation(i, u, witness, sentences, budget)
    report.parts["conclusion"] = local_refines(i, u, ut, sentences, budget)
    report.meta = {"sentences": len(sentences), "violations": report.parts["conclusion"].n_failures}
    return report


# ---------------------------------------------------------------- rho-hat and the structural equations


def rho_hat(rho: Translation, sp: Specification) -> Specification:
    """Flat <S, Phi> goes to <F(S), alpha(Phi)>; constructors are mapped part by part."""
    if isinstance(sp, Flat):
        if sp.institution is not rho.source:
            raise RejectedInput(f"specification is not over {rho.source.name}")
        return Flat(rho.F(sp.signature), rho.image_set(sp.signature, sp.axioms), rho.target)
    if isinstance(sp, Union):
        return Union(rho_hat(rho, sp.left), rho_hat(rho, sp.right))
    if isinstance(sp, Translate):
        return Translate(rho_hat(rho, sp.spec), rho.F_mor(sp.morphism))
    if isinstance(sp, Derive):
        return Derive(rho_hat(rho, sp.spec), rho.F_mor(sp.morphism))
    raise RejectedInput(f"not a specification: {sp!r}")


def rho_hat_presentation(rho: Translation, sp: Specification) -> Flat:
    """rho-hat applied to the flat presentation of a derive-free specification."""
    n = normalize(sp)
    return Flat(rho.F(n.signature), rho.image_set(n.signature, n.axioms), rho.target)


def _presentation_item(report, check, rho, sp, subj):
    lhs = rho_hat_presentation(rho, sp)
    rhs = normalize(rho_hat(rho, sp))
    if lhs == rhs:
        report.add(check, PASS, subj)
    else:
        report.add(
            check,
            FAIL,
            subj,
            {"rho_hat(spec)": show(lhs.axioms), "constructor(rho_hat(parts))": show(rhs.axioms), "signatures": [lhs.signature.id, rhs.signature.id]},
        )


def check_structural_lemma(rho: Translation, instances, sentences=None, budget: int = DEFAULT_BUDGET, naturality=None) -> CheckReport:
    """rho-hat commutes with union, translate and derive.

    Union and translate instances compare flat presentations exactly.  For a
    derive instance, each sentence phi over its signature is checked for
    phi in Psi (phi true in the source derive) iff alpha(phi) true in the
    derive of rho-hat(SP') through F(sigma).
    """
    report = CheckReport(f"rho-hat of {rho.name} is structural")
    if naturality is not None:
        report.preconditions["naturality"] = naturality
    for n, sp in enumerate(instances):
        subj = {"instance": n, "spec": str(sp)}
        if isinstance(sp, Union) and not sp.has_derive():
            _presentation_item(report, "union", rho, sp, subj)
        elif isinstance(sp, Translate):
            _presentation_item(report, "translate", rho, sp, subj)
        elif isinstance(sp, Derive):
            image = rho_hat(rho, sp)
            sig = sp.signature
            for phi in _sentences(sentences or [], sig):
                s = dict(subj, sentence=str(phi))
                v = holds(sp, phi, budget)
                w = _all_hold(image, rho.image(sig, phi), budget)
                s["verdicts"] = [v.label, w.label]
                if isinstance(v, Unknown) or isinstance(w, Unknown):
                    report.add("derive", UNKNOWN, s)
                elif isinstance(v, Entailed) == isinstance(w, Entailed):
                    report.add("derive", PASS, s)
                else:
                    report.add("derive", FAIL, s, witness_json(v.witness if isinstance(v, NotEntailed) else w.witness))
        else:
            _presentation_item(report, "flat", rho, sp, subj)
    return report


def spec_instances(I: PiInstitution, count: int, seed: int, kinds=("union", "translate"), depth: int = 2, n_vars: int = 4) -> list:
    """Seeded union / translate / derive instances over flat parts of up to three axioms."""
    from .corpus import random_sentence, random_substitution

    rng = random.Random(seed)
    out = []
    for n in range(count):
        sig = I.signatures[n % len(I.signatures)]
        atoms = list(sig.variables[:n_vars])

        def part():
            return Flat(sig, frozenset(random_sentence(rng, sig, atoms, depth) for _ in range(rng.randint(0, 3))), I)

        kind = kinds[n % len(kinds)]
        if kind == "union":
            out.append(Union(part(), part()))
        elif kind == "translate":
            out.append(Translate(part(), random_substitution(rng, sig, atoms)))
        elif kind == "derive":
            out.append(Derive(part(), random_substitution(rng, sig, atoms)))
        else:
            raise RejectedInput(f"unknown constructor {kind!r}")
    return out
