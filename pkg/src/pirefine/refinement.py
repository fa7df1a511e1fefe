"""Refinement between pi-institutions: syntactic, by interpretation, and the deductive-system bridge."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import CheckCorpus, random_sentence
from .kernel import (
    DEFAULT_BUDGET,
    Entailed,
    NotEntailed,
    PiInstitution,
    Substitution,
    Unknown,
    entails,
    show,
    substitution,
    witness_json,
)
from .logics import DeductiveSystem, extend_institution, institution_of, structural_containment
from .report import FAIL, PASS, UNKNOWN, VACUOUS, CheckReport
from .translation import (
    HomomorphicMap,
    Multifunction,
    Translation,
    image_entailed,
    is_interpretation,
    is_semi_interpretation,
)
from .syntax import RejectedInput


def _status(v) -> str:
    return PASS if isinstance(v, Entailed) else UNKNOWN if isinstance(v, Unknown) else FAIL


def is_syntactic_refinement(I: PiInstitution, I2: PiInstitution, corpus, budget: int = DEFAULT_BUDGET) -> CheckReport:
    """Signatures and sentences of I are contained in I2, and C(Phi) is contained in C2(Phi) on the corpus.

    Premises range over the sentences of I only.
    """
    report = CheckReport(f"{I2.name} is a syntactic refinement of {I.name}")
    report.meta = {"corpus_size": len(corpus.items), "seed": corpus.seed}
    pairing = structural_containment(I, I2, report)
    for n, it in enumerate(corpus.items):
        sig = I.signature(it.signature)
        sig2 = pairing.get(sig.id)
        subj = {"item": n, "premises": show(it.premises), "conclusion": str(it.conclusion)}
        if sig2 is None:
            continue
        v = entails(I, sig, it.premises, it.conclusion, budget)
        if isinstance(v, Unknown):
            report.add("consequence", UNKNOWN, subj, note=v.reason)
        elif isinstance(v, NotEntailed):
            report.add("consequence", VACUOUS, subj)
        else:
            v2 = entails(I2, sig2, it.premises, it.conclusion, budget)
            w = witness_json(v2.witness) if isinstance(v2, NotEntailed) else None
            report.add("consequence", _status(v2), subj, w)
    return report


@dataclass
class RefinementQuery:
    source: PiInstitution
    target: PiInstitution
    witness: Translation
    candidate_interpretant: PiInstitution | None
    corpus: CheckCorpus
    budget: int = DEFAULT_BUDGET

    def validate(self) -> None:
        I0 = self.candidate_interpretant
        if I0 is None:
            raise RejectedInput(
                "refinement by interpretation needs an interpretant I0 over the target's signatures; "
                "none was supplied and none is searched for"
            )
        if tuple(I0.signatures) != tuple(self.target.signatures):
            raise RejectedInput(f"interpretant {I0.name} does not share the signatures of {self.target.name}")
        if self.witness.source is not self.source and self.witness.source.signatures != self.source.signatures:
            raise RejectedInput(f"translation {self.witness.name} does not start at {self.source.name}")


def is_refinement_by_interpretation(q: RefinementQuery) -> CheckReport:
    """Part 1: the translation interprets the source in I0.  Part 2: images of consequences land in the target's closure."""
    q.validate()
    T, I0 = q.witness, q.candidate_interpretant
    report = CheckReport(f"{q.target.name} refines {q.source.name} by interpretation via {T.name}")
    report.meta = {"interpretant": I0.name, "corpus_size": len(q.corpus.items), "seed": q.corpus.seed}
    report.parts["interpretation"] = is_interpretation(T, q.corpus, q.budget, target=I0)
    report.parts["refinement"] = is_semi_interpretation(T, q.corpus, q.budget, target=q.target)
    return report


# ---------------------------------------------------------------- interpretation lemma


def check_lemma1(
    I: PiInstitution, I2: PiInstitution, I0: PiInstitution, T: Translation, corpus, budget: int = DEFAULT_BUDGET
) -> CheckReport:
    """Per item: if T interprets the item into I0 and I2 extends I0 on its translated queries,
    then source consequence must carry over into I2.  Items violating that are failures."""
    report = CheckReport(f"interpretation into {I0.name} refined by {I2.name} gives refinement by interpretation")
    hyp = {"interpretation": 0, "refinement": 0}
    for n, it in enumerate(corpus.items):
        sig = T.source.signature(it.signature)
        tid = T.obj_map[sig.id]
        s0, s2 = I0.signature(tid), I2.signature(tid)
        a_prem = T.image_set(sig, it.premises)
        a_concl = T.image(sig, it.conclusion)
        subj = {"item": n, "premises": show(it.premises), "conclusion": str(it.conclusion)}
        v_src = entails(I, sig, it.premises, it.conclusion, budget)
        v_0 = image_entailed(I0, s0, a_prem, a_concl, budget)
        if isinstance(v_src, Unknown) or isinstance(v_0, Unknown):
            report.add("lemma", UNKNOWN, subj)
            continue
        interp_ok = isinstance(v_src, Entailed) == isinstance(v_0, Entailed)
        refine_ok = True
        undecided = False
        for psi in a_concl:
            w0 = entails(I0, s0, a_prem, psi, budget)
            if isinstance(w0, Entailed):
                w2 = entails(I2, s2, a_prem, psi, budget)
                undecided |= isinstance(w2, Unknown)
                refine_ok &= isinstance(w2, Entailed)
        hyp["interpretation"] += interp_ok
        hyp["refinement"] += refine_ok
        if not isinstance(v_src, Entailed):
            report.add("lemma", VACUOUS, subj, note="source does not entail")
            continue
        v_2 = image_entailed(I2, s2, a_prem, a_concl, budget)
        subj["verdicts"] = [v_src.label, v_0.label, v_2.label]
        if isinstance(v_2, Entailed):
            report.add("lemma", PASS, subj)
        elif isinstance(v_2, Unknown) or undecided:
            report.add("lemma", UNKNOWN, subj)
        elif interp_ok and refine_ok:
            report.add("lemma", FAIL, subj, v_2.witness, "hypotheses hold but the conclusion fails")
        else:
            report.add("lemma", VACUOUS, subj, note="hypothesis fails on this item")
    report.meta = {
        "corpus_size": len(corpus.items),
        "seed": corpus.seed,
        "hypothesis_interpretation": f"{hyp['interpretation']}/{len(corpus.items)}",
        "hypothesis_refinement": f"{hyp['refinement']}/{len(corpus.items)}",
        "violations": len(report.failures()),
    }
    return report


def random_extension(I0: PiInstitution, seed: int, max_axioms: int = 2, depth: int = 2, n_vars: int = 3) -> PiInstitution:
    """I0 with a few random extra axioms added to every premise set: a monotone extension."""
    rng = random.Random(seed)
    sig = I0.signature()
    atoms = list(sig.variables[:n_vars])
    extra = [random_sentence(rng, sig, atoms, depth) for _ in range(rng.randint(1, max_axioms))]
    return extend_institution(I0, extra, f"{I0.name}+fuzz{seed}")


def lemma1_fuzz(I: PiInstitution, I0: PiInstitution, T: Translation, corpus, trials: int = 20, seed: int = 0, budget: int = DEFAULT_BUDGET) -> list:
    """One interpretation-lemma replay per trial; odd trials also fuzz the interpretant."""
    reports = []
    for k in range(trials):
        I2 = random_extension(I0, seed * 1000 + k)
        base = I0
        if k % 2:
            base = random_extension(I0, seed * 1000 + k + 500, max_axioms=1)
            I2 = extend_institution(base, I2.oracle(I2.signature()).extra, f"{base.name}+")
        reports.append(check_lemma1(I, I2, base, T, corpus, budget))
    return reports


# ---------------------------------------------------------------- deductive systems


def _reread(source, target):
    def mor_map(f):
        if not isinstance(f, Substitution):
            raise RejectedInput("only substitutions live in a deductive system's signature category")
        return substitution(target, f.as_dict())

    return mor_map


def bridge_translation(
    tau: Multifunction, L: DeductiveSystem, L2: DeductiveSystem, name: str | None = None
) -> Translation:
    """<F_tau, tau> from I_L to I_L2: F_tau sends V to V2, alpha is tau."""
    if tau.source != L.signature or tau.target != L2.signature:
        raise RejectedInput("tau must map formulas of L to sentence sets of L2")
    IL, IL2 = institution_of(L), institution_of(L2)
    mor_map = tau.map_morphism if isinstance(tau, HomomorphicMap) else _reread(L.signature, L2.signature)
    return Translation(name or tau.name, IL, IL2, {L.signature.id: L2.signature.id}, {L.signature.id: tau}, mor_map)


def _truth(a, b):
    """Biconditional over tri-valued verdicts; None when undecided."""
    if isinstance(a, Unknown) or isinstance(b, Unknown):
        return None
    return isinstance(a, Entailed) == isinstance(b, Entailed)


def check_deductive_correspondence(
    L: DeductiveSystem, L2: DeductiveSystem, tau: Multifunction, corpus, budget: int = DEFAULT_BUDGET
) -> CheckReport:
    """Per item, the deductive-system biconditional and the institutional one must agree.

    The first goes through the systems' own derivability and tau directly; the
    second through the institutions and the bridge translation.  Items where
    both agree but the biconditional is false are interpretation failures of
    tau, counted in meta, not disagreements.
    """
    T = bridge_translation(tau, L, L2)
    IL, IL2 = T.source, T.target
    V, V2 = L.signature, L2.signature
    report = CheckReport(f"deductive and institutional readings of {tau.name} agree")
    not_interp = 0
    for n, it in enumerate(corpus.items):
        gamma, phi = it.premises, it.conclusion
        tgamma = tau.image_set(gamma)
        ded = _truth(L.derives(gamma, phi, budget), _all_derived(L2, tgamma, tau(phi), budget))
        inst = _truth(
            entails(IL, V, gamma, phi, budget),
            image_entailed(IL2, V2, T.image_set(V, gamma), T.image(V, phi), budget),
        )
        subj = {"item": n, "premises": show(gamma), "conclusion": str(phi), "deductive": ded, "institutional": inst}
        if ded is None or inst is None:
            report.add("correspondence", UNKNOWN, subj)
        elif ded == inst:
            report.add("correspondence", PASS, subj)
            not_interp += not ded
        else:
            report.add("correspondence", FAIL, subj, note="the two readings disagree")
    report.meta = {
        "tau": tau.name,
        "corpus_size": len(corpus.items),
        "seed": corpus.seed,
        "disagreements": len(report.failures()),
        "interpretation_failures": not_interp,
        "tau_interprets": not_interp == 0,
    }
    return report


def _all_derived(L: DeductiveSystem, premises, conclusions, budget):
    out = None
    for psi in sorted(conclusions, key=str):
        v = L.derives(premises, psi, budget)
        if isinstance(v, NotEntailed):
            return v
        if isinstance(v, Unknown):
            out = v
    return out or Entailed()
