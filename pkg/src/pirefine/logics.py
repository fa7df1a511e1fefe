"""Concrete logics: CPC, boolean-algebra equations, modal K and S5^G.

Each logic is a deductive system whose consequence relation is decided
semantically: truth tables for CPC, the two-element boolean algebra for
quasi-equations, Kripke models (global consequence) for the modal logics.
The listed axioms and rules document the presentation; they are not used
for proof search.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._backend import kernels
from ._program import OP_BOX, Program, flat_pairs
from .kernel import (
    DEFAULT_BUDGET,
    ENTAILED,
    ClosureOracle,
    Entailed,
    NotEntailed,
    PiInstitution,
    Unknown,
    entails,
    identity,
    show,
    witness_json,
)
from .report import FAIL, PASS, UNKNOWN, CheckReport
from .semantics import KripkeModel, Valuation, globally_true, prop_holds
from .syntax import RejectedInput, Signature, parse_sentence, sentence_variables, sorted_sentences, subterms

BOOLEAN_CONNECTIVES = (("->", 2), ("/\\", 2), ("\\/", 2), ("~", 1), ("top", 0), ("bot", 0))
DEFAULT_POOL = ("p", "q", "r", "s", "t", "u", "v", "w")
DEFAULT_WORLD_BOUND = 3

BUILTIN_NAMES = ("cpc", "ba-eq", "modal-k", "modal-s5g")


def pool(n: int = len(DEFAULT_POOL)) -> tuple:
    extra = tuple(f"p{i}" for i in range(len(DEFAULT_POOL), n))
    return (DEFAULT_POOL + extra)[:n]


def cpc_signature(variables=DEFAULT_POOL, id: str = "cpc") -> Signature:
    return Signature(id, 1, BOOLEAN_CONNECTIVES, tuple(variables))


def ba_signature(variables=DEFAULT_POOL, id: str = "ba-eq") -> Signature:
    return Signature(id, 2, BOOLEAN_CONNECTIVES, tuple(variables))


def k_signature(variables=DEFAULT_POOL, id: str = "modal-k") -> Signature:
    return Signature(id, 1, BOOLEAN_CONNECTIVES + (("box", 1),), tuple(variables))


def s5g_signature(variables=DEFAULT_POOL, id: str = "modal-s5g") -> Signature:
    return Signature(id, 1, BOOLEAN_CONNECTIVES + (("box", 1), ("dia", 1)), tuple(variables))


def _occurring(sig: Signature, sentences) -> list:
    used = sentence_variables(sentences)
    return [v for v in sig.variables if v in used]


# ---------------------------------------------------------------- oracles


class PropositionalOracle(ClosureOracle):
    """Truth-table oracle for formulas (k=1) and boolean equations (k=2).

    For k=2 this decides quasi-equations in the two-element boolean algebra.
    ``budget`` caps the number of distinct atoms.
    """

    def __init__(self, signature: Signature):
        if signature.dimension not in (1, 2):
            raise RejectedInput("propositional oracle needs dimension 1 or 2")
        for op, _ in signature.connectives:
            if op not in dict(BOOLEAN_CONNECTIVES):
                raise RejectedInput(f"propositional oracle has no semantics for {op!r}")
        self.signature = signature

    def decide(self, premises, conclusion, budget=DEFAULT_BUDGET):
        premises = sorted_sentences(premises)
        atoms = _occurring(self.signature, premises + [conclusion])
        if len(atoms) > budget:
            return Unknown(f"{len(atoms)} atoms exceed budget {budget}")
        prog = Program(atoms)
        prem = flat_pairs(prog.pair(s) for s in premises)
        concl = prog.pair(conclusion)
        idx = kernels.first_countervaluation(prog.code, len(atoms), prem, concl)
        if idx < 0:
            return ENTAILED
        return NotEntailed(Valuation(tuple((a, bool((idx >> j) & 1)) for j, a in enumerate(atoms))))

    def replay(self, premises, conclusion, witness):
        if not isinstance(witness, Valuation):
            return False
        val = {a: False for a in self.signature.variables}
        val.update(witness.as_dict())
        return all(prop_holds(s, val) for s in premises) and not prop_holds(conclusion, val)


class ModalOracle(ClosureOracle):
    """Global consequence in K (all frames) or S5^G (universal frames).

    ``method="exact"`` decides every query within budget: an elimination
    procedure over Hintikka-style types certifies entailment, and bounded
    model enumeration (up to ``world_bound`` worlds) supplies the reported
    countermodel when a small one exists.  ``method="enumerate"`` uses the
    bounded enumeration alone; it answers Entailed only for S5^G when the
    bound reaches the small-model bound, and Unknown otherwise.

    ``budget`` caps atoms + modal subformulas (the type-space exponent).
    """

    def __init__(self, logic: str, signature: Signature, world_bound: int = DEFAULT_WORLD_BOUND, method: str = "exact"):
        if logic not in ("K", "S5G"):
            raise RejectedInput(f"unknown modal logic {logic!r}")
        if method not in ("exact", "enumerate"):
            raise RejectedInput(f"unknown method {method!r}")
        if signature.dimension != 1:
            raise RejectedInput("modal sentences are 1-dimensional")
        allowed = dict(BOOLEAN_CONNECTIVES) | {"box": 1} | ({"dia": 1} if logic == "S5G" else {})
        for op, _ in signature.connectives:
            if op not in allowed:
                raise RejectedInput(f"{logic} has no connective {op!r}")
        self.logic = logic
        self.signature = signature
        self.world_bound = world_bound
        self.method = method

    def decide(self, premises, conclusion, budget=DEFAULT_BUDGET):
        premises = sorted_sentences(premises)
        atoms = _occurring(self.signature, premises + [conclusion])
        prog = Program(atoms)
        prem = [prog.pair(s) for s in premises]
        concl = prog.pair(conclusion)
        n, m = len(atoms), len(prog.modal)
        if n + m > budget:
            return Unknown(f"{n} atoms + {m} modal subformulas exceed budget {budget}")
        if self.method == "enumerate":
            found = self._enumerate(prog, n, flat_pairs(prem), concl, budget)
            if found is not None:
                return NotEntailed(found)
            if self.logic == "S5G" and self.world_bound >= min(s5_small_model_bound(premises, conclusion), 1 << n):
                return ENTAILED
            return Unknown(f"no countermodel with at most {self.world_bound} worlds")
        exact = _k_elimination if self.logic == "K" else _s5_assignment
        model = exact(prog, atoms, prem, concl)
        if model is None:
            return ENTAILED
        # prefer the lexicographically first small countermodel when one is in reach
        found = self._enumerate(prog, n, flat_pairs(prem), concl, budget)
        return NotEntailed(found if found is not None else model)

    def _enumerate(self, prog, n, prem, concl, budget):
        max_models = 1 << (budget + 2)
        if self.logic == "K":
            status, nw, rel, val, _ = kernels.first_countermodel_k(
                prog.code, n, min(self.world_bound, 5), prem, concl, max_models
            )
            if status != 1:
                return None
            relation = frozenset((i, j) for i in range(nw) for j in range(nw) if (rel >> (i * nw + j)) & 1)
            true_atoms = tuple(
                frozenset(a for k, a in enumerate(prog.atoms) if (val >> (w * n + k)) & 1) for w in range(nw)
            )
            return KripkeModel(nw, relation, true_atoms)
        status, combo, _ = kernels.first_countermodel_s5(prog.code, n, self.world_bound, prem, concl, max_models)
        if status != 1:
            return None
        return KripkeModel.make_universal([_atoms_of(v, prog.atoms) for v in combo])

    def replay(self, premises, conclusion, witness):
        if not isinstance(witness, KripkeModel):
            return False
        if self.logic == "S5G" and not witness.universal:
            return False
        return all(globally_true(s, witness) for s in premises) and not globally_true(conclusion, witness)


def _atoms_of(v: int, atoms) -> frozenset:
    return frozenset(a for k, a in enumerate(atoms) if (v >> k) & 1)


def _bits(x: int, width: int) -> str:
    # character i is bit i of x
    return format(x, f"0{width}b")[::-1] if width else ""


def _type_tables(prog: Program, atoms, prem, concl):
    """Truth tables over atoms + one fresh variable per modal subformula."""
    n, m = len(atoms), len(prog.modal)
    bodies = [(prog.body(i), prog.top) for i in prog.modal]
    pairs = flat_pairs(list(prem) + [concl] + bodies)
    tables = kernels.pair_tables(prog.abstracted(), n + m, pairs)
    full = (1 << (1 << (n + m))) - 1
    ok = full
    for t in tables[: len(prem)]:
        ok &= t
    return ok, tables[len(prem)], tables[len(prem) + 1 :]


def _k_elimination(prog: Program, atoms, prem, concl):
    """Global K consequence by elimination of unsatisfiable types.

    A type fixes the atoms and the truth of each modal subformula.  Types
    violating a premise are dropped; a type survives while each of its
    existential demands (a false box, a true diamond) is met by some
    surviving type compatible with its universal demands.  Returns a
    countermodel built from surviving types, or None when the conclusion
    holds in every surviving type.
    """
    n, m = len(atoms), len(prog.modal)
    width = 1 << (n + m)
    ok, concl_t, body_t = _type_tables(prog, atoms, prem, concl)
    ok_s = _bits(ok, width)
    concl_s = _bits(concl_t, width)
    body_s = [_bits(b, width) for b in body_t]
    is_box = [prog.is_modal_op(i) == OP_BOX for i in prog.modal]

    def chi(t: int) -> int:
        return sum(1 << i for i in range(m) if body_s[i][t] == "1")

    classes: dict = {}
    for t in range(width):
        if ok_s[t] == "1":
            classes.setdefault(t >> n, []).append((t, chi(t)))

    def demands(B: int):
        must1 = sum(1 << i for i in range(m) if is_box[i] and (B >> i) & 1)
        must0 = sum(1 << i for i in range(m) if not is_box[i] and not (B >> i) & 1)
        # each demand: (bit, required value) to be met by one successor
        wants = [(i, 0) for i in range(m) if is_box[i] and not (B >> i) & 1]
        wants += [(i, 1) for i in range(m) if not is_box[i] and (B >> i) & 1]
        return must1, must0, wants

    def compatible(mask, must1, must0):
        return mask & must1 == must1 and not mask & must0

    alive = set(classes)
    changed = True
    while changed:
        changed = False
        masks = {c for B in alive for _, c in classes[B]}
        for B in sorted(alive):
            must1, must0, wants = demands(B)
            for i, val in wants:
                if not any(compatible(c, must1, must0) and ((c >> i) & 1) == val for c in masks):
                    alive.discard(B)
                    changed = True
                    break
    types = sorted(t for B in alive for t, _ in classes[B])
    start = next((t for t in types if concl_s[t] == "0"), None)
    if start is None:
        return None
    chis = {t: c for B in alive for t, c in classes[B]}
    worlds = [start]
    k = 0
    while k < len(worlds):
        must1, must0, wants = demands(worlds[k] >> n)
        for i, val in wants:
            if any(compatible(chis[u], must1, must0) and ((chis[u] >> i) & 1) == val for u in worlds):
                continue
            pick = next(u for u in types if compatible(chis[u], must1, must0) and ((chis[u] >> i) & 1) == val)
            worlds.append(pick)
        k += 1
    relation = set()
    for a, t in enumerate(worlds):
        must1, must0, _ = demands(t >> n)
        for b, u in enumerate(worlds):
            if compatible(chis[u], must1, must0):
                relation.add((a, b))
    true_atoms = tuple(_atoms_of(t & ((1 << n) - 1), atoms) for t in worlds)
    return KripkeModel(len(worlds), frozenset(relation), true_atoms)


def _s5_assignment(prog: Program, atoms, prem, concl):
    """Global S5 consequence over universal models.

    In a universal model every modal subformula has one truth value shared
    by all worlds.  For each assignment of those values the largest
    admissible set of valuations is computed; if it meets every existential
    demand and contains a valuation falsifying the conclusion, a small
    countermodel is read off it.
    """
    n, m = len(atoms), len(prog.modal)
    ok, concl_t, body_t = _type_tables(prog, atoms, prem, concl)
    span = 1 << n
    mask = (1 << span) - 1
    is_box = [prog.is_modal_op(i) == OP_BOX for i in prog.modal]
    for B in range(1 << m):
        shift = B << n
        allowed = (ok >> shift) & mask
        bodies = [(b >> shift) & mask for b in body_t]
        for i in range(m):
            on = (B >> i) & 1
            if is_box[i] and on:
                allowed &= bodies[i]
            elif not is_box[i] and not on:
                allowed &= mask ^ bodies[i]
        falsifiers = allowed & ~((concl_t >> shift) & mask)
        if not falsifiers:
            continue
        picks = [_low(falsifiers)]
        feasible = True
        for i in range(m):
            on = (B >> i) & 1
            if is_box[i] and not on:
                need = allowed & ~bodies[i]
            elif not is_box[i] and on:
                need = allowed & bodies[i]
            else:
                continue
            if not need:
                feasible = False
                break
            picks.append(_low(need))
        if feasible:
            worlds = list(dict.fromkeys(picks))
            return KripkeModel.make_universal([_atoms_of(v, atoms) for v in worlds])
    return None


def _low(x: int) -> int:
    return (x & -x).bit_length() - 1


def subformula_count(sentences) -> int:
    seen = set()
    for s in sentences:
        for c in s.components:
            seen.update(subterms(c))
    return len(seen)


def s5_small_model_bound(premises, conclusion) -> int:
    return subformula_count(list(premises) + [conclusion]) + 1


# ---------------------------------------------------------------- convenience entry points


def cpc_entails(premises, conclusion, budget: int = DEFAULT_BUDGET, signature: Signature | None = None):
    sig = signature or cpc_signature()
    for s in list(premises) + [conclusion]:
        sig.check_sentence(s)
    return PropositionalOracle(sig).decide(frozenset(premises), conclusion, budget)


def ba_entails(equations, equation, budget: int = DEFAULT_BUDGET, signature: Signature | None = None):
    sig = signature or ba_signature()
    for s in list(equations) + [equation]:
        sig.check_sentence(s)
    return PropositionalOracle(sig).decide(frozenset(equations), equation, budget)


def modal_entails(
    logic: str,
    premises,
    conclusion,
    world_bound: int = DEFAULT_WORLD_BOUND,
    budget: int = DEFAULT_BUDGET,
    method: str = "exact",
    signature: Signature | None = None,
):
    logic = {"K": "K", "modal-k": "K", "S5G": "S5G", "modal-s5g": "S5G"}.get(logic, logic)
    sig = signature or (k_signature() if logic == "K" else s5g_signature())
    for s in list(premises) + [conclusion]:
        sig.check_sentence(s)
    return ModalOracle(logic, sig, world_bound, method).decide(frozenset(premises), conclusion, budget)


# ---------------------------------------------------------------- deductive systems


@dataclass(frozen=True)
class DeductiveSystem:
    name: str
    signature: Signature
    axioms: tuple
    rules: tuple  # ((premise, ...), conclusion)
    oracle: ClosureOracle

    @property
    def dimension(self) -> int:
        return self.signature.dimension

    def __post_init__(self):
        if self.oracle.signature != self.signature:
            raise RejectedInput(f"{self.name}: oracle signature does not match")
        for s in self.axioms:
            self.signature.check_sentence(s)
        for prem, concl in self.rules:
            for s in prem:
                self.signature.check_sentence(s)
            self.signature.check_sentence(concl)

    def derives(self, premises, conclusion, budget: int = DEFAULT_BUDGET):
        return self.oracle.decide(frozenset(premises), conclusion, budget)


_CPC_AXIOMS = (
    "p -> q -> p",
    "(p -> q -> r) -> (p -> q) -> p -> r",
    "p /\\ q -> p",
    "p /\\ q -> q",
    "p -> q -> p /\\ q",
    "p -> p \\/ q",
    "q -> p \\/ q",
    "(p -> r) -> (q -> r) -> p \\/ q -> r",
    "(p -> bot) -> ~p",
    "~p -> p -> bot",
    "((p -> bot) -> bot) -> p",
    "top",
    "bot -> p",
)
_MP = (("p", "p -> q"), "q")
_K_AXIOMS = ("box (p -> q) -> box p -> box q",)
_NEC = (("p",), "box p")
_S5_AXIOMS = ("box p -> p", "box p -> box box p", "dia p -> box dia p")
# the Kripke semantics reads dia as the dual of box
_DUALITY = ("dia p -> ~box ~p", "~box ~p -> dia p")

_BA_AXIOMS = (
    "p /\\ q ~= q /\\ p",
    "p \\/ q ~= q \\/ p",
    "p /\\ (q /\\ r) ~= (p /\\ q) /\\ r",
    "p \\/ (q \\/ r) ~= (p \\/ q) \\/ r",
    "p /\\ (p \\/ q) ~= p",
    "p \\/ (p /\\ q) ~= p",
    "p /\\ (q \\/ r) ~= (p /\\ q) \\/ (p /\\ r)",
    "p /\\ ~p ~= bot",
    "p \\/ ~p ~= top",
    "p /\\ top ~= p",
    "p \\/ bot ~= p",
    "p -> q ~= ~p \\/ q",
    "p ~= p",
)
_BA_RULES = (
    (("p ~= q",), "q ~= p"),
    (("p ~= q", "q ~= r"), "p ~= r"),
    (("p ~= q",), "~p ~= ~q"),
    (("p ~= q", "r ~= s"), "p /\\ r ~= q /\\ s"),
    (("p ~= q", "r ~= s"), "p \\/ r ~= q \\/ s"),
    (("p ~= q", "r ~= s"), "p -> r ~= q -> s"),
)


def _parse_all(texts, sig):
    return tuple(parse_sentence(t, sig) for t in texts)


def _rules(rules, sig):
    return tuple((_parse_all(p, sig), parse_sentence(c, sig)) for p, c in rules)


def builtin_system(
    name: str, variables=DEFAULT_POOL, world_bound: int = DEFAULT_WORLD_BOUND, method: str = "exact"
) -> DeductiveSystem:
    if name == "cpc":
        sig = cpc_signature(variables)
        return DeductiveSystem("CPC", sig, _parse_all(_CPC_AXIOMS, sig), _rules([_MP], sig), PropositionalOracle(sig))
    if name == "ba-eq":
        sig = ba_signature(variables)
        return DeductiveSystem("BA", sig, _parse_all(_BA_AXIOMS, sig), _rules(_BA_RULES, sig), PropositionalOracle(sig))
    if name == "modal-k":
        sig = k_signature(variables)
        return DeductiveSystem(
            "K",
            sig,
            _parse_all(_CPC_AXIOMS + _K_AXIOMS, sig),
            _rules([_MP, _NEC], sig),
            ModalOracle("K", sig, world_bound, method),
        )
    if name == "modal-s5g":
        sig = s5g_signature(variables)
        return DeductiveSystem(
            "S5G",
            sig,
            _parse_all(_CPC_AXIOMS + _K_AXIOMS + _S5_AXIOMS + _DUALITY, sig),
            _rules([_MP, _NEC], sig),
            ModalOracle("S5G", sig, world_bound, method),
        )
    raise RejectedInput(f"unknown builtin logic {name!r}; expected one of {', '.join(BUILTIN_NAMES)}")


def institution_of(D: DeductiveSystem, name: str | None = None) -> PiInstitution:
    """One signature object V, all substitutions as morphisms, D's consequence as closure."""
    return PiInstitution(
        name or D.name,
        (D.signature,),
        {D.signature.id: D.oracle},
        morphisms=(identity(D.signature),),
        substitutions=True,
    )


def builtin_institution(name: str, variables=DEFAULT_POOL, **kw) -> PiInstitution:
    return institution_of(builtin_system(name, variables, **kw))


class ExtendedOracle(ClosureOracle):
    """Closure of a base oracle after adding fixed extra axioms to every premise set.

    C'(Phi) = C(Phi u extra) contains C(Phi), so this is always a
    syntactic refinement of the base.  Structurality holds only when the
    extra axioms are closed under the substitutions in use.
    """

    def __init__(self, base: ClosureOracle, extra):
        self.base = base
        self.signature = base.signature
        self.extra = frozenset(extra)
        for s in self.extra:
            self.signature.check_sentence(s)

    def decide(self, premises, conclusion, budget=DEFAULT_BUDGET):
        return self.base.decide(frozenset(premises) | self.extra, conclusion, budget)

    def replay(self, premises, conclusion, witness):
        return self.base.replay(frozenset(premises) | self.extra, conclusion, witness)


def extend_institution(I: PiInstitution, extra, name: str | None = None) -> PiInstitution:
    sig = I.signature()
    return PiInstitution(
        name or f"{I.name}+",
        (sig,),
        {sig.id: ExtendedOracle(I.oracle(sig), extra)},
        morphisms=I.morphisms,
        substitutions=I.substitutions,
    )


# ---------------------------------------------------------------- sub-institutions


def match_signatures(small: PiInstitution, big: PiInstitution) -> dict:
    """Pair each signature of ``small`` with one of ``big`` containing it (same id preferred)."""
    out = {}
    for s in small.signatures:
        candidates = [b for b in big.signatures if s.contained_in(b)]
        candidates.sort(key=lambda b: b.id != s.id)
        out[s.id] = candidates[0] if candidates else None
    return out


def structural_containment(small: PiInstitution, big: PiInstitution, report: CheckReport) -> dict:
    pairing = match_signatures(small, big)
    for sid, b in pairing.items():
        subj = {"signature": sid, "into": b.id if b else None}
        if b is None:
            s = small.signature(sid)
            missing = [op for op, a in s.connectives if not any(x.arity(op) == a for x in big.signatures if x.has_connective(op))]
            note = f"connectives missing from {big.name}: {', '.join(missing)}" if missing else "no containing signature"
            report.add("structure", FAIL, subj, note=note)
        else:
            report.add("structure", PASS, subj)
    for f in small.morphisms:
        b1, b2 = pairing.get(f.source.id), pairing.get(f.target.id)
        if b1 is None or b2 is None:
            continue
        lifted = _lift_morphism(f, b1, b2)
        ok = lifted is not None and big.is_morphism(lifted)
        report.add("structure", PASS if ok else FAIL, {"morphism": str(f)})
    return pairing


def _lift_morphism(f, b1: Signature, b2: Signature):
    from .kernel import Substitution, substitution, symbol_map

    if isinstance(f, Substitution):
        if b1 != b2:
            return None
        return substitution(b1, f.as_dict())
    try:
        return symbol_map(b1, b2, dict(f.ops), dict(zip(f.source.variables, f.var_images)))
    except RejectedInput:
        return None


def is_sub_institution(I_sub: PiInstitution, I: PiInstitution, corpus, budget: int = DEFAULT_BUDGET) -> CheckReport:
    """Containment of syntax plus agreement of the two closures on the corpus."""
    report = CheckReport(f"{I_sub.name} is a sub-institution of {I.name}")
    report.meta = {"corpus_size": len(corpus.items), "seed": getattr(corpus, "seed", None)}
    pairing = structural_containment(I_sub, I, report)
    for n, item in enumerate(corpus.items):
        big = pairing.get(item.signature)
        subj = {"item": n, "premises": show(item.premises), "conclusion": str(item.conclusion)}
        if big is None:
            continue
        small = I_sub.signature(item.signature)
        v_small = entails(I_sub, small, item.premises, item.conclusion, budget)
        v_big = entails(I, big, item.premises, item.conclusion, budget)
        subj["verdicts"] = [v_small.label, v_big.label]
        if isinstance(v_small, Unknown) or isinstance(v_big, Unknown):
            report.add("restriction", UNKNOWN, subj)
        elif isinstance(v_small, Entailed) == isinstance(v_big, Entailed):
            report.add("restriction", PASS, subj)
        else:
            w = v_small if isinstance(v_small, NotEntailed) else v_big
            report.add("restriction", FAIL, subj, witness_json(w.witness))
    return report
