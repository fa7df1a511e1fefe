"""Seeded generation of sentences, entailment queries and morphism squares.

Every generator takes an explicit seed and draws from its own
``random.Random``; the same arguments always give the same corpus.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .kernel import DEFAULT_BUDGET, Entailed, PiInstitution, Unknown, entails, substitution
from .syntax import App, RejectedInput, Sentence, Signature, Var, depth, sorted_sentences

DEFAULT_DEPTH = 4
DEFAULT_VARS = 4
DEFAULT_SIZE = 100


@dataclass(frozen=True)
class CorpusItem:
    signature: str
    premises: frozenset
    conclusion: Sentence
    label: str = ""  # oracle verdict at generation time

    def to_dict(self) -> dict:
        return {
            "signature": self.signature,
            "premises": [str(s) for s in sorted_sentences(self.premises)],
            "conclusion": str(self.conclusion),
            "label": self.label,
        }


@dataclass
class CheckCorpus:
    seed: int
    items: list = field(default_factory=list)
    squares: list = field(default_factory=list)  # (morphism, sentence)
    depth: int = DEFAULT_DEPTH
    size: int = 0
    meta: dict = field(default_factory=dict)

    def labels(self) -> dict:
        out: dict = {}
        for it in self.items:
            out[it.label] = out.get(it.label, 0) + 1
        return out

    def sentences(self) -> list:
        seen = {}
        for it in self.items:
            for s in sorted_sentences(it.premises) + [it.conclusion]:
                seen.setdefault(s, None)
        for _, s in self.squares:
            seen.setdefault(s, None)
        return list(seen)


# ---------------------------------------------------------------- sentences


def _atoms(sig: Signature, n_vars: int | None) -> list:
    n = len(sig.variables) if n_vars is None else min(n_vars, len(sig.variables))
    if n < 1:
        raise RejectedInput(f"signature {sig.id} has no variables to sample from")
    return list(sig.variables[:n])


def _leaves(sig: Signature, atoms) -> list:
    return [Var(a) for a in atoms] + [App(op) for op, a in sig.connectives if a == 0]


def count_terms(sig: Signature, atoms, d: int) -> int:
    """Number of distinct terms of depth at most ``d`` over ``atoms``."""
    leaves = len(_leaves(sig, atoms))
    total = leaves
    for _ in range(d):
        total = leaves + sum(total**a for _, a in sig.connectives if a > 0)
    return total


def random_term(rng: random.Random, sig: Signature, atoms, d: int, leaf_bias: float = 0.3):
    leaves = _leaves(sig, atoms)
    ops = [(op, a) for op, a in sig.connectives if a > 0]
    if d <= 0 or not ops or rng.random() < leaf_bias:
        return rng.choice(leaves)
    op, a = rng.choice(ops)
    return App(op, tuple(random_term(rng, sig, atoms, d - 1, leaf_bias) for _ in range(a)))


def random_sentence(rng: random.Random, sig: Signature, atoms, d: int) -> Sentence:
    return Sentence(tuple(random_term(rng, sig, atoms, d) for _ in range(sig.dimension)))


def _all_terms(sig: Signature, atoms, d: int) -> list:
    level = list(_leaves(sig, atoms))
    for _ in range(d):
        nxt = list(_leaves(sig, atoms))
        for op, a in sig.connectives:
            if a > 0:
                nxt.extend(App(op, args) for args in itertools.product(level, repeat=a))
        level = nxt
    return level


def gen_sentences(
    sig: Signature, depth: int, count: int, seed: int, n_vars: int | None = DEFAULT_VARS
) -> list:
    """``count`` distinct sentences of term depth at most ``depth``."""
    if depth < 0:
        raise RejectedInput("depth must be >= 0")
    if count < 1:
        raise RejectedInput("count must be >= 1")
    atoms = _atoms(sig, n_vars)
    attainable = count_terms(sig, atoms, depth) ** sig.dimension
    if count > attainable:
        raise RejectedInput(
            f"only {attainable} distinct sentences of depth <= {depth} exist over {len(atoms)} variables; asked for {count}"
        )
    rng = random.Random(seed)
    if attainable <= max(4 * count, 256):
        terms = _all_terms(sig, atoms, depth)
        pool = [Sentence(c) for c in itertools.product(terms, repeat=sig.dimension)]
        rng.shuffle(pool)
        return pool[:count]
    out: dict = {}
    while len(out) < count:
        out.setdefault(random_sentence(rng, sig, atoms, depth), None)
    return list(out)


# ---------------------------------------------------------------- entailment corpora


def _derived(rng: random.Random, sig: Signature, atoms, premises: list, d: int):
    """A conclusion likely to follow from ``premises`` (checked by the oracle anyway)."""
    has = sig.has_connective
    base = rng.choice(premises) if premises else None
    other = random_sentence(rng, sig, atoms, max(d - 2, 0))
    if sig.dimension == 1:
        forms = []
        x = other.components[0]
        if base is not None:
            b = base.components[0]
            forms.append(base)
            if has("\\/") and sig.arity("\\/") == 2:
                forms.append(Sentence((App("\\/", (b, x)),)))
            if has("->") and sig.arity("->") == 2:
                forms.append(Sentence((App("->", (x, b)),)))
            if has("/\\") and sig.arity("/\\") == 2 and len(premises) > 1:
                forms.append(Sentence((App("/\\", (b, rng.choice(premises).components[0])),)))
        if has("->") and sig.arity("->") == 2:
            forms.append(Sentence((App("->", (x, x)),)))
        if has("\\/") and has("~"):
            forms.append(Sentence((App("\\/", (x, App("~", (x,)))),)))
        return _pick(rng, forms, d, other)
    if sig.dimension == 2:
        forms = [Sentence((other.components[0], other.components[0]))]
        if base is not None:
            s, t = base.components
            forms.append(Sentence((t, s)))
            if has("~"):
                forms.append(Sentence((App("~", (s,)), App("~", (t,)))))
            x = other.components[0]
            for op in ("/\\", "\\/"):
                if has(op) and sig.arity(op) == 2:
                    forms.append(Sentence((App(op, (s, x)), App(op, (t, x)))))
        return _pick(rng, forms, d, other)
    return other


def _pick(rng, forms, d, fallback):
    fits = [f for f in forms if max(depth(c) for c in f.components) <= d]
    return rng.choice(fits) if fits else fallback


def gen_entailment_corpus(
    I: PiInstitution,
    sig: Signature,
    size: int = DEFAULT_SIZE,
    seed: int = 0,
    depth: int = DEFAULT_DEPTH,
    budget: int = DEFAULT_BUDGET,
    n_vars: int | None = DEFAULT_VARS,
    max_premises: int = 2,
) -> CheckCorpus:
    """Queries labeled by the oracle, with at least 25% of each verdict when attainable.

    Odd draws aim for an entailed item by synthesizing a conclusion from the
    premises; even draws take a random conclusion.  Unknown verdicts are
    counted and dropped; more than 50% Unknown aborts generation.
    """
    if size < 1:
        raise RejectedInput("corpus size must be >= 1")
    if not I.has_signature(sig):
        raise RejectedInput(f"signature {sig.id} not in institution {I.name}")
    atoms = _atoms(sig, n_vars)
    rng = random.Random(seed)
    quota = -(-size // 4)
    items: list = []
    seen: set = set()
    counts = {"Entailed": 0, "NotEntailed": 0, "Unknown": 0}
    kept = {"Entailed": 0, "NotEntailed": 0}
    attempts = 0
    balanced_attempts = 40 * size + 100
    while len(items) < size and attempts < 2 * balanced_attempts:
        attempts += 1
        balancing = attempts <= balanced_attempts
        n_prem = rng.randint(0, max_premises)
        premises = [random_sentence(rng, sig, atoms, max(depth - 1, 0)) for _ in range(n_prem)]
        need_ent = kept["Entailed"] < quota
        need_not = kept["NotEntailed"] < quota
        if need_ent and (not need_not or attempts % 2 == 1):
            conclusion = _derived(rng, sig, atoms, premises, depth)
        else:
            conclusion = random_sentence(rng, sig, atoms, depth)
        key = (frozenset(premises), conclusion)
        if key in seen:
            continue
        seen.add(key)
        v = entails(I, sig, key[0], conclusion, budget)
        counts[v.label] += 1
        if isinstance(v, Unknown):
            continue
        other = "NotEntailed" if isinstance(v, Entailed) else "Entailed"
        # leave room for the label still short of its quota
        if balancing and size - len(items) <= quota - kept[other]:
            continue
        kept[v.label] += 1
        items.append(CorpusItem(sig.id, key[0], conclusion, v.label))
    decided = counts["Entailed"] + counts["NotEntailed"]
    if counts["Unknown"] > decided:
        raise RejectedInput(
            f"oracle returned Unknown for {counts['Unknown']} of {decided + counts['Unknown']} generated queries; raise --budget"
        )
    corpus = CheckCorpus(seed, items, [], depth, len(items))
    corpus.meta = {"generated": dict(counts), "atoms": atoms}
    return corpus


def premise_corpus(sig: Signature, size: int, seed: int, depth: int = DEFAULT_DEPTH, n_vars=DEFAULT_VARS, max_premises: int = 2):
    """Unlabeled (premises, conclusion) items; no oracle involved."""
    if size < 1:
        raise RejectedInput("corpus size must be >= 1")
    atoms = _atoms(sig, n_vars)
    rng = random.Random(seed)
    items, seen = [], set()
    tries = 0
    while len(items) < size and tries < 50 * size:
        tries += 1
        prem = frozenset(random_sentence(rng, sig, atoms, max(depth - 1, 0)) for _ in range(rng.randint(0, max_premises)))
        concl = random_sentence(rng, sig, atoms, depth)
        if (prem, concl) not in seen:
            seen.add((prem, concl))
            items.append(CorpusItem(sig.id, prem, concl))
    return CheckCorpus(seed, items, [], depth, len(items))


# ---------------------------------------------------------------- morphism squares


def random_substitution(rng: random.Random, sig: Signature, atoms, d: int = 2):
    mapping = {}
    for a in atoms:
        if rng.random() < 0.6:
            mapping[a] = random_term(rng, sig, atoms, d)
    if not mapping:
        mapping[rng.choice(atoms)] = random_term(rng, sig, atoms, d)
    return substitution(sig, mapping)


def gen_morphism_squares(
    I: PiInstitution, size: int = DEFAULT_SIZE, seed: int = 0, depth: int = 3, n_vars: int | None = DEFAULT_VARS
) -> CheckCorpus:
    """(morphism, sentence) pairs: declared morphisms first, then random substitutions."""
    if size < 1:
        raise RejectedInput("corpus size must be >= 1")
    declared = [f for f in I.morphisms if not f.is_identity()]
    if not declared and not I.substitutions:
        raise RejectedInput(f"institution {I.name} has no morphisms besides identities")
    rng = random.Random(seed)
    squares = []
    for n in range(size):
        if declared and (not I.substitutions or n % 4 == 0):
            f = declared[(n // 4 if I.substitutions else n) % len(declared)]
        else:
            sig = I.signatures[n % len(I.signatures)]
            f = random_substitution(rng, sig, _atoms(sig, n_vars))
        squares.append((f, random_sentence(rng, f.source, _atoms(f.source, n_vars), depth)))
    return CheckCorpus(seed, [], squares, depth, size)


def closure_corpus(
    I: PiInstitution,
    size: int = 200,
    seed: int = 0,
    depth: int = DEFAULT_DEPTH,
    budget: int = DEFAULT_BUDGET,
    n_vars: int | None = DEFAULT_VARS,
) -> CheckCorpus:
    """Entailment items spread over I's signatures, plus morphism squares for axiom (d)."""
    items = []
    sigs = list(I.signatures)
    for k, sig in enumerate(sigs):
        share = size // len(sigs) + (1 if k < size % len(sigs) else 0)
        if share:
            items.extend(gen_entailment_corpus(I, sig, share, seed + 7919 * k, depth, budget, n_vars).items)
    try:
        squares = gen_morphism_squares(I, max(size // 2, 1), seed, min(depth, 3), n_vars).squares
    except RejectedInput:
        squares = []
    return CheckCorpus(seed, items, squares, depth, len(items))


def max_depth(corpus: CheckCorpus) -> int:
    return max((depth(c) for s in corpus.sentences() for c in s.components), default=0)
