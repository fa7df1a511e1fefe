import random

import pytest
from hypothesis import given, settings, strategies as st

from pirefine.corpus import closure_corpus, gen_entailment_corpus, random_sentence, random_substitution
from pirefine.kernel import (
    Entailed,
    FunctionOracle,
    NotEntailed,
    PiInstitution,
    apply_morphism,
    check_closure_axioms,
    compose,
    entails,
    identity,
    substitution,
    symbol_map,
)
from pirefine.logics import cpc_signature
from pirefine.semantics import Valuation
from pirefine.syntax import App, RejectedInput, Sentence, Var, parse_sentence, parse_term

V = cpc_signature()


def s(text):
    return parse_sentence(text, V)


def test_substitution_example():
    f = substitution(V, {"p": parse_term("q \\/ r"), "q": parse_term("q")})
    assert apply_morphism(f, s("p /\\ q")) == s("(q \\/ r) /\\ q")


def test_composition_order():
    g = substitution(V, {"p": parse_term("q")})
    f = substitution(V, {"q": parse_term("p")})
    assert apply_morphism(compose(g, f), s("p")) == s("q")
    assert apply_morphism(compose(f, g), s("p")) == s("p")


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_sen_is_a_functor(seed):
    rng = random.Random(seed)
    atoms = ["p", "q", "r"]
    f, g = random_substitution(rng, V, atoms), random_substitution(rng, V, atoms)
    phi = random_sentence(rng, V, atoms, 3)
    assert apply_morphism(compose(g, f), phi) == apply_morphism(g, apply_morphism(f, phi))
    assert apply_morphism(identity(V), phi) == phi


def test_symbol_map_checks_arity():
    with pytest.raises(RejectedInput):
        symbol_map(V, V, {"~": "/\\"})
    m = symbol_map(V, V, {"/\\": "\\/"}, {"p": "q"})
    assert apply_morphism(m, s("p /\\ r")) == s("q \\/ r")


def test_cpc_examples(CPC):
    assert isinstance(entails(CPC, V, {s("p"), s("p -> q")}, s("q")), Entailed)
    v = entails(CPC, V, {s("p \\/ q")}, s("p"))
    assert isinstance(v, NotEntailed)
    assert v.witness == Valuation((("p", False), ("q", True)))


def test_rejects_foreign_sentences(CPC):
    with pytest.raises(RejectedInput):
        entails(CPC, V, set(), Sentence((App("box", (Var("p"),)),)))


@pytest.mark.parametrize("name", ["CPC", "BA", "K", "S5G"])
def test_closure_axioms_hold(name, request):
    I = request.getfixturevalue(name)
    corpus = closure_corpus(I, 200, seed=3)
    report = check_closure_axioms(I, corpus)
    assert report.n_failures == 0
    assert report.n_unknowns == 0
    assert set(report.counts_by_check()) == {"a-reflexivity", "b-cut", "c-monotone", "d-structural"}


def _bad_institution(fn):
    return PiInstitution("bad", (V,), {V.id: FunctionOracle(V, fn)})


def test_harness_catches_non_reflexive_oracle(CPC):
    # phi in C(Phi) only when phi is a tautology: reflexivity breaks
    taut = lambda prem, phi, budget: entails(CPC, V, set(), phi, budget)  # noqa: E731
    I = _bad_institution(taut)
    corpus = gen_entailment_corpus(CPC, V, 60, seed=1)
    report = check_closure_axioms(I, corpus)
    assert report.failures("a-reflexivity")


def test_harness_catches_non_structural_oracle(CPC):
    # p is an axiom, but only the literal atom p: substitution instances are not
    def fn(prem, phi, budget):
        return entails(CPC, V, set(prem) | {s("p")}, phi, budget)

    I = _bad_institution(fn)
    corpus = closure_corpus(CPC, 100, seed=2)
    report = check_closure_axioms(I, corpus)
    assert report.failures("d-structural")
