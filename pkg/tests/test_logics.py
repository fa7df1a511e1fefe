import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import k_countermodel, prop_countermodels, prop_entails, s5_entails
from pirefine.corpus import gen_entailment_corpus, random_sentence
from pirefine.kernel import Entailed, NotEntailed, Unknown, entails
from pirefine.logics import (
    ModalOracle,
    PropositionalOracle,
    ba_entails,
    ba_signature,
    builtin_institution,
    cpc_entails,
    cpc_signature,
    extend_institution,
    is_sub_institution,
    k_signature,
    modal_entails,
    pool,
    s5_small_model_bound,
    s5g_signature,
)
from pirefine.semantics import KripkeModel, Valuation
from pirefine.syntax import parse_sentence

CPC, BA, KS, S5 = cpc_signature(), ba_signature(), k_signature(), s5g_signature()


def P(text, sig=CPC):
    return parse_sentence(text, sig)


@pytest.mark.parametrize(
    "premises, conclusion, witness",
    [
        (["p /\\ q"], "p", None),
        ([], "p \\/ ~p", None),
        (["p -> q"], "q", {"p": False, "q": False}),
    ],
)
def test_cpc_examples(premises, conclusion, witness):
    v = cpc_entails([P(x) for x in premises], P(conclusion))
    if witness is None:
        assert isinstance(v, Entailed)
    else:
        assert v.witness.as_dict() == witness


@pytest.mark.parametrize(
    "premises, conclusion, witness",
    [
        (["p ~= top"], "p \\/ q ~= top", None),
        ([], "p /\\ q ~= q /\\ p", None),
        (["p \\/ q ~= top"], "p ~= top", {"p": False, "q": True}),
    ],
)
def test_ba_examples(premises, conclusion, witness):
    v = ba_entails([P(x, BA) for x in premises], P(conclusion, BA))
    if witness is None:
        assert isinstance(v, Entailed)
    else:
        assert v.witness.as_dict() == witness


def _queries(sig, seed, n, atoms=("p", "q", "r"), depth=3, max_prem=2):
    rng = random.Random(seed)
    for _ in range(n):
        prem = [random_sentence(rng, sig, list(atoms), depth - 1) for _ in range(rng.randint(0, max_prem))]
        yield prem, random_sentence(rng, sig, list(atoms), depth)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_propositional_matches_truth_tables(seed):
    for sig in (CPC, BA):
        oracle = PropositionalOracle(sig)
        for prem, concl in _queries(sig, seed, 5, atoms=("p", "q", "r", "s")):
            v = oracle.decide(frozenset(prem), concl)
            assert isinstance(v, Entailed) == prop_entails(prem, concl)
            if isinstance(v, NotEntailed):
                # the reported witness is the first countervaluation in atom order, low bit first
                first = prop_countermodels(prem, concl)
                atoms = [a for a, _ in v.witness.values]
                lex = min(first, key=lambda val: sum(val[a] << j for j, a in enumerate(atoms)))
                assert v.witness.as_dict() == lex
                assert oracle.replay(frozenset(prem), concl, v.witness)


def test_propositional_budget_is_atom_count():
    phi = P("p /\\ q /\\ r")
    assert isinstance(cpc_entails([], phi, budget=2), Unknown)
    assert isinstance(cpc_entails([], phi, budget=3), NotEntailed)


def test_wide_queries_use_many_chunks():
    atoms = pool(8)
    big = " /\\ ".join(atoms)
    assert isinstance(cpc_entails([P(big)], P("w")), Entailed)
    v = cpc_entails([P(" \\/ ".join(atoms))], P("w"))
    assert v.witness.as_dict()["w"] is False


# ---------------------------------------------------------------- modal


S5_AXIOMS = ["box (p -> q) -> box p -> box q", "box p -> p", "box p -> box box p", "dia p -> box dia p"]


@pytest.mark.parametrize("axiom", S5_AXIOMS)
@pytest.mark.parametrize("method, bound", [("exact", 3), ("enumerate", 8)])
def test_s5g_axioms_are_theorems(axiom, method, bound):
    phi = P(axiom, S5)
    if method == "enumerate":
        assert bound >= min(s5_small_model_bound([], phi), 2 ** 2)
    assert isinstance(modal_entails("S5G", [], phi, world_bound=bound, method=method), Entailed)


def test_s5g_enumeration_below_bound_is_unknown():
    phi = P("box p -> p", S5)
    assert isinstance(modal_entails("S5G", [], phi, world_bound=1, method="enumerate"), Unknown)


def test_k_examples():
    assert isinstance(modal_entails("K", [], P("box (p -> q) -> box p -> box q", KS)), Entailed)
    v = modal_entails("K", [], P("box p -> p", KS))
    assert isinstance(v, NotEntailed)
    m = v.witness
    assert m.n_worlds <= 2
    assert ModalOracle("K", KS).replay(frozenset(), P("box p -> p", KS), m)


def test_k_global_necessitation():
    # global consequence: p entails box p, but not p -> box p as a theorem
    assert isinstance(modal_entails("K", [P("p", KS)], P("box p", KS)), Entailed)
    assert isinstance(modal_entails("K", [], P("p -> box p", KS)), NotEntailed)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_k_exact_agrees_with_small_frame_search(seed):
    oracle = ModalOracle("K", KS)
    for prem, concl in _queries(KS, seed, 3, atoms=("p", "q"), depth=3, max_prem=1):
        v = oracle.decide(frozenset(prem), concl)
        found = k_countermodel(prem, concl, 2)
        if found is not None:
            assert isinstance(v, NotEntailed)
        if isinstance(v, NotEntailed):
            assert oracle.replay(frozenset(prem), concl, v.witness)
        assert not isinstance(v, Unknown)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_s5g_exact_agrees_with_valuation_sets(seed):
    oracle = ModalOracle("S5G", S5)
    for prem, concl in _queries(S5, seed, 4, atoms=("p", "q"), depth=3):
        v = oracle.decide(frozenset(prem), concl)
        assert isinstance(v, Entailed) == s5_entails(prem, concl)
        if isinstance(v, NotEntailed):
            assert v.witness.universal
            assert oracle.replay(frozenset(prem), concl, v.witness)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9))
def test_s5g_enumeration_at_small_model_bound_is_exact(seed):
    for prem, concl in _queries(S5, seed, 3, atoms=("p", "q"), depth=2, max_prem=1):
        bound = min(s5_small_model_bound(prem, concl), 4)
        v = modal_entails("S5G", prem, concl, world_bound=bound, method="enumerate")
        w = modal_entails("S5G", prem, concl)
        assert v.label == w.label


def test_modal_budget_counts_modal_subformulas():
    phi = P("box p -> box box p", S5)
    assert isinstance(modal_entails("S5G", [], phi, budget=2), Unknown)
    assert isinstance(modal_entails("S5G", [], phi, budget=3), Entailed)


def test_replay_rejects_wrong_witness():
    o = ModalOracle("S5G", S5)
    m = KripkeModel(1, frozenset(), (frozenset(),))
    assert not o.replay(frozenset(), P("p", S5), m)  # not universal
    assert not PropositionalOracle(CPC).replay(frozenset(), P("p"), Valuation((("p", True),)))


# ---------------------------------------------------------------- institutions


def test_institution_of_has_one_signature(CPC, BA):
    assert len(CPC.signatures) == 1
    for prem, concl in _queries(BA.signature(), 11, 50):
        assert entails(BA, BA.signature(), prem, concl).label == ba_entails(prem, concl).label


def test_sub_institution_fewer_atoms(CPC):
    small = builtin_institution("cpc", pool(3))
    corpus = gen_entailment_corpus(small, small.signature(), 60, seed=4, n_vars=3)
    assert is_sub_institution(small, CPC, corpus).passed


def test_cpc_inside_s5g(CPC, S5G):
    corpus = gen_entailment_corpus(CPC, CPC.signature(), 100, seed=5)
    assert is_sub_institution(CPC, S5G, corpus).passed


def test_sub_institution_detects_disagreement(CPC):
    strong = extend_institution(CPC, [P("p")], "CPC+p")
    corpus = gen_entailment_corpus(CPC, CPC.signature(), 60, seed=6)
    report = is_sub_institution(CPC, strong, corpus)
    assert report.n_failures > 0
