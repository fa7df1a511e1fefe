import pytest

from oracles import prop_entails
from pirefine.corpus import (
    closure_corpus,
    count_terms,
    gen_entailment_corpus,
    gen_morphism_squares,
    gen_sentences,
    max_depth,
)
from pirefine.logics import cpc_signature, pool
from pirefine.syntax import RejectedInput, depth


def test_entailment_corpus_is_balanced_and_correctly_labeled(CPC):
    sig = CPC.signature()
    c = gen_entailment_corpus(CPC, sig, 100, seed=0)
    labels = c.labels()
    assert len(c.items) == 100
    assert labels["Entailed"] >= 25 and labels["NotEntailed"] >= 25
    for it in c.items:
        assert (it.label == "Entailed") == prop_entails(list(it.premises), it.conclusion)
    assert max_depth(c) <= 4
    assert set(c.meta["atoms"]) <= set(pool(4))


@pytest.mark.parametrize("name", ["BA", "K", "S5G"])
def test_balance_for_every_builtin(name, request):
    I = request.getfixturevalue(name)
    c = gen_entailment_corpus(I, I.signature(), 100, seed=2)
    assert min(c.labels().get("Entailed", 0), c.labels().get("NotEntailed", 0)) >= 25
    assert max_depth(c) <= 4


def test_generation_is_deterministic(S5G):
    a = gen_entailment_corpus(S5G, S5G.signature(), 40, seed=9)
    b = gen_entailment_corpus(S5G, S5G.signature(), 40, seed=9)
    assert [i.to_dict() for i in a.items] == [i.to_dict() for i in b.items]
    c = gen_entailment_corpus(S5G, S5G.signature(), 40, seed=10)
    assert [i.to_dict() for i in a.items] != [i.to_dict() for i in c.items]


def test_gen_sentences_bounds():
    sig = cpc_signature()
    assert count_terms(sig, ["p"], 0) == 3  # p, top, bot
    with pytest.raises(RejectedInput, match="only 3 distinct"):
        gen_sentences(sig, 0, 4, seed=0, n_vars=1)
    out = gen_sentences(sig, 0, 3, seed=0, n_vars=1)
    assert len(set(out)) == 3
    many = gen_sentences(sig, 3, 200, seed=1)
    assert len(set(many)) == 200
    assert all(depth(s.components[0]) <= 3 for s in many)


def test_bad_sizes_rejected(CPC):
    with pytest.raises(RejectedInput):
        gen_entailment_corpus(CPC, CPC.signature(), 0)


def test_unknown_heavy_generation_is_refused(S5G):
    with pytest.raises(RejectedInput, match="raise --budget"):
        gen_entailment_corpus(S5G, S5G.signature(), 20, seed=0, budget=1)


def test_morphism_squares(CPC):
    c = gen_morphism_squares(CPC, 30, seed=0)
    assert len(c.squares) == 30
    assert all(CPC.is_morphism(f) for f, _ in c.squares)


def test_closure_corpus_has_items_and_squares(BA):
    c = closure_corpus(BA, 50, seed=1)
    assert len(c.items) == 50 and len(c.squares) == 25
