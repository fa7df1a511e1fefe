import pytest

from pirefine.corpus import CheckCorpus, CorpusItem, gen_entailment_corpus, gen_morphism_squares
from pirefine.kernel import substitution
from pirefine.logics import k_signature
from pirefine.semantics import Valuation
from pirefine.translation import (
    HomomorphicMap,
    Multifunction,
    Translation,
    check_naturality,
    classify,
    cpc_to_ba,
    identity_translation,
    is_interpretation,
    is_semi_interpretation,
    union_preserved,
)
from pirefine.syntax import RejectedInput, parse_sentence, parse_term


def P(text, I):
    return parse_sentence(text, I.signature())


def items(I, *pairs):
    sig = I.signature()
    return CheckCorpus(0, [CorpusItem(sig.id, frozenset(P(x, I) for x in prem), P(c, I)) for prem, c in pairs])


def test_identity_image(CPC):
    T = identity_translation(CPC)
    phi = P("p -> q", CPC)
    assert T.image(CPC.signature(), phi) == {phi}


def test_cpc2ba_image(CPC, BA, cpc2ba):
    assert cpc2ba.image(CPC.signature(), P("p /\\ q", CPC)) == {P("p /\\ q ~= top", BA)}


def test_functional_and_classification(CPC, cpc2ba):
    corpus = gen_entailment_corpus(CPC, CPC.signature(), 50, seed=0)
    for phi in corpus.sentences():
        assert len(cpc2ba.image(CPC.signature(), phi)) == 1
    assert classify(cpc2ba, corpus) == {"functional"}
    assert classify(identity_translation(CPC), corpus) == {"self", "functional", "identity"}


def test_two_image_translation_is_not_functional(CPC):
    sig = CPC.signature()
    alpha = HomomorphicMap(sig, sig, sentences=["$", "~~$"], name="dbl")
    T = Translation("dbl", CPC, CPC, {sig.id: sig.id}, {sig.id: alpha})
    corpus = gen_entailment_corpus(CPC, sig, 20, seed=1)
    assert classify(T, corpus) == {"self"}
    assert is_interpretation(T, corpus).passed


def test_empty_images_rejected(CPC):
    sig = CPC.signature()
    m = Multifunction(sig, sig, lambda phi: [])
    with pytest.raises(RejectedInput, match="empty"):
        m(P("p", CPC))


def test_naturality_square_by_hand(CPC, BA, cpc2ba):
    f = substitution(CPC.signature(), {"p": parse_term("q /\\ r")})
    corpus = CheckCorpus(0, [], [(f, P("p", CPC))])
    report = check_naturality(cpc2ba, corpus)
    assert report.passed
    lhs = cpc2ba.image(CPC.signature(), P("q /\\ r", CPC))
    assert lhs == {P("q /\\ r ~= top", BA)}


def test_naturality_on_random_squares(CPC, cpc2ba):
    assert check_naturality(cpc2ba, gen_morphism_squares(CPC, 100, seed=4)).passed


def test_override_breaks_naturality(CPC, BA):
    # p alone goes somewhere else: SEN(f)(q) = p sends q's square off course
    p, top = P("p", CPC), P("top ~= top", BA)
    T = cpc_to_ba(CPC, BA, name="odd", overrides={p: [top]})
    f = substitution(CPC.signature(), {"q": parse_term("p")})
    report = check_naturality(T, CheckCorpus(0, [], [(f, P("q", CPC))]))
    assert report.failures("square")


def test_cpc2ba_interpretation(CPC, cpc2ba):
    corpus = gen_entailment_corpus(CPC, CPC.signature(), 100, seed=1)
    report = is_interpretation(cpc2ba, corpus)
    assert report.passed
    assert report.meta["preservation"] == "100/100"
    assert report.meta["reflection"] == "100/100"


def test_broken_image_fails_preservation(CPC, BA):
    T = cpc_to_ba(CPC, BA, name="tobot", template="$ ~= bot")
    report = is_semi_interpretation(T, items(CPC, ([], "p \\/ ~p")))
    (fail,) = report.failures("preservation")
    # every valuation refutes p \/ ~p ~= bot; the first one, p=0, is reported
    assert fail.witness["countermodel"]["valuation"] == {"p": 0}
    val = Valuation((("p", False),))
    assert BA.oracle(BA.signature()).replay(frozenset(), P("p \\/ ~p ~= bot", BA), val)


def test_collapse_preserves_but_does_not_reflect(CPC, BA):
    T = cpc_to_ba(CPC, BA, name="collapse", template="top ~= top")
    corpus = items(CPC, ([], "p"), (["p"], "p"))
    assert is_semi_interpretation(T, corpus).passed
    report = is_interpretation(T, corpus)
    (fail,) = report.failures("reflection")
    assert fail.subject["conclusion"] == "p"
    # the witness replays: it satisfies the premises and falsifies p
    assert fail.witness["source_countermodel"]["valuation"] == {"p": 0}


def test_semi_interpretation_into_modal_logic(CPC, S5G):
    sig, tsig = CPC.signature(), S5G.signature()
    alpha = HomomorphicMap(sig, tsig, sentences=["box $"], name="boxed")
    T = Translation("boxed", CPC, S5G, {sig.id: tsig.id}, {sig.id: alpha})
    corpus = gen_entailment_corpus(CPC, sig, 60, seed=3)
    assert is_interpretation(T, corpus).passed


def test_template_validation(CPC, BA):
    with pytest.raises(RejectedInput, match="placeholder"):
        cpc_to_ba(CPC, BA, template="$2 ~= top")
    with pytest.raises(RejectedInput, match="not 2-dimensional"):
        cpc_to_ba(CPC, BA, template="$")
    with pytest.raises(RejectedInput, match="no rule"):
        HomomorphicMap(k_signature(), CPC.signature())


def test_union_preserved(CPC, cpc2ba):
    A, B = [P("p", CPC)], [P("q -> p", CPC)]
    assert union_preserved(cpc2ba, CPC.signature(), A, B)
