"""Kneser-Ney model checks: hand-computed smoothing arithmetic on a toy
corpus, distribution normalization, backoff behavior, and determinism."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scippl.lm import BOS, EOS, UNK, KneserNeyModel, train_ngram


def test_hand_computed_bigram_probability():
    # corpus "a b a b", order 2, discount 0.75
    #
    # bigram events: (BOS,a):1 (a,b):2 (b,a):1 (b,EOS):1
    # continuation counts: a<-{BOS,b}=2, b<-{a}=1, EOS<-{b}=1; T=4 types, U=3
    # vocab = {a, b, EOS, UNK}, uniform = 1/4
    # p_uni(b) = (max(1-.75,0) + .75*3*.25)/4 = 0.203125
    # p(b|a)  = (2-.75)/2 + (.75*1/2)*0.203125 = 0.701171875
    model = train_ngram(["a b a b"], order=2, discount=0.75)
    p = math.exp(model.logprob("b", ["a"]))
    assert p == pytest.approx(0.701171875, abs=1e-12)
    p_uni_b = math.exp(model.logprob("b", []))
    assert p_uni_b == pytest.approx(0.203125, abs=1e-12)


def test_unseen_context_backs_off():
    model = train_ngram(["a b a b"], order=2, discount=0.75)
    # "z" is out of vocabulary; its context has no bigram mass
    assert model.logprob("b", ["z"]) == pytest.approx(model.logprob("b", []))
    # same holds for an in-vocabulary token never seen as a context
    assert model.logprob("b", [EOS]) == pytest.approx(model.logprob("b", []))


def _distribution_sum(model, context):
    return math.fsum(math.exp(model.logprob(w, context)) for w in model.vocabulary)


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_distribution_sums_to_one(order):
    texts = ["the cat sat on the mat",
             "the dog sat on the log",
             "a cat and a dog sat down",
             "the mat and the log sat still"]
    model = train_ngram(texts, order=order, discount=0.75)
    contexts = [[], ["the"], ["sat", "on"], ["never", "seen"],
                [BOS] * max(1, order - 1), ["the", "cat"]]
    for ctx in contexts:
        assert _distribution_sum(model, ctx) == pytest.approx(1.0, abs=1e-6)


def test_every_probability_positive():
    model = train_ngram(["x y x y z z"], order=3)
    for w in model.vocabulary:
        for ctx in ([], ["x"], ["q", "q"]):
            assert model.logprob(w, ctx) > -math.inf
            assert math.exp(model.logprob(w, ctx)) > 0.0


def test_single_token_corpus_valid():
    model = train_ngram(["a"], order=2)
    assert _distribution_sum(model, []) == pytest.approx(1.0, abs=1e-9)
    assert _distribution_sum(model, ["a"]) == pytest.approx(1.0, abs=1e-9)


def test_unk_floor():
    # "rare" appears once -> mapped to UNK; "common" appears 3 times -> kept
    model = train_ngram(["common rare common words common words"], order=2)
    assert "common" in model.vocabulary
    assert "rare" not in model.vocabulary
    assert model.map_token("rare") == UNK


def test_training_validation():
    with pytest.raises(ValueError):
        train_ngram([], order=2)
    with pytest.raises(ValueError):
        train_ngram(["a b"], order=0)
    with pytest.raises(ValueError):
        train_ngram(["a b"], order=2, discount=1.5)


def test_scoring_is_pure_function():
    texts = ["alpha beta gamma delta"] * 3 + ["beta gamma alpha alpha"]
    m1 = train_ngram(texts, order=3)
    m2 = train_ngram(texts, order=3)
    toks = ["alpha", "beta", "zeta", "gamma"]
    lp1 = m1.sequence_logprobs(toks)
    lp2 = m2.sequence_logprobs(toks)
    assert lp1 == lp2  # bit-identical
    assert m1.sequence_logprobs(toks) == lp1


def test_save_load_round_trip(tmp_path):
    model = train_ngram(["a b c a b c"], order=2)
    path = tmp_path / "model.pkl"
    model.save(path)
    loaded = KneserNeyModel.load(path)
    toks = ["a", "b", "c"]
    assert loaded.sequence_logprobs(toks) == model.sequence_logprobs(toks)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from("abcde"), min_size=2, max_size=30),
       st.integers(1, 4))
def test_distribution_property(chars, order):
    text = " ".join(chars)
    model = train_ngram([text] * 2, order=order)
    ctx = chars[:order - 1] if order > 1 else []
    assert _distribution_sum(model, ctx) == pytest.approx(1.0, abs=1e-6)
