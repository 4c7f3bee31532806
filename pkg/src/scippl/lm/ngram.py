"""Interpolated Kneser-Ney n-gram language model.

The top order uses raw counts with absolute discounting; lower orders
use continuation counts (distinct left-extensions); the unigram level is
interpolated with a uniform distribution over the prediction vocabulary
so every token, including UNK, has strictly positive probability and
each conditional distribution sums to one.

Counting is done over "prediction events": for every non-BOS position
(including the EOS slot) the k-gram ending there is counted, for each
order k up to the model order, after padding with order-1 BOS sentinels.
"""

from __future__ import annotations

import math
import pickle
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

from .tokenize import word_punct_tokens

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

DEFAULT_DISCOUNT = 0.75
UNK_MIN_FREQ = 2


@dataclass
class KneserNeyModel:
    order: int
    discount: float
    model_id: str
    vocabulary: set                       # prediction vocabulary incl. EOS/UNK
    counts: Dict[int, Dict[tuple, float]]         # per order: ngram -> count
    context_totals: Dict[int, Dict[tuple, float]] # per order: context -> sum
    context_types: Dict[int, Dict[tuple, int]]    # per order: context -> distinct continuations
    unigram_total: float = 0.0
    unigram_types: int = 0
    token_freqs: Dict[str, int] = field(default_factory=dict)

    # -------------------------------------------------------- queries

    def map_token(self, token: str) -> str:
        return token if token in self.vocabulary else UNK

    def logprob(self, token: str, context: Sequence[str]) -> float:
        """Natural-log conditional probability of token given context."""
        w = self.map_token(token)
        ctx = tuple(self.map_token(t) if t != BOS else BOS
                    for t in context)[-(self.order - 1):] if self.order > 1 else ()
        return math.log(self._prob(w, ctx))

    def _prob(self, w: str, ctx: tuple) -> float:
        k = len(ctx) + 1
        if k == 1:
            return self._unigram_prob(w)
        table = self.counts[k]
        total = self.context_totals[k].get(ctx, 0.0)
        if total <= 0.0:
            return self._prob(w, ctx[1:])
        count = table.get(ctx + (w,), 0.0)
        types = self.context_types[k].get(ctx, 0)
        d = self.discount
        cont = self._prob(w, ctx[1:])
        return max(count - d, 0.0) / total + (d * types / total) * cont

    def _unigram_prob(self, w: str) -> float:
        # interpolate with the uniform distribution for full support
        v = len(self.vocabulary)
        uniform = 1.0 / v
        if self.unigram_total <= 0.0:
            return uniform
        count = self.counts[1].get((w,), 0.0)
        d = self.discount
        return (max(count - d, 0.0) + d * self.unigram_types * uniform) / self.unigram_total

    def sequence_logprobs(self, tokens: Sequence[str],
                          include_eos: bool = False) -> List[float]:
        """Per-token conditional log-probabilities.

        The first token is conditioned on an explicit BOS context of
        order-1 sentinels; EOS is excluded from the scored sequence
        unless requested.
        """
        history: List[str] = [BOS] * (self.order - 1)
        out: List[float] = []
        for tok in tokens:
            out.append(self.logprob(tok, history))
            history.append(tok)
        if include_eos:
            out.append(self.logprob(EOS, history))
        return out

    # -------------------------------------------------------- persistence

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            pickle.dump(self, fh, protocol=4)

    @staticmethod
    def load(path) -> "KneserNeyModel":
        with open(path, "rb") as fh:
            model = pickle.load(fh)
        if not isinstance(model, KneserNeyModel):
            raise ValueError(f"{path} does not contain a KneserNeyModel")
        return model


def train_ngram(texts: Iterable[str], order: int = 3,
                discount: float = DEFAULT_DISCOUNT, model_id: str = "kn",
                unk_min_freq: int = UNK_MIN_FREQ,
                tokenizer=word_punct_tokens) -> KneserNeyModel:
    """Train an interpolated Kneser-Ney model.

    Tokens with training frequency below unk_min_freq map to UNK.
    Deterministic given its inputs.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if not 0.0 < discount < 1.0:
        raise ValueError("discount must be in (0, 1)")
    token_streams = [tokenizer(t) for t in texts]
    token_streams = [s for s in token_streams if s]
    if not token_streams:
        raise ValueError("empty training corpus")

    freqs = Counter(tok for stream in token_streams for tok in stream)
    vocab = {tok for tok, c in freqs.items() if c >= unk_min_freq}
    vocab |= {EOS, UNK}

    def mapped(stream):
        return [t if t in vocab else UNK for t in stream]

    raw: Dict[int, Counter] = {k: Counter() for k in range(1, order + 1)}
    pad = [BOS] * (order - 1)
    for stream in token_streams:
        seq = pad + mapped(stream) + [EOS]
        # one prediction event per non-BOS position
        for i in range(order - 1, len(seq)):
            for k in range(1, order + 1):
                if i - k + 1 < 0:
                    continue
                raw[k][tuple(seq[i - k + 1:i + 1])] += 1

    counts: Dict[int, Dict[tuple, float]] = {}
    if order == 1:
        counts[1] = {g: float(c) for g, c in raw[1].items()}
    else:
        # top order keeps raw counts
        counts[order] = {g: float(c) for g, c in raw[order].items()}
        # each lower order uses continuation counts from one order above
        for k in range(order - 1, 0, -1):
            cont: Dict[tuple, set] = {}
            for gram in raw[k + 1]:
                cont.setdefault(gram[1:], set()).add(gram[0])
            counts[k] = {g: float(len(preds)) for g, preds in cont.items()}

    context_totals: Dict[int, Dict[tuple, float]] = {}
    context_types: Dict[int, Dict[tuple, int]] = {}
    for k in range(2, order + 1):
        totals: Dict[tuple, float] = {}
        types: Dict[tuple, int] = {}
        for gram, c in counts[k].items():
            ctx = gram[:-1]
            totals[ctx] = totals.get(ctx, 0.0) + c
            types[ctx] = types.get(ctx, 0) + 1
        context_totals[k] = totals
        context_types[k] = types

    unigram_total = sum(counts[1].values())
    unigram_types = len(counts[1])

    return KneserNeyModel(
        order=order, discount=discount, model_id=model_id,
        vocabulary=vocab, counts=counts,
        context_totals=context_totals, context_types=context_types,
        unigram_total=unigram_total, unigram_types=unigram_types,
        token_freqs=dict(freqs))
