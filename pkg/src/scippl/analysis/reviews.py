"""Review-variability metrics and uncertainty-language rates."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence

from ..corpus import ReviewBundle
from ..lm.tokenize import word_tokens
from ..stats.hypotests import DegenerateSampleError, TestResult, contingency_test

logger = logging.getLogger(__name__)


@dataclass
class ReviewStats:
    doc_id: str
    n_ratings: int
    disparity: Optional[float]        # max - min rating; None without ratings
    mean_rating: Optional[float]
    mean_confidence: Optional[float]
    delay_days: Optional[int]         # accepted - received
    score: Optional[float] = None     # perplexity joined from scores


def review_variability(reviews: Dict[str, ReviewBundle],
                       scores: Dict[str, float]) -> List[ReviewStats]:
    """Per-paper disparity, mean rating/confidence, and acceptance delay.

    Only papers joinable to the score table are returned; a single
    rating yields disparity 0; missing dates leave the delay absent.
    """
    out: List[ReviewStats] = []
    for doc_id in sorted(reviews):
        if doc_id not in scores:
            continue
        bundle = reviews[doc_id]
        ratings = bundle.ratings
        disparity = (max(ratings) - min(ratings)) if ratings else None
        mean_rating = sum(ratings) / len(ratings) if ratings else None
        confidences = bundle.confidences
        mean_conf = sum(confidences) / len(confidences) if confidences else None
        delay = None
        if bundle.received_date and bundle.accepted_date:
            delay = (bundle.accepted_date - bundle.received_date).days
        out.append(ReviewStats(doc_id=doc_id, n_ratings=len(ratings),
                               disparity=disparity, mean_rating=mean_rating,
                               mean_confidence=mean_conf, delay_days=delay,
                               score=scores[doc_id]))
    return out


@dataclass
class UncertaintyRates:
    chi2: TestResult
    hits_high: int
    tokens_high: int
    hits_low: int
    tokens_low: int
    word_rates: Dict[str, tuple]      # word -> (rate_high, rate_low)

    @property
    def rate_high(self) -> float:
        return self.hits_high / self.tokens_high

    @property
    def rate_low(self) -> float:
        return self.hits_low / self.tokens_low


def uncertainty_word_rate(comments_high: Iterable[str],
                          comments_low: Iterable[str],
                          lexicon: Sequence[str]) -> UncertaintyRates:
    """Lexicon-hit rates in two comment groups with a 2x2 chi-squared."""
    lex = {w.strip().lower() for w in lexicon if w.strip()}
    if not lex:
        raise ValueError("uncertainty lexicon is empty")
    tokens_high = [t for c in comments_high for t in word_tokens(c)]
    tokens_low = [t for c in comments_low for t in word_tokens(c)]
    if not tokens_high or not tokens_low:
        raise ValueError("both comment groups must be nonempty")
    hits_h = sum(1 for t in tokens_high if t in lex)
    hits_l = sum(1 for t in tokens_low if t in lex)
    table = [[hits_h, len(tokens_high) - hits_h],
             [hits_l, len(tokens_low) - hits_l]]
    try:
        chi2 = contingency_test(table)
    except DegenerateSampleError:
        # no lexicon hits (or only hits) in either group: nothing to compare
        chi2 = TestResult(statistic=0.0, p_value=1.0, df=1,
                          extra={"degenerate": True})
    chi2.extra["table"] = table
    rates: Dict[str, tuple] = {}
    for w in sorted(lex):
        rh = sum(1 for t in tokens_high if t == w) / len(tokens_high)
        rl = sum(1 for t in tokens_low if t == w) / len(tokens_low)
        if rh > 0 or rl > 0:
            rates[w] = (rh, rl)
    return UncertaintyRates(chi2=chi2, hits_high=hits_h,
                            tokens_high=len(tokens_high), hits_low=hits_l,
                            tokens_low=len(tokens_low), word_rates=rates)
