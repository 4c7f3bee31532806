"""Distinguishing-word ratio analysis between score-split document groups."""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence

from ..corpus import PaperRecord
from ..lm.tokenize import word_tokens
from ..stats.hypotests import TestResult, contingency_test

logger = logging.getLogger(__name__)


@dataclass
class LexiconRatio:
    word: str
    freq_high: float          # relative frequency in the high group
    freq_low: float
    r: float                  # freq_high / freq_low
    display_value: float      # r if r > 1 else 1/r
    orientation: str          # "high" when r >= 1, "low" otherwise

    def __post_init__(self):
        if self.r <= 0.0:
            raise ValueError("ratio must be positive")


def _group_counts(docs: Iterable[PaperRecord]) -> Counter:
    counts: Counter = Counter()
    for doc in docs:
        counts.update(word_tokens(f"{doc.title} {doc.abstract}"))
    return counts


def word_ratio_analysis(high_docs: Sequence[PaperRecord],
                        low_docs: Sequence[PaperRecord],
                        min_count: int = 20,
                        term_sets: Optional[Dict[str, Sequence[str]]] = None):
    """Frequency ratios of words between high- and low-score documents.

    Words must reach min_count raw occurrences in both groups (only
    words observed in both groups can have a ratio).  Results are sorted
    by |log r| descending.  When term_sets is given, a chi-squared with
    adjusted standardized residuals over set-hit counts per group is
    returned alongside.
    """
    if not high_docs or not low_docs:
        raise ValueError("both document groups must be nonempty")
    counts_high = _group_counts(high_docs)
    counts_low = _group_counts(low_docs)
    total_high = sum(counts_high.values())
    total_low = sum(counts_low.values())
    if total_high == 0 or total_low == 0:
        raise ValueError("both groups need at least one token")
    ratios: List[LexiconRatio] = []
    for word in counts_high.keys() & counts_low.keys():
        ch, cl = counts_high[word], counts_low[word]
        if ch < min_count or cl < min_count:
            continue
        fh = ch / total_high
        fl = cl / total_low
        r = fh / fl
        ratios.append(LexiconRatio(
            word=word, freq_high=fh, freq_low=fl, r=r,
            display_value=r if r > 1.0 else 1.0 / r,
            orientation="high" if r >= 1.0 else "low"))
    ratios.sort(key=lambda lr: (-abs(math.log(lr.r)), lr.word))

    term_set_test: Optional[TestResult] = None
    if term_sets:
        table = []
        names = sorted(term_sets)
        for name in names:
            words = {w.strip().lower() for w in term_sets[name]}
            table.append([sum(counts_high[w] for w in words),
                          sum(counts_low[w] for w in words)])
        term_set_test = contingency_test(table)
        term_set_test.extra["term_sets"] = names
        term_set_test.extra["table"] = table
    return ratios, term_set_test
