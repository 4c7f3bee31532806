"""Rank-based quantile binning of documents by score."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List


@dataclass
class QuantileBinning:
    """Assignment of doc_ids to k equal-size rank bins, ascending in score.

    Bin sizes differ by at most one; ties are broken by ascending doc_id
    so the assignment is deterministic.
    """

    k: int
    assignment: Dict[str, int]
    scores: Dict[str, float] = field(default_factory=dict, repr=False)

    def members(self, bin_index: int) -> List[str]:
        return [d for d, b in self.assignment.items() if b == bin_index]

    def bin_sizes(self) -> List[int]:
        sizes = [0] * self.k
        for b in self.assignment.values():
            sizes[b] += 1
        return sizes

    def top_bins(self, count: int) -> List[int]:
        return list(range(self.k - count, self.k))

    def bottom_bins(self, count: int) -> List[int]:
        return list(range(count))


def quantile_bins(scores: Dict[str, float], k: int) -> QuantileBinning:
    """Assign documents to k rank bins ascending in score.

    Rank i (0-based over n documents sorted by (score, doc_id)) goes to
    bin floor(i * k / n), which makes bin sizes differ by at most one.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    n = len(scores)
    if n < k:
        raise ValueError(f"cannot form {k} bins from {n} documents")
    ranked = sorted(scores.items(), key=lambda kv: (kv[1], kv[0]))
    assignment = {doc_id: (i * k) // n for i, (doc_id, _) in enumerate(ranked)}
    return QuantileBinning(k=k, assignment=assignment, scores=dict(scores))
