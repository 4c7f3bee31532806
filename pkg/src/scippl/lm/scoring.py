"""Perplexity and document scoring.

Perplexity is the exponentiated average negative log-likelihood of the
token sequence; all log-probabilities are natural logs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence

from ..corpus import PaperRecord
from .ngram import KneserNeyModel


class UnscoreableDocumentError(ValueError):
    """Document has no scoreable text (empty abstract)."""


@dataclass
class ScoredDocument:
    doc_id: str
    model_id: str
    tokens: List[str]
    logprobs: List[float]
    perplexity: float


def perplexity(logprobs: Sequence[float]) -> float:
    """exp(-mean(logprobs)); requires nonempty, finite, nonpositive entries."""
    vals = list(logprobs)
    if not vals:
        raise ValueError("empty log-probability sequence")
    for v in vals:
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ValueError(f"log-probability {v!r} is not a number")
        if not math.isfinite(v):
            raise ValueError(f"non-finite log-probability {v!r}")
        if v > 0.0:
            raise ValueError(f"positive log-probability {v!r}")
    return math.exp(-math.fsum(vals) / len(vals))


def score_tokens(model: KneserNeyModel, tokens: Sequence[str]) -> List[float]:
    if not tokens:
        raise UnscoreableDocumentError("no tokens to score")
    return model.sequence_logprobs(tokens)


def score_document(model: KneserNeyModel, doc: PaperRecord) -> ScoredDocument:
    """Score a paper abstract under the n-gram backend.

    Tokens cover the whole abstract; the first token is conditioned on
    the BOS context.  Raises UnscoreableDocumentError on empty abstracts.
    """
    from .tokenize import word_punct_tokens

    if not doc.abstract or not doc.abstract.strip():
        raise UnscoreableDocumentError(f"unscoreable document {doc.doc_id!r}: empty abstract")
    tokens = word_punct_tokens(doc.abstract)
    if not tokens:
        raise UnscoreableDocumentError(f"unscoreable document {doc.doc_id!r}: no tokens")
    logprobs = score_tokens(model, tokens)
    return ScoredDocument(doc_id=doc.doc_id, model_id=model.model_id,
                          tokens=tokens, logprobs=logprobs,
                          perplexity=perplexity(logprobs))


@dataclass
class ImportReport:
    accepted: int = 0
    rejected: List[tuple] = field(default_factory=list)  # (line_no, reason)

    def reject(self, line_no: int, reason: str) -> None:
        self.rejected.append((line_no, reason))


@dataclass
class ImportResult:
    documents: List[ScoredDocument]
    report: ImportReport


def import_token_logprobs(stream: Iterable[str]) -> ImportResult:
    """Read a logprobs.jsonl stream into ScoredDocuments.

    Perplexity is always recomputed locally from the imported values;
    any perplexity field in the file is ignored.  Lines with mismatched
    token/logprob lengths or positive logprobs are rejected with
    line-level diagnostics.
    """
    docs: List[ScoredDocument] = []
    report = ImportReport()
    for line_no, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            report.reject(line_no, f"invalid json: {exc.msg}")
            continue
        try:
            doc_id = obj["doc_id"]
            model_id = obj["model_id"]
            tokens = list(obj["tokens"])
            logprobs = [float(v) for v in obj["logprobs"]]
        except (KeyError, TypeError, ValueError) as exc:
            report.reject(line_no, f"schema violation: {exc}")
            continue
        if len(tokens) != len(logprobs):
            report.reject(line_no, f"length mismatch: {len(tokens)} tokens vs "
                                    f"{len(logprobs)} logprobs")
            continue
        try:
            ppl = perplexity(logprobs)
        except ValueError as exc:
            report.reject(line_no, str(exc))
            continue
        docs.append(ScoredDocument(doc_id=doc_id, model_id=model_id,
                                   tokens=tokens, logprobs=logprobs,
                                   perplexity=ppl))
        report.accepted += 1
    return ImportResult(documents=docs, report=report)
