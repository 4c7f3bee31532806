"""Corpus ingestion and bibliometric bookkeeping.

Streams line-delimited paper and review records, resolves the citation
graph, applies knowledge-cutoff filtering, and computes 2-year journal
impact factors.  The loaded corpus is immutable by convention: pipelines
only read it.
"""

from __future__ import annotations

import datetime
import json
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set

logger = logging.getLogger(__name__)

DOC_TYPES = ("research", "review")


@dataclass
class PaperRecord:
    doc_id: str
    title: str
    abstract: str
    pub_date: datetime.date
    journal_id: str
    doc_type: str
    retracted: bool = False
    field_groups: Set[str] = field(default_factory=set)
    funders: Set[str] = field(default_factory=set)
    reference_ids: List[str] = field(default_factory=list)

    @property
    def pub_year(self) -> int:
        return self.pub_date.year

    def to_json_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "title": self.title,
            "abstract": self.abstract,
            "pub_date": self.pub_date.isoformat(),
            "journal_id": self.journal_id,
            "doc_type": self.doc_type,
            "retracted": self.retracted,
            "field_groups": sorted(self.field_groups),
            "funders": sorted(self.funders),
            "reference_ids": list(self.reference_ids),
        }


@dataclass
class ReviewBundle:
    doc_id: str
    ratings: List[float] = field(default_factory=list)
    confidences: List[float] = field(default_factory=list)
    comments: List[str] = field(default_factory=list)
    received_date: Optional[datetime.date] = None
    accepted_date: Optional[datetime.date] = None

    def to_json_dict(self) -> dict:
        out = {
            "doc_id": self.doc_id,
            "ratings": list(self.ratings),
            "confidences": list(self.confidences),
            "comments": list(self.comments),
        }
        if self.received_date is not None:
            out["received_date"] = self.received_date.isoformat()
        if self.accepted_date is not None:
            out["accepted_date"] = self.accepted_date.isoformat()
        return out


@dataclass
class JournalMetrics:
    journal_id: str
    jif: float
    citation_numerator: int
    citable_denominator: int


@dataclass
class IngestReport:
    loaded: int = 0
    skipped: Dict[str, int] = field(default_factory=dict)

    def skip(self, reason: str) -> None:
        self.skipped[reason] = self.skipped.get(reason, 0) + 1

    @property
    def total_skipped(self) -> int:
        return sum(self.skipped.values())

    def summary(self) -> str:
        lines = [f"loaded: {self.loaded}", f"skipped: {self.total_skipped}"]
        for reason in sorted(self.skipped):
            lines.append(f"  {reason}: {self.skipped[reason]}")
        return "\n".join(lines)


class Corpus:
    """Ordered collection of PaperRecords keyed by doc_id."""

    def __init__(self, records: Iterable[PaperRecord] = ()):
        self._records: Dict[str, PaperRecord] = {}
        for rec in records:
            if rec.doc_id in self._records:
                raise ValueError(f"duplicate doc_id {rec.doc_id!r}")
            self._records[rec.doc_id] = rec

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._records

    def __iter__(self):
        return iter(self._records.values())

    def __getitem__(self, doc_id: str) -> PaperRecord:
        return self._records[doc_id]

    def get(self, doc_id: str) -> Optional[PaperRecord]:
        return self._records.get(doc_id)

    def doc_ids(self) -> List[str]:
        return list(self._records.keys())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self._records == other._records


@dataclass
class CitationIndex:
    """doc_id -> list of doc_ids that cite it, plus unresolved counts."""

    cited_by: Dict[str, List[str]]
    unresolved: int = 0

    def citations_of(self, doc_id: str) -> List[str]:
        return self.cited_by.get(doc_id, [])

    def citation_count(self, doc_id: str) -> int:
        return len(self.cited_by.get(doc_id, ()))


class BadDateError(ValueError):
    """A pub_date / review date string could not be parsed."""


def parse_flexible_date(raw: str) -> datetime.date:
    """Accepts YYYY-MM-DD or YYYY-MM; month-precision dates get day 01."""
    if not isinstance(raw, str):
        raise BadDateError(f"date must be a string, got {type(raw).__name__}")
    parts = raw.strip().split("-")
    try:
        if len(parts) == 2:
            return datetime.date(int(parts[0]), int(parts[1]), 1)
        if len(parts) == 3:
            return datetime.date(int(parts[0]), int(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise BadDateError(f"unparseable date {raw!r}") from exc
    raise BadDateError(f"unparseable date {raw!r}")


def last_day_of_month(year: int, month: int) -> datetime.date:
    if month == 12:
        return datetime.date(year, 12, 31)
    return datetime.date(year, month + 1, 1) - datetime.timedelta(days=1)


def parse_cutoff(raw: str) -> datetime.date:
    """A cutoff given as YYYY-MM means the last day of that month."""
    parts = raw.strip().split("-")
    if len(parts) == 2:
        return last_day_of_month(int(parts[0]), int(parts[1]))
    return parse_flexible_date(raw)


def _parse_paper_line(obj: dict) -> PaperRecord:
    doc_id = obj["doc_id"]
    if not isinstance(doc_id, str) or not doc_id:
        raise KeyError("doc_id")
    doc_type = obj.get("doc_type", "research")
    if doc_type not in DOC_TYPES:
        raise ValueError(f"doc_type must be one of {DOC_TYPES}, got {doc_type!r}")
    return PaperRecord(
        doc_id=doc_id,
        title=obj.get("title", ""),
        abstract=obj["abstract"],
        pub_date=parse_flexible_date(obj["pub_date"]),
        journal_id=obj.get("journal_id", ""),
        doc_type=doc_type,
        retracted=bool(obj.get("retracted", False)),
        field_groups=set(obj.get("field_groups", ())),
        funders=set(obj.get("funders", ())),
        reference_ids=list(obj.get("reference_ids", ())),
    )


def ingest_papers(stream: Iterable[str]) -> tuple:
    """Load a papers.jsonl stream.

    Malformed lines, records with empty abstracts, bad dates, and
    duplicate doc_ids are skipped and counted by reason; ingestion
    always continues.  Returns (Corpus, IngestReport).
    """
    report = IngestReport()
    records: Dict[str, PaperRecord] = {}
    for line in stream:
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            report.skip("malformed line")
            continue
        if not isinstance(obj, dict):
            report.skip("malformed line")
            continue
        if not str(obj.get("abstract", "") or "").strip():
            report.skip("missing abstract")
            continue
        try:
            rec = _parse_paper_line(obj)
        except BadDateError:
            report.skip("bad date")
            continue
        except (KeyError, TypeError, ValueError):
            report.skip("malformed line")
            continue
        if rec.doc_id in records:
            report.skip("duplicate id")
            continue
        records[rec.doc_id] = rec
        report.loaded += 1
    corpus = Corpus()
    corpus._records = records
    return corpus, report


def ingest_reviews(stream: Iterable[str]) -> tuple:
    """Load a reviews.jsonl stream; returns ({doc_id: ReviewBundle}, IngestReport)."""
    report = IngestReport()
    bundles: Dict[str, ReviewBundle] = {}
    for line in stream:
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            doc_id = obj["doc_id"]
            received = obj.get("received_date")
            accepted = obj.get("accepted_date")
            bundle = ReviewBundle(
                doc_id=doc_id,
                ratings=[float(r) for r in obj.get("ratings", ())],
                confidences=[float(c) for c in obj.get("confidences", ())],
                comments=[str(c) for c in obj.get("comments", ())],
                received_date=parse_flexible_date(received) if received else None,
                accepted_date=parse_flexible_date(accepted) if accepted else None,
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError):
            report.skip("malformed line")
            continue
        if bundle.received_date and bundle.accepted_date and \
                bundle.accepted_date < bundle.received_date:
            report.skip("accepted before received")
            continue
        if doc_id in bundles:
            report.skip("duplicate id")
            continue
        bundles[doc_id] = bundle
        report.loaded += 1
    return bundles, report


def serialize_papers(corpus: Corpus) -> Iterable[str]:
    """Yield papers.jsonl lines; ingest(serialize(c)) == c."""
    for rec in corpus:
        yield json.dumps(rec.to_json_dict(), ensure_ascii=False, sort_keys=True)


def serialize_reviews(bundles: Dict[str, ReviewBundle]) -> Iterable[str]:
    for bundle in bundles.values():
        yield json.dumps(bundle.to_json_dict(), ensure_ascii=False, sort_keys=True)


def filter_post_cutoff(corpus: Corpus, cutoff_date: datetime.date) -> Corpus:
    """Retain exactly the records published strictly after the cutoff."""
    out = Corpus()
    out._records = {doc_id: rec for doc_id, rec in corpus._records.items()
                    if rec.pub_date > cutoff_date}
    return out


def resolve_citations(corpus: Corpus) -> CitationIndex:
    """Invert reference lists into cited_by lists.

    References pointing outside the corpus stay on the record but are
    only counted here as unresolved.
    """
    cited_by: Dict[str, List[str]] = {doc_id: [] for doc_id in corpus.doc_ids()}
    unresolved = 0
    for rec in corpus:
        for ref in rec.reference_ids:
            if ref in corpus:
                cited_by[ref].append(rec.doc_id)
            else:
                unresolved += 1
    return CitationIndex(cited_by=cited_by, unresolved=unresolved)


def compute_jif(corpus: Corpus, target_year: int,
                citation_index: Optional[CitationIndex] = None) -> Dict[str, JournalMetrics]:
    """2-year journal impact factors for target_year.

    Numerator: citations received in target_year by the journal's items
    published in the two preceding years.  Denominator: count of citable
    items (research or review) in those years.  Journals with a zero
    denominator are omitted with a warning.
    """
    if citation_index is None:
        citation_index = resolve_citations(corpus)
    window = (target_year - 1, target_year - 2)
    numerators: Dict[str, int] = {}
    denominators: Dict[str, int] = {}
    for rec in corpus:
        if rec.pub_year not in window or not rec.journal_id:
            continue
        if rec.doc_type in DOC_TYPES:
            denominators[rec.journal_id] = denominators.get(rec.journal_id, 0) + 1
        cites = sum(
            1 for citing_id in citation_index.citations_of(rec.doc_id)
            if corpus[citing_id].pub_year == target_year
        )
        numerators[rec.journal_id] = numerators.get(rec.journal_id, 0) + cites
    out: Dict[str, JournalMetrics] = {}
    for journal_id in sorted(set(numerators) | set(denominators)):
        denom = denominators.get(journal_id, 0)
        if denom == 0:
            logger.warning("journal %s has no citable items in %s; omitted",
                           journal_id, window)
            continue
        num = numerators.get(journal_id, 0)
        out[journal_id] = JournalMetrics(
            journal_id=journal_id, jif=num / denom,
            citation_numerator=num, citable_denominator=denom)
    return out
