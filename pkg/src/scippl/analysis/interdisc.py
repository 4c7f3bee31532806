"""Interdisciplinarity, reference-age, and JIF/citation bin profiles."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set

import numpy as np

from ..corpus import CitationIndex, Corpus, JournalMetrics, resolve_citations
from ..stats.hypotests import DegenerateSampleError, correlation
from ..stats.regression import ConvergenceError, RegressionFit, fit_linear, fit_negbin
from ..stats.smoothing import lowess
from .binning import QuantileBinning

logger = logging.getLogger(__name__)

ZERO_INTRA_OFFSET = 0.5  # offset becomes log(intra + 0.5) when intra == 0


def interdisciplinary_classify(focal_groups: Set[str],
                               other_groups: Set[str]) -> str:
    """"intra" when the other paper's groups are a subset of the focal
    paper's groups, "inter" otherwise; an empty other set is intra."""
    if not focal_groups:
        raise ValueError("focal paper has no field groups")
    if not other_groups:
        logger.info("empty field-group set classified intra (subset rule)")
        return "intra"
    return "intra" if other_groups <= focal_groups else "inter"


@dataclass
class InterdisciplinarityProfile:
    ref_ratio_by_bin: List[Optional[float]]     # sum inter / sum intra per bin
    cite_ratio_by_bin: List[Optional[float]]
    ref_fit: Optional[RegressionFit]            # inter refs ~ log score, offset log intra
    cite_fit: Optional[RegressionFit]
    ref_irr: Optional[float]
    cite_irr: Optional[float]
    papers_without_groups: int = 0
    papers_without_references: int = 0


def _link_counts(corpus: Corpus, focal_id: str, linked_ids) -> Optional[tuple]:
    focal = corpus[focal_id]
    if not focal.field_groups:
        return None
    inter = intra = 0
    for other_id in linked_ids:
        other = corpus.get(other_id)
        if other is None:
            continue
        if interdisciplinary_classify(focal.field_groups, other.field_groups) == "inter":
            inter += 1
        else:
            intra += 1
    return inter, intra


def interdisciplinarity_profile(corpus: Corpus,
                                citation_index: CitationIndex,
                                binning: QuantileBinning) -> InterdisciplinarityProfile:
    """Inter/intra ratios of references and citations per bin, plus
    negative-binomial fits of inter counts on the logged score with a
    log intra-count offset."""
    doc_ids = sorted(binning.assignment)
    no_groups = 0
    no_refs = 0
    ref_counts: Dict[str, tuple] = {}
    cite_counts: Dict[str, tuple] = {}
    for d in doc_ids:
        rec = corpus.get(d)
        if rec is None:
            continue
        res = _link_counts(corpus, d, rec.reference_ids)
        if res is None:
            no_groups += 1
            continue
        if res == (0, 0):
            no_refs += 1
        else:
            ref_counts[d] = res
        cres = _link_counts(corpus, d, citation_index.citations_of(d))
        if cres and cres != (0, 0):
            cite_counts[d] = cres
    if not ref_counts:
        raise ValueError("no resolvable references anywhere in the binned corpus")

    def per_bin_ratio(counts: Dict[str, tuple]) -> List[Optional[float]]:
        inter_tot = [0] * binning.k
        intra_tot = [0] * binning.k
        for d, (inter, intra) in counts.items():
            b = binning.assignment[d]
            inter_tot[b] += inter
            intra_tot[b] += intra
        return [inter_tot[b] / intra_tot[b] if intra_tot[b] > 0 else None
                for b in range(binning.k)]

    def nb_fit(counts: Dict[str, tuple]) -> Optional[RegressionFit]:
        ids = sorted(counts)
        if len(ids) < 10:
            return None
        y = np.array([float(counts[d][0]) for d in ids])
        if y.sum() == 0:
            return None
        intra = np.array([float(counts[d][1]) for d in ids])
        offset = np.log(np.where(intra > 0, intra, ZERO_INTRA_OFFSET))
        x = np.array([math.log(binning.scores[d]) for d in ids])
        design = np.column_stack([np.ones_like(x), x])
        try:
            return fit_negbin(y, design, offset)
        except (ConvergenceError, ValueError) as exc:
            logger.warning("interdisciplinarity NB fit failed: %s", exc)
            return None

    ref_fit = nb_fit(ref_counts)
    cite_fit = nb_fit(cite_counts)
    return InterdisciplinarityProfile(
        ref_ratio_by_bin=per_bin_ratio(ref_counts),
        cite_ratio_by_bin=per_bin_ratio(cite_counts),
        ref_fit=ref_fit, cite_fit=cite_fit,
        ref_irr=float(ref_fit.exponentiated[1]) if ref_fit else None,
        cite_irr=float(cite_fit.exponentiated[1]) if cite_fit else None,
        papers_without_groups=no_groups,
        papers_without_references=no_refs)


@dataclass
class ReferenceAgeProfile:
    mean_age_by_bin: List[Optional[float]]
    mean_popularity_by_bin: List[Optional[float]]   # citation count of referenced papers
    mean_ref_jif_by_bin: List[Optional[float]]
    unresolved_references: int = 0


def reference_age_profile(corpus: Corpus, binning: QuantileBinning,
                          citation_index: Optional[CitationIndex] = None,
                          jif: Optional[Dict[str, JournalMetrics]] = None
                          ) -> ReferenceAgeProfile:
    """Per-bin means over reference pairs of age, popularity, and the
    referenced journal's impact factor; unresolved references are
    excluded and counted."""
    if citation_index is None:
        citation_index = resolve_citations(corpus)
    jif_values: Dict[str, float] = {}
    if jif:
        jif_values = {j: (m.jif if isinstance(m, JournalMetrics) else float(m))
                      for j, m in jif.items()}
    ages: Dict[int, List[float]] = {}
    pops: Dict[int, List[float]] = {}
    jifs: Dict[int, List[float]] = {}
    unresolved = 0
    for d in sorted(binning.assignment):
        rec = corpus.get(d)
        if rec is None:
            continue
        b = binning.assignment[d]
        for ref_id in rec.reference_ids:
            ref = corpus.get(ref_id)
            if ref is None:
                unresolved += 1
                continue
            ages.setdefault(b, []).append(float(rec.pub_year - ref.pub_year))
            pops.setdefault(b, []).append(float(citation_index.citation_count(ref_id)))
            if ref.journal_id in jif_values:
                jifs.setdefault(b, []).append(jif_values[ref.journal_id])

    def means(table: Dict[int, List[float]]) -> List[Optional[float]]:
        return [float(np.mean(table[b])) if table.get(b) else None
                for b in range(binning.k)]

    return ReferenceAgeProfile(mean_age_by_bin=means(ages),
                               mean_popularity_by_bin=means(pops),
                               mean_ref_jif_by_bin=means(jifs),
                               unresolved_references=unresolved)


@dataclass
class JifCitationProfile:
    mean_jif_by_bin: List[Optional[float]]
    mean_citations_by_bin: List[Optional[float]]
    pearson_by_bin: List[Optional[float]]       # JIF vs citations within bin
    r2_by_bin: List[Optional[float]]
    quadratic: Optional[RegressionFit]          # citations ~ 1 + log s + (log s)^2
    quadratic_coefficient: Optional[float]
    quadratic_p: Optional[float]
    lowess_by_bin: Dict[int, list] = field(default_factory=dict)
    bins_without_jif: int = 0


def jif_citation_by_bin(corpus: Corpus, binning: QuantileBinning,
                        jif: Dict[str, JournalMetrics],
                        citations: Dict[str, int],
                        lowess_frac: float = 0.6) -> JifCitationProfile:
    """Per-bin JIF and citation summaries, a corpus-level quadratic fit
    of citations on the logged score, and per-bin LOWESS curves of
    citations against JIF."""
    jif_values = {j: (m.jif if isinstance(m, JournalMetrics) else float(m))
                  for j, m in jif.items()}
    per_bin: Dict[int, dict] = {b: {"jif": [], "cites": [], "pairs": []}
                                for b in range(binning.k)}
    xs, ys = [], []
    for d in sorted(binning.assignment):
        rec = corpus.get(d)
        if rec is None:
            continue
        b = binning.assignment[d]
        cites = float(citations.get(d, 0))
        per_bin[b]["cites"].append(cites)
        xs.append(math.log(binning.scores[d]))
        ys.append(cites)
        if rec.journal_id in jif_values:
            jv = jif_values[rec.journal_id]
            per_bin[b]["jif"].append(jv)
            per_bin[b]["pairs"].append((jv, cites))

    mean_jif: List[Optional[float]] = []
    mean_cites: List[Optional[float]] = []
    pearson: List[Optional[float]] = []
    r2: List[Optional[float]] = []
    lowess_by_bin: Dict[int, list] = {}
    empty_jif_bins = 0
    for b in range(binning.k):
        cell = per_bin[b]
        mean_cites.append(float(np.mean(cell["cites"])) if cell["cites"] else None)
        if not cell["jif"]:
            empty_jif_bins += 1
            mean_jif.append(None)
            pearson.append(None)
            r2.append(None)
            continue
        mean_jif.append(float(np.mean(cell["jif"])))
        jvals = [p[0] for p in cell["pairs"]]
        cvals = [p[1] for p in cell["pairs"]]
        try:
            res = correlation("pearson", jvals, cvals)
            pearson.append(float(res.statistic))
            r2.append(float(res.statistic) ** 2)
        except (DegenerateSampleError, ValueError):
            pearson.append(None)
            r2.append(None)
        if len(jvals) >= 5 and lowess_frac * len(jvals) >= 2:
            try:
                lowess_by_bin[b] = lowess(jvals, cvals, lowess_frac)
            except ValueError:
                pass

    quadratic = None
    qc = qp = None
    if len(xs) > 10 and np.ptp(xs) > 0:
        x = np.array(xs)
        design = np.column_stack([np.ones_like(x), x, x * x])
        try:
            quadratic = fit_linear(np.array(ys), design)
            qc = float(quadratic.coefficients[2])
            qp = float(quadratic.p_values[2])
        except ValueError as exc:
            logger.warning("quadratic citation fit failed: %s", exc)
    if empty_jif_bins:
        logger.info("%d bins had no JIF-covered members", empty_jif_bins)
    return JifCitationProfile(mean_jif_by_bin=mean_jif,
                              mean_citations_by_bin=mean_cites,
                              pearson_by_bin=pearson, r2_by_bin=r2,
                              quadratic=quadratic, quadratic_coefficient=qc,
                              quadratic_p=qp, lowess_by_bin=lowess_by_bin,
                              bins_without_jif=empty_jif_bins)
