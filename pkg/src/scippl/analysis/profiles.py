"""Per-bin share and dispersion profiles with their companion tests."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from ..stats.hypotests import (
    DegenerateSampleError,
    TestResult,
    contingency_test,
    fligner_k,
    levene_k,
    two_sample_test,
    white_test,
)
from ..stats.regression import (
    RegressionFit,
    SeparationError,
    fit_linear,
    fit_logistic,
)
from .binning import QuantileBinning

logger = logging.getLogger(__name__)


def _log_scores(binning: QuantileBinning, doc_ids) -> np.ndarray:
    return np.array([math.log(binning.scores[d]) for d in doc_ids])


@dataclass
class ExtremeShareProfile:
    proportions: List[float]                  # one per bin, ascending
    chi2_top_vs_bottom: TestResult            # pooled top-3 vs bottom-3 bins
    logistic: Optional[RegressionFit]         # flag ~ log(score)
    odds_ratio: Optional[float]
    flagged_total: int
    extremes_bins: int = 3


def _month_dummy_block(doc_ids, month_of) -> Optional[np.ndarray]:
    """Dummy columns for publication months 2..12 (January is baseline);
    months absent from the data contribute no column."""
    months = [month_of(d) for d in doc_ids]
    cols = []
    for m in range(2, 13):
        col = np.array([1.0 if mm == m else 0.0 for mm in months])
        if 0.0 < col.mean() < 1.0:
            cols.append(col)
    return np.column_stack(cols) if cols else None


def extreme_share_profile(binning: QuantileBinning,
                          flag: Callable[[str], bool],
                          extremes_bins: int = 3,
                          month_of: Optional[Callable[[str], int]] = None
                          ) -> ExtremeShareProfile:
    """Proportion of flagged documents per bin, with a pooled top-vs-bottom
    chi-squared and a companion logistic regression on the logged score.

    month_of optionally supplies a publication month per document; when
    given, month dummies enter the logistic fit as a control block and
    the reported odds ratio stays that of the logged score.
    """
    doc_ids = sorted(binning.assignment)
    flags = {d: bool(flag(d)) for d in doc_ids}
    k = binning.k
    counts = [0] * k
    hits = [0] * k
    for d in doc_ids:
        b = binning.assignment[d]
        counts[b] += 1
        hits[b] += flags[d]
    proportions = [h / c for h, c in zip(hits, counts)]

    top = binning.top_bins(extremes_bins)
    bottom = binning.bottom_bins(extremes_bins)
    top_hits = sum(hits[b] for b in top)
    top_n = sum(counts[b] for b in top)
    bot_hits = sum(hits[b] for b in bottom)
    bot_n = sum(counts[b] for b in bottom)
    table = [[top_hits, top_n - top_hits], [bot_hits, bot_n - bot_hits]]
    try:
        chi2 = contingency_test(table)
    except DegenerateSampleError:
        # flag constant across the pooled bins: no measurable association
        chi2 = TestResult(statistic=0.0, p_value=1.0, df=1,
                          extra={"table": table, "degenerate": True})
    else:
        chi2.extra["table"] = table

    logistic = None
    odds_ratio = None
    y = np.array([1.0 if flags[d] else 0.0 for d in doc_ids])
    if 0.0 < y.mean() < 1.0:
        x = _log_scores(binning, doc_ids)
        design = np.column_stack([np.ones_like(x), x])
        if month_of is not None:
            dummies = _month_dummy_block(doc_ids, month_of)
            if dummies is not None:
                design = np.column_stack([design, dummies])
        try:
            logistic = fit_logistic(y, design)
            odds_ratio = float(logistic.exponentiated[1])
        except (SeparationError, ValueError) as exc:
            logger.warning("extreme-share logistic fit failed: %s", exc)
    return ExtremeShareProfile(proportions=proportions,
                               chi2_top_vs_bottom=chi2,
                               logistic=logistic, odds_ratio=odds_ratio,
                               flagged_total=int(sum(flags.values())),
                               extremes_bins=extremes_bins)


@dataclass
class DispersionProfile:
    bin_sd: List[Optional[float]]             # SD of values per display bin
    white: TestResult                         # value heteroskedasticity in log score
    variance_ols: Optional[RegressionFit]     # log within-bin variance ~ scaled bin index
    variance_slope: Optional[float]
    variance_slope_p: Optional[float]
    levene_top_vs_bottom: Optional[TestResult]
    fligner_top_vs_bottom: Optional[TestResult]
    variance_bins_used: int = 0
    variance_bins_omitted: int = 0
    missing_values: int = 0


def dispersion_profile(binning: QuantileBinning,
                       values: Dict[str, float],
                       variance_bins: int = 20,
                       extremes_bins: int = 3) -> DispersionProfile:
    """Spread of a per-document quantity across score bins.

    Runs White's test of the values against the logged score, an OLS of
    log within-bin variance on the scaled bin index over variance_bins
    fresh quantile bins, and Levene/Fligner comparisons of the pooled
    top vs bottom display bins.
    """
    doc_ids = sorted(d for d in binning.assignment if d in values)
    missing = len(binning.assignment) - len(doc_ids)
    if missing:
        logger.info("dispersion profile: %d binned docs lack values", missing)
    if len(doc_ids) < max(10, variance_bins):
        raise ValueError("too few valued documents for a dispersion profile")

    by_bin: Dict[int, List[float]] = {}
    for d in doc_ids:
        by_bin.setdefault(binning.assignment[d], []).append(values[d])
    bin_sd: List[Optional[float]] = []
    for b in range(binning.k):
        vals = by_bin.get(b, [])
        bin_sd.append(float(np.std(vals, ddof=1)) if len(vals) >= 2 else None)

    vals_arr = np.array([values[d] for d in doc_ids])
    logp = _log_scores(binning, doc_ids)
    white = white_test(vals_arr, logp)

    # fresh quantile bins over the valued subset for the variance OLS
    from .binning import quantile_bins

    sub_scores = {d: binning.scores[d] for d in doc_ids}
    vbinning = quantile_bins(sub_scores, variance_bins)
    var_by_bin: Dict[int, List[float]] = {}
    for d in doc_ids:
        var_by_bin.setdefault(vbinning.assignment[d], []).append(values[d])
    xs, ys = [], []
    omitted = 0
    for b in range(variance_bins):
        vals = var_by_bin.get(b, [])
        if len(vals) < 2:
            omitted += 1
            continue
        v = float(np.var(vals, ddof=1))
        if v <= 0.0:
            omitted += 1
            continue
        xs.append(b / (variance_bins - 1))
        ys.append(math.log(v))
    variance_ols = None
    slope = slope_p = None
    if len(xs) >= 3:
        design = np.column_stack([np.ones(len(xs)), np.array(xs)])
        variance_ols = fit_linear(np.array(ys), design)
        slope = float(variance_ols.coefficients[1])
        slope_p = float(variance_ols.p_values[1])
    else:
        logger.warning("variance OLS skipped: only %d usable bins", len(xs))

    top_vals = np.concatenate([by_bin.get(b, []) or [np.nan]
                               for b in binning.top_bins(extremes_bins)])
    bot_vals = np.concatenate([by_bin.get(b, []) or [np.nan]
                               for b in binning.bottom_bins(extremes_bins)])
    top_vals = top_vals[~np.isnan(top_vals)]
    bot_vals = bot_vals[~np.isnan(bot_vals)]
    levene = fligner = None
    if top_vals.size >= 2 and bot_vals.size >= 2:
        try:
            levene = levene_k([top_vals, bot_vals])
            fligner = fligner_k([top_vals, bot_vals])
        except DegenerateSampleError as exc:
            logger.warning("spread tests degenerate: %s", exc)
    return DispersionProfile(bin_sd=bin_sd, white=white,
                             variance_ols=variance_ols,
                             variance_slope=slope, variance_slope_p=slope_p,
                             levene_top_vs_bottom=levene,
                             fligner_top_vs_bottom=fligner,
                             variance_bins_used=len(xs),
                             variance_bins_omitted=omitted,
                             missing_values=missing)


@dataclass
class GroupProfile:
    label: str
    total: int
    shares: List[float]                       # per bin, sums to 1
    logistic: Optional[RegressionFit]
    odds_ratio: Optional[float]
    mann_whitney: Optional[TestResult]        # labeled vs unlabeled scores


def group_profiles(binning: QuantileBinning,
                   label: Callable[[str], Optional[str]]) -> Dict[str, GroupProfile]:
    """Per-label share of papers in each bin plus membership tests.

    Labels covering fewer than two papers are skipped with a warning.
    """
    doc_ids = sorted(binning.assignment)
    labels: Dict[str, List[str]] = {}
    for d in doc_ids:
        lab = label(d)
        if lab is not None:
            labels.setdefault(str(lab), []).append(d)
    out: Dict[str, GroupProfile] = {}
    logp_all = _log_scores(binning, doc_ids)
    for lab in sorted(labels):
        members = labels[lab]
        if len(members) < 2:
            logger.warning("label %r has fewer than 2 papers; skipped", lab)
            continue
        member_set = set(members)
        counts = [0] * binning.k
        for d in members:
            counts[binning.assignment[d]] += 1
        shares = [c / len(members) for c in counts]
        y = np.array([1.0 if d in member_set else 0.0 for d in doc_ids])
        logistic = None
        odds_ratio = None
        if 0.0 < y.mean() < 1.0:
            design = np.column_stack([np.ones_like(logp_all), logp_all])
            try:
                logistic = fit_logistic(y, design)
                odds_ratio = float(logistic.exponentiated[1])
            except (SeparationError, ValueError) as exc:
                logger.warning("group %r logistic fit failed: %s", lab, exc)
        mw = None
        inside = [binning.scores[d] for d in members]
        outside = [binning.scores[d] for d in doc_ids if d not in member_set]
        if len(inside) >= 1 and len(outside) >= 1:
            try:
                mw = two_sample_test("mann_whitney_u", inside, outside)
            except (DegenerateSampleError, ValueError) as exc:
                logger.warning("group %r Mann-Whitney failed: %s", lab, exc)
        out[lab] = GroupProfile(label=lab, total=len(members), shares=shares,
                                logistic=logistic, odds_ratio=odds_ratio,
                                mann_whitney=mw)
    return out
