"""Command-line front end.

Subcommands: ingest, train-lm, score, import-logprobs, analyze
<pipeline>, report.  Every command is deterministic given (inputs,
config, seed); progress goes to stderr and data to files.  Exit codes:
0 success, 1 runtime failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import analysis, corpus as corpuslib
from .config import ENV_CONFIG, RunConfig, build_config
from .lm import (
    KneserNeyModel,
    UnscoreableDocumentError,
    import_token_logprobs,
    load_synonym_lexicon,
    score_document,
    synonym_stability,
    train_ngram,
    word_punct_tokens,
)
from .stats import bootstrap_ci, skewness_z, two_sample_test
from .svgcharts import box_chart, line_chart

logger = logging.getLogger("scippl")

DEFAULT_UNCERTAINTY_LEXICON = ("perhaps", "maybe", "likely", "might")

PIPELINES = ("extreme-share", "disparity", "delay", "uncertainty",
             "word-ratio", "jif", "jif-citation", "interdisciplinarity",
             "group-share", "reference-age", "stability")

EXTREME_FLAGS = ("jif-top", "jif-bottom", "delay-long", "delay-short",
                 "retracted", "review")

GROUP_LABELS = ("funders", "doc-type", "retracted")


class UsageError(Exception):
    """Validation failure that should exit with status 2."""


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))    # shortest round-trip decimal
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path: Path, header: List[str], rows: List[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    logger.info("wrote %s (%d rows)", path, len(rows))


def require_file(path: Optional[str], what: str) -> Path:
    if not path:
        raise UsageError(f"missing required input: {what}")
    p = Path(path)
    if not p.exists():
        raise UsageError(f"{what} not found: {p}")
    return p


# ----------------------------------------------------------- data access

def load_corpus(cfg: RunConfig) -> corpuslib.Corpus:
    snapshot = Path(cfg.out) / "papers.snapshot.jsonl"
    path = snapshot if snapshot.exists() else require_file(cfg.papers, "papers file")
    with open(path, "r", encoding="utf-8") as fh:
        loaded, report = corpuslib.ingest_papers(fh)
    if report.total_skipped:
        logger.info("corpus load skipped %d records", report.total_skipped)
    return loaded


def load_reviews(cfg: RunConfig) -> Dict[str, corpuslib.ReviewBundle]:
    snapshot = Path(cfg.out) / "reviews.snapshot.jsonl"
    path = snapshot if snapshot.exists() else (Path(cfg.reviews) if cfg.reviews else None)
    if path is None or not Path(path).exists():
        raise UsageError("reviews file required for this pipeline")
    with open(path, "r", encoding="utf-8") as fh:
        bundles, _ = corpuslib.ingest_reviews(fh)
    return bundles


def load_scores(cfg: RunConfig, scores_path: Optional[str]) -> Dict[str, float]:
    path = Path(scores_path) if scores_path else Path(cfg.out) / "scores.csv"
    if not path.exists():
        raise UsageError(f"scores file not found: {path} (run `score` first)")
    out: Dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out[row["doc_id"]] = float(row["perplexity"])
    if not out:
        raise UsageError(f"scores file {path} is empty")
    return out


def effective_cutoff(cfg: RunConfig):
    return corpuslib.parse_cutoff(cfg.cutoff) if cfg.cutoff else None


# -------------------------------------------------------------- commands

def cmd_ingest(cfg: RunConfig) -> int:
    papers_path = require_file(cfg.papers, "papers file")
    outdir = cfg.outdir()
    with open(papers_path, "r", encoding="utf-8") as fh:
        loaded, report = corpuslib.ingest_papers(fh)
    with open(outdir / "papers.snapshot.jsonl", "w", encoding="utf-8") as fh:
        for line in corpuslib.serialize_papers(loaded):
            fh.write(line + "\n")
    print("papers:")
    print(report.summary())
    if cfg.reviews:
        reviews_path = require_file(cfg.reviews, "reviews file")
        with open(reviews_path, "r", encoding="utf-8") as fh:
            bundles, rreport = corpuslib.ingest_reviews(fh)
        with open(outdir / "reviews.snapshot.jsonl", "w", encoding="utf-8") as fh:
            for line in corpuslib.serialize_reviews(bundles):
                fh.write(line + "\n")
        print("reviews:")
        print(rreport.summary())
    return 0


def cmd_train_lm(cfg: RunConfig) -> int:
    loaded = load_corpus(cfg)
    cutoff = effective_cutoff(cfg)
    if cutoff is not None:
        texts = [rec.abstract for rec in loaded if rec.pub_date <= cutoff]
        logger.info("training on %d pre-cutoff abstracts", len(texts))
    else:
        texts = [rec.abstract for rec in loaded]
        logger.info("training on all %d abstracts", len(texts))
    if not texts:
        raise UsageError("no training abstracts available (check cutoff)")
    model = train_ngram(texts, order=cfg.order, discount=cfg.discount,
                        model_id=cfg.model_id)
    path = Path(cfg.model) if cfg.model else cfg.outdir() / "model.pkl"
    model.save(path)
    logger.info("saved model to %s", path)
    return 0


def cmd_score(cfg: RunConfig) -> int:
    loaded = load_corpus(cfg)
    cutoff = effective_cutoff(cfg)
    scoreable = corpuslib.filter_post_cutoff(loaded, cutoff) if cutoff else loaded
    model_path = Path(cfg.model) if cfg.model else Path(cfg.out) / "model.pkl"
    if not model_path.exists():
        raise UsageError(f"no scoring backend: model not found at {model_path} "
                         "(train-lm first or use import-logprobs)")
    model = KneserNeyModel.load(model_path)
    rows = []
    skipped = 0
    for rec in scoreable:
        try:
            scored = score_document(model, rec)
        except UnscoreableDocumentError:
            skipped += 1
            continue
        rows.append([scored.doc_id, scored.model_id, len(scored.tokens),
                     scored.perplexity])
    if skipped:
        logger.info("skipped %d unscoreable documents", skipped)
    write_csv(cfg.outdir() / "scores.csv",
              ["doc_id", "model_id", "token_count", "perplexity"], rows)
    if len(rows) >= 8:
        res = skewness_z([r[3] for r in rows])
        logger.info("perplexity distribution: n=%d skewness=%.3f z=%.2f p=%.3g",
                    len(rows), res.effect_size, res.statistic, res.p_value)
    return 0


def cmd_import_logprobs(cfg: RunConfig) -> int:
    path = require_file(cfg.logprobs, "logprobs file")
    with open(path, "r", encoding="utf-8") as fh:
        result = import_token_logprobs(fh)
    rows = [[d.doc_id, d.model_id, len(d.tokens), d.perplexity]
            for d in result.documents]
    write_csv(cfg.outdir() / "scores.csv",
              ["doc_id", "model_id", "token_count", "perplexity"], rows)
    if result.report.rejected:
        for line_no, reason in result.report.rejected:
            logger.warning("line %d rejected: %s", line_no, reason)
        write_csv(cfg.outdir() / "import_report.csv", ["line", "reason"],
                  [[n, r] for n, r in result.report.rejected])
    return 0


# ---------------------------------------------------------- analyze help

def _binning(cfg: RunConfig, scores: Dict[str, float]) -> analysis.QuantileBinning:
    return analysis.quantile_bins(scores, cfg.bins)


def _rank_flag(values: Dict[str, float], share: float, top: bool) -> Dict[str, bool]:
    """Deterministic top/bottom share flags by (value, doc_id) rank."""
    n = len(values)
    count = max(1, math.ceil(share * n))
    ranked = sorted(values.items(), key=lambda kv: (kv[1], kv[0]))
    chosen = ranked[-count:] if top else ranked[:count]
    chosen_ids = {d for d, _ in chosen}
    return {d: d in chosen_ids for d in values}


def _delay_map(cfg: RunConfig, scores) -> Dict[str, float]:
    reviews = load_reviews(cfg)
    stats = analysis.review_variability(reviews, scores)
    return {s.doc_id: float(s.delay_days) for s in stats if s.delay_days is not None}


def _jif_flag_map(cfg: RunConfig, loaded, scores, top: bool) -> Dict[str, bool]:
    idx = corpuslib.resolve_citations(loaded)
    year = cfg.jif_year or _default_jif_year(loaded, scores)
    metrics = corpuslib.compute_jif(loaded, year, idx)
    if not metrics:
        raise ValueError("no journal has a defined JIF for the chosen year")
    jifs = {j: m.jif for j, m in metrics.items()}
    journal_flags = _rank_flag(jifs, cfg.jif_extreme, top)
    return {d: journal_flags.get(loaded[d].journal_id, False)
            for d in scores if d in loaded}


def _default_jif_year(loaded, scores) -> int:
    years = [loaded[d].pub_year for d in scores if d in loaded]
    if not years:
        raise ValueError("no scored papers to infer a JIF year from")
    return max(years)


def _extreme_flag(cfg: RunConfig, which: str, loaded, scores) -> Dict[str, bool]:
    if which in ("jif-top", "jif-bottom"):
        return _jif_flag_map(cfg, loaded, scores, which == "jif-top")
    if which in ("delay-long", "delay-short"):
        delays = _delay_map(cfg, scores)
        if not delays:
            raise ValueError("no papers carry acceptance delays")
        flags = _rank_flag(delays, cfg.delay_extreme, which == "delay-long")
        return {d: flags.get(d, False) for d in scores}
    if which == "retracted":
        return {d: bool(d in loaded and loaded[d].retracted) for d in scores}
    if which == "review":
        return {d: bool(d in loaded and loaded[d].doc_type == "review")
                for d in scores}
    raise UsageError(f"unknown extreme-share flag {which!r}; "
                     f"choose from {', '.join(EXTREME_FLAGS)}")


def _tests_rows(name: str, res) -> List[list]:
    rows = [[name, "statistic", res.statistic],
            [name, "p_value", res.p_value]]
    if res.df is not None:
        rows.append([name, "df", res.df if not isinstance(res.df, tuple)
                     else "/".join(fmt(v) for v in res.df)])
    if res.effect_size is not None:
        rows.append([name, "effect_size", res.effect_size])
    return rows


def _fit_rows(name: str, fit, effect: str) -> List[list]:
    if fit is None:
        return [[name, "skipped", ""]]
    lo, hi = fit.ci_95[1]
    return [[name, f"{effect}", fit.exponentiated[1]],
            [name, f"{effect}_ci_low", math.exp(lo)],
            [name, f"{effect}_ci_high", math.exp(hi)],
            [name, "coefficient", fit.coefficients[1]],
            [name, "p_value", fit.p_values[1]],
            [name, "pseudo_r2", fit.fit_stat],
            [name, "n", fit.n],
            [name, "converged", fit.converged]]


def _bin_means_with_ci(cfg: RunConfig, binning, values: Dict[str, float]):
    means, cis = [], []
    for b in range(binning.k):
        members = [d for d in binning.members(b) if d in values]
        vals = [values[d] for d in members]
        if not vals:
            means.append(None)
            cis.append(None)
            continue
        means.append(float(np.mean(vals)))
        cis.append(bootstrap_ci(vals, "mean", b=cfg.bootstrap_reps,
                                seed=cfg.seed + b))
    return means, cis


def _maybe_svg(cfg: RunConfig, stem: str, series, title, y_label) -> None:
    if not cfg.svg:
        return
    path = cfg.outdir() / f"{stem}.svg"
    path.write_text(line_chart(series, title=title,
                               x_label="perplexity bin", y_label=y_label),
                    encoding="utf-8")
    logger.info("wrote %s", path)


# ------------------------------------------------------------- pipelines

def pipe_extreme_share(cfg: RunConfig, args) -> None:
    loaded = load_corpus(cfg)
    scores = load_scores(cfg, args.scores)
    binning = _binning(cfg, scores)
    flags = _extreme_flag(cfg, args.flag, loaded, scores)
    month_of = None
    if getattr(args, "month_dummies", False):
        month_of = lambda d: loaded[d].pub_date.month if d in loaded else 1
    prof = analysis.extreme_share_profile(binning, lambda d: flags.get(d, False),
                                          extremes_bins=cfg.extremes_bins,
                                          month_of=month_of)
    stem = f"extreme_share_{args.flag.replace('-', '_')}"
    sizes = binning.bin_sizes()
    write_csv(cfg.outdir() / f"{stem}.csv", ["bin", "n", "proportion"],
              [[b + 1, sizes[b], prof.proportions[b]] for b in range(binning.k)])
    rows = _tests_rows("chi2_top3_vs_bottom3", prof.chi2_top_vs_bottom)
    rows += _fit_rows("logistic_log_perplexity", prof.logistic, "odds_ratio")
    write_csv(cfg.outdir() / f"{stem}_tests.csv", ["test", "field", "value"], rows)
    _maybe_svg(cfg, stem, [{"name": args.flag, "values": prof.proportions}],
               f"share of {args.flag} papers", "proportion")


def pipe_disparity(cfg: RunConfig, args) -> None:
    scores = load_scores(cfg, args.scores)
    reviews = load_reviews(cfg)
    stats = analysis.review_variability(reviews, scores)
    if not stats:
        raise ValueError("no reviewed papers join to the score table")
    disparity = {s.doc_id: s.disparity for s in stats if s.disparity is not None}
    rating = {s.doc_id: s.mean_rating for s in stats if s.mean_rating is not None}
    confidence = {s.doc_id: s.mean_confidence for s in stats
                  if s.mean_confidence is not None}
    sub_scores = {d: scores[d] for d in disparity}
    binning = _binning(cfg, sub_scores)
    d_means, d_cis = _bin_means_with_ci(cfg, binning, disparity)
    c_means, c_cis = _bin_means_with_ci(cfg, binning, confidence)
    r_means, _ = _bin_means_with_ci(cfg, binning, rating)
    rows = []
    for b in range(binning.k):
        rows.append([b + 1,
                     d_means[b],
                     d_cis[b][0] if d_cis[b] else None,
                     d_cis[b][1] if d_cis[b] else None,
                     r_means[b],
                     c_means[b],
                     c_cis[b][0] if c_cis[b] else None,
                     c_cis[b][1] if c_cis[b] else None])
    write_csv(cfg.outdir() / "disparity_bins.csv",
              ["bin", "disparity_mean", "disparity_ci_low", "disparity_ci_high",
               "rating_mean", "confidence_mean", "confidence_ci_low",
               "confidence_ci_high"], rows)

    top_bins = set(binning.top_bins(cfg.extremes_bins))
    bot_bins = set(binning.bottom_bins(cfg.extremes_bins))
    test_rows = []
    for name, table in (("disparity", disparity), ("confidence", confidence),
                        ("rating", rating)):
        top = [v for d, v in table.items() if binning.assignment.get(d) in top_bins]
        bottom = [v for d, v in table.items() if binning.assignment.get(d) in bot_bins]
        if len(top) >= 2 and len(bottom) >= 2:
            res = two_sample_test("welch_t", top, bottom)
            test_rows += _tests_rows(f"welch_{name}_top_vs_bottom", res)
    for name, table in (("rating", rating), ("confidence", confidence)):
        if len(table) >= max(10, cfg.variance_bins):
            prof = analysis.dispersion_profile(binning, table,
                                               variance_bins=cfg.variance_bins,
                                               extremes_bins=cfg.extremes_bins)
            test_rows += _tests_rows(f"white_{name}", prof.white)
            if prof.variance_slope is not None:
                test_rows += [[f"variance_ols_{name}", "slope", prof.variance_slope],
                              [f"variance_ols_{name}", "p_value", prof.variance_slope_p]]
            if prof.levene_top_vs_bottom is not None:
                test_rows += _tests_rows(f"levene_{name}", prof.levene_top_vs_bottom)
            if prof.fligner_top_vs_bottom is not None:
                test_rows += _tests_rows(f"fligner_{name}", prof.fligner_top_vs_bottom)
    write_csv(cfg.outdir() / "disparity_tests.csv", ["test", "field", "value"],
              test_rows)
    _maybe_svg(cfg, "disparity_bins",
               [{"name": "disparity", "values": d_means, "ci": d_cis}],
               "rating disparity by perplexity bin", "max - min rating")


def pipe_delay(cfg: RunConfig, args) -> None:
    scores = load_scores(cfg, args.scores)
    delays = _delay_map(cfg, scores)
    if not delays:
        raise ValueError("no papers carry acceptance delays")
    sub_scores = {d: scores[d] for d in delays}
    binning = _binning(cfg, sub_scores)
    means, cis = _bin_means_with_ci(cfg, binning, delays)
    prof = analysis.dispersion_profile(binning, delays,
                                       variance_bins=cfg.variance_bins,
                                       extremes_bins=cfg.extremes_bins)
    rows = [[b + 1, means[b], cis[b][0] if cis[b] else None,
             cis[b][1] if cis[b] else None, prof.bin_sd[b]]
            for b in range(binning.k)]
    write_csv(cfg.outdir() / "delay_bins.csv",
              ["bin", "delay_mean", "delay_ci_low", "delay_ci_high", "delay_sd"],
              rows)
    test_rows = _tests_rows("white_delay", prof.white)
    if prof.variance_slope is not None:
        test_rows += [["variance_ols_delay", "slope", prof.variance_slope],
                      ["variance_ols_delay", "p_value", prof.variance_slope_p]]
    if prof.levene_top_vs_bottom is not None:
        test_rows += _tests_rows("levene_delay", prof.levene_top_vs_bottom)
    if prof.fligner_top_vs_bottom is not None:
        test_rows += _tests_rows("fligner_delay", prof.fligner_top_vs_bottom)
    write_csv(cfg.outdir() / "delay_tests.csv", ["test", "field", "value"],
              test_rows)
    _maybe_svg(cfg, "delay_bins",
               [{"name": "delay sd", "values": prof.bin_sd}],
               "acceptance delay spread by perplexity bin", "sd of days")


def pipe_uncertainty(cfg: RunConfig, args) -> None:
    scores = load_scores(cfg, args.scores)
    reviews = load_reviews(cfg)
    with_comments = {d: scores[d] for d, b in reviews.items()
                     if d in scores and b.comments}
    if not with_comments:
        raise ValueError("no reviewed papers with comments join to the scores")
    high_flags = _rank_flag(with_comments, cfg.comment_split, top=True)
    low_flags = _rank_flag(with_comments, cfg.comment_split, top=False)
    high = [c for d in sorted(with_comments) if high_flags[d]
            for c in reviews[d].comments]
    low = [c for d in sorted(with_comments) if low_flags[d]
           for c in reviews[d].comments]
    lexicon = list(DEFAULT_UNCERTAINTY_LEXICON)
    if cfg.uncertainty_lexicon:
        with open(require_file(cfg.uncertainty_lexicon, "uncertainty lexicon"),
                  "r", encoding="utf-8") as fh:
            lexicon = [line.strip().lower() for line in fh if line.strip()]
    res = analysis.uncertainty_word_rate(high, low, lexicon)
    write_csv(cfg.outdir() / "uncertainty.csv",
              ["word", "rate_high", "rate_low"],
              [[w, rh, rl] for w, (rh, rl) in sorted(res.word_rates.items())])
    rows = _tests_rows("chi2_uncertainty", res.chi2)
    rows += [["counts", "hits_high", res.hits_high],
             ["counts", "tokens_high", res.tokens_high],
             ["counts", "hits_low", res.hits_low],
             ["counts", "tokens_low", res.tokens_low]]
    write_csv(cfg.outdir() / "uncertainty_tests.csv", ["test", "field", "value"],
              rows)


def pipe_word_ratio(cfg: RunConfig, args) -> None:
    loaded = load_corpus(cfg)
    scores = load_scores(cfg, args.scores)
    joined = {d: s for d, s in scores.items() if d in loaded}
    if len(joined) < 2:
        raise ValueError("need at least two scored papers for a ratio analysis")
    high_flags = _rank_flag(joined, 0.5, top=True)
    high = [loaded[d] for d in sorted(joined) if high_flags[d]]
    low = [loaded[d] for d in sorted(joined) if not high_flags[d]]
    if not high or not low:
        raise ValueError("one of the split groups is empty")
    ratios, _ = analysis.word_ratio_analysis(high, low,
                                             min_count=cfg.word_min_count)
    write_csv(cfg.outdir() / "word_ratio.csv",
              ["word", "freq_high", "freq_low", "r", "display_value",
               "orientation"],
              [[r.word, r.freq_high, r.freq_low, r.r, r.display_value,
                r.orientation] for r in ratios])


def pipe_jif(cfg: RunConfig, args) -> None:
    loaded = load_corpus(cfg)
    year = cfg.jif_year
    if year is None:
        scores = None
        try:
            scores = load_scores(cfg, args.scores)
        except UsageError:
            pass
        year = (_default_jif_year(loaded, scores) if scores
                else max(rec.pub_year for rec in loaded))
    metrics = corpuslib.compute_jif(loaded, year)
    write_csv(cfg.outdir() / "jif.csv",
              ["journal_id", "jif", "citation_numerator", "citable_denominator"],
              [[m.journal_id, m.jif, m.citation_numerator, m.citable_denominator]
               for m in metrics.values()])


def pipe_jif_citation(cfg: RunConfig, args) -> None:
    loaded = load_corpus(cfg)
    scores = load_scores(cfg, args.scores)
    binning = _binning(cfg, scores)
    idx = corpuslib.resolve_citations(loaded)
    year = cfg.jif_year or _default_jif_year(loaded, scores)
    metrics = corpuslib.compute_jif(loaded, year, idx)
    citations = {d: idx.citation_count(d) for d in scores}
    prof = analysis.jif_citation_by_bin(loaded, binning, metrics, citations)
    rows = [[b + 1, prof.mean_jif_by_bin[b], prof.mean_citations_by_bin[b],
             prof.pearson_by_bin[b], prof.r2_by_bin[b]]
            for b in range(binning.k)]
    write_csv(cfg.outdir() / "jif_citation_bins.csv",
              ["bin", "mean_jif", "mean_citations", "pearson_jif_citations",
               "r2"], rows)
    test_rows = []
    if prof.quadratic is not None:
        test_rows += [["quadratic_citations", "coefficient",
                       prof.quadratic_coefficient],
                      ["quadratic_citations", "p_value", prof.quadratic_p],
                      ["quadratic_citations", "r2", prof.quadratic.fit_stat]]
    write_csv(cfg.outdir() / "jif_citation_tests.csv",
              ["test", "field", "value"], test_rows)
    lowess_rows = [[b + 1, x, y] for b in sorted(prof.lowess_by_bin)
                   for x, y in prof.lowess_by_bin[b]]
    write_csv(cfg.outdir() / "jif_citation_lowess.csv",
              ["bin", "jif", "citations_smoothed"], lowess_rows)
    _maybe_svg(cfg, "jif_citation_bins",
               [{"name": "mean JIF", "values": prof.mean_jif_by_bin},
                {"name": "mean citations", "values": prof.mean_citations_by_bin}],
               "JIF and citations by perplexity bin", "mean")


def pipe_interdisciplinarity(cfg: RunConfig, args) -> None:
    loaded = load_corpus(cfg)
    scores = load_scores(cfg, args.scores)
    binning = _binning(cfg, scores)
    idx = corpuslib.resolve_citations(loaded)
    prof = analysis.interdisciplinarity_profile(loaded, idx, binning)
    rows = [[b + 1, prof.ref_ratio_by_bin[b], prof.cite_ratio_by_bin[b]]
            for b in range(binning.k)]
    write_csv(cfg.outdir() / "interdisciplinarity_bins.csv",
              ["bin", "reference_inter_intra_ratio", "citation_inter_intra_ratio"],
              rows)
    test_rows = _fit_rows("negbin_references", prof.ref_fit, "irr")
    test_rows += _fit_rows("negbin_citations", prof.cite_fit, "irr")
    test_rows += [["counts", "papers_without_groups", prof.papers_without_groups],
                  ["counts", "papers_without_references",
                   prof.papers_without_references]]
    write_csv(cfg.outdir() / "interdisciplinarity_tests.csv",
              ["test", "field", "value"], test_rows)
    _maybe_svg(cfg, "interdisciplinarity_bins",
               [{"name": "references", "values": prof.ref_ratio_by_bin}],
               "inter/intra reference ratio by perplexity bin", "ratio")


def pipe_group_share(cfg: RunConfig, args) -> None:
    loaded = load_corpus(cfg)
    scores = load_scores(cfg, args.scores)
    binning = _binning(cfg, scores)
    which = args.label

    def label_fn(d: str) -> Optional[str]:
        rec = loaded.get(d)
        if rec is None:
            return None
        if which == "doc-type":
            return rec.doc_type
        if which == "retracted":
            return "retracted" if rec.retracted else None
        return None

    if which == "funders":
        rows = []
        test_rows = []
        funder_names = sorted({f for rec in loaded for f in rec.funders})
        for funder in funder_names:
            profs = analysis.group_profiles(
                binning, lambda d, f=funder: f if loaded.get(d) and
                f in loaded[d].funders else None)
            if funder not in profs:
                continue
            prof = profs[funder]
            for b, share in enumerate(prof.shares):
                rows.append([funder, b + 1, prof.total, share])
            if prof.odds_ratio is not None:
                test_rows.append([funder, "odds_ratio", prof.odds_ratio])
                test_rows.append([funder, "logistic_p",
                                  prof.logistic.p_values[1]])
            if prof.mann_whitney is not None:
                test_rows.append([funder, "mann_whitney_u",
                                  prof.mann_whitney.statistic])
                test_rows.append([funder, "mann_whitney_p",
                                  prof.mann_whitney.p_value])
        write_csv(cfg.outdir() / "group_share_funders.csv",
                  ["label", "bin", "total", "share"], rows)
        write_csv(cfg.outdir() / "group_share_funders_tests.csv",
                  ["label", "field", "value"], test_rows)
        return

    profs = analysis.group_profiles(binning, label_fn)
    stem = f"group_share_{which.replace('-', '_')}"
    if cfg.svg and profs:
        groups = []
        for lab in sorted(profs):
            inside = [scores[d] for d in sorted(scores)
                      if label_fn(d) == lab]
            groups.append((lab, inside))
        rest = [scores[d] for d in sorted(scores) if label_fn(d) is None]
        if rest:
            groups.append(("other", rest))
        path = cfg.outdir() / f"{stem}.svg"
        path.write_text(box_chart(groups, title=f"perplexity by {which}",
                                  y_label="perplexity"), encoding="utf-8")
        logger.info("wrote %s", path)
    rows = []
    test_rows = []
    for lab in sorted(profs):
        prof = profs[lab]
        for b, share in enumerate(prof.shares):
            rows.append([lab, b + 1, prof.total, share])
        if prof.odds_ratio is not None:
            test_rows.append([lab, "odds_ratio", prof.odds_ratio])
            test_rows.append([lab, "logistic_p", prof.logistic.p_values[1]])
        if prof.mann_whitney is not None:
            test_rows.append([lab, "mann_whitney_u", prof.mann_whitney.statistic])
            test_rows.append([lab, "mann_whitney_p", prof.mann_whitney.p_value])
    write_csv(cfg.outdir() / f"{stem}.csv", ["label", "bin", "total", "share"],
              rows)
    write_csv(cfg.outdir() / f"{stem}_tests.csv", ["label", "field", "value"],
              test_rows)


def pipe_reference_age(cfg: RunConfig, args) -> None:
    loaded = load_corpus(cfg)
    scores = load_scores(cfg, args.scores)
    binning = _binning(cfg, scores)
    idx = corpuslib.resolve_citations(loaded)
    metrics = None
    try:
        year = cfg.jif_year or _default_jif_year(loaded, scores)
        metrics = corpuslib.compute_jif(loaded, year, idx)
    except ValueError:
        pass
    prof = analysis.reference_age_profile(loaded, binning, idx, metrics)
    rows = [[b + 1, prof.mean_age_by_bin[b], prof.mean_popularity_by_bin[b],
             prof.mean_ref_jif_by_bin[b]] for b in range(binning.k)]
    write_csv(cfg.outdir() / "reference_age.csv",
              ["bin", "mean_reference_age", "mean_reference_popularity",
               "mean_reference_jif"], rows)
    _maybe_svg(cfg, "reference_age",
               [{"name": "reference age", "values": prof.mean_age_by_bin}],
               "reference age by perplexity bin", "years")


def pipe_stability(cfg: RunConfig, args) -> None:
    loaded = load_corpus(cfg)
    scores = load_scores(cfg, args.scores)
    model_path = Path(cfg.model) if cfg.model else Path(cfg.out) / "model.pkl"
    if not model_path.exists():
        raise UsageError(f"stability needs the n-gram model: {model_path}")
    model = KneserNeyModel.load(model_path)
    lex_path = require_file(cfg.synonyms, "synonyms file")
    with open(lex_path, "r", encoding="utf-8") as fh:
        lexicon = load_synonym_lexicon(fh)
    seqs = {d: word_punct_tokens(loaded[d].abstract)
            for d in sorted(scores) if d in loaded}
    curve = synonym_stability(model, seqs, lexicon,
                              max_k=cfg.stability_max_k,
                              reps=cfg.stability_reps, seed=cfg.seed)
    write_csv(cfg.outdir() / "stability.csv", ["k", "mean_abs_delta"],
              [[k, m] for k, m in zip(curve.ks, curve.mean_abs_delta)])
    write_csv(cfg.outdir() / "stability_tests.csv", ["field", "value"],
              [["quad_intercept", curve.quad_coefficients[0]],
               ["quad_linear", curve.quad_coefficients[1]],
               ["quad_coefficient", curve.quad_coefficients[2]],
               ["reference_sd", curve.reference_sd],
               ["skipped", curve.skipped]])
    _maybe_svg(cfg, "stability",
               [{"name": "|delta PPL|", "values": curve.mean_abs_delta}],
               "perplexity change under synonym replacement", "|delta PPL|")


PIPELINE_FNS = {
    "extreme-share": pipe_extreme_share,
    "disparity": pipe_disparity,
    "delay": pipe_delay,
    "uncertainty": pipe_uncertainty,
    "word-ratio": pipe_word_ratio,
    "jif": pipe_jif,
    "jif-citation": pipe_jif_citation,
    "interdisciplinarity": pipe_interdisciplinarity,
    "group-share": pipe_group_share,
    "reference-age": pipe_reference_age,
    "stability": pipe_stability,
}


def cmd_analyze(cfg: RunConfig, args) -> int:
    PIPELINE_FNS[args.pipeline](cfg, args)
    return 0


def cmd_report(cfg: RunConfig, args) -> int:
    """Re-emit SVG charts from pipeline CSVs already in the out dir."""
    outdir = cfg.outdir()
    made = 0

    def read_rows(name):
        path = outdir / name
        if not path.exists():
            return None
        with open(path, "r", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))

    def col(rows, key):
        return [float(r[key]) if r[key] else None for r in rows]

    for stem, columns, title, ylab in (
            ("disparity_bins", [("disparity", "disparity_mean",
                                 "disparity_ci_low", "disparity_ci_high")],
             "rating disparity by perplexity bin", "max - min rating"),
            ("delay_bins", [("delay sd", "delay_sd", None, None)],
             "acceptance delay spread", "sd of days"),
            ("jif_citation_bins", [("mean JIF", "mean_jif", None, None),
                                   ("mean citations", "mean_citations", None, None)],
             "JIF and citations by perplexity bin", "mean"),
            ("interdisciplinarity_bins",
             [("references", "reference_inter_intra_ratio", None, None)],
             "inter/intra reference ratio", "ratio"),
            ("reference_age", [("reference age", "mean_reference_age", None, None)],
             "reference age by perplexity bin", "years"),
            ("stability", [("|delta PPL|", "mean_abs_delta", None, None)],
             "synonym-replacement stability", "|delta PPL|")):
        rows = read_rows(f"{stem}.csv")
        if not rows:
            continue
        series = []
        for name, val_key, lo_key, hi_key in columns:
            values = col(rows, val_key)
            ci = None
            if lo_key and hi_key:
                lows = col(rows, lo_key)
                highs = col(rows, hi_key)
                ci = [(lo, hi) if lo is not None and hi is not None else None
                      for lo, hi in zip(lows, highs)]
            series.append({"name": name, "values": values, "ci": ci})
        if not any(v is not None for s in series for v in s["values"]):
            continue
        (outdir / f"{stem}.svg").write_text(
            line_chart(series, title=title, x_label="perplexity bin",
                       y_label=ylab), encoding="utf-8")
        made += 1
    for stem in ("extreme_share_jif_top", "extreme_share_jif_bottom",
                 "extreme_share_delay_long", "extreme_share_delay_short",
                 "extreme_share_retracted", "extreme_share_review"):
        rows = read_rows(f"{stem}.csv")
        if not rows:
            continue
        (outdir / f"{stem}.svg").write_text(
            line_chart([{"name": stem, "values": col(rows, "proportion")}],
                       title=stem.replace("_", " "),
                       x_label="perplexity bin", y_label="proportion"),
            encoding="utf-8")
        made += 1
    print(f"report: wrote {made} chart(s) to {outdir}")
    return 0


# ------------------------------------------------------------------ main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scippl",
        description="Perplexity scoring and scientometric analysis pipelines.")
    parser.add_argument("--config", help=f"config file (default from ${ENV_CONFIG})")
    parser.add_argument("--seed", type=int, help="seed for every stochastic step")
    parser.add_argument("--bins", type=int, help="number of quantile bins")
    parser.add_argument("--cutoff", help="knowledge cutoff YYYY-MM or YYYY-MM-DD")
    parser.add_argument("--model-id", dest="model_id", help="backend model id")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--papers", help="papers.jsonl path")
    parser.add_argument("--reviews", help="reviews.jsonl path")
    parser.add_argument("--logprobs", help="logprobs.jsonl path")
    parser.add_argument("--synonyms", help="synonyms.tsv path")
    parser.add_argument("--uncertainty-lexicon", dest="uncertainty_lexicon",
                        help="uncertainty lexicon path (one term per line)")
    parser.add_argument("--model", help="trained model path")
    parser.add_argument("--order", type=int, help="n-gram order")
    parser.add_argument("--jif-year", dest="jif_year", type=int,
                        help="target year for JIF computation")
    parser.add_argument("--svg", action="store_const", const=True, default=None,
                        help="emit SVG charts alongside CSVs")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="verbose progress on stderr")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", help="validate and snapshot input records")
    sub.add_parser("train-lm", help="train the built-in n-gram backend")
    sub.add_parser("score", help="score the post-cutoff corpus")
    sub.add_parser("import-logprobs", help="import external token logprobs")
    analyze = sub.add_parser("analyze", help="run an analysis pipeline")
    analyze.add_argument("pipeline", choices=PIPELINES)
    analyze.add_argument("--flag", choices=EXTREME_FLAGS, default="jif-top",
                         help="flag for the extreme-share pipeline")
    analyze.add_argument("--label", choices=GROUP_LABELS, default="funders",
                         help="label source for the group-share pipeline")
    analyze.add_argument("--scores", help="scores CSV (default <out>/scores.csv)")
    analyze.add_argument("--month-dummies", action="store_true",
                         help="add publication-month dummies to the "
                              "extreme-share logistic fit")
    sub.add_parser("report", help="emit SVG charts from existing pipeline CSVs")
    return parser


CONFIG_KEYS = ("seed", "bins", "cutoff", "model_id", "out", "papers", "reviews",
               "logprobs", "synonyms", "uncertainty_lexicon", "model", "order",
               "jif_year", "svg")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr,
                        level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {k: getattr(args, k) for k in CONFIG_KEYS}
    try:
        cfg = build_config(args.config, overrides)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "ingest":
            return cmd_ingest(cfg)
        if args.command == "train-lm":
            return cmd_train_lm(cfg)
        if args.command == "score":
            return cmd_score(cfg)
        if args.command == "import-logprobs":
            return cmd_import_logprobs(cfg)
        if args.command == "analyze":
            return cmd_analyze(cfg, args)
        if args.command == "report":
            return cmd_report(cfg, args)
        parser.error(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure contract: exit 1
        print(f"error: {exc}", file=sys.stderr)
        if args.verbose:
            raise
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
