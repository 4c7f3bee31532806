"""Acceptance suite.

One test per acceptance criterion, each printing a PASS line with its
measured quantities (run with -s to see them inline).  Tolerances are
pinned here and nowhere else.
"""

import csv
import itertools
import math
import time
from pathlib import Path

import numpy as np
import pytest

from scippl.analysis import dispersion_profile, quantile_bins
from scippl.cli import main
from scippl.lm import (
    load_synonym_lexicon,
    perplexity,
    synonym_stability,
    train_ngram,
    word_punct_tokens,
)
from scippl.stats import fit_logistic, fit_negbin, two_sample_test, welch_t_summary
from scippl.stats.hypotests import white_test
from scippl.synthdata import write_planted_corpus


def report(line: str) -> None:
    print(f"\nACCEPTANCE {line}")


# ---------------------------------------------------------------- 1

def test_criterion_1_perplexity_formula_oracle():
    start = time.monotonic()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 400))
        lps = (-rng.exponential(1.2, size=n)).tolist()
        # independent exp-of-negative-mean script
        expected = math.exp(-(sum(lps) / len(lps)))
        got = perplexity(lps)
        rel = abs(got - expected) / expected
        worst = max(worst, rel)
        assert rel < 1e-10
    for v in (2, 10, 100):
        got = perplexity([-math.log(v)] * 8)
        # binary64-exact up to the 1-ulp rounding of exp(log(V))
        assert got == pytest.approx(float(v), rel=4.5e-16)
    elapsed = time.monotonic() - start
    assert elapsed < 1.0
    report(f"1: PASS - perplexity oracle, worst rel err {worst:.2e}, "
           f"uniform identity V=2/10/100, {elapsed:.2f}s")


# ---------------------------------------------------------------- 2

def test_criterion_2_welch_from_summary():
    start = time.monotonic()
    res = welch_t_summary(13.20, 3.95, 33, 9.63, 3.72, 20)
    assert res.statistic == pytest.approx(3.31, abs=0.01)
    assert res.effect_size == pytest.approx(0.92, abs=0.01)
    res2 = welch_t_summary(18.70, 6.20, 33, 13.62, 7.48, 1_784_177)
    assert res2.statistic == pytest.approx(4.70, abs=0.01)
    elapsed = time.monotonic() - start
    assert elapsed < 1.0
    report(f"2: PASS - Welch summaries t={res.statistic:.3f} d={res.effect_size:.3f} "
           f"and t={res2.statistic:.3f}, {elapsed:.2f}s")


# ---------------------------------------------------------------- 3

def test_criterion_3_glm_oracles():
    start = time.monotonic()
    rng = np.random.default_rng(303)
    worst_or = 0.0
    for _ in range(200):
        a, b, c, d = (int(rng.integers(1, 40)) for _ in range(4))
        x = np.concatenate([np.ones(a + b), np.zeros(c + d)])
        y = np.concatenate([np.ones(a), np.zeros(b), np.ones(c), np.zeros(d)])
        fit = fit_logistic(y, np.column_stack([np.ones_like(x), x]))
        target = (a * d) / (b * c)
        rel = abs(fit.exponentiated[1] - target) / target
        worst_or = max(worst_or, rel)
        assert rel < 1e-6
    worst_irr = 0.0
    for _ in range(50):
        n = int(rng.integers(30, 200))
        m = float(rng.uniform(0.5, 20.0))      # exposure, constant per instance
        mu = float(rng.uniform(0.5, 8.0)) * m
        shape = float(rng.uniform(0.5, 3.0))
        lam = rng.gamma(shape, mu / shape, size=n)
        y = rng.poisson(lam).astype(float)
        if y.sum() == 0:
            y[0] = 1.0
        fit = fit_negbin(y, np.ones((n, 1)), np.log(np.full(n, m)))
        target = y.sum() / (n * m)
        rel = abs(fit.exponentiated[0] - target) / target
        worst_irr = max(worst_irr, rel)
        assert rel < 1e-6
    elapsed = time.monotonic() - start
    assert elapsed < 10.0
    report(f"3: PASS - 200 logistic ORs (worst rel {worst_or:.2e}), "
           f"50 NB rate identities (worst rel {worst_irr:.2e}), {elapsed:.1f}s")


# ---------------------------------------------------------------- 4

def brute_force_exact_p(a, b):
    pooled = np.concatenate([a, b])
    n1 = len(a)
    order = np.argsort(pooled)
    ranks = np.empty(len(pooled))
    ranks[order] = np.arange(1, len(pooled) + 1)
    mu = n1 * len(b) / 2.0

    def u_of(idx):
        return ranks[list(idx)].sum() - n1 * (n1 + 1) / 2.0

    obs = abs(u_of(range(n1)) - mu)
    hits = total = 0
    for combo in itertools.combinations(range(len(pooled)), n1):
        total += 1
        if abs(u_of(combo) - mu) >= obs - 1e-9:
            hits += 1
    return hits / total


def test_criterion_4_mann_whitney_exact():
    rng = np.random.default_rng(404)
    pairs = [(n1, n2) for n1 in range(1, 37) for n2 in range(1, 37)
             if n1 * n2 <= 36]
    checked = 0
    for n1, n2 in pairs:
        a = rng.normal(size=n1)
        b = rng.normal(size=n2)
        res = two_sample_test("mann_whitney_u", a, b)
        assert res.extra["method"] == "exact"
        assert res.p_value == brute_force_exact_p(a, b)
        checked += 1
    report(f"4: PASS - exact Mann-Whitney p matches enumeration on "
           f"{checked} size pairs")


# ---------------------------------------------------------------- 5

def _binned_ols_rejects(rng, n, heteroskedastic) -> tuple:
    # positive regressor domain so that variance prop. to x^2 is monotone
    # in the score rank, as it is for perplexity
    x = rng.uniform(0.5, 2.5, size=n)
    if heteroskedastic:
        y = x * rng.normal(size=n)
    else:
        y = x + rng.normal(size=n)
    white_p = white_test(y, x).p_value
    scores = {f"d{i:05d}": float(np.exp(v)) for i, v in enumerate(x)}
    values = {f"d{i:05d}": float(y[i]) for i in range(n)}
    binning = quantile_bins(scores, 10)
    prof = dispersion_profile(binning, values, variance_bins=20)
    return white_p < 0.05, (prof.variance_slope_p is not None
                            and prof.variance_slope_p < 0.05)


def test_criterion_5_size_and_power():
    start = time.monotonic()
    n = 5000
    seeds = 200
    white_null = ols_null = 0
    for seed in range(seeds):
        rng = np.random.default_rng(50_000 + seed)
        w, o = _binned_ols_rejects(rng, n, heteroskedastic=False)
        white_null += w
        ols_null += o
    white_rate = white_null / seeds
    ols_rate = ols_null / seeds
    assert 0.02 <= white_rate <= 0.08
    assert 0.02 <= ols_rate <= 0.08
    white_pow = ols_pow = 0
    for seed in range(seeds):
        rng = np.random.default_rng(60_000 + seed)
        w, o = _binned_ols_rejects(rng, n, heteroskedastic=True)
        white_pow += w
        ols_pow += o
    assert white_pow / seeds > 0.95
    assert ols_pow / seeds > 0.95
    elapsed = time.monotonic() - start
    assert elapsed < 60.0
    report(f"5: PASS - size white={white_rate:.3f} ols={ols_rate:.3f}, "
           f"power white={white_pow / seeds:.3f} ols={ols_pow / seeds:.3f}, "
           f"{elapsed:.1f}s")


# ---------------------------------------------------------------- 6

@pytest.fixture(scope="module")
def planted_run(tmp_path_factory):
    root = tmp_path_factory.mktemp("planted")
    t0 = time.monotonic()
    write_planted_corpus(root / "papers.jsonl", root / "reviews.jsonl",
                         n_papers=10_000, seed=7)
    out = root / "out"
    base = ["--papers", str(root / "papers.jsonl"),
            "--reviews", str(root / "reviews.jsonl"),
            "--out", str(out), "--cutoff", "2023-06", "--seed", "3",
            "--jif-year", "2024"]
    for cmd in (["ingest"], ["train-lm"], ["score"],
                ["analyze", "extreme-share", "--flag", "jif-top"],
                ["analyze", "extreme-share", "--flag", "jif-bottom"],
                ["analyze", "disparity"],
                ["analyze", "interdisciplinarity"]):
        assert main(base + cmd) == 0, f"command failed: {cmd}"
    elapsed = time.monotonic() - t0
    return root, out, base, elapsed


def _kv(path: Path) -> dict:
    table = {}
    with open(path, "r", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            table[(row["test"], row["field"])] = row["value"]
    return table


def test_criterion_6_end_to_end_planted(planted_run):
    root, out, base, elapsed = planted_run
    top = _kv(out / "extreme_share_jif_top_tests.csv")
    bottom = _kv(out / "extreme_share_jif_bottom_tests.csv")
    or_top = float(top[("logistic_log_perplexity", "odds_ratio")])
    p_top = float(top[("logistic_log_perplexity", "p_value")])
    or_bot = float(bottom[("logistic_log_perplexity", "odds_ratio")])
    p_bot = float(bottom[("logistic_log_perplexity", "p_value")])
    assert or_top > 1.0 and p_top < 0.01
    assert or_bot > 1.0 and p_bot < 0.01
    disp = _kv(out / "disparity_tests.csv")
    disp_t = float(disp[("welch_disparity_top_vs_bottom", "statistic")])
    disp_p = float(disp[("welch_disparity_top_vs_bottom", "p_value")])
    assert disp_t > 0 and disp_p < 0.05
    inter = _kv(out / "interdisciplinarity_tests.csv")
    irr = float(inter[("negbin_references", "irr")])
    irr_p = float(inter[("negbin_references", "p_value")])
    assert irr > 1.0 and irr_p < 0.01
    assert elapsed < 120.0
    report(f"6: PASS - OR_top={or_top:.2f} (p={p_top:.1e}), "
           f"OR_bottom={or_bot:.2f} (p={p_bot:.1e}), disparity t={disp_t:.1f} "
           f"(p={disp_p:.1e}), IRR={irr:.3f} (p={irr_p:.1e}), "
           f"pipeline {elapsed:.0f}s")


# ---------------------------------------------------------------- 7

SYMMETRIC_TRAIN = [
    "the cat sat on the mat",
    "the dog sat on the mat",
    "a cat ran over the hill",
    "a dog ran over the hill",
    "people love the cat very much",
    "people love the dog very much",
    "the mat lay near the hill",
    "a hill rose over the mat",
]

TOY_DOCS = {
    "d1": "the cat sat on the mat",
    "d2": "a cat ran over the hill",
    "d3": "people love the cat very much",
    "d4": "the mat lay near the hill",
    "d5": "a dog ran over the mat",
}


def test_criterion_7_stability_symmetry_and_curve():
    model = train_ngram(SYMMETRIC_TRAIN, order=3)
    # statistics-identical twins: swapping changes perplexity by < 1e-12
    worst = 0.0
    for text in TOY_DOCS.values():
        toks = word_punct_tokens(text)
        swapped = [{"cat": "dog", "dog": "cat"}.get(t, t) for t in toks]
        p1 = perplexity(model.sequence_logprobs(toks))
        p2 = perplexity(model.sequence_logprobs(swapped))
        worst = max(worst, abs(p1 - p2))
        assert abs(p1 - p2) < 1e-12

    lexicon = load_synonym_lexicon(["cat\tdog", "mat\thill"])
    seqs = {d: word_punct_tokens(t) for d, t in TOY_DOCS.items()}
    curve = synonym_stability(model, seqs, lexicon, max_k=3, reps=4, seed=2,
                              record_mutations=True)
    # brute-force recomputation of the whole curve from recorded mutations
    base = {d: perplexity(model.sequence_logprobs(list(s)))
            for d, s in seqs.items()}
    by_k = {}
    for doc_id, rep, k, mutated in curve.mutations:
        lps = []
        history = ["<s>"] * (model.order - 1)
        for t in mutated:
            lps.append(model.logprob(t, history))
            history.append(t)
        ppl = math.exp(-math.fsum(lps) / len(lps))
        by_k.setdefault(k, []).append(abs(ppl - base[doc_id]))
    for k, mean in zip(curve.ks, curve.mean_abs_delta):
        oracle = float(np.mean(by_k[k]))
        assert mean == oracle  # exact: same addends, same summation
    quad = curve.quad_coefficients[2]
    assert math.isfinite(quad)
    sign = "negative" if quad < 0 else ("positive" if quad > 0 else "zero")
    report(f"7: PASS - twin |dPPL| < 1e-12 (worst {worst:.1e}), curve equals "
           f"brute force; quadratic coefficient {quad:.3e} ({sign})")


# ---------------------------------------------------------------- 8

def test_criterion_8_byte_identical_reruns(planted_run):
    root, out, base, _ = planted_run
    targets = ["scores.csv", "extreme_share_jif_top.csv",
               "extreme_share_jif_top_tests.csv", "disparity_bins.csv",
               "disparity_tests.csv", "interdisciplinarity_bins.csv",
               "interdisciplinarity_tests.csv"]
    before = {t: (out / t).read_bytes() for t in targets}
    for cmd in (["score"], ["analyze", "extreme-share", "--flag", "jif-top"],
                ["analyze", "disparity"], ["analyze", "interdisciplinarity"]):
        assert main(base + cmd) == 0
    for t in targets:
        assert (out / t).read_bytes() == before[t], f"{t} changed on rerun"
    report(f"8: PASS - {len(targets)} CSVs byte-identical across reruns")
