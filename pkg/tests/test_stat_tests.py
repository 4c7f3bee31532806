"""Hypothesis-test engine checks.

Independent oracles: brute-force enumeration for the exact Mann-Whitney
p, hand arithmetic for the chi-squared example, rank-then-Pearson for
Spearman, and scipy/statsmodels as external references where a second
implementation is the right oracle.
"""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from scippl.stats import (
    DegenerateSampleError,
    contingency_test,
    correlation,
    skewness_z,
    two_sample_test,
    welch_t_summary,
    white_test,
)

rng = np.random.default_rng(20240817)


# ---------------------------------------------------------------- Welch

def test_welch_summary_survey_row():
    # surprising 13.20 +/- 3.95 (n=33) vs unsurprising 9.63 +/- 3.72 (n=20)
    res = welch_t_summary(13.20, 3.95, 33, 9.63, 3.72, 20)
    assert res.statistic == pytest.approx(3.31, abs=0.01)
    assert res.effect_size == pytest.approx(0.92, abs=0.01)
    assert res.p_value < 0.01


def test_welch_summary_breakthrough_row():
    res = welch_t_summary(18.70, 6.20, 33, 13.62, 7.48, 1784177)
    assert res.statistic == pytest.approx(4.70, abs=0.01)
    # tiny group dominates the df
    assert res.df == pytest.approx(32, abs=0.5)


def test_welch_equal_means_is_zero():
    res = welch_t_summary(5.0, 1.0, 10, 5.0, 2.0, 12)
    assert res.statistic == 0.0
    assert res.p_value == pytest.approx(1.0)


def test_welch_summary_matches_raw_data_with_same_moments():
    # moment-matched oracle: build samples with exactly the summary moments
    for _ in range(5):
        n1, n2 = rng.integers(5, 40, size=2)
        a = rng.normal(size=n1)
        b = rng.normal(size=n2)
        a = (a - a.mean()) / a.std(ddof=1)
        b = (b - b.mean()) / b.std(ddof=1)
        m1, s1, m2, s2 = 3.0, 1.5, 2.2, 0.7
        raw = two_sample_test("welch_t", m1 + s1 * a, m2 + s2 * b)
        summ = welch_t_summary(m1, s1, n1, m2, s2, n2)
        assert raw.statistic == pytest.approx(summ.statistic, rel=1e-9)
        assert raw.p_value == pytest.approx(summ.p_value, rel=1e-9)


def test_welch_against_scipy():
    a = rng.normal(0.3, 1.2, size=23)
    b = rng.normal(0.0, 0.8, size=31)
    res = two_sample_test("welch_t", a, b)
    ref = sps.ttest_ind(a, b, equal_var=False)
    assert res.statistic == pytest.approx(ref.statistic, rel=1e-10)
    assert res.p_value == pytest.approx(ref.pvalue, rel=1e-9)


def test_welch_identical_samples():
    a = [1.0, 2.0, 3.0, 4.0]
    res = two_sample_test("welch_t", a, a)
    assert res.statistic == 0.0
    assert res.p_value == pytest.approx(1.0)


def test_welch_label_swap_antisymmetry():
    a = rng.normal(1.0, 1.0, 15)
    b = rng.normal(0.0, 2.0, 9)
    r1 = two_sample_test("welch_t", a, b)
    r2 = two_sample_test("welch_t", b, a)
    assert r1.statistic == pytest.approx(-r2.statistic, rel=1e-12)
    assert r1.p_value == pytest.approx(r2.p_value, rel=1e-12)


def test_welch_degenerate_errors():
    with pytest.raises(DegenerateSampleError):
        two_sample_test("welch_t", [1.0, 1.0, 1.0], [2.0, 2.0])
    with pytest.raises(ValueError):
        welch_t_summary(1.0, 0.0, 10, 2.0, 1.0, 10)
    with pytest.raises(ValueError):
        two_sample_test("welch_t", [], [1.0, 2.0])


# ---------------------------------------------------------- Mann-Whitney

def brute_force_mw_p(a, b):
    """Two-sided exact p by enumerating every group assignment."""
    pooled = np.concatenate([a, b])
    n1 = len(a)
    mu = n1 * len(b) / 2.0
    ranks = sps.rankdata(pooled)

    def u_of(idx):
        r1 = ranks[list(idx)].sum()
        return r1 - n1 * (n1 + 1) / 2.0

    obs = abs(u_of(range(n1)) - mu)
    hits = 0
    total = 0
    for combo in itertools.combinations(range(len(pooled)), n1):
        total += 1
        if abs(u_of(combo) - mu) >= obs - 1e-9:
            hits += 1
    return hits / total


def test_mw_exact_matches_enumeration_8_8():
    a = [1.2, 0.3, 2.5, 3.1, -0.4, 1.9, 0.05, 2.2]
    b = [0.9, -1.1, 0.6, 1.4, -0.2, 0.1, 1.0, -0.8]
    res = two_sample_test("mann_whitney_u", a, b)
    assert res.extra["method"] == "exact"
    assert res.p_value == pytest.approx(brute_force_mw_p(a, b), abs=1e-12)


def test_mw_extreme_ranks():
    a = [10.0, 11.0, 12.0]
    b = [1.0, 2.0, 3.0, 4.0]
    res = two_sample_test("mann_whitney_u", a, b)
    assert res.statistic == len(a) * len(b)


def test_mw_complement_identity():
    a = rng.normal(size=9)
    b = rng.normal(size=7)
    r1 = two_sample_test("mann_whitney_u", a, b)
    r2 = two_sample_test("mann_whitney_u", b, a)
    assert r1.statistic + r2.statistic == pytest.approx(len(a) * len(b))
    # two-sided p is invariant under group-label swap
    assert r1.p_value == pytest.approx(r2.p_value, rel=1e-12)


def test_mw_normal_approx_reasonable():
    a = rng.normal(0.5, 1.0, 60)
    b = rng.normal(0.0, 1.0, 55)
    res = two_sample_test("mann_whitney_u", a, b)
    ref = sps.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic")
    assert res.extra["method"] == "normal"
    assert res.statistic == pytest.approx(ref.statistic)
    assert res.p_value == pytest.approx(ref.pvalue, rel=1e-6)


def test_mw_tie_correction_against_scipy():
    a = np.repeat([1.0, 2.0, 3.0], 25)
    b = np.repeat([2.0, 3.0, 4.0], 20)
    res = two_sample_test("mann_whitney_u", a, b)
    ref = sps.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic")
    assert res.statistic == pytest.approx(ref.statistic)
    assert res.p_value == pytest.approx(ref.pvalue, rel=1e-6)


# ------------------------------------------------- Levene and Fligner

def test_levene_against_scipy():
    a = rng.normal(0, 1.0, 40)
    b = rng.normal(0, 2.5, 35)
    res = two_sample_test("levene", a, b)
    ref = sps.levene(a, b, center="mean")
    assert res.statistic == pytest.approx(ref.statistic, rel=1e-10)
    assert res.p_value == pytest.approx(ref.pvalue, rel=1e-8)


def test_fligner_against_scipy():
    a = rng.normal(0, 1.0, 40)
    b = rng.normal(0, 3.0, 30)
    res = two_sample_test("fligner_killeen", a, b)
    ref = sps.fligner(a, b)
    assert res.statistic == pytest.approx(ref.statistic, rel=1e-7)
    assert res.p_value == pytest.approx(ref.pvalue, rel=1e-6)


# -------------------------------------------------------- chi-squared

def test_chi2_identity_table():
    # table equal to its expected-under-independence values
    table = np.outer([30, 70], [40, 60]) / 100.0
    res = contingency_test(table)
    assert res.statistic == pytest.approx(0.0, abs=1e-12)
    assert res.p_value == pytest.approx(1.0)


def test_chi2_hand_computed_diagonal():
    # E = 5 in every cell; chi2 = 4 * (5^2 / 5) = 20, df = 1
    res = contingency_test([[10, 0], [0, 10]])
    assert res.statistic == pytest.approx(20.0)
    assert res.df == 1
    sign = np.sign(res.extra["residuals"])
    assert (sign == np.array([[1, -1], [-1, 1]])).all()


def test_chi2_residual_sign_structure_any_2x2():
    res = contingency_test([[20, 5], [10, 30]])
    s = np.sign(res.extra["residuals"])
    assert s[0, 0] == -s[0, 1] == -s[1, 0] == s[1, 1]


def test_chi2_transpose_invariance():
    t = [[12, 7, 5], [3, 14, 9]]
    r1 = contingency_test(t)
    r2 = contingency_test(np.transpose(t))
    assert r1.statistic == pytest.approx(r2.statistic, rel=1e-12)
    assert r1.df == r2.df


def test_chi2_adjusted_residuals_match_statsmodels_convention():
    sm = pytest.importorskip("statsmodels.stats.contingency_tables")
    table = np.array([[25.0, 15.0], [5.0, 35.0]])
    res = contingency_test(table)
    ref = sm.Table(table).standardized_resids
    assert np.allclose(res.extra["residuals"], np.asarray(ref), rtol=1e-10)


def test_chi2_zero_marginal_error():
    with pytest.raises(DegenerateSampleError):
        contingency_test([[0, 0], [5, 5]])


# -------------------------------------------------------- correlation

def test_correlation_perfect_line():
    x = np.arange(10.0)
    y = 2 * x + 1
    assert correlation("pearson", x, y).statistic == pytest.approx(1.0)
    assert correlation("spearman", x, y).statistic == pytest.approx(1.0)


def test_spearman_monotone_invariance():
    x = rng.normal(size=25)
    y = rng.normal(size=25)
    r1 = correlation("spearman", x, y).statistic
    r2 = correlation("spearman", np.exp(x), y).statistic
    assert r1 == pytest.approx(r2, abs=1e-12)


def test_spearman_rank_then_pearson_oracle():
    x = rng.normal(size=20)
    y = rng.normal(size=20)
    got = correlation("spearman", x, y).statistic
    oracle = np.corrcoef(sps.rankdata(x), sps.rankdata(y))[0, 1]
    assert got == pytest.approx(oracle, rel=1e-12)


def test_pearson_ci_and_p_against_scipy():
    x = rng.normal(size=40)
    y = x * 0.6 + rng.normal(size=40)
    res = correlation("pearson", x, y)
    ref = sps.pearsonr(x, y)
    assert res.statistic == pytest.approx(ref.statistic, rel=1e-12)
    assert res.p_value == pytest.approx(ref.pvalue, rel=1e-8)
    lo, hi = ref.confidence_interval()
    assert res.ci[0] == pytest.approx(lo, abs=1e-9)
    assert res.ci[1] == pytest.approx(hi, abs=1e-9)


def test_correlation_constant_errors():
    with pytest.raises(DegenerateSampleError):
        correlation("pearson", [1.0, 1.0, 1.0], [1.0, 2.0, 3.0])


# ----------------------------------------------------------- skewness

def test_skewness_symmetric_sample_is_zero():
    x = np.array([-3, -2, -1, 0, 0, 1, 2, 3], dtype=float)
    res = skewness_z(x)
    assert res.effect_size == pytest.approx(0.0, abs=1e-14)
    assert res.statistic == pytest.approx(0.0, abs=1e-12)
    assert res.p_value == pytest.approx(1.0)


def test_skewness_sign_positive():
    res = skewness_z([1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 10.0])
    assert res.effect_size > 0


def test_skewness_exponential_monte_carlo():
    # standard exponential has skewness 2
    x = np.random.default_rng(7).exponential(size=10_000)
    res = skewness_z(x)
    assert res.effect_size == pytest.approx(2.0, abs=0.1)
    assert res.p_value < 1e-10


def test_skewness_matches_scipy_skewtest():
    x = rng.gamma(2.0, size=60)
    res = skewness_z(x)
    ref = sps.skewtest(x)
    assert res.statistic == pytest.approx(ref.statistic, rel=1e-10)
    assert res.p_value == pytest.approx(ref.pvalue, rel=1e-8)


# -------------------------------------------------------- White's test

def test_white_constant_residual_magnitude():
    # the +,-,-,+ block pattern is orthogonal to (1, x) on consecutive x,
    # so the OLS residuals are exactly the pattern: |resid| is constant
    x = np.arange(20.0)
    y = 1.5 * x + np.tile([1.0, -1.0, -1.0, 1.0], 5)
    res = white_test(y, x)
    assert res.statistic == pytest.approx(0.0, abs=1e-8)
    assert res.df == 2


def test_white_detects_multiplicative_noise():
    g = np.random.default_rng(3)
    x = g.normal(size=5000)
    y = x * g.normal(size=5000)
    res = white_test(y, x)
    assert res.p_value < 0.01


def test_white_matches_statsmodels():
    smd = pytest.importorskip("statsmodels.stats.diagnostic")
    g = np.random.default_rng(11)
    x = g.uniform(0, 3, 300)
    y = 1.0 + 2.0 * x + g.normal(size=300) * (0.5 + 0.5 * x)
    res = white_test(y, x)
    exog = np.column_stack([np.ones_like(x), x])
    resid = y - exog @ np.linalg.lstsq(exog, y, rcond=None)[0]
    stat, p, _, _ = smd.het_white(resid, exog)
    assert res.statistic == pytest.approx(stat, rel=1e-8)
    assert res.p_value == pytest.approx(p, rel=1e-6)


def test_white_constant_x_errors():
    with pytest.raises(DegenerateSampleError):
        white_test(rng.normal(size=20), np.ones(20))


# ----------------------------------------------------- property checks

@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=2, max_size=12),
       st.lists(st.floats(-50, 50), min_size=2, max_size=12))
def test_mw_complement_property(a, b):
    a = [round(v, 3) for v in a]
    b = [round(v, 3) for v in b]
    try:
        u1 = two_sample_test("mann_whitney_u", a, b).statistic
        u2 = two_sample_test("mann_whitney_u", b, a).statistic
    except DegenerateSampleError:
        return
    assert u1 + u2 == pytest.approx(len(a) * len(b), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=20).filter(
    lambda v: len(set(v)) > 1))
def test_welch_swap_property(vals):
    a = np.array(vals)
    b = a * 0.5 + 1.0
    try:
        r1 = two_sample_test("welch_t", a, b)
        r2 = two_sample_test("welch_t", b, a)
    except (DegenerateSampleError, ValueError):
        return
    assert r1.statistic == pytest.approx(-r2.statistic, rel=1e-9, abs=1e-12)
    assert r1.p_value == pytest.approx(r2.p_value, rel=1e-9)
