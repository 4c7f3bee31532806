"""Hypothesis tests: Welch t, Mann-Whitney U, Levene, Fligner-Killeen,
Pearson chi-squared with adjusted residuals, correlations, skewness,
and White's heteroskedasticity test.

All p-values are two-sided by default.  Each test is a pure function of
its sample arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .distributions import (
    chi2_sf,
    f_sf,
    normal_ppf,
    normal_sf,
    t_ppf,
    t_two_sided,
)


class DegenerateSampleError(ValueError):
    """Raised when a sample has no variation where variation is required."""


@dataclass
class TestResult:
    """Outcome of a hypothesis test.

    statistic: the headline test statistic (t, U, W, chi2, z, r, ...)
    df:        degrees of freedom, scalar or tuple, when defined
    p_value:   two-sided unless documented otherwise
    effect_size: Cohen's d, rank-biserial, skewness, ... when defined
    ci:        95% interval for the estimand when defined
    extra:     named auxiliary outputs (residual matrices, group stats, ...)
    """

    statistic: float
    p_value: float
    df: Optional[object] = None
    effect_size: Optional[float] = None
    ci: Optional[tuple] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (0.0 <= self.p_value <= 1.0 or math.isnan(self.p_value)):
            raise ValueError(f"p-value out of range: {self.p_value}")


def _as_array(x, name: str) -> np.ndarray:
    arr = np.asarray(list(x) if not isinstance(x, np.ndarray) else x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def welch_t_summary(m1: float, s1: float, n1: int,
                    m2: float, s2: float, n2: int) -> TestResult:
    """Welch's t-test from summary statistics (means, SDs, sizes).

    Returns the Welch statistic with Welch-Satterthwaite degrees of
    freedom and pooled-SD Cohen's d as the effect size.
    """
    if s1 <= 0.0 or s2 <= 0.0:
        raise DegenerateSampleError("summary SDs must be positive")
    if n1 < 2 or n2 < 2:
        raise ValueError("welch_t_summary requires n >= 2 per group")
    v1 = s1 * s1 / n1
    v2 = s2 * s2 / n2
    denom = v1 * v1 / (n1 - 1) + v2 * v2 / (n2 - 1)
    if v1 + v2 == 0.0 or denom == 0.0:
        raise DegenerateSampleError("group variances underflow to zero")
    se = math.sqrt(v1 + v2)
    t = (m1 - m2) / se
    df = (v1 + v2) ** 2 / denom
    pooled_sd = math.sqrt(((n1 - 1) * s1 * s1 + (n2 - 1) * s2 * s2) / (n1 + n2 - 2))
    d = (m1 - m2) / pooled_sd
    diff = m1 - m2
    half = t_ppf(0.975, df) * se
    return TestResult(statistic=t, p_value=t_two_sided(t, df), df=df,
                      effect_size=d, ci=(diff - half, diff + half))


def _welch_t(a: np.ndarray, b: np.ndarray) -> TestResult:
    if a.size < 2 or b.size < 2:
        raise ValueError("welch_t requires n >= 2 per group")
    s1 = a.std(ddof=1)
    s2 = b.std(ddof=1)
    if s1 == 0.0 and s2 == 0.0:
        raise DegenerateSampleError("both groups have zero variance")
    if s1 == 0.0 or s2 == 0.0:
        # one-sided degeneracy still yields a finite Welch statistic
        s1 = max(s1, 1e-300)
        s2 = max(s2, 1e-300)
    return welch_t_summary(float(a.mean()), float(s1), a.size,
                           float(b.mean()), float(s2), b.size)


def _rank_data(values: np.ndarray) -> np.ndarray:
    """Average ranks, 1-based, ties shared."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(values.size, dtype=float)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        ranks[order[i:j + 1]] = avg
        i = j + 1
    return ranks


def _mw_counts(n1: int, n2: int) -> np.ndarray:
    """Null distribution of U via the standard recurrence.

    c(i, j, u): arrangements of i x's and j y's with U = u, where
    c(i, j, u) = c(i-1, j, u-j) + c(i, j-1, u).
    """
    max_u = n1 * n2
    # grid[i][j] is a vector over u of length i*j+1
    grid = [[None] * (n2 + 1) for _ in range(n1 + 1)]
    for j in range(n2 + 1):
        grid[0][j] = np.array([1.0])
    for i in range(1, n1 + 1):
        grid[i][0] = np.array([1.0])
        for j in range(1, n2 + 1):
            size = i * j + 1
            vec = np.zeros(size)
            a = grid[i - 1][j]  # length (i-1)*j + 1, shifted by j
            vec[j:j + a.size] += a
            b = grid[i][j - 1]  # length i*(j-1) + 1
            vec[:b.size] += b
            grid[i][j] = vec
            grid[i - 1][j] = None  # free
    counts = grid[n1][n2]
    assert counts.size == max_u + 1
    return counts


def _mann_whitney(a: np.ndarray, b: np.ndarray, exact_limit: int = 64) -> TestResult:
    n1, n2 = a.size, b.size
    pooled = np.concatenate([a, b])
    ranks = _rank_data(pooled)
    r1 = ranks[:n1].sum()
    u1 = r1 - n1 * (n1 + 1) / 2.0
    mu = n1 * n2 / 2.0
    has_ties = np.unique(pooled).size < pooled.size
    rank_biserial = 2.0 * u1 / (n1 * n2) - 1.0
    if n1 * n2 <= exact_limit and not has_ties:
        counts = _mw_counts(n1, n2)
        total = counts.sum()
        dev = abs(u1 - mu)
        us = np.arange(counts.size)
        p = counts[np.abs(us - mu) >= dev - 1e-9].sum() / total
        return TestResult(statistic=u1, p_value=min(1.0, p), df=None,
                          effect_size=rank_biserial,
                          extra={"method": "exact", "u2": n1 * n2 - u1})
    # normal approximation with tie correction
    n = n1 + n2
    _, tie_counts = np.unique(pooled, return_counts=True)
    tie_term = float(((tie_counts ** 3 - tie_counts).sum()))
    sigma2 = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if sigma2 <= 0.0:
        raise DegenerateSampleError("all pooled values identical")
    # continuity correction toward the mean
    z = (u1 - mu - 0.5 * np.sign(u1 - mu)) / math.sqrt(sigma2)
    p = min(1.0, 2.0 * normal_sf(abs(z)))
    return TestResult(statistic=u1, p_value=p, df=None,
                      effect_size=rank_biserial,
                      extra={"method": "normal", "z": z, "u2": n1 * n2 - u1})


def _levene(a: np.ndarray, b: np.ndarray) -> TestResult:
    return levene_k([a, b])


def levene_k(groups: Sequence[np.ndarray]) -> TestResult:
    """Levene's test (mean-centered absolute deviations) for k groups."""
    groups = [_as_array(g, f"group {i}") for i, g in enumerate(groups)]
    if any(g.size < 2 for g in groups):
        raise ValueError("levene requires n >= 2 per group")
    k = len(groups)
    z = [np.abs(g - g.mean()) for g in groups]
    n_total = sum(g.size for g in groups)
    zbar = sum(zi.sum() for zi in z) / n_total
    num = sum(zi.size * (zi.mean() - zbar) ** 2 for zi in z)
    den = sum(((zi - zi.mean()) ** 2).sum() for zi in z)
    if den == 0.0:
        # deviations identical everywhere: perfectly homogeneous spread
        return TestResult(statistic=0.0, p_value=1.0, df=(k - 1, n_total - k))
    w = (n_total - k) / (k - 1) * num / den
    return TestResult(statistic=w, p_value=f_sf(w, k - 1, n_total - k),
                      df=(k - 1, n_total - k))


def _fligner(a: np.ndarray, b: np.ndarray) -> TestResult:
    return fligner_k([a, b])


def fligner_k(groups: Sequence[np.ndarray]) -> TestResult:
    """Fligner-Killeen test on k groups (Conover's normal-scores form)."""
    groups = [_as_array(g, f"group {i}") for i, g in enumerate(groups)]
    if any(g.size < 2 for g in groups):
        raise ValueError("fligner requires n >= 2 per group")
    k = len(groups)
    devs = [np.abs(g - np.median(g)) for g in groups]
    pooled = np.concatenate(devs)
    n_total = pooled.size
    ranks = _rank_data(pooled)
    scores = np.array([normal_ppf(0.5 + r / (2.0 * (n_total + 1.0))) for r in ranks])
    abar = scores.mean()
    var = ((scores - abar) ** 2).sum() / (n_total - 1)
    if var == 0.0:
        return TestResult(statistic=0.0, p_value=1.0, df=k - 1)
    stat = 0.0
    start = 0
    for g in devs:
        seg = scores[start:start + g.size]
        stat += g.size * (seg.mean() - abar) ** 2
        start += g.size
    stat /= var
    return TestResult(statistic=stat, p_value=chi2_sf(stat, k - 1), df=k - 1)


_TWO_SAMPLE_KINDS = {
    "welch_t": _welch_t,
    "mann_whitney_u": _mann_whitney,
    "levene": _levene,
    "fligner_killeen": _fligner,
}


def two_sample_test(kind: str, a, b) -> TestResult:
    """Dispatch a two-sample test by name.

    kind is one of welch_t, mann_whitney_u, levene, fligner_killeen.
    """
    if kind not in _TWO_SAMPLE_KINDS:
        raise ValueError(f"unknown test kind {kind!r}; choose from {sorted(_TWO_SAMPLE_KINDS)}")
    a = _as_array(a, "a")
    b = _as_array(b, "b")
    min_n = 1 if kind == "mann_whitney_u" else 2
    if a.size < min_n or b.size < min_n:
        raise ValueError(f"{kind} requires at least {min_n} observations per sample")
    return _TWO_SAMPLE_KINDS[kind](a, b)


def contingency_test(table) -> TestResult:
    """Pearson chi-squared for an r x c count table.

    extra["residuals"] holds the adjusted (Haberman) standardized
    residuals (O - E) / sqrt(E (1 - row share)(1 - col share)).
    """
    obs = np.asarray(table, dtype=float)
    if obs.ndim != 2:
        raise ValueError("contingency table must be two-dimensional")
    if np.any(obs < 0):
        raise ValueError("counts must be nonnegative")
    total = obs.sum()
    if total <= 0:
        raise ValueError("table total must be positive")
    row = obs.sum(axis=1)
    col = obs.sum(axis=0)
    if np.any(row == 0) or np.any(col == 0):
        raise DegenerateSampleError("zero row or column marginal")
    expected = np.outer(row, col) / total
    stat = float(((obs - expected) ** 2 / expected).sum())
    r, c = obs.shape
    df = (r - 1) * (c - 1)
    denom = expected * np.outer(1.0 - row / total, 1.0 - col / total)
    residuals = (obs - expected) / np.sqrt(denom)
    p = chi2_sf(stat, df) if df > 0 else 1.0
    return TestResult(statistic=stat, p_value=p, df=df,
                      extra={"residuals": residuals, "expected": expected})


def correlation(kind: str, x, y) -> TestResult:
    """Pearson or Spearman correlation with a Fisher-z 95% CI.

    Spearman uses average ranks for ties.  The p-value is the usual
    t-approximation with n - 2 degrees of freedom.
    """
    if kind not in ("pearson", "spearman"):
        raise ValueError("kind must be 'pearson' or 'spearman'")
    x = _as_array(x, "x")
    y = _as_array(y, "y")
    if x.size != y.size:
        raise ValueError("x and y must have equal length")
    n = x.size
    if n < 3:
        raise ValueError("correlation requires n >= 3")
    if kind == "spearman":
        x = _rank_data(x)
        y = _rank_data(y)
    sx = x.std(ddof=1)
    sy = y.std(ddof=1)
    if sx == 0.0 or sy == 0.0:
        raise DegenerateSampleError("constant input")
    r = float(((x - x.mean()) * (y - y.mean())).sum() / ((n - 1) * sx * sy))
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        p = 0.0
        ci = (r, r)
    else:
        t = r * math.sqrt((n - 2) / (1.0 - r * r))
        p = t_two_sided(t, n - 2)
        z = math.atanh(r)
        half = normal_ppf(0.975) / math.sqrt(n - 3)
        ci = (math.tanh(z - half), math.tanh(z + half))
    return TestResult(statistic=r, p_value=p, df=n - 2, ci=ci)


def skewness_z(x) -> TestResult:
    """D'Agostino's skewness test.

    statistic is the normal-approximation z; effect_size carries the
    sample skewness g1 itself.
    """
    x = _as_array(x, "x")
    n = x.size
    if n < 8:
        raise ValueError("skewness_z requires n >= 8")
    m = x.mean()
    m2 = ((x - m) ** 2).mean()
    if m2 == 0.0:
        raise DegenerateSampleError("zero variance")
    m3 = ((x - m) ** 3).mean()
    g1 = float(m3 / m2 ** 1.5)
    y = g1 * math.sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)))
    beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) / \
        ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0))
    w2 = -1.0 + math.sqrt(2.0 * (beta2 - 1.0))
    delta = 1.0 / math.sqrt(0.5 * math.log(w2))
    alpha = math.sqrt(2.0 / (w2 - 1.0))
    if y == 0.0:
        z = 0.0
    else:
        z = delta * math.log(y / alpha + math.sqrt((y / alpha) ** 2 + 1.0))
    p = min(1.0, 2.0 * normal_sf(abs(z)))
    return TestResult(statistic=z, p_value=p, effect_size=g1,
                      extra={"skewness": g1, "n": n})


def white_test(y, x) -> TestResult:
    """White's heteroskedasticity test for a single regressor.

    Fits y on (1, x), then squared residuals on (1, x, x^2); the
    statistic is n * R^2 of the auxiliary fit with 2 degrees of freedom.
    """
    y = _as_array(y, "y")
    x = _as_array(x, "x")
    if y.size != x.size:
        raise ValueError("y and x must have equal length")
    n = y.size
    if n < 10:
        raise ValueError("white_test requires n >= 10")
    if np.ptp(x) == 0.0:
        raise DegenerateSampleError("constant regressor")
    design = np.column_stack([np.ones(n), x])
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ beta
    e2 = resid ** 2
    aux = np.column_stack([np.ones(n), x, x * x])
    beta2, *_ = np.linalg.lstsq(aux, e2, rcond=None)
    fitted = aux @ beta2
    sst = ((e2 - e2.mean()) ** 2).sum()
    # squared residuals that are zero or constant up to float jitter
    scale = float(np.abs(y).mean()) + 1.0
    if e2.mean() <= (1e-12 * scale) ** 2 or sst <= n * (e2.mean() ** 2) * 1e-20:
        return TestResult(statistic=0.0, p_value=1.0, df=2)
    ssr = ((e2 - fitted) ** 2).sum()
    r2 = 1.0 - ssr / sst
    stat = n * r2
    return TestResult(statistic=stat, p_value=chi2_sf(stat, 2), df=2,
                      extra={"aux_r2": r2})
