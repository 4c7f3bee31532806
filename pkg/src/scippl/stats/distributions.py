"""Distribution tail areas and quantiles built on the special functions."""

from __future__ import annotations

import math

from .special import beta_inc, erfc, gamma_q, log_gamma, normal_ppf

__all__ = [
    "normal_cdf",
    "normal_sf",
    "normal_ppf",
    "t_sf",
    "t_cdf",
    "t_two_sided",
    "t_ppf",
    "chi2_sf",
    "f_sf",
]

_SQRT2 = math.sqrt(2.0)


def normal_cdf(z: float) -> float:
    return 0.5 * erfc(-z / _SQRT2)


def normal_sf(z: float) -> float:
    return 0.5 * erfc(z / _SQRT2)


def t_sf(t: float, df: float) -> float:
    """P(T > t) for Student's t with df degrees of freedom."""
    if df <= 0.0:
        raise ValueError("t_sf requires df > 0")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    if t == 0.0:
        return 0.5
    tail = 0.5 * beta_inc(df / 2.0, 0.5, df / (df + t * t))
    return tail if t > 0.0 else 1.0 - tail


def t_cdf(t: float, df: float) -> float:
    return 1.0 - t_sf(t, df)


def t_two_sided(t: float, df: float) -> float:
    """Two-sided p-value for an observed t statistic."""
    if math.isnan(t):
        raise ValueError("t statistic is NaN")
    return min(1.0, 2.0 * t_sf(abs(t), df))


def _t_pdf(x: float, df: float) -> float:
    ln = (
        log_gamma((df + 1.0) / 2.0)
        - log_gamma(df / 2.0)
        - 0.5 * math.log(df * math.pi)
        - ((df + 1.0) / 2.0) * math.log1p(x * x / df)
    )
    return math.exp(ln)


def t_ppf(p: float, df: float) -> float:
    """Inverse CDF of Student's t, Newton iteration with bisection safeguard."""
    if not 0.0 < p < 1.0:
        raise ValueError("t_ppf requires 0 < p < 1")
    if df <= 0.0:
        raise ValueError("t_ppf requires df > 0")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -t_ppf(1.0 - p, df)
    if df == 1.0:
        return math.tan(math.pi * (p - 0.5))
    x = normal_ppf(p)
    lo, hi = 0.0, max(1.0, x)
    while t_cdf(hi, df) < p:
        hi *= 2.0
        if hi > 1e100:
            break
    for _ in range(200):
        cdf = t_cdf(x, df)
        if cdf > p:
            hi = x
        else:
            lo = x
        pdf = _t_pdf(x, df)
        step = (cdf - p) / pdf if pdf > 0.0 else 0.0
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-14 * max(1.0, abs(x)):
            return x_new
        x = x_new
    return x


def chi2_sf(x: float, df: float) -> float:
    """P(X > x) for chi-squared with df degrees of freedom."""
    if df <= 0.0:
        raise ValueError("chi2_sf requires df > 0")
    if x <= 0.0:
        return 1.0
    return gamma_q(df / 2.0, x / 2.0)


def f_sf(x: float, df1: float, df2: float) -> float:
    """P(F > x) for the F distribution."""
    if df1 <= 0.0 or df2 <= 0.0:
        raise ValueError("f_sf requires positive degrees of freedom")
    if x <= 0.0:
        return 1.0
    return beta_inc(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * x))
