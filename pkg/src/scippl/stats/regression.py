"""Regression fitting: OLS, logistic (IRLS), and NB2 negative binomial.

The logistic and negative-binomial models report exponentiated
coefficients (odds ratios / incidence rate ratios), Wald 95% intervals,
and McFadden's pseudo R-squared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .distributions import normal_ppf, normal_sf, t_ppf, t_two_sided
from .special import log_gamma

_MAX_IRLS = 100
_COEF_TOL = 1e-8
_SEPARATION_BOUND = 5e2


class RankDeficientError(ValueError):
    """Design matrix is not full column rank."""


class SeparationError(RuntimeError):
    """Logistic outcome is perfectly or quasi-perfectly separated."""


class ConvergenceError(RuntimeError):
    """Iterative fit did not converge within its iteration budget."""


@dataclass
class RegressionFit:
    """Fitted model summary.

    exponentiated is exp(coefficients) for log-link models (OR / IRR)
    and None for linear models.  fit_stat is R^2 for OLS and McFadden's
    pseudo R^2 otherwise.
    """

    coefficients: np.ndarray
    standard_errors: np.ndarray
    ci_95: list
    exponentiated: Optional[np.ndarray]
    fit_stat: float
    n: int
    converged: bool
    p_values: np.ndarray = None
    extra: dict = field(default_factory=dict)


def _validate_design(design: np.ndarray, n_required: int) -> np.ndarray:
    x = np.asarray(design, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] != n_required:
        raise ValueError("design row count does not match outcome length")
    if not np.all(np.isfinite(x)):
        raise ValueError("design contains non-finite values")
    return x


def _dependent_columns(x: np.ndarray) -> list:
    """Indices of columns linearly dependent on the columns before them."""
    dependent = []
    rank = 0
    for j in range(x.shape[1]):
        r = np.linalg.matrix_rank(x[:, :j + 1])
        if r == rank:
            dependent.append(j)
        rank = r
    return dependent


def fit_linear(y, design) -> RegressionFit:
    """Ordinary least squares with classical standard errors.

    R^2 is centered when the design contains a constant column,
    uncentered otherwise.  Quadratic regression is this fit with an
    appended squared feature.
    """
    y = np.asarray(y, dtype=float)
    x = _validate_design(design, y.size)
    n, p = x.shape
    if n <= p:
        raise ValueError("fit_linear requires n > number of columns")
    if np.linalg.matrix_rank(x) < p:
        bad = _dependent_columns(x)
        raise RankDeficientError(f"design is rank deficient; dependent columns: {bad}")
    beta, _, _, _ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ beta
    rss = float(resid @ resid)
    sigma2 = rss / (n - p)
    xtx_inv = np.linalg.inv(x.T @ x)
    se = np.sqrt(np.maximum(np.diag(xtx_inv) * sigma2, 0.0))
    has_const = any(np.ptp(x[:, j]) == 0.0 and x[0, j] != 0.0 for j in range(p))
    tss = float(((y - y.mean()) ** 2).sum()) if has_const else float(y @ y)
    r2 = 1.0 - rss / tss if tss > 0.0 else 0.0
    tcrit = t_ppf(0.975, n - p)
    ci = [(b - tcrit * s, b + tcrit * s) for b, s in zip(beta, se)]
    tvals = np.empty(p)
    pvals = np.empty(p)
    for j in range(p):
        if se[j] > 0.0:
            tvals[j] = beta[j] / se[j]
            pvals[j] = t_two_sided(tvals[j], n - p)
        elif abs(beta[j]) < 1e-12:
            # exact fit of a zero effect: no evidence either way
            tvals[j], pvals[j] = 0.0, 1.0
        else:
            tvals[j], pvals[j] = math.inf * math.copysign(1.0, beta[j]), 0.0
    return RegressionFit(coefficients=beta, standard_errors=se, ci_95=ci,
                         exponentiated=None, fit_stat=r2, n=n, converged=True,
                         p_values=pvals,
                         extra={"t_values": tvals, "rss": rss, "sigma2": sigma2,
                                "df_resid": n - p})


def _logistic_ll(y: np.ndarray, eta: np.ndarray) -> float:
    # log-likelihood via log1p for stability: sum y*eta - log(1 + exp(eta))
    return float((y * eta - np.logaddexp(0.0, eta)).sum())


def fit_logistic(y, design) -> RegressionFit:
    """Maximum-likelihood logistic regression via IRLS.

    Requires both outcome classes present.  Raises SeparationError when
    coefficients diverge (complete or quasi-complete separation).
    """
    y = np.asarray(y, dtype=float)
    if not np.all((y == 0.0) | (y == 1.0)):
        raise ValueError("outcomes must be binary 0/1")
    if y.min() == y.max():
        raise ValueError("single-class outcome")
    x = _validate_design(design, y.size)
    n, p = x.shape
    if np.linalg.matrix_rank(x) < p:
        raise RankDeficientError(f"design is rank deficient; dependent columns: {_dependent_columns(x)}")
    beta = np.zeros(p)
    converged = False
    for _ in range(_MAX_IRLS):
        eta = x @ beta
        mu = 1.0 / (1.0 + np.exp(-eta))
        w = mu * (1.0 - mu)
        w = np.maximum(w, 1e-12)
        xtwx = x.T @ (x * w[:, None])
        try:
            delta = np.linalg.solve(xtwx, x.T @ (y - mu))
        except np.linalg.LinAlgError as exc:
            raise SeparationError("information matrix singular (separation)") from exc
        beta = beta + delta
        if np.max(np.abs(beta)) > _SEPARATION_BOUND:
            raise SeparationError("coefficients diverging (separation)")
        if np.max(np.abs(delta)) < _COEF_TOL:
            converged = True
            break
    eta = x @ beta
    mu = 1.0 / (1.0 + np.exp(-eta))
    if np.all((mu < 1e-8) | (mu > 1.0 - 1e-8)):
        # every fitted probability at the boundary: the MLE is unbounded
        raise SeparationError("fitted probabilities saturated (separation)")
    w = np.maximum(mu * (1.0 - mu), 1e-12)
    cov = np.linalg.inv(x.T @ (x * w[:, None]))
    se = np.sqrt(np.diag(cov))
    zcrit = normal_ppf(0.975)
    ci = [(b - zcrit * s, b + zcrit * s) for b, s in zip(beta, se)]
    ll = _logistic_ll(y, eta)
    pbar = y.mean()
    ll0 = n * (pbar * math.log(pbar) + (1.0 - pbar) * math.log(1.0 - pbar))
    mcfadden = 1.0 - ll / ll0 if ll0 != 0.0 else 0.0
    zvals = beta / se
    pvals = np.array([min(1.0, 2.0 * normal_sf(abs(z))) for z in zvals])
    return RegressionFit(coefficients=beta, standard_errors=se, ci_95=ci,
                         exponentiated=np.exp(beta), fit_stat=mcfadden, n=n,
                         converged=converged, p_values=pvals,
                         extra={"z_values": zvals, "log_likelihood": ll,
                                "null_log_likelihood": ll0})


def _nb2_ll(y: np.ndarray, mu: np.ndarray, alpha: float) -> float:
    """NB2 log-likelihood; reduces to Poisson as alpha -> 0."""
    if alpha < 1e-8:
        return float((y * np.log(mu) - mu - np.array([log_gamma(v + 1.0) for v in y])).sum())
    inv_a = 1.0 / alpha
    term = np.array([log_gamma(v + inv_a) - log_gamma(v + 1.0) for v in y]) - log_gamma(inv_a)
    term = term + y * np.log(alpha * mu) - (y + inv_a) * np.log1p(alpha * mu)
    return float(term.sum())


def _nb_beta_step(y, x, offset, alpha, beta, max_iter=_MAX_IRLS):
    """Fisher scoring for beta at fixed dispersion."""
    converged = False
    for _ in range(max_iter):
        eta = x @ beta + offset
        eta = np.clip(eta, -300.0, 300.0)
        mu = np.exp(eta)
        w = mu / (1.0 + alpha * mu)
        xtwx = x.T @ (x * w[:, None])
        score = x.T @ ((y - mu) / (1.0 + alpha * mu))
        try:
            delta = np.linalg.solve(xtwx, score)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("singular weighted design in NB fit") from exc
        beta = beta + delta
        if np.max(np.abs(delta)) < _COEF_TOL:
            converged = True
            break
    return beta, converged


def fit_negbin(y, design, offset=None, _pseudo_r2: bool = True) -> RegressionFit:
    """NB2 negative binomial regression with a log link and offset.

    beta is fitted by iteratively reweighted least squares alternating
    with a method-of-moments update of the dispersion alpha;
    exponentiated coefficients are incidence rate ratios.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y < 0) or not np.all(np.isfinite(y)):
        raise ValueError("counts must be nonnegative and finite")
    if y.sum() == 0:
        raise ValueError("all counts are zero")
    x = _validate_design(design, y.size)
    n, p = x.shape
    if offset is None:
        offset = np.zeros(n)
    offset = np.asarray(offset, dtype=float)
    if offset.size != n or not np.all(np.isfinite(offset)):
        raise ValueError("offset must be finite and match outcome length")
    if np.linalg.matrix_rank(x) < p:
        raise RankDeficientError(f"design is rank deficient; dependent columns: {_dependent_columns(x)}")

    # Poisson start for beta, moments start for alpha
    beta = np.zeros(p)
    beta, _ = _nb_beta_step(y, x, offset, 0.0, beta)
    alpha = 0.0
    converged = False
    for _ in range(200):
        eta = np.clip(x @ beta + offset, -300.0, 300.0)
        mu = np.exp(eta)
        alpha_new = float(((y - mu) ** 2 - mu).sum() / (mu ** 2).sum())
        alpha_new = max(alpha_new, 0.0)
        beta_new, inner_ok = _nb_beta_step(y, x, offset, alpha_new, beta)
        moved = max(abs(alpha_new - alpha), float(np.max(np.abs(beta_new - beta))))
        beta, alpha = beta_new, alpha_new
        if moved < _COEF_TOL and inner_ok:
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"NB fit did not converge in 200 outer iterations (alpha={alpha:.4g}, "
            f"max|beta|={np.max(np.abs(beta)):.4g})")

    eta = np.clip(x @ beta + offset, -300.0, 300.0)
    mu = np.exp(eta)
    w = mu / (1.0 + alpha * mu)
    cov = np.linalg.inv(x.T @ (x * w[:, None]))
    se = np.sqrt(np.diag(cov))
    zcrit = normal_ppf(0.975)
    ci = [(b - zcrit * s, b + zcrit * s) for b, s in zip(beta, se)]
    zvals = beta / se
    pvals = np.array([min(1.0, 2.0 * normal_sf(abs(z))) for z in zvals])
    ll = _nb2_ll(y, mu, alpha)
    mcfadden = float("nan")
    if _pseudo_r2:
        try:
            null_fit = fit_negbin(y, np.ones((n, 1)), offset, _pseudo_r2=False)
            ll0 = null_fit.extra["log_likelihood"]
            mcfadden = 1.0 - ll / ll0 if ll0 != 0.0 else 0.0
        except (ConvergenceError, ValueError):
            pass
    return RegressionFit(coefficients=beta, standard_errors=se, ci_95=ci,
                         exponentiated=np.exp(beta), fit_stat=mcfadden, n=n,
                         converged=converged, p_values=pvals,
                         extra={"alpha": alpha, "z_values": zvals,
                                "log_likelihood": ll})
