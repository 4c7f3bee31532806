"""LOWESS: locally weighted linear regression with tricube weights.

Single-pass variant (no robustness iterations): at each x the nearest
ceil(frac * n) points are fitted by weighted least squares and the
fitted value at x is returned.  Output is sorted by x.
"""

from __future__ import annotations

import math

import numpy as np


def lowess(x, y, frac: float) -> list:
    """Smooth y against x; returns [(x, yhat), ...] sorted by x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size:
        raise ValueError("x and y must have equal length")
    n = x.size
    if n < 5:
        raise ValueError("lowess requires n >= 5")
    if not 0.0 < frac <= 1.0:
        raise ValueError("frac must be in (0, 1]")
    window = int(math.ceil(frac * n))
    if frac * n < 2.0:
        raise ValueError("frac * n must be at least 2")
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    ys = y[order]
    yhat = np.empty(n)
    left = 0
    for i in range(n):
        # slide the window of `window` nearest neighbours along sorted x
        while left + window < n and xs[left + window] - xs[i] < xs[i] - xs[left]:
            left += 1
        right = left + window
        xw = xs[left:right]
        yw = ys[left:right]
        h = max(xs[i] - xw[0], xw[-1] - xs[i])
        if h <= 0.0:
            # all window points share x[i]; fall back to their mean
            yhat[i] = yw.mean()
            continue
        d = np.abs(xw - xs[i]) / h
        w = np.clip(1.0 - d ** 3, 0.0, 1.0) ** 3
        sw = w.sum()
        mx = (w * xw).sum() / sw
        my = (w * yw).sum() / sw
        sxx = (w * (xw - mx) ** 2).sum()
        if sxx <= 1e-12 * max(1.0, mx * mx):
            yhat[i] = my
            continue
        slope = (w * (xw - mx) * (yw - my)).sum() / sxx
        yhat[i] = my + slope * (xs[i] - mx)
    return list(zip(xs.tolist(), yhat.tolist()))
