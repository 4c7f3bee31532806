"""Percentile bootstrap confidence intervals, deterministic under a seed."""

from __future__ import annotations

from typing import Callable, Union

import numpy as np

_STATISTICS = {
    "mean": np.mean,
    "median": np.median,
    "std": lambda v: np.std(v, ddof=1) if len(v) > 1 else 0.0,
    "var": lambda v: np.var(v, ddof=1) if len(v) > 1 else 0.0,
    "min": np.min,
    "max": np.max,
}


def bootstrap_ci(sample, statistic: Union[str, Callable] = "mean",
                 b: int = 1000, seed: int = 0, level: float = 0.95) -> tuple:
    """Percentile bootstrap interval over b resamples with replacement.

    statistic may be a name from the registry (mean, median, std, var,
    min, max) or any callable of a 1-d array.
    """
    data = np.asarray(list(sample) if not isinstance(sample, np.ndarray) else sample,
                      dtype=float)
    if data.size == 0:
        raise ValueError("sample is empty")
    if b < 100:
        raise ValueError("bootstrap requires B >= 100")
    if isinstance(statistic, str):
        if statistic not in _STATISTICS:
            raise ValueError(f"unknown statistic {statistic!r}; choose from {sorted(_STATISTICS)}")
        fn = _STATISTICS[statistic]
    else:
        fn = statistic
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, data.size, size=(b, data.size))
    stats = np.array([fn(data[row]) for row in idx])
    alpha = (1.0 - level) / 2.0
    lo, hi = np.percentile(stats, [100.0 * alpha, 100.0 * (1.0 - alpha)])
    return (float(lo), float(hi))
