"""Control variates for averaging per-example log-probability estimates.

Expensive estimates ``Y`` are available for a random subset of ``n`` test
examples, a cheap correlated covariate ``X`` for all ``N`` of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class ControlVariateConfig:
    alpha: float = 1.0
    n: int = 100
    N: Optional[int] = None

    def __post_init__(self):
        if not np.isfinite(self.alpha):
            raise ValueError("alpha must be finite")
        if self.n < 1 or (self.N is not None and self.n > self.N):
            raise ValueError("need 1 <= n <= N")


def _alpha(alpha):
    return alpha.alpha if isinstance(alpha, ControlVariateConfig) else float(alpha)


def _split(pairs):
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
        raise ValueError("pairs must be a non-empty sequence of (y, x)")
    if not np.all(np.isfinite(arr)):
        raise ValueError("pairs must be finite")
    return arr[:, 0], arr[:, 1]


def cv_estimate(pairs, covariates, alpha: float = 1.0) -> float:
    """``mean_n(Y - alpha X) + alpha * mean_N(X)``.

    ``pairs`` holds ``(y, x)`` for the subsampled examples; ``covariates``
    holds ``x`` for every example (the subsampled ones included).
    """
    alpha = _alpha(alpha)
    y, x = _split(pairs)
    cov = np.asarray(covariates, dtype=np.float64).ravel()
    if cov.size == 0:
        raise ValueError("covariates must be non-empty")
    if y.size > cov.size:
        raise ValueError("more paired samples than covariates")
    return float(np.mean(y - alpha * x) + alpha * np.mean(cov))


def cv_variance_report(pairs, covariates, alpha: float = 1.0) -> dict:
    """Plug-in variance of :func:`cv_estimate` next to that of the plain mean.

    The paired examples are a subset of the covariate population, so the
    cross term between the two averages is ``2 alpha Cov(Y - alpha X, X) / N``.
    """
    alpha = _alpha(alpha)
    y, x = _split(pairs)
    cov = np.asarray(covariates, dtype=np.float64).ravel()
    n, N = y.size, cov.size
    if n < 2:
        raise ValueError("need at least two paired samples")
    if n > N:
        raise ValueError("more paired samples than covariates")
    d = y - alpha * x
    var_y = float(np.var(y, ddof=1))
    var_d = float(np.var(d, ddof=1))
    var_x = float(np.var(cov, ddof=1)) if N > 1 else 0.0
    cross = float(np.cov(d, x, ddof=1)[0, 1]) if np.ptp(x) > 0 else 0.0
    projected = var_d / n + alpha ** 2 * var_x / N + 2 * alpha * cross / N
    return {
        "var_y": var_y,
        "var_y_minus_ax": var_d,
        "var_x": var_x,
        "plain_mean_variance": var_y / n,
        "projected_variance": projected,
    }


def choose_subset(num_examples: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """First ``n`` entries of a random permutation of the example indices."""
    if not 1 <= n <= num_examples:
        raise ValueError("need 1 <= n <= number of examples")
    return rng.permutation(num_examples)[:n]
