"""Aggregation of log importance weights."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# below this ESS the delta-method standard error is not trusted
MIN_RELIABLE_ESS = 10.0


def log_mean_exp(values) -> float:
    """``log(mean(exp(values)))`` with a max shift.

    The shifted terms are summed with :func:`math.fsum`, which is correctly
    rounded and therefore independent of the order of ``values``.
    """
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("log_mean_exp of an empty sequence")
    m = np.max(x)
    if m == -np.inf:
        return -math.inf
    if not np.isfinite(m):
        return float(m)
    return float(m + math.log(math.fsum(np.exp(x - m))) - math.log(x.size))


def log_sum_exp(values) -> float:
    x = np.asarray(values, dtype=np.float64).ravel()
    return log_mean_exp(x) + math.log(x.size)


def effective_sample_size(log_weights) -> float:
    """``(sum w)^2 / sum w^2`` computed from log weights."""
    lw = np.asarray(log_weights, dtype=np.float64).ravel()
    if lw.size == 0:
        raise ValueError("effective_sample_size of an empty sequence")
    return float(math.exp(2.0 * log_sum_exp(lw) - log_sum_exp(2.0 * lw)))


def log_estimate_stderr(log_weights) -> float:
    """Delta-method standard error of ``log(mean w)``: ``sd(w) / (sqrt(M) mean(w))``."""
    lw = np.asarray(log_weights, dtype=np.float64).ravel()
    if lw.size < 2:
        return math.nan
    rel = np.exp(lw - log_mean_exp(lw))
    return float(np.std(rel, ddof=1) / math.sqrt(lw.size))


@dataclass
class EstimateSummary:
    log_estimate: float
    num_chains: int
    stderr_log: float
    ess: float
    log_weights: np.ndarray = field(repr=False)
    gibbs_block_updates: int = 0

    @property
    def reliable(self) -> bool:
        return self.ess >= MIN_RELIABLE_ESS

    @classmethod
    def from_log_weights(cls, log_weights, gibbs_block_updates=0):
        lw = np.asarray(log_weights, dtype=np.float64)
        return cls(log_mean_exp(lw), lw.size, log_estimate_stderr(lw),
                   effective_sample_size(lw), lw, gibbs_block_updates)


def tail_bound_check(estimates, true_log_z: float, b: float) -> float:
    """Fraction of log-estimates exceeding ``true_log_z + b``.

    For an unbiased estimator of Z this is below ``exp(-b)`` in expectation.
    """
    if b <= 0:
        raise ValueError("b must be positive")
    est = np.asarray(estimates, dtype=np.float64)
    return float(np.mean(est > true_log_z + b))
