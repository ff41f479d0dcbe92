"""Approximate posterior inference and simple importance sampling of log f(v).

Used as control-variate covariates for DBMs and DBNs, where the
unnormalized marginal of a visible vector is itself intractable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, xlogy

from .weights import log_mean_exp
from .models import (PROPOSAL_EPS, TwoLayerDbm, TwoLayerDbn, as_bits, bernoulli_log_prob,
                     sample_bernoulli)


@dataclass
class MeanFieldResult:
    mu1: np.ndarray
    mu2: np.ndarray
    iterations: int
    converged: bool

    def free_energy(self, model: TwoLayerDbm, v) -> float:
        """Variational lower bound on ``log f(v)`` at these means."""
        v = np.asarray(v, dtype=np.float64)
        mu1, mu2 = self.mu1, self.mu2
        energy = (v @ model.visible_bias + mu1 @ model.hidden_bias_1 + mu2 @ model.hidden_bias_2
                  + v @ model.weights_1 @ mu1 + mu1 @ model.weights_2 @ mu2)
        entropy = -sum(np.sum(xlogy(m, m) + xlogy(1 - m, 1 - m)) for m in (mu1, mu2))
        return float(energy + entropy)


def dbm_mean_field(model: TwoLayerDbm, v, max_iters: int = 50, tol: float = 1e-6) -> MeanFieldResult:
    """Fully factorized mean-field for ``p(h1, h2 | v)``.

    Means start at 0.5 and are updated a whole layer at a time, h1 then h2;
    units within a layer do not interact, so each layer update is an exact
    coordinate-ascent step. Stops after ``max_iters`` sweeps or once no mean
    moves by ``tol`` or more.
    """
    v = as_bits(v, model.num_visible, "v").astype(np.float64)
    mu1 = np.full(model.hidden_bias_1.size, 0.5)
    mu2 = np.full(model.hidden_bias_2.size, 0.5)
    base1 = model.hidden_bias_1 + v @ model.weights_1
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        new1 = expit(base1 + model.weights_2 @ mu2)
        new2 = expit(model.hidden_bias_2 + new1 @ model.weights_2)
        delta = max(np.max(np.abs(new1 - mu1)), np.max(np.abs(new2 - mu2)))
        mu1, mu2 = new1, new2
        if delta < tol:
            converged = True
            break
    return MeanFieldResult(mu1, mu2, it, converged)


def _clamped(means):
    return np.clip(means, PROPOSAL_EPS, 1.0 - PROPOSAL_EPS)


def dbm_is_log_weights(model: TwoLayerDbm, v, num_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Per-sample ``log f(v, h2) - log q(h2 | v)`` with q the mean-field product over h2."""
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    v = as_bits(v, model.num_visible, "v")
    q = _clamped(dbm_mean_field(model, v).mu2)
    h2 = sample_bernoulli(np.broadcast_to(q, (num_samples, q.size)), rng)
    return model.log_f_v_h2(v, h2) - bernoulli_log_prob(h2, q)


def dbm_is_log_unnormalized_v(model: TwoLayerDbm, v, num_samples: int = 500,
                              rng: np.random.Generator = None) -> float:
    rng = np.random.default_rng() if rng is None else rng
    return log_mean_exp(dbm_is_log_weights(model, v, num_samples, rng))


def dbn_is_log_weights(model: TwoLayerDbn, v, num_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Per-sample ``log p(v|h1) + log f_top(h1) - log q(h1|v)`` with q the recognition model."""
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    v = as_bits(v, model.num_visible, "v")
    q = _clamped(expit(model.recognition_logits(v)))
    h1 = sample_bernoulli(np.broadcast_to(q, (num_samples, q.size)), rng)
    return (model.log_p_v_given_h1(v, h1) + model.top_rbm.log_f_visible(h1)
            - bernoulli_log_prob(h1, q))


def dbn_is_log_unnormalized_v(model: TwoLayerDbn, v, num_samples: int = 500,
                              rng: np.random.Generator = None) -> float:
    rng = np.random.default_rng() if rng is None else rng
    return log_mean_exp(dbn_is_log_weights(model, v, num_samples, rng))
