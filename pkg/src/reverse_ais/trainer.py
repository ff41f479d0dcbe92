"""Minimal CD / PCD training, used to manufacture small test models."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit, logsumexp

from .exact import all_states, exact_log_partition
from .inference import dbm_mean_field
from .models import BinaryRbm, TwoLayerDbm, as_bits, sample_bernoulli


@dataclass(frozen=True)
class TrainConfig:
    num_hidden: int = 16
    algorithm: str = "cd"       # "cd" or "pcd"
    cd_steps: int = 1
    num_persistent_chains: int = 100
    learning_rate: float = 0.05
    epochs: int = 10
    minibatch_size: int = 20
    seed: int = 0
    init_scale: float = 0.01

    def __post_init__(self):
        if self.algorithm not in ("cd", "pcd"):
            raise ValueError("algorithm must be 'cd' or 'pcd'")
        if min(self.num_hidden, self.cd_steps, self.num_persistent_chains,
               self.epochs, self.minibatch_size) < 1:
            raise ValueError("counts must be positive")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")


def _gibbs_vhv(model, v, steps, rng):
    for _ in range(steps):
        h = sample_bernoulli(expit(model.hidden_logits(v)), rng)
        v = sample_bernoulli(expit(model.visible_logits(h)), rng)
    return v


def _stats(model, v):
    """Sufficient statistics with the hidden layer averaged out."""
    v = v.astype(np.float64)
    ph = expit(model.hidden_logits(v))
    return v.mean(axis=0), ph.mean(axis=0), v.T @ ph / v.shape[0]


def train_rbm(data, config: TrainConfig, rng: Optional[np.random.Generator] = None,
              init: Optional[BinaryRbm] = None, callback=None) -> BinaryRbm:
    """Plain SGD on the CD-k or PCD gradient estimate.

    ``callback(epoch, model)`` is called after every epoch.
    """
    data = as_bits(np.asarray(data), name="data")
    if data.ndim != 2 or data.shape[0] == 0:
        raise ValueError("data must be a non-empty 2-D binary array")
    if init is not None and init.num_visible != data.shape[1]:
        raise ValueError("initial model does not match the data dimension")
    rng = np.random.default_rng(config.seed) if rng is None else rng
    nv = data.shape[1]
    if init is None:
        a = np.zeros(nv)
        b = np.zeros(config.num_hidden)
        W = rng.normal(0.0, config.init_scale, size=(nv, config.num_hidden))
    else:
        a, b, W = (np.array(p) for p in (init.visible_bias, init.hidden_bias, init.weights))
    lr = config.learning_rate
    persistent = None
    if config.algorithm == "pcd":
        persistent = (rng.random((config.num_persistent_chains, nv)) < 0.5).astype(np.uint8)

    for epoch in range(config.epochs):
        order = rng.permutation(data.shape[0])
        for start in range(0, data.shape[0], config.minibatch_size):
            batch = data[order[start:start + config.minibatch_size]]
            model = BinaryRbm(a, b, W)
            if persistent is None:
                negative = _gibbs_vhv(model, batch, config.cd_steps, rng)
            else:
                persistent = _gibbs_vhv(model, persistent, config.cd_steps, rng)
                negative = persistent
            pos_a, pos_b, pos_w = _stats(model, batch)
            neg_a, neg_b, neg_w = _stats(model, negative)
            a = a + lr * (pos_a - neg_a)
            b = b + lr * (pos_b - neg_b)
            W = W + lr * (pos_w - neg_w)
        if callback is not None:
            callback(epoch, BinaryRbm(a, b, W))
    return BinaryRbm(a, b, W)


def exact_mean_log_likelihood(model: BinaryRbm, data) -> float:
    data = as_bits(np.asarray(data), model.num_visible, "data")
    return float(np.mean(model.log_f_visible(data)) - exact_log_partition(model))


def exact_log_likelihood_gradient(model: BinaryRbm, data):
    """Gradient of the mean exact log-likelihood w.r.t. ``(a, b, W)`` by enumerating v."""
    data = as_bits(np.asarray(data), model.num_visible, "data")
    pos = _stats(model, data)
    states = all_states(model.num_visible)
    lf = model.log_f_visible(states)
    p = np.exp(lf - logsumexp(lf))
    v = states.astype(np.float64)
    ph = expit(model.hidden_logits(v))
    neg = (p @ v, p @ ph, (v * p[:, None]).T @ ph)
    return tuple(x - y for x, y in zip(pos, neg))


def train_dbm(data, num_hidden_1: int, num_hidden_2: int, config: TrainConfig,
              rng: Optional[np.random.Generator] = None) -> TwoLayerDbm:
    """Mean-field positive phase, persistent Gibbs negative phase."""
    data = as_bits(np.asarray(data), name="data")
    rng = np.random.default_rng(config.seed) if rng is None else rng
    nv = data.shape[1]
    s = config.init_scale
    a, b1, b2 = np.zeros(nv), np.zeros(num_hidden_1), np.zeros(num_hidden_2)
    W1 = rng.normal(0.0, s, (nv, num_hidden_1))
    W2 = rng.normal(0.0, s, (num_hidden_1, num_hidden_2))
    m = config.num_persistent_chains
    chains = [(rng.random((m, n)) < 0.5).astype(np.uint8) for n in (nv, num_hidden_1, num_hidden_2)]
    lr = config.learning_rate
    for _ in range(config.epochs):
        order = rng.permutation(data.shape[0])
        for start in range(0, data.shape[0], config.minibatch_size):
            batch = data[order[start:start + config.minibatch_size]].astype(np.float64)
            model = TwoLayerDbm(a, b1, b2, W1, W2)
            mf = [dbm_mean_field(model, v, max_iters=10) for v in batch]
            mu1 = np.array([r.mu1 for r in mf])
            mu2 = np.array([r.mu2 for r in mf])
            for _ in range(config.cd_steps):
                chains[1] = sample_bernoulli(expit(model.layer_logits(1, chains)), rng)
                chains[0] = sample_bernoulli(expit(model.layer_logits(0, chains)), rng)
                chains[2] = sample_bernoulli(expit(model.layer_logits(2, chains)), rng)
            v_n, h1_n, h2_n = (c.astype(np.float64) for c in chains)
            B = batch.shape[0]
            a = a + lr * (batch.mean(0) - v_n.mean(0))
            b1 = b1 + lr * (mu1.mean(0) - h1_n.mean(0))
            b2 = b2 + lr * (mu2.mean(0) - h2_n.mean(0))
            W1 = W1 + lr * (batch.T @ mu1 / B - v_n.T @ h1_n / m)
            W2 = W2 + lr * (mu1.T @ mu2 / B - h1_n.T @ h2_n / m)
    return TwoLayerDbm(a, b1, b2, W1, W2)
