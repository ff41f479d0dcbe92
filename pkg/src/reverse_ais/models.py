"""Binary RBM, two-layer DBM and two-layer DBN parameter containers.

States are tuples of 0/1 arrays, one per layer, ordered from the visible
layer upward. Every method broadcasts over leading batch axes, so the same
code evaluates one state or a whole population of chains.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np
from scipy.special import expit, log_expit

JointState = Tuple[np.ndarray, ...]

# proposal means are clipped to this distance from {0, 1}
PROPOSAL_EPS = 1e-6


def softplus(x):
    return np.logaddexp(0.0, x)


def as_bits(x, length=None, name="vector") -> np.ndarray:
    """Validate a binary vector (or batch of them) and return it as uint8."""
    arr = np.asarray(x)
    if arr.ndim == 0 or arr.shape[-1] == 0:
        raise ValueError(f"{name} must be a non-empty binary vector")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError(f"{name} must contain only 0/1 entries")
    if length is not None and arr.shape[-1] != length:
        raise ValueError(f"{name} has length {arr.shape[-1]}, expected {length}")
    return arr.astype(np.uint8)


def _param(x, ndim, name):
    arr = np.array(x, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must have {ndim} dimension(s), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def _check_shape(w, rows, cols, name):
    if w.shape != (rows, cols):
        raise ValueError(f"{name} has shape {w.shape}, expected {(rows, cols)}")


def bernoulli_log_prob(bits, means) -> np.ndarray:
    """Log-probability of ``bits`` under independent Bernoulli(means), summed over the last axis."""
    means = np.clip(means, 0.0, 1.0)
    bits = np.asarray(bits, dtype=np.float64)
    with np.errstate(divide="ignore"):
        terms = np.where(bits > 0, np.log(means), np.log1p(-means))
    return terms.sum(axis=-1)


def bernoulli_logit_log_prob(bits, logits) -> np.ndarray:
    """Same as :func:`bernoulli_log_prob` but parameterised by logits (exact in the tails)."""
    bits = np.asarray(bits, dtype=np.float64)
    return (bits * log_expit(logits) + (1.0 - bits) * log_expit(-logits)).sum(axis=-1)


def sample_bernoulli(means, rng: np.random.Generator) -> np.ndarray:
    """One uniform draw per unit, in unit order."""
    means = np.asarray(means, dtype=np.float64)
    return (rng.random(means.shape) < means).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class BinaryRbm:
    visible_bias: np.ndarray
    hidden_bias: np.ndarray
    weights: np.ndarray

    # forward Gibbs sweep order: hidden block, then visible block
    gibbs_blocks = ((1,), (0,))
    clamped_blocks = ((1,),)

    def __post_init__(self):
        a = _param(self.visible_bias, 1, "visible_bias")
        b = _param(self.hidden_bias, 1, "hidden_bias")
        w = _param(self.weights, 2, "weights")
        _check_shape(w, a.size, b.size, "weights")
        if a.size == 0 or b.size == 0:
            raise ValueError("layers must be non-empty")
        object.__setattr__(self, "visible_bias", a)
        object.__setattr__(self, "hidden_bias", b)
        object.__setattr__(self, "weights", w)

    @classmethod
    def zeros(cls, num_visible, num_hidden):
        return cls(np.zeros(num_visible), np.zeros(num_hidden), np.zeros((num_visible, num_hidden)))

    @property
    def num_visible(self):
        return self.visible_bias.size

    @property
    def num_hidden(self):
        return self.hidden_bias.size

    @property
    def layer_sizes(self):
        return (self.num_visible, self.num_hidden)

    def log_f(self, state: JointState) -> np.ndarray:
        """Joint unnormalized log-probability ``a.v + b.h + v'Wh``."""
        v, h = (np.asarray(s, dtype=np.float64) for s in state)
        return v @ self.visible_bias + h @ self.hidden_bias + np.sum((v @ self.weights) * h, axis=-1)

    def hidden_logits(self, v):
        return self.hidden_bias + np.asarray(v, dtype=np.float64) @ self.weights

    def visible_logits(self, h):
        return self.visible_bias + np.asarray(h, dtype=np.float64) @ self.weights.T

    def layer_logits(self, layer: int, state: JointState) -> np.ndarray:
        if layer == 0:
            return self.visible_logits(state[1])
        if layer == 1:
            return self.hidden_logits(state[0])
        raise IndexError(layer)

    def log_f_visible(self, v) -> np.ndarray:
        """``log sum_h f(v, h)`` with the hidden layer summed out analytically."""
        v = np.asarray(v, dtype=np.float64)
        return v @ self.visible_bias + softplus(self.hidden_logits(v)).sum(axis=-1)

    def log_f_hidden(self, h) -> np.ndarray:
        """``log sum_v f(v, h)``; the mirror image of :meth:`log_f_visible`."""
        h = np.asarray(h, dtype=np.float64)
        return h @ self.hidden_bias + softplus(self.visible_logits(h)).sum(axis=-1)

    def scaled(self, beta, base_visible_bias=None) -> "BinaryRbm":
        """Parameters of the geometric average ``f_ini^(1-beta) f^beta``.

        ``base_visible_bias`` is the visible bias of a factorized initial
        distribution (``None`` means uniform).
        """
        a = beta * self.visible_bias
        if base_visible_bias is not None:
            a = a + (1.0 - beta) * base_visible_bias
        return BinaryRbm(a, beta * self.hidden_bias, beta * self.weights)


@dataclass(frozen=True, eq=False)
class TwoLayerDbm:
    visible_bias: np.ndarray
    hidden_bias_1: np.ndarray
    hidden_bias_2: np.ndarray
    weights_1: np.ndarray
    weights_2: np.ndarray

    # (v, h2) are conditionally independent given h1, so they form one block
    gibbs_blocks = ((0, 2), (1,))
    clamped_blocks = ((2,), (1,))

    def __post_init__(self):
        a = _param(self.visible_bias, 1, "visible_bias")
        b1 = _param(self.hidden_bias_1, 1, "hidden_bias_1")
        b2 = _param(self.hidden_bias_2, 1, "hidden_bias_2")
        w1 = _param(self.weights_1, 2, "weights_1")
        w2 = _param(self.weights_2, 2, "weights_2")
        _check_shape(w1, a.size, b1.size, "weights_1")
        _check_shape(w2, b1.size, b2.size, "weights_2")
        if min(a.size, b1.size, b2.size) == 0:
            raise ValueError("layers must be non-empty")
        for name, val in zip(("visible_bias", "hidden_bias_1", "hidden_bias_2", "weights_1", "weights_2"),
                             (a, b1, b2, w1, w2)):
            object.__setattr__(self, name, val)

    @classmethod
    def zeros(cls, nv, nh1, nh2):
        return cls(np.zeros(nv), np.zeros(nh1), np.zeros(nh2), np.zeros((nv, nh1)), np.zeros((nh1, nh2)))

    @property
    def num_visible(self):
        return self.visible_bias.size

    @property
    def layer_sizes(self):
        return (self.visible_bias.size, self.hidden_bias_1.size, self.hidden_bias_2.size)

    def log_f(self, state: JointState) -> np.ndarray:
        v, h1, h2 = (np.asarray(s, dtype=np.float64) for s in state)
        return (v @ self.visible_bias + h1 @ self.hidden_bias_1 + h2 @ self.hidden_bias_2
                + np.sum((v @ self.weights_1) * h1, axis=-1)
                + np.sum((h1 @ self.weights_2) * h2, axis=-1))

    def layer_logits(self, layer: int, state: JointState) -> np.ndarray:
        v, h1, h2 = (np.asarray(s, dtype=np.float64) for s in state)
        if layer == 0:
            return self.visible_bias + h1 @ self.weights_1.T
        if layer == 1:
            return self.hidden_bias_1 + v @ self.weights_1 + h2 @ self.weights_2.T
        if layer == 2:
            return self.hidden_bias_2 + h1 @ self.weights_2
        raise IndexError(layer)

    def log_f_v_h2(self, v, h2) -> np.ndarray:
        """``log sum_{h1} f(v, h1, h2)``; h1 is summed out analytically."""
        v = np.asarray(v, dtype=np.float64)
        h2 = np.asarray(h2, dtype=np.float64)
        inputs = self.hidden_bias_1 + v @ self.weights_1 + h2 @ self.weights_2.T
        return v @ self.visible_bias + h2 @ self.hidden_bias_2 + softplus(inputs).sum(axis=-1)

    def log_f_h1(self, h1) -> np.ndarray:
        """``log sum_{v, h2} f(v, h1, h2)``."""
        h1 = np.asarray(h1, dtype=np.float64)
        return (h1 @ self.hidden_bias_1
                + softplus(self.visible_bias + h1 @ self.weights_1.T).sum(axis=-1)
                + softplus(self.hidden_bias_2 + h1 @ self.weights_2).sum(axis=-1))

    def scaled(self, beta, base_visible_bias=None) -> "TwoLayerDbm":
        a = beta * self.visible_bias
        if base_visible_bias is not None:
            a = a + (1.0 - beta) * base_visible_bias
        return TwoLayerDbm(a, beta * self.hidden_bias_1, beta * self.hidden_bias_2,
                           beta * self.weights_1, beta * self.weights_2)


@dataclass(frozen=True, eq=False)
class TwoLayerDbn:
    """Top RBM over (h1, h2) plus a directed logistic layer ``p(v | h1)``.

    The recognition distribution ``q(h1 | v)`` uses the transposed directed
    weights; its bias defaults to the top RBM's bias on h1.
    """

    top_rbm: BinaryRbm
    directed_weights: np.ndarray
    directed_visible_bias: np.ndarray
    recognition_bias: np.ndarray = field(default=None)

    def __post_init__(self):
        if not isinstance(self.top_rbm, BinaryRbm):
            raise TypeError("top_rbm must be a BinaryRbm")
        c = _param(self.directed_visible_bias, 1, "directed_visible_bias")
        w = _param(self.directed_weights, 2, "directed_weights")
        _check_shape(w, c.size, self.top_rbm.num_visible, "directed_weights")
        r = self.top_rbm.visible_bias if self.recognition_bias is None else self.recognition_bias
        r = _param(r, 1, "recognition_bias")
        if r.size != self.top_rbm.num_visible:
            raise ValueError("recognition_bias length must equal the h1 layer size")
        object.__setattr__(self, "directed_visible_bias", c)
        object.__setattr__(self, "directed_weights", w)
        object.__setattr__(self, "recognition_bias", r)

    @classmethod
    def zeros(cls, nv, nh1, nh2):
        return cls(BinaryRbm.zeros(nh1, nh2), np.zeros((nv, nh1)), np.zeros(nv))

    @property
    def num_visible(self):
        return self.directed_visible_bias.size

    @property
    def layer_sizes(self):
        return (self.num_visible,) + self.top_rbm.layer_sizes

    def directed_logits(self, h1):
        return self.directed_visible_bias + np.asarray(h1, dtype=np.float64) @ self.directed_weights.T

    def log_p_v_given_h1(self, v, h1) -> np.ndarray:
        return bernoulli_logit_log_prob(v, self.directed_logits(h1))

    def recognition_logits(self, v):
        return self.recognition_bias + np.asarray(v, dtype=np.float64) @ self.directed_weights


Model = Union[BinaryRbm, TwoLayerDbm, TwoLayerDbn]


# ---------------------------------------------------------------------------
# functional surface


def _check_v(model, v):
    return as_bits(v, model.num_visible, "v")


def rbm_log_unnormalized_v(model: BinaryRbm, v) -> float:
    """``log f(v) = a.v + sum_j softplus(b_j + (v'W)_j)``."""
    return model.log_f_visible(_check_v(model, v))


def rbm_conditional_hidden(model: BinaryRbm, v) -> np.ndarray:
    return expit(model.hidden_logits(_check_v(model, v)))


def rbm_conditional_visible(model: BinaryRbm, h) -> np.ndarray:
    return expit(model.visible_logits(as_bits(h, model.num_hidden, "h")))


def dbn_recognition(model: TwoLayerDbn, v) -> np.ndarray:
    """Per-unit means of the recognition distribution ``q(h1 | v)``."""
    return expit(model.recognition_logits(_check_v(model, v)))
