"""Initial distributions, geometric-average paths and beta schedules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit, logit

from .models import (BinaryRbm, JointState, TwoLayerDbm, TwoLayerDbn, as_bits, bernoulli_logit_log_prob,
                     sample_bernoulli, softplus)

LN2 = math.log(2.0)


@dataclass(frozen=True, eq=False)
class Schedule:
    betas: np.ndarray

    def __post_init__(self):
        b = np.array(self.betas, dtype=np.float64)
        if b.ndim != 1 or b.size < 2:
            raise ValueError("a schedule needs at least two betas")
        if b[0] != 0.0 or b[-1] != 1.0:
            raise ValueError("schedule must start at 0 and end at 1")
        if not np.all(np.diff(b) > 0):
            raise ValueError("schedule must be strictly ascending")
        b.setflags(write=False)
        object.__setattr__(self, "betas", b)

    @property
    def K(self) -> int:
        return self.betas.size - 1

    def __len__(self):
        return self.betas.size


def linear_schedule(K: int) -> Schedule:
    """``beta_k = k / K`` for k = 0..K."""
    if int(K) != K or K < 1:
        raise ValueError("K must be a positive integer")
    K = int(K)
    betas = np.arange(K + 1, dtype=np.float64) / K
    return Schedule(betas)


@dataclass(frozen=True, eq=False)
class InitialDistribution:
    """Fully factorized start of the path.

    ``dbr_visible_bias`` is ``None`` for the uniform distribution; otherwise
    the visibles are independent Bernoulli(sigmoid(a0)) (data base rates).
    Hidden units are uniform in both cases.
    """

    dbr_visible_bias: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.dbr_visible_bias is not None:
            a0 = np.array(self.dbr_visible_bias, dtype=np.float64)
            if a0.ndim != 1 or a0.size == 0 or not np.all(np.isfinite(a0)):
                raise ValueError("dbr_visible_bias must be a finite non-empty vector")
            a0.setflags(write=False)
            object.__setattr__(self, "dbr_visible_bias", a0)

    @classmethod
    def uniform(cls):
        return cls(None)

    @classmethod
    def data_base_rates(cls, visible_bias):
        return cls(visible_bias)

    @property
    def kind(self) -> str:
        return "uniform" if self.dbr_visible_bias is None else "dbr"


def dbr_from_dataset(examples) -> InitialDistribution:
    """Data-base-rate visible biases ``logit((c_i + 1) / (M + 2))``."""
    data = np.asarray(examples)
    if data.ndim != 2 or data.shape[0] == 0:
        raise ValueError("need a non-empty 2-D collection of binary vectors")
    data = as_bits(data, name="examples")
    counts = data.sum(axis=0, dtype=np.float64)
    return InitialDistribution(logit((counts + 1.0) / (data.shape[0] + 2.0)))


@dataclass(frozen=True, eq=False)
class GeometricPath:
    """``f_beta = f_ini^(1-beta) f_tgt^beta`` over the joint state of ``target``.

    For a DBN target the path runs over its top RBM (the undirected part);
    only the uniform initial distribution is allowed there.
    """

    initial: InitialDistribution
    target: object

    def __post_init__(self):
        if isinstance(self.target, TwoLayerDbn):
            if self.initial.kind != "uniform":
                raise ValueError("DBN paths only support the uniform initial distribution")
        elif not isinstance(self.target, (BinaryRbm, TwoLayerDbm)):
            raise TypeError(f"unsupported target {type(self.target).__name__}")
        a0 = self.initial.dbr_visible_bias
        if a0 is not None and a0.size != self.model.num_visible:
            raise ValueError("initial distribution does not match the target's visible layer")

    @property
    def model(self):
        """The undirected model being annealed."""
        return self.target.top_rbm if isinstance(self.target, TwoLayerDbn) else self.target

    @property
    def layer_sizes(self):
        return self.model.layer_sizes

    @property
    def num_visible(self) -> int:
        return self.model.layer_sizes[0]

    def model_at(self, beta):
        """Parameters of the intermediate model: linear interpolation of weights and biases."""
        return self.model.scaled(beta, self.initial.dbr_visible_bias)

    def log_f_initial(self, state: JointState) -> np.ndarray:
        a0 = self.initial.dbr_visible_bias
        v = np.asarray(state[0], dtype=np.float64)
        if a0 is None:
            return np.zeros(v.shape[:-1])
        return v @ a0

    def log_f_target(self, state: JointState) -> np.ndarray:
        return self.model.log_f(state)

    def log_f_delta(self, state: JointState) -> np.ndarray:
        """``log f_tgt - log f_ini``; the slope of ``log f_beta`` in beta."""
        return self.log_f_target(state) - self.log_f_initial(state)

    def initial_log_partition(self) -> float:
        n_hidden = sum(self.layer_sizes[1:])
        a0 = self.initial.dbr_visible_bias
        if a0 is None:
            return sum(self.layer_sizes) * LN2
        return n_hidden * LN2 + float(np.sum(softplus(a0)))

    def initial_log_prob_v(self, v) -> np.ndarray:
        """``log p_0(v)``."""
        a0 = self.initial.dbr_visible_bias
        v = np.asarray(v, dtype=np.float64)
        if a0 is None:
            return np.full(v.shape[:-1], -v.shape[-1] * LN2)
        return bernoulli_logit_log_prob(v, a0)

    def visible_initial_means(self) -> np.ndarray:
        a0 = self.initial.dbr_visible_bias
        return np.full(self.num_visible, 0.5) if a0 is None else expit(a0)


def _check_state(path, state):
    if len(state) != len(path.layer_sizes):
        raise ValueError("state has the wrong number of layers")
    for s, n in zip(state, path.layer_sizes):
        if np.shape(s)[-1] != n:
            raise ValueError("state layer sizes do not match the model")


def intermediate_log_f(path: GeometricPath, beta: float, state: JointState) -> np.ndarray:
    """``(1 - beta) log f_ini(x) + beta log f_tgt(x)``."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    _check_state(path, state)
    return (1.0 - beta) * path.log_f_initial(state) + beta * path.log_f_target(state)


def initial_log_partition(path: GeometricPath) -> float:
    return path.initial_log_partition()


def sample_initial(path: GeometricPath, rng: np.random.Generator, size=None) -> JointState:
    """Draw from ``p_0``; ``size`` adds a leading batch axis."""
    shape = () if size is None else (size,)
    layers = [sample_bernoulli(np.broadcast_to(path.visible_initial_means(), shape + (path.num_visible,)), rng)]
    for n in path.layer_sizes[1:]:
        layers.append(sample_bernoulli(np.full(shape + (n,), 0.5), rng))
    return tuple(layers)
