"""Exact probabilities under the annealing model of tiny models.

The annealing model is the distribution of the final visible state of the
AIS forward chain. We push the exact ``p_0`` through every forward sweep
(using block conditionals obtained by normalising the enumerated
``log f_beta``) and marginalise at the end.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from .exact import all_states, state_index
from .models import TwoLayerDbn, as_bits
from .path import GeometricPath, InitialDistribution
from .transitions import MATRIX_CAP, _log_f_tensor, full_plan, propagate

MAX_K = 200


def _oracle_betas(schedule):
    betas = np.asarray(getattr(schedule, "betas", schedule), dtype=np.float64)
    if betas.ndim != 1 or betas.size < 1 or betas[0] != 0.0:
        raise ValueError("betas must start at 0")
    if betas.size > 1 and (betas[-1] != 1.0 or np.any(np.diff(betas) <= 0)):
        raise ValueError("betas must ascend strictly to 1")
    return betas


def annealing_marginal(path: GeometricPath, schedule, cap: int = MATRIX_CAP, max_k: int = MAX_K) -> np.ndarray:
    """``p_ann`` over every visible configuration of the annealed model.

    For a DBN path this is the distribution of h1 (the top RBM's visible
    layer). A schedule of just ``[0]`` (K = 0) gives the ``p_0`` marginal.
    """
    betas = _oracle_betas(schedule)
    if betas.size - 1 > max_k:
        raise ValueError(f"exact annealing oracle is capped at K <= {max_k}")
    sizes = path.layer_sizes
    if sum(sizes) > cap:
        raise ValueError(f"exact annealing oracle needs <= {cap} units, model has {sum(sizes)}")
    log_f0 = _log_f_tensor(path, 0.0)
    dist = np.exp(log_f0 - logsumexp(log_f0))
    plan = full_plan(path)
    for beta in betas[1:]:
        dist = propagate(path, beta, dist, plan)
    hidden_axes = tuple(range(sizes[0], sum(sizes)))
    return dist.sum(axis=hidden_axes).ravel()


def exact_p_ann_oracle(path: GeometricPath, schedule, v_test, cap: int = MATRIX_CAP) -> float:
    """Exact ``log p_ann(v_test)``.

    For a DBN the directed layer is applied on top of the annealed top RBM:
    ``p_ann(v) = sum_{h1} p_ann_top(h1) p(v | h1)``.
    """
    marginal = annealing_marginal(path, schedule, cap)
    target = path.target
    if isinstance(target, TwoLayerDbn):
        v = as_bits(v_test, target.num_visible, "v_test")
        h1 = all_states(target.top_rbm.num_visible)
        with np.errstate(divide="ignore"):
            return float(logsumexp(np.log(marginal) + target.log_p_v_given_h1(v, h1)))
    v = as_bits(v_test, path.num_visible, "v_test")
    p = marginal[state_index(v)]
    return math.log(p) if p > 0 else -math.inf


def dbn_path(model: TwoLayerDbn) -> GeometricPath:
    return GeometricPath(InitialDistribution.uniform(), model)
