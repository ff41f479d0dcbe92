"""AIS and RAISE estimators.

All weights are accumulated online in the log domain. The geometric path
makes ``log f_k(x) - log f_j(x) = (beta_k - beta_j) * (log f_tgt(x) - log f_ini(x))``,
so each weight update needs a single evaluation of the path slope.

Chains run vectorised in blocks (see :mod:`reverse_ais.streams`); every
estimator takes an integer ``seed`` and an optional ``workers`` count that
never changes the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.special import expit

from .models import BinaryRbm, TwoLayerDbm, TwoLayerDbn, as_bits, bernoulli_log_prob, sample_bernoulli, PROPOSAL_EPS
from .path import GeometricPath, InitialDistribution, Schedule, sample_initial
from .streams import block_rng, chain_blocks, run_tasks
from .transitions import FORWARD, REVERSE, clamped_plan, full_plan, sweep
from .weights import (EstimateSummary, effective_sample_size, log_mean_exp,  # noqa: F401
                      tail_bound_check)

# stream tags keep the estimators' random streams disjoint
_AIS, _RAISE, _RAISE_CLAMPED, _RAISE_DBN = 0, 1, 2, 3

DEFAULT_AIS_CHAINS = 5000
DEFAULT_RAISE_CHAINS = 50


@dataclass
class RaiseResult:
    test_example: np.ndarray
    summary: EstimateSummary

    @property
    def log_estimate(self) -> float:
        return self.summary.log_estimate

    @property
    def log_weights(self) -> np.ndarray:
        return self.summary.log_weights


def _betas(schedule) -> np.ndarray:
    return schedule.betas if isinstance(schedule, Schedule) else Schedule(schedule).betas


# ---------------------------------------------------------------------------
# AIS


def _ais_block(path, betas, seed, block, n):
    rng = block_rng(seed, _AIS, block)
    state = sample_initial(path, rng, n)
    log_w = np.full(n, path.initial_log_partition())
    plan = full_plan(path, FORWARD)
    for k in range(1, betas.size):
        log_w += (betas[k] - betas[k - 1]) * path.log_f_delta(state)
        state = sweep(path, betas[k], state, rng, plan)
    return log_w


def run_ais(path: GeometricPath, schedule, num_chains: int = DEFAULT_AIS_CHAINS, seed: int = 0,
            workers: int = 1) -> EstimateSummary:
    """Annealed importance sampling estimate of the target's ``log Z``.

    Each chain starts from ``p_0`` with weight ``Z_0``; at step k the weight
    picks up ``f_k(x_{k-1}) / f_{k-1}(x_{k-1})`` and the state moves with the
    forward sweep at ``beta_k``. For a DBN path this is ``log Z`` of the top RBM.
    """
    betas = _betas(schedule)
    blocks = chain_blocks(num_chains)
    parts = run_tasks(partial(_ais_block, path, betas, seed), blocks, workers)
    updates = num_chains * (betas.size - 1) * full_plan(path).num_blocks
    return EstimateSummary.from_log_weights(np.concatenate(parts), updates)


# ---------------------------------------------------------------------------
# RAISE


def _descend(path, betas, state, log_w, rng):
    """Reverse chain from x_K: ``x_k ~ T~_{k+1}(.|x_{k+1})`` then weight by ``f_k / f_{k+1}``."""
    plan = full_plan(path, REVERSE)
    for k in range(betas.size - 2, -1, -1):
        state = sweep(path, betas[k + 1], state, rng, plan)
        log_w += (betas[k] - betas[k + 1]) * path.log_f_delta(state)
    return log_w


def _raise_tractable_start(path, v, rng):
    target: BinaryRbm = path.model
    h = sample_bernoulli(expit(target.hidden_logits(v)), rng)
    log_w = target.log_f_visible(v) - path.initial_log_partition()
    return (v, h), log_w


def _raise_rbm_block(path, betas, v_test, seed, example_id, block, n):
    rng = block_rng(seed, _RAISE, example_id, block)
    v = np.broadcast_to(v_test, (n, v_test.size)).copy()
    state, log_w = _raise_tractable_start(path, v, rng)
    return _descend(path, betas, state, log_w, rng)


def run_raise_tractable(path: GeometricPath, schedule, num_chains: int = DEFAULT_RAISE_CHAINS,
                        v_test=None, seed: int = 0, example_id: int = 0, workers: int = 1) -> RaiseResult:
    """RAISE for an RBM, whose posterior ``p(h | v)`` can be sampled exactly.

    The linear-domain mean of the returned weights is an unbiased estimate
    of the annealing model's probability of ``v_test``.
    """
    if not isinstance(path.target, BinaryRbm):
        raise TypeError("run_raise_tractable needs an RBM target")
    v_test = as_bits(v_test, path.num_visible, "v_test")
    betas = _betas(schedule)
    blocks = chain_blocks(num_chains)
    parts = run_tasks(partial(_raise_rbm_block, path, betas, v_test, seed, example_id), blocks, workers)
    updates = num_chains * (betas.size - 1) * full_plan(path).num_blocks
    return RaiseResult(v_test, EstimateSummary.from_log_weights(np.concatenate(parts), updates))


def _raise_clamped_block(path, betas, v_test, seed, example_id, block, n):
    rng = block_rng(seed, _RAISE_CLAMPED, example_id, block)
    v = np.broadcast_to(v_test, (n, v_test.size)).copy()
    hidden = [sample_bernoulli(np.full((n, size), 0.5), rng) for size in path.layer_sizes[1:]]
    state = (v, *hidden)
    log_w = path.initial_log_prob_v(v)
    plan = clamped_plan(path, REVERSE)
    # heating leg with v clamped: h'_k comes from the reverse clamped kernel
    # for p_{k-1}, then is reweighted by f_k / f_{k-1}
    for k in range(1, betas.size):
        state = sweep(path, betas[k - 1], state, rng, plan)
        log_w += (betas[k] - betas[k - 1]) * path.log_f_delta(state)
    return _descend(path, betas, state, log_w, rng)


def run_raise_intractable(path: GeometricPath, schedule, num_chains: int = DEFAULT_RAISE_CHAINS,
                          v_test=None, seed: int = 0, example_id: int = 0, workers: int = 1) -> RaiseResult:
    """RAISE with an extra clamped heating leg, for models such as DBMs.

    Only ``p_0(h | v)`` has to be tractable (it is uniform here). Works for
    RBM targets too, which is handy for cross-checks.
    """
    if isinstance(path.target, TwoLayerDbn):
        raise TypeError("use run_raise_dbn for DBNs")
    v_test = as_bits(v_test, path.num_visible, "v_test")
    betas = _betas(schedule)
    blocks = chain_blocks(num_chains)
    parts = run_tasks(partial(_raise_clamped_block, path, betas, v_test, seed, example_id), blocks, workers)
    K = betas.size - 1
    updates = num_chains * K * (clamped_plan(path).num_blocks + full_plan(path).num_blocks)
    return RaiseResult(v_test, EstimateSummary.from_log_weights(np.concatenate(parts), updates))


def _raise_dbn_block(model, path, betas, v_test, seed, example_id, block, n):
    rng = block_rng(seed, _RAISE_DBN, example_id, block)
    q = np.clip(expit(model.recognition_logits(v_test)), PROPOSAL_EPS, 1.0 - PROPOSAL_EPS)
    h1 = sample_bernoulli(np.broadcast_to(q, (n, q.size)), rng)
    log_w = model.log_p_v_given_h1(v_test, h1) - bernoulli_log_prob(h1, q)
    state, top_w = _raise_tractable_start(path, h1, rng)
    return log_w + _descend(path, betas, state, top_w, rng)


def run_raise_dbn(model: TwoLayerDbn, schedule, num_chains: int = DEFAULT_RAISE_CHAINS, v_test=None,
                  seed: int = 0, example_id: int = 0, workers: int = 1) -> RaiseResult:
    """RAISE for a DBN unrolled into a deep belief net.

    h1 is drawn from the recognition distribution; the top RBM then runs the
    tractable-posterior reverse chain with h1 as its visible layer. The
    weight is ``p(v | h1) * w_top(h1) / q(h1 | v)``.
    """
    if not isinstance(model, TwoLayerDbn):
        raise TypeError("run_raise_dbn needs a TwoLayerDbn")
    path = GeometricPath(InitialDistribution.uniform(), model)
    v_test = as_bits(v_test, model.num_visible, "v_test")
    betas = _betas(schedule)
    blocks = chain_blocks(num_chains)
    parts = run_tasks(partial(_raise_dbn_block, model, path, betas, v_test, seed, example_id), blocks, workers)
    updates = num_chains * (betas.size - 1) * full_plan(path).num_blocks
    return RaiseResult(v_test, EstimateSummary.from_log_weights(np.concatenate(parts), updates))


def run_raise(path: GeometricPath, schedule, num_chains: int = DEFAULT_RAISE_CHAINS, v_test=None,
              seed: int = 0, example_id: int = 0, workers: int = 1) -> RaiseResult:
    """Dispatch to the RAISE variant appropriate for the path's target."""
    target = path.target
    kw = dict(num_chains=num_chains, v_test=v_test, seed=seed, example_id=example_id, workers=workers)
    if isinstance(target, BinaryRbm):
        return run_raise_tractable(path, schedule, **kw)
    if isinstance(target, TwoLayerDbm):
        return run_raise_intractable(path, schedule, **kw)
    return run_raise_dbn(target, schedule, **kw)
