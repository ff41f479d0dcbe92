"""Block Gibbs transition operators along a geometric path.

A transition is one full sweep over the blocks of a :class:`SweepPlan`.
Each block is an exact conditional update and therefore reversible with
respect to the intermediate distribution, so the reverse operator of a
sweep is the same blocks applied in the opposite order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import expit, logsumexp

from .exact import all_states, state_index
from .models import JointState, as_bits
from .path import GeometricPath, intermediate_log_f

FORWARD = "forward"
REVERSE = "reverse"


@dataclass(frozen=True)
class SweepPlan:
    """Ordered block updates; each step names the layers resampled together."""

    steps: Tuple[Tuple[int, ...], ...]
    direction: str = FORWARD

    def reversed(self) -> "SweepPlan":
        return SweepPlan(self.steps[::-1], REVERSE if self.direction == FORWARD else FORWARD)

    @property
    def num_blocks(self) -> int:
        return len(self.steps)

    def units_per_sweep(self, layer_sizes) -> int:
        return sum(layer_sizes[layer] for step in self.steps for layer in step)


def full_plan(path: GeometricPath, direction: str = FORWARD) -> SweepPlan:
    plan = SweepPlan(tuple(path.model.gibbs_blocks))
    return plan if direction == FORWARD else plan.reversed()


def clamped_plan(path: GeometricPath, direction: str = FORWARD) -> SweepPlan:
    plan = SweepPlan(tuple(path.model.clamped_blocks))
    return plan if direction == FORWARD else plan.reversed()


def sweep(path: GeometricPath, beta: float, state: JointState, rng: np.random.Generator,
          plan: SweepPlan) -> JointState:
    """Apply every block of ``plan`` at inverse temperature ``beta``.

    Draws exactly one uniform per resampled unit, layer by layer in the
    order listed in each step.
    """
    model = path.model_at(beta)
    state = list(state)
    for step in plan.steps:
        means = [expit(model.layer_logits(layer, state)) for layer in step]
        for layer, p in zip(step, means):
            state[layer] = (rng.random(p.shape) < p).astype(np.uint8)
    return tuple(state)


def gibbs_forward(path, beta, state, rng):
    return sweep(path, beta, state, rng, full_plan(path, FORWARD))


def gibbs_reverse(path, beta, state, rng):
    return sweep(path, beta, state, rng, full_plan(path, REVERSE))


def _check_clamped(state, clamped_v):
    if clamped_v is not None:
        v = np.asarray(state[0])
        if not np.array_equal(v, np.broadcast_to(as_bits(clamped_v), v.shape)):
            raise ValueError("state's visible layer differs from the clamped vector")


def clamped_forward(path, beta, state, rng, clamped_v=None):
    """Gibbs sweep over the hidden layers only; the visible layer is left untouched."""
    _check_clamped(state, clamped_v)
    return sweep(path, beta, state, rng, clamped_plan(path, FORWARD))


def clamped_reverse(path, beta, state, rng, clamped_v=None):
    _check_clamped(state, clamped_v)
    return sweep(path, beta, state, rng, clamped_plan(path, REVERSE))


# per-model names; the sweeps themselves are model-generic
rbm_gibbs_forward = dbm_gibbs_forward = gibbs_forward
rbm_gibbs_reverse = dbm_gibbs_reverse = gibbs_reverse


# ---------------------------------------------------------------------------
# exact kernels by enumeration

MATRIX_CAP = 14


def _layer_slices(sizes):
    bounds = np.cumsum((0,) + tuple(sizes))
    return [slice(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]


def _log_f_tensor(path, beta):
    """``log f_beta`` over every joint state, shaped ``(2,) * total_units``."""
    sizes = path.layer_sizes
    flat = all_states(sum(sizes))
    state = tuple(flat[:, s] for s in _layer_slices(sizes))
    return intermediate_log_f(path, beta, state).reshape((2,) * sum(sizes))


def _block_axes(path, step):
    slices = _layer_slices(path.layer_sizes)
    return tuple(ax for layer in step for ax in range(slices[layer].start, slices[layer].stop))


def block_conditional_tensor(log_f: np.ndarray, axes) -> np.ndarray:
    """``p(x_B | x_rest)`` for every joint state, from ``log f`` alone."""
    return np.exp(log_f - logsumexp(log_f, axis=axes, keepdims=True))


def apply_block_kernel(dist: np.ndarray, cond: np.ndarray, axes) -> np.ndarray:
    """Push a joint distribution through one block update."""
    return dist.sum(axis=axes, keepdims=True) * cond


def propagate(path: GeometricPath, beta: float, dist: np.ndarray, plan: SweepPlan) -> np.ndarray:
    """Exact distribution after one sweep, without forming the dense matrix."""
    log_f = _log_f_tensor(path, beta)
    for step in plan.steps:
        axes = _block_axes(path, step)
        dist = apply_block_kernel(dist, block_conditional_tensor(log_f, axes), axes)
    return dist


def _block_matrix(path, log_f, step):
    n = log_f.ndim
    axes = _block_axes(path, step)
    cond = block_conditional_tensor(log_f, axes).ravel()
    states = all_states(n)
    assignments = all_states(len(axes))
    size = 2 ** n
    mat = np.zeros((size, size))
    rows = np.repeat(np.arange(size), assignments.shape[0])
    targets = np.repeat(states, assignments.shape[0], axis=0)
    targets[:, list(axes)] = np.tile(assignments, (size, 1))
    cols = state_index(targets)
    mat[rows, cols] = cond[cols]
    return mat


def transition_matrix(path: GeometricPath, beta: float, kind: str = FORWARD,
                      clamped_v=None, cap: int = MATRIX_CAP) -> np.ndarray:
    """Dense row-stochastic kernel over all joint states.

    ``kind`` is one of ``forward``, ``reverse``, ``clamped_forward`` or
    ``clamped_reverse``. Block conditionals are obtained by normalising the
    enumerated ``log f_beta``, never from the samplers' sigmoid formulas.
    For clamped kinds with ``clamped_v`` the matrix is restricted to joint
    states whose visible layer equals ``clamped_v`` (rows/columns in
    enumeration order of the hidden units).
    """
    total = sum(path.layer_sizes)
    if total > cap:
        raise ValueError(f"transition_matrix needs <= {cap} units, model has {total}")
    plans = {
        "forward": full_plan(path, FORWARD),
        "reverse": full_plan(path, REVERSE),
        "clamped_forward": clamped_plan(path, FORWARD),
        "clamped_reverse": clamped_plan(path, REVERSE),
    }
    if kind not in plans:
        raise ValueError(f"unknown kernel kind {kind!r}")
    log_f = _log_f_tensor(path, beta)
    mat = np.eye(2 ** total)
    for step in plans[kind].steps:
        mat = mat @ _block_matrix(path, log_f, step)
    if clamped_v is not None:
        if not kind.startswith("clamped"):
            raise ValueError("clamped_v only applies to clamped kernels")
        keep = visible_block_indices(path, clamped_v)
        mat = mat[np.ix_(keep, keep)]
    return mat


def visible_block_indices(path: GeometricPath, v) -> np.ndarray:
    """Joint-state indices whose visible layer equals ``v``."""
    nv = path.num_visible
    v = as_bits(v, nv, "v")
    n_hidden = sum(path.layer_sizes[1:])
    return state_index(v) * 2 ** n_hidden + np.arange(2 ** n_hidden)


def exact_intermediate_distribution(path: GeometricPath, beta: float, cap: int = MATRIX_CAP) -> np.ndarray:
    """Normalized ``p_beta`` over all joint states (flat, enumeration order)."""
    total = sum(path.layer_sizes)
    if total > cap:
        raise ValueError(f"needs <= {cap} units, model has {total}")
    log_f = _log_f_tensor(path, beta).ravel()
    return np.exp(log_f - logsumexp(log_f))
