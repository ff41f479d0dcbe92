"""Exact enumeration for tiny models.

These are the reference values every stochastic estimator is checked
against. Each routine enumerates one layer (or layer group) and sums the
others out analytically, and refuses to run past ``cap`` enumerated units.
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from .models import BinaryRbm, TwoLayerDbm, TwoLayerDbn, as_bits

DEFAULT_CAP = 20


class EnumerationCapError(ValueError):
    """Raised when an exact computation would enumerate too many states."""


def _check_cap(n, cap):
    if n > cap:
        raise EnumerationCapError(f"refusing to enumerate 2^{n} states (cap is {cap} units)")


def all_states(n: int) -> np.ndarray:
    """All ``2**n`` binary vectors of length n, as rows.

    Row ``i`` is the big-endian binary expansion of ``i``, so reshaping a
    table indexed by row into ``(2,) * n`` puts unit ``j`` on axis ``j``.
    """
    idx = np.arange(2 ** n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.uint8)


def state_index(bits) -> np.ndarray:
    """Inverse of :func:`all_states` for the last axis of ``bits``."""
    bits = np.asarray(bits, dtype=np.int64)
    n = bits.shape[-1]
    return bits @ (1 << np.arange(n - 1, -1, -1, dtype=np.int64))


def exact_log_partition(model: BinaryRbm, cap: int = DEFAULT_CAP) -> float:
    """``log Z`` by enumerating the smaller layer."""
    if model.num_hidden <= model.num_visible:
        _check_cap(model.num_hidden, cap)
        return float(logsumexp(model.log_f_hidden(all_states(model.num_hidden))))
    _check_cap(model.num_visible, cap)
    return float(logsumexp(model.log_f_visible(all_states(model.num_visible))))


def dbm_log_unnormalized_v_exact(model: TwoLayerDbm, v, cap: int = DEFAULT_CAP) -> float:
    """``log sum_{h1,h2} f(v, h1, h2)``: enumerate h2, sum out h1."""
    v = as_bits(v, model.num_visible, "v")
    nh2 = model.hidden_bias_2.size
    _check_cap(nh2, cap)
    return float(logsumexp(model.log_f_v_h2(v, all_states(nh2))))


def dbm_exact_log_partition(model: TwoLayerDbm, cap: int = DEFAULT_CAP) -> float:
    """``log Z`` of a two-layer DBM, enumerating either h1 or the pair (v, h2)."""
    nv, nh1, nh2 = model.layer_sizes
    if nh1 <= nv + nh2:
        _check_cap(nh1, cap)
        return float(logsumexp(model.log_f_h1(all_states(nh1))))
    _check_cap(nv + nh2, cap)
    both = all_states(nv + nh2)
    return float(logsumexp(model.log_f_v_h2(both[:, :nv], both[:, nv:])))


def dbn_log_unnormalized_v_exact(model: TwoLayerDbn, v, cap: int = DEFAULT_CAP) -> float:
    """``log sum_{h1} p(v | h1) f_top(h1)`` by enumerating h1."""
    v = as_bits(v, model.num_visible, "v")
    nh1 = model.top_rbm.num_visible
    _check_cap(nh1, cap)
    h1 = all_states(nh1)
    return float(logsumexp(model.log_p_v_given_h1(v, h1) + model.top_rbm.log_f_visible(h1)))


def exact_log_partition_any(model, cap: int = DEFAULT_CAP) -> float:
    """Log normalizer of the undirected part of ``model`` (the top RBM for a DBN)."""
    if isinstance(model, BinaryRbm):
        return exact_log_partition(model, cap)
    if isinstance(model, TwoLayerDbm):
        return dbm_exact_log_partition(model, cap)
    if isinstance(model, TwoLayerDbn):
        return exact_log_partition(model.top_rbm, cap)
    raise TypeError(f"unsupported model {type(model).__name__}")


def exact_log_unnormalized_v(model, v, cap: int = DEFAULT_CAP) -> float:
    if isinstance(model, BinaryRbm):
        return float(model.log_f_visible(as_bits(v, model.num_visible, "v")))
    if isinstance(model, TwoLayerDbm):
        return dbm_log_unnormalized_v_exact(model, v, cap)
    if isinstance(model, TwoLayerDbn):
        return dbn_log_unnormalized_v_exact(model, v, cap)
    raise TypeError(f"unsupported model {type(model).__name__}")


def exact_log_prob_v(model, v, cap: int = DEFAULT_CAP) -> float:
    """Exact ``log p(v)`` for any of the three model families."""
    return exact_log_unnormalized_v(model, v, cap) - exact_log_partition_any(model, cap)


def joint_log_f_table(model, cap: int = DEFAULT_CAP):
    """Every joint state of an undirected model and its ``log f``.

    Returns ``(states, log_f)`` where ``states`` is the tuple of per-layer
    bit arrays over all ``2**total`` configurations.
    """
    sizes = model.layer_sizes
    total = sum(sizes)
    _check_cap(total, cap)
    flat = all_states(total)
    bounds = np.cumsum((0,) + tuple(sizes))
    states = tuple(flat[:, lo:hi] for lo, hi in zip(bounds[:-1], bounds[1:]))
    return states, model.log_f(states)
