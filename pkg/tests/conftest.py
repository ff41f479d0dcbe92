import itertools
import math

import numpy as np
import pytest

from reverse_ais import BinaryRbm, TwoLayerDbm, TwoLayerDbn


def bit_vectors(n):
    return [np.array(bits, dtype=np.uint8) for bits in itertools.product((0, 1), repeat=n)]


def brute_rbm_log_f(m, v, h):
    """Energy written out term by term, independent of BinaryRbm.log_f."""
    s = sum(m.visible_bias[i] * v[i] for i in range(len(v)))
    s += sum(m.hidden_bias[j] * h[j] for j in range(len(h)))
    s += sum(v[i] * m.weights[i, j] * h[j] for i in range(len(v)) for j in range(len(h)))
    return s


def brute_dbm_log_f(m, v, h1, h2):
    s = float(np.dot(m.visible_bias, v) + np.dot(m.hidden_bias_1, h1) + np.dot(m.hidden_bias_2, h2))
    s += sum(v[i] * m.weights_1[i, j] * h1[j] for i in range(len(v)) for j in range(len(h1)))
    s += sum(h1[j] * m.weights_2[j, k] * h2[k] for j in range(len(h1)) for k in range(len(h2)))
    return s


def logsumexp_list(xs):
    m = max(xs)
    return m + math.log(math.fsum(math.exp(x - m) for x in xs))


def brute_rbm_log_z(m):
    return logsumexp_list([brute_rbm_log_f(m, v, h) for v in bit_vectors(m.num_visible)
                           for h in bit_vectors(m.num_hidden)])


def brute_dbm_log_f_v(m, v):
    nv, n1, n2 = m.layer_sizes
    return logsumexp_list([brute_dbm_log_f(m, v, h1, h2) for h1 in bit_vectors(n1) for h2 in bit_vectors(n2)])


def brute_dbm_log_z(m):
    return logsumexp_list([brute_dbm_log_f_v(m, v) for v in bit_vectors(m.num_visible)])


def sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


def brute_dbn_log_f_v(m, v):
    """sum over (h1, h2) of p(v|h1) f_top(h1, h2), by enumeration."""
    top = m.top_rbm
    terms = []
    for h1 in bit_vectors(top.num_visible):
        logit = m.directed_visible_bias + m.directed_weights @ h1
        lp = sum(math.log(sigmoid(z)) if vi else math.log(1 - sigmoid(z)) for vi, z in zip(v, logit))
        for h2 in bit_vectors(top.num_hidden):
            terms.append(lp + brute_rbm_log_f(top, h1, h2))
    return logsumexp_list(terms)


def random_rbm(rng, nv, nh, scale=1.0):
    return BinaryRbm(rng.normal(0, scale, nv), rng.normal(0, scale, nh), rng.normal(0, scale, (nv, nh)))


def random_dbm(rng, nv, n1, n2, scale=1.0):
    return TwoLayerDbm(rng.normal(0, scale, nv), rng.normal(0, scale, n1), rng.normal(0, scale, n2),
                       rng.normal(0, scale, (nv, n1)), rng.normal(0, scale, (n1, n2)))


def random_dbn(rng, nv, n1, n2, scale=1.0):
    return TwoLayerDbn(random_rbm(rng, n1, n2, scale), rng.normal(0, scale, (nv, n1)),
                       rng.normal(0, scale, nv), rng.normal(0, scale, n1))


def linear_zscore(log_weights, log_reference):
    """(mean(w) - ref) / stderr(mean(w)), computed relative to the reference."""
    w = np.exp(np.asarray(log_weights) - log_reference)
    return (w.mean() - 1.0) / (w.std(ddof=1) / math.sqrt(w.size))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
