"""
RAISE for deep models
=====================

For a DBM the posterior over hidden units is intractable, so RAISE first
anneals the hidden units with the visibles clamped. For a DBN the first
hidden layer is drawn from a recognition distribution and the top RBM is
handled like an ordinary RBM. On tiny models both can be compared
with the exact probability under the annealing model.
"""

import numpy as np

from reverse_ais import (GeometricPath, InitialDistribution, TwoLayerDbm, TwoLayerDbn, BinaryRbm,
                         dbr_from_dataset, exact_p_ann_oracle, linear_schedule, run_raise_dbn, run_raise_intractable)
from reverse_ais.annealing_model import dbn_path
from reverse_ais.exact import exact_log_prob_v

rng = np.random.default_rng(3)

# %%
# A 4-3-2 DBM. The initial distribution here uses data base rates from a
# made-up training set.
dbm = TwoLayerDbm(rng.normal(size=4), rng.normal(size=3), rng.normal(size=2),
                  rng.normal(size=(4, 3)), rng.normal(size=(3, 2)))
train = (rng.random((200, 4)) < [0.8, 0.2, 0.5, 0.6]).astype(np.uint8)
path = GeometricPath(dbr_from_dataset(train), dbm)
v = np.array([1, 0, 1, 1])
print(f"DBM exact log p(v) = {exact_log_prob_v(dbm, v):.4f}")
for K in (1, 10, 100):
    r = run_raise_intractable(path, linear_schedule(K), 20_000, v, seed=4)
    oracle = exact_p_ann_oracle(path, linear_schedule(K), v)
    print(f"  K={K:3d}  RAISE {r.log_estimate:.4f} +- {r.summary.stderr_log:.4f}   exact log p_ann {oracle:.4f}")

# %%
# A 4-3-2 DBN: directed bottom layer plus an RBM on top.
dbn = TwoLayerDbn(BinaryRbm(rng.normal(size=3), rng.normal(size=2), rng.normal(size=(3, 2))),
                  rng.normal(size=(4, 3)), rng.normal(size=4))
print(f"DBN exact log p(v) = {exact_log_prob_v(dbn, v):.4f}")
for K in (1, 10, 100):
    r = run_raise_dbn(dbn, linear_schedule(K), 20_000, v, seed=4)
    oracle = exact_p_ann_oracle(dbn_path(dbn), linear_schedule(K), v)
    print(f"  K={K:3d}  RAISE {r.log_estimate:.4f} +- {r.summary.stderr_log:.4f}   exact log p_ann {oracle:.4f}")
