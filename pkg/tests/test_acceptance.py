"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import json
import math
import time

import numpy as np
import pytest

from reverse_ais import (BinaryRbm, GeometricPath, InitialDistribution, exact_log_partition, exact_p_ann_oracle,
                         linear_schedule, rbm_log_unnormalized_v, run_ais, run_raise_dbn, run_raise_intractable,
                         run_raise_tractable)
from reverse_ais.annealing_model import dbn_path
from reverse_ais.cli import main
from reverse_ais.exact import all_states
from reverse_ais.idx import write_idx_images
from reverse_ais.modelio import save_model
from reverse_ais.trainer import TrainConfig, train_rbm
from reverse_ais.transitions import exact_intermediate_distribution, transition_matrix, visible_block_indices
from reverse_ais.variance import choose_subset, cv_estimate
from reverse_ais.weights import tail_bound_check

from conftest import linear_zscore, random_dbm, random_dbn, random_rbm


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        return ok
    return emit


def _uniform(model):
    return GeometricPath(InitialDistribution.uniform(), model)


def test_criterion_1_analytics_exact(report):
    t = time.time()
    rng = np.random.default_rng(1)
    worst = 0.0
    for i in range(20):
        nv = int(rng.integers(2, 11))
        nh = int(rng.integers(1, 19 - nv))
        m = random_rbm(rng, nv, nh)
        flat = all_states(nv + nh)
        lf = m.log_f((flat[:, :nv], flat[:, nv:])).reshape(2 ** nv, 2 ** nh)
        # full joint enumeration, summed without any layer marginalised analytically
        row_max = lf.max(axis=1)
        log_f_v = row_max + np.log([math.fsum(r) for r in np.exp(lf - row_max[:, None])])
        top = lf.max()
        log_z = top + math.log(math.fsum(np.exp(lf - top).ravel()))
        for j in range(2 ** nv):
            got = rbm_log_unnormalized_v(m, flat[j * 2 ** nh, :nv])
            worst = max(worst, abs(got - log_f_v[j]) / max(abs(log_f_v[j]), 1e-300))
        worst = max(worst, abs(exact_log_partition(m) - log_z) / abs(log_z))
    ok = worst < 1e-10 and time.time() - t < 60
    assert report(1, ok, f"max relative error {worst:.2e} over 20 RBMs, {time.time() - t:.1f}s")


def test_criterion_2_kernels(report):
    t = time.time()
    rng = np.random.default_rng(2)
    paths = [_uniform(random_rbm(rng, 3, 2, scale=1.5)), _uniform(random_dbm(rng, 3, 2, 2, scale=1.5)),
             GeometricPath(InitialDistribution(rng.normal(size=3)), random_rbm(rng, 3, 2, scale=1.5)),
             GeometricPath(InitialDistribution(rng.normal(size=3)), random_dbm(rng, 3, 2, 2, scale=1.5))]
    worst = 0.0
    for path in paths:
        for beta in (0.0, 0.3, 0.7, 1.0):
            p = exact_intermediate_distribution(path, beta)
            F, R = transition_matrix(path, beta, "forward"), transition_matrix(path, beta, "reverse")
            worst = max(worst, np.abs(p @ F - p).max(), np.abs(p @ R - p).max(),
                        np.abs(p[:, None] * F - (p[:, None] * R).T).max())
            for v in all_states(3):
                pc = p[visible_block_indices(path, v)]
                pc = pc / pc.sum()
                Fc = transition_matrix(path, beta, "clamped_forward", clamped_v=v)
                Rc = transition_matrix(path, beta, "clamped_reverse", clamped_v=v)
                worst = max(worst, np.abs(pc @ Fc - pc).max(), np.abs(pc[:, None] * Fc - (pc[:, None] * Rc).T).max())
    ok = worst < 1e-10 and time.time() - t < 60
    assert report(2, ok, f"max stationarity/reversal residual {worst:.2e}, {time.time() - t:.1f}s")


def test_criterion_3_ais_unbiased(report):
    t = time.time()
    m = random_rbm(np.random.default_rng(3), 5, 4)
    s = run_ais(_uniform(m), linear_schedule(20), 50_000, seed=3)
    z = linear_zscore(s.log_weights, exact_log_partition(m))
    ok = abs(z) < 4 and time.time() - t < 120
    assert report(3, ok, f"z = {z:+.2f} (|z| < 4), {time.time() - t:.1f}s")


def test_criterion_4_tail_bound(report):
    t = time.time()
    m = random_rbm(np.random.default_rng(4), 5, 4)
    # 1000 single-chain AIS runs are 1000 independent unbiased estimates of Z
    est = run_ais(_uniform(m), linear_schedule(20), 1000, seed=4).log_weights
    log_z = exact_log_partition(m)
    parts, ok = [], True
    for b in (1, 2, 5):
        frac = tail_bound_check(est, log_z, b)
        p = math.exp(-b)
        bound = p + 3 * math.sqrt(p * (1 - p) / est.size)
        ok &= frac < bound
        parts.append(f"b={b}: {frac:.3f} < {bound:.3f}")
    ok &= time.time() - t < 300
    assert report(4, ok, "; ".join(parts) + f", {time.time() - t:.1f}s")


def test_criterion_5_raise_unbiased(report):
    t = time.time()
    rng = np.random.default_rng(5)
    sched = linear_schedule(3)
    rbm, dbm, dbn = random_rbm(rng, 3, 2), random_dbm(rng, 3, 2, 2), random_dbn(rng, 3, 2, 2)
    v = np.array([1, 0, 1], dtype=np.uint8)
    zs = {
        "RBM": linear_zscore(run_raise_tractable(_uniform(rbm), sched, 1_000_000, v, seed=5).log_weights,
                             exact_p_ann_oracle(_uniform(rbm), sched, v)),
        "DBM": linear_zscore(run_raise_intractable(_uniform(dbm), sched, 1_000_000, v, seed=5).log_weights,
                             exact_p_ann_oracle(_uniform(dbm), sched, v)),
        "DBN": linear_zscore(run_raise_dbn(dbn, sched, 1_000_000, v, seed=5).log_weights,
                             exact_p_ann_oracle(dbn_path(dbn), sched, v)),
    }
    ok = all(abs(z) < 4 for z in zs.values()) and time.time() - t < 600
    detail = ", ".join(f"{k} z = {z:+.2f}" for k, z in zs.items())
    assert report(5, ok, f"{detail} (|z| < 4), {time.time() - t:.1f}s")


@pytest.fixture(scope="module")
def trained():
    """10x8 RBM trained with PCD on noisy copies of four 10-bit prototypes."""
    rng = np.random.default_rng(0)
    protos = (rng.random((4, 10)) < 0.5).astype(np.uint8)

    def draw(n):
        flips = (rng.random((n, 10)) < 0.05).astype(np.uint8)
        return protos[rng.integers(0, 4, n)] ^ flips

    train, test = draw(2000), draw(20)
    cfg = TrainConfig(num_hidden=8, algorithm="pcd", learning_rate=0.05, epochs=30, minibatch_size=20, seed=1)
    model = train_rbm(train, cfg)
    path = _uniform(model)
    log_f = model.log_f_visible(test)
    exact = float(np.mean(log_f) - exact_log_partition(model))

    raise_cache = {}

    def raise_mean(K):
        if K not in raise_cache:
            rs = [run_raise_tractable(path, linear_schedule(K), 50, v, seed=6, example_id=i)
                  for i, v in enumerate(test)]
            mean = float(np.mean([r.log_estimate for r in rs]))
            se = math.sqrt(sum(r.summary.stderr_log ** 2 for r in rs)) / len(rs)
            raise_cache[K] = (mean, se)
        return raise_cache[K]

    return dict(model=model, path=path, test=test, log_f=log_f, exact=exact, raise_mean=raise_mean)


def test_criterion_6_sandwich(report, trained):
    t = time.time()
    s = run_ais(trained["path"], linear_schedule(10_000), 5000, seed=6)
    ais = float(np.mean(trained["log_f"])) - s.log_estimate
    ais_se = s.stderr_log
    ra, ra_se = trained["raise_mean"](10_000)
    pooled = math.hypot(ais_se, ra_se)
    exact = trained["exact"]
    gap = ais - ra
    ok = (ra <= ais + 2 * pooled and gap <= 0.2 and abs(ais - exact) <= 0.2 and abs(ra - exact) <= 0.2
          and time.time() - t < 600)
    assert report(6, ok, f"exact {exact:.4f}, AIS {ais:.4f} (se {ais_se:.4f}), RAISE {ra:.4f} (se {ra_se:.4f}), "
                         f"gap {gap:+.4f}, {time.time() - t:.1f}s")


def test_criterion_7_monotone(report, trained):
    lo, lo_se = trained["raise_mean"](100)
    hi, hi_se = trained["raise_mean"](10_000)
    pooled = math.hypot(lo_se, hi_se)
    ok = hi > lo - 2 * pooled
    assert report(7, ok, f"RAISE K=100 {lo:.4f}, K=10000 {hi:.4f}, pooled se {pooled:.4f}")


def test_criterion_8_control_variates(report):
    t = time.time()
    rng = np.random.default_rng(8)
    N, n = 10_000, 100
    x = rng.normal(size=N)
    y = 0.95 * x + math.sqrt(1 - 0.95 ** 2) * rng.normal(size=N)
    cv, plain, bit_exact = [], [], True
    for _ in range(1000):
        idx = choose_subset(N, n, rng)
        pairs = np.column_stack([y[idx], x[idx]])
        cv.append(cv_estimate(pairs, x, 1.0))
        plain.append(float(np.mean(y[idx])))
        bit_exact &= cv_estimate(pairs, x, 0.0) == plain[-1]
    ratio = np.var(cv, ddof=1) / np.var(plain, ddof=1)
    ok = ratio < 0.5 and bit_exact and time.time() - t < 60
    assert report(8, ok, f"variance ratio {ratio:.3f} (< 0.5), alpha=0 bit-exact: {bit_exact}, "
                         f"{time.time() - t:.1f}s")


def test_criterion_9_determinism(report, tmp_path):
    rng = np.random.default_rng(9)
    save_model(random_rbm(rng, 4, 3), tmp_path / "rbm.json")
    save_model(random_dbm(rng, 4, 2, 2), tmp_path / "dbm.json")
    save_model(random_dbn(rng, 4, 2, 2), tmp_path / "dbn.json")
    data = (rng.random((30, 4)) < 0.5).astype(np.uint8)
    np.save(tmp_path / "data.npy", data)
    write_idx_images(tmp_path / "img.idx", rng.integers(0, 256, (5, 2, 2)).astype(np.uint8))

    def common(model):
        return ["--model", str(tmp_path / model), "--dataset", str(tmp_path / "data.npy"), "-K", "3", "7",
                "--chains", "2500", "--raise-chains", "1100", "-n", "6", "--seed", "9"]

    runs = {
        "ais-dbm": ["ais"] + common("dbm.json"),
        "raise-dbm": ["raise"] + common("dbm.json"),
        "raise-dbn": ["raise"] + common("dbn.json"),
        "compare-rbm-dbr": ["compare"] + common("rbm.json") + ["--init", "dbr", "--train-data",
                                                                 str(tmp_path / "data.npy")],
        "compare-dbm-is": ["compare"] + common("dbm.json") + ["--covariate", "is", "--is-samples", "50"],
        "oracle": ["oracle"] + common("rbm.json"),
    }
    failures = []
    for name, argv in runs.items():
        outputs = []
        for k, workers in enumerate(("1", "2", "1")):
            out = tmp_path / f"{name}-{k}.json"
            assert main(argv + ["--workers", workers, "-o", str(out)]) == 0, name
            outputs.append(out.read_bytes())
        if not outputs[0] == outputs[1] == outputs[2]:
            failures.append(name)
    trains = []
    for k in range(2):
        out = tmp_path / f"train-{k}.json"
        assert main(["train", "--data", str(tmp_path / "data.npy"), "--out", str(out), "--hidden", "3",
                     "--algorithm", "pcd", "--epochs", "3", "--seed", "9"]) == 0
        trains.append(out.read_bytes())
    if trains[0] != trains[1]:
        failures.append("train")
    ingests = []
    for k in range(2):
        out = tmp_path / f"ingest-{k}.npy"
        assert main(["ingest", str(tmp_path / "img.idx"), "--out", str(out)]) == 0
        ingests.append(out.read_bytes())
    if ingests[0] != ingests[1]:
        failures.append("ingest")
    ok = not failures
    assert report(9, ok, f"{len(runs) + 2} CLI invocations repeated (workers 1/2/1); "
                         f"mismatches: {failures or 'none'}")
