"""Experiment orchestration: configs, AIS/RAISE sweeps over K, reports."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, fields
from functools import partial
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from . import exact
from .annealing_model import MAX_K, exact_p_ann_oracle
from .estimators import DEFAULT_AIS_CHAINS, DEFAULT_RAISE_CHAINS, run_ais, run_raise
from .inference import dbm_is_log_unnormalized_v, dbn_is_log_unnormalized_v
from .modelio import load_dataset, load_model, model_id
from .models import BinaryRbm, TwoLayerDbm, TwoLayerDbn
from .path import GeometricPath, InitialDistribution, dbr_from_dataset, linear_schedule
from .streams import block_rng, run_tasks
from .transitions import MATRIX_CAP
from .variance import choose_subset, cv_estimate, cv_variance_report

ESTIMATORS = ("ais", "raise", "both", "oracle")
BINARIZATION = "fixed threshold: byte >= 128 -> 1"
# stream tags for harness-level randomness (subset choice, covariate IS)
_SUBSET_TAG, _COVARIATE_TAG = 100, 101


def fmt(x) -> Optional[float]:
    """Six decimal places, as stored in every result file; non-finite values become null."""
    if x is None:
        return None
    x = float(x)
    return round(x, 6) if math.isfinite(x) else None


@dataclass
class ExperimentConfig:
    model_path: str = ""
    estimator: str = "both"
    K: Union[int, List[int]] = 1000
    num_chains: int = DEFAULT_AIS_CHAINS
    raise_chains: int = DEFAULT_RAISE_CHAINS
    init: str = "uniform"
    dataset_path: Optional[str] = None
    train_path: Optional[str] = None
    dbr_visible_bias: Optional[List[float]] = None
    num_test_examples: int = 100
    seed: int = 0
    output_path: Optional[str] = None
    csv_path: Optional[str] = None
    workers: int = 1
    covariate: str = "auto"
    is_samples: int = 500
    alpha: float = 1.0
    keep_weights: bool = False

    def validate(self):
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"estimator must be one of {ESTIMATORS}")
        if self.init not in ("uniform", "dbr"):
            raise ValueError("init must be 'uniform' or 'dbr'")
        if min(self.k_values) < 1 or self.num_chains < 1 or self.raise_chains < 1:
            raise ValueError("K and chain counts must be >= 1")
        if self.covariate not in ("auto", "exact", "is"):
            raise ValueError("covariate must be auto, exact or is")
        for name in ("model_path", "dataset_path", "train_path"):
            p = getattr(self, name)
            if p and not Path(p).exists():
                raise FileNotFoundError(f"{name} {p} does not exist")
        if not self.model_path:
            raise ValueError("model_path is required")
        return self

    @property
    def k_values(self) -> List[int]:
        ks = self.K if isinstance(self.K, (list, tuple)) else [self.K]
        return sorted(int(k) for k in ks)

    @classmethod
    def load(cls, path=None, **overrides) -> "ExperimentConfig":
        """Config file values, then any non-``None`` overrides (flags win)."""
        doc = json.loads(Path(path).read_text()) if path else {}
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        doc.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**doc)


def build_path(model, config: ExperimentConfig) -> GeometricPath:
    if config.init == "uniform":
        return GeometricPath(InitialDistribution.uniform(), model)
    if isinstance(model, TwoLayerDbn):
        raise ValueError("the data base rate initial distribution is not defined for DBNs")
    if config.dbr_visible_bias is not None:
        initial = InitialDistribution(config.dbr_visible_bias)
    elif config.train_path:
        initial = dbr_from_dataset(load_dataset(config.train_path))
    else:
        raise ValueError("init 'dbr' needs train_path or dbr_visible_bias")
    return GeometricPath(initial, model)


def _covariate_exact_ok(model):
    if isinstance(model, BinaryRbm):
        return True
    if isinstance(model, TwoLayerDbm):
        return model.hidden_bias_2.size <= exact.DEFAULT_CAP
    return model.top_rbm.num_visible <= exact.DEFAULT_CAP


def log_unnormalized_covariates(model, data, config: ExperimentConfig) -> np.ndarray:
    """``log f(v)`` for every example: exact when tractable, importance sampling otherwise."""
    mode = config.covariate
    if mode == "auto":
        mode = "exact" if _covariate_exact_ok(model) else "is"
    if isinstance(model, BinaryRbm) or mode == "exact":
        return np.array([exact.exact_log_unnormalized_v(model, v) for v in data])
    is_fn = dbm_is_log_unnormalized_v if isinstance(model, TwoLayerDbm) else dbn_is_log_unnormalized_v
    return np.array([is_fn(model, v, config.is_samples, block_rng(config.seed, _COVARIATE_TAG, i))
                     for i, v in enumerate(data)])


def _raise_one(path, K, chains, seed, example_id, v):
    r = run_raise(path, linear_schedule(K), chains, v, seed=seed, example_id=example_id)
    return r.summary


def raise_examples(path, K, chains, seed, indices, data, workers=1):
    """One RAISE run per example; example ``i`` always uses stream key ``i``."""
    tasks = [(int(i), data[i]) for i in indices]
    return run_tasks(partial(_raise_one, path, K, chains, seed), tasks, workers)


def summary_record(mid, estimator, K, seed, summary, keep_weights=False) -> dict:
    rec = {"model_id": mid, "estimator": estimator, "K": K, "M": summary.num_chains, "seed": seed,
           "log_estimate": fmt(summary.log_estimate), "stderr": fmt(summary.stderr_log),
           "ess": fmt(summary.ess), "gibbs_block_updates": summary.gibbs_block_updates}
    if keep_weights:
        rec["per_chain_log_weights"] = [fmt(x) for x in summary.log_weights]
    return rec


@dataclass
class GapReport:
    rows: List[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def sorted(self) -> "GapReport":
        return GapReport(sorted(self.rows, key=lambda r: r["K"]), self.meta)

    def to_json(self) -> str:
        return json.dumps({"meta": self.meta, "rows": self.rows}, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_plot_data(cls, text: str) -> "GapReport":
        by_k = {}
        for rec in csv.DictReader(io.StringIO(text)):
            row = by_k.setdefault(int(rec["K"]), {"K": int(rec["K"])})
            row[f"{rec['estimator']}_estimate"] = float(rec["estimate"])
            row[f"{rec['estimator']}_stderr"] = float(rec["stderr"])
        rows = []
        for k in sorted(by_k):
            row = by_k[k]
            if "ais_estimate" in row and "raise_estimate" in row:
                row["gap"] = fmt(row["ais_estimate"] - row["raise_estimate"])
            rows.append(row)
        return cls(rows)


def _num(x):
    return "nan" if x is None else f"{x:.6f}"


def emit_plot_data(report: GapReport) -> str:
    """CSV with header ``K,estimator,estimate,stderr``; one line per (K, estimator)."""
    if not report.rows:
        raise ValueError("empty report")
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["K", "estimator", "estimate", "stderr"])
    for row in report.sorted().rows:
        for est in ("ais", "raise"):
            if f"{est}_estimate" in row:
                w.writerow([row["K"], est, _num(row[est + "_estimate"]), _num(row.get(est + "_stderr"))])
    return out.getvalue()


def run_compare(config: ExperimentConfig) -> GapReport:
    """AIS once per K for the model, RAISE per subsampled test example per K.

    The average RAISE log-probability is combined with ``log f(v)`` over the
    whole test set through control variates; the AIS average is
    ``mean log f(v) - log Z_hat``.
    """
    config.validate()
    model = load_model(config.model_path)
    mid = model_id(config.model_path)
    path = build_path(model, config)
    if not config.dataset_path:
        raise ValueError("compare needs dataset_path")
    data = load_dataset(config.dataset_path)
    if data.shape[0] == 0:
        raise ValueError("dataset is empty")
    if data.shape[1] != model.num_visible:
        raise ValueError("dataset dimension does not match the model")
    N = data.shape[0]
    n = min(config.num_test_examples, N)
    subset = np.sort(choose_subset(N, n, block_rng(config.seed, _SUBSET_TAG)))
    covariates = log_unnormalized_covariates(model, data, config)
    mean_cov = float(np.mean(covariates))
    want_ais = config.estimator in ("ais", "both", "oracle")
    want_raise = config.estimator in ("raise", "both", "oracle")

    exact_cols = {}
    if config.estimator == "oracle":
        if sum(path.layer_sizes) > MATRIX_CAP:
            raise ValueError(f"oracle mode needs a model with <= {MATRIX_CAP} units")
        log_z = exact.exact_log_partition_any(model)
        exact_lp = covariates if _covariate_exact_ok(model) else np.array(
            [exact.exact_log_unnormalized_v(model, v) for v in data])
        exact_cols["exact_log_z"] = fmt(log_z)
        exact_cols["exact_log_prob"] = fmt(float(np.mean(exact_lp)) - log_z)

    rows = []
    for K in config.k_values:
        row = {"K": K, **exact_cols}
        if want_ais:
            s = run_ais(path, linear_schedule(K), config.num_chains, config.seed, config.workers)
            row.update(ais_estimate=fmt(mean_cov - s.log_estimate), ais_stderr=fmt(s.stderr_log),
                       ais_log_z=fmt(s.log_estimate), ais_ess=fmt(s.ess),
                       ais_gibbs_block_updates=s.gibbs_block_updates)
        if want_raise:
            sums = raise_examples(path, K, config.raise_chains, config.seed, subset, data, config.workers)
            y = np.array([s.log_estimate for s in sums])
            pairs = np.column_stack([y, covariates[subset]])
            est = cv_estimate(pairs, covariates, config.alpha)
            mc_var = sum(s.stderr_log ** 2 for s in sums if math.isfinite(s.stderr_log)) / n ** 2
            row.update(raise_estimate=fmt(est), raise_stderr=fmt(math.sqrt(mc_var)),
                       raise_plain_mean=fmt(float(np.mean(y))),
                       raise_gibbs_block_updates=sum(s.gibbs_block_updates for s in sums))
            if n >= 2 and n < N:
                rep = cv_variance_report(pairs, covariates, config.alpha)
                row["raise_subset_stderr"] = fmt(math.sqrt(max(rep["projected_variance"], 0.0)))
        if want_ais and want_raise:
            row["gap"] = fmt(row["ais_estimate"] - row["raise_estimate"])
        if config.estimator == "oracle" and K <= MAX_K:
            row["exact_p_ann"] = fmt(float(np.mean(
                [exact_p_ann_oracle(path, linear_schedule(K), data[i]) for i in subset])))
        rows.append(row)

    meta = {"model_id": mid, "estimator": config.estimator, "init": path.initial.kind,
            "ais_chains": config.num_chains, "raise_chains": config.raise_chains,
            "num_test_examples": N, "num_raise_examples": n, "raise_subset": subset.tolist(),
            "seed": config.seed, "alpha": config.alpha, "binarization": BINARIZATION}
    return GapReport(rows, meta).sorted()


def write_outputs(config: ExperimentConfig, text: str, csv_text: Optional[str] = None):
    if config.output_path:
        Path(config.output_path).write_text(text)
    if config.csv_path and csv_text is not None:
        Path(config.csv_path).write_text(csv_text)
