"""Command line interface: ``reverse-ais {train,ais,raise,compare,oracle,ingest}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import exact
from .annealing_model import MAX_K, exact_p_ann_oracle
from .estimators import run_ais
from .harness import (ExperimentConfig, build_path, emit_plot_data, fmt, raise_examples, run_compare,
                      summary_record, write_outputs)
from .idx import read_idx_images
from .modelio import load_dataset, load_model, model_id, save_model
from .path import linear_schedule
from .trainer import TrainConfig, train_dbm, train_rbm
from .transitions import MATRIX_CAP


def _emit(config, doc):
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if config.output_path:
        write_outputs(config, text)
    else:
        sys.stdout.write(text)


def _config(args) -> ExperimentConfig:
    overrides = {name: getattr(args, name, None) for name in (
        "model_path", "K", "num_chains", "raise_chains", "init", "dataset_path", "train_path",
        "num_test_examples", "seed", "output_path", "csv_path", "workers", "covariate", "is_samples",
        "alpha", "estimator")}
    if getattr(args, "keep_weights", False):
        overrides["keep_weights"] = True
    return ExperimentConfig.load(args.config, **overrides)


def cmd_ais(args):
    cfg = _config(args).validate()
    model = load_model(cfg.model_path)
    path = build_path(model, cfg)
    mid = model_id(cfg.model_path)
    results = []
    for K in cfg.k_values:
        s = run_ais(path, linear_schedule(K), cfg.num_chains, cfg.seed, cfg.workers)
        results.append(summary_record(mid, "ais", K, cfg.seed, s, cfg.keep_weights))
    _emit(cfg, {"init": path.initial.kind, "results": results})


def _test_indices(cfg, data):
    n = min(cfg.num_test_examples, data.shape[0])
    return np.arange(n)


def cmd_raise(args):
    cfg = _config(args).validate()
    model = load_model(cfg.model_path)
    path = build_path(model, cfg)
    mid = model_id(cfg.model_path)
    if not cfg.dataset_path:
        raise ValueError("raise needs --dataset")
    data = load_dataset(cfg.dataset_path)
    idx = _test_indices(cfg, data)
    results = []
    for K in cfg.k_values:
        sums = raise_examples(path, K, cfg.raise_chains, cfg.seed, idx, data, cfg.workers)
        for i, s in zip(idx, sums):
            rec = summary_record(mid, "raise", K, cfg.seed, s, cfg.keep_weights)
            rec["example_index"] = int(i)
            results.append(rec)
    _emit(cfg, {"init": path.initial.kind, "results": results})


def cmd_compare(args):
    cfg = _config(args)
    report = run_compare(cfg)
    csv_text = emit_plot_data(report) if any("ais_estimate" in r or "raise_estimate" in r
                                             for r in report.rows) else None
    if cfg.output_path:
        write_outputs(cfg, report.to_json(), csv_text)
    else:
        sys.stdout.write(report.to_json())
        if cfg.csv_path and csv_text:
            Path(cfg.csv_path).write_text(csv_text)


def cmd_oracle(args):
    cfg = _config(args).validate()
    model = load_model(cfg.model_path)
    path = build_path(model, cfg)
    doc = {"model_id": model_id(cfg.model_path), "init": path.initial.kind,
           "log_z": fmt(exact.exact_log_partition_any(model))}
    if cfg.dataset_path:
        data = load_dataset(cfg.dataset_path)
        idx = _test_indices(cfg, data)
        examples = []
        small = sum(path.layer_sizes) <= MATRIX_CAP
        for i in idx:
            rec = {"example_index": int(i), "log_prob": fmt(exact.exact_log_prob_v(model, data[i]))}
            if small:
                rec["log_p_ann"] = {str(K): fmt(exact_p_ann_oracle(path, linear_schedule(K), data[i]))
                                    for K in cfg.k_values if K <= MAX_K}
            examples.append(rec)
        doc["examples"] = examples
    _emit(cfg, doc)


def cmd_train(args):
    data = load_dataset(args.data)
    cfg = TrainConfig(num_hidden=args.hidden, algorithm=args.algorithm, cd_steps=args.cd_steps,
                      num_persistent_chains=args.persistent_chains, learning_rate=args.lr,
                      epochs=args.epochs, minibatch_size=args.batch_size, seed=args.seed)
    if args.type == "rbm":
        model = train_rbm(data, cfg)
    else:
        model = train_dbm(data, args.hidden, args.hidden2, cfg)
    save_model(model, args.out)


def cmd_ingest(args):
    images = read_idx_images(args.idx)
    if args.out:
        np.save(args.out, images)
    doc = {"count": int(images.shape[0]), "dim": int(images.shape[1]), "mean_pixel": fmt(images.mean())
           if images.size else None, "binarization": "fixed threshold: byte >= 128 -> 1"}
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")


def _experiment_flags(p, raise_defaults=False):
    p.add_argument("--config", help="experiment config JSON; flags override its fields")
    p.add_argument("--model", dest="model_path")
    p.add_argument("--dataset", dest="dataset_path")
    p.add_argument("--train-data", dest="train_path", help="training set for data base rates")
    p.add_argument("-K", dest="K", type=int, nargs="+", help="number(s) of intermediate distributions")
    p.add_argument("--chains", dest="num_chains", type=int, help="AIS chains")
    p.add_argument("--raise-chains", dest="raise_chains", type=int)
    p.add_argument("--init", choices=["uniform", "dbr"])
    p.add_argument("-n", "--num-test", dest="num_test_examples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("-o", "--output", dest="output_path")
    p.add_argument("--covariate", choices=["auto", "exact", "is"])
    p.add_argument("--is-samples", dest="is_samples", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--keep-weights", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="reverse-ais", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a small RBM or DBM with CD/PCD")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--type", choices=["rbm", "dbm2"], default="rbm")
    p.add_argument("--hidden", type=int, default=16)
    p.add_argument("--hidden2", type=int, default=8)
    p.add_argument("--algorithm", choices=["cd", "pcd"], default="cd")
    p.add_argument("--cd-steps", type=int, default=1)
    p.add_argument("--persistent-chains", type=int, default=100)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--batch-size", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    for name, fn, text in (("ais", cmd_ais, "estimate log Z with AIS"),
                           ("raise", cmd_raise, "RAISE log-probabilities of test examples"),
                           ("oracle", cmd_oracle, "exact values for tiny models")):
        p = sub.add_parser(name, help=text)
        _experiment_flags(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("compare", help="AIS vs RAISE gap report over K")
    _experiment_flags(p)
    p.add_argument("--estimator", choices=["ais", "raise", "both", "oracle"])
    p.add_argument("--csv", dest="csv_path", help="write K,estimator,estimate,stderr plot data")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("ingest", help="read and binarize an IDX image file")
    p.add_argument("idx")
    p.add_argument("--out", help="save the binarized array as .npy")
    p.set_defaults(func=cmd_ingest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "K", None) is not None and len(args.K) == 1:
        args.K = args.K[0]
    try:
        args.func(args)
    except Exception as e:  # noqa: BLE001 - one-line diagnostic, nonzero exit
        sys.stderr.write(f"error: {type(e).__name__}: {e}\n".replace("\n", " ").rstrip() + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
