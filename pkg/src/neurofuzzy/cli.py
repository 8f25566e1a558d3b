"""Command-line front end for reproducible train/evaluate runs.

A run is described by a flat key=value config file; any key can be
overridden by the matching command-line flag, and flags win.  Every
command is deterministic given (config, seed): repeated runs write
byte-identical model files, reports, and curves.  No command mutates
its inputs.

Exit codes: 0 success, 2 bad config or arguments, 3 data load/split
error, 4 numeric failure, 5 model file/format error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

import numpy as np

from .anfis import (AnfisEnsemble, AnfisModel, TrainingConfig,
                    build_grid_model, class_scores, predict_classes,
                    train_hybrid, train_oaa)
from .data import (CLASS_LABELS, binarize, class_distribution, kfold,
                   load_dataset, passthrough, predefined_split,
                   split_stratified, split_to_json, to_arrays)
from .errors import (ConfigError, DataLoadError, ModelFormatError,
                     NeurofuzzyError, NumericError, SplitError)
from .metrics import auc, cap_consistent, evaluate_multiclass, roc_curve, roc_to_csv
from .mlp import MlpModel, MlpTrainingConfig, build_mlp, mlp_scores, train_backprop
from .model_io import load_model, save_model

__all__ = ["RunConfig", "read_config_file", "build_run_config", "main"]

# key: (type converter, default, allowed values or None, help)
CONFIG_SCHEMA = {
    "dataset": (str, None, None, "dataset CSV path"),
    "encoding": (str, "binarize", ("binarize", "passthrough"),
                 "feature encoding"),
    "threshold": (float, 0.5, None, "binarize threshold"),
    "split": (str, "ratio", ("ratio", "predefined", "kfold", "none"),
              "train/test split mode"),
    "ratio": (float, 0.8, None, "train fraction for split=ratio"),
    "seed": (int, 0, None, "seed for splits, init, and training"),
    "folds": (int, 5, None, "fold count for split=kfold"),
    "fold": (int, 0, None, "held-out fold for split=kfold"),
    "train_count": (int, 258, None, "train rows for split=predefined"),
    "model": (str, "anfis", ("anfis", "mlp"), "model family"),
    "mf_shape": (str, "gauss2", ("gbell", "gauss2", "triangular"),
                 "membership function shape"),
    "mfs_per_input": (int, 2, None, "membership functions per input"),
    "output_mode": (str, "oaa", ("single", "oaa"), "decision head"),
    "consequent_order": (str, "linear", ("linear", "constant"),
                         "rule consequent form"),
    "epochs": (int, 100, None, "training epochs"),
    "learn_rate": (float, 0.01, None, "gradient step size"),
    "ridge": (float, 1e-8, None, "consequent solve regularization"),
    "early_stop": (float, 0.0, None, "stop when train error reaches this"),
    "hidden": (int, 10, None, "hidden layer size"),
    "hidden_activation": (str, "tansig", ("tansig", "logsig"),
                          "hidden activation"),
    "output_activation": (str, "logsig", ("tansig", "logsig"),
                          "output activation"),
    "loss": (str, "mse", ("mse", "cross_entropy"), "training loss"),
    "batch_mode": (str, "full", ("full", "stochastic"), "update granularity"),
    "out_dir": (str, ".", None, "output directory"),
}


@dataclass
class RunConfig:
    dataset: str
    encoding: str
    threshold: float
    split: str
    ratio: float
    seed: int
    folds: int
    fold: int
    train_count: int
    model: str
    mf_shape: str
    mfs_per_input: int
    output_mode: str
    consequent_order: str
    epochs: int
    learn_rate: float
    ridge: float
    early_stop: float
    hidden: int
    hidden_activation: str
    output_activation: str
    loss: str
    batch_mode: str
    out_dir: str


def _convert(key, raw):
    conv, _, allowed, _ = CONFIG_SCHEMA[key]
    try:
        value = conv(raw)
    except (TypeError, ValueError):
        raise ConfigError(
            f"config key {key}: expected {conv.__name__}, got {raw!r}") from None
    if allowed is not None and value not in allowed:
        raise ConfigError(
            f"config key {key}: {value!r} not one of {'/'.join(allowed)}")
    return value


def read_config_file(path):
    """Parse a flat key=value file; # starts a comment."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{line_no}: expected key = value")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in CONFIG_SCHEMA:
            raise ConfigError(f"{path}:{line_no}: unknown config key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{line_no}: duplicate config key {key!r}")
        values[key] = _convert(key, raw)
    return values


def build_run_config(config_path=None, overrides=None):
    """Defaults, then the file, then explicit flag overrides; flags win."""
    merged = {key: entry[1] for key, entry in CONFIG_SCHEMA.items()}
    if config_path is not None:
        merged.update(read_config_file(config_path))
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = _convert(key, value)
    return RunConfig(**merged)


def _overrides_from_args(args):
    return {key: getattr(args, key, None) for key in CONFIG_SCHEMA}


def _add_config_flags(parser, keys=None):
    for key in (keys or CONFIG_SCHEMA):
        conv, _, allowed, help_text = CONFIG_SCHEMA[key]
        parser.add_argument(
            "--" + key.replace("_", "-"), dest=key, default=None,
            metavar=key.upper(),
            help=help_text + (f" ({'/'.join(allowed)})" if allowed else ""))


def _load_encoded(cfg):
    if not cfg.dataset:
        raise ConfigError("no dataset configured (set dataset= or --dataset)")
    raw = load_dataset(cfg.dataset)
    if cfg.encoding == "binarize":
        return raw, binarize(raw, cfg.threshold)
    return raw, passthrough(raw)


def _build_splits(cfg, encoded):
    """Splits to run, as a list of (train, test, split-or-None)."""
    if cfg.split == "none":
        return [(encoded, [], None)]
    if cfg.split == "ratio":
        split = split_stratified(encoded, cfg.ratio, cfg.seed)
        return [(split.train, split.test, split)]
    if cfg.split == "predefined":
        split = predefined_split(encoded, cfg.train_count)
        return [(split.train, split.test, split)]
    splits = kfold(encoded, cfg.folds, cfg.seed)
    if not 0 <= cfg.fold < cfg.folds:
        raise ConfigError(f"fold {cfg.fold} out of range for folds={cfg.folds}")
    split = splits[cfg.fold]
    return [(split.train, split.test, split)]


def _input_range(cfg):
    # binarized features live in {-1, +1}; raw attributes in [0, 1]
    return (-1.0, 1.0) if cfg.encoding == "binarize" else (0.0, 1.0)


def _train_one(cfg, train_samples, test_samples):
    """Returns (model, trace dict)."""
    if cfg.model == "anfis":
        proto = build_grid_model(
            cfg.mf_shape, cfg.mfs_per_input, _input_range(cfg), seed=cfg.seed,
            input_dim=5, consequent_order=cfg.consequent_order)
        tconf = TrainingConfig(epochs=cfg.epochs, learn_rate=cfg.learn_rate,
                               ridge=cfg.ridge, seed=cfg.seed,
                               early_stop_rmse=cfg.early_stop)
        if cfg.output_mode == "oaa":
            model, traces = train_oaa(proto, train_samples, test_samples, tconf)
            return model, {"members": [t.to_dict() for t in traces]}
        model, trace = train_hybrid(proto, train_samples, test_samples, tconf)
        return model, trace.to_dict()

    proto = build_mlp(hidden=cfg.hidden, seed=cfg.seed, input_dim=5,
                      n_classes=4, hidden_activation=cfg.hidden_activation,
                      output_activation=cfg.output_activation)
    mconf = MlpTrainingConfig(epochs=cfg.epochs, learn_rate=cfg.learn_rate,
                              loss=cfg.loss, batch_mode=cfg.batch_mode,
                              seed=cfg.seed, early_stop_mse=cfg.early_stop)
    model, trace = train_backprop(proto, train_samples, test_samples, mconf)
    return model, trace.to_dict()


def _model_outputs(model, X):
    """(predicted class indices, per-class score matrix)."""
    if isinstance(model, (AnfisEnsemble, AnfisModel)):
        scores = class_scores(model, X)
        if isinstance(model, AnfisModel):
            return predict_classes(model, X), scores
        return np.argmax(scores, axis=1), scores
    if isinstance(model, MlpModel):
        scores = mlp_scores(model, X)
        return np.argmax(scores, axis=1), scores
    raise ModelFormatError(f"cannot evaluate model of type {type(model).__name__}")


def _accuracy_line(model, samples):
    X, _, _, labels = to_arrays(samples)
    predicted, _ = _model_outputs(model, X)
    right = int(np.sum(predicted == labels))
    return right, len(samples)


def _write_text(path, text):
    Path(path).write_text(text, encoding="utf-8")
    print(f"wrote {path}")


def _final_error(trace_dict):
    if "members" in trace_dict:
        return [m["train_rmse"][-1] for m in trace_dict["members"]]
    key = "train_rmse" if "train_rmse" in trace_dict else "train_mse"
    return trace_dict[key][-1]


def cmd_train(args):
    cfg = build_run_config(args.config, _overrides_from_args(args))
    _, encoded = _load_encoded(cfg)
    train_samples, test_samples, split = _build_splits(cfg, encoded)[0]

    model, trace_dict = _train_one(cfg, train_samples, test_samples)

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_model(model, out_dir / "model.json")
    print(f"wrote {out_dir / 'model.json'}")
    _write_text(out_dir / "trace.json",
                json.dumps(trace_dict, indent=2) + "\n")
    if split is not None:
        _write_text(out_dir / "split.json", split_to_json(split))

    final = _final_error(trace_dict)
    if isinstance(final, list):
        for k, value in enumerate(final):
            print(f"member {k} final train rmse {value:.6f}")
    else:
        kind = "rmse" if cfg.model == "anfis" else "mse"
        print(f"final train {kind} {final:.6f}")
    if test_samples:
        right, n = _accuracy_line(model, test_samples)
        print(f"test accuracy {right / n:.4f} ({right}/{n})")
    return 0


def _evaluation_samples(cfg, encoded):
    if cfg.split == "none":
        return encoded
    train_samples, test_samples, _ = _build_splits(cfg, encoded)[0]
    return test_samples


def cmd_evaluate(args):
    model = load_model(args.model_file)
    cfg = build_run_config(args.config, _overrides_from_args(args))
    _, encoded = _load_encoded(cfg)
    samples = _evaluation_samples(cfg, encoded)
    if not samples:
        raise SplitError("evaluation selection is empty")

    X, _, _, labels = to_arrays(samples)
    predicted, scores = _model_outputs(model, X)
    report = evaluate_multiclass(labels, predicted, scores,
                                 class_names=list(CLASS_LABELS))
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    if args.out and args.out != "-":
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_roc(args):
    model = load_model(args.model_file)
    cfg = build_run_config(args.config, _overrides_from_args(args))
    _, encoded = _load_encoded(cfg)
    samples = _evaluation_samples(cfg, encoded)
    if not samples:
        raise SplitError("evaluation selection is empty")
    k = args.class_index
    if not 0 <= k <= 3:
        raise ConfigError(f"class index {k} out of range 0..3")

    X, _, _, labels = to_arrays(samples)
    _, scores = _model_outputs(model, X)
    positives = (labels == k).astype(int)
    if positives.sum() in (0, len(positives)):
        raise NumericError(
            f"class {CLASS_LABELS[k]} needs both positives and negatives "
            "in the evaluation set")
    curve = roc_curve(scores[:, k], positives)
    _write_text(args.out, roc_to_csv(curve))
    print(f"class {k} auc {auc(curve)!r}")
    return 0


def _load_baselines(path):
    if path is None:
        ref = resources.files("neurofuzzy") / "published" / "baselines.json"
        payload = json.loads(ref.read_text(encoding="utf-8"))
    else:
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read baselines file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"baselines file is not valid JSON: {exc}") from exc
    for field in ("test_size", "rows"):
        if field not in payload:
            raise ConfigError(f"baselines file is missing {field!r}")
    return payload


def _compare_run(config_path):
    """One computed comparison row; kfold configs contribute every fold."""
    cfg = build_run_config(config_path)
    _, encoded = _load_encoded(cfg)
    if cfg.split == "kfold":
        runs = [(s.train, s.test, s) for s in kfold(encoded, cfg.folds, cfg.seed)]
    else:
        runs = _build_splits(cfg, encoded)

    wrong_counts, sizes = [], []
    for train_samples, test_samples, _ in runs:
        if not test_samples:
            raise SplitError("comparison run has an empty test set")
        model, _ = _train_one(cfg, train_samples, test_samples)
        right, n = _accuracy_line(model, test_samples)
        wrong_counts.append(n - right)
        sizes.append(n)

    mwcs = float(np.mean(wrong_counts))
    cap = 100.0 * (1.0 - sum(wrong_counts) / sum(sizes))
    per_run_cap = [100.0 * (1.0 - w / n) for w, n in zip(wrong_counts, sizes)]
    return {
        "method": f"{cfg.model}:{Path(config_path).stem}",
        "status": "computed",
        "runs": len(runs),
        "test_size": sizes[0] if len(set(sizes)) == 1 else float(np.mean(sizes)),
        "per_run_wrong": wrong_counts,
        "per_run_cap": per_run_cap,
        "mwcs": mwcs,
        "cap_percent": cap,
        "best_cap_percent": max(per_run_cap),
    }


def _format_compare_text(rows):
    lines = [f"{'method':<24} {'mwcs':>8} {'cap%':>8} {'consistent':>10}  status"]
    for row in rows:
        if row["status"] == "failed":
            lines.append(f"{row['method']:<24} {'-':>8} {'-':>8} {'-':>10}  "
                         f"failed: {row['error']}")
            continue
        flag = row.get("cap_consistent")
        flag_text = "-" if flag is None else ("yes" if flag else "no")
        lines.append(f"{row['method']:<24} {row['mwcs']:>8.2f} "
                     f"{row['cap_percent']:>8.2f} {flag_text:>10}  {row['status']}")
    return "\n".join(lines) + "\n"


def cmd_compare(args):
    baselines = _load_baselines(args.baselines)
    rows, worst = [], 0
    for config_path in args.configs:
        try:
            rows.append(_compare_run(config_path))
        except NeurofuzzyError as exc:
            rows.append({"method": Path(config_path).stem,
                         "status": "failed", "error": str(exc)})
            worst = max(worst, _EXIT_CODES.get(type(exc), 2))

    test_size = baselines["test_size"]
    for base in baselines["rows"]:
        # a full ulp at the row's printed precision tolerates rounding
        # either way; anything beyond it is genuinely inconsistent
        if "cap_decimals" in base:
            tol = 10.0 ** (-base["cap_decimals"])
        else:
            tol = 0.005
        rows.append({
            "method": base["method"],
            "status": "published",
            "test_size": test_size,
            "mwcs": base["mwcs"],
            "cap_percent": base["cap_percent"],
            "cap_consistent": cap_consistent(
                base["mwcs"], base["cap_percent"], test_size, tol=tol),
        })

    payload = {"source": baselines.get("source"), "rows": rows}
    text = _format_compare_text(rows)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_text(out_dir / "comparison.json",
                json.dumps(payload, indent=2) + "\n")
    _write_text(out_dir / "comparison.txt", text)
    sys.stdout.write(text)
    return worst


def cmd_dataset_stats(args):
    cfg = build_run_config(args.config, _overrides_from_args(args))
    raw, _ = _load_encoded(cfg)
    counts = class_distribution(raw)
    matrix = np.array([s.features for s in raw])
    names = ("STG", "SCG", "STR", "LPR", "PEG")
    stats = {
        "n_samples": len(raw),
        "class_counts": {label: int(c) for label, c in zip(CLASS_LABELS, counts)},
        "attributes": {
            name: {"min": float(col.min()), "max": float(col.max()),
                   "mean": float(col.mean())}
            for name, col in zip(names, matrix.T)
        },
    }
    sys.stdout.write(json.dumps(stats, indent=2) + "\n")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="neurofuzzy",
        description="Train and evaluate fuzzy-rule and dense-network "
                    "knowledge-level classifiers, reproducibly.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a model from a run config")
    p_train.add_argument("--config", default=None, help="key=value run config")
    _add_config_flags(p_train)
    p_train.set_defaults(handler=cmd_train)

    p_eval = sub.add_parser("evaluate", help="evaluate a saved model")
    p_eval.add_argument("model_file", help="model JSON path")
    p_eval.add_argument("--config", default=None, help="key=value run config")
    p_eval.add_argument("--out", default="-",
                        help="report path (default: stdout)")
    _add_config_flags(p_eval)
    p_eval.set_defaults(handler=cmd_evaluate)

    p_roc = sub.add_parser("roc", help="emit one class's ROC curve as CSV")
    p_roc.add_argument("model_file", help="model JSON path")
    p_roc.add_argument("--class-index", type=int, required=True,
                       help="positive class 0..3")
    p_roc.add_argument("--out", required=True, help="CSV output path")
    p_roc.add_argument("--config", default=None, help="key=value run config")
    _add_config_flags(p_roc)
    p_roc.set_defaults(handler=cmd_roc)

    p_cmp = sub.add_parser(
        "compare", help="train each config and tabulate against published rows")
    p_cmp.add_argument("configs", nargs="*", help="run config files")
    p_cmp.add_argument("--out-dir", default=".", help="where to write the table")
    p_cmp.add_argument("--baselines", default=None,
                       help="published constants JSON (default: packaged)")
    p_cmp.set_defaults(handler=cmd_compare)

    p_stats = sub.add_parser("dataset-stats", help="summarize a dataset file")
    p_stats.add_argument("--config", default=None, help="key=value run config")
    _add_config_flags(p_stats)
    p_stats.set_defaults(handler=cmd_dataset_stats)
    return parser


_EXIT_CODES = {
    ConfigError: 2,
    DataLoadError: 3,
    SplitError: 3,
    NumericError: 4,
    ModelFormatError: 5,
}


def _exit_code_for(exc):
    for klass, code in _EXIT_CODES.items():
        if isinstance(exc, klass):
            return code
    return 2


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except NeurofuzzyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code_for(exc)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
