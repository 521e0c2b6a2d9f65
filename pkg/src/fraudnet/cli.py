"""fraudnet: resampling, embedding and classifier experiments on card-fraud data.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical or
training error.
"""

import argparse
import csv
import json
import logging
import os
import sys


from .analysis import class_feature_summary, label_distribution, pearson_correlation
from .classifiers import MODEL_KINDS, fit_model, resolve_hyperparams
from .data import (CREDITCARD_SCHEMA, LABEL_COLUMN, SyntheticConfig, apply_standardizer,
                   fit_standardizer, load_csv, synthesize, write_csv)
from .embedding import TsneConfig, tsne_embed
from .errors import ConfigError, DataError, FraudnetError, NumericalError, StageError
from .metrics import evaluate
from .persistence import ModelArtifact, atomic_write_json, atomic_write_text, load_model, save_model
from .pipeline import (DEFAULT_SCALE_COLUMNS, ExperimentConfig, embedding_csv, resample_strategy,
                       run_pipeline)
from .resampling import random_undersample
from .seeding import derive_seed

log = logging.getLogger("fraudnet")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _read_json(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return doc


def infer_schema(path):
    """The card-transaction schema if the header matches it, else the header
    itself with ``Class`` as the label column."""
    with open(path, newline="", encoding="utf-8-sig") as fh:
        header = [h.strip() for h in next(csv.reader(fh), [])]
    if set(header) == set(CREDITCARD_SCHEMA) or LABEL_COLUMN not in header:
        return CREDITCARD_SCHEMA
    return tuple(h for h in header if h != LABEL_COLUMN) + (LABEL_COLUMN,)


def _load(path):
    return load_csv(path, infer_schema(path))


def _out(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _seed(args, cfg, default=0):
    return args.seed if args.seed is not None else cfg.get("seed", default)


# -------------------------------------------------------------------- commands


def cmd_generate(args):
    cfg = _read_json(args.config)
    for key in ("n_samples", "fraud_rate", "n_features", "class_separation"):
        v = getattr(args, key)
        if v is not None:
            cfg[key] = v
    cfg["seed"] = _seed(args, cfg, 42)
    ds = synthesize(SyntheticConfig(**cfg))
    path = _out(args, args.name)
    write_csv(ds, path)
    print(path)


def cmd_analyze(args):
    cfg = _read_json(args.config)
    ds = _load(args.data)
    n0, n1 = label_distribution(ds)
    atomic_write_json(_out(args, "label_distribution.json"), {"count_0": n0, "count_1": n1, "n": ds.n_samples})
    balanced = random_undersample(ds, derive_seed(_seed(args, cfg), "undersample")).dataset
    for name, part in (("correlation_full", ds), ("correlation_balanced", balanced)):
        cm = pearson_correlation(part)
        if args.format == "json":
            atomic_write_json(_out(args, name + ".json"), cm.to_dict())
        else:
            atomic_write_text(_out(args, name + ".csv"), cm.to_csv())
    summary = class_feature_summary(ds, range(ds.n_features))
    atomic_write_json(_out(args, "class_summary.json"),
                      {"features": list(ds.feature_names),
                       "summary": {str(k): v for k, v in summary.items()}})
    print(f"n={ds.n_samples} count_0={n0} count_1={n1}")


def cmd_resample(args):
    cfg = _read_json(args.config)
    ds = _load(args.data)
    strategy = {"name": args.strategy}
    if args.strategy == "smote":
        strategy["k"] = args.k if args.k is not None else cfg.get("k", 5)
        strategy["target"] = cfg.get("target", "equalize")
    res = resample_strategy(ds, strategy, _seed(args, cfg))
    path = _out(args, "resampled.csv")
    write_csv(res.dataset, path)
    atomic_write_json(_out(args, "provenance.json"), res.provenance_records())
    n1 = int(res.dataset.labels.sum())
    print(f"{path}: count_0={res.dataset.n_samples - n1} count_1={n1} synthetic={int(res.synthetic_mask.sum())}")


def cmd_embed(args):
    cfg = _read_json(args.config)
    ds = _load(args.data)
    seed = _seed(args, cfg)
    if args.balance:
        ds = random_undersample(ds, derive_seed(seed, "undersample")).dataset
    tcfg = {k: v for k, v in cfg.items() if k in TsneConfig.__dataclass_fields__}
    if args.perplexity is not None:
        tcfg["perplexity"] = args.perplexity
    if args.iterations is not None:
        tcfg["iterations"] = args.iterations
    tcfg["seed"] = seed
    emb = tsne_embed(ds.features, TsneConfig(**tcfg))
    if args.format == "json":
        atomic_write_json(_out(args, "tsne_embedding.json"),
                          {"x": emb.coords[:, 0].tolist(), "y": emb.coords[:, 1].tolist(),
                           "label": ds.labels.tolist(), "kl_history": list(emb.kl_history),
                           "kl_iterations": list(emb.kl_iterations)})
    else:
        atomic_write_text(_out(args, "tsne_embedding.csv"), embedding_csv(emb.coords, ds.labels))
    print(f"final KL={emb.kl_history[-1]:.4f}")


def cmd_train(args):
    cfg = _read_json(args.config)
    ds = _load(args.data)
    seed = _seed(args, cfg)
    hp = resolve_hyperparams(args.model, cfg.get("hyperparameters"))
    cols = cfg.get("scale_columns")
    if cols is None:
        cols = [c for c in DEFAULT_SCALE_COLUMNS if c in ds.feature_names]
    scaler = fit_standardizer(ds, [ds.column_index(c) for c in cols])
    scaled = apply_standardizer(ds, scaler)
    res = resample_strategy(scaled, {"name": args.strategy, **cfg.get("strategy_params", {})}, seed)
    model = fit_model(args.model, res.dataset, hp, derive_seed(seed, f"model:{args.model}:{args.strategy}"))
    art = ModelArtifact.from_model(model, hp, ds.feature_names, scaler, seed)
    path = _out(args, f"model_{args.model}.json")
    save_model(art, path)
    print(path)


def cmd_evaluate(args):
    art = load_model(args.model)
    ds = _load(args.data)
    rep = evaluate(ds.labels, art.predict(ds.features, args.threshold))
    if args.format == "csv":
        d = rep.to_dict()
        c = d.pop("confusion")
        d["zero_division_flags"] = ";".join(d["zero_division_flags"])
        d.update(c)
        text = ",".join(d) + "\n" + ",".join(repr(v) if isinstance(v, float) else str(v)
                                             for v in d.values()) + "\n"
        atomic_write_text(_out(args, "metrics.csv"), text)
    else:
        atomic_write_json(_out(args, "metrics.json"), rep.to_dict())
    sys.stdout.write(rep.to_text(f"{art.kind} on {args.data}"))


def cmd_score(args):
    art = load_model(args.model)
    ds = _load(args.data)
    proba = art.predict_proba(ds.features)
    if args.format == "json":
        atomic_write_json(_out(args, "scores.json"), {"probability": proba.tolist()})
    else:
        lines = ["row,probability"] + [f"{i},{p!r}" for i, p in enumerate(proba.tolist())]
        atomic_write_text(_out(args, "scores.csv"), "\n".join(lines) + "\n")
    print(f"scored {ds.n_samples} rows")


def cmd_experiment(args):
    doc = _read_json(args.config)
    if args.seed is not None:
        doc["seed"] = args.seed
    doc["output_dir"] = args.out
    cfg = ExperimentConfig.from_dict(doc)
    report, _ = run_pipeline(cfg)
    sys.stdout.write(report.to_text())
    if args.format == "csv":
        lines = ["model,strategy,evaluation,precision,recall,f1,accuracy,tp,fp,tn,fn"]
        for r in report.rows:
            c = r.confusion
            lines.append(f"{r.model},{r.strategy},{r.evaluation},{r.precision!r},{r.recall!r},"
                         f"{r.f1!r},{r.accuracy!r},{c.tp},{c.fp},{c.tn},{c.fn}")
        atomic_write_text(os.path.join(args.out, "report.csv"), "\n".join(lines) + "\n")


# ---------------------------------------------------------------------- parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, help="unsigned 64-bit seed")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="fraudnet", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", parents=[common], help="write a synthetic transactions CSV")
    g.add_argument("--n-samples", dest="n_samples", type=int)
    g.add_argument("--fraud-rate", dest="fraud_rate", type=float)
    g.add_argument("--n-features", dest="n_features", type=int)
    g.add_argument("--separation", dest="class_separation", type=float)
    g.add_argument("--name", default="synthetic.csv")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", parents=[common], help="correlations, summaries, label counts")
    a.add_argument("--data", required=True)
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("resample", parents=[common], help="apply one resampling strategy")
    r.add_argument("--data", required=True)
    r.add_argument("--strategy", choices=("undersample", "smote"), required=True)
    r.add_argument("--k", type=int)
    r.set_defaults(func=cmd_resample)

    e = sub.add_parser("embed", parents=[common], help="exact t-SNE to CSV")
    e.add_argument("--data", required=True)
    e.add_argument("--balance", action="store_true", help="undersample to 50/50 first")
    e.add_argument("--perplexity", type=float)
    e.add_argument("--iterations", type=int)
    e.set_defaults(func=cmd_embed)

    t = sub.add_parser("train", parents=[common], help="train one model and save its artifact")
    t.add_argument("--data", required=True)
    t.add_argument("--model", choices=MODEL_KINDS, required=True)
    t.add_argument("--strategy", choices=("none", "undersample", "smote"), default="none")
    t.set_defaults(func=cmd_train)

    v = sub.add_parser("evaluate", parents=[common], help="metrics of a saved model on a CSV")
    v.add_argument("--model", required=True)
    v.add_argument("--data", required=True)
    v.add_argument("--threshold", type=float, default=0.5)
    v.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("score", parents=[common], help="per-row probabilities from a saved model")
    s.add_argument("--model", required=True)
    s.add_argument("--data", required=True)
    s.set_defaults(func=cmd_score)

    x = sub.add_parser("experiment", parents=[common], help="full model x strategy comparison")
    x.set_defaults(func=cmd_experiment)
    return p


def _exit_code(exc):
    if isinstance(exc, StageError):
        exc = exc.cause
    if isinstance(exc, NumericalError):
        return EXIT_NUMERIC
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    return EXIT_DATA


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except FraudnetError as exc:
        print(f"fraudnet {args.command}: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except (OSError, UnicodeDecodeError) as exc:
        print(f"fraudnet {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (TypeError, ValueError) as exc:
        print(f"fraudnet {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
