"""End-to-end model-comparison experiment.

Stage order is fixed: load or synthesize -> stratified split -> fit the
scaler on the train fold and apply it to both folds -> IQR filter on the
train fold's fraud rows -> for each strategy, resample the train fold ->
fit every model -> evaluate on the untouched test fold. The analysis
outputs (label counts, correlations, class summaries, t-SNE of the
balanced train subsample) are written next to the report.

Every random draw is seeded from ``config.seed`` through
:func:`fraudnet.seeding.derive_seed` with a stage-specific name, so the
whole output directory is a pure function of the configuration.
"""

import contextlib
import copy
import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .analysis import class_feature_summary, label_distribution, pearson_correlation
from .classifiers import MODEL_KINDS, fit_model, resolve_hyperparams
from .data import (SyntheticConfig, apply_standardizer, fit_standardizer, load_csv,
                   stratified_split_indices, synthesize)
from .embedding import TsneConfig, tsne_embed
from .errors import ConfigError, FraudnetError, StageError
from .metrics import ConfusionMatrix, evaluate
from .outliers import iqr_filter
from .persistence import atomic_write_json, atomic_write_text
from .resampling import ORIGINAL, ResampleOutput, SmoteConfig, random_undersample, smote
from .seeding import check_seed, derive_seed

log = logging.getLogger(__name__)

STRATEGIES = ("none", "undersample", "smote")
DEFAULT_SCALE_COLUMNS = ("Time", "Amount")
DEFAULT_OUTLIER_FEATURES = ("V14", "V12", "V10")
DISPLAY = {"nn": "NN", "lr": "LR", "knn": "KNN", "tree": "Decision Tree", "svm": "SVM",
           "none": "-", "undersample": "Random Under-Sampling", "smote": "SMOTE"}


def _default_models():
    return [{"name": k} for k in ("knn", "svm", "tree", "lr", "nn")]


def _default_strategies():
    return [{"name": "none"}, {"name": "undersample"}, {"name": "smote", "k": 5}]


@dataclass
class ExperimentConfig:
    """JSON-shaped experiment description; see README for the schema."""

    data: dict = field(default_factory=lambda: {"synthetic": {
        "n_samples": 20_000, "fraud_rate": 0.01, "n_features": 30, "class_separation": 2.0}})
    test_fraction: float = 0.2
    scale_columns: object = None
    outliers: dict = field(default_factory=lambda: {"enabled": True, "features": None,
                                                    "multiplier": 1.5, "class_scope": 1})
    strategies: list = field(default_factory=_default_strategies)
    models: list = field(default_factory=_default_models)
    threshold: float = 0.5
    balanced_eval: bool = False
    tsne: dict = field(default_factory=lambda: {"enabled": True})
    seed: int = 42
    output_dir: str = "experiment_out"

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown experiment config keys: {sorted(unknown)}")
        cfg = cls(**copy.deepcopy(d))
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: malformed JSON config ({exc})") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_dict(doc)

    def to_dict(self):
        return {k: copy.deepcopy(getattr(self, k)) for k in self.__dataclass_fields__}

    def config_hash(self):
        d = self.to_dict()
        d.pop("output_dir")
        canon = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def validate(self):
        try:
            check_seed(self.seed)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        if not isinstance(self.data, dict) or len(set(self.data) & {"csv", "synthetic"}) != 1:
            raise ConfigError("data must name exactly one of 'csv' or 'synthetic'")
        if not 0 < self.test_fraction < 1:
            raise ConfigError(f"test_fraction must lie in (0, 1), got {self.test_fraction}")
        if not self.models:
            raise ConfigError("at least one model is required")
        if not self.strategies:
            raise ConfigError("at least one resampling strategy is required")
        seen = set()
        for m in self.models:
            name = m.get("name")
            if name not in MODEL_KINDS:
                raise ConfigError(f"unknown model {name!r}; expected one of {MODEL_KINDS}")
            if name in seen:
                raise ConfigError(f"model {name!r} listed twice")
            seen.add(name)
            resolve_hyperparams(name, m.get("params"))
        seen = set()
        for s in self.strategies:
            name = s.get("name")
            if name not in STRATEGIES:
                raise ConfigError(f"unknown strategy {name!r}; expected one of {STRATEGIES}")
            if name in seen:
                raise ConfigError(f"strategy {name!r} listed twice")
            seen.add(name)
            extra = set(s) - ({"name", "k", "target"} if name == "smote" else {"name"})
            if extra:
                raise ConfigError(f"unknown options for strategy {name!r}: {sorted(extra)}")
        if not 0 <= self.threshold <= 1:
            raise ConfigError("threshold must lie in [0, 1]")


@dataclass
class ReportRow:
    model: str
    strategy: str
    evaluation: str
    precision: float
    recall: float
    f1: float
    accuracy: float
    confusion: ConfusionMatrix
    zero_division_flags: tuple
    wall_time: float = 0.0

    def to_dict(self):
        # wall_time is deliberately left out: report.json must be reproducible
        return {
            "model": self.model, "strategy": self.strategy, "evaluation": self.evaluation,
            "precision": self.precision, "recall": self.recall, "f1": self.f1,
            "accuracy": self.accuracy, "confusion": self.confusion.to_dict(),
            "zero_division_flags": list(self.zero_division_flags),
        }


@dataclass
class ExperimentReport:
    rows: list
    config_hash: str
    seed: int
    strategy_sizes: dict = field(default_factory=dict)

    def row(self, model, strategy, evaluation="test"):
        for r in self.rows:
            if (r.model, r.strategy, r.evaluation) == (model, strategy, evaluation):
                return r
        raise KeyError((model, strategy, evaluation))

    def to_dict(self):
        return {
            "environment": {"config_hash": self.config_hash, "seed": self.seed,
                            "package_version": __version__},
            "training_sets": self.strategy_sizes,
            "rows": [r.to_dict() for r in self.rows],
        }

    def to_text(self):
        head = ("Model", "Resampling", "Eval", "Precision", "Recall", "F1-score", "Accuracy")
        body = [(DISPLAY.get(r.model, r.model), DISPLAY.get(r.strategy, r.strategy), r.evaluation,
                 f"{r.precision:.3f}", f"{r.recall:.3f}", f"{r.f1:.3f}", f"{r.accuracy:.3f}")
                for r in self.rows]
        widths = [max(len(x[i]) for x in [head] + body) for i in range(len(head))]
        fmt = lambda cells: "  ".join(c.ljust(w) if i < 3 else c.rjust(w)
                                      for i, (c, w) in enumerate(zip(cells, widths))).rstrip()
        lines = [fmt(head), fmt(tuple("-" * w for w in widths))] + [fmt(b) for b in body]
        return "\n".join(lines) + "\n"


@contextlib.contextmanager
def _stage(name):
    """Re-raise package errors from inside a stage as StageError(name, cause)."""
    try:
        yield
    except StageError:
        raise
    except FraudnetError as exc:
        raise StageError(name, exc) from exc


def _load(cfg):
    if "csv" in cfg.data:
        src = cfg.data["csv"]
        path, schema = (src, None) if isinstance(src, str) else (src["path"], src.get("schema"))
        return load_csv(path) if schema is None else load_csv(path, schema)
    syn = dict(cfg.data["synthetic"])
    syn.setdefault("seed", derive_seed(cfg.seed, "synthesize"))
    try:
        return synthesize(SyntheticConfig(**syn))
    except TypeError as exc:
        raise ConfigError(f"bad synthetic config: {exc}") from None


def _column_indices(ds, names, defaults, what):
    if names is None:
        return [ds.feature_names.index(c) for c in defaults if c in ds.feature_names]
    out = []
    for c in names:
        if c not in ds.feature_names:
            raise ConfigError(f"{what}: no feature named {c!r}")
        out.append(ds.feature_names.index(c))
    return out


def resample_strategy(ds, strategy, seed):
    name = strategy["name"]
    if name == "none":
        return ResampleOutput.identity(ds)
    if name == "undersample":
        return random_undersample(ds, derive_seed(seed, "undersample"))
    return smote(ds, SmoteConfig(k=strategy.get("k", 5), target=strategy.get("target", "equalize"),
                                 seed=derive_seed(seed, "smote")))


def _row_ids(res, parent_ids):
    ids = np.full(res.kind.shape[0], -1, dtype=np.int64)
    orig = res.kind == ORIGINAL
    ids[orig] = parent_ids[res.base[orig]]
    return ids


def _summary_json(summary):
    return {str(label): per for label, per in summary.items()}


def embedding_csv(coords, labels):
    lines = ["x,y,label"] + [f"{x!r},{y!r},{int(l)}" for (x, y), l in zip(coords.tolist(), labels.tolist())]
    return "\n".join(lines) + "\n"


def run_pipeline(config, write=True):
    """Run the experiment; returns ``(report, stage_outputs)``.

    With ``write=True`` every emitted file lands in ``config.output_dir``.
    """
    cfg = config if isinstance(config, ExperimentConfig) else ExperimentConfig.from_dict(config)
    cfg.validate()
    seed = cfg.seed
    out = {}

    with _stage("load"):
        ds = _load(cfg)
    with _stage("split"):
        train_ids, test_ids = stratified_split_indices(ds.labels, cfg.test_fraction,
                                                       derive_seed(seed, "split"))
        train, test = ds.subset(train_ids), ds.subset(test_ids)
    with _stage("scale"):
        cols = _column_indices(train, cfg.scale_columns, DEFAULT_SCALE_COLUMNS, "scale_columns")
        scaler = fit_standardizer(train, cols)
        train, test = apply_standardizer(train, scaler), apply_standardizer(test, scaler)

    n0, n1 = label_distribution(ds)
    t0, t1 = label_distribution(train)
    e0, e1 = label_distribution(test)
    out["label_distribution"] = {"count_0": n0, "count_1": n1, "n": ds.n_samples,
                                 "train": {"count_0": t0, "count_1": t1},
                                 "test": {"count_0": e0, "count_1": e1}}
    summary_features = list(range(train.n_features))
    with _stage("analysis"):
        before = class_feature_summary(train, summary_features)

    ocfg = {"enabled": True, "features": None, "multiplier": 1.5, "class_scope": 1, **(cfg.outliers or {})}
    with _stage("outliers"):
        if ocfg["enabled"]:
            feats = _column_indices(train, ocfg["features"], DEFAULT_OUTLIER_FEATURES, "outliers.features")
            filtered, oreport = iqr_filter(train, feats, ocfg["multiplier"], ocfg["class_scope"])
            removed = np.asarray(oreport.removed_row_indices, dtype=np.int64)
            out["outlier_report"] = {"enabled": True, **oreport.to_dict(),
                                     "removed_original_rows": train_ids[removed].tolist()}
            train_ids = np.delete(train_ids, removed)
            train = filtered
        else:
            out["outlier_report"] = {"enabled": False}

    with _stage("analysis"):
        balanced = random_undersample(train, derive_seed(seed, "undersample"))
        out["correlation_full"] = pearson_correlation(train)
        out["correlation_balanced"] = pearson_correlation(balanced.dataset)
        out["class_summary"] = {"features": [train.feature_names[i] for i in summary_features],
                                "before_filter": _summary_json(before),
                                "after_filter": _summary_json(class_feature_summary(train, summary_features))}

    tcfg = dict(cfg.tsne or {})
    if tcfg.pop("enabled", True):
        with _stage("embedding"):
            tcfg.setdefault("seed", derive_seed(seed, "tsne"))
            emb = tsne_embed(balanced.dataset.features, TsneConfig(**tcfg))
            out["tsne_embedding"] = (emb, balanced.dataset.labels)

    eval_sets = [("test", test)]
    if cfg.balanced_eval:
        eval_sets.append(("balanced_test", random_undersample(test, derive_seed(seed, "balanced_test")).dataset))

    rows, sizes, confusions = [], {}, {}
    test_id_set = set(test_ids.tolist())
    for strategy in cfg.strategies:
        sname = strategy["name"]
        with _stage(f"resample:{sname}"):
            res = resample_strategy(train, strategy, seed)
            ids = _row_ids(res, train_ids)
            if test_id_set.intersection(ids[ids >= 0].tolist()):
                raise ConfigError("test rows leaked into a resampled training set")
        rd = res.dataset
        sizes[sname] = {"n_rows": rd.n_samples, "count_0": int(rd.n_samples - rd.labels.sum()),
                        "count_1": int(rd.labels.sum()), "n_synthetic": int(res.synthetic_mask.sum())}
        for model_def in cfg.models:
            mname = model_def["name"]
            with _stage(f"fit:{mname}:{sname}"):
                started = time.perf_counter()
                model = fit_model(mname, rd, model_def.get("params"), derive_seed(seed, f"model:{mname}:{sname}"))
                for ename, eds in eval_sets:
                    rep = evaluate(eds.labels, model.predict(eds.features, cfg.threshold))
                    rows.append(ReportRow(mname, sname, ename, rep.precision, rep.recall, rep.f1,
                                          rep.accuracy, rep.confusion, tuple(sorted(rep.zero_division_flags))))
                    suffix = "" if ename == "test" else f"_{ename.split('_')[0]}"
                    confusions[f"confusion_{mname}_{sname}{suffix}.json"] = {
                        "model": mname, "strategy": sname, "evaluation": ename, **rep.confusion.to_dict()}
                elapsed = time.perf_counter() - started
                for r in rows[-len(eval_sets):]:
                    r.wall_time = elapsed
                log.info("%s + %s: f1=%.3f recall=%.3f (%.1fs)", mname, sname,
                         rows[-len(eval_sets)].f1, rows[-len(eval_sets)].recall, elapsed)

    report = ExperimentReport(rows, cfg.config_hash(), seed, sizes)
    out["confusions"] = confusions
    out["report"] = report
    if write:
        emit_plot_data(out, cfg.output_dir)
    return report, out


def emit_plot_data(outputs, output_dir):
    """Write every stage output under its fixed file name (atomic, idempotent)."""
    os.makedirs(output_dir, exist_ok=True)
    p = lambda name: os.path.join(output_dir, name)
    if "label_distribution" in outputs:
        atomic_write_json(p("label_distribution.json"), outputs["label_distribution"])
    if "correlation_full" in outputs:
        atomic_write_text(p("correlation_full.csv"), outputs["correlation_full"].to_csv())
    if "correlation_balanced" in outputs:
        atomic_write_text(p("correlation_balanced.csv"), outputs["correlation_balanced"].to_csv())
    if "class_summary" in outputs:
        atomic_write_json(p("class_summary.json"), outputs["class_summary"])
    if "outlier_report" in outputs:
        atomic_write_json(p("outlier_report.json"), outputs["outlier_report"])
    if "tsne_embedding" in outputs:
        emb, labels = outputs["tsne_embedding"]
        atomic_write_text(p("tsne_embedding.csv"), embedding_csv(emb.coords, labels))
    for name, doc in outputs.get("confusions", {}).items():
        atomic_write_json(p(name), doc)
    if "report" in outputs:
        atomic_write_json(p("report.json"), outputs["report"].to_dict())
        atomic_write_text(p("report.txt"), outputs["report"].to_text())
    return sorted(os.listdir(output_dir))
