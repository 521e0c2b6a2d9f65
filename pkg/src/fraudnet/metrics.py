"""Confusion counts and precision / recall / F1 / accuracy.

Class 1 (fraud) is the positive class. A metric whose denominator is zero
is reported as 0.0 and its name added to ``zero_division_flags``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, LabelDomainError


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    def transpose(self):
        return ConfusionMatrix(self.tp, self.fn, self.tn, self.fp)

    def to_dict(self):
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["tp"]), int(d["fp"]), int(d["tn"]), int(d["fn"]))


def _labels(a, name):
    a = np.asarray(a)
    if a.ndim != 1:
        raise DataError(f"{name} must be a 1-D label sequence")
    if a.size and not np.all((a == 0) | (a == 1)):
        raise LabelDomainError(f"{name} contains labels outside {{0, 1}}")
    return a.astype(bool)


def confusion(y_true, y_pred):
    t = _labels(y_true, "y_true")
    p = _labels(y_pred, "y_pred")
    if t.shape != p.shape:
        raise DataError(f"length mismatch: {t.shape[0]} true vs {p.shape[0]} predicted labels")
    tp = int(np.count_nonzero(t & p))
    fp = int(np.count_nonzero(~t & p))
    fn = int(np.count_nonzero(t & ~p))
    return ConfusionMatrix(tp, fp, t.size - tp - fp - fn, fn)


def _ratio(num, den):
    return (num / den, False) if den else (0.0, True)


def precision(cm):
    return _ratio(cm.tp, cm.tp + cm.fp)[0]


def recall(cm):
    return _ratio(cm.tp, cm.tp + cm.fn)[0]


def f1(p, r):
    if p + r == 0:
        return 0.0
    return 2.0 * p * r / (p + r)


@dataclass(frozen=True)
class MetricReport:
    precision: float
    recall: float
    f1: float
    accuracy: float
    confusion: ConfusionMatrix
    zero_division_flags: frozenset = field(default_factory=frozenset)

    def to_dict(self):
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "accuracy": self.accuracy,
            "confusion": self.confusion.to_dict(),
            "zero_division_flags": sorted(self.zero_division_flags),
        }

    def to_text(self, title=None):
        head = f"{'precision':>10} {'recall':>10} {'f1':>10} {'accuracy':>10}"
        row = f"{self.precision:>10.3f} {self.recall:>10.3f} {self.f1:>10.3f} {self.accuracy:>10.3f}"
        lines = ([title] if title else []) + [head, row]
        c = self.confusion
        lines.append(f"tp={c.tp} fp={c.fp} tn={c.tn} fn={c.fn}")
        return "\n".join(lines) + "\n"


def report_from_confusion(cm):
    flags = set()
    p, fp = _ratio(cm.tp, cm.tp + cm.fp)
    r, fr = _ratio(cm.tp, cm.tp + cm.fn)
    a, fa = _ratio(cm.tp + cm.tn, cm.total)
    for name, fired in (("precision", fp), ("recall", fr), ("accuracy", fa)):
        if fired:
            flags.add(name)
    if p + r == 0:
        flags.add("f1")
    return MetricReport(p, r, f1(p, r), a, cm, frozenset(flags))


def evaluate(y_true, y_pred):
    return report_from_confusion(confusion(y_true, y_pred))
