"""Tukey-fence (IQR) outlier removal restricted to one class."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError


def quantile(values, p):
    """Linear-interpolation quantile at position ``(n - 1) * p`` of the sorted data."""
    v = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if v.size == 0:
        raise DataError("quantile of an empty sequence")
    if not np.all(np.isfinite(v)):
        raise DataError("quantile input contains non-finite values")
    pos = (v.size - 1) * p
    lo = int(math.floor(pos))
    hi = min(lo + 1, v.size - 1)
    frac = pos - lo
    if frac == 0.0 or v[lo] == v[hi]:
        return float(v[lo])
    return float(v[lo] + frac * (v[hi] - v[lo]))


def quartiles(values):
    return quantile(values, 0.25), quantile(values, 0.75)


@dataclass(frozen=True)
class FeatureFence:
    feature: str
    q1: float
    q3: float
    iqr: float
    lower_fence: float
    upper_fence: float


@dataclass(frozen=True)
class OutlierReport:
    multiplier: float
    class_scope: int
    fences: tuple
    removed_row_indices: tuple = field(default_factory=tuple)

    @property
    def removed_count(self):
        return len(self.removed_row_indices)

    def to_dict(self):
        return {
            "multiplier": self.multiplier,
            "class_scope": self.class_scope,
            "features": [
                {"feature": f.feature, "q1": f.q1, "q3": f.q3, "iqr": f.iqr,
                 "lower_fence": f.lower_fence, "upper_fence": f.upper_fence}
                for f in self.fences
            ],
            "removed_row_indices": list(self.removed_row_indices),
            "removed_count": self.removed_count,
        }


def iqr_filter(ds, features, multiplier=1.5, class_scope=1):
    """Drop ``class_scope`` rows lying outside ``[q1 - m*iqr, q3 + m*iqr]`` on
    any listed feature. Fences come from the ``class_scope`` rows only and are
    computed once, before anything is removed. Other rows pass through.
    """
    if not multiplier > 0:
        raise ConfigError(f"IQR multiplier must be > 0, got {multiplier}")
    features = [int(f) for f in features]
    for f in features:
        if not 0 <= f < ds.n_features:
            raise DataError(f"feature index {f} out of range for {ds.n_features} features")
    scope = ds.class_indices(class_scope)
    if scope.size == 0:
        raise DataError(f"class {class_scope} absent from data")

    fences = []
    outside = np.zeros(ds.n_samples, dtype=bool)
    for f in features:
        col = ds.features[scope, f]
        q1, q3 = quartiles(col)
        iqr = q3 - q1
        lower, upper = q1 - multiplier * iqr, q3 + multiplier * iqr
        fences.append(FeatureFence(ds.feature_names[f], q1, q3, iqr, lower, upper))
        outside[scope] |= (col < lower) | (col > upper)

    removed = np.flatnonzero(outside)
    kept = np.flatnonzero(~outside)
    out = ds if removed.size == 0 else ds.subset(kept)
    report = OutlierReport(float(multiplier), int(class_scope), tuple(fences),
                           tuple(int(i) for i in removed))
    return out, report
