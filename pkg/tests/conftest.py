import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from fraudnet.data import Dataset  # noqa: E402


def make_ds(X, y, names=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return Dataset(X, np.asarray(y), names or [f"f{i}" for i in range(X.shape[1])])


def blobs(n, separation, d=2, seed=0, rate=0.5):
    """Two isotropic unit Gaussians, centroids ``separation`` apart on axis 0."""
    g = np.random.default_rng(seed)
    y = (g.random(n) < rate).astype(int)
    X = g.standard_normal((n, d))
    X[:, 0] += separation * y
    return make_ds(X, y)


@pytest.fixture
def tiny_creditcard_csv(tmp_path):
    from fraudnet.data import CREDITCARD_SCHEMA

    header = ",".join(f'"{c}"' for c in CREDITCARD_SCHEMA)
    rows = []
    for i, lab in enumerate((0, 1, 0)):
        vals = [float(i * 10 + j) / 7 for j in range(30)]
        rows.append(",".join(repr(v) for v in vals) + f',"{lab}"')
    p = tmp_path / "cc.csv"
    p.write_text(header + "\n" + "\n".join(rows) + "\n")
    return p


# one PASS/FAIL line per acceptance criterion at the end of the run

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    n = mark.args[0]
    detail = dict(item.user_properties).get("detail", "")
    if rep.skipped:
        reason = rep.longrepr[-1] if isinstance(rep.longrepr, tuple) else ""
        _CRITERIA.setdefault(n, ("SKIP", detail or reason))
    elif rep.failed:
        _CRITERIA[n] = ("FAIL", detail)
    elif rep.when == "call":
        _CRITERIA.setdefault(n, ("PASS", detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, detail = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {detail}".rstrip())
