"""Exact O(n^2) t-SNE into two dimensions.

Gaussian input affinities are calibrated per point by bisection on the
log-precision so that 2**H(row) hits the target perplexity; the embedding
is optimised by gradient descent on KL(P || Q) with momentum, early
exaggeration and per-parameter gains, and re-centred every iteration.
"""

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CalibrationError, ConfigError, DataError
from .seeding import check_seed, rng

log = logging.getLogger(__name__)

FLOOR = 1e-12
MAX_POINTS = 5000
PERPLEXITY_RTOL = 1e-5
MAX_BISECTIONS = 64
KL_EVERY = 50


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    early_exaggeration_factor: float = 12.0
    early_exaggeration_iters: int = 250
    momentum_initial: float = 0.5
    momentum_final: float = 0.8
    momentum_switch_iter: int = 250
    seed: int = 0
    max_points: int = MAX_POINTS

    def validated(self, n):
        """Check ranges and clamp the perplexity to ``(n - 1) / 3``."""
        if not self.perplexity > 1:
            raise ConfigError(f"perplexity must be > 1, got {self.perplexity}")
        if self.iterations < 1:
            raise ConfigError("iterations must be positive")
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate must be > 0")
        if self.early_exaggeration_factor < 1:
            raise ConfigError("early_exaggeration_factor must be >= 1")
        for m in (self.momentum_initial, self.momentum_final):
            if not 0 <= m < 1:
                raise ConfigError(f"momentum must lie in [0, 1), got {m}")
        try:
            check_seed(self.seed)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        bound = (n - 1) / 3.0
        if self.perplexity > bound:
            log.info("perplexity %.3g clamped to (n-1)/3 = %.3g", self.perplexity, bound)
            return replace(self, perplexity=bound)
        return self


@dataclass(frozen=True, eq=False)
class Embedding:
    coords: np.ndarray
    kl_history: tuple
    kl_iterations: tuple = ()


def _sq_dists(X):
    sq = np.einsum("ij,ij->i", X, X)
    D = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(D, 0.0, out=D)
    D = (D + D.T) / 2.0
    np.fill_diagonal(D, 0.0)
    return D


def _row_entropy_bits(p):
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def _row_given_beta(d, beta):
    w = np.exp(-beta * d)
    s = w.sum()
    return w / s


def conditional_affinities(X, perplexity):
    """Row-stochastic matrix of Gaussian conditionals p_{j|i}.

    Distances are squared Euclidean, shifted by each row's minimum and scaled
    by the row mean before the precision search (both leave the
    distribution family unchanged). A row whose remaining distances are all
    equal is uniform whatever the bandwidth and is returned as such, unless
    every distance is zero, which is a degenerate row.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < 4:
        raise DataError(f"t-SNE affinities need at least 4 points, got {n}")
    if not perplexity > 1:
        raise ConfigError(f"perplexity must be > 1, got {perplexity}")
    P = np.zeros((n, n))
    target = math.log2(perplexity)
    for i in range(n):
        diff = np.delete(X, i, axis=0) - X[i]
        d = np.einsum("ij,ij->i", diff, diff)
        if np.all(d == 0.0):
            raise CalibrationError(i, f"row {i}: every other point coincides with point {i}")
        d = d - d.min()
        scale = d.mean()
        if scale == 0.0:
            row = np.full(n - 1, 1.0 / (n - 1))
        else:
            d = d / scale
            lo, hi = -50.0, 50.0
            row = None
            for _ in range(MAX_BISECTIONS):
                mid = 0.5 * (lo + hi)
                cand = _row_given_beta(d, math.exp(mid))
                h = _row_entropy_bits(cand)
                if abs(2.0**h - perplexity) / perplexity < PERPLEXITY_RTOL:
                    row = cand
                    break
                # entropy falls as the precision grows
                if h > target:
                    lo = mid
                else:
                    hi = mid
            if row is None:
                raise CalibrationError(i, f"row {i}: perplexity {perplexity} unreachable "
                                          f"within {MAX_BISECTIONS} bisection steps")
        P[i, :i] = row[:i]
        P[i, i + 1:] = row[i:]
    return P


def symmetrize(P_cond):
    """p_ij = (p_{j|i} + p_{i|j}) / 2n, off-diagonal floored at 1e-12, renormalised."""
    P_cond = np.asarray(P_cond, dtype=np.float64)
    n = P_cond.shape[0]
    P = (P_cond + P_cond.T) / (2.0 * n)
    off = ~np.eye(n, dtype=bool)
    P[off] = np.maximum(P[off], FLOOR)
    np.fill_diagonal(P, 0.0)
    return P / P.sum()


def kl_divergence(P, Q):
    """sum p * ln(p / q) over off-diagonal entries, both floored at 1e-12.

    1-D inputs are treated as plain distributions (no diagonal).
    """
    P = np.asarray(P, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    if P.shape != Q.shape:
        raise DataError(f"shape mismatch {P.shape} vs {Q.shape}")
    if P.ndim == 2 and P.shape[0] == P.shape[1]:
        mask = ~np.eye(P.shape[0], dtype=bool)
        P, Q = P[mask], Q[mask]
    p = np.maximum(P, FLOOR)
    q = np.maximum(Q, FLOOR)
    return float(np.sum(p * np.log(p / q)))


def _student_t(Y):
    num = 1.0 / (1.0 + _sq_dists(Y))
    np.fill_diagonal(num, 0.0)
    return num, num / num.sum()


def tsne_embed(X, config=TsneConfig()):
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < 4:
        raise DataError(f"t-SNE needs at least 4 points, got {n}")
    if n > config.max_points:
        raise DataError(f"exact t-SNE is capped at {config.max_points} points (got {n}); "
                        "subsample the data first")
    cfg = config.validated(n)
    P = symmetrize(conditional_affinities(X, cfg.perplexity))

    g = rng(cfg.seed)
    Y = g.standard_normal((n, 2)) * 1e-4
    Y -= Y.mean(axis=0)
    velocity = np.zeros_like(Y)
    gains = np.ones_like(Y)
    history, at = [], []

    for it in range(1, cfg.iterations + 1):
        exaggerate = it <= cfg.early_exaggeration_iters
        Pe = P * cfg.early_exaggeration_factor if exaggerate else P
        num, Q = _student_t(Y)
        W = (Pe - Q) * num
        grad = 4.0 * (W.sum(axis=1)[:, None] * Y - W @ Y)
        momentum = cfg.momentum_initial if it <= cfg.momentum_switch_iter else cfg.momentum_final
        same_sign = np.sign(grad) == np.sign(velocity)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        np.maximum(gains, 0.01, out=gains)
        velocity = momentum * velocity - cfg.learning_rate * gains * grad
        Y = Y + velocity
        Y -= Y.mean(axis=0)
        if it % KL_EVERY == 0 or it == cfg.iterations:
            _, Q = _student_t(Y)
            history.append(kl_divergence(P, Q))
            at.append(it)
    if not np.all(np.isfinite(Y)):
        raise DataError("t-SNE produced non-finite coordinates")
    return Embedding(Y, tuple(history), tuple(at))
