"""Probabilistic base classifiers: kNN confidences and Parzen-window Bayes.

Both produce an n x m posterior table whose rows sum to one. The kNN
confidence is a Laplace-smoothed vote fraction, (k_i + 1)/(k + m), so no
class posterior is ever exactly 0 or 1 and rejection thresholds stay
meaningful; this voting scheme is a declared, swappable strategy. The Bayes
classifier estimates class-conditional densities with an isotropic Gaussian
Parzen window sharing one global bandwidth, and uses empirical class
frequencies as priors.

Distances are Euclidean. Distance ties at the k-th neighbor admit the lower
training index first, which makes predictions independent of training-row
order up to that deterministic rule.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "KnnModel",
    "ParzenBayesModel",
    "knn_fit",
    "knn_predict_proba",
    "parzen_fit",
    "parzen_predict_proba",
]

# rows per query chunk when forming pairwise distance blocks
_CHUNK = 512

# duplicate training points can drive the bandwidth to zero
_BANDWIDTH_FLOOR = 1e-6


def _as_features(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("features must be a 2-d matrix")
    return x


def _as_labels(y, n: int) -> np.ndarray:
    y = np.asarray(y, dtype=np.int64)
    if y.shape != (n,):
        raise ValueError("labels must be one label per training row")
    if y.min() < 1:
        raise ValueError("labels must be positive integers starting at 1")
    return y


def _sq_distances(queries: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, numerically floored at zero.

    Extreme coordinates may overflow to inf; downstream code treats an
    infinite distance as a zero-density point, so the overflow is benign.
    """
    with np.errstate(over="ignore"):
        qq = (queries * queries).sum(axis=1)[:, None]
        pp = (points * points).sum(axis=1)[None, :]
        d2 = qq + pp - 2.0 * (queries @ points.T)
    return np.maximum(d2, 0.0)


@dataclass(frozen=True)
class KnnModel:
    """Verbatim training data plus the neighbor count."""

    features: np.ndarray
    labels: np.ndarray
    k: int
    m: int


def knn_fit(features, labels, k: int, m: int | None = None) -> KnnModel:
    """Store the training set for k-nearest-neighbor prediction.

    ``m`` defaults to the largest label seen. Raises when k exceeds the
    training-set size.
    """
    x = _as_features(features)
    y = _as_labels(labels, x.shape[0])
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > x.shape[0]:
        raise ValueError(f"k={k} exceeds the training-set size {x.shape[0]}")
    m_eff = int(y.max()) if m is None else int(m)
    if m_eff < int(y.max()):
        raise ValueError("m is smaller than the largest training label")
    x = x.copy()
    y = y.copy()
    x.setflags(write=False)
    y.setflags(write=False)
    return KnnModel(features=x, labels=y, k=int(k), m=m_eff)


def knn_predict_proba(model: KnnModel, queries) -> np.ndarray:
    """Laplace-smoothed neighbor vote fractions (k_i + 1)/(k + m).

    Rows sum to one. Neighbors are the k nearest training points by
    Euclidean distance; ties at the k-th distance admit lower training
    indices first.
    """
    q = _as_features(queries)
    if q.shape[1] != model.features.shape[1]:
        raise ValueError(
            f"query dimension {q.shape[1]} does not match training dimension "
            f"{model.features.shape[1]}"
        )
    k, m = model.k, model.m
    out = np.empty((q.shape[0], m), dtype=np.float64)
    for start in range(0, q.shape[0], _CHUNK):
        block = q[start : start + _CHUNK]
        d2 = _sq_distances(block, model.features)
        # stable sort keeps equal distances in training-index order
        order = np.argsort(d2, axis=1, kind="stable")[:, :k]
        neighbor_labels = model.labels[order]
        votes = np.zeros((block.shape[0], m + 1), dtype=np.float64)
        np.add.at(votes, (np.arange(block.shape[0])[:, None], neighbor_labels), 1.0)
        out[start : start + block.shape[0]] = (votes[:, 1:] + 1.0) / (k + m)
    return out


@dataclass(frozen=True)
class ParzenBayesModel:
    """Per-class training features, shared bandwidth, empirical priors."""

    class_features: tuple[np.ndarray, ...]
    priors: np.ndarray
    h: float
    m: int
    dim: int


def parzen_fit(features, labels, r: int = 10, m: int | None = None) -> ParzenBayesModel:
    """Fit the Parzen-window Bayes model.

    The single global bandwidth h is the average distance from each training
    instance to its r-th nearest neighbor (self excluded) over the whole
    training set. When fewer than r other instances exist, r degrades to
    n-1 with a warning. h is floored at a small positive value so duplicate
    points cannot collapse the kernel.
    """
    x = _as_features(features)
    y = _as_labels(labels, x.shape[0])
    n = x.shape[0]
    if n < 2:
        raise ValueError("need at least two training instances")
    if r < 1:
        raise ValueError("r must be at least 1")
    if r > n - 1:
        warnings.warn(
            f"bandwidth neighbor index r={r} exceeds n-1={n - 1}; using r={n - 1}",
            stacklevel=2,
        )
        r = n - 1

    rth = np.empty(n, dtype=np.float64)
    for start in range(0, n, _CHUNK):
        block = x[start : start + _CHUNK]
        d2 = _sq_distances(block, x)
        rows = np.arange(start, min(start + _CHUNK, n))
        d2[np.arange(len(rows)), rows] = np.inf  # exclude self
        part = np.partition(d2, r - 1, axis=1)[:, r - 1]
        rth[rows] = np.sqrt(part)
    h = max(float(rth.mean()), _BANDWIDTH_FLOOR)

    m_eff = int(y.max()) if m is None else int(m)
    if m_eff < int(y.max()):
        raise ValueError("m is smaller than the largest training label")
    class_features = []
    counts = np.zeros(m_eff, dtype=np.float64)
    for c in range(1, m_eff + 1):
        xc = x[y == c].copy()
        xc.setflags(write=False)
        class_features.append(xc)
        counts[c - 1] = xc.shape[0]
    if (counts == 0).any():
        missing = [c + 1 for c in np.nonzero(counts == 0)[0]]
        raise ValueError(f"classes {missing} have no training instances")
    priors = counts / counts.sum()
    priors.setflags(write=False)
    return ParzenBayesModel(
        class_features=tuple(class_features),
        priors=priors,
        h=h,
        m=m_eff,
        dim=x.shape[1],
    )


def parzen_predict_proba(model: ParzenBayesModel, queries) -> np.ndarray:
    """Posterior table from Gaussian kernel density estimates and priors.

    p(x|i) is the mean isotropic Gaussian kernel over class-i training
    points; the kernel's constant factor cancels in the normalization and is
    dropped. Accumulation is log-sum-exp. Rows where every class density
    underflows to zero fall back to the priors.
    """
    q = _as_features(queries)
    if q.shape[1] != model.dim:
        raise ValueError(
            f"query dimension {q.shape[1]} does not match training dimension {model.dim}"
        )
    n_q = q.shape[0]
    m = model.m
    inv = 1.0 / (2.0 * model.h * model.h)
    log_density = np.full((n_q, m), -np.inf, dtype=np.float64)
    for c in range(m):
        xc = model.class_features[c]
        for start in range(0, n_q, _CHUNK):
            block = q[start : start + _CHUNK]
            with np.errstate(over="ignore"):
                z = -_sq_distances(block, xc) * inv
            zmax = z.max(axis=1)
            finite = zmax > -np.inf
            lse = np.full(block.shape[0], -np.inf)
            if finite.any():
                shifted = np.exp(z[finite] - zmax[finite, None])
                lse[finite] = zmax[finite] + np.log(shifted.sum(axis=1))
            log_density[start : start + block.shape[0], c] = lse - np.log(xc.shape[0])

    log_post = log_density + np.log(model.priors)[None, :]
    out = np.empty_like(log_post)
    best = log_post.max(axis=1)
    degenerate = ~np.isfinite(best)
    ok = ~degenerate
    if ok.any():
        w = np.exp(log_post[ok] - best[ok, None])
        out[ok] = w / w.sum(axis=1, keepdims=True)
    if degenerate.any():
        out[degenerate] = model.priors[None, :]
    return out
