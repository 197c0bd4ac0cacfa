"""Reference methods the information-theoretic search is compared against.

Three families: synthetic minority oversampling (applied to training data
before fitting), cost-sensitive decisions with inverse-frequency costs
(no cost information required beyond class counts), and a uniform reject
rule with a fixed threshold. The geometric-mean objective used by the
weight/threshold search as an alternative criterion also lives here.

All of them feed the same confusion-matrix reporting path as the main
method, so benchmark rows are directly comparable.
"""

from __future__ import annotations

import warnings

import numpy as np

from .classifiers import _sq_distances
from .decision import _argmax_prefer_larger
from .metrics import ConfusionMatrix, UndefinedMetricError, reject_label

__all__ = [
    "smote_oversample",
    "inverse_frequency_costs",
    "cost_sensitive_decide",
    "chow_reject_decide",
    "gmean_objective",
]


def smote_oversample(
    features,
    labels,
    amount: int,
    minority_classes=None,
    k_neighbors: int = 5,
    seed: int | None = None,
):
    """Append synthetic minority samples by neighbor interpolation.

    For every original sample of a minority class, ``amount`` synthetic
    points are drawn on the segments toward randomly chosen members of its
    ``k_neighbors`` nearest same-class neighbors (uniform position along
    the segment). Originals are kept unchanged and in order; synthetics
    are appended after them. ``minority_classes`` defaults to every class
    except the largest. Returns (features, labels) as new arrays.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels)
    if features.ndim != 2 or features.shape[0] != labels.shape[0]:
        raise ValueError("features must be a matrix with one row per label")
    if amount < 0:
        raise ValueError("the oversampling amount must be non-negative")
    if k_neighbors < 1:
        raise ValueError("need at least one neighbor to interpolate")

    present, counts = np.unique(labels, return_counts=True)
    if minority_classes is None:
        minority_classes = np.delete(present, int(np.argmax(counts)))
    minority_classes = np.asarray(minority_classes)
    if not np.isin(minority_classes, present).all():
        raise ValueError("a requested minority class has no samples")

    rng = np.random.default_rng(seed)
    new_features = [features]
    new_labels = [labels]
    for cls in minority_classes:
        block = features[labels == cls]
        n_c = block.shape[0]
        if amount == 0:
            continue
        if n_c == 1:
            warnings.warn(
                f"class {cls!r} has a single sample: synthetic points "
                "degenerate to duplicates of it",
                stacklevel=2,
            )
            synthetic = np.repeat(block, amount, axis=0)
        else:
            k = min(k_neighbors, n_c - 1)
            d2 = _sq_distances(block, block)
            np.fill_diagonal(d2, np.inf)
            neighbor_idx = np.argsort(d2, axis=1, kind="stable")[:, :k]
            picks = rng.integers(0, k, size=(n_c, amount))
            gaps = rng.random((n_c, amount))
            chosen = block[neighbor_idx[np.arange(n_c)[:, None], picks]]
            synthetic = block[:, None, :] + gaps[..., None] * (chosen - block[:, None, :])
            synthetic = synthetic.reshape(n_c * amount, features.shape[1])
        new_features.append(synthetic)
        new_labels.append(np.full(synthetic.shape[0], cls, dtype=labels.dtype))
    return np.vstack(new_features), np.concatenate(new_labels)


def inverse_frequency_costs(class_counts) -> np.ndarray:
    """Misclassification costs proportional to class rarity.

    lambda[i][j] = n / C_i for i != j and 0 on the diagonal, so that every
    class contributes the same total cost mass. Needs every class present.
    """
    counts = np.asarray(class_counts, dtype=np.float64)
    if counts.ndim != 1 or counts.shape[0] < 2:
        raise ValueError("need counts for at least two classes")
    if (counts <= 0).any():
        raise ValueError("every class must have at least one sample")
    table = np.tile((counts.sum() / counts)[:, None], (1, counts.shape[0]))
    np.fill_diagonal(table, 0.0)
    return table


def cost_sensitive_decide(probs, cost_matrix) -> np.ndarray:
    """Pick the decision with the least expected cost per row.

    ``probs`` is n x m posteriors, ``cost_matrix`` m x m with zero
    diagonal. Ties go to the larger class index, which makes uniform
    off-diagonal costs reproduce the plain argmax decision exactly.
    Returns labels in 1..m.
    """
    probs = np.asarray(probs, dtype=np.float64)
    table = np.asarray(cost_matrix, dtype=np.float64)
    m = probs.shape[1]
    if table.shape != (m, m):
        raise ValueError("the cost table must be square and match the classes")
    if (np.diag(table) != 0.0).any():
        raise ValueError("correct decisions must cost zero here")
    risks = probs @ table
    return _argmax_prefer_larger(-risks) + 1


def chow_reject_decide(probs, threshold: float) -> np.ndarray:
    """Uniform reject rule: abstain when no posterior reaches 1 - t.

    Equivalent to the per-class rejection rule with every class threshold
    set to ``threshold``. With m classes the best posterior is at least
    1/m, so thresholds at or above (m - 1)/m never reject anything; that
    is allowed here and simply degenerates to the plain argmax. Returns
    labels in 1..m+1 (m+1 = reject).
    """
    if not 0.0 <= threshold < 1.0:
        raise ValueError("the reject threshold must lie in [0, 1)")
    probs = np.asarray(probs, dtype=np.float64)
    m = probs.shape[1]
    decisions = _argmax_prefer_larger(probs) + 1
    rejected = probs.max(axis=1) < 1.0 - threshold
    decisions[rejected] = reject_label(m)
    return decisions


def gmean_objective(cm: ConfusionMatrix) -> float:
    """Geometric mean of per-class recognition rates.

    Zero as soon as any class has no correct decisions; undefined when a
    class is absent from the matrix.
    """
    diag = np.diag(cm.counts[:, : cm.m]).astype(np.float64)
    totals = cm.class_totals.astype(np.float64)
    if (totals == 0).any():
        raise UndefinedMetricError(
            "recognition rates need every class present"
        )
    rates = diag / totals
    if (rates == 0.0).any():
        return 0.0
    return float(np.exp(np.mean(np.log(rates))))
