"""Decision rules that turn posterior tables into class labels.

Two parameterizations of the same ratio rule:

* decision weights alpha (non-abstaining): pick argmax_i alpha_i * phi_i,
  with alpha_i > 0 and the last class anchored at alpha_m = 1;
* rejection thresholds T_r (abstaining): pick argmax_i phi_i / (1 - T_ri)
  when that maximum reaches 1, otherwise output the reject label m+1.

Ties at the argmax go to the larger class index. Ingestion orders classes by
descending size, so ties favor the rarer class. A boundary ratio of exactly
1 classifies rather than rejects.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ParamVector",
    "WEIGHTS",
    "REJECTION_THRESHOLDS",
    "decide_weighted",
    "decide_abstaining",
    "weights_to_thresholds",
    "thresholds_to_weights",
]

WEIGHTS = "weights"
REJECTION_THRESHOLDS = "rejection-thresholds"

# anchor check tolerance: the optimizer writes the anchor as an exact 1.0,
# user input may carry formatting noise
_ANCHOR_TOL = 1e-9


@dataclass(frozen=True)
class ParamVector:
    """A validated parameter vector: decision weights or rejection thresholds.

    Weights require alpha_i > 0 with the last class anchored at 1 (any
    positive rescaling decides identically, the anchor picks one
    representative). Rejection thresholds require 0 <= T_ri < 1 and
    sum(T_ri) < m-1, without which no probability row could ever be
    rejected.
    """

    kind: str
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64).copy()
        if values.ndim != 1 or values.shape[0] < 2:
            raise ValueError("parameter vector must be one-dimensional with length >= 2")
        if self.kind == WEIGHTS:
            if (values <= 0).any():
                raise ValueError("weights must be strictly positive")
            if abs(values[-1] - 1.0) > _ANCHOR_TOL:
                raise ValueError("the last weight is the anchor and must equal 1")
        elif self.kind == REJECTION_THRESHOLDS:
            if (values < 0).any() or (values >= 1).any():
                raise ValueError("rejection thresholds must lie in [0, 1)")
            if values.sum() >= values.shape[0] - 1:
                raise ValueError("rejection thresholds must sum to less than m-1")
        else:
            raise ValueError(f"unknown parameter kind: {self.kind!r}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def weights(cls, values) -> "ParamVector":
        return cls(WEIGHTS, np.asarray(values, dtype=np.float64))

    @classmethod
    def rejection_thresholds(cls, values) -> "ParamVector":
        return cls(REJECTION_THRESHOLDS, np.asarray(values, dtype=np.float64))

    @property
    def m(self) -> int:
        return int(self.values.shape[0])


def _values(params, kind: str | None = None) -> np.ndarray:
    if isinstance(params, ParamVector):
        if kind is not None and params.kind != kind:
            raise ValueError(f"expected a {kind} vector, got {params.kind}")
        return params.values
    return np.asarray(params, dtype=np.float64)


def _argmax_prefer_larger(scores: np.ndarray) -> np.ndarray:
    """Row-wise argmax with ties resolved toward the larger column index."""
    m = scores.shape[1]
    return m - 1 - np.argmax(scores[:, ::-1], axis=1)


def decide_weighted(probs, weights) -> np.ndarray:
    """Labels in 1..m by the highest weighted posterior.

    ``weights`` may be a ParamVector of kind weights or any strictly
    positive array; decisions are invariant under positive rescaling of the
    whole vector.
    """
    probs = np.asarray(probs, dtype=np.float64)
    w = _values(weights, WEIGHTS)
    if probs.ndim != 2 or probs.shape[1] != w.shape[0]:
        raise ValueError("weight length must match the posterior column count")
    if (w <= 0).any():
        raise ValueError("weights must be strictly positive")
    return _argmax_prefer_larger(probs * w[None, :]) + 1


def decide_abstaining(probs, thresholds) -> np.ndarray:
    """Labels in 1..m+1 by the thresholded ratio rule.

    An instance is classified as argmax_i phi_i / (1 - T_ri) when that
    maximum is at least 1 (the boundary counts as classify) and rejected as
    m+1 otherwise.

    Raw arrays only need every coordinate in [0, 1). The stronger ParamVector
    invariant sum(T_ri) < m-1 marks the region where rejection is possible
    at all; outside it the rule still decides, it just never abstains.
    """
    probs = np.asarray(probs, dtype=np.float64)
    if isinstance(thresholds, ParamVector):
        t = _values(thresholds, REJECTION_THRESHOLDS)
    else:
        t = np.asarray(thresholds, dtype=np.float64)
        if t.ndim != 1 or (t < 0).any() or (t >= 1).any():
            raise ValueError("rejection thresholds must lie in [0, 1)")
    if probs.ndim != 2 or probs.shape[1] != t.shape[0]:
        raise ValueError("threshold length must match the posterior column count")
    m = t.shape[0]
    ratios = probs / (1.0 - t)[None, :]
    best = _argmax_prefer_larger(ratios)
    labels = best + 1
    rejected = ratios[np.arange(probs.shape[0]), best] < 1.0
    labels[rejected] = m + 1
    return labels


def weights_to_thresholds(weights) -> np.ndarray:
    """Per-class decision cutoffs tau in (0, 1] equivalent to the weights.

    The ratio rule argmax_i phi_i / tau_i with the returned tau decides
    exactly like decide_weighted: alpha_i = tau_m / tau_i. tau_m is chosen
    as min(1, min_i alpha_i) so every tau_i lands in (0, 1]. The abstaining
    rule's rejection thresholds relate as T_ri = 1 - tau_i.
    """
    w = _values(weights)
    if (w <= 0).any():
        raise ValueError("weights must be strictly positive")
    tau_m = min(1.0, float(w.min()))
    return tau_m / w


def thresholds_to_weights(tau) -> np.ndarray:
    """Weights alpha_i = tau_m / tau_i, anchored at alpha_m = 1."""
    tau = np.asarray(tau, dtype=np.float64)
    if (tau <= 0).any() or (tau > 1).any():
        raise ValueError("decision cutoffs must lie in (0, 1]")
    return tau[-1] / tau
