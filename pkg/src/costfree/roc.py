"""ROC curves, their convex hull, and iso-performance operating geometry.

Binary only, with class 1 the negative (majority) class and class 2 the
positive (minority) class. A curve is a sequence of (FPR, TPR) points from
(0, 0) to (1, 1), each carrying the score threshold that realizes it and
the slope of its incoming segment.

The central correspondence: an operating context (class ratio and cost of
a false positive relative to a missed positive) picks out a slope
K = (p_N / p_P) * lambda_FP, and the best achievable point on the convex
hull is the vertex where the hull's slope crosses K. Rejection splits one
slope into a pair (K_N, K_P); a valid reject band needs K_N < K_P, and the
pair can be computed either from rejection costs or directly from
rejection thresholds, with identical results.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .costs import NormalizedCosts

__all__ = [
    "RocCurve",
    "AbstainingSlopes",
    "roc_from_scores",
    "rocch",
    "auc",
    "threshold_average",
    "operating_slope",
    "abstaining_slopes",
    "abstaining_slopes_from_costs",
    "locate_operating_point",
    "locate_operating_points",
    "locate_reject_band",
]

_COLLINEAR_TOL = 1e-12


@dataclass(frozen=True)
class RocCurve:
    """ROC points with per-point incoming slope and realizing threshold.

    ``points`` is k x 2 (FPR, TPR), starting at (0, 0) and ending at
    (1, 1), both coordinates non-decreasing. ``slopes[i]`` is the slope of
    the segment arriving at point i (infinite for the first point);
    ``thresholds[i]`` is the score cutoff that produces point i (infinite
    for (0, 0): no score reaches it). ``priors``, when known, holds the
    class distribution (p_N, p_P) the curve was measured on.
    """

    points: np.ndarray
    slopes: np.ndarray
    thresholds: np.ndarray
    priors: tuple | None = None

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=np.float64).copy()
        slopes = np.asarray(self.slopes, dtype=np.float64).copy()
        thresholds = np.asarray(self.thresholds, dtype=np.float64).copy()
        if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 2:
            raise ValueError("a curve needs at least the two corner points")
        k = points.shape[0]
        if slopes.shape != (k,) or thresholds.shape != (k,):
            raise ValueError("slopes and thresholds must match the points")
        if (points < -1e-12).any() or (points > 1.0 + 1e-12).any():
            raise ValueError("rates must lie in [0, 1]")
        if (np.diff(points, axis=0) < -1e-12).any():
            raise ValueError("both rates must be non-decreasing along the curve")
        if not (points[0] == 0.0).all() or not (points[-1] == 1.0).all():
            raise ValueError("a curve must run from (0, 0) to (1, 1)")
        if not math.isinf(slopes[0]):
            raise ValueError("the slope into (0, 0) is infinite by convention")
        for arr in (points, slopes, thresholds):
            arr.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "slopes", slopes)
        object.__setattr__(self, "thresholds", thresholds)
        if self.priors is not None:
            p_n, p_p = (float(p) for p in self.priors)
            if p_n < 0.0 or p_p < 0.0 or not math.isclose(p_n + p_p, 1.0):
                raise ValueError("priors must be non-negative and sum to 1")
            object.__setattr__(self, "priors", (p_n, p_p))

    @property
    def fpr(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def tpr(self) -> np.ndarray:
        return self.points[:, 1]

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["fpr", "tpr", "slope", "threshold"])
            for (x, y), s, t in zip(self.points, self.slopes, self.thresholds):
                writer.writerow(
                    [f"{x:.10g}", f"{y:.10g}", f"{s:.10g}", f"{t:.10g}"]
                )


def _incoming_slopes(points: np.ndarray) -> np.ndarray:
    deltas = np.diff(points, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        seg = deltas[:, 1] / deltas[:, 0]
    seg = np.where((deltas[:, 0] == 0.0) & (deltas[:, 1] > 0.0), np.inf, seg)
    return np.concatenate(([np.inf], seg))


def roc_from_scores(pos_scores, neg_scores) -> RocCurve:
    """Empirical ROC curve from per-class positive-class scores.

    ``pos_scores`` are the scores of the positive instances, ``neg_scores``
    those of the negative instances. One point per distinct score value:
    the operating point of the rule "predict positive when the score is at
    least that value". Tied scores move together, so the curve never cuts
    through a tie group.
    """
    pos_scores = np.asarray(pos_scores, dtype=np.float64)
    neg_scores = np.asarray(neg_scores, dtype=np.float64)
    if pos_scores.ndim != 1 or neg_scores.ndim != 1:
        raise ValueError("score inputs must be vectors")
    n_pos, n_neg = pos_scores.size, neg_scores.size
    if n_pos == 0 or n_neg == 0:
        raise ValueError("both classes must be present to draw a curve")
    scores = np.concatenate([pos_scores, neg_scores])
    if not np.isfinite(scores).all():
        raise ValueError("scores must be finite")
    is_pos = np.concatenate(
        [np.ones(n_pos), np.zeros(n_neg)]
    )

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    tp = np.cumsum(is_pos[order])
    fp = np.cumsum(1.0 - is_pos[order])
    # keep only the last index of each tie group
    last_of_group = np.nonzero(np.diff(sorted_scores, append=-np.inf))[0]
    points = np.column_stack(
        [fp[last_of_group] / n_neg, tp[last_of_group] / n_pos]
    )
    points = np.vstack([[0.0, 0.0], points])
    thresholds = np.concatenate(([np.inf], sorted_scores[last_of_group]))
    n = n_pos + n_neg
    priors = (n_neg / n, n_pos / n)
    return RocCurve(points, _incoming_slopes(points), thresholds, priors)


def rocch(curve: RocCurve) -> RocCurve:
    """Convex hull of a curve: its concave majorant, vertices only.

    Walks the points left to right keeping only right turns, so hull
    slopes strictly decrease; collinear and dominated points drop out.
    Each kept vertex keeps the threshold that realized it.
    """
    pts = curve.points
    keep: list[int] = []
    for i in range(pts.shape[0]):
        while len(keep) >= 2:
            x1, y1 = pts[keep[-2]]
            x2, y2 = pts[keep[-1]]
            x3, y3 = pts[i]
            cross = (x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1)
            # the tolerance absorbs round-off on count-grid rates, where
            # exactly collinear triples land at cross ~ -1e-19
            if cross >= -_COLLINEAR_TOL:
                keep.pop()
            else:
                break
        if keep and (pts[i] == pts[keep[-1]]).all():
            continue
        keep.append(i)
    hull_points = pts[keep]
    hull_thresholds = curve.thresholds[keep]
    return RocCurve(
        hull_points, _incoming_slopes(hull_points), hull_thresholds, curve.priors
    )


def auc(curve: RocCurve) -> float:
    """Area under the curve by the trapezoid rule."""
    x, y = curve.fpr, curve.tpr
    return float(0.5 * np.sum(np.diff(x) * (y[1:] + y[:-1])))


def threshold_average(curves, grid_size: int = 101) -> RocCurve:
    """Average several curves at fixed score thresholds.

    For each threshold on an even grid over [0, 1], every curve contributes
    the operating point of "predict positive at or above the threshold",
    and the points are averaged coordinate-wise. This keeps each curve's
    thresholds aligned, unlike vertical averaging, so the mean curve's
    thresholds stay meaningful.
    """
    curves = list(curves)
    if not curves:
        raise ValueError("need at least one curve to average")
    if grid_size < 2:
        raise ValueError("the threshold grid needs at least two points")
    grid = np.linspace(1.0, 0.0, grid_size)

    sum_points = np.zeros((grid_size, 2))
    for curve in curves:
        # thresholds descend from +inf; the point for cutoff theta is the
        # one whose threshold is the smallest stored value >= theta
        descending = curve.thresholds
        ascending = descending[::-1]
        pos = np.searchsorted(ascending, grid, side="left")
        idx = np.clip(len(descending) - 1 - pos, 0, len(descending) - 1)
        sum_points += curve.points[idx]
    mean_points = sum_points / len(curves)

    mean_points = np.vstack([[0.0, 0.0], mean_points, [1.0, 1.0]])
    thresholds = np.concatenate(([np.inf], grid, [0.0]))
    dup = np.zeros(len(mean_points), dtype=bool)
    dup[1:] = (np.diff(mean_points, axis=0) == 0.0).all(axis=1)
    mean_points = mean_points[~dup]
    thresholds = thresholds[~dup]
    if all(c.priors is not None for c in curves):
        mean_priors = tuple(np.mean([c.priors for c in curves], axis=0))
    else:
        mean_priors = None
    return RocCurve(
        mean_points, _incoming_slopes(mean_points), thresholds, mean_priors
    )


def operating_slope(priors, lambda_fp: float) -> float:
    """Iso-performance slope for a class ratio and false-positive cost.

    ``priors`` is (p_N, p_P). A zero positive prior sends the slope to
    infinity, which parks the operating point at (0, 0): everything is
    called negative, so every positive is missed (positive-class error
    rate 1, recognition rate 0). That limit is returned with a warning
    rather than raised, since the geometry stays well defined.
    """
    p_n, p_p = float(priors[0]), float(priors[1])
    if p_n < 0.0 or p_p < 0.0 or p_n + p_p == 0.0:
        raise ValueError("priors must be non-negative and not both zero")
    if lambda_fp <= 0.0:
        raise ValueError("the false-positive cost must be positive")
    if p_p == 0.0:
        warnings.warn(
            "zero positive prior: the optimal slope is infinite and the "
            "operating point degenerates to (0, 0), missing every positive "
            "(positive-class error rate 1, recognition rate 0)",
            stacklevel=2,
        )
        return math.inf
    return (p_n / p_p) * lambda_fp


@dataclass(frozen=True)
class AbstainingSlopes:
    """Slope pair bounding a reject band on the hull.

    ``k_n`` governs the threshold for committing to the negative class and
    ``k_p`` for the positive class; the band is non-degenerate only when
    ``k_n < k_p``, which ``feasible`` records.
    """

    k_n: float
    k_p: float

    @property
    def feasible(self) -> bool:
        return self.k_n < self.k_p


def abstaining_slopes(priors, t_rn: float, t_rp: float) -> AbstainingSlopes:
    """Slope pair from rejection thresholds.

    K_N = (p_N/p_P) * T_rN / (1 - T_rN) and
    K_P = (p_N/p_P) * (1 - T_rP) / T_rP. A zero positive-class rejection
    threshold makes K_P infinite, which is no band at all, so it is an
    error here (evaluate the plain slope instead).
    """
    p_n, p_p = float(priors[0]), float(priors[1])
    if p_n <= 0.0 or p_p <= 0.0:
        raise ValueError("both priors must be positive for a reject band")
    for name, t in (("negative", t_rn), ("positive", t_rp)):
        if not 0.0 <= t < 1.0:
            raise ValueError(f"the {name}-class rejection threshold must lie in [0, 1)")
    if t_rp == 0.0:
        raise ValueError(
            "a zero positive-class rejection threshold gives an infinite "
            "upper slope: there is no reject band to locate"
        )
    ratio = p_n / p_p
    return AbstainingSlopes(
        k_n=ratio * t_rn / (1.0 - t_rn),
        k_p=ratio * (1.0 - t_rp) / t_rp,
    )


def abstaining_slopes_from_costs(priors, costs: NormalizedCosts) -> AbstainingSlopes:
    """Slope pair from normalized costs.

    K_N = (p_N/p_P) * lambda_RN / (1 - lambda_RP) and
    K_P = (p_N/p_P) * (lambda_FP - lambda_RN) / lambda_RP. Agrees exactly
    with `abstaining_slopes` applied to the thresholds those costs induce.
    """
    if not costs.abstaining:
        raise ValueError("rejection costs are required for a slope pair")
    p_n, p_p = float(priors[0]), float(priors[1])
    if p_n <= 0.0 or p_p <= 0.0:
        raise ValueError("both priors must be positive for a reject band")
    if costs.lambda_rp == 0.0 or costs.lambda_rp == 1.0:
        raise ValueError(
            "a positive-class rejection cost of 0 or 1 degenerates the band"
        )
    ratio = p_n / p_p
    return AbstainingSlopes(
        k_n=ratio * costs.lambda_rn / (1.0 - costs.lambda_rp),
        k_p=ratio * (costs.lambda_fp - costs.lambda_rn) / costs.lambda_rp,
    )


def locate_operating_point(hull: RocCurve, slope: float) -> int:
    """Index of the hull vertex optimal for an iso-performance slope.

    On a hull the incoming slopes strictly decrease, so the best vertex is
    the last one whose incoming slope is still at least the target (ties,
    when the target equals a segment slope exactly, resolve to the
    segment's right end; both ends are equally good there).
    """
    if math.isnan(slope) or slope < 0.0:
        raise ValueError("the slope must be non-negative")
    slopes = hull.slopes
    # skip the sentinel slope into (0, 0); a vertical first segment may
    # legitimately repeat its infinity
    with np.errstate(invalid="ignore"):
        seg_diff = np.diff(slopes[1:])
    if np.isnan(seg_diff).any() or (seg_diff >= 0.0).any():
        raise ValueError("not a hull: slopes must strictly decrease")
    return int(np.count_nonzero(slopes >= slope) - 1)


def locate_operating_points(hull: RocCurve, slopes) -> list[int]:
    """Hull vertex index for each slope in an iterable."""
    return [locate_operating_point(hull, s) for s in slopes]


def locate_reject_band(hull: RocCurve, slopes: AbstainingSlopes) -> tuple[int, int]:
    """Vertex indices (positive-commit, negative-commit) for a slope pair.

    The steeper slope K_P lands at or left of the shallower K_N. An
    infeasible pair (K_N >= K_P) has no band and is an error.
    """
    if not slopes.feasible:
        raise ValueError("no reject band: the slope pair must satisfy K_N < K_P")
    i_p = locate_operating_point(hull, slopes.k_p)
    i_n = locate_operating_point(hull, slopes.k_n)
    return i_p, i_n
