"""Confusion matrices and evaluation metrics for abstaining classification.

Everything here is a pure function of one augmented count matrix: rows are
target classes 1..m, columns 1..m are decided classes, and an extra column
m+1 counts rejected instances. Normalized mutual information (NI), accuracy,
per-class error and reject rates, G-mean, and F-measure are all derived from
that matrix alone.

Conventions
-----------
* Logarithms are base 2; 0*log(0) and 0*log(0/x) count as 0, and a decision
  column with zero marginal contributes nothing, so NI is continuous in the
  counts.
* The NI numerator marginalizes decisions over columns 1..m only. Rejected
  instances still enter the per-class totals and the grand total, so pure
  shifts into the reject column lower NI instead of leaving it unchanged.
* Total error and total reject are fractions of all evaluated instances;
  total accuracy is the fraction of correct decisions among the classified
  (non-rejected) instances. Without rejection this is plain accuracy.
* Per-class rates use the full class size as denominator, so recognition,
  error, and reject rates of one class always sum to one.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConfusionMatrix",
    "MetricReport",
    "UndefinedMetricError",
    "build_confusion",
    "ni",
    "report",
    "reject_label",
]


class UndefinedMetricError(ValueError):
    """A metric has no defined value for this confusion matrix."""


def reject_label(m: int) -> int:
    """The decision label that marks a rejected instance (m+1)."""
    return m + 1


@dataclass(frozen=True)
class ConfusionMatrix:
    """Augmented m x (m+1) count matrix.

    ``counts[i, j]`` is the number of instances of target class i+1 decided
    as class j+1; the last column counts rejections. Counts are validated,
    cast to int64, and frozen at construction.
    """

    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[1] != counts.shape[0] + 1:
            raise ValueError(f"expected an m x (m+1) matrix, got shape {counts.shape}")
        if counts.shape[0] < 2:
            raise ValueError("need at least two target classes")
        if not np.issubdtype(counts.dtype, np.integer):
            rounded = np.rint(counts)
            if not np.array_equal(rounded, counts):
                raise ValueError("counts must be integers")
            counts = rounded
        counts = counts.astype(np.int64)
        if (counts < 0).any():
            raise ValueError("counts must be non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def m(self) -> int:
        return int(self.counts.shape[0])

    @property
    def n(self) -> int:
        """Number of evaluated instances, rejections included."""
        return int(self.counts.sum())

    @property
    def class_totals(self) -> np.ndarray:
        """Row sums C_i, rejections included."""
        return self.counts.sum(axis=1)

    @property
    def decision_totals(self) -> np.ndarray:
        """Column sums over the m decision columns, reject column excluded."""
        return self.counts[:, : self.m].sum(axis=0)

    @property
    def reject_counts(self) -> np.ndarray:
        """Per-class counts of rejected instances (the last column)."""
        return self.counts[:, self.m]

    def to_csv_string(self) -> str:
        """Serialize as CSV, one row per target class, m+1 columns."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.counts:
            writer.writerow([int(v) for v in row])
        return buf.getvalue()

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv_string())

    @classmethod
    def from_csv_string(cls, text: str) -> "ConfusionMatrix":
        rows = [[int(v) for v in row] for row in csv.reader(io.StringIO(text)) if row]
        return cls(np.array(rows, dtype=np.int64))


def build_confusion(targets, decisions, m: int) -> ConfusionMatrix:
    """Tabulate targets in 1..m against decisions in 1..m+1.

    Decision m+1 counts as a rejection. Raises on mismatched lengths or
    out-of-range labels.
    """
    targets = np.asarray(targets, dtype=np.int64)
    decisions = np.asarray(decisions, dtype=np.int64)
    if targets.ndim != 1 or decisions.ndim != 1:
        raise ValueError("targets and decisions must be one-dimensional")
    if targets.shape[0] != decisions.shape[0]:
        raise ValueError(
            f"length mismatch: {targets.shape[0]} targets, {decisions.shape[0]} decisions"
        )
    if targets.shape[0] == 0:
        raise ValueError("need at least one instance")
    if m < 2:
        raise ValueError("need at least two classes")
    if targets.min() < 1 or targets.max() > m:
        raise ValueError("target labels must lie in 1..m")
    if decisions.min() < 1 or decisions.max() > m + 1:
        raise ValueError("decision labels must lie in 1..m+1")
    flat = (targets - 1) * (m + 1) + (decisions - 1)
    counts = np.bincount(flat, minlength=m * (m + 1)).reshape(m, m + 1)
    return ConfusionMatrix(counts)


def ni(cm: ConfusionMatrix) -> float:
    """Normalized mutual information I(T, Y)/H(T) of targets and decisions.

    The joint distribution is estimated from the counts. The decision
    marginal runs over the m real classes only; rejected instances enter the
    class totals and the grand total but carry no decision-column mass.
    Requires at least two populated target classes, otherwise the target
    entropy is zero and the ratio is undefined.
    """
    counts = cm.counts
    m = cm.m
    n = counts.sum()
    class_totals = counts.sum(axis=1)
    if np.count_nonzero(class_totals) < 2:
        raise UndefinedMetricError(
            "normalized mutual information needs at least two populated target classes"
        )
    decision_totals = counts[:, :m].sum(axis=0)

    block = counts[:, :m].astype(np.float64)
    outer = class_totals.astype(np.float64)[:, None] * decision_totals.astype(np.float64)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = block * np.log2(block * float(n) / outer)
    numerator = float(np.where(block > 0, terms, 0.0).sum())

    populated = class_totals > 0
    ct = class_totals[populated].astype(np.float64)
    denominator = float(-(ct * np.log2(ct / float(n))).sum())

    value = numerator / denominator
    # exact arithmetic keeps the ratio inside [0, 1]; trim float epsilon only
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class MetricReport:
    """Scalar evaluation summary of one confusion matrix.

    All rates are fractions in [0, 1]. ``per_class_recognition`` holds the
    within-class accuracy (correct recognition rate under abstaining).
    ``fmeasure`` is None for more than two classes. ``accuracy`` is taken
    over classified instances; ``error`` and ``reject`` over all instances.
    """

    ni: float
    accuracy: float
    error: float
    reject: float
    per_class_error: tuple[float, ...]
    per_class_reject: tuple[float, ...]
    per_class_recognition: tuple[float, ...]
    gmean: float
    fmeasure: float | None
    abstaining: bool

    @property
    def m(self) -> int:
        return len(self.per_class_error)


def report(cm: ConfusionMatrix, abstaining: bool) -> MetricReport:
    """Compute the full metric set of a confusion matrix.

    With ``abstaining=False`` the reject column must be all zeros. Every
    class must be populated; an evaluation slice that misses a class fails
    loudly here instead of propagating NaN rates.
    """
    counts = cm.counts
    m = cm.m
    class_totals = cm.class_totals
    if (class_totals == 0).any():
        missing = [i + 1 for i in np.nonzero(class_totals == 0)[0]]
        raise UndefinedMetricError(f"classes {missing} have no instances in this evaluation")
    rejects = cm.reject_counts
    if not abstaining and rejects.any():
        raise ValueError("non-abstaining evaluation but the reject column is not empty")

    n = cm.n
    correct = np.diagonal(counts[:, :m]).astype(np.float64)
    totals = class_totals.astype(np.float64)
    rej = rejects.astype(np.float64)
    errors = totals - correct - rej

    recognition = correct / totals
    per_class_error = errors / totals
    per_class_reject = rej / totals

    n_rejected = float(rej.sum())
    n_classified = float(n) - n_rejected
    accuracy = float(correct.sum() / n_classified) if n_classified > 0 else 0.0
    total_error = float(errors.sum() / n)
    total_reject = n_rejected / float(n)

    gmean = 0.0 if (recognition == 0).any() else float(np.exp(np.log(recognition).mean()))

    fmeasure: float | None = None
    if m == 2:
        # positive class is class 2 by the ingestion convention
        tp = float(counts[1, 1])
        fp = float(counts[0, 1])
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / totals[1]
        denom = precision + recall
        fmeasure = 0.0 if denom == 0 else 2.0 * precision * recall / denom

    return MetricReport(
        ni=ni(cm),
        accuracy=accuracy,
        error=total_error,
        reject=total_reject,
        per_class_error=tuple(float(v) for v in per_class_error),
        per_class_reject=tuple(float(v) for v in per_class_reject),
        per_class_recognition=tuple(float(v) for v in recognition),
        gmean=gmean,
        fmeasure=fmeasure,
        abstaining=abstaining,
    )
