"""Cost algebra for binary classification with a reject option.

Raw costs lambda[i][j] (true class i, decision j, with j = 3 meaning
reject) normalize so that correct decisions cost 0 and a missed positive
costs 1: subtract each row's correct-decision cost, then divide everything
by beta = lambda_FN - lambda_TP, which must be positive. Three free
parameters remain: the false-positive cost, and the two rejection costs.

Class 1 is the negative (majority) class and class 2 the positive
(minority) class throughout, matching the rest of the package.

The maps implemented here connect three coordinate systems for the same
operating point: normalized costs, rejection thresholds, and ROC slope.
Both directions between costs and thresholds are closed-form, and the
admissible regions on the two sides (the open cost bands and the open
threshold bands) imply one another, which `check_feasibility` reports.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CostWarning",
    "RawCostMatrix",
    "NormalizedCosts",
    "FeasibilityReport",
    "normalize_costs",
    "risk",
    "conditional_risk",
    "optimal_threshold",
    "equivalent_misclassification_cost",
    "equivalent_rejection_costs",
    "rejection_thresholds_from_costs",
    "check_feasibility",
]

NEGATIVE, POSITIVE = 0, 1  # row indices: true class 1 (N), true class 2 (P)


class CostWarning(UserWarning):
    """Raised as a warning when derived costs leave their admissible band."""


@dataclass(frozen=True)
class RawCostMatrix:
    """Binary cost table: rows true {N, P}, columns decide {N, P[, reject]}.

    2x2 when there is no reject option, 2x3 when there is; `abstaining`
    tells the two apart.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64).copy()
        if values.shape not in ((2, 2), (2, 3)):
            raise ValueError(
                "expected a 2x2 cost table, or 2x3 with a reject column"
            )
        if not np.isfinite(values).all():
            raise ValueError("costs must be finite")
        for i in range(2):
            if values[i, i] > values[i].min():
                raise ValueError(
                    "a correct decision must not cost more than any other "
                    f"decision for the same true class (row {i + 1})"
                )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def abstaining(self) -> bool:
        return self.values.shape[1] == 3

    @property
    def lambda_tn(self) -> float:
        return float(self.values[NEGATIVE, NEGATIVE])

    @property
    def lambda_fp(self) -> float:
        return float(self.values[NEGATIVE, POSITIVE])

    @property
    def lambda_rn(self) -> float:
        if not self.abstaining:
            raise ValueError("no reject column in this cost table")
        return float(self.values[NEGATIVE, 2])

    @property
    def lambda_fn(self) -> float:
        return float(self.values[POSITIVE, NEGATIVE])

    @property
    def lambda_tp(self) -> float:
        return float(self.values[POSITIVE, POSITIVE])

    @property
    def lambda_rp(self) -> float:
        if not self.abstaining:
            raise ValueError("no reject column in this cost table")
        return float(self.values[POSITIVE, 2])


@dataclass(frozen=True)
class NormalizedCosts:
    """Costs after fixing correct decisions to 0 and a missed positive to 1.

    ``lambda_fp`` is the cost of a false positive; ``lambda_rn`` and
    ``lambda_rp`` price rejecting a true negative and a true positive.
    Rejection costs may be absent when only plain (non-abstaining)
    operation is being described.
    """

    lambda_fp: float
    lambda_rn: float | None = None
    lambda_rp: float | None = None

    def __post_init__(self) -> None:
        if not np.isfinite(self.lambda_fp) or self.lambda_fp <= 0.0:
            raise ValueError("the false-positive cost must be positive")
        both = (self.lambda_rn is None) == (self.lambda_rp is None)
        if not both:
            raise ValueError("rejection costs come as a pair or not at all")
        if self.lambda_rn is not None:
            if not (np.isfinite(self.lambda_rn) and np.isfinite(self.lambda_rp)):
                raise ValueError("rejection costs must be finite")
        if self.lambda_rn is not None and not (0.0 < self.lambda_rn < self.lambda_fp):
            warnings.warn(
                "rejecting a true negative should cost more than nothing and "
                f"less than a false positive (got {self.lambda_rn:.6g}, "
                f"false-positive cost {self.lambda_fp:.6g})",
                CostWarning,
                stacklevel=2,
            )
        if self.lambda_rp is not None and not (0.0 < self.lambda_rp < 1.0):
            warnings.warn(
                "rejecting a true positive should cost more than nothing and "
                f"less than a missed positive (got {self.lambda_rp:.6g})",
                CostWarning,
                stacklevel=2,
            )

    @property
    def abstaining(self) -> bool:
        return self.lambda_rn is not None

    def as_matrix(self) -> np.ndarray:
        """2x3 table in the same layout as RawCostMatrix."""
        if not self.abstaining:
            raise ValueError("no rejection costs to tabulate")
        return np.array(
            [[0.0, self.lambda_fp, self.lambda_rn], [1.0, 0.0, self.lambda_rp]]
        )


def normalize_costs(
    raw: RawCostMatrix, abstaining: bool | None = None
) -> NormalizedCosts:
    """Reduce a raw cost table to its free parameters.

    A 2x2 table yields just the false-positive cost; a 2x3 table also
    yields the two rejection costs. Pass ``abstaining=False`` to drop the
    reject column of a 2x3 table (the false-positive cost is unaffected,
    so the two normalizations of the same table always agree on it).
    """
    if abstaining is None:
        abstaining = raw.abstaining
    if abstaining and not raw.abstaining:
        raise ValueError("a reject column is required to normalize rejection costs")
    beta = raw.lambda_fn - raw.lambda_tp
    if beta <= 0.0:
        raise ValueError(
            "a missed positive must cost strictly more than a caught one"
        )
    lambda_fp = (raw.lambda_fp - raw.lambda_tn) / beta
    if not abstaining:
        return NormalizedCosts(lambda_fp=lambda_fp)
    return NormalizedCosts(
        lambda_fp=lambda_fp,
        lambda_rn=(raw.lambda_rn - raw.lambda_tn) / beta,
        lambda_rp=(raw.lambda_rp - raw.lambda_tp) / beta,
    )


def risk(costs: NormalizedCosts, outcome_probs: np.ndarray, priors: np.ndarray) -> float:
    """Expected cost: sum over lambda[i][j] * p(decide j | class i) * p(i).

    ``outcome_probs`` is 2x3 (rows true N/P, columns decide N/P/reject),
    each row summing to 1; ``priors`` is the class distribution (p_N, p_P).
    """
    table = costs.as_matrix()
    probs = np.asarray(outcome_probs, dtype=np.float64)
    pri = np.asarray(priors, dtype=np.float64)
    if probs.shape != (2, 3):
        raise ValueError("outcome probabilities must be 2x3")
    if pri.shape != (2,):
        raise ValueError("priors must have two entries")
    if not np.allclose(probs.sum(axis=1), 1.0, atol=1e-9):
        raise ValueError("each row of outcome probabilities must sum to 1")
    return float((table * probs * pri[:, None]).sum())


def conditional_risk(costs: NormalizedCosts, posterior: np.ndarray) -> np.ndarray:
    """Per-decision expected cost given class posteriors (p_N, p_P).

    Returns the three risks for deciding N, deciding P, and rejecting.
    """
    table = costs.as_matrix()
    post = np.asarray(posterior, dtype=np.float64)
    if post.shape != (2,):
        raise ValueError("expected a binary posterior")
    return post @ table


def optimal_threshold(lambda_fp: float) -> float:
    """Posterior threshold on p(P|x) that minimizes plain two-way risk."""
    if lambda_fp <= 0.0:
        raise ValueError("the false-positive cost must be positive")
    return lambda_fp / (1.0 + lambda_fp)


def equivalent_misclassification_cost(alpha_n: float) -> float:
    """The false-positive cost a weight on the negative class stands in for.

    A weighted argmax with weight ``alpha_n`` on the negative class (the
    positive-class weight pinned at 1) makes the same decisions as risk
    minimization with false-positive cost equal to ``alpha_n``.
    """
    if alpha_n <= 0.0:
        raise ValueError("the class weight must be positive")
    if alpha_n >= 1.0:
        warnings.warn(
            "a negative-class weight at or above 1 means the majority class "
            "is not being discounted; the equivalence is documented only "
            f"below 1 (got {alpha_n:.6g})",
            CostWarning,
            stacklevel=2,
        )
    return float(alpha_n)


def equivalent_rejection_costs(
    lambda_fp: float, t_rn: float, t_rp: float
) -> tuple[float, float]:
    """Rejection costs that reproduce the given rejection thresholds.

    Inverts the threshold formulas: given the false-positive cost and the
    per-class rejection thresholds the search found, returns the pair
    (lambda_rn, lambda_rp) under which risk minimization would place the
    reject band exactly there.
    """
    if lambda_fp <= 0.0:
        raise ValueError("the false-positive cost must be positive")
    for name, t in (("negative", t_rn), ("positive", t_rp)):
        if not 0.0 <= t < 1.0:
            raise ValueError(f"the {name}-class rejection threshold must lie in [0, 1)")
    denom = 1.0 - t_rn - t_rp
    if denom == 0.0:
        raise ValueError(
            "rejection thresholds summing to 1 leave the rejection costs "
            "undetermined"
        )
    lambda_rn = (t_rn * (1.0 - t_rp) - t_rn * t_rp * lambda_fp) / denom
    lambda_rp = (-t_rn * t_rp + (1.0 - t_rn) * t_rp * lambda_fp) / denom
    return float(lambda_rn), float(lambda_rp)


def rejection_thresholds_from_costs(costs: NormalizedCosts) -> tuple[float, float]:
    """Rejection thresholds induced by a full normalized cost table.

    The forward direction of `equivalent_rejection_costs`: where risk
    minimization with these costs starts rejecting, per true class.
    """
    if not costs.abstaining:
        raise ValueError("rejection costs are required to place a reject band")
    rn, rp, fp = costs.lambda_rn, costs.lambda_rp, costs.lambda_fp
    denom_n = 1.0 + rn - rp
    denom_p = fp - rn + rp
    if denom_n == 0.0 or denom_p == 0.0:
        raise ValueError("degenerate costs: a rejection threshold is undefined")
    return float(rn / denom_n), float(rp / denom_p)


@dataclass(frozen=True)
class FeasibilityReport:
    """Joint admissibility of thresholds and their equivalent costs.

    ``threshold_bands_ok``: both rejection thresholds fall strictly inside
    the open intervals (0, a/(1+a)) and (0, 1/(1+a)) for weight a.
    ``cost_bands_ok``: the equivalent rejection costs fall strictly inside
    (0, lambda_fp) and (0, 1).
    ``boundary``: some quantity sits exactly on a band edge, so the strict
    implications do not apply (zero thresholds are the common case).
    ``consistent``: no contradiction between the two sides; vacuously true
    on the boundary.
    """

    threshold_bands_ok: bool
    cost_bands_ok: bool
    boundary: bool
    consistent: bool
    lambda_rn: float
    lambda_rp: float


def check_feasibility(alpha_n: float, t_rn: float, t_rp: float) -> FeasibilityReport:
    """Check an operating point against its admissible bands.

    Strictly interior rejection costs force strictly interior thresholds
    and vice versa; this evaluates both sides for the point at hand and
    reports whether they agree. Points on a band edge (rejection switched
    off, for instance) are flagged as boundary and count as vacuously
    consistent.
    """
    if alpha_n <= 0.0:
        raise ValueError("the class weight must be positive")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CostWarning)
        lambda_rn, lambda_rp = equivalent_rejection_costs(alpha_n, t_rn, t_rp)

    t_rn_hi = alpha_n / (1.0 + alpha_n)
    t_rp_hi = 1.0 / (1.0 + alpha_n)
    threshold_bands_ok = (0.0 < t_rn < t_rn_hi) and (0.0 < t_rp < t_rp_hi)
    cost_bands_ok = (0.0 < lambda_rn < alpha_n) and (0.0 < lambda_rp < 1.0)

    boundary = (
        t_rn == 0.0
        or t_rn == t_rn_hi
        or t_rp == 0.0
        or t_rp == t_rp_hi
        or lambda_rn == 0.0
        or lambda_rn == alpha_n
        or lambda_rp == 0.0
        or lambda_rp == 1.0
    )
    consistent = boundary or (threshold_bands_ok == cost_bands_ok)
    return FeasibilityReport(
        threshold_bands_ok=threshold_bands_ok,
        cost_bands_ok=cost_bands_ok,
        boundary=boundary,
        consistent=consistent,
        lambda_rn=lambda_rn,
        lambda_rp=lambda_rp,
    )
