"""Dataset ingestion, nested cross-validation, and benchmark emission.

The evaluation protocol: stratified 3-fold cross validation, repeated 10
times. Within each training set, an inner stratified 3-fold split yields
three (estimation, validation) pairs; the classifier is fitted on the
estimation part, the decision parameters are optimized on the validation
part, and the mean of the three inner optima is applied to a classifier
refitted on the whole training set to predict the held-out test fold.
Thirty test-fold evaluations (3 folds x 10 repetitions) contribute to
every reported mean and standard deviation.

Classes are reindexed at ingestion by descending size, so class 1 is the
largest and class m the rarest; in binary problems class 1 is the
negative class and class 2 the positive. Feature scaling defaults to
fitting on the training partition only (the estimation partition inside
the inner loop) to keep the test data out of every fitted quantity; the
``global_scaling`` switch instead rescales the whole dataset once up
front, which matches how the benchmark tables this package reproduces
were produced.

Everything is deterministic for a fixed master seed: per-repetition,
per-fold, and per-purpose seeds derive from it by a splitmix64 expansion,
and all loops run sequentially so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .baselines import (
    chow_reject_decide,
    cost_sensitive_decide,
    gmean_objective,
    inverse_frequency_costs,
    smote_oversample,
)
from .classifiers import (
    knn_fit,
    knn_predict_proba,
    parzen_fit,
    parzen_predict_proba,
)
from .decision import (
    REJECTION_THRESHOLDS,
    WEIGHTS,
    ParamVector,
    decide_abstaining,
    decide_weighted,
)
from .metrics import (
    MetricReport,
    UndefinedMetricError,
    build_confusion,
    ni,
    report,
)
from .optimizer import ParamSpace, PowellConfig, powell_maximize
from .roc import roc_from_scores

__all__ = [
    "METHODS",
    "CLASSIFIERS",
    "Dataset",
    "ExperimentPlan",
    "SplitPlan",
    "EvalRecord",
    "RunResult",
    "ingest_csv",
    "fit_rescaler",
    "Rescaler",
    "splitmix64",
    "seed_stream",
    "stratified_folds",
    "plan_splits",
    "nested_cv_run",
    "fixed_param_run",
    "validation_curves",
    "run_benchmark",
    "weight_space",
    "threshold_space",
]

METHODS = (
    "plain",
    "smote",
    "costsens",
    "chow",
    "gmean",
    "gmean-rej",
    "ni",
    "ni-rej",
)
CLASSIFIERS = ("knn", "parzen")

_ABSTAINING = frozenset({"chow", "gmean-rej", "ni-rej"})
_OPTIMIZED = frozenset({"gmean", "gmean-rej", "ni", "ni-rej"})
_WEIGHT_FLOOR = 1e-4
_THRESHOLD_CEIL = 1.0 - 1e-9
_CHOW_THRESHOLD = 0.3
_SMOTE_AMOUNTS = (1, 2, 3, 4, 5)

# purpose tags keep derived seed streams from colliding
_TAG_OUTER, _TAG_INNER, _TAG_OPT, _TAG_SMOTE = 1, 2, 3, 4

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 step: a well-mixed 64-bit hash of a 64-bit value."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def seed_stream(master: int, *path: int) -> int:
    """Derive a child seed from a master seed and an index path.

    Chaining splitmix64 over the path elements makes every (repetition,
    fold, purpose) combination independently re-runnable without sharing
    generator state.
    """
    state = splitmix64(master & _MASK64)
    for element in path:
        state = splitmix64(state ^ splitmix64(element & _MASK64))
    return state


@dataclass(frozen=True)
class Dataset:
    """Numeric features with integer labels 1..m ordered by class size.

    Features are stored exactly as ingested; rescaling happens inside the
    evaluation protocol so that its scope (training-only or global) stays
    a per-run choice. ``label_names`` maps each class index back to the
    label value found in the source file.
    """

    features: np.ndarray
    labels: np.ndarray
    label_names: tuple = ()
    name: str = "dataset"

    def __post_init__(self) -> None:
        features = np.asarray(self.features, dtype=np.float64).copy()
        labels = np.asarray(self.labels, dtype=np.int64).copy()
        if features.ndim != 2:
            raise ValueError("features must be a 2-d matrix")
        if labels.shape != (features.shape[0],):
            raise ValueError("need exactly one label per feature row")
        if not np.isfinite(features).all():
            raise ValueError("features must be finite")
        if labels.size == 0:
            raise ValueError("the dataset is empty")
        m = int(labels.max())
        if labels.min() < 1:
            raise ValueError("labels must start at 1")
        counts = np.bincount(labels, minlength=m + 1)[1:]
        if (counts == 0).any():
            raise ValueError("every class index up to the maximum must occur")
        if (np.diff(counts) > 0).any():
            raise ValueError("class indices must be ordered by descending size")
        label_names = tuple(self.label_names) or tuple(
            str(i) for i in range(1, m + 1)
        )
        if len(label_names) != m:
            raise ValueError("need one label name per class")
        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "label_names", label_names)

    @property
    def n(self) -> int:
        return int(self.features.shape[0])

    @property
    def d(self) -> int:
        return int(self.features.shape[1])

    @property
    def m(self) -> int:
        return int(self.labels.max())

    @property
    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.m + 1)[1:]


def ingest_csv(path, label_col=None, positive_class=None, name=None) -> Dataset:
    """Load a delimited numeric dataset and index its classes by size.

    ``label_col`` selects the label column by integer position or by
    header name; by default the last column is the label. A header row is
    recognized by a non-numeric first-row cell in a column that is numeric
    in every data row, so string labels alone never trigger it (an
    all-numeric header is indistinguishable from data and read as data).
    Classes are reindexed by descending size (ties broken by label value),
    so class 1 is always the largest. Passing ``positive_class`` (a label
    value) collapses the problem to two classes with that one as class 2
    and everything else merged into class 1; the chosen class must be the
    minority side of the split, as the class-order conventions require.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path}: the file is empty")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ValueError(f"{path}: rows have inconsistent column counts")
    if width < 2:
        raise ValueError(f"{path}: need at least one feature column plus labels")

    header = None
    if len(rows) > 1 and _looks_like_header(rows[0], rows[1:]):
        header = [cell.strip() for cell in rows[0]]
        rows = rows[1:]

    if label_col is None:
        label_idx = width - 1
    elif isinstance(label_col, int) or _is_integer_string(label_col):
        label_idx = int(label_col)
        if not -width <= label_idx < width:
            raise ValueError(f"{path}: label column {label_col} out of range")
        label_idx %= width
    else:
        if header is None:
            raise ValueError(
                f"{path}: label column named {label_col!r} needs a header row"
            )
        if label_col not in header:
            raise ValueError(f"{path}: no column named {label_col!r}")
        label_idx = header.index(label_col)

    raw_labels = [row[label_idx].strip() for row in rows]
    features = np.empty((len(rows), width - 1))
    for r, row in enumerate(rows):
        c_out = 0
        for c, cell in enumerate(row):
            if c == label_idx:
                continue
            try:
                features[r, c_out] = float(cell)
            except ValueError:
                file_row = r + 1 + (header is not None)
                raise ValueError(
                    f"{path}: non-numeric cell {cell!r} at row {file_row}, "
                    f"column {c + 1}"
                ) from None
            c_out += 1

    if positive_class is not None:
        positive = str(positive_class)
        if positive not in raw_labels:
            raise ValueError(f"{path}: no instance labeled {positive!r}")
        is_pos = np.array([lab == positive for lab in raw_labels])
        if is_pos.all():
            raise ValueError(f"{path}: only one class present")
        n_pos = int(is_pos.sum())
        if 2 * n_pos > len(raw_labels):
            raise ValueError(
                f"{path}: positive class {positive!r} is the majority side "
                f"({n_pos} of {len(raw_labels)}); class 2 must be the "
                "minority, so pick the rarer side as positive"
            )
        labels = np.where(is_pos, 2, 1)
        label_names = ("rest", positive)
    else:
        values, counts = np.unique(np.asarray(raw_labels), return_counts=True)
        if values.shape[0] < 2:
            raise ValueError(f"{path}: only one class present")
        order = np.lexsort((values, -counts))
        rank = {values[j]: i + 1 for i, j in enumerate(order)}
        labels = np.array([rank[lab] for lab in raw_labels])
        label_names = tuple(str(values[j]) for j in order)

    if name is None:
        name = _stem(path)
    return Dataset(features, labels, label_names, name)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _looks_like_header(first, data) -> bool:
    """True when some column is numeric in every data row but not in row one."""
    for c, cell in enumerate(first):
        if _is_number(cell):
            continue
        if all(_is_number(row[c]) for row in data):
            return True
    return False


def _is_integer_string(value) -> bool:
    try:
        int(str(value))
    except ValueError:
        return False
    return True


def _stem(path) -> str:
    base = str(path).replace("\\", "/").rsplit("/", 1)[-1]
    return base.rsplit(".", 1)[0] if "." in base else base


@dataclass(frozen=True)
class Rescaler:
    """Per-dimension linear map fitted as min-max to [0, 1].

    Constant dimensions map to all zeros. Data outside the fitted range
    maps outside [0, 1]; no clipping, so the transform stays affine.
    """

    low: np.ndarray
    span: np.ndarray

    def apply(self, features) -> np.ndarray:
        features = np.asarray(features, dtype=np.float64)
        safe = np.where(self.span == 0.0, 1.0, self.span)
        out = (features - self.low) / safe
        out[:, self.span == 0.0] = 0.0
        return out


def fit_rescaler(features) -> Rescaler:
    features = np.asarray(features, dtype=np.float64)
    low = features.min(axis=0)
    span = features.max(axis=0) - low
    return Rescaler(low=low, span=span)


@dataclass(frozen=True)
class ExperimentPlan:
    """One method on one classifier under the shared evaluation protocol."""

    method: str
    classifier: str = "knn"
    k: int = 11
    r: int = 10
    folds: int = 3
    repetitions: int = 10
    seed: int = 0
    optimizer: PowellConfig = PowellConfig()
    global_scaling: bool = False
    chow_threshold: float = _CHOW_THRESHOLD
    smote_amounts: tuple = _SMOTE_AMOUNTS
    smote_k: int = 5

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.classifier not in CLASSIFIERS:
            raise ValueError(f"unknown classifier {self.classifier!r}")
        if self.folds < 2:
            raise ValueError("need at least two folds")
        if self.repetitions < 1:
            raise ValueError("need at least one repetition")

    @property
    def abstaining(self) -> bool:
        return self.method in _ABSTAINING

    @property
    def optimized(self) -> bool:
        return self.method in _OPTIMIZED

    @property
    def param_kind(self) -> str | None:
        if self.method in ("gmean", "ni"):
            return WEIGHTS
        if self.method in ("gmean-rej", "ni-rej"):
            return REJECTION_THRESHOLDS
        return None


@dataclass(frozen=True)
class SplitPlan:
    """Index sets for one (repetition, fold) unit, in dataset coordinates.

    ``inner`` holds the (estimation, validation) pairs carved out of the
    training set; the test set never appears in any of them.
    """

    rep: int
    fold: int
    train_idx: np.ndarray
    test_idx: np.ndarray
    inner: tuple


@dataclass(frozen=True)
class EvalRecord:
    rep: int
    fold: int
    report: MetricReport
    params: np.ndarray | None = None


@dataclass(frozen=True)
class RunResult:
    """All per-fold evaluations of one plan plus aggregation helpers."""

    plan: ExperimentPlan
    records: tuple
    m: int

    def metric_stats(self) -> dict:
        """Mean and sample standard deviation per reported metric.

        Keys follow the benchmark table layout: per-class error rates,
        total error, accuracy, per-class reject rates, total reject,
        recognition-rate geometric mean, F-measure (binary only), and the
        normalized mutual information. Values are (mean, std) tuples on
        the raw 0..1 scale.
        """
        names = _metric_names(self.m)
        columns = {name: [] for name in names}
        for record in self.records:
            for name, value in zip(names, _metric_row(record.report, self.m)):
                columns[name].append(value)
        return {name: _mean_std(values) for name, values in columns.items()}

    def param_stats(self) -> tuple[np.ndarray, np.ndarray] | None:
        """Mean and sample standard deviation per optimized coordinate."""
        stacked = [r.params for r in self.records if r.params is not None]
        if not stacked:
            return None
        stacked = np.vstack(stacked)
        mean = stacked.mean(axis=0)
        std = (
            stacked.std(axis=0, ddof=1)
            if stacked.shape[0] > 1
            else np.zeros(stacked.shape[1])
        )
        return mean, std


def _metric_names(m: int) -> tuple:
    if m == 2:
        class_tags = ("n", "p")
    else:
        class_tags = tuple(str(i) for i in range(1, m + 1))
    names = [f"e_{t}" for t in class_tags]
    names += ["e", "a"]
    names += [f"rej_{t}" for t in class_tags]
    names += ["rej", "g"]
    if m == 2:
        names.append("f")
    names.append("ni")
    return tuple(names)


def _metric_row(rep: MetricReport, m: int) -> list:
    row = list(rep.per_class_error)
    row += [rep.error, rep.accuracy]
    row += list(rep.per_class_reject)
    row += [rep.reject, rep.gmean]
    if m == 2:
        row.append(rep.fmeasure if rep.fmeasure is not None else math.nan)
    row.append(rep.ni)
    return row


def _mean_std(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return mean, std


def stratified_folds(labels, n_folds: int, seed: int) -> list:
    """Disjoint fold index arrays with per-class counts balanced to 1.

    Each class's indices are shuffled with the given seed and dealt
    round-robin, so fold class counts differ by at most one instance.
    """
    labels = np.asarray(labels)
    if n_folds < 2:
        raise ValueError("need at least two folds")
    rng = np.random.default_rng(seed)
    folds = [[] for _ in range(n_folds)]
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        for j, i in enumerate(idx):
            folds[j % n_folds].append(int(i))
    return [np.array(sorted(fold), dtype=np.int64) for fold in folds]


def plan_splits(labels, folds: int, repetitions: int, master_seed: int) -> tuple:
    """All (repetition, fold) index plans for the nested protocol.

    Exposed separately from the runner so that split hygiene (test and
    training disjoint, inner pairs confined to the training set) can be
    audited without running any model.
    """
    labels = np.asarray(labels)
    plans = []
    for rep in range(repetitions):
        outer = stratified_folds(
            labels, folds, seed_stream(master_seed, _TAG_OUTER, rep)
        )
        for fold in range(folds):
            test_idx = outer[fold]
            train_idx = np.array(
                sorted(
                    int(i)
                    for g, part in enumerate(outer)
                    if g != fold
                    for i in part
                ),
                dtype=np.int64,
            )
            inner_folds = stratified_folds(
                labels[train_idx],
                folds,
                seed_stream(master_seed, _TAG_INNER, rep, fold),
            )
            pairs = []
            for g in range(folds):
                val = train_idx[inner_folds[g]]
                est = train_idx[
                    np.array(
                        sorted(
                            int(i)
                            for h, part in enumerate(inner_folds)
                            if h != g
                            for i in part
                        ),
                        dtype=np.int64,
                    )
                ]
                pairs.append((est, val))
            plans.append(
                SplitPlan(
                    rep=rep,
                    fold=fold,
                    train_idx=train_idx,
                    test_idx=test_idx,
                    inner=tuple(pairs),
                )
            )
    return tuple(plans)


def weight_space(m: int) -> ParamSpace:
    """Search box for the m - 1 free class weights (the last is pinned at 1)."""
    if m < 2:
        raise ValueError("need at least two classes")
    return ParamSpace(np.full(m - 1, _WEIGHT_FLOOR), np.ones(m - 1))


def threshold_space(m: int) -> ParamSpace:
    """Search box for the m rejection thresholds, sum held below m - 1."""
    if m < 2:
        raise ValueError("need at least two classes")
    return ParamSpace(
        np.zeros(m), np.full(m, _THRESHOLD_CEIL), sum_upper=float(m - 1)
    )


def _fit_predictor(plan: ExperimentPlan, features, labels, m: int):
    if plan.classifier == "knn":
        model = knn_fit(features, labels, k=plan.k, m=m)
        return lambda queries: knn_predict_proba(model, queries)
    model = parzen_fit(features, labels, r=plan.r, m=m)
    return lambda queries: parzen_predict_proba(model, queries)


def _objective(kind: str, metric: str, probs, targets, m: int):
    targets = np.asarray(targets)

    def run(x):
        if kind == WEIGHTS:
            decisions = decide_weighted(probs, np.append(x, 1.0))
        else:
            decisions = decide_abstaining(probs, x)
        cm = build_confusion(targets, decisions, m)
        try:
            if metric == "ni":
                return ni(cm)
            return gmean_objective(cm)
        except UndefinedMetricError:
            return math.nan

    return run


def _check_stratifiable(dataset: Dataset, folds: int) -> None:
    smallest = int(dataset.class_counts.min())
    if smallest < folds:
        raise ValueError(
            f"class sizes go down to {smallest}, too small for "
            f"{folds}-fold stratification"
        )


def _scaled(plan: ExperimentPlan, fit_part, *parts):
    """Scale feature blocks; fitted on the first block unless global."""
    if plan.global_scaling:
        return parts
    scaler = fit_rescaler(fit_part)
    return tuple(scaler.apply(part) for part in parts)


def _optimize_fold(plan, features, labels, split, m) -> np.ndarray:
    metric = "ni" if plan.method.startswith("ni") else "gmean"
    kind = plan.param_kind
    space = weight_space(m) if kind == WEIGHTS else threshold_space(m)
    best = []
    for pair_index, (est_idx, val_idx) in enumerate(split.inner):
        x_est, x_val = _scaled(
            plan, features[est_idx], features[est_idx], features[val_idx]
        )
        predictor = _fit_predictor(plan, x_est, labels[est_idx], m)
        probs = predictor(x_val)
        objective = _objective(kind, metric, probs, labels[val_idx], m)
        cfg = replace(
            plan.optimizer,
            seed=seed_stream(plan.seed, _TAG_OPT, split.rep, split.fold, pair_index),
        )
        result = powell_maximize(objective, space, cfg)
        best.append(result.best_params)
    return np.mean(np.vstack(best), axis=0)


def _decide(plan, probs, train_labels, m, params):
    if plan.method in ("plain", "smote"):
        return decide_weighted(probs, np.ones(m))
    if plan.method == "costsens":
        counts = np.bincount(train_labels, minlength=m + 1)[1:]
        return cost_sensitive_decide(probs, inverse_frequency_costs(counts))
    if plan.method == "chow":
        return chow_reject_decide(probs, plan.chow_threshold)
    if plan.param_kind == WEIGHTS:
        return decide_weighted(probs, np.append(params, 1.0))
    return decide_abstaining(probs, params)


def _evaluate_fold(plan, features, labels, split, m, params) -> MetricReport:
    x_train, x_test = _scaled(
        plan,
        features[split.train_idx],
        features[split.train_idx],
        features[split.test_idx],
    )
    y_train = labels[split.train_idx]
    y_test = labels[split.test_idx]

    if plan.method == "smote":
        reports = []
        for amount in plan.smote_amounts:
            x_aug, y_aug = smote_oversample(
                x_train,
                y_train,
                amount,
                k_neighbors=plan.smote_k,
                seed=seed_stream(
                    plan.seed, _TAG_SMOTE, split.rep, split.fold, amount
                ),
            )
            predictor = _fit_predictor(plan, x_aug, y_aug, m)
            decisions = _decide(plan, predictor(x_test), y_aug, m, None)
            cm = build_confusion(y_test, decisions, m)
            reports.append(report(cm, abstaining=False))
        return _mean_report(reports)

    predictor = _fit_predictor(plan, x_train, y_train, m)
    decisions = _decide(plan, predictor(x_test), y_train, m, params)
    cm = build_confusion(y_test, decisions, m)
    return report(cm, abstaining=plan.abstaining)


def _mean_report(reports) -> MetricReport:
    def mean(pick):
        return float(np.mean([pick(r) for r in reports]))

    def mean_vec(pick):
        return np.mean(np.vstack([pick(r) for r in reports]), axis=0)

    fmeasures = [r.fmeasure for r in reports]
    return MetricReport(
        ni=mean(lambda r: r.ni),
        accuracy=mean(lambda r: r.accuracy),
        error=mean(lambda r: r.error),
        reject=mean(lambda r: r.reject),
        per_class_error=mean_vec(lambda r: r.per_class_error),
        per_class_reject=mean_vec(lambda r: r.per_class_reject),
        per_class_recognition=mean_vec(lambda r: r.per_class_recognition),
        gmean=mean(lambda r: r.gmean),
        fmeasure=None if fmeasures[0] is None else float(np.mean(fmeasures)),
        abstaining=reports[0].abstaining,
    )


def nested_cv_run(dataset: Dataset, plan: ExperimentPlan) -> RunResult:
    """Run one plan through the full protocol and aggregate the 30 folds."""
    _check_stratifiable(dataset, plan.folds)
    features = dataset.features
    if plan.global_scaling:
        features = fit_rescaler(features).apply(features)
    splits = plan_splits(
        dataset.labels, plan.folds, plan.repetitions, plan.seed
    )
    records = []
    for split in splits:
        params = (
            _optimize_fold(plan, features, dataset.labels, split, dataset.m)
            if plan.optimized
            else None
        )
        fold_report = _evaluate_fold(
            plan, features, dataset.labels, split, dataset.m, params
        )
        records.append(
            EvalRecord(
                rep=split.rep, fold=split.fold, report=fold_report, params=params
            )
        )
    return RunResult(plan=plan, records=tuple(records), m=dataset.m)


def fixed_param_run(
    dataset: Dataset, plan: ExperimentPlan, params: ParamVector
) -> RunResult:
    """Evaluate fixed decision parameters under the same protocol.

    No inner optimization: the supplied weights or rejection thresholds
    are applied to every training fold's classifier as they stand.
    """
    if params.m != dataset.m:
        raise ValueError(
            f"parameter length implies {params.m} classes, dataset has {dataset.m}"
        )
    _check_stratifiable(dataset, plan.folds)
    features = dataset.features
    if plan.global_scaling:
        features = fit_rescaler(features).apply(features)
    abstaining = params.kind == REJECTION_THRESHOLDS
    splits = plan_splits(
        dataset.labels, plan.folds, plan.repetitions, plan.seed
    )
    records = []
    for split in splits:
        x_train, x_test = _scaled(
            plan,
            features[split.train_idx],
            features[split.train_idx],
            features[split.test_idx],
        )
        predictor = _fit_predictor(
            plan, x_train, dataset.labels[split.train_idx], dataset.m
        )
        probs = predictor(x_test)
        if abstaining:
            decisions = decide_abstaining(probs, params.values)
        else:
            decisions = decide_weighted(probs, params)
        cm = build_confusion(dataset.labels[split.test_idx], decisions, dataset.m)
        records.append(
            EvalRecord(
                rep=split.rep,
                fold=split.fold,
                report=report(cm, abstaining=abstaining),
                params=np.asarray(params.values),
            )
        )
    return RunResult(plan=plan, records=tuple(records), m=dataset.m)


def validation_curves(dataset: Dataset, plan: ExperimentPlan) -> list:
    """One ROC curve per inner validation set (folds^2 x repetitions).

    Binary only: the score is the positive-class posterior of a
    classifier fitted on the estimation partition. These are the curves
    whose threshold average the hull analysis runs on.
    """
    if dataset.m != 2:
        raise ValueError("ROC curves are defined for binary problems only")
    _check_stratifiable(dataset, plan.folds)
    features = dataset.features
    if plan.global_scaling:
        features = fit_rescaler(features).apply(features)
    splits = plan_splits(
        dataset.labels, plan.folds, plan.repetitions, plan.seed
    )
    curves = []
    for split in splits:
        for est_idx, val_idx in split.inner:
            x_est, x_val = _scaled(
                plan, features[est_idx], features[est_idx], features[val_idx]
            )
            predictor = _fit_predictor(
                plan, x_est, dataset.labels[est_idx], dataset.m
            )
            scores = predictor(x_val)[:, 1]
            val_labels = dataset.labels[val_idx]
            curves.append(
                roc_from_scores(scores[val_labels == 2], scores[val_labels == 1])
            )
    return curves


def _format_rate(value: float) -> str:
    return "" if math.isnan(value) else f"{100.0 * value:.4f}"


def _format_ni(value: float) -> str:
    return f"{value:.6f}"


def run_benchmark(
    dataset: Dataset,
    plans,
    out_dir,
    figure=True,
) -> dict:
    """Run several plans on one dataset and write the result tables.

    Emits ``<name>.csv`` (metric means, one row per method, columns in
    the fixed benchmark order), ``<name>_std.csv`` (matching standard
    deviations), ``<name>_params.csv`` (optimized-parameter statistics in
    long form), and ``<name>.md`` (mean(std) summary). With ``figure``
    set, also renders ``<name>.png``. Returns {method: RunResult}.
    """
    import os

    os.makedirs(out_dir, exist_ok=True)
    results: dict = {}
    for plan in plans:
        results[plan.method] = nested_cv_run(dataset, plan)

    names = _metric_names(dataset.m)
    base = os.path.join(str(out_dir), dataset.name)

    with open(f"{base}.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", *names])
        for method, result in results.items():
            writer.writerow(_table_row(method, result, names, 0))
    with open(f"{base}_std.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", *names])
        for method, result in results.items():
            writer.writerow(_table_row(method, result, names, 1))
    with open(f"{base}_params.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "kind", "index", "mean", "std"])
        for method, result in results.items():
            stats = result.param_stats()
            if stats is None:
                continue
            mean, std = stats
            kind = result.plan.param_kind
            for i, (mu, sigma) in enumerate(zip(mean, std), start=1):
                writer.writerow([method, kind, i, f"{mu:.6f}", f"{sigma:.6f}"])
    _write_markdown(f"{base}.md", dataset, results, names)

    if figure:
        from .figures import save_benchmark_figure

        save_benchmark_figure(
            {m: r.metric_stats() for m, r in results.items()},
            dataset.m,
            f"{base}.png",
            title=dataset.name,
        )
    return results


def _table_row(method: str, result: RunResult, names, which: int) -> list:
    stats = result.metric_stats()
    abstains = method in _ABSTAINING
    row = [method]
    for name in names:
        if name.startswith("rej") and not abstains:
            row.append("")
            continue
        value = stats[name][which]
        row.append(_format_ni(value) if name == "ni" else _format_rate(value))
    return row


def _write_markdown(path, dataset: Dataset, results: dict, names) -> None:
    lines = [
        f"# {dataset.name}",
        "",
        f"{dataset.n} instances, {dataset.d} features, "
        f"class sizes {'/'.join(str(c) for c in dataset.class_counts)}.",
        "",
        "Rates are percentages, shown as mean(standard deviation) over "
        "all test folds.",
        "",
        "| method | " + " | ".join(names) + " |",
        "|" + "---|" * (len(names) + 1),
    ]
    for method, result in results.items():
        stats = result.metric_stats()
        abstains = method in _ABSTAINING
        cells = [method]
        for name in names:
            if name.startswith("rej") and not abstains:
                cells.append("")
                continue
            mean, std = stats[name]
            if name == "ni":
                cells.append(f"{mean:.4f}({std:.4f})")
            elif math.isnan(mean):
                cells.append("")
            else:
                cells.append(f"{100 * mean:.2f}({100 * std:.2f})")
        lines.append("| " + " | ".join(cells) + " |")
    param_lines = []
    for method, result in results.items():
        stats = result.param_stats()
        if stats is None:
            continue
        mean, std = stats
        label = (
            "weights" if result.plan.param_kind == WEIGHTS else "thresholds"
        )
        rendered = ", ".join(
            f"{mu:.4f}({sigma:.4f})" for mu, sigma in zip(mean, std)
        )
        param_lines.append(f"- {method} ({label}): {rendered}")
    if param_lines:
        lines += ["", "Optimized parameters:", ""] + param_lines
    lines.append("")
    with open(path, "w") as fh:
        fh.write("\n".join(lines))
