"""Cost-free learning for class-imbalanced classification.

Maximizes the normalized mutual information between targets and decision
outputs over class weights or rejection thresholds, on top of ordinary
probabilistic classifiers, with no cost information required. Binary
problems additionally get the equivalent misclassification and rejection
costs of an optimized operating point and its location on the ROC convex
hull.
"""

from .baselines import (
    chow_reject_decide,
    cost_sensitive_decide,
    gmean_objective,
    inverse_frequency_costs,
    smote_oversample,
)
from .classifiers import (
    KnnModel,
    ParzenBayesModel,
    knn_fit,
    knn_predict_proba,
    parzen_fit,
    parzen_predict_proba,
)
from .costs import (
    CostWarning,
    FeasibilityReport,
    NormalizedCosts,
    RawCostMatrix,
    check_feasibility,
    conditional_risk,
    equivalent_misclassification_cost,
    equivalent_rejection_costs,
    normalize_costs,
    optimal_threshold,
    rejection_thresholds_from_costs,
    risk,
)
from .decision import (
    REJECTION_THRESHOLDS,
    WEIGHTS,
    ParamVector,
    decide_abstaining,
    decide_weighted,
    thresholds_to_weights,
    weights_to_thresholds,
)
from .harness import (
    CLASSIFIERS,
    METHODS,
    Dataset,
    EvalRecord,
    ExperimentPlan,
    Rescaler,
    RunResult,
    SplitPlan,
    fit_rescaler,
    fixed_param_run,
    ingest_csv,
    nested_cv_run,
    plan_splits,
    run_benchmark,
    seed_stream,
    splitmix64,
    stratified_folds,
    threshold_space,
    validation_curves,
    weight_space,
)
from .metrics import (
    ConfusionMatrix,
    MetricReport,
    UndefinedMetricError,
    build_confusion,
    ni,
    reject_label,
    report,
)
from .optimizer import (
    OptResult,
    ParamSpace,
    PowellConfig,
    RestartRecord,
    line_maximize,
    powell_maximize,
)
from .roc import (
    AbstainingSlopes,
    RocCurve,
    abstaining_slopes,
    abstaining_slopes_from_costs,
    auc,
    locate_operating_point,
    locate_operating_points,
    locate_reject_band,
    operating_slope,
    roc_from_scores,
    rocch,
    threshold_average,
)

__version__ = "0.1.0"
