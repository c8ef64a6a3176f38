"""Cost-and-error sensitive multiclass classification.

Reduction algorithms (one-versus-all/one-versus-one/tournament trees,
one-sided regression, pairwise cost-sensitive decompositions, consistency
re-weighting), soft cost blending, benchmark cost generators, evaluation
criteria, and an experiment harness with a CLI.
"""

from .data import (
    ClassWeights,
    CostMatrix,
    CostSensitiveDataset,
    CostVector,
    Dataset,
    FeatureVector,
    ScalerState,
    attach_costs_from_matrix,
    attach_regular_costs,
    fit_scaler,
    apply_scaler,
    naive_cost_matrix,
    parse_cost_matrix,
    parse_dataset,
    regular_cost_vector,
    scale_dataset,
    split_train_test,
    stratified_split,
    write_cost_matrix,
    write_dataset,
)
from .kernels import LINEAR_KERNEL, PERCEPTRON_KERNEL, Kernel, KernelCache, kernel_eval
from .learner import (
    BinaryModel,
    OneSidedProblem,
    Regressor,
    WeightedBinaryProblem,
    decision_value,
    train_one_sided,
    train_weighted_binary,
)
from .reductions import (
    CszlModel,
    MulticlassModel,
    OsrModel,
    OvaModel,
    OvoModel,
    TreeModel,
    cszl_weights,
    predict,
    train_csft,
    train_csovo,
    train_cszl,
    train_ft,
    train_osr,
    train_ova,
    train_ovo,
    train_weighted_ova,
    train_weighted_ovo,
)
from .soft import SoftParams, blend_cost, blend_matrix, soften_dataset, train_soft
from .costgen import (
    balance_rows,
    balanced_class_weights,
    emphasize_column,
    gen_consistent,
    gen_inconsistent,
    normalize_matrix_sum,
)
from .evaluation import (
    Aggregate,
    RunResult,
    aggregate,
    error_rate,
    g_mean,
    mean_cost,
    paired_t_one_tailed,
    t_critical,
    weighted_error,
)
from .harness import (
    CostSource,
    ExperimentConfig,
    Report,
    cv_select,
    emit_report,
    load_config,
    parse_report_csv,
    run_emphasis_sweep,
    run_experiment,
    sweep_alpha,
)
from .synth import gaussian_clusters, three_clusters, two_gaussians
