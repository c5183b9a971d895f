"""Functional-data classification toolkit.

Pipeline: discretized functions on tensor-product grids -> pooled
covariance eigendecomposition -> projection scores -> bounded-weight ReLU
network trained on hinge loss with data-split model selection.  Ships QDA
and kernel-density baselines, synthetic generators with exact
log-density-ratio oracles for excess-risk studies, a seeded replication
benchmark with CSV output and figures, and a CLI (``fdnn --help``).
"""

from .bench import (
    ExperimentConfig,
    ReplicationRecord,
    ResultRow,
    aggregate_rows,
    read_config,
    read_results_csv,
    run_benchmark,
    run_replications,
    write_results_csv,
)
from .classifier import (
    Candidate,
    FDNNModel,
    HyperGrid,
    NPBayesModel,
    QDAModel,
    SelectionRecord,
    default_hyper_grid,
    fit_fdnn,
    fit_npbayes,
    fit_qda,
    misclassification_rate,
    predict_fdnn,
    predict_fdnn_many,
    predict_npbayes,
    predict_npbayes_many,
    predict_qda,
    predict_qda_many,
)
from .dataio import read_dataset, write_dataset
from .dgp import (
    DGPSpec,
    GaussianLaw,
    MultivariateTBlock,
    RiskEstimate,
    StudentTLaw,
    bayes_classify,
    bayes_classify_many,
    bayes_risk,
    block_t_spec,
    curve_from_coefficients,
    draw_coefficients,
    excess_risk,
    generate,
    oracle_log_ratio,
    oracle_log_ratio_many,
    standard_spec,
)
from .dnn import (
    NetworkArchitecture,
    NetworkGradient,
    NetworkParams,
    TrainConfig,
    forward,
    forward_many,
    hinge_risk,
    subgradient,
    train,
    train_trace,
)
from .errors import (
    DataFormatError,
    DegenerateDataError,
    EmptyClassError,
    FdnnError,
    IncompatibleGridsError,
    InsufficientDataError,
    InvalidArgumentError,
    NumericalFailureError,
)
from .fpca import (
    EigenSystem,
    ScoreMatrix,
    class_mean,
    eigendecompose,
    fit_eigensystem,
    pooled_covariance,
    project_scores,
)
from .grid import (
    FunctionalObservation,
    SamplingGrid,
    grids_equal,
    inner_product,
    make_equispaced_grid,
    make_trapezoid_grid,
    quadrature_norm,
)
from .persist import load_model, save_model
from .report import render_report

__version__ = "0.1.0"
