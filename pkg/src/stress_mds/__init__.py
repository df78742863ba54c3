"""Metric MDS toolkit: per-pair stochastic stress minimization with a SMACOF baseline."""

from .data_model import (
    Dataset,
    DissimilarityProvider,
    Embedding,
    SolverTrace,
    TraceEntry,
    WeightScheme,
    get_dissimilarity,
    get_weight,
    make_lazy_provider,
    make_precomputed_provider,
    provider_from_packed,
)
from .datasets import (
    BlobSpec,
    generate_blobs,
    load_dissimilarity_csv,
    load_feature_csv,
    save_embedding_csv,
)
from .errors import (
    CapacityError,
    DataError,
    DegeneratePairError,
    SolverError,
    StressMdsError,
)
from .sgd_solver import (
    ScheduleState,
    SgdConfig,
    apply_pair_update,
    fit_sgd,
    init_embedding,
    learning_rate,
    make_schedule,
    run_epoch_lazysample,
    run_epoch_pairstream,
)
from .smacof_solver import SmacofConfig, fit_smacof, guttman_step
from .stress_eval import StressReport, full_stress, pair_gradient, sampled_stress

__version__ = "0.1.0"

__all__ = [
    "BlobSpec", "CapacityError", "DataError", "Dataset", "DegeneratePairError",
    "DissimilarityProvider", "Embedding", "ScheduleState", "SgdConfig",
    "SmacofConfig", "SolverError", "SolverTrace", "StressMdsError",
    "StressReport", "TraceEntry", "WeightScheme", "apply_pair_update",
    "fit_sgd", "fit_smacof", "full_stress", "generate_blobs",
    "get_dissimilarity", "get_weight", "guttman_step", "init_embedding",
    "learning_rate", "load_dissimilarity_csv", "load_feature_csv",
    "make_lazy_provider", "make_precomputed_provider", "make_schedule",
    "pair_gradient", "provider_from_packed", "run_epoch_lazysample",
    "run_epoch_pairstream", "sampled_stress", "save_embedding_csv",
]
