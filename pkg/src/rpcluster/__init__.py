"""Two-stage ensemble random-projection clustering for functional data."""

from .covariance import (
    ClusterMeans,
    SmootherConfig,
    eigensystem_from_covariance,
    pooled_eigenpairs_irregular,
    pooled_eigenpairs_regular,
)
from .dataset import (
    Curve,
    FunctionalDataset,
    Grid,
    Partition,
    Regime,
    build_dataset,
    partition_from_labels,
    uniform_grid,
)
from .errors import ConfigError, DataError, DegenerateError
from .harness import ExperimentConfig, run_experiment
from .io import load_dataset_csv, load_labels_csv, write_dataset_csv, write_labels_csv
from .madd import (
    PopulationSpec,
    base_distance,
    base_distance_matrix,
    madd_from_distances,
    madd_matrix,
    population_madd,
)
from .metrics import derivative, rand_index
from .models import (
    LabeledDataset,
    ModelSpec,
    fragment,
    generate_model,
    irregularize,
)
from .optimizer import OptimizerConfig, normalized_cost, optimize
from .pipeline import (
    ComboRecord,
    EnsembleConfig,
    EnsembleResult,
    Skipped,
    run_ensemble,
    stage_one,
    stage_two,
)
from .quadrature import inner_product, interpolate_to, trapezoid_weights
from .sampling import (
    BrownianBridge,
    BrownianMotion,
    EigenSystem,
    EstimatedKL,
    FourierExp,
    FourierPoly,
    HaarExp,
    HaarPoly,
    SeedSpec,
    default_families,
    sample_kl,
    sample_path,
    sample_paths,
)

__version__ = "0.1.0"
