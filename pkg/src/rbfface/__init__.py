"""Face / non-face classification with a fixed-spread Gaussian RBF network.

Quick tour::

    from rbfface import synth_dataset, TrainConfig, train, evaluate

    data = synth_dataset(seed=0, n_per_class=200)
    model = train(data, TrainConfig(num_centers=8, spread=20.0))
    print(evaluate(model, synth_dataset(seed=1, n_per_class=200)))

``rbfface.BACKEND`` names the kernel implementation in use ("cython" or
"python").
"""

__version__ = "0.1.0"

from ._backend import NAME as BACKEND
from .centers import CenterSet, KMeansConfig, kmeans, random_subset
from .dataset import (
    PATCH_SIZE,
    PREPROCESSING,
    DatasetManifest,
    load_dataset,
    normalize_patch,
    synth_dataset,
    write_dataset,
)
from .detector import BoundingBox, DetectorConfig, annotate, build_pyramid, detect, nms, scan
from .errors import (
    DatasetError,
    DimensionError,
    InvalidParameterError,
    ModelFileError,
    NumericError,
    PgmParseError,
    RankDeficientWarning,
    RbfFaceError,
)
from .evaluator import (
    ConfusionCounts,
    EvaluationReport,
    SweepGrid,
    detection_rate,
    emit_csv,
    evaluate,
    run_sweep,
)
from .images import GrayImage, encode_pgm, load_image, load_pgm, save_pgm
from .modelfile import load_model, save_model
from .plots import emit_plots
from .rbf import RbfModel, activation_vector, classify, forward, gaussian_basis
from .trainer import (
    LabeledDataset,
    TrainConfig,
    build_design_matrix,
    fit,
    solve_weights,
    train,
)
