"""Two-stage training: pick centers, then solve the output weights by least squares."""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .centers import CenterSet, KMeansConfig, kmeans, random_subset
from .errors import DimensionError, InvalidParameterError, NumericError, RankDeficientWarning
from .rbf import RbfModel

STRATEGIES = ("kmeans", "random_subset")


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Feature rows with +1 (face) / -1 (non-face) targets.

    ``names`` optionally records where each row came from (e.g. file names).
    """

    inputs: np.ndarray
    targets: np.ndarray
    names: tuple = field(default=())

    def __post_init__(self):
        X = np.array(self.inputs, dtype=np.float64, copy=True)
        t = np.array(self.targets, dtype=np.float64, copy=True)
        if X.ndim != 2 or X.shape[0] < 1:
            raise InvalidParameterError(f"inputs must be a non-empty (N, R) array, got shape {X.shape}")
        if t.shape != (X.shape[0],):
            raise InvalidParameterError(f"{t.shape[0] if t.ndim else 0} targets for {X.shape[0]} inputs")
        if not np.isin(t, (1.0, -1.0)).all():
            raise InvalidParameterError("every target must be exactly +1 or -1")
        if not np.isfinite(X).all():
            raise InvalidParameterError("inputs must be finite")
        if self.names and len(self.names) != X.shape[0]:
            raise InvalidParameterError("names length must match inputs")
        X.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "targets", t)
        object.__setattr__(self, "names", tuple(self.names))

    def __len__(self):
        return self.inputs.shape[0]

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]

    @property
    def faces(self) -> np.ndarray:
        return self.inputs[self.targets > 0]

    @property
    def nonfaces(self) -> np.ndarray:
        return self.inputs[self.targets < 0]


@dataclass(frozen=True)
class TrainConfig:
    num_centers: int
    spread: float
    center_strategy: str = "kmeans"
    seed: int = 0
    regularization: float = 0.0
    max_iterations: int = 100
    kmeans_init: str = "random"

    def __post_init__(self):
        if self.center_strategy not in STRATEGIES:
            raise InvalidParameterError(
                f"center_strategy must be one of {STRATEGIES}, got {self.center_strategy!r}"
            )
        if int(self.num_centers) < 1:
            raise InvalidParameterError(f"num_centers must be >= 1, got {self.num_centers}")
        if not (np.isfinite(self.spread) and self.spread > 0):
            raise InvalidParameterError(f"spread must be positive, got {self.spread}")
        if not (np.isfinite(self.regularization) and self.regularization >= 0):
            raise InvalidParameterError(f"regularization must be >= 0, got {self.regularization}")
        if self.seed < 0:
            raise InvalidParameterError("seed must be non-negative")


@dataclass(frozen=True)
class TrainResult:
    model: RbfModel
    solver_rank: int
    train_seconds: float
    center_set: CenterSet


def build_design_matrix(dataset, centers, spread: float) -> np.ndarray:
    """N x S1 matrix of Gaussian activations, entry (n, k) = phi(||x_n - c_k||).

    ``dataset`` may be a LabeledDataset or a raw (N, R) array; ``centers`` a
    CenterSet or a raw (S1, R) array.
    """
    X = dataset.inputs if isinstance(dataset, LabeledDataset) else dataset
    C = centers.centers if isinstance(centers, CenterSet) else centers
    X = np.ascontiguousarray(X, dtype=np.float64)
    C = np.ascontiguousarray(C, dtype=np.float64)
    if X.ndim != 2 or C.ndim != 2 or X.shape[1] != C.shape[1]:
        raise DimensionError(f"inputs {X.shape} and centers {C.shape} have inconsistent dimensions")
    if not (np.isfinite(spread) and spread > 0):
        raise InvalidParameterError(f"spread must be positive, got {spread}")
    d2 = kernels.pairwise_sq_dist(X, C)
    return np.exp(-d2 / (spread * spread))


def _solve(design, targets, regularization):
    A = np.asarray(design, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if A.ndim != 2 or t.shape != (A.shape[0],):
        raise DimensionError(f"design {A.shape} and targets {t.shape} disagree")
    if not (np.isfinite(A).all() and np.isfinite(t).all()):
        raise NumericError("design matrix or targets contain non-finite values")
    if regularization < 0:
        raise InvalidParameterError(f"regularization must be >= 0, got {regularization}")
    s = A.shape[1]
    if regularization > 0:
        # ridge as an augmented least-squares problem, no normal equations
        A = np.vstack([A, np.sqrt(regularization) * np.eye(s)])
        t = np.concatenate([t, np.zeros(s)])
    w, _, rank, _ = np.linalg.lstsq(A, t, rcond=None)
    return w, int(rank)


def solve_weights(design, targets, regularization: float = 0.0) -> np.ndarray:
    """Minimize ||design @ w - targets||^2 + regularization * ||w||^2.

    SVD-based; for a rank-deficient design with no regularization the
    minimum-norm solution is returned.
    """
    w, rank = _solve(design, targets, regularization)
    if rank < np.shape(design)[1]:
        warnings.warn(
            f"design matrix has effective rank {rank} < {np.shape(design)[1]} columns",
            RankDeficientWarning,
            stacklevel=2,
        )
    return w


def select_centers(dataset: LabeledDataset, config: TrainConfig) -> CenterSet:
    if config.num_centers > len(dataset):
        raise InvalidParameterError(
            f"num_centers={config.num_centers} exceeds training set size {len(dataset)}"
        )
    if config.center_strategy == "kmeans":
        kc = KMeansConfig(config.num_centers, config.max_iterations, config.seed, init=config.kmeans_init)
        return kmeans(dataset.inputs, kc)
    return random_subset(dataset.inputs, config.num_centers, config.seed)


def fit_weights(dataset: LabeledDataset, centers: CenterSet, spread: float, regularization: float = 0.0, warn: bool = True):
    """Solve the output layer for fixed centers. Returns (model, solver_rank).

    Emits RankDeficientWarning when the design matrix is numerically
    rank-deficient, unless ``warn`` is False (callers that record the rank
    themselves, e.g. threaded sweeps where warning filters are not thread-safe).
    """
    design = build_design_matrix(dataset, centers, spread)
    w, rank = _solve(design, dataset.targets, regularization)
    if warn and rank < design.shape[1]:
        warnings.warn(
            f"design matrix has effective rank {rank} < {design.shape[1]} columns "
            f"(spread={spread}, centers={design.shape[1]})",
            RankDeficientWarning,
            stacklevel=2,
        )
    C = centers.centers if isinstance(centers, CenterSet) else centers
    return RbfModel(C, w, spread), rank


def fit(dataset: LabeledDataset, config: TrainConfig) -> TrainResult:
    t0 = time.perf_counter()
    cs = select_centers(dataset, config)
    model, rank = fit_weights(dataset, cs, config.spread, config.regularization)
    return TrainResult(model, rank, time.perf_counter() - t0, cs)


def train(dataset: LabeledDataset, config: TrainConfig) -> RbfModel:
    return fit(dataset, config).model
