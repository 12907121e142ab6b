"""Gaussian RBF network evaluation: basis, hidden activations, output score.

The network has a single linear output and no bias term::

    score(x) = sum_k w_k * exp(-||x - c_k||^2 / spread^2)

All arithmetic is float64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import DimensionError, InvalidParameterError

FACE = "face"
NONFACE = "nonface"


def _frozen(a):
    a = np.array(a, dtype=np.float64, order="C", copy=True)
    a.setflags(write=False)
    return a


def _check_spread(spread):
    if not (math.isfinite(spread) and spread > 0):
        raise InvalidParameterError(f"spread must be a positive finite number, got {spread!r}")


@dataclass(frozen=True, eq=False)
class RbfModel:
    """A trained network. Arrays are copied and made read-only on construction.

    Attributes:
        centers: (S1, R) array of hidden-unit centers.
        weights: (S1,) output-layer weights.
        spread: shared Gaussian width, > 0.
    """

    centers: np.ndarray
    weights: np.ndarray
    spread: float

    def __post_init__(self):
        centers = _frozen(self.centers)
        weights = _frozen(self.weights)
        if centers.ndim != 2 or centers.shape[0] < 1 or centers.shape[1] < 1:
            raise InvalidParameterError(f"centers must be a non-empty (S1, R) array, got shape {centers.shape}")
        if weights.shape != (centers.shape[0],):
            raise InvalidParameterError(
                f"weights shape {weights.shape} does not match {centers.shape[0]} centers"
            )
        spread = float(self.spread)
        _check_spread(spread)
        if not (np.isfinite(centers).all() and np.isfinite(weights).all()):
            raise InvalidParameterError("centers and weights must be finite")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "spread", spread)

    @property
    def input_dim(self) -> int:
        return self.centers.shape[1]

    @property
    def num_centers(self) -> int:
        return self.centers.shape[0]

    def activations(self, X) -> np.ndarray:
        """Hidden-layer outputs for a batch, shape (N, S1)."""
        X = _as_batch(X, self.input_dim)
        return np.exp(-kernels.pairwise_sq_dist(X, self.centers) / (self.spread * self.spread))

    def scores(self, X) -> np.ndarray:
        """Network outputs for a batch, shape (N,)."""
        return self.activations(X) @ self.weights


def _as_batch(X, dim):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != dim:
        raise DimensionError(f"expected inputs of dimension {dim}, got shape {X.shape}")
    return X


def gaussian_basis(distance: float, spread: float) -> float:
    """exp(-distance**2 / spread**2)."""
    distance = float(distance)
    spread = float(spread)
    _check_spread(spread)
    if not math.isfinite(distance) or distance < 0:
        raise InvalidParameterError(f"distance must be finite and non-negative, got {distance!r}")
    return math.exp(-(distance * distance) / (spread * spread))


def activation_vector(x, model: RbfModel) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != model.input_dim:
        raise DimensionError(f"expected a vector of length {model.input_dim}, got shape {x.shape}")
    return model.activations(x)[0]


def forward(x, model: RbfModel) -> float:
    return float(activation_vector(x, model) @ model.weights)


def classify(score: float, threshold: float = 0.0) -> str:
    """Label a score; a score equal to the threshold counts as a face."""
    return FACE if score >= threshold else NONFACE
