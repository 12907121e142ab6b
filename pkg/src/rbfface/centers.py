"""Choosing hidden-unit centers: Lloyd's k-means or a random subset of the data."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import InvalidParameterError

INIT_METHODS = ("random", "maximin")


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    max_iterations: int = 100
    seed: int = 0
    tolerance: float = 0.0
    # "random": k distinct data points; "maximin": one random point, then repeatedly the farthest point
    init: str = "random"

    def __post_init__(self):
        if self.init not in INIT_METHODS:
            raise InvalidParameterError(f"init must be one of {INIT_METHODS}, got {self.init!r}")
        if int(self.k) < 1:
            raise InvalidParameterError(f"k must be >= 1, got {self.k}")
        if int(self.max_iterations) < 1:
            raise InvalidParameterError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.seed < 0:
            raise InvalidParameterError("seed must be non-negative")
        if not self.tolerance >= 0:
            raise InvalidParameterError(f"tolerance must be >= 0, got {self.tolerance}")


@dataclass(frozen=True, eq=False)
class CenterSet:
    """Selected centers plus the distortion (sum of squared distances to the nearest center).

    ``history`` holds the distortion after initialization and after every
    Lloyd iteration; it has a single entry for random subsets.
    """

    centers: np.ndarray
    distortion: float
    history: tuple = field(default=())
    iterations: int = 0

    def __post_init__(self):
        self.centers.setflags(write=False)

    def __len__(self):
        return self.centers.shape[0]


def _as_points(points):
    X = np.ascontiguousarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] == 0:
        raise InvalidParameterError("points must be a non-empty (N, R) array")
    if not np.isfinite(X).all():
        raise InvalidParameterError("points must be finite")
    return X


def _assign(X, C):
    d2 = kernels.pairwise_sq_dist(X, C)
    labels = d2.argmin(axis=1)
    mind = d2[np.arange(X.shape[0]), labels]
    return labels, mind


def _init_distinct(X, k, rng):
    # walk a random permutation, keeping the first k points with distinct values
    chosen = []
    seen = set()
    for i in rng.permutation(X.shape[0]):
        key = X[i].tobytes()
        if key in seen:
            continue
        seen.add(key)
        chosen.append(i)
        if len(chosen) == k:
            break
    return X[np.asarray(chosen)].copy()


def _init_maximin(X, k, rng):
    chosen = [int(rng.integers(X.shape[0]))]
    mind = kernels.pairwise_sq_dist(X, X[chosen]).ravel()
    while len(chosen) < k:
        far = int(np.argmax(mind))
        chosen.append(far)
        mind = np.minimum(mind, kernels.pairwise_sq_dist(X, X[far:far + 1]).ravel())
    return X[np.asarray(chosen)].copy()


def kmeans(points, config: KMeansConfig) -> CenterSet:
    """Lloyd's algorithm, seeded from k distinct data points.

    Stops when assignments stop changing, when the distortion improves by no
    more than ``config.tolerance``, or after ``config.max_iterations`` updates.
    A cluster left empty by an update is re-seeded with the point currently
    farthest from its own center.
    """
    X = _as_points(points)
    k = int(config.k)
    n_distinct = np.unique(X, axis=0).shape[0]
    if k > n_distinct:
        raise InvalidParameterError(f"k={k} exceeds the number of distinct points ({n_distinct})")
    rng = np.random.default_rng(config.seed)
    lo = X.min(axis=0)
    hi = X.max(axis=0)

    if config.init == "maximin":
        centers = _init_maximin(X, k, rng)
    else:
        centers = _init_distinct(X, k, rng)
    labels, mind = _assign(X, centers)
    distortion = float(mind.sum())
    history = [distortion]
    it = 0
    while it < config.max_iterations:
        it += 1
        centers = _update(X, labels, mind, k, lo, hi)
        new_labels, mind = _assign(X, centers)
        new_distortion = float(mind.sum())
        history.append(new_distortion)
        improvement = distortion - new_distortion
        changed = not np.array_equal(new_labels, labels)
        labels, distortion = new_labels, new_distortion
        if not changed or improvement <= config.tolerance:
            break
    return CenterSet(centers, distortion, tuple(history), it)


def _update(X, labels, mind, k, lo, hi):
    r = X.shape[1]
    sums = np.zeros((k, r))
    np.add.at(sums, labels, X)
    counts = np.bincount(labels, minlength=k)
    centers = np.empty((k, r))
    full = counts > 0
    centers[full] = sums[full] / counts[full, None]
    # a mean can land one ulp outside the data's bounding box
    np.clip(centers, lo, hi, out=centers)
    if not full.all():
        mind = mind.copy()
        for j in np.flatnonzero(~full):
            far = int(np.argmax(mind))
            centers[j] = X[far]
            mind[far] = -1.0
    return centers


def random_subset(points, k: int, seed: int) -> CenterSet:
    """Pick k data points uniformly without replacement as centers."""
    X = _as_points(points)
    k = int(k)
    if k < 1 or k > X.shape[0]:
        raise InvalidParameterError(f"k must be in [1, {X.shape[0]}], got {k}")
    if seed < 0:
        raise InvalidParameterError("seed must be non-negative")
    rng = np.random.default_rng(seed)
    idx = rng.choice(X.shape[0], size=k, replace=False)
    centers = X[idx].copy()
    _, mind = _assign(X, centers)
    distortion = float(mind.sum())
    return CenterSet(centers, distortion, (distortion,), 0)
