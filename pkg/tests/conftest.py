import numpy as np
import pytest

from rbfface import GrayImage, LabeledDataset, TrainConfig, normalize_patch, train


def brute_force_two_partition(x):
    """Exhaustive minimum-distortion split of scalar points into two non-empty groups.

    Returns (distortion, sorted group means).
    """
    import itertools

    x = np.asarray(x, dtype=float)
    best = None
    for mask in itertools.product((0, 1), repeat=len(x)):
        m = np.array(mask, dtype=bool)
        if m.all() or not m.any():
            continue
        a, b = x[~m], x[m]
        d = ((a - a.mean()) ** 2).sum() + ((b - b.mean()) ** 2).sum()
        if best is None or d < best[0]:
            best = (d, sorted([a.mean(), b.mean()]))
    return best


def gd_least_squares(A, t, lam=0.0, steps=100_000):
    """Plain gradient descent on ||Aw - t||^2 + lam ||w||^2.

    Step size 1/L with L = 2 (||A||_F^2 + lam), an upper bound on the
    Hessian's largest eigenvalue that needs no factorization.
    """
    A = np.asarray(A, dtype=float)
    t = np.asarray(t, dtype=float)
    L = 2.0 * ((A * A).sum() + lam)
    w = np.zeros(A.shape[1])
    for _ in range(steps):
        g = 2.0 * (A.T @ (A @ w - t)) + 2.0 * lam * w
        w -= g / L
    return w


def plant_faces(shape, locations, seed=0, patch=19):
    """Random-noise image with random-noise 'face' patches at the given (x, y) corners.

    Returns (image, list of face patch arrays).
    """
    rng = np.random.default_rng(seed)
    px = rng.integers(0, 256, size=shape).astype(np.uint8)
    faces = []
    for x, y in locations:
        face = rng.integers(0, 256, size=(patch, patch)).astype(np.uint8)
        px[y:y + patch, x:x + patch] = face
        faces.append(face)
    return GrayImage(px), faces


def planted_model(faces, seed=0, n_neg=20, spread=5.0, patch=19):
    """Model trained to near-interpolation: every face patch +1, random noise patches -1, one center per sample."""
    rng = np.random.default_rng(seed + 1000)
    pos = [normalize_patch(f) for f in faces]
    neg = [normalize_patch(rng.integers(0, 256, size=(patch, patch)).astype(np.uint8)) for _ in range(n_neg)]
    data = LabeledDataset(np.array(pos + neg), np.r_[np.ones(len(pos)), -np.ones(len(neg))])
    return train(data, TrainConfig(len(data), spread, "random_subset", seed=seed))


@pytest.fixture(scope="session")
def planted_single():
    image, faces = plant_faces((30, 34), [(0, 0)], seed=3)
    return image, planted_model(faces, seed=3)
