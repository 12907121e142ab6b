"""Patch datasets: normalization, directory loading, and a synthetic two-blob surrogate."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DatasetError, InvalidParameterError
from .images import GrayImage, load_image, save_pgm
from .trainer import LabeledDataset

PATCH_SIZE = 19
# recorded in model files and sweep output so other schemes can be compared
PREPROCESSING = "scale255-zero-mean-unit-variance"
IMAGE_SUFFIXES = (".pgm", ".png")

# directory names tried, in order, under a dataset root
_FACE_DIRS = ("faces", "face")
_NONFACE_DIRS = ("nonfaces", "non-face", "nonface")

# blob vector -> pixel mapping used when writing synthetic patches
_SYNTH_OFFSET = 127.5
_SYNTH_SCALE = 16.0


def normalize_patch(patch, patch_size: int | None = None) -> np.ndarray:
    """Flatten a square patch into a zero-mean, unit-variance feature vector.

    Pixels are scaled by 1/255, then standardized with the population
    standard deviation. A constant patch maps to the zero vector.
    """
    px = patch.pixels if isinstance(patch, GrayImage) else np.asarray(patch)
    if px.ndim != 2 or px.shape[0] != px.shape[1]:
        raise InvalidParameterError(f"patch must be square, got shape {px.shape}")
    if patch_size is not None and px.shape[0] != patch_size:
        raise InvalidParameterError(f"patch side {px.shape[0]} != configured size {patch_size}")
    flat = px.reshape(-1)
    if flat.min() == flat.max():
        return np.zeros(flat.size)
    vals = flat.astype(np.float64) / 255.0
    cen = vals - vals.mean()
    return cen / np.sqrt((cen * cen).mean())


@dataclass(frozen=True)
class DatasetManifest:
    face_dir: Path
    nonface_dir: Path
    patch_size: int = PATCH_SIZE
    expected_counts: tuple[int, int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "face_dir", Path(self.face_dir))
        object.__setattr__(self, "nonface_dir", Path(self.nonface_dir))
        if self.patch_size < 1:
            raise InvalidParameterError(f"patch_size must be >= 1, got {self.patch_size}")

    @classmethod
    def from_root(cls, root, patch_size=PATCH_SIZE, expected_counts=None):
        """Resolve ``<root>/faces`` and ``<root>/nonfaces`` (CBCL's ``face``/``non-face`` also accepted)."""
        root = Path(root)
        face = next((root / d for d in _FACE_DIRS if (root / d).is_dir()), root / _FACE_DIRS[0])
        nonface = next((root / d for d in _NONFACE_DIRS if (root / d).is_dir()), root / _NONFACE_DIRS[0])
        return cls(face, nonface, patch_size, expected_counts)


def _list_images(directory: Path):
    if not directory.is_dir():
        raise DatasetError(f"dataset directory not found: {directory}")
    files = [p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES]
    return sorted(files, key=lambda p: p.name)


def _load_dir(directory, patch_size):
    rows = []
    names = []
    for path in _list_images(directory):
        try:
            img = load_image(path)
        except Exception as exc:
            raise DatasetError(f"{path}: {exc}") from exc
        if img.width != patch_size or img.height != patch_size:
            raise DatasetError(
                f"{path}: image is {img.width}x{img.height}, expected {patch_size}x{patch_size}"
            )
        rows.append(normalize_patch(img))
        names.append(f"{directory.name}/{path.name}")
    return rows, names


def load_dataset(manifest: DatasetManifest) -> LabeledDataset:
    """Load faces (+1) then non-faces (-1), each in lexicographic filename order."""
    faces, face_names = _load_dir(manifest.face_dir, manifest.patch_size)
    nonfaces, nonface_names = _load_dir(manifest.nonface_dir, manifest.patch_size)
    if manifest.expected_counts is not None:
        want = tuple(manifest.expected_counts)
        got = (len(faces), len(nonfaces))
        if got != want:
            raise DatasetError(
                f"count mismatch: found {got[0]} faces / {got[1]} non-faces, "
                f"expected {want[0]} / {want[1]}"
            )
    if not faces and not nonfaces:
        raise DatasetError(f"no images found under {manifest.face_dir} or {manifest.nonface_dir}")
    r = manifest.patch_size ** 2
    inputs = np.array(faces + nonfaces, dtype=np.float64).reshape(-1, r)
    targets = np.concatenate([np.ones(len(faces)), -np.ones(len(nonfaces))])
    return LabeledDataset(inputs, targets, tuple(face_names + nonface_names))


def _blob_direction(dim):
    # zero-mean unit ramp, so per-patch mean removal does not erase the class offset
    if dim == 1:
        return np.ones(1)
    u = np.arange(dim, dtype=np.float64) - (dim - 1) / 2.0
    return u / np.linalg.norm(u)


def synth_dataset(seed: int, n_per_class: int, dim: int = PATCH_SIZE ** 2, separation: float = 20.0) -> LabeledDataset:
    """Two unit-variance isotropic Gaussian blobs whose means are ``separation`` apart.

    Faces (+1) come first, then non-faces (-1). Each class draws from its own
    child seed, so ``separation=0`` gives two independent samples of one
    distribution.
    """
    if dim < 1 or n_per_class < 1:
        raise InvalidParameterError("dim and n_per_class must be >= 1")
    if not (np.isfinite(separation) and separation >= 0):
        raise InvalidParameterError(f"separation must be >= 0, got {separation}")
    if seed < 0:
        raise InvalidParameterError("seed must be non-negative")
    face_ss, nonface_ss = np.random.SeedSequence(seed).spawn(2)
    offset = 0.5 * separation * _blob_direction(dim)
    faces = np.random.default_rng(face_ss).standard_normal((n_per_class, dim)) + offset
    nonfaces = np.random.default_rng(nonface_ss).standard_normal((n_per_class, dim)) - offset
    targets = np.concatenate([np.ones(n_per_class), -np.ones(n_per_class)])
    return LabeledDataset(np.vstack([faces, nonfaces]), targets)


def vector_to_patch(vec, patch_size: int = PATCH_SIZE) -> GrayImage:
    vec = np.asarray(vec, dtype=np.float64)
    if vec.size != patch_size * patch_size:
        raise InvalidParameterError(f"vector of length {vec.size} cannot fill a {patch_size}x{patch_size} patch")
    px = np.clip(np.floor(_SYNTH_OFFSET + _SYNTH_SCALE * vec + 0.5), 0, 255)
    return GrayImage(px.reshape(patch_size, patch_size).astype(np.uint8))


def write_dataset(dataset: LabeledDataset, root, patch_size: int = PATCH_SIZE) -> DatasetManifest:
    """Write raw vectors as PGM patches under ``<root>/faces`` and ``<root>/nonfaces``."""
    root = Path(root)
    face_dir = root / "faces"
    nonface_dir = root / "nonfaces"
    face_dir.mkdir(parents=True, exist_ok=True)
    nonface_dir.mkdir(parents=True, exist_ok=True)
    nf = nn = 0
    for vec, t in zip(dataset.inputs, dataset.targets):
        img = vector_to_patch(vec, patch_size)
        if t > 0:
            save_pgm(img, face_dir / f"face_{nf:05d}.pgm")
            nf += 1
        else:
            save_pgm(img, nonface_dir / f"nonface_{nn:05d}.pgm")
            nn += 1
    return DatasetManifest(face_dir, nonface_dir, patch_size, (nf, nn))
