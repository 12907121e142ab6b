"""JSON persistence for trained models (schema version 1).

Floats are written with Python's shortest round-trip repr, so a saved model
reloads bit-for-bit.
"""

from __future__ import annotations

import json
import math
import os
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import ModelFileError
from .rbf import RbfModel

SCHEMA_VERSION = 1


def _timestamp():
    # SOURCE_DATE_EPOCH pins the timestamp for reproducible output
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return now.replace(microsecond=0).isoformat().replace("+00:00", "Z")


def model_to_dict(model: RbfModel, metadata: dict | None = None) -> dict:
    meta = {"trained_at": _timestamp()}
    meta.update(metadata or {})
    return {
        "schema_version": SCHEMA_VERSION,
        "input_dim": model.input_dim,
        "spread": float(model.spread),
        "centers": model.centers.tolist(),
        "weights": model.weights.tolist(),
        "metadata": meta,
    }


def model_from_dict(doc: dict) -> tuple[RbfModel, dict]:
    if not isinstance(doc, dict):
        raise ModelFileError("model file must contain a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ModelFileError(
            f"unsupported model schema_version {version!r}; this build supports version {SCHEMA_VERSION}"
        )
    try:
        dim = int(doc["input_dim"])
        spread = float(doc["spread"])
        centers = np.asarray(doc["centers"], dtype=np.float64)
        weights = np.asarray(doc["weights"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFileError(f"malformed model file: {exc}") from exc
    if centers.ndim != 2 or centers.shape[1] != dim:
        raise ModelFileError(f"centers shape {centers.shape} inconsistent with input_dim {dim}")
    if weights.shape != (centers.shape[0],):
        raise ModelFileError(f"{weights.size} weights for {centers.shape[0]} centers")
    if not math.isfinite(spread) or spread <= 0:
        raise ModelFileError(f"invalid spread {spread}")
    return RbfModel(centers, weights, spread), dict(doc.get("metadata") or {})


def save_model(model: RbfModel, path, metadata: dict | None = None) -> Path:
    path = Path(path)
    text = json.dumps(model_to_dict(model, metadata), allow_nan=False)
    try:
        path.write_text(text + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write model {path}: {exc.strerror or exc}") from exc
    return path


def load_model(path) -> tuple[RbfModel, dict]:
    """Read a model file; returns (model, metadata)."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: not valid JSON: {exc}") from exc
    try:
        return model_from_dict(doc)
    except ModelFileError as exc:
        raise ModelFileError(f"{path}: {exc}") from exc
