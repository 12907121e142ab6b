"""Pure numpy implementations of the hot loops.

Used when the compiled ``_ckernels`` extension is unavailable, or when
``RBFFACE_BACKEND=python`` is set. Every function here has the same
signature and contract as its compiled twin; results agree to rounding.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

# bound on the (rows, centers, dim) difference tensor, in elements
_BLOCK = 1 << 21


def pairwise_sq_dist(X, C):
    X = np.ascontiguousarray(X, dtype=np.float64)
    C = np.ascontiguousarray(C, dtype=np.float64)
    if X.ndim != 2 or C.ndim != 2 or X.shape[1] != C.shape[1]:
        raise ValueError("dimension mismatch")
    n, r = X.shape
    s = C.shape[0]
    out = np.empty((n, s), dtype=np.float64)
    if n == 0 or s == 0:
        return out
    step = max(1, _BLOCK // max(1, s * r))
    for i in range(0, n, step):
        diff = X[i:i + step, None, :] - C[None, :, :]
        np.einsum("ijk,ijk->ij", diff, diff, out=out[i:i + step])
    return out


def _normalize_rows(raw):
    # raw: (m, r) uint8 windows -> standardized float rows; constant rows -> 0
    vals = raw.astype(np.float64) / 255.0
    const = raw.min(axis=1) == raw.max(axis=1)
    mean = vals.mean(axis=1, keepdims=True)
    cen = vals - mean
    sd = np.sqrt((cen * cen).mean(axis=1, keepdims=True))
    sd[const] = 1.0
    out = cen / sd
    out[const] = 0.0
    return out


def scan_level(img, patch, stride, centers, weights, spread):
    img = np.ascontiguousarray(img, dtype=np.uint8)
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if centers.shape[1] != patch * patch:
        raise ValueError("dimension mismatch")
    h, w = img.shape
    if h < patch or w < patch:
        return np.empty((0, 0), dtype=np.float64)
    view = sliding_window_view(img, (patch, patch))[::stride, ::stride]
    ny, nx = view.shape[:2]
    out = np.empty((ny, nx), dtype=np.float64)
    inv_beta2 = 1.0 / (spread * spread)
    rows_per_chunk = max(1, 4096 // nx)
    for y0 in range(0, ny, rows_per_chunk):
        block = view[y0:y0 + rows_per_chunk]
        m = block.shape[0] * nx
        feats = _normalize_rows(block.reshape(m, patch * patch))
        act = np.exp(-pairwise_sq_dist(feats, centers) * inv_beta2)
        out[y0:y0 + block.shape[0]] = (act * weights).sum(axis=1).reshape(block.shape[0], nx)
    return out


def nms_keep(x, y, side, threshold):
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    side = np.asarray(side, dtype=np.int64)
    x2 = x + side
    y2 = y + side
    area = (side * side).astype(np.float64)
    order = np.arange(x.shape[0])
    keep = []
    while order.size:
        i = order[0]
        keep.append(i)
        rest = order[1:]
        iw = np.minimum(x2[i], x2[rest]) - np.maximum(x[i], x[rest])
        ih = np.minimum(y2[i], y2[rest]) - np.maximum(y[i], y[rest])
        inter = (np.maximum(iw, 0) * np.maximum(ih, 0)).astype(np.float64)
        iou = inter / (area[i] + area[rest] - inter)
        order = rest[~(iou > threshold)]
    return np.asarray(keep, dtype=np.intp)
