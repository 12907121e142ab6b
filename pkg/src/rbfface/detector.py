"""Multi-scale sliding-window face detection with greedy non-max suppression."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._backend import kernels
from .dataset import PATCH_SIZE
from .errors import DimensionError, InvalidParameterError
from .images import GrayImage, save_pgm
from .rbf import RbfModel

DETECTIONS_HEADER = "x,y,side,score,scale_index"


@dataclass(frozen=True)
class BoundingBox:
    """Square detection in original-image pixels; (x, y) is the top-left corner."""

    x: int
    y: int
    side: int
    score: float
    scale_index: int = 0

    def sort_key(self):
        return (-self.score, self.y, self.x, self.scale_index)


@dataclass(frozen=True)
class DetectorConfig:
    patch_size: int = PATCH_SIZE
    stride: int = 1
    score_threshold: float = 0.0
    scale_factor: float = 1.2
    min_level_size: int | None = None
    # 1.0 disables suppression
    nms_overlap: float = 0.3

    def __post_init__(self):
        if self.patch_size < 1:
            raise InvalidParameterError(f"patch_size must be >= 1, got {self.patch_size}")
        if self.stride < 1:
            raise InvalidParameterError(f"stride must be >= 1, got {self.stride}")
        if not (math.isfinite(self.scale_factor) and self.scale_factor > 1):
            raise InvalidParameterError(f"scale_factor must be > 1, got {self.scale_factor}")
        if not math.isfinite(self.score_threshold):
            raise InvalidParameterError("score_threshold must be finite")
        if self.min_level_size is None:
            object.__setattr__(self, "min_level_size", self.patch_size)
        if self.min_level_size < 1:
            raise InvalidParameterError(f"min_level_size must be >= 1, got {self.min_level_size}")
        if not 0 <= self.nms_overlap <= 1:
            raise InvalidParameterError(f"nms_overlap must be in [0, 1], got {self.nms_overlap}")


def _round_half_up(v):
    return int(math.floor(v + 0.5))


def downscale_bilinear(pixels: np.ndarray, new_h: int, new_w: int) -> np.ndarray:
    """Resample a uint8 image to (new_h, new_w) with pixel-center-aligned bilinear interpolation."""
    h, w = pixels.shape
    src = pixels.astype(np.float64)

    def axis(n_out, n_in):
        pos = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
        pos = np.clip(pos, 0.0, n_in - 1)
        i0 = np.floor(pos).astype(np.intp)
        i1 = np.minimum(i0 + 1, n_in - 1)
        return i0, i1, pos - i0

    y0, y1, fy = axis(new_h, h)
    x0, x1, fx = axis(new_w, w)
    fx = fx[None, :]
    top = src[y0][:, x0] * (1 - fx) + src[y0][:, x1] * fx
    bot = src[y1][:, x0] * (1 - fx) + src[y1][:, x1] * fx
    out = top * (1 - fy[:, None]) + bot * fy[:, None]
    return np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)


def pyramid_sizes(height: int, width: int, config: DetectorConfig):
    """(height, width) of every pyramid level; each side is floor(previous / scale_factor)."""
    sizes = [(height, width)]
    while True:
        h, w = sizes[-1]
        # epsilon: an integral quotient computed one ulp low must not floor down
        nh = int(math.floor(h / config.scale_factor + 1e-9))
        nw = int(math.floor(w / config.scale_factor + 1e-9))
        if nh < config.min_level_size or nw < config.min_level_size:
            return sizes
        sizes.append((nh, nw))


def build_pyramid(image: GrayImage, config: DetectorConfig = DetectorConfig()) -> list[GrayImage]:
    p = config.patch_size
    if image.width < p or image.height < p:
        raise InvalidParameterError(
            f"image {image.width}x{image.height} is smaller than the {p}x{p} window"
        )
    if image.width < config.min_level_size or image.height < config.min_level_size:
        raise InvalidParameterError(
            f"image {image.width}x{image.height} is smaller than min_level_size {config.min_level_size}"
        )
    levels = [image]
    for h, w in pyramid_sizes(image.height, image.width, config)[1:]:
        levels.append(GrayImage(downscale_bilinear(levels[-1].pixels, h, w)))
    return levels


def scan(image: GrayImage, model: RbfModel, config: DetectorConfig = DetectorConfig()) -> list[BoundingBox]:
    """Score every stride-aligned window at every pyramid level.

    Returns boxes with score >= config.score_threshold, mapped back to the
    original image (coordinates times scale_factor**level, rounded, then
    shifted inside the image), sorted by descending score with ties broken
    by (y, x, scale_index).
    """
    p = config.patch_size
    if model.input_dim != p * p:
        raise DimensionError(f"model input dimension {model.input_dim} != {p}x{p} window")
    H, W = image.height, image.width
    xs, ys, sides, scores, levels = [], [], [], [], []
    for level, img in enumerate(build_pyramid(image, config)):
        if img.width < p or img.height < p:
            continue
        grid = kernels.scan_level(img.pixels, p, config.stride, model.centers, model.weights, model.spread)
        iy, ix = np.nonzero(grid >= config.score_threshold)
        if iy.size == 0:
            continue
        scale = config.scale_factor ** level
        side = min(_round_half_up(p * scale), W, H)
        bx = np.floor(ix * config.stride * scale + 0.5).astype(np.int64)
        by = np.floor(iy * config.stride * scale + 0.5).astype(np.int64)
        xs.append(np.clip(bx, 0, W - side))
        ys.append(np.clip(by, 0, H - side))
        sides.append(np.full(iy.size, side, dtype=np.int64))
        scores.append(grid[iy, ix])
        levels.append(np.full(iy.size, level, dtype=np.int64))
    if not scores:
        return []
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    s = np.concatenate(sides)
    sc = np.concatenate(scores)
    lv = np.concatenate(levels)
    order = np.lexsort((lv, x, y, -sc))
    return [
        BoundingBox(int(x[i]), int(y[i]), int(s[i]), float(sc[i]), int(lv[i]))
        for i in order
    ]


def iou(a: BoundingBox, b: BoundingBox) -> float:
    iw = min(a.x + a.side, b.x + b.side) - max(a.x, b.x)
    ih = min(a.y + a.side, b.y + b.side) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a.side * a.side + b.side * b.side - inter)


def nms(boxes, overlap_threshold: float = 0.3) -> list[BoundingBox]:
    """Greedy suppression: keep the best box, drop every later box whose IoU with a kept box exceeds the threshold.

    Input is re-sorted by score (ties by y, x, scale_index), so any order is accepted.
    """
    boxes = sorted(boxes, key=BoundingBox.sort_key)
    if not boxes:
        return []
    x = np.fromiter((b.x for b in boxes), dtype=np.int64, count=len(boxes))
    y = np.fromiter((b.y for b in boxes), dtype=np.int64, count=len(boxes))
    s = np.fromiter((b.side for b in boxes), dtype=np.int64, count=len(boxes))
    keep = kernels.nms_keep(x, y, s, float(overlap_threshold))
    return [boxes[i] for i in keep]


def detect(image: GrayImage, model: RbfModel, config: DetectorConfig = DetectorConfig()) -> list[BoundingBox]:
    return nms(scan(image, model, config), config.nms_overlap)


def draw_boxes(image: GrayImage, boxes, value: int = 255) -> GrayImage:
    """Copy of ``image`` with 1-pixel outlines; later boxes draw over earlier ones."""
    px = image.pixels.copy()
    H, W = px.shape
    for b in boxes:
        x0, y0 = b.x, b.y
        x1, y1 = b.x + b.side - 1, b.y + b.side - 1
        if x0 < 0 or y0 < 0 or x1 >= W or y1 >= H:
            raise InvalidParameterError(f"box {b} lies outside the {W}x{H} image")
        px[y0, x0:x1 + 1] = value
        px[y1, x0:x1 + 1] = value
        px[y0:y1 + 1, x0] = value
        px[y0:y1 + 1, x1] = value
    return GrayImage(px)


def annotate(image: GrayImage, boxes, path) -> GrayImage:
    """Draw white box outlines and save the result as PGM."""
    out = draw_boxes(image, boxes)
    save_pgm(out, path)
    return out


def write_detections_csv(boxes, path) -> Path:
    path = Path(path)
    lines = [DETECTIONS_HEADER] + [f"{b.x},{b.y},{b.side},{float(b.score)!r},{b.scale_index}" for b in boxes]
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write detections {path}: {exc.strerror or exc}") from exc
    return path
