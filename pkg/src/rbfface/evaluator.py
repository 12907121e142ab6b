"""Detection-rate metrics, center x spread sweeps, and CSV reports.

FAR and FRR follow a face-detection convention that is reversed relative
to standard biometrics:

* FAR: fraction of faces classified as non-face (= 1 - face rate)
* FRR: fraction of non-faces classified as face (= 1 - non-face rate)
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .centers import CenterSet
from .errors import InvalidParameterError, RbfFaceError
from .rbf import RbfModel
from .trainer import LabeledDataset, TrainConfig, fit_weights, select_centers

log = logging.getLogger(__name__)

CSV_HEADER = "centers,spread,face_rate,nonface_rate,far,frr,strategy,seed,solver_rank,train_seconds,eval_seconds"


@dataclass(frozen=True)
class ConfusionCounts:
    faces_total: int
    faces_correct: int
    nonfaces_total: int
    nonfaces_correct: int

    def __post_init__(self):
        vals = (self.faces_total, self.faces_correct, self.nonfaces_total, self.nonfaces_correct)
        if min(vals) < 0:
            raise InvalidParameterError("counts must be non-negative")
        if self.faces_correct > self.faces_total or self.nonfaces_correct > self.nonfaces_total:
            raise InvalidParameterError("correct count exceeds total")

    @classmethod
    def from_predictions(cls, targets, scores, threshold=0.0):
        targets = np.asarray(targets)
        pred_face = np.asarray(scores) >= threshold
        is_face = targets > 0
        return cls(
            int(is_face.sum()),
            int((is_face & pred_face).sum()),
            int((~is_face).sum()),
            int((~is_face & ~pred_face).sum()),
        )


@dataclass(frozen=True)
class EvaluationReport:
    """Metrics for one (centers, spread) setting. Rates are fractions in [0, 1].

    A failed sweep cell carries NaN rates and the failure reason in ``error``.
    """

    face_rate: float
    nonface_rate: float
    far: float
    frr: float
    num_centers: int
    spread: float
    center_strategy: str = ""
    seed: int = 0
    solver_rank: int = -1
    train_seconds: float = 0.0
    eval_seconds: float = 0.0
    counts: ConfusionCounts | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def accuracy(self) -> float:
        """Overall fraction correct across both classes."""
        c = self.counts
        if c is None:
            return math.nan
        return (c.faces_correct + c.nonfaces_correct) / (c.faces_total + c.nonfaces_total)

    @classmethod
    def failed(cls, num_centers, spread, reason, **meta):
        nan = math.nan
        return cls(nan, nan, nan, nan, num_centers, spread, error=reason, **meta)


@dataclass(frozen=True)
class SweepGrid:
    center_values: tuple
    spread_values: tuple
    base_seed: int = 0

    def __post_init__(self):
        cv = tuple(int(c) for c in self.center_values)
        sv = tuple(float(s) for s in self.spread_values)
        for name, seq in (("center_values", cv), ("spread_values", sv)):
            if not seq:
                raise InvalidParameterError(f"{name} must be non-empty")
            if any(b <= a for a, b in zip(seq, seq[1:])):
                raise InvalidParameterError(f"{name} must be strictly increasing")
        if cv[0] < 1 or not sv[0] > 0 or not all(math.isfinite(s) for s in sv):
            raise InvalidParameterError("centers and spreads must be positive")
        if self.base_seed < 0:
            raise InvalidParameterError("base_seed must be non-negative")
        object.__setattr__(self, "center_values", cv)
        object.__setattr__(self, "spread_values", sv)


def detection_rate(correct: int, total: int) -> float:
    """Number of correct detections over number of inputs."""
    if total < 1:
        raise InvalidParameterError(f"total must be >= 1, got {total}")
    if not 0 <= correct <= total:
        raise InvalidParameterError(f"correct must be in [0, {total}], got {correct}")
    return correct / total


def report_from_counts(counts: ConfusionCounts, num_centers, spread, **meta) -> EvaluationReport:
    face_rate = detection_rate(counts.faces_correct, counts.faces_total)
    nonface_rate = detection_rate(counts.nonfaces_correct, counts.nonfaces_total)
    # 1 - r is exact-complement in binary64, so rate + error rate == 1 holds exactly
    return EvaluationReport(
        face_rate, nonface_rate, 1.0 - face_rate, 1.0 - nonface_rate,
        num_centers, spread, counts=counts, **meta,
    )


def evaluate(model: RbfModel, dataset: LabeledDataset, threshold: float = 0.0, **meta) -> EvaluationReport:
    """Score every row and tally per-class detection rates.

    Extra keyword arguments (center_strategy, seed, solver_rank,
    train_seconds) are copied into the report.
    """
    n_face = int((dataset.targets > 0).sum())
    if n_face == 0 or n_face == len(dataset):
        raise InvalidParameterError("evaluation data must contain both faces and non-faces")
    t0 = time.perf_counter()
    scores = model.scores(dataset.inputs)
    counts = ConfusionCounts.from_predictions(dataset.targets, scores, threshold)
    meta.setdefault("eval_seconds", time.perf_counter() - t0)
    return report_from_counts(counts, model.num_centers, model.spread, **meta)


def cell_seed(base_seed: int, center_index: int) -> int:
    """Deterministic per-row seed mixed from the base seed and the row index."""
    ss = np.random.SeedSequence([int(base_seed), int(center_index)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def _sweep_row(train_set, test_set, grid, template, ci, record_timings):
    n_centers = grid.center_values[ci]
    seed = cell_seed(grid.base_seed, ci)
    meta = {"center_strategy": template.center_strategy, "seed": seed}
    try:
        cfg = replace(template, num_centers=n_centers, seed=seed)
        t0 = time.perf_counter()
        cs: CenterSet = select_centers(train_set, cfg)
        select_seconds = time.perf_counter() - t0
    except (RbfFaceError, np.linalg.LinAlgError) as exc:
        log.warning("centers=%d: center selection failed: %s", n_centers, exc)
        return [EvaluationReport.failed(n_centers, s, str(exc), **meta) for s in grid.spread_values]

    row = []
    for spread in grid.spread_values:
        try:
            t0 = time.perf_counter()
            model, rank = fit_weights(train_set, cs, spread, template.regularization, warn=False)
            train_seconds = select_seconds + time.perf_counter() - t0
            if rank < n_centers:
                log.info("centers=%d spread=%g: solver rank %d", n_centers, spread, rank)
            rep = evaluate(model, test_set, solver_rank=rank, train_seconds=train_seconds, **meta)
            if not record_timings:
                rep = replace(rep, train_seconds=0.0, eval_seconds=0.0)
        except (RbfFaceError, np.linalg.LinAlgError) as exc:
            log.warning("centers=%d spread=%g: failed: %s", n_centers, spread, exc)
            rep = EvaluationReport.failed(n_centers, spread, str(exc), **meta)
        row.append(rep)
    return row


def run_sweep(
    train_set: LabeledDataset,
    test_set: LabeledDataset,
    grid: SweepGrid,
    template: TrainConfig,
    jobs: int = 1,
    record_timings: bool = True,
) -> list[EvaluationReport]:
    """Train and evaluate every (centers, spread) cell of ``grid``.

    Centers are chosen once per center count, seeded by
    ``cell_seed(base_seed, row)``, and reused for every spread in that row.
    ``template`` supplies strategy and regularization; its num_centers,
    spread and seed are overridden. Failed cells are reported, not raised.
    Output is ordered by (centers, spread) whatever ``jobs`` is.
    """
    rows = range(len(grid.center_values))
    args = (train_set, test_set, grid, template)
    if jobs <= 1:
        results = [_sweep_row(*args, ci, record_timings) for ci in rows]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda ci: _sweep_row(*args, ci, record_timings), rows))
    return [rep for row in results for rep in row]


def _fmt_rate(v):
    return "nan" if math.isnan(v) else f"{v:.6f}"


def format_csv_row(r: EvaluationReport) -> str:
    return ",".join([
        str(r.num_centers),
        format(r.spread, "g"),
        _fmt_rate(r.face_rate),
        _fmt_rate(r.nonface_rate),
        _fmt_rate(r.far),
        _fmt_rate(r.frr),
        r.center_strategy,
        str(r.seed),
        str(r.solver_rank),
        f"{r.train_seconds:.6f}",
        f"{r.eval_seconds:.6f}",
    ])


def emit_csv(reports, path, append: bool = False) -> Path:
    """Write reports as CSV (one row each). With ``append``, the header is only written to a new file."""
    reports = list(reports)
    if not reports:
        raise InvalidParameterError("no reports to write")
    path = Path(path)
    lines = [format_csv_row(r) for r in reports]
    try:
        if append and path.exists() and path.stat().st_size > 0:
            with open(path, "a", newline="") as fh:
                fh.write("\n".join(lines) + "\n")
        else:
            with open(path, "w", newline="") as fh:
                fh.write("\n".join([CSV_HEADER] + lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV {path}: {exc.strerror or exc}") from exc
    return path


def best_by_centers(reports):
    """Map num_centers -> the successful report with the highest mean of the two class rates."""
    best = {}
    for r in reports:
        if not r.ok:
            continue
        key = 0.5 * (r.face_rate + r.nonface_rate)
        cur = best.get(r.num_centers)
        if cur is None or key > 0.5 * (cur.face_rate + cur.nonface_rate):
            best[r.num_centers] = r
    return best
