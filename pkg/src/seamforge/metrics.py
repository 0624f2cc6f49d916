"""Pixel-level evaluation: plain and buffered confusion matrices, their
derived metrics, and the seam localization score (SLS).

Buffered counting relaxes exact overlap: a predicted positive within a
Chebyshev radius p of an unconsumed ground-truth positive is a true
positive, and each ground-truth positive can be consumed only once. With
p=0 the buffered counts reduce exactly to the plain ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
            tn=self.tn + other.tn,
        )

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    mcc: float
    buffered: bool = False
    p: int = 0
    sls: float | None = None

    def records(self) -> list[str]:
        """Line-oriented key=value serialization."""
        suffix = f"-{self.p}" if self.buffered else ""
        lines = [
            f"accuracy{suffix}={self.accuracy:.6f}",
            f"precision{suffix}={self.precision:.6f}",
            f"recall{suffix}={self.recall:.6f}",
            f"f1{suffix}={self.f1:.6f}",
            f"mcc{suffix}={self.mcc:.6f}",
        ]
        if self.sls is not None:
            lines.append(f"sls={self.sls:.6f}")
        return lines


@dataclass(frozen=True)
class SeamTrajectory:
    """Per-row column of one ground-truth seam, in final-image coordinates."""

    columns: np.ndarray
    width: int

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=np.int64)
        if cols.ndim != 1 or len(cols) == 0:
            raise ValueError("trajectory must be a non-empty 1-D sequence")
        if cols.min() < 0 or cols.max() >= self.width:
            raise ValueError("trajectory column out of range")
        object.__setattr__(self, "columns", cols)

    @property
    def height(self) -> int:
        return len(self.columns)


def _as_binary(grid: np.ndarray, name: str) -> np.ndarray:
    arr = np.asarray(grid)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D grid")
    return arr.astype(bool)


def confusion_plain(pred: np.ndarray, gt: np.ndarray) -> ConfusionCounts:
    """Standard per-pixel confusion counts."""
    p = _as_binary(pred, "pred")
    g = _as_binary(gt, "gt")
    if p.shape != g.shape:
        raise ValueError(f"shape mismatch: pred {p.shape} vs gt {g.shape}")
    tp = int((p & g).sum())
    fp = int((p & ~g).sum())
    fn = int((~p & g).sum())
    tn = int((~p & ~g).sum())
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def confusion_buffered(pred: np.ndarray, gt: np.ndarray, p: int) -> ConfusionCounts:
    """Buffered confusion counts with one-to-one ground-truth consumption.

    Pass 1 walks predicted positives in raster order; each consumes the
    nearest unconsumed ground-truth positive within Chebyshev distance p
    (ties: smaller row, then smaller column) as a TP, else counts an FP.
    Pass 2 classifies predicted negatives: an unconsumed ground-truth
    positive there is an FN; a consumed one is deliberately a TN.
    """
    if p < 0:
        raise ValueError("buffer radius must be >= 0")
    pb = _as_binary(pred, "pred")
    gb = _as_binary(gt, "gt")
    if pb.shape != gb.shape:
        raise ValueError(f"shape mismatch: pred {pb.shape} vs gt {gb.shape}")
    tp, fp, consumed = _kernels.buffered_match(
        np.ascontiguousarray(pb, dtype=np.uint8),
        np.ascontiguousarray(gb, dtype=np.uint8),
        int(p),
    )
    fn = int((~pb & gb & ~consumed).sum())
    tn = pb.size - tp - fp - fn
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def derive_metrics(
    counts: ConfusionCounts,
    buffered: bool = False,
    p: int = 0,
    sls: float | None = None,
) -> MetricReport:
    """Accuracy, precision, recall, F1 and MCC from confusion counts.

    Any metric whose denominator is zero comes out 0; in particular an
    all-negative ground truth (tp + fn = 0) zeroes everything but accuracy.
    """
    tp, fp, fn, tn = counts.tp, counts.fp, counts.fn, counts.tn
    total = counts.total
    accuracy = (tp + tn) / total if total else 0.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall else 0.0
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    mcc = (tp * tn - fp * fn) / math.sqrt(denom) if denom else 0.0
    return MetricReport(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        mcc=mcc,
        buffered=buffered,
        p=p,
        sls=sls,
    )


def dataset_aggregate(counts: list[ConfusionCounts], buffered: bool = False, p: int = 0) -> MetricReport:
    """Metrics over the cumulative confusion matrix of many images."""
    if not counts:
        raise ValueError("cannot aggregate an empty list of counts")
    total = ConfusionCounts()
    for c in counts:
        total = total + c
    return derive_metrics(total, buffered=buffered, p=p)


def sls_seam(traj: SeamTrajectory, pred: np.ndarray) -> float:
    """Mean per-row absolute distance from the seam to the nearest predicted
    positive; rows with no prediction contribute the full image width.

    Ranges from 0 (perfect overlap) to width (total miss).
    """
    pb = _as_binary(pred, "pred")
    if pb.shape != (traj.height, traj.width):
        raise ValueError(
            f"prediction shape {pb.shape} does not match trajectory "
            f"({traj.height}, {traj.width})"
        )
    total = 0.0
    for row, col in enumerate(traj.columns):
        hits = np.flatnonzero(pb[row])
        if hits.size == 0:
            total += traj.width
        else:
            total += int(np.abs(hits - col).min())
    return total / traj.height


def sls_image(trajs: list[SeamTrajectory], pred: np.ndarray) -> float:
    """Image-level SLS: the mean of per-seam scores."""
    if not trajs:
        raise ValueError("need at least one trajectory")
    return sum(sls_seam(t, pred) for t in trajs) / len(trajs)
