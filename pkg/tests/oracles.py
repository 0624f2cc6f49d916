"""Independent oracles the tests check the library against.

These deliberately re-derive results by enumeration or naive loops rather
than reusing any library code path, and they reproduce the library's float
accumulation order exactly where exact equality is asserted.
"""

from __future__ import annotations

import math

import numpy as np


def min_seam_cost_bruteforce(energy: np.ndarray, fc=None) -> float:
    """Minimum 8-connected top-to-bottom path cost by full enumeration.

    Explores all w * 3^(h-1) candidate paths (out-of-range branches
    discarded). Accumulation mirrors the DP's addition order so the result
    is comparable bit for bit.
    """
    energy = np.asarray(energy, dtype=np.float64)
    h, w = energy.shape
    if fc is None:
        cost = energy[0].copy()
    else:
        cost = energy[0] + fc.c_up[0]
    cols = np.arange(w, dtype=np.int64)
    for row in range(1, h):
        parts_cost = []
        parts_cols = []
        for move in (-1, 0, 1):
            new_cols = cols + move
            ok = (new_cols >= 0) & (new_cols < w)
            nc = new_cols[ok]
            base = cost[ok]
            if fc is None:
                stepped = base + energy[row, nc]
            elif move == 1:
                stepped = (base + fc.c_left[row, nc]) + energy[row, nc]
            elif move == 0:
                stepped = (base + fc.c_up[row, nc]) + energy[row, nc]
            else:
                stepped = (base + fc.c_right[row, nc]) + energy[row, nc]
            parts_cost.append(stepped)
            parts_cols.append(nc)
        cost = np.concatenate(parts_cost)
        cols = np.concatenate(parts_cols)
    return float(cost.min())


def naive_confusion(pred, gt) -> tuple[int, int, int, int]:
    """Double-loop recount of the plain confusion matrix."""
    tp = fp = fn = tn = 0
    for r in range(len(pred)):
        for c in range(len(pred[0])):
            if pred[r][c] and gt[r][c]:
                tp += 1
            elif pred[r][c]:
                fp += 1
            elif gt[r][c]:
                fn += 1
            else:
                tn += 1
    return tp, fp, fn, tn


def naive_buffered(pred, gt, p: int) -> tuple[int, int, int, int]:
    """Reference buffered matcher: full-grid candidate scan per prediction."""
    h, w = len(pred), len(pred[0])
    consumed: set[tuple[int, int]] = set()
    tp = fp = fn = tn = 0
    for r in range(h):
        for c in range(w):
            if not pred[r][c]:
                continue
            candidates = [
                (max(abs(gr - r), abs(gc - c)), gr, gc)
                for gr in range(h)
                for gc in range(w)
                if gt[gr][gc]
                and (gr, gc) not in consumed
                and max(abs(gr - r), abs(gc - c)) <= p
            ]
            if candidates:
                _, gr, gc = min(candidates)
                consumed.add((gr, gc))
                tp += 1
            else:
                fp += 1
    for r in range(h):
        for c in range(w):
            if pred[r][c]:
                continue
            if gt[r][c] and (r, c) not in consumed:
                fn += 1
            else:
                tn += 1
    return tp, fp, fn, tn


def metric_formulas(tp: int, fp: int, fn: int, tn: int) -> dict[str, float]:
    """Straight transcription of the confusion-matrix metric formulas."""
    total = tp + fp + fn + tn
    accuracy = (tp + tn) / total if total else 0.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    den = math.sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn))
    mcc = (tp * tn - fp * fn) / den if den else 0.0
    return {"accuracy": accuracy, "precision": precision, "recall": recall, "f1": f1, "mcc": mcc}


def naive_sls(columns, width: int, pred) -> float:
    """Reference seam localization score."""
    total = 0.0
    for row, col in enumerate(columns):
        hits = [c for c in range(width) if pred[row][c]]
        if not hits:
            total += width
        else:
            total += min(abs(c - col) for c in hits)
    return total / len(columns)
