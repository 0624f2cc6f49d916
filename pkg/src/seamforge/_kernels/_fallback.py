"""Pure numpy implementations of the hot kernels.

Used when the compiled extension is unavailable (or disabled via
SEAMFORGE_PURE=1). Must stay bit-identical to _native: same candidate
ordering, same float64 operations, same tie-breaks.
"""

from __future__ import annotations

import numpy as np

_OFFSETS = np.array([0, -1, 1], dtype=np.int8)


def cumulative_backward(energy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative minimum-cost table for plain (non-forward) energies.

    Returns (values, parent) where parent holds the predecessor column offset
    in {-1, 0, +1} that attained the minimum. Ties prefer offset 0, then -1,
    then +1.
    """
    h, w = energy.shape
    values = np.empty((h, w), dtype=np.float64)
    parent = np.zeros((h, w), dtype=np.int8)
    values[0] = energy[0]
    cand = np.empty((3, w), dtype=np.float64)
    for row in range(1, h):
        prev = values[row - 1]
        cand[0] = prev
        cand[1, 0] = np.inf
        cand[1, 1:] = prev[:-1]
        cand[2, :-1] = prev[1:]
        cand[2, -1] = np.inf
        choice = np.argmin(cand, axis=0)
        values[row] = energy[row] + cand[choice, np.arange(w)]
        parent[row] = _OFFSETS[choice]
    return values, parent


def cumulative_forward(
    energy: np.ndarray,
    c_left: np.ndarray,
    c_up: np.ndarray,
    c_right: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative table for the forward-cost recurrence.

    Row 0 seeds with energy + C_U (a vertical move into row 0 separates the
    same horizontal neighbors as anywhere else); later rows add the
    direction-matched cost to each predecessor before taking the minimum.
    """
    h, w = energy.shape
    values = np.empty((h, w), dtype=np.float64)
    parent = np.zeros((h, w), dtype=np.int8)
    values[0] = energy[0] + c_up[0]
    cand = np.empty((3, w), dtype=np.float64)
    for row in range(1, h):
        prev = values[row - 1]
        cand[0] = prev + c_up[row]
        cand[1, 0] = np.inf
        cand[1, 1:] = prev[:-1] + c_left[row, 1:]
        cand[2, :-1] = prev[1:] + c_right[row, :-1]
        cand[2, -1] = np.inf
        choice = np.argmin(cand, axis=0)
        values[row] = energy[row] + cand[choice, np.arange(w)]
        parent[row] = _OFFSETS[choice]
    return values, parent


def buffered_match(pred: np.ndarray, gt: np.ndarray, p: int) -> tuple[int, int, np.ndarray]:
    """Greedy one-to-one matching of predicted positives to ground truth.

    Scans predicted positives in raster order; each one consumes the nearest
    unconsumed ground-truth positive within Chebyshev radius p (ties broken
    by smaller row, then smaller column) and counts as a true positive,
    otherwise as a false positive. Returns (tp, fp, consumed).
    """
    h, w = pred.shape
    consumed = np.zeros((h, w), dtype=bool)
    tp = 0
    fp = 0
    for r, c in np.argwhere(pred):
        best_d = p + 1
        best_r = -1
        best_c = -1
        for gr in range(max(r - p, 0), min(r + p, h - 1) + 1):
            for gc in range(max(c - p, 0), min(c + p, w - 1) + 1):
                if gt[gr, gc] and not consumed[gr, gc]:
                    d = max(abs(gr - r), abs(gc - c))
                    if d < best_d:
                        best_d = d
                        best_r = gr
                        best_c = gc
        if best_r >= 0:
            consumed[best_r, best_c] = True
            tp += 1
        else:
            fp += 1
    return tp, fp, consumed
