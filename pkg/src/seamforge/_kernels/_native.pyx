# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: cumulative-cost DP and buffered mask matching.

Bit-identical to seamforge._kernels._fallback; the pure version is the
reference, this one is just faster.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def cumulative_backward(double[:, ::1] energy):
    cdef Py_ssize_t h = energy.shape[0]
    cdef Py_ssize_t w = energy.shape[1]
    values_arr = np.empty((h, w), dtype=np.float64)
    parent_arr = np.zeros((h, w), dtype=np.int8)
    cdef double[:, ::1] values = values_arr
    cdef signed char[:, ::1] parent = parent_arr
    cdef Py_ssize_t row, col
    cdef double best, cand
    cdef signed char off

    for col in range(w):
        values[0, col] = energy[0, col]
    for row in range(1, h):
        for col in range(w):
            best = values[row - 1, col]
            off = 0
            if col > 0:
                cand = values[row - 1, col - 1]
                if cand < best:
                    best = cand
                    off = -1
            if col < w - 1:
                cand = values[row - 1, col + 1]
                if cand < best:
                    best = cand
                    off = 1
            values[row, col] = energy[row, col] + best
            parent[row, col] = off
    return values_arr, parent_arr


def cumulative_forward(double[:, ::1] energy, double[:, ::1] c_left,
                       double[:, ::1] c_up, double[:, ::1] c_right):
    cdef Py_ssize_t h = energy.shape[0]
    cdef Py_ssize_t w = energy.shape[1]
    values_arr = np.empty((h, w), dtype=np.float64)
    parent_arr = np.zeros((h, w), dtype=np.int8)
    cdef double[:, ::1] values = values_arr
    cdef signed char[:, ::1] parent = parent_arr
    cdef Py_ssize_t row, col
    cdef double best, cand
    cdef signed char off

    for col in range(w):
        values[0, col] = energy[0, col] + c_up[0, col]
    for row in range(1, h):
        for col in range(w):
            best = values[row - 1, col] + c_up[row, col]
            off = 0
            if col > 0:
                cand = values[row - 1, col - 1] + c_left[row, col]
                if cand < best:
                    best = cand
                    off = -1
            if col < w - 1:
                cand = values[row - 1, col + 1] + c_right[row, col]
                if cand < best:
                    best = cand
                    off = 1
            values[row, col] = energy[row, col] + best
            parent[row, col] = off
    return values_arr, parent_arr


def buffered_match(cnp.uint8_t[:, ::1] pred, cnp.uint8_t[:, ::1] gt, Py_ssize_t p):
    cdef Py_ssize_t h = pred.shape[0]
    cdef Py_ssize_t w = pred.shape[1]
    consumed_arr = np.zeros((h, w), dtype=bool)
    cdef cnp.uint8_t[:, ::1] consumed = consumed_arr.view(np.uint8)
    cdef long tp = 0, fp = 0
    cdef Py_ssize_t r, c, gr, gc, r0, r1, c0, c1
    cdef Py_ssize_t best_d, best_r, best_c, d, dr, dc

    for r in range(h):
        for c in range(w):
            if not pred[r, c]:
                continue
            best_d = p + 1
            best_r = -1
            best_c = -1
            r0 = r - p if r - p > 0 else 0
            r1 = r + p if r + p < h - 1 else h - 1
            c0 = c - p if c - p > 0 else 0
            c1 = c + p if c + p < w - 1 else w - 1
            for gr in range(r0, r1 + 1):
                for gc in range(c0, c1 + 1):
                    if gt[gr, gc] and not consumed[gr, gc]:
                        dr = gr - r if gr >= r else r - gr
                        dc = gc - c if gc >= c else c - gc
                        d = dr if dr >= dc else dc
                        if d < best_d:
                            best_d = d
                            best_r = gr
                            best_c = gc
            if best_r >= 0:
                consumed[best_r, best_c] = 1
                tp += 1
            else:
                fp += 1
    return int(tp), int(fp), consumed_arr
