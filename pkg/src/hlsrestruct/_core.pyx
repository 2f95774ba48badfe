# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Mirrors ``_pycore`` function for function."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef long long i64
ctypedef unsigned long long u64


def stream_convolve(const cnp.uint8_t[:, ::1] img, gx, gy, bint display):
    cdef Py_ssize_t height = img.shape[0], width = img.shape[1]
    cdef const i64[::1] g = np.ascontiguousarray(gx, dtype=np.int64).ravel()
    cdef const i64[::1] h = np.ascontiguousarray(gy, dtype=np.int64).ravel()
    out_arr = np.zeros((height, width), dtype=np.int64)
    cdef i64[:, ::1] out = out_arr
    cdef i64[::1] row1 = np.zeros(width, dtype=np.int64)
    cdef i64[::1] row2 = np.zeros(width, dtype=np.int64)
    # window registers: w[row][col], col 2 newest
    cdef i64 w00 = 0, w01 = 0, w02 = 0
    cdef i64 w10 = 0, w11 = 0, w12 = 0
    cdef i64 w20 = 0, w21 = 0, w22 = 0
    cdef i64 top, mid, pix, dx, dy, v
    cdef Py_ssize_t i, j, r, c, center
    cdef Py_ssize_t latency = width + 1
    cdef Py_ssize_t p = 0
    for i in range(height):
        for j in range(width):
            pix = img[i, j]
            top = row1[j]
            mid = row2[j]
            row1[j] = mid
            row2[j] = pix
            w00 = w01; w01 = w02; w02 = top
            w10 = w11; w11 = w12; w12 = mid
            w20 = w21; w21 = w22; w22 = pix
            if p >= latency:
                center = p - latency
                r = center // width
                c = center - r * width
                if 0 < r < height - 1 and 0 < c < width - 1:
                    dx = (g[0] * w00 + g[1] * w01 + g[2] * w02
                          + g[3] * w10 + g[4] * w11 + g[5] * w12
                          + g[6] * w20 + g[7] * w21 + g[8] * w22)
                    dy = (h[0] * w00 + h[1] * w01 + h[2] * w02
                          + h[3] * w10 + h[4] * w11 + h[5] * w12
                          + h[6] * w20 + h[7] * w21 + h[8] * w22)
                    if display:
                        v = (dx if dx >= 0 else -dx) + (dy if dy >= 0 else -dy)
                        out[r, c] = 255 if v > 255 else v
                    else:
                        out[r, c] = dx + dy
            p += 1
    return out_arr, p


def reference_convolve(const cnp.uint8_t[:, ::1] img, gx, gy, bint display):
    cdef Py_ssize_t height = img.shape[0], width = img.shape[1]
    cdef const i64[:, ::1] g = np.ascontiguousarray(gx, dtype=np.int64)
    cdef const i64[:, ::1] h = np.ascontiguousarray(gy, dtype=np.int64)
    out_arr = np.zeros((height, width), dtype=np.int64)
    cdef i64[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, ro, co
    cdef i64 dx, dy, px, v
    for i in range(1, height - 1):
        for j in range(1, width - 1):
            dx = 0
            dy = 0
            for ro in range(3):
                for co in range(3):
                    px = img[i + ro - 1, j + co - 1]
                    dx += g[ro, co] * px
                    dy += h[ro, co] * px
            if display:
                v = (dx if dx >= 0 else -dx) + (dy if dy >= 0 else -dy)
                out[i, j] = 255 if v > 255 else v
            else:
                out[i, j] = dx + dy
    return out_arr


def merge_tree(freqs):
    cdef const u64[::1] f = np.ascontiguousarray(freqs, dtype=np.uint64)
    cdef Py_ssize_t n = f.shape[0]
    cdef Py_ssize_t m = n - 1
    left_arr = np.zeros(m, dtype=np.int64)
    right_arr = np.zeros(m, dtype=np.int64)
    parent_arr = np.full(m, -1, dtype=np.int64)
    internal_arr = np.zeros(m, dtype=np.uint64)
    cdef i64[::1] left = left_arr
    cdef i64[::1] right = right_arr
    cdef i64[::1] parent = parent_arr
    cdef u64[::1] internal = internal_arr
    cdef Py_ssize_t i = 0, j = 0, k = 0
    cdef u64 lf, rf
    while i < n:
        if j >= k or f[i] <= internal[j]:
            left[k] = i
            lf = f[i]
            i += 1
        else:
            left[k] = ~j
            lf = internal[j]
            parent[j] = k
            j += 1
        if i < n and (j >= k or f[i] <= internal[j]):
            right[k] = i
            rf = f[i]
            i += 1
        else:
            right[k] = ~j
            rf = internal[j]
            parent[j] = k
            j += 1
        internal[k] = lf + rf
        k += 1
    while j < k - 1:
        left[k] = ~j
        parent[j] = k
        right[k] = ~(j + 1)
        parent[j + 1] = k
        internal[k] = internal[j] + internal[j + 1]
        j += 2
        k += 1
    return left_arr, right_arr, parent_arr, internal_arr
