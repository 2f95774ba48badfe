"""Pure-Python kernels. Same signatures and results as the compiled ``_core``.

Used when the extension is not built, and as the second route in the
backend-equivalence tests.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def stream_convolve(img, gx, gy, display):
    """Line-buffer / window-buffer convolution over a raster pixel stream.

    ``img`` is a (height, width) uint8 array, ``gx``/``gy`` are 3x3 integer
    arrays. Returns ``(out, pushes)`` where ``out`` is int64 (height, width).
    """
    height, width = img.shape
    g = [int(v) for v in np.asarray(gx).ravel()]
    h = [int(v) for v in np.asarray(gy).ravel()]
    out = np.zeros(height * width, dtype=np.int64)
    row1 = [0] * width
    row2 = [0] * width
    # window columns, oldest first: (top, mid, bottom)
    c0 = (0, 0, 0)
    c1 = (0, 0, 0)
    latency = width + 1
    pixels = img.ravel().tolist()
    values = [0] * (height * width)
    p = 0
    for i in range(height):
        for j in range(width):
            pix = pixels[p]
            # one read and one write per line-buffer row
            top = row1[j]
            mid = row2[j]
            row1[j] = mid
            row2[j] = pix
            c2 = (top, mid, pix)
            if p >= latency:
                c = p - latency
                r, cc = divmod(c, width)
                if 0 < r < height - 1 and 0 < cc < width - 1:
                    dx = (g[0] * c0[0] + g[1] * c1[0] + g[2] * c2[0]
                          + g[3] * c0[1] + g[4] * c1[1] + g[5] * c2[1]
                          + g[6] * c0[2] + g[7] * c1[2] + g[8] * c2[2])
                    dy = (h[0] * c0[0] + h[1] * c1[0] + h[2] * c2[0]
                          + h[3] * c0[1] + h[4] * c1[1] + h[5] * c2[1]
                          + h[6] * c0[2] + h[7] * c1[2] + h[8] * c2[2])
                    if display:
                        v = abs(dx) + abs(dy)
                        values[c] = 255 if v > 255 else v
                    else:
                        values[c] = dx + dy
            c0 = c1
            c1 = c2
            p += 1
    out[:] = values
    return out.reshape(height, width), p


def reference_convolve(img, gx, gy, display):
    """Direct 3x3 convolution over interior centers; borders are 0."""
    height, width = img.shape
    windows = sliding_window_view(img.astype(np.int64), (3, 3))
    dx = np.einsum("ijkl,kl->ij", windows, np.asarray(gx, dtype=np.int64))
    dy = np.einsum("ijkl,kl->ij", windows, np.asarray(gy, dtype=np.int64))
    out = np.zeros((height, width), dtype=np.int64)
    if display:
        out[1:-1, 1:-1] = np.minimum(np.abs(dx) + np.abs(dy), 255)
    else:
        out[1:-1, 1:-1] = dx + dy
    return out


def merge_tree(freqs, trace=None):
    """Two-cursor merge of sorted leaf frequencies into n-1 internal nodes.

    Children are encoded as ``i >= 0`` for leaf ``i`` of the sorted table and
    ``~j`` (negative) for internal node ``j``. Returns
    ``(left, right, parent, internal_freqs)``; ``parent[root] == -1``.

    ``trace``, when given, is a ``collections.Counter`` that receives
    ``node_created``, ``leaf_read``, ``internal_read`` and ``reorder`` counts.
    """
    if trace is not None:
        return _merge_tree_traced(freqs, trace)
    f = [int(v) for v in freqs]
    n = len(f)
    m = n - 1
    left = [0] * m
    right = [0] * m
    parent = [-1] * m
    internal = [0] * m
    i = j = k = 0
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
    # leaves exhausted; the root is never consumed as a child
    while j < k - 1:
        left[k] = ~j
        parent[j] = k
        right[k] = ~(j + 1)
        parent[j + 1] = k
        internal[k] = internal[j] + internal[j + 1]
        j += 2
        k += 1
    return (
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(parent, dtype=np.int64),
        np.array(internal, dtype=np.uint64),
    )


def _merge_tree_traced(freqs, trace):
    f = [int(v) for v in freqs]
    n = len(f)
    m = n - 1
    left = [0] * m
    right = [0] * m
    parent = [-1] * m
    internal = [0] * m
    i = j = k = 0
    # nothing is ever moved once written
    trace["reorder"] += 0

    def pick():
        nonlocal i, j
        if i < n and (j >= k or f[i] <= internal[j]):
            trace["leaf_read"] += 1
            i += 1
            return i - 1, f[i - 1]
        trace["internal_read"] += 1
        parent[j] = k
        j += 1
        return ~(j - 1), internal[j - 1]

    while i < n:
        left[k], lf = pick()
        right[k], rf = pick()
        internal[k] = lf + rf
        trace["node_created"] += 1
        k += 1
    while j < k - 1:
        left[k], lf = pick()
        right[k], rf = pick()
        internal[k] = lf + rf
        trace["node_created"] += 1
        k += 1
    return (
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(parent, dtype=np.int64),
        np.array(internal, dtype=np.uint64),
    )
