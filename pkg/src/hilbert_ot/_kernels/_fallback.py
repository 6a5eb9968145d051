"""Pure-Python kernels: Hilbert codec and the north-west corner sweep.

Reference implementations used when the compiled extension is not available.
Semantics (including tie handling and summation order) match
``hilbert_ot._kernels._core`` exactly; only the speed differs.

Keys are returned as (hi, lo) pairs of uint64 arrays so that callers can
hold up to 128-bit keys in plain numpy arrays and sort them with
``np.lexsort((lo, hi))``.
"""

import numpy as np

BACKEND_NAME = "fallback"

_MASK64 = (1 << 64) - 1

# Residuals closer than this are treated as equal and both sides advance,
# which prevents round-off slivers from inflating the support.
NW_TIE_TOL = 1e-12


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def _gray_inverse(g: int) -> int:
    i = g
    j = 1
    while (g >> j) > 0:
        i ^= g >> j
        j += 1
    return i


def _trailing_ones(i: int) -> int:
    c = 0
    while i & 1:
        c += 1
        i >>= 1
    return c


def _entry(w: int) -> int:
    # Corner where the curve enters sub-cube w of the current level.
    if w == 0:
        return 0
    ww = 2 * ((w - 1) // 2)
    return ww ^ (ww >> 1)


def _intra_direction(w: int, dims: int) -> int:
    if w == 0:
        return 0
    if w % 2 == 0:
        return _trailing_ones(w - 1) % dims
    return _trailing_ones(w) % dims


def _rotate_right(x: int, r: int, dims: int) -> int:
    r %= dims
    if r == 0:
        return x
    mask = (1 << dims) - 1
    return ((x >> r) | (x << (dims - r))) & mask


def _rotate_left(x: int, r: int, dims: int) -> int:
    return _rotate_right(x, dims - (r % dims), dims)


def _encode_one(coords, dims: int, order: int) -> int:
    key = 0
    e = 0
    axis = 0
    for level in range(order - 1, -1, -1):
        label = 0
        for j in range(dims):
            label |= ((int(coords[j]) >> level) & 1) << j
        label = _rotate_right(label ^ e, axis + 1, dims)
        w = _gray_inverse(label)
        key = (key << dims) | w
        e ^= _rotate_left(_entry(w), axis + 1, dims)
        axis = (axis + _intra_direction(w, dims) + 1) % dims
    return key


def _decode_one(key: int, dims: int, order: int, out) -> None:
    e = 0
    axis = 0
    for level in range(order - 1, -1, -1):
        w = (key >> (level * dims)) & ((1 << dims) - 1)
        label = _rotate_left(_gray(w), axis + 1, dims) ^ e
        for j in range(dims):
            out[j] |= ((label >> j) & 1) << level
        e ^= _rotate_left(_entry(w), axis + 1, dims)
        axis = (axis + _intra_direction(w, dims) + 1) % dims


def encode_cells(cells: np.ndarray, order: int):
    """Hilbert keys of grid cells.

    Parameters
    ----------
    cells : (n, dims) uint64 array, each coordinate < 2**order
    order : curve order (bits per axis)

    Returns
    -------
    (hi, lo) : pair of (n,) uint64 arrays holding the 128-bit keys
    """
    n, dims = cells.shape
    hi = np.empty(n, dtype=np.uint64)
    lo = np.empty(n, dtype=np.uint64)
    for row in range(n):
        key = _encode_one(cells[row], dims, order)
        hi[row] = (key >> 64) & _MASK64
        lo[row] = key & _MASK64
    return hi, lo


def decode_keys(hi: np.ndarray, lo: np.ndarray, dims: int, order: int) -> np.ndarray:
    """Grid cells of Hilbert keys; inverse of :func:`encode_cells`."""
    n = hi.shape[0]
    cells = np.zeros((n, dims), dtype=np.uint64)
    scratch = [0] * dims
    for row in range(n):
        key = (int(hi[row]) << 64) | int(lo[row])
        for j in range(dims):
            scratch[j] = 0
        _decode_one(key, dims, order, scratch)
        for j in range(dims):
            cells[row, j] = scratch[j]
    return cells


def northwest(a: np.ndarray, b: np.ndarray):
    """North-west corner sweep over two strictly positive weight vectors.

    Both vectors must sum to the same total within 1e-9.  Returns
    ``(rows, cols, mass)``; entries appear in sweep order and number at
    most ``len(a) + len(b) - 1``.
    """
    m = a.shape[0]
    n = b.shape[0]
    rows = np.empty(m + n - 1, dtype=np.int64)
    cols = np.empty(m + n - 1, dtype=np.int64)
    mass = np.empty(m + n - 1, dtype=np.float64)
    i = 0
    j = 0
    ra = float(a[0])
    rb = float(b[0])
    pos = 0
    while True:
        last_i = i == m - 1
        last_j = j == n - 1
        if last_i and last_j:
            # Any terminal residual mismatch is within the validation
            # tolerance; split it evenly to keep the sweep symmetric.
            rows[pos] = i
            cols[pos] = j
            mass[pos] = 0.5 * (ra + rb)
            pos += 1
            break
        if last_i:
            rows[pos] = i
            cols[pos] = j
            mass[pos] = rb
            pos += 1
            ra -= rb
            j += 1
            rb = float(b[j])
            continue
        if last_j:
            rows[pos] = i
            cols[pos] = j
            mass[pos] = ra
            pos += 1
            rb -= ra
            i += 1
            ra = float(a[i])
            continue
        diff = ra - rb
        if -NW_TIE_TOL <= diff <= NW_TIE_TOL:
            rows[pos] = i
            cols[pos] = j
            mass[pos] = ra if ra < rb else rb
            pos += 1
            i += 1
            j += 1
            ra = float(a[i])
            rb = float(b[j])
        elif diff > 0.0:
            rows[pos] = i
            cols[pos] = j
            mass[pos] = rb
            pos += 1
            ra = diff
            j += 1
            rb = float(b[j])
        else:
            rows[pos] = i
            cols[pos] = j
            mass[pos] = ra
            pos += 1
            rb = -diff
            i += 1
            ra = float(a[i])
    return rows[:pos].copy(), cols[:pos].copy(), mass[:pos].copy()
