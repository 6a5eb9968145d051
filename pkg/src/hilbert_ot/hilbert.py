"""Hilbert space-filling curve codec for d-dimensional grids.

A curve of order ``k`` visits every cell of the ``2**k`` per-axis grid in
``[0,1]**d`` exactly once, entering at the origin corner, and consecutive
cells always share a face.  The codec maps a cell to its rank along the
curve (the *key*) and back, using the Gray-code rank construction with a
per-level rotation/reflection state, in O(d*k) bit operations per point.

Keys can be as wide as ``d*k`` bits (capped at 128), so batch results are
carried as (hi, lo) pairs of uint64 arrays; scalar helpers return plain
Python integers.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidInputError, ParameterError

MAX_KEY_BITS = 128


@dataclass(frozen=True)
class CurveParams:
    """Grid dimensionality and curve order.

    ``dims >= 2`` and ``dims * order <= 128`` so keys fit in a 128-bit
    unsigned integer.
    """

    dims: int
    order: int

    def __post_init__(self):
        if self.dims < 2:
            raise ParameterError(f"curve needs dims >= 2, got {self.dims}")
        if self.order < 1:
            raise ParameterError(f"curve needs order >= 1, got {self.order}")
        if self.dims * self.order > MAX_KEY_BITS:
            raise ParameterError(
                f"dims*order = {self.dims * self.order} exceeds the "
                f"{MAX_KEY_BITS}-bit key limit"
            )

    @property
    def bits(self) -> int:
        return self.dims * self.order

    @property
    def cells_per_axis(self) -> int:
        return 1 << self.order

    @property
    def total_cells(self) -> int:
        return 1 << self.bits


def max_order(dims: int) -> int:
    """Largest curve order whose keys still fit 128 bits for `dims` axes."""
    if dims < 1:
        raise ParameterError(f"dims must be positive, got {dims}")
    order = MAX_KEY_BITS // dims
    if order < 1:
        raise ParameterError(f"no valid curve order for dims = {dims}")
    return order


def _as_cells(cells, params: CurveParams) -> np.ndarray:
    arr = np.ascontiguousarray(cells, dtype=np.uint64)
    if arr.ndim != 2 or arr.shape[1] != params.dims:
        raise InvalidInputError(
            f"cells must have shape (n, {params.dims}), got {arr.shape}"
        )
    if arr.size and arr.max() >= params.cells_per_axis:
        raise InvalidInputError(
            f"cell coordinate {int(arr.max())} out of range for order {params.order}"
        )
    return arr


def encode_cells(cells, params: CurveParams, backend=None):
    """Keys of grid cells as a (hi, lo) pair of uint64 arrays."""
    arr = _as_cells(cells, params)
    kern = _kernels.resolve(backend)
    return kern.encode_cells(arr, params.order)


def decode_keys(hi, lo, params: CurveParams, backend=None) -> np.ndarray:
    """Grid cells of keys given as (hi, lo) uint64 arrays."""
    hi = np.ascontiguousarray(hi, dtype=np.uint64)
    lo = np.ascontiguousarray(lo, dtype=np.uint64)
    if hi.shape != lo.shape or hi.ndim != 1:
        raise InvalidInputError("hi and lo must be 1-d arrays of equal length")
    if params.bits <= 64:
        if hi.size and hi.max() > 0:
            raise InvalidInputError("key out of range for this curve")
        if lo.size and int(lo.max()) >= (1 << params.bits):
            raise InvalidInputError("key out of range for this curve")
    elif hi.size and int(hi.max()) >= (1 << (params.bits - 64)):
        raise InvalidInputError("key out of range for this curve")
    kern = _kernels.resolve(backend)
    return kern.decode_keys(hi, lo, params.dims, params.order)


def encode(cell, params: CurveParams) -> int:
    """Key of a single grid cell, as a Python integer."""
    hi, lo = encode_cells(np.asarray(cell, dtype=np.uint64)[None, :], params)
    return (int(hi[0]) << 64) | int(lo[0])


def decode(key: int, params: CurveParams) -> np.ndarray:
    """Grid cell of a single key."""
    if key < 0 or key >= params.total_cells:
        raise InvalidInputError(f"key {key} out of range for this curve")
    hi = np.array([key >> 64], dtype=np.uint64)
    lo = np.array([key & ((1 << 64) - 1)], dtype=np.uint64)
    return decode_keys(hi, lo, params)[0]


def argsort_cells(cells, params: CurveParams, backend=None) -> np.ndarray:
    """Stable argsort of grid cells by their position along the curve."""
    hi, lo = encode_cells(cells, params, backend=backend)
    return np.lexsort((lo, hi))


def key_positions(hi, lo, params: CurveParams) -> np.ndarray:
    """Normalized curve positions key / 2**bits, in [0, 1)."""
    scale = 2.0 ** (64 - params.bits)
    return hi.astype(np.float64) * scale + lo.astype(np.float64) * 2.0 ** (-params.bits)


def cell_centers(cells, params: CurveParams) -> np.ndarray:
    """Normalized cell centers (c + 1/2) / 2**order, in (0, 1)**dims."""
    return (np.asarray(cells, dtype=np.float64) + 0.5) / params.cells_per_axis
