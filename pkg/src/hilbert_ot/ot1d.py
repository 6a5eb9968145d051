"""One-dimensional optimal transport: quantile coupling and closed-form W_p.

On the line the optimal plan between two discrete measures is the monotone
(quantile) coupling; it is built by the north-west corner sweep over the
two sorted weight sequences in O(m + n) and gives

    W_p(x, y) = ( sum over plan entries of  mass * |x_i - y_j|**p )**(1/p).
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidInputError

SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class SparseCoupling:
    """Transport plan as parallel (source, target, mass) arrays.

    Entries are strictly positive and number at most m + n - 1; masses sum
    along rows/columns to the two input weight vectors.
    """

    source: np.ndarray
    target: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "source", np.ascontiguousarray(self.source, dtype=np.int64))
        object.__setattr__(self, "target", np.ascontiguousarray(self.target, dtype=np.int64))
        object.__setattr__(self, "mass", np.ascontiguousarray(self.mass, dtype=np.float64))

    def __len__(self) -> int:
        return self.mass.shape[0]

    def transpose(self) -> "SparseCoupling":
        return SparseCoupling(self.target, self.source, self.mass)

    def marginal_source(self, m: int) -> np.ndarray:
        return np.bincount(self.source, weights=self.mass, minlength=m)

    def marginal_target(self, n: int) -> np.ndarray:
        return np.bincount(self.target, weights=self.mass, minlength=n)

    def to_dense(self, m: int, n: int) -> np.ndarray:
        dense = np.zeros((m, n))
        np.add.at(dense, (self.source, self.target), self.mass)
        return dense

    def relabel(self, source_order: np.ndarray, target_order: np.ndarray) -> "SparseCoupling":
        """Map sorted-order indices back to original indices."""
        return SparseCoupling(source_order[self.source], target_order[self.target], self.mass)


@dataclass(frozen=True)
class SortedLine:
    """1D sample sorted by value, with weights and the sorting permutation."""

    values: np.ndarray
    weights: np.ndarray
    order: np.ndarray

    @classmethod
    def from_sample(cls, values, weights=None) -> "SortedLine":
        vals = np.ascontiguousarray(values, dtype=np.float64).ravel()
        if vals.size < 1:
            raise InvalidInputError("need at least one value")
        if not np.isfinite(vals).all():
            raise InvalidInputError("values contain NaN or Inf")
        if weights is None:
            w = np.full(vals.size, 1.0 / vals.size)
        else:
            w = np.ascontiguousarray(weights, dtype=np.float64)
        _check_simplex(w, vals.size)
        order = np.argsort(vals, kind="stable")
        return cls(vals[order], w[order], order)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _check_simplex(w: np.ndarray, n: int) -> None:
    if w.shape != (n,):
        raise InvalidInputError(f"weights must have shape ({n},), got {w.shape}")
    if not np.isfinite(w).all() or np.any(w < 0):
        raise InvalidInputError("weights must be finite and non-negative")
    if abs(float(w.sum()) - 1.0) > SIMPLEX_TOL:
        raise InvalidInputError(f"weights sum to {float(w.sum())!r}, expected 1")


def northwest_coupling(a, b, backend=None) -> SparseCoupling:
    """Monotone coupling of two weight sequences already in sorted order.

    Zero-weight atoms receive no plan entries.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    _check_simplex(a, a.shape[0])
    _check_simplex(b, b.shape[0])
    keep_a = np.flatnonzero(a > 0.0)
    keep_b = np.flatnonzero(b > 0.0)
    kern = _kernels.resolve(backend)
    rows, cols, mass = kern.northwest(a[keep_a], b[keep_b])
    if keep_a.size != a.size or keep_b.size != b.size:
        rows, cols = keep_a[rows], keep_b[cols]
    return SparseCoupling(rows, cols, mass)


def coupling_cost_1d(x: SortedLine, y: SortedLine, plan: SparseCoupling, p: float) -> float:
    """Plan cost sum(mass * |x_i - y_j|**p) in sorted-order indices."""
    diff = np.abs(x.values[plan.source] - y.values[plan.target])
    if p == 2.0:
        cost = diff * diff
    elif p == 1.0:
        cost = diff
    else:
        cost = diff**p
    return float(np.dot(plan.mass, cost))


def wasserstein_1d(x: SortedLine, y: SortedLine, p: float = 2.0) -> float:
    """Closed-form p-Wasserstein distance between two 1D samples."""
    if p < 1:
        raise InvalidInputError(f"order p must be >= 1, got {p}")
    plan = northwest_coupling(x.weights, y.weights)
    return coupling_cost_1d(x, y, plan, p) ** (1.0 / p)


def wasserstein_1d_with_plan(x: SortedLine, y: SortedLine, p: float = 2.0):
    """Distance plus the optimal plan in the samples' original indices."""
    if p < 1:
        raise InvalidInputError(f"order p must be >= 1, got {p}")
    plan = northwest_coupling(x.weights, y.weights)
    value = coupling_cost_1d(x, y, plan, p) ** (1.0 / p)
    return value, plan.relabel(x.order, y.order)
