"""Verification baselines: exact Wasserstein, sliced Wasserstein, Gaussian W2.

The exact solver is the ground truth the Hilbert curve surrogate is tested
against, so it must be certified: the LP path reports its duality gap, and
the fast assignment path (equal sizes, uniform weights) is an exact
matching solver cross-validated against the LP in the test suite.
"""

import time

import numpy as np
from scipy import sparse
from scipy.optimize import linear_sum_assignment, linprog
from scipy.spatial.distance import cdist

from .cloud import WeightedPointCloud
from .errors import InvalidInputError, ParameterError
from .hcp import DistanceReport
from .ot1d import SortedLine, SparseCoupling, wasserstein_1d
from .sampling import haar_stiefel, substream

MAX_DENSE_COST = 10**6


def _cost_matrix(X: np.ndarray, Y: np.ndarray, p: float) -> np.ndarray:
    if p == 2.0:
        return cdist(X, Y, "sqeuclidean")
    return cdist(X, Y, "minkowski", p=p) ** p


def exact_wasserstein(
    X: WeightedPointCloud,
    Y: WeightedPointCloud,
    p: float = 2.0,
    method: str = "auto",
) -> DistanceReport:
    """Exact W_p with an optimal vertex coupling (support <= m + n - 1).

    method: "auto" picks a linear assignment for equal-size uniform clouds
    and the HiGHS transport LP otherwise; "lp" forces the LP (which also
    reports its duality gap); "assignment" forces the matching solver.
    """
    if X.dim != Y.dim:
        raise InvalidInputError(f"dimension mismatch: {X.dim} vs {Y.dim}")
    if p < 1:
        raise ParameterError(f"order p must be >= 1, got {p}")
    m, n = X.n, Y.n
    if m * n > MAX_DENSE_COST:
        raise InvalidInputError(
            f"dense cost matrix would hold {m * n} entries (> {MAX_DENSE_COST}); "
            "use hcp/iprhcp/sw surrogates at this scale"
        )
    uniform = X.is_uniform() and Y.is_uniform()
    if method == "auto":
        method = "assignment" if (m == n and uniform) else "lp"
    start = time.perf_counter()
    cost = _cost_matrix(X.points, Y.points, p)

    if method == "assignment":
        if m != n or not uniform:
            raise ParameterError("assignment method needs equal sizes and uniform weights")
        rows, cols = linear_sum_assignment(cost)
        raw = float(cost[rows, cols].mean())
        plan = SparseCoupling(rows, cols, np.full(n, 1.0 / n))
        details = {"method": "assignment"}
    elif method == "lp":
        var = np.arange(m * n)
        con_rows = np.concatenate(
            [np.repeat(np.arange(m), n), m + np.tile(np.arange(n), m)]
        )
        A = sparse.coo_matrix(
            (np.ones(2 * m * n), (con_rows, np.concatenate([var, var]))),
            shape=(m + n, m * n),
        ).tocsc()
        rhs = np.concatenate([X.weights, Y.weights])
        res = linprog(
            cost.ravel(), A_eq=A[:-1], b_eq=rhs[:-1], bounds=(0, None), method="highs"
        )
        if res.status != 0:
            raise InvalidInputError(f"transport LP failed: {res.message}")
        x = np.maximum(res.x, 0.0)
        raw = float(res.fun)
        gap = abs(raw - float(res.eqlin.marginals @ rhs[:-1]))
        keep = np.flatnonzero(x > 1e-15)
        plan = SparseCoupling(keep // n, keep % n, x[keep])
        details = {"method": "lp", "duality_gap": gap}
    else:
        raise ParameterError(f"unknown exact solver method {method!r}")

    return DistanceReport(
        metric="wasserstein",
        value=raw ** (1.0 / p),
        params={"p": p, "m": m, "n": n},
        coupling=plan,
        elapsed=time.perf_counter() - start,
        details=details,
    )


def sliced_wasserstein(
    X: WeightedPointCloud,
    Y: WeightedPointCloud,
    p: float = 2.0,
    n_projections: int = 100,
    seed: int = 0,
) -> DistanceReport:
    """Monte Carlo sliced W_p: average of W_p**p over random 1D projections.

    Direction l comes from the (seed, l) substream, so the estimate is
    reproducible and independent of evaluation order.
    """
    if X.dim != Y.dim:
        raise InvalidInputError(f"dimension mismatch: {X.dim} vs {Y.dim}")
    if p < 1:
        raise ParameterError(f"order p must be >= 1, got {p}")
    if n_projections < 1:
        raise ParameterError(f"n_projections must be >= 1, got {n_projections}")
    start = time.perf_counter()
    powers = np.empty(n_projections)
    for l in range(n_projections):
        theta = haar_stiefel(X.dim, 1, substream(seed, l)).ravel()
        wx = SortedLine.from_sample(X.points @ theta, X.weights)
        wy = SortedLine.from_sample(Y.points @ theta, Y.weights)
        powers[l] = wasserstein_1d(wx, wy, p=p) ** p
    value = float(powers.mean()) ** (1.0 / p)
    std = float(powers.std(ddof=1)) if n_projections > 1 else 0.0
    return DistanceReport(
        metric="sw",
        value=value,
        params={"p": p, "n_projections": n_projections, "seed": seed},
        elapsed=time.perf_counter() - start,
        details={"power_mean": float(powers.mean()), "power_std": std},
    )


def _psd_sqrt(cov: np.ndarray, name: str) -> np.ndarray:
    cov = np.asarray(cov, dtype=np.float64)
    scale = max(1.0, float(np.abs(cov).max()))
    if not np.allclose(cov, cov.T, atol=1e-10 * scale):
        raise InvalidInputError(f"{name} is not symmetric")
    vals, vecs = np.linalg.eigh((cov + cov.T) / 2.0)
    if vals.min() < -1e-10 * scale:
        raise InvalidInputError(f"{name} is not positive semidefinite")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def gaussian_w2(mean1, cov1, mean2, cov2) -> float:
    """Closed-form W2 between two Gaussians:
    sqrt(||m1 - m2||^2 + tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2))."""
    mean1 = np.asarray(mean1, dtype=np.float64).ravel()
    mean2 = np.asarray(mean2, dtype=np.float64).ravel()
    if mean1.shape != mean2.shape:
        raise InvalidInputError("mean vectors differ in length")
    if np.array_equal(mean1, mean2) and np.array_equal(np.asarray(cov1), np.asarray(cov2)):
        _psd_sqrt(cov1, "cov1")
        return 0.0
    root1 = _psd_sqrt(cov1, "cov1")
    cov2 = np.asarray(cov2, dtype=np.float64)
    _psd_sqrt(cov2, "cov2")
    inner = root1 @ cov2 @ root1
    vals = np.linalg.eigvalsh((inner + inner.T) / 2.0)
    cross = np.sqrt(np.clip(vals, 0.0, None)).sum()
    trace_term = float(np.trace(np.asarray(cov1)) + np.trace(cov2) - 2.0 * cross)
    gap = float(np.dot(mean1 - mean2, mean1 - mean2)) + trace_term
    return float(np.sqrt(max(gap, 0.0)))
