"""Weighted point clouds, covering boxes, and grid quantization.

A cloud is an (n, d) matrix of finite coordinates plus a weight vector on
the simplex.  Distances order each cloud along a Hilbert curve stretched
over a covering hyper-rectangle; the *domain mode* decides which box is
used: each cloud's own smallest box (``"percloud"``), one common box
(``"shared"`` or an explicit :class:`BoundingBox`), or the unit cube.
"""

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, ParameterError
from .hilbert import max_order

WEIGHT_TOL = 1e-9

DOMAIN_MODES = ("percloud", "shared", "unitcube")


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned hyper-rectangle given by its lower/upper corners."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.ascontiguousarray(self.lower, dtype=np.float64)
        upper = np.ascontiguousarray(self.upper, dtype=np.float64)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise InvalidInputError("box corners must be 1-d arrays of equal length")
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise InvalidInputError("box corners must be finite")
        if np.any(lower > upper):
            raise InvalidInputError("box lower corner exceeds upper corner")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def extent(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, points: np.ndarray, slack: float = 1e-12) -> bool:
        tol = slack * np.maximum(1.0, np.abs(self.lower) + np.abs(self.upper))
        return bool(
            np.all(points >= self.lower - tol) and np.all(points <= self.upper + tol)
        )

    def union(self, other: "BoundingBox") -> "BoundingBox":
        return BoundingBox(
            np.minimum(self.lower, other.lower), np.maximum(self.upper, other.upper)
        )

    def inflated(self, fraction: float) -> "BoundingBox":
        pad = fraction * np.maximum(self.extent, 1e-12)
        return BoundingBox(self.lower - pad, self.upper + pad)


@dataclass(frozen=True)
class WeightedPointCloud:
    """Points with simplex weights; immutable after construction.

    Weights must be non-negative and sum to 1 within ``1e-9``; small
    round-off is renormalized away, anything worse is rejected.
    """

    points: np.ndarray
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise InvalidInputError(f"points must be (n, d) with n >= 1, got {pts.shape}")
        if not np.isfinite(pts).all():
            raise InvalidInputError("points contain NaN or Inf")
        if self.weights is None:
            w = np.full(pts.shape[0], 1.0 / pts.shape[0])
        else:
            w = np.ascontiguousarray(self.weights, dtype=np.float64)
        if w.shape != (pts.shape[0],):
            raise InvalidInputError(
                f"weights must have shape ({pts.shape[0]},), got {w.shape}"
            )
        if not np.isfinite(w).all() or np.any(w < 0):
            raise InvalidInputError("weights must be finite and non-negative")
        total = float(w.sum())
        if abs(total - 1.0) > WEIGHT_TOL:
            raise InvalidInputError(f"weights sum to {total!r}, expected 1 within {WEIGHT_TOL}")
        if total != 1.0:
            w = w / total
        pts.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, points) -> "WeightedPointCloud":
        return cls(points, None)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def is_uniform(self) -> bool:
        return bool(np.all(self.weights == self.weights[0]))


def bounding_box(cloud: WeightedPointCloud) -> BoundingBox:
    """Smallest axis-aligned hyper-rectangle covering the cloud."""
    return BoundingBox(cloud.points.min(axis=0), cloud.points.max(axis=0))


def quantize(points, box: BoundingBox, order: int) -> np.ndarray:
    """Grid cells of points on a 2**order per-axis grid over the box.

    Cell index per axis is floor((x - a) / (b - a) * 2**order) clamped to
    the top cell; a zero-extent axis collapses to cell 0.  Points outside
    the box beyond a 1e-12 relative slack are rejected.
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[1] != box.dim:
        raise InvalidInputError(
            f"points have dimension {pts.shape[1]}, box has {box.dim}"
        )
    if not box.contains(pts):
        raise InvalidInputError("point outside the quantization box")
    extent = box.extent
    cells_per_axis = float(1 << order)
    safe = np.where(extent > 0, extent, 1.0)
    scaled = (pts - box.lower) / safe * cells_per_axis
    cells = np.floor(scaled)
    np.clip(cells, 0.0, cells_per_axis - 1.0, out=cells)
    cells[:, extent == 0] = 0.0
    return cells.astype(np.uint64)


def default_order(m: int, n: int, dim: int) -> int:
    """Curve order used when none is given: ~log2 of the larger sample size,
    at least 2, capped so keys fit 128 bits."""
    if dim < 1:
        raise ParameterError(f"dimension must be positive, got {dim}")
    want = max(2, int(np.ceil(np.log2(max(m, n, 2)))))
    return max(1, min(want, max_order(dim)))


def resolve_boxes(X: WeightedPointCloud, Y: WeightedPointCloud, domain):
    """Boxes for the two clouds under a domain mode.

    `domain` is "percloud", "shared", "unitcube", or an explicit
    :class:`BoundingBox` shared by both clouds.
    """
    if isinstance(domain, BoundingBox):
        if not (domain.contains(X.points) and domain.contains(Y.points)):
            raise InvalidInputError("shared box does not contain both clouds")
        return domain, domain
    if domain == "percloud":
        return bounding_box(X), bounding_box(Y)
    if domain == "shared":
        box = bounding_box(X).union(bounding_box(Y))
        return box, box
    if domain == "unitcube":
        box = BoundingBox(np.zeros(X.dim), np.ones(X.dim))
        if not (box.contains(X.points) and box.contains(Y.points)):
            raise InvalidInputError("unitcube domain requires clouds inside [0, 1]^d")
        return box, box
    raise ParameterError(f"unknown domain mode {domain!r}")


def read_cloud_csv(path, weighted: bool = False) -> WeightedPointCloud:
    """Read a cloud from CSV: one row per point, d numeric columns.

    With ``weighted=True`` the final column holds the weights; otherwise
    weights are uniform.  A non-numeric first row is treated as a header.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvalidInputError(f"{path}: empty point-cloud file")
    try:
        [float(tok) for tok in lines[0].replace(",", " ").split()]
    except ValueError:
        lines = lines[1:]
        if not lines:
            raise InvalidInputError(f"{path}: no data rows")
    try:
        data = np.loadtxt(io.StringIO("\n".join(lines)), delimiter=",", ndmin=2)
    except ValueError as exc:
        raise InvalidInputError(f"{path}: malformed CSV ({exc})") from exc
    if weighted:
        if data.shape[1] < 2:
            raise InvalidInputError(f"{path}: weighted file needs >= 2 columns")
        return WeightedPointCloud(data[:, :-1], data[:, -1])
    return WeightedPointCloud.uniform(data)


def write_cloud_csv(path, cloud: WeightedPointCloud, weighted: bool = False) -> None:
    data = cloud.points
    header = ",".join(f"x{i}" for i in range(cloud.dim))
    if weighted:
        data = np.column_stack([data, cloud.weights])
        header += ",weight"
    np.savetxt(path, data, delimiter=",", header=header, comments="")
