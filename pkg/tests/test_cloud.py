import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilbert_ot.cloud import (
    BoundingBox,
    WeightedPointCloud,
    bounding_box,
    default_order,
    quantize,
    read_cloud_csv,
    resolve_boxes,
    write_cloud_csv,
)
from hilbert_ot.errors import InvalidInputError, ParameterError


def test_bounding_box_basic():
    cloud = WeightedPointCloud.uniform(np.array([[0.0, 0.0], [1.0, 2.0]]))
    box = bounding_box(cloud)
    assert box.lower.tolist() == [0.0, 0.0]
    assert box.upper.tolist() == [1.0, 2.0]


def test_bounding_box_degenerate_single_point():
    box = bounding_box(WeightedPointCloud.uniform(np.array([[3.0, 3.0]])))
    assert box.lower.tolist() == [3.0, 3.0]
    assert box.upper.tolist() == [3.0, 3.0]


def test_bounding_box_contains_samples():
    rng = np.random.default_rng(0)
    pts = rng.random((100, 2))
    box = bounding_box(WeightedPointCloud.uniform(pts))
    assert box.contains(pts)
    assert np.all(box.lower >= 0) and np.all(box.upper <= 1)


def test_quantize_corners_and_interior():
    box = BoundingBox(np.zeros(2), np.ones(2))
    assert quantize(np.array([[0.0, 0.0]]), box, 3).tolist() == [[0, 0]]
    assert quantize(np.array([[1.0, 1.0]]), box, 3).tolist() == [[7, 7]]
    assert quantize(np.array([[0.3, 0.7]]), box, 2).tolist() == [[1, 2]]


def test_quantize_degenerate_axis():
    box = BoundingBox(np.array([0.0, 5.0]), np.array([1.0, 5.0]))
    cells = quantize(np.array([[0.6, 5.0]]), box, 4)
    assert cells.tolist() == [[9, 0]]


def test_quantize_rejects_outside_points():
    box = BoundingBox(np.zeros(2), np.ones(2))
    with pytest.raises(InvalidInputError):
        quantize(np.array([[1.5, 0.5]]), box, 2)
    # within slack is fine
    quantize(np.array([[1.0 + 1e-13, 0.5]]), box, 2)


@given(st.data())
@settings(max_examples=50, deadline=None)
def test_quantize_monotone_per_axis(data):
    order = data.draw(st.integers(1, 8))
    x = data.draw(st.floats(0, 1))
    x2 = data.draw(st.floats(0, 1))
    lo, hi = min(x, x2), max(x, x2)
    box = BoundingBox(np.zeros(2), np.ones(2))
    c_lo = quantize(np.array([[lo, 0.5]]), box, order)[0]
    c_hi = quantize(np.array([[hi, 0.5]]), box, order)[0]
    assert c_lo[0] <= c_hi[0]
    assert c_lo[1] == c_hi[1]


def test_quantize_affine_invariance_percloud():
    rng = np.random.default_rng(1)
    pts = rng.standard_normal((200, 3))
    cloud = WeightedPointCloud.uniform(pts)
    cells = quantize(pts, bounding_box(cloud), 5)
    scale = np.array([2.0, 0.5, 10.0])
    shift = np.array([-3.0, 7.0, 0.1])
    mapped = WeightedPointCloud.uniform(pts * scale + shift)
    cells2 = quantize(mapped.points, bounding_box(mapped), 5)
    np.testing.assert_array_equal(cells, cells2)


def test_weight_validation():
    pts = np.zeros((2, 2))
    WeightedPointCloud(pts, np.array([0.5, 0.5]))
    with pytest.raises(InvalidInputError):
        WeightedPointCloud(pts, np.array([0.6, 0.5]))
    with pytest.raises(InvalidInputError):
        WeightedPointCloud(pts, np.array([1.1, -0.1]))
    # tiny drift is renormalized
    c = WeightedPointCloud(pts, np.array([0.5, 0.5 + 5e-10]))
    assert abs(c.weights.sum() - 1.0) < 1e-15


def test_cloud_rejects_bad_points():
    with pytest.raises(InvalidInputError):
        WeightedPointCloud.uniform(np.array([[np.nan, 0.0]]))
    with pytest.raises(InvalidInputError):
        WeightedPointCloud.uniform(np.zeros((0, 2)))


def test_cloud_is_immutable():
    cloud = WeightedPointCloud.uniform(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        cloud.points[0, 0] = 1.0


def test_default_order_rule():
    assert default_order(100, 100, 2) == 7
    assert default_order(2, 2, 2) == 2
    assert default_order(10**5, 10**5, 50) == 2  # capped by 128-bit keys
    with pytest.raises(ParameterError):
        default_order(4, 4, 0)


def test_resolve_boxes_modes():
    X = WeightedPointCloud.uniform(np.array([[0.1, 0.1], [0.4, 0.2]]))
    Y = WeightedPointCloud.uniform(np.array([[0.3, 0.6], [0.9, 0.8]]))
    bx, by = resolve_boxes(X, Y, "percloud")
    assert bx.upper.tolist() == [0.4, 0.2]
    assert by.lower.tolist() == [0.3, 0.6]
    shared_x, shared_y = resolve_boxes(X, Y, "shared")
    assert shared_x is shared_y
    assert shared_x.lower.tolist() == [0.1, 0.1]
    assert shared_x.upper.tolist() == [0.9, 0.8]
    unit_x, unit_y = resolve_boxes(X, Y, "unitcube")
    assert unit_x.lower.tolist() == [0.0, 0.0]
    with pytest.raises(ParameterError):
        resolve_boxes(X, Y, "nope")
    small = BoundingBox(np.zeros(2), np.array([0.5, 0.5]))
    with pytest.raises(InvalidInputError):
        resolve_boxes(X, Y, small)
    outside = WeightedPointCloud.uniform(np.array([[2.0, 2.0]]))
    with pytest.raises(InvalidInputError):
        resolve_boxes(X, outside, "unitcube")


def test_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(2)
    cloud = WeightedPointCloud(rng.random((20, 3)), rng.dirichlet(np.ones(20)))
    path = tmp_path / "cloud.csv"
    write_cloud_csv(path, cloud, weighted=True)
    back = read_cloud_csv(path, weighted=True)
    np.testing.assert_allclose(back.points, cloud.points, atol=1e-12)
    np.testing.assert_allclose(back.weights, cloud.weights, atol=1e-9)
    # headerless, unweighted
    path2 = tmp_path / "plain.csv"
    np.savetxt(path2, cloud.points, delimiter=",")
    plain = read_cloud_csv(path2)
    assert plain.is_uniform()
    assert plain.n == 20


def test_csv_rejects_garbage(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,zzz\n")
    with pytest.raises(InvalidInputError):
        read_cloud_csv(path)
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(InvalidInputError):
        read_cloud_csv(empty)
