import numpy as np
import pytest

from hilbert_ot.cloud import WeightedPointCloud
from hilbert_ot.errors import InvalidInputError, ParameterError
from hilbert_ot.flows import (
    FlowConfig,
    FlowTrajectory,
    flow_step,
    make_target,
    run_flow,
    transport_cost_gradient,
)
from hilbert_ot.hcp import coupling_cost, hcp_distance


def test_matched_clouds_are_a_fixed_point():
    rng = np.random.default_rng(0)
    pts = rng.random((30, 2))
    target = WeightedPointCloud.uniform(pts)
    new, loss = flow_step(pts, target, metric="hcp", lr=0.05)
    assert loss == 0.0
    np.testing.assert_array_equal(new, pts)


def test_single_particle_step_lands_halfway():
    # explicit gradient of (x - y)^2 with lr 0.25: 0 -> 0.5 toward target 1
    target = WeightedPointCloud.uniform(np.array([[1.0]]))
    new, loss = flow_step(np.array([[0.0]]), target, metric="hcp", lr=0.25)
    assert new[0, 0] == pytest.approx(0.5)
    assert loss == pytest.approx(1.0)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    for _ in range(10):
        n = int(rng.integers(2, 16))
        pos = rng.standard_normal((n, 2))
        target = WeightedPointCloud.uniform(rng.standard_normal((n + 3, 2)))
        plan = hcp_distance(WeightedPointCloud.uniform(pos), target).coupling
        grad = transport_cost_gradient(pos, target.points, plan)
        eps = 1e-6
        for i, j in [(0, 0), (n // 2, 1), (n - 1, 0)]:
            bumped = pos.copy()
            bumped[i, j] += eps
            up = coupling_cost(bumped, target.points, plan, 2.0)
            bumped[i, j] -= 2 * eps
            down = coupling_cost(bumped, target.points, plan, 2.0)
            fd = (up - down) / (2 * eps)
            assert grad[i, j] == pytest.approx(fd, rel=1e-5, abs=1e-8)


def test_sw_step_moves_along_direction_only():
    rng = np.random.default_rng(2)
    pos = rng.standard_normal((20, 3))
    target = WeightedPointCloud.uniform(rng.standard_normal((20, 3)) + 2.0)
    direction = np.array([1.0, 0.0, 0.0])
    new, loss = flow_step(pos, target, metric="sw", lr=0.01, direction=direction)
    moved = new - pos
    assert np.allclose(moved[:, 1:], 0.0)
    assert loss > 0
    with pytest.raises(ParameterError):
        flow_step(pos, target, metric="sw", lr=0.01)


def test_flow_step_rejects_weighted_particles():
    cloud = WeightedPointCloud(np.zeros((2, 2)), np.array([0.7, 0.3]))
    target = WeightedPointCloud.uniform(np.ones((2, 2)))
    with pytest.raises(InvalidInputError):
        flow_step(cloud, target, metric="hcp")


def test_targets_have_expected_geometry():
    g = make_target("gauss25", 2000, seed=1)
    assert g.shape == (2000, 2)
    assert np.all(np.abs(g) < 4.5)
    c = make_target("circle", 1000, seed=1)
    radii = np.linalg.norm(c, axis=1)
    assert abs(radii.mean() - 2.0) < 0.05
    s = make_target("swissroll", 500, seed=1)
    assert np.all(np.linalg.norm(s, axis=1) < 5.5)
    with pytest.raises(InvalidInputError):
        make_target("torus", 10)


def test_zero_iterations_yields_single_record():
    config = FlowConfig(iters=0, n_particles=16, eval_exact=False)
    traj = run_flow(config, "circle")
    assert len(traj.records) == 1
    assert traj.records[0].iteration == 0
    assert traj.records[0].positions.shape == (16, 2)


def test_trajectories_are_deterministic():
    config = FlowConfig(iters=20, n_particles=32, log_every=5, eval_exact=False, seed=3)
    for metric in ("hcp", "sw"):
        cfg = FlowConfig(**{**config.__dict__, "metric": metric})
        t1 = run_flow(cfg, "gauss25")
        t2 = run_flow(cfg, "gauss25")
        assert t1.iterations() == t2.iterations()
        np.testing.assert_array_equal(t1.losses(), t2.losses())
        np.testing.assert_array_equal(t1.final().positions, t2.final().positions)


def test_flow_reduces_exact_distance():
    config = FlowConfig(iters=60, n_particles=64, log_every=60, seed=4)
    traj = run_flow(config, "gauss25")
    w2 = traj.exact_w2()
    assert w2[-1] < 0.7 * w2[0]
    assert np.all(traj.losses() >= 0)


def test_particles_stay_finite_at_large_lr():
    for name in ("gauss25", "swissroll", "circle"):
        config = FlowConfig(
            iters=500, n_particles=50, lr=0.1, log_every=100, eval_exact=False, seed=5
        )
        traj = run_flow(config, name)
        assert np.isfinite(traj.final().positions).all()
        config_sw = FlowConfig(**{**config.__dict__, "metric": "sw"})
        traj_sw = run_flow(config_sw, name)
        assert np.isfinite(traj_sw.final().positions).all()


def test_trajectory_csv(tmp_path):
    config = FlowConfig(iters=4, n_particles=8, log_every=2, eval_exact=False)
    traj = run_flow(config, "circle")
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "iter,loss,exact_w2,elapsed_s"
    assert len(lines) == 1 + len(traj.records)
    assert [int(ln.split(",")[0]) for ln in lines[1:]] == [0, 2, 4]


def test_flow_config_validation():
    with pytest.raises(ParameterError):
        FlowConfig(metric="mmd")
    with pytest.raises(ParameterError):
        FlowConfig(lr=0.0)
    with pytest.raises(ParameterError):
        FlowConfig(iters=-1)
