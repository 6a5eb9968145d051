import numpy as np
import pytest

from hilbert_ot.baselines import exact_wasserstein
from hilbert_ot.errors import InvalidInputError, ParameterError
from hilbert_ot.experiments import (
    ExperimentSpec,
    aggregate_rows,
    generate,
    read_rows_csv,
    run_experiment,
    write_gnuplot_script,
)


def test_generate_gaussian_mean_sanity():
    cloud = generate("gaussian", 10_000, seed=1, dims=2)
    assert cloud.n == 10_000
    assert np.all(np.abs(cloud.points.mean(axis=0)) < 3.0 / np.sqrt(10_000))
    assert cloud.is_uniform()


def test_generate_fragmented_hypercube_geometry():
    cloud = generate("fragmented_hypercube", 500, seed=2, dims=2, qstar=2)
    coords = np.abs(cloud.points)
    assert np.all((coords > 1.0) & (coords < 3.0))
    # only the first qstar coordinates are pushed
    part = generate("fragmented_hypercube", 500, seed=3, dims=5, qstar=2)
    assert np.all(np.abs(part.points[:, :2]) > 1.0)
    assert np.all(np.abs(part.points[:, 2:]) < 1.0)


def test_generate_gmm_offset_noise_floor():
    # identical mixtures: distance is pure sampling noise; threshold frozen
    # from a 24-pair calibration run (max 0.53) plus slack
    X = generate("gmm_offset", 500, seed=4, alpha=0.0, side="source")
    Y = generate("gmm_offset", 500, seed=5, alpha=0.0, side="target")
    assert exact_wasserstein(X, Y).value < 0.65


def test_generate_determinism_and_errors():
    a = generate("uniform_cube", 50, seed=6, dims=3)
    b = generate("uniform_cube", 50, seed=6, dims=3)
    np.testing.assert_array_equal(a.points, b.points)
    with pytest.raises(InvalidInputError):
        generate("moons", 10)
    with pytest.raises(ParameterError):
        generate("uniform_cube", 0)
    with pytest.raises(ParameterError):
        generate("fragmented_hypercube", 10, dims=2, qstar=5)


def test_fig1_offset_row_contract(tmp_path):
    spec = ExperimentSpec(
        name="fig1_offset",
        seed=1,
        replications=1,
        out_dir=tmp_path,
        overrides={"alphas": (0.0, 0.5, 1.0), "n": 60, "n_projections": 16},
    )
    path = run_experiment(spec)
    rows = read_rows_csv(path)
    raw = [r for r in rows if r["replication"] == "0"]
    # 3 alphas x 3 metrics
    assert len(raw) == 9
    means = [r for r in rows if r["replication"] == "mean"]
    assert len(means) == 9
    for metric in ("wasserstein", "hcp", "sw"):
        assert sum(r["metric"] == metric for r in raw) == 3


def test_aggregates_match_recomputation(tmp_path):
    spec = ExperimentSpec(
        name="k_sensitivity",
        seed=2,
        replications=3,
        out_dir=tmp_path,
        overrides={"n": 80, "orders": (4, 6)},
    )
    rows = read_rows_csv(run_experiment(spec))
    for pv in ("4", "6"):
        raw = [float(r["value"]) for r in rows if r["param_value"] == pv and r["replication"].isdigit()]
        mean = [float(r["value"]) for r in rows if r["param_value"] == pv and r["replication"] == "mean"]
        std = [float(r["value"]) for r in rows if r["param_value"] == pv and r["replication"] == "std"]
        assert mean[0] == pytest.approx(np.mean(raw), abs=1e-12)
        assert std[0] == pytest.approx(np.std(raw, ddof=1), abs=1e-12)


def test_rate_curve_emits_slope(tmp_path):
    spec = ExperimentSpec(
        name="rate_curve",
        seed=3,
        replications=2,
        out_dir=tmp_path,
        overrides={"sizes": (64, 128, 256), "ref_size": 1024},
    )
    rows = read_rows_csv(run_experiment(spec))
    fit = [r for r in rows if r["replication"] == "fit"]
    assert len(fit) == 1
    assert fit[0]["metric"] == "loglog_slope"
    assert float(fit[0]["value"]) < 0


def test_runtime_scaling_rows(tmp_path):
    spec = ExperimentSpec(
        name="runtime_scaling",
        seed=4,
        out_dir=tmp_path,
        overrides={"sizes": (500, 1000), "runs": 2, "order": 8},
    )
    rows = read_rows_csv(run_experiment(spec))
    ratios = [r for r in rows if r["metric"] == "median_ratio"]
    assert len(ratios) == 1
    hcp_rows = [r for r in rows if r["metric"] == "hcp_seconds" and r["replication"].isdigit()]
    assert len(hcp_rows) == 4  # 2 sizes x 2 runs


def test_flow_experiment_rows(tmp_path):
    spec = ExperimentSpec(
        name="flow",
        seed=5,
        replications=2,
        out_dir=tmp_path,
        overrides={"particles": 24, "iters": 10},
    )
    rows = read_rows_csv(run_experiment(spec))
    finals = [r for r in rows if r["metric"] == "final_w2" and r["replication"].isdigit()]
    assert len(finals) == 4  # 2 reps x 2 metrics
    assert {r["param_value"] for r in finals} == {"hcp", "sw"}


def test_thread_count_does_not_change_values(tmp_path):
    base = {"n": 50, "orders": (4, 6)}
    spec1 = ExperimentSpec(
        name="k_sensitivity", seed=7, replications=4, out_dir=tmp_path / "a",
        threads=1, overrides=base,
    )
    spec8 = ExperimentSpec(
        name="k_sensitivity", seed=7, replications=4, out_dir=tmp_path / "b",
        threads=8, overrides=base,
    )
    rows1 = read_rows_csv(run_experiment(spec1))
    rows8 = read_rows_csv(run_experiment(spec8))
    strip = lambda rows: [
        {k: v for k, v in row.items() if k != "elapsed_s"} for row in rows
    ]
    assert strip(rows1) == strip(rows8)


def test_subspace_recovery_smoke(tmp_path):
    spec = ExperimentSpec(
        name="subspace_recovery",
        seed=8,
        replications=1,
        out_dir=tmp_path,
        overrides={"dims": 6, "qstar": 2, "subdims": (1, 2), "n": 60},
    )
    rows = read_rows_csv(run_experiment(spec))
    vals = {
        r["param_value"]: float(r["value"]) for r in rows if r["replication"] == "mean"
    }
    assert vals["2"] > vals["1"]


def test_highdim_theta_both_settings(tmp_path):
    for setting in (1, 2):
        spec = ExperimentSpec(
            name="highdim_theta",
            seed=10 + setting,
            replications=1,
            out_dir=tmp_path / str(setting),
            overrides={
                "setting": setting, "dims": 6, "n": 40,
                "thetas": (3, 5) if setting == 2 else (0.0, 1.0),
                "n_projections": 8,
            },
        )
        rows = read_rows_csv(run_experiment(spec))
        metrics = {r["metric"] for r in rows}
        assert {"prhcp", "sw", "w2_closed_form"} <= metrics
    bad = ExperimentSpec(
        name="highdim_theta", seed=1, replications=1, out_dir=tmp_path,
        overrides={"setting": 3},
    )
    with pytest.raises(ParameterError):
        run_experiment(bad)


def test_generate_gaussian_rejects_bad_cov():
    with pytest.raises(InvalidInputError):
        generate("gaussian", 10, dims=2, cov=np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_gnuplot_script(tmp_path):
    spec = ExperimentSpec(
        name="k_sensitivity", seed=9, replications=1, out_dir=tmp_path,
        overrides={"n": 40, "orders": (4,)},
    )
    path = run_experiment(spec)
    script = tmp_path / "plot.gp"
    write_gnuplot_script(path, script)
    text = script.read_text()
    assert "gnuplot" in text
    assert "hcp" in text


def test_spec_validation():
    with pytest.raises(InvalidInputError):
        ExperimentSpec(name="unknown")
    with pytest.raises(ParameterError):
        ExperimentSpec(name="flow", replications=0)
    with pytest.raises(ParameterError):
        ExperimentSpec(name="flow", threads=0)
