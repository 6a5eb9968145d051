"""Synthetic data generators and desk-scale experiment runners.

Every experiment writes one long-format CSV with columns

    name,param,param_value,replication,metric,value,elapsed_s

holding one row per (parameter value, replication, metric), aggregate rows
(replication = "mean"/"std") recomputable from the raw rows, and
experiment-specific summary rows (replication = "fit").  Replications are
parallelizable but draw from per-replication substreams, so the output is
identical for any thread count.
"""

import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baselines import exact_wasserstein, gaussian_w2, sliced_wasserstein
from .cloud import WeightedPointCloud
from .errors import InvalidInputError, ParameterError
from .flows import FlowConfig, make_target, run_flow
from .hcp import HcpParams, hcp_distance
from .sampling import derive_seed, substream
from .subspace import iprhcp, prhcp

EXPERIMENT_NAMES = (
    "fig1_offset",
    "highdim_theta",
    "rate_curve",
    "k_sensitivity",
    "subspace_recovery",
    "runtime_scaling",
    "flow",
)

CSV_COLUMNS = ("name", "param", "param_value", "replication", "metric", "value", "elapsed_s")

GENERATOR_FAMILIES = (
    "gmm_offset",
    "gauss25",
    "swissroll",
    "circle",
    "uniform_cube",
    "gaussian",
    "fragmented_hypercube",
)


# ---------------------------------------------------------------------------
# generators


def generate(family: str, n: int, seed: int = 0, **params) -> WeightedPointCloud:
    """Sample n points from a named synthetic family, uniform weights."""
    if n < 1:
        raise ParameterError(f"sample size must be >= 1, got {n}")
    rng = substream(seed, 0)
    if family == "gmm_offset":
        alpha = float(params.get("alpha", 0.0))
        side = params.get("side", "source")
        if side not in ("source", "target"):
            raise ParameterError(f"gmm_offset side must be source/target, got {side!r}")
        means = np.array([[-2.0, 0.0], [0.0, alpha if side == "target" else 0.0], [2.0, 0.0]])
        idx = rng.integers(0, 3, size=n)
        pts = means[idx] + 0.1 * rng.standard_normal((n, 2))
    elif family in ("gauss25", "swissroll", "circle"):
        pts = make_target(family, n, seed=seed)
    elif family == "uniform_cube":
        dims = int(params.get("dims", 2))
        low = float(params.get("low", 0.0))
        high = float(params.get("high", 1.0))
        if dims < 1 or not low < high:
            raise ParameterError("uniform_cube needs dims >= 1 and low < high")
        pts = rng.uniform(low, high, size=(n, dims))
    elif family == "gaussian":
        dims = int(params.get("dims", 2))
        mean = np.asarray(params.get("mean", np.zeros(dims)), dtype=np.float64)
        cov = np.asarray(params.get("cov", np.eye(dims)), dtype=np.float64)
        try:
            pts = rng.multivariate_normal(mean, cov, size=n, method="cholesky")
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise InvalidInputError(f"bad gaussian parameters: {exc}") from exc
    elif family == "fragmented_hypercube":
        dims = int(params.get("dims", 2))
        qstar = int(params.get("qstar", 2))
        if not 1 <= qstar <= dims:
            raise ParameterError(f"fragmented_hypercube needs 1 <= qstar <= dims, got {qstar}")
        pts = rng.uniform(-1.0, 1.0, size=(n, dims))
        pts[:, :qstar] += 2.0 * np.sign(pts[:, :qstar])
    else:
        raise InvalidInputError(f"unknown generator family {family!r}")
    return WeightedPointCloud.uniform(pts)


# ---------------------------------------------------------------------------
# experiment plumbing


@dataclass
class ExperimentSpec:
    name: str
    seed: int = 0
    replications: int | None = None
    out_dir: str = "."
    threads: int = 1
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in EXPERIMENT_NAMES:
            raise InvalidInputError(
                f"unknown experiment {self.name!r}; choose from {EXPERIMENT_NAMES}"
            )
        if self.replications is not None and self.replications < 1:
            raise ParameterError("replications must be >= 1")
        if self.threads < 1:
            raise ParameterError("threads must be >= 1")


def _row(name, param, param_value, replication, metric, value, elapsed=""):
    return {
        "name": name,
        "param": param,
        "param_value": param_value,
        "replication": replication,
        "metric": metric,
        "value": value,
        "elapsed_s": elapsed,
    }


def _timed(fn):
    start = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - start


def _run_replications(worker, replications: int, threads: int) -> list:
    """Rows from every replication, concatenated in replication order."""
    if threads <= 1:
        chunks = [worker(rep) for rep in range(replications)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(worker, range(replications)))
    rows = []
    for chunk in chunks:
        rows.extend(chunk)
    return rows


def aggregate_rows(rows: list) -> list:
    """Mean/std rows per (param, param_value, metric) over raw replications."""
    groups = {}
    order = []
    for row in rows:
        if not isinstance(row["replication"], int):
            continue
        key = (row["name"], row["param"], row["param_value"], row["metric"])
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(float(row["value"]))
    out = []
    for key in order:
        vals = np.array(groups[key])
        name, param, pv, metric = key
        out.append(_row(name, param, pv, "mean", metric, float(vals.mean())))
        std = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
        out.append(_row(name, param, pv, "std", metric, std))
    return out


def write_rows_csv(path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


def read_rows_csv(path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def loglog_slope(sizes, values) -> float:
    coeffs = np.polyfit(np.log(np.asarray(sizes, float)), np.log(np.asarray(values, float)), 1)
    return float(coeffs[0])


# ---------------------------------------------------------------------------
# individual experiments


def _exp_fig1_offset(name, seed, replications, **ov):
    alphas = tuple(ov.get("alphas", (0.0, 0.25, 0.5, 0.75, 1.0)))
    n = int(ov.get("n", 500))
    n_projections = int(ov.get("n_projections", 100))

    def one_rep(rep):
        rows = []
        for ai, alpha in enumerate(alphas):
            X = generate("gmm_offset", n, derive_seed(seed, rep, ai, 0), alpha=alpha, side="source")
            Y = generate("gmm_offset", n, derive_seed(seed, rep, ai, 1), alpha=alpha, side="target")
            wass, t_w = _timed(lambda: exact_wasserstein(X, Y, p=2).value)
            hcp, t_h = _timed(lambda: hcp_distance(X, Y).value)
            sw, t_s = _timed(
                lambda: sliced_wasserstein(
                    X, Y, n_projections=n_projections, seed=derive_seed(seed, rep, ai, 2)
                ).value
            )
            rows.append(_row(name, "alpha", alpha, rep, "wasserstein", wass, t_w))
            rows.append(_row(name, "alpha", alpha, rep, "hcp", hcp, t_h))
            rows.append(_row(name, "alpha", alpha, rep, "sw", sw, t_s))
        return rows

    return one_rep, replications or 10, []


def _exp_highdim_theta(name, seed, replications, **ov):
    setting = int(ov.get("setting", 2))
    if setting not in (1, 2):
        raise ParameterError(f"highdim_theta setting must be 1 or 2, got {setting}")
    thetas = tuple(ov.get("thetas", (3, 4, 5, 6, 7, 8, 9) if setting == 2 else (0.0, 0.25, 0.5, 0.75, 1.0)))
    n = int(ov.get("n", 200))
    dims = int(ov.get("dims", 50))
    subdim = int(ov.get("subdim", 2))
    n_projections = int(ov.get("n_projections", 100))

    def gaussians(theta):
        if setting == 2:
            cov_x = np.diag(np.concatenate([[3.0, 3.0], np.ones(dims - 2)]))
            cov_y = np.diag(np.concatenate([[theta, theta], np.ones(dims - 2)]))
            return np.zeros(dims), cov_x, np.zeros(dims), cov_y
        mean_y = np.zeros(dims)
        mean_y[:2] = theta
        return np.zeros(dims), np.eye(dims), mean_y, np.eye(dims)

    def one_rep(rep):
        rows = []
        for ti, theta in enumerate(thetas):
            mean_x, cov_x, mean_y, cov_y = gaussians(theta)
            X = generate("gaussian", n, derive_seed(seed, rep, ti, 0), dims=dims, mean=mean_x, cov=cov_x)
            Y = generate("gaussian", n, derive_seed(seed, rep, ti, 1), dims=dims, mean=mean_y, cov=cov_y)
            pr, t_p = _timed(lambda: prhcp(X, Y, subdim=subdim).value)
            sw, t_s = _timed(
                lambda: sliced_wasserstein(
                    X, Y, n_projections=n_projections, seed=derive_seed(seed, rep, ti, 2)
                ).value
            )
            closed = gaussian_w2(mean_x, cov_x, mean_y, cov_y)
            rows.append(_row(name, "theta", theta, rep, "prhcp", pr, t_p))
            rows.append(_row(name, "theta", theta, rep, "sw", sw, t_s))
            rows.append(_row(name, "theta", theta, rep, "w2_closed_form", closed))
        return rows

    return one_rep, replications or 50, []


def _exp_rate_curve(name, seed, replications, **ov):
    sizes = tuple(ov.get("sizes", tuple(2**e for e in range(6, 13))))
    ref_size = int(ov.get("ref_size", 2**15))
    dims = int(ov.get("dims", 2))

    def one_rep(rep):
        rows = []
        ref = generate("uniform_cube", ref_size, derive_seed(seed, rep, 0), dims=dims)
        for ni, n in enumerate(sizes):
            X = generate("uniform_cube", n, derive_seed(seed, rep, ni + 1), dims=dims)
            val, t = _timed(lambda: hcp_distance(X, ref).value)
            rows.append(_row(name, "n", n, rep, "hcp", val, t))
        return rows

    def fit(rows):
        means = {
            row["param_value"]: float(row["value"])
            for row in rows
            if row["replication"] == "mean" and row["metric"] == "hcp"
        }
        slope = loglog_slope(list(means.keys()), list(means.values()))
        return [_row(name, "n", "", "fit", "loglog_slope", slope)]

    return one_rep, replications or 30, [fit]


def _exp_k_sensitivity(name, seed, replications, **ov):
    orders = tuple(ov.get("orders", (6, 8, 10)))
    n = int(ov.get("n", 1000))
    dims = int(ov.get("dims", 2))

    def one_rep(rep):
        rows = []
        X = generate("uniform_cube", n, derive_seed(seed, rep, 0), dims=dims)
        Y = generate("uniform_cube", n, derive_seed(seed, rep, 1), dims=dims)
        for order in orders:
            val, t = _timed(lambda: hcp_distance(X, Y, HcpParams(order=order)).value)
            rows.append(_row(name, "order", order, rep, "hcp", val, t))
        return rows

    return one_rep, replications or 10, []


def _exp_subspace_recovery(name, seed, replications, **ov):
    dims = int(ov.get("dims", 30))
    qstar = int(ov.get("qstar", 2))
    subdims = tuple(ov.get("subdims", (1, 2, 3)))
    n = int(ov.get("n", 250))

    def one_rep(rep):
        rows = []
        X = generate("uniform_cube", n, derive_seed(seed, rep, 0), dims=dims, low=-1.0, high=1.0)
        Y = generate("fragmented_hypercube", n, derive_seed(seed, rep, 1), dims=dims, qstar=qstar)
        for q in subdims:
            val, t = _timed(lambda: prhcp(X, Y, subdim=q).value)
            rows.append(_row(name, "subdim", q, rep, "prhcp", val, t))
        return rows

    return one_rep, replications or 20, []


def _exp_runtime_scaling(name, seed, replications, **ov):
    sizes = tuple(ov.get("sizes", (10_000, 20_000, 40_000, 80_000)))
    dims = int(ov.get("dims", 4))
    order = int(ov.get("order", 16))
    runs = int(replications or ov.get("runs", 5))
    sw_projections = int(ov.get("sw_projections", 10))

    # timing experiment: one task produces all raw rows sequentially
    # (shared clouds per size, one warm-up run before timing)
    def all_runs(_):
        rows = []
        for ni, n in enumerate(sizes):
            X = generate("uniform_cube", n, derive_seed(seed, ni, 0), dims=dims)
            Y = generate("uniform_cube", n, derive_seed(seed, ni, 1), dims=dims)
            params = HcpParams(order=order)
            hcp_distance(X, Y, params)  # warm-up
            for run in range(runs):
                _, t = _timed(lambda: hcp_distance(X, Y, params).value)
                rows.append(_row(name, "n", n, run, "hcp_seconds", t, t))
            _, t_sw = _timed(
                lambda: sliced_wasserstein(X, Y, n_projections=sw_projections, seed=seed).value
            )
            rows.append(_row(name, "n", n, 0, "sw_seconds", t_sw, t_sw))
        return rows

    def fit(rows):
        medians = {}
        for row in rows:
            if row["metric"] == "hcp_seconds" and isinstance(row["replication"], int):
                medians.setdefault(row["param_value"], []).append(float(row["value"]))
        out = []
        ordered = [n for n in sizes if n in medians]
        med = [float(np.median(medians[n])) for n in ordered]
        for prev, nxt, n in zip(med, med[1:], ordered[1:]):
            out.append(_row(name, "n", n, "fit", "median_ratio", nxt / prev))
        return out

    return all_runs, 1, [fit]


def _exp_flow(name, seed, replications, **ov):
    target = ov.get("target", "gauss25")
    metrics = tuple(ov.get("metrics", ("hcp", "sw")))
    particles = int(ov.get("particles", 500))
    iters = int(ov.get("iters", 150))
    lr = float(ov.get("lr", 0.01))

    def one_rep(rep):
        rows = []
        for metric in metrics:
            config = FlowConfig(
                metric=metric,
                lr=lr,
                iters=iters,
                n_particles=particles,
                seed=derive_seed(seed, rep),
                log_every=max(iters, 1),
                keep_snapshots=False,
            )
            start = time.perf_counter()
            traj = run_flow(config, target)
            elapsed = time.perf_counter() - start
            w2 = traj.exact_w2()
            rows.append(_row(name, "metric", metric, rep, "initial_w2", float(w2[0])))
            rows.append(_row(name, "metric", metric, rep, "final_w2", float(w2[-1]), elapsed))
            rows.append(_row(name, "metric", metric, rep, "final_loss", float(traj.losses()[-1])))
        return rows

    return one_rep, replications or 20, []


_EXPERIMENTS = {
    "fig1_offset": _exp_fig1_offset,
    "highdim_theta": _exp_highdim_theta,
    "rate_curve": _exp_rate_curve,
    "k_sensitivity": _exp_k_sensitivity,
    "subspace_recovery": _exp_subspace_recovery,
    "runtime_scaling": _exp_runtime_scaling,
    "flow": _exp_flow,
}


def run_experiment(spec: ExperimentSpec) -> Path:
    """Run an experiment and write `<name>.csv` into the output directory."""
    build = _EXPERIMENTS[spec.name]
    worker, replications, fits = build(spec.name, spec.seed, spec.replications, **spec.overrides)
    rows = _run_replications(worker, replications, spec.threads)
    rows += aggregate_rows(rows)
    for fit in fits:
        rows += fit(rows)
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{spec.name}.csv"
    write_rows_csv(path, rows)
    return path


def write_gnuplot_script(csv_path, script_path) -> None:
    """Plain-text gnuplot script plotting the mean rows of an experiment CSV,
    one series per metric."""
    csv_path = Path(csv_path)
    metrics = []
    for row in read_rows_csv(csv_path):
        if row["replication"] == "mean" and row["metric"] not in metrics:
            metrics.append(row["metric"])
    series = ", \\\n     ".join(
        f"'< grep \",mean,{m},\" {csv_path}' using 3:6 with linespoints title '{m}'"
        for m in metrics
    )
    lines = [
        f"# gnuplot script for {csv_path.name}",
        "set datafile separator ','",
        "set key outside",
        "set xlabel 'param_value'",
        "set ylabel 'mean value'",
        f"plot {series}",
    ]
    Path(script_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
