"""Benchmark harness comparing the compiled and pure-Python kernel backends.

Times the full distance computation plus its two hot kernels (curve
encoding, north-west sweep) per backend; median of `runs` after one
warm-up.  Written as CSV with columns backend,n,dims,order,op,seconds,runs.
"""

import csv
import time
from pathlib import Path

import numpy as np

from . import _kernels
from .cloud import bounding_box, default_order, quantize
from .errors import ParameterError
from .experiments import generate
from .hcp import HcpParams, hcp_distance
from .hilbert import CurveParams
from .sampling import derive_seed

BENCH_COLUMNS = ("backend", "n", "dims", "order", "op", "seconds", "runs")


def _median_time(fn, runs: int) -> float:
    fn()  # warm-up
    times = []
    for _ in range(runs):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return float(np.median(times))


def run_benchmark(
    sizes,
    dims: int = 2,
    order: int | None = None,
    seed: int = 0,
    runs: int = 3,
    backends=None,
) -> list:
    """Benchmark rows for each (backend, size)."""
    if not sizes:
        raise ParameterError("need at least one size to benchmark")
    backends = tuple(backends or _kernels.available_backends())
    for name in backends:
        _kernels.resolve(name)  # validate early
    rows = []
    for n in sizes:
        X = generate("uniform_cube", int(n), derive_seed(seed, int(n), 0), dims=dims)
        Y = generate("uniform_cube", int(n), derive_seed(seed, int(n), 1), dims=dims)
        k = order or default_order(X.n, Y.n, dims)
        cells = quantize(X.points, bounding_box(X), k)
        a = np.full(X.n, 1.0 / X.n)
        b = np.full(Y.n, 1.0 / Y.n)
        for backend in backends:
            kern = _kernels.resolve(backend)
            params = CurveParams(dims, k)
            ops = {
                "hcp_distance": lambda: hcp_distance(
                    X, Y, HcpParams(order=k), backend=backend
                ),
                "encode_cells": lambda: kern.encode_cells(cells, params.order),
                "northwest": lambda: kern.northwest(a, b),
            }
            for op, fn in ops.items():
                rows.append(
                    {
                        "backend": backend,
                        "n": int(n),
                        "dims": dims,
                        "order": k,
                        "op": op,
                        "seconds": _median_time(fn, runs),
                        "runs": runs,
                    }
                )
    return rows


def write_benchmark_csv(path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def run_and_write(sizes, dims, out_dir=".", **kwargs) -> Path:
    rows = run_benchmark(sizes, dims, **kwargs)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "bench.csv"
    write_benchmark_csv(path, rows)
    return path
