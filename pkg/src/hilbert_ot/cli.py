"""Command-line interface.

Subcommands: ``dist`` (distance between two point-cloud CSV files),
``flow`` (particle gradient flow to a target), ``experiment`` (desk-scale
experiment runner writing CSV), ``bench`` (kernel backend benchmark).

Exit codes: 0 success, 2 invalid input, 3 parameter error, 4 I/O error.
``HILBERT_OT_SEED`` overrides the default seed when ``--seed`` is absent.
"""

import argparse
import ast
import os
import sys
from pathlib import Path

from . import __version__, benchmarks
from .baselines import exact_wasserstein, sliced_wasserstein
from .cloud import read_cloud_csv, write_cloud_csv
from .errors import InvalidInputError, ParameterError
from .experiments import EXPERIMENT_NAMES, ExperimentSpec, run_experiment, write_gnuplot_script
from .flows import FlowConfig, run_flow
from .hcp import HcpParams, hcp_distance
from .subspace import iprhcp, prhcp

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_PARAMETER = 3
EXIT_IO = 4


def default_seed() -> int:
    raw = os.environ.get("HILBERT_OT_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise ParameterError(f"HILBERT_OT_SEED must be an integer, got {raw!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hilbert-ot",
        description="Hilbert curve projection distances between weighted point clouds",
    )
    parser.add_argument("--version", action="version", version=f"hilbert-ot {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    dist = sub.add_parser("dist", help="distance between two point-cloud CSV files")
    dist.add_argument("--metric", required=True, choices=["hcp", "iprhcp", "prhcp", "sw", "wass"])
    dist.add_argument("--x", required=True, metavar="FILE")
    dist.add_argument("--y", required=True, metavar="FILE")
    dist.add_argument("--p", type=float, default=2.0, help="cost order (default 2)")
    dist.add_argument("--order", type=int, default=None, help="curve order k")
    dist.add_argument("--subdim", type=int, default=2, help="projection dimension q")
    dist.add_argument("--projections", type=int, default=100, help="Monte Carlo frames")
    dist.add_argument("--seed", type=int, default=None)
    dist.add_argument("--domain", choices=["percloud", "shared", "unitcube"], default="percloud")
    dist.add_argument("--coupling", metavar="OUT.csv", help="write the transport plan here")
    dist.add_argument("--json", action="store_true", help="emit the report as JSON on stdout")
    dist.add_argument(
        "--weighted", action="store_true", help="treat the last CSV column as weights"
    )

    flow = sub.add_parser("flow", help="particle gradient flow toward a target")
    flow.add_argument("--metric", required=True, choices=["hcp", "sw"])
    flow.add_argument("--target", required=True, help="gauss25|swissroll|circle|FILE")
    flow.add_argument("--particles", type=int, default=500)
    flow.add_argument("--lr", type=float, default=0.01)
    flow.add_argument("--iters", type=int, default=150)
    flow.add_argument("--seed", type=int, default=None)
    flow.add_argument("--out", default="flow_out", metavar="DIR")
    flow.add_argument("--log-every", type=int, default=10)
    flow.add_argument("--no-eval", action="store_true", help="skip exact W2 evaluation")

    exp = sub.add_parser("experiment", help="run a bundled experiment, write CSV")
    exp.add_argument("--name", required=True, choices=list(EXPERIMENT_NAMES))
    exp.add_argument("--seed", type=int, default=None)
    exp.add_argument("--replications", type=int, default=None)
    exp.add_argument("--out", default=".", metavar="DIR")
    exp.add_argument("--threads", type=int, default=1)
    exp.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="key=value",
        help="override an experiment parameter (repeatable)",
    )
    exp.add_argument("--gnuplot-script", metavar="FILE", help="also emit a gnuplot script")

    bench = sub.add_parser("bench", help="benchmark kernel backends")
    bench.add_argument("--sizes", required=True, help="comma-separated sample sizes")
    bench.add_argument("--dim", required=True, type=int)
    bench.add_argument("--seed", type=int, default=None)
    bench.add_argument("--out", default=".", metavar="DIR")
    bench.add_argument("--order", type=int, default=None)
    bench.add_argument("--runs", type=int, default=3)
    bench.add_argument("--backends", default=None, help="comma-separated backend names")
    return parser


def _parse_overrides(pairs) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise InvalidInputError(f"--set expects key=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        try:
            out[key] = ast.literal_eval(raw)
        except (ValueError, SyntaxError):
            out[key] = raw
    return out


def _cmd_dist(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    X = read_cloud_csv(args.x, weighted=args.weighted)
    Y = read_cloud_csv(args.y, weighted=args.weighted)
    if args.metric == "hcp":
        report = hcp_distance(X, Y, HcpParams(p=args.p, order=args.order, domain=args.domain))
    elif args.metric == "wass":
        report = exact_wasserstein(X, Y, p=args.p)
    elif args.metric == "sw":
        report = sliced_wasserstein(X, Y, p=args.p, n_projections=args.projections, seed=seed)
    elif args.metric == "iprhcp":
        report = iprhcp(
            X, Y, p=args.p, subdim=args.subdim, n_projections=args.projections,
            seed=seed, order=args.order,
        )
    else:
        report = prhcp(X, Y, p=args.p, subdim=args.subdim, order=args.order)
    if args.coupling:
        if report.coupling is None:
            raise InvalidInputError(f"metric {args.metric} does not produce a coupling")
        with open(args.coupling, "w", encoding="utf-8") as fh:
            fh.write("i,j,mass\n")
            for i, j, m in zip(
                report.coupling.source, report.coupling.target, report.coupling.mass
            ):
                fh.write(f"{int(i)},{int(j)},{float(m)!r}\n")
    if args.json:
        print(report.to_json())
    else:
        print(f"{report.metric} distance: {report.value!r} (elapsed {report.elapsed:.4f} s)")
    return EXIT_OK


def _cmd_flow(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    config = FlowConfig(
        metric=args.metric,
        lr=args.lr,
        iters=args.iters,
        n_particles=args.particles,
        seed=seed,
        log_every=args.log_every,
        eval_exact=not args.no_eval,
    )
    target = args.target
    if target not in ("gauss25", "swissroll", "circle"):
        target = read_cloud_csv(target)
    traj = run_flow(config, target)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    traj.to_csv(out / "trajectory.csv")
    for record in traj.records:
        if record.positions is not None:
            from .cloud import WeightedPointCloud

            write_cloud_csv(
                out / f"snapshot_{record.iteration:06d}.csv",
                WeightedPointCloud.uniform(record.positions),
            )
    final = traj.final()
    print(
        f"flow {args.metric} -> {args.target}: final loss {final.loss!r}, "
        f"final exact W2 {final.exact_w2!r} ({out / 'trajectory.csv'})"
    )
    return EXIT_OK


def _cmd_experiment(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    spec = ExperimentSpec(
        name=args.name,
        seed=seed,
        replications=args.replications,
        out_dir=args.out,
        threads=args.threads,
        overrides=_parse_overrides(args.set),
    )
    path = run_experiment(spec)
    if args.gnuplot_script:
        write_gnuplot_script(path, args.gnuplot_script)
    print(f"experiment {args.name}: wrote {path}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    try:
        sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip()]
    except ValueError as exc:
        raise InvalidInputError(f"--sizes must be comma-separated integers: {exc}") from exc
    backends = args.backends.split(",") if args.backends else None
    path = benchmarks.run_and_write(
        sizes, args.dim, out_dir=args.out, order=args.order, seed=seed,
        runs=args.runs, backends=backends,
    )
    print(f"benchmark: wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "dist": _cmd_dist,
    "flow": _cmd_flow,
    "experiment": _cmd_experiment,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
