"""Command-line front-end.

Subcommands:
  run          one method, full repetition protocol, report files
  ablate       one ablation variant under the same protocol
  sweep        grid over eta/theta, lambda, or ensemble size
  pool gen     generate and save a base-clustering pool
  pool sample  draw an ensemble from a saved pool
  bench        export a bundled synthetic benchmark as CSV
"""

from __future__ import annotations

import argparse
import sys

from . import datasets
from .basegen import KMeansConfig, derive_seed, generate_pool, sample_ensemble
from .core import load_dataset, load_pool, save_pool
from .errors import CoassocError
from .pipeline import (
    ABLATIONS,
    METHODS,
    RunConfig,
    emit_report,
    emit_sweep,
    run_ablation,
    run_pipeline,
    run_sweep,
)
from .solver import SolverConfig


def _add_run_options(p: argparse.ArgumentParser):
    p.add_argument("--dataset", required=True,
                   help="CSV path, or bench:<name> for a bundled benchmark")
    p.add_argument("--method", default="sdgca", choices=METHODS)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--ensemble-size", type=int, default=20)
    p.add_argument("--pool-size", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output directory for report files")
    p.add_argument("--lambda", dest="lam", type=float, default=0.08)
    p.add_argument("--eta", type=float, default=0.8)
    p.add_argument("--theta", type=float, default=0.8)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--k-steps", type=int, default=20)
    p.add_argument("--k", type=int, default=None,
                   help="consensus cluster count (default: ground-truth class count)")
    p.add_argument("--linkage", default="average", choices=("average", "single", "complete"))
    p.add_argument("--weight-method", default=None, choices=("uniform", "eci", "nee"),
                   help="override the cluster-weighting method")
    p.add_argument("--no-standardize", action="store_true",
                   help="skip per-feature z-scoring before k-means")
    p.add_argument("--pool", default=None, help="use a saved pool file instead of generating")
    p.add_argument("--no-label-last", action="store_true",
                   help="dataset CSV has no trailing label column")
    p.add_argument("--header", action="store_true", help="dataset CSV has a header row")
    p.add_argument("--format", default="tsv", choices=("tsv", "json-lines"))
    p.add_argument("--traces", action="store_true", help="dump per-repetition solver traces")
    p.add_argument("--solver-eps", type=float, default=1e-3)
    p.add_argument("--solver-max-iters", type=int, default=200)
    p.add_argument("--solver-rho", type=float, default=1.1)


def _config_from_args(args) -> RunConfig:
    solver_cfg = SolverConfig(
        rho=args.solver_rho,
        epsilon=args.solver_eps,
        max_iters=args.solver_max_iters,
    )
    return RunConfig(
        dataset=args.dataset,
        method=args.method,
        lam=args.lam,
        eta=args.eta,
        theta=args.theta,
        tau=args.tau,
        beta=args.beta,
        k_steps=args.k_steps,
        solver=solver_cfg,
        repetitions=args.reps,
        ensemble_size=args.ensemble_size,
        pool_size=args.pool_size,
        seed=args.seed,
        out_dir=args.out,
        linkage=args.linkage,
        standardize=not args.no_standardize,
        n_clusters=args.k,
        weight_method=args.weight_method,
        pool_path=args.pool,
        label_last=not args.no_label_last,
        header=args.header,
        dump_traces=args.traces,
    )


def _print_report(report):
    print(f"dataset={report.dataset_name} mode={report.mode} reps={len(report.rows)}")
    for metric in ("nmi", "ari", "f"):
        print(f"  {metric}: {report.mean(metric):.4f} +/- {report.std(metric):.4f}")


def _cmd_run(args) -> int:
    cfg = _config_from_args(args)
    report = run_pipeline(cfg)
    _print_report(report)
    if args.out:
        for path in emit_report(report, args.out, fmt=args.format):
            print(f"  wrote {path}")
    return 0


def _cmd_ablate(args) -> int:
    cfg = _config_from_args(args)
    report = run_ablation(cfg, args.variant)
    _print_report(report)
    if args.out:
        for path in emit_report(report, args.out, fmt=args.format):
            print(f"  wrote {path}")
    return 0


def _parse_values(raw: str, cast):
    return [cast(tok) for tok in raw.split(",") if tok.strip()]


def _cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    grid = {}
    if args.etas:
        grid["eta"] = _parse_values(args.etas, float)
    if args.thetas:
        grid["theta"] = _parse_values(args.thetas, float)
    if args.lambdas:
        grid["lam"] = _parse_values(args.lambdas, float)
    if args.ensemble_sizes:
        grid["ensemble_size"] = _parse_values(args.ensemble_sizes, int)
    rows = run_sweep(cfg, grid)
    for row in rows:
        print(row)
    if args.out:
        path = emit_sweep(rows, args.out, name=args.name)
        print(f"wrote {path}")
    return 0


def _cmd_pool_gen(args) -> int:
    if args.dataset.startswith("bench:"):
        dataset = datasets.benchmark(args.dataset.split(":", 1)[1])
    else:
        dataset = load_dataset(args.dataset, label_last=not args.no_label_last,
                               header=args.header)
    cfg = KMeansConfig(
        seed=derive_seed(args.seed, 10),
        k_min=args.k_min,
        k_max=args.k_max,
        standardize=not args.no_standardize,
    )
    pool = generate_pool(dataset, args.count, cfg)
    save_pool(pool, args.out)
    print(f"wrote pool of {pool.m} partitions over n={pool.n} to {args.out}")
    return 0


def _cmd_pool_sample(args) -> int:
    pool = load_pool(args.pool)
    sub = sample_ensemble(pool, args.m, args.seed)
    save_pool(sub, args.out)
    print(f"wrote ensemble of {sub.m} partitions to {args.out}")
    return 0


def _cmd_bench(args) -> int:
    dataset = datasets.benchmark(args.name)
    datasets.write_csv(dataset, args.out)
    print(f"wrote {dataset.name}: n={dataset.n} d={dataset.d} "
          f"classes={dataset.n_classes} to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coassoc", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one method over the repetition protocol")
    _add_run_options(p_run)
    p_run.set_defaults(fn=_cmd_run)

    p_ablate = sub.add_parser("ablate", help="run one ablation variant")
    _add_run_options(p_ablate)
    p_ablate.add_argument("--variant", required=True, choices=ABLATIONS)
    p_ablate.set_defaults(fn=_cmd_ablate)

    p_sweep = sub.add_parser("sweep", help="grid sweep over hyperparameters")
    _add_run_options(p_sweep)
    p_sweep.add_argument("--etas", default=None, help="comma-separated eta values")
    p_sweep.add_argument("--thetas", default=None, help="comma-separated theta values")
    p_sweep.add_argument("--lambdas", default=None, help="comma-separated lambda values")
    p_sweep.add_argument("--ensemble-sizes", default=None,
                         help="comma-separated ensemble sizes")
    p_sweep.add_argument("--name", default="sweep", help="output table name")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_pool = sub.add_parser("pool", help="pool persistence utilities")
    pool_sub = p_pool.add_subparsers(dest="pool_command", required=True)

    p_gen = pool_sub.add_parser("gen", help="generate a base-clustering pool")
    p_gen.add_argument("--dataset", required=True)
    p_gen.add_argument("--count", type=int, default=100)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--k-min", type=int, default=2)
    p_gen.add_argument("--k-max", type=int, default=None)
    p_gen.add_argument("--no-standardize", action="store_true")
    p_gen.add_argument("--no-label-last", action="store_true")
    p_gen.add_argument("--header", action="store_true")
    p_gen.set_defaults(fn=_cmd_pool_gen)

    p_sample = pool_sub.add_parser("sample", help="sample an ensemble from a pool")
    p_sample.add_argument("--pool", required=True)
    p_sample.add_argument("--m", type=int, default=20)
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument("--out", required=True)
    p_sample.set_defaults(fn=_cmd_pool_sample)

    p_bench = sub.add_parser("bench", help="export a bundled synthetic benchmark")
    p_bench.add_argument("--name", required=True, choices=sorted(datasets.BENCHMARKS))
    p_bench.add_argument("--out", required=True)
    p_bench.set_defaults(fn=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CoassocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
