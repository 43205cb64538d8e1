"""End-to-end experiment harness: protocol runs, ablations, sweeps.

One repetition samples an ensemble from the pool, builds the similarity
and dissimilarity evidence, refines the adjacency through the solver, and
scores the agglomerative consensus against ground truth. A run repeats
that with independent per-repetition seeds derived from one master seed
and reports per-repetition rows plus mean/std aggregates.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace, asdict
from itertools import product
from pathlib import Path

import numpy as np

from . import ca, datasets, dissim, refine, solver
from .basegen import KMeansConfig, derive_seed, generate_pool, sample_ensemble
from .core import Dataset, EnsemblePool, Partition, load_dataset, load_pool
from .errors import ConfigError
from .metrics import ari, nmi, pairwise_f

METHODS = ("eac", "lwca", "nwca", "sdgca")
ABLATIONS = ("only-s-star", "nwca-only", "no-s-manifold", "no-d-manifold", "no-both-manifold")

_WEIGHT_FOR_METHOD = {"eac": "uniform", "lwca": "eci", "nwca": "nee", "sdgca": "nee"}


@dataclass(frozen=True)
class RunConfig:
    """Everything one experiment needs, hyperparameters through seeds."""

    dataset: str
    method: str = "sdgca"
    lam: float = 0.08
    eta: float = 0.8
    theta: float = 0.8
    tau: float = 0.0
    beta: float = 1.0
    k_steps: int = 20
    solver: solver.SolverConfig = field(default_factory=solver.SolverConfig)
    repetitions: int = 20
    ensemble_size: int = 20
    pool_size: int = 100
    seed: int = 0
    out_dir: str | None = None
    linkage: str = "average"
    standardize: bool = True
    n_clusters: int | None = None
    weight_method: str | None = None
    pool_path: str | None = None
    label_last: bool = True
    header: bool = False
    dump_traces: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; choose from {METHODS}")
        for name in ("eta", "theta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ConfigError(f"{name} must lie in (0, 1), got {v}")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.ensemble_size < 1 or self.pool_size < self.ensemble_size:
            raise ConfigError("need 1 <= ensemble_size <= pool_size")


@dataclass(frozen=True)
class RepetitionResult:
    repetition: int
    seed: int
    nmi: float
    ari: float
    f: float
    solver_iterations: int = 0
    solver_converged: bool = True
    gap_s: float = 0.0
    gap_d: float = 0.0


@dataclass(frozen=True)
class RunReport:
    """Per-repetition scores plus aggregates and the config snapshot."""

    mode: str
    dataset_name: str
    rows: tuple[RepetitionResult, ...]
    config: dict

    def values(self, metric: str) -> np.ndarray:
        return np.array([getattr(r, metric) for r in self.rows])

    def mean(self, metric: str) -> float:
        return float(self.values(metric).mean())

    def std(self, metric: str) -> float:
        vals = self.values(metric)
        if vals.size < 2:
            return 0.0
        return float(vals.std(ddof=1))


def _config_snapshot(cfg: RunConfig, mode: str) -> dict:
    snap = asdict(cfg)
    snap["mode"] = mode
    return snap


def load_run_dataset(cfg: RunConfig) -> Dataset:
    """Resolve ``bench:<name>`` pseudo-paths or read a CSV from disk."""
    if cfg.dataset.startswith("bench:"):
        return datasets.benchmark(cfg.dataset.split(":", 1)[1])
    return load_dataset(cfg.dataset, label_last=cfg.label_last, header=cfg.header)


def build_run_pool(cfg: RunConfig, dataset: Dataset) -> EnsemblePool:
    """Load the cached pool if one is configured, else generate it from
    the pool sub-seed of the master seed."""
    if cfg.pool_path:
        return load_pool(cfg.pool_path)
    km = KMeansConfig(seed=derive_seed(cfg.seed, 10), standardize=cfg.standardize)
    return generate_pool(dataset, cfg.pool_size, km)


def consensus_for_ensemble(
    ensemble: EnsemblePool,
    k: int,
    mode: str,
    cfg: RunConfig,
) -> tuple[Partition, solver.SolverTrace | None]:
    """Run one method or ablation variant on an already-sampled ensemble."""
    weight_method = cfg.weight_method or _WEIGHT_FOR_METHOD.get(mode, "nee")
    if mode in ("eac", "lwca", "nwca", "nwca-only"):
        if mode == "eac" and cfg.weight_method in (None, "uniform"):
            adjacency = ca.build_ca(ensemble)
        else:
            weights = ca.cluster_weights(ensemble, weight_method, cfg.lam)
            adjacency = ca.build_weighted_ca(ensemble, weights)
        return refine.agglomerate(adjacency, k, cfg.linkage).labels, None

    a = ca.build_ca(ensemble)
    h = ca.extract_high_confidence(a, cfg.theta)
    lap = ca.laplacian(h)
    weights = ca.cluster_weights(ensemble, weight_method, cfg.lam)
    w = ca.build_weighted_ca(ensemble, weights)
    s = ca.extract_similarity(w, cfg.eta)
    graph = dissim.build_cluster_graph(ensemble, beta=cfg.beta, k_steps=cfg.k_steps)
    d = dissim.build_dissimilarity(ensemble, graph.cluster_similarity, a, cfg.tau)

    solver_cfg = cfg.solver
    if mode == "no-s-manifold":
        solver_cfg = replace(solver_cfg, use_s_manifold=False)
    elif mode == "no-d-manifold":
        solver_cfg = replace(solver_cfg, use_d_manifold=False)
    elif mode == "no-both-manifold":
        solver_cfg = replace(solver_cfg, use_s_manifold=False, use_d_manifold=False)
    s_star, d_star, trace = solver.solve(s, d, lap, solver_cfg)

    if mode == "only-s-star":
        return refine.agglomerate(s_star, k, cfg.linkage).labels, trace
    w_star = refine.refine_adjacency(w, s_star, d_star)
    return refine.agglomerate(w_star, k, cfg.linkage).labels, trace


def _run_one(args) -> RepetitionResult:
    rep, rep_seed, pool, truth_labels, k, mode, cfg, trace_path = args
    ensemble = sample_ensemble(pool, cfg.ensemble_size, rep_seed)
    labels, trace = consensus_for_ensemble(ensemble, k, mode, cfg)
    truth = Partition.from_labels(truth_labels)
    if trace is not None and trace_path:
        trace.dump(trace_path)
    return RepetitionResult(
        repetition=rep,
        seed=rep_seed,
        nmi=nmi(labels, truth),
        ari=ari(labels, truth),
        f=pairwise_f(labels, truth),
        solver_iterations=trace.iterations if trace else 0,
        solver_converged=trace.converged if trace else True,
        gap_s=trace.final.gap_s if trace else 0.0,
        gap_d=trace.final.gap_d if trace else 0.0,
    )


def _worker_count(n_tasks: int) -> int:
    raw = os.environ.get("COASSOC_THREADS", "1")
    try:
        cap = max(1, int(raw))
    except ValueError:
        raise ConfigError(f"COASSOC_THREADS must be an integer, got {raw!r}") from None
    return min(cap, n_tasks)


def _execute(cfg: RunConfig, mode: str, dataset: Dataset, pool: EnsemblePool) -> RunReport:
    k = cfg.n_clusters or dataset.n_classes
    trace_dir = Path(cfg.out_dir) if cfg.out_dir and cfg.dump_traces else None
    if trace_dir:
        trace_dir.mkdir(parents=True, exist_ok=True)
    tasks = []
    for rep in range(cfg.repetitions):
        rep_seed = derive_seed(cfg.seed, 20, rep)
        trace_path = str(trace_dir / f"trace_{mode}_rep{rep:03d}.tsv") if trace_dir else None
        tasks.append((rep, rep_seed, pool, dataset.labels, k, mode, cfg, trace_path))
    workers = _worker_count(len(tasks))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool_exec:
            rows = list(pool_exec.map(_run_one, tasks))
    else:
        rows = [_run_one(t) for t in tasks]
    rows.sort(key=lambda r: r.repetition)
    return RunReport(
        mode=mode,
        dataset_name=dataset.name,
        rows=tuple(rows),
        config=_config_snapshot(cfg, mode),
    )


def run_pipeline(cfg: RunConfig) -> RunReport:
    """Run the configured method over all repetitions and aggregate."""
    dataset = load_run_dataset(cfg)
    pool = build_run_pool(cfg, dataset)
    return _execute(cfg, cfg.method, dataset, pool)


def run_ablation(cfg: RunConfig, variant: str) -> RunReport:
    """Run one ablation variant under the same seeds as the full method."""
    if variant not in ABLATIONS:
        raise ConfigError(f"unknown ablation {variant!r}; choose from {ABLATIONS}")
    dataset = load_run_dataset(cfg)
    pool = build_run_pool(cfg, dataset)
    return _execute(cfg, variant, dataset, pool)


def run_sweep(cfg: RunConfig, grid: dict[str, list]) -> list[dict]:
    """Run one report per grid point and return flat aggregate rows.

    ``grid`` maps RunConfig field names (eta, theta, lam, ensemble_size)
    to value lists; multiple fields form the cross product.
    """
    if not grid:
        raise ConfigError("sweep grid is empty")
    for key in grid:
        if key not in ("eta", "theta", "lam", "ensemble_size"):
            raise ConfigError(f"cannot sweep over {key!r}")
    dataset = load_run_dataset(cfg)
    pool = build_run_pool(cfg, dataset)
    names = sorted(grid)
    rows = []
    for combo in product(*(grid[name] for name in names)):
        point = dict(zip(names, combo))
        cell_cfg = replace(cfg, **point)
        report = _execute(cell_cfg, cell_cfg.method, dataset, pool)
        row = dict(point)
        for metric in ("nmi", "ari", "f"):
            row[f"{metric}_mean"] = report.mean(metric)
            row[f"{metric}_std"] = report.std(metric)
        rows.append(row)
    return rows


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(report: RunReport, out_dir, fmt: str = "tsv") -> list[Path]:
    """Write the report deterministically; returns the files written.

    ``tsv`` produces one file per metric (repetition rows then one
    aggregate row); ``json-lines`` produces one object per repetition plus
    an aggregate object. A config snapshot lands next to either.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    stem = f"{report.dataset_name}_{report.mode}"
    if fmt == "tsv":
        for metric in ("nmi", "ari", "f"):
            lines = ["repetition\tseed\t" + metric]
            for r in report.rows:
                lines.append(f"{r.repetition}\t{r.seed}\t{_fmt(getattr(r, metric))}")
            lines.append(f"aggregate\tmean={_fmt(report.mean(metric))}\tstd={_fmt(report.std(metric))}")
            path = out / f"{stem}_{metric}.tsv"
            path.write_text("\n".join(lines) + "\n")
            written.append(path)
    elif fmt == "json-lines":
        lines = []
        for r in report.rows:
            payload = {
                "repetition": r.repetition,
                "seed": r.seed,
                "nmi": r.nmi,
                "ari": r.ari,
                "f": r.f,
                "solver_iterations": r.solver_iterations,
                "solver_converged": r.solver_converged,
            }
            lines.append(json.dumps(payload, sort_keys=True))
        aggregate = {"aggregate": True}
        for metric in ("nmi", "ari", "f"):
            aggregate[f"{metric}_mean"] = report.mean(metric)
            aggregate[f"{metric}_std"] = report.std(metric)
        lines.append(json.dumps(aggregate, sort_keys=True))
        path = out / f"{stem}.jsonl"
        path.write_text("\n".join(lines) + "\n")
        written.append(path)
    else:
        raise ConfigError(f"unknown report format {fmt!r}")
    config_path = out / f"{stem}_config.json"
    config_path.write_text(json.dumps(report.config, sort_keys=True, indent=2) + "\n")
    written.append(config_path)
    return written


def emit_sweep(rows: list[dict], out_dir, name: str = "sweep") -> Path:
    """Write sweep aggregates as one delimited table."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    columns = list(rows[0])
    lines = ["\t".join(columns)]
    for row in rows:
        lines.append("\t".join(_fmt(row[c]) for c in columns))
    path = out / f"{name}.tsv"
    path.write_text("\n".join(lines) + "\n")
    return path
