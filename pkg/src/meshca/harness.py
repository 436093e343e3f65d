"""Experiment harness: seeded scenario sweeps, the exhaustive-search
oracle, metric CSV emission, and evaluation of externally supplied
assignment files.

Every sweep row is reproducible on its own: the ``seed`` column is the
integer that regenerates the row's topology, and the GA for that row is
seeded with ``seed + 1``. Replicates may run in a process pool; rows are
written in deterministic (scenario, seed, algorithm) order regardless of
completion order.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .assignment import (
    ChannelAssignment,
    OverlapMatrix,
    load_assignment,
    overlap_for_config,
)
from .config import GaConfig, RadioModel, ScenarioConfig
from .errors import InconsistentInputs, InvalidConfig, SearchSpaceTooLarge
from .fitness import (
    FitnessReport,
    NetworkMetrics,
    _batch_link_fairness,
    fairness_fitness,
    jain_index,
    network_metrics,
)
from .ga import ALGORITHMS, GaResult, run
from .topology import ConflictGraph, Topology, build_conflict_graph, load_topology

RESULTS_HEADER = [
    "scenario", "seed", "algorithm", "links", "nc_raw", "nc_norm", "fni",
    "mean_link_cap", "mean_link_intf", "mean_link_fair", "fairness_index",
    "iterations", "wall_ms",
]
AGGREGATES_HEADER = [
    "scenario", "algorithm", "replicates", "links", "nc_raw", "nc_norm",
    "fni", "mean_link_cap", "mean_link_intf", "mean_link_fair",
    "fairness_index", "iterations",
]
# aggregate column feeding each figure-style data file
FIGURE_SERIES = {
    "fig05_network_capacity": "nc_norm",
    "fig06_link_capacity": "mean_link_cap",
    "fig07_link_interference": "mean_link_intf",
    "fig08_fni": "fni",
    "fig09_link_fairness": "mean_link_fair",
    "fig11_iterations": "iterations",
}

GA_SEED_OFFSET = 1


@dataclass
class MetricsRecord:
    """One results row: all evaluation metrics for one (scenario,
    replicate, algorithm) run."""

    scenario: str
    seed: int
    algorithm: str
    links: int
    nc_raw: float
    nc_norm: float
    fni: float
    mean_link_cap: float
    mean_link_intf: float
    mean_link_fair: float
    fairness_index: float
    iterations: int
    wall_ms: float

    def to_csv_row(self) -> list[str]:
        return [
            self.scenario, str(self.seed), self.algorithm, str(self.links),
            repr(self.nc_raw), repr(self.nc_norm), repr(self.fni),
            repr(self.mean_link_cap), repr(self.mean_link_intf),
            repr(self.mean_link_fair), repr(self.fairness_index),
            str(self.iterations), repr(self.wall_ms),
        ]

    @classmethod
    def from_csv_row(cls, row: list[str]) -> "MetricsRecord":
        return cls(
            scenario=row[0], seed=int(row[1]), algorithm=row[2],
            links=int(row[3]), nc_raw=float(row[4]), nc_norm=float(row[5]),
            fni=float(row[6]), mean_link_cap=float(row[7]),
            mean_link_intf=float(row[8]), mean_link_fair=float(row[9]),
            fairness_index=float(row[10]), iterations=int(row[11]),
            wall_ms=float(row[12]),
        )


def build_record(scenario: str, seed: int, algorithm: str, t: Topology,
                 report: FitnessReport, metrics: NetworkMetrics,
                 iterations: int, wall_ms: float) -> MetricsRecord:
    return MetricsRecord(
        scenario=scenario,
        seed=seed,
        algorithm=algorithm,
        links=t.link_count,
        nc_raw=metrics.nc_raw,
        nc_norm=metrics.nc_norm,
        fni=metrics.fni,
        mean_link_cap=float(metrics.link_capacity.mean()),
        mean_link_intf=float(report.interference.mean()),
        mean_link_fair=float(report.link_fairness.mean()),
        fairness_index=report.fairness_index,
        iterations=iterations,
        wall_ms=wall_ms,
    )


def replicate_seed(master_seed: int, scenario_index: int,
                   replicate_index: int) -> int:
    """Deterministic per-replicate seed; also the value recorded in the
    results CSV, so any row can be regenerated standalone."""
    ss = np.random.SeedSequence(entropy=master_seed,
                                spawn_key=(scenario_index, replicate_index))
    return int(ss.generate_state(1, np.uint64)[0])


def run_replicate(config: ScenarioConfig, seed: int, algorithms: list[str],
                  ga: GaConfig) -> list[tuple[MetricsRecord, GaResult]]:
    """Generate one topology and run each algorithm on it."""
    from .topology import generate_topology

    t = generate_topology(config, seed)
    cg = build_conflict_graph(t)
    m = overlap_for_config(config)
    out = []
    for algorithm in algorithms:
        start = time.perf_counter()
        result = run(algorithm, t, cg, m, config.radio_model, ga,
                     seed=seed + GA_SEED_OFFSET)
        wall_ms = (time.perf_counter() - start) * 1000.0
        metrics = network_metrics(result.best.assignment, t, cg, m)
        record = build_record(config.name, seed, algorithm, t,
                              result.best.report, metrics,
                              result.iterations, wall_ms)
        out.append((record, result))
    return out


def _sweep_job(args) -> list[MetricsRecord]:
    config, seed, algorithms, ga = args
    return [rec for rec, _ in run_replicate(config, seed, algorithms, ga)]


def write_results_csv(records: list[MetricsRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RESULTS_HEADER)
        for rec in records:
            w.writerow(rec.to_csv_row())


def read_results_csv(path: str | Path) -> list[MetricsRecord]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != RESULTS_HEADER:
            raise InconsistentInputs(f"unexpected results header in {path}")
        return [MetricsRecord.from_csv_row(row) for row in reader]


def aggregate_records(records: list[MetricsRecord]) -> list[dict]:
    """Mean over replicates per (scenario, algorithm), in first-seen
    scenario order then algorithm order."""
    groups: dict[tuple[str, str], list[MetricsRecord]] = {}
    order: list[tuple[str, str]] = []
    for rec in records:
        key = (rec.scenario, rec.algorithm)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(rec)
    rows = []
    for scenario, algorithm in order:
        grp = groups[(scenario, algorithm)]
        rows.append({
            "scenario": scenario,
            "algorithm": algorithm,
            "replicates": len(grp),
            "links": float(np.mean([r.links for r in grp])),
            "nc_raw": float(np.mean([r.nc_raw for r in grp])),
            "nc_norm": float(np.mean([r.nc_norm for r in grp])),
            "fni": float(np.mean([r.fni for r in grp])),
            "mean_link_cap": float(np.mean([r.mean_link_cap for r in grp])),
            "mean_link_intf": float(np.mean([r.mean_link_intf for r in grp])),
            "mean_link_fair": float(np.mean([r.mean_link_fair for r in grp])),
            "fairness_index": float(np.mean([r.fairness_index for r in grp])),
            "iterations": float(np.mean([r.iterations for r in grp])),
        })
    return rows


def write_aggregates_csv(rows: list[dict], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(AGGREGATES_HEADER)
        for row in rows:
            w.writerow([
                row["scenario"], row["algorithm"], row["replicates"],
                repr(row["links"]), repr(row["nc_raw"]), repr(row["nc_norm"]),
                repr(row["fni"]), repr(row["mean_link_cap"]),
                repr(row["mean_link_intf"]), repr(row["mean_link_fair"]),
                repr(row["fairness_index"]), repr(row["iterations"]),
            ])


def write_figure_data(rows: list[dict], out_dir: str | Path) -> list[Path]:
    """One gnuplot-style data file per figure series: links on the x
    axis, one column per algorithm, one row per scenario."""
    out_dir = Path(out_dir)
    scenarios: list[str] = []
    algorithms: list[str] = []
    for row in rows:
        if row["scenario"] not in scenarios:
            scenarios.append(row["scenario"])
        if row["algorithm"] not in algorithms:
            algorithms.append(row["algorithm"])
    by_key = {(r["scenario"], r["algorithm"]): r for r in rows}
    written = []
    for name, column in FIGURE_SERIES.items():
        path = out_dir / f"{name}.dat"
        with open(path, "w") as fh:
            fh.write(f"# {name}: {column} vs links\n")
            fh.write("# links " + " ".join(algorithms) + "\n")
            for scenario in scenarios:
                cells = []
                links = None
                for algorithm in algorithms:
                    row = by_key.get((scenario, algorithm))
                    links = row["links"] if row else links
                    cells.append(repr(row[column]) if row else "nan")
                fh.write(f"{links!r} " + " ".join(cells) + "\n")
        written.append(path)
    return written


def run_sweep(scenarios: list[ScenarioConfig], algorithms: list[str],
              out_dir: str | Path, ga: GaConfig | None = None,
              workers: int = 1) -> list[MetricsRecord]:
    """Run every scenario x replicate x algorithm combination.

    Writes ``results.csv`` (one row per run, flushed scenario by scenario
    as results arrive), ``aggregates.csv`` (one row per scenario and
    algorithm, metrics averaged over replicates), and the per-figure
    ``.dat`` series. Returns the result records in file order.
    """
    ga = ga or GaConfig()
    ga.validate()
    for s in scenarios:
        s.validate()
    for algorithm in algorithms:
        if algorithm not in ALGORITHMS:
            raise InvalidConfig(f"unknown algorithm {algorithm!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    jobs = []
    job_meta = []  # (scenario_index, replicate_index)
    for s_idx, scenario in enumerate(scenarios):
        for r_idx in range(scenario.topologies_per_scenario):
            seed = replicate_seed(scenario.master_seed, s_idx, r_idx)
            jobs.append((scenario, seed, list(algorithms), ga))
            job_meta.append((s_idx, r_idx))

    results: dict[int, list[MetricsRecord]] = {}
    records: list[MetricsRecord] = []
    results_path = out_dir / "results.csv"
    with open(results_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULTS_HEADER)
        flushed_jobs = 0

        def flush_ready():
            nonlocal flushed_jobs
            # flush whole scenarios once all their replicates are in, so
            # file order is deterministic while results stream in
            while flushed_jobs < len(jobs):
                s_idx = job_meta[flushed_jobs][0]
                span = [j for j, (s, _) in enumerate(job_meta) if s == s_idx]
                if not all(j in results for j in span):
                    break
                scenario_rows = [rec for j in span for rec in results[j]]
                scenario_rows.sort(
                    key=lambda r: (r.seed, algorithms.index(r.algorithm))
                )
                for rec in scenario_rows:
                    writer.writerow(rec.to_csv_row())
                    records.append(rec)
                fh.flush()
                flushed_jobs = span[-1] + 1

        if workers <= 1:
            for j, job in enumerate(jobs):
                results[j] = _sweep_job(job)
                flush_ready()
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = {pool.submit(_sweep_job, job): j
                           for j, job in enumerate(jobs)}
                for future in as_completed(futures):
                    results[futures[future]] = future.result()
                    flush_ready()

    rows = aggregate_records(records)
    write_aggregates_csv(rows, out_dir / "aggregates.csv")
    write_figure_data(rows, out_dir)
    return records


def write_history_csv(result: GaResult, path: str | Path) -> None:
    """Per-generation convergence rows (generation, best, mean, sigma)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["generation", "best", "mean", "sigma"])
        for row in result.history:
            w.writerow([row.generation, repr(row.best), repr(row.mean),
                        repr(row.sigma)])


# ---------------------------------------------------------------------------
# exhaustive oracle

SEARCH_GUARD = 10 ** 7
_CHUNK = 1 << 15


@dataclass
class OracleResult:
    assignment: ChannelAssignment
    fitness: float
    candidates: int
    feasible: int


def brute_force_optimum(t: Topology, cg: ConflictGraph, m: OverlapMatrix,
                        rm: RadioModel, channels: int,
                        fitness_kind: str = "fairness") -> OracleResult:
    """Enumerate every radio-feasible assignment and return the exact
    optimum (first in lexicographic gene order on ties).

    Fitness is the fairness index, or minus the total interference for
    ``fitness_kind="interference"``, matching the GA's maximization
    interface.

    Raises
    ------
    SearchSpaceTooLarge
        If ``channels ** link_count`` exceeds the 10^7 guard.
    """
    if fitness_kind not in ("fairness", "interference"):
        raise InvalidConfig(f"unknown fitness_kind {fitness_kind!r}")
    L = t.link_count
    total = channels ** L
    if total > SEARCH_GUARD:
        raise SearchSpaceTooLarge(
            f"{channels}^{L} = {total} assignments exceeds the "
            f"{SEARCH_GUARD} guard"
        )
    # nodes that could possibly exceed their budget
    constrained = [
        (v, int(t.radios[v]), np.array(t.incident_links[v]))
        for v in range(t.node_count)
        if len(t.incident_links[v]) > t.radios[v] and channels > t.radios[v]
    ]
    weights = channels ** np.arange(L - 1, -1, -1, dtype=np.int64)
    best_fitness = -np.inf
    best_genes = None
    feasible_total = 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        genes = (idx[:, None] // weights[None, :]) % channels
        ok = np.ones(len(idx), dtype=bool)
        for _, radios, incident in constrained:
            sub = np.sort(genes[:, incident], axis=1)
            distinct = 1 + np.count_nonzero(np.diff(sub, axis=1), axis=1)
            ok &= distinct <= radios
        if not ok.any():
            continue
        genes = genes[ok]
        feasible_total += len(genes)
        interference, _, _, fairness = _batch_link_fairness(genes, t, cg, m, rm)
        if fitness_kind == "fairness":
            # same max-normalized evaluation as jain_index, row-wise
            norm = fairness / fairness.max(axis=1, keepdims=True)
            s1 = norm.sum(axis=1)
            s2 = (norm * norm).sum(axis=1)
            values = s1 * s1 / (L * s2)
        else:
            values = -interference.sum(axis=1)
        i = int(np.argmax(values))
        if values[i] > best_fitness:
            best_fitness = float(values[i])
            best_genes = genes[i].copy()
    if best_genes is None:
        raise SearchSpaceTooLarge("no radio-feasible assignment found")
    return OracleResult(
        assignment=ChannelAssignment(best_genes, channels),
        fitness=best_fitness,
        candidates=total,
        feasible=feasible_total,
    )


# ---------------------------------------------------------------------------
# external-file evaluation


def evaluate_file(topology_path: str | Path,
                  assignment_path: str | Path) -> MetricsRecord:
    """Recompute all metrics for an externally supplied assignment.

    The assignment must cover exactly the topology's link ids.

    Raises
    ------
    ParseError
        If either file is malformed.
    InconsistentInputs
        If the files do not describe the same set of links.
    """
    t = load_topology(topology_path)
    a, meta = load_assignment(assignment_path)
    if len(a.genes) != t.link_count:
        raise InconsistentInputs(
            f"assignment covers {len(a.genes)} links, topology has "
            f"{t.link_count}"
        )
    start = time.perf_counter()
    cg = build_conflict_graph(t)
    m = OverlapMatrix.orthogonal(a.channel_count)
    report = fairness_fitness(a, t, cg, m, t.params.radio_model)
    metrics = network_metrics(a, t, cg, m)
    wall_ms = (time.perf_counter() - start) * 1000.0
    return build_record(t.params.name, int(meta.get("seed", t.seed)),
                        meta.get("algorithm", "unknown"), t, report, metrics,
                        iterations=0, wall_ms=wall_ms)


# ---------------------------------------------------------------------------
# scenario builders


def paper_scale_scenarios(master_seed: int = 0,
                          replicates: int = 3) -> list[ScenarioConfig]:
    """Eight scenarios sized to land near the classic link counts
    (5..126) under the default geometry; node counts were calibrated
    against the generator."""
    targets = [
        ("links005", 5, 5),
        ("links016", 12, 16),
        ("links036", 27, 36),
        ("links046", 35, 46),
        ("links058", 44, 58),
        ("links078", 59, 78),
        ("links119", 89, 119),
        ("links126", 94, 126),
    ]
    out = []
    for name, nodes, _ in targets:
        out.append(ScenarioConfig(
            name=name,
            node_count=nodes,
            topologies_per_scenario=replicates,
            master_seed=master_seed,
        ))
    return out


def desk_scale_scenarios(count: int = 20, node_lo: int = 30, node_hi: int = 80,
                         master_seed: int = 7,
                         replicates: int = 1) -> list[ScenarioConfig]:
    """Desk-scale comparison scenarios with sparser conflict geometry.

    Node counts step across [node_lo, node_hi]; the area grows with the
    node count so the conflict graph stays moderately sparse (the regime
    where assignment quality separates the algorithms), and the
    interference distance sits just above the communication range.
    """
    out = []
    for i in range(count):
        nodes = node_lo + round(i * (node_hi - node_lo) / max(count - 1, 1))
        side = float(round(np.sqrt(nodes / 50.0) * 1450.0))
        out.append(ScenarioConfig(
            name=f"desk{i:02d}_n{nodes}",
            node_count=nodes,
            area_w=side,
            area_h=side,
            comm_range=252.0,
            interference_distance=300.0,
            topologies_per_scenario=replicates,
            master_seed=master_seed,
        ))
    return out
