"""Experiment matrix runner: expansion, execution, CSV persistence, aggregation,
and plot-ready data emission.

One instance is generated per valid (rho, m, n, k) combination, with its
generation seed derived from the parameter tuple by a documented hash, so a
matrix is reproducible without storing instance files.  Each instance is
enumerated once; its objective table doubles as the PLS lookup and its exact
front feeds the quality indicators of all runs on that instance.

Records are emitted in the canonical expansion order (n, k, m, rho, config,
seed) regardless of worker count, which makes the CSV byte-reproducible.
Wall-clock time is hardware-dependent; pass record_wall_time=False to leave
the wall_ms column empty when byte-identical output across executions is
required.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from multiprocessing import get_context
from pathlib import Path

import numpy as np

from .indicators import hypervolume, mult_epsilon
from .landscape import InstanceParams, generate_instance
from .oracle import enumerate_space, is_maximal_plo_set, is_plo_set
from .pls import PlsConfig, pls_run

__all__ = [
    "CSV_HEADER",
    "ExperimentMatrix",
    "Task",
    "RunRecord",
    "TaskFailure",
    "MatrixResult",
    "SummaryRow",
    "derive_instance_seed",
    "expand_matrix",
    "matrix_instance_params",
    "run_matrix",
    "aggregate",
    "emit_plot_data",
    "write_records_csv",
    "read_records_csv",
    "FIGURE_IDS",
]

CSV_HEADER = "rho,m,n,k,archiver,mu,seed,plo_set_size,length,evaluations,hvr,epsilon,wall_ms"

MEASURES = ("plo_set_size", "length", "evaluations", "hvr", "epsilon", "wall_ms")


@dataclass(frozen=True)
class ExperimentMatrix:
    """Parameter grids plus search seeds and (archiver, mu) configurations.

    Combinations with k >= n or rho <= -1/(m-1) are skipped at expansion.
    """

    n_values: tuple[int, ...]
    k_values: tuple[int, ...]
    m_values: tuple[int, ...]
    rho_values: tuple[float, ...]
    seeds: tuple[int, ...]
    configs: tuple[tuple[str, int | None], ...]

    @classmethod
    def study_grid(cls) -> "ExperimentMatrix":
        """The full study grid: 91 instances, 20,475 runs."""
        return cls(
            n_values=(8, 16),
            k_values=(1, 2, 4, 8),
            m_values=(2, 3, 5),
            rho_values=(-0.7, -0.2, 0.0, 0.2, 0.7),
            seeds=tuple(range(1, 26)),
            configs=(
                ("unb", None),
                ("hva", 10),
                ("hva", 20),
                ("hva", 40),
                ("hva", 80),
                ("mga", 10),
                ("mga", 20),
                ("mga", 40),
                ("mga", 80),
            ),
        )


@dataclass(frozen=True)
class Task:
    index: int
    params: InstanceParams
    archiver: str
    mu: int | None
    seed: int


@dataclass
class RunRecord:
    rho: float
    m: int
    n: int
    k: int
    archiver: str
    mu: int | None
    seed: int
    plo_set_size: int
    length: int
    evaluations: int
    hvr: float
    epsilon: float
    wall_ms: float | None


@dataclass
class TaskFailure:
    task: Task
    message: str


@dataclass
class MatrixResult:
    records: list[RunRecord]
    failures: list[TaskFailure]


def derive_instance_seed(n: int, m: int, k: int, rho: float) -> int:
    """Generation seed for the one instance of a parameter combination.

    First eight bytes (big-endian) of sha256 over the canonical tuple string
    'rmnk|n=<n>|m=<m>|k=<k>|rho=<repr(rho)>'.
    """
    text = f"rmnk|n={n}|m={m}|k={k}|rho={float(rho)!r}"
    digest = hashlib.sha256(text.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def expand_matrix(matrix: ExperimentMatrix) -> list[Task]:
    """All (instance, config, seed) tasks in canonical order."""
    tasks: list[Task] = []
    for n in matrix.n_values:
        for k in matrix.k_values:
            if k >= n:
                continue
            for m in matrix.m_values:
                for rho in matrix.rho_values:
                    if not rho > -1.0 / (m - 1):
                        continue
                    params = InstanceParams(
                        n=n, m=m, k=k, rho=rho, gen_seed=derive_instance_seed(n, m, k, rho)
                    )
                    for archiver, mu in matrix.configs:
                        for seed in matrix.seeds:
                            tasks.append(
                                Task(
                                    index=len(tasks),
                                    params=params,
                                    archiver=archiver,
                                    mu=mu,
                                    seed=seed,
                                )
                            )
    if not tasks:
        raise ValueError("matrix expands to no tasks")
    return tasks


def matrix_instance_params(matrix: ExperimentMatrix) -> list[InstanceParams]:
    """Distinct instance parameter tuples, in canonical order."""
    seen: dict[InstanceParams, None] = {}
    for task in expand_matrix(matrix):
        seen.setdefault(task.params, None)
    return list(seen)


def _group_tasks(tasks: list[Task]) -> list[list[Task]]:
    groups: dict[InstanceParams, list[Task]] = {}
    for task in tasks:
        groups.setdefault(task.params, []).append(task)
    return list(groups.values())


def _run_group(args) -> tuple[list[RunRecord], list[TaskFailure]]:
    """Worker: all runs of one instance, sharing its enumeration."""
    group, verify, record_wall_time, max_iterations = args
    params = group[0].params
    records: list[RunRecord] = []
    failures: list[TaskFailure] = []
    try:
        instance = generate_instance(params)
        enum = enumerate_space(instance)
        hv_front = hypervolume(enum.pareto_front)
    except Exception as exc:  # per-instance failure marks every task
        return [], [TaskFailure(task, f"instance setup failed: {exc}") for task in group]
    for task in group:
        try:
            config = PlsConfig(
                archiver=task.archiver,
                mu=task.mu,
                search_seed=task.seed,
                max_iterations=max_iterations,
            )
            stats = pls_run(instance, config, lookup=enum.all_vectors)
            if not stats.completed:
                raise RuntimeError("run hit its iteration cap")
            if verify:
                sols = stats.plo_set.solutions()
                if not is_plo_set(instance, sols, enum.all_vectors):
                    raise RuntimeError("output failed the PLO-set verifier")
                if task.archiver == "unb" and not is_maximal_plo_set(
                    instance, sols, enum.all_vectors
                ):
                    raise RuntimeError("unbounded output failed the maximality verifier")
            image = np.unique(stats.plo_set.image(), axis=0)
            hv_image = hypervolume(image)
            records.append(
                RunRecord(
                    rho=params.rho,
                    m=params.m,
                    n=params.n,
                    k=params.k,
                    archiver=task.archiver,
                    mu=task.mu,
                    seed=task.seed,
                    plo_set_size=len(stats.plo_set),
                    length=stats.length,
                    evaluations=stats.evaluations,
                    hvr=(hv_front - hv_image) / hv_front,
                    epsilon=mult_epsilon(image, enum.pareto_front),
                    wall_ms=stats.wall_ms if record_wall_time else None,
                )
            )
        except Exception as exc:
            failures.append(TaskFailure(task, str(exc)))
    return records, failures


def run_matrix(
    matrix: ExperimentMatrix,
    out_dir: str | Path | None = None,
    workers: int = 1,
    verify: bool = True,
    record_wall_time: bool = True,
    max_iterations: int | None = 10**6,
    progress=None,
) -> MatrixResult:
    """Run every task; records come back in canonical order.

    Failed tasks are reported in MatrixResult.failures (and errors.csv when
    out_dir is given), never silently dropped.  Worker count does not affect
    the output: tasks are grouped per instance and results are merged in
    expansion order.  max_iterations is a pathology guard far above observed
    run lengths; a capped run is reported as a failure, not a record.
    """
    tasks = expand_matrix(matrix)
    groups = _group_tasks(tasks)
    payloads = [(group, verify, record_wall_time, max_iterations) for group in groups]
    records: list[RunRecord] = []
    failures: list[TaskFailure] = []
    if workers <= 1:
        outputs = []
        for payload in payloads:
            outputs.append(_run_group(payload))
            if progress is not None:
                done = len(outputs)
                progress(f"instance {done}/{len(payloads)} done")
    else:
        with get_context("fork").Pool(workers) as pool:
            outputs = pool.map(_run_group, payloads)
    for recs, fails in outputs:
        records.extend(recs)
        failures.extend(fails)
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_records_csv(records, out_dir / "records.csv")
        if failures:
            with open(out_dir / "errors.csv", "w") as fp:
                fp.write("rho,m,n,k,archiver,mu,seed,error\n")
                for failure in failures:
                    t = failure.task
                    mu = "" if t.mu is None else str(t.mu)
                    msg = failure.message.replace("\n", " ").replace(",", ";")
                    fp.write(
                        f"{_fmt_float(t.params.rho)},{t.params.m},{t.params.n},"
                        f"{t.params.k},{t.archiver},{mu},{t.seed},{msg}\n"
                    )
    return MatrixResult(records=records, failures=failures)


def _fmt_float(x: float) -> str:
    return format(x, ".17g")


def write_records_csv(records: list[RunRecord], sink) -> None:
    """Exact schema; mu empty for unb, floats with 17 significant digits."""
    if isinstance(sink, (str, Path)):
        with open(sink, "w") as fp:
            write_records_csv(records, fp)
        return
    sink.write(CSV_HEADER + "\n")
    for r in records:
        mu = "" if r.mu is None else str(r.mu)
        wall = "" if r.wall_ms is None else _fmt_float(r.wall_ms)
        sink.write(
            f"{_fmt_float(r.rho)},{r.m},{r.n},{r.k},{r.archiver},{mu},{r.seed},"
            f"{r.plo_set_size},{r.length},{r.evaluations},"
            f"{_fmt_float(r.hvr)},{_fmt_float(r.epsilon)},{wall}\n"
        )


def read_records_csv(source) -> list[RunRecord]:
    if isinstance(source, (str, Path)):
        with open(source) as fp:
            return read_records_csv(fp)
    header = source.readline().strip()
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header: {header!r}")
    records = []
    for line in source:
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 13:
            raise ValueError(f"bad CSV row: {line!r}")
        records.append(
            RunRecord(
                rho=float(parts[0]),
                m=int(parts[1]),
                n=int(parts[2]),
                k=int(parts[3]),
                archiver=parts[4],
                mu=int(parts[5]) if parts[5] else None,
                seed=int(parts[6]),
                plo_set_size=int(parts[7]),
                length=int(parts[8]),
                evaluations=int(parts[9]),
                hvr=float(parts[10]),
                epsilon=float(parts[11]),
                wall_ms=float(parts[12]) if parts[12] else None,
            )
        )
    return records


# ---------------------------------------------------------------------------
# aggregation and plot data
# ---------------------------------------------------------------------------


@dataclass
class SummaryRow:
    """Per-group mean and sample standard deviation of each measure.

    stds values are None when the group holds fewer than two records (or a
    measure is absent from some record).
    """

    rho: float
    m: int
    n: int
    k: int
    archiver: str
    mu: int | None
    count: int
    means: dict[str, float] = field(default_factory=dict)
    stds: dict[str, float | None] = field(default_factory=dict)


def aggregate(records: list[RunRecord]) -> list[SummaryRow]:
    """Group by (instance params, archiver, mu); sample std uses count - 1."""
    groups: dict[tuple, list[RunRecord]] = {}
    for r in records:
        groups.setdefault((r.rho, r.m, r.n, r.k, r.archiver, r.mu), []).append(r)
    rows = []
    for (rho, m, n, k, archiver, mu), recs in groups.items():
        row = SummaryRow(rho=rho, m=m, n=n, k=k, archiver=archiver, mu=mu, count=len(recs))
        for measure in MEASURES:
            values = [getattr(r, measure) for r in recs]
            if any(v is None for v in values):
                continue
            mean = math.fsum(values) / len(values)
            row.means[measure] = mean
            if len(values) >= 2:
                var = math.fsum((v - mean) ** 2 for v in values) / (len(values) - 1)
                row.stds[measure] = math.sqrt(var)
            else:
                row.stds[measure] = None
        rows.append(row)
    return rows


# panel descriptions: slice filters, x axis, one series per key value
_FIG_SIZE_PANELS = {
    "fig1a": (dict(n=16, rho=-0.2), "k", "m"),
    "fig1b": (dict(n=16, rho=0.7), "k", "m"),
    "fig1c": (dict(n=16, k=4), "rho", "m"),
    "fig1d": (dict(n=16, m=5), "rho", "k"),
}
_FIG_ALGO_PANELS = {
    # (slice, x axis, measure, fixed mu for k-axis panels)
    "fig2a": (dict(n=16, m=5, k=8, rho=-0.2), "mu", "epsilon", None),
    "fig2b": (dict(n=16, m=5, k=8, rho=0.0), "mu", "epsilon", None),
    "fig2c": (dict(n=16, m=5, k=8, rho=-0.2), "mu", "hvr", None),
    "fig2d": (dict(n=16, m=5, k=8, rho=0.0), "mu", "hvr", None),
    "fig2e": (dict(n=16, m=3, rho=0.0), "k", "hvr", 10),
    "fig2f": (dict(n=16, m=5, rho=0.0), "k", "hvr", 10),
    "fig3a": (dict(n=16, m=3, k=8, rho=-0.2), "mu", "length", None),
    "fig3b": (dict(n=16, m=3, k=8, rho=0.0), "mu", "length", None),
    "fig3c": (dict(n=16, m=5, k=8, rho=-0.2), "mu", "length", None),
    "fig3d": (dict(n=16, m=5, k=8, rho=0.0), "mu", "length", None),
    "fig3e": (dict(n=16, m=3, rho=0.0), "k", "length", 10),
    "fig3f": (dict(n=16, m=5, rho=0.0), "k", "length", 10),
}
FIGURE_IDS = tuple(sorted(_FIG_SIZE_PANELS) + sorted(_FIG_ALGO_PANELS))


def _matches(row: SummaryRow, slice_filter: dict) -> bool:
    return all(getattr(row, key) == value for key, value in slice_filter.items())


def _fmt_value(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def emit_plot_data(rows: list[SummaryRow], figure_id: str, out_dir: str | Path) -> Path:
    """Write `<figure_id>.dat` (x, series, mean, std per line) plus a
    `<figure_id>.meta` sidecar carrying the axis/log-scale hints.

    Cells without data get an explicit `NA NA` gap marker; an empty summary
    produces a header-only file.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if figure_id in _FIG_SIZE_PANELS:
        slice_filter, x_key, series_key = _FIG_SIZE_PANELS[figure_id]
        measure = "plo_set_size"
        selected = [
            r for r in rows if r.archiver == "unb" and _matches(r, slice_filter)
        ]
        series_values = sorted({getattr(r, series_key) for r in selected})
        x_values = sorted({getattr(r, x_key) for r in selected})
        lines = []
        for series in series_values:
            for x in x_values:
                cell = [
                    r
                    for r in selected
                    if getattr(r, series_key) == series and getattr(r, x_key) == x
                ]
                label = f"{series_key}={_fmt_value(series)}"
                lines.append(_cell_line(x, label, cell, measure))
        meta = (
            f"figure={figure_id} x={x_key} series={series_key} measure={measure} "
            f"archiver=unb xlog=false ylog=true"
        )
    elif figure_id in _FIG_ALGO_PANELS:
        slice_filter, x_key, measure, fixed_mu = _FIG_ALGO_PANELS[figure_id]
        selected = [r for r in rows if _matches(r, slice_filter)]
        lines = []
        if x_key == "mu":
            mus = sorted({r.mu for r in selected if r.mu is not None})
            for archiver in ("hva", "mga"):
                for mu in mus:
                    cell = [r for r in selected if r.archiver == archiver and r.mu == mu]
                    lines.append(_cell_line(mu, archiver, cell, measure))
            cell = [r for r in selected if r.archiver == "unb"]
            lines.append(_cell_line("unb", "unb", cell, measure))
        else:
            x_values = sorted({getattr(r, x_key) for r in selected})
            for archiver in ("hva", "mga"):
                for x in x_values:
                    cell = [
                        r
                        for r in selected
                        if r.archiver == archiver
                        and r.mu == fixed_mu
                        and getattr(r, x_key) == x
                    ]
                    lines.append(_cell_line(x, archiver, cell, measure))
            for x in x_values:
                cell = [
                    r
                    for r in selected
                    if r.archiver == "unb" and getattr(r, x_key) == x
                ]
                lines.append(_cell_line(x, "unb", cell, measure))
        xlog = "true" if x_key == "mu" else "false"
        ylog = "true" if measure in ("length", "plo_set_size") else "false"
        mu_note = "" if fixed_mu is None else f" mu={fixed_mu}"
        meta = (
            f"figure={figure_id} x={x_key} series=archiver measure={measure}"
            f"{mu_note} xlog={xlog} ylog={ylog}"
        )
    else:
        raise ValueError(f"unknown figure id {figure_id!r}; expected one of {FIGURE_IDS}")
    dat_path = out_dir / f"{figure_id}.dat"
    with open(dat_path, "w") as fp:
        fp.write("# x series mean std\n")
        for line in lines:
            fp.write(line + "\n")
    with open(out_dir / f"{figure_id}.meta", "w") as fp:
        fp.write(meta + "\n")
    return dat_path


def _cell_line(x, series: str, cell: list[SummaryRow], measure: str) -> str:
    x_text = _fmt_value(x)
    if not cell or measure not in cell[0].means:
        return f"{x_text} {series} NA NA"
    row = cell[0]
    std = row.stds.get(measure)
    std_text = "NA" if std is None else repr(std)
    return f"{x_text} {series} {repr(row.means[measure])} {std_text}"
