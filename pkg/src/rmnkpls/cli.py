"""Command-line interface.

Subcommands: generate (write an instance file), enumerate (write the exact
Pareto front), pls (one search run), experiment (run a matrix to CSV), and
report (plot-ready data from a records CSV).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .archivers import ARCHIVER_NAMES
from .bench import (
    FIGURE_IDS,
    ExperimentMatrix,
    aggregate,
    emit_plot_data,
    expand_matrix,
    read_records_csv,
    run_matrix,
)
from .landscape import InstanceParams, generate_instance, read_instance, write_instance
from .oracle import enumerate_space
from .pls import PlsConfig, pls_run


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(","))


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmnkpls")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate an instance and write its text form")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--seed", type=int, required=True, help="generation seed")
    p.add_argument("--out", required=True)

    p = sub.add_parser("enumerate", help="write the exact Pareto front, one vector per line")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("pls", help="run Pareto local search on an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--archiver", choices=ARCHIVER_NAMES, required=True)
    p.add_argument("--mu", type=int, default=None)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--snapshots", type=int, default=None, metavar="K",
                   help="record the archive image every K iterations")
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--plo-set", default=None, help="write the final archive snapshot here")

    p = sub.add_parser("experiment", help="run an experiment matrix and write records.csv")
    p.add_argument("--grid", default="study",
                   help="'study' (the built-in full grid) or a TOML file; individual flags override its fields")
    p.add_argument("--n-values", type=_int_list, default=None)
    p.add_argument("--k-values", type=_int_list, default=None)
    p.add_argument("--m-values", type=_int_list, default=None)
    p.add_argument("--rho-values", type=_float_list, default=None)
    p.add_argument("--seeds", type=_int_list, default=None, help="explicit seed list")
    p.add_argument("--seed-count", type=int, default=None, help="use seeds 1..N")
    p.add_argument("--archivers", default=None, help="comma list from unb,hva,mga")
    p.add_argument("--mu-values", type=_int_list, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--verify", dest="verify", action="store_true", default=True)
    p.add_argument("--no-verify", dest="verify", action="store_false")
    p.add_argument("--no-wall-time", dest="wall_time", action="store_false", default=True,
                   help="leave wall_ms empty for byte-reproducible output")

    p = sub.add_parser("report", help="emit plot-ready panel data from a records CSV")
    p.add_argument("--records", required=True)
    p.add_argument("--figure", required=True,
                   help=f"one of {', '.join(FIGURE_IDS)}, or 'all'")
    p.add_argument("--out", required=True)
    return parser


def _matrix_from_args(args) -> ExperimentMatrix:
    base = ExperimentMatrix.study_grid()
    if args.grid != "study":
        with open(args.grid, "rb") as fp:
            data = tomllib.load(fp)
        seeds = data.get("seeds")
        if seeds is None and "seed_count" in data:
            seeds = list(range(1, int(data["seed_count"]) + 1))
        configs = _configs_from(data.get("archivers"), data.get("mu_values"))
        base = ExperimentMatrix(
            n_values=tuple(data.get("n_values", base.n_values)),
            k_values=tuple(data.get("k_values", base.k_values)),
            m_values=tuple(data.get("m_values", base.m_values)),
            rho_values=tuple(float(r) for r in data.get("rho_values", base.rho_values)),
            seeds=tuple(seeds) if seeds is not None else base.seeds,
            configs=configs if configs is not None else base.configs,
        )
    seeds = base.seeds
    if args.seeds is not None:
        seeds = args.seeds
    elif args.seed_count is not None:
        seeds = tuple(range(1, args.seed_count + 1))
    archivers = args.archivers.split(",") if args.archivers else None
    configs = _configs_from(archivers, args.mu_values)
    return ExperimentMatrix(
        n_values=args.n_values if args.n_values is not None else base.n_values,
        k_values=args.k_values if args.k_values is not None else base.k_values,
        m_values=args.m_values if args.m_values is not None else base.m_values,
        rho_values=args.rho_values if args.rho_values is not None else base.rho_values,
        seeds=seeds,
        configs=configs if configs is not None else base.configs,
    )


def _configs_from(archivers, mu_values) -> tuple | None:
    if archivers is None and mu_values is None:
        return None
    names = tuple(archivers) if archivers else ("unb", "hva", "mga")
    for name in names:
        if name not in ARCHIVER_NAMES:
            raise SystemExit(f"unknown archiver {name!r}")
    mus = tuple(mu_values) if mu_values else (10, 20, 40, 80)
    configs = []
    if "unb" in names:
        configs.append(("unb", None))
    for name in names:
        if name == "unb":
            continue
        for mu in mus:
            configs.append((name, mu))
    return tuple(configs)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "generate":
        params = InstanceParams(n=args.n, m=args.m, k=args.k, rho=args.rho, gen_seed=args.seed)
        write_instance(generate_instance(params), args.out)
        print(f"wrote {args.out}")
        return 0
    if args.command == "enumerate":
        instance = read_instance(args.instance)
        result = enumerate_space(instance)
        with open(args.out, "w") as fp:
            for row in result.pareto_front:
                fp.write(" ".join(format(v, ".17g") for v in row) + "\n")
        print(
            f"{len(result.pareto_front)} front vectors, "
            f"{result.pareto_set_size} Pareto-optimal solutions"
        )
        return 0
    if args.command == "pls":
        instance = read_instance(args.instance)
        config = PlsConfig(
            archiver=args.archiver,
            mu=args.mu,
            search_seed=args.seed,
            max_iterations=args.max_iterations,
            snapshot_every=args.snapshots,
        )
        stats = pls_run(instance, config)
        summary = (
            f"archiver={args.archiver} mu={args.mu if args.mu is not None else '-'} "
            f"seed={args.seed} plo_set_size={len(stats.plo_set)} length={stats.length} "
            f"evaluations={stats.evaluations} completed={stats.completed}"
        )
        if stats.snapshots is not None:
            summary += f" snapshots={len(stats.snapshots)}"
        print(summary)
        if args.plo_set:
            with open(args.plo_set, "w") as fp:
                for line in stats.plo_set.snapshot_lines():
                    fp.write(line + "\n")
        return 0
    if args.command == "experiment":
        matrix = _matrix_from_args(args)
        tasks = expand_matrix(matrix)
        print(f"{len(tasks)} runs", file=sys.stderr)
        result = run_matrix(
            matrix,
            out_dir=args.out,
            workers=args.workers,
            verify=args.verify,
            record_wall_time=args.wall_time,
            progress=lambda text: print(text, file=sys.stderr),
        )
        print(f"{len(result.records)} records -> {Path(args.out) / 'records.csv'}")
        if result.failures:
            print(f"{len(result.failures)} failures -> {Path(args.out) / 'errors.csv'}")
            return 1
        return 0
    if args.command == "report":
        records = read_records_csv(args.records)
        rows = aggregate(records)
        figures = FIGURE_IDS if args.figure == "all" else (args.figure,)
        for figure_id in figures:
            path = emit_plot_data(rows, figure_id, args.out)
            print(f"wrote {path}")
        return 0
    raise AssertionError("unreachable")


if __name__ == "__main__":
    raise SystemExit(main())
