"""Command-line entry point.

Subcommands: ``numbers`` (dimensionless report), ``simulate`` (one case:
snapshots, probes, metrics), ``sweep`` (catalog campaign), ``regress``
(fits on a dataset), ``report`` (correlation tables), ``validate``
(verification suite). Global flags: ``--config`` (key=value file, also
honored via the environment), ``--out``, ``--jobs``, ``--coarse``,
``--force``. Exit codes: 0 success, 1 invalid input, 2 runtime/solver
failure, 3 sweep finished with failed cases. Without ``--force`` no
existing output file is overwritten.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import sys
from pathlib import Path

from . import __version__
from .alloys import (ProcessCase, builtin_cases, get_alloy, list_alloys,
                     load_alloys_csv, load_cases_csv)
from .config import build_config
from .dimensionless import UhatCoefficients, compute_numbers
from .errors import SolverError, ValidationError
from .metrics import extract, metrics_row, write_metrics_csv
from .regression import (attempt_fit, correlation_tables,
                         write_correlations, write_regression_reports)
from .solver.driver import run_case
from .solver.snapshots import write_probes, write_slices, write_snapshot
from .sweep import (assemble_dataset, catalog_pairs, load_dataset_csv,
                    run_sweep, write_dataset_csv)
from .validate import run_all


class _Parser(argparse.ArgumentParser):
    """Argument errors are user errors: exit 1, not argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_case_flags(parser, power_required: bool):
    parser.add_argument("--alloy", default="SS316",
                        help="alloy name from the catalog (default SS316)")
    parser.add_argument("--power", type=float, required=power_required,
                        default=None if power_required else 90.0,
                        help="beam power P [W]")
    parser.add_argument("--speed", type=float,
                        required=power_required,
                        default=None if power_required else 0.5,
                        help="scan speed v_p [m/s]")
    parser.add_argument("--layer", type=float, default=None,
                        help="deposit thickness l_p [m] (default 2e-5)")
    parser.add_argument("--spot", type=float, default=None,
                        help="beam spot radius r_p [m] (default 1e-4)")
    parser.add_argument("--absorptivity", type=float, default=None,
                        help="absorbed power fraction [-] (default 0.35)")


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, metavar="PATH",
                        help="solver config file, key = value per line "
                             "(overrides the environment variable)")
    common.add_argument("--out", default="out", metavar="DIR",
                        help="output directory (default ./out)")
    common.add_argument("--jobs", type=int, default=None, metavar="N",
                        help="worker processes for the sweep (default 1)")
    common.add_argument("--coarse", action="store_true",
                        help="double the grid spacing (quick runs)")
    common.add_argument("--force", action="store_true",
                        help="overwrite existing outputs / restart a "
                             "mismatched sweep store")

    parser = _Parser(prog="meltpool",
                     description="Reduced-unit meltpool simulation and "
                                 "regression toolkit")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_numbers = sub.add_parser("numbers", parents=[common],
                               help="dimensionless groups for one case or "
                                    "the whole catalog")
    _add_case_flags(p_numbers, power_required=False)
    p_numbers.add_argument("--list-alloys", action="store_true",
                           help="print catalog alloy names and exit")
    p_numbers.add_argument("--all", action="store_true",
                           help="emit every catalog case")

    p_sim = sub.add_parser("simulate", parents=[common],
                           help="run one case; write snapshot, probe, "
                                "slice, and metric files")
    _add_case_flags(p_sim, power_required=False)

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="run the case catalog into a resumable "
                                  "result store")
    p_sweep.add_argument("--cases", default=None, metavar="CSV",
                         help="case table to run instead of the catalog")
    p_sweep.add_argument("--alloys", default=None, metavar="CSV",
                         help="alloy table referenced by --cases")

    p_reg = sub.add_parser("regress", parents=[common],
                           help="least-squares fits on a sweep dataset")
    p_reg.add_argument("dataset", help="sweep dataset CSV path")
    p_reg.add_argument("--attempt", default="all",
                       choices=["1", "2", "3", "all"],
                       help="feature set to fit (default all three)")

    p_rep = sub.add_parser("report", parents=[common],
                           help="per-alloy correlation tables from a "
                                "sweep dataset")
    p_rep.add_argument("dataset", help="sweep dataset CSV path")

    p_val = sub.add_parser("validate", parents=[common],
                           help="numerical verification suite")
    p_val.add_argument("--quick", action="store_true",
                       help="smaller grids and shorter runs (< 5 min)")
    p_val.add_argument("--diffusion-scale", type=float, default=1.0,
                       help="scale the solver diffusion coefficient only "
                            "(negative control; 1.0 = correct physics)")
    return parser


def _load_config(args):
    cfg, harness = build_config(args.config)
    if args.coarse:
        cfg = cfg.coarse()
    jobs = args.jobs if args.jobs is not None else int(harness.get("jobs", 1))
    out_dir = Path(args.out)
    if args.out == "out" and "out_dir" in harness:
        out_dir = Path(harness["out_dir"])
    return cfg, jobs, out_dir


def _case_from_args(args) -> ProcessCase:
    kwargs = {}
    if args.layer is not None:
        kwargs["l_p"] = args.layer
    if args.spot is not None:
        kwargs["r_p"] = args.spot
    if args.absorptivity is not None:
        kwargs["a_abs"] = args.absorptivity
    return ProcessCase(alloy=args.alloy, P=args.power, v_p=args.speed,
                       **kwargs)


def _refuse_existing(paths: list[Path], force: bool) -> None:
    if force:
        return
    clashes = [str(p) for p in paths if p.exists()]
    if clashes:
        raise ValidationError(
            "refusing to overwrite existing output (use --force): "
            + ", ".join(clashes))


def _numbers_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    first = rows[0]
    header = ["alloy", "P_W", "v_p"] + list(first[2].as_dict())
    writer.writerow(header)
    for alloy_name, case, numbers in rows:
        writer.writerow([alloy_name, f"{case.P:g}", f"{case.v_p:g}"]
                        + [f"{v:.9g}" for v in numbers.as_dict().values()])
    return buf.getvalue()


def cmd_numbers(args) -> int:
    if args.list_alloys:
        for name in list_alloys():
            print(name)
        return 0
    if args.all:
        cases = builtin_cases()
    else:
        cases = [_case_from_args(args)]
    rows = [(c.alloy, c, compute_numbers(get_alloy(c.alloy), c))
            for c in cases]
    sys.stdout.write(_numbers_csv(rows))
    return 0


def cmd_simulate(args) -> int:
    cfg, _, out_dir = _load_config(args)
    case = _case_from_args(args)
    alloy = get_alloy(case.alloy)
    run_dir = out_dir / case.id
    _refuse_existing([run_dir / "snapshot.json", run_dir / "probes.csv",
                      run_dir / "metrics.csv"], args.force)

    on_step = None
    if cfg.snapshot_every > 0:
        def on_step(result, step):
            if step % cfg.snapshot_every == 0:
                write_snapshot(result, run_dir, prefix=f"snapshot_{step:05d}")

    result = run_case(alloy, case, cfg, on_step=on_step)
    metrics = extract(result.state, alloy, case, numbers=result.numbers,
                      threshold=cfg.phi_melt_threshold)
    write_snapshot(result, run_dir)
    write_probes(result.probes, run_dir / "probes.csv")
    write_slices(result, run_dir)
    write_metrics_csv([metrics_row(alloy.name, case, metrics)],
                      run_dir / "metrics.csv")
    diag = result.diagnostics
    print(f"{case.id}: Tmax_tilde={metrics.Tmax_tilde:.4f} "
          f"vmax_tilde={metrics.vmax_tilde:.4f} "
          f"melt_volume={metrics.volume:.4g} "
          f"substeps={diag['substeps_total']} "
          f"wall={diag['wall_time_s']:.1f}s")
    print(f"outputs in {run_dir}")
    return 0


def cmd_sweep(args) -> int:
    cfg, jobs, out_dir = _load_config(args)
    if args.cases is not None:
        catalog = load_alloys_csv(args.alloys) if args.alloys else None
        cases = load_cases_csv(args.cases, catalog)
        pairs = [(get_alloy(c.alloy, catalog) if catalog
                  else get_alloy(c.alloy), c) for c in cases]
    else:
        pairs = catalog_pairs(builtin_cases())
    store = out_dir / "sweep_results.jsonl"
    dataset_path = out_dir / "sweep_dataset.csv"

    done_count = 0

    def progress(record):
        nonlocal done_count
        done_count += 1
        status = record["status"]
        extra = ("" if status == "done"
                 else f" ({record['reason']})")
        print(f"[{done_count}] {record['case_id']}: {status}{extra}",
              flush=True)

    summary = run_sweep(pairs, cfg, store_path=store, jobs=jobs,
                        force=args.force, progress=progress)
    print(f"sweep: {summary['done']} done, {summary['failed']} failed, "
          f"{summary['skipped']} skipped (already complete)")
    if summary["done"]:
        rows = assemble_dataset(summary["records"],
                                response_mode=cfg.response_mode)
        write_dataset_csv(rows, dataset_path)
        print(f"dataset: {dataset_path} ({len(rows)} rows)")
    return 3 if summary["failed"] else 0


def cmd_regress(args) -> int:
    _, _, out_dir = _load_config(args)
    rows = load_dataset_csv(args.dataset)
    attempts = [1, 2, 3] if args.attempt == "all" else [int(args.attempt)]
    reports = [attempt_fit(rows, a) for a in attempts]
    _refuse_existing([out_dir / "regression_report.txt",
                      out_dir / "regression_report.csv"], args.force)
    paths = write_regression_reports(reports, out_dir)
    for report in reports:
        print(report.summary())
        print()
    print("written: " + ", ".join(str(p) for p in paths))
    return 0


def cmd_report(args) -> int:
    _, _, out_dir = _load_config(args)
    rows = load_dataset_csv(args.dataset)
    fit = attempt_fit(rows, 3)
    coeffs = UhatCoefficients(a0=float(fit.coefficients[0]),
                              a1=float(fit.coefficients[1]),
                              a2=float(fit.coefficients[2]))
    series = correlation_tables(rows, coeffs)
    corr_dir = out_dir / "correlations"
    _refuse_existing([corr_dir / f"{s.pair}_{s.alloy}.csv" for s in series],
                     args.force)
    paths = write_correlations(series, corr_dir)
    for s in series:
        note = f"SKIPPED ({s.skipped})" if s.skipped else f"r={s.pearson_r:+.3f}"
        print(f"{s.pair:<24} {s.alloy:<10} n={len(s.x):<3} {note}")
    print(f"written {len(paths)} series under {corr_dir}")
    return 0


def cmd_validate(args) -> int:
    _load_config(args)  # surfaces config errors early
    results = run_all(quick=args.quick, diffusion_scale=args.diffusion_scale)
    width = max(len(r.name) for r in results)
    failures = 0
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        failures += 0 if r.passed else 1
        print(f"{mark}  {r.name:<{width}}  {r.detail}  [{r.seconds:.1f}s]")
    if failures:
        print(f"{failures} check(s) failed", file=sys.stderr)
        return 2
    print("all checks passed")
    return 0


_COMMANDS = {
    "numbers": cmd_numbers,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "regress": cmd_regress,
    "report": cmd_report,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        where = f" [{exc.case_id} step {exc.step}]" if exc.case_id else ""
        print(f"solver failure: {exc}{where}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
