"""Batch execution of process cases with a resumable append-only store.

One JSON line per finished case goes to ``sweep_results.jsonl`` keyed by
case id and config hash. Workers (process pool) only compute; the parent
is the single writer and flushes records in submission order, so a serial
and a parallel sweep produce identical files apart from wall times, and
an interrupted sweep picks up exactly where the file ends. Completed ids
are skipped on resume; failed ones are retried. A store written under a
different configuration is refused unless forced, which starts it fresh.
"""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from pathlib import Path

from .alloys import AlloyProperties, ProcessCase, get_alloy
from .config import SolverConfig, config_hash
from .errors import ValidationError
from .metrics import extract
from .solver.driver import run_case

DATASET_NUMBER_KEYS = ("Pr", "Gr", "Ra", "Da", "Ma", "Pe", "Ste", "Q", "E",
                       "Bi", "rad", "Tc")
DATASET_DERIVED_KEYS = ("inv_Pe", "Tc_over_Ste", "Bi_over_Pe")
DATASET_METRIC_KEYS = ("Tmax_t", "vmax_t", "Gmax_t", "G_K_per_m",
                       "coolrate_K_per_s", "l_m", "w_m", "d_m", "aspect",
                       "volume", "sdas_um")
DATASET_COLUMNS = (("case_id", "alloy", "P_W", "v_p", "response",
                    "probe_Tmax_tilde", "probe_vmax_tilde")
                   + DATASET_NUMBER_KEYS + DATASET_DERIVED_KEYS
                   + DATASET_METRIC_KEYS)


def _metric_json(metrics) -> dict:
    out = metrics.as_dict()
    for key, value in out.items():
        if value is None:
            out[key] = None
    return out


def run_single(alloy: AlloyProperties, case: ProcessCase,
               cfg: SolverConfig) -> dict:
    """Execute one case and build its store record (done or failed)."""
    base = {
        "case_id": case.id,
        "alloy": alloy.name,
        "P_W": case.P,
        "v_p": case.v_p,
        "config_hash": config_hash(cfg),
    }
    try:
        result = run_case(alloy, case, cfg)
        metrics = extract(result.state, alloy, case, numbers=result.numbers,
                          threshold=cfg.phi_melt_threshold)
        diag = result.diagnostics
        base.update({
            "status": "done",
            "reason": None,
            "numbers": result.numbers.as_dict(),
            "metrics": _metric_json(metrics),
            "probe_Tmax_tilde": diag["Tmax_tilde_alltime"],
            "probe_vmax_tilde": diag["vmax_tilde_alltime"],
            "diagnostics": {
                "div_rel_max": diag["div_rel_max"],
                "latent_iter_max": diag["latent_iter_max"],
                "substeps_total": diag["substeps_total"],
                "energy_deposited": diag["energy_deposited"],
            },
            "wall_time_s": diag["wall_time_s"],
        })
    except Exception as exc:  # a failed case must not abort the sweep
        base.update({"status": "failed",
                     "reason": f"{type(exc).__name__}: {exc}",
                     "numbers": None, "metrics": None,
                     "probe_Tmax_tilde": None, "probe_vmax_tilde": None,
                     "diagnostics": None, "wall_time_s": None})
    return base


def _worker(payload):
    alloy, case, cfg = payload
    return run_single(alloy, case, cfg)


def load_records(store_path: str | Path) -> dict[str, dict]:
    """Store contents keyed by case id (later lines win)."""
    path = Path(store_path)
    records: dict[str, dict] = {}
    if not path.exists():
        return records
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(
                    f"{path}: line {lineno}: bad record ({exc})") from None
            records[record["case_id"]] = record
    return records


def run_sweep(pairs: list[tuple[AlloyProperties, ProcessCase]],
              cfg: SolverConfig, *, store_path: str | Path,
              jobs: int = 1, force: bool = False,
              progress=None) -> dict:
    """Run all cases, appending records to the store; returns a summary.

    ``progress(record)`` is called as each record is committed.
    """
    if jobs < 1:
        raise ValidationError(f"jobs must be >= 1, got {jobs}")
    store_path = Path(store_path)
    store_path.parent.mkdir(parents=True, exist_ok=True)
    want_hash = config_hash(cfg)

    existing = load_records(store_path)
    stale = [r for r in existing.values() if r.get("config_hash") != want_hash]
    if stale:
        if not force:
            raise ValidationError(
                f"{store_path} holds {len(stale)} record(s) from a different "
                f"configuration; pass force to discard and restart")
        store_path.write_text("")
        existing = {}

    done_ids = {cid for cid, r in existing.items() if r.get("status") == "done"}
    todo = [(a, c) for a, c in pairs if c.id not in done_ids]
    skipped = len(pairs) - len(todo)

    committed: list[dict] = []

    def commit(fh, record):
        fh.write(json.dumps(record, sort_keys=True) + "\n")
        fh.flush()
        committed.append(record)
        if progress is not None:
            progress(record)

    with open(store_path, "a") as fh:
        if jobs == 1 or len(todo) <= 1:
            for alloy, case in todo:
                commit(fh, run_single(alloy, case, cfg))
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = {pool.submit(_worker, (a, c, cfg)): i
                           for i, (a, c) in enumerate(todo)}
                ready: dict[int, dict] = {}
                next_index = 0
                pending = set(futures)
                while pending:
                    finished, pending = wait(pending,
                                             return_when=FIRST_COMPLETED)
                    for fut in finished:
                        ready[futures[fut]] = fut.result()
                    while next_index in ready:
                        commit(fh, ready.pop(next_index))
                        next_index += 1

    records = load_records(store_path)
    n_done = sum(1 for r in records.values() if r["status"] == "done")
    n_failed = sum(1 for r in records.values() if r["status"] == "failed")
    return {"done": n_done, "failed": n_failed, "skipped": skipped,
            "ran": len(committed), "records": records,
            "store_path": store_path}


def catalog_pairs(cases: list[ProcessCase]) -> list[tuple[AlloyProperties, ProcessCase]]:
    return [(get_alloy(c.alloy), c) for c in cases]


def assemble_dataset(records: dict[str, dict] | list[dict],
                     response_mode: str = "probe") -> list[dict]:
    """Flatten done records into regression-ready rows (catalog order).

    ``response_mode`` picks the peak-temperature definition: "probe" uses
    the all-time probe maximum, "snapshot" the final-field maximum.
    """
    if response_mode not in ("probe", "snapshot"):
        raise ValidationError(
            f"response_mode must be 'probe' or 'snapshot', got {response_mode!r}")
    if isinstance(records, dict):
        records = list(records.values())
    done = [r for r in records if r.get("status") == "done"]
    failed = len(records) - len(done)
    if not done:
        raise ValidationError("no completed records to assemble")
    if failed:
        warnings.warn(f"excluding {failed} failed record(s) from the dataset",
                      RuntimeWarning, stacklevel=2)
    rows = []
    for rec in sorted(done, key=lambda r: r["case_id"]):
        numbers = rec["numbers"]
        metrics = rec["metrics"]
        row = {
            "case_id": rec["case_id"],
            "alloy": rec["alloy"],
            "P_W": rec["P_W"],
            "v_p": rec["v_p"],
            "probe_Tmax_tilde": rec["probe_Tmax_tilde"],
            "probe_vmax_tilde": rec["probe_vmax_tilde"],
        }
        for key in DATASET_NUMBER_KEYS:
            row[key] = numbers[key]
        row["inv_Pe"] = 1.0 / numbers["Pe"]
        row["Tc_over_Ste"] = numbers["Tc"] / numbers["Ste"]
        row["Bi_over_Pe"] = numbers["Bi"] / numbers["Pe"]
        row["Tmax_t"] = metrics["Tmax_tilde"]
        row["vmax_t"] = metrics["vmax_tilde"]
        row["Gmax_t"] = metrics["Gmax_tilde"]
        row["G_K_per_m"] = metrics["G_dim"]
        row["coolrate_K_per_s"] = metrics["cooling_rate"]
        row["l_m"] = metrics["l_m"]
        row["w_m"] = metrics["w_m"]
        row["d_m"] = metrics["d_m"]
        aspect = metrics["aspect_ratio"]
        row["aspect"] = math.nan if aspect is None else aspect
        row["volume"] = metrics["volume"]
        sdas_um = metrics["sdas_um"]
        row["sdas_um"] = math.nan if sdas_um is None else sdas_um
        row["response"] = (row["probe_Tmax_tilde"] if response_mode == "probe"
                           else row["Tmax_t"])
        rows.append(row)
    return rows


def write_dataset_csv(rows: list[dict], path: str | Path) -> Path:
    import csv

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DATASET_COLUMNS)
        for row in rows:
            out = []
            for key in DATASET_COLUMNS:
                value = row[key]
                out.append(value if isinstance(value, str) else f"{value:.12g}")
            writer.writerow(out)
    return path


def load_dataset_csv(path: str | Path) -> list[dict]:
    import csv

    path = Path(path)
    if not path.exists():
        raise ValidationError(f"dataset not found: {path}")
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(DATASET_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValidationError(
                f"{path}: missing dataset columns: {', '.join(sorted(missing))}")
        for record in reader:
            row: dict = {}
            for key, raw in record.items():
                if key in ("case_id", "alloy"):
                    row[key] = raw
                else:
                    try:
                        row[key] = float(raw)
                    except ValueError:
                        raise ValidationError(
                            f"{path}: bad numeric value {raw!r} in column "
                            f"{key}") from None
            rows.append(row)
    return rows
