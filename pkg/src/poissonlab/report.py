"""Render a completed run directory as a ten-question cost/accuracy table.

The ten rows are the lab's standard reporting checklist: what hardware
ran the pipeline, what the data and training stages cost, what the model
looked like, how training was tuned, and how the surrogate behaves in
range, out of range, across grids, and under input perturbations. Rows
whose inputs are missing from the run say "not measured" rather than
dropping out.
"""

from __future__ import annotations

from pathlib import Path

from .costs import CostLedger, break_even, total_time
from .fileio import read_json
from .manifest import load_manifest


def _fmt_seconds(value) -> str:
    return f"{float(value):.6g} s"


def _fmt_rmse(value) -> str:
    return "absent (empty split)" if value is None else f"{float(value):.6g}"


def _optional_json(run_dir: Path, name: str):
    path = run_dir / name
    return read_json(path) if path.exists() else None


def _machine_line(manifest: dict) -> str:
    m = manifest.get("machine", {})
    parts = [
        m.get("platform", "unknown platform"),
        f"{m.get('cpu_count', '?')} cores",
        f"Python {m.get('python', '?')}",
        f"numpy {m.get('numpy', '?')}",
    ]
    return "; ".join(parts)


def build_report(run_dir) -> str:
    """Question-by-question summary of one run; pure function of the files."""
    run_dir = Path(run_dir)
    manifest = load_manifest(run_dir)
    ledger_doc = _optional_json(run_dir, "cost_ledger.json")
    train_doc = _optional_json(run_dir, "train_report.json")
    model_doc = _optional_json(run_dir, "model.json")
    eval_doc = _optional_json(run_dir, "eval_report.json")
    curve_doc = _optional_json(run_dir, "data_curve.json")
    sweep_doc = _optional_json(run_dir, "arch_sweep.json")
    config = manifest.get("config", {})

    rows: list[tuple[str, str, str]] = []
    rows.append(("Q1", "compute resources", _machine_line(manifest)))

    if ledger_doc is not None:
        n_samples = config.get("space", {}).get("n_samples", "?")
        rows.append(
            ("Q2", "data generation cost", f"T_dg = {_fmt_seconds(ledger_doc['t_dg'])} ({n_samples} solver runs)")
        )
    else:
        rows.append(("Q2", "data generation cost", "not measured"))

    if train_doc is not None:
        rows.append(
            (
                "Q3",
                "training cost",
                f"T_nt = {_fmt_seconds(train_doc['wall_time'])} ({train_doc['epochs_run']} epochs)",
            )
        )
    else:
        rows.append(("Q3", "training cost", "not measured"))

    if model_doc is not None:
        mlp = model_doc.get("mlp", model_doc)
        arch = f"layers {mlp['layer_sizes']}, transfers {mlp['transfers']}"
        if sweep_doc is not None:
            variants = ", ".join(
                f"{row['layer_sizes']} -> rmse {row['rmse_test']:.4g}" for row in sweep_doc["rows"]
            )
            arch += f"; sweep: {variants}"
        rows.append(("Q4", "architecture", arch))
    else:
        rows.append(("Q4", "architecture", "not measured"))

    if eval_doc is not None:
        train_rmse = eval_doc.get("rmse_train")
        val_rmse = eval_doc.get("rmse_val")
        detail = f"train RMSE {_fmt_rmse(train_rmse)}, val RMSE {_fmt_rmse(val_rmse)}"
        if train_rmse and val_rmse:
            detail += f", val/train ratio {val_rmse / train_rmse:.3g}"
        rows.append(("Q5", "over/under-fitting gap", detail))
    else:
        rows.append(("Q5", "over/under-fitting gap", "not measured"))

    train_cfg = config.get("train")
    if train_cfg is not None:
        detail = (
            f"learning rate {train_cfg['learning_rate']}, stop tolerance {train_cfg['stop_tolerance']}"
        )
        if train_doc is not None:
            detail += f", {train_doc['epochs_run']} epochs ({train_doc['stop_reason']})"
        rows.append(("Q6", "rate, tolerance, epochs", detail))
    else:
        rows.append(("Q6", "rate, tolerance, epochs", "not measured"))

    if curve_doc is not None:
        points = ", ".join(f"n={r['n_samples']} -> {r['rmse_test']:.4g}" for r in curve_doc["seed_means"])
        rows.append(("Q7", "data requirement curve", f"{points} (per-seed rows in data_curve.csv)"))
    elif eval_doc is not None and config.get("space") is not None:
        rows.append(
            (
                "Q7",
                "data requirement curve",
                f"single point: test RMSE {_fmt_rmse(eval_doc.get('rmse_test'))} at "
                f"n={config['space'].get('n_samples')} (sweep not measured)",
            )
        )
    else:
        rows.append(("Q7", "data requirement curve", "not measured"))

    if eval_doc is not None:
        curve = ", ".join(f"x{m:g} -> {r:.4g}" for m, r in eval_doc["extrapolation_curve"])
        rows.append(("Q8", "extrapolation error", curve or "not measured"))
        transfer = eval_doc.get("discretization_transfer")
        rows.append(
            (
                "Q9",
                "discretization transfer",
                "not measured" if transfer is None else f"RMSE {transfer:.6g} on the 2x finer grid",
            )
        )
        table = ", ".join(f"delta {d:g} -> max dev {v:.4g}" for d, v in eval_doc["sensitivity_table"])
        rows.append(("Q10", "input sensitivity", table or "not measured"))
    else:
        rows.append(("Q8", "extrapolation error", "not measured"))
        rows.append(("Q9", "discretization transfer", "not measured"))
        rows.append(("Q10", "input sensitivity", "not measured"))

    lines = [f"run report: {run_dir}", "-" * 72]
    for tag, label, value in rows:
        lines.append(f"{tag:<4}{label:<26}: {value}")
    lines.append("-" * 72)

    if eval_doc is not None:
        lines.append(f"    physics check (BC gap)    : mean {eval_doc['bc_violation_mean']:.6g}")
    if ledger_doc is not None:
        ledger = CostLedger(
            t_dg=ledger_doc["t_dg"],
            t_nt=ledger_doc["t_nt"],
            t_pr=ledger_doc["t_pr"],
            t_solve=ledger_doc["t_solve"],
            n_predictions=ledger_doc["n_predictions"],
            repetitions=ledger_doc.get("repetitions", 1),
        )
        n_star = break_even(ledger)
        verdict = "never" if n_star is None else str(n_star)
        lines.append(
            f"    break-even N              : {verdict} "
            f"(t_pr {ledger.t_pr:.6g} s vs t_solve {ledger.t_solve:.6g} s)"
        )
        lines.append(
            f"    total time at N={ledger.n_predictions:<9}: {_fmt_seconds(total_time(ledger))}"
        )
    return "\n".join(lines) + "\n"
