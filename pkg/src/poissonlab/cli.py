"""Command-line front end for the lab.

Subcommands map one-to-one onto pipeline stages: `solve` runs the
classical solvers, `fit` the least-squares experiment, `train-ann` the
steepest-descent experiment, `surrogate` the full generate/split/train/
evaluate/measure pipeline, `breakeven` the what-if cost calculator, and
`report` renders a completed run as the ten-question table.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 missing
input. Artifacts that are inherently CSV (datasets) or inherently JSON
(models, reports, manifest) are always written; plot-ready curve CSVs
are emitted only when "csv" is among the requested formats.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import ann, costs, pde, regress, surrogate
from .config import ExperimentConfig, load_config, override_seeds, parse_config
from .errors import ConfigError, ParameterError, ShapeError, SingularMatrixError
from .fileio import write_csv, write_json
from .manifest import write_manifest
from .report import build_report


def _resolve_out_dir(cfg: ExperimentConfig, args) -> Path:
    if args.out is not None:
        out = Path(args.out)
    elif cfg.output is not None:
        out = Path(cfg.output.directory)
    else:
        out = Path("out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _formats(cfg: ExperimentConfig, args) -> tuple:
    if args.format is not None:
        return (args.format,)
    if cfg.output is not None:
        return cfg.output.formats
    return ("csv", "json")


def cmd_solve(cfg: ExperimentConfig, out_dir: Path, formats) -> list:
    cfg.require("problems")
    files = []
    combined = []
    for i, problem in enumerate(cfg.problems):
        analytic = pde.solve_analytic(problem, cfg.n_nodes)
        fdm = pde.solve_fdm(problem, cfg.n_nodes)
        for field in (analytic, fdm):
            name = f"solution_{i}_{field.provenance}.csv"
            write_csv(out_dir / name, ("x", "y", "provenance"), field.csv_rows())
            files.append((name, True))
        combined.extend(
            (i, problem.g, problem.y0, problem.y1, x, y)
            for x, y in zip(analytic.nodes, analytic.values)
        )
    write_csv(out_dir / "figure1.csv", ("series", "g", "y0", "y1", "x", "y"), combined)
    files.append(("figure1.csv", True))
    write_manifest(out_dir, cfg.raw, seeds={}, timings={}, files=files)
    print(f"wrote {len(files)} solution files to {out_dir}")
    return files


def cmd_fit(cfg: ExperimentConfig, out_dir: Path, formats) -> list:
    cfg.require("regression")
    r = cfg.regression
    dataset = regress.generate_synthetic(
        n=r.n,
        true_w=r.true_w,
        true_b=r.true_b,
        x_range=r.x_range,
        noise_amplitude=r.noise_amplitude,
        seed=r.seed,
    )
    model = regress.fit_least_squares(dataset)

    files = []
    write_csv(out_dir / "dataset.csv", ("x", "y"), zip(dataset.inputs, dataset.targets))
    files.append(("dataset.csv", True))
    write_json(out_dir / "dataset.json", dataset.meta)
    files.append(("dataset.json", True))
    write_json(out_dir / "model.json", {"w": model.w, "b": model.b})
    files.append(("model.json", True))
    line_x = np.linspace(r.x_range[0], r.x_range[1], r.n)
    write_csv(
        out_dir / "fit_line.csv",
        ("x", "y_true", "y_fit"),
        zip(line_x, r.true_w * line_x + r.true_b, model.predict(line_x)),
    )
    files.append(("fit_line.csv", True))
    write_manifest(out_dir, cfg.raw, seeds={"regression_seed": r.seed}, timings={}, files=files)
    print(f"fitted w={model.w:.6g} b={model.b:.6g}; artifacts in {out_dir}")
    return files


def _build_ann_model(cfg: ExperimentConfig) -> ann.MlpModel:
    spec = cfg.ann_spec
    transfers = spec.transfers or ann.default_transfers(spec.layer_sizes)
    if spec.init_weights is not None or spec.init_biases is not None:
        if spec.init_weights is None or spec.init_biases is None:
            raise ConfigError("ann: init_weights and init_biases must be given together")
        return ann.MlpModel(
            layer_sizes=spec.layer_sizes,
            weights=spec.init_weights,
            biases=spec.init_biases,
            transfers=transfers,
        )
    return ann.init_mlp(
        spec.layer_sizes,
        transfers=transfers,
        seed=cfg.train.init_seed,
        scheme=cfg.train.init_scheme,
    )


def cmd_train_ann(cfg: ExperimentConfig, out_dir: Path, formats) -> list:
    cfg.require("regression", "ann", "train")
    r = cfg.regression
    dataset = regress.generate_synthetic(
        n=r.n,
        true_w=r.true_w,
        true_b=r.true_b,
        x_range=r.x_range,
        noise_amplitude=r.noise_amplitude,
        seed=r.seed,
    )
    model = _build_ann_model(cfg)
    trained, report = ann.train_steepest_descent(model, dataset.inputs, dataset.targets, cfg.train)

    files = []
    write_json(out_dir / "model.json", trained.to_dict())
    files.append(("model.json", True))
    write_json(out_dir / "train_report.json", report.to_dict())
    files.append(("train_report.json", False))
    if "csv" in formats:
        write_csv(
            out_dir / "loss.csv",
            ("epoch", "loss"),
            ((i + 1, loss) for i, loss in enumerate(report.loss_history)),
        )
        files.append(("loss.csv", True))
    write_manifest(
        out_dir,
        cfg.raw,
        seeds={"regression_seed": r.seed, "init_seed": cfg.train.init_seed},
        timings={"t_nt": report.wall_time},
        files=files,
    )
    print(
        f"training stopped after {report.epochs_run} epochs ({report.stop_reason}); "
        f"artifacts in {out_dir}"
    )
    return files


def cmd_surrogate(cfg: ExperimentConfig, out_dir: Path, formats) -> list:
    cfg.require("space", "arch", "train", "split", "eval", "costs")
    space = cfg.space
    dataset = surrogate.generate_dataset(space, cfg.n_nodes)
    dataset = surrogate.split_dataset(dataset, cfg.split_ratios, seed=cfg.split_seed)
    layer_sizes = cfg.arch.layer_sizes(cfg.n_nodes)
    transfers = cfg.arch.transfer_tags()
    model, train_report = surrogate.train_surrogate(dataset, layer_sizes, cfg.train, transfers)
    eval_report = surrogate.evaluate(
        model,
        dataset,
        space,
        cfg.eval_spec.multipliers,
        cfg.eval_spec.perturbations,
        n_fresh=cfg.eval_spec.n_fresh,
        seed=cfg.eval_spec.seed,
    )

    probe = dataset.inputs[0]
    problem = pde.PoissonProblem(
        g=float(probe[0]), x0=space.x0, x1=space.x1, y0=float(probe[1]), y1=float(probe[2])
    )
    ledger = costs.measure(
        t_dg=dataset.generation_time,
        t_nt=train_report.wall_time,
        predict_once=lambda: model.predict(probe),
        solve_once=lambda: pde.solve_fdm(problem, cfg.n_nodes),
        n_predictions=cfg.cost_spec.n_predictions,
        repetitions=cfg.cost_spec.repetitions,
    )
    n_star = costs.break_even(ledger)

    files = []
    write_csv(
        out_dir / "inputs.csv",
        ("g", "y0", "y1", "split"),
        (
            (row[0], row[1], row[2], tag)
            for row, tag in zip(dataset.inputs, dataset.split)
        ),
    )
    files.append(("inputs.csv", True))
    write_csv(
        out_dir / "outputs.csv",
        tuple(f"y_{j}" for j in range(dataset.grid.shape[0])),
        dataset.outputs,
    )
    files.append(("outputs.csv", True))
    write_json(
        out_dir / "dataset.json",
        {
            "grid": dataset.grid,
            "seeds": dataset.seeds,
            "sampling": space.sampling,
            "n_samples": dataset.n_samples,
            "n_nodes": cfg.n_nodes,
            "split_counts": {tag: int(dataset.rows_for(tag).size) for tag in surrogate.SPLIT_TAGS},
        },
    )
    files.append(("dataset.json", True))
    write_json(out_dir / "model.json", model.to_dict())
    files.append(("model.json", True))
    write_json(out_dir / "train_report.json", train_report.to_dict())
    files.append(("train_report.json", False))
    write_json(out_dir / "eval_report.json", eval_report.to_dict())
    files.append(("eval_report.json", True))
    if "csv" in formats:
        write_csv(
            out_dir / "loss.csv",
            ("epoch", "loss"),
            ((i + 1, loss) for i, loss in enumerate(train_report.loss_history)),
        )
        files.append(("loss.csv", True))
        write_csv(
            out_dir / "extrapolation.csv",
            ("range_multiplier", "rmse"),
            eval_report.extrapolation_curve,
        )
        files.append(("extrapolation.csv", True))
        write_csv(
            out_dir / "sensitivity.csv",
            ("input_perturbation", "max_output_deviation"),
            eval_report.sensitivity_table,
        )
        files.append(("sensitivity.csv", True))

    if cfg.data_curve is not None:
        rows = surrogate.data_requirement_curve(
            space,
            cfg.n_nodes,
            cfg.data_curve["sizes"],
            cfg.data_curve["seeds"],
            layer_sizes,
            cfg.train,
            ratios=cfg.split_ratios,
            transfers=transfers,
        )
        seed_means = [
            {
                "n_samples": size,
                "rmse_test": float(np.mean([r[2] for r in rows if r[0] == size])),
            }
            for size in cfg.data_curve["sizes"]
        ]
        write_json(out_dir / "data_curve.json", {"rows": rows, "seed_means": seed_means})
        files.append(("data_curve.json", True))
        if "csv" in formats:
            write_csv(out_dir / "data_curve.csv", ("n_samples", "seed", "rmse_test"), rows)
            files.append(("data_curve.csv", True))

    if cfg.arch_sweep is not None:
        sweep_rows = surrogate.architecture_sweep(
            dataset,
            [(3, *hidden, cfg.n_nodes) for hidden in cfg.arch_sweep],
            cfg.train,
        )
        write_json(
            out_dir / "arch_sweep.json",
            {
                "rows": [
                    {
                        "layer_sizes": layout,
                        "rmse_test": rmse,
                        "epochs_run": epochs,
                        "wall_time": seconds,
                    }
                    for layout, rmse, epochs, seconds in sweep_rows
                ]
            },
        )
        files.append(("arch_sweep.json", False))

    write_json(
        out_dir / "cost_ledger.json",
        {
            **ledger.to_dict(),
            "break_even": "never" if n_star is None else n_star,
            "total_time": costs.total_time(ledger),
        },
    )
    files.append(("cost_ledger.json", False))

    write_manifest(
        out_dir,
        cfg.raw,
        seeds={
            "master_seed": space.master_seed,
            "split_seed": cfg.split_seed,
            "init_seed": cfg.train.init_seed,
            "eval_seed": cfg.eval_spec.seed,
        },
        timings={
            "t_dg": ledger.t_dg,
            "t_nt": ledger.t_nt,
            "t_pr": ledger.t_pr,
            "t_solve": ledger.t_solve,
            "total_time": costs.total_time(ledger),
            "break_even": "never" if n_star is None else n_star,
        },
        files=files,
    )
    rmse = eval_report.rmse_test
    print(
        f"surrogate run complete: test RMSE "
        f"{'absent' if rmse is None else format(rmse, '.6g')}, "
        f"break-even N {'never' if n_star is None else n_star}; artifacts in {out_dir}"
    )
    return files


def cmd_breakeven(cfg: ExperimentConfig, out_dir: Path, formats) -> list:
    cfg.require("ledger")
    spec = cfg.ledger
    ledger = costs.CostLedger(
        t_dg=spec.t_dg,
        t_nt=spec.t_nt,
        t_pr=spec.t_pr,
        t_solve=spec.t_solve,
        n_predictions=spec.n_predictions,
    )
    n_star = costs.break_even(ledger)
    doc = {
        **ledger.to_dict(),
        "break_even": "never" if n_star is None else n_star,
        "total_time": costs.total_time(ledger),
    }
    write_json(out_dir / "breakeven.json", doc)
    write_manifest(out_dir, cfg.raw, seeds={}, timings={}, files=[("breakeven.json", True)])
    print(f"break-even N : {'never' if n_star is None else n_star}")
    print(f"total time at N={ledger.n_predictions}: {costs.total_time(ledger):.6g} s")
    return [("breakeven.json", True)]


COMMANDS = {
    "solve": cmd_solve,
    "fit": cmd_fit,
    "train-ann": cmd_train_ann,
    "surrogate": cmd_surrogate,
    "breakeven": cmd_breakeven,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poissonlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON experiment config")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--seed", type=int, default=None, help="override every seed in the config")
        p.add_argument("--format", choices=("csv", "json"), default=None)
    report_parser = sub.add_parser("report")
    report_parser.add_argument("--run", required=True, help="run directory containing manifest.json")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            sys.stdout.write(build_report(args.run))
            return 0
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = parse_config(override_seeds(cfg.raw, args.seed))
        out_dir = _resolve_out_dir(cfg, args)
        COMMANDS[args.command](cfg, out_dir, _formats(cfg, args))
        return 0
    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ShapeError, SingularMatrixError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
