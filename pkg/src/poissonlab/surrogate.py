"""Parametric surrogate pipeline: sample (g, y0, y1), solve each case with
the finite-difference solver, train an MLP mapping parameters to nodal
values, and measure how the surrogate holds up in and out of range.

Data generation derives one child seed per sample from the master seed,
so results are bit-identical no matter how many workers generate them.
Model inputs are standardized to zero mean and unit range on the train
split; the offsets live inside the trained artifact so predictions stay
well defined.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import ann
from .errors import ParameterError, ShapeError
from .pde import PoissonProblem, solve_fdm
from .linalg import as_matrix

SAMPLINGS = ("uniform_random", "grid")
SPLIT_TAGS = ("train", "val", "test")

THREADS_ENV_VAR = "POISSONLAB_THREADS"

# Seed-tree branch labels: generation draws under (0, i), evaluation
# draws under (1, multiplier_index, i).
_BRANCH_GENERATE = 0
_BRANCH_EVAL = 1


def sub_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Child generator for a fixed position in the seed tree."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)


@dataclass(frozen=True)
class ParameterSpace:
    """Sampling ranges for (g, y0, y1) over a fixed domain [x0, x1]."""

    g_range: tuple
    y0_range: tuple
    y1_range: tuple
    x0: float
    x1: float
    sampling: str
    n_samples: int
    master_seed: int

    def __post_init__(self):
        for name in ("g_range", "y0_range", "y1_range"):
            lo, hi = getattr(self, name)
            object.__setattr__(self, name, (float(lo), float(hi)))
            if not lo <= hi:
                raise ParameterError(f"{name} must satisfy lo <= hi, got [{lo}, {hi}]")
        if not self.x0 < self.x1:
            raise ParameterError(f"need x0 < x1, got [{self.x0}, {self.x1}]")
        if self.n_samples < 1:
            raise ParameterError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.sampling not in SAMPLINGS:
            raise ParameterError(f"sampling must be one of {SAMPLINGS}, got {self.sampling!r}")

    @property
    def ranges(self) -> tuple:
        return (self.g_range, self.y0_range, self.y1_range)


@dataclass
class SurrogateDataset:
    """Sampled inputs, solver outputs on a shared grid, and split tags."""

    inputs: np.ndarray
    outputs: np.ndarray
    grid: np.ndarray
    split: list
    generation_time: float = 0.0
    seeds: dict = field(default_factory=dict)

    def __post_init__(self):
        self.inputs = as_matrix(self.inputs)
        self.outputs = as_matrix(self.outputs)
        self.grid = np.asarray(self.grid, dtype=float)
        self.split = list(self.split)
        if self.inputs.shape[1] != 3:
            raise ShapeError(f"inputs must be (n, 3), got {self.inputs.shape}")
        if self.outputs.shape[0] != self.inputs.shape[0]:
            raise ShapeError("inputs and outputs must have equal row counts")
        if self.outputs.shape[1] != self.grid.shape[0]:
            raise ShapeError("output columns must match the grid length")
        if len(self.split) != self.inputs.shape[0]:
            raise ShapeError("one split tag per sample required")
        for tag in self.split:
            if tag not in SPLIT_TAGS:
                raise ParameterError(f"unknown split tag {tag!r}")

    @property
    def n_samples(self) -> int:
        return self.inputs.shape[0]

    def rows_for(self, tag: str) -> np.ndarray:
        return np.array([i for i, t in enumerate(self.split) if t == tag], dtype=int)


def _draw_sample(space: ParameterSpace, index: int) -> np.ndarray:
    rng = sub_rng(space.master_seed, _BRANCH_GENERATE, index)
    return np.array([rng.uniform(lo, hi) for lo, hi in space.ranges])


def sample_inputs(space: ParameterSpace) -> np.ndarray:
    """(n_samples, 3) parameter draws, uniform per-sample or a cube grid.

    Grid sampling requires n_samples to be a perfect cube and lays the
    samples out as the cartesian product of per-axis linspaces.
    """
    if space.sampling == "uniform_random":
        return np.vstack([_draw_sample(space, i) for i in range(space.n_samples)])
    per_axis = round(space.n_samples ** (1.0 / 3.0))
    if per_axis**3 != space.n_samples:
        raise ParameterError(
            f"grid sampling needs a perfect-cube n_samples, got {space.n_samples}"
        )
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in space.ranges]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.reshape(-1) for m in mesh])


def _solve_row(space: ParameterSpace, params: np.ndarray, n_nodes: int) -> np.ndarray:
    problem = PoissonProblem(
        g=float(params[0]), x0=space.x0, x1=space.x1, y0=float(params[1]), y1=float(params[2])
    )
    return solve_fdm(problem, n_nodes).values


def generate_dataset(space: ParameterSpace, n_nodes: int) -> SurrogateDataset:
    """Run one finite-difference solve per sampled parameter set.

    Parallel workers (POISSONLAB_THREADS) only split the solve loop; the
    per-sample seeding keeps the result independent of worker count. A
    failing solve aborts with the offending sample index.
    """
    started = time.perf_counter()
    inputs = sample_inputs(space)
    grid = np.linspace(space.x0, space.x1, n_nodes)
    workers = int(os.environ.get(THREADS_ENV_VAR, "1"))

    def solve_at(i: int) -> np.ndarray:
        try:
            return _solve_row(space, inputs[i], n_nodes)
        except Exception as exc:
            raise type(exc)(f"sample {i}: {exc}") from exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(solve_at, range(space.n_samples)))
    else:
        rows = [solve_at(i) for i in range(space.n_samples)]
    outputs = np.vstack(rows)
    return SurrogateDataset(
        inputs=inputs,
        outputs=outputs,
        grid=grid,
        split=["train"] * space.n_samples,
        generation_time=time.perf_counter() - started,
        seeds={"master_seed": int(space.master_seed)},
    )


def split_dataset(dataset: SurrogateDataset, ratios, seed: int) -> SurrogateDataset:
    """Assign train/val/test tags by seeded permutation and contiguous ratios.

    Rounding residue goes to train; zero val or test ratios simply leave
    those splits empty.
    """
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or any(r < 0 for r in ratios):
        raise ParameterError(f"ratios must be three non-negative numbers, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ParameterError(f"ratios must sum to 1, got {sum(ratios)}")
    n = dataset.n_samples
    n_val = int(n * ratios[1])
    n_test = int(n * ratios[2])
    n_train = n - n_val - n_test
    order = np.random.default_rng(seed).permutation(n)
    split = [""] * n
    for pos, row in enumerate(order):
        if pos < n_train:
            split[row] = "train"
        elif pos < n_train + n_val:
            split[row] = "val"
        else:
            split[row] = "test"
    seeds = dict(dataset.seeds)
    seeds["split_seed"] = int(seed)
    return SurrogateDataset(
        inputs=dataset.inputs.copy(),
        outputs=dataset.outputs.copy(),
        grid=dataset.grid.copy(),
        split=split,
        generation_time=dataset.generation_time,
        seeds=seeds,
    )


@dataclass
class SurrogateModel:
    """Trained MLP plus the input standardization baked into the artifact."""

    mlp: ann.MlpModel
    input_center: np.ndarray
    input_scale: np.ndarray
    grid: np.ndarray

    def __post_init__(self):
        self.input_center = np.asarray(self.input_center, dtype=float)
        self.input_scale = np.asarray(self.input_scale, dtype=float)
        self.grid = np.asarray(self.grid, dtype=float)
        if self.input_center.shape != (3,) or self.input_scale.shape != (3,):
            raise ShapeError("standardization parameters must have shape (3,)")
        if self.mlp.layer_sizes[-1] != self.grid.shape[0]:
            raise ShapeError("model output size must match the grid length")

    def standardize(self, raw_inputs) -> np.ndarray:
        x = np.atleast_2d(np.asarray(raw_inputs, dtype=float))
        return (x - self.input_center) / self.input_scale

    def predict(self, raw_inputs) -> np.ndarray:
        """(n, grid_size) nodal predictions for raw (g, y0, y1) rows."""
        return ann.predict_batch(self.mlp, self.standardize(raw_inputs))

    def to_dict(self) -> dict:
        return {
            "mlp": self.mlp.to_dict(),
            "input_center": self.input_center.tolist(),
            "input_scale": self.input_scale.tolist(),
            "grid": self.grid.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SurrogateModel":
        return cls(
            mlp=ann.MlpModel.from_dict(doc["mlp"]),
            input_center=doc["input_center"],
            input_scale=doc["input_scale"],
            grid=doc["grid"],
        )


def _standardization(train_inputs: np.ndarray) -> tuple:
    center = train_inputs.mean(axis=0)
    scale = train_inputs.max(axis=0) - train_inputs.min(axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    return center, scale


def train_surrogate(
    dataset: SurrogateDataset,
    layer_sizes,
    cfg: ann.TrainConfig,
    transfers=None,
) -> tuple:
    """Train on the train split only; returns (SurrogateModel, TrainReport)."""
    layer_sizes = tuple(int(s) for s in layer_sizes)
    if layer_sizes[0] != 3:
        raise ShapeError(f"surrogate input size must be 3, got {layer_sizes[0]}")
    if layer_sizes[-1] != dataset.grid.shape[0]:
        raise ShapeError(
            f"surrogate output size {layer_sizes[-1]} must match grid {dataset.grid.shape[0]}"
        )
    train_rows = dataset.rows_for("train")
    if train_rows.size == 0:
        raise ParameterError("train split is empty")
    center, scale = _standardization(dataset.inputs[train_rows])
    x = (dataset.inputs[train_rows] - center) / scale
    y = dataset.outputs[train_rows]
    model = ann.init_mlp(layer_sizes, transfers=transfers, seed=cfg.init_seed, scheme=cfg.init_scheme)
    trained, report = ann.train_steepest_descent(model, x, y, cfg)
    surrogate = SurrogateModel(mlp=trained, input_center=center, input_scale=scale, grid=dataset.grid)
    return surrogate, report


@dataclass
class EvalReport:
    """Accuracy of a trained surrogate, in range and beyond.

    Split metrics are None when the split is empty; extrapolation pairs
    (range multiplier, rmse); sensitivity pairs (input perturbation, max
    output deviation); bc_violation_mean is the mean gap between
    predicted end-node values and the boundary values the physics
    prescribes.
    """

    rmse_train: float | None
    rmse_val: float | None
    rmse_test: float | None
    extrapolation_curve: list
    sensitivity_table: list
    discretization_transfer: float | None
    bc_violation_mean: float

    def to_dict(self) -> dict:
        return {
            "rmse_train": self.rmse_train,
            "rmse_val": self.rmse_val,
            "rmse_test": self.rmse_test,
            "extrapolation_curve": [[float(m), float(r)] for m, r in self.extrapolation_curve],
            "sensitivity_table": [[float(d), float(v)] for d, v in self.sensitivity_table],
            "discretization_transfer": self.discretization_transfer,
            "bc_violation_mean": self.bc_violation_mean,
        }


def _rmse(predicted: np.ndarray, truth: np.ndarray) -> float:
    # Diverged models predict inf/nan; report that honestly instead of warning.
    with np.errstate(over="ignore", invalid="ignore"):
        diff = predicted - truth
        return float(np.sqrt(np.mean(diff * diff)))


def scaled_space(space: ParameterSpace, multiplier: float) -> ParameterSpace:
    """Ranges widened about their midpoints by the multiplier."""
    def scale(rng):
        lo, hi = rng
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo) * multiplier
        return (mid - half, mid + half)

    return ParameterSpace(
        g_range=scale(space.g_range),
        y0_range=scale(space.y0_range),
        y1_range=scale(space.y1_range),
        x0=space.x0,
        x1=space.x1,
        sampling=space.sampling,
        n_samples=space.n_samples,
        master_seed=space.master_seed,
    )


def evaluate(
    model: SurrogateModel,
    dataset: SurrogateDataset,
    space: ParameterSpace,
    extrap_multipliers,
    perturbations,
    n_fresh: int = 32,
    seed: int = 0,
) -> EvalReport:
    """Score a trained surrogate against fresh solver runs.

    Interpolation: RMSE per split against the stored solver outputs.
    Extrapolation: for each multiplier, n_fresh parameter draws from the
    widened ranges are re-solved and compared. Sensitivity: each input
    of every probe row is nudged by +-delta and the largest output
    deviation is recorded. Discretization transfer: predictions are
    linearly resampled onto a 2x finer solver grid and compared there.
    Probe rows are the test split, or every row when the test split is
    empty.
    """
    if n_fresh < 1:
        raise ParameterError(f"n_fresh must be >= 1, got {n_fresh}")
    n_nodes = dataset.grid.shape[0]
    predictions = model.predict(dataset.inputs)

    split_rmse = {}
    for tag in SPLIT_TAGS:
        rows = dataset.rows_for(tag)
        split_rmse[tag] = (
            _rmse(predictions[rows], dataset.outputs[rows]) if rows.size else None
        )

    bc_gap = 0.5 * (
        np.abs(predictions[:, 0] - dataset.inputs[:, 1])
        + np.abs(predictions[:, -1] - dataset.inputs[:, 2])
    )
    bc_violation_mean = float(np.mean(bc_gap))

    curve = []
    for m_index, multiplier in enumerate(extrap_multipliers):
        wider = scaled_space(space, float(multiplier))
        fresh = np.empty((n_fresh, 3))
        for i in range(n_fresh):
            rng = sub_rng(seed, _BRANCH_EVAL, m_index, i)
            fresh[i] = [rng.uniform(lo, hi) for lo, hi in wider.ranges]
        truth = np.vstack([_solve_row(wider, row, n_nodes) for row in fresh])
        curve.append((float(multiplier), _rmse(model.predict(fresh), truth)))

    probe_rows = dataset.rows_for("test")
    if probe_rows.size == 0:
        probe_rows = np.arange(dataset.n_samples)
    probes = dataset.inputs[probe_rows]
    base = model.predict(probes)

    sensitivity = []
    for delta in perturbations:
        delta = float(delta)
        worst = 0.0
        for axis in range(3):
            for sign in (+1.0, -1.0):
                nudged = probes.copy()
                nudged[:, axis] += sign * delta
                worst = max(worst, float(np.max(np.abs(model.predict(nudged) - base))))
        sensitivity.append((delta, worst))

    fine_nodes = 2 * (n_nodes - 1) + 1
    fine_grid = np.linspace(space.x0, space.x1, fine_nodes)
    fine_truth = np.vstack([_solve_row(space, row, fine_nodes) for row in probes])
    fine_pred = np.vstack([np.interp(fine_grid, dataset.grid, row) for row in base])
    transfer = _rmse(fine_pred, fine_truth)

    return EvalReport(
        rmse_train=split_rmse["train"],
        rmse_val=split_rmse["val"],
        rmse_test=split_rmse["test"],
        extrapolation_curve=curve,
        sensitivity_table=sensitivity,
        discretization_transfer=transfer,
        bc_violation_mean=bc_violation_mean,
    )


def data_requirement_curve(
    space: ParameterSpace,
    n_nodes: int,
    sizes,
    seeds,
    layer_sizes,
    cfg: ann.TrainConfig,
    ratios=(0.8, 0.1, 0.1),
    transfers=None,
) -> list:
    """Test RMSE as a function of sample count, one row per (size, seed).

    Each run regenerates, splits and trains from scratch with the
    master seed replaced by the sweep seed. Rows are (n_samples, seed,
    rmse_test).
    """
    rows = []
    for size in sizes:
        for seed in seeds:
            sub_space = ParameterSpace(
                g_range=space.g_range,
                y0_range=space.y0_range,
                y1_range=space.y1_range,
                x0=space.x0,
                x1=space.x1,
                sampling=space.sampling,
                n_samples=int(size),
                master_seed=int(seed),
            )
            dataset = generate_dataset(sub_space, n_nodes)
            dataset = split_dataset(dataset, ratios, seed=int(seed))
            model, _ = train_surrogate(dataset, layer_sizes, cfg, transfers=transfers)
            test_rows = dataset.rows_for("test")
            if test_rows.size == 0:
                test_rows = np.arange(dataset.n_samples)
            rmse = _rmse(model.predict(dataset.inputs[test_rows]), dataset.outputs[test_rows])
            rows.append((int(size), int(seed), rmse))
    return rows


def architecture_sweep(dataset: SurrogateDataset, archs, cfg: ann.TrainConfig) -> list:
    """Train one model per layer layout; rows are (layout, test rmse, epochs, seconds)."""
    rows = []
    for layer_sizes in archs:
        model, report = train_surrogate(dataset, layer_sizes, cfg)
        test_rows = dataset.rows_for("test")
        if test_rows.size == 0:
            test_rows = np.arange(dataset.n_samples)
        rmse = _rmse(model.predict(dataset.inputs[test_rows]), dataset.outputs[test_rows])
        rows.append((list(layer_sizes), rmse, report.epochs_run, report.wall_time))
    return rows
