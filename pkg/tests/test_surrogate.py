import numpy as np
import numpy.testing as npt
import pytest

from poissonlab.ann import TrainConfig
from poissonlab.errors import ParameterError, ShapeError
from poissonlab.pde import PoissonProblem, solve_analytic, solve_fdm
from poissonlab.surrogate import (
    ParameterSpace,
    SurrogateModel,
    architecture_sweep,
    data_requirement_curve,
    evaluate,
    generate_dataset,
    sample_inputs,
    split_dataset,
    train_surrogate,
)


def linear_space(n_samples=16, master_seed=7, g_hi=4.0):
    return ParameterSpace(
        g_range=(0.0, g_hi),
        y0_range=(0.0, 0.0),
        y1_range=(0.0, 0.0),
        x0=0.0,
        x1=1.0,
        sampling="uniform_random",
        n_samples=n_samples,
        master_seed=master_seed,
    )


def quick_train_config(**overrides):
    defaults = dict(learning_rate=0.01, stop_tolerance=1e-14, max_epochs=5000, init_seed=0)
    defaults.update(overrides)
    return TrainConfig(**defaults)


# -- generation --------------------------------------------------------


def test_generate_single_homogeneous_sample():
    space = ParameterSpace(
        g_range=(0.0, 0.0),
        y0_range=(0.0, 0.0),
        y1_range=(0.0, 0.0),
        x0=0.0,
        x1=1.0,
        sampling="uniform_random",
        n_samples=1,
        master_seed=0,
    )
    ds = generate_dataset(space, 11)
    npt.assert_array_equal(ds.outputs, np.zeros((1, 11)))


def test_generate_grid_sampling_matches_analytic():
    space = ParameterSpace(
        g_range=(0.0, 2.0),
        y0_range=(-1.0, 1.0),
        y1_range=(0.0, 3.0),
        x0=0.0,
        x1=1.0,
        sampling="grid",
        n_samples=8,
        master_seed=0,
    )
    ds = generate_dataset(space, 21)
    assert ds.n_samples == 8
    for row_inputs, row_outputs in zip(ds.inputs, ds.outputs):
        problem = PoissonProblem(
            g=row_inputs[0], x0=0.0, x1=1.0, y0=row_inputs[1], y1=row_inputs[2]
        )
        exact = solve_analytic(problem, 21).values
        assert np.max(np.abs(row_outputs - exact)) < 1e-10


def test_generate_grid_requires_perfect_cube():
    space = linear_space(n_samples=10)
    space = ParameterSpace(
        g_range=space.g_range,
        y0_range=space.y0_range,
        y1_range=space.y1_range,
        x0=0.0,
        x1=1.0,
        sampling="grid",
        n_samples=10,
        master_seed=0,
    )
    with pytest.raises(ParameterError):
        sample_inputs(space)


def test_generate_deterministic_across_worker_counts(monkeypatch):
    space = linear_space(n_samples=12, master_seed=99)
    serial = generate_dataset(space, 31)
    monkeypatch.setenv("POISSONLAB_THREADS", "4")
    threaded = generate_dataset(space, 31)
    npt.assert_array_equal(serial.inputs, threaded.inputs)
    npt.assert_array_equal(serial.outputs, threaded.outputs)


def test_generate_ground_truth_fidelity():
    space = linear_space(n_samples=6, master_seed=3)
    ds = generate_dataset(space, 41)
    for row_inputs, row_outputs in zip(ds.inputs, ds.outputs):
        problem = PoissonProblem(
            g=row_inputs[0], x0=0.0, x1=1.0, y0=row_inputs[1], y1=row_inputs[2]
        )
        npt.assert_array_equal(row_outputs, solve_fdm(problem, 41).values)


def test_generate_outputs_carry_boundary_values():
    space = ParameterSpace(
        g_range=(-2.0, 2.0),
        y0_range=(-1.0, 1.0),
        y1_range=(-1.0, 1.0),
        x0=0.0,
        x1=1.0,
        sampling="uniform_random",
        n_samples=9,
        master_seed=5,
    )
    ds = generate_dataset(space, 17)
    npt.assert_array_equal(ds.outputs[:, 0], ds.inputs[:, 1])
    npt.assert_array_equal(ds.outputs[:, -1], ds.inputs[:, 2])


# -- splitting ---------------------------------------------------------


def test_split_ten_samples_80_10_10():
    ds = generate_dataset(linear_space(n_samples=10), 11)
    ds = split_dataset(ds, (0.8, 0.1, 0.1), seed=4)
    counts = {tag: ds.rows_for(tag).size for tag in ("train", "val", "test")}
    assert counts == {"train": 8, "val": 1, "test": 1}


def test_split_partitions_every_sample():
    ds = generate_dataset(linear_space(n_samples=23), 11)
    ds = split_dataset(ds, (0.6, 0.2, 0.2), seed=0)
    total = sum(ds.rows_for(tag).size for tag in ("train", "val", "test"))
    assert total == 23


def test_split_all_train_is_allowed():
    ds = generate_dataset(linear_space(n_samples=5), 11)
    ds = split_dataset(ds, (1.0, 0.0, 0.0), seed=1)
    assert ds.rows_for("train").size == 5
    assert ds.rows_for("val").size == 0
    assert ds.rows_for("test").size == 0


def test_split_deterministic():
    ds = generate_dataset(linear_space(n_samples=30), 11)
    a = split_dataset(ds, (0.8, 0.1, 0.1), seed=12)
    b = split_dataset(ds, (0.8, 0.1, 0.1), seed=12)
    assert a.split == b.split


def test_split_rejects_bad_ratios():
    ds = generate_dataset(linear_space(n_samples=5), 11)
    with pytest.raises(ParameterError):
        split_dataset(ds, (0.8, 0.1, 0.2), seed=0)
    with pytest.raises(ParameterError):
        split_dataset(ds, (1.2, -0.1, -0.1), seed=0)


# -- training ----------------------------------------------------------


def test_linear_case_trains_to_machine_accuracy():
    # With zero boundary values the map g -> solution is linear, so a
    # single purelin layer represents it exactly.
    space = linear_space(n_samples=32, master_seed=7)
    ds = split_dataset(generate_dataset(space, 21), (0.8, 0.1, 0.1), seed=3)
    model, report = train_surrogate(ds, (3, 21), quick_train_config(), transfers=("purelin",))
    assert report.stop_reason == "converged"
    test_rows = ds.rows_for("test")
    rmse = np.sqrt(np.mean((model.predict(ds.inputs[test_rows]) - ds.outputs[test_rows]) ** 2))
    assert rmse < 1e-6


def test_zero_variance_dataset_trains_to_constant():
    space = ParameterSpace(
        g_range=(2.0, 2.0),
        y0_range=(1.0, 1.0),
        y1_range=(0.0, 0.0),
        x0=0.0,
        x1=1.0,
        sampling="uniform_random",
        n_samples=4,
        master_seed=0,
    )
    ds = generate_dataset(space, 11)
    model, _ = train_surrogate(
        ds,
        (3, 11),
        quick_train_config(learning_rate=0.1, stop_tolerance=1e-30, max_epochs=20000),
        transfers=("purelin",),
    )
    rmse = np.sqrt(np.mean((model.predict(ds.inputs) - ds.outputs) ** 2))
    assert rmse < 1e-8


def test_tanh_architecture_never_raises():
    space = linear_space(n_samples=12, g_hi=2.0)
    mixed = ParameterSpace(
        g_range=(-2.0, 2.0),
        y0_range=(0.0, 0.0),
        y1_range=(0.0, 0.0),
        x0=0.0,
        x1=1.0,
        sampling="uniform_random",
        n_samples=12,
        master_seed=space.master_seed,
    )
    ds = split_dataset(generate_dataset(mixed, 11), (0.8, 0.1, 0.1), seed=2)
    _, report = train_surrogate(
        ds, (3, 8, 11), quick_train_config(learning_rate=0.001, max_epochs=200)
    )
    assert report.stop_reason in ("converged", "max_epochs")


def test_train_rejects_wrong_shapes():
    ds = generate_dataset(linear_space(n_samples=4), 11)
    with pytest.raises(ShapeError):
        train_surrogate(ds, (2, 11), quick_train_config())
    with pytest.raises(ShapeError):
        train_surrogate(ds, (3, 10), quick_train_config())


def test_model_json_round_trip():
    ds = generate_dataset(linear_space(n_samples=8), 11)
    model, _ = train_surrogate(ds, (3, 11), quick_train_config(max_epochs=50))
    clone = SurrogateModel.from_dict(model.to_dict())
    npt.assert_array_equal(clone.predict(ds.inputs), model.predict(ds.inputs))


# -- evaluation --------------------------------------------------------


@pytest.fixture(scope="module")
def linear_run():
    space = linear_space(n_samples=32, master_seed=7)
    ds = split_dataset(generate_dataset(space, 21), (0.8, 0.1, 0.1), seed=3)
    model, _ = train_surrogate(ds, (3, 21), quick_train_config(), transfers=("purelin",))
    report = evaluate(
        model, ds, space, (1.0, 2.0), (0.0, 0.01), n_fresh=16, seed=11
    )
    return model, ds, space, report


def test_evaluate_linear_case_interpolates_and_extrapolates(linear_run):
    _, _, _, report = linear_run
    assert report.rmse_test is not None and report.rmse_test < 1e-6
    curve = dict(report.extrapolation_curve)
    assert curve[2.0] < 1e-6


def test_evaluate_multiplier_one_close_to_test_rmse(linear_run):
    # Multiplier 1 is just fresh in-range sampling, so its RMSE should sit
    # near the held-out RMSE. The 3x bound was frozen after sweeping ten
    # independent (master_seed, split, init, eval) configurations, where
    # the observed ratio stayed within 0.84..1.64.
    _, _, _, report = linear_run
    curve = dict(report.extrapolation_curve)
    assert curve[1.0] <= 3.0 * report.rmse_test
    assert curve[1.0] >= report.rmse_test / 3.0


def test_evaluate_zero_perturbation_gives_zero_deviation(linear_run):
    _, _, _, report = linear_run
    table = dict(report.sensitivity_table)
    assert table[0.0] == 0.0
    assert table[0.01] > 0.0


def test_evaluate_reports_bc_violation(linear_run):
    _, _, _, report = linear_run
    assert report.bc_violation_mean >= 0.0
    assert report.discretization_transfer is not None


def test_evaluate_empty_test_split_reports_absent():
    space = linear_space(n_samples=8)
    ds = split_dataset(generate_dataset(space, 11), (1.0, 0.0, 0.0), seed=0)
    model, _ = train_surrogate(ds, (3, 11), quick_train_config(max_epochs=200), transfers=("purelin",))
    report = evaluate(model, ds, space, (1.0,), (0.01,), n_fresh=4, seed=1)
    assert report.rmse_test is None
    assert report.rmse_val is None
    assert report.rmse_train is not None


def test_evaluate_rejects_empty_fresh_draws(linear_run):
    model, ds, space, _ = linear_run
    with pytest.raises(ParameterError):
        evaluate(model, ds, space, (1.0,), (0.0,), n_fresh=0, seed=1)


def test_evaluate_deterministic():
    space = linear_space(n_samples=12)
    ds = split_dataset(generate_dataset(space, 11), (0.8, 0.1, 0.1), seed=5)
    model, _ = train_surrogate(ds, (3, 11), quick_train_config(max_epochs=300), transfers=("purelin",))
    a = evaluate(model, ds, space, (1.5,), (0.1,), n_fresh=8, seed=2)
    b = evaluate(model, ds, space, (1.5,), (0.1,), n_fresh=8, seed=2)
    assert a.extrapolation_curve == b.extrapolation_curve
    assert a.sensitivity_table == b.sensitivity_table


# -- sweeps ------------------------------------------------------------


def test_data_curve_rmse_non_increasing_on_seed_average():
    # Fixed epoch budget, no early stop: sample count then governs how
    # fast the quadratic modes contract, so more data means lower error.
    space = linear_space(n_samples=64)
    cfg = quick_train_config(stop_tolerance=1e-30, max_epochs=400)
    rows = data_requirement_curve(
        space, 21, sizes=(8, 16, 32), seeds=(0, 1, 2, 3, 4), layer_sizes=(3, 21),
        cfg=cfg, transfers=("purelin",),
    )
    means = [
        np.mean([rmse for size, _, rmse in rows if size == target])
        for target in (8, 16, 32)
    ]
    assert means[0] >= means[1] >= means[2]


def test_architecture_sweep_reports_each_layout():
    ds = split_dataset(generate_dataset(linear_space(n_samples=16), 11), (0.8, 0.1, 0.1), seed=1)
    rows = architecture_sweep(
        ds, [(3, 11), (3, 4, 11)], quick_train_config(learning_rate=0.001, max_epochs=100)
    )
    assert [row[0] for row in rows] == [[3, 11], [3, 4, 11]]
    assert all(row[1] >= 0.0 for row in rows)
