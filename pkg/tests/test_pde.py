import numpy as np
import numpy.testing as npt
import pytest

from poissonlab.errors import ParameterError
from poissonlab.pde import (
    PoissonProblem,
    demo_combinations,
    solve_analytic,
    solve_fdm,
    sweep_analytic,
)


def random_problem(rng):
    x0 = rng.uniform(-2.0, 2.0)
    return PoissonProblem(
        g=rng.uniform(-10.0, 10.0),
        x0=x0,
        x1=x0 + rng.uniform(0.5, 3.0),
        y0=rng.uniform(-5.0, 5.0),
        y1=rng.uniform(-5.0, 5.0),
    )


def test_analytic_homogeneous_is_zero():
    field = solve_analytic(PoissonProblem(0.0, 0.0, 1.0, 0.0, 0.0), 11)
    npt.assert_array_equal(field.values, np.zeros(11))


def test_analytic_laplace_linear_data():
    field = solve_analytic(PoissonProblem(0.0, 0.0, 1.0, 0.0, 1.0), 11)
    npt.assert_allclose(field.values, field.nodes, atol=1e-15)


def test_analytic_parabola():
    # -y'' = 2 on [0,1] with zero ends integrates to y = x(1-x).
    field = solve_analytic(PoissonProblem(2.0, 0.0, 1.0, 0.0, 0.0), 11)
    npt.assert_allclose(field.values, field.nodes * (1.0 - field.nodes), atol=1e-15)
    assert field.values[5] == pytest.approx(0.25, abs=1e-15)


def test_fdm_constant_solution():
    for n in (3, 7, 50):
        field = solve_fdm(PoissonProblem(0.0, 0.0, 1.0, 3.0, 3.0), n)
        npt.assert_allclose(field.values, np.full(n, 3.0), atol=1e-13)


def test_fdm_matches_analytic_on_parabola():
    problem = PoissonProblem(2.0, 0.0, 1.0, 0.0, 0.0)
    gap = solve_fdm(problem, 11).values - solve_analytic(problem, 11).values
    assert np.max(np.abs(gap)) < 1e-12


def test_fdm_matches_analytic_shifted_domain():
    problem = PoissonProblem(1.0, 0.0, 2.0, 1.0, -1.0)
    gap = solve_fdm(problem, 101).values - solve_analytic(problem, 101).values
    assert np.max(np.abs(gap)) < 1e-12


def test_fdm_quadratic_exactness_random_problems():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        problem = random_problem(rng)
        n = int(rng.integers(3, 150))
        gap = solve_fdm(problem, n).values - solve_analytic(problem, n).values
        assert np.max(np.abs(gap)) < 1e-10


def test_boundary_values_bit_exact():
    rng = np.random.default_rng(7)
    for _ in range(20):
        problem = random_problem(rng)
        for field in (solve_analytic(problem, 33), solve_fdm(problem, 33)):
            assert field.values[0] == problem.y0
            assert field.values[-1] == problem.y1
            assert field.nodes[0] == problem.x0
            assert field.nodes[-1] == problem.x1


def test_superposition_linearity():
    rng = np.random.default_rng(11)
    for _ in range(20):
        g, y0, y1, c = rng.uniform(-4.0, 4.0, size=4)
        base = solve_fdm(PoissonProblem(g, 0.0, 1.0, y0, y1), 41).values
        scaled = solve_fdm(PoissonProblem(c * g, 0.0, 1.0, c * y0, c * y1), 41).values
        npt.assert_allclose(scaled, c * base, atol=1e-10)


def test_solver_determinism():
    problem = PoissonProblem(3.0, -1.0, 2.0, 0.5, -0.5)
    a = solve_fdm(problem, 101)
    b = solve_fdm(problem, 101)
    npt.assert_array_equal(a.values, b.values)
    npt.assert_array_equal(a.nodes, b.nodes)


def test_fdm_rejects_tiny_grid():
    with pytest.raises(ParameterError):
        solve_fdm(PoissonProblem(1.0, 0.0, 1.0, 0.0, 0.0), 2)


def test_problem_validation():
    with pytest.raises(ParameterError):
        PoissonProblem(1.0, 1.0, 1.0, 0.0, 0.0)
    with pytest.raises(ParameterError):
        PoissonProblem(float("nan"), 0.0, 1.0, 0.0, 0.0)


def test_sweep_matches_individual_solves():
    problems = demo_combinations()
    fields = sweep_analytic(problems, 21)
    assert len(fields) == 4
    for problem, field in zip(problems, fields):
        npt.assert_array_equal(field.values, solve_analytic(problem, 21).values)
    # duplicates give identical fields
    twice = sweep_analytic([problems[1], problems[1]], 21)
    npt.assert_array_equal(twice[0].values, twice[1].values)


def test_sweep_rejects_empty():
    with pytest.raises(ParameterError):
        sweep_analytic([], 11)


def test_csv_rows_layout():
    field = solve_analytic(PoissonProblem(0.0, 0.0, 1.0, 0.0, 1.0), 3)
    rows = field.csv_rows()
    assert rows[0] == (0.0, 0.0, "analytic")
    assert rows[-1] == (1.0, 1.0, "analytic")
