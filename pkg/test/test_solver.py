from fractions import Fraction

import numpy as np
import pytest
import shilov_eq.solver as solver
import test.strategies as myst
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from shilov_eq.equidistribution import chi_a_count, eq_measure
from shilov_eq.errors import Computation_Error, Dominated_Point_Error, Validation_Error
from shilov_eq.hahn import t_power
from shilov_eq.metrics import metric_spec, monomial_point
from shilov_eq.polys import chi, variable

F = Fraction

TENT_WEIGHTS = ((F(0), F(1)), (F(1), F(0)))
CORNER_WEIGHTS = (
    (F(1), F(0), F(0)),
    (F(0), F(1), F(0)),
    (F(0), F(0), F(1)),
)


def test_solve_problem_static():
    problem = solver.solve_problem(1, [(0, 1), (1, 0)], ["3/4", "1/4"])
    assert problem.weights == TENT_WEIGHTS
    assert problem.target == (F(3, 4), F(1, 4))
    with pytest.raises(Validation_Error):
        solver.solve_problem(1, [], [])
    with pytest.raises(Validation_Error):
        solver.solve_problem(1, [(0, 1), (1, 0)], [1])
    with pytest.raises(Validation_Error):
        solver.solve_problem(1, [(0, 1), (1, 0)], ["1/2", "1/3"])
    with pytest.raises(Validation_Error):
        solver.solve_problem(1, [(0, 1), (1, 0)], [2, -1])
    with pytest.raises(Validation_Error):
        solver.solve_problem(1, [(0, 1, 0)], [1])


def test_cell_volumes_static():
    assert solver.cell_volumes(TENT_WEIGHTS, [0, 0]) == (F(1, 2), F(1, 2))
    assert solver.cell_volumes(TENT_WEIGHTS, [0.0, 0.5]) == (F(3, 4), F(1, 4))
    assert solver.cell_volumes(CORNER_WEIGHTS, [0, 0, 0]) == (F(1, 3),) * 3
    assert solver.objective(TENT_WEIGHTS, [0, 0], (F(1, 2), F(1, 2))) == 0.25


def test_hessian_static():
    H = solver.hessian(TENT_WEIGHTS, [0.0, 0.0])
    assert H == pytest.approx(np.array([[-0.5, 0.5], [0.5, -0.5]]))

    H = solver.hessian(CORNER_WEIGHTS, [0.0, 0.0, 0.0])
    assert H == pytest.approx(H.T)
    assert H.sum(axis=1) == pytest.approx(np.zeros(3))
    assert all(H[i, i] < 0 for i in range(3))


def test_gradient_check_static():
    target = (F(3, 4), F(1, 4))
    assert solver.gradient_check(TENT_WEIGHTS, [0.0, 0.1], target) < 1e-6
    assert solver.gradient_check(CORNER_WEIGHTS, [0.0, 0.1, -0.05], (F(1, 3),) * 3) < 1e-6


def test_solve_prescribed_static():
    result = solver.solve_prescribed(solver.solve_problem(1, TENT_WEIGHTS, ["3/4", "1/4"]))
    assert result.shifts == (0.0, 0.5)
    assert result.volumes == (F(3, 4), F(1, 4))
    assert result.residual == 0
    assert result.dropped == ()
    assert result.iterations == 1

    result = solver.solve_prescribed(solver.solve_problem(1, TENT_WEIGHTS, ["1/2", "1/2"]))
    assert result.shifts == (0.0, 0.0)
    assert result.iterations == 0


def test_solve_prescribed_drops_zero_targets():
    problem = solver.solve_problem(1, TENT_WEIGHTS, [1, 0])
    result = solver.solve_prescribed(problem)
    assert result.dropped == (1,)
    assert result.shifts == (0.0, 2.0)
    assert result.volumes == (1, 0)
    assert eq_measure(solver.solved_spec(problem, result)).lambdas == (1, 0)


def test_solve_prescribed_on_the_plane():
    problem = solver.solve_problem(2, CORNER_WEIGHTS, ["1/2", "1/4", "1/4"])
    result = solver.solve_prescribed(problem, tol=1e-7)
    assert result.residual <= F(1, 10**7)
    assert result.shifts[0] == 0.0
    assert [float(v) for v in result.volumes] == pytest.approx([0.5, 0.25, 0.25], abs=1e-6)
    assert result.shifts[1] == pytest.approx(result.shifts[2])


def test_solve_prescribed_errors():
    with pytest.raises(Dominated_Point_Error):
        solver.solve_prescribed(solver.solve_problem(1, [(0, 1), (1, 2)], ["1/2", "1/2"]))
    with pytest.raises(Validation_Error):
        solver.solve_prescribed(
            solver.solve_problem(3, [(0, 0, 0, 0), (0, 0, 0, 1)], ["1/2", "1/2"])
        )


def test_solve_result_json_static():
    result = solver.solve_prescribed(solver.solve_problem(1, TENT_WEIGHTS, ["3/4", "1/4"]))
    data = solver.solve_result_to_json(result)
    assert data == {
        "shifts": [0.0, 0.5],
        "volumes": ["3/4", "1/4"],
        "residual": 0.0,
        "dropped": [],
        "iterations": 1,
    }
    assert solver.solve_result_from_json(data) == result
    with pytest.raises(Validation_Error):
        solver.solve_result_from_json({"shifts": [0.0]})
    with pytest.raises(Validation_Error):
        solver.solve_result_from_json({**data, "volumes": ["x"]})


def test_peak_system_static():
    tent = metric_spec(1, [monomial_point((0, 1)), monomial_point((1, 0))])
    sections = solver.peak_system(tent)
    assert sections == [variable(1, 1), variable(1, 0)]
    assert solver.peak_matrix(tent, sections) == [[-1, 0], [0, -1]]
    with pytest.raises(Computation_Error):
        solver.peak_matrix(tent, list(reversed(sections)))
    with pytest.raises(Validation_Error):
        solver.peak_matrix(tent, sections[:1])

    flat = metric_spec(1, [monomial_point((0, 0))])
    assert solver.peak_system(flat) == [variable(1, 0, t_power(1))]
    assert solver.peak_matrix(flat, solver.peak_system(flat)) == [[-1]]

    tilted = metric_spec(1, [monomial_point((1, 0))])
    assert solver.peak_system(tilted) == [variable(1, 0)]


@st.composite
def line_problems(draw: st.DrawFn) -> solver.Solve_Problem:
    weights = draw(
        st.lists(
            st.tuples(myst.small_rationals, myst.small_rationals),
            min_size=2,
            max_size=3,
            unique_by=lambda w: w[1] - w[0],
        )
    )
    masses = draw(
        st.lists(
            st.integers(min_value=1, max_value=4),
            min_size=len(weights),
            max_size=len(weights),
        )
    )
    return solver.solve_problem(1, weights, [F(m, sum(masses)) for m in masses])


@settings(max_examples=15)
@given(line_problems())
def test_solver_reaches_the_target(problem: solver.Solve_Problem):
    result = solver.solve_prescribed(problem, tol=1e-6)
    assert result.residual <= F(1, 10**6)
    assert result.shifts[0] == 0.0
    assert solver.gradient_check(problem.weights, result.shifts, problem.target) < 1e-4


@st.composite
def problems(draw: st.DrawFn, allow_zero: bool = False) -> solver.Solve_Problem:
    """Problems on P^1 or P^2 with up to five points of distinct weight directions."""
    d = draw(st.integers(min_value=1, max_value=2))
    weights = draw(
        st.lists(
            st.tuples(*[st.integers(min_value=-2, max_value=2)] * (d + 1)),
            min_size=2,
            max_size=5,
            unique_by=lambda w: tuple(w_j - w[0] for w_j in w),
        )
    )
    masses = draw(
        st.lists(
            st.integers(min_value=0 if allow_zero else 1, max_value=4),
            min_size=len(weights),
            max_size=len(weights),
        )
    )
    assume(sum(masses) > 0)
    return solver.solve_problem(d, weights, [F(m, sum(masses)) for m in masses])


@settings(max_examples=10)
@given(problems())
def test_solver_reaches_a_tight_tolerance(problem: solver.Solve_Problem):
    result = solver.solve_prescribed(problem, tol=1e-9)
    assert result.residual <= F(1, 10**9)
    assert result.dropped == ()
    assert all(v > 0 for v in result.volumes)


@settings(max_examples=10)
@given(problems())
def test_ascent_never_decreases_the_functional(problem: solver.Solve_Problem):
    previous = None
    for state in solver.ascent_steps(problem.weights, problem.target):
        if previous is not None:
            assert state.value >= previous.value
            assert state.step > 0
        if max(abs(v - lam) for v, lam in zip(state.volumes, problem.target)) <= 1e-9:
            break
        previous = state
    else:
        pytest.fail("the ascent stopped before reaching the target")


@given(
    problems(),
    st.lists(myst.small_rationals, min_size=5, max_size=5),
    myst.small_rationals,
)
def test_common_shift_changes_nothing(problem: solver.Solve_Problem, shifts, k):
    c = shifts[: len(problem.weights)]
    moved = [c_i + k for c_i in c]
    assert solver.cell_volumes(problem.weights, moved) == solver.cell_volumes(
        problem.weights, c
    )
    assert solver.objective(problem.weights, moved, problem.target) == (
        solver.objective(problem.weights, c, problem.target)
    )


@settings(max_examples=10)
@given(problems(allow_zero=True))
def test_zero_targets_end_up_with_empty_cells(problem: solver.Solve_Problem):
    zeros = tuple(i for i, lam in enumerate(problem.target) if lam == 0)
    result = solver.solve_prescribed(problem, tol=1e-9)
    assert result.dropped == zeros
    assert all(result.volumes[i] == 0 for i in zeros)
    lambdas = eq_measure(solver.solved_spec(problem, result)).lambdas
    assert all(lambdas[i] == 0 for i in zeros)
    assert all(abs(lam - v) <= 1e-9 for lam, v in zip(lambdas, problem.target))


@settings(max_examples=5)
@given(line_problems())
def test_solved_shifts_give_the_target_counts(problem: solver.Solve_Problem):
    n = 500
    result = solver.solve_prescribed(problem, tol=1e-9)
    sigma = solver.solved_spec(problem, result)
    for a, lam in enumerate(problem.target):
        fraction = F(chi_a_count(sigma, a, n), chi(1, n))
        assert abs(fraction - lam) <= F(3, n) + F(1, 10**9)
