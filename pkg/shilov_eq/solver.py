"""
Prescribing the equidistribution measure.

Given weights ``w_i`` and target coefficients ``lambda*``, find shifts ``c``
such that the cell volumes ``V_i(c)`` of ``u -> min_i (<w_i, u> + c_i)``
equal ``lambda*``. The shifts maximize the concave functional

    F(c) = average over the simplex of min_i (<w_i, u> + c_i) - sum_i lambda*_i c_i

whose gradient is ``V(c) - lambda*``. Iterates are floats; every volume and
every value of ``F`` is evaluated exactly on the rational value of the float.
"""
from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, NamedTuple, Union

import numpy as np

from shilov_eq import defaults
from shilov_eq.errors import (
    Computation_Error,
    Dominated_Point_Error,
    Target_Unreachable,
    Validation_Error,
)
from shilov_eq.geometry import (
    Affine,
    affine_of_point,
    affine_sub,
    cell_volume,
    envelope_average,
    facet_measures,
    gradient_norm,
)
from shilov_eq.hahn import t_power, to_rat
from shilov_eq.metrics import (
    Metric_Spec,
    monomial_point,
    point_val,
    separating_section,
    shilov_set,
)
from shilov_eq.polys import Hom_Poly, variable

logger = logging.getLogger(__name__)

#: Shifts as passed around by the solver.
Shifts = Sequence[Union[Fraction, float]]
Weights = tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class Solve_Problem:
    """Weights of the points, and the target coefficients in the simplex."""

    d: int
    weights: Weights
    target: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.weights:
            raise Validation_Error("a problem needs at least one point")
        if len(self.target) != len(self.weights):
            raise Validation_Error(
                f"{len(self.target)} target values for {len(self.weights)} points"
            )
        if any(len(w) != self.d + 1 for w in self.weights):
            raise Validation_Error(f"every weight needs {self.d + 1} entries")
        if any(value < 0 for value in self.target) or sum(self.target) != 1:
            raise Validation_Error(
                f"target {[str(v) for v in self.target]} is not in the standard simplex"
            )


def solve_problem(
    d: int,
    weights: Sequence[Sequence[Union[int, str, Fraction]]],
    target: Sequence[Union[int, str, Fraction]],
) -> Solve_Problem:
    return Solve_Problem(
        d=d,
        weights=tuple(tuple(to_rat(w_j) for w_j in w) for w in weights),
        target=tuple(to_rat(value) for value in target),
    )


@dataclass(frozen=True)
class Solve_Result:
    #: Shifts of all points; the first kept point has shift zero.
    shifts: tuple[float, ...]
    #: Exact cell volumes at the returned shifts.
    volumes: tuple[Fraction, ...]
    #: ``max_i |V_i - lambda*_i|``, evaluated exactly.
    residual: Fraction
    #: Indices with zero target, whose cells were emptied.
    dropped: tuple[int, ...]
    iterations: int


def _affines(weights: Weights, shifts: Shifts) -> list[Affine]:
    return [affine_of_point(w, Fraction(c)) for w, c in zip(weights, shifts)]


def cell_volumes(weights: Weights, shifts: Shifts) -> tuple[Fraction, ...]:
    """Exact normalized volumes of the cells; needs ``d <= 2``."""
    affines = _affines(weights, shifts)
    return tuple(cell_volume(affines, a) for a in range(len(affines)))


def _objective_exact(
    weights: Weights, shifts: Shifts, target: Sequence[Fraction]
) -> Fraction:
    return envelope_average(_affines(weights, shifts)) - sum(
        (lam * Fraction(c) for lam, c in zip(target, shifts)), Fraction(0)
    )


def objective(weights: Weights, shifts: Shifts, target: Sequence[Fraction]) -> float:
    """``F(c)``, integrated exactly and rounded once."""
    return float(_objective_exact(weights, shifts, target))


def hessian(weights: Weights, shifts: Shifts) -> np.ndarray:
    """
    ``dV_i / dc_j``: facet measure over the gradient jump, off the diagonal.

    Rows sum to zero, since a common shift leaves all cells in place.
    """
    affines = _affines(weights, shifts)
    d = len(weights[0]) - 1
    scale = 1.0 if d == 1 else 2.0
    H = np.zeros((len(affines), len(affines)))
    for (i, j), measure in facet_measures(affines).items():
        value = scale * measure / gradient_norm(affine_sub(affines[i], affines[j]))
        H[i, j] = H[j, i] = value
    H[np.diag_indices_from(H)] = -H.sum(axis=1)
    return H


def _residual(volumes: Sequence[Fraction], target: Sequence[Fraction]) -> Fraction:
    return max(abs(v - lam) for v, lam in zip(volumes, target))


class Ascent_Step(NamedTuple):
    """One iterate of the damped ascent on ``F``."""

    shifts: np.ndarray
    #: Exact cell volumes at the iterate.
    volumes: tuple[Fraction, ...]
    #: Exact value of ``F`` at the iterate.
    value: Fraction
    #: Whether the step that led here was a Newton step.
    newton: bool = False
    #: Length of that step; zero for the starting point.
    step: float = 0.0


def ascent_steps(
    weights: Weights,
    target: tuple[Fraction, ...],
    max_iterations: int = defaults.solver_max_iterations,
) -> Iterator[Ascent_Step]:
    """
    Damped ascent on ``F`` from ``c = 0``: gradient steps until every cell is
    nonempty, then Newton steps.

    Steps are halved until ``F`` does not decrease, so the yielded values
    never decrease. The starting point is yielded first.

    :raises Target_Unreachable: if no acceptable step length is found.
    """
    c = np.zeros(len(weights))
    volumes = cell_volumes(weights, c)
    value = _objective_exact(weights, c, target)
    yield Ascent_Step(shifts=c, volumes=volumes, value=value)
    step = defaults.solver_initial_step
    for iteration in range(max_iterations):
        gradient = np.array([float(v - lam) for v, lam in zip(volumes, target)])
        newton = all(v > 0 for v in volumes)
        direction = gradient
        if newton:
            H = hessian(weights, c)
            try:
                direction = np.zeros_like(c)
                direction[1:] = np.linalg.solve(H[1:, 1:], -gradient[1:])
                trial_step = 1.0
            except np.linalg.LinAlgError:
                newton, direction = False, gradient
        if not newton:
            trial_step = step

        for _ in range(defaults.solver_max_halvings):
            candidate = c + trial_step * direction
            candidate_volumes = cell_volumes(weights, candidate)
            candidate_value = _objective_exact(weights, candidate, target)
            emptied = newton and any(v == 0 for v in candidate_volumes)
            if candidate_value >= value and not emptied:
                break
            trial_step /= 2
        else:
            raise Target_Unreachable(
                f"no ascent step found after {iteration} iterations "
                f"(residual {float(_residual(volumes, target)):.3g})"
            )
        logger.debug(
            "iteration %s: %s step %.3g, F=%.12g",
            iteration,
            "newton" if newton else "gradient",
            trial_step,
            float(candidate_value),
        )
        if not newton:
            step = min(2 * trial_step, defaults.solver_max_step)
        c, volumes, value = candidate, candidate_volumes, candidate_value
        yield Ascent_Step(
            shifts=c, volumes=volumes, value=value, newton=newton, step=trial_step
        )


def _ascend(
    weights: Weights,
    target: tuple[Fraction, ...],
    tol: float,
    max_iterations: int,
) -> tuple[np.ndarray, int]:
    """The first iterate within ``tol`` of the target, and its index."""
    residual = None
    for iteration, state in enumerate(ascent_steps(weights, target, max_iterations)):
        residual = _residual(state.volumes, target)
        if residual <= tol:
            return state.shifts, iteration
    raise Target_Unreachable(
        f"residual {float(residual):.3g} after {max_iterations} iterations"
    )


def solve_prescribed(
    problem: Solve_Problem,
    tol: float = defaults.solver_tolerance,
    max_iterations: int = defaults.solver_max_iterations,
) -> Solve_Result:
    """
    Find shifts whose cell volumes are the target.

    Points with zero target are set aside first and solved on the face of the
    remaining ones; afterwards their shifts are raised until their cells are
    empty.

    :raises Dominated_Point_Error: if two points with positive target have
      weights differing by a multiple of the all-ones vector, so one of them
      is dominated at every shift.
    :raises Target_Unreachable: if the tolerance is not met.
    """
    if problem.d > 2:
        raise Validation_Error("the solver needs exact volumes, so d <= 2")
    kept = [i for i, lam in enumerate(problem.target) if lam > 0]
    dropped = [i for i, lam in enumerate(problem.target) if lam == 0]

    seen: dict[tuple[Fraction, ...], int] = dict()
    for i in kept:
        w = problem.weights[i]
        key = tuple(w_j - w[0] for w_j in w)
        if key in seen:
            raise Dominated_Point_Error(
                f"points {seen[key]} and {i} differ by a constant, so one of them "
                "is dominated at every shift"
            )
        seen[key] = i

    face_weights = tuple(problem.weights[i] for i in kept)
    face_target = tuple(problem.target[i] for i in kept)
    if len(kept) == 1:
        face_shifts, iterations = np.zeros(1), 0
    else:
        face_shifts, iterations = _ascend(face_weights, face_target, tol, max_iterations)
    face_shifts = face_shifts - face_shifts[0]

    shifts = [Fraction(0)] * len(problem.weights)
    for i, c in zip(kept, face_shifts):
        shifts[i] = Fraction(float(c))
    anchor = kept[0]
    ceiling = max(w_j + shifts[anchor] for w_j in problem.weights[anchor])
    for i in dropped:
        shifts[i] = ceiling - min(problem.weights[i]) + 1

    volumes = cell_volumes(problem.weights, shifts)
    residual = _residual(volumes, problem.target)
    if residual > tol:
        raise Target_Unreachable(f"verified residual {float(residual):.3g} > {tol}")
    return Solve_Result(
        shifts=tuple(float(c) for c in shifts),
        volumes=volumes,
        residual=residual,
        dropped=tuple(dropped),
        iterations=iterations,
    )


def solved_spec(problem: Solve_Problem, result: Solve_Result) -> Metric_Spec:
    """The metric with the solved shifts, as exact rationals."""
    return Metric_Spec(
        d=problem.d,
        points=tuple(
            monomial_point(w, Fraction(c)) for w, c in zip(problem.weights, result.shifts)
        ),
    )


def solve_result_to_json(result: Solve_Result) -> dict[str, Any]:
    return {
        "shifts": list(result.shifts),
        "volumes": [str(v) for v in result.volumes],
        "residual": float(result.residual),
        "dropped": list(result.dropped),
        "iterations": result.iterations,
    }


def solve_result_from_json(data: dict[str, Any]) -> Solve_Result:
    try:
        return Solve_Result(
            shifts=tuple(float(c) for c in data["shifts"]),
            volumes=tuple(Fraction(v) for v in data["volumes"]),
            residual=Fraction(data["residual"]),
            dropped=tuple(int(i) for i in data["dropped"]),
            iterations=int(data["iterations"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise Validation_Error(f"malformed solver result: {e}") from e


def peak_system(sigma: Metric_Spec) -> list[Hom_Poly]:
    """
    One section per Shilov point, in index order, with ``f_i`` of positive
    valuation at point ``i`` and valuation zero at the later ones.

    Each ``f_i`` separates ``{i}`` from the rest of the Shilov set, which makes
    the valuation matrix diagonal and in particular upper triangular.
    """
    shilov = shilov_set(sigma)
    if len(shilov.indices) > 1:
        return [separating_section(sigma, {i}) for i in shilov.indices]

    (a,) = shilov.indices
    z = sigma.points[a]
    for j in range(sigma.d + 1):
        f = variable(sigma.d, j)
        if point_val(z, f) > 0:
            return [f]
    f = variable(sigma.d, 0)
    return [variable(sigma.d, 0, t_power(1 - point_val(z, f)))]


def peak_matrix(sigma: Metric_Spec, sections: Sequence[Hom_Poly]) -> list[list[Fraction]]:
    """
    ``-point_val(f_i, z_j)`` over the Shilov points, checked to be upper
    triangular with nonzero diagonal.
    """
    indices = shilov_set(sigma).indices
    if len(sections) != len(indices):
        raise Validation_Error(f"{len(sections)} sections for {len(indices)} Shilov points")
    matrix = [
        [-point_val(sigma.points[b], f) for b in indices] for f in sections
    ]
    for i, row in enumerate(matrix):
        if row[i] == 0 or any(value != 0 for value in row[:i]):
            raise Computation_Error(f"row {i} of the peak matrix is not upper triangular")
    return matrix  # type: ignore[return-value]


def gradient_check(
    weights: Weights,
    shifts: Sequence[float],
    target: Sequence[Fraction],
    step: float = defaults.gradient_check_step,
) -> float:
    """
    Largest deviation between ``V(c) - lambda*`` and central differences of
    :func:`objective`, relative to the size of the gradient.
    """
    analytic = [float(v - lam) for v, lam in zip(cell_volumes(weights, shifts), target)]
    scale = max(max(abs(g) for g in analytic), 1.0)
    deviation = 0.0
    for i in range(len(shifts)):
        up, down = list(shifts), list(shifts)
        up[i] += step
        down[i] -= step
        numeric = (objective(weights, up, target) - objective(weights, down, target)) / (
            2 * step
        )
        deviation = max(deviation, abs(numeric - analytic[i]) / scale)
    return deviation
