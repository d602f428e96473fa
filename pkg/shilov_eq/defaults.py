"""Tunable defaults shared by the library and the command line."""
from fractions import Fraction

#: Precision cap (in val units) for truncated inversion during elimination.
precision_cap: Fraction = Fraction(64)

#: How many times the precision cap is doubled before giving up.
precision_retries: int = 4

#: Degree at which the counting estimator of the coefficients is evaluated
#: when no exact cell volumes are available (d >= 3).
counting_degree: int = 24

#: Largest degree used by the harness if nothing else is requested.
harness_n_max: int = 20

#: Target residual of the prescribed-measure solver.
solver_tolerance: float = 1e-9

#: Iteration cap of the prescribed-measure solver.
solver_max_iterations: int = 500

#: First step length tried by the damped ascent.
solver_initial_step: float = 1.0

#: Largest step length the damped ascent may grow to.
solver_max_step: float = 64.0

#: Number of step halvings before a direction is rejected.
solver_max_halvings: int = 60

#: Step of the finite-difference gradient check.
gradient_check_step: float = 1e-4

#: The minor oracle refuses matrices with more columns than this.
minor_oracle_max_columns: int = 12

#: Separating sections are searched by enumeration only while the number of
#: monomials per degree stays below this bound.
separating_enumeration_limit: int = 5000

#: Degree of the lattice average that estimates d_1 for d >= 3.
distance_lattice_degree: int = 24

#: Size of the worker pool for degree-parallel computations.
workers: int = 1

#: Number of randomized instances per property suite.
property_instances: dict[str, int] = {
    "one-point": 20,
    "oracle": 200,
    "distortion": 500,
    "opnorm-change": 500,
    "max-norm": 500,
    "inverse-bound": 500,
    "isometric": 200,
    "localization": 50,
    "lambda": 50,
    "continuity": 50,
    "harness-continuity": 50,
}
