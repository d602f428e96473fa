from fractions import Fraction

import pytest
import shilov_eq.equidistribution as eq
import test.strategies as myst
from hypothesis import assume, given, settings
from shilov_eq.equidistribution import Convergence_Report, Eq_Measure
from shilov_eq.errors import Validation_Error
from shilov_eq.hahn import t_power
from shilov_eq.metrics import (
    Metric_Spec,
    metric_spec,
    monomial_point,
    shilov_set,
    with_shifts,
)
from shilov_eq.polys import Hom_Poly, parse_poly, variable, zero_poly

F = Fraction

TENT = metric_spec(1, [monomial_point((0, 1)), monomial_point((1, 0))])
DOMINATED = metric_spec(
    1, [monomial_point((0, 1)), monomial_point((1, 0)), monomial_point((1, 1))]
)
FLAT = metric_spec(1, [monomial_point((0, 0))])


def test_counts_static():
    assert eq.chi_a_count(TENT, 0, 4) == 3
    assert eq.chi_a_count(TENT, 1, 4) == 3
    assert eq.tie_excess(TENT, 4) == 1
    assert eq.tie_excess(TENT, 3) == 0
    assert eq.chi_a_count(DOMINATED, 2, 4) == 0
    with pytest.raises(Validation_Error):
        eq.chi_a_count(TENT, 2, 4)


def test_eq_measure_static():
    assert eq.eq_measure(TENT) == Eq_Measure(lambdas=(F(1, 2), F(1, 2)), method="volume")
    assert eq.eq_measure(DOMINATED).lambdas == (F(1, 2), F(1, 2), 0)
    assert eq.eq_measure(FLAT).lambdas == (1,)
    assert eq.lambda_exact(TENT, 1) == F(1, 2)


def test_counting_measure_static():
    sigma = metric_spec(3, [monomial_point((1, 0, 0, 0)), monomial_point((0, 1, 0, 0))])
    mu = eq.eq_measure(sigma, n=4)
    assert mu.method == "counting"
    assert mu.level == 4
    assert mu.lambdas[0] == mu.lambdas[1]
    assert sum(mu.lambdas) >= 1
    assert mu.bound >= 0

    single = eq.eq_measure(metric_spec(3, [monomial_point((0, 0, 0, 0))]), n=4)
    assert single.lambdas == (1,)
    assert single.bound == 0

    with pytest.raises(Validation_Error):
        eq.lambda_exact(sigma, 0)


def test_pair_measure_static():
    mu = eq.eq_measure(TENT)
    assert eq.pair_measure(mu, TENT, variable(1, 0)) == F(-1, 2)
    assert eq.pair_measure(mu, TENT, parse_poly("x0 x1", 1)) == F(-1, 2)
    assert eq.pair_measure(eq.eq_measure(FLAT), FLAT, variable(1, 0, t_power(1))) == -1
    with pytest.raises(Validation_Error):
        eq.pair_measure(mu, TENT, zero_poly(1, 1))
    with pytest.raises(Validation_Error):
        eq.pair_measure(mu, TENT, parse_poly("(t)", 1))


def test_harness_lhs_static():
    assert eq.harness_lhs(TENT, variable(1, 1), 4) == (F(-2, 5), True)
    assert eq.harness_lhs(TENT, variable(1, 1), 3) == (F(-1, 2), True)


def test_theorem_harness_static():
    report = eq.theorem_harness(TENT, variable(1, 1), n_max=6)
    assert report.rhs == F(-1, 2)
    assert report.certified
    assert [row.n for row in report.rows] == list(range(1, 7))

    row = report.rows[3]
    assert row.chi == 5
    assert row.lhs == F(-2, 5)
    assert row.err == F(1, 10)
    assert row.n_err == F(2, 5)
    # odd degrees hit the limit exactly
    assert all(row.err == 0 for row in report.rows[::2])

    assert report.fitted_constant() == F(3, 7)
    assert report.constant_first_half == F(1, 3)
    assert report.constant_last_half == F(3, 7)

    with pytest.raises(Validation_Error):
        eq.theorem_harness(TENT, parse_poly("x0 x1", 1), n_max=2)
    with pytest.raises(Validation_Error):
        eq.theorem_harness(TENT, zero_poly(1, 1), n_max=2)


def test_theorem_harness_stays_within_one_over_n():
    report = eq.theorem_harness(TENT, variable(1, 1), n_max=20)
    assert all(abs(row.n_err) <= 1 for row in report.rows)
    assert report.constant_last_half <= 3 * report.constant_first_half


def test_theorem_harness_in_parallel():
    serial = eq.theorem_harness(TENT, variable(1, 0), n_max=4)
    parallel = eq.theorem_harness(TENT, variable(1, 0), n_max=4, workers=2)
    assert parallel == serial


def test_corollary_band_static():
    report = eq.theorem_harness(TENT, variable(1, 1), n_max=6)
    band = eq.corollary_band(report, TENT, variable(1, 1))
    assert band == (1, F(3, 7), 0, F(3, 7))
    assert band.width(3) == F(1, 7)
    assert all(band.contains(row) for row in report.rows)

    scaled = eq.corollary_band(report, TENT, variable(1, 1, t_power(2)))
    assert scaled.scale == 3
    assert scaled.width(6) == band.width(6)

    empty = Convergence_Report(rows=(), rhs=F(0))
    assert eq.corollary_band(empty, FLAT, variable(1, 0)) == (1, 0, 0, 0)


def test_measure_distance_check_static():
    assert eq.measure_distance_check(TENT, FLAT) == (F(1, 2), F(1, 2), True)
    # the envelopes 0 and 1 - 2x have the same average but different measures
    check = eq.measure_distance_check(FLAT, metric_spec(1, [monomial_point((1, -1))]))
    assert check == (1, 0, False)
    with pytest.raises(Validation_Error):
        eq.measure_distance_check(
            metric_spec(3, [monomial_point((0, 0, 0, 0))]),
            metric_spec(3, [monomial_point((0, 0, 0, 1))]),
        )


@given(myst.metric_specs())
def test_measure_lives_on_the_shilov_set(sigma: Metric_Spec):
    mu = eq.eq_measure(sigma)
    shilov = shilov_set(sigma)
    assert sum(mu.lambdas) == 1
    for a, lam in enumerate(mu.lambdas):
        assert (lam > 0) if a in shilov else (lam == 0)


@given(myst.metric_specs(d=1))
def test_ties_are_counted_once_per_point(sigma: Metric_Spec):
    for n in (1, 2, 5):
        assert eq.tie_excess(sigma, n) >= 0


@settings(max_examples=10)
@given(
    myst.metric_specs(d=1, min_points=2, max_points=3, values=myst.small_integers),
    myst.hom_polys(1, 1),
)
def test_harness_error_stays_of_order_one_over_n(sigma: Metric_Spec, s: Hom_Poly):
    report = eq.theorem_harness(sigma, s, n_max=24)
    assert report.certified
    assert report.constant_last_half <= 3 * report.constant_first_half
    band = eq.corollary_band(report, sigma, s)
    assert all(band.contains(row) for row in report.rows)
    assert all(band.n_err_min <= row.n_err <= band.n_err_max for row in report.rows)


@settings(max_examples=15)
@given(
    myst.metric_specs(d=1),
    myst.hom_polys(1, 1),
    myst.small_rationals,
)
def test_harness_error_ignores_a_common_shift(
    sigma: Metric_Spec, s: Hom_Poly, shift: Fraction
):
    shifted = with_shifts(sigma, [point.c + shift for point in sigma.points])
    report = eq.theorem_harness(sigma, s, n_max=4)
    moved = eq.theorem_harness(shifted, s, n_max=4)
    assume(report.certified and moved.certified)
    assert moved.rhs == report.rhs - shift
    assert [row.lhs for row in moved.rows] == [row.lhs - shift for row in report.rows]
    assert [row.err for row in moved.rows] == [row.err for row in report.rows]
