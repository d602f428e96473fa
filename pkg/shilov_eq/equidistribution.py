"""
The equidistribution measure of a Shilov-finite metric and the convergence
harness for the limit formula of the top wedge norm.

The coefficient of a Shilov point is the normalized volume of its cell in the
simplex, or for ``d >= 3`` the fraction of degree-``n`` monomials where the
point attains the minimum, with an error bar.
"""
from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Literal, NamedTuple, Optional

from tqdm import tqdm

from shilov_eq import defaults
from shilov_eq.errors import Computation_Error, Rank_Deficient, Validation_Error
from shilov_eq.geometry import cell_volume
from shilov_eq.hahn import Log_Val
from shilov_eq.linalg import contraction_monomials, diag_norm, na_svd, val_matrix
from shilov_eq.metrics import (
    Metric_Spec,
    measure_distance,
    metric_distance,
    point_val,
    shilov_set,
)
from shilov_eq.polys import Hom_Poly, chi, mult_operator

logger = logging.getLogger(__name__)

#: How the coefficients of a measure were obtained.
Method = Literal["volume", "counting"]


def _check_index(sigma: Metric_Spec, a: int) -> None:
    if not 0 <= a < len(sigma.points):
        raise Validation_Error(f"no point {a} in a metric with {len(sigma.points)} points")


def chi_a_count(sigma: Metric_Spec, a: int, n: int) -> int:
    """
    Number of degree-``n`` monomials on which point ``a`` attains the minimum.

    A tied monomial counts once for every point attaining it.
    """
    _check_index(sigma, a)
    return len(contraction_monomials(sigma, a, n))


def tie_excess(sigma: Metric_Spec, n: int) -> int:
    """``sum_a chi_a(n) - chi(n)``: how often monomials are shared."""
    return sum(chi_a_count(sigma, a, n) for a in range(len(sigma.points))) - chi(
        sigma.d, n
    )


def lambda_exact(sigma: Metric_Spec, a: int) -> Fraction:
    """Normalized volume of the closed cell of point ``a``; needs ``d <= 2``."""
    _check_index(sigma, a)
    if sigma.d > 2:
        raise Validation_Error(
            f"exact coefficients need d <= 2, got d={sigma.d}; use counting instead"
        )
    return cell_volume(sigma.affines, a)


@dataclass(frozen=True)
class Eq_Measure:
    """``sum_a lambda_a delta_a`` over the points of a metric."""

    #: One coefficient per point of the metric; zero off the Shilov set.
    lambdas: tuple[Fraction, ...]
    method: Method
    #: For the counting method: the level used and the error bar ``C / n``.
    level: Optional[int] = None
    bound: Optional[Fraction] = None


def eq_measure(sigma: Metric_Spec, n: Optional[int] = None) -> Eq_Measure:
    """
    The equidistribution measure.

    For ``d <= 2`` the coefficients are exact cell volumes summing to one.
    Otherwise they are monomial fractions at level ``n``, with the constant of
    the ``C / n`` error bar fitted from levels ``n`` and ``2 n``.
    """
    shilov = shilov_set(sigma)
    indices = range(len(sigma.points))
    if sigma.d <= 2:
        lambdas = tuple(
            lambda_exact(sigma, a) if a in shilov else Fraction(0) for a in indices
        )
        if sum(lambdas) != 1:
            raise Computation_Error(f"cell volumes sum to {sum(lambdas)}, not 1")
        return Eq_Measure(lambdas=lambdas, method="volume")

    n = n if n is not None else defaults.counting_degree
    logger.debug("counting coefficients on P^%s at level %s", sigma.d, n)

    def ratios(level: int) -> list[Fraction]:
        return [
            Fraction(chi_a_count(sigma, a, level), chi(sigma.d, level))
            if a in shilov
            else Fraction(0)
            for a in indices
        ]

    coarse, fine = ratios(n), ratios(2 * n)
    spread = max(abs(x - y) for x, y in zip(coarse, fine))
    # r(n) - r(2n) ~ C / (2n), so the error at level n is about 2 |r(n) - r(2n)|
    return Eq_Measure(lambdas=tuple(coarse), method="counting", level=n, bound=2 * spread)


def pair_measure(mu: Eq_Measure, sigma: Metric_Spec, s: Hom_Poly) -> Fraction:
    """``int log|s| d mu`` per unit degree: ``-sum_a lambda_a v_a(s) / m``."""
    if s.is_zero:
        raise Validation_Error("cannot pair the measure with the zero section")
    if s.degree == 0:
        raise Validation_Error("the section needs positive degree")
    return -sum(
        (lam * point_val(z, s) for lam, z in zip(mu.lambdas, sigma.points) if lam),
        Fraction(0),
    ) / s.degree


class Harness_Row(NamedTuple):
    n: int
    chi: int
    lhs: Fraction
    rhs: Fraction
    err: Fraction
    n_err: Fraction
    certified: bool


def harness_lhs(
    sigma: Metric_Spec,
    s: Hom_Poly,
    n: int,
    cap: Log_Val = defaults.precision_cap,
    retries: int = defaults.precision_retries,
) -> tuple[Fraction, bool]:
    """
    ``-wedge / chi(n)`` for multiplication by ``s`` from level ``n``.

    Returns the value with its certification instead of raising, so that a
    report can flag single rows.
    """
    M = val_matrix(
        mult_operator(s, n), diag_norm(sigma, n), diag_norm(sigma, n + s.degree)
    )
    profile = na_svd(M, cap=cap, retries=retries, strict=False)
    if profile.rank < M.shape[1] and profile.complete:
        raise Rank_Deficient(f"multiplication is not injective at n={n}")
    wedge = sum(profile.valuations, Fraction(0))
    return -wedge / chi(sigma.d, n), profile.is_certified  # type: ignore[operator]


@dataclass(frozen=True)
class Convergence_Report:
    rows: tuple[Harness_Row, ...]
    rhs: Fraction

    @property
    def certified(self) -> bool:
        return all(row.certified for row in self.rows)

    def fitted_constant(self, rows: Optional[Sequence[Harness_Row]] = None) -> Fraction:
        """``max |n err_n|`` over the given rows (all rows by default)."""
        rows = self.rows if rows is None else rows
        return max((abs(row.n_err) for row in rows), default=Fraction(0))

    @property
    def constant_first_half(self) -> Fraction:
        return self.fitted_constant(self.rows[: len(self.rows) // 2])

    @property
    def constant_last_half(self) -> Fraction:
        return self.fitted_constant(self.rows[len(self.rows) // 2 :])


def theorem_harness(
    sigma: Metric_Spec,
    s: Hom_Poly,
    n_max: int = defaults.harness_n_max,
    cap: Log_Val = defaults.precision_cap,
    retries: int = defaults.precision_retries,
    workers: int = defaults.workers,
    progress: bool = False,
) -> Convergence_Report:
    """
    Compare ``-wedge_n / chi(n)`` with ``int log|s| d mu_eq`` for
    ``n = 1, ..., n_max``.

    Degrees are independent; with ``workers > 1`` they run in a process pool,
    and rows always come back in increasing ``n``.
    """
    if s.is_zero:
        raise Validation_Error("the harness needs a nonzero section")
    if s.degree != 1:
        raise Validation_Error(f"the harness needs a section of degree 1, got {s.degree}")
    rhs = pair_measure(eq_measure(sigma), sigma, s)
    degrees = list(range(1, n_max + 1))
    compute = partial(harness_lhs, sigma, s, cap=cap, retries=retries)

    if workers > 1 and len(degrees) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(
                tqdm(pool.map(compute, degrees), total=len(degrees), disable=not progress)
            )
    else:
        results = [compute(n) for n in tqdm(degrees, disable=not progress)]

    rows = list()
    for n, (lhs, certified) in zip(degrees, results):
        if not certified:
            logger.warning("row n=%s is not certified", n)
        err = lhs - rhs
        rows.append(Harness_Row(n, chi(sigma.d, n), lhs, rhs, err, n * err, certified))
    return Convergence_Report(rows=tuple(rows), rhs=rhs)


class Corollary_Band(NamedTuple):
    """``|err_n| <= scale * C / n`` with ``C`` fitted on the report."""

    #: ``max_a |v_a(s)|`` over the Shilov points, or one if that vanishes.
    scale: Fraction
    C: Fraction
    #: Signed extremes of ``n err_n`` over the report.
    n_err_min: Fraction = Fraction(0)
    n_err_max: Fraction = Fraction(0)

    def width(self, n: int) -> Fraction:
        return self.scale * self.C / n

    def contains(self, row: Harness_Row) -> bool:
        return abs(row.err) <= self.width(row.n)


def corollary_band(
    report: Convergence_Report, sigma: Metric_Spec, s: Hom_Poly
) -> Corollary_Band:
    """
    The symmetric error band of the report, scaled by the size of ``s``,
    together with the signed range ``[min n err_n, max n err_n]``.

    The error constant does not depend on ``s``; the band width scales with
    ``sup_a |log|s|_a|``.
    """
    values = [point_val(sigma.points[a], s) for a in shilov_set(sigma).indices]
    scale = max((abs(v) for v in values), default=Fraction(0)) or Fraction(1)
    n_errs = [row.n_err for row in report.rows]
    return Corollary_Band(
        scale=scale,
        C=report.fitted_constant() / scale,
        n_err_min=min(n_errs, default=Fraction(0)),
        n_err_max=max(n_errs, default=Fraction(0)),
    )


class Measure_Check(NamedTuple):
    d_mono: Fraction
    bound: Fraction
    holds: bool


def measure_distance_check(sigma1: Metric_Spec, sigma2: Metric_Spec) -> Measure_Check:
    """
    Compare the monomial-restricted distance of the two equidistribution
    measures with ``2 d_1`` of the metrics.

    A violation is logged and reported, never raised.
    """
    if sigma1.d > 2 or sigma2.d > 2:
        raise Validation_Error("the measure check needs exact d_1, so d <= 2")
    mu, nu = eq_measure(sigma1), eq_measure(sigma2)
    d_mono = measure_distance(mu.lambdas, sigma1, nu.lambdas, sigma2)
    bound = 2 * metric_distance(sigma1, sigma2).d_1
    holds = d_mono <= bound
    if not holds:
        logger.warning("measure distance %s exceeds 2 d_1 = %s", d_mono, bound)
    return Measure_Check(d_mono, bound, holds)
