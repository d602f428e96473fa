"""
Shilov-finite metrics given as envelopes of finitely many monomial points.

A monomial point ``z = (w, c)`` is the Gauss valuation
``v_z(f) = min_alpha (val(f_alpha) + <w, alpha>) + n c`` on degree-``n``
sections. A :class:`Metric_Spec` is a finite set of such points; its algebra
valuation is the minimum over the points, and everything about it is decided
by the affine functions ``g_i(u) = <w_i, u> + c_i`` on the simplex.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Collection, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Union

from shilov_eq import defaults
from shilov_eq.errors import Computation_Error, Duplicate_Point_Error, Validation_Error
from shilov_eq.geometry import (
    Affine,
    affine_of_point,
    arrangement_vertices,
    envelope_average,
    evaluate,
)
from shilov_eq.hahn import (
    INFINITY,
    Log_Val,
    lv_add,
    lv_min,
    t_power,
    to_rat,
    valuation,
)
from shilov_eq.lp import maximize
from shilov_eq.polys import (
    Exp_Vec,
    Hom_Poly,
    chi,
    hom_poly,
    monomials,
    poly_mul,
    poly_pow,
)

logger = logging.getLogger(__name__)

#: A point of the simplex ``Delta_d`` as ``(u_0, ..., u_d)``.
Direction = tuple[Fraction, ...]


@dataclass(frozen=True)
class Monomial_Point:
    """A Gauss valuation point: weight vector ``w`` and shift ``c``."""

    #: The weights, one per variable.
    w: tuple[Fraction, ...]
    #: The shift; at level ``n`` it contributes ``n c``.
    c: Fraction = Fraction(0)

    @property
    def d(self) -> int:
        return len(self.w) - 1

    @property
    def key(self) -> tuple[tuple[Fraction, ...], Fraction]:
        """
        ``(w - w_0 1, c + w_0)``.

        Since ``<w + k 1, alpha> = <w, alpha> + k n``, two points define the
        same valuation exactly when their keys agree.
        """
        return tuple(w_j - self.w[0] for w_j in self.w), self.c + self.w[0]

    @property
    def affine(self) -> Affine:
        return affine_of_point(self.w, self.c)


def monomial_point(
    w: Sequence[Union[int, str, Fraction]], c: Union[int, str, Fraction] = 0
) -> Monomial_Point:
    if len(w) < 2:
        raise Validation_Error(f"a weight needs at least two entries, got {list(w)}")
    return Monomial_Point(w=tuple(to_rat(w_j) for w_j in w), c=to_rat(c))


@dataclass(frozen=True)
class Metric_Spec:
    """
    A Shilov-finite metric on ``O(1)`` over ``P^d``, as an envelope of points.

    Points are validated on construction: nonempty, all of dimension ``d``,
    no two defining the same valuation.
    """

    d: int
    points: tuple[Monomial_Point, ...]

    def __post_init__(self):
        if self.d < 1:
            raise Validation_Error(f"the dimension has to be at least 1, got {self.d}")
        if not self.points:
            raise Validation_Error("a metric needs at least one point")
        seen: dict[tuple, int] = dict()
        for i, point in enumerate(self.points):
            if point.d != self.d:
                raise Validation_Error(
                    f"point {i} has {len(point.w)} weights, expected {self.d + 1}"
                )
            if point.key in seen:
                raise Duplicate_Point_Error(
                    f"points {seen[point.key]} and {i} define the same valuation"
                )
            seen[point.key] = i

    @property
    def affines(self) -> list[Affine]:
        return [point.affine for point in self.points]

    def __len__(self) -> int:
        return len(self.points)


def metric_spec(d: int, points: Sequence[Monomial_Point]) -> Metric_Spec:
    return Metric_Spec(d=d, points=tuple(points))


def with_shifts(sigma: Metric_Spec, shifts: Sequence[Fraction]) -> Metric_Spec:
    """The same weights with new shifts."""
    if len(shifts) != len(sigma.points):
        raise Validation_Error(f"expected {len(sigma.points)} shifts, got {len(shifts)}")
    return metric_spec(
        sigma.d,
        [Monomial_Point(w=p.w, c=to_rat(c)) for p, c in zip(sigma.points, shifts)],
    )


@dataclass(frozen=True)
class Shilov_Set:
    """The Shilov boundary of a metric, with one witness direction per member."""

    #: Indices of the Shilov points, increasing.
    indices: tuple[int, ...]
    #: For each member, a rational interior point of the simplex where it is
    #: the unique minimizer.
    witnesses: tuple[Direction, ...]

    def witness(self, a: int) -> Direction:
        return self.witnesses[self.indices.index(a)]

    def __contains__(self, a: int) -> bool:
        return a in self.indices


def monomial_val(z: Monomial_Point, alpha: Exp_Vec) -> Fraction:
    """``v_z(x^alpha) = <w, alpha> + |alpha| c``."""
    return sum((w_j * a for w_j, a in zip(z.w, alpha)), Fraction(0)) + sum(alpha) * z.c


def spec_monomial_val(sigma: Metric_Spec, alpha: Exp_Vec) -> Fraction:
    """The weight ``rho_alpha = min_i v_i(x^alpha)`` of a basis monomial."""
    return min(monomial_val(z, alpha) for z in sigma.points)


def point_val(z: Monomial_Point, f: Hom_Poly) -> Log_Val:
    """Gauss valuation of ``f`` at ``z``; infinite exactly for ``f = 0``."""
    return lv_min(
        lv_add(valuation(coeff), monomial_val(z, alpha)) for alpha, coeff in f.terms
    )


def spec_val(sigma: Metric_Spec, f: Hom_Poly) -> Log_Val:
    """Valuation of the sup norm of the envelope metric."""
    return min(point_val(z, f) for z in sigma.points)


def envelope_value(sigma: Metric_Spec, u: Sequence[Fraction]) -> Fraction:
    """``min_i (<w_i, u> + c_i)``."""
    return min(
        sum((w_j * u_j for w_j, u_j in zip(z.w, u)), Fraction(0)) + z.c
        for z in sigma.points
    )


def _strict_margin(sigma: Metric_Spec, a: int) -> tuple[Fraction, Direction]:
    """
    Largest ``delta`` such that some ``u`` has every coordinate and every
    gap ``g_i(u) - g_a(u)`` at least ``delta``.
    """
    d = sigma.d
    z = sigma.points[a]
    A_ub, b_ub = list(), list()
    # variables: u_0, ..., u_d, delta
    for i, other in enumerate(sigma.points):
        if i == a:
            continue
        A_ub.append([z.w[j] - other.w[j] for j in range(d + 1)] + [1])
        b_ub.append(other.c - z.c)
    for j in range(d + 1):
        A_ub.append([-int(k == j) for k in range(d + 1)] + [1])
        b_ub.append(0)
    result = maximize(
        c=[0] * (d + 1) + [1],
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=[[1] * (d + 1) + [0]],
        b_eq=[1],
        free=[d + 1],
    )
    return result.value, result.x[: d + 1]


@lru_cache(maxsize=1024)
def shilov_set(sigma: Metric_Spec) -> Shilov_Set:
    """
    The points that are the unique minimizer somewhere on the simplex.

    Membership is decided by one exact linear program per point; ties on
    sets without interior never make a point Shilov.
    """
    indices, witnesses = list(), list()
    for a in range(len(sigma.points)):
        margin, u = _strict_margin(sigma, a)
        logger.debug("point %s has strict margin %s", a, margin)
        if margin > 0:
            indices.append(a)
            witnesses.append(u)
    return Shilov_Set(indices=tuple(indices), witnesses=tuple(witnesses))


def non_shilov_removed(sigma: Metric_Spec) -> Metric_Spec:
    """The metric restricted to its Shilov points; it has the same sup norms."""
    return metric_spec(sigma.d, [sigma.points[a] for a in shilov_set(sigma).indices])


def envelope_contains(sigma: Metric_Spec, z: Monomial_Point) -> bool:
    """Whether ``g_z >= min_i g_i`` on all of the simplex."""
    d = sigma.d
    if z.d != d:
        raise Validation_Error(f"point of dimension {z.d} against a metric on P^{d}")
    # maximize s with s <= g_i(u) - g_z(u) for every i
    result = maximize(
        c=[0] * (d + 1) + [1],
        A_ub=[
            [z.w[j] - other.w[j] for j in range(d + 1)] + [1] for other in sigma.points
        ],
        b_ub=[other.c - z.c for other in sigma.points],
        A_eq=[[1] * (d + 1) + [0]],
        b_eq=[1],
        free=[d + 1],
    )
    return result.value <= 0


def dominance(z: Monomial_Point, w: Monomial_Point) -> bool:
    """
    ``z`` precedes ``w``: ``v_z >= v_w`` on every monomial.

    Both sides are affine on the simplex, so checking its vertices suffices.
    """
    if z.d != w.d:
        raise Validation_Error("points of different dimension")
    return all(z_j + z.c >= w_j + w.c for z_j, w_j in zip(z.w, w.w))


def _strict_minimizer(sigma: Metric_Spec, b: int, alpha: Exp_Vec) -> bool:
    value = monomial_val(sigma.points[b], alpha)
    return all(
        monomial_val(z, alpha) > value for i, z in enumerate(sigma.points) if i != b
    )


def _peak_monomials(
    sigma: Metric_Spec, targets: Sequence[int], shilov: Shilov_Set
) -> dict[int, Exp_Vec]:
    """
    One monomial of a common degree per target, on which the target is the
    unique minimizer.

    Small degrees are searched first, each from the lexicographically least
    monomial up; past the enumeration limit the witness directions are
    cleared of denominators instead.
    """
    fallback = math.lcm(
        *(u_j.denominator for b in targets for u_j in shilov.witness(b))
    )
    for n in range(1, fallback):
        if chi(sigma.d, n) > defaults.separating_enumeration_limit:
            break
        found: dict[int, Exp_Vec] = dict()
        for b in targets:
            alpha = next(
                (
                    a
                    for a in reversed(monomials(sigma.d, n))
                    if _strict_minimizer(sigma, b, a)
                ),
                None,
            )
            if alpha is None:
                break
            found[b] = alpha
        else:
            return found
    return {
        b: tuple(int(u_j * fallback) for u_j in shilov.witness(b)) for b in targets
    }


def separating_section(sigma: Metric_Spec, J: Collection[int]) -> Hom_Poly:
    """
    A section of sup-valuation zero, positive at ``J`` and zero at every
    other Shilov point.

    It is a sum of one normalized monomial ``t^(-v_b(x^alpha_b)) x^alpha_b``
    per Shilov point ``b`` outside ``J``.

    :param J: A proper nonempty subset of the Shilov indices.
    """
    shilov = shilov_set(sigma)
    J = set(J)
    if not J or not J < set(shilov.indices):
        raise Validation_Error(
            f"{sorted(J)} is not a proper nonempty subset of the Shilov "
            f"indices {list(shilov.indices)}"
        )
    targets = [b for b in shilov.indices if b not in J]
    peaks = _peak_monomials(sigma, targets, shilov)
    (degree,) = {sum(alpha) for alpha in peaks.values()}
    return hom_poly(
        sigma.d,
        degree,
        {
            alpha: t_power(-monomial_val(sigma.points[b], alpha))
            for b, alpha in peaks.items()
        },
    )


class Localized_Val(NamedTuple):
    """The limit of ``spec_val(f^n b)`` and the first ``n`` reaching it."""

    value: Log_Val
    stabilization_index: int


def localized_val(sigma: Metric_Spec, f: Hom_Poly, b: Hom_Poly) -> Localized_Val:
    """
    Localize ``b`` at the points where ``f`` has valuation zero.

    ``n -> spec_val(f^n b)`` is non-decreasing (in valuation units; the
    norms decrease) and constant from the returned index on. The value at
    that index is checked against a direct evaluation of ``f^n b``.

    :param f: A section with ``spec_val(sigma, f) == 0``.
    """
    if spec_val(sigma, f) != 0:
        raise Validation_Error("the localizing section needs sup-valuation zero")
    f_vals = [point_val(z, f) for z in sigma.points]
    b_vals = [point_val(z, b) for z in sigma.points]
    value = lv_min(b_val for f_val, b_val in zip(f_vals, b_vals) if f_val == 0)
    if value == INFINITY:
        return Localized_Val(value, 0)

    index = 0
    for f_val, b_val in zip(f_vals, b_vals):
        if f_val > 0 and f_val != INFINITY and b_val != INFINITY:
            index = max(index, math.ceil((value - b_val) / f_val))
    direct = spec_val(sigma, poly_mul(poly_pow(f, index), b))
    if direct != value:
        raise Computation_Error(
            f"localized valuation {value} not reached at n={index} (got {direct})"
        )
    return Localized_Val(value, index)


class Metric_Distance(NamedTuple):
    d_inf: Fraction
    d_1: Fraction
    #: Whether ``d_1`` is exact; it is a lattice estimate for ``d >= 3``.
    exact: bool


def metric_distance(sigma1: Metric_Spec, sigma2: Metric_Spec) -> Metric_Distance:
    """
    The pseudo-distances between two envelopes ``g_1, g_2``.

    ``d_inf`` is the maximum of ``|g_1 - g_2|``, found on the vertices of the
    common cell arrangement. ``d_1`` is ``|average of (g_1 - g_2)|`` over the
    simplex, which is the level-normalized form ``1 / (n chi(n))`` of the
    sum of weight differences and therefore never exceeds ``d_inf``.
    """
    if sigma1.d != sigma2.d:
        raise Validation_Error(f"cannot compare metrics on P^{sigma1.d} and P^{sigma2.d}")
    d = sigma1.d
    affines1, affines2 = sigma1.affines, sigma2.affines

    d_inf = max(
        abs(
            min(evaluate(g, x) for g in affines1) - min(evaluate(g, x) for g in affines2)
        )
        for x in arrangement_vertices([affines1, affines2], d)
    )
    if d <= 2:
        d_1 = abs(envelope_average(affines1) - envelope_average(affines2))
        return Metric_Distance(d_inf, d_1, True)

    n = defaults.distance_lattice_degree
    logger.warning("d_1 on P^%s is estimated on the degree-%s lattice", d, n)
    total = sum(
        (
            spec_monomial_val(sigma1, alpha) - spec_monomial_val(sigma2, alpha)
            for alpha in monomials(d, n)
        ),
        Fraction(0),
    )
    return Metric_Distance(d_inf, abs(total) / (n * chi(d, n)), False)


def norm_distance(sigma1: Metric_Spec, sigma2: Metric_Spec, n: int) -> Fraction:
    """Distance ``max_alpha |rho^1_alpha - rho^2_alpha|`` of the level-``n`` norms."""
    if sigma1.d != sigma2.d:
        raise Validation_Error("metrics of different dimension")
    return max(
        abs(spec_monomial_val(sigma1, alpha) - spec_monomial_val(sigma2, alpha))
        for alpha in monomials(sigma1.d, n)
    )


def measure_distance(
    mu: Sequence[Fraction],
    sigma1: Metric_Spec,
    nu: Sequence[Fraction],
    sigma2: Metric_Spec,
) -> Fraction:
    """
    Measure pseudo-distance restricted to monomial test sections.

    ``log |x^alpha|`` is affine in the point, so the supremum over monomials
    is attained at a vertex ``e_j`` of the simplex.
    """
    if sigma1.d != sigma2.d:
        raise Validation_Error("metrics of different dimension")

    def pairing(weights: Sequence[Fraction], sigma: Metric_Spec, j: int) -> Fraction:
        return sum(
            (lam * (z.w[j] + z.c) for lam, z in zip(weights, sigma.points)),
            Fraction(0),
        )

    return max(
        abs(pairing(mu, sigma1, j) - pairing(nu, sigma2, j))
        for j in range(sigma1.d + 1)
    )

