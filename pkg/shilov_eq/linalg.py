"""
Non-Archimedean normed linear algebra on diagonal norms.

Every norm here is diagonal in a fixed basis: basis vector ``j`` has
valuation ``rho_j``. A map between two such spaces is a sparse matrix of
Hahn series; rescaling row ``i`` by ``t^(tau_i)`` and column ``j`` by
``t^(-rho_j)`` makes both norms trivial, after which singular valuations
come out of greedy valuation-pivoted elimination.
"""
from __future__ import annotations

import itertools as it
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

from shilov_eq import defaults
from shilov_eq.errors import Precision_Exhausted, Rank_Deficient, Validation_Error
from shilov_eq.hahn import (
    INFINITY,
    ONE,
    ZERO,
    Hahn_Series,
    Log_Val,
    format_log_val,
    hs_add,
    hs_inv,
    hs_mul,
    hs_neg,
    hs_shift,
    is_zero,
    lv_add,
    lv_min,
    valuation,
)
from shilov_eq.metrics import Metric_Spec, monomial_val, spec_monomial_val
from shilov_eq.polys import Exp_Vec, Mult_Op_Matrix, monomial_index, monomials

logger = logging.getLogger(__name__)

#: Sparse entries keyed by ``(row, column)`` positions.
Entries = dict[tuple[int, int], Hahn_Series]


@dataclass(frozen=True)
class Diag_Norm:
    """
    A norm that is diagonal on a fixed basis.

    For norms coming from a metric, the basis is ``monomials(d, level)`` and
    ``weights[k]`` is the valuation of the ``k``-th monomial.
    """

    weights: tuple[Fraction, ...]
    #: The grading level, for norms on a space of sections.
    level: Optional[int] = None
    d: Optional[int] = None

    def __len__(self) -> int:
        return len(self.weights)


def diag_norm(sigma: Metric_Spec, n: int) -> Diag_Norm:
    """Weights ``rho_alpha = min_i (<w_i, alpha> + n c_i)`` on degree ``n``."""
    return Diag_Norm(
        weights=tuple(spec_monomial_val(sigma, alpha) for alpha in monomials(sigma.d, n)),
        level=n,
        d=sigma.d,
    )


def norm_dist(D1: Diag_Norm, D2: Diag_Norm) -> Fraction:
    """``max_j |rho^1_j - rho^2_j|``, the distance of two norms on one basis."""
    _check_same_basis(D1, D2)
    return max((abs(a - b) for a, b in zip(D1.weights, D2.weights)), default=Fraction(0))


def max_norm(D1: Diag_Norm, D2: Diag_Norm) -> Diag_Norm:
    """The maximum of two norms: componentwise minimum of the valuations."""
    _check_same_basis(D1, D2)
    return Diag_Norm(
        weights=tuple(min(a, b) for a, b in zip(D1.weights, D2.weights)),
        level=D1.level,
        d=D1.d,
    )


def _check_same_basis(D1: Diag_Norm, D2: Diag_Norm) -> None:
    if len(D1) != len(D2):
        raise Validation_Error(f"norms on spaces of dimension {len(D1)} and {len(D2)}")


@dataclass(frozen=True)
class Val_Matrix:
    """A linear map between two diagonally normed spaces."""

    #: ``(rows, columns)``.
    shape: tuple[int, int]
    #: Sparse entries, never holding an exact zero.
    entries: tuple[tuple[tuple[int, int], Hahn_Series], ...]
    #: Norm of the source, one weight per column.
    src: Diag_Norm
    #: Norm of the target, one weight per row.
    tgt: Diag_Norm

    def __post_init__(self):
        rows, cols = self.shape
        if len(self.src) != cols or len(self.tgt) != rows:
            raise Validation_Error(
                f"a {rows}x{cols} matrix needs {cols} source and {rows} target weights"
            )
        for (i, j), _ in self.entries:
            if not (0 <= i < rows and 0 <= j < cols):
                raise Validation_Error(f"entry ({i}, {j}) outside a {rows}x{cols} matrix")

    def as_dict(self) -> Entries:
        return dict(self.entries)


def sparse_val_matrix(
    shape: tuple[int, int], entries: Entries, src: Diag_Norm, tgt: Diag_Norm
) -> Val_Matrix:
    return Val_Matrix(
        shape=shape,
        entries=tuple(
            (position, value)
            for position, value in sorted(entries.items())
            if not (is_zero(value) and value.is_exact)
        ),
        src=src,
        tgt=tgt,
    )


def dense_val_matrix(
    rows: Sequence[Sequence[Hahn_Series]],
    src: Optional[Diag_Norm] = None,
    tgt: Optional[Diag_Norm] = None,
) -> Val_Matrix:
    """Build from nested lists; missing norms default to the trivial ones."""
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    if any(len(row) != n_cols for row in rows):
        raise Validation_Error("rows of different lengths")
    return sparse_val_matrix(
        (n_rows, n_cols),
        {(i, j): value for i, row in enumerate(rows) for j, value in enumerate(row)},
        src if src is not None else Diag_Norm(weights=(Fraction(0),) * n_cols),
        tgt if tgt is not None else Diag_Norm(weights=(Fraction(0),) * n_rows),
    )


def val_matrix(M: Mult_Op_Matrix, src: Diag_Norm, tgt: Diag_Norm) -> Val_Matrix:
    """Index a multiplication matrix by monomial positions and attach norms."""
    rows = monomial_index(M.d, M.tgt_degree)
    cols = monomial_index(M.d, M.src_degree)
    return sparse_val_matrix(
        M.shape,
        {(rows[row], cols[col]): value for (row, col), value in M.entries},
        src,
        tgt,
    )


def restrict_columns(M: Val_Matrix, cols: Sequence[int]) -> Val_Matrix:
    """The restriction of ``M`` to the span of the given basis vectors."""
    position = {j: k for k, j in enumerate(cols)}
    return sparse_val_matrix(
        (M.shape[0], len(cols)),
        {(i, position[j]): v for (i, j), v in M.entries if j in position},
        Diag_Norm(weights=tuple(M.src.weights[j] for j in cols)),
        M.tgt,
    )


def scaled_entries(M: Val_Matrix) -> Entries:
    """Entries multiplied by ``t^(tau_i - rho_j)``, so both norms become trivial."""
    return {
        (i, j): hs_shift(value, M.tgt.weights[i] - M.src.weights[j])
        for (i, j), value in M.entries
    }


def op_norm_val(M: Val_Matrix) -> Log_Val:
    """
    Valuation of the operator norm: ``min (val(M_ij) + tau_i - rho_j)``.

    Exact because both norms are diagonal on the chosen bases.
    """
    return lv_min(valuation(value) for value in scaled_entries(M).values())


@dataclass(frozen=True)
class Singular_Profile:
    """Singular valuations in increasing order (decreasing singular values)."""

    valuations: tuple[Log_Val, ...]
    #: Whether each valuation is known to be exact at the precision used.
    certified: tuple[bool, ...]
    #: Whether the elimination ended with no entry of unknown value.
    complete: bool = True
    #: The precision cap that produced this profile.
    cap: Log_Val = INFINITY

    @property
    def rank(self) -> int:
        return len(self.valuations)

    @property
    def is_certified(self) -> bool:
        return self.complete and all(self.certified)


@dataclass(frozen=True)
class Pivot:
    """One step of the elimination."""

    row: int
    col: int
    valuation: Log_Val
    certified: bool

    def to_json(self) -> dict[str, Any]:
        return {
            "row": self.row,
            "col": self.col,
            "valuation": format_log_val(self.valuation),
            "certified": self.certified,
        }


def _eliminate(M: Val_Matrix, cap: Log_Val) -> tuple[Singular_Profile, list[Pivot]]:
    work = scaled_entries(M)
    trace: list[Pivot] = list()
    while True:
        known = [(valuation(v), i, j) for (i, j), v in work.items() if not is_zero(v)]
        if not known:
            break
        pivot_val, p, q = min(known)
        guard = lv_min(v.precision for v in work.values())
        trace.append(Pivot(p, q, pivot_val, pivot_val < guard))

        inverse = hs_inv(work[(p, q)], cap)
        pivot_row = {j: v for (i, j), v in work.items() if i == p and j != q}
        pivot_col = {i: v for (i, j), v in work.items() if j == q and i != p}
        work = {(i, j): v for (i, j), v in work.items() if i != p and j != q}
        for i, below in pivot_col.items():
            factor = hs_neg(hs_mul(below, inverse))
            for j, right in pivot_row.items():
                work[(i, j)] = hs_add(work.get((i, j), ZERO), hs_mul(factor, right))
        work = {
            key: value
            for key, value in work.items()
            if not (is_zero(value) and value.is_exact)
        }
    profile = Singular_Profile(
        valuations=tuple(pivot.valuation for pivot in trace),
        certified=tuple(pivot.certified for pivot in trace),
        complete=all(value.is_exact for value in work.values()),
        cap=cap,
    )
    return profile, trace


def na_svd(
    M: Val_Matrix,
    cap: Log_Val = defaults.precision_cap,
    retries: int = defaults.precision_retries,
    strict: bool = True,
) -> Singular_Profile:
    """
    Ultrametric singular valuations by greedy valuation pivoting.

    Each pivot is the entry of least rescaled valuation, ties broken by
    ``(row, column)``; it is certified when it lies below the precision of
    every remaining entry. Uncertified runs are repeated with a doubled cap.

    :param strict: Raise :class:`Precision_Exhausted` when the last cap still
      fails; otherwise return the uncertified profile.
    """
    profile, _ = _certified_elimination(M, cap, retries, strict)
    return profile


def pivot_trace(
    M: Val_Matrix,
    cap: Log_Val = defaults.precision_cap,
    retries: int = defaults.precision_retries,
) -> list[Pivot]:
    """The pivots of the final elimination run, for debugging dumps."""
    _, trace = _certified_elimination(M, cap, retries, strict=False)
    return trace


def _certified_elimination(
    M: Val_Matrix, cap: Log_Val, retries: int, strict: bool
) -> tuple[Singular_Profile, list[Pivot]]:
    for attempt in range(retries + 1):
        current_cap = cap * 2**attempt if cap != INFINITY else cap
        profile, trace = _eliminate(M, current_cap)
        if profile.is_certified:
            return profile, trace
        logger.debug(
            "elimination uncertified at cap %s (%s pivots)", current_cap, len(trace)
        )
    if strict:
        raise Precision_Exhausted(
            f"singular valuations still uncertified at precision cap {current_cap}"
        )
    return profile, trace


def wedge_top_val(M: Val_Matrix, **kwargs) -> Fraction:
    """
    Valuation of the top exterior power of an injective map: the sum of all
    singular valuations.
    """
    profile = na_svd(M, **kwargs)
    if profile.rank < M.shape[1]:
        raise Rank_Deficient(f"rank {profile.rank} < {M.shape[1]} columns")
    return sum(profile.valuations, Fraction(0))  # type: ignore[arg-type]


def minor_oracle(M: Val_Matrix, r: int) -> Log_Val:
    """
    ``min`` over all ``r x r`` minors of ``val(det) + sum tau_rows - sum rho_cols``.

    The determinants are expanded exactly by a Laplace recursion over column
    subsets; only small matrices are accepted.
    """
    rows, cols = M.shape
    if cols > defaults.minor_oracle_max_columns:
        raise Validation_Error(
            f"the minor oracle accepts at most "
            f"{defaults.minor_oracle_max_columns} columns, got {cols}"
        )
    if not 0 <= r <= min(rows, cols):
        raise Validation_Error(f"no {r}x{r} minors in a {rows}x{cols} matrix")
    if r == 0:
        return Fraction(0)
    entries = scaled_entries(M)
    best: Log_Val = INFINITY
    for row_subset in it.combinations(range(rows), r):
        for determinant in _minors_of_rows(entries, row_subset, cols).values():
            best = min(best, valuation(determinant))
    return best


def _minors_of_rows(
    entries: Entries, row_subset: Sequence[int], cols: int
) -> dict[int, Hahn_Series]:
    """Determinants of the given rows against every column subset, by bitmask."""
    layer: dict[int, Hahn_Series] = {0: ONE}
    for i in row_subset:
        following: dict[int, Hahn_Series] = dict()
        for mask, minor in layer.items():
            for j in range(cols):
                if mask >> j & 1 or (i, j) not in entries:
                    continue
                term = hs_mul(minor, entries[(i, j)])
                if bin(mask >> (j + 1)).count("1") % 2:
                    term = hs_neg(term)
                key = mask | 1 << j
                following[key] = hs_add(following.get(key, ZERO), term)
        layer = following
    return layer


def contraction_monomials(sigma: Metric_Spec, a: int, n: int) -> list[Exp_Vec]:
    """Degree-``n`` monomials on which point ``a`` attains the minimum."""
    point = sigma.points[a]
    return [
        alpha
        for alpha in monomials(sigma.d, n)
        if monomial_val(point, alpha) == spec_monomial_val(sigma, alpha)
    ]


def contraction_val(
    sigma: Metric_Spec, a: int, coefficients: dict[Exp_Vec, Hahn_Series], n: int
) -> Log_Val:
    """Valuation of the component of a section on the contraction basis of ``a``."""
    point = sigma.points[a]
    return lv_min(
        lv_add(valuation(coefficients[alpha]), monomial_val(point, alpha))
        for alpha in contraction_monomials(sigma, a, n)
        if alpha in coefficients
    )
