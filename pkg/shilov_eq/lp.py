"""
An exact two-phase simplex method over the rationals.

All problems solved here are tiny (one variable per simplex coordinate plus
a margin), so the tableau is a dense ``numpy`` object array of ``Fraction``
and pivots follow Bland's rule, which never cycles.
"""
from __future__ import annotations

import logging
from collections.abc import Collection, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from shilov_eq.errors import Infeasible, Unbounded, Validation_Error

logger = logging.getLogger(__name__)

#: A dense row of a constraint matrix.
Row = Sequence[Fraction | int]


@dataclass(frozen=True)
class LP_Result:
    """An optimal vertex of a linear program."""

    #: The optimal objective value.
    value: Fraction
    #: Values of the original variables at the optimum.
    x: tuple[Fraction, ...]


def _as_fraction_array(rows: Sequence[Row], width: int) -> np.ndarray:
    array = np.empty((len(rows), width), dtype=object)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise Validation_Error(f"constraint row {i} has {len(row)} != {width} entries")
        array[i, :] = [Fraction(value) for value in row]
    return array


def _pivot(tableau: np.ndarray, basis: list[int], row: int, col: int) -> None:
    tableau[row, :] = tableau[row, :] / tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0:
            tableau[r, :] = tableau[r, :] - tableau[r, col] * tableau[row, :]
    basis[row] = col


def _run_simplex(tableau: np.ndarray, basis: list[int], columns: int) -> None:
    """
    Optimize in place; the last row holds the reduced costs.

    Only the first ``columns`` columns may enter the basis.
    """
    n_rows = tableau.shape[0] - 1
    while True:
        entering = next(
            (j for j in range(columns) if tableau[-1, j] < 0), None
        )
        if entering is None:
            return

        leaving = None
        best: tuple[Fraction, int] | None = None
        for i in range(n_rows):
            if tableau[i, entering] > 0:
                key = (tableau[i, -1] / tableau[i, entering], basis[i])
                if best is None or key < best:
                    best = key
                    leaving = i
        if leaving is None:
            raise Unbounded("the linear program is unbounded")
        _pivot(tableau, basis, leaving, entering)


def maximize(
    c: Row,
    A_ub: Sequence[Row] = (),
    b_ub: Row = (),
    A_eq: Sequence[Row] = (),
    b_eq: Row = (),
    free: Collection[int] = (),
) -> LP_Result:
    """
    Maximize ``c x`` subject to ``A_ub x <= b_ub`` and ``A_eq x = b_eq``.

    :param free: Indices of variables without sign constraint; all other
      variables are nonnegative.
    :raises Infeasible: if no point satisfies the constraints.
    :raises Unbounded: if the objective is unbounded above.
    """
    n = len(c)
    if len(A_ub) != len(b_ub) or len(A_eq) != len(b_eq):
        raise Validation_Error("constraint matrices and bounds have different lengths")
    free = sorted(set(free))

    # x_free = x_plus - x_minus; the minus parts are appended after x
    def split(rows: Sequence[Row]) -> list[list[Fraction]]:
        return [
            [Fraction(v) for v in row] + [-Fraction(row[j]) for j in free]
            for row in rows
        ]

    n_split = n + len(free)
    rows = split(A_ub) + split(A_eq)
    rhs = [Fraction(b) for b in b_ub] + [Fraction(b) for b in b_eq]
    n_ub, m = len(A_ub), len(rows)

    # columns: split variables | slacks of the <= rows | artificials | rhs
    width = n_split + n_ub + m + 1
    tableau = np.full((m + 1, width), Fraction(0), dtype=object)
    if m:
        tableau[:m, :n_split] = _as_fraction_array(rows, n_split)
    for i in range(n_ub):
        tableau[i, n_split + i] = Fraction(1)
    for i in range(m):
        tableau[i, -1] = rhs[i]
        if rhs[i] < 0:
            tableau[i, :] = -tableau[i, :]
        tableau[i, n_split + n_ub + i] = Fraction(1)
    basis = [n_split + n_ub + i for i in range(m)]

    # phase 1: maximize minus the sum of the artificials
    tableau[-1, n_split + n_ub : n_split + n_ub + m] = Fraction(1)
    for i in range(m):
        tableau[-1, :] = tableau[-1, :] - tableau[i, :]
    _run_simplex(tableau, basis, width - 1)
    if tableau[-1, -1] != 0:
        logger.debug("phase 1 ended with infeasibility %s", -tableau[-1, -1])
        raise Infeasible("the linear program has no feasible point")

    # drive the remaining artificials out of the basis, dropping redundant rows
    keep_rows = list()
    for i in range(m):
        if basis[i] >= n_split + n_ub:
            entering = next(
                (j for j in range(n_split + n_ub) if tableau[i, j] != 0), None
            )
            if entering is None:
                continue
            _pivot(tableau, basis, i, entering)
        keep_rows.append(i)
    columns = list(range(n_split + n_ub)) + [width - 1]
    tableau = tableau[keep_rows + [m]][:, columns]
    basis = [basis[i] for i in keep_rows]

    # phase 2
    objective = [Fraction(v) for v in c] + [-Fraction(c[j]) for j in free]
    tableau[-1, :] = Fraction(0)
    tableau[-1, :n_split] = [-v for v in objective]
    for i, b in enumerate(basis):
        if tableau[-1, b] != 0:
            tableau[-1, :] = tableau[-1, :] - tableau[-1, b] * tableau[i, :]
    _run_simplex(tableau, basis, n_split + n_ub)

    solution = [Fraction(0)] * (n_split + n_ub)
    for i, b in enumerate(basis):
        solution[b] = tableau[i, -1]
    x = solution[:n]
    for k, j in enumerate(free):
        x[j] = x[j] - solution[n + k]
    value = tableau[-1, -1]
    logger.debug("optimal value %s after phase 2", value)
    return LP_Result(value=Fraction(value), x=tuple(Fraction(v) for v in x))
