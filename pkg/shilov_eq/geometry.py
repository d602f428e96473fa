"""
Exact piecewise-linear geometry on the standard simplex.

Points of ``Delta_d`` are written in reduced coordinates
``x = (u_1, ..., u_d)`` with ``u_0 = 1 - sum(x)``, so the simplex is
``{x >= 0, sum(x) <= 1}``. An affine function is stored as
``(a_0, a_1, ..., a_d)`` meaning ``a_0 + sum_j a_j x_j``.

Cells ``{g_a <= g_i for all i}`` of a family of affine functions are
clipped out of the simplex exactly: as intervals for ``d = 1`` and as
convex polygons for ``d = 2``. Volumes and integrals are normalized so that
the whole simplex has volume one.
"""
from __future__ import annotations

import itertools as it
import math
from collections.abc import Iterable, Sequence
from fractions import Fraction
from typing import Optional

from shilov_eq.errors import Validation_Error

#: An affine function ``(a_0, a_1, ..., a_d)`` in reduced coordinates.
Affine = tuple[Fraction, ...]
#: A point of the simplex in reduced coordinates.
Vertex = tuple[Fraction, ...]
#: A convex cell, given by its vertices: the two interval endpoints for
#: ``d = 1``, the polygon in counter-clockwise order for ``d = 2``.
Cell = list[Vertex]


def affine_of_point(w: Sequence[Fraction], c: Fraction) -> Affine:
    """``u -> <w, u> + c`` written in reduced coordinates."""
    return (w[0] + c,) + tuple(w_j - w[0] for w_j in w[1:])


def evaluate(g: Affine, x: Sequence[Fraction]) -> Fraction:
    return g[0] + sum((a * x_j for a, x_j in zip(g[1:], x)), Fraction(0))


def affine_sub(g: Affine, h: Affine) -> Affine:
    return tuple(a - b for a, b in zip(g, h))


def simplex_vertices(d: int) -> list[Vertex]:
    """``e_0, e_1, ..., e_d`` in reduced coordinates, counter-clockwise for d=2."""
    origin = tuple(Fraction(0) for _ in range(d))
    return [origin] + [
        tuple(Fraction(int(i == j)) for i in range(d)) for j in range(d)
    ]


def in_simplex(x: Sequence[Fraction]) -> bool:
    return all(x_j >= 0 for x_j in x) and sum(x, Fraction(0)) <= 1


def _check_exact_dimension(d: int) -> None:
    if d not in (1, 2):
        raise Validation_Error(f"exact cell geometry needs d <= 2, got d={d}")


def clip(cell: Cell, h: Affine) -> Cell:
    """
    Intersect a convex cell with the half-space ``h <= 0``.

    Sutherland-Hodgman for polygons; plain endpoint clipping for intervals.
    """
    if not cell:
        return []
    if len(h) == 2:
        return _clip_interval(cell, h)
    out: Cell = list()
    for p, q in zip(cell, cell[1:] + cell[:1]):
        hp, hq = evaluate(h, p), evaluate(h, q)
        if hp <= 0:
            out.append(p)
        if (hp < 0 < hq) or (hq < 0 < hp):
            s = hp / (hp - hq)
            out.append(tuple(p_j + s * (q_j - p_j) for p_j, q_j in zip(p, q)))
    deduplicated: Cell = list()
    for vertex in out:
        if not deduplicated or deduplicated[-1] != vertex:
            deduplicated.append(vertex)
    if len(deduplicated) > 1 and deduplicated[0] == deduplicated[-1]:
        deduplicated.pop()
    return deduplicated


def _clip_interval(cell: Cell, h: Affine) -> Cell:
    (lo,), (hi,) = cell[0], cell[-1]
    b, a = h
    if a == 0:
        return cell if b <= 0 else []
    root = -b / a
    if a > 0:
        hi = min(hi, root)
    else:
        lo = max(lo, root)
    return [(lo,), (hi,)] if lo <= hi else []


def cell(affines: Sequence[Affine], a: int) -> Cell:
    """The closed cell of index ``a``, clipped out of the simplex."""
    d = len(affines[a]) - 1
    _check_exact_dimension(d)
    region: Cell = (
        [(Fraction(0),), (Fraction(1),)] if d == 1 else simplex_vertices(2)
    )
    for i, g in enumerate(affines):
        if i != a:
            region = clip(region, affine_sub(affines[a], g))
    return region


def cell_volume_of(region: Cell, d: int) -> Fraction:
    """Normalized volume of a cell: length for d=1, twice the area for d=2."""
    if len(region) < d + 1:
        return Fraction(0)
    if d == 1:
        return region[-1][0] - region[0][0]
    return abs(_signed_double_area(region))


def _signed_double_area(polygon: Cell) -> Fraction:
    return sum(
        (p[0] * q[1] - q[0] * p[1] for p, q in zip(polygon, polygon[1:] + polygon[:1])),
        Fraction(0),
    )


def cell_volume(affines: Sequence[Affine], a: int) -> Fraction:
    return cell_volume_of(cell(affines, a), len(affines[a]) - 1)


def integrate_on_cell(region: Cell, g: Affine) -> Fraction:
    """
    Normalized integral of ``g`` over a cell.

    Affine functions integrate exactly to volume times the value at the
    centroid; polygons are fanned into triangles.
    """
    d = len(g) - 1
    if len(region) < d + 1:
        return Fraction(0)
    if d == 1:
        (lo,), (hi,) = region[0], region[-1]
        return (hi - lo) * evaluate(g, ((lo + hi) / 2,))
    total = Fraction(0)
    sign = 1 if _signed_double_area(region) >= 0 else -1
    p0 = region[0]
    for p, q in zip(region[1:], region[2:]):
        triangle = [p0, p, q]
        centroid = tuple(sum(coords, Fraction(0)) / 3 for coords in zip(*triangle))
        total += sign * _signed_double_area(triangle) * evaluate(g, centroid)
    return total


def envelope_average(affines: Sequence[Affine]) -> Fraction:
    """
    Normalized integral of ``min_i g_i`` over the simplex.

    Repeated affine functions are merged first so that no cell is counted twice.
    """
    unique = list(dict.fromkeys(affines))
    return sum(
        (integrate_on_cell(cell(unique, a), g) for a, g in enumerate(unique)),
        Fraction(0),
    )


def solve_exact(
    matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> Optional[tuple[Fraction, ...]]:
    """Gauss-Jordan elimination over the rationals; ``None`` if singular."""
    n = len(matrix)
    rows = [list(row) + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return None
        rows[col], rows[pivot] = rows[pivot], rows[col]
        head = rows[col][col]
        rows[col] = [value / head for value in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [v - factor * p for v, p in zip(rows[r], rows[col])]
    return tuple(row[-1] for row in rows)


def simplex_facets(d: int) -> list[Affine]:
    """The facets ``x_j = 0`` and ``sum(x) = 1`` as affine functions."""
    facets = [
        (Fraction(0),) + tuple(Fraction(int(i == j)) for i in range(d))
        for j in range(d)
    ]
    facets.append((Fraction(-1),) + (Fraction(1),) * d)
    return facets


def breaking_hyperplanes(affines: Sequence[Affine]) -> list[Affine]:
    """The hyperplanes ``g_i = g_j`` where an envelope may break."""
    planes = list()
    for g, h in it.combinations(affines, 2):
        difference = affine_sub(g, h)
        if any(a != 0 for a in difference[1:]):
            planes.append(difference)
    return planes


def arrangement_vertices(families: Iterable[Sequence[Affine]], d: int) -> set[Vertex]:
    """
    All points of the simplex where ``d`` independent hyperplanes meet.

    The hyperplanes are the simplex facets and the breaking hyperplanes of
    every family, so the result contains every vertex of the common
    refinement of the families' cell complexes.
    """
    planes = list(dict.fromkeys(simplex_facets(d)))
    for family in families:
        planes.extend(breaking_hyperplanes(family))
    planes = list(dict.fromkeys(planes))

    vertices: set[Vertex] = set()
    for chosen in it.combinations(planes, d):
        solution = solve_exact([h[1:] for h in chosen], [-h[0] for h in chosen])
        if solution is not None and in_simplex(solution):
            vertices.add(solution)
    return vertices


def facet_measures(affines: Sequence[Affine]) -> dict[tuple[int, int], float]:
    """
    Measure of the common facet of every pair of full-dimensional cells.

    For ``d = 1`` a facet is a point and has measure one; for ``d = 2`` it is
    a segment and the result is its Euclidean length in reduced coordinates.
    """
    d = len(affines[0]) - 1
    _check_exact_dimension(d)
    cells = [cell(affines, a) for a in range(len(affines))]
    full = [a for a, region in enumerate(cells) if cell_volume_of(region, d) > 0]
    measures: dict[tuple[int, int], float] = dict()
    for i, j in it.combinations(full, 2):
        difference = affine_sub(affines[i], affines[j])
        on_facet = [p for p in cells[i] if evaluate(difference, p) == 0]
        if d == 1:
            if on_facet:
                measures[(i, j)] = 1.0
            continue
        if len(on_facet) >= 2:
            p, q = min(on_facet), max(on_facet)
            length = math.sqrt(float(sum((a - b) ** 2 for a, b in zip(p, q))))
            if length > 0:
                measures[(i, j)] = length
    return measures


def gradient_norm(g: Affine) -> float:
    return math.sqrt(float(sum(a * a for a in g[1:])))
