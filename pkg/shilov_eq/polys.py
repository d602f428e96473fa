"""
The graded section algebra of ``O(1)`` on ``P^d``.

Degree-``n`` sections are homogeneous polynomials of degree ``n`` in the
variables ``x0, ..., xd`` with :class:`~shilov_eq.hahn.Hahn_Series`
coefficients. All bases are indexed by :func:`monomials`, whose order is
fixed once and used everywhere downstream.
"""
from __future__ import annotations

import math
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import lru_cache, reduce

from shilov_eq.errors import Validation_Error
from shilov_eq.hahn import (
    ONE,
    ZERO,
    Hahn_Series,
    format_hahn,
    hs_add,
    hs_mul,
    hs_scale,
    is_zero,
    parse_hahn,
    split_signed_terms,
)

#: An exponent vector ``alpha`` of ``d + 1`` nonnegative integers; its sum
#: is the degree of the monomial ``x^alpha``.
Exp_Vec = tuple[int, ...]
#: Sparse matrix entries, keyed by ``(row, column)`` monomials.
Sparse_Entries = dict[tuple[Exp_Vec, Exp_Vec], Hahn_Series]


def chi(d: int, n: int) -> int:
    """The Hilbert function ``C(n + d, d)``: the number of degree-``n`` monomials."""
    return math.comb(n + d, d)


@lru_cache(maxsize=256)
def monomials(d: int, n: int) -> tuple[Exp_Vec, ...]:
    """
    All exponent vectors of degree ``n`` in ``d + 1`` variables.

    The order is graded-lex, largest first:
    ``monomials(1, 2) == ((2, 0), (1, 1), (0, 2))``.
    """
    if d < 1:
        raise Validation_Error(f"the dimension has to be at least 1, got {d}")
    if n < 0:
        raise Validation_Error(f"the degree has to be nonnegative, got {n}")
    return tuple(_compositions(d + 1, n))


def _compositions(parts: int, total: int) -> Iterable[Exp_Vec]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(parts - 1, total - first):
            yield (first,) + rest


@lru_cache(maxsize=256)
def monomial_index(d: int, n: int) -> dict[Exp_Vec, int]:
    """Position of every degree-``n`` monomial in :func:`monomials`."""
    return {alpha: i for i, alpha in enumerate(monomials(d, n))}


def exp_add(alpha: Exp_Vec, beta: Exp_Vec) -> Exp_Vec:
    return tuple(a + b for a, b in zip(alpha, beta))


@dataclass(frozen=True)
class Hom_Poly:
    """
    A section of ``O(n)``: a homogeneous polynomial of degree ``n``.

    Terms are kept in monomial order and never hold an exact zero.
    """

    #: Dimension of the projective space; there are ``d + 1`` variables.
    d: int
    #: The grading level ``n``.
    degree: int
    #: ``(alpha, coefficient)`` pairs in the order of :func:`monomials`.
    terms: tuple[tuple[Exp_Vec, Hahn_Series], ...] = ()

    def coefficients(self) -> dict[Exp_Vec, Hahn_Series]:
        return dict(self.terms)

    def coefficient(self, alpha: Exp_Vec) -> Hahn_Series:
        return self.coefficients().get(alpha, ZERO)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: Hom_Poly) -> Hom_Poly:
        return poly_add(self, other)

    def __mul__(self, other: Hom_Poly) -> Hom_Poly:
        return poly_mul(self, other)

    def __str__(self) -> str:
        return format_poly(self)


def hom_poly(d: int, degree: int, terms: Mapping[Exp_Vec, Hahn_Series]) -> Hom_Poly:
    """
    Build a :class:`Hom_Poly`, checking every exponent vector.

    Exact zero coefficients are dropped.
    """
    index = monomial_index(d, degree)
    for alpha in terms:
        if alpha not in index:
            raise Validation_Error(
                f"{alpha} is not an exponent vector of degree {degree} "
                f"in {d + 1} variables"
            )
    return Hom_Poly(
        d=d,
        degree=degree,
        terms=tuple(
            (alpha, coeff)
            for alpha, coeff in sorted(terms.items(), key=lambda item: index[item[0]])
            if not (is_zero(coeff) and coeff.is_exact)
        ),
    )


def zero_poly(d: int, degree: int) -> Hom_Poly:
    return Hom_Poly(d=d, degree=degree)


def monomial_poly(d: int, alpha: Sequence[int], coeff: Hahn_Series = ONE) -> Hom_Poly:
    """The single term ``coeff * x^alpha``."""
    alpha = tuple(alpha)
    if len(alpha) != d + 1 or any(a < 0 for a in alpha):
        raise Validation_Error(f"{alpha} is not an exponent vector for d={d}")
    return hom_poly(d, sum(alpha), {alpha: coeff})


def variable(d: int, j: int, coeff: Hahn_Series = ONE) -> Hom_Poly:
    """The degree-1 section ``coeff * x_j``."""
    return monomial_poly(d, tuple(int(i == j) for i in range(d + 1)), coeff)


def _check_compatible(f: Hom_Poly, g: Hom_Poly) -> None:
    if f.d != g.d:
        raise Validation_Error(f"cannot combine sections on P^{f.d} and P^{g.d}")


def poly_add(f: Hom_Poly, g: Hom_Poly) -> Hom_Poly:
    _check_compatible(f, g)
    if f.degree != g.degree:
        raise Validation_Error(
            f"cannot add sections of degrees {f.degree} and {g.degree}"
        )
    collected = f.coefficients()
    for alpha, coeff in g.terms:
        collected[alpha] = hs_add(collected.get(alpha, ZERO), coeff)
    return hom_poly(f.d, f.degree, collected)


def poly_scale(f: Hom_Poly, c: Hahn_Series) -> Hom_Poly:
    """Multiply every coefficient by the scalar ``c``."""
    return hom_poly(f.d, f.degree, {alpha: hs_mul(c, coeff) for alpha, coeff in f.terms})


def poly_mul(f: Hom_Poly, g: Hom_Poly) -> Hom_Poly:
    """Product of sections; degrees add."""
    _check_compatible(f, g)
    collected: dict[Exp_Vec, Hahn_Series] = dict()
    for alpha, coeff_f in f.terms:
        for beta, coeff_g in g.terms:
            gamma = exp_add(alpha, beta)
            collected[gamma] = hs_add(
                collected.get(gamma, ZERO), hs_mul(coeff_f, coeff_g)
            )
    return hom_poly(f.d, f.degree + g.degree, collected)


def constant_poly(d: int, coeff: Hahn_Series = ONE) -> Hom_Poly:
    """The degree-0 section ``coeff``."""
    return hom_poly(d, 0, {(0,) * (d + 1): coeff})


def poly_pow(f: Hom_Poly, m: int) -> Hom_Poly:
    if m < 0:
        raise Validation_Error(f"negative power {m}")
    return reduce(poly_mul, [f] * m, constant_poly(f.d))


def poly_coeff_vector(f: Hom_Poly) -> list[Hahn_Series]:
    """Coefficients of ``f`` against :func:`monomials`, zeros included."""
    coefficients = f.coefficients()
    return [coefficients.get(alpha, ZERO) for alpha in monomials(f.d, f.degree)]


def poly_from_coeff_vector(d: int, n: int, vector: Sequence[Hahn_Series]) -> Hom_Poly:
    basis = monomials(d, n)
    if len(vector) != len(basis):
        raise Validation_Error(
            f"expected {len(basis)} coefficients for degree {n}, got {len(vector)}"
        )
    return hom_poly(d, n, dict(zip(basis, vector)))


@dataclass(frozen=True)
class Mult_Op_Matrix:
    """
    The matrix of ``R_n -> R_{n+m}, f -> s f`` in the monomial bases.

    The column of ``x^alpha`` holds the expansion of ``s x^alpha``.
    """

    d: int
    src_degree: int
    tgt_degree: int
    #: Sparse entries keyed by ``(row monomial, column monomial)``.
    entries: tuple[tuple[tuple[Exp_Vec, Exp_Vec], Hahn_Series], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return chi(self.d, self.tgt_degree), chi(self.d, self.src_degree)

    def as_dict(self) -> Sparse_Entries:
        return dict(self.entries)


def mult_operator(s: Hom_Poly, n: int) -> Mult_Op_Matrix:
    """
    Matrix of multiplication by ``s`` from degree ``n`` to ``n + deg s``.

    Injective for every nonzero ``s``, since ``P^d`` is irreducible.
    """
    if s.is_zero:
        raise Validation_Error("multiplication by the zero section")
    entries: list[tuple[tuple[Exp_Vec, Exp_Vec], Hahn_Series]] = list()
    for col in monomials(s.d, n):
        for beta, coeff in s.terms:
            entries.append(((exp_add(beta, col), col), coeff))
    return Mult_Op_Matrix(
        d=s.d, src_degree=n, tgt_degree=n + s.degree, entries=tuple(entries)
    )


def apply_operator(M: Mult_Op_Matrix, f: Hom_Poly) -> Hom_Poly:
    """Apply the matrix to the coefficient vector of ``f``."""
    if f.degree != M.src_degree or f.d != M.d:
        raise Validation_Error("section does not live in the source of the matrix")
    coefficients = f.coefficients()
    collected: dict[Exp_Vec, Hahn_Series] = dict()
    for (row, col), entry in M.entries:
        if col in coefficients:
            collected[row] = hs_add(
                collected.get(row, ZERO), hs_mul(entry, coefficients[col])
            )
    return hom_poly(M.d, M.tgt_degree, collected)


# ---------------------------------------------------------------------------
# text form
# ---------------------------------------------------------------------------

_VARIABLE_RE = re.compile(r"x(\d+)(?:\s*\^\s*\(?(\d+)\)?)?")


def _unwrap(text: str) -> str:
    """Drop one pair of parentheses enclosing all of ``text``."""
    if not (text.startswith("(") and text.endswith(")")):
        return text
    depth = 0
    for i, char in enumerate(text):
        depth += {"(": 1, ")": -1}.get(char, 0)
        if depth == 0 and i < len(text) - 1:
            return text
    return text[1:-1]


def parse_poly(text: str, d: int, degree: int | None = None) -> Hom_Poly:
    """
    Read ``coef * x0^a0 x1^a1 ... + ...``.

    A coefficient is a Hahn series in text form; it needs parentheses when it
    has several terms, as in ``(1 + t)*x0``. The degree is read from the terms
    and only has to be given for the zero section.
    """
    text = text.strip()
    if text == "0":
        return zero_poly(d, degree if degree is not None else 0)

    collected: dict[Exp_Vec, Hahn_Series] = dict()
    degrees: set[int] = set()
    for sign, body in split_signed_terms(text):
        alpha = [0] * (d + 1)
        for match in _VARIABLE_RE.finditer(body):
            j = int(match.group(1))
            if j > d:
                raise Validation_Error(f"x{j} is not a variable on P^{d}: {body!r}")
            alpha[j] += int(match.group(2)) if match.group(2) else 1
        coeff_text = _VARIABLE_RE.sub(" ", body).strip().strip("*").strip()
        coeff = parse_hahn(_unwrap(coeff_text)) if coeff_text else ONE
        alpha_t = tuple(alpha)
        degrees.add(sum(alpha_t))
        collected[alpha_t] = hs_add(collected.get(alpha_t, ZERO), hs_scale(coeff, sign))

    if len(degrees) != 1:
        raise Validation_Error(f"not homogeneous, found degrees {sorted(degrees)}")
    (found,) = degrees
    if degree is not None and degree != found:
        raise Validation_Error(f"expected degree {degree}, found {found}")
    return hom_poly(d, found, collected)


def format_poly(f: Hom_Poly) -> str:
    """Canonical text form, read back by :func:`parse_poly`."""
    if f.is_zero:
        return "0"
    pieces = list()
    for alpha, coeff in f.terms:
        variables = " ".join(f"x{j}^{a}" for j, a in enumerate(alpha) if a > 0)
        if coeff == ONE and variables:
            pieces.append(variables)
        elif variables:
            pieces.append(f"({format_hahn(coeff)})*{variables}")
        else:
            pieces.append(f"({format_hahn(coeff)})")
    return " + ".join(pieces)
