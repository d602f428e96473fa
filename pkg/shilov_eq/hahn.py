"""
Finite Hahn series over the rationals, the scalars of the base field.

A series is a finite sum ``c_1 t^(e_1) + ... + c_k t^(e_k)`` with rational
coefficients and strictly increasing rational exponents, plus a precision
``p``: every term of exponent ``>= p`` is unknown.
Exact values carry the precision :data:`INFINITY`.
All norms are stored additively as valuations ``v = -log |x|``.
"""
from __future__ import annotations

import math
import re
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from shilov_eq.errors import Validation_Error

#: An exact rational number, always in canonical reduced form.
Rat = Fraction
#: An additive valuation: a rational, or ``math.inf`` for the valuation of zero.
Log_Val = Union[Fraction, float]
#: One term of a series, as ``(exponent, coefficient)``.
Term = tuple[Fraction, Fraction]

#: The valuation of zero; also the precision of exact values.
INFINITY: float = math.inf


def to_rat(value: Union[int, str, Fraction]) -> Fraction:
    """
    Turn an ``int``, a rational string like ``"3/4"`` or a ``Fraction``
    into a ``Fraction``.

    Floats are only accepted when they are integral, so that no rounding
    ever enters exact computations.
    """
    if isinstance(value, bool):
        raise Validation_Error(f"not a rational number: {value!r}")
    if isinstance(value, float):
        if not value.is_integer():
            raise Validation_Error(
                f"refusing to convert the non-integral float {value!r}; "
                "write it as a fraction string instead"
            )
        return Fraction(int(value))
    try:
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise Validation_Error(f"not a rational number: {value!r}") from e


def lv_add(a: Log_Val, b: Log_Val) -> Log_Val:
    """Add two valuations without ever turning a ``Fraction`` into a float."""
    if a == INFINITY or b == INFINITY:
        return INFINITY
    return a + b


def lv_min(values: Iterable[Log_Val]) -> Log_Val:
    """Minimum of valuations, :data:`INFINITY` for an empty collection."""
    return min(values, default=INFINITY)


@dataclass(frozen=True)
class Hahn_Series:
    """
    An element of the base field, known up to its precision.

    Instances are always normalized: coefficients are nonzero, exponents
    strictly increase and lie below the precision.
    Use :func:`hahn` or the arithmetic functions of this module to build them.
    """

    #: The known terms as ``(exponent, coefficient)`` pairs.
    terms: tuple[Term, ...] = ()
    #: Terms of exponent at least this are unknown.
    precision: Log_Val = INFINITY

    def __add__(self, other: Hahn_Series) -> Hahn_Series:
        return hs_add(self, other)

    def __sub__(self, other: Hahn_Series) -> Hahn_Series:
        return hs_sub(self, other)

    def __mul__(self, other: Hahn_Series) -> Hahn_Series:
        return hs_mul(self, other)

    def __neg__(self) -> Hahn_Series:
        return hs_neg(self)

    def __str__(self) -> str:
        return format_hahn(self)

    @property
    def val(self) -> Log_Val:
        return valuation(self)

    @property
    def is_exact(self) -> bool:
        return self.precision == INFINITY


def hahn(
    terms: Iterable[tuple[Union[int, str, Fraction], Union[int, str, Fraction]]],
    precision: Union[Log_Val, int, str] = INFINITY,
) -> Hahn_Series:
    """
    Build a normalized series from ``(exponent, coefficient)`` pairs.

    Repeated exponents are summed; terms at or above the precision are dropped.
    """
    collected: dict[Fraction, Fraction] = dict()
    for exp, coeff in terms:
        exp_q = to_rat(exp)
        collected[exp_q] = collected.get(exp_q, Fraction(0)) + to_rat(coeff)
    if precision != INFINITY:
        precision = to_rat(precision)  # type: ignore[arg-type]
    return _normalized(collected, precision)  # type: ignore[arg-type]


def _normalized(collected: dict[Fraction, Fraction], precision: Log_Val) -> Hahn_Series:
    return Hahn_Series(
        terms=tuple(
            (exp, coeff)
            for exp, coeff in sorted(collected.items())
            if coeff != 0 and exp < precision
        ),
        precision=precision,
    )


#: The exact zero.
ZERO = Hahn_Series()
#: The exact one.
ONE = Hahn_Series(terms=((Fraction(0), Fraction(1)),))


def hs_monomial(
    coeff: Union[int, str, Fraction], exp: Union[int, str, Fraction] = 0
) -> Hahn_Series:
    """The exact series ``coeff * t^exp``."""
    return hahn([(exp, coeff)])


def t_power(exp: Union[int, str, Fraction]) -> Hahn_Series:
    """The exact series ``t^exp``, of valuation ``exp``."""
    return hs_monomial(1, exp)


def valuation(a: Hahn_Series) -> Log_Val:
    """
    The exponent of the first term.

    For a series without terms this is its precision: :data:`INFINITY` for
    the exact zero, and an uncertified lower bound for a semi-exact zero.
    """
    if a.terms:
        return a.terms[0][0]
    return a.precision


def hs_val_certified(a: Hahn_Series) -> tuple[Log_Val, bool]:
    """
    Return the valuation together with whether it is known exactly.

    Only a semi-exact zero (every term cancelled below a finite precision)
    is uncertified; its valuation is merely at least its precision.
    """
    return valuation(a), bool(a.terms) or a.is_exact


def is_zero(a: Hahn_Series) -> bool:
    """Whether no term is known; includes semi-exact zeros."""
    return not a.terms


def hs_add(a: Hahn_Series, b: Hahn_Series) -> Hahn_Series:
    """Termwise sum; the result is known up to the smaller precision."""
    collected = dict(a.terms)
    for exp, coeff in b.terms:
        collected[exp] = collected.get(exp, Fraction(0)) + coeff
    return _normalized(collected, min(a.precision, b.precision))


def hs_neg(a: Hahn_Series) -> Hahn_Series:
    return Hahn_Series(
        terms=tuple((exp, -coeff) for exp, coeff in a.terms), precision=a.precision
    )


def hs_sub(a: Hahn_Series, b: Hahn_Series) -> Hahn_Series:
    return hs_add(a, hs_neg(b))


def hs_scale(a: Hahn_Series, q: Union[int, str, Fraction]) -> Hahn_Series:
    """Multiply by the exact rational ``q``."""
    q = to_rat(q)
    if q == 0:
        return ZERO
    return Hahn_Series(
        terms=tuple((exp, q * coeff) for exp, coeff in a.terms), precision=a.precision
    )


def hs_shift(a: Hahn_Series, exp: Union[int, str, Fraction]) -> Hahn_Series:
    """Multiply by ``t^exp``; valuation and precision both move by ``exp``."""
    exp = to_rat(exp)
    return Hahn_Series(
        terms=tuple((e + exp, coeff) for e, coeff in a.terms),
        precision=lv_add(a.precision, exp),
    )


def hs_mul(a: Hahn_Series, b: Hahn_Series) -> Hahn_Series:
    """
    Convolution of the terms.

    The product is known up to ``min(prec(a) + val(b), prec(b) + val(a))``,
    and ``val(ab) = val(a) + val(b)``.
    """
    precision = min(
        lv_add(a.precision, valuation(b)), lv_add(b.precision, valuation(a))
    )
    collected: dict[Fraction, Fraction] = dict()
    for exp_a, coeff_a in a.terms:
        for exp_b, coeff_b in b.terms:
            exp = exp_a + exp_b
            collected[exp] = collected.get(exp, Fraction(0)) + coeff_a * coeff_b
    return _normalized(collected, precision)


def truncate(a: Hahn_Series, precision: Log_Val) -> Hahn_Series:
    """Forget all terms of exponent at least ``precision``."""
    if precision >= a.precision:
        return a
    return _normalized(dict(a.terms), precision)


def hs_inv(a: Hahn_Series, cap: Log_Val) -> Hahn_Series:
    """
    Invert by a truncated geometric series.

    Write ``a = c t^v (1 + r)`` with ``val(r) > 0``; the series
    ``sum (-r)^k`` is summed below relative exponent ``min(cap, prec(a)) - v``,
    so the result has precision ``cap - 2v`` for exact ``a`` and
    ``a * hs_inv(a, cap)`` equals one up to exponent ``cap - v``.
    Exact monomials invert exactly.

    :param cap: The precision cap in val units; must be finite unless ``a``
      is an exact monomial.
    """
    if not a.terms:
        raise ZeroDivisionError("cannot invert a series without known terms")
    v, c = a.terms[0]
    head_inverse = hs_monomial(1 / c, -v)
    if len(a.terms) == 1 and a.is_exact:
        return head_inverse
    if cap == INFINITY:
        raise ValueError("a finite precision cap is needed to invert this series")

    relative_precision = min(lv_add(cap, -v), lv_add(a.precision, -v))
    # a = c t^v (1 + rest)
    rest = hs_scale(hs_shift(hahn(a.terms[1:], a.precision), -v), 1 / c)
    minus_rest = truncate(hs_neg(rest), relative_precision)

    total = truncate(ONE, relative_precision)
    power = truncate(ONE, relative_precision)
    while True:
        power = truncate(hs_mul(power, minus_rest), relative_precision)
        if valuation(power) >= relative_precision:
            break
        total = hs_add(total, power)
    total = truncate(hs_add(total, power), relative_precision)
    return hs_mul(head_inverse, total)


# ---------------------------------------------------------------------------
# text form
# ---------------------------------------------------------------------------

_NUMBER = r"[+-]?\d+(?:\.\d+)?(?:/\d+)?"
_TERM_RE = re.compile(
    rf"""^
    (?:\(?(?P<coeff>{_NUMBER})\)?\s*\*?\s*)?
    (?P<t>t(?:\s*\^\s*(?:\((?P<pexp>{_NUMBER})\)|(?P<exp>{_NUMBER})))?)?
    $""",
    re.VERBOSE,
)
_PRECISION_RE = re.compile(
    rf"^O\(\s*t\s*\^\s*(?:\((?P<pexp>{_NUMBER})\)|(?P<exp>{_NUMBER}))\s*\)$"
)


def split_signed_terms(text: str) -> list[tuple[int, str]]:
    """
    Split a sum into ``(sign, term)`` pairs at top-level ``+`` and ``-``.

    Signs inside parentheses and directly after ``^``, ``*`` or ``/``
    belong to a number and do not split.
    """
    parts: list[tuple[int, str]] = list()
    depth = 0
    sign = 1
    current: list[str] = list()
    previous = "+"
    for char in text:
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
            if depth < 0:
                raise Validation_Error(f"unbalanced parentheses in {text!r}")
        if char in "+-" and depth == 0 and previous not in "^*/":
            body = "".join(current).strip()
            if body:
                parts.append((sign, body))
                sign = 1
            if char == "-":
                sign = -sign
            current = list()
            previous = char
            continue
        current.append(char)
        if not char.isspace():
            previous = char
    if depth != 0:
        raise Validation_Error(f"unbalanced parentheses in {text!r}")
    body = "".join(current).strip()
    if body:
        parts.append((sign, body))
    elif parts or sign != 1:
        raise Validation_Error(f"dangling sign in {text!r}")
    return parts


def parse_hahn(text: str) -> Hahn_Series:
    """
    Read the text form ``c1*t^(e1) + c2*t^(e2) + ... + O(t^(p))``.

    Accepted terms are ``c*t^(e)``, ``c*t^e``, ``c*t``, ``c``, ``t^(e)`` and
    ``t``; an optional ``O(t^(p))`` term sets the precision.
    """
    text = text.strip()
    if not text:
        raise Validation_Error("empty series")
    terms: list[Term] = list()
    precision: Log_Val = INFINITY
    for sign, body in split_signed_terms(text):
        if (match := _PRECISION_RE.match(body)) is not None:
            if sign < 0:
                raise Validation_Error(f"negative precision term in {text!r}")
            precision = min(
                precision, to_rat(match.group("pexp") or match.group("exp"))
            )
            continue
        match = _TERM_RE.match(body)
        if match is None or (match.group("coeff") is None and not match.group("t")):
            raise Validation_Error(f"cannot read the term {body!r} of {text!r}")
        coeff = to_rat(match.group("coeff")) if match.group("coeff") else Fraction(1)
        if match.group("t"):
            exp_text = match.group("pexp") or match.group("exp")
            exp = to_rat(exp_text) if exp_text else Fraction(1)
        else:
            exp = Fraction(0)
        terms.append((exp, sign * coeff))
    return hahn(terms, precision)


def _format_exponent(exp: Fraction) -> str:
    return f"t^({exp})"


def format_hahn(a: Hahn_Series) -> str:
    """The canonical text form read back by :func:`parse_hahn`."""
    pieces: list[str] = list()
    for exp, coeff in a.terms:
        sign = "-" if coeff < 0 else "+"
        body = f"{abs(coeff)}*{_format_exponent(exp)}"
        if not pieces:
            pieces.append(body if sign == "+" else f"-{body}")
        else:
            pieces.append(f"{sign} {body}")
    if not a.is_exact:
        tail = f"O({_format_exponent(a.precision)})"  # type: ignore[arg-type]
        pieces.append(f"+ {tail}" if pieces else tail)
    return " ".join(pieces) if pieces else "0"


def format_log_val(value: Log_Val) -> str:
    """Rationals as ``p/q``, the valuation of zero as ``inf``."""
    return "inf" if value == INFINITY else str(value)


def parse_log_val(text: str) -> Log_Val:
    text = text.strip()
    if text in ("inf", "+inf"):
        return INFINITY
    return to_rat(text)
