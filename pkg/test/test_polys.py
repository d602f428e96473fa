import pytest
import shilov_eq.polys as polys
import test.strategies as myst
from hypothesis import given
from hypothesis import strategies as st
from shilov_eq.errors import Validation_Error
from shilov_eq.hahn import ONE, hahn, hs_monomial, t_power
from shilov_eq.polys import Hom_Poly


def test_chi_static():
    assert polys.chi(1, 2) == 3
    assert polys.chi(2, 2) == 6
    assert polys.chi(3, 0) == 1


def test_monomials_static():
    assert polys.monomials(1, 2) == ((2, 0), (1, 1), (0, 2))
    assert polys.monomials(2, 1) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert polys.monomial_index(1, 2)[(1, 1)] == 1
    with pytest.raises(Validation_Error):
        polys.monomials(0, 1)
    with pytest.raises(Validation_Error):
        polys.monomials(1, -1)


@given(st.integers(min_value=1, max_value=3), st.integers(min_value=0, max_value=5))
def test_monomials_are_counted_by_chi(d: int, n: int):
    basis = polys.monomials(d, n)
    assert len(basis) == polys.chi(d, n)
    assert len(set(basis)) == len(basis)
    assert all(len(alpha) == d + 1 and sum(alpha) == n for alpha in basis)


def test_hom_poly_static():
    f = polys.hom_poly(1, 2, {(0, 2): t_power(1), (1, 1): ONE, (2, 0): hahn([])})
    assert f.terms == (((1, 1), ONE), ((0, 2), t_power(1)))
    with pytest.raises(Validation_Error):
        polys.hom_poly(1, 2, {(1, 0): ONE})
    with pytest.raises(Validation_Error):
        polys.monomial_poly(1, (1, -1))


def test_poly_mul_static():
    x0, x1 = polys.variable(1, 0), polys.variable(1, 1)
    square = polys.poly_pow(x0 + x1, 2)
    assert square.terms == (
        ((2, 0), ONE),
        ((1, 1), hs_monomial(2)),
        ((0, 2), ONE),
    )
    assert polys.poly_pow(x0, 0) == polys.constant_poly(1)
    with pytest.raises(Validation_Error):
        polys.poly_add(x0, square)
    with pytest.raises(Validation_Error):
        polys.poly_mul(x0, polys.variable(2, 0))


def test_coeff_vector_static():
    f = polys.parse_poly("x0 x1 + t*x1^2", 1)
    vector = polys.poly_coeff_vector(f)
    assert vector[0].terms == ()
    assert vector[1] == ONE
    assert vector[2] == t_power(1)
    assert polys.poly_from_coeff_vector(1, 2, vector) == f
    with pytest.raises(Validation_Error):
        polys.poly_from_coeff_vector(1, 2, vector[:2])


def test_mult_operator_static():
    M = polys.mult_operator(polys.variable(1, 0), 1)
    assert M.shape == (3, 2)
    assert M.as_dict() == {((2, 0), (1, 0)): ONE, ((1, 1), (0, 1)): ONE}
    with pytest.raises(Validation_Error):
        polys.mult_operator(polys.zero_poly(1, 1), 1)


@given(
    st.integers(min_value=1, max_value=2).flatmap(
        lambda d: st.tuples(myst.hom_polys(d, 1), myst.hom_polys(d, 2))
    )
)
def test_mult_operator_multiplies(polys_pair: tuple[Hom_Poly, Hom_Poly]):
    s, f = polys_pair
    M = polys.mult_operator(s, f.degree)
    assert polys.apply_operator(M, f) == s * f


@given(
    st.integers(min_value=1, max_value=2).flatmap(
        lambda d: st.tuples(
            myst.hom_polys(d, 1), myst.hom_polys(d, 1), myst.hom_polys(d, 1)
        )
    )
)
def test_product_is_commutative_and_distributive(triple):
    f, g, h = triple
    assert f * g == g * f
    assert f * (g + h) == f * g + f * h


def test_parse_poly_static():
    f = polys.parse_poly("x0 x1 + t*x1^2", 1)
    assert f.degree == 2
    assert f.terms == (((1, 1), ONE), ((0, 2), t_power(1)))

    g = polys.parse_poly("(1 + t)*x0 - x1", 1)
    assert g.coefficient((1, 0)) == hahn([(0, 1), (1, 1)])
    assert g.coefficient((0, 1)) == hs_monomial(-1)

    assert polys.parse_poly("x2^(3)", 2) == polys.monomial_poly(2, (0, 0, 3))
    assert polys.parse_poly("0", 1, degree=3) == polys.zero_poly(1, 3)
    assert polys.parse_poly("x0 - x0", 1).is_zero


@pytest.mark.parametrize(
    "text,d,degree",
    [
        ("x0 + x1^2", 1, None),
        ("x2", 1, None),
        ("x0", 1, 2),
        ("(1 + t*x0", 1, None),
    ],
)
def test_parse_poly_rejects(text: str, d: int, degree):
    with pytest.raises(Validation_Error):
        polys.parse_poly(text, d, degree)


def test_format_poly_static():
    f = polys.parse_poly("x0 x1 + t*x1^2", 1)
    assert polys.format_poly(f) == "x0^1 x1^1 + (1*t^(1))*x1^2"
    assert polys.format_poly(polys.constant_poly(1, t_power(2))) == "(1*t^(2))"
    assert polys.format_poly(polys.zero_poly(2, 1)) == "0"


@given(
    st.integers(min_value=1, max_value=2).flatmap(
        lambda d: myst.hom_polys(d, 2, nonzero=False)
    )
)
def test_format_poly_is_read_back(f: Hom_Poly):
    assert polys.parse_poly(polys.format_poly(f), f.d, f.degree) == f
