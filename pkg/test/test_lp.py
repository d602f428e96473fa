from fractions import Fraction

import pytest
import shilov_eq.lp as lp
import test.strategies as myst
from hypothesis import given
from hypothesis import strategies as st
from shilov_eq.errors import Infeasible, Unbounded, Validation_Error


def test_maximize_static():
    result = lp.maximize([1, 1], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6])
    assert result.value == Fraction(14, 5)
    assert result.x == (Fraction(8, 5), Fraction(6, 5))


def test_equality_constraints_static():
    result = lp.maximize([1, 0], A_eq=[[1, 1]], b_eq=[1])
    assert result.value == 1
    assert result.x == (Fraction(1), Fraction(0))

    # the second row is redundant
    result = lp.maximize([0, 1], A_eq=[[1, 1], [2, 2]], b_eq=[1, 2])
    assert result.value == 1
    assert result.x == (Fraction(0), Fraction(1))


def test_free_variables_static():
    result = lp.maximize([-1], A_ub=[[-1]], b_ub=[3], free=[0])
    assert result.value == 3
    assert result.x == (Fraction(-3),)

    result = lp.maximize([1, 0], A_ub=[[1, 0]], b_ub=[Fraction(-1, 2)], free=[0, 1])
    assert result.value == Fraction(-1, 2)


def test_lp_errors_static():
    with pytest.raises(Infeasible):
        lp.maximize([1], A_ub=[[1]], b_ub=[-1])
    with pytest.raises(Unbounded):
        lp.maximize([1, 0], A_ub=[[0, 1]], b_ub=[1])
    with pytest.raises(Validation_Error):
        lp.maximize([1, 1], A_ub=[[1, 1]], b_ub=[1, 2])
    with pytest.raises(Validation_Error):
        lp.maximize([1, 1], A_ub=[[1]], b_ub=[1])


@given(
    st.lists(st.tuples(myst.small_rationals, myst.small_rationals), min_size=1, max_size=4)
)
def test_box_optimum(rows: list[tuple[Fraction, Fraction]]):
    c = [cost for cost, _ in rows]
    bounds = [abs(bound) for _, bound in rows]
    identity = [[int(i == j) for j in range(len(rows))] for i in range(len(rows))]
    result = lp.maximize(c, A_ub=identity, b_ub=bounds)
    assert result.value == sum(max(cost, 0) * bound for cost, bound in zip(c, bounds))
    assert all(0 <= x_j <= b_j for x_j, b_j in zip(result.x, bounds))
    assert sum(cost * x_j for cost, x_j in zip(c, result.x)) == result.value
