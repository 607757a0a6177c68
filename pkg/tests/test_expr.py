import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coexist.errors import EvaluationError, InputError
from coexist.expr import Expression, evaluate_constant


@pytest.mark.parametrize("src, expected", [
    ("1 + 2*3", 7.0),
    ("2^3^2", 512.0),
    ("2**3", 8.0),
    ("-2^2", -4.0),
    ("sqrt(16) + abs(-1)", 5.0),
    ("exp(0) + cos(0) + sin(0)", 2.0),
    ("2*pi", 2 * math.pi),
    ("e", math.e),
    ("1/9", 1 / 9),
])
def test_constants(src, expected):
    assert evaluate_constant(src) == pytest.approx(expected, rel=1e-15)


def test_variables_broadcast():
    f = Expression("x^0.5 + sin(t+y)^2")
    t = np.linspace(0, 1, 5)
    out = f(t, 4.0, 0.0)
    np.testing.assert_allclose(out, 2 + np.sin(t) ** 2)
    assert out.shape == (5,)


def test_constant_expression_takes_shape_of_inputs():
    assert Expression("3")(np.zeros((2, 3)), 0, 0).shape == (2, 3)


@pytest.mark.parametrize("src", [
    "x^^2", "sin(", "log(x)", "z + 1", "__import__('os')", "x.real", "x if y else t",
    "sin(x, y)", "[x]", "x < y", "", "   ", "x // 2", "True",
])
def test_rejected(src):
    with pytest.raises(InputError):
        Expression(src)


def test_fractional_power_of_negative_base():
    with pytest.raises(EvaluationError):
        Expression("x^0.5")(0, -1.0, 0)
    assert Expression("x^2")(0, -3.0, 0) == 9.0


def test_non_finite_constant():
    with pytest.raises(InputError):
        evaluate_constant("1/0")


def test_equality_by_source():
    assert Expression("x+y") == Expression("x+y")
    assert Expression("x+y") != Expression("y+x")
    assert len({Expression("x"), Expression("x")}) == 1


@given(st.floats(0.01, 100), st.floats(-5, 5), st.floats(0, 10))
def test_matches_python_arithmetic(x, y, t):
    f = Expression("(2+cos(x))*y^2 - x/(1+exp(-t))")
    expected = (2 + math.cos(x)) * y ** 2 - x / (1 + math.exp(-t))
    assert float(f(t, x, y)) == pytest.approx(expected, rel=1e-12, abs=1e-12)
