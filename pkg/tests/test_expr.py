import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from padeadi.expr import Expression, ExpressionError, parse_number


@pytest.mark.parametrize("text,value", [
    ("1 + 2*3", 7.0), ("2^3^2", 512.0), ("2**3", 8.0), ("-2^2", -4.0), ("1 + 2^2*3", 13.0),
    ("pi/10", math.pi / 10), ("sqrt(16) + exp(0) - cos(0) + sin(0)", 4.0), ("1/16", 0.0625),
])
def test_constant_expressions(text, value):
    assert parse_number(text) == pytest.approx(value, rel=1e-15)


def test_variables_and_vectorization():
    e = Expression("sqrt(1 + sin(x)^2 + sin(y)^2 + sin(z)^2) * exp(-t)")
    x = np.linspace(0, 3, 4)[:, None, None]
    y = np.linspace(0, 3, 5)[None, :, None]
    z = np.linspace(0, 3, 6)[None, None, :]
    out = e(x, y, z, 0.5)
    ref = np.sqrt(1 + np.sin(x) ** 2 + np.sin(y) ** 2 + np.sin(z) ** 2) * math.exp(-0.5)
    assert out.shape == (4, 5, 6)
    np.testing.assert_allclose(out, ref, rtol=1e-15)
    assert e.names == {"x", "y", "z", "t"}


def test_constant_broadcasts_to_grid():
    out = Expression("2").space(np.zeros((3, 1, 1)), np.zeros((1, 4, 1)), np.zeros((1, 1, 5)))
    assert out.shape == (3, 4, 5) and np.all(out == 2)


@pytest.mark.parametrize("text", [
    "__import__('os')", "x.real", "abs(x)", "x if y else z", "[x]", "lambda: 1", "q + 1",
    "sin(x, y)", "'a'", "x // 2", "", "1 +", "True", "sin(x=1)",
])
def test_rejected_inputs(text):
    with pytest.raises(ExpressionError):
        Expression(text)


def test_parse_number_rejects_variables_and_nonfinite():
    with pytest.raises(ExpressionError):
        parse_number("x + 1")
    with pytest.raises(ExpressionError):
        parse_number("1/0")


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 5))
def test_matches_python_arithmetic(a, b, c):
    e = Expression(f"({a!r}) * x - ({b!r}) / y + z^2")
    assert e(1.5, c, 2.0) == pytest.approx(a * 1.5 - b / c + 4.0, rel=1e-12, abs=1e-12)
