"""Small arithmetic-expression language for config files.

Grammar is Python's expression syntax restricted to numbers, the names
``x y z t pi``, the operators ``+ - * / ^ **`` and calls to ``sin cos exp
sqrt``.  ``^`` is a synonym for ``**`` (same precedence, right associative).
Expressions compile to numpy-vectorized callables; nothing is ever passed
to ``eval``.
"""
from __future__ import annotations

import ast
import math

import numpy as np

from .errors import ConfigurationError

VARIABLES = ("x", "y", "z", "t")
CONSTANTS = {"pi": math.pi}
FUNCTIONS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "sqrt": np.sqrt}
# numpy ufuncs so that 1/0 and (-1)^0.5 give inf/nan instead of raising or going complex
_BINOPS = {ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply,
           ast.Div: np.true_divide, ast.Pow: np.power}
_UNOPS = {ast.USub: np.negative, ast.UAdd: np.positive}


class ExpressionError(ConfigurationError):
    pass


def _compile(node, text):
    """Turn an AST node into a function of an environment dict."""
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExpressionError(f"unsupported literal {node.value!r} in {text!r}")
        v = np.float64(node.value)
        return lambda env: v
    if isinstance(node, ast.Name):
        name = node.id
        if name in CONSTANTS:
            v = np.float64(CONSTANTS[name])
            return lambda env: v
        if name in VARIABLES:
            return lambda env: env[name]
        raise ExpressionError(f"unknown name {name!r} in {text!r}")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        a, b = _compile(node.left, text), _compile(node.right, text)
        return lambda env: op(a(env), b(env))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
        op = _UNOPS[type(node.op)]
        a = _compile(node.operand, text)
        return lambda env: op(a(env))
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise ExpressionError(f"unsupported function call in {text!r}")
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"{node.func.id} takes exactly one argument")
        fn = FUNCTIONS[node.func.id]
        a = _compile(node.args[0], text)
        return lambda env: fn(a(env))
    raise ExpressionError(f"unsupported syntax {type(node).__name__} in {text!r}")


class Expression:
    """Compiled expression; call as ``expr(x, y, z, t=0.0)``."""

    def __init__(self, text: str):
        self.text = text.strip()
        if not self.text:
            raise ExpressionError("empty expression")
        try:
            tree = ast.parse(self.text.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ExpressionError(f"cannot parse {self.text!r}: {exc.msg}") from None
        self._fn = _compile(tree.body, self.text)
        self.names = {n.id for n in ast.walk(tree) if isinstance(n, ast.Name)} & set(VARIABLES)

    def __call__(self, x=0.0, y=0.0, z=0.0, t=0.0):
        env = {k: np.asarray(v, dtype=float)
               for k, v in (("x", x), ("y", y), ("z", z), ("t", t))}
        with np.errstate(all="ignore"):
            out = self._fn(env)
        shape = np.broadcast_shapes(*(np.shape(v) for v in env.values()))
        return np.broadcast_to(np.asarray(out, dtype=float), shape) if shape else float(out)

    @property
    def space(self):
        """The expression as a callable of ``(x, y, z)`` only."""
        return lambda x, y, z: self(x, y, z)

    def __repr__(self):
        return f"Expression({self.text!r})"


def parse_expression(text: str) -> Expression:
    return Expression(text)


def parse_number(text: str) -> float:
    """Evaluate a constant expression such as ``pi/10`` or ``1/16``."""
    e = Expression(text)
    if e.names:
        raise ExpressionError(f"{text!r} must be a constant")
    v = float(e())
    if not math.isfinite(v):
        raise ExpressionError(f"{text!r} is not finite")
    return v
