"""Tiny arithmetic language for nonlinearities in problem files.

Variables ``t, x, y``; operators ``+ - * / ^`` (``**`` is accepted as a
synonym of ``^``); functions ``sin cos exp sqrt abs``; constants ``pi`` and
``e``. Expressions compile to vectorized numpy callables.
"""
from __future__ import annotations

import ast
import math
import operator

import numpy as np

from .errors import EvaluationError, InputError

VARIABLES = ("t", "x", "y")
CONSTANTS = {"pi": math.pi, "e": math.e}
FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}


def _power(base, expo):
    base = np.asarray(base, dtype=float)
    expo = np.asarray(expo, dtype=float)
    non_integer = expo != np.round(expo)
    if np.any(non_integer & (base < 0)):
        raise EvaluationError("non-integer power of a negative base")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.power(base, expo)


def _compile(node, source):
    if isinstance(node, ast.Expression):
        return _compile(node.body, source)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        v = np.float64(node.value)  # numpy semantics, e.g. 1/0 -> inf rather than an exception
        return lambda env: v
    if isinstance(node, ast.Name):
        if node.id in VARIABLES:
            name = node.id
            return lambda env: env[name]
        if node.id in CONSTANTS:
            v = np.float64(CONSTANTS[node.id])
            return lambda env: v
        raise InputError(f"unknown name {node.id!r} in {source!r}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _compile(node.operand, source)
        if isinstance(node.op, ast.USub):
            return lambda env: -inner(env)
        return inner
    if isinstance(node, ast.BinOp):
        left = _compile(node.left, source)
        right = _compile(node.right, source)
        if isinstance(node.op, ast.Pow):
            return lambda env: _power(left(env), right(env))
        op = _BINOPS.get(type(node.op))
        if op is None:
            raise InputError(f"operator not allowed in {source!r}")

        def binop(env):
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                return op(left(env), right(env))

        return binop
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise InputError(f"unknown function in {source!r}")
        if len(node.args) != 1 or node.keywords:
            raise InputError(f"{node.func.id} takes exactly one argument")
        fn = FUNCTIONS[node.func.id]
        arg = _compile(node.args[0], source)

        def call(env):
            with np.errstate(invalid="ignore", over="ignore"):
                return fn(arg(env))

        return call
    raise InputError(f"unsupported syntax in {source!r}")


class Expression:
    """Compiled expression; call as ``expr(t, x, y)`` with broadcastable arrays."""

    def __init__(self, source: str):
        if not isinstance(source, str) or not source.strip():
            raise InputError("expression must be a non-empty string")
        self.source = source
        text = source.replace("**", "^").replace("^", "**")
        try:
            tree = ast.parse(text.strip(), mode="eval")
        except SyntaxError as exc:
            raise InputError(f"cannot parse expression {source!r}: {exc.msg}") from None
        self._fn = _compile(tree, source)

    def __call__(self, t, x, y):
        t, x, y = np.broadcast_arrays(
            np.asarray(t, dtype=float), np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        )
        out = self._fn({"t": t, "x": x, "y": y})
        return np.broadcast_to(np.asarray(out, dtype=float), t.shape).copy()

    def __repr__(self):
        return f"Expression({self.source!r})"

    def __eq__(self, other):
        return isinstance(other, Expression) and other.source == self.source

    def __hash__(self):
        return hash(self.source)


def evaluate_constant(source) -> float:
    """Evaluate a variable-free expression such as ``"2*pi"``."""
    if isinstance(source, (int, float)) and not isinstance(source, bool):
        return float(source)
    value = Expression(str(source))(0.0, 0.0, 0.0)
    v = float(value)
    if not math.isfinite(v):
        raise InputError(f"constant expression {source!r} is not finite")
    return v
