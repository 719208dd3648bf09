"""Safe arithmetic expressions for config files.

Supports numbers, the named variables, ``+ - * / **``, unary minus and the
functions ``abs sqrt max min pow log exp``. Anything else is rejected.
"""

from __future__ import annotations

import ast
import math
import operator
from typing import Callable, Sequence

from ctm.errors import ConstructionError

_BINOPS: dict[type, Callable[[float, float], float]] = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}

_FUNCS: dict[str, Callable[..., float]] = {
    "abs": abs,
    "sqrt": math.sqrt,
    "max": max,
    "min": min,
    "pow": math.pow,
    "log": math.log,
    "exp": math.exp,
}


def compile_expression(source: str, variables: Sequence[str]) -> Callable[..., float]:
    """Compile ``source`` into a function of the given positional variables."""
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ConstructionError(f"cannot parse expression {source!r}: {exc.msg}") from exc
    names = tuple(variables)

    def build(node: ast.AST) -> Callable[[Sequence[float]], float]:
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            value = float(node.value)
            return lambda env: value
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ConstructionError(f"unknown variable {node.id!r} in {source!r}")
            idx = names.index(node.id)
            return lambda env: env[idx]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            if isinstance(node.op, ast.USub):
                return lambda env: -inner(env)
            return inner
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            op = _BINOPS[type(node.op)]
            left, right = build(node.left), build(node.right)
            return lambda env: op(left(env), right(env))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
                and node.func.id in _FUNCS and not node.keywords:
            fn = _FUNCS[node.func.id]
            args = [build(a) for a in node.args]
            return lambda env: fn(*(a(env) for a in args))
        raise ConstructionError(f"unsupported syntax in expression {source!r}")

    body = build(tree)

    def evaluate(*values: float) -> float:
        if len(values) != len(names):
            raise TypeError(f"expected {len(names)} arguments, got {len(values)}")
        return float(body(values))

    evaluate.__name__ = "expr"
    evaluate.__doc__ = source
    return evaluate
