"""Tiny polynomial expression parser shared by the text formats.

Accepted grammar: integers, rationals via ``/`` by a constant, ``+ - *``,
``^`` (or ``**``) with a non-negative integer exponent, parentheses, and
atoms supplied by the caller.  Subscripted atoms such as ``v_{-1}`` are
rewritten to plain identifiers before parsing.
"""

from __future__ import annotations

import ast
import re

from .exact import Rational

_SUBSCRIPT = re.compile(r"([A-Za-z]+)_\{?\s*(-?\d+)\s*\}?")


class ParseError(ValueError):
    pass


def _mangle(text: str) -> str:
    def repl(m):
        name, idx = m.group(1), int(m.group(2))
        tag = f"m{-idx}" if idx < 0 else f"p{idx}"
        return f"{name}__{tag}"

    return _SUBSCRIPT.sub(repl, text).replace("^", "**")


def demangle(name: str):
    """Split a mangled identifier into ``(base, index)``; index is None if absent."""
    if "__" not in name:
        return name, None
    base, tag = name.split("__", 1)
    idx = int(tag[1:])
    return base, -idx if tag[0] == "m" else idx


def parse_expression(text: str, atom, one):
    """Parse ``text`` using ``atom(base, index)`` for identifiers.

    ``one`` is the multiplicative identity of the target ring; integer
    literals are embedded as ``one * literal``.
    """
    try:
        tree = ast.parse(_mangle(text), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return one * node.value
        if isinstance(node, ast.Name):
            base, idx = demangle(node.id)
            return atom(base, idx)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                exp = _constant(node.right)
                if exp.denominator != 1 or exp < 0:
                    raise ParseError("exponents must be non-negative integers")
                return walk(node.left) ** int(exp)
            if isinstance(node.op, ast.Div):
                return walk(node.left) * (1 / _constant(node.right))
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
        raise ParseError(f"unsupported syntax in {text!r}")

    return walk(tree)


def _constant(node) -> Rational:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return Rational(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_constant(node.operand)
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Div):
        return _constant(node.left) / _constant(node.right)
    raise ParseError("expected a rational constant")


def parse_lattice(text: str):
    """Parse a polynomial in ``n`` and ``e`` (for eps) into a LatticePoly."""
    from .exact import LatticePoly

    def atom(base, idx):
        if idx is None and base == "n":
            return LatticePoly.n()
        if idx is None and base in ("e", "eps"):
            return LatticePoly.eps()
        raise ParseError(f"unknown symbol {base!r}; use n and e")

    return parse_expression(text, atom, LatticePoly.const(1))
