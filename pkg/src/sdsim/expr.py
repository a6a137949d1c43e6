"""Expression trees for model equations.

Nodes are frozen dataclasses and support ``+ - * /`` so equations can be
written directly in Python::

    ref("FRE") / ref("HCI")
    integ(ref("Increased Recommendations") - ref("Removed Recommendations"), 5)
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator, Union

FUNCTIONS = {"INTEG": 2, "MAX": 2, "MIN": 2, "RANDOM_NORMAL": 5}
# surface spelling in model files
FUNCTION_SPELLING = {"INTEG": "INTEG", "MAX": "MAX", "MIN": "MIN", "RANDOM_NORMAL": "RANDOM NORMAL"}
OPS = ("+", "-", "*", "/")
PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}


class Expr:
    def __add__(self, other):
        return Binary("+", self, as_expr(other))

    def __radd__(self, other):
        return Binary("+", as_expr(other), self)

    def __sub__(self, other):
        return Binary("-", self, as_expr(other))

    def __rsub__(self, other):
        return Binary("-", as_expr(other), self)

    def __mul__(self, other):
        return Binary("*", self, as_expr(other))

    def __rmul__(self, other):
        return Binary("*", as_expr(other), self)

    def __truediv__(self, other):
        return Binary("/", self, as_expr(other))

    def __rtruediv__(self, other):
        return Binary("/", as_expr(other), self)

    def __str__(self):
        return format_expr(self)


@dataclass(frozen=True, eq=True)
class NumberLiteral(Expr):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True, eq=True)
class VarRef(Expr):
    name: str


@dataclass(frozen=True, eq=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown operator {self.op!r}")


@dataclass(frozen=True, eq=True)
class Call(Expr):
    function: str
    args: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if self.function not in FUNCTIONS:
            raise ValueError(f"unknown function {self.function!r}")
        if len(self.args) != FUNCTIONS[self.function]:
            raise ValueError(
                f"{self.function} takes {FUNCTIONS[self.function]} arguments, got {len(self.args)}"
            )


ExprLike = Union[Expr, int, float, str]


def as_expr(x: ExprLike) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, str):
        return VarRef(normalize_name(x))
    if isinstance(x, (int, float)):
        return NumberLiteral(x)
    raise TypeError(f"cannot build an expression from {x!r}")


def ref(name: str) -> VarRef:
    return VarRef(normalize_name(name))


def integ(flow: ExprLike, initial: ExprLike) -> Call:
    return Call("INTEG", (as_expr(flow), as_expr(initial)))


def emax(a: ExprLike, b: ExprLike) -> Call:
    return Call("MAX", (as_expr(a), as_expr(b)))


def emin(a: ExprLike, b: ExprLike) -> Call:
    return Call("MIN", (as_expr(a), as_expr(b)))


def random_normal(lo: ExprLike, hi: ExprLike, mean: ExprLike, sd: ExprLike, seed: ExprLike) -> Call:
    return Call("RANDOM_NORMAL", tuple(as_expr(a) for a in (lo, hi, mean, sd, seed)))


_WS = re.compile(r"\s+")


def normalize_name(name: str) -> str:
    """Collapse internal whitespace; names are otherwise case-sensitive."""
    return _WS.sub(" ", name.strip())


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Binary):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, Call):
            stack.extend(reversed(node.args))


def references(e: Expr) -> list[str]:
    """Referenced names in first-appearance order, without duplicates."""
    seen: dict[str, None] = {}
    for node in walk(e):
        if isinstance(node, VarRef):
            seen.setdefault(node.name, None)
    return list(seen)


def contains_call(e: Expr, function: str) -> bool:
    return any(isinstance(n, Call) and n.function == function for n in walk(e))


# -- rendering -------------------------------------------------------------

_PLAIN_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_. ]*$")
_RESERVED = {"INTEG", "MAX", "MIN", "RANDOM NORMAL", "RANDOM"}


def needs_quotes(name: str) -> bool:
    if not _PLAIN_NAME.match(name) or name != name.strip():
        return True
    return name.upper() in _RESERVED


def format_name(name: str) -> str:
    return f'"{name}"' if needs_quotes(name) else name


def format_number(value: float) -> str:
    if math.isfinite(value) and value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def format_expr(e: Expr) -> str:
    """Canonical text; parenthesises exactly where the tree shape needs it."""
    if isinstance(e, NumberLiteral):
        return format_number(e.value)
    if isinstance(e, VarRef):
        return format_name(e.name)
    if isinstance(e, Call):
        args = ", ".join(format_expr(a) for a in e.args)
        return f"{FUNCTION_SPELLING[e.function]}({args})"
    if isinstance(e, Binary):
        prec = PRECEDENCE[e.op]
        left = format_expr(e.left)
        if isinstance(e.left, Binary) and PRECEDENCE[e.left.op] < prec:
            left = f"({left})"
        right = format_expr(e.right)
        if isinstance(e.right, Binary) and PRECEDENCE[e.right.op] <= prec:
            right = f"({right})"
        elif isinstance(e.right, NumberLiteral) and e.right.value < 0:
            right = f"({right})"
        if isinstance(e.left, NumberLiteral) and e.left.value < 0 and prec == 2:
            left = f"({left})"
        return f"{left}{e.op}{right}" if prec == 2 else f"{left} {e.op} {right}"
    raise TypeError(f"not an expression: {e!r}")
