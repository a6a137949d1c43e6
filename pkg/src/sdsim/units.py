"""Unit expressions: products of named base units with integer exponents."""

from __future__ import annotations

import re
from typing import Iterable, Mapping

from .errors import UnitParseError

DIMENSIONLESS_NAMES = ("Dmnl", "dmnl", "1")


class UnitExpr:
    """Immutable product of base units, e.g. ``bias/(interactions*Day)``.

    Zero exponents are dropped on construction, so equality is plain map
    equality. Insertion order is kept only for display.
    """

    __slots__ = ("_exp",)

    def __init__(self, exponents: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = exponents.items() if isinstance(exponents, Mapping) else exponents
        exp: dict[str, int] = {}
        for name, power in items:
            if int(power) != power:
                raise ValueError(f"unit exponent must be an integer, got {power!r}")
            exp[name] = exp.get(name, 0) + int(power)
        self._exp = {k: v for k, v in exp.items() if v != 0}

    @classmethod
    def base(cls, name: str) -> "UnitExpr":
        return cls({name: 1})

    @property
    def exponents(self) -> dict[str, int]:
        return dict(self._exp)

    @property
    def dimensionless(self) -> bool:
        return not self._exp

    def __mul__(self, other: "UnitExpr") -> "UnitExpr":
        return UnitExpr(list(self._exp.items()) + list(other._exp.items()))

    def __truediv__(self, other: "UnitExpr") -> "UnitExpr":
        return UnitExpr(list(self._exp.items()) + [(k, -v) for k, v in other._exp.items()])

    def inverse(self) -> "UnitExpr":
        return UnitExpr({k: -v for k, v in self._exp.items()})

    def __eq__(self, other):
        if not isinstance(other, UnitExpr):
            return NotImplemented
        return self._exp == other._exp

    def __hash__(self):
        return hash(frozenset(self._exp.items()))

    def __repr__(self):
        return f"UnitExpr({self._exp!r})"

    def __str__(self):
        return format_units(self)


DMNL = UnitExpr()


def format_units(u: UnitExpr) -> str:
    """Render in the model-file idiom: ``a*b/(c*d)``, ``1/Day``, ``Dmnl``."""
    num: list[str] = []
    den: list[str] = []
    for name, power in u._exp.items():
        (num if power > 0 else den).extend([name] * abs(power))
    if not num and not den:
        return "Dmnl"
    top = "*".join(num) if num else "1"
    if not den:
        return top
    bottom = den[0] if len(den) == 1 else "(" + "*".join(den) + ")"
    return f"{top}/{bottom}"


_UNIT_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_.]*)|(?P<one>1)|(?P<op>[*/()]))")


def parse_units(raw: str) -> UnitExpr:
    """Parse ``term (('*'|'/') term)*`` where a term is an identifier, ``1``
    or a parenthesised unit expression. ``Dmnl`` is the empty product."""
    tokens = _tokenize_units(raw)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def expr() -> UnitExpr:
        nonlocal pos
        result = term()
        while peek() in ("*", "/"):
            op = tokens[pos]
            pos += 1
            rhs = term()
            result = result * rhs if op == "*" else result / rhs
        return result

    def term() -> UnitExpr:
        nonlocal pos
        tok = peek()
        if tok is None:
            raise UnitParseError(f"unexpected end of unit expression {raw!r}")
        pos += 1
        if tok == "(":
            inner = expr()
            if peek() != ")":
                raise UnitParseError(f"missing ')' in unit expression {raw!r}")
            pos += 1
            return inner
        if tok in ("*", "/", ")"):
            raise UnitParseError(f"unexpected {tok!r} in unit expression {raw!r}")
        if tok in DIMENSIONLESS_NAMES:
            return DMNL
        return UnitExpr.base(tok)

    if not tokens:
        raise UnitParseError("empty unit expression")
    result = expr()
    if pos != len(tokens):
        raise UnitParseError(f"unexpected {tokens[pos]!r} in unit expression {raw!r}")
    return result


def _tokenize_units(raw: str) -> list[str]:
    tokens = []
    pos = 0
    text = raw.strip()
    while pos < len(text):
        m = _UNIT_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = text[pos:].strip()[:1]
            raise UnitParseError(f"unknown token {bad!r} in unit expression {raw!r}")
        tokens.append(m.group("ident") or m.group("one") or m.group("op"))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return tokens
