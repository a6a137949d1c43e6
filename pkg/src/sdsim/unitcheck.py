"""Dimensional analysis of model equations.

Multiplication and division combine exponent maps; ``+``, ``-``, MAX and MIN
need equal operand units. A bare numeric literal is dimensionless under
``*`` and ``/`` but takes on its sibling's units in additive positions, so
``MAX(0, rate)`` and ``RANDOM NORMAL(1, 5, mean, sd, seed)`` check cleanly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .expr import Binary, Call, Expr, NumberLiteral, VarRef, format_expr
from .model import TIME, Kind, ModelSpec
from .units import DMNL, UnitExpr, format_units


class UnitMismatch(Exception):
    def __init__(self, variable: str, expected: UnitExpr, inferred: UnitExpr,
                 span: Optional[tuple[int, int]] = None, subexpr: str = ""):
        self.variable = variable
        self.expected = expected
        self.inferred = inferred
        self.span = span
        self.subexpr = subexpr
        super().__init__(self.render())

    def render(self) -> str:
        if self.span is None:
            where = "<no span>"
        elif self.span[0] == self.span[1]:
            where = f"line {self.span[0]}"
        else:
            where = f"lines {self.span[0]}-{self.span[1]}"
        text = f"{self.variable}: expected {format_units(self.expected)}, inferred {format_units(self.inferred)} at {where}"
        if self.subexpr:
            text += f" in `{self.subexpr}`"
        return text

    def as_dict(self) -> dict:
        return {
            "variable": self.variable,
            "expected": format_units(self.expected),
            "inferred": format_units(self.inferred),
            "span": list(self.span) if self.span else None,
            "subexpr": self.subexpr,
        }

    def __eq__(self, other):
        if not isinstance(other, UnitMismatch):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    __hash__ = Exception.__hash__


class _Inferrer:
    """Returns None for a literal whose units are still free."""

    def __init__(self, env: Mapping[str, UnitExpr], variable: str, span, time_unit: UnitExpr):
        self.env = env
        self.variable = variable
        self.span = span
        self.time_unit = time_unit
        self.found: list[UnitMismatch] = []

    def flag(self, expected: UnitExpr, inferred: UnitExpr, node: Expr) -> None:
        self.found.append(UnitMismatch(self.variable, expected, inferred, self.span, format_expr(node)))

    def unify(self, units: list[Optional[UnitExpr]], node: Expr) -> Optional[UnitExpr]:
        known = [u for u in units if u is not None]
        if not known:
            return None
        first = known[0]
        for u in known[1:]:
            if u != first:
                self.flag(first, u, node)
                break
        return first

    def infer(self, e: Expr) -> Optional[UnitExpr]:
        if isinstance(e, NumberLiteral):
            return None
        if isinstance(e, VarRef):
            if e.name == TIME and TIME not in self.env:
                return self.time_unit
            try:
                return self.env[e.name]
            except KeyError:
                raise KeyError(f"no units known for {e.name!r}") from None
        if isinstance(e, Binary):
            left = self.infer(e.left)
            right = self.infer(e.right)
            if e.op in "+-":
                return self.unify([left, right], e)
            left = DMNL if left is None else left
            right = DMNL if right is None else right
            return left * right if e.op == "*" else left / right
        if isinstance(e, Call):
            args = [self.infer(a) for a in e.args]
            if e.function in ("MAX", "MIN"):
                return self.unify(args, e)
            if e.function == "RANDOM_NORMAL":
                unit = self.unify(args[:4], e)
                if args[4] is not None and args[4] != DMNL:
                    self.flag(DMNL, args[4], e.args[4])
                return unit
            if e.function == "INTEG":
                return args[1]
        raise TypeError(f"cannot infer units of {e!r}")


def _time_unit(env: Mapping[str, UnitExpr]) -> UnitExpr:
    return env.get("TIME STEP", UnitExpr.base("Day"))


def infer_units(e: Expr, env: Mapping[str, UnitExpr], variable: str = "<expr>") -> UnitExpr:
    """Units of ``e``; raises the first UnitMismatch found inside it.

    A lone literal is reported as dimensionless.
    """
    inf = _Inferrer(env, variable, None, _time_unit(env))
    unit = inf.infer(e)
    if inf.found:
        raise inf.found[0]
    return DMNL if unit is None else unit


def check_variable(var, env: Mapping[str, UnitExpr]) -> list[UnitMismatch]:
    time_unit = _time_unit(env)
    inf = _Inferrer(env, var.name, var.span, time_unit)
    e = var.expr
    if var.kind is Kind.STOCK:
        flow, init = e.args
        flow_u = inf.infer(flow)
        want = var.units / time_unit
        if flow_u is not None and flow_u != want:
            inf.flag(want, flow_u, flow)
        init_u = inf.infer(init)
        if init_u is not None and init_u != var.units:
            inf.flag(var.units, init_u, init)
    else:
        got = inf.infer(e)
        if got is not None and got != var.units and not inf.found:
            inf.flag(var.units, got, e)
    return inf.found


def check_model(spec: ModelSpec) -> list[UnitMismatch]:
    """Every mismatch in the model, in definition order; empty means consistent."""
    env = {v.name: v.units for v in spec.variables}
    out: list[UnitMismatch] = []
    for var in spec.variables:
        out.extend(check_variable(var, env))
    return out
