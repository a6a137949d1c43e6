"""Model definitions: variables, simulation control and the model container."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from .errors import InvalidControl
from .expr import Call, Expr, NumberLiteral, VarRef, normalize_name
from .units import DMNL, UnitExpr

CONTROL_NAMES = ("INITIAL TIME", "FINAL TIME", "TIME STEP", "SAVEPER")
TIME = "Time"


class Kind(str, enum.Enum):
    STOCK = "stock"
    AUXILIARY = "auxiliary"
    CONSTANT = "constant"
    CONTROL = "control"


def classify(name: str, expr: Expr) -> Kind:
    if name in CONTROL_NAMES:
        return Kind.CONTROL
    if isinstance(expr, Call) and expr.function == "INTEG":
        return Kind.STOCK
    if isinstance(expr, NumberLiteral):
        return Kind.CONSTANT
    return Kind.AUXILIARY


@dataclass(frozen=True)
class VariableDef:
    name: str
    expr: Expr
    units: UnitExpr = DMNL
    range: Optional[tuple[Optional[float], Optional[float]]] = None
    doc: Optional[str] = None
    index: Optional[int] = field(default=None, compare=False)
    span: Optional[tuple[int, int]] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "name", normalize_name(self.name))
        if not self.name:
            raise ValueError("variable name must be non-empty")

    @property
    def kind(self) -> Kind:
        return classify(self.name, self.expr)


@dataclass(frozen=True)
class SimControl:
    initial_time: float = 0.0
    final_time: float = 100.0
    dt: float = 1.0
    saveper: float = 1.0

    def validate(self) -> None:
        vals = (self.initial_time, self.final_time, self.dt, self.saveper)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidControl(f"control values must be finite: {vals}")
        if self.dt <= 0:
            raise InvalidControl(f"TIME STEP must be positive, got {self.dt}")
        # final == initial is allowed: a zero-step run records the initial state only
        if self.final_time < self.initial_time:
            raise InvalidControl("FINAL TIME must not precede INITIAL TIME")
        if self.saveper < self.dt:
            raise InvalidControl(f"SAVEPER ({self.saveper}) must be >= TIME STEP ({self.dt})")
        ratio = self.saveper / self.dt
        if abs(ratio - round(ratio)) > 1e-12 * ratio:
            raise InvalidControl("SAVEPER must be an integer multiple of TIME STEP")

    @property
    def n_steps(self) -> int:
        span = (self.final_time - self.initial_time) / self.dt
        return int(math.floor(span + 1e-9))

    @property
    def save_every(self) -> int:
        return int(round(self.saveper / self.dt))

    @property
    def n_saved(self) -> int:
        return self.n_steps // self.save_every + 1

    def as_dict(self) -> dict:
        return {
            "initial_time": self.initial_time,
            "final_time": self.final_time,
            "dt": self.dt,
            "saveper": self.saveper,
        }


@dataclass(frozen=True)
class ModelSpec:
    """Ordered variable definitions plus simulation control.

    Control entries (INITIAL TIME, ...) stay in ``variables`` so a model
    serializes back to the same listing; ``control`` holds their values.
    """

    variables: tuple[VariableDef, ...] = ()
    control: SimControl = SimControl()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))

    def __iter__(self):
        return iter(self.variables)

    def __len__(self):
        return len(self.variables)

    def __contains__(self, name: str) -> bool:
        return any(v.name == name for v in self.variables)

    def __getitem__(self, name: str) -> VariableDef:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [v.name for v in self.variables]

    def of_kind(self, kind: Kind) -> list[VariableDef]:
        return [v for v in self.variables if v.kind is kind]

    def counts(self) -> dict[str, int]:
        return {k.value: len(self.of_kind(k)) for k in Kind}

    def with_variable(self, var: VariableDef) -> "ModelSpec":
        """Replace (or append) one definition, keeping order."""
        out = []
        found = False
        for v in self.variables:
            if v.name == var.name:
                out.append(var)
                found = True
            else:
                out.append(v)
        if not found:
            out.append(var)
        return replace(self, variables=tuple(out))

    def semantic_key(self) -> tuple:
        """Comparison key ignoring entry numbers and source spans."""
        return (
            tuple((v.name, v.expr, v.units, v.range, v.doc) for v in self.variables),
            self.control,
        )


def control_from_variables(variables: Iterable[VariableDef]) -> SimControl:
    """Evaluate control entries; SAVEPER may reference TIME STEP."""
    defs = {v.name: v for v in variables if v.name in CONTROL_NAMES}
    defaults = SimControl()
    values: dict[str, float] = {}

    def value_of(name: str, trail: tuple[str, ...] = ()) -> float:
        if name in values:
            return values[name]
        if name not in defs:
            fallback = {
                "INITIAL TIME": defaults.initial_time,
                "FINAL TIME": defaults.final_time,
                "TIME STEP": defaults.dt,
                "SAVEPER": None,
            }[name]
            if fallback is None:
                return value_of("TIME STEP", trail)
            return fallback
        if name in trail:
            raise InvalidControl("circular control definitions: " + " -> ".join(trail + (name,)))
        e = defs[name].expr
        if isinstance(e, NumberLiteral):
            v = e.value
        elif isinstance(e, VarRef) and e.name in CONTROL_NAMES:
            v = value_of(e.name, trail + (name,))
        else:
            raise InvalidControl(f"{name} must be a number or a reference to another control entry")
        values[name] = v
        return v

    return SimControl(
        initial_time=value_of("INITIAL TIME"),
        final_time=value_of("FINAL TIME"),
        dt=value_of("TIME STEP"),
        saveper=value_of("SAVEPER"),
    )


def make_model(variables: Iterable[VariableDef]) -> ModelSpec:
    variables = tuple(variables)
    return ModelSpec(variables=variables, control=control_from_variables(variables))


def with_control(spec: ModelSpec, **values: Optional[float]) -> ModelSpec:
    """Rewrite control entries by keyword (initial_time, final_time, dt, saveper).

    A SAVEPER defined as a reference to TIME STEP keeps following it, so
    changing ``dt`` alone also changes the save cadence.
    """
    names = {"initial_time": "INITIAL TIME", "final_time": "FINAL TIME", "dt": "TIME STEP", "saveper": "SAVEPER"}
    unknown = set(values) - set(names)
    if unknown:
        raise TypeError(f"unknown control keyword(s): {sorted(unknown)}")
    out = spec
    for key, value in values.items():
        if value is None:
            continue
        name = names[key]
        old = spec[name] if name in spec else VariableDef(name=name, expr=NumberLiteral(0.0), units=UnitExpr.base("Day"))
        out = out.with_variable(replace(old, expr=NumberLiteral(float(value))))
    return make_model(out.variables)
