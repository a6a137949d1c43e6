"""Compile a ModelSpec into a flat slot table and stack-machine programs."""

from __future__ import annotations

import graphlib
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import CyclicDependency, MalformedIntegral, UnresolvedReference
from .expr import Binary, Call, Expr, NumberLiteral, VarRef, references, walk
from .kernels import _common as K
from .model import CONTROL_NAMES, TIME, Kind, ModelSpec, SimControl

_BINOP = {"+": K.OP_ADD, "-": K.OP_SUB, "*": K.OP_MUL, "/": K.OP_DIV}
_CALLOP = {"MAX": K.OP_MAX, "MIN": K.OP_MIN, "RANDOM_NORMAL": K.OP_RANDN}


def variable_key(name: str) -> int:
    """64-bit FNV-1a of the UTF-8 name; identifies a variable's noise stream."""
    h = 0xCBF29CE484222325
    for byte in name.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


@dataclass(frozen=True)
class NoiseSite:
    variable: str
    args: tuple[Expr, ...]
    key: int


@dataclass(frozen=True, eq=False)
class CompiledModel:
    """Immutable evaluation plan; safe to share between concurrent runs."""

    spec: ModelSpec
    names: tuple[str, ...]
    kinds: dict[str, Kind]
    constants: dict[str, float]
    stocks: tuple[str, ...]
    initial_exprs: dict[str, Expr]
    flows: dict[str, Expr]
    eval_order: tuple[str, ...]
    aux_exprs: dict[str, Expr]
    noise_sites: tuple[NoiseSite, ...]
    control: SimControl
    # stack-machine programs: eval_order auxiliaries first, then one net flow per stock
    ops: np.ndarray = field(repr=False)
    iargs: np.ndarray = field(repr=False)
    fargs: np.ndarray = field(repr=False)
    prog_start: np.ndarray = field(repr=False)
    targets: np.ndarray = field(repr=False)
    site_keys: np.ndarray = field(repr=False)
    max_stack: int = 0

    @cached_property
    def slot(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}

    @property
    def stock_slots(self) -> list[tuple[str, int]]:
        return [(s, self.slot[s]) for s in self.stocks]

    @property
    def n_aux(self) -> int:
        return len(self.eval_order)

    def counts(self) -> dict[str, int]:
        return {
            "stocks": len(self.stocks),
            "auxiliaries": len(self.eval_order),
            "constants": len(self.constants),
        }

    @cached_property
    def direct_deps(self) -> dict[str, frozenset[str]]:
        """Names each slot reads. A stock reads its flow and initial expressions."""
        deps: dict[str, frozenset[str]] = {}
        for n in self.names:
            if n in self.constants:
                deps[n] = frozenset()
            elif n in self.flows:
                refs = references(self.flows[n]) + references(self.initial_exprs[n])
                deps[n] = frozenset(r for r in refs if r in self.kinds)
            else:
                deps[n] = frozenset(r for r in references(self.aux_exprs[n]) if r in self.kinds)
        return deps

    def cone(self, name: str) -> frozenset[str]:
        """Transitive dependency set of ``name`` (excluding itself unless cyclic via stocks)."""
        seen: set[str] = set()
        todo = list(self.direct_deps[name])
        while todo:
            n = todo.pop()
            if n in seen:
                continue
            seen.add(n)
            todo.extend(self.direct_deps[n])
        return frozenset(seen)

    def is_noisy(self, name: str) -> bool:
        """True when a RANDOM NORMAL draw can influence ``name``."""
        noisy = {s.variable for s in self.noise_sites}
        return name in noisy or bool(self.cone(name) & noisy)

    def program(self, index: int) -> tuple[int, int]:
        return int(self.prog_start[index]), int(self.prog_start[index + 1])

    def program_name(self, index: int) -> str:
        if index < self.n_aux:
            return self.eval_order[index]
        return self.stocks[index - self.n_aux]


class _Emitter:
    def __init__(self, slot: dict[str, int], control: dict[str, float]):
        self.slot = slot
        self.control = control
        self.owner = ""
        self.sites: list[NoiseSite] = []
        self.ops: list[int] = []
        self.iargs: list[int] = []
        self.fargs: list[float] = []
        self.max_depth = 0

    def emit(self, op: int, iarg: int = 0, farg: float = 0.0) -> None:
        self.ops.append(op)
        self.iargs.append(iarg)
        self.fargs.append(farg)

    def program(self, e: Expr) -> None:
        self.max_depth = max(self.max_depth, self._emit(e, 0))

    def _emit(self, e: Expr, depth: int) -> int:
        """Emit postfix code for ``e``; return the stack depth reached."""
        if isinstance(e, NumberLiteral):
            self.emit(K.OP_CONST, farg=e.value)
            return depth + 1
        if isinstance(e, VarRef):
            if e.name in self.slot:
                self.emit(K.OP_LOAD, iarg=self.slot[e.name])
            elif e.name == TIME:
                self.emit(K.OP_TIME)
            else:
                self.emit(K.OP_CONST, farg=self.control[e.name])
            return depth + 1
        if isinstance(e, Binary):
            a = self._emit(e.left, depth)
            b = self._emit(e.right, depth + 1)
            self.emit(_BINOP[e.op])
            return max(a, b)
        if isinstance(e, Call):
            reach = depth
            for i, arg in enumerate(e.args):
                reach = max(reach, self._emit(arg, depth + i))
            iarg = 0
            if e.function == "RANDOM_NORMAL":
                # a second draw in the same equation gets its own stream
                count = sum(1 for s in self.sites if s.variable == self.owner)
                key_name = self.owner if count == 0 else f"{self.owner}#{count}"
                iarg = len(self.sites)
                self.sites.append(NoiseSite(self.owner, e.args, variable_key(key_name)))
            self.emit(_CALLOP[e.function], iarg=iarg)
            return reach
        raise TypeError(e)


def compile_model(spec: ModelSpec) -> CompiledModel:
    """Order auxiliaries, extract stocks and noise sites, and emit programs.

    Raises UnresolvedReference, CyclicDependency, MalformedIntegral or
    InvalidControl.
    """
    spec.control.validate()
    control_values = {
        "INITIAL TIME": spec.control.initial_time,
        "FINAL TIME": spec.control.final_time,
        "TIME STEP": spec.control.dt,
        "SAVEPER": spec.control.saveper,
    }
    body = [v for v in spec.variables if v.kind is not Kind.CONTROL]
    kinds = {v.name: v.kind for v in body}
    known = set(kinds) | set(CONTROL_NAMES) | {TIME}

    for v in body:
        for r in references(v.expr):
            if r not in known:
                raise UnresolvedReference(r, v.name)
        exprs = list(v.expr.args) if v.kind is Kind.STOCK else [v.expr]
        for sub in exprs:
            if any(isinstance(n, Call) and n.function == "INTEG" for n in walk(sub)):
                raise MalformedIntegral(v.name)

    constants = {v.name: v.expr.value for v in body if v.kind is Kind.CONSTANT}
    stocks = tuple(v.name for v in body if v.kind is Kind.STOCK)
    flows = {v.name: v.expr.args[0] for v in body if v.kind is Kind.STOCK}
    initial_exprs = {v.name: v.expr.args[1] for v in body if v.kind is Kind.STOCK}
    aux_exprs = {v.name: v.expr for v in body if v.kind is Kind.AUXILIARY}

    order_index = {v.name: i for i, v in enumerate(body)}
    graph = {n: [r for r in references(e) if r in aux_exprs] for n, e in aux_exprs.items()}
    sorter = graphlib.TopologicalSorter(graph)
    try:
        sorter.prepare()
    except graphlib.CycleError as exc:
        cycle = list(exc.args[1][:-1])
        first = min(range(len(cycle)), key=lambda i: order_index[cycle[i]])
        cycle = cycle[first:] + cycle[:first]
        # graphlib reports the cycle against edge direction
        raise CyclicDependency([cycle[0]] + cycle[1:][::-1]) from None
    eval_order: list[str] = []
    while sorter.is_active():
        ready = sorted(sorter.get_ready(), key=order_index.__getitem__)
        eval_order.extend(ready)
        sorter.done(*ready)

    for s, init in initial_exprs.items():
        for r in _init_cone(init, aux_exprs):
            if r in flows:
                raise MalformedIntegral(s, f"initial value depends on stock {r!r}")

    names = tuple(v.name for v in body)
    slot = {n: i for i, n in enumerate(names)}

    programs = [aux_exprs[n] for n in eval_order] + [flows[s] for s in stocks]
    owners = list(eval_order) + list(stocks)
    em = _Emitter(slot, control_values)
    starts = [0]
    for owner, prog in zip(owners, programs):
        em.owner = owner
        em.program(prog)
        starts.append(len(em.ops))
    targets = [slot[n] for n in owners]

    return CompiledModel(
        spec=spec,
        names=names,
        kinds=kinds,
        constants=constants,
        stocks=stocks,
        initial_exprs=initial_exprs,
        flows=flows,
        eval_order=tuple(eval_order),
        aux_exprs=aux_exprs,
        noise_sites=tuple(em.sites),
        control=spec.control,
        ops=np.array(em.ops, dtype=np.int64),
        iargs=np.array(em.iargs, dtype=np.int64),
        fargs=np.array(em.fargs, dtype=np.float64),
        prog_start=np.array(starts, dtype=np.int64),
        targets=np.array(targets, dtype=np.int64),
        site_keys=np.array([s.key for s in em.sites] or [0], dtype=np.uint64),
        max_stack=max(em.max_depth, 1),
    )


def _init_cone(e: Expr, aux_exprs: dict[str, Expr]) -> set[str]:
    seen: set[str] = set()
    todo = references(e)
    while todo:
        r = todo.pop()
        if r in seen:
            continue
        seen.add(r)
        if r in aux_exprs:
            todo.extend(references(aux_exprs[r]))
    return seen
