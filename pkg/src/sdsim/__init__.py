"""Stock-and-flow system dynamics: SDL parsing, unit checking, Euler simulation
and the fashion-recommender bias experiments."""

from .compiler import CompiledModel, compile_model
from .engine import RngPolicy, RunConfig, RunResult, simulate, simulate_batch
from .errors import SDSimError
from .expr import Binary, Call, Expr, NumberLiteral, VarRef
from .frs import PRESETS, build_frs_model, load_frs_model, preset
from .model import Kind, ModelSpec, SimControl, VariableDef, make_model, with_control
from .parser import load_model, parse_model, serialize
from .unitcheck import UnitMismatch, check_model
from .units import UnitExpr, parse_units

__version__ = "0.1.0"

__all__ = [
    "Binary", "Call", "CompiledModel", "Expr", "Kind", "ModelSpec", "NumberLiteral", "PRESETS",
    "RngPolicy", "RunConfig", "RunResult", "SDSimError", "SimControl", "UnitExpr", "UnitMismatch",
    "VarRef", "VariableDef", "build_frs_model", "check_model", "compile_model", "load_frs_model",
    "load_model", "make_model", "parse_model", "parse_units", "preset", "serialize", "simulate",
    "simulate_batch", "with_control",
]
