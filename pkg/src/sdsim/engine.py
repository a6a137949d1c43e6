"""Euler integration of compiled models with a deterministic noise contract.

Noise: every RANDOM NORMAL draw is a pure function of
``(global seed, seed argument, variable, step index, attempt)``. Uniform bits
come from chained splitmix64 finalizers over that key; the normal deviate
is Acklam's rational approximation of the inverse CDF applied to one
uniform. Out-of-bounds deviates are redrawn with the next attempt index up
to ``max_attempts`` times, after which the last deviate is clamped into
``[min, max]``. With noise off a draw returns ``clamp(mean, min, max)``.

Because a variable's stream never depends on other variables, overriding a
constant leaves every draw outside its dependency cone unchanged.
"""

from __future__ import annotations

import logging
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from . import kernels
from .compiler import CompiledModel, variable_key
from .errors import (
    DivisionByZero,
    InvalidBounds,
    NonFiniteResult,
    SimulationError,
    UnknownOverride,
)
from .expr import Binary, Call, Expr, NumberLiteral, VarRef
from .kernels import _common as K
from .model import TIME, SimControl

log = logging.getLogger(__name__)

STOCHASTIC = "stochastic"
NOISE_OFF = "noise-off"


class RangeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class RngPolicy:
    """``global_seed=None`` means: use the model's ``Seed`` constant."""

    global_seed: Optional[int] = None
    mode: str = STOCHASTIC
    max_attempts: int = 64

    def __post_init__(self):
        if self.mode not in (STOCHASTIC, NOISE_OFF):
            raise ValueError(f"mode must be {STOCHASTIC!r} or {NOISE_OFF!r}, got {self.mode!r}")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.global_seed is not None and not 0 <= int(self.global_seed) < 2**64:
            raise ValueError("global_seed must fit in an unsigned 64-bit integer")

    @property
    def noise_on(self) -> bool:
        return self.mode == STOCHASTIC

    @classmethod
    def noise_off(cls) -> "RngPolicy":
        return cls(mode=NOISE_OFF)


class StreamKey(NamedTuple):
    seed: int
    variable: "int | str"
    step: int
    seed_arg: float = 0.0


def _key_array(key: StreamKey) -> np.ndarray:
    from .kernels import _numpy as knp

    var = variable_key(key.variable) if isinstance(key.variable, str) else int(key.variable)
    return knp.stream_key(
        np.array([key.seed], dtype=np.uint64),
        knp.seed_bits(np.array([key.seed_arg])),
        np.array([var], dtype=np.uint64),
        np.array([key.step], dtype=np.uint64),
    )


def draw_normal(key: StreamKey, lo: float, hi: float, mean: float, sd: float,
                *, noise_on: bool = True, max_attempts: int = 64) -> float:
    """One truncated normal deviate; a pure function of its arguments.

    ``sd`` enters as ``mean + sd*z``; a negative value therefore draws from
    the same distribution as ``|sd|``.
    """
    if not lo < hi:
        raise InvalidBounds(lo, hi)
    from .kernels import _numpy as knp

    out = knp.draw(np.array([lo]), np.array([hi]), np.array([mean]), np.array([sd]),
                   _key_array(key), noise_on, max_attempts)
    return float(out[0])


@dataclass
class RunResult:
    times: np.ndarray
    series: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.series[name]

    def __contains__(self, name: str) -> bool:
        return name in self.series

    @property
    def names(self) -> list[str]:
        return list(self.series)

    def final(self, name: str) -> float:
        return float(self.series[name][-1])

    def time_mean(self, name: str) -> float:
        """Arithmetic mean over the saved points."""
        return float(np.mean(self.series[name]))


# -- reference (tree-walking) evaluation ------------------------------------


class StepNoise:
    """Noise accessor for a single step of the tree evaluator."""

    def __init__(self, policy: RngPolicy, seed: int, step: int):
        self.policy = policy
        self.seed = seed
        self.step = step

    def normal(self, key_name: str, lo, hi, mean, sd, seed_arg) -> float:
        return draw_normal(StreamKey(self.seed, key_name, self.step, seed_arg), lo, hi, mean, sd,
                           noise_on=self.policy.noise_on, max_attempts=self.policy.max_attempts)


def eval_expr(e: Expr, state: Mapping[str, float], t: float, rng: Optional[StepNoise] = None,
              variable: str = "<expr>") -> float:
    """Evaluate ``e`` against a name->value table.

    ``rng=None`` evaluates RANDOM NORMAL in noise-off mode.
    """
    sites = [0]

    def ev(node: Expr) -> float:
        if isinstance(node, NumberLiteral):
            return node.value
        if isinstance(node, VarRef):
            if node.name in state:
                return state[node.name]
            if node.name == TIME:
                return t
            raise KeyError(node.name)
        if isinstance(node, Binary):
            a = ev(node.left)
            b = ev(node.right)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if b == 0.0:
                raise DivisionByZero(variable, t)
            return a / b
        if isinstance(node, Call):
            args = [ev(a) for a in node.args]
            if node.function == "MAX":
                return args[0] if args[0] >= args[1] else args[1]
            if node.function == "MIN":
                return args[0] if args[0] <= args[1] else args[1]
            if node.function == "RANDOM_NORMAL":
                lo, hi, mean, sd, seed_arg = args
                if not lo < hi:
                    raise InvalidBounds(lo, hi, variable, t)
                if not all(math.isfinite(x) for x in (mean, sd, seed_arg)):
                    raise NonFiniteResult(variable, t)
                ordinal = sites[0]
                sites[0] += 1
                key_name = variable if ordinal == 0 else f"{variable}#{ordinal}"
                if rng is None:
                    return min(max(mean, lo), hi)
                return rng.normal(key_name, lo, hi, mean, sd, seed_arg)
            raise SimulationError(variable, t, f"{node.function} outside a stock definition")
        raise TypeError(node)

    value = ev(e)
    if not math.isfinite(value):
        raise NonFiniteResult(variable, t)
    return value


def _check_overrides(model: CompiledModel, overrides: Mapping[str, float]) -> dict[str, float]:
    out = {}
    for name, value in (overrides or {}).items():
        if name not in model.constants and name not in model.flows:
            raise UnknownOverride(name)
        out[name] = float(value)
    return out


def initial_state(model: CompiledModel, overrides: Mapping[str, float] | None = None) -> dict[str, float]:
    """Constants plus stock initial values, with overrides applied."""
    overrides = _check_overrides(model, overrides or {})
    table = dict(model.constants)
    table.update({k: v for k, v in overrides.items() if k in model.constants})
    t0 = model.control.initial_time
    cache: dict[str, float] = {}

    def aux_value(name: str) -> float:
        if name not in cache:
            env = _LazyEnv(table, model, aux_value)
            cache[name] = eval_expr(model.aux_exprs[name], env, t0, None, name)
        return cache[name]

    for s in model.stocks:
        if s in overrides:
            table[s] = overrides[s]
        else:
            table[s] = eval_expr(model.initial_exprs[s], _LazyEnv(table, model, aux_value), t0, None, s)
    return table


class _LazyEnv(Mapping):
    def __init__(self, table, model, aux_value):
        self.table = table
        self.model = model
        self.aux_value = aux_value

    def __getitem__(self, key):
        if key in self.table:
            return self.table[key]
        if key in self.model.aux_exprs:
            return self.aux_value(key)
        raise KeyError(key)

    def __contains__(self, key):
        return key in self.table or key in self.model.aux_exprs

    def __iter__(self):
        return iter(self.table)

    def __len__(self):
        return len(self.table)


def resolve_seed(policy: RngPolicy, table: Mapping[str, float]) -> int:
    if policy.global_seed is not None:
        return int(policy.global_seed)
    seed = table.get("Seed", 0.0)
    return int(math.floor(seed + 0.5)) & 0xFFFFFFFFFFFFFFFF


def evaluate_auxiliaries(model: CompiledModel, state: Mapping[str, float], t: float,
                         rng: Optional[StepNoise] = None) -> dict[str, float]:
    """Auxiliary values at ``t`` from the stocks and constants in ``state``."""
    env = dict(state)
    for name in model.eval_order:
        env[name] = eval_expr(model.aux_exprs[name], env, t, rng, name)
    return {name: env[name] for name in model.eval_order}


def step(model: CompiledModel, state: Mapping[str, float], t: float,
         rng: Optional[StepNoise] = None) -> tuple[dict[str, float], dict[str, float]]:
    """One explicit Euler step with the tree evaluator.

    Returns ``(next_state, auxiliaries_at_t)``; ``next_state`` carries the
    constants forward and holds stocks at ``t + dt``.
    """
    aux = evaluate_auxiliaries(model, state, t, rng)
    env = dict(state)
    env.update(aux)
    dt = model.control.dt
    nets = {s: eval_expr(model.flows[s], env, t, rng, s) for s in model.stocks}
    nxt = dict(state)
    for s in model.stocks:
        value = state[s] + dt * nets[s]
        if not math.isfinite(value):
            raise NonFiniteResult(s, t + dt)
        nxt[s] = value
    return nxt, aux


# -- compiled simulation ------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """One run of a batch: a seed policy and constant/stock overrides."""

    policy: RngPolicy = RngPolicy()
    overrides: Mapping[str, float] = field(default_factory=dict)


def _threads() -> int:
    raw = os.environ.get("SDSIM_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"SDSIM_THREADS must be an integer, got {raw!r}") from None


def _with_control(model: CompiledModel, control: Optional[SimControl]) -> SimControl:
    ctl = control or model.control
    ctl.validate()
    return ctl


def simulate(model: CompiledModel, policy: RngPolicy = RngPolicy(),
             overrides: Mapping[str, float] | None = None, *,
             control: Optional[SimControl] = None, save: Optional[Sequence[str]] = None,
             backend: Optional[str] = None) -> RunResult:
    """Integrate from INITIAL TIME to FINAL TIME inclusive, saving every SAVEPER."""
    return simulate_batch(model, [RunConfig(policy, dict(overrides or {}))], control=control,
                          save=save, backend=backend)[0]


def simulate_batch(model: CompiledModel, runs: Iterable[RunConfig], *,
                   control: Optional[SimControl] = None, save: Optional[Sequence[str]] = None,
                   backend: Optional[str] = None) -> list[RunResult]:
    """Run several configurations through one kernel call per noise mode.

    Results come back in input order whatever the thread count.
    """
    runs = list(runs)
    if not runs:
        return []
    ctl = _with_control(model, control)
    save_names = list(model.names) if save is None else list(save)
    for n in save_names:
        if n not in model.slot:
            raise KeyError(f"cannot save unknown variable {n!r}")
    save_slots = np.array([model.slot[n] for n in save_names], dtype=np.int64)

    tables = [initial_state(model, r.overrides) for r in runs]
    values0 = np.zeros((len(runs), len(model.names)))
    for i, table in enumerate(tables):
        for name, value in table.items():
            values0[i, model.slot[name]] = value
    seeds = np.array([resolve_seed(r.policy, t) for r, t in zip(runs, tables)], dtype=np.uint64)

    n_saved = ctl.n_steps // ctl.save_every + 1
    out = np.empty((len(runs), n_saved, len(save_slots)))
    err = np.zeros((len(runs), 3), dtype=np.int64)
    kern = kernels.get_backend(backend)

    groups: dict[tuple[bool, int], list[int]] = {}
    for i, r in enumerate(runs):
        groups.setdefault((r.policy.noise_on, r.policy.max_attempts), []).append(i)

    jobs = []
    threads = _threads()
    for (noise_on, attempts), idx in groups.items():
        chunks = np.array_split(np.array(idx), min(threads, len(idx)))
        jobs.extend((noise_on, attempts, c) for c in chunks if len(c))

    def work(job):
        noise_on, attempts, idx = job
        sub_out = np.empty((len(idx), n_saved, len(save_slots)))
        sub_err = np.zeros((len(idx), 3), dtype=np.int64)
        kern.run_batch(model.ops, model.iargs, model.fargs, model.prog_start, model.targets,
                       model.n_aux, model.site_keys, model.max_stack,
                       np.ascontiguousarray(values0[idx]), seeds[idx], noise_on, attempts,
                       float(ctl.initial_time), float(ctl.dt), int(ctl.n_steps), int(ctl.save_every),
                       save_slots, sub_out, sub_err)
        return idx, sub_out, sub_err

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            done = list(pool.map(work, jobs))
    else:
        done = [work(j) for j in jobs]
    for idx, sub_out, sub_err in done:
        out[idx] = sub_out
        err[idx] = sub_err

    failed = np.flatnonzero(err[:, 0])
    if failed.size:
        i = int(failed[0])
        code, prog, k = (int(x) for x in err[i])
        name = model.program_name(prog)
        t = ctl.initial_time + k * ctl.dt
        if code == K.ERR_DIV_ZERO:
            raise DivisionByZero(name, t)
        if code == K.ERR_BOUNDS:
            raise InvalidBounds(None, None, name, t)
        raise NonFiniteResult(name, t)

    times = ctl.initial_time + np.arange(n_saved) * ctl.save_every * ctl.dt
    results = []
    for i, r in enumerate(runs):
        series = {n: out[i, :, j] for j, n in enumerate(save_names)}
        meta = {
            "seed": int(seeds[i]),
            "noise": r.policy.mode,
            "overrides": dict(r.overrides),
            "control": ctl.as_dict(),
            "backend": kern.__name__.rsplit("._", 1)[-1],
        }
        results.append(RunResult(times=times, series=series, metadata=meta))
    _warn_ranges(model, ctl, results)
    return results


def _warn_ranges(model: CompiledModel, ctl: SimControl, results: list[RunResult]) -> None:
    ctl_values = {"INITIAL TIME": ctl.initial_time, "FINAL TIME": ctl.final_time,
                  "TIME STEP": ctl.dt, "SAVEPER": ctl.saveper}
    for var in model.spec.variables:
        if var.range is None:
            continue
        lo, hi = var.range
        if var.name in ctl_values:
            lows = highs = ctl_values[var.name]
        else:
            present = [r[var.name] for r in results if var.name in r]
            if not present:
                continue
            lows = min(float(np.min(s)) for s in present)
            highs = max(float(np.max(s)) for s in present)
        if (lo is not None and lows < lo) or (hi is not None and highs > hi):
            msg = f"{var.name} left its declared range [{lo}, {hi}]: observed [{lows}, {highs}]"
            log.warning(msg)
            warnings.warn(msg, RangeWarning, stacklevel=3)
