"""Pure-numpy kernels, vectorized across the runs of a batch.

Same arithmetic, in the same order, as the numba kernels. Tail logarithms
go through ``math.log`` so both backends share one libm and agree bitwise.
"""

import math

import numpy as np

from ._common import (
    ACK_A, ACK_B, ACK_C, ACK_D, ERR_BOUNDS, ERR_DIV_ZERO, ERR_NONE, ERR_NONFINITE,
    GOLDEN, MIX1, MIX2, OP_ADD, OP_CONST, OP_DIV, OP_LOAD, OP_MAX, OP_MIN, OP_MUL,
    OP_RANDN, OP_SUB, OP_TIME, P_HIGH, P_LOW, SEED_SALT, SH11, SH27, SH30, SH31, TWO_M53,
)

_MASK = (1 << 64) - 1


def mix64(z):
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> SH30)) * MIX1
    z = (z ^ (z >> SH27)) * MIX2
    return z ^ (z >> SH31)


def seed_bits(x):
    return np.floor(np.asarray(x, dtype=np.float64) + 0.5).astype(np.int64).view(np.uint64)


def stream_key(seed, seed_arg, var_key, step):
    h = mix64(np.asarray(seed, dtype=np.uint64) ^ SEED_SALT)
    h = mix64(h ^ np.asarray(seed_arg, dtype=np.uint64))
    h = mix64(h ^ np.asarray(var_key, dtype=np.uint64))
    return mix64(h ^ np.asarray(step, dtype=np.uint64))


def uniform(key, attempt):
    offset = np.uint64(((attempt + 1) * int(GOLDEN)) & _MASK)
    bits = mix64(np.asarray(key, dtype=np.uint64) + offset)
    return ((bits >> SH11).astype(np.float64) + 0.5) * TWO_M53


def _tail(q):
    return ((((((ACK_C[0] * q + ACK_C[1]) * q + ACK_C[2]) * q + ACK_C[3]) * q + ACK_C[4]) * q + ACK_C[5])
            / ((((ACK_D[0] * q + ACK_D[1]) * q + ACK_D[2]) * q + ACK_D[3]) * q + 1.0))


def norm_ppf(p):
    p = np.asarray(p, dtype=np.float64)
    out = np.empty_like(p)
    low = p < P_LOW
    high = p > P_HIGH
    mid = ~(low | high)
    q = p[mid] - 0.5
    r = q * q
    out[mid] = ((((((ACK_A[0] * r + ACK_A[1]) * r + ACK_A[2]) * r + ACK_A[3]) * r + ACK_A[4]) * r + ACK_A[5]) * q
                / (((((ACK_B[0] * r + ACK_B[1]) * r + ACK_B[2]) * r + ACK_B[3]) * r + ACK_B[4]) * r + 1.0))
    if low.any():
        ql = np.sqrt(np.array([-2.0 * math.log(v) for v in p[low]]))
        out[low] = _tail(ql)
    if high.any():
        qh = np.sqrt(np.array([-2.0 * math.log(1.0 - v) for v in p[high]]))
        out[high] = -_tail(qh)
    return out


def clamp(x, lo, hi):
    return np.where(x < lo, lo, np.where(x > hi, hi, x))


def draw(lo, hi, mean, sd, key, noise_on, max_attempts):
    lo, hi, mean, sd = (np.asarray(a, dtype=np.float64) for a in (lo, hi, mean, sd))
    out = clamp(mean, lo, hi)
    if not noise_on:
        return out
    key = np.asarray(key, dtype=np.uint64)
    pending = sd != 0.0
    last = mean.copy()
    for a in range(max_attempts):
        idx = np.flatnonzero(pending)
        if idx.size == 0:
            break
        x = mean[idx] + sd[idx] * norm_ppf(uniform(key[idx], a))
        ok = (lo[idx] <= x) & (x <= hi[idx])
        out[idx[ok]] = x[ok]
        last[idx] = x
        pending[idx[ok]] = False
    rest = np.flatnonzero(pending)
    out[rest] = clamp(last[rest], lo[rest], hi[rest])
    return out


class _Fail(Exception):
    def __init__(self, code, rows):
        self.code = code
        self.rows = rows


def eval_program(ops, iargs, fargs, start, end, vals, t, site_keys, seeds, step,
                 noise_on, max_attempts):
    """Evaluate one program for every run; ``vals`` is (n_runs, n_slots)."""
    n = vals.shape[0]
    stack = []
    for i in range(start, end):
        op = ops[i]
        if op == OP_CONST:
            stack.append(np.full(n, fargs[i]))
        elif op == OP_LOAD:
            stack.append(vals[:, iargs[i]])
        elif op == OP_TIME:
            stack.append(np.full(n, t))
        elif op == OP_RANDN:
            lo, hi, mean, sd, sarg = stack[-5:]
            del stack[-5:]
            bad = ~(lo < hi)
            if bad.any():
                raise _Fail(ERR_BOUNDS, np.flatnonzero(bad))
            bad = ~(np.isfinite(mean) & np.isfinite(sd) & np.isfinite(sarg))
            if bad.any():
                raise _Fail(ERR_NONFINITE, np.flatnonzero(bad))
            key = np.zeros(n, dtype=np.uint64)
            if noise_on:
                key = stream_key(seeds, seed_bits(sarg), np.full(n, site_keys[iargs[i]], dtype=np.uint64),
                                 np.full(n, step, dtype=np.uint64))
            stack.append(draw(lo, hi, mean, sd, key, noise_on, max_attempts))
        else:
            b = stack.pop()
            a = stack.pop()
            if op == OP_ADD:
                stack.append(a + b)
            elif op == OP_SUB:
                stack.append(a - b)
            elif op == OP_MUL:
                stack.append(a * b)
            elif op == OP_DIV:
                zero = b == 0.0
                if zero.any():
                    raise _Fail(ERR_DIV_ZERO, np.flatnonzero(zero))
                stack.append(a / b)
            elif op == OP_MAX:
                stack.append(np.where(a >= b, a, b))
            elif op == OP_MIN:
                stack.append(np.where(a <= b, a, b))
            else:
                raise ValueError(f"bad opcode {op}")
    v = stack[0]
    bad = ~np.isfinite(v)
    if bad.any():
        raise _Fail(ERR_NONFINITE, np.flatnonzero(bad))
    return v


def run_batch(*args):
    # non-finite values are detected explicitly; silence numpy's own warnings
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return _run_batch(*args)


def _run_batch(ops, iargs, fargs, prog_start, targets, n_aux, site_keys, max_stack,
               values0, seeds, noise_on, max_attempts, t0, dt, n_steps, save_every,
               save_slots, out, err):
    vals = values0.copy()
    n_progs = prog_start.shape[0] - 1
    row = 0
    p = 0
    k = 0
    try:
        for k in range(n_steps + 1):
            t = t0 + k * dt
            for p in range(n_aux):
                vals[:, targets[p]] = eval_program(ops, iargs, fargs, prog_start[p], prog_start[p + 1],
                                                   vals, t, site_keys, seeds, k, noise_on, max_attempts)
            if k % save_every == 0:
                out[:, row, :] = vals[:, save_slots]
                row += 1
            if k == n_steps:
                break
            nets = []
            for p in range(n_aux, n_progs):
                nets.append(eval_program(ops, iargs, fargs, prog_start[p], prog_start[p + 1],
                                         vals, t, site_keys, seeds, k, noise_on, max_attempts))
            for j, p in enumerate(range(n_aux, n_progs)):
                x = vals[:, targets[p]] + dt * nets[j]
                bad = ~np.isfinite(x)
                if bad.any():
                    k += 1
                    raise _Fail(ERR_NONFINITE, np.flatnonzero(bad))
                vals[:, targets[p]] = x
    except _Fail as fail:
        err[fail.rows, 0] = fail.code
        err[fail.rows, 1] = p
        err[fail.rows, 2] = k
    return ERR_NONE
