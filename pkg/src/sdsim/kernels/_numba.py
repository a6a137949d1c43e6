"""Scalar kernels compiled with numba.

``run_batch`` integrates every run of a batch with explicit Euler, executing
the compiled stack-machine programs one scalar at a time.
"""

import math

import numpy as np
from numba import njit

from ._common import (
    ACK_A, ACK_B, ACK_C, ACK_D, ERR_BOUNDS, ERR_DIV_ZERO, ERR_NONE, ERR_NONFINITE,
    GOLDEN, MIX1, MIX2, OP_ADD, OP_CONST, OP_DIV, OP_LOAD, OP_MAX, OP_MIN, OP_MUL,
    OP_RANDN, OP_SUB, OP_TIME, P_HIGH, P_LOW, SEED_SALT, SH11, SH27, SH30, SH31, TWO_M53,
)

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def mix64(z):
    z = (z ^ (z >> SH30)) * MIX1
    z = (z ^ (z >> SH27)) * MIX2
    return z ^ (z >> SH31)


@njit(**_JIT)
def seed_bits(x):
    return np.uint64(np.int64(math.floor(x + 0.5)))


@njit(**_JIT)
def stream_key(seed, seed_arg, var_key, step):
    h = mix64(seed ^ SEED_SALT)
    h = mix64(h ^ seed_arg)
    h = mix64(h ^ var_key)
    return mix64(h ^ np.uint64(step))


@njit(**_JIT)
def uniform(key, attempt):
    bits = mix64(key + np.uint64(attempt + 1) * GOLDEN)
    return (float(bits >> SH11) + 0.5) * TWO_M53


@njit(**_JIT)
def norm_ppf(p):
    if p < P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return ((((((ACK_C[0] * q + ACK_C[1]) * q + ACK_C[2]) * q + ACK_C[3]) * q + ACK_C[4]) * q + ACK_C[5])
                / ((((ACK_D[0] * q + ACK_D[1]) * q + ACK_D[2]) * q + ACK_D[3]) * q + 1.0))
    if p <= P_HIGH:
        q = p - 0.5
        r = q * q
        return ((((((ACK_A[0] * r + ACK_A[1]) * r + ACK_A[2]) * r + ACK_A[3]) * r + ACK_A[4]) * r + ACK_A[5]) * q
                / (((((ACK_B[0] * r + ACK_B[1]) * r + ACK_B[2]) * r + ACK_B[3]) * r + ACK_B[4]) * r + 1.0))
    q = math.sqrt(-2.0 * math.log(1.0 - p))
    return -((((((ACK_C[0] * q + ACK_C[1]) * q + ACK_C[2]) * q + ACK_C[3]) * q + ACK_C[4]) * q + ACK_C[5])
             / ((((ACK_D[0] * q + ACK_D[1]) * q + ACK_D[2]) * q + ACK_D[3]) * q + 1.0))


@njit(**_JIT)
def clamp(x, lo, hi):
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


@njit(**_JIT)
def draw(lo, hi, mean, sd, key, noise_on, max_attempts):
    if not noise_on or sd == 0.0:
        return clamp(mean, lo, hi)
    x = mean
    for a in range(max_attempts):
        x = mean + sd * norm_ppf(uniform(key, a))
        if lo <= x and x <= hi:
            return x
    return clamp(x, lo, hi)


@njit(**_JIT)
def eval_program(ops, iargs, fargs, start, end, vals, t, stack, site_keys,
                 seed, step, noise_on, max_attempts):
    sp = 0
    for i in range(start, end):
        op = ops[i]
        if op == OP_CONST:
            stack[sp] = fargs[i]
            sp += 1
        elif op == OP_LOAD:
            stack[sp] = vals[iargs[i]]
            sp += 1
        elif op == OP_TIME:
            stack[sp] = t
            sp += 1
        elif op == OP_ADD:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] + stack[sp]
        elif op == OP_SUB:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] - stack[sp]
        elif op == OP_MUL:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] * stack[sp]
        elif op == OP_DIV:
            sp -= 1
            if stack[sp] == 0.0:
                return 0.0, ERR_DIV_ZERO
            stack[sp - 1] = stack[sp - 1] / stack[sp]
        elif op == OP_MAX:
            sp -= 1
            if not stack[sp - 1] >= stack[sp]:
                stack[sp - 1] = stack[sp]
        elif op == OP_MIN:
            sp -= 1
            if not stack[sp - 1] <= stack[sp]:
                stack[sp - 1] = stack[sp]
        elif op == OP_RANDN:
            sp -= 5
            lo = stack[sp]
            hi = stack[sp + 1]
            mean = stack[sp + 2]
            sd = stack[sp + 3]
            sarg = stack[sp + 4]
            if not (lo < hi):
                return 0.0, ERR_BOUNDS
            if not (math.isfinite(mean) and math.isfinite(sd) and math.isfinite(sarg)):
                return 0.0, ERR_NONFINITE
            key = np.uint64(0)
            if noise_on:
                key = stream_key(seed, seed_bits(sarg), site_keys[iargs[i]], step)
            stack[sp] = draw(lo, hi, mean, sd, key, noise_on, max_attempts)
            sp += 1
    v = stack[0]
    if not math.isfinite(v):
        return v, ERR_NONFINITE
    return v, ERR_NONE


@njit(**_JIT)
def run_batch(ops, iargs, fargs, prog_start, targets, n_aux, site_keys, max_stack,
              values0, seeds, noise_on, max_attempts, t0, dt, n_steps, save_every,
              save_slots, out, err):
    n_runs = values0.shape[0]
    n_progs = prog_start.shape[0] - 1
    n_stock = n_progs - n_aux
    stack = np.empty(max_stack + 1)
    net = np.empty(n_stock)
    for r in range(n_runs):
        vals = values0[r].copy()
        seed = seeds[r]
        row = 0
        failed = False
        for k in range(n_steps + 1):
            t = t0 + k * dt
            for p in range(n_aux):
                v, code = eval_program(ops, iargs, fargs, prog_start[p], prog_start[p + 1], vals, t,
                                       stack, site_keys, seed, k, noise_on, max_attempts)
                if code != ERR_NONE:
                    err[r, 0] = code
                    err[r, 1] = p
                    err[r, 2] = k
                    failed = True
                    break
                vals[targets[p]] = v
            if failed:
                break
            if k % save_every == 0:
                for j in range(save_slots.shape[0]):
                    out[r, row, j] = vals[save_slots[j]]
                row += 1
            if k == n_steps:
                break
            for j in range(n_stock):
                p = n_aux + j
                v, code = eval_program(ops, iargs, fargs, prog_start[p], prog_start[p + 1], vals, t,
                                       stack, site_keys, seed, k, noise_on, max_attempts)
                if code != ERR_NONE:
                    err[r, 0] = code
                    err[r, 1] = p
                    err[r, 2] = k
                    failed = True
                    break
                net[j] = v
            if failed:
                break
            for j in range(n_stock):
                slot = targets[n_aux + j]
                x = vals[slot] + dt * net[j]
                if not math.isfinite(x):
                    err[r, 0] = ERR_NONFINITE
                    err[r, 1] = n_aux + j
                    err[r, 2] = k + 1
                    failed = True
                    break
                vals[slot] = x
            if failed:
                break
