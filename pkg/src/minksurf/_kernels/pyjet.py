"""Pure-Python tape evaluation for second-order jets.

Mirrors the compiled kernel: a tape instruction writes one register holding
the six jet slots (val, du, dv, duu, duv, dvv).  ``eval_tape`` walks the
program with scalar floats; ``eval_tape_batch`` carries numpy arrays through
the same rules, one slot per array.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError
from ..exprs import (OP_ADD, OP_CONST, OP_COS, OP_COSH, OP_DIV, OP_EXP,
                     OP_LOG, OP_MUL, OP_NEG, OP_POWC, OP_POWI, OP_SIN,
                     OP_SINH, OP_SQRT, OP_SUB, OP_U, OP_V)

BACKEND_NAME = "python"

_BATCH_CHUNK = 8192


def _mul(f, g):
    v1, u1, w1, a1, m1, b1 = f
    v2, u2, w2, a2, m2, b2 = g
    return (v1 * v2,
            u1 * v2 + v1 * u2,
            w1 * v2 + v1 * w2,
            a1 * v2 + 2.0 * u1 * u2 + v1 * a2,
            m1 * v2 + u1 * w2 + w1 * u2 + v1 * m2,
            b1 * v2 + 2.0 * w1 * w2 + v1 * b2)


def _div(f, g):
    v1, u1, w1, a1, m1, b1 = f
    v2, u2, w2, a2, m2, b2 = g
    q0 = v1 / v2
    qu = (u1 - q0 * u2) / v2
    qv = (w1 - q0 * w2) / v2
    return (q0, qu, qv,
            (a1 - q0 * a2 - 2.0 * qu * u2) / v2,
            (m1 - q0 * m2 - qu * w2 - qv * u2) / v2,
            (b1 - q0 * b2 - 2.0 * qv * w2) / v2)


def _chain(f, h0, h1, h2):
    v, u, w, a, m, b = f
    return (h0,
            h1 * u,
            h1 * w,
            h2 * u * u + h1 * a,
            h2 * u * w + h1 * m,
            h2 * w * w + h1 * b)


def eval_tape(code, consts, u, v):
    """Evaluate one point; returns the six jet slots of the final register."""
    at = (u, v)
    regs = []
    for op, a1, a2 in code:
        if op == OP_CONST:
            r = (consts[a1], 0.0, 0.0, 0.0, 0.0, 0.0)
        elif op == OP_U:
            r = (u, 1.0, 0.0, 0.0, 0.0, 0.0)
        elif op == OP_V:
            r = (v, 0.0, 1.0, 0.0, 0.0, 0.0)
        elif op == OP_ADD:
            f, g = regs[a1], regs[a2]
            r = tuple(x + y for x, y in zip(f, g))
        elif op == OP_SUB:
            f, g = regs[a1], regs[a2]
            r = tuple(x - y for x, y in zip(f, g))
        elif op == OP_MUL:
            r = _mul(regs[a1], regs[a2])
        elif op == OP_DIV:
            if regs[a2][0] == 0.0:
                raise DomainError("division by zero", at)
            r = _div(regs[a1], regs[a2])
        elif op == OP_NEG:
            r = tuple(-x for x in regs[a1])
        elif op == OP_SIN:
            x = regs[a1][0]
            r = _chain(regs[a1], math.sin(x), math.cos(x), -math.sin(x))
        elif op == OP_COS:
            x = regs[a1][0]
            r = _chain(regs[a1], math.cos(x), -math.sin(x), -math.cos(x))
        elif op == OP_SINH:
            x = regs[a1][0]
            r = _chain(regs[a1], math.sinh(x), math.cosh(x), math.sinh(x))
        elif op == OP_COSH:
            x = regs[a1][0]
            r = _chain(regs[a1], math.cosh(x), math.sinh(x), math.cosh(x))
        elif op == OP_EXP:
            e = math.exp(regs[a1][0])
            r = _chain(regs[a1], e, e, e)
        elif op == OP_LOG:
            x = regs[a1][0]
            if x <= 0.0:
                raise DomainError("log of non-positive argument", at)
            r = _chain(regs[a1], math.log(x), 1.0 / x, -1.0 / (x * x))
        elif op == OP_SQRT:
            x = regs[a1][0]
            if x <= 0.0:
                raise DomainError("sqrt of non-positive argument", at)
            s = math.sqrt(x)
            r = _chain(regs[a1], s, 0.5 / s, -0.25 / (x * s))
        elif op == OP_POWI:
            r = _powi(regs[a1], a2, at)
        elif op == OP_POWC:
            x = regs[a1][0]
            p = consts[a2]
            if x <= 0.0:
                raise DomainError("power with non-integer exponent requires a positive base", at)
            r = _chain(regs[a1], x ** p, p * x ** (p - 1.0),
                       p * (p - 1.0) * x ** (p - 2.0))
        else:
            raise ValueError(f"bad opcode {op}")
        regs.append(r)
    return regs[-1]


def _powi(f, n, at):
    if n == 0:
        return (1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    if n < 0:
        if f[0] == 0.0:
            raise DomainError("zero base with negative integer exponent", at)
        x = f[0]
        f = _chain(f, 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
        n = -n
    r = f
    for _ in range(n - 1):
        r = _mul(r, f)
    return r


def _first_bad(mask, us, vs):
    i = int(np.argmax(mask))
    return (float(us[i]), float(vs[i]))


def _batch_chunk(code, consts, us, vs):
    n = us.shape[0]
    zeros = np.zeros(n)
    ones = np.ones(n)
    regs = []
    for op, a1, a2 in code:
        if op == OP_CONST:
            r = (np.full(n, consts[a1]), zeros, zeros, zeros, zeros, zeros)
        elif op == OP_U:
            r = (us, ones, zeros, zeros, zeros, zeros)
        elif op == OP_V:
            r = (vs, zeros, ones, zeros, zeros, zeros)
        elif op == OP_ADD:
            f, g = regs[a1], regs[a2]
            r = tuple(x + y for x, y in zip(f, g))
        elif op == OP_SUB:
            f, g = regs[a1], regs[a2]
            r = tuple(x - y for x, y in zip(f, g))
        elif op == OP_MUL:
            r = _mul(regs[a1], regs[a2])
        elif op == OP_NEG:
            r = tuple(-x for x in regs[a1])
        elif op == OP_DIV:
            bad = regs[a2][0] == 0.0
            if bad.any():
                raise DomainError("division by zero", _first_bad(bad, us, vs))
            r = _div(regs[a1], regs[a2])
        elif op == OP_SIN:
            x = regs[a1][0]
            r = _chain(regs[a1], np.sin(x), np.cos(x), -np.sin(x))
        elif op == OP_COS:
            x = regs[a1][0]
            r = _chain(regs[a1], np.cos(x), -np.sin(x), -np.cos(x))
        elif op == OP_SINH:
            x = regs[a1][0]
            r = _chain(regs[a1], np.sinh(x), np.cosh(x), np.sinh(x))
        elif op == OP_COSH:
            x = regs[a1][0]
            r = _chain(regs[a1], np.cosh(x), np.sinh(x), np.cosh(x))
        elif op == OP_EXP:
            e = np.exp(regs[a1][0])
            r = _chain(regs[a1], e, e, e)
        elif op == OP_LOG:
            x = regs[a1][0]
            bad = x <= 0.0
            if bad.any():
                raise DomainError("log of non-positive argument", _first_bad(bad, us, vs))
            r = _chain(regs[a1], np.log(x), 1.0 / x, -1.0 / (x * x))
        elif op == OP_SQRT:
            x = regs[a1][0]
            bad = x <= 0.0
            if bad.any():
                raise DomainError("sqrt of non-positive argument", _first_bad(bad, us, vs))
            s = np.sqrt(x)
            r = _chain(regs[a1], s, 0.5 / s, -0.25 / (x * s))
        elif op == OP_POWI:
            n_exp = a2
            if n_exp == 0:
                r = (ones, zeros, zeros, zeros, zeros, zeros)
            else:
                f = regs[a1]
                if n_exp < 0:
                    x = f[0]
                    bad = x == 0.0
                    if bad.any():
                        raise DomainError("zero base with negative integer exponent",
                                          _first_bad(bad, us, vs))
                    f = _chain(f, 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
                    n_exp = -n_exp
                r = f
                for _ in range(n_exp - 1):
                    r = _mul(r, f)
        elif op == OP_POWC:
            x = regs[a1][0]
            p = consts[a2]
            bad = x <= 0.0
            if bad.any():
                raise DomainError("power with non-integer exponent requires a positive base",
                                  _first_bad(bad, us, vs))
            r = _chain(regs[a1], x ** p, p * x ** (p - 1.0),
                       p * (p - 1.0) * x ** (p - 2.0))
        else:
            raise ValueError(f"bad opcode {op}")
        regs.append(r)
    return np.stack(regs[-1], axis=1)


def eval_tape_batch(code, consts, us, vs):
    """Evaluate many points; returns an (n, 6) array of jet slots."""
    us = np.ascontiguousarray(us, dtype=np.float64)
    vs = np.ascontiguousarray(vs, dtype=np.float64)
    if us.shape != vs.shape or us.ndim != 1:
        raise ValueError("us and vs must be 1-d arrays of equal length")
    n = us.shape[0]
    if n <= _BATCH_CHUNK:
        return _batch_chunk(code, consts, us, vs)
    parts = []
    for start in range(0, n, _BATCH_CHUNK):
        stop = min(start + _BATCH_CHUNK, n)
        parts.append(_batch_chunk(code, consts, us[start:stop], vs[start:stop]))
    return np.concatenate(parts, axis=0)
