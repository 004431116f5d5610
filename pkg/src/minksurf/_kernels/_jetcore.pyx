# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tape evaluation for second-order jets.

Semantics match minksurf._kernels.pyjet instruction for instruction; the
test suite cross-checks the two backends.
"""

from libc.math cimport cos, cosh, exp, log, sin, sinh, sqrt, pow
from libc.stdlib cimport free, malloc

import numpy as np

cimport numpy as cnp

from ..errors import DomainError

cnp.import_array()

BACKEND_NAME = "compiled"

cdef enum:
    OP_CONST = 0
    OP_U = 1
    OP_V = 2
    OP_ADD = 3
    OP_SUB = 4
    OP_MUL = 5
    OP_DIV = 6
    OP_NEG = 7
    OP_SIN = 8
    OP_COS = 9
    OP_SINH = 10
    OP_COSH = 11
    OP_EXP = 12
    OP_LOG = 13
    OP_SQRT = 14
    OP_POWI = 15
    OP_POWC = 16

cdef enum:
    ERR_NONE = 0
    ERR_DIV_ZERO = 1
    ERR_LOG = 2
    ERR_SQRT = 3
    ERR_ZERO_NEG_POW = 4
    ERR_POW_BASE = 5
    ERR_BAD_OP = 6

_ERR_MESSAGES = {
    1: "division by zero",
    2: "log of non-positive argument",
    3: "sqrt of non-positive argument",
    4: "zero base with negative integer exponent",
    5: "power with non-integer exponent requires a positive base",
    6: "bad opcode",
}


cdef inline void _jmul(const double* f, const double* g, double* r) nogil:
    r[0] = f[0] * g[0]
    r[1] = f[1] * g[0] + f[0] * g[1]
    r[2] = f[2] * g[0] + f[0] * g[2]
    r[3] = f[3] * g[0] + 2.0 * f[1] * g[1] + f[0] * g[3]
    r[4] = f[4] * g[0] + f[1] * g[2] + f[2] * g[1] + f[0] * g[4]
    r[5] = f[5] * g[0] + 2.0 * f[2] * g[2] + f[0] * g[5]


cdef inline void _jchain(const double* f, double h0, double h1, double h2,
                         double* r) nogil:
    # descending slot order keeps the update alias-safe when r == f
    r[5] = h2 * f[2] * f[2] + h1 * f[5]
    r[4] = h2 * f[1] * f[2] + h1 * f[4]
    r[3] = h2 * f[1] * f[1] + h1 * f[3]
    r[2] = h1 * f[2]
    r[1] = h1 * f[1]
    r[0] = h0


cdef inline void _jdiv(const double* f, const double* g, double* r) nogil:
    cdef double q0 = f[0] / g[0]
    cdef double qu = (f[1] - q0 * g[1]) / g[0]
    cdef double qv = (f[2] - q0 * g[2]) / g[0]
    r[5] = (f[5] - q0 * g[5] - 2.0 * qv * g[2]) / g[0]
    r[4] = (f[4] - q0 * g[4] - qu * g[2] - qv * g[1]) / g[0]
    r[3] = (f[3] - q0 * g[3] - 2.0 * qu * g[1]) / g[0]
    r[2] = qv
    r[1] = qu
    r[0] = q0


cdef int _eval_point(const cnp.int64_t* code, int n_instr, const double* consts,
                     double u, double v, double* regs) nogil:
    cdef int i, op, a1, a2, k, n_exp
    cdef double* r
    cdef const double* f
    cdef const double* g
    cdef double x, p, e, s
    cdef double base[6]
    cdef double acc[6]
    cdef double tmp[6]
    for i in range(n_instr):
        op = <int>code[3 * i]
        a1 = <int>code[3 * i + 1]
        a2 = <int>code[3 * i + 2]
        r = regs + 6 * i
        if op == OP_CONST:
            r[0] = consts[a1]
            r[1] = r[2] = r[3] = r[4] = r[5] = 0.0
        elif op == OP_U:
            r[0] = u
            r[1] = 1.0
            r[2] = r[3] = r[4] = r[5] = 0.0
        elif op == OP_V:
            r[0] = v
            r[2] = 1.0
            r[1] = r[3] = r[4] = r[5] = 0.0
        elif op == OP_ADD:
            f = regs + 6 * a1
            g = regs + 6 * a2
            for k in range(6):
                r[k] = f[k] + g[k]
        elif op == OP_SUB:
            f = regs + 6 * a1
            g = regs + 6 * a2
            for k in range(6):
                r[k] = f[k] - g[k]
        elif op == OP_MUL:
            _jmul(regs + 6 * a1, regs + 6 * a2, r)
        elif op == OP_DIV:
            g = regs + 6 * a2
            if g[0] == 0.0:
                return ERR_DIV_ZERO
            _jdiv(regs + 6 * a1, g, r)
        elif op == OP_NEG:
            f = regs + 6 * a1
            for k in range(6):
                r[k] = -f[k]
        elif op == OP_SIN:
            f = regs + 6 * a1
            x = f[0]
            _jchain(f, sin(x), cos(x), -sin(x), r)
        elif op == OP_COS:
            f = regs + 6 * a1
            x = f[0]
            _jchain(f, cos(x), -sin(x), -cos(x), r)
        elif op == OP_SINH:
            f = regs + 6 * a1
            x = f[0]
            _jchain(f, sinh(x), cosh(x), sinh(x), r)
        elif op == OP_COSH:
            f = regs + 6 * a1
            x = f[0]
            _jchain(f, cosh(x), sinh(x), cosh(x), r)
        elif op == OP_EXP:
            f = regs + 6 * a1
            e = exp(f[0])
            _jchain(f, e, e, e, r)
        elif op == OP_LOG:
            f = regs + 6 * a1
            x = f[0]
            if x <= 0.0:
                return ERR_LOG
            _jchain(f, log(x), 1.0 / x, -1.0 / (x * x), r)
        elif op == OP_SQRT:
            f = regs + 6 * a1
            x = f[0]
            if x <= 0.0:
                return ERR_SQRT
            s = sqrt(x)
            _jchain(f, s, 0.5 / s, -0.25 / (x * s), r)
        elif op == OP_POWI:
            f = regs + 6 * a1
            n_exp = a2
            if n_exp == 0:
                r[0] = 1.0
                r[1] = r[2] = r[3] = r[4] = r[5] = 0.0
            else:
                for k in range(6):
                    base[k] = f[k]
                if n_exp < 0:
                    x = base[0]
                    if x == 0.0:
                        return ERR_ZERO_NEG_POW
                    _jchain(base, 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x), base)
                    n_exp = -n_exp
                for k in range(6):
                    acc[k] = base[k]
                for k in range(n_exp - 1):
                    _jmul(acc, base, tmp)
                    acc[0] = tmp[0]
                    acc[1] = tmp[1]
                    acc[2] = tmp[2]
                    acc[3] = tmp[3]
                    acc[4] = tmp[4]
                    acc[5] = tmp[5]
                for k in range(6):
                    r[k] = acc[k]
        elif op == OP_POWC:
            f = regs + 6 * a1
            x = f[0]
            p = consts[a2]
            if x <= 0.0:
                return ERR_POW_BASE
            _jchain(f, pow(x, p), p * pow(x, p - 1.0),
                    p * (p - 1.0) * pow(x, p - 2.0), r)
        else:
            return ERR_BAD_OP
    return ERR_NONE


def eval_tape(cnp.int64_t[:, ::1] code, double[::1] consts, double u, double v):
    """Evaluate one point; returns the six jet slots of the final register."""
    cdef int n_instr = code.shape[0]
    cdef double* regs = <double*>malloc(6 * n_instr * sizeof(double))
    if regs == NULL:
        raise MemoryError()
    cdef int err
    cdef double o0, o1, o2, o3, o4, o5
    try:
        err = _eval_point(&code[0, 0], n_instr, &consts[0], u, v, regs)
        if err != ERR_NONE:
            raise DomainError(_ERR_MESSAGES[err], (u, v))
        o0 = regs[6 * (n_instr - 1) + 0]
        o1 = regs[6 * (n_instr - 1) + 1]
        o2 = regs[6 * (n_instr - 1) + 2]
        o3 = regs[6 * (n_instr - 1) + 3]
        o4 = regs[6 * (n_instr - 1) + 4]
        o5 = regs[6 * (n_instr - 1) + 5]
    finally:
        free(regs)
    return (o0, o1, o2, o3, o4, o5)


def eval_tape_batch(cnp.int64_t[:, ::1] code, double[::1] consts,
                    us_in, vs_in):
    """Evaluate many points; returns an (n, 6) array of jet slots."""
    us_arr = np.ascontiguousarray(us_in, dtype=np.float64)
    vs_arr = np.ascontiguousarray(vs_in, dtype=np.float64)
    if us_arr.shape != vs_arr.shape or us_arr.ndim != 1:
        raise ValueError("us and vs must be 1-d arrays of equal length")
    cdef double[::1] us = us_arr
    cdef double[::1] vs = vs_arr
    cdef Py_ssize_t n = us.shape[0]
    out_arr = np.empty((n, 6), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef int n_instr = code.shape[0]
    cdef double* regs = <double*>malloc(6 * n_instr * sizeof(double))
    if regs == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    cdef int err = ERR_NONE
    cdef Py_ssize_t err_i = 0
    cdef int k
    try:
        with nogil:
            for i in range(n):
                err = _eval_point(&code[0, 0], n_instr, &consts[0],
                                  us[i], vs[i], regs)
                if err != ERR_NONE:
                    err_i = i
                    break
                for k in range(6):
                    out[i, k] = regs[6 * (n_instr - 1) + k]
        if err != ERR_NONE:
            raise DomainError(_ERR_MESSAGES[err], (us[err_i], vs[err_i]))
    finally:
        free(regs)
    return out_arr
