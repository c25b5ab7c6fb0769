# cython: boundscheck=False, wraparound=False, cdivision=True
"""Per-point tape interpreter: the compiled hot kernel for grid evaluation."""

from libc.math cimport exp, fabs, pow, isfinite
from libc.stdlib cimport malloc, free

import numpy as np

DEF OP_CONST = 0
DEF OP_VAR = 1
DEF OP_ADD = 2
DEF OP_MUL = 3
DEF OP_IPOW = 4
DEF OP_APOW = 5
DEF OP_RPOW = 6
DEF OP_EXP = 7
DEF OP_GLUE = 8
DEF OP_STEP = 9
DEF OP_GUARD = 10
DEF OP_JMP = 11
DEF OP_IFGE = 12
DEF OP_COPY = 13
DEF OP_SUM_INIT = 14
DEF OP_SUM_ADD = 15
DEF OP_SUM_FIN = 16


def run_tape(int[::1] ops, int[::1] a, int[::1] b, int[::1] outr,
             double[::1] p1, double[::1] p2, int nreg, int result,
             double[:, ::1] pts):
    cdef Py_ssize_t npts = pts.shape[0]
    cdef Py_ssize_t ninstr = ops.shape[0]
    out_arr = np.empty(npts, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double* regs = <double*> malloc(nreg * sizeof(double))
    if regs == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    cdef int pc, op
    cdef double v, u, gp, gq, k
    cdef int err = 0
    try:
        for i in range(npts):
            pc = 0
            while pc < ninstr:
                op = ops[pc]
                if op == OP_CONST:
                    regs[outr[pc]] = p1[pc]
                elif op == OP_VAR:
                    regs[outr[pc]] = pts[i, a[pc]]
                elif op == OP_ADD:
                    regs[outr[pc]] = regs[a[pc]] + regs[b[pc]]
                elif op == OP_MUL:
                    regs[outr[pc]] = regs[a[pc]] * regs[b[pc]]
                elif op == OP_IPOW:
                    v = pow(regs[a[pc]], p1[pc])
                    if p1[pc] < 0 and not isfinite(v):
                        err = 1
                        break
                    regs[outr[pc]] = v
                elif op == OP_APOW:
                    v = pow(fabs(regs[a[pc]]), p1[pc])
                    if p1[pc] < 0 and not isfinite(v):
                        err = 1
                        break
                    regs[outr[pc]] = v
                elif op == OP_RPOW:
                    u = regs[a[pc]]
                    if u < 0:
                        err = 2
                        break
                    v = pow(u, p1[pc])
                    if p1[pc] < 0 and not isfinite(v):
                        err = 1
                        break
                    regs[outr[pc]] = v
                elif op == OP_EXP:
                    regs[outr[pc]] = exp(regs[a[pc]])
                elif op == OP_GLUE:
                    u = regs[a[pc]]
                    if u <= 0:
                        regs[outr[pc]] = 0.0
                    else:
                        v = exp(-1.0 / u)
                        if v == 0.0:
                            regs[outr[pc]] = 0.0
                        else:
                            k = p1[pc]
                            regs[outr[pc]] = v * pow(u, -k) if k != 0.0 else v
                elif op == OP_STEP:
                    u = regs[a[pc]]
                    if u <= p1[pc]:
                        regs[outr[pc]] = 0.0
                    elif u >= p2[pc]:
                        regs[outr[pc]] = 1.0
                    else:
                        gp = exp(-1.0 / (u - p1[pc]))
                        gq = exp(-1.0 / (p2[pc] - u))
                        regs[outr[pc]] = gp / (gp + gq)
                elif op == OP_GUARD:
                    if regs[a[pc]] <= p1[pc]:
                        regs[outr[pc]] = 0.0
                        pc = b[pc]
                        continue
                elif op == OP_JMP:
                    pc = a[pc]
                    continue
                elif op == OP_IFGE:
                    if fabs(regs[a[pc]]) < p1[pc]:
                        pc = b[pc]
                        continue
                elif op == OP_COPY:
                    regs[outr[pc]] = regs[a[pc]]
                elif op == OP_SUM_INIT:
                    regs[outr[pc]] = regs[a[pc]]
                    regs[b[pc]] = 0.0
                elif op == OP_SUM_ADD:
                    # Neumaier two-sum: keep the rounding error of the
                    # running sum in a compensation register
                    u = regs[outr[pc]]
                    v = regs[a[pc]]
                    gp = u + v
                    if fabs(u) >= fabs(v):
                        regs[b[pc]] += (u - gp) + v
                    else:
                        regs[b[pc]] += (v - gp) + u
                    regs[outr[pc]] = gp
                elif op == OP_SUM_FIN:
                    regs[outr[pc]] = regs[a[pc]] + regs[b[pc]]
                pc += 1
            if err:
                break
            out[i] = regs[result]
    finally:
        free(regs)
    if err == 1:
        raise ValueError("non-finite value in power node (outside its domain)")
    if err == 2:
        raise ValueError("negative base in RealPow node")
    return out_arr
