"""Flat-tape compilation of expression trees for the compiled evaluator.

A tree is linearized into a small register program.  Guarded and TSwitch
become conditional jumps, so masked bodies cost nothing per skipped point.
Common subexpressions are shared within a block scope only; a subtree
first seen inside a guarded block is recomputed outside it, never the
other way around.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex

OP_CONST = 0
OP_VAR = 1
OP_ADD = 2
OP_MUL = 3
OP_IPOW = 4
OP_APOW = 5
OP_RPOW = 6
OP_EXP = 7
OP_GLUE = 8
OP_STEP = 9
OP_GUARD = 10
OP_JMP = 11
OP_IFGE = 12
OP_COPY = 13
OP_SUM_INIT = 14   # out = reg[a], comp reg[b] = 0
OP_SUM_ADD = 15    # two-sum of reg[a] into acc reg[out], compensation reg[b]
OP_SUM_FIN = 16    # out = reg[a] + reg[b]


@dataclass
class Tape:
    ops: np.ndarray
    a: np.ndarray
    b: np.ndarray
    out: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    nreg: int
    result: int


class _Compiler:
    def __init__(self, sig: ex.Signature):
        self.sig = sig
        self.rows: list[tuple[int, int, int, int, float, float]] = []
        self.nreg = 0
        self.scopes: list[dict[int, int]] = [{}]

    def newreg(self) -> int:
        r = self.nreg
        self.nreg += 1
        return r

    def emit(self, op, a=0, b=0, out=0, p1=0.0, p2=0.0) -> int:
        self.rows.append([op, a, b, out, p1, p2])
        return len(self.rows) - 1

    def lookup(self, uid: int):
        for scope in reversed(self.scopes):
            r = scope.get(uid)
            if r is not None:
                return r
        return None

    def compile(self, e: ex.Expr) -> int:
        r = self.lookup(e._uid)
        if r is not None:
            return r
        r = self._compile(e)
        self.scopes[-1][e._uid] = r
        return r

    def _compile(self, e: ex.Expr) -> int:
        c = self.compile
        if isinstance(e, ex.Const):
            r = self.newreg()
            self.emit(OP_CONST, out=r, p1=e.value)
            return r
        if isinstance(e, ex.Var):
            r = self.newreg()
            self.emit(OP_VAR, a=self.sig.slot(e), out=r)
            return r
        if isinstance(e, ex.Add):
            child_regs = [c(kid) for kid in e.terms]
            acc, comp = self.newreg(), self.newreg()
            self.emit(OP_SUM_INIT, a=child_regs[0], b=comp, out=acc)
            for rk in child_regs[1:]:
                self.emit(OP_SUM_ADD, a=rk, b=comp, out=acc)
            res = self.newreg()
            self.emit(OP_SUM_FIN, a=acc, b=comp, out=res)
            return res
        if isinstance(e, ex.Mul):
            acc = c(e.factors[0])
            for kid in e.factors[1:]:
                rk = c(kid)
                nxt = self.newreg()
                self.emit(OP_MUL, a=acc, b=rk, out=nxt)
                acc = nxt
            return acc
        if isinstance(e, ex.IntPow):
            rb = c(e.base)
            r = self.newreg()
            self.emit(OP_IPOW, a=rb, out=r, p1=float(e.k))
            return r
        if isinstance(e, ex.AbsPow):
            rb = c(e.base)
            r = self.newreg()
            self.emit(OP_APOW, a=rb, out=r, p1=e.p)
            return r
        if isinstance(e, ex.RealPow):
            rb = c(e.base)
            r = self.newreg()
            self.emit(OP_RPOW, a=rb, out=r, p1=e.p)
            return r
        if isinstance(e, ex.Exp):
            ra = c(e.arg)
            r = self.newreg()
            self.emit(OP_EXP, a=ra, out=r)
            return r
        if isinstance(e, ex.Glue):
            ra = c(e.arg)
            r = self.newreg()
            self.emit(OP_GLUE, a=ra, out=r, p1=float(e.k))
            return r
        if isinstance(e, ex.Step):
            ra = c(e.arg)
            r = self.newreg()
            self.emit(OP_STEP, a=ra, out=r, p1=e.lo, p2=e.hi)
            return r
        if isinstance(e, ex.Guarded):
            rg = c(e.gate)
            r = self.newreg()
            guard_row = self.emit(OP_GUARD, a=rg, out=r, p1=e.thr)
            self.scopes.append({})
            rf = c(e.factor)
            rb = c(e.body)
            self.emit(OP_MUL, a=rf, b=rb, out=r)
            self.scopes.pop()
            self.rows[guard_row][2] = len(self.rows)   # jump target on mask
            return r
        if isinstance(e, ex.TSwitch):
            rg = c(e.gate)
            r = self.newreg()
            if_row = self.emit(OP_IFGE, a=rg, p1=e.thr)
            self.scopes.append({})
            rh = c(e.hi)
            self.emit(OP_COPY, a=rh, out=r)
            jmp_row = self.emit(OP_JMP)
            self.scopes.pop()
            self.rows[if_row][2] = len(self.rows)      # else branch start
            self.scopes.append({})
            rl = c(e.lo)
            self.emit(OP_COPY, a=rl, out=r)
            self.scopes.pop()
            self.rows[jmp_row][1] = len(self.rows)     # join point
            return r
        raise ex.DomainError(f"cannot compile node type {type(e).__name__}")


def compile_tape(e: ex.Expr, sig: ex.Signature) -> Tape:
    comp = _Compiler(sig)
    result = comp.compile(e)
    cols = list(zip(*comp.rows)) if comp.rows else [[]] * 6
    return Tape(
        ops=np.asarray(cols[0], dtype=np.int32),
        a=np.asarray(cols[1], dtype=np.int32),
        b=np.asarray(cols[2], dtype=np.int32),
        out=np.asarray(cols[3], dtype=np.int32),
        p1=np.asarray(cols[4], dtype=np.float64),
        p2=np.asarray(cols[5], dtype=np.float64),
        nreg=max(comp.nreg, 1),
        result=result,
    )
