"""Vectorized tree-walking evaluator (the pure-Python backend).

Guarded and TSwitch nodes restrict evaluation to masked point subsets, so
bodies are never evaluated where their guards vanish; this mirrors the
per-point control flow of the compiled tape evaluator exactly.
"""

from __future__ import annotations

import numpy as np

from . import expr as ex

__all__ = ["eval_tree"]


def eval_tree(e: ex.Expr, pts: np.ndarray, sig: ex.Signature) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[1] != sig.nslots:
        raise ex.DomainError(
            f"point arity {pts.shape[1]} does not match signature with {sig.nslots} slots")
    return _eval(e, pts, sig, {}, 0)


def _eval(e, pts, sig, memo, scope):
    key = (e._uid, scope)
    out = memo.get(key)
    if out is not None:
        return out
    n = pts.shape[0]

    if isinstance(e, ex.Const):
        out = np.full(n, e.value)
    elif isinstance(e, ex.Var):
        out = pts[:, sig.slot(e)]
    elif isinstance(e, ex.Add):
        # Neumaier-compensated sum: exact pairwise cancellations (the
        # extension/extraction algebra is full of them) come out as true
        # zeros instead of order-of-summation residue.
        out = np.zeros(n)
        comp = np.zeros(n)
        for t in e.terms:
            v = _eval(t, pts, sig, memo, scope)
            tmp = out + v
            comp += np.where(np.abs(out) >= np.abs(v),
                             (out - tmp) + v, (v - tmp) + out)
            out = tmp
        out = out + comp
    elif isinstance(e, ex.Mul):
        out = np.ones(n)
        for f in e.factors:
            out = out * _eval(f, pts, sig, memo, scope)
    elif isinstance(e, ex.IntPow):
        b = _eval(e.base, pts, sig, memo, scope)
        with np.errstate(divide="ignore"):
            out = b ** float(e.k)
        if e.k < 0:
            _check_finite(out, e)
    elif isinstance(e, ex.AbsPow):
        b = np.abs(_eval(e.base, pts, sig, memo, scope))
        with np.errstate(divide="ignore"):
            out = b ** e.p
        if e.p < 0:
            _check_finite(out, e)
    elif isinstance(e, ex.RealPow):
        b = _eval(e.base, pts, sig, memo, scope)
        if np.any(b < 0):
            raise ex.DomainError(f"negative base in RealPow(p={e.p})")
        with np.errstate(divide="ignore"):
            out = b ** e.p
        if e.p < 0:
            _check_finite(out, e)
    elif isinstance(e, ex.Exp):
        out = np.exp(_eval(e.arg, pts, sig, memo, scope))
    elif isinstance(e, ex.Glue):
        r = _eval(e.arg, pts, sig, memo, scope)
        out = np.zeros(n)
        m = r > 0
        if np.any(m):
            rm = r[m]
            g = np.exp(-1.0 / rm)
            if e.k:
                live = g > 0
                val = np.zeros(rm.shape)
                val[live] = g[live] * rm[live] ** (-e.k)
                out[m] = val
            else:
                out[m] = g
    elif isinstance(e, ex.Step):
        u = _eval(e.arg, pts, sig, memo, scope)
        out = _step_vals(u, e.lo, e.hi)
    elif isinstance(e, ex.Guarded):
        g = _eval(e.gate, pts, sig, memo, scope)
        out = np.zeros(n)
        m = g > e.thr
        if np.any(m):
            sub = pts[m]
            inner = {}
            fv = _eval(e.factor, sub, sig, inner, scope + 1)
            bv = _eval(e.body, sub, sig, inner, scope + 1)
            out[m] = fv * bv
    elif isinstance(e, ex.TSwitch):
        g = _eval(e.gate, pts, sig, memo, scope)
        out = np.zeros(n)
        m = np.abs(g) >= e.thr
        if np.any(m):
            out[m] = _eval(e.hi, pts[m], sig, {}, scope + 1)
        if np.any(~m):
            out[~m] = _eval(e.lo, pts[~m], sig, {}, scope + 1)
    else:
        raise ex.DomainError(f"cannot evaluate node type {type(e).__name__}")

    memo[key] = out
    return out


def _step_vals(u: np.ndarray, lo: float, hi: float) -> np.ndarray:
    out = np.zeros(u.shape)
    out[u >= hi] = 1.0
    mid = (u > lo) & (u < hi)
    if np.any(mid):
        um = u[mid]
        gp = np.exp(-1.0 / (um - lo))
        gq = np.exp(-1.0 / (hi - um))
        out[mid] = gp / (gp + gq)
    return out


def _check_finite(vals: np.ndarray, node) -> None:
    if not np.all(np.isfinite(vals)):
        raise ex.DomainError(
            f"non-finite value from {type(node).__name__} node (outside its domain)")
