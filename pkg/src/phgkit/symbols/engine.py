"""Symbol objects: an expression tree plus its declared variable signature,
with exact differentiation, dilation composition, and a finite-difference
oracle for the symbolic derivative path."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from phgkit.grading import ExtendedWeights, InvalidParameterError, Weights

from . import expr as ex
from .backend import evaluate as _evaluate

__all__ = ["MultiIndex", "Symbol", "fd_derivative", "enumerate_multi_indices"]


@dataclass(frozen=True)
class MultiIndex:
    """Derivative orders per variable slot (x block, xi block, optional t)."""

    x: tuple[int, ...] = ()
    xi: tuple[int, ...] = ()
    t: int = 0

    def __post_init__(self):
        if any(a < 0 for a in self.x) or any(b < 0 for b in self.xi) or self.t < 0:
            raise InvalidParameterError("multi-index entries must be nonnegative")

    @property
    def total(self) -> int:
        return sum(self.x) + sum(self.xi) + self.t

    def weighted_xi_order(self, w: Weights | ExtendedWeights) -> float:
        """Homogeneous order of the xi(+t) part: sum rho_k * beta_k."""
        rho = w.rho
        beta = self.xi + ((self.t,) if isinstance(w, ExtendedWeights) else ())
        if len(beta) != len(rho):
            raise InvalidParameterError(
                f"multi-index xi-arity {len(beta)} does not match weights {rho}")
        return float(sum(r * b for r, b in zip(rho, beta)))

    def slots(self, sig: ex.Signature) -> list[ex.Var]:
        """The variable list, one entry per derivative, in canonical order."""
        out = []
        for i, a in enumerate(self.x):
            out.extend([sig.x(i)] * a)
        for k, b in enumerate(self.xi):
            out.extend([sig.xi(k)] * b)
        if self.t:
            out.extend([sig.t] * self.t)
        return out


def enumerate_multi_indices(nx: int, nxi: int, has_t: bool, max_total: int):
    """All (x, xi, t) multi-indices with total unweighted order <= max_total."""
    slots = nx + nxi + (1 if has_t else 0)
    out = []
    for total in range(max_total + 1):
        for combo in _compositions(total, slots):
            x = combo[:nx]
            xi = combo[nx:nx + nxi]
            t = combo[-1] if has_t else 0
            out.append(MultiIndex(x=tuple(x), xi=tuple(xi), t=t))
    return out


def _compositions(total: int, slots: int):
    if slots == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, slots - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class Symbol:
    """An evaluable symbol: expression tree + declared signature."""

    expr: ex.Expr
    sig: ex.Signature

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        return _evaluate(self.expr, pts, self.sig)

    def diff(self, mi: MultiIndex) -> "Symbol":
        e = self.expr
        memo: dict = {}
        for v in mi.slots(self.sig):
            e = ex.differentiate(e, v, memo)
        return Symbol(e, self.sig)

    def diff_var(self, v: ex.Var, order: int = 1) -> "Symbol":
        e = self.expr
        memo: dict = {}
        for _ in range(order):
            e = ex.differentiate(e, v, memo)
        return Symbol(e, self.sig)

    def restrict_t(self, t0: float) -> "Symbol":
        if not self.sig.has_t:
            raise InvalidParameterError("symbol has no t slot to restrict")
        e = ex.substitute(self.expr, {self.sig.t: ex.const(t0)})
        if any(v.kind == "t" for v in ex.variables(e)):
            raise InvalidParameterError("t survived restriction")
        return Symbol(e, self.sig.without_t())

    def with_t_slot(self) -> "Symbol":
        return self if self.sig.has_t else Symbol(self.expr, ex.Signature(self.sig.n, self.sig.d, True))

    def dilate_xi(self, w: Weights | ExtendedWeights, s: float) -> "Symbol":
        """Compose with the graded dilation at fixed scale s (and s*t if extended)."""
        if not s > 0:
            raise InvalidParameterError("dilation scale must be positive")
        base = w.base if isinstance(w, ExtendedWeights) else w
        if base.d != self.sig.d:
            raise InvalidParameterError("weights do not match signature")
        mapping = {self.sig.xi(k): ex.mul(ex.const(s ** r), self.sig.xi(k))
                   for k, r in enumerate(base.rho)}
        if isinstance(w, ExtendedWeights):
            mapping[self.sig.t] = ex.mul(ex.const(s), self.sig.t)
        return Symbol(ex.substitute(self.expr, mapping), self.sig)

    def dilate_xi_inv_t(self, w: Weights) -> "Symbol":
        """Compose the xi block with delta at scale 1/|t|.

        The result is only evaluable for t != 0; callers must keep it inside
        a Guarded factor that vanishes near t = 0.
        """
        sig = self.sig if self.sig.has_t else ex.Signature(self.sig.n, self.sig.d, True)
        t = sig.t
        mapping = {sig.xi(k): ex.mul(ex.abs_pow(t, -float(r)), sig.xi(k))
                   for k, r in enumerate(w.rho)}
        return Symbol(ex.substitute(self.expr, mapping), sig)

    def defect(self, w: Weights | ExtendedWeights, s: float, m: float) -> "Symbol":
        """The dilation defect u(delta_s .) - s^m u as an exact tree."""
        dil = self.dilate_xi(w, s)
        return Symbol(ex.sub(dil.expr, ex.mul(ex.const(s ** m), self.expr)), self.sig)


def fd_derivative(sym: Symbol, mi: MultiIndex, pt: np.ndarray, h: float = 1e-4) -> float:
    """Central finite-difference estimate of a mixed derivative, O(h^2) per
    direction; the independent oracle for the symbolic path."""
    if h <= 0 or h < 1e-10:
        raise InvalidParameterError(f"step {h} underflows the finite-difference stencil")
    pt = np.asarray(pt, dtype=float)
    slots = [sym.sig.slot(v) for v in mi.slots(sym.sig)]

    def rec(p, remaining):
        if not remaining:
            return float(sym(p[None, :])[0])
        s, rest = remaining[0], remaining[1:]
        up, dn = p.copy(), p.copy()
        up[s] += h
        dn[s] -= h
        return (rec(up, rest) - rec(dn, rest)) / (2.0 * h)

    return rec(pt, slots)
