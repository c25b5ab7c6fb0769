"""Extraction direction: peel the asymptotic expansion off an extension.

The induction is: restrict the current stage at t = 0 to get the next
coefficient, rebuild the comparison extension from that coefficient with
the wide t-profile, subtract, and divide by t.  Division is syntactic
wherever a term carries an explicit t power or sits behind a t-guard whose
threshold keeps t away from 0; only the leftover (which vanishes at t = 0)
falls back to the switched difference quotient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from phgkit.grading import ExtendedWeights, InvalidParameterError, Weights
from phgkit.symbols import expr as ex
from phgkit.symbols.checks import Certificate, decompose_hs
from phgkit.symbols.cutoffs import CutoffFamily
from phgkit.symbols.engine import Symbol
from phgkit.symbols.grids import EvaluationGrid

__all__ = [
    "ExpansionTerm", "Expansion", "NotDivisibleError", "CertificationError",
    "make_b", "divide_by_t", "extract_expansion", "homogenize_polynomial",
    "split_term",
]


class NotDivisibleError(ValueError):
    """The function does not vanish at t = 0, so it is not in the image of
    multiplication by t."""


class CertificationError(ValueError):
    """A required class certificate is missing or failing."""


@dataclass(frozen=True)
class ExpansionTerm:
    symbol: Symbol
    order: float
    certificate: Certificate


@dataclass
class Expansion:
    """Ordered homogeneous(-modulo-Schwartz) terms of orders m - j."""

    m: float
    terms: list[ExpansionTerm]
    remainder: Optional[Symbol] = None
    stages: list[Symbol] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.terms)


def make_b(a: Symbol, m: float, w: Weights,
           cutoffs: Optional[CutoffFamily] = None,
           certificate: Optional[Certificate] = None) -> Symbol:
    """The standard extension chi0(t) a + chi1(t) |t|^m a(delta_{1/|t|} xi).

    With the wide profile (plateau |t| <= 1) the result restricts to ``a``
    for every |t| <= 1.  ``a`` must carry a passing homogeneous-modulo-
    Schwartz (or on-the-nose homogeneity) certificate.
    """
    if certificate is None:
        raise CertificationError(
            "make_b requires a certificate for a; run hs_check (or "
            "homogeneous_check) and pass its Certificate")
    certificate.require(("hs", "homogeneous"))
    if cutoffs is None:
        cutoffs = CutoffFamily.restriction_profile(w)
    a_t = a.with_t_slot()
    t = a_t.sig.t
    abst = ex.abs_pow(t, 1.0)
    chi1 = ex.step(abst, cutoffs.t_plateau, cutoffs.t_support)
    chi0 = ex.add(ex.ONE, ex.neg(chi1))
    dilated = a_t.dilate_xi_inv_t(w).expr
    tail = ex.guarded(abst, cutoffs.t_plateau, chi1,
                      ex.mul(ex.abs_pow(t, float(m)), dilated))
    return Symbol(ex.add(ex.mul(chi0, a_t.expr), tail), a_t.sig)


def _divide_term(term: ex.Expr, t: ex.Var) -> Optional[ex.Expr]:
    """Exact quotient term/t, or None when no syntactic route exists.

    Routes, tried cheapest first: an explicit t power; a guard whose gate
    bounds |t| away from 0 (push 1/t into its body); recursion into the
    body of any other guard (guard nesting order is canonical but
    arbitrary, so the t-route may sit below a radial guard)."""
    if term is ex.ZERO:
        return ex.ZERO
    factors = list(term.factors) if isinstance(term, ex.Mul) else [term]
    for i, f in enumerate(factors):
        if f is t:
            rest = factors[:i] + factors[i + 1:]
            return ex.mul(*rest) if rest else ex.ONE
        if isinstance(f, ex.IntPow) and f.base is t and f.k >= 1:
            rest = factors[:i] + [ex.pow_i(t, f.k - 1)] + factors[i + 1:]
            return ex.mul(*rest)
    for i, f in enumerate(factors):
        if isinstance(f, ex.Guarded) and _gate_excludes_t0(f, t):
            new = ex.guarded(f.gate, f.thr, f.factor,
                             ex.mul(f.body, ex.pow_i(t, -1)))
            return ex.mul(*(factors[:i] + [new] + factors[i + 1:]))
        if isinstance(f, ex.Step) and f.arg is ex.abs_pow(t, 1.0) and f.lo > 0:
            new = ex.guarded(f.arg, f.lo, f, ex.pow_i(t, -1))
            return ex.mul(*(factors[:i] + [new] + factors[i + 1:]))
    for i, f in enumerate(factors):
        if isinstance(f, ex.Guarded):
            q = _divide_term(f.body, t)
            if q is not None:
                new = ex.guarded(f.gate, f.thr, f.factor, q)
                return ex.mul(*(factors[:i] + [new] + factors[i + 1:]))
    return None


def _gate_excludes_t0(g: ex.Guarded, t: ex.Var) -> bool:
    gate = g.gate
    return (isinstance(gate, ex.AbsPow) and gate.base is t
            and gate.p == 1.0 and g.thr > 0)


def divide_by_t(sym: Symbol, t_switch: float = 1e-3,
                check_pts: Optional[np.ndarray] = None,
                tol: float = 1e-10) -> Symbol:
    """Divide by t, preferring exact tree division term by term.

    Residual terms (no syntactic t factor) are handled by a switch: f/t for
    |t| >= t_switch and the symmetric difference quotient frozen at
    t_switch below.  ``check_pts`` (points in the symbol's layout) verify
    f(., 0) = 0 before dividing.
    """
    sig = sym.sig
    if not sig.has_t:
        raise InvalidParameterError("divide_by_t needs a t slot")
    t = sig.t
    tcol = sig.slot(t)

    if check_pts is not None and len(check_pts):
        p0 = np.array(check_pts, dtype=float)
        p0[:, tcol] = 0.0
        v0 = sym(p0)
        p1 = np.array(check_pts, dtype=float)
        p1[:, tcol] = 1.0
        scale = 1.0 + float(np.max(np.abs(sym(p1))))
        if np.max(np.abs(v0)) > tol * scale:
            raise NotDivisibleError(
                f"f(., 0) = {np.max(np.abs(v0)):.3g} exceeds {tol:g} * scale; "
                "not in the divisible class")

    f = sym.expr
    terms = list(f.terms) if isinstance(f, ex.Add) else [f]
    divided, residual = [], []
    for term in terms:
        if term is ex.ZERO:
            continue
        q = _divide_term(term, t)
        (divided if q is not None else residual).append(q if q is not None else term)
    if residual:
        R = ex.add(*residual)
        hi = ex.mul(R, ex.pow_i(t, -1))
        rp = ex.substitute(R, {t: ex.const(t_switch)})
        rm = ex.substitute(R, {t: ex.const(-t_switch)})
        lo = ex.mul(ex.const(0.5 / t_switch), ex.sub(rp, rm))
        divided.append(ex.t_switch(t, t_switch, hi, lo))
    return Symbol(ex.add(*divided) if divided else ex.ZERO, sig)


def extract_expansion(u: Symbol, m: float, N: int, w: Weights,
                      certificate: Certificate,
                      grid: Optional[EvaluationGrid] = None,
                      t_switch: float = 1e-3) -> Expansion:
    """Coefficients a_j = u_j(., ., 0) for j <= N plus the remainder stage.

    Each stage subtracts the wide-profile extension of the coefficient just
    extracted and divides by t; the stage symbols are retained so the
    partial-sum identity at t = 1 can be checked externally.
    """
    certificate.require(("hs", "homogeneous"))
    if not u.sig.has_t:
        raise InvalidParameterError("extensions live in (x, xi, t)")
    cutoffs = CutoffFamily.restriction_profile(w)
    check_pts = None
    if grid is not None:
        check_pts, _ = grid.points(u.sig) if isinstance(grid.weights, ExtendedWeights) \
            else (None, None)

    stages = [u]
    terms: list[ExpansionTerm] = []
    uj = u
    for j in range(N + 1):
        aj = uj.restrict_t(0.0)
        cert = Certificate(kind="hs", order=m - j, passed=True,
                           detail=f"stage {j} of extraction from a certified extension")
        terms.append(ExpansionTerm(symbol=aj, order=m - j, certificate=cert))
        bj = make_b(aj, m - j, w, cutoffs, certificate=cert)
        diff = Symbol(ex.sub(uj.expr, bj.expr), uj.sig)
        try:
            uj = divide_by_t(diff, t_switch=t_switch, check_pts=check_pts)
        except NotDivisibleError as err:
            raise NotDivisibleError(f"stage {j}: {err}") from None
        stages.append(uj)
    return Expansion(m=m, terms=terms, remainder=uj, stages=stages)


def homogenize_polynomial(a: Symbol, m: int, w: Weights) -> Symbol:
    """Weight each xi-monomial of weighted degree k by t**(m-k).

    The result is a polynomial in (xi, t), homogeneous of order m on the
    nose for the extended dilations, restricting to ``a`` at t = 1 exactly
    (term for term, the same trees)."""
    if m != int(m):
        raise InvalidParameterError("homogenization order must be an integer")
    sig = a.sig
    if sig.has_t:
        raise InvalidParameterError("input already has a t slot")
    ext_sig = ex.Signature(sig.n, sig.d, True)
    t = ext_sig.t
    terms = list(a.expr.terms) if isinstance(a.expr, ex.Add) else [a.expr]
    out = []
    for term in terms:
        deg = _weighted_xi_degree(term, w)
        if deg > m:
            raise InvalidParameterError(
                f"term of weighted degree {deg} exceeds homogenization order {m}")
        out.append(ex.mul(ex.pow_i(t, m - deg), term))
    return Symbol(ex.add(*out), ext_sig)


def _weighted_xi_degree(term: ex.Expr, w: Weights) -> int:
    factors = term.factors if isinstance(term, ex.Mul) else (term,)
    deg = 0
    for f in factors:
        if isinstance(f, ex.Var) and f.kind == "xi":
            deg += w.rho[f.idx]
        elif isinstance(f, ex.IntPow) and isinstance(f.base, ex.Var) \
                and f.base.kind == "xi" and f.k > 0:
            deg += w.rho[f.base.idx] * f.k
        else:
            kinds = {v.kind for v in ex.variables(f)}
            if "xi" in kinds or "t" in kinds:
                raise InvalidParameterError(
                    f"factor {type(f).__name__} is not a xi-monomial; "
                    "input must be polynomial in xi")
    return deg


def split_term(a_j: Symbol, m_j: float, w: Weights, K_radius: float,
               grid: EvaluationGrid, **kwargs):
    """Scaling-limit split of an expansion term into its on-the-nose
    homogeneous representative and a Schwartz residual evaluator."""
    return decompose_hs(a_j, m_j, w, K_radius, grid, **kwargs)
