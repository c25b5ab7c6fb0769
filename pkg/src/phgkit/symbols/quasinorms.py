"""Quasi-norm expression trees.

The smooth even-power variant |xi| = (sum xi_k**(2a/rho_k))**(1/(2a)) is
representable in the primitive set; its positive powers are built directly
as RealPow of the inner polynomial so that integer cases fold to plain
polynomials (e.g. |xi|^2 for trivial weights is literally xi_1^2 + ...).
"""

from __future__ import annotations

from phgkit.grading import ExtendedWeights, Weights

from . import expr as ex

__all__ = ["even_power_polynomial", "quasi_norm_expr", "quasi_norm_power", "one_plus_qn"]


def even_power_polynomial(w: Weights | ExtendedWeights) -> ex.Expr:
    """The polynomial sum xi_k**(2a/rho_k); for extended weights the last
    slot is the t variable with weight 1."""
    rho = w.rho
    a = w.lcm
    terms = []
    extended = isinstance(w, ExtendedWeights)
    d_base = len(rho) - 1 if extended else len(rho)
    for k, r in enumerate(rho):
        v = ex.var("t") if (extended and k == d_base) else ex.var("xi", k)
        terms.append(ex.pow_i(v, 2 * a // r))
    return ex.add(*terms)


def quasi_norm_expr(w: Weights | ExtendedWeights) -> ex.Expr:
    """|xi| as an expression, smooth away from 0."""
    return quasi_norm_power(w, 1.0)


def quasi_norm_power(w: Weights | ExtendedWeights, p: float) -> ex.Expr:
    """|xi|**p as an expression.

    Negative p yields a tree whose domain excludes xi = 0; such trees are
    meant to sit inside a Guarded factor (e.g. behind a radial cutoff).
    """
    P = even_power_polynomial(w)
    return ex.real_pow(P, p / (2.0 * w.lcm))


def one_plus_qn(w: Weights | ExtendedWeights) -> ex.Expr:
    """1 + |xi|, the weight function of symbol estimates."""
    return ex.add(ex.ONE, quasi_norm_expr(w))
