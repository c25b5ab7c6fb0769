import numpy as np
import pytest

from phgkit.corpus import load_entry
from phgkit.grading import InvalidParameterError, Weights
from phgkit.symbols import expr as ex
from phgkit.symbols.checks import (Certificate, hs_check, schwartz_check,
                                   symbol_estimate)
from phgkit.symbols.engine import Symbol
from phgkit.phg.expansion import (CertificationError, NotDivisibleError,
                                  divide_by_t, extract_expansion,
                                  homogenize_polynomial, make_b)


HS2 = Certificate("hs", 2.0, True)
HS1 = Certificate("hs", 1.0, True)


# ---------------------------------------------------------------------------
# make_b


def test_make_b_requires_certificate(w11):
    a = load_entry("lemma42")
    with pytest.raises(CertificationError):
        make_b(a, 1.0, w11)
    failing = Certificate("hs", 1.0, False)
    with pytest.raises(InvalidParameterError):
        make_b(a, 1.0, w11, certificate=failing)


def test_make_b_restricts_to_a_inside_unit_time(w11, grid11):
    a = load_entry("lemma42")
    b = make_b(a, 1.0, w11, certificate=HS1)
    pts, _ = grid11.points(a.sig)
    av = a(pts)
    for t in (0.0, 0.5, -1.0, 1.0):
        witht = np.concatenate([pts, np.full((len(pts), 1), t)], axis=1)
        assert np.array_equal(b(witht), av), t


def test_make_b_exact_cancellation_for_homogeneous(w11, sig2, grid11_ext):
    # for an on-the-nose homogeneous input the dilated branch cancels the
    # scale factor exactly, so b equals |xi|^2 at every (xi, t)
    from phgkit.symbols.quasinorms import quasi_norm_power
    a = Symbol(quasi_norm_power(w11, 2.0), sig2)
    b = make_b(a, 2.0, w11, certificate=Certificate("homogeneous", 2.0, True))
    pts, _ = grid11_ext.points(b.sig)
    qn2 = np.sum(pts[:, :2] ** 2, axis=1)
    assert np.max(np.abs(b(pts) - qn2) / np.maximum(qn2, 1e-300)) <= 1e-12


def test_make_b_schwartz_tail_branch(w11):
    a = load_entry("gaussian")
    b = make_b(a, 0.0, w11, certificate=Certificate("hs", 0.0, True))
    pt = np.array([[1.5, -0.5, 3.0]])
    scaled = np.array([[0.5, -0.5 / 3.0]])
    assert b(pt)[0] == pytest.approx(a(scaled)[0], rel=1e-14)


def test_make_b_lands_in_hs(w11, grid11_ext):
    a = load_entry("lemma42")
    b = make_b(a, 1.0, w11, certificate=HS1)
    assert hs_check(b, 1.0, w11.extended(), grid11_ext).passed


# ---------------------------------------------------------------------------
# divide_by_t


def test_divide_explicit_factor(sig2t):
    t = sig2t.t
    f = Symbol(ex.mul(t, sig2t.xi(0)), sig2t)
    assert divide_by_t(f).expr is sig2t.xi(0)
    f2 = Symbol(ex.pow_i(t, 2), sig2t)
    assert divide_by_t(f2).expr is t


def test_divide_worked_difference(w11, sig2t):
    P = ex.add(ex.pow_i(sig2t.xi(0), 2), ex.pow_i(sig2t.xi(1), 2))
    u = Symbol(ex.add(ex.pow_i(sig2t.t, 2), P), sig2t)
    a0 = u.restrict_t(0.0)
    b0 = make_b(a0, 2.0, w11, certificate=HS2)
    diff = Symbol(ex.sub(u.expr, b0.expr), sig2t)
    assert divide_by_t(diff).expr is sig2t.t


def test_divide_rejects_nonvanishing(sig2t, grid11_ext):
    f = Symbol(ex.add(ex.ONE, sig2t.t), sig2t)
    pts, _ = grid11_ext.points(sig2t)
    with pytest.raises(NotDivisibleError):
        divide_by_t(f, check_pts=pts)


def test_divide_switch_fallback_values(sig2t):
    # exp(t) - 1 has no syntactic t factor; the switch evaluates f/t away
    # from 0 and the frozen quotient inside
    f = Symbol(ex.add(ex.exp_(sig2t.t), ex.const(-1.0)), sig2t)
    q = divide_by_t(f, t_switch=1e-3)
    big = q(np.array([[0.0, 0.0, 2.0]]))[0]
    assert big == pytest.approx((np.e ** 2 - 1) / 2, rel=1e-12)
    small = q(np.array([[0.0, 0.0, 0.0]]))[0]
    assert small == pytest.approx(1.0, abs=1e-6)


# ---------------------------------------------------------------------------
# extraction


def test_worked_extraction_exact(w11, grid11_ext):
    u = load_entry("worked-extension")
    expn = extract_expansion(u, 2.0, 2, w11, HS2, grid=grid11_ext)
    sig = ex.Signature(0, 2, False)
    P = ex.add(ex.pow_i(sig.xi(0), 2), ex.pow_i(sig.xi(1), 2))
    assert expn.terms[0].symbol.expr is P
    assert expn.terms[1].symbol.expr is ex.ZERO
    assert expn.terms[2].symbol.expr is ex.ONE
    assert expn.remainder.expr is ex.ZERO


def test_extraction_orders_and_classes(w11, grid11, grid11_ext):
    u = load_entry("worked-extension")
    expn = extract_expansion(u, 2.0, 2, w11, HS2, grid=grid11_ext)
    for j, term in enumerate(expn.terms):
        assert term.order == 2.0 - j
        assert hs_check(term.symbol, term.order, w11, grid11).passed


def test_homogeneous_on_the_nose_single_stage(w11, grid11_ext, sig2t):
    # an extension homogeneous on the nose and smooth at 0: the zeroth
    # coefficient is its own restriction at t = 0
    P = ex.add(ex.pow_i(sig2t.xi(0), 2), ex.pow_i(sig2t.xi(1), 2))
    u = Symbol(ex.add(ex.pow_i(sig2t.t, 2), P), sig2t)
    expn = extract_expansion(u, 2.0, 0, w11, HS2, grid=grid11_ext)
    assert expn.terms[0].symbol.expr is u.restrict_t(0.0).expr


def test_extraction_of_homogenized_polynomial_recovers_parts():
    w = Weights((1, 2))
    sig = ex.Signature(0, 2, False)
    a = Symbol(ex.add(ex.ONE, ex.pow_i(sig.xi(0), 2), sig.xi(1)), sig)
    u = homogenize_polynomial(a, 2, w)
    cert = Certificate("homogeneous", 2.0, True)
    expn = extract_expansion(u, 2.0, 2, w, cert)
    # weighted-degree grouping oracle: degree-2 part, no degree-1, constant
    assert expn.terms[0].symbol.expr is ex.add(ex.pow_i(sig.xi(0), 2), sig.xi(1))
    assert expn.terms[1].symbol.expr is ex.ZERO
    assert expn.terms[2].symbol.expr is ex.ONE
    assert expn.remainder.expr is ex.ZERO


def test_partial_sum_identity_at_t1(w11, grid11_ext):
    """u_j(., 1) equals a minus the partial sums on the sample points."""
    a42 = load_entry("lemma42")
    u = make_b(a42, 1.0, w11, certificate=HS1)
    expn = extract_expansion(u, 1.0, 3, w11, HS1, grid=grid11_ext)
    sig = a42.sig
    from phgkit.corpus import standard_grid
    from phgkit.config import RunConfig
    pts, _ = standard_grid((1, 1), RunConfig()).points(sig)
    qn = np.maximum(1.0 + np.sqrt(np.sum(pts ** 2, axis=1)), 1.0)
    a_vals = u.restrict_t(1.0)(pts)
    partial = np.zeros(len(pts))
    for j in range(1, len(expn.stages)):
        partial += expn.terms[j - 1].symbol(pts)
        witht = np.concatenate([pts, np.ones((len(pts), 1))], axis=1)
        uj1 = expn.stages[j](witht)
        assert np.max(np.abs(uj1 - (a_vals - partial)) / qn) <= 1e-8


def test_remainder_symbol_order(w11, grid11):
    """The remainder stage restricted at t = 1 obeys the dropped order."""
    u = load_entry("worked-extension")
    expn = extract_expansion(u, 2.0, 1, w11, HS2)
    r1 = expn.remainder.restrict_t(1.0)     # the order is 2 - 1 - 1 = 0
    assert symbol_estimate(r1, 0.0, w11, grid11).passed


def test_prop18_restrictions(w11, grid11, grid11_ext):
    for name, m in (("worked-extension", 2.0),):
        u = load_entry(name)
        assert symbol_estimate(u.restrict_t(1.0), m, w11, grid11).passed
        assert hs_check(u.restrict_t(0.0), m, w11, grid11).passed


def test_joint_schwartz_of_dilated_family(w11, grid11_ext, sig2t):
    """A Schwartz profile steered by an inverse dilation and cut off in t
    away from 0 is jointly Schwartz in (xi, t)."""
    t = sig2t.t
    g_bump = ex.step(t, 0.5, 1.0)        # supported in t >= 1/2
    down = ex.one_minus_step(t, 2.0, 3.0)
    window = ex.mul(g_bump, down)        # compact support in [1/2, 3]
    f = load_entry("gaussian")
    F = Symbol(ex.guarded(t, 0.5, window, f.dilate_xi_inv_t(w11).expr), sig2t)
    assert schwartz_check(F, grid11_ext, k_max=4, deriv_max=2).passed


# ---------------------------------------------------------------------------
# homogenize_polynomial


def test_homogenize_worked_example():
    w = Weights((1, 2))
    sig = ex.Signature(0, 2, False)
    a = Symbol(ex.add(ex.ONE, ex.pow_i(sig.xi(0), 2), sig.xi(1)), sig)
    u = homogenize_polynomial(a, 2, w)
    ext = u.sig
    expect = ex.add(ex.pow_i(ext.t, 2), ex.pow_i(ext.xi(0), 2), ext.xi(1))
    assert u.expr is expect


def test_homogenize_homogeneous_input_unchanged(w11, sig2):
    a = Symbol(ex.add(ex.pow_i(sig2.xi(0), 2), ex.mul(sig2.xi(0), sig2.xi(1))),
               sig2)
    u = homogenize_polynomial(a, 2, w11)
    assert u.expr is a.expr


def test_homogenize_constant(w11, sig2):
    u = homogenize_polynomial(Symbol(ex.ONE, sig2), 3, w11)
    assert u.expr is ex.pow_i(u.sig.t, 3)


def test_homogenize_rejects_overweight_and_nonpolynomial(w11, sig2):
    with pytest.raises(InvalidParameterError):
        homogenize_polynomial(Symbol(ex.pow_i(sig2.xi(0), 3), sig2), 2, w11)
    from phgkit.symbols.quasinorms import quasi_norm_expr
    with pytest.raises(InvalidParameterError):
        homogenize_polynomial(Symbol(quasi_norm_expr(w11), sig2), 2, w11)
