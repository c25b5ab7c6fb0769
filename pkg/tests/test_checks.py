import numpy as np
import pytest

from phgkit.corpus import load_entry
from phgkit.grading import InvalidParameterError, Weights
from phgkit.symbols import expr as ex
from phgkit.symbols.checks import (NonHomogeneousError, decompose_hs,
                                   homogeneous_check, hs_check, schwartz_check,
                                   symbol_estimate)
from phgkit.symbols.cutoffs import CutoffFamily
from phgkit.symbols.engine import MultiIndex, Symbol
from phgkit.symbols.grids import EvaluationGrid
from phgkit.symbols.quasinorms import (even_power_polynomial, quasi_norm_expr,
                                       quasi_norm_power)


# ---------------------------------------------------------------------------
# decay checks


def test_gaussian_passes_all_orders(grid11):
    rep = schwartz_check(load_entry("gaussian"), grid11, k_max=4, deriv_max=2)
    assert rep.passed and all(rep.pass_at(k) for k in range(1, 5))


def test_constant_fails_first_order(grid11, sig2):
    rep = schwartz_check(Symbol(ex.ONE, sig2), grid11, k_max=1, deriv_max=1)
    assert not rep.pass_at(1)


def test_order_six_tail_slope(grid11):
    # derived oracle: the undifferentiated sup on shell r is exactly r^-6
    # once the cutoff saturates, so the fitted slope must be -6
    rep = schwartz_check(load_entry("phg-tail"), grid11, k_max=4, deriv_max=0)
    slope = rep.slopes["|0,0"]
    assert slope == pytest.approx(-6.0, abs=0.05)
    assert rep.passed


def test_too_few_shells_rejected(w11, sig2):
    g = EvaluationGrid(weights=w11, L=2)
    with pytest.raises(InvalidParameterError):
        schwartz_check(Symbol(ex.ONE, sig2), g, k_max=1)


# ---------------------------------------------------------------------------
# symbol estimates


def test_quadratic_symbol_orders(grid11, w11):
    a = load_entry("quadratic-symbol")
    assert symbol_estimate(a, 2.0, w11, grid11).passed
    assert not symbol_estimate(a, 1.0, w11, grid11).passed


def test_schwartz_passes_every_nonnegative_order(grid11, w11):
    g = load_entry("gaussian")
    for m in (0.0, 1.0, 3.0):
        assert symbol_estimate(g, m, w11, grid11).passed


def test_model_field_symbol_first_order():
    # eta_j in the sigma coordinates: weight-1 slot, so order 1 exactly
    from phgkit.config import RunConfig
    from phgkit.corpus import standard_grid
    entry = load_entry("sigma_j")
    w = Weights((2, 1, 1))
    grid = standard_grid((2, 1, 1), RunConfig())
    assert symbol_estimate(entry, 1.0, w, grid).passed
    assert not symbol_estimate(entry, 0.0, w, grid).passed


# ---------------------------------------------------------------------------
# homogeneity


def test_quasi_norm_square_on_the_nose(grid11, w11, sig2):
    u = Symbol(quasi_norm_power(w11, 2.0), sig2)
    assert homogeneous_check(u, 2.0, w11, grid11).max_violation == 0.0


def test_weighted_linear_slot(w21):
    g = EvaluationGrid(weights=Weights((1, 2)))
    sig = ex.Signature(0, 2, False)
    rep = homogeneous_check(Symbol(sig.xi(1), sig), 2.0, Weights((1, 2)), g)
    assert rep.max_violation <= 1e-14


def test_constant_offset_breaks_homogeneity(grid11, w11, sig2):
    u = Symbol(ex.add(ex.ONE, quasi_norm_power(w11, 2.0)), sig2)
    rep = homogeneous_check(u, 2.0, w11, grid11)
    # the defect is the constant 1 - s^2; on the unit shell the relative
    # violation is |1 - s^2| / (s^2 * sup|u|), nonzero for every s != 1
    assert rep.max_violation > 1e-3


# ---------------------------------------------------------------------------
# homogeneous modulo Schwartz


def test_worked_extension_is_hs(grid11_ext, w11):
    u = load_entry("worked-extension")
    assert hs_check(u, 2.0, w11.extended(), grid11_ext).passed


def test_constant_offset_is_not_hs(grid11, w11, sig2):
    u = Symbol(ex.add(ex.ONE, quasi_norm_power(w11, 2.0)), sig2)
    assert not hs_check(u, 2.0, w11, grid11).passed


def test_schwartz_is_trivially_hs(grid11, w11):
    g = load_entry("gaussian")
    assert hs_check(g, 1.5, w11, grid11).passed


def test_lemma42_cutoff_times_homogeneous(grid11, w11):
    # chi f with f homogeneous on the nose is homogeneous modulo Schwartz,
    # and the cutoff also makes it a symbol of the same order
    a = load_entry("lemma42")
    assert hs_check(a, 1.0, w11, grid11).passed
    assert symbol_estimate(a, 1.0, w11, grid11).passed


def test_lemma42_defect_compactly_supported(grid11, w11):
    a = load_entry("lemma42")
    defect = a.defect(w11, 2.0, 1.0)
    pts, shells = grid11.points(a.sig)
    vals = np.abs(defect(pts))
    # phi(2 xi) and phi(xi) agree outside 1/4 < |xi| < 1, so the defect
    # vanishes identically on every shell of the standard grid ...
    assert np.all(vals == 0.0)
    # ... and lives strictly inside the unit quasi-ball
    inner = np.array([[0.25, 0.25], [0.3, 0.0], [0.0, 0.6]])
    assert np.max(np.abs(defect(inner))) > 0.0


def test_subgroup_property_scale_four(grid11, w11):
    """Passing scales in [1, 2] forces the composed scale 4 to pass too."""
    a = load_entry("lemma42")
    assert hs_check(a, 1.0, w11, grid11, s_samples=(1.25, 1.5, 2.0)).passed
    defect4 = a.defect(w11, 4.0, 1.0)
    rep = schwartz_check(defect4, grid11, k_max=4, deriv_max=2,
                         reference=a.dilate_xi(w11, 4.0))
    assert rep.passed


def test_hs_check_rejects_scales_outside_band(grid11, w11):
    with pytest.raises(InvalidParameterError):
        hs_check(load_entry("gaussian"), 0.0, w11, grid11, s_samples=(3.0,))


def test_derivative_drops_order(grid11, w11, sig2):
    """Homogeneous of order m implies the xi-derivative is homogeneous of
    order m minus the weighted index order."""
    f = Symbol(quasi_norm_power(w11, 2.0), sig2)
    base = homogeneous_check(f, 2.0, w11, grid11)
    assert base.max_violation <= 1e-8
    for beta in ((1, 0), (0, 1), (1, 1)):
        df = f.diff(MultiIndex(xi=beta))
        order = 2.0 - sum(r * b for r, b in zip(w11.rho, beta))
        rep = homogeneous_check(df, order, w11, grid11)
        assert rep.max_violation <= 1e-6


def test_cutoff_homogeneous_is_symbol_evidence(grid11, w11, sig2):
    # the cutoff of an order-m homogeneous function gives both kinds of
    # evidence at order m
    f = ex.mul(CutoffFamily.restriction_profile(w11).phi(), quasi_norm_expr(w11))
    s = Symbol(f, sig2)
    assert symbol_estimate(s, 1.0, w11, grid11).passed
    assert hs_check(s, 1.0, w11, grid11).passed


# ---------------------------------------------------------------------------
# scaling-limit decomposition


def test_scaling_limit_recovers_homogeneous_part(grid11, w11, sig2):
    fam = CutoffFamily.restriction_profile(w11)
    u = Symbol(ex.add(ex.mul(fam.phi(), quasi_norm_expr(w11)),
                      ex.exp_(ex.neg(even_power_polynomial(w11)))), sig2)
    hom, resid = decompose_hs(u, 1.0, w11, K_radius=1.0, grid=grid11)
    pts, shells = grid11.points(sig2)
    qn = grid11.qnorm(pts)
    assert np.max(np.abs(hom(pts) - qn) / qn) <= 1e-6


def test_decompose_on_the_nose_gives_compact_residual(grid11, w11, sig2):
    u = Symbol(quasi_norm_power(w11, 2.0), sig2)
    hom, resid = decompose_hs(u, 2.0, w11, K_radius=1.0, grid=grid11)
    pts, shells = grid11.points(sig2)
    assert np.max(np.abs(hom(pts) - u(pts)) / np.abs(u(pts))) <= 1e-12
    vals = np.abs(resid(pts))
    assert np.all(vals[shells >= 2] <= 1e-12 * grid11.shell_radii[shells[shells >= 2]] ** 2)


def test_decompose_schwartz_gives_zero(grid11, w11):
    g = load_entry("gaussian")
    hom, _ = decompose_hs(g, 0.0, w11, K_radius=1.0, grid=grid11)
    pts, _ = grid11.points(g.sig)
    assert np.max(np.abs(hom(pts))) <= 1e-200


def test_decompose_rejects_non_homogeneous(grid11, w11, sig2):
    u = Symbol(ex.pow_i(sig2.xi(0), 2), sig2)
    with pytest.raises(NonHomogeneousError):
        decompose_hs(u, 1.0, w11, K_radius=1.0, grid=grid11)
