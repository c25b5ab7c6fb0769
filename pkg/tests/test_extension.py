import numpy as np
import pytest

from phgkit.corpus import load_entry, load_expansion, standard_grid
from phgkit.config import RunConfig
from phgkit.grading import InvalidParameterError
from phgkit.symbols import expr as ex
from phgkit.symbols.checks import Certificate, hs_check
from phgkit.symbols.engine import Symbol
from phgkit.phg.expansion import Expansion, ExpansionTerm
from phgkit.phg.extension import (ExpansionMismatchError, TermNotSymbolError,
                                  build_extension, correct_restriction,
                                  epsilon_schedule)
from phgkit.phg.roundtrip import roundtrip_expansion, verify_theorem2


CFG = RunConfig()


def term(e, order, sig):
    return ExpansionTerm(Symbol(e, sig), order,
                         Certificate("homogeneous", order, True))


# ---------------------------------------------------------------------------
# the epsilon schedule


def test_single_constant_term_hits_cap(w11, grid11, sig2):
    expn = Expansion(m=0.0, terms=[term(ex.ONE, 0.0, sig2)])
    sched = epsilon_schedule(expn, w11, grid11)
    # measured sup of the cropped constant is 1, so the 1/4 cap binds
    assert sched.epsilons == (0.25,)
    assert max(sched.records[0]["constants"].values()) == pytest.approx(1.0)


def test_zero_terms_give_cap_sequence(w11, grid11, sig2):
    expn = Expansion(m=0.0, terms=[term(ex.ZERO, -float(j), sig2) for j in range(4)])
    sched = epsilon_schedule(expn, w11, grid11)
    assert sched.epsilons == (0.25, 0.25, 0.0625, 0.015625)


def test_schedule_nonincreasing_and_invariants(w11, grid11):
    expn = load_expansion("expansion-order1")
    sched = epsilon_schedule(expn, w11, grid11)
    assert all(b <= a for a, b in zip(sched.epsilons, sched.epsilons[1:]))
    sched.check_invariants()


def test_schedule_records_provenance(w11, grid11):
    sched = epsilon_schedule(load_expansion("expansion-order0"), w11, grid11)
    assert "grid" in sched.provenance and "budget" in sched.provenance
    assert all("constants" in rec for rec in sched.records)


def test_non_symbol_term_rejected(w11, grid11, sig2):
    # declaring xi1^2 as an order-0 term makes the measured constant drift
    bad = Expansion(m=0.0, terms=[term(ex.pow_i(sig2.xi(0), 2), 0.0, sig2)])
    with pytest.raises(TermNotSymbolError):
        epsilon_schedule(bad, w11, grid11)


# ---------------------------------------------------------------------------
# building


def test_single_term_plateau_branch(w11, grid11, sig2):
    from phgkit.symbols.quasinorms import quasi_norm_power
    expn = Expansion(m=2.0, terms=[term(quasi_norm_power(w11, 2.0), 2.0, sig2)])
    sched = epsilon_schedule(expn, w11, grid11)
    built = build_extension(expn, 2.0, sched, w11)
    eps = sched.epsilons[0]
    phi = ex.step(quasi_norm_power(w11, 1.0), 0.5 / eps, 1.0 / eps)
    pts, _ = grid11.points(sig2)
    for t in (0.0, 0.25, 0.5, -0.3):
        witht = np.concatenate([pts, np.full((len(pts), 1), t)], axis=1)
        want = Symbol(ex.mul(phi, quasi_norm_power(w11, 2.0)), sig2)(pts)
        assert np.array_equal(built.b(witht), want), t


def test_restriction_minus_sum_compactly_supported(w11, grid11, sig2):
    expn = load_expansion("expansion-order1")
    sched = epsilon_schedule(expn, w11, grid11)
    built = build_extension(expn, 1.0, sched, w11)
    # all cutoffs saturate beyond 1/eps_min, so the gap vanishes there
    R = 2.0 / sched.epsilons[-1]
    far = np.array([[R, 0.0], [0.0, -R], [R, R], [-3.0 * R, 0.5 * R]])
    total = sum(t.symbol(far) for t in expn.terms)
    gap = built.b.restrict_t(1.0)(far) - total
    assert np.max(np.abs(gap)) == 0.0
    # and it is genuinely nonzero inside (the cutoffs remove mass near 0)
    pts, _ = grid11.points(sig2)
    inner_gap = built.b.restrict_t(1.0)(pts) - sum(t.symbol(pts) for t in expn.terms)
    assert np.max(np.abs(inner_gap)) > 0.0


def test_jmax_rule_matches_dense_evaluation(w11, grid11, sig2):
    expn = load_expansion("expansion-order1")
    sched = epsilon_schedule(expn, w11, grid11)
    built = build_extension(expn, 1.0, sched, w11)
    # truncation-rule oracle: count terms whose dense evaluation is nonzero
    for qn_val, t in ((2.0 ** 10, 1.0), (4.0, 0.2), (64.0, 1.0)):
        xi = np.array([[qn_val, 0.0, t]])
        alive = 0
        for j, tm in enumerate(expn.terms):
            eps = sched.epsilons[j]
            single = Expansion(m=1.0, terms=[ExpansionTerm(
                tm.symbol, tm.order, tm.certificate)])
            bj = build_extension(single, 1.0 - 0, sched_slice(sched, j), w11)
            if abs(bj.b(xi)[0]) > 0.0:
                alive += 1
        assert built.j_max(qn_val, t) >= alive
    assert built.j_max(2.0 ** 10, 1.0) == sum(
        1 for e in sched.epsilons if e * 2.0 ** 10 > 0.5)


def sched_slice(sched, j):
    from phgkit.phg.extension import EpsilonSchedule
    return EpsilonSchedule(epsilons=(sched.epsilons[j],),
                           records=(sched.records[j],),
                           provenance=sched.provenance)


def test_schedule_horizon_error(w11, grid11, sig2):
    expn = load_expansion("expansion-order0")
    sched = epsilon_schedule(Expansion(m=0.0, terms=expn.terms[:2]), w11, grid11)
    with pytest.raises(InvalidParameterError):
        build_extension(expn, 0.0, sched, w11)


def test_built_extension_is_hs(w21):
    cfg = CFG
    expn = load_expansion("expansion-aniso")
    grid = standard_grid((2, 1), cfg)
    gext = standard_grid((2, 1), cfg, extended=True)
    sched = epsilon_schedule(expn, w21, grid)
    built = build_extension(expn, 2.0, sched, w21)
    assert hs_check(built.b, 2.0, w21.extended(), gext,
                    s_samples=(1.25, 1.5, 2.0)).passed


# ---------------------------------------------------------------------------
# correction


def _built(w11, grid11):
    expn = load_expansion("expansion-order0")
    sched = epsilon_schedule(expn, w11, grid11)
    return build_extension(expn, 0.0, sched, w11)


def test_correct_restriction_self_is_identity(w11, grid11):
    built = _built(w11, grid11)
    a = built.b.restrict_t(1.0)
    u, l, rep = correct_restriction(built, a, grid11)
    assert l.expr is ex.ZERO
    assert u.expr is built.b.expr


def test_correct_restriction_exact_target(w11, grid11, sig2):
    built = _built(w11, grid11)
    bump = ex.exp_(ex.neg(ex.add(ex.pow_i(sig2.xi(0), 2), ex.pow_i(sig2.xi(1), 2))))
    a = Symbol(ex.add(built.b.restrict_t(1.0).expr, bump), sig2)
    u, l, rep = correct_restriction(built, a, grid11)
    pts, _ = grid11.points(sig2)
    assert np.max(np.abs(l(pts) - Symbol(bump, sig2)(pts))) <= 1e-10
    assert np.max(np.abs(u.restrict_t(1.0)(pts) - a(pts))) <= 1e-12
    gext = standard_grid((1, 1), CFG, extended=True)
    assert hs_check(u, 0.0, w11.extended(), gext).passed


def test_correct_restriction_mismatch_rejected(w11, grid11, sig2):
    built = _built(w11, grid11)
    a = Symbol(ex.add(built.b.restrict_t(1.0).expr, sig2.xi(0)), sig2)
    with pytest.raises(ExpansionMismatchError):
        correct_restriction(built, a, grid11)


# ---------------------------------------------------------------------------
# round trips


def test_empty_expansion_trivially_passes(w11, grid11, grid11_ext):
    rep = roundtrip_expansion(Expansion(m=0.0, terms=[]), w11, grid11, grid11_ext)
    assert rep["passed"] and rep["n_terms"] == 0


def test_verify_theorem2_dispatch(w11, grid11, grid11_ext):
    u = load_entry("worked-extension")
    rep = verify_theorem2(u, "extract", m=2.0, w=w11, grid=grid11,
                          grid_ext=grid11_ext, N=2)
    assert rep["passed"]
    rep2 = verify_theorem2(load_expansion("expansion-order0"), "extend",
                           m=0.0, w=w11, grid=grid11, grid_ext=grid11_ext)
    assert rep2["passed"]
    with pytest.raises(InvalidParameterError):
        verify_theorem2(u, "sideways", m=2.0, w=w11, grid=grid11,
                        grid_ext=grid11_ext)
