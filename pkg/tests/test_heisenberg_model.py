import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from phgkit.grading import InvalidParameterError
from phgkit.heisenberg.model import (HeisenbergModel, heis_dilate,
                                     standard_block_matrix)
from phgkit.symbols import expr as ex
from phgkit.symbols.engine import Symbol

M2 = HeisenbergModel(d=2, B=((0.0, -1.0), (1.0, 0.0)))
coord = st.floats(min_value=-10, max_value=10, allow_nan=False)
triple = st.tuples(coord, coord, coord)


def test_antisymmetry_enforced():
    with pytest.raises(InvalidParameterError):
        HeisenbergModel(d=2, B=((0.0, 1.0), (1.0, 0.0)))


def test_group_mul_left_invariant_orientation():
    # the bilinear pairing that keeps the model fields left-invariant:
    # (x.y)_0 = x_0 + y_0 + (1/2) <Bx, y>.  For b_21 = 1 = -b_12 this gives
    # +1/2 on (0,1,0).(0,0,1); the flipped pairing (which the left-invariance
    # test rejects) would give -1/2.
    out = M2.group_mul(np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0]))
    assert np.allclose(out, [0.5, 1.0, 1.0])


@given(x=triple)
@settings(max_examples=50, deadline=None)
def test_identity_and_inverse(x):
    x = np.array(x)
    assert np.array_equal(M2.group_mul(x, np.zeros(3)), x)
    assert np.allclose(M2.group_mul(x, M2.group_inverse(x)), 0.0, atol=1e-12)


@given(x=triple, y=triple, z=triple)
@settings(max_examples=100, deadline=None)
def test_associativity(x, y, z):
    x, y, z = map(np.array, (x, y, z))
    lhs = M2.group_mul(M2.group_mul(x, y), z)
    rhs = M2.group_mul(x, M2.group_mul(y, z))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(lhs)))


@given(x=triple, y=triple, s=st.floats(min_value=0.1, max_value=10))
@settings(max_examples=100, deadline=None)
def test_dilations_are_automorphisms(x, y, s):
    x, y = np.array(x), np.array(y)
    lhs = heis_dilate(s, M2.group_mul(x, y))
    rhs = M2.group_mul(heis_dilate(s, x), heis_dilate(s, y))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(lhs)))


def test_heis_dilate_values():
    assert np.allclose(heis_dilate(2.0, np.array([1.0, 1.0, 1.0])), [4.0, 2.0, 2.0])
    v = np.array([0.3, -1.0, 2.0])
    assert np.array_equal(heis_dilate(1.0, v), v)


def _f3():
    sig = ex.Signature(3, 0, False)
    return Symbol(ex.mul(sig.x(0), ex.exp_(ex.neg(
        ex.add(*[ex.pow_i(sig.x(i), 2) for i in range(3)])))), sig)


def test_field_zero_on_x0():
    sig = ex.Signature(3, 0, False)
    f = Symbol(sig.x(0), sig)
    assert M2.field_apply(0, f, np.array([0.3, 1.0, -2.0]))[0] == 1.0


def test_field_on_x0_reads_off_bilinear():
    sig = ex.Signature(3, 0, False)
    f = Symbol(sig.x(0), sig)
    x = np.array([0.0, 2.0, 5.0])
    bx = M2.Bmat @ x[1:]
    for j in (1, 2):
        assert M2.field_apply(j, f, x)[0] == pytest.approx(0.5 * bx[j - 1])


def test_commutator_is_center_field():
    sig = ex.Signature(3, 0, False)
    f = Symbol(sig.x(0), sig)
    x12 = M2.field_expr(1, M2.field_expr(2, f))
    x21 = M2.field_expr(2, M2.field_expr(1, f))
    assert ex.sub(x12.expr, x21.expr) is ex.ONE   # equals X_0 x_0 = 1


def test_left_invariance_of_fields():
    f = _f3()
    sig = f.sig
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(20):
        y, x = rng.normal(size=3), rng.normal(size=3)
        fy = Symbol(ex.substitute(f.expr, M2.left_translation_map(y, sig)), sig)
        for j in range(3):
            lhs = M2.field_apply(j, fy, x)[0]
            rhs = M2.field_apply(j, f, M2.group_mul(y, x))[0]
            worst = max(worst, abs(lhs - rhs))
    assert worst <= 1e-6


# ---------------------------------------------------------------------------
# exponential chart


def test_chart_at_origin_fiber():
    y = np.array([1.0, 2.0, 3.0])
    assert np.array_equal(M2.exp_chart(y, np.zeros(3), 1.0), y)


def test_chart_worked_value():
    Mm = HeisenbergModel(d=2, B=((0.0, -1.0), (1.0, 0.0)))
    yp = Mm.exp_chart(np.array([0.0, 0.0, 2.0]), np.array([1.0, 1.0, 0.0]), 1.0)
    assert np.allclose(yp, [0.0, -1.0, 2.0])


def test_chart_matches_integrated_flow():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(10):
        y, v = rng.normal(size=3), rng.normal(size=3)
        t = float(rng.uniform(0.3, 1.4))
        w = np.array([-v[0] * t * t, -v[1] * t, -v[2] * t])
        sol = solve_ivp(M2.flow_velocity(w), (0.0, 1.0), y, rtol=1e-12, atol=1e-12)
        worst = max(worst, float(np.max(np.abs(sol.y[:, -1] - M2.exp_chart(y, v, t)))))
    assert worst <= 1e-8


def test_phi_matrix_determinant_and_inverse():
    rng = np.random.default_rng(5)
    for d in (2, 4):
        M = HeisenbergModel(d=d, B=tuple(map(tuple, standard_block_matrix(d // 2))))
        for _ in range(10):
            y = rng.normal(size=d + 1)
            mat = M.phi_matrix(y)
            assert np.linalg.det(mat) == pytest.approx((-1.0) ** (d + 1))
            v = rng.normal(size=d + 1)
            assert np.allclose(np.linalg.solve(mat, M.phi_y(y, v)), v, atol=1e-12)


def test_phi_slot_reads_negative():
    y = np.array([0.3, 1.0, -2.0])
    v = np.zeros(3)
    v[1] = 4.0
    assert M2.phi_y(y, v)[1] == -4.0


def test_chart_inverse_round_trip():
    rng = np.random.default_rng(6)
    for _ in range(10):
        y, v = rng.normal(size=3), rng.normal(size=3)
        t = float(rng.uniform(0.2, 2.0))
        yp = M2.exp_chart(y, v, t)
        assert np.allclose(M2.exp_chart_inverse(y, yp, t), v, atol=1e-10)


# ---------------------------------------------------------------------------
# symbol changes


def test_sigma_identity_without_center_frequency():
    x = np.array([0.5, 1.0, 2.0])
    eta = np.array([0.0, 3.0, -4.0])
    assert np.array_equal(M2.sigma(x, eta), eta)
    assert np.array_equal(M2.sigma_tilde(x, eta), eta)


def test_sigma_worked_value():
    Mm = HeisenbergModel(d=2, B=((0.0, -1.0), (1.0, 0.0)))
    x = np.array([0.0, 0.0, 2.0])
    eta = np.array([1.0, 3.0, 0.0])
    assert Mm.sigma(x, eta)[1] == pytest.approx(2.0)


def test_sigma_round_trip():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(100, 3))
    eta = rng.normal(size=(100, 3))
    assert np.max(np.abs(M2.sigma(x, M2.sigma_tilde(x, eta)) - eta)) <= 1e-14


def test_transpose_identity_worked_value():
    Mm = HeisenbergModel(d=2, B=((0.0, -1.0), (1.0, 0.0)))
    y = np.array([0.0, 0.0, 2.0])
    eta = np.array([1.0, 0.0, 0.0])
    lhs = np.linalg.solve(Mm.phi_matrix(y).T, eta)
    rhs = Mm.sigma_tilde(y, -eta)
    assert np.allclose(lhs, [-1.0, -1.0, 0.0])
    assert np.allclose(rhs, [-1.0, -1.0, 0.0])


def test_transpose_identity_edge_cases():
    assert M2.prop_transpose_residual(np.array([1.0, 2.0, 3.0]), np.zeros(3)) == 0.0
    y0 = np.zeros(3)
    eta = np.array([0.5, -1.0, 2.0])
    assert np.allclose(np.linalg.solve(M2.phi_matrix(y0).T, eta), -eta)


def test_transpose_identity_random():
    rng = np.random.default_rng(8)
    worst = max(M2.prop_transpose_residual(rng.normal(size=3), rng.normal(size=3))
                for _ in range(100))
    assert worst <= 1e-12


# ---------------------------------------------------------------------------
# zoom actions


def test_zoom_scale_one_is_identity():
    x, v, t = np.zeros(3), np.array([1.0, 2.0, 3.0]), 0.7
    _, v2, t2 = HeisenbergModel.zoom_alpha_tilde(1.0, x, v, t)
    assert np.array_equal(v2, v) and t2 == t


def test_zoom_action_law():
    rng = np.random.default_rng(10)
    v = rng.normal(size=3)
    for s, sp in ((1.5, 2.0), (0.4, 3.1)):
        _, v1, t1 = HeisenbergModel.zoom_alpha_tilde(s, None, v, 0.9)
        _, v12, t12 = HeisenbergModel.zoom_alpha_tilde(sp, None, v1, t1)
        _, vd, td = HeisenbergModel.zoom_alpha_tilde(s * sp, None, v, 0.9)
        assert np.max(np.abs(v12 - vd)) <= 1e-14 * max(1, np.max(np.abs(vd)))
        assert t12 == pytest.approx(td, rel=1e-14)


def test_beta_fixes_zero_time_slice():
    v = np.array([1.0, 2.0, 3.0])
    _, v2, t2 = HeisenbergModel.zoom_beta(2.0, None, v, 0.0)
    assert t2 == 0.0 and np.array_equal(v2, heis_dilate(2.0, v))


def test_zoom_via_chart_closed_form():
    rng = np.random.default_rng(11)
    for _ in range(20):
        y, v = rng.normal(size=3), rng.normal(size=3)
        t = float(rng.uniform(0.2, 1.5))
        s = float(rng.uniform(0.5, 2.0))
        _, v_chart, t_chart = M2.zoom_alpha_via_chart(y, v, t, s)
        assert np.allclose(v_chart, heis_dilate(s, v), atol=1e-12)
        assert t_chart == pytest.approx(t / s)


def test_model_config_round_trip():
    text = json.dumps(M2.to_config())
    M = HeisenbergModel.from_config(text)
    assert M == M2
    assert json.loads(text) == {"d": 2, "B": [[0.0, -1.0], [1.0, 0.0]]}
