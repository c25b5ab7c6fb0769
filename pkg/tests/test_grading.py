import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phgkit.grading import (ExtendedWeights, InvalidParameterError, QuasiNorm,
                            Weights, dilate, dilate_ext, measure_norm_constants,
                            quasi_norm)

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
scales = st.floats(min_value=0.1, max_value=10.0, allow_nan=False)


def test_dilate_power_evaluation():
    w = Weights((2, 1))
    assert np.allclose(dilate(w, 2.0, np.array([1.0, 1.0])), [4.0, 2.0])


def test_dilate_identity():
    w = Weights((3, 1, 2))
    v = np.array([1.5, -2.0, 0.25])
    assert np.array_equal(dilate(w, 1.0, v), v)


def test_dilate_composition_is_product_scale():
    w = Weights((2, 1))
    v = np.array([1.0, 1.0])
    out = dilate(w, 2.0, dilate(w, 3.0, v))
    assert np.allclose(out, dilate(w, 6.0, v))
    assert np.allclose(out, [36.0, 6.0])


@given(s=scales, sp=scales,
       v=st.tuples(finite, finite, finite))
@settings(max_examples=150, deadline=None)
def test_dilation_group_law(s, sp, v):
    w = Weights((2, 1, 3))
    v = np.array(v)
    lhs = dilate(w, s, dilate(w, sp, v))
    rhs = dilate(w, s * sp, v)
    assert np.all(np.abs(lhs - rhs) <= 1e-12 * np.maximum(np.abs(rhs), 1e-30))


def test_dilate_rejects_nonpositive_scale():
    with pytest.raises(InvalidParameterError):
        dilate(Weights((1,)), 0.0, np.array([1.0]))
    with pytest.raises(InvalidParameterError):
        dilate_ext(ExtendedWeights(Weights((1,))), -2.0, np.array([1.0]), 1.0)


def test_dilate_ext_examples():
    assert np.allclose(dilate_ext(ExtendedWeights(Weights((1,))), 2.0,
                                  np.array([3.0]), 1.0), [6.0, 2.0])
    w = ExtendedWeights(Weights((2, 1)))
    assert np.allclose(dilate_ext(w, 2.0, np.array([1.0, 1.0]), 1.0), [4.0, 2.0, 2.0])
    v = np.array([0.3, -0.7])
    assert np.allclose(dilate_ext(w, 1.0, v, 0.5), [0.3, -0.7, 0.5])


def test_quasi_norm_sum_variant_value():
    q = QuasiNorm(Weights((2, 1)), "sum")
    assert quasi_norm(q, np.array([4.0, 3.0])) == pytest.approx(5.0)


def test_quasi_norm_zero_iff_zero():
    for variant in ("sum", "smooth"):
        q = QuasiNorm(Weights((2, 1)), variant)
        assert quasi_norm(q, np.zeros(2)) == 0.0
        assert quasi_norm(q, np.array([1e-9, 0.0])) > 0.0


def test_quasi_norm_homogeneity_worked_value():
    q = QuasiNorm(Weights((2, 1)), "sum")
    v = np.array([1.0, 1.0])
    assert quasi_norm(q, dilate(q.weights, 3.0, v)) == pytest.approx(6.0)
    assert quasi_norm(q, v) == pytest.approx(2.0)


@given(s=scales, v=st.tuples(finite, finite))
@settings(max_examples=150, deadline=None)
def test_quasi_norm_axioms_on_samples(s, v):
    v = np.array(v)
    for variant in ("sum", "smooth"):
        q = QuasiNorm(Weights((2, 1)), variant)
        nv = quasi_norm(q, v)
        assert quasi_norm(q, -v) == nv                       # symmetry
        scaled = quasi_norm(q, dilate(q.weights, s, v))
        assert abs(scaled - s * nv) <= 1e-12 * max(s * nv, 1e-30)   # homogeneity
        assert nv >= 0.0


def test_variants_equivalent_on_unit_shell():
    w = Weights((2, 1))
    qs = QuasiNorm(w, "sum")
    qsm = QuasiNorm(w, "smooth")
    rng = np.random.default_rng(0)
    v = rng.normal(size=(200, 2))
    ratios = qs(v) / qsm(v)
    assert 0.5 < ratios.min() and ratios.max() < 4.0


def test_norm_constants_trivial_weights():
    q = QuasiNorm(Weights((1, 1, 1)), "sum")
    rng = np.random.default_rng(1)
    rep = measure_norm_constants(q, rng.normal(size=(100, 3)))
    # the l1/l2 comparison: exponents are 1 and constants within [1, sqrt(3)]
    assert rep.a == rep.b == 1.0
    assert 1.0 - 1e-12 <= rep.C1 <= rep.C2 <= math.sqrt(3) + 1e-12
    # sandwich holds on every sampled point by construction; spot check
    pts = rng.normal(size=(50, 3))
    vals = q(pts)
    eu = np.linalg.norm(pts, axis=1)
    rep2 = measure_norm_constants(q, pts)
    assert np.all(rep2.C1 * eu ** rep2.a <= vals * (1 + 1e-12))
    assert np.all(vals <= rep2.C2 * eu ** rep2.b * (1 + 1e-12))


def test_norm_constants_single_point_sandwich():
    q = QuasiNorm(Weights((2, 1)), "smooth")
    v = np.array([[0.6, 0.8]])     # on the Euclidean unit sphere
    rep = measure_norm_constants(q, v)
    assert rep.C1 == pytest.approx(rep.C2)
    assert rep.C1 == pytest.approx(float(q(v[0])))


def test_triangle_constant_one_for_genuine_norm():
    q = QuasiNorm(Weights((1,)), "sum")
    rng = np.random.default_rng(2)
    rep = measure_norm_constants(q, rng.normal(size=(40, 1)))
    assert rep.triangle_constant == pytest.approx(1.0, abs=1e-12)


def test_norm_constants_rejects_empty_and_zero():
    q = QuasiNorm(Weights((1, 1)), "sum")
    with pytest.raises(InvalidParameterError):
        measure_norm_constants(q, np.zeros((0, 2)))
    with pytest.raises(InvalidParameterError):
        measure_norm_constants(q, np.zeros((3, 2)))


def test_weights_config_round_trip():
    w = Weights((2, 1))
    frag = json.dumps(w.to_config("smooth"))
    w2, variant = Weights.from_config(frag)
    assert w2 == w and variant == "smooth"
    assert json.loads(frag) == {"rho": [2, 1], "variant": "smooth"}


def test_weights_validation():
    with pytest.raises(InvalidParameterError):
        Weights(())
    with pytest.raises(InvalidParameterError):
        Weights((0, 1))
    with pytest.raises(InvalidParameterError):
        Weights((1.5, 1))
