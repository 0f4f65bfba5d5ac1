import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linshadow.core import DomainError, Tri
from linshadow.operators import (DirectSum, FiniteMatrix, Shift, apply, apply_power, continuity_check_koethe,
                                 hyperbolic_splitting, identity_multiple, transform, transport_conjugacy,
                                 unweighted_shift, weight_product)
from linshadow.spaces import (CoordinateVector, KoetheMatrix, SequenceSpaceSpec, SumVector, canonical_norm_sequence,
                              seminorm_eval)
from linshadow.weights import WeightSpec, gm_limits

L2 = SequenceSpaceSpec.ell(2.0)
L2Z = SequenceSpaceSpec.ell(2.0, index_set="Z")
R1 = SequenceSpaceSpec.finite(1, real=True)
DOUBLE_HALF = WeightSpec.bilateral([2.0], [0.5])  # negative tail 2, positive tail 1/2


def e(space, n, c=1.0):
    return CoordinateVector.basis(space, n, c)


def test_unweighted_shift_kills_first_vector():
    assert apply(unweighted_shift(L2), e(L2, 1)).is_zero


def test_constant_weight_shift():
    assert apply(Shift(WeightSpec.constant(2.0), L2), e(L2, 3)) == e(L2, 2, 2.0)


def test_direct_sum_acts_componentwise():
    T = DirectSum((identity_multiple(2.0, R1), identity_multiple(0.5, R1)))
    x = SumVector((e(R1, 0), e(R1, 0)))
    y = apply(T, x)
    assert y.parts[0] == e(R1, 0, 2.0)
    assert y.parts[1] == e(R1, 0, 0.5)


def test_inverse_of_non_invertible_node_is_rejected():
    with pytest.raises(DomainError):
        transform(unweighted_shift(L2), "inverse")


@pytest.mark.parametrize("w,k,n,expected", [
    (WeightSpec.constant(2.0), 1, 4, 32.0),
    (WeightSpec(tail_pos=(3.0, 1 / 3)), 1, 1, 1.0),
    (DOUBLE_HALF, -3, 3, 16.0),
])
def test_weight_products(w, k, n, expected):
    mag, _ = weight_product(w, k, n)
    assert mag == pytest.approx(expected, rel=1e-12)


def test_weight_product_does_not_overflow():
    mag, _ = weight_product(WeightSpec.constant(2.0), 1, 5000)
    assert math.isinf(mag) or mag > 1e300
    logmag, _ = WeightSpec.constant(2.0).log_product(1, 5001)
    assert logmag == pytest.approx(5001 * math.log(2), rel=1e-12)


@pytest.mark.parametrize("w,value", [
    (WeightSpec.constant(0.5), 0.5),
    (WeightSpec.constant(2.0), 2.0),
    (WeightSpec(tail_pos=(2.0, 0.5)), 1.0),
])
def test_geometric_mean_limits(w, value):
    g = gm_limits(w)
    assert g.limsup_gm == pytest.approx(value, rel=1e-12)
    assert g.liminf_gm == pytest.approx(value, rel=1e-12)


def test_irregular_weight_is_undecided():
    g = gm_limits(WeightSpec(tail_pos=(2.0,), irregular=True))
    assert not g.decided


def test_transport_of_trivial_weight_is_identity():
    X = transport_conjugacy(WeightSpec.constant(1.0), L2)
    np.testing.assert_allclose(canonical_norm_sequence(X, 1, 1, 6).values, 1.0, rtol=1e-12)


def test_transport_of_constant_weight_two():
    X = transport_conjugacy(WeightSpec.constant(2.0), L2)
    np.testing.assert_allclose(canonical_norm_sequence(X, 1, 1, 8).values, 2.0 ** -np.arange(1, 9), rtol=1e-12)


def test_transport_of_bilateral_two_sided_weight():
    X = transport_conjugacy(DOUBLE_HALF, L2Z)
    for n in range(1, 8):
        assert seminorm_eval(e(X, -n), 1) == pytest.approx(2.0 ** n, rel=1e-12)
        assert seminorm_eval(e(X, n), 1) == pytest.approx(2.0 ** n, rel=1e-12)


def test_power_one_is_the_identity_of_the_algebra():
    S = Shift(WeightSpec.constant(2.0), L2)
    x = CoordinateVector.from_mapping(L2, {1: 1.0, 4: -2.0, 7: 0.5})
    assert apply(transform(S, "power", 1), x) == apply(S, x)


def test_rotation_multiplies_by_the_phase():
    assert apply(transform(unweighted_shift(L2), "rotate", 1j), e(L2, 2)) == e(L2, 1, 1j)


def test_rotation_requires_unimodular_scalar():
    with pytest.raises(DomainError):
        transform(unweighted_shift(L2), "rotate", 2.0)


def test_inverse_of_bilateral_shift_is_the_forward_shift():
    T = transform(unweighted_shift(L2Z), "inverse")
    assert apply(T, e(L2Z, 0)) == e(L2Z, 1)


def test_derivative_weight_is_continuous_on_entire_function_model():
    v = continuity_check_koethe(WeightSpec(tail_pos=(1.0,), power=1.0), KoetheMatrix("k_pow_j"))
    assert v.verdict is Tri.YES


def test_constant_weight_on_l2_is_continuous_with_sup_one():
    v = continuity_check_koethe(WeightSpec.constant(1.0), KoetheMatrix("constant"))
    assert v.verdict is Tri.YES
    assert all(wit[2] == pytest.approx(1.0) for wit in v.witnesses)


def test_irregular_weight_continuity_is_undecided():
    v = continuity_check_koethe(WeightSpec(prefix=(2.0, 4.0, 16.0, 256.0), irregular=True), KoetheMatrix("k_pow_j"))
    assert v.verdict is Tri.UNDECIDED


def test_hyperbolic_splitting_bounds_hold_on_samples():
    T = FiniteMatrix.of(np.array([[0.5, 1.0], [0.0, 2.0]]))
    sp = hyperbolic_splitting(T)
    assert sp.alpha >= 1 and sp.beta >= 1 and 0 < sp.t < 1
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = CoordinateVector.from_dense(T.space, rng.standard_normal(2), 0)
        y1, y2 = sp.split(x)
        for n in range(1, 15):
            assert seminorm_eval(apply_power(T, y1, n), 1) <= sp.beta * sp.t ** n * seminorm_eval(y1, 1) + 1e-12
            z = y2
            for _ in range(n):
                z = sp.apply_s(z)
            assert seminorm_eval(z, 1) <= sp.beta * sp.t ** n * seminorm_eval(y2, 1) + 1e-12


# -----------------------------------------------------------------------------
# properties
# -----------------------------------------------------------------------------
weights = st.builds(
    lambda pre, tail: WeightSpec(prefix=tuple(pre), tail_pos=tuple(tail)),
    st.lists(st.floats(0.1, 4.0), max_size=4), st.lists(st.floats(0.1, 4.0), min_size=1, max_size=3))

finite_support = st.dictionaries(st.integers(1, 12), st.integers(-9, 9).filter(bool), min_size=1, max_size=5)


@settings(max_examples=80, deadline=None)
@given(weights, st.integers(1, 10), st.integers(0, 10), st.integers(0, 10))
def test_weight_products_are_multiplicative(w, k, n, m):
    a, pa = weight_product(w, k, n)
    b, pb = weight_product(w, k + n + 1, m)
    c, pc = weight_product(w, k, n + m + 1)
    assert a * b == pytest.approx(c, rel=1e-10)
    assert cmath.exp(1j * (pa + pb)) == pytest.approx(cmath.exp(1j * pc), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(weights, finite_support, st.integers(1, 4))
def test_power_matches_repeated_application(w, d, n):
    S = Shift(w, L2)
    x = CoordinateVector.from_mapping(L2, d)
    y = x
    for _ in range(n):
        y = apply(S, y)
    z = apply(transform(S, "power", n), x)
    np.testing.assert_allclose(z.to_dense(1, 12), y.to_dense(1, 12), rtol=1e-13, atol=0)


@settings(max_examples=60, deadline=None)
@given(weights, st.floats(0, 2 * math.pi))
def test_rotated_weight_keeps_geometric_means(w, theta):
    lam = cmath.exp(1j * theta)
    g, h = gm_limits(w), gm_limits(w.scaled(lam))
    assert h.limsup_gm == pytest.approx(g.limsup_gm, rel=1e-12)
    assert h.liminf_gm == pytest.approx(g.liminf_gm, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(weights, st.integers(1, 30))
def test_transport_scales_canonical_vectors_by_the_conjugacy_weight(w, n):
    X = transport_conjugacy(w, L2)
    mag, _ = weight_product(w, 1, n - 1)
    assert seminorm_eval(e(X, n), 1) == pytest.approx(1.0 / mag, rel=1e-10)
