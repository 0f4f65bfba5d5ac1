import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linshadow.core import DomainError
from linshadow.spaces import (CoordinateVector, SequenceSpaceSpec, canonical_norm_sequence, frechet_distance,
                              metric_from_seminorms, seminorm_eval)

KJ = SequenceSpaceSpec.koethe_space("k_pow_j")
LOG = SequenceSpaceSpec.koethe_space("log_pow_k")
L2 = SequenceSpaceSpec.ell(2.0)


def test_zero_vector_has_zero_seminorms():
    z = CoordinateVector.zero(KJ)
    assert all(seminorm_eval(z, k) == 0 for k in (1, 5, 20))


def test_canonical_vector_in_exponential_koethe_space():
    assert seminorm_eval(CoordinateVector.basis(KJ, 3), 2) == pytest.approx(8.0, rel=1e-12)


def test_dirichlet_convention_weights_the_square():
    # ||a||^2 = sum |a_n|^2 v_n with v = (1, 1, 2, 3, ...), so ||e_5|| = sqrt(5)
    D = SequenceSpaceSpec.weighted("dirichlet")
    assert seminorm_eval(CoordinateVector.basis(D, 5), 1) == pytest.approx(math.sqrt(5), rel=1e-12)


def test_index_outside_the_index_set_is_rejected():
    with pytest.raises(DomainError):
        CoordinateVector.basis(L2, -2)


def test_banach_distance_is_exact():
    d = frechet_distance(CoordinateVector.basis(L2, 1), CoordinateVector.zero(L2))
    assert d.lo == d.hi == 1.0


def test_distance_of_zero_to_itself_carries_the_tail():
    z = CoordinateVector.zero(KJ)
    d = frechet_distance(z, z)
    assert d.lo == 0.0
    assert d.hi == 2.0 ** -KJ.k_max


def test_constant_seminorms_give_geometric_lower_bound():
    X = SequenceSpaceSpec.koethe_space("constant")
    x = CoordinateVector.basis(X, 4, 0.5)
    d = frechet_distance(x, CoordinateVector.zero(X))
    assert d.lo == pytest.approx(0.5 * (1 - 2.0 ** -X.k_max), rel=1e-14)
    iv = metric_from_seminorms(np.full(20, 0.5), banach=False, k_max=20)
    assert iv.lo == pytest.approx(0.5 * (1 - 2.0 ** -20), rel=1e-14)


def test_mismatched_spaces_are_rejected():
    with pytest.raises(DomainError):
        frechet_distance(CoordinateVector.basis(L2, 1), CoordinateVector.basis(KJ, 1))


@pytest.mark.parametrize("space,k,lo,hi,expected,tag", [
    (L2, 3, 1, 5, [1, 1, 1, 1, 1], "constant"),
    (KJ, 2, 1, 4, [2, 4, 8, 16], "geometric ratio 2"),
    (LOG, 2, 1, 3, [math.log(2) ** 2, math.log(3) ** 2, math.log(4) ** 2], "logarithmic power 2"),
])
def test_canonical_norm_sequences(space, k, lo, hi, expected, tag):
    seq = canonical_norm_sequence(space, k, lo, hi)
    np.testing.assert_allclose(seq.values, expected, rtol=1e-12)
    assert seq.tag == tag


# -----------------------------------------------------------------------------
# properties
# -----------------------------------------------------------------------------
SPACES = [KJ, LOG, SequenceSpaceSpec.koethe_space("j_pow_k"), SequenceSpaceSpec.koethe_space("k_pow_j", p=1.0),
          SequenceSpaceSpec.koethe_space("k_pow_j", p=None)]

coords = st.dictionaries(st.integers(1, 15), st.floats(-10, 10, allow_nan=False).filter(lambda v: abs(v) > 1e-6),
                         min_size=1, max_size=6)


def vec(space, d):
    return CoordinateVector.from_mapping(space, d)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SPACES), coords, st.integers(1, 19))
def test_seminorms_are_nondecreasing_in_k(space, d, k):
    x = vec(space, d)
    assert seminorm_eval(x, k) <= seminorm_eval(x, k + 1) * (1 + 1e-12)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SPACES), coords, coords, st.integers(1, 20))
def test_triangle_inequality(space, a, b, k):
    x, y = vec(space, a), vec(space, b)
    assert seminorm_eval(x + y, k) <= (seminorm_eval(x, k) + seminorm_eval(y, k)) * (1 + 1e-12) + 1e-300


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SPACES), coords, st.floats(-5, 5, allow_nan=False), st.integers(1, 20))
def test_absolute_homogeneity(space, d, c, k):
    x = vec(space, d)
    assert seminorm_eval(x * c, k) == pytest.approx(abs(c) * seminorm_eval(x, k), rel=1e-12, abs=1e-300)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SPACES), coords, coords, coords)
def test_distance_is_translation_invariant(space, a, b, c):
    x, y, z = vec(space, a), vec(space, b), vec(space, c)
    d1, d2 = frechet_distance(x + z, y + z), frechet_distance(x, y)
    assert d1.lo == pytest.approx(d2.lo, rel=1e-9, abs=1e-12)
    assert d1.hi == pytest.approx(d2.hi, rel=1e-9, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SPACES), coords, coords)
def test_distance_lower_bound_is_at_most_one(space, a, b):
    d = frechet_distance(vec(space, a), vec(space, b))
    assert 0 <= d.lo <= 1
    assert d.lo <= d.hi
