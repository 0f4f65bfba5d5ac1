import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linshadow.chain import verify_chain
from linshadow.chaos import (Ball, block_recipe_vector, chain_to_density, check_condition_I, check_condition_II,
                             detect_distributionally_irregular, loop_through_zero, orbit_log_seminorms, return_set,
                             upper_density)
from linshadow.core import DomainError
from linshadow.operators import Shift, apply, identity_multiple, unweighted_shift
from linshadow.shadowing import solver_for
from linshadow.spaces import CoordinateVector, SequenceSpaceSpec, seminorm_eval
from linshadow.weights import WeightSpec

L2 = SequenceSpaceSpec.ell(2.0)
R1 = SequenceSpaceSpec.finite(1, real=True)
TWO_B = Shift(WeightSpec.constant(2.0), L2)


def r1(a):
    return CoordinateVector.from_dense(R1, np.array([a], dtype=float), 0)


# -----------------------------------------------------------------------------
# densities
# -----------------------------------------------------------------------------
def test_even_numbers_have_density_one_half():
    est = upper_density(range(2, 1001, 2), 1000)
    assert est.running_max == pytest.approx(0.5)


def test_density_accepts_predicates_and_masks():
    a = upper_density(lambda n: n % 3 == 0, 300)
    b = upper_density(np.arange(1, 301) % 3 == 0, 300)
    assert a.running_max == b.running_max == pytest.approx(1 / 3)


def test_early_members_dominate_the_running_max():
    est = upper_density({1}, 50)
    assert est.running_max == 1.0 and est.argmax == 1


def test_checkpoints_restrict_the_maximum():
    est = upper_density({1}, 50, checkpoints=[10, 50])
    assert est.running_max == pytest.approx(0.1)
    with pytest.raises(DomainError):
        upper_density({1}, 50, checkpoints=[60])


sets = st.sets(st.integers(1, 200), max_size=120)


@settings(max_examples=80, deadline=None)
@given(sets, sets)
def test_upper_density_is_subadditive(a, b):
    h = 200
    assert upper_density(a | b, h).running_max <= upper_density(a, h).running_max + \
        upper_density(b, h).running_max + 1e-12


@settings(max_examples=80, deadline=None)
@given(sets, sets)
def test_upper_density_is_monotone_and_bounded(a, b):
    h = 200
    d = upper_density(a | b, h).running_max
    assert 0 <= upper_density(a, h).running_max <= d <= 1


# -----------------------------------------------------------------------------
# orbit scans and irregularity
# -----------------------------------------------------------------------------
def test_log_scan_of_weighted_shift_matches_closed_form():
    scan = orbit_log_seminorms(TWO_B, CoordinateVector.basis(L2, 5), 8)
    expected = [n * math.log(2) for n in range(5)] + [-math.inf] * 4
    np.testing.assert_allclose(scan.log_seminorms[:, 0], expected)


def test_log_scan_reaches_long_horizons_without_overflow():
    x = CoordinateVector.basis(L2, 3000, 1e-300)
    scan = orbit_log_seminorms(TWO_B, x, 2000)
    assert scan.log_seminorms[2000, 0] == pytest.approx(math.log(1e-300) + 2000 * math.log(2), rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.dictionaries(st.integers(1, 30), st.floats(-3, 3).filter(lambda v: abs(v) > 1e-3), min_size=1,
                       max_size=5))
def test_log_scan_agrees_with_direct_iteration(d):
    x = CoordinateVector.from_mapping(L2, d)
    scan = orbit_log_seminorms(TWO_B, x, 12)
    cur = x
    for n in range(13):
        direct = seminorm_eval(cur, 1)
        got = scan.log_seminorms[n, 0]
        if direct == 0:
            assert got == -math.inf
        else:
            assert got == pytest.approx(math.log(direct), abs=1e-10)
        cur = apply(TWO_B, cur)


@settings(max_examples=25, deadline=None)
@given(st.dictionaries(st.integers(1, 400), st.floats(-5, 5).filter(lambda v: abs(v) > 1e-6), min_size=1,
                       max_size=6))
def test_irregular_sets_are_disjoint(d):
    rep = detect_distributionally_irregular(TWO_B, CoordinateVector.from_mapping(L2, d), 500)
    assert not np.any(rep.I_density.indicator & rep.J_density.indicator)


def test_block_recipe_vector_is_irregular():
    x = block_recipe_vector(L2, 2.0, ((1, 160), (181, 4000)))
    rep = detect_distributionally_irregular(TWO_B, x, 100_000)
    assert rep.I_density.running_max >= 0.95
    assert rep.J_density.running_max >= 0.95
    assert rep.irregular
    assert rep.csv().startswith("n,distance,seminorm_m,in_I,in_J\n")


def test_contraction_orbit_is_not_irregular():
    rep = detect_distributionally_irregular(Shift(WeightSpec.constant(0.5), L2), CoordinateVector.basis(L2, 40),
                                            1000)
    assert rep.J_density.running_max == 0
    assert not rep.irregular


# -----------------------------------------------------------------------------
# return sets and the two conditions
# -----------------------------------------------------------------------------
def test_dilated_shift_returns_at_every_time():
    e1 = CoordinateVector.basis(L2, 1)
    rs = return_set(TWO_B, Ball(e1, 0.5), Ball(e1, 0.5), 40)
    assert rs.cofinite and rs.cofinite_from == 0
    assert rs.witnessed == tuple(range(41))


def test_contraction_return_set_is_finite():
    rs = return_set(identity_multiple(0.5, R1), Ball(r1(1.0), 0.5), Ball(r1(1.0), 0.5), 40)
    assert rs.witnessed == (0, 1)
    assert not rs.cofinite


def test_condition_one_for_unweighted_shift():
    B = unweighted_shift(L2)
    v = check_condition_I(B, [CoordinateVector.basis(L2, 1), CoordinateVector.basis(L2, 3, 2.0)], [0.5, 0.1])
    assert v.status == "witnessed on battery"
    assert len(v.witnesses) == 4


def test_condition_one_fails_for_dilation():
    v = check_condition_I(identity_multiple(2.0, R1), [r1(1.0)], [0.5])
    assert v.status == "failed"


def test_condition_two_for_dilation_and_contraction():
    assert check_condition_II(identity_multiple(2.0, R1), 0.5, [0.5, 0.1], 2000,
                              banach_mode=True).status == "witnessed on battery"
    assert check_condition_II(identity_multiple(0.5, R1), 0.5, [0.5, 0.1], 2000,
                              banach_mode=True).status == "not witnessed"


# -----------------------------------------------------------------------------
# chain to density
# -----------------------------------------------------------------------------
@pytest.mark.parametrize("n,scale", [(1, 2.0), (1, 3.0), (2, 3.0)])
def test_loops_through_zero_yield_density_certificates(n, scale):
    solver = solver_for(TWO_B)
    sp = solver.split
    eta = (1 - sp.t) / (3 * sp.alpha * sp.beta) * 0.9
    y = CoordinateVector.basis(L2, n, scale)
    loop = loop_through_zero(TWO_B, y, eta)
    assert loop.start == y and loop.end == y
    dc = chain_to_density(TWO_B, loop, solver, horizon=2000)
    assert dc.k == loop.steps
    assert dc.y_distance < 1
    assert seminorm_eval(y, 1) - dc.y_distance > 1
    assert dc.certified_density == pytest.approx(1 / dc.k)
    assert dc.density.running_max >= 1 / dc.k
    members = np.nonzero(dc.density.indicator)[0] + 1
    assert np.all(members % dc.k == 0)


def test_chain_to_density_needs_a_loop():
    solver = solver_for(TWO_B)
    ch = verify_chain(TWO_B, [CoordinateVector.basis(L2, 2, 2.0), CoordinateVector.basis(L2, 1, 4.0)], 0.1)
    with pytest.raises(DomainError):
        chain_to_density(TWO_B, ch, solver)
