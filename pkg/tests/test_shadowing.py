import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linshadow.chain import verify_chain
from linshadow.core import ConstructionError, DomainError
from linshadow.operators import (Diagonal, FiniteMatrix, Shift, apply, apply_power, hyperbolic_splitting,
                                 identity_multiple, transform, unweighted_shift)
from linshadow.shadowing import (LeastSquaresSolver, ShadowCertificate, ShadowRejection, classify_shadowing,
                                 construct_periodic_shadow, entire_demo, finite_shadow_least_squares, finite_to_infinite_shadow,
                                 generate_pseudotrajectory, make_pseudotrajectory, shadow_hyperbolic_split,
                                 solver_for, verify_shadowing)
from linshadow.spaces import CoordinateVector, SequenceSpaceSpec, seminorm_eval
from linshadow.weights import WeightSpec

R1 = SequenceSpaceSpec.finite(1, real=True)
R2 = SequenceSpaceSpec.finite(2, real=True)
L2 = SequenceSpaceSpec.ell(2.0)
L2Z = SequenceSpaceSpec.ell(2.0, index_set="Z")
DIL = identity_multiple(2.0, R1)
HYP = FiniteMatrix.of(np.diag([0.5, 2.0]))
SHIFT_C = Shift(WeightSpec.bilateral([0.5], [2.0]), L2Z)  # negative tail 1/2, positive tail 2


def r1(a):
    return CoordinateVector.from_dense(R1, np.array([a], dtype=float), 0)


def coord(x, n=0):
    return complex(x.to_dense(n, n)[0]).real


# -----------------------------------------------------------------------------
# generation and verification
# -----------------------------------------------------------------------------
def test_zero_noise_is_an_exact_trajectory():
    pt = generate_pseudotrajectory(HYP, CoordinateVector.from_dense(R2, np.array([1.0, 0.001]), 0), 0.1, 6,
                                   noise=0.0)
    assert pt.max_defect < 1e-12
    assert all(y.is_zero for y in pt.defects())


def test_adversarial_drift_unrolls_the_recursion():
    pt = generate_pseudotrajectory(DIL, r1(0.0), 1.0, 4, mode="drift")
    got = [coord(p) for p in pt.points]
    np.testing.assert_allclose(got, [0, 1, 3, 7, 15], rtol=2e-6)


def test_periodic_generation_certifies_the_wrap_around():
    pt = generate_pseudotrajectory(SHIFT_C, None, 0.1, 0, seed=4, mode="periodic", period=3, window=(-5, 4),
                                   truncation=(-60, 59))
    assert pt.period == 3
    assert len(pt.step_errors) == 3
    assert pt.max_defect < 0.1


def test_exact_orbit_shadows_with_zero_error():
    x0 = CoordinateVector.from_mapping(L2, {1: 0.3, 4: -1.0})
    T = Shift(WeightSpec.constant(0.5), L2)
    pt = generate_pseudotrajectory(T, x0, 0.1, 5, noise=0.0)
    cert = verify_shadowing(T, pt, x0, 1e-9)
    assert isinstance(cert, ShadowCertificate)
    assert cert.max_error.lo == 0


@pytest.mark.parametrize("seed", range(5))
def test_contraction_shadowed_by_starting_point(seed):
    T = Diagonal(L2, lam=0.5)
    delta = 0.1
    x0 = CoordinateVector.basis(L2, 1)
    pt = generate_pseudotrajectory(T, x0, delta, 40, seed=seed, window=(1, 6))
    assert isinstance(verify_shadowing(T, pt, x0, 2 * delta + 1e-9), ShadowCertificate)


def test_offset_point_is_rejected_at_the_start():
    T = Diagonal(L2, lam=0.5)
    x0 = CoordinateVector.basis(L2, 1)
    pt = generate_pseudotrajectory(T, x0, 0.1, 10, seed=0, window=(1, 4))
    eps = 0.2
    out = verify_shadowing(T, pt, x0 + CoordinateVector.basis(L2, 1, 10 * eps), eps)
    assert isinstance(out, ShadowRejection)
    assert out.index == 0


# -----------------------------------------------------------------------------
# hyperbolic split shadow
# -----------------------------------------------------------------------------
def test_zero_pseudotrajectory_has_zero_split_shadow():
    sp = hyperbolic_splitting(SHIFT_C)
    pt = make_pseudotrajectory(SHIFT_C, [CoordinateVector.zero(L2Z)] * 6, 0.01)
    cert = shadow_hyperbolic_split(SHIFT_C, sp, pt)
    assert cert.point.is_zero
    assert cert.max_error.hi < 1e-12


def test_dilation_with_constant_defect_matches_closed_form():
    delta, x0, n = 1e-3, 0.5, 30
    pts = [r1(x0)]
    for _ in range(n):
        pts.append(r1(2 * coord(pts[-1]) + delta))
    pt = make_pseudotrajectory(DIL, pts, 1.01 * delta)
    cert = shadow_hyperbolic_split(DIL, hyperbolic_splitting(DIL), pt)
    assert coord(cert.point) == pytest.approx(x0 + delta, abs=1e-9)


def test_condition_c_shift_split_certificate():
    sp = hyperbolic_splitting(SHIFT_C)
    assert (sp.alpha, sp.beta, sp.t) == (1.0, 1.0, 0.5)
    delta = 1e-3
    pt = generate_pseudotrajectory(SHIFT_C, CoordinateVector.zero(L2Z), delta, 100, seed=2, window=(-10, 9))
    cert = shadow_hyperbolic_split(SHIFT_C, sp, pt)
    assert cert.max_error.hi <= 3 * delta / (1 - 0.5) + cert.notes["tail"]
    assert isinstance(verify_shadowing(SHIFT_C, pt, cert.point, cert.epsilon), ShadowCertificate)


def test_split_reports_required_depth():
    sp = hyperbolic_splitting(DIL)
    pt = generate_pseudotrajectory(DIL, r1(0.0), 0.01, 12, mode="drift")
    with pytest.raises(ConstructionError) as info:
        shadow_hyperbolic_split(DIL, sp, pt, n_tail=1, epsilon=0.061)
    assert info.value.details["required_n_tail"] > 1


# -----------------------------------------------------------------------------
# periodic shadow
# -----------------------------------------------------------------------------
def test_zero_periodic_pseudotrajectory():
    pt = make_pseudotrajectory(SHIFT_C, [CoordinateVector.zero(L2Z)] * 3, 0.01, period=3)
    cert = construct_periodic_shadow(SHIFT_C, hyperbolic_splitting(SHIFT_C), pt)
    assert cert.point.is_zero
    assert cert.periodic_residual == 0


def test_constant_periodic_dilation_lands_on_the_fixed_point():
    c = 0.3
    pt = make_pseudotrajectory(DIL, [r1(c)], 0.31, period=1)
    cert = construct_periodic_shadow(DIL, hyperbolic_splitting(DIL), pt)
    # independent oracle: the unique solution of (T - I) x = 0
    assert coord(cert.point) == pytest.approx(0.0, abs=1e-12)


def test_condition_c_periodic_run_of_period_seven():
    sp = hyperbolic_splitting(SHIFT_C)
    eps = 0.1
    delta = (1 - sp.t) * eps / (3 * sp.alpha * sp.beta)
    pt = generate_pseudotrajectory(SHIFT_C, None, delta, 0, seed=11, mode="periodic", period=7, window=(-8, 7),
                                   truncation=(-80, 79))
    cert = construct_periodic_shadow(SHIFT_C, sp, pt)
    assert cert.max_error.hi < eps
    assert cert.periodic_residual < 1e-8
    back = apply_power(SHIFT_C, cert.point, 7) - cert.point
    assert seminorm_eval(back, 1) < 1e-8


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 8), st.sampled_from([0.05, 0.1, 0.5]))
def test_periodic_certificates_honor_epsilon(seed, period, eps):
    sp = hyperbolic_splitting(SHIFT_C)
    delta = (1 - sp.t) * eps / (3 * sp.alpha * sp.beta)
    pt = generate_pseudotrajectory(SHIFT_C, None, delta, 0, seed=seed, mode="periodic", period=period,
                                   window=(-6, 5), truncation=(-70, 69))
    cert = construct_periodic_shadow(SHIFT_C, sp, pt)
    assert cert.max_error.hi < eps
    assert isinstance(verify_shadowing(SHIFT_C, pt, cert.point, eps), ShadowCertificate)


# -----------------------------------------------------------------------------
# least squares
# -----------------------------------------------------------------------------
def test_least_squares_recovers_exact_start():
    x0 = CoordinateVector.from_dense(R2, np.array([0.7, -0.2]), 0)
    pts = [x0]
    for _ in range(10):
        pts.append(apply(HYP, pts[-1]))
    res = finite_shadow_least_squares(HYP, verify_chain(HYP, pts, 1e-9), 1e-6)
    np.testing.assert_allclose(res.point.to_dense(0, 1), [0.7, -0.2], atol=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_least_squares_and_split_agree_on_the_unstable_coordinate(seed):
    delta = 1e-3
    sp = hyperbolic_splitting(HYP)
    pt = generate_pseudotrajectory(HYP, CoordinateVector.zero(R2), delta, 19, seed=seed)
    split = shadow_hyperbolic_split(HYP, sp, pt)
    ls = finite_shadow_least_squares(HYP, verify_chain(HYP, list(pt.points), delta), 0.1)
    bound = 3 * sp.alpha * sp.beta * delta / (1 - sp.t)
    assert ls.sup_error <= bound
    assert split.max_error.hi <= bound
    assert abs(ls.point.to_dense(1, 1)[0] - split.point.to_dense(1, 1)[0]) < 1e-6


def _identity_drift(length, delta=1e-3):
    I = identity_multiple(1.0, R1)
    pts = [r1(delta * (1 - 1e-6) * j) for j in range(length)]
    return I, verify_chain(I, pts, delta)


def test_identity_drift_fails_for_long_chains():
    I, chain = _identity_drift(100)
    with pytest.raises(ConstructionError):
        finite_shadow_least_squares(I, chain, 1e-2)


def test_identity_drift_succeeds_for_short_chains():
    I, chain = _identity_drift(8)
    res = finite_shadow_least_squares(I, chain, 1e-2)
    # the minimizer of sum (x - j d)^2 is the mean of the chain
    assert coord(res.point) == pytest.approx(np.mean([coord(p) for p in chain.points]), rel=1e-9)


SCALARS = [0.5, 2.0, 1.0, -1.0, 3.0]


def _scalar_drift(a, length, step):
    """Resonant drift of ``x -> a x`` (defects ``step * sign(a)^(j+1)``) kept of size O(step):
    forward sums when |a| <= 1, backward sums when |a| > 1."""
    sign = 1.0 if a > 0 else -1.0
    ys = [step * sign ** (j + 1) for j in range(length - 1)]
    if abs(a) <= 1:
        xs = [0.0]
        for y in ys:
            xs.append(a * xs[-1] + y)
        return xs
    xs = [0.0]
    for y in reversed(ys):
        xs.append((xs[-1] - y) / a)
    return xs[::-1]


def _ls_ok(scalars, delta=1e-3, length=60):
    d = len(scalars)
    T = FiniteMatrix.of(np.diag(scalars))
    step = delta * (1 - 1e-6) / math.sqrt(d)
    cols = np.array([_scalar_drift(a, length, step) for a in scalars]).T
    pts = [CoordinateVector.from_dense(T.space, row, 0) for row in cols]
    try:
        finite_shadow_least_squares(T, verify_chain(T, pts, delta), 10 * delta)
        return True
    except ConstructionError:
        return False


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(SCALARS), st.sampled_from(SCALARS))
def test_least_squares_on_direct_sums_needs_both_blocks(a, b):
    assert _ls_ok([a, b]) == (_ls_ok([a]) and _ls_ok([b]))


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(SCALARS), st.sampled_from([2, 3]))
def test_least_squares_verdict_survives_powers(a, n):
    assert _ls_ok([a ** n]) == _ls_ok([a])


# -----------------------------------------------------------------------------
# finite-to-infinite bootstrap
# -----------------------------------------------------------------------------
def test_bootstrap_of_zero_pseudotrajectory():
    pt = make_pseudotrajectory(DIL, [r1(0.0)] * 5, 0.01)
    res = finite_to_infinite_shadow(DIL, solver_for(DIL), pt, 0.1, stages=4)
    assert all(v.is_zero for v in res.stages)


def test_bootstrap_of_dilation_matches_the_closed_form():
    eps, K = 0.1, 4
    solver = solver_for(DIL)
    pt = generate_pseudotrajectory(DIL, r1(0.0), eps / (4 * solver.L), 8, mode="drift")
    res = finite_to_infinite_shadow(DIL, solver, pt, eps, stages=K)
    closed = shadow_hyperbolic_split(DIL, hyperbolic_splitting(DIL), pt).point
    assert abs(coord(res.stages[-1]) - coord(closed)) < eps / 2 ** (K + 2)


@pytest.mark.parametrize("seed", range(3))
def test_bootstrap_stage_gaps_on_hyperbolic_matrix(seed):
    eps = 0.1
    solver = solver_for(HYP)
    delta = eps / (4 * solver.L)
    pt = generate_pseudotrajectory(HYP, None, delta, 39, seed=seed, mode="bounded")
    pt = make_pseudotrajectory(HYP, pt.points, pt.delta, start=-20)
    res = finite_to_infinite_shadow(HYP, solver, pt, eps, stages=5)
    assert len(res.gaps) == 4
    for k, (gap, bound) in enumerate(zip(res.gaps, res.gap_bounds), start=1):
        assert bound == pytest.approx(eps / 2 ** (k + 2))
        assert gap < bound + 1e-12
    assert res.p == math.ceil(eps / pt.max_defect) + 1


def test_bootstrap_rejects_coarse_pseudotrajectories():
    solver = solver_for(DIL)
    pt = generate_pseudotrajectory(DIL, r1(0.0), 0.05, 4, mode="drift")
    with pytest.raises(DomainError):
        finite_to_infinite_shadow(DIL, solver, pt, 0.1)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 1000), st.sampled_from([HYP, FiniteMatrix.of([[0.5]]), FiniteMatrix.of([[3.0]])]))
def test_least_squares_success_transfers_to_infinite_shadow(seed, T):
    eps = 0.1
    solver = LeastSquaresSolver(L=4.0)
    delta = eps / (4 * solver.L)
    pt = generate_pseudotrajectory(T, None, delta, 20, seed=seed, mode="bounded")
    finite_shadow_least_squares(T, verify_chain(T, list(pt.points), delta), solver.L * delta)
    res = finite_to_infinite_shadow(T, solver, pt, eps, stages=3)
    assert res.certificate.max_error.hi < eps


# -----------------------------------------------------------------------------
# classification and the entire-function demo
# -----------------------------------------------------------------------------
@pytest.mark.parametrize("T,expected", [
    (Shift(WeightSpec.constant(0.5), L2), {"condition": "(a)", "shadowing": "yes", "hyperbolic": "yes"}),
    (Shift(WeightSpec.constant(2.0), L2), {"condition": "(b)", "shadowing": "yes", "generalized_hyperbolic": "yes"}),
    (SHIFT_C, {"condition": "(C)", "shadowing": "yes", "generalized_hyperbolic": "yes", "hyperbolic": "no"}),
    (Shift(WeightSpec.bilateral([2.0], [0.5]), L2Z), {"shadowing": "no", "periodic_shadowing": "yes"}),
    (Shift(WeightSpec.constant(2.0, True), L2Z), {"condition": "(B)", "hyperbolic": "yes"}),
    (unweighted_shift(L2), {"condition": "none", "shadowing": "no"}),
])
def test_shadowing_classification(T, expected):
    summary = classify_shadowing(T).summary()
    for key, value in expected.items():
        assert summary[key] == value


def test_classification_needs_a_banach_shift():
    with pytest.raises(DomainError):
        classify_shadowing(HYP)
    with pytest.raises(DomainError):
        classify_shadowing(unweighted_shift(SequenceSpaceSpec.koethe_space("k_pow_j")))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.2, 3.0), min_size=1, max_size=3), st.lists(st.floats(0.2, 3.0), min_size=1, max_size=3),
       st.floats(0, 2 * math.pi))
def test_classification_is_rotation_invariant(neg, pos, theta):
    T = Shift(WeightSpec.bilateral(neg, pos), L2Z)
    lam = complex(math.cos(theta), math.sin(theta))
    assert classify_shadowing(transform(T, "rotate", lam)).summary() == classify_shadowing(T).summary()


def test_entire_demo_certifies_every_step():
    demo = entire_demo(2.0, ell=2.0, delta=0.1, horizon=10)
    assert len(demo.steps) == 11
    assert all(s.ok for s in demo.steps)
    for s in demo.steps:
        assert s.a_value < 0.1 / 4
        if s.j:
            assert s.b_value < 0.05


def test_entire_demo_error_grows_with_the_horizon():
    demo = entire_demo(2.0, table_horizons=(10, 30))
    assert demo.table[1][2] > 2 * demo.table[0][2]


def test_entire_demo_needs_expanding_multiplier():
    with pytest.raises(DomainError):
        entire_demo(0.5)
