"""Reproduction of the golden examples and the quantitative acceptance checks.

Each criterion is a function returning a :class:`CriterionResult` with the
measured quantities in ``detail``; tolerances can be overridden through
``params`` so that tampered thresholds show up as failing rows.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .chain import (Chain, build_chain_e_to_zero, build_chain_zero_to_e, brute_force_chain_search,
                    classify_chain_recurrence, oracle_cr_nodes, predicted_cr_band, transitivity_test,
                    verify_chain)
from .chaos import (block_recipe_vector, chain_to_density, detect_distributionally_irregular,
                    loop_through_zero)
from .core import ConstructionError
from .entire import entire_demo
from .invariance import run_invariance_suite
from .operators import (Diagonal, FiniteMatrix, Shift, hyperbolic_splitting, identity_multiple, unweighted_shift)
from .shadowing import (classify_shadowing, construct_periodic_shadow, finite_shadow_least_squares,
                        finite_to_infinite_shadow, generate_pseudotrajectory, make_pseudotrajectory,
                        ShadowRejection, solver_for, verify_shadowing)
from .spaces import CoordinateVector, SequenceSpaceSpec
from .weights import WeightSpec


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    seconds: float
    time_limit: float
    detail: dict = field(default_factory=dict)

    @property
    def within_time(self) -> bool:
        return self.seconds < self.time_limit

    @property
    def ok(self) -> bool:
        return self.passed and self.within_time

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] criterion {self.id}: {self.name} ({self.seconds:.2f} s of {self.time_limit:g} s)"


def _shift_C() -> Shift:
    """Bilateral shift with weights 1/2 on the negative side and 2 on the positive side."""
    return Shift(WeightSpec.bilateral([0.5], [2.0]), SequenceSpaceSpec.ell(2.0, index_set="Z"))


# -----------------------------------------------------------------------------
# 1: chain recurrence / transitivity table
# -----------------------------------------------------------------------------
GOLDEN_CR = (
    ("hardy", "family", "hardy", "ChainRecurrent", "NotTransitive"),
    ("dirichlet", "family", "dirichlet", "ChainRecurrent", "NotTransitive"),
    ("bergman", "family", "bergman", "ChainRecurrent", "Transitive"),
    ("lambda2(k^j)", "koethe", "k_pow_j", "NotChainRecurrent", "NotTransitive"),
    ("lambda2(j^k)", "koethe", "j_pow_k", "NotChainRecurrent", "NotTransitive"),
    ("lambda2(exp(-j/k))", "koethe", "exp_neg_j_over_k", "ChainRecurrent", "Transitive"),
    ("lambda2(log(j+1)^k)", "koethe", "log_pow_k", "ChainRecurrent", "NotTransitive"),
)


def golden_space(source: str, name: str) -> SequenceSpaceSpec:
    return SequenceSpaceSpec.weighted(name) if source == "family" else SequenceSpaceSpec.koethe_space(name)


def criterion_1(params: dict | None = None) -> CriterionResult:
    t0 = time.perf_counter()
    rows, ok = [], True
    for label, source, name, cr_expected, tr_expected in GOLDEN_CR:
        B = unweighted_shift(golden_space(source, name))
        cr = classify_chain_recurrence(B).status.value
        tr = transitivity_test(B).status.value
        rows.append((label, cr, tr))
        ok &= (cr == cr_expected and tr == tr_expected)
    return CriterionResult(1, "chain recurrence and transitivity golden table", ok, time.perf_counter() - t0, 10.0,
                           {"rows": rows})


# -----------------------------------------------------------------------------
# 2: shadowing table
# -----------------------------------------------------------------------------
def golden_shadowing_cases() -> list[tuple[str, Shift, dict]]:
    L2, L2Z = SequenceSpaceSpec.ell(2.0), SequenceSpaceSpec.ell(2.0, index_set="Z")
    return [
        ("unilateral w = 1/2", Shift(WeightSpec.constant(0.5, False), L2), {"condition": "(a)"}),
        ("unilateral w = 2", Shift(WeightSpec.constant(2.0, False), L2), {"condition": "(b)"}),
        ("bilateral tails (1/2 | 2)", Shift(WeightSpec.bilateral([0.5], [2.0]), L2Z),
         {"condition": "(C)", "generalized_hyperbolic": "yes", "hyperbolic": "no"}),
        ("bilateral tails (2 | 1/2)", Shift(WeightSpec.bilateral([2.0], [0.5]), L2Z),
         {"shadowing": "no", "periodic_shadowing": "yes"}),
    ]


def criterion_2(params: dict | None = None) -> CriterionResult:
    t0 = time.perf_counter()
    rows, ok = [], True
    for label, T, expected in golden_shadowing_cases():
        summary = classify_shadowing(T).summary()
        match = all(summary[k] == v for k, v in expected.items())
        rows.append((label, summary, match))
        ok &= match
    return CriterionResult(2, "shadowing golden table", ok, time.perf_counter() - t0, 5.0, {"rows": rows})


# -----------------------------------------------------------------------------
# 3: periodic shadows of the condition-(C) shift
# -----------------------------------------------------------------------------
def criterion_3(params: dict | None = None) -> CriterionResult:
    params = params or {}
    eps = params.get("epsilon", 0.1)
    residual_tol = params.get("residual_tol", 1e-8)
    t0 = time.perf_counter()
    C = _shift_C()
    split = hyperbolic_splitting(C)
    delta = (1 - split.t) * eps / (3 * split.alpha * split.beta)
    worst_err, worst_res, ok = 0.0, 0.0, True
    for seed in range(50):
        period = 1 + seed % 10
        pt = generate_pseudotrajectory(C, None, delta, 0, seed=seed, mode="periodic", period=period,
                                       window=(-10, 9), truncation=(-100, 99))
        cert = construct_periodic_shadow(C, split, pt)
        worst_err = max(worst_err, cert.max_error.hi)
        worst_res = max(worst_res, cert.periodic_residual)
        ok &= cert.max_error.hi < eps and cert.periodic_residual < residual_tol
    return CriterionResult(3, "periodic shadow bound on the condition-(C) shift", ok, time.perf_counter() - t0, 60.0,
                           {"delta": delta, "worst_max_error": worst_err, "worst_residual": worst_res, "runs": 50})


# -----------------------------------------------------------------------------
# 4: finite-to-infinite bootstrap
# -----------------------------------------------------------------------------
def bootstrap_battery(eps: float = 0.1) -> list[tuple[str, object, object]]:
    """(label, operator, window pseudotrajectory) triples."""
    D = FiniteMatrix.of(np.diag([0.5, 2.0]))
    C = _shift_C()
    out = []
    for label, T, window in (("diag(1/2, 2)", D, None), ("condition-(C) shift, 50 coordinates", C, (-25, 24))):
        L = solver_for(T).L
        delta = eps / (4 * L)
        for seed in range(3):
            pt = generate_pseudotrajectory(T, None, delta, 40, seed=seed, window=window, mode="bounded")
            out.append((f"{label} bounded seed {seed}", T, make_pseudotrajectory(T, pt.points, pt.delta, start=-20)))
            x0 = CoordinateVector.zero(T.space)
            pt = generate_pseudotrajectory(T, x0, delta, 16, seed=seed, window=window)
            out.append((f"{label} noise seed {seed}", T, make_pseudotrajectory(T, pt.points, pt.delta, start=-8)))
    return out


def criterion_4(params: dict | None = None) -> CriterionResult:
    params = params or {}
    eps = params.get("epsilon", 0.1)
    slack = params.get("slack", 1e-12)
    t0 = time.perf_counter()
    rows, ok = [], True
    for label, T, pt in bootstrap_battery(eps):
        res = finite_to_infinite_shadow(T, solver_for(T), pt, eps, stages=5)
        margins = [eps / 2 ** (k + 2) + slack - g for k, g in enumerate(res.gaps, start=1)]
        good = all(m > 0 for m in margins) and res.certificate.max_error.hi < eps
        rows.append((label, max(res.gaps, default=0.0), min(margins, default=math.inf),
                     res.certificate.max_error.hi))
        ok &= good
    return CriterionResult(4, "finite-to-infinite stage bounds", ok, time.perf_counter() - t0, 60.0, {"rows": rows})


# -----------------------------------------------------------------------------
# 5: constructive chains
# -----------------------------------------------------------------------------
def criterion_5(params: dict | None = None) -> CriterionResult:
    t0 = time.perf_counter()
    L2, L2Z = SequenceSpaceSpec.ell(2.0), SequenceSpaceSpec.ell(2.0, index_set="Z")
    B, BZ = unweighted_shift(L2), unweighted_shift(L2Z)
    rows, ok = [], True
    for i in range(1, 6):
        for delta in (0.5, 0.1, 0.02):
            for label, T, build in (("0 -> e_i on l2", B, lambda: build_chain_zero_to_e(L2, B, i, delta)),
                                    ("0 -> e_i on l2(Z)", BZ, lambda: build_chain_zero_to_e(L2Z, BZ, i, delta)),
                                    ("e_-i -> 0 on l2(Z)", BZ, lambda: build_chain_e_to_zero(L2Z, BZ, i, delta))):
                try:
                    chain = build()
                    again = verify_chain(T, chain.points, delta)
                    good = isinstance(again, Chain)
                    rows.append((label, i, delta, chain.steps, again.max_error if good else None))
                except ConstructionError as exc:
                    good = False
                    rows.append((label, i, delta, None, str(exc)))
                ok &= good
    return CriterionResult(5, "constructive chains re-verify", ok, time.perf_counter() - t0, 10.0, {"rows": rows})


# -----------------------------------------------------------------------------
# 6: grid oracle against the analytic chain-recurrent sets
# -----------------------------------------------------------------------------
def oracle_cases() -> list[tuple[str, FiniteMatrix, bool]]:
    """(label, matrix, chain recurrent) for the concordance battery."""
    return [
        ("2id dim 1", FiniteMatrix.of(np.array([[2.0]])), False),
        ("id/2 dim 1", FiniteMatrix.of(np.array([[0.5]])), False),
        ("2id dim 2", FiniteMatrix.of(2.0 * np.eye(2)), False),
        ("id/2 dim 2", FiniteMatrix.of(0.5 * np.eye(2)), False),
        ("rotation dim 2", FiniteMatrix.of(np.array([[0.0, -1.0], [1.0, 0.0]])), True),
        ("diag(1/2, 2)", FiniteMatrix.of(np.diag([0.5, 2.0])), False),
    ]


def criterion_6(params: dict | None = None) -> CriterionResult:
    params = params or {}
    delta, box = params.get("delta", 0.05), params.get("box", 4.0)
    h = delta / 2
    t0 = time.perf_counter()
    rows, ok = [], True
    for label, A, recurrent in oracle_cases():
        res = oracle_cr_nodes(A, delta, box, h)
        band = predicted_cr_band(A, delta)
        d = A.dim
        probe = CoordinateVector.from_dense(A.space, np.full(d, 1.0), 0)
        search = brute_force_chain_search(A, probe, probe, delta, box, h)
        if recurrent:
            good = res.coords.shape[0] == res.total_nodes and search.found
        else:
            inside = np.all(np.abs(res.coords) <= band[None, :] + 1e-12)
            has_origin = bool(np.any(np.all(res.coords == 0, axis=1)))
            good = bool(inside) and has_origin and not search.found
        rows.append((label, res.coords.shape[0], res.total_nodes, search.found, good))
        ok &= good
    return CriterionResult(6, "grid oracle concordance", ok, time.perf_counter() - t0, 120.0, {"rows": rows})


# -----------------------------------------------------------------------------
# 7: invariance suite
# -----------------------------------------------------------------------------
def criterion_7(params: dict | None = None) -> CriterionResult:
    t0 = time.perf_counter()
    rep = run_invariance_suite()
    return CriterionResult(7, "invariance suite", rep.ok, time.perf_counter() - t0, 120.0,
                           {"comparisons": rep.comparisons, "violations": [v.__dict__ for v in rep.violations]})


# -----------------------------------------------------------------------------
# 8: contractions are shadowed by the first point
# -----------------------------------------------------------------------------
def criterion_8(params: dict | None = None) -> CriterionResult:
    params = params or {}
    delta = params.get("delta", 0.1)
    t0 = time.perf_counter()
    lam = 0.5
    eps = params.get("epsilon", delta / (1 - lam) + 1e-9)
    ops = [Diagonal(SequenceSpaceSpec.ell(2.0), lam=lam), FiniteMatrix.of(np.diag([lam, -lam, lam]))]
    failures, worst = 0, 0.0
    for seed in range(100):
        T = ops[seed % 2]
        x0 = CoordinateVector.zero(T.space) if seed % 4 < 2 else \
            CoordinateVector.basis(T.space, 1 if T.space.index_set != "finite" else 0, 3.0)
        pt = generate_pseudotrajectory(T, x0, delta, 50, seed=seed)
        cert = verify_shadowing(T, pt, pt.points[0], eps)
        if isinstance(cert, ShadowRejection):
            failures += 1
        else:
            worst = max(worst, cert.max_error.hi)
    return CriterionResult(8, "contraction shadowed by its first point", failures == 0, time.perf_counter() - t0, 10.0,
                           {"failures": failures, "worst_error": worst, "epsilon": eps})


# -----------------------------------------------------------------------------
# 9: chaos pipeline
# -----------------------------------------------------------------------------
def criterion_9(params: dict | None = None) -> CriterionResult:
    params = params or {}
    target = params.get("density_target", 0.95)
    t0 = time.perf_counter()
    X = SequenceSpaceSpec.ell(2.0)
    T = Shift(WeightSpec.constant(2.0, False), X)
    solver = solver_for(T)
    split = solver.split
    eta = (1 - split.t) / (3 * split.alpha * split.beta) * 0.9
    loop = loop_through_zero(T, CoordinateVector.basis(X, 1, 2.0), eta)
    dc = chain_to_density(T, loop, solver, horizon=10_000)
    x = block_recipe_vector(X, 2.0, ((1, 160), (181, 4000)))
    rep = detect_distributionally_irregular(T, x, 100_000)
    density_ok = dc.density.running_max >= 1.0 / dc.k and dc.y_distance < 1
    irregular_ok = rep.I_density.running_max >= target and rep.J_density.running_max >= target
    return CriterionResult(9, "chaos pipeline", density_ok and irregular_ok, time.perf_counter() - t0, 120.0,
                           {"k": dc.k, "density": dc.density.running_max, "y_distance": dc.y_distance,
                            "I_density": rep.I_density.running_max, "J_density": rep.J_density.running_max})


# -----------------------------------------------------------------------------
# 10: negative controls
# -----------------------------------------------------------------------------
def criterion_10(params: dict | None = None) -> CriterionResult:
    params = params or {}
    factor = params.get("growth_factor", 2.0)
    t0 = time.perf_counter()
    demo = entire_demo(2.0, ell=2.0, delta=0.1, horizon=10, table_horizons=(10, 20, 30))
    errs = [row[2] for row in demo.table]
    growth_ok = all(b > a for a, b in zip(errs, errs[1:])) and errs[-1] >= factor * errs[0]
    R = SequenceSpaceSpec.finite(1, real=True)
    I = identity_multiple(1.0, R)
    failures = []
    for length in (100, 120):
        delta = 1e-3
        pts = [CoordinateVector.basis(R, 0, delta * (1 - 1e-6) * j) for j in range(length)]
        chain = verify_chain(I, pts, delta)
        try:
            finite_shadow_least_squares(I, chain, 10 * delta)
            failures.append(False)
        except ConstructionError:
            failures.append(True)
    return CriterionResult(10, "negative controls", growth_ok and all(failures), time.perf_counter() - t0, 60.0,
                           {"error_table": demo.table, "ls_failed": failures})


CRITERIA: dict[int, Callable[..., CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
}


def reproduce_golden(ids=None, params: dict | None = None) -> list[CriterionResult]:
    """Run the selected criteria (default: all); ``params`` maps criterion id to overrides."""
    params = params or {}
    return [CRITERIA[i](params.get(i)) for i in (ids or sorted(CRITERIA))]


def results_csv(results: list[CriterionResult]) -> str:
    lines = ["criterion,name,passed,seconds,time_limit"]
    lines += [f"{r.id},{r.name},{int(r.ok)},{r.seconds:.3f},{r.time_limit:g}" for r in results]
    return "\n".join(lines) + "\n"


__all__ = ["CriterionResult", "CRITERIA", "reproduce_golden", "results_csv", "GOLDEN_CR", "golden_space",
           "golden_shadowing_cases", "oracle_cases", "bootstrap_battery"] + [f"criterion_{i}" for i in range(1, 11)]
