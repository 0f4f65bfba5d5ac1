"""Invariance of verdicts under rotations, powers, inverses and direct sums.

Every battery operator is classified, then transformed; the verdicts of the
transformed operator must coincide with the original ones.  Three verdict
families are compared:

* the chain-recurrence classifier (every operator it supports);
* the grid oracle's picture of the chain-recurrent set, "whole box" versus
  "localized near 0" (real operators of dimension <= 2);
* success of the least-squares finite shadow on a drift and a resonant-drift
  pseudotrajectory (finite-dimensional operators).

The shadowing classifier is compared under rotations only, since it reads
weight magnitudes of a single weighted shift.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .chain import Chain, classify_chain_recurrence, oracle_cr_nodes, verify_chain
from .core import ConstructionError, DomainError
from .operators import (DirectSum, FiniteMatrix, OperatorDescriptor, Shift, apply, as_weighted_shift, dense_matrix,
                        flatten_finite, hyperbolic_splitting, identity_multiple, transform, unweighted_shift)
from .shadowing import classify_shadowing, finite_shadow_least_squares
from .spaces import CoordinateVector, SequenceSpaceSpec
from .weights import WeightSpec

ORACLE_DELTA = 0.1
ORACLE_BOX = 2.0
LS_DELTA = 1e-3
LS_LENGTH = 110


@dataclass(frozen=True)
class BatteryEntry:
    name: str
    operator: OperatorDescriptor


def default_battery() -> list[BatteryEntry]:
    """Twelve operators: six finite-dimensional, six weighted shifts."""
    R1, R2 = SequenceSpaceSpec.finite(1, real=True), SequenceSpaceSpec.finite(2, real=True)
    L2, L2Z = SequenceSpaceSpec.ell(2.0), SequenceSpaceSpec.ell(2.0, index_set="Z")
    kj = SequenceSpaceSpec.koethe_space("k_pow_j")
    ejk = SequenceSpaceSpec.koethe_space("exp_neg_j_over_k")
    return [
        BatteryEntry("2id on R", identity_multiple(2.0, R1)),
        BatteryEntry("id/2 on R", identity_multiple(0.5, R1)),
        BatteryEntry("diag(1/2, 2)", FiniteMatrix.of(np.diag([0.5, 2.0]))),
        BatteryEntry("rotation by 90 degrees", FiniteMatrix.of(np.array([[0.0, -1.0], [1.0, 0.0]]))),
        BatteryEntry("2id on R^2", identity_multiple(2.0, R2)),
        BatteryEntry("id/2 on R^2", identity_multiple(0.5, R2)),
        BatteryEntry("B on l2", unweighted_shift(L2)),
        BatteryEntry("2B on l2", Shift(WeightSpec.constant(2.0, False), L2)),
        BatteryEntry("B/2 on l2", Shift(WeightSpec.constant(0.5, False), L2)),
        BatteryEntry("B on lambda2(k^j)", unweighted_shift(kj)),
        BatteryEntry("B on lambda2(exp(-j/k))", unweighted_shift(ejk)),
        BatteryEntry("bilateral shift (1/2 | 2)", Shift(WeightSpec.bilateral([0.5], [2.0]), L2Z)),
    ]


# -----------------------------------------------------------------------------
# verdicts
# -----------------------------------------------------------------------------
def _is_finite(T: OperatorDescriptor) -> bool:
    try:
        dense_matrix(T)
        return True
    except DomainError:
        return False


def cr_verdict(T: OperatorDescriptor) -> str:
    return classify_chain_recurrence(T).status.value


def oracle_verdict(T: OperatorDescriptor, delta: float = ORACLE_DELTA, box: float = ORACLE_BOX) -> str:
    """``whole box`` if every grid node of the inner half-box lies on a grid loop, else ``localized``
    when all loop nodes stay inside the inner half-box, else ``mixed``."""
    res = oracle_cr_nodes(flatten_finite(T), delta, box, delta / 2)
    if res.coords.size == 0:
        return "localized"
    sup = np.max(np.abs(res.coords), axis=1)
    inner = int(np.sum(sup <= box / 2 + 1e-12))
    expected_inner = (2 * int(round((box / 2) / (delta / 2))) + 1) ** res.coords.shape[1]
    if inner >= expected_inner:
        return "whole box"
    if np.all(sup <= box / 2):
        return "localized"
    return "mixed"


def _drift_points(T: FiniteMatrix, delta: float, length: int, resonant: bool) -> list:
    """Pseudotrajectory with defects ``delta' u`` (drift) or ``delta' T^{j+1} u / ||T^{j+1} u||``
    (resonant drift), ``delta' = delta (1 - 1e-6)``.

    Hyperbolic operators sum the defects forward on the stable part and
    backward on the unstable part, which keeps the points of size ``O(delta)``
    even for long horizons; other operators iterate forward from 0.
    """
    A = T.array
    d = A.shape[0]
    u = np.ones(d, dtype=A.dtype) / math.sqrt(d)
    step = delta * (1 - 1e-6)
    ys, v = [], u
    for _ in range(length - 1):
        if resonant:
            v = A @ v
            v = v / np.linalg.norm(v)
        ys.append(CoordinateVector.from_dense(T.space, step * v, 0))
    try:
        split = hyperbolic_splitting(T)
    except (DomainError, ConstructionError):
        split = None
    if split is None:
        pts = [CoordinateVector.zero(T.space)]
        for y in ys:
            pts.append(apply(T, pts[-1]) + y)
        return pts
    parts = [split.split(y) for y in ys]
    fwd = [CoordinateVector.zero(T.space)]
    for y1, _ in parts:
        fwd.append(apply(T, fwd[-1]) + y1)
    bwd = [CoordinateVector.zero(T.space)]
    for _, y2 in reversed(parts):
        bwd.append(split.apply_s(bwd[-1] - y2))
    bwd.reverse()
    return [f + b for f, b in zip(fwd, bwd)]


def ls_verdict(T: OperatorDescriptor, delta: float = LS_DELTA, length: int = LS_LENGTH) -> str:
    """``shadowed`` when the least-squares solver meets ``epsilon = 10 delta`` on both
    drift pseudotrajectories, else ``not shadowed``."""
    F = flatten_finite(T)
    for resonant in (False, True):
        pts = _drift_points(F, delta, length, resonant)
        chain = verify_chain(F, pts, delta)
        if not isinstance(chain, Chain):
            raise ConstructionError("drift pseudotrajectory failed verification", index=chain.index)
        try:
            finite_shadow_least_squares(F, chain, 10 * delta)
        except ConstructionError:
            return "not shadowed"
    return "shadowed"


def shadow_class_verdict(T: OperatorDescriptor) -> str:
    c = classify_shadowing(T)
    return f"{c.matched_condition}:{c.positive_shadowing.value}"


# -----------------------------------------------------------------------------
# transforms
# -----------------------------------------------------------------------------
def transforms_for(T: OperatorDescriptor) -> list[tuple[str, OperatorDescriptor]]:
    finite = _is_finite(T)
    real = finite and bool(np.all(np.imag(dense_matrix(T)) == 0))
    out = []
    rotations = (-1.0,) if real else (1j, complex(math.cos(1.0), math.sin(1.0)))
    for lam in rotations:
        out.append((f"rotate({lam})", transform(T, "rotate", lam)))
    for n in (2, 3):
        out.append((f"power({n})", transform(T, "power", n)))
    invertible = (finite and abs(np.linalg.det(dense_matrix(T))) > 1e-12) or \
        (isinstance(as_weighted_shift(T), Shift) and as_weighted_shift(T).invertible)
    if invertible:
        out.append(("inverse", transform(T, "inverse")))
    if not finite or dense_matrix(T).shape[0] == 1:
        out.append(("direct_sum(self)", transform(T, "direct_sum", T)))
    if not finite:
        # a chain-recurrent summand leaves the verdict of T unchanged
        partner = unweighted_shift(SequenceSpaceSpec.ell(2.0))
        out.append(("direct_sum(B on l2)", transform(T, "direct_sum", partner)))
    return out


@dataclass(frozen=True)
class Violation:
    operator: str
    transform: str
    check: str
    base: str
    transformed: str


@dataclass(frozen=True)
class InvarianceReport:
    comparisons: int
    violations: tuple
    rows: tuple = field(repr=False)  # (operator, transform, check, base, transformed)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def csv(self) -> str:
        lines = ["operator,transform,check,base,transformed,agree"]
        lines += [f"{o},{t},{c},{b},{x},{int(b == x)}" for o, t, c, b, x in self.rows]
        return "\n".join(lines) + "\n"


def _checks_for(T: OperatorDescriptor) -> list[tuple[str, object]]:
    checks: list[tuple[str, object]] = [("chain recurrence", cr_verdict)]
    if _is_finite(T):
        A = dense_matrix(T)
        if A.shape[0] <= 2 and np.all(np.imag(A) == 0):
            checks.append(("oracle", oracle_verdict))
        checks.append(("least squares", ls_verdict))
    return checks


def run_invariance_suite(battery: list[BatteryEntry] | None = None) -> InvarianceReport:
    t0 = time.perf_counter()
    battery = default_battery() if battery is None else battery
    rows, violations = [], []
    for entry in battery:
        T = entry.operator
        for check, fn in _checks_for(T):
            base = fn(T)
            for tname, U in transforms_for(T):
                if check == "oracle" and isinstance(U, DirectSum) and dense_matrix(U).shape[0] > 2:
                    continue
                got = fn(U)
                rows.append((entry.name, tname, check, base, got))
                if got != base:
                    violations.append(Violation(entry.name, tname, check, base, got))
        S = as_weighted_shift(T)
        if S is not None and S.space.is_banach and S.space.source == "norm":
            base = shadow_class_verdict(T)
            for lam in (1j, -1.0):
                got = shadow_class_verdict(transform(T, "rotate", lam))
                rows.append((entry.name, f"rotate({lam})", "shadowing", base, got))
                if got != base:
                    violations.append(Violation(entry.name, f"rotate({lam})", "shadowing", base, got))
    return InvarianceReport(len(rows), tuple(violations), tuple(rows), time.perf_counter() - t0)


__all__ = ["BatteryEntry", "default_battery", "cr_verdict", "oracle_verdict", "ls_verdict", "transforms_for",
           "run_invariance_suite", "InvarianceReport", "Violation"]
