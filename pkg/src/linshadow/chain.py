"""Chain recurrence: certified delta-chains, series classifiers, chain builders and a grid oracle."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse import csgraph

from .asymptotics import Growth
from .core import EPS, ConstructionError, DomainError, Interval, ResourceError, Tri
from .operators import (Diagonal, DirectSum, FiniteMatrix, Inverse, OperatorDescriptor, Power, ScalarMultiple,
                        Shift, apply, as_weighted_shift, dense_matrix)
from .spaces import (CoordinateVector, SequenceSpaceSpec, SumVector, norm_interval, seminorm_eval,
                     transport_factor, zero_vector)

SERIES_BUDGET = 10**6
SERIES_THRESHOLD = 1e6
TRANSITIVITY_TOL = 1e-9
J_MAX = 8


# -----------------------------------------------------------------------------
# chains and their verification
# -----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class Chain:
    """A certified delta-chain: every ``step_errors[j].hi <= delta``."""

    operator: OperatorDescriptor
    points: tuple
    delta: float
    step_errors: tuple

    @property
    def start(self):
        return self.points[0]

    @property
    def end(self):
        return self.points[-1]

    @property
    def steps(self) -> int:
        return len(self.points) - 1

    @property
    def max_error(self) -> float:
        return max(e.hi for e in self.step_errors)


@dataclass(frozen=True)
class ChainRejection:
    """First step whose certified error is not below delta."""

    index: int
    error: Interval
    status: Tri  # NO: certainly above delta; UNDECIDED: interval straddles delta

    def __bool__(self) -> bool:
        return False


def _step_slack(Tx, nxt, banach: bool) -> float:
    support = _support_size(Tx) + _support_size(nxt)
    scale = seminorm_eval(Tx, 1) + seminorm_eval(nxt, 1) if banach else 1.0
    if not math.isfinite(scale):
        return math.inf
    return 8 * EPS * (support + 4) * scale + 1e-300


def _support_size(x) -> int:
    if isinstance(x, SumVector):
        return sum(_support_size(p) for p in x.parts)
    return int(x.indices.size)


def _exact_step(T: OperatorDescriptor, x, y, delta: float) -> Tri:
    """Exact rational comparison ``||T x - y||_2 <= delta`` for real finite matrices."""
    if not isinstance(x, CoordinateVector) or x.space.index_set != "finite" or x.space.p != 2:
        return Tri.UNDECIDED
    try:
        A = dense_matrix(T)
    except DomainError:
        return Tri.UNDECIDED
    if np.any(np.imag(A) != 0) or np.any(x.values.imag != 0) or np.any(y.values.imag != 0):
        return Tri.UNDECIDED
    d = A.shape[0]
    xa = [Fraction(float(v)) for v in x.to_dense(0, d - 1).real]
    ya = [Fraction(float(v)) for v in y.to_dense(0, d - 1).real]
    Ar = [[Fraction(float(v)) for v in row] for row in np.real(A)]
    sq = sum((sum(Ar[i][j] * xa[j] for j in range(d)) - ya[i]) ** 2 for i in range(d))
    return Tri.YES if sq <= Fraction(delta) ** 2 else Tri.NO


def step_error(T: OperatorDescriptor, x, y) -> Interval:
    """Certified interval for ``d(T x, y)`` including rounding allowance."""
    Tx = apply(T, x)
    iv = norm_interval(Tx - y)
    slack = _step_slack(Tx, y, T.space.is_banach)
    return Interval(max(0.0, iv.lo - slack), iv.hi + slack)


def verify_chain(T: OperatorDescriptor, points: Sequence, delta: float) -> Chain | ChainRejection:
    """Certify ``d(T x_j, x_{j+1}) <= delta`` at every step."""
    points = tuple(points)
    if len(points) < 2:
        raise DomainError("a chain needs at least two points")
    if not delta > 0:
        raise DomainError("delta must be positive")
    errors = []
    for j in range(len(points) - 1):
        iv = step_error(T, points[j], points[j + 1])
        verdict = iv.le(delta)
        if verdict is Tri.UNDECIDED:
            verdict = _exact_step(T, points[j], points[j + 1], delta)
        if verdict is not Tri.YES:
            return ChainRejection(j, iv, verdict)
        errors.append(iv)
    return Chain(T, points, float(delta), tuple(errors))


def concat_chains(a: Chain, b: Chain) -> Chain:
    if not (a.end == b.start):
        raise DomainError("chains do not meet")
    if a.operator != b.operator:
        raise DomainError("chains belong to different operators")
    delta = max(a.delta, b.delta)
    out = verify_chain(a.operator, a.points + b.points[1:], delta)
    if not isinstance(out, Chain):
        raise ConstructionError("concatenation failed to re-verify", step=out.index)
    return out


# -----------------------------------------------------------------------------
# classification
# -----------------------------------------------------------------------------
class CRStatus(enum.Enum):
    CHAIN_RECURRENT = "ChainRecurrent"
    NOT_CHAIN_RECURRENT = "NotChainRecurrent"
    UNDECIDED = "Undecided"


class TransStatus(enum.Enum):
    TRANSITIVE = "Transitive"
    NOT_TRANSITIVE = "NotTransitive"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class SeriesEvidence:
    side: str
    k: int
    status: str  # divergent | convergent | undecided
    tag: str
    partial_sum: float
    terms: int
    method: str  # closed-form | numeric | structural


@dataclass(frozen=True)
class ChainVerdict:
    status: CRStatus
    evidence: tuple = ()
    note: str = ""
    k_cap: int | None = None

    def summary(self) -> str:
        return f"{self.status.value}" + (f" ({self.note})" if self.note else "")


@dataclass(frozen=True)
class TransitivityVerdict:
    status: TransStatus
    evidence: tuple = ()
    note: str = ""


def _series_terms_log(T: Shift, k: int, side: str, n_lo: int, n_hi: int) -> np.ndarray:
    """log of ``|w_1...w_n| / ||e_n||_k`` (pos) or ``1/(|w_{-n+1}...w_0| ||e_{-n}||_k)`` (neg)."""
    w = T.weight
    space = T.space
    ns = np.arange(n_lo, n_hi + 1)
    if side == "pos":
        logw = np.log(np.abs(w.values(np.arange(1, n_hi + 1))))
        cum = np.cumsum(logw)
        prod = cum[ns - 1]
        return prod - space.log_coefficients(ns, k)
    logw = np.log(np.abs(w.values(np.arange(-n_hi + 1, 1))))[::-1]  # w_0, w_{-1}, ...
    cum = np.cumsum(logw)
    prod = cum[ns - 1]
    return -prod - space.log_coefficients(-ns, k)


def _first_index(T: Shift) -> int:
    return max(1, T.space.origin) if not T.bilateral else 1


def series_evidence(T: Shift, k: int, side: str, budget: int = SERIES_BUDGET,
                    threshold: float = SERIES_THRESHOLD, preview: int = 1000) -> SeriesEvidence:
    """Classify divergence of the chain-recurrence series for seminorm ``k``."""
    w = T.weight
    space = T.space
    coef = space.coefficient_growth(k, side)
    prod = w.growth_of_product(side)
    growth: Growth | None = None
    if coef is not None and prod is not None:
        growth = (prod - coef) if side == "pos" else (-(prod + coef) if (prod + coef) is not None else None)
    n0 = _first_index(T)
    with np.errstate(over="ignore", divide="ignore"):
        logs = _series_terms_log(T, k, side, n0, n0 + preview - 1)
        partial = float(np.sum(np.exp(np.minimum(logs, 700))))
    if growth is not None:
        status = "divergent" if growth.series_diverges() else "convergent"
        return SeriesEvidence(side, k, status, growth.tag() if not growth.degenerate else
                              ("terms infinite" if growth.degenerate < 0 else "terms vanish"),
                              partial, preview, "closed-form")
    # numeric partial sums
    total, done, chunk = 0.0, 0, 50_000
    while done < budget:
        hi = min(done + chunk, budget)
        with np.errstate(over="ignore", divide="ignore"):
            logs = _series_terms_log(T, k, side, n0 + done, n0 + hi - 1)
            total += float(np.sum(np.exp(np.minimum(logs, 700))))
        done = hi
        if total > threshold:
            return SeriesEvidence(side, k, "divergent", "irregular", total, done, "numeric")
    return SeriesEvidence(side, k, "undecided", "irregular", total, done, "numeric")


def _combine_cr(verdicts: list[ChainVerdict]) -> CRStatus:
    if any(v.status is CRStatus.NOT_CHAIN_RECURRENT for v in verdicts):
        return CRStatus.NOT_CHAIN_RECURRENT
    if all(v.status is CRStatus.CHAIN_RECURRENT for v in verdicts):
        return CRStatus.CHAIN_RECURRENT
    return CRStatus.UNDECIDED


def classify_chain_recurrence(T: OperatorDescriptor, budget: int = SERIES_BUDGET,
                              threshold: float = SERIES_THRESHOLD) -> ChainVerdict:
    """Three-valued chain-recurrence verdict with per-seminorm series evidence."""
    S = as_weighted_shift(T)
    if S is not None:
        return _classify_shift(S, budget, threshold)
    if isinstance(T, ScalarMultiple):
        if abs(abs(T.lam) - 1) <= 1e-12:
            inner = classify_chain_recurrence(T.child, budget, threshold)
            return ChainVerdict(inner.status, inner.evidence, "rotation of " + (inner.note or "child"), inner.k_cap)
        lam, inner_op = T.lam, T.child
        while isinstance(inner_op, ScalarMultiple):
            lam *= inner_op.lam
            inner_op = inner_op.child
        if isinstance(inner_op, Diagonal):
            folded = (Diagonal(inner_op.ambient, lam=lam * inner_op.lam) if inner_op.lam is not None
                      else Diagonal(inner_op.ambient, weight=inner_op.weight.scaled(lam)))
            return classify_chain_recurrence(folded, budget, threshold)
        try:
            return _classify_matrix(dense_matrix(T))
        except DomainError:
            raise DomainError(f"unsupported operator kind for chain recurrence: {T.render()}") from None
    if isinstance(T, (Power, Inverse)):
        inner = classify_chain_recurrence(T.child, budget, threshold)
        return ChainVerdict(inner.status, inner.evidence, f"{T.kind} of " + (inner.note or "child"), inner.k_cap)
    if isinstance(T, DirectSum):
        parts = [classify_chain_recurrence(c, budget, threshold) for c in T.children]
        ev = tuple(e for p in parts for e in p.evidence)
        return ChainVerdict(_combine_cr(parts), ev, "direct sum of " + ", ".join(p.status.value for p in parts))
    if isinstance(T, Diagonal):
        if T.lam is not None:
            ok = abs(abs(T.lam) - 1) <= 1e-12
            return ChainVerdict(CRStatus.CHAIN_RECURRENT if ok else CRStatus.NOT_CHAIN_RECURRENT, (),
                                f"|lambda| = {abs(T.lam):g}")
        w = T.weight
        if w.irregular:
            return ChainVerdict(CRStatus.UNDECIDED, (), "irregular diagonal")
        ok = w.all_unimodular()
        return ChainVerdict(CRStatus.CHAIN_RECURRENT if ok else CRStatus.NOT_CHAIN_RECURRENT, (),
                            "all entries unimodular" if ok else "an entry off the unit circle")
    if isinstance(T, FiniteMatrix):
        return _classify_matrix(T.array)
    raise DomainError(f"unsupported operator kind for chain recurrence: {T.kind}")


def _classify_matrix(A: np.ndarray) -> ChainVerdict:
    eig = np.linalg.eigvals(A)
    ok = bool(np.all(np.abs(np.abs(eig) - 1) <= 1e-9))
    return ChainVerdict(CRStatus.CHAIN_RECURRENT if ok else CRStatus.NOT_CHAIN_RECURRENT, (),
                        "spectrum on the unit circle" if ok else "eigenvalue off the unit circle")


def _classify_shift(T: Shift, budget: int, threshold: float) -> ChainVerdict:
    space = T.space
    ks = range(1, space.seminorm_count + 1)
    sides = ("neg", "pos") if T.bilateral else ("pos",)
    evidence = []
    for k in ks:
        for side in sides:
            evidence.append(series_evidence(T, k, side, budget, threshold))
    if any(e.status == "convergent" for e in evidence):
        status = CRStatus.NOT_CHAIN_RECURRENT
    elif all(e.status == "divergent" for e in evidence):
        status = CRStatus.CHAIN_RECURRENT
    else:
        status = CRStatus.UNDECIDED
    cap = None if space.is_banach else space.k_max
    note = "" if cap is None else f"seminorms checked up to k = {cap}"
    return ChainVerdict(status, tuple(evidence), note, cap)


def transitivity_test(T: OperatorDescriptor, j_max: int = J_MAX, budget: int = 10**5,
                      tol: float = TRANSITIVITY_TOL) -> TransitivityVerdict:
    """Search for ``n_k`` with ``e_{n_k} / |w_1 ... w_{n_k}| -> 0`` (and the bilateral twin)."""
    S = as_weighted_shift(T)
    if S is None:
        if isinstance(T, (Power, Inverse)) or (isinstance(T, ScalarMultiple) and abs(abs(T.lam) - 1) <= 1e-12):
            return transitivity_test(T.child, j_max, budget, tol)
        raise DomainError(f"transitivity test supports weighted shifts, got {T.kind}")
    space = S.space
    w = S.weight
    sides = ("pos", "neg") if S.bilateral else ("pos",)
    evidence = []
    verdicts = []
    for k in range(1, space.seminorm_count + 1):
        for side in sides:
            coef = space.coefficient_growth(k, side)
            prod = w.growth_of_product(side)
            if coef is not None and prod is not None:
                # pos: ||e_n||_k / |w_1...w_n|;  neg: |w_{-n+1}...w_0| ||e_{-n}||_k
                g = (coef - prod) if side == "pos" else (coef + prod)
                if g is not None:
                    trend = g.trend()
                    evidence.append((side, k, g.tag(), trend))
                    verdicts.append(Tri.YES if trend < 0 else Tri.NO)
                    continue
            verdicts.append(_numeric_transitivity(S, k, side, j_max, budget, tol, evidence))
    if any(v is Tri.NO for v in verdicts):
        status = TransStatus.NOT_TRANSITIVE
    elif all(v is Tri.YES for v in verdicts):
        status = TransStatus.TRANSITIVE
    else:
        status = TransStatus.UNDECIDED
    note = "" if not S.bilateral else f"j window |j| <= {j_max} (signatures are j-independent)"
    return TransitivityVerdict(status, tuple(evidence), note)


def _numeric_transitivity(S: Shift, k: int, side: str, j_max: int, budget: int, tol: float, evidence) -> Tri:
    js = range(-j_max, j_max + 1) if S.bilateral else (0,)
    w = S.weight
    log_tol = math.log(tol)
    chunk = 20_000
    for j in js:
        found = None
        carry = 0.0  # log |product| over the weights already scanned
        for lo in range(1, budget + 1, chunk):
            ns = np.arange(lo, min(lo + chunk, budget + 1))
            if side == "pos":
                idx = j + ns
                logw = np.log(np.abs(w.values(idx)))
            else:
                idx = j - ns
                if not S.bilateral:
                    ns, idx = ns[idx >= S.space.origin], idx[idx >= S.space.origin]
                    if ns.size == 0:
                        break
                logw = np.log(np.abs(w.values(idx + 1)))
            with np.errstate(divide="ignore", invalid="ignore"):
                mag = carry + np.cumsum(logw)
                coef = S.space.log_coefficients(idx, k)
                vals = coef - mag if side == "pos" else coef + mag
            hits = np.nonzero(vals < log_tol)[0]
            if hits.size:
                found = int(ns[hits[0]])
                break
            carry = float(mag[-1])
        if found is None:
            evidence.append((side, k, "no numeric witness", 0))
            return Tri.UNDECIDED
        evidence.append((side, k, f"numeric witness n={found} j={j}", -1))
    return Tri.YES


# -----------------------------------------------------------------------------
# constructive chains
# -----------------------------------------------------------------------------
def metric_threshold_index(space, delta: float) -> int:
    """Smallest ``l`` (plus one of margin) with ``||x||_l < delta/2  =>  d(x, 0) < delta``."""
    if space.is_banach:
        return 1
    ell = max(1, math.ceil(math.log2(2.0 / delta))) + 1
    if ell > space.k_max:
        raise ConstructionError("delta below the metric resolution of the truncated seminorm family",
                                required_seminorm=ell, k_max=space.k_max)
    return ell


def _conjugacy(T: Shift):
    """Return (space_for_B, to_X) where ``to_X`` maps B-chains in ``X_v`` to B_w-chains in ``X``."""
    w = T.weight
    trivial = w.power == 0 and not w.prefix and all(v == 1 for v in w.tail_pos) and (
        w.tail_neg is None or all(v == 1 for v in w.tail_neg))
    if trivial:
        return T.space, (lambda x: x), (lambda n: 1.0 + 0j)
    if T.space.transport is not None:
        raise DomainError("weighted chains on an already transported space are not supported")
    xv = T.space.with_transport(w)

    def to_x(x: CoordinateVector) -> CoordinateVector:
        vals = np.array([transport_factor(w, int(n)) for n in x.indices], dtype=complex)
        return CoordinateVector(x.indices, x.values * vals, T.space)

    return xv, to_x, (lambda n: transport_factor(w, n))


def _require_shift(T: OperatorDescriptor) -> Shift:
    S = as_weighted_shift(T)
    if S is None:
        raise DomainError(f"chain recipes need a weighted shift, got {T.kind}")
    return S


def _certify(T: OperatorDescriptor, points, delta: float, what: str) -> Chain:
    out = verify_chain(T, points, delta)
    if not isinstance(out, Chain):
        raise ConstructionError(f"{what} failed verification", step=out.index, error=str(out.error))
    return out


def build_chain_zero_to_e(space: SequenceSpaceSpec | None, T: OperatorDescriptor, i: int, delta: float,
                          budget: int = SERIES_BUDGET, target_scale: complex = 1.0) -> Chain:
    """A certified delta-chain from 0 to ``target_scale * e_i`` following the divergent-series recipe."""
    S = _require_shift(T)
    if space is not None and space != S.space:
        raise DomainError("space does not match the operator")
    X = S.space
    if not S.bilateral and i < X.origin:
        raise DomainError(f"index {i} outside the index set")
    xv, to_x, v = _conjugacy(S)
    c = complex(target_scale) / v(i)
    ell = metric_threshold_index(X, delta)
    k = ell

    # degenerate branch: some e_n, n > i, has vanishing k-th seminorm
    scan = min(budget, 10_000)
    logc = xv.log_coefficients(np.arange(i + 1, i + 1 + scan), k)
    zeros = np.nonzero(np.isneginf(logc))[0]
    if zeros.size:
        nk = i + 1 + int(zeros[0])
        pts = [zero_vector(xv)] + [CoordinateVector.basis(xv, n, c) for n in range(nk, i - 1, -1)]
        return _certify(T, [to_x(p) for p in pts], delta, "degenerate chain 0 -> e_i")

    target = 2.0 * abs(c) / delta
    t, m, done = 0.0, 0, 0
    inv_norms: list[np.ndarray] = []
    chunk = 64
    while t <= target:
        if done >= budget:
            raise ConstructionError("series too small within budget", partial_sum=t, required=target, terms=done)
        hi = min(done + chunk, budget)
        with np.errstate(over="ignore"):
            block = np.exp(-xv.log_coefficients(np.arange(i + 1 + done, i + 1 + hi), k))
        with np.errstate(over="ignore"):
            cum = t + np.cumsum(block)
        over = np.nonzero(cum > target)[0]
        if over.size:
            m = done + int(over[0]) + 1
            inv_norms.append(block[: int(over[0]) + 1])
            t = float(cum[over[0]])
            break
        inv_norms.append(block)
        t = float(cum[-1])
        done = hi
        chunk *= 2
    inv = np.concatenate(inv_norms)[:m]  # 1/||e_n||_k for n = i+1 .. i+m
    # x_j sits on coordinate i+m-j+1 with coefficient c * sum_{n >= i+m-j+1} 1/(t ||e_n||_k)
    tail_sums = np.cumsum(inv[::-1]) / t
    pts = [zero_vector(xv)]
    for j in range(1, m + 1):
        n = i + m - j + 1
        coeff = c * tail_sums[j - 1] if j < m else c
        pts.append(CoordinateVector.basis(xv, n, coeff))
    pts.append(CoordinateVector.basis(xv, i, c))
    return _certify(T, [to_x(p) for p in pts], delta, "chain 0 -> e_i")


def build_chain_e_to_zero(space: SequenceSpaceSpec | None, T: OperatorDescriptor, i: int | None, delta: float,
                          x=None, budget: int = SERIES_BUDGET, horizon: int = 10_000,
                          orbit_budget: float = 1e12, source_scale: complex = 1.0) -> Chain:
    """A certified delta-chain ending at 0.

    Bilateral shifts without ``x`` use the negative-series recipe from
    ``source_scale * e_{-i}``; everything else uses the bounded-orbit staircase
    from ``x`` (default ``e_i``).
    """
    S = as_weighted_shift(T)
    if space is not None and space != T.space:
        raise DomainError("space does not match the operator")
    if x is None and S is not None and S.bilateral:
        return _claim_two(S, T, i, delta, budget, source_scale)
    if x is None:
        if i is None:
            raise DomainError("give an index or a starting vector")
        x = CoordinateVector.basis(T.space, i, source_scale)
    return staircase_chain(T, x, delta, horizon=horizon, orbit_budget=orbit_budget)


def _claim_two(S: Shift, T: OperatorDescriptor, i: int, delta: float, budget: int, scale: complex) -> Chain:
    if i is None or i < 1:
        raise DomainError("the bilateral recipe starts at e_{-i} with i >= 1")
    X = S.space
    xv, to_x, v = _conjugacy(S)
    c = complex(scale) / v(-i)
    ell = metric_threshold_index(X, delta)
    k = ell
    scan = min(budget, 10_000)
    logc = xv.log_coefficients(-np.arange(i + 1, i + 1 + scan), k)
    zeros = np.nonzero(np.isneginf(logc))[0]
    if zeros.size:
        nk = i + 1 + int(zeros[0])
        pts = [CoordinateVector.basis(xv, -n, c) for n in range(i, nk)] + [zero_vector(xv)]
        return _certify(T, [to_x(p) for p in pts], delta, "degenerate chain e_-i -> 0")
    target = 2.0 * abs(c) / delta
    t, done, m = 0.0, 0, 0
    blocks = []
    chunk = 64
    while True:
        if done >= budget:
            raise ConstructionError("negative series too small within budget", partial_sum=t, required=target,
                                    terms=done)
        hi = min(done + chunk, budget)
        with np.errstate(over="ignore"):
            block = np.exp(-xv.log_coefficients(-np.arange(i + 1 + done, i + 1 + hi), k))
        with np.errstate(over="ignore"):
            cum = t + np.cumsum(block)
        over = np.nonzero(cum > target)[0]
        if over.size:
            m = done + int(over[0]) + 1
            blocks.append(block[: int(over[0]) + 1])
            t = float(cum[over[0]])
            break
        blocks.append(block)
        t = float(cum[-1])
        done = hi
        chunk *= 2
    inv = np.concatenate(blocks)[:m]  # 1/||e_{-i-j}||_k for j = 1..m
    partial = np.cumsum(inv) / t
    pts = [CoordinateVector.basis(xv, -i, c)]
    for j in range(1, m):
        pts.append(CoordinateVector.basis(xv, -i - j, c * (1.0 - partial[j - 1])))
    pts.append(zero_vector(xv))
    return _certify(T, [to_x(p) for p in pts], delta, "chain e_-i -> 0")


def staircase_chain(T: OperatorDescriptor, x, delta: float, horizon: int = 10_000,
                    orbit_budget: float = 1e12) -> Chain:
    """Chain ``t_j T^j x`` with ``1 = t_0 > ... > t_k = 0`` for a bounded orbit."""
    space = T.space
    if x.is_zero:
        return _certify(T, [x, x], delta, "trivial chain")
    ell = metric_threshold_index(space, delta)
    orbit = [x]
    norms = []
    cur = x
    C = 0.0
    k_needed = None
    for j in range(1, horizon + 1):
        cur = apply(T, cur)
        orbit.append(cur)
        val = seminorm_eval(cur, ell)
        norms.append(val)
        C = max(C, val)
        if not math.isfinite(C) or C > orbit_budget:
            raise ConstructionError("orbit unbounded within budget", orbit_bound=C, step=j)
        factor = 1.0 if space.is_banach else 2.0
        k_needed = math.ceil(factor * C / delta) + 1
        if cur.is_zero or (j >= k_needed and j >= 2 * k_needed):
            break
    assert k_needed is not None
    while len(orbit) <= k_needed:
        cur = apply(T, cur)
        orbit.append(cur)
        val = seminorm_eval(cur, ell)
        C = max(C, val)
        if C > orbit_budget:
            raise ConstructionError("orbit unbounded within budget", orbit_bound=C)
        k_needed = math.ceil((1.0 if space.is_banach else 2.0) * C / delta) + 1
    k = k_needed
    pts = [orbit[j] * (1.0 - j / k) for j in range(k)] + [zero_vector(space)]
    return _certify(T, pts, delta, "staircase chain")


def interpolation_chain(T: OperatorDescriptor, chain_a: Chain, chain_b: Chain, delta: float,
                        max_length: int = 10**6) -> Chain:
    """Blend a loop at ``x`` and a loop at ``y`` into a delta-chain from ``x`` to ``y``."""
    for ch, name in ((chain_a, "first"), (chain_b, "second")):
        if not (ch.start == ch.end):
            raise DomainError(f"{name} chain is not a loop")
        if ch.max_error > delta / 4:
            raise ConstructionError(f"{name} chain is not a delta/4-chain", max_error=ch.max_error, bound=delta / 4)
    la, lb = chain_a.steps, chain_b.steps
    period = la * lb // math.gcd(la, lb)

    def small_enough(k: int) -> bool:
        for ch in (chain_a, chain_b):
            for p in ch.points:
                if norm_interval(p * (1.0 / k)).hi >= delta / 4:
                    return False
        return True

    q = 1
    while not small_enough(q * period):
        q *= 2
        if q * period > max_length:
            raise ConstructionError("required blend length exceeds budget", period=period, length=q * period)
    lo, hi = q // 2, q
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if small_enough(mid * period):
            hi = mid
        else:
            lo = mid
    k = max(hi, 1) * period
    pa, pb = chain_a.points[:-1], chain_b.points[:-1]
    pts = [pa[j % la] * (1.0 - j / k) + pb[j % lb] * (j / k) for j in range(k)]
    pts.append(chain_b.end)
    return _certify(T, pts, delta, "interpolation chain")


# -----------------------------------------------------------------------------
# brute-force oracle
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class OracleResult:
    chain: Chain | None
    absent_below: float | None  # no chain with steps <= this value inside the box
    grid_step: float
    slack: float
    nodes: int

    @property
    def found(self) -> bool:
        return self.chain is not None


@dataclass
class _Grid:
    A: np.ndarray
    h: float
    n: int
    dim: int
    coords: np.ndarray = field(repr=False)


def _grid(A: np.ndarray, box: float, h: float, node_budget: int) -> _Grid:
    d = A.shape[0]
    n = int(math.floor(box / h + 1e-9))
    count = (2 * n + 1) ** d
    if count > node_budget:
        raise ResourceError(f"grid has {count} nodes, budget {node_budget}")
    axes = [np.arange(-n, n + 1)] * d
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    return _Grid(A, h, n, d, mesh.astype(float) * h)


def _edges(A: np.ndarray, coords: np.ndarray, h: float, n: int, extra: np.ndarray, radius: float):
    """Directed edges u -> v with ||A u - v|| <= radius (grid and extra nodes)."""
    d = A.shape[1]
    n_grid = (2 * n + 1) ** d
    allpts = np.vstack([coords, extra]) if extra.size else coords
    images = allpts @ A.T
    base = np.rint(images / h).astype(np.int64)
    reach = int(math.ceil(radius / h)) + 1
    offs = np.stack(np.meshgrid(*[np.arange(-reach, reach + 1)] * d, indexing="ij"), axis=-1).reshape(-1, d)
    rows, cols = [], []
    strides = (2 * n + 1) ** np.arange(d - 1, -1, -1)
    for o in offs:
        cand = base + o
        inside = np.all(np.abs(cand) <= n, axis=1)
        if not inside.any():
            continue
        src = np.nonzero(inside)[0]
        tgt_int = cand[inside]
        dist = np.linalg.norm(images[src] - tgt_int * h, axis=1)
        ok = dist <= radius
        rows.append(src[ok])
        cols.append(((tgt_int[ok] + n) * strides).sum(axis=1))
    for e, p in enumerate(extra):
        dist = np.linalg.norm(images - p, axis=1)
        src = np.nonzero(dist <= radius)[0]
        rows.append(src)
        cols.append(np.full(src.size, n_grid + e))
    r = np.concatenate(rows) if rows else np.empty(0, np.int64)
    c = np.concatenate(cols) if cols else np.empty(0, np.int64)
    total = allpts.shape[0]
    graph = csr_matrix((np.ones(r.size, dtype=np.int8), (r, c)), shape=(total, total))
    graph.sum_duplicates()
    return graph, allpts


def _real_matrix(T: OperatorDescriptor) -> np.ndarray:
    A = dense_matrix(T)
    if np.any(np.imag(A) != 0):
        raise DomainError("the grid oracle works over the reals")
    A = np.real(A).astype(float)
    if A.shape[0] > 3:
        raise DomainError("the grid oracle supports dimension <= 3")
    return A


def oracle_slack(T: OperatorDescriptor, h: float) -> float:
    A = _real_matrix(T)
    return (float(np.linalg.norm(A, 2)) + 1.0) * h * math.sqrt(A.shape[0]) / 2.0


def brute_force_chain_search(T: OperatorDescriptor, x, y, delta: float, box_radius: float, grid_step: float,
                             node_budget: int = 10**7) -> OracleResult:
    """Breadth-first search for a delta-chain from ``x`` to ``y`` through grid points of a box.

    Edges require ``||T u - v|| <= delta - eta`` with a tiny safety margin
    ``eta``, so every returned chain certifies as a delta-chain.  When no path
    exists, no ``(delta - eta - slack)``-chain from ``x`` to ``y`` stays inside
    the box, where ``slack = (||T|| + 1) h sqrt(d) / 2``.
    """
    if grid_step > delta / 2 + 1e-15:
        raise DomainError("grid_step must be <= delta/2")
    A = _real_matrix(T)
    d = A.shape[0]
    space = T.space
    xa = np.real(x.to_dense(0, d - 1))
    ya = np.real(y.to_dense(0, d - 1))
    g = _grid(A, box_radius, grid_step, node_budget)
    eta = 1e-9 * delta
    radius = delta - eta
    graph, allpts = _edges(A, g.coords, grid_step, g.n, np.vstack([xa, ya]), radius)
    n_grid = g.coords.shape[0]
    src, dst = n_grid, n_grid + 1
    slack = oracle_slack(T, grid_step)
    dist, pred = csgraph.shortest_path(graph, unweighted=True, indices=src, return_predecessors=True)
    path = None
    if np.array_equal(xa, ya):
        # shortest loop: best predecessor p of x (or of its copy y) plus one step
        preds = set(graph[:, src].nonzero()[0].tolist()) | set(graph[:, dst].nonzero()[0].tolist())
        best = None
        for p in preds:
            if np.isfinite(dist[p]) and (best is None or dist[p] < dist[best]):
                best = p
        if best is not None:
            path = _walk(pred, src, best) + [dst]
    elif np.isfinite(dist[dst]):
        path = _walk(pred, src, dst)
    absent = None if path is not None else radius - slack
    if path is None:
        return OracleResult(None, absent, grid_step, slack, n_grid + 2)
    pts = []
    for node in path:
        if node == src:
            pts.append(x)
        elif node == dst:
            pts.append(y)
        else:
            pts.append(CoordinateVector.from_dense(space, allpts[node], 0))
    chain = _certify(T, pts, delta, "oracle chain")
    return OracleResult(chain, None, grid_step, slack, n_grid + 2)


def _walk(pred: np.ndarray, src: int, node: int) -> list[int]:
    out = [node]
    while node != src:
        node = int(pred[node])
        if node < 0:
            raise ConstructionError("broken predecessor chain")
        out.append(node)
    return out[::-1]


@dataclass(frozen=True)
class OracleCRSet:
    """Grid nodes lying on a cycle of the delta-graph (chain-recurrent candidates)."""

    coords: np.ndarray
    total_nodes: int
    grid_step: float
    delta: float
    slack: float


def oracle_cr_nodes(T: OperatorDescriptor, delta: float, box_radius: float, grid_step: float,
                    node_budget: int = 10**7) -> OracleCRSet:
    """Nodes that admit a delta-chain back to themselves within the grid graph."""
    if grid_step > delta / 2 + 1e-15:
        raise DomainError("grid_step must be <= delta/2")
    A = _real_matrix(T)
    g = _grid(A, box_radius, grid_step, node_budget)
    radius = delta - 1e-9 * delta
    graph, allpts = _edges(A, g.coords, grid_step, g.n, np.empty((0, A.shape[0])), radius)
    _, labels = csgraph.connected_components(graph, directed=True, connection="strong")
    sizes = np.bincount(labels)
    on_cycle = sizes[labels] > 1
    on_cycle |= np.asarray(graph.diagonal()).ravel() > 0
    return OracleCRSet(allpts[on_cycle], allpts.shape[0], grid_step, delta, oracle_slack(T, grid_step))


def predicted_cr_band(T: OperatorDescriptor, delta: float) -> np.ndarray:
    """Per-coordinate radius containing every delta-chain loop of a real diagonal or
    orthogonal matrix: ``delta / ||lambda_i| - 1|`` (``inf`` on the unit circle)."""
    A = _real_matrix(T)
    if np.allclose(A, np.diag(np.diag(A))):
        lam = np.abs(np.diag(A))
        with np.errstate(divide="ignore"):
            return np.where(np.abs(lam - 1) <= 1e-12, np.inf, delta / np.abs(lam - 1))
    if np.allclose(A.T @ A, np.eye(A.shape[0])):
        return np.full(A.shape[0], np.inf)
    raise DomainError("band prediction needs a diagonal or orthogonal matrix")
