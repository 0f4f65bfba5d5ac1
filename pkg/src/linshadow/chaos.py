"""Density-based chaos detection: upper densities, return sets and irregular orbits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chain import Chain, build_chain_e_to_zero, build_chain_zero_to_e, concat_chains, staircase_chain
from .core import ConstructionError, DomainError, Tri
from .operators import (Diagonal, OperatorDescriptor, apply, as_weighted_shift, dense_matrix,
                        hyperbolic_splitting)
from .shadowing import SplittingSolver, _scale_to, construct_periodic_shadow, make_pseudotrajectory
from .spaces import CoordinateVector, norm_interval, seminorm_eval

SIGMA = 1e-3
LAMBDA = 1e3
DENSITY_TOL = 0.05


# -----------------------------------------------------------------------------
# densities
# -----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class DensityEstimate:
    indicator: np.ndarray  # indicator[n-1] is membership of n, n = 1 .. horizon
    horizon: int
    running_max: float
    argmax: int
    checkpoints: np.ndarray = field(repr=False)

    def density_at(self, n: int) -> float:
        return float(self.indicator[:n].sum()) / n


def _indicator(I, horizon: int) -> np.ndarray:
    if callable(I):
        ns = np.arange(1, horizon + 1)
        try:
            out = np.asarray(I(ns), dtype=bool)
            if out.shape == ns.shape:
                return out
        except Exception:  # the predicate is scalar-only
            pass
        return np.array([bool(I(int(n))) for n in ns], dtype=bool)
    arr = np.asarray(I)
    if arr.dtype == bool:
        if arr.size < horizon:
            raise DomainError("indicator shorter than the horizon")
        return arr[:horizon].copy()
    out = np.zeros(horizon, dtype=bool)
    idx = np.asarray(list(I) if not isinstance(I, np.ndarray) else I, dtype=np.int64)
    idx = idx[(idx >= 1) & (idx <= horizon)]
    out[idx - 1] = True
    return out


def upper_density(I, horizon: int, checkpoints: Sequence[int] | None = None) -> DensityEstimate:
    """Exact ``max_n card(I cap [1, n]) / n`` over the checkpoints (default: every ``n``)."""
    if horizon < 1:
        raise DomainError("horizon must be >= 1")
    ind = _indicator(I, horizon)
    cps = np.arange(1, horizon + 1) if checkpoints is None else np.asarray(sorted(set(checkpoints)), dtype=np.int64)
    if cps.size == 0 or cps[0] < 1 or cps[-1] > horizon:
        raise DomainError("checkpoints must lie in [1, horizon]")
    counts = np.cumsum(ind)[cps - 1]
    ratios = counts / cps
    i = int(np.argmax(ratios))
    return DensityEstimate(ind, horizon, float(ratios[i]), int(cps[i]), cps)


# -----------------------------------------------------------------------------
# long orbits in log scale
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class OrbitScan:
    log_seminorms: np.ndarray  # [n, k] for n = 0 .. horizon, k = 1 .. K
    truncated_at: int | None  # set when the scan had to stop early
    method: str


def _logsumexp_p(logs: np.ndarray, p: float | None, axis: int = -1) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        top = np.max(logs, axis=axis, keepdims=True)
    top_safe = np.where(np.isfinite(top), top, 0.0)
    if p is None:
        return np.squeeze(top, axis=axis)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        s = np.sum(np.exp(p * (logs - top_safe)), axis=axis, keepdims=True)
        out = top_safe + np.log(s) / p
    out = np.where(np.isneginf(top), -np.inf, out)
    return np.squeeze(out, axis=axis)


def orbit_log_seminorms(T: OperatorDescriptor, x: CoordinateVector, horizon: int) -> OrbitScan:
    """``log ||T^n x||_k`` for ``0 <= n <= horizon`` without overflow.

    Weighted shifts and diagonals use exact log-magnitude formulas; other
    operators are iterated with periodic renormalization.
    """
    space = T.space
    K = space.seminorm_count
    S = as_weighted_shift(T)
    ns = np.arange(horizon + 1)
    if x.is_zero:
        return OrbitScan(np.full((horizon + 1, K), -np.inf), None, "zero")
    if S is not None and isinstance(x, CoordinateVector):
        w = S.weight
        idx = x.indices
        logc = np.log(np.abs(x.values))
        lo = int(idx.min()) - horizon
        if not S.bilateral:
            lo = max(lo, space.origin)
        hi = int(idx.max())
        all_idx = np.arange(lo, hi + 1)
        logw = np.log(np.abs(w.values(all_idx)))
        cum = np.concatenate([[0.0], np.cumsum(logw)])  # cum[i - lo + 1] = sum_{lo..i} log|w|

        def prod_log(i_hi: np.ndarray, n: np.ndarray) -> np.ndarray:
            # log |w_{i-n+1} ... w_i|
            return cum[i_hi - lo + 1] - cum[i_hi - n - lo + 1]

        out = np.full((horizon + 1, K), -np.inf)
        N, I = np.meshgrid(ns, np.arange(idx.size), indexing="ij")
        tgt = idx[I] - N
        alive = tgt >= (space.origin if not S.bilateral else -10**18)
        tgt_safe = np.where(alive, tgt, idx[I])
        base = logc[I] + np.where(alive, prod_log(idx[I], np.where(alive, N, 0)), 0.0)
        for k in range(1, K + 1):
            coef = space.log_coefficients(tgt_safe.ravel(), k).reshape(tgt.shape)
            logs = np.where(alive, base + coef, -np.inf)
            out[:, k - 1] = _logsumexp_p(logs, space.p, axis=1)
        return OrbitScan(out, None, "shift log-magnitude")
    if isinstance(T, Diagonal) and isinstance(x, CoordinateVector):
        logd = np.log(np.abs(T.entries(x.indices)))
        logc = np.log(np.abs(x.values))
        out = np.full((horizon + 1, K), -np.inf)
        for k in range(1, K + 1):
            coef = space.log_coefficients(x.indices, k)
            logs = logc[None, :] + ns[:, None] * logd[None, :] + coef[None, :]
            out[:, k - 1] = _logsumexp_p(logs, space.p, axis=1)
        return OrbitScan(out, None, "diagonal log-magnitude")
    # generic iteration with renormalization
    out = np.full((horizon + 1, K), -np.inf)
    cur, shift = x, 0.0
    for n in range(horizon + 1):
        if n:
            cur = apply(T, cur)
        if cur.is_zero:
            break
        vals = np.array([seminorm_eval(cur, k) for k in range(1, K + 1)])
        if not np.all(np.isfinite(vals)):
            return OrbitScan(out, n, "iteration (overflow)")
        with np.errstate(divide="ignore"):
            out[n] = np.log(vals) + shift
        top = float(vals.max())
        if top > 1e100 or (0 < top < 1e-100):
            cur = cur * (1.0 / top)
            shift += math.log(top)
    return OrbitScan(out, None, "iteration")


def _metric_from_logs(logs: np.ndarray, banach: bool, k_max: int) -> np.ndarray:
    """Upper bound of ``d(T^n x, 0)`` from log seminorms (rows are n)."""
    with np.errstate(over="ignore"):
        vals = np.exp(np.minimum(logs, 700.0))
    if banach:
        return vals[:, 0]
    ks = np.arange(1, vals.shape[1] + 1)
    return (np.minimum(1.0, vals) * 0.5 ** ks).sum(axis=1) + 0.5 ** k_max


# -----------------------------------------------------------------------------
# return sets
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class Ball:
    center: CoordinateVector
    radius: float


@dataclass(frozen=True)
class ReturnSet:
    witnessed: tuple
    horizon: int
    cofinite_from: int | None  # n0 with every n in [n0, horizon] witnessed (n0 <= horizon / 2)
    lower_bound_only: bool = True

    @property
    def cofinite(self) -> bool:
        return self.cofinite_from is not None


def _in_ball(T, a: CoordinateVector, n: int, B: Ball) -> bool:
    img = a
    for _ in range(n):
        img = apply(T, img)
    return norm_interval(img - B.center).lt(B.radius) is Tri.YES


def return_set(T: OperatorDescriptor, A: Ball, B: Ball, horizon: int,
               regularizations: Sequence[float] = (1e-12, 1e-6, 1e-3, 1e-1, 1.0)) -> ReturnSet:
    """Witnessed times ``n <= horizon`` with ``T^n(A) cap B`` nonempty.

    Candidates are the center of ``A``, the origin (when it lies in ``A``) and
    Tikhonov-regularized solutions of ``T^n (c_A + u) = c_B`` on a coordinate
    window; each is checked exactly, so absence is never a proof.
    """
    space = T.space
    ca, cb = A.center, B.center
    zero_in_a = norm_interval(ca).lt(A.radius) is Tri.YES
    zero_in_b = norm_interval(cb).lt(B.radius) is Tri.YES
    if space.index_set == "finite":
        lo, hi = 0, space.dim - 1
        Mat = dense_matrix(T)
    else:
        sup = np.concatenate([ca.indices, cb.indices, np.array([space.origin if space.index_set == "N" else 0])])
        lo = int(sup.min()) - horizon - 2
        if space.index_set == "N":
            lo = max(lo, space.origin)
        hi = int(sup.max()) + horizon + 2
        d = hi - lo + 1
        Mat = np.zeros((d, d), dtype=complex)
        for c in range(d):
            img = apply(T, CoordinateVector.basis(space, lo + c))
            keep = (img.indices >= lo) & (img.indices <= hi)
            Mat[img.indices[keep] - lo, c] = img.values[keep]
    d = Mat.shape[0]
    P = np.eye(d, dtype=complex)
    ca_d, cb_d = ca.to_dense(lo, hi), cb.to_dense(lo, hi)
    witnessed = []
    for n in range(horizon + 1):
        if n:
            P = Mat @ P
        found = (zero_in_a and zero_in_b) or _in_ball(T, ca, n, B)
        if not found:
            rhs = cb_d - P @ ca_d
            PhP = P.conj().T @ P
            for mu in regularizations:
                try:
                    u = np.linalg.solve(PhP + mu * np.eye(d), P.conj().T @ rhs)
                except np.linalg.LinAlgError:
                    continue
                cand = CoordinateVector.from_dense(space, u, lo)
                size = norm_interval(cand).hi
                if size >= A.radius:
                    cand = cand * (0.999 * A.radius / size)
                if norm_interval(cand).lt(A.radius) is not Tri.YES:
                    continue
                if _in_ball(T, ca + cand, n, B):
                    found = True
                    break
        if found:
            witnessed.append(n)
    n0 = None
    wset = set(witnessed)
    for start in range(0, horizon // 2 + 1):
        if all(m in wset for m in range(start, horizon + 1)):
            n0 = start
            break
    return ReturnSet(tuple(witnessed), horizon, n0, True)


# -----------------------------------------------------------------------------
# distributional irregularity
# -----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class DistributionalReport:
    vector: CoordinateVector
    m: int
    I_density: DensityEstimate
    J_density: DensityEstimate
    sigma: float
    Lambda: float
    irregular: bool
    truncated_at: int | None
    distances: np.ndarray = field(repr=False)
    seminorm_m: np.ndarray = field(repr=False)

    def csv(self) -> str:
        lines = ["n,distance,seminorm_m,in_I,in_J"]
        for n in range(1, self.I_density.horizon + 1):
            lines.append(f"{n},{self.distances[n]:.17g},{self.seminorm_m[n]:.17g},"
                         f"{int(self.I_density.indicator[n - 1])},{int(self.J_density.indicator[n - 1])}")
        return "\n".join(lines) + "\n"


def detect_distributionally_irregular(T: OperatorDescriptor, x: CoordinateVector, horizon: int,
                                      sigma: float = SIGMA, Lambda: float = LAMBDA, m: int = 1,
                                      tol: float = DENSITY_TOL) -> DistributionalReport:
    """Measure the upper densities of ``{n : d(T^n x, 0) < sigma}`` and ``{n : ||T^n x||_m > Lambda}``."""
    space = T.space
    space.check_k(m)
    scan = orbit_log_seminorms(T, x, horizon)
    logs = scan.log_seminorms
    dist = _metric_from_logs(logs, space.is_banach, space.k_max)
    mcol = 0 if space.is_banach else m - 1
    with np.errstate(over="ignore"):
        sem = np.exp(np.minimum(logs[:, mcol], 709.0))
    in_I = dist[1:] < sigma
    in_J = logs[1:, mcol] > math.log(Lambda)
    if scan.truncated_at is not None:
        in_I[scan.truncated_at - 1:] = False
        in_J[scan.truncated_at - 1:] = False
    I_est = upper_density(in_I, horizon)
    J_est = upper_density(in_J, horizon)
    irregular = I_est.running_max >= 1 - tol and J_est.running_max >= 1 - tol
    return DistributionalReport(x, m, I_est, J_est, sigma, Lambda, irregular, scan.truncated_at, dist, sem)


def block_recipe_vector(space, lam: float, blocks: Sequence[tuple[int, int]], sigma: float = SIGMA,
                        Lambda: float = LAMBDA) -> CoordinateVector:
    """Vector for ``lam * B`` (``lam > 1``) on a unilateral space whose orbit is small on
    the first block, large on the second and zero after it.

    ``blocks = ((1, a), (b, c))``: with one coordinate at ``c + 1`` of size
    ``s``, ``||T^n x|| = lam^n s`` for ``n <= c``; ``s`` is chosen with
    ``lam^a s < sigma`` and ``lam^b s > Lambda``, which needs
    ``b - a > log(Lambda / sigma) / log(lam)``.
    """
    (a0, a), (b, c) = blocks
    if b - a <= math.log(Lambda / sigma) / math.log(lam):
        raise DomainError("transition gap too short for the thresholds")
    coord = space.origin + c
    # log s between log(Lambda) - b log(lam) and log(sigma) - a log(lam); take the midpoint
    log_s = 0.5 * ((math.log(Lambda) - b * math.log(lam)) + (math.log(sigma) - a * math.log(lam)))
    log_coef = float(space.log_coefficients(np.array([coord]), 1)[0])
    return CoordinateVector.basis(space, coord, math.exp(log_s - log_coef))


# -----------------------------------------------------------------------------
# chain-based conditions
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class ConditionVerdict:
    status: str  # "witnessed on battery" | "failed" | "not witnessed"
    witnesses: tuple
    failure: tuple | None = None
    coverage: str = ""


def check_condition_I(T: OperatorDescriptor, test_vectors: Sequence, delta_schedule: Sequence[float],
                      horizon: int = 10_000) -> ConditionVerdict:
    """Try to reach 0 from every battery vector by a delta-chain, for every delta."""
    witnesses = []
    S = as_weighted_shift(T)
    for x in test_vectors:
        for delta in delta_schedule:
            chain = None
            try:
                chain = staircase_chain(T, x, delta, horizon=horizon)
            except ConstructionError:
                if S is not None and S.bilateral and x.indices.size == 1 and x.indices[0] < 0:
                    try:
                        chain = build_chain_e_to_zero(None, T, -int(x.indices[0]), delta,
                                                      source_scale=complex(x.values[0]))
                    except ConstructionError:
                        chain = None
            if chain is None:
                return ConditionVerdict("failed", tuple(witnesses), (x, delta),
                                        f"{len(witnesses)} of {len(test_vectors) * len(delta_schedule)} cases")
            witnesses.append((x, delta, chain.steps))
    return ConditionVerdict("witnessed on battery", tuple(witnesses), None,
                            f"{len(test_vectors)} vectors x {len(delta_schedule)} deltas")


def check_condition_II(T: OperatorDescriptor, gamma: float, delta_schedule: Sequence[float], horizon: int,
                       banach_mode: bool = False, battery: Sequence | None = None,
                       tol: float = DENSITY_TOL) -> ConditionVerdict:
    """Search for a delta-chain from 0 to ``x`` whose orbit stays ``gamma``-far from 0 on a
    dense (or, in Banach mode, ``gamma``-dense) set of times."""
    space = T.space
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    if battery is None:
        if space.index_set == "finite":
            battery = [CoordinateVector.basis(space, i) for i in range(space.dim)]
        else:
            base = space.origin if space.index_set == "N" else 0
            battery = [CoordinateVector.basis(space, base + i) for i in range(3)]
    target = gamma if banach_mode else 1 - tol
    witnesses = []
    for delta in delta_schedule:
        best = None
        for y in battery:
            candidates = []
            # one-step chain (0, x) with d(x, 0) <= delta
            candidates.append(_scale_to(y, delta * (1 - 1e-6)))
            # tail of an orbit that passes delta-close to 0
            scan = orbit_log_seminorms(T, y, min(horizon, 2000))
            dist = _metric_from_logs(scan.log_seminorms, space.is_banach, space.k_max)
            small = np.nonzero(dist[1:] < delta)[0]
            if small.size:
                n = int(small[0]) + 1
                cur = y
                for _ in range(n):
                    cur = apply(T, cur)
                if not cur.is_zero:
                    candidates.append(cur)
            for x in candidates:
                if norm_interval(x).hi > delta:
                    continue
                sc = orbit_log_seminorms(T, x, horizon)
                d = _metric_from_logs(sc.log_seminorms, space.is_banach, space.k_max)
                lower = d[1:] - (0 if space.is_banach else 0.5 ** space.k_max)
                est = upper_density(lower >= gamma, horizon)
                if best is None or est.running_max > best[2]:
                    best = (x, delta, est.running_max)
        if best is None or best[2] < target:
            return ConditionVerdict("not witnessed", tuple(witnesses), (None, delta))
        witnesses.append(best)
    return ConditionVerdict("witnessed on battery", tuple(witnesses))


@dataclass(frozen=True, eq=False)
class DensityCertificate:
    point: CoordinateVector
    k: int
    y_distance: float  # certified upper bound of ||y - x|| for the exact periodic shadow
    residual: float
    density: DensityEstimate
    certified_density: float


def chain_to_density(T: OperatorDescriptor, eta_chain: Chain, solver: SplittingSolver | None = None,
                     horizon: int = 10_000) -> DensityCertificate:
    """Close a delta-chain ``y -> y`` into a periodic pseudotrajectory and shadow it periodically.

    The periodic shadow ``x`` satisfies ``T^k x = x`` exactly up to the certified
    truncation tail, so ``||T^{nk} x|| >= ||y|| - ||y - x|| > 1`` for every ``n``
    and the times ``{nk}`` give upper density ``1/k``.
    """
    if not (eta_chain.start == eta_chain.end):
        raise DomainError("the chain must return to its starting point")
    y = eta_chain.start
    if seminorm_eval(y, 1) < 2:
        raise DomainError("the loop must start at a vector of norm >= 2")
    if solver is None:
        solver = SplittingSolver(hyperbolic_splitting(T))
    split = solver.split
    k = eta_chain.steps
    pt = make_pseudotrajectory(T, eta_chain.points[:-1], eta_chain.delta, period=k, provenance="closed chain")
    cert = construct_periodic_shadow(T, split, pt)
    tail = cert.notes["tail"]
    dist = norm_interval(y - cert.point).hi + tail
    if dist >= 1:
        raise ConstructionError("periodic shadow too far from the loop start", distance=dist)
    if seminorm_eval(y, 1) - dist <= 1:
        raise ConstructionError("density certificate fails: ||y|| - ||y - x|| <= 1", distance=dist)
    ind = np.zeros(horizon, dtype=bool)
    ind[k - 1::k] = True
    est = upper_density(ind, horizon)
    return DensityCertificate(cert.point, k, dist, cert.periodic_residual, est, 1.0 / k)


def loop_through_zero(T: OperatorDescriptor, y: CoordinateVector, delta: float) -> Chain:
    """A delta-chain ``y -> 0 -> y`` built from the staircase and the divergent-series recipe."""
    if y.indices.size != 1:
        raise DomainError("loops are built through canonical directions")
    down = staircase_chain(T, y, delta)
    n = int(y.indices[0])
    up = build_chain_zero_to_e(None, T, n, delta, target_scale=complex(y.values[0]))
    return concat_chains(down, up)


__all__ = [
    "DensityEstimate", "upper_density", "orbit_log_seminorms", "OrbitScan", "Ball", "ReturnSet", "return_set",
    "DistributionalReport", "detect_distributionally_irregular", "block_recipe_vector", "ConditionVerdict",
    "check_condition_I", "check_condition_II", "DensityCertificate", "chain_to_density", "loop_through_zero",
]
