"""Pseudotrajectories, shadow certificates and explicit shadow constructions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chain import Chain, verify_chain
from .core import ConstructionError, DomainError, Interval, Tri
from .operators import (Diagonal, HyperbolicSplitting, OperatorDescriptor, apply, apply_inverse, apply_power,
                        as_weighted_shift, dense_matrix, hyperbolic_splitting)
from .spaces import CoordinateVector, norm_interval, seminorm_eval, zero_vector
from .weights import gm_limits

NOISE_MARGIN = 1e-6


# -----------------------------------------------------------------------------
# pseudotrajectories
# -----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class Pseudotrajectory:
    """Points ``x_start, ..., x_{start+len-1}`` with certified step errors.

    With ``period`` set, the window is one period and the wrap-around step
    ``T x_{p-1} -> x_0`` is certified as well.
    """

    operator: OperatorDescriptor
    points: tuple
    delta: float
    start: int = 0
    period: int | None = None
    provenance: str = "imported"
    step_errors: tuple = ()

    @property
    def end(self) -> int:
        return self.start + len(self.points) - 1

    @property
    def max_defect(self) -> float:
        return max((e.hi for e in self.step_errors), default=0.0)

    def __getitem__(self, j: int):
        if self.period is not None:
            return self.points[(j - self.start) % self.period]
        if not self.start <= j <= self.end:
            raise IndexError(j)
        return self.points[j - self.start]

    def defects(self) -> list:
        """``y_n = x_{n+1} - T x_n`` over the window (including wrap-around when periodic)."""
        T = self.operator
        n = len(self.points) if self.period is not None else len(self.points) - 1
        return [self[self.start + i + 1] - apply(T, self[self.start + i]) for i in range(n)]


def make_pseudotrajectory(T: OperatorDescriptor, points: Sequence, delta: float, start: int = 0,
                          period: int | None = None, provenance: str = "imported") -> Pseudotrajectory:
    """Certify the steps of ``points`` (and the closing step when periodic)."""
    pts = tuple(points)
    if not pts:
        raise DomainError("a pseudotrajectory needs at least one point")
    if period is not None and period != len(pts):
        raise DomainError("a periodic pseudotrajectory stores exactly one period")
    seq = pts + (pts[0],) if period is not None else pts
    if len(seq) < 2:
        return Pseudotrajectory(T, pts, float(delta), start, period, provenance, ())
    out = verify_chain(T, seq, delta)
    if not isinstance(out, Chain):
        raise DomainError(f"step {out.index} is not certified below delta (status {out.status.value})")
    return Pseudotrajectory(T, pts, float(delta), start, period, provenance, out.step_errors)


def _scale_to(u, target: float):
    """Rescale ``u`` so that its certified distance to 0 is at most ``target``."""
    if u.is_zero or target <= 0:
        return u * 0.0
    if u.space.is_banach:
        return u * (target / seminorm_eval(u, 1))
    lo, hi = 0.0, 1.0
    while norm_interval(u * hi).hi < target:
        hi *= 2.0
        if hi > 1e300:
            return u * hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if norm_interval(u * mid).hi <= target:
            lo = mid
        else:
            hi = mid
    return u * lo


def _default_window(space) -> tuple[int, int]:
    if space.index_set == "finite":
        return 0, space.dim - 1
    if space.index_set == "Z":
        return -5, 4
    return space.origin, space.origin + 9


def generate_pseudotrajectory(T: OperatorDescriptor, x0, delta: float, horizon: int, seed: int = 0,
                              mode: str = "noise", period: int | None = None, window: tuple | None = None,
                              noise: float = 1.0, direction: int | None = None,
                              truncation: tuple | None = None) -> Pseudotrajectory:
    """Seeded delta-pseudotrajectory.

    ``noise`` mode adds uniform-ball perturbations of radius ``noise * delta``
    supported on ``window``; ``drift`` pushes every step by ``delta (1 - 1e-6)``
    along ``e_direction``; ``periodic`` draws ``period`` random defects and
    closes them into an exactly periodic pseudotrajectory (``x0`` is unused);
    ``bounded`` draws random defects and sums them forward on the stable part
    and backward on the unstable part of a hyperbolic splitting, so the points
    stay of size ``O(delta)`` (``x0`` is unused).
    """
    if not delta > 0:
        raise DomainError("delta must be positive")
    space = T.space
    rng = np.random.default_rng(seed)
    lo, hi = window if window is not None else _default_window(space)
    radius = delta * (1 - NOISE_MARGIN)

    def ball_noise(scale: float):
        d = hi - lo + 1
        g = rng.standard_normal(d)
        norm = float(np.linalg.norm(g))
        if norm == 0 or scale == 0:
            return zero_vector(space)
        u = CoordinateVector.from_dense(space, g / norm, lo)
        r = scale * rng.uniform() ** (1.0 / d)
        return _scale_to(u, r)

    if mode == "noise":
        pts = [x0]
        for _ in range(horizon):
            pts.append(apply(T, pts[-1]) + ball_noise(radius * noise))
        return make_pseudotrajectory(T, pts, delta, provenance=f"random-perturbation seed {seed}")
    if mode == "drift":
        n = direction if direction is not None else lo
        step = _scale_to(CoordinateVector.basis(space, n), radius)
        pts = [x0]
        for _ in range(horizon):
            pts.append(apply(T, pts[-1]) + step)
        return make_pseudotrajectory(T, pts, delta, provenance=f"adversarial drift along e_{n}")
    if mode == "bounded":
        split = hyperbolic_splitting(T)
        ys = [split.split(ball_noise(radius * noise)) for _ in range(horizon)]
        fwd = [zero_vector(space)]
        for y1, _ in ys:
            fwd.append(apply(T, fwd[-1]) + y1)
        bwd = [zero_vector(space)]
        for _, y2 in reversed(ys):
            bwd.append(split.apply_s(bwd[-1] - y2))
        bwd.reverse()
        pts = [f + b for f, b in zip(fwd, bwd)]
        return make_pseudotrajectory(T, pts, delta, provenance=f"bounded random seed {seed}")
    if mode == "periodic":
        if not period or period < 1:
            raise DomainError("periodic mode needs a period >= 1")
        margin = 1e-4 if space.index_set != "finite" else NOISE_MARGIN
        ys = [ball_noise(delta * (1 - margin) * noise) for _ in range(period)]
        x_start = _periodic_start(T, ys, truncation)
        pts = [x_start]
        for n in range(period - 1):
            pts.append(_truncate(apply(T, pts[-1]), truncation) + ys[n])
        return make_pseudotrajectory(T, pts, delta, period=period, provenance=f"random periodic seed {seed}")
    raise DomainError(f"unknown mode {mode!r}")


def _truncate(x, truncation):
    if truncation is None or not isinstance(x, CoordinateVector):
        return x
    lo, hi = truncation
    keep = (x.indices >= lo) & (x.indices <= hi)
    return CoordinateVector(x.indices[keep], x.values[keep], x.space)


def _periodic_start(T: OperatorDescriptor, ys: list, truncation) -> CoordinateVector:
    """Solve ``(I - T^p) x_0 = sum_j T^{p-1-j} y_j`` for the periodic start point."""
    p = len(ys)
    space = T.space
    c = zero_vector(space)
    for y in ys:
        c = _truncate(apply(T, c), truncation) + y
    if space.index_set == "finite":
        A = dense_matrix(T)
        d = A.shape[0]
        M = np.eye(d) - np.linalg.matrix_power(A, p)
        sol = np.linalg.solve(M, c.to_dense(0, d - 1))
        return CoordinateVector.from_dense(space, sol, 0)
    inner = T
    if isinstance(inner, Diagonal):
        ent = inner.entries(c.indices)
        return CoordinateVector(c.indices, c.values / (1 - ent ** p), space)
    if as_weighted_shift(T) is None:
        raise DomainError("periodic generation supports finite matrices, diagonals and shifts")
    if truncation is None:
        raise DomainError("periodic generation on a shift needs a truncation window")
    # the truncated shift is nilpotent: sum_k T^{kp} c terminates
    total, cur = c, c
    for _ in range(100_000):
        for _ in range(p):
            cur = _truncate(apply(T, cur), truncation)
        if cur.is_zero:
            return total
        total = total + cur
    raise ConstructionError("truncated periodic series did not terminate")


# -----------------------------------------------------------------------------
# shadow certificates
# -----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class ShadowCertificate:
    point: object
    epsilon: float
    horizon: tuple
    max_error: Interval
    periodic_residual: float | None = None
    errors: tuple = field(default=(), repr=False)
    notes: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ShadowRejection:
    index: int
    error: Interval
    status: Tri

    def __bool__(self) -> bool:
        return False


def orbit_window(T: OperatorDescriptor, x, lo: int, hi: int) -> dict:
    """``{j: T^j x}`` for ``lo <= j <= hi`` (negative powers through the inverse)."""
    out = {}
    if lo < 0:
        if not T.invertible:
            raise DomainError("negative indices need an invertible operator")
        cur = x
        for j in range(-1, lo - 1, -1):
            cur = apply_inverse(T, cur)
            if j <= hi:
                out[j] = cur
    cur = x
    for j in range(0, hi + 1):
        if j > 0:
            cur = apply(T, cur)
        if j >= lo:
            out[j] = cur
    return out


def verify_shadowing(T: OperatorDescriptor, pt: Pseudotrajectory, x, epsilon: float,
                     horizon: tuple | None = None) -> ShadowCertificate | ShadowRejection:
    """Certify ``d(x_j, T^j x) < epsilon`` on the window (several periods for periodic input)."""
    lo, hi = horizon if horizon is not None else (pt.start, pt.end)
    orbit = orbit_window(T, x, lo, hi)
    errs = []
    for j in range(lo, hi + 1):
        iv = norm_interval(pt[j] - orbit[j])
        verdict = iv.lt(epsilon)
        if verdict is not Tri.YES:
            return ShadowRejection(j, iv, verdict)
        errs.append(iv)
    top = Interval(max(e.lo for e in errs), max(e.hi for e in errs))
    return ShadowCertificate(x, float(epsilon), (lo, hi), top, None, tuple(errs))


def _require_certificate(out, what: str) -> ShadowCertificate:
    if isinstance(out, ShadowRejection):
        raise ConstructionError(f"{what} failed verification", index=out.index, error=str(out.error))
    return out


def shadow_hyperbolic_split(T: OperatorDescriptor, split: HyperbolicSplitting, pt: Pseudotrajectory,
                            n_tail: int | None = None, epsilon: float | None = None) -> ShadowCertificate:
    """Shadow ``x = x_0 + sum_{j>=1} S^j y^(2)_{j-1}`` for a finite pseudotrajectory over N_0."""
    if pt.start != 0 or pt.period is not None:
        raise DomainError("expected a finite pseudotrajectory indexed from 0")
    ys = pt.defects()
    parts = [split.split(y) for y in ys]
    depth = len(ys) if n_tail is None else min(n_tail, len(ys))
    acc = zero_vector(T.space)
    for j in range(depth, 0, -1):
        acc = split.apply_s(acc + parts[j - 1][1])
    x = pt.points[0] + acc
    a, b, t = split.alpha, split.beta, split.t
    sup_y2 = max((seminorm_eval(p[1], 1) for p in parts[depth:]), default=0.0)
    tail = b * t ** (depth + 1) * sup_y2 / (1 - t) if depth < len(ys) else 0.0
    guarantee = 3 * a * b * pt.max_defect / (1 - t) + tail
    if pt.max_defect == 0:
        guarantee = max(guarantee, 1e-300)
    if epsilon is not None and guarantee >= epsilon:
        need = depth
        while need < len(ys) and b * t ** (need + 1) * sup_y2 / (1 - t) + guarantee - tail >= epsilon:
            need += 1
        raise ConstructionError("tail bound exceeds the requested epsilon", required_n_tail=need, bound=guarantee)
    target = guarantee if epsilon is None else epsilon
    cert = _require_certificate(verify_shadowing(T, pt, x, target * (1 + 1e-9) + 1e-300), "split shadow")
    return ShadowCertificate(x, cert.epsilon, cert.horizon, cert.max_error, None, cert.errors,
                             {"guarantee": guarantee, "tail": tail, "depth": depth})


def periodic_depth(split: HyperbolicSplitting, sup_y: float, tail_tol: float) -> int:
    """Smallest ``J`` with ``alpha beta t^(J+1) sup|y| / (1 - t) <= tail_tol``."""
    a, b, t = split.alpha, split.beta, split.t
    if sup_y == 0:
        return 0
    need = math.log(tail_tol * (1 - t) / (a * b * sup_y)) / math.log(t) - 1
    return max(0, math.ceil(need))


def construct_periodic_shadow(T: OperatorDescriptor, split: HyperbolicSplitting, pt: Pseudotrajectory,
                              depth: int | None = None, tail_tol: float = 1e-14,
                              max_depth: int = 100_000, periods_checked: int = 2) -> ShadowCertificate:
    """Periodic shadow ``x_0 + sum_j S^j y^(2)_{j-1} - sum_m T^m y^(1)_{(-m-1) mod p}``.

    Both series are evaluated by Horner recursion after grouping the
    ``p``-periodic defects by residue; the truncation tails are bounded by
    ``alpha beta t^(J+1) sup|y| / (1 - t)`` each.  ``T^n`` undoes ``n`` powers
    of ``S`` in the first tail, so the default depth adds the checked horizon
    to keep the tail below ``tail_tol`` along the whole verified window.
    """
    if pt.period is None:
        raise DomainError("expected a periodic pseudotrajectory")
    p = pt.period
    ys = pt.defects()
    parts = [split.split(y) for y in ys]
    sup_y = max((seminorm_eval(y, 1) for y in ys), default=0.0)
    J = periodic_depth(split, sup_y, tail_tol) + periods_checked * p if depth is None else depth
    if J > max_depth:
        raise ConstructionError("series tail exceeds tolerance at the truncation budget", required_depth=J)
    space = T.space
    a_acc = zero_vector(space)
    for j in range(J, 0, -1):
        a_acc = split.apply_s(a_acc + parts[(j - 1) % p][1])
    b_acc = zero_vector(space)
    for m in range(J, -1, -1):
        b_acc = parts[(-m - 1) % p][0] + (apply(T, b_acc) if m < J else b_acc)
    x = pt.points[0] + a_acc - b_acc
    a, b, t = split.alpha, split.beta, split.t
    tail = 2 * a * b * t ** (J + 1) * sup_y / (1 - t) if sup_y else 0.0
    cur = x
    for _ in range(p):
        cur = apply(T, cur)
    residual = seminorm_eval(cur - x, 1)
    guarantee = 3 * a * b * pt.max_defect / (1 - t) + tail
    horizon = (0, periods_checked * p)
    cert = _require_certificate(verify_shadowing(T, pt, x, max(guarantee, 1e-300) * (1 + 1e-9) + 1e-300,
                                                 horizon), "periodic shadow")
    return ShadowCertificate(x, cert.epsilon, horizon, cert.max_error, residual, cert.errors,
                             {"guarantee": guarantee, "tail": tail, "depth": J, "period": p})


# -----------------------------------------------------------------------------
# finite shadowing solvers
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class LSResult:
    point: object
    sup_error: float
    linearity: float
    chain_delta: float


def _window_matrix(T: OperatorDescriptor, lo: int, hi: int) -> np.ndarray:
    space = T.space
    if space.index_set == "finite":
        return dense_matrix(T)
    d = hi - lo + 1
    A = np.zeros((d, d), dtype=complex)
    for c in range(d):
        img = apply(T, CoordinateVector.basis(space, lo + c))
        keep = (img.indices >= lo) & (img.indices <= hi)
        A[img.indices[keep] - lo, c] = img.values[keep]
    return A


def _support_hull(points) -> tuple[int, int]:
    idx = np.concatenate([p.indices for p in points if not p.is_zero] or [np.array([0])])
    return int(idx.min()), int(idx.max())


def finite_shadow_least_squares(T: OperatorDescriptor, chain, epsilon: float,
                                window: tuple | None = None, margin: int = 10) -> LSResult:
    """Minimize ``sum_j ||x_j - T^j x||^2`` over ``x`` in a coordinate window.

    Fails with :class:`ConstructionError` when the best fit misses some
    ``x_j`` by ``epsilon`` or more.
    """
    points = tuple(chain.points)
    space = T.space
    if not isinstance(points[0], CoordinateVector):
        raise DomainError("least squares works on coordinate vectors")
    if space.index_set == "finite":
        lo, hi = 0, space.dim - 1
    elif window is not None:
        lo, hi = window
    else:
        a, b = _support_hull(points)
        lo = a - margin if space.index_set == "Z" else max(space.origin, a - margin)
        hi = b + margin + len(points)
    A = _window_matrix(T, lo, hi)
    d = A.shape[0]
    n = len(points)
    blocks, rhs = [], []
    P = np.eye(d, dtype=complex)
    scale = []
    for j in range(n):
        s = max(1.0, float(np.abs(P).max()))
        blocks.append(P)
        rhs.append(points[j].to_dense(lo, hi))
        scale.append(s)
        P = A @ P
    M = np.vstack(blocks)
    bvec = np.concatenate(rhs)
    sol, *_ = np.linalg.lstsq(M, bvec, rcond=None)
    if np.all(np.isreal(A)) and all(np.all(p.values.imag == 0) for p in points):
        sol = sol.real
    x = CoordinateVector.from_dense(space, sol, lo)
    orbit = x
    sup = 0.0
    for j in range(n):
        if j:
            orbit = apply(T, orbit)
        sup = max(sup, norm_interval(points[j] - orbit).hi)
    step = max((e.hi for e in getattr(chain, "step_errors", ())), default=getattr(chain, "delta", 0.0))
    L = sup / step if step > 0 else (0.0 if sup == 0 else math.inf)
    if sup >= epsilon:
        raise ConstructionError("least-squares shadow misses epsilon", sup_error=sup, epsilon=epsilon, linearity=L)
    return LSResult(x, sup, L, step)


class FiniteShadowSolver:
    """Contract: ``solver(T, points, eps)`` returns ``x`` with ``d(points[j], T^j x) < eps``
    whenever the points form a ``delta``-chain with ``delta <= eps / L``."""

    L: float = 1.0

    def __call__(self, T: OperatorDescriptor, points: Sequence, eps: float):  # pragma: no cover - interface
        raise NotImplementedError

    def shadow_at(self, T: OperatorDescriptor, points: Sequence, eps: float, index: int):
        """``T^index x`` for the shadow ``x`` of ``points``."""
        return apply_power(T, self(T, points, eps), index)


class SplittingSolver(FiniteShadowSolver):
    """Explicit backward-series shadow from a hyperbolic splitting."""

    def __init__(self, split: HyperbolicSplitting):
        self.split = split
        self.L = 3 * split.alpha * split.beta / (1 - split.t)

    def __call__(self, T, points, eps):
        split = self.split
        ys = [points[j + 1] - apply(T, points[j]) for j in range(len(points) - 1)]
        acc = zero_vector(T.space)
        for j in range(len(ys), 0, -1):
            acc = split.apply_s(acc + split.split(ys[j - 1])[1])
        return points[0] + acc

    def shadow_at(self, T, points, eps, index):
        # Pushing the shadow forward through the unstable part would amplify its
        # rounding.  Unrolled, T^index x = x_index - sum_{i<index} T^(index-1-i) y1_i
        # + sum_{i>=index} S^(i-index+1) y2_i, where T only meets stable parts.
        split = self.split
        parts = [split.split(points[j + 1] - apply(T, points[j])) for j in range(len(points) - 1)]
        back = zero_vector(T.space)
        for j in range(len(parts), index, -1):
            back = split.apply_s(back + parts[j - 1][1])
        fwd = zero_vector(T.space)
        for i in range(index):
            fwd = apply(T, fwd) + parts[i][0]
        return points[index] - fwd + back


class LeastSquaresSolver(FiniteShadowSolver):
    def __init__(self, L: float = 4.0):
        self.L = L

    def __call__(self, T, points, eps):
        return finite_shadow_least_squares(T, _Points(points), eps).point


@dataclass(frozen=True)
class _Points:
    points: tuple
    delta: float = 0.0


def solver_for(T: OperatorDescriptor) -> FiniteShadowSolver:
    """Splitting formula when a splitting exists, least squares otherwise."""
    try:
        return SplittingSolver(hyperbolic_splitting(T))
    except DomainError:
        return LeastSquaresSolver()


# -----------------------------------------------------------------------------
# finite-to-infinite bootstrap
# -----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class BootstrapResult:
    stages: tuple  # v_1 .. v_K
    m: tuple  # m_1 .. m_K
    p: int
    gaps: tuple  # ||v_k - v_{k+1}|| upper bounds, k = 1 .. K-1
    gap_bounds: tuple  # eps / 2^{k+2}
    closeness: tuple  # sup_j ||y^(k)_j - y^(k-1)_j||, k = 2 .. K
    stage_defects: tuple  # sup defect of y^(k), to compare with delta / 2^{k-1}
    certificate: ShadowCertificate


class _Layered:
    """The pseudotrajectories ``y^(k)`` of the induction, evaluated lazily."""

    def __init__(self, T, pt: Pseudotrajectory, bilateral: bool):
        self.T = T
        self.pt = pt
        self.bilateral = bilateral
        self.base: dict[int, object] = {j: pt[j] for j in range(pt.start, pt.end + 1)}
        self.layers: list[tuple[int, int, dict]] = []  # (m_t, p, orbit of v_t)

    def y1(self, j: int):
        if j in self.base:
            return self.base[j]
        if j > self.pt.end:
            cur = self.y1(j - 1)
            val = apply(self.T, cur)
        else:
            cur = self.y1(j + 1)
            val = apply_inverse(self.T, cur)
        self.base[j] = val
        return val

    def y(self, k: int, j: int):
        """``y^(k)_j``."""
        for t in range(k - 1, 0, -1):
            m_t, p, orbit = self.layers[t - 1]
            aj = abs(j)
            if aj <= m_t:
                return orbit[j]
            if aj < m_t + p:
                return orbit[j] * ((m_t + p - aj) / p) + self.y(t, j) * ((aj - m_t) / p)
        return self.y1(j)


def finite_to_infinite_shadow(T: OperatorDescriptor, solver: FiniteShadowSolver, pt: Pseudotrajectory,
                              epsilon: float, stages: int = 5) -> BootstrapResult:
    """Run the finite-to-infinite induction and certify its stage bounds.

    ``pt`` is a window pseudotrajectory whose defects vanish outside the
    window: it is extended by exact forward (and, for invertible ``T``,
    backward) orbits of its end points.
    """
    bilateral = bool(T.invertible)
    if not bilateral and pt.start < 0:
        raise DomainError("negative indices need an invertible operator")
    exact = pt.max_defect <= 1e-290  # only the verification floor: an exact trajectory
    delta = 1e-300 if exact else pt.max_defect
    if delta > epsilon / (4 * solver.L) * (1 + 1e-12):
        raise DomainError(f"pseudotrajectory defect {delta:g} exceeds eps/(4L) = {epsilon / (4 * solver.L):g}")
    p = 1 if exact else math.ceil(epsilon / delta) + 1
    lay = _Layered(T, pt, bilateral)
    lo_idx = (lambda R: -R) if bilateral else (lambda R: 0)
    extent = max(abs(pt.start), abs(pt.end))

    def defect(k: int, j: int) -> float:
        return norm_interval(apply(T, lay.y(k, j)) - lay.y(k, j + 1)).hi

    def choose_m(k: int, previous: int) -> tuple[int, float]:
        reach = max(previous + p, extent) + 2
        bound = delta / 2 ** (k + 1)
        worst, last_big = 0.0, 0
        for j in range(lo_idx(reach), reach + 1):
            dj = defect(k, j)
            worst = max(worst, dj)
            if dj >= bound:
                last_big = max(last_big, abs(j) + 1)
        return max(previous + 1, last_big, 1), worst

    vs, ms, stage_def, close = [], [], [], []
    m_prev = 0
    for k in range(1, stages + 1):
        m_k, worst = choose_m(k, m_prev)
        stage_def.append(worst)
        if worst > delta / 2 ** (k - 1) * (1 + 1e-9) + 1e-15:
            raise ConstructionError("stage pseudotrajectory too coarse", stage=k, defect=worst,
                                    bound=delta / 2 ** (k - 1))
        R = m_k + p
        lo = lo_idx(R)
        pts = [lay.y(k, j) for j in range(lo, R + 1)]
        v = solver.shadow_at(T, pts, epsilon / 2 ** (k + 1), -lo)
        orbit = orbit_window(T, v, lo, R)
        worst_d = max(norm_interval(lay.y(k, j) - orbit[j]).hi for j in range(lo, R + 1))
        if worst_d >= epsilon / 2 ** (k + 1):
            raise ConstructionError("solver missed the stage tolerance", stage=k, error=worst_d,
                                    bound=epsilon / 2 ** (k + 1))
        if k >= 2:
            m_p = ms[-1]
            region = range(lo_idx(m_p + p), m_p + p + 1)
            c = max((norm_interval(lay.y(k, j) - lay.y(k - 1, j)).hi for j in region), default=0.0)
            if c >= epsilon / 2 ** k:
                raise ConstructionError("stage closeness violated", stage=k, closeness=c, bound=epsilon / 2 ** k)
            close.append(c)
        vs.append(v)
        ms.append(m_k)
        lay.layers.append((m_k, p, orbit))
        m_prev = m_k
    gaps = tuple(norm_interval(vs[i] - vs[i + 1]).hi for i in range(len(vs) - 1))
    bounds = tuple(epsilon / 2 ** (i + 3) for i in range(len(vs) - 1))
    cert = _require_certificate(verify_shadowing(T, pt, vs[-1], epsilon), "bootstrap final point")
    return BootstrapResult(tuple(vs), tuple(ms), p, gaps, bounds, tuple(close), tuple(stage_def), cert)


# -----------------------------------------------------------------------------
# classification of weighted shifts
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class ShadowingClassification:
    positive_shadowing: Tri
    generalized_hyperbolic: Tri
    hyperbolic: Tri
    periodic_shadowing: Tri
    matched_condition: str
    limits: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {"condition": self.matched_condition, "shadowing": self.positive_shadowing.value,
                "generalized_hyperbolic": self.generalized_hyperbolic.value,
                "hyperbolic": self.hyperbolic.value, "periodic_shadowing": self.periodic_shadowing.value}


def classify_shadowing(T: OperatorDescriptor) -> ShadowingClassification:
    """Match the uniform geometric-mean limits of the weights against the shadowing conditions."""
    S = as_weighted_shift(T)
    if S is None:
        raise DomainError("classify_shadowing expects a weighted shift")
    space = S.space
    if not (space.is_banach and space.source == "norm" and space.transport is None):
        raise DomainError("the shadowing characterization covers weighted shifts on l^p and c0")
    w = S.weight
    if w.power > 0:
        raise DomainError("weights must be bounded")
    U = Tri.UNDECIDED
    if not S.bilateral:
        g = gm_limits(w, "unilateral")
        limits = {"limsup": g.limsup_gm, "liminf": g.liminf_gm}
        if not g.decided:
            return ShadowingClassification(U, U, U, U, "undecided", limits)
        if g.limsup_gm < 1:
            return ShadowingClassification(Tri.YES, Tri.YES, Tri.YES, Tri.YES, "(a)", limits)
        if g.liminf_gm > 1:
            return ShadowingClassification(Tri.YES, Tri.YES, Tri.NO, Tri.YES, "(b)", limits)
        return ShadowingClassification(Tri.NO, Tri.NO, Tri.NO, Tri.NO, "none", limits)
    if w.power < 0:
        raise DomainError("bilateral characterization needs inf |w_n| > 0")
    allk = gm_limits(w, "bilateral-all-k")
    neg = gm_limits(w, "bilateral-neg")
    pos = gm_limits(w, "bilateral-pos")
    limits = {"sup_all": allk.limsup_gm, "inf_all": allk.liminf_gm, "neg": neg.limsup_gm, "pos": pos.liminf_gm}
    if not (allk.decided and neg.decided and pos.decided):
        return ShadowingClassification(U, U, U, U, "undecided", limits)
    if allk.limsup_gm < 1:
        return ShadowingClassification(Tri.YES, Tri.YES, Tri.YES, Tri.YES, "(A)", limits)
    if allk.liminf_gm > 1:
        return ShadowingClassification(Tri.YES, Tri.YES, Tri.YES, Tri.YES, "(B)", limits)
    if neg.limsup_gm < 1 and pos.liminf_gm > 1:
        return ShadowingClassification(Tri.YES, Tri.YES, Tri.NO, Tri.YES, "(C)", limits)
    if neg.liminf_gm > 1 and pos.limsup_gm < 1:
        return ShadowingClassification(Tri.NO, Tri.NO, Tri.NO, Tri.YES, "expansive splitting", limits)
    return ShadowingClassification(Tri.NO, Tri.NO, Tri.NO, U, "none", limits)


from .entire import EntireDemo, entire_demo  # noqa: E402  (re-export)

__all__ = [
    "Pseudotrajectory", "make_pseudotrajectory", "generate_pseudotrajectory", "ShadowCertificate",
    "ShadowRejection", "verify_shadowing", "shadow_hyperbolic_split", "construct_periodic_shadow",
    "finite_shadow_least_squares", "LSResult", "FiniteShadowSolver", "SplittingSolver", "LeastSquaresSolver",
    "solver_for", "finite_to_infinite_shadow", "BootstrapResult", "ShadowingClassification",
    "classify_shadowing", "entire_demo", "EntireDemo", "orbit_window",
]
