"""Operator descriptors, their action on finitely supported vectors, and splittings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
import scipy.linalg

from .core import DomainError, Tri
from .spaces import (CoordinateVector, KoetheMatrix, ProductSpaceSpec, SequenceSpaceSpec, SumVector)
from .weights import GMLimits, WeightSpec, gm_limits

ROTATION_TOL = 1e-12


class OperatorDescriptor:
    """Base class of the operator algebra.  Subclasses are frozen dataclasses."""

    kind: str = "operator"

    @property
    def space(self):
        raise NotImplementedError

    @property
    def invertible(self) -> bool:
        return False

    def norm_bound(self) -> float:
        """An upper bound for the operator norm (Banach spaces)."""
        raise NotImplementedError

    def render(self) -> str:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __call__(self, x):
        return apply(self, x)


@dataclass(frozen=True)
class Shift(OperatorDescriptor):
    """Weighted backward shift ``B_w e_n = w_n e_{n-1}`` (unilateral: ``B_w e_origin = 0``)."""

    weight: WeightSpec
    ambient: SequenceSpaceSpec

    def __post_init__(self):
        if self.ambient.index_set == "finite":
            raise DomainError("shifts act on sequence spaces over N or Z")
        if self.bilateral and not self.weight.bilateral_ok:
            raise DomainError("bilateral shifts need a weight with a negative tail")

    @property
    def kind(self) -> str:  # type: ignore[override]
        return "bilateral_shift" if self.bilateral else "unilateral_shift"

    @property
    def bilateral(self) -> bool:
        return self.ambient.index_set == "Z"

    @property
    def space(self):
        return self.ambient

    @property
    def invertible(self) -> bool:
        return self.bilateral and self.weight.inf_abs > 0

    def norm_bound(self) -> float:
        if self.ambient.is_banach and self.ambient.source == "norm":
            return self.weight.sup_abs
        return math.inf

    def render(self) -> str:
        return f"{self.kind} {self.weight.render()}"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "weight": self.weight.to_dict()}


@dataclass(frozen=True)
class Diagonal(OperatorDescriptor):
    """Diagonal operator ``e_n -> d_n e_n`` with ``d_n = lam`` or ``d_n = weight.value(n)``."""

    ambient: SequenceSpaceSpec
    lam: complex | None = None
    weight: WeightSpec | None = None

    kind = "diagonal"

    def __post_init__(self):
        if (self.lam is None) == (self.weight is None):
            raise DomainError("Diagonal needs exactly one of lam and weight")
        if self.lam is not None:
            object.__setattr__(self, "lam", complex(self.lam))

    @property
    def space(self):
        return self.ambient

    def entries(self, idx: np.ndarray) -> np.ndarray:
        if self.lam is not None:
            return np.full(idx.shape, self.lam, dtype=complex)
        return self.weight.values(idx)

    def sup_abs(self) -> float:
        return abs(self.lam) if self.lam is not None else self.weight.sup_abs

    def inf_abs(self) -> float:
        return abs(self.lam) if self.lam is not None else self.weight.inf_abs

    @property
    def invertible(self) -> bool:
        return self.inf_abs() > 0

    def norm_bound(self) -> float:
        return self.sup_abs()

    def render(self) -> str:
        if self.lam is not None:
            return f"diagonal lam = {_fmt(self.lam)}"
        return f"diagonal {self.weight.render()}"

    def to_dict(self) -> dict:
        if self.lam is not None:
            return {"kind": "diagonal", "lam": _enc(self.lam)}
        return {"kind": "diagonal", "weight": self.weight.to_dict()}


@dataclass(frozen=True)
class ScalarMultiple(OperatorDescriptor):
    lam: complex
    child: OperatorDescriptor

    kind = "scalar"

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))

    @property
    def space(self):
        return self.child.space

    @property
    def invertible(self) -> bool:
        return self.lam != 0 and self.child.invertible

    def norm_bound(self) -> float:
        return abs(self.lam) * self.child.norm_bound()

    def render(self) -> str:
        return f"({_fmt(self.lam)}) * [{self.child.render()}]"

    def to_dict(self) -> dict:
        return {"kind": "scalar", "lam": _enc(self.lam), "child": self.child.to_dict()}


@dataclass(frozen=True)
class Power(OperatorDescriptor):
    n: int
    child: OperatorDescriptor

    kind = "power"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("power exponent must be an integer >= 1")

    @property
    def space(self):
        return self.child.space

    @property
    def invertible(self) -> bool:
        return self.child.invertible

    def norm_bound(self) -> float:
        return self.child.norm_bound() ** self.n

    def render(self) -> str:
        return f"[{self.child.render()}]^{self.n}"

    def to_dict(self) -> dict:
        return {"kind": "power", "n": self.n, "child": self.child.to_dict()}


@dataclass(frozen=True)
class Inverse(OperatorDescriptor):
    child: OperatorDescriptor

    kind = "inverse"

    def __post_init__(self):
        if not self.child.invertible:
            raise DomainError(f"{self.child.render()} is not invertible")

    @property
    def space(self):
        return self.child.space

    @property
    def invertible(self) -> bool:
        return True

    def norm_bound(self) -> float:
        c = self.child
        if isinstance(c, Shift):
            return 1.0 / c.weight.inf_abs if c.norm_bound() < math.inf else math.inf
        if isinstance(c, Diagonal):
            return 1.0 / c.inf_abs()
        if isinstance(c, FiniteMatrix):
            return float(np.linalg.norm(np.linalg.inv(c.array), 2))
        if isinstance(c, ScalarMultiple):
            return Inverse(c.child).norm_bound() / abs(c.lam)
        if isinstance(c, Power):
            return Inverse(c.child).norm_bound() ** c.n
        if isinstance(c, Inverse):
            return c.child.norm_bound()
        if isinstance(c, DirectSum):
            return max(Inverse(ch).norm_bound() for ch in c.children)
        return math.inf

    def render(self) -> str:
        return f"[{self.child.render()}]^-1"

    def to_dict(self) -> dict:
        return {"kind": "inverse", "child": self.child.to_dict()}


@dataclass(frozen=True)
class DirectSum(OperatorDescriptor):
    children: tuple

    kind = "direct_sum"

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 1:
            raise DomainError("direct sums need at least one summand")

    @property
    def space(self):
        return ProductSpaceSpec(tuple(c.space for c in self.children))

    @property
    def invertible(self) -> bool:
        return all(c.invertible for c in self.children)

    def norm_bound(self) -> float:
        return max(c.norm_bound() for c in self.children)

    def render(self) -> str:
        return " (+) ".join(f"[{c.render()}]" for c in self.children)

    def to_dict(self) -> dict:
        return {"kind": "direct_sum", "children": [c.to_dict() for c in self.children]}


@dataclass(frozen=True)
class FiniteMatrix(OperatorDescriptor):
    """Dense square matrix acting on the finite space ``K^d`` with the Euclidean norm."""

    entries: tuple
    real: bool = True

    kind = "matrix"

    def __post_init__(self):
        arr = np.atleast_2d(np.asarray(self.entries, dtype=complex))
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise DomainError("FiniteMatrix needs a square array")
        object.__setattr__(self, "entries", tuple(tuple(complex(v) for v in row) for row in arr))
        object.__setattr__(self, "real", bool(self.real and np.all(arr.imag == 0)))

    @classmethod
    def of(cls, arr) -> "FiniteMatrix":
        return cls(tuple(map(tuple, np.atleast_2d(np.asarray(arr)))))

    @property
    def array(self) -> np.ndarray:
        arr = np.array(self.entries, dtype=complex)
        return arr.real.copy() if self.real else arr

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def space(self):
        return SequenceSpaceSpec.finite(self.dim, real=self.real)

    @property
    def invertible(self) -> bool:
        return abs(np.linalg.det(self.array)) > 1e-300 and np.linalg.cond(self.array) < 1e14

    def norm_bound(self) -> float:
        return float(np.linalg.norm(self.array, 2))

    def render(self) -> str:
        rows = "; ".join(" ".join(_fmt(v) for v in row) for row in self.entries)
        return f"matrix [{rows}]"

    def to_dict(self) -> dict:
        return {"kind": "matrix", "entries": [[_enc(v) for v in row] for row in self.entries]}


def _fmt(v: complex) -> str:
    v = complex(v)
    if v.imag == 0:
        return f"{v.real:g}"
    return f"{v.real:g}{v.imag:+g}j"


def _enc(v: complex):
    v = complex(v)
    return v.real if v.imag == 0 else [v.real, v.imag]


def _dec(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


# -----------------------------------------------------------------------------
# constructors and (de)serialization
# -----------------------------------------------------------------------------
def unweighted_shift(space: SequenceSpaceSpec) -> Shift:
    return Shift(WeightSpec.constant(1.0, bilateral=space.index_set == "Z"), space)


def identity_multiple(lam: complex, space: SequenceSpaceSpec) -> OperatorDescriptor:
    if space.index_set == "finite":
        return FiniteMatrix.of(complex(lam) * np.eye(space.dim) if complex(lam).imag else
                               complex(lam).real * np.eye(space.dim))
    return Diagonal(space, lam=lam)


def operator_from_dict(d: Mapping, space: SequenceSpaceSpec | None) -> OperatorDescriptor:
    """Inverse of ``to_dict``; ``space`` is the ambient space of the leaves."""
    if not isinstance(d, Mapping) or "kind" not in d:
        raise DomainError("operator spec must be a mapping with a 'kind'")
    kind = d["kind"]
    if kind in ("unilateral_shift", "bilateral_shift", "shift"):
        if space is None:
            raise DomainError("shift operators need a space")
        w = WeightSpec.from_dict(d["weight"]) if "weight" in d else WeightSpec.constant(
            1.0, bilateral=space.index_set == "Z")
        expect = "bilateral_shift" if space.index_set == "Z" else "unilateral_shift"
        if kind != "shift" and kind != expect:
            raise DomainError(f"{kind} does not match the {space.index_set} index set")
        return Shift(w, space)
    if kind == "diagonal":
        if space is None:
            raise DomainError("diagonal operators need a space")
        if "lam" in d:
            return identity_multiple(_dec(d["lam"]), space)
        return Diagonal(space, weight=WeightSpec.from_dict(d["weight"]))
    if kind == "scalar":
        return ScalarMultiple(_dec(d["lam"]), operator_from_dict(d["child"], space))
    if kind == "power":
        return Power(int(d["n"]), operator_from_dict(d["child"], space))
    if kind == "inverse":
        return Inverse(operator_from_dict(d["child"], space))
    if kind == "direct_sum":
        return DirectSum(tuple(operator_from_dict(c, space) for c in d["children"]))
    if kind == "matrix":
        return FiniteMatrix(tuple(tuple(_dec(v) for v in row) for row in d["entries"]))
    raise DomainError(f"unknown operator kind {kind!r}")


# -----------------------------------------------------------------------------
# action on vectors
# -----------------------------------------------------------------------------
def apply(T: OperatorDescriptor, x):
    """Exact image ``T x`` of a finitely supported vector."""
    if isinstance(T, DirectSum):
        if not isinstance(x, SumVector) or len(x.parts) != len(T.children):
            raise DomainError("direct sums act on SumVector elements of matching arity")
        return SumVector(tuple(apply(c, p) for c, p in zip(T.children, x.parts)), x.space)
    if isinstance(T, ScalarMultiple):
        return apply(T.child, x) * T.lam
    if isinstance(T, Power):
        for _ in range(T.n):
            x = apply(T.child, x)
        return x
    if isinstance(T, Inverse):
        return apply_inverse(T.child, x)
    if not isinstance(x, CoordinateVector):
        raise DomainError("expected a CoordinateVector")
    if x.space != T.space:
        raise DomainError("vector and operator live in different spaces")
    if isinstance(T, Shift):
        idx, vals = x.indices, x.values
        if not T.bilateral:
            keep = idx > T.space.origin
            idx, vals = idx[keep], vals[keep]
        return CoordinateVector(idx - 1, vals * T.weight.values(idx), x.space)
    if isinstance(T, Diagonal):
        return CoordinateVector(x.indices, x.values * T.entries(x.indices), x.space)
    if isinstance(T, FiniteMatrix):
        dense = x.to_dense(0, T.dim - 1)
        return CoordinateVector.from_dense(x.space, T.array @ dense, 0)
    raise DomainError(f"unsupported operator kind {T.kind}")


def apply_inverse(T: OperatorDescriptor, x):
    if not T.invertible:
        raise DomainError(f"{T.render()} is not invertible")
    if isinstance(T, DirectSum):
        return SumVector(tuple(apply_inverse(c, p) for c, p in zip(T.children, x.parts)), x.space)
    if isinstance(T, ScalarMultiple):
        return apply_inverse(T.child, x) / T.lam
    if isinstance(T, Power):
        for _ in range(T.n):
            x = apply_inverse(T.child, x)
        return x
    if isinstance(T, Inverse):
        return apply(T.child, x)
    if isinstance(T, Shift):
        # B_w^{-1} e_n = e_{n+1} / w_{n+1}
        return CoordinateVector(x.indices + 1, x.values / T.weight.values(x.indices + 1), x.space)
    if isinstance(T, Diagonal):
        return CoordinateVector(x.indices, x.values / T.entries(x.indices), x.space)
    if isinstance(T, FiniteMatrix):
        dense = x.to_dense(0, T.dim - 1)
        return CoordinateVector.from_dense(x.space, np.linalg.solve(T.array, dense), 0)
    raise DomainError(f"unsupported operator kind {T.kind}")


def apply_power(T: OperatorDescriptor, x, n: int):
    for _ in range(n):
        x = apply(T, x)
    return x


def dense_matrix(T: OperatorDescriptor) -> np.ndarray:
    """The matrix of an operator on a finite space (direct sums become block diagonals)."""
    if isinstance(T, FiniteMatrix):
        return T.array
    if isinstance(T, ScalarMultiple):
        return T.lam * dense_matrix(T.child)
    if isinstance(T, Power):
        return np.linalg.matrix_power(dense_matrix(T.child), T.n)
    if isinstance(T, Inverse):
        return np.linalg.inv(dense_matrix(T.child))
    if isinstance(T, DirectSum):
        return scipy.linalg.block_diag(*(dense_matrix(c) for c in T.children))
    raise DomainError(f"{T.render()} is not a finite-dimensional operator")


def flatten_finite(T: OperatorDescriptor) -> FiniteMatrix:
    """Collapse a finite-dimensional descriptor tree into one :class:`FiniteMatrix`."""
    arr = dense_matrix(T)
    if np.all(np.abs(arr.imag) == 0):
        arr = arr.real
    return FiniteMatrix.of(arr)


# -----------------------------------------------------------------------------
# transforms
# -----------------------------------------------------------------------------
def transform(T: OperatorDescriptor, op: str, arg=None) -> OperatorDescriptor:
    """Wrap ``T`` as ``T^n``, ``lam T`` (``|lam| = 1``), ``T^{-1}`` or ``T (+) U``."""
    if op == "power":
        n = int(arg)
        if n < 1:
            raise DomainError("power exponent must be >= 1")
        return T if n == 1 else Power(n, T)
    if op == "rotate":
        lam = complex(arg)
        if abs(abs(lam) - 1) > ROTATION_TOL:
            raise DomainError(f"rotation needs |lambda| = 1, got {abs(lam)!r}")
        return ScalarMultiple(lam, T)
    if op == "inverse":
        return Inverse(T)
    if op == "direct_sum":
        if not isinstance(arg, OperatorDescriptor):
            raise DomainError("direct_sum needs an operator argument")
        return DirectSum((T, arg))
    raise DomainError(f"unknown transform {op!r}")


def as_weighted_shift(T: OperatorDescriptor) -> Shift | None:
    """Fold scalar multiples into the weights; ``None`` if ``T`` is not a multiple of a shift."""
    lam = 1.0 + 0j
    while isinstance(T, ScalarMultiple):
        lam *= T.lam
        T = T.child
    if isinstance(T, Shift):
        return T if lam == 1 else Shift(T.weight.scaled(lam), T.ambient)
    return None


# -----------------------------------------------------------------------------
# weight analysis
# -----------------------------------------------------------------------------
def weight_product(w: WeightSpec, k: int, n: int) -> tuple[float, float]:
    """``(|w_k ... w_{k+n}|, arg)``; magnitude may be ``inf`` when it overflows."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    mag, ph = w.log_product(k, k + n)
    return (math.exp(mag) if mag < 709 else math.inf), ph


def transport_conjugacy(w: WeightSpec, space: SequenceSpaceSpec) -> SequenceSpaceSpec:
    """The space ``X_v`` on which ``B`` is conjugate to ``B_w`` on ``space``."""
    if space.transport is not None:
        raise DomainError("space already carries a transport")
    if space.index_set == "finite":
        raise DomainError("transport needs a sequence space over N or Z")
    if space.index_set == "Z" and not w.bilateral_ok:
        raise DomainError("bilateral transport needs a bilateral weight")
    return space.with_transport(w)


@dataclass(frozen=True)
class ContinuityVerdict:
    verdict: Tri
    witnesses: tuple  # (n, m, sup estimate) per n, or (n, None, reason)


def continuity_check_koethe(w: WeightSpec, A: KoetheMatrix, k_max: int = 20, scan: int = 400) -> ContinuityVerdict:
    """Decide ``for all n exists m > n : sup_i |w_{i+1}| a_{i,n} / a_{i+1,m} < inf``.

    Boundedness in ``i`` is read off the growth signature of the quotient; the
    reported sup is the maximum over the first ``scan`` rows (exact when the
    signature decays).
    """
    if w.irregular:
        return ContinuityVerdict(Tri.UNDECIDED, ((None, None, "irregular weight"),))
    ws = w.growth_single("pos")
    witnesses = []
    verdicts = []
    i = np.arange(1, scan + 1)
    wlog = np.log(np.abs(w.values(i + 1)))
    for n in range(1, k_max):
        gn = A.growth(n)
        found = None
        undecided = gn is None
        for m in range(n + 1, k_max + 1):
            gm = A.growth(m)
            if gn is None or gm is None:
                undecided = True
                continue
            num = A.log_entries(i, n)
            den = A.log_entries(i + 1, m)
            with np.errstate(invalid="ignore"):
                terms = np.where(np.isneginf(num), -np.inf, wlog + num - den)
            if np.any(np.isposinf(terms)):
                continue
            if gn.degenerate < 0:
                bounded = True
            elif gm.degenerate < 0:
                bounded = False
            else:
                q = ws + gn - gm
                bounded = q is not None and q.trend() <= 0
            if bounded:
                found = (n, m, float(np.exp(np.max(terms))))
                break
        if found is not None:
            witnesses.append(found)
            verdicts.append(Tri.YES)
        elif undecided:
            witnesses.append((n, None, "unclassifiable asymptotics"))
            verdicts.append(Tri.UNDECIDED)
        else:
            witnesses.append((n, None, f"unbounded for every m <= {k_max}"))
            verdicts.append(Tri.NO)
    if any(v is Tri.NO for v in verdicts):
        verdict = Tri.NO
    elif all(v is Tri.YES for v in verdicts):
        verdict = Tri.YES
    else:
        verdict = Tri.UNDECIDED
    return ContinuityVerdict(verdict, tuple(witnesses))


# -----------------------------------------------------------------------------
# hyperbolic splittings
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class HyperbolicSplitting:
    """A splitting ``X = M (+) N`` with ``||T^n y|| <= beta t^n ||y||`` on ``M``
    and ``||S^n z|| <= beta t^n ||z||`` on ``N`` where ``S = (T|_N)^{-1}|_N``.

    Coordinate splittings (shifts, diagonals) carry ``in_m``, a predicate on
    indices; matrix splittings carry projector matrices and the matrix of
    ``S`` (acting on ``N``).
    """

    operator: OperatorDescriptor
    m_description: str
    n_description: str
    alpha: float
    beta: float
    t: float
    c: float = 1.0
    in_m: Callable | None = field(default=None, compare=False, repr=False)
    proj_m: np.ndarray | None = field(default=None, compare=False, repr=False)
    s_matrix: np.ndarray | None = field(default=None, compare=False, repr=False)
    beta_window: int = 0

    def __post_init__(self):
        if not (0 < self.t < 1):
            raise DomainError(f"contraction rate t={self.t} outside (0, 1)")
        if self.alpha < 1 - 1e-12 or self.beta < 1 - 1e-12:
            raise DomainError("alpha and beta must be >= 1")

    def split(self, x: CoordinateVector) -> tuple[CoordinateVector, CoordinateVector]:
        """``(x^(1), x^(2))`` with ``x^(1)`` in ``M`` and ``x^(2)`` in ``N``."""
        if self.in_m is not None:
            mask = self.in_m(x.indices)
            m = CoordinateVector(x.indices[mask], x.values[mask], x.space)
            return m, x - m
        dense = x.to_dense(0, self.proj_m.shape[0] - 1)
        pm = self.proj_m @ dense
        return (CoordinateVector.from_dense(x.space, pm, 0), CoordinateVector.from_dense(x.space, dense - pm, 0))

    def apply_s(self, z: CoordinateVector) -> CoordinateVector:
        """``S z`` for ``z`` in ``N``."""
        T = self.operator
        if self.s_matrix is not None:
            dense = z.to_dense(0, self.s_matrix.shape[0] - 1)
            return CoordinateVector.from_dense(z.space, self.s_matrix @ dense, 0)
        if isinstance(T, Shift):
            return CoordinateVector(z.indices + 1, z.values / T.weight.values(z.indices + 1), z.space)
        if isinstance(T, Diagonal):
            return CoordinateVector(z.indices, z.values / T.entries(z.indices), z.space)
        raise DomainError("no S available for this splitting")

    def summary(self) -> dict:
        return {"M": self.m_description, "N": self.n_description, "alpha": self.alpha,
                "beta": self.beta, "t": self.t, "c": self.c, "beta_window": self.beta_window}


def _shift_splitting(T: Shift) -> HyperbolicSplitting:
    w = T.weight
    if not (T.space.is_banach and T.space.source == "norm" and T.space.transport is None):
        raise DomainError("shift splittings are computed on plain l^p / c0 spaces")
    if w.irregular or w.power:
        raise DomainError("splitting constants need bounded eventually periodic weights")
    o = T.space.origin
    if not T.bilateral:
        g = w.cycle_gm("pos")
        if g < 1:
            beta = w.window_sup(o + 1, None, g)
            return HyperbolicSplitting(T, "all coordinates", "{0}", 1.0, beta, g, in_m=_all)
        if g > 1:
            t = 1.0 / g
            beta = w.window_sup(o + 2, None, t, invert=True)
            return HyperbolicSplitting(T, f"span(e_{o})", f"coordinates >= {o + 1}", 1.0, beta, t,
                                       in_m=lambda idx, o=o: idx <= o)
        raise DomainError("unilateral shift with cycle geometric mean 1 has no hyperbolic splitting")
    gn, gp = w.cycle_gm("neg"), w.cycle_gm("pos")
    if max(gn, gp) < 1:
        t = max(gn, gp)
        return HyperbolicSplitting(T, "all coordinates", "{0}", 1.0, w.window_sup(None, None, t), t, in_m=_all)
    if min(gn, gp) > 1:
        t = 1.0 / min(gn, gp)
        return HyperbolicSplitting(T, "{0}", "all coordinates", 1.0, w.window_sup(None, None, t, invert=True), t,
                                   in_m=_none)
    if gn < 1 < gp:
        t = max(gn, 1.0 / gp)
        beta = max(w.window_sup(None, -1, t), w.window_sup(1, None, t, invert=True))
        return HyperbolicSplitting(T, "coordinates < 0", "coordinates >= 0", 1.0, beta, t,
                                   in_m=lambda idx: idx < 0)
    raise DomainError("weights admit no generalized hyperbolic splitting")


def _all(idx):
    return np.ones(idx.shape, dtype=bool)


def _none(idx):
    return np.zeros(idx.shape, dtype=bool)


def _diagonal_splitting(T: Diagonal) -> HyperbolicSplitting:
    if T.lam is not None:
        a = abs(T.lam)
        if a < 1:
            return HyperbolicSplitting(T, "all coordinates", "{0}", 1.0, 1.0, a, in_m=_all)
        if a > 1:
            return HyperbolicSplitting(T, "{0}", "all coordinates", 1.0, 1.0, 1.0 / a, in_m=_none)
        raise DomainError("unimodular diagonal has no hyperbolic splitting")
    w = T.weight
    if w.irregular or w.power:
        raise DomainError("diagonal splitting needs bounded eventually periodic entries")
    mags = w._all_magnitudes()
    if any(abs(m - 1) <= 1e-12 for m in mags):
        raise DomainError("unimodular diagonal entry prevents a hyperbolic splitting")
    t = max([m for m in mags if m < 1] + [1.0 / m for m in mags if m > 1])
    return HyperbolicSplitting(T, "coordinates with |d_n| < 1", "coordinates with |d_n| > 1", 1.0, 1.0, t,
                               in_m=lambda idx, w=w: np.abs(w.values(idx)) < 1)


def _matrix_splitting(A: np.ndarray, T: OperatorDescriptor, window: int = 400) -> HyperbolicSplitting:
    d = A.shape[0]
    eig = np.linalg.eigvals(A)
    if np.any(np.abs(np.abs(eig) - 1) < 1e-9):
        raise DomainError("matrix has a unimodular eigenvalue; no hyperbolic splitting")
    k = int(np.sum(np.abs(eig) < 1))
    Ac = A.astype(complex)
    _, qm, _ = scipy.linalg.schur(Ac, output="complex", sort="iuc")
    _, qn, _ = scipy.linalg.schur(Ac, output="complex", sort="ouc")
    QM, QN = qm[:, :k], qn[:, :d - k]
    basis = np.hstack([QM, QN])
    inv = np.linalg.inv(basis)
    proj_m = QM @ inv[:k, :]
    alpha = max(1.0, float(np.linalg.norm(proj_m, 2)), float(np.linalg.norm(np.eye(d) - proj_m, 2)))
    # T|_M and S = (T|_N)^{-1} in the orthonormal bases QM, QN
    RM = QM.conj().T @ Ac @ QM
    RN = QN.conj().T @ Ac @ QN
    SN = np.linalg.inv(RN) if d - k else np.zeros((0, 0))
    rm = float(np.max(np.abs(np.linalg.eigvals(RM)))) if k else 0.0
    rs = float(np.max(np.abs(np.linalg.eigvals(SN)))) if d - k else 0.0
    r = max(rm, rs)

    def ratios(t: float) -> np.ndarray:
        """``max(||RM^n||, ||SN^n||) / t^n`` for ``n = 0 .. window``."""
        out = np.zeros(window + 1)
        out[0] = 1.0
        for R in (RM, SN):
            if R.size == 0:
                continue
            P = np.eye(R.shape[0], dtype=complex)
            Rt = R / t
            for n in range(1, window + 1):
                P = P @ Rt
                out[n] = max(out[n], float(np.linalg.norm(P, 2)))
        return out

    t = r
    if r > 0:
        seq = ratios(r)
        half = window // 2
        if seq[half:].max() > 1.000001 * seq[:half].max():
            t = r + (1 - r) / 4
            seq = ratios(t)
    else:
        t = 0.5
        seq = ratios(t)
    beta = max(1.0, float(seq.max()))
    s_matrix = QN @ SN @ QN.conj().T if d - k else np.zeros((d, d))
    if np.all(np.isreal(A)) and np.allclose(proj_m.imag, 0, atol=1e-13) and np.allclose(s_matrix.imag, 0, atol=1e-13):
        proj_m, s_matrix = proj_m.real, s_matrix.real
    return HyperbolicSplitting(T, f"stable subspace (dim {k})", f"unstable subspace (dim {d - k})",
                               alpha, beta, t, in_m=None, proj_m=proj_m, s_matrix=s_matrix, beta_window=window)


def hyperbolic_splitting(T: OperatorDescriptor) -> HyperbolicSplitting:
    """Splitting constants ``(alpha, beta, t)`` for shifts, diagonals and matrices."""
    S = as_weighted_shift(T)
    if S is not None:
        return _shift_splitting(S)
    inner, lam = T, 1.0 + 0j
    while isinstance(inner, ScalarMultiple):
        lam *= inner.lam
        inner = inner.child
    if isinstance(inner, Diagonal):
        D = inner if lam == 1 else (Diagonal(inner.ambient, lam=lam * inner.lam) if inner.lam is not None
                                    else Diagonal(inner.ambient, weight=inner.weight.scaled(lam)))
        return _diagonal_splitting(D)
    try:
        A = dense_matrix(T)
    except DomainError:
        raise DomainError(f"no splitting available for {T.render()}") from None
    return _matrix_splitting(A, T)


def sample_splitting_bounds(split: HyperbolicSplitting, vectors, n_max: int = 30) -> float:
    """Largest observed ``||T^n y|| / (beta t^n ||y||)`` and the ``S`` analogue."""
    from .spaces import seminorm_eval
    T = split.operator
    worst = 0.0
    for v in vectors:
        y, z = split.split(v)
        for part, step in ((y, lambda u: apply(T, u)), (z, split.apply_s)):
            base = seminorm_eval(part, 1)
            if base == 0:
                continue
            cur = part
            for n in range(n_max + 1):
                worst = max(worst, seminorm_eval(cur, 1) / (split.beta * split.t ** n * base))
                cur = step(cur)
    return worst


__all__ = [
    "OperatorDescriptor", "Shift", "Diagonal", "ScalarMultiple", "Power", "Inverse", "DirectSum", "FiniteMatrix",
    "apply", "apply_inverse", "apply_power", "transform", "weight_product", "gm_limits", "GMLimits",
    "transport_conjugacy", "continuity_check_koethe", "HyperbolicSplitting", "hyperbolic_splitting",
    "unweighted_shift", "identity_multiple", "operator_from_dict", "as_weighted_shift", "dense_matrix",
    "flatten_finite", "sample_splitting_bounds", "ContinuityVerdict",
]
