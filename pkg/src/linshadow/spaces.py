"""Sequence spaces over N, Z or a finite index set, with seminorm families.

Seminorms are evaluated in log space so that coefficients such as ``20**j``
never overflow before the final exponentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .asymptotics import Growth
from .core import DomainError, Interval
from .weights import WeightSpec

K_MAX_DEFAULT = 20

KOETHE_GENERATORS = (
    "constant",           # a_{j,k} = 1
    "k_pow_j",            # a_{j,k} = k^j
    "j_pow_k",            # a_{j,k} = j^k
    "exp_neg_j_over_k",   # a_{j,k} = exp(-j/k)
    "log_pow_k",          # a_{j,k} = log(j+1)^k
    "j_le_k",             # a_{j,k} = 1 if j <= k else 0
    "table",              # explicit rows, constant tail row
    "numeric",            # explicit rows, unknown tail behaviour
)

FAMILIES = ("hardy", "dirichlet", "bergman", "power", "geometric")


@dataclass(frozen=True)
class KoetheMatrix:
    """A Köthe matrix ``(a_{j,k})`` given by a closed-form generator.

    For ``table`` and ``numeric`` the rows ``rows[j-1]`` hold ``a_{j,1..K}``;
    columns past ``K`` repeat the last column.  ``table`` continues with
    ``tail_row`` for ``j > len(rows)``; ``numeric`` does the same but its
    asymptotics are treated as unknown.
    """

    generator: str = "constant"
    rows: tuple = ()
    tail_row: tuple = ()

    def __post_init__(self):
        if self.generator not in KOETHE_GENERATORS:
            raise DomainError(f"unknown Köthe generator {self.generator!r}")
        object.__setattr__(self, "rows", tuple(tuple(float(v) for v in r) for r in self.rows))
        object.__setattr__(self, "tail_row", tuple(float(v) for v in self.tail_row))
        if self.generator in ("table", "numeric"):
            if not self.tail_row:
                raise DomainError("table generators need a tail_row")
            for r in self.rows + (self.tail_row,):
                if any(v < 0 for v in r):
                    raise DomainError("Köthe entries must be nonnegative")

    # -- evaluation ---------------------------------------------------------
    def log_entries(self, j: np.ndarray, k: int) -> np.ndarray:
        """``log a_{j,k}`` for an array of row indices ``j >= 1`` (``-inf`` for zeros)."""
        j = np.asarray(j, dtype=float)
        gen = self.generator
        if gen == "constant":
            return np.zeros_like(j)
        if gen == "k_pow_j":
            return j * math.log(k)
        if gen == "j_pow_k":
            return k * np.log(j)
        if gen == "exp_neg_j_over_k":
            return -j / k
        if gen == "log_pow_k":
            return k * np.log(np.log(j + 1))
        if gen == "j_le_k":
            return np.where(j <= k, 0.0, -np.inf)
        # column k of the explicit rows followed by the tail value
        col = np.array([r[min(k, len(r)) - 1] for r in self.rows + (self.tail_row,)])
        with np.errstate(divide="ignore"):
            logcol = np.log(col)
        ji = j.astype(np.int64)
        return logcol[np.minimum(ji, len(self.rows) + 1) - 1]

    def entry(self, j: int, k: int) -> float:
        return float(np.exp(self.log_entries(np.array([j]), k)[0]))

    def growth(self, k: int) -> Growth | None:
        """Signature of ``a_{j,k}`` as ``j -> inf``."""
        gen = self.generator
        if gen == "constant":
            return Growth()
        if gen == "k_pow_j":
            return Growth(g=math.log(k))
        if gen == "j_pow_k":
            return Growth(s=float(k))
        if gen == "exp_neg_j_over_k":
            return Growth(g=-1.0 / k)
        if gen == "log_pow_k":
            return Growth(r=float(k))
        if gen == "j_le_k":
            return Growth.zero()
        if gen == "table":
            v = self.tail_row[min(k, len(self.tail_row)) - 1]
            return Growth.zero() if v == 0 else Growth()
        return None

    def monotonicity_violations(self, j_max: int, k_max: int) -> list[tuple[int, int]]:
        """Pairs ``(j, k)`` with ``a_{j,k} > a_{j,k+1}`` inside the window."""
        js = np.arange(1, j_max + 1)
        bad = []
        prev = self.log_entries(js, 1)
        for k in range(1, k_max):
            cur = self.log_entries(js, k + 1)
            for j in js[prev > cur + 1e-14]:
                bad.append((int(j), k))
            prev = cur
        return bad

    def render(self) -> str:
        if self.generator in ("table", "numeric"):
            return f"{self.generator}(rows={len(self.rows)})"
        return self.generator

    def to_dict(self) -> dict:
        d = {"generator": self.generator}
        if self.generator in ("table", "numeric"):
            d["rows"] = [list(r) for r in self.rows]
            d["tail_row"] = list(self.tail_row)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "KoetheMatrix":
        return cls(generator=d.get("generator", "constant"), rows=tuple(map(tuple, d.get("rows", ()))),
                   tail_row=tuple(d.get("tail_row", ())))


@dataclass(frozen=True)
class WeightFamily:
    """Diagonal weight ``v_n`` of a weighted space ``l^p(v)`` with ``||a||^p = sum |a_n|^p v_n``.

    ``dirichlet`` uses ``v = (1, 1, 2, 3, ...)`` on indices ``0, 1, 2, ...``,
    ``bergman`` uses ``v_n = 1/(n+1)``, ``power`` uses ``(n+1)**param`` and
    ``geometric`` uses ``param**n``.  Bilateral spaces read ``v_{|n|}``.
    """

    name: str = "hardy"
    param: float = 0.0

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise DomainError(f"unknown weight family {self.name!r}")

    def log_v(self, n: np.ndarray) -> np.ndarray:
        n = np.abs(np.asarray(n, dtype=float))
        if self.name == "hardy":
            return np.zeros_like(n)
        if self.name == "dirichlet":
            return np.log(np.maximum(n, 1.0))
        if self.name == "bergman":
            return -np.log(n + 1.0)
        if self.name == "power":
            return self.param * np.log(n + 1.0)
        return n * math.log(self.param)

    def growth(self) -> Growth:
        if self.name == "hardy":
            return Growth()
        if self.name == "dirichlet":
            return Growth(s=1.0)
        if self.name == "bergman":
            return Growth(s=-1.0)
        if self.name == "power":
            return Growth(s=self.param)
        return Growth(g=math.log(self.param))


@dataclass(frozen=True)
class SequenceSpaceSpec:
    """A sequence space with its seminorm family ``(||.||_k)_{k <= k_max}``.

    ``index_set`` is ``N`` (indices ``origin, origin+1, ...``), ``Z`` or
    ``finite`` (indices ``0 .. dim-1`` with the Euclidean norm).  ``p=None``
    selects the c0 sup-form.  ``transport`` holds a weight ``w`` and replaces
    every seminorm by ``x -> ||(v_n x_n)||_k`` with ``v`` the shift-conjugacy
    weights of ``w``.
    """

    index_set: str = "N"
    p: float | None = 2.0
    source: str = "norm"
    koethe: KoetheMatrix | None = None
    family: WeightFamily | None = None
    k_max: int = K_MAX_DEFAULT
    origin: int = 1
    dim: int = 0
    transport: WeightSpec | None = None
    real: bool = False
    name: str = ""

    def __post_init__(self):
        if self.index_set not in ("N", "Z", "finite"):
            raise DomainError(f"index_set must be N, Z or finite, got {self.index_set!r}")
        if self.p is not None and not (self.p >= 1):
            raise DomainError(f"p must be >= 1 or None (c0), got {self.p}")
        if self.source not in ("norm", "koethe", "family"):
            raise DomainError(f"unknown seminorm source {self.source!r}")
        if self.source == "koethe" and self.koethe is None:
            raise DomainError("koethe source needs a KoetheMatrix")
        if self.source == "family" and self.family is None:
            raise DomainError("family source needs a WeightFamily")
        if self.index_set == "finite":
            if self.dim < 1:
                raise DomainError("finite spaces need dim >= 1")
            if self.source != "norm":
                raise DomainError("finite spaces carry the plain p-norm")
        if self.k_max < 1:
            raise DomainError("k_max must be positive")
        if self.transport is not None and self.index_set == "Z" and not self.transport.bilateral_ok:
            raise DomainError("bilateral transport needs a bilateral weight")

    # -- constructors ---------------------------------------------------------
    @classmethod
    def ell(cls, p: float | None = 2.0, index_set: str = "N", origin: int = 1, **kw) -> "SequenceSpaceSpec":
        return cls(index_set=index_set, p=p, origin=origin, **kw)

    @classmethod
    def finite(cls, dim: int, p: float = 2.0, real: bool = True) -> "SequenceSpaceSpec":
        return cls(index_set="finite", p=p, dim=dim, origin=0, real=real)

    @classmethod
    def koethe_space(cls, generator: str, p: float | None = 2.0, index_set: str = "N", **kw) -> "SequenceSpaceSpec":
        return cls(index_set=index_set, p=p, source="koethe", koethe=KoetheMatrix(generator), **kw)

    @classmethod
    def weighted(cls, family: str, param: float = 0.0, p: float = 2.0, **kw) -> "SequenceSpaceSpec":
        kw.setdefault("origin", 0)
        return cls(p=p, source="family", family=WeightFamily(family, param), **kw)

    # -- structure ------------------------------------------------------------
    @property
    def is_banach(self) -> bool:
        return self.source in ("norm", "family")

    @property
    def seminorm_count(self) -> int:
        return 1 if self.is_banach else self.k_max

    @property
    def bilateral(self) -> bool:
        return self.index_set == "Z"

    def base(self) -> "SequenceSpaceSpec":
        """The same space without transport."""
        return _replace(self, transport=None)

    def with_transport(self, w: WeightSpec | None) -> "SequenceSpaceSpec":
        return _replace(self, transport=w)

    def check_indices(self, idx: np.ndarray) -> None:
        if idx.size == 0:
            return
        if self.index_set == "N" and idx.min() < self.origin:
            raise DomainError(f"index {int(idx.min())} outside N starting at {self.origin}")
        if self.index_set == "finite" and (idx.min() < 0 or idx.max() >= self.dim):
            raise DomainError(f"index outside 0..{self.dim - 1}")

    def check_k(self, k: int) -> None:
        if not 1 <= k <= self.k_max:
            raise DomainError(f"seminorm index {k} outside 1..{self.k_max}")

    # -- coefficients -----------------------------------------------------------
    def _row_index(self, n: np.ndarray) -> np.ndarray:
        """Köthe row used for coordinate ``n``: ``n`` on N, ``max(|n|, 1)`` on Z."""
        if self.index_set == "Z":
            return np.maximum(np.abs(n), 1)
        return n

    def log_transport(self, n: np.ndarray) -> np.ndarray:
        """``log|v_n|`` for the transport weights (zeros when there is none)."""
        n = np.asarray(n, dtype=np.int64)
        if self.transport is None:
            return np.zeros(n.shape)
        return np.array([transport_log_abs(self.transport, int(m)) for m in n.ravel()]).reshape(n.shape)

    def log_coefficients(self, n, k: int) -> np.ndarray:
        """``log ||e_n||_k`` (``-inf`` where the canonical vector has seminorm 0)."""
        n = np.asarray(n, dtype=np.int64)
        self.check_indices(n.ravel())
        if self.source == "norm":
            base = np.zeros(n.shape)
        elif self.source == "family":
            expo = 1.0 / self.p if self.p is not None else 1.0
            base = expo * self.family.log_v(n)
        else:
            rows = self._row_index(n)
            if self.index_set == "N" and self.origin < 1:
                rows = np.maximum(rows - self.origin + 1, 1)
            base = self.koethe.log_entries(rows, k)
        return base + self.log_transport(n)

    def coefficients(self, n, k: int) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_coefficients(n, k))

    def coefficient_growth(self, k: int, side: str = "pos") -> Growth | None:
        """Signature of ``||e_n||_k`` as ``n -> +inf`` (pos) or ``n -> -inf`` (neg)."""
        if self.source == "norm":
            g: Growth | None = Growth()
        elif self.source == "family":
            expo = 1.0 / self.p if self.p is not None else 1.0
            g = self.family.growth().scaled(expo)
        else:
            g = self.koethe.growth(k)
        if g is None or self.transport is None:
            return g
        tw = self.transport
        if tw.irregular:
            return None
        if side == "pos":
            tg = tw.growth_of_product("pos")
            return g - tg
        tg = tw.growth_of_product("neg")
        return g + tg

    # -- serialization --------------------------------------------------------
    def to_dict(self) -> dict:
        d: dict = {"index_set": self.index_set, "p": self.p, "source": self.source, "k_max": self.k_max}
        if self.index_set == "finite":
            d["dim"] = self.dim
        else:
            d["origin"] = self.origin
        if self.koethe is not None:
            d["koethe"] = self.koethe.to_dict()
        if self.family is not None:
            d["family"] = {"name": self.family.name, "param": self.family.param}
        if self.transport is not None:
            d["transport"] = self.transport.to_dict()
        if self.real:
            d["real"] = True
        if self.name:
            d["name"] = self.name
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "SequenceSpaceSpec":
        if not isinstance(d, Mapping):
            raise DomainError("space spec must be a mapping")
        known = {"index_set", "p", "source", "k_max", "dim", "origin", "koethe", "family",
                 "transport", "real", "name"}
        unknown = set(d) - known
        if unknown:
            raise DomainError(f"unknown space keys: {sorted(unknown)}")
        koethe = KoetheMatrix.from_dict(d["koethe"]) if "koethe" in d else None
        family = WeightFamily(d["family"]["name"], float(d["family"].get("param", 0.0))) if "family" in d else None
        source = d.get("source", "koethe" if koethe else "family" if family else "norm")
        index_set = d.get("index_set", "N")
        p = d.get("p", 2.0)
        return cls(index_set=index_set, p=None if p is None or p == "c0" else float(p), source=source,
                   koethe=koethe, family=family, k_max=int(d.get("k_max", K_MAX_DEFAULT)),
                   origin=int(d.get("origin", 0 if index_set == "finite" or family else 1)),
                   dim=int(d.get("dim", 0)),
                   transport=WeightSpec.from_dict(d["transport"]) if "transport" in d else None,
                   real=bool(d.get("real", False)), name=str(d.get("name", "")))

    def render(self) -> str:
        p = "c0" if self.p is None else f"l{self.p:g}"
        if self.index_set == "finite":
            return f"R^{self.dim}" if self.real else f"C^{self.dim}"
        base = {"norm": p, "koethe": f"lambda_{'0' if self.p is None else f'{self.p:g}'}"
                f"({self.koethe.render() if self.koethe else ''})",
                "family": f"{p}({self.family.name if self.family else ''})"}[self.source]
        out = f"{base} over {self.index_set}"
        if self.transport is not None:
            out += f" transported by [{self.transport.render()}]"
        return out


def _replace(spec: SequenceSpaceSpec, **changes) -> SequenceSpaceSpec:
    from dataclasses import replace
    return replace(spec, **changes)


def transport_log_abs(w: WeightSpec, n: int) -> float:
    """``log|v_n|`` with ``v_0 = 1``, ``v_{-n} = w_{-n+1}...w_0``, ``v_n = 1/(w_1...w_n)``."""
    if n >= 1:
        return -w.log_product(1, n)[0]
    if n == 0:
        return 0.0
    return w.log_product(n + 1, 0)[0]


def transport_factor(w: WeightSpec, n: int) -> complex:
    """The complex conjugacy weight ``v_n``."""
    if n >= 1:
        mag, ph = w.log_product(1, n)
        return complex(math.exp(-mag) * math.cos(-ph), math.exp(-mag) * math.sin(-ph))
    if n == 0:
        return 1.0 + 0j
    mag, ph = w.log_product(n + 1, 0)
    return complex(math.exp(mag) * math.cos(ph), math.exp(mag) * math.sin(ph))


# -----------------------------------------------------------------------------
# vectors
# -----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class CoordinateVector:
    """Finitely supported vector ``sum x_n e_n`` in canonical form (no stored zeros)."""

    indices: np.ndarray
    values: np.ndarray
    space: SequenceSpaceSpec

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).ravel()
        vals = np.asarray(self.values, dtype=complex).ravel()
        if idx.shape != vals.shape:
            raise DomainError("indices and values differ in length")
        if idx.size > 1 and np.any(np.diff(idx) <= 0):
            order = np.argsort(idx, kind="stable")
            idx, vals = idx[order], vals[order]
            if np.any(np.diff(idx) == 0):
                uniq, inv = np.unique(idx, return_inverse=True)
                acc = np.zeros(uniq.size, dtype=complex)
                np.add.at(acc, inv, vals)
                idx, vals = uniq, acc
        keep = vals != 0
        idx, vals = idx[keep], vals[keep]
        self.space.check_indices(idx)
        idx.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", vals)

    # -- constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, space: SequenceSpaceSpec) -> "CoordinateVector":
        return cls(np.empty(0, np.int64), np.empty(0, complex), space)

    @classmethod
    def basis(cls, space: SequenceSpaceSpec, n: int, scale: complex = 1.0) -> "CoordinateVector":
        return cls(np.array([n]), np.array([scale], dtype=complex), space)

    @classmethod
    def from_mapping(cls, space: SequenceSpaceSpec, coords: Mapping[int, complex]) -> "CoordinateVector":
        items = sorted(coords.items())
        return cls(np.array([i for i, _ in items], dtype=np.int64),
                   np.array([v for _, v in items], dtype=complex), space)

    @classmethod
    def from_dense(cls, space: SequenceSpaceSpec, arr, offset: int | None = None) -> "CoordinateVector":
        arr = np.asarray(arr, dtype=complex).ravel()
        if offset is None:
            offset = space.origin if space.index_set != "finite" else 0
        return cls(np.arange(offset, offset + arr.size), arr, space)

    # -- algebra ------------------------------------------------------------------
    def _check_same(self, other: "CoordinateVector") -> None:
        if other.space != self.space:
            raise DomainError("vectors live in different spaces")

    def __add__(self, other: "CoordinateVector") -> "CoordinateVector":
        self._check_same(other)
        return CoordinateVector(np.concatenate([self.indices, other.indices]),
                                np.concatenate([self.values, other.values]), self.space)

    def __neg__(self) -> "CoordinateVector":
        return CoordinateVector(self.indices, -self.values, self.space)

    def __sub__(self, other: "CoordinateVector") -> "CoordinateVector":
        return self + (-other)

    def __mul__(self, c: complex) -> "CoordinateVector":
        return CoordinateVector(self.indices, self.values * complex(c), self.space)

    __rmul__ = __mul__

    def __truediv__(self, c: complex) -> "CoordinateVector":
        return self * (1.0 / complex(c))

    def __getitem__(self, n: int) -> complex:
        pos = np.searchsorted(self.indices, n)
        if pos < self.indices.size and self.indices[pos] == n:
            return complex(self.values[pos])
        return 0j

    def __eq__(self, other) -> bool:
        return (isinstance(other, CoordinateVector) and other.space == self.space
                and np.array_equal(self.indices, other.indices) and np.array_equal(self.values, other.values))

    __hash__ = None  # type: ignore[assignment]

    @property
    def is_zero(self) -> bool:
        return self.indices.size == 0

    def to_dense(self, lo: int, hi: int) -> np.ndarray:
        """Coordinates on ``lo..hi`` inclusive."""
        out = np.zeros(hi - lo + 1, dtype=complex)
        mask = (self.indices >= lo) & (self.indices <= hi)
        out[self.indices[mask] - lo] = self.values[mask]
        return out

    def in_space(self, space: SequenceSpaceSpec) -> "CoordinateVector":
        return CoordinateVector(self.indices, self.values, space)

    def items(self) -> Iterable[tuple[int, complex]]:
        return zip(self.indices.tolist(), self.values.tolist())

    def __repr__(self) -> str:
        body = ", ".join(f"{i}:{_fmt(v)}" for i, v in self.items())
        return f"CoordinateVector({{{body}}})"


@dataclass(frozen=True)
class ProductSpaceSpec:
    """Finite direct sum of spaces; the k-th seminorm is the max over the parts."""

    factors: tuple

    @property
    def is_banach(self) -> bool:
        return all(f.is_banach for f in self.factors)

    @property
    def k_max(self) -> int:
        return min(f.k_max for f in self.factors)

    @property
    def seminorm_count(self) -> int:
        return 1 if self.is_banach else self.k_max

    def render(self) -> str:
        return " (+) ".join(f.render() for f in self.factors)


@dataclass(frozen=True, eq=False)
class SumVector:
    """Element ``x_1 (+) ... (+) x_r`` of a :class:`ProductSpaceSpec`."""

    parts: tuple
    space: ProductSpaceSpec = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.space is None:
            object.__setattr__(self, "space", ProductSpaceSpec(tuple(p.space for p in self.parts)))
        if len(self.parts) != len(self.space.factors):
            raise DomainError("part count differs from the number of factors")

    @classmethod
    def zero(cls, space: ProductSpaceSpec) -> "SumVector":
        return cls(tuple(zero_vector(f) for f in space.factors), space)

    def _check_same(self, other) -> None:
        if not isinstance(other, SumVector) or other.space != self.space:
            raise DomainError("vectors live in different spaces")

    def __add__(self, other):
        self._check_same(other)
        return SumVector(tuple(a + b for a, b in zip(self.parts, other.parts)), self.space)

    def __neg__(self):
        return SumVector(tuple(-a for a in self.parts), self.space)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return SumVector(tuple(a * c for a in self.parts), self.space)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / complex(c))

    def __eq__(self, other) -> bool:
        return isinstance(other, SumVector) and other.space == self.space and all(
            a == b for a, b in zip(self.parts, other.parts))

    __hash__ = None  # type: ignore[assignment]

    @property
    def is_zero(self) -> bool:
        return all(p.is_zero for p in self.parts)

    def __repr__(self) -> str:
        return " (+) ".join(repr(p) for p in self.parts)


def zero_vector(space) -> "CoordinateVector | SumVector":
    if isinstance(space, ProductSpaceSpec):
        return SumVector.zero(space)
    return CoordinateVector.zero(space)


def _fmt(v: complex) -> str:
    v = complex(v)
    if v.imag == 0:
        return repr(v.real)
    return f"{v.real!r}{v.imag:+}j"


# -----------------------------------------------------------------------------
# seminorms and the metric
# -----------------------------------------------------------------------------
def _log_seminorm(x: CoordinateVector, k: int) -> float:
    space = x.space
    if x.is_zero:
        return -math.inf
    logs = np.log(np.abs(x.values)) + space.log_coefficients(x.indices, k)
    finite = logs[np.isfinite(logs) | (logs > 0)]
    if finite.size == 0:
        return -math.inf
    top = float(finite.max())
    if math.isinf(top):
        return top
    if space.p is None:
        return top
    p = space.p
    return top + math.log(float(np.sum(np.exp(p * (finite - top))))) / p


def seminorm_eval(x, k: int = 1) -> float:
    """Exact finite-support evaluation of ``||x||_k``; Banach spaces ignore ``k``."""
    if isinstance(x, SumVector):
        return max((seminorm_eval(p, k) for p in x.parts), default=0.0)
    x.space.check_k(k)
    if x.space.is_banach:
        k = 1
    with np.errstate(over="ignore", divide="ignore"):
        return math.exp(_log_seminorm(x, k)) if not x.is_zero else 0.0


def seminorms(x) -> np.ndarray:
    """All seminorms ``||x||_1 .. ||x||_{K}`` (a single norm for Banach spaces)."""
    space = x.space
    return np.array([seminorm_eval(x, k) for k in range(1, space.seminorm_count + 1)])


def metric_from_seminorms(values: np.ndarray, banach: bool, k_max: int) -> Interval:
    if banach:
        v = float(values[0])
        return Interval(v, v)
    ks = np.arange(1, values.size + 1)
    lower = float(np.sum(np.minimum(1.0, values) * 0.5 ** ks))
    return Interval(lower, lower + 0.5 ** k_max)


def frechet_distance(x, y) -> Interval:
    """Certified interval for ``d(x, y)``; the exact norm distance on Banach spaces."""
    if x.space != y.space:
        raise DomainError("frechet_distance needs vectors of the same space")
    return norm_interval(x - y)


def norm_interval(x) -> Interval:
    """Certified ``d(x, 0)``."""
    space = x.space
    return metric_from_seminorms(seminorms(x), space.is_banach, space.k_max)


@dataclass(frozen=True)
class NormSequence:
    values: np.ndarray
    tag: str
    growth: Growth | None


def canonical_norm_sequence(space: SequenceSpaceSpec, k: int, lo: int, hi: int) -> NormSequence:
    """``||e_n||_k`` for ``lo <= n <= hi`` together with the asymptotic tag."""
    space.check_k(k)
    if space.is_banach:
        k = 1
    if hi < lo:
        raise DomainError("empty index range")
    ns = np.arange(lo, hi + 1)
    side = "neg" if hi < 0 else "pos"
    g = space.coefficient_growth(k, side)
    return NormSequence(space.coefficients(ns, k), g.tag() if g is not None else "irregular", g)
