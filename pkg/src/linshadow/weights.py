"""Eventually periodic weight sequences with exact window products."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .asymptotics import Growth, TOL
from .core import DomainError


def _sum_log_int(a: int, b: int) -> float:
    """sum_{l=a}^{b} log max(|l|, 1)."""
    if a > b:
        return 0.0
    total = 0.0
    if b >= 1:
        lo = max(a, 1)
        total += math.lgamma(b + 1) - math.lgamma(lo)
    if a <= -1:
        hi = min(b, -1)
        # sum_{l=a}^{hi} log|l| = sum_{m=-hi}^{-a} log m
        total += math.lgamma(-a + 1) - math.lgamma(-hi)
    return total


def _cycle_sum(cum: np.ndarray, count: int) -> float:
    """Sum of the first ``count`` entries of a cyclic sequence with prefix sums ``cum``."""
    period = len(cum) - 1
    q, r = divmod(count, period)
    return q * float(cum[-1]) + float(cum[r])


@dataclass(frozen=True)
class WeightSpec:
    """A weight sequence ``(w_n)``: explicit prefix plus periodic tails.

    ``prefix[i]`` is ``w_{origin + i}``.  Indices past the prefix read
    ``tail_pos`` cyclically; indices before ``origin`` read ``tail_neg``
    cyclically outward (``w_{origin-1} = tail_neg[0]``).  A nonzero ``power``
    multiplies every tail weight by ``max(|n|, 1) ** power`` (``w_n = n`` is
    ``tail_pos=(1,), power=1``).  ``irregular`` marks numeric data whose
    asymptotics cannot be classified.
    """

    prefix: tuple = ()
    origin: int = 1
    tail_pos: tuple = (1.0,)
    tail_neg: tuple | None = None
    power: float = 0.0
    irregular: bool = False
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(complex(v) for v in self.prefix))
        object.__setattr__(self, "tail_pos", tuple(complex(v) for v in self.tail_pos))
        if self.tail_neg is not None:
            object.__setattr__(self, "tail_neg", tuple(complex(v) for v in self.tail_neg))
        for seq in (self.prefix, self.tail_pos, self.tail_neg or ()):
            if any(v == 0 for v in seq):
                raise DomainError("weights must be nonzero")
        if not self.tail_pos or (self.tail_neg is not None and not self.tail_neg):
            raise DomainError("tail cycles must be nonempty")

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c: complex, bilateral: bool = False) -> "WeightSpec":
        return cls(tail_pos=(c,), tail_neg=(c,) if bilateral else None)

    @classmethod
    def bilateral(cls, negative: Sequence[complex], positive: Sequence[complex],
                  prefix: Sequence[complex] = (), origin: int = 1) -> "WeightSpec":
        return cls(prefix=tuple(prefix), origin=origin, tail_pos=tuple(positive),
                   tail_neg=tuple(negative))

    # -- basic access -----------------------------------------------------
    @property
    def bilateral_ok(self) -> bool:
        return self.tail_neg is not None

    @property
    def end(self) -> int:
        return self.origin + len(self.prefix)

    def _logs(self, cycle: tuple) -> tuple[np.ndarray, np.ndarray]:
        key = id(cycle)
        if key not in self._cache:
            arr = np.asarray(cycle, dtype=complex)
            mags = np.concatenate([[0.0], np.cumsum(np.log(np.abs(arr)))])
            phases = np.concatenate([[0.0], np.cumsum(np.angle(arr))])
            self._cache[key] = (mags, phases)
        return self._cache[key]

    def value(self, n: int) -> complex:
        n = int(n)
        if self.origin <= n < self.end:
            return self.prefix[n - self.origin]
        if n >= self.end:
            base = self.tail_pos[(n - self.end) % len(self.tail_pos)]
        else:
            if self.tail_neg is None:
                raise DomainError(f"weight index {n} precedes the unilateral origin {self.origin}")
            base = self.tail_neg[(self.origin - 1 - n) % len(self.tail_neg)]
        if self.power:
            base = base * max(abs(n), 1) ** self.power
        return base

    def values(self, ns) -> np.ndarray:
        """Vectorized :meth:`value`."""
        ns = np.asarray(ns, dtype=np.int64).ravel()
        out = np.empty(ns.size, dtype=complex)
        pre = (ns >= self.origin) & (ns < self.end)
        if pre.any():
            out[pre] = np.asarray(self.prefix, dtype=complex)[ns[pre] - self.origin]
        pos = ns >= self.end
        out[pos] = np.asarray(self.tail_pos, dtype=complex)[(ns[pos] - self.end) % len(self.tail_pos)]
        neg = ns < self.origin
        if neg.any():
            if self.tail_neg is None:
                raise DomainError(f"weight index {int(ns[neg].min())} precedes the unilateral origin {self.origin}")
            out[neg] = np.asarray(self.tail_neg, dtype=complex)[(self.origin - 1 - ns[neg]) % len(self.tail_neg)]
        if self.power:
            tail = ~pre
            out[tail] *= np.maximum(np.abs(ns[tail]), 1).astype(float) ** self.power
        return out

    # -- exact window products -------------------------------------------
    def _tail_pos_sum(self, a: int, b: int) -> tuple[float, float]:
        if a > b:
            return 0.0, 0.0
        mags, phases = self._logs(self.tail_pos)
        lo, hi = a - self.end, b - self.end + 1
        m = _cycle_sum(mags, hi) - _cycle_sum(mags, lo)
        ph = _cycle_sum(phases, hi) - _cycle_sum(phases, lo)
        return m + self.power * _sum_log_int(a, b), ph

    def _tail_neg_sum(self, a: int, b: int) -> tuple[float, float]:
        if a > b:
            return 0.0, 0.0
        if self.tail_neg is None:
            raise DomainError(f"weight index {a} precedes the unilateral origin {self.origin}")
        mags, phases = self._logs(self.tail_neg)
        # G(x) = sum over l in [x, origin-1], i.e. origin - x cyclic terms.
        m = _cycle_sum(mags, self.origin - a) - _cycle_sum(mags, self.origin - b - 1)
        ph = _cycle_sum(phases, self.origin - a) - _cycle_sum(phases, self.origin - b - 1)
        return m + self.power * _sum_log_int(a, b), ph

    def log_product(self, a: int, b: int) -> tuple[float, float]:
        """``(log|w_a ... w_b|, arg)`` for ``a <= b``; empty products give ``(0, 0)``."""
        a, b = int(a), int(b)
        if a > b:
            return 0.0, 0.0
        mag = ph = 0.0
        m, p = self._tail_neg_sum(a, min(b, self.origin - 1))
        mag += m
        ph += p
        lo, hi = max(a, self.origin), min(b, self.end - 1)
        for n in range(lo, hi + 1):
            v = self.prefix[n - self.origin]
            mag += math.log(abs(v))
            ph += cmath.phase(v)
        m, p = self._tail_pos_sum(max(a, self.end), b)
        mag += m
        ph += p
        return mag, math.remainder(ph, 2 * math.pi)

    def product(self, k: int, n: int) -> complex:
        """``w_k w_{k+1} ... w_{k+n}`` (``n + 1`` factors)."""
        mag, ph = self.log_product(k, k + n)
        return cmath.rect(math.exp(mag), ph)

    # -- global quantities -------------------------------------------------
    def _all_magnitudes(self) -> list[float]:
        vals = [abs(v) for v in self.prefix] + [abs(v) for v in self.tail_pos]
        if self.tail_neg is not None:
            vals += [abs(v) for v in self.tail_neg]
        return vals

    @property
    def sup_abs(self) -> float:
        return math.inf if self.power > 0 else max(self._all_magnitudes())

    @property
    def inf_abs(self) -> float:
        return 0.0 if self.power < 0 else min(self._all_magnitudes())

    def cycle_gm(self, side: str = "pos") -> float:
        cycle = self.tail_pos if side == "pos" else self.tail_neg
        if cycle is None:
            raise DomainError("unilateral weight has no negative tail")
        return math.exp(float(np.mean(np.log(np.abs(np.asarray(cycle))))))

    def all_unimodular(self) -> bool:
        return self.power == 0 and all(abs(m - 1) <= TOL for m in self._all_magnitudes())

    # -- asymptotic signatures --------------------------------------------
    def growth_of_product(self, side: str = "pos") -> Growth | None:
        """Signature of ``|w_1 ... w_n|`` (pos) or ``|w_{-n+1} ... w_0|`` (neg)."""
        if self.irregular:
            return None
        g = math.log(self.cycle_gm(side))
        p = self.power
        # sum_{l<=n} p log l = p (n log n - n + 0.5 log n) + O(1)
        return Growth(h=p, g=g - p, s=p / 2)

    def growth_single(self, side: str = "pos") -> Growth | None:
        """Signature of ``|w_n|`` as ``n -> +inf`` (pos) or ``-inf`` (neg)."""
        if self.irregular:
            return None
        return Growth(s=self.power)

    # -- algebra -----------------------------------------------------------
    def window_sup(self, lo: int | None, hi: int | None, t: float, invert: bool = False) -> float:
        """``sup |w_a ... w_b|^{+-1} / t^(b-a+1)`` over windows ``[a, b]`` inside ``[lo, hi]``.

        ``None`` bounds mean the window set is unbounded on that side.  Tail
        windows repeat with the cycle, and each extra full cycle multiplies the
        ratio by ``(gm/t)^L <= 1`` when ``t`` dominates the relevant cycle
        geometric means, so a scan over the prefix padded by two cycles on
        each side attains the supremum.  The empty window contributes 1.
        """
        ln = len(self.tail_neg) if self.tail_neg is not None else 0
        lp = len(self.tail_pos)
        scan_lo = self.origin - 2 * ln - 2 if self.tail_neg is not None else self.origin
        scan_hi = self.end + 2 * lp + 2
        if lo is not None and lo > scan_hi:
            scan_lo, scan_hi = lo, lo + 2 * lp + 2
        elif hi is not None and hi < scan_lo:
            scan_lo, scan_hi = hi - 2 * ln - 2, hi
        if lo is not None:
            scan_lo = max(scan_lo, lo)
        if hi is not None:
            scan_hi = min(scan_hi, hi)
        if scan_hi < scan_lo:
            return 1.0
        idx = np.arange(scan_lo, scan_hi + 1)
        logs = np.log(np.abs(self.values(idx)))
        if invert:
            logs = -logs
        logs = logs - math.log(t)
        cum = np.concatenate([[0.0], np.cumsum(logs)])
        # max over a<=b of cum[b+1] - cum[a]
        best = 0.0
        running_min = cum[0]
        for b in range(1, cum.size):
            best = max(best, float(cum[b] - running_min))
            running_min = min(running_min, float(cum[b]))
        return math.exp(best)

    def scaled(self, c: complex) -> "WeightSpec":
        return replace(self, prefix=tuple(c * v for v in self.prefix),
                       tail_pos=tuple(c * v for v in self.tail_pos),
                       tail_neg=None if self.tail_neg is None else tuple(c * v for v in self.tail_neg))

    def render(self) -> str:
        def fmt(seq):
            return "[" + ", ".join(_fmt_scalar(v) for v in seq) + "]"
        parts = []
        if self.tail_neg is not None:
            parts.append(f"tail- = {fmt(self.tail_neg)}")
        parts.append(f"prefix = {fmt(self.prefix)}")
        if self.origin != 1 or self.prefix:
            parts.append(f"origin = {self.origin}")
        parts.append(f"tail+ = {fmt(self.tail_pos)}")
        if self.power:
            parts.append(f"power = {self.power:g}")
        if self.irregular:
            parts.append("irregular")
        return " ".join(parts)

    def to_dict(self) -> dict:
        def enc(seq):
            return [_enc_scalar(v) for v in seq]
        d = {"prefix": enc(self.prefix), "origin": self.origin, "tail_pos": enc(self.tail_pos)}
        if self.tail_neg is not None:
            d["tail_neg"] = enc(self.tail_neg)
        if self.power:
            d["power"] = self.power
        if self.irregular:
            d["irregular"] = True
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "WeightSpec":
        def dec(seq):
            return tuple(_dec_scalar(v) for v in seq)
        neg = d.get("tail_neg")
        return cls(prefix=dec(d.get("prefix", ())), origin=int(d.get("origin", 1)),
                   tail_pos=dec(d.get("tail_pos", (1.0,))),
                   tail_neg=None if neg is None else dec(neg),
                   power=float(d.get("power", 0.0)), irregular=bool(d.get("irregular", False)))


def _fmt_scalar(v: complex) -> str:
    v = complex(v)
    if v.imag == 0:
        return f"{v.real:g}"
    return f"{v.real:g}{v.imag:+g}j"


def _enc_scalar(v: complex):
    v = complex(v)
    return v.real if v.imag == 0 else [v.real, v.imag]


def _dec_scalar(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


@dataclass(frozen=True)
class GMLimits:
    """Limits of ``|w_k ... w_{k+n}|^{1/n}`` taken uniformly in ``k``."""

    limsup_gm: float | None
    liminf_gm: float | None
    window: str

    @property
    def decided(self) -> bool:
        return self.limsup_gm is not None


def gm_limits(w: WeightSpec, side: str = "unilateral") -> GMLimits:
    """Exact uniform geometric-mean limits for eventually periodic weights.

    ``side`` is one of ``unilateral``, ``bilateral-pos``, ``bilateral-neg``,
    ``bilateral-all-k``.  Windows crossing the finite prefix only contribute a
    bounded factor, so the limits are the tail-cycle geometric means.
    """
    if w.irregular:
        return GMLimits(None, None, "irregular tail")
    if w.power:
        v = math.inf if w.power > 0 else 0.0
        return GMLimits(v, v, f"power tail {w.power:g}")
    if side in ("unilateral", "bilateral-pos"):
        gm = w.cycle_gm("pos")
        return GMLimits(gm, gm, "positive tail cycle " + str(len(w.tail_pos)))
    if side == "bilateral-neg":
        gm = w.cycle_gm("neg")
        return GMLimits(gm, gm, "negative tail cycle " + str(len(w.tail_neg or ())))
    if side == "bilateral-all-k":
        gp, gn = w.cycle_gm("pos"), w.cycle_gm("neg")
        sup_side = "negative" if gn >= gp else "positive"
        return GMLimits(max(gp, gn), min(gp, gn), f"sup from {sup_side} tail")
    raise DomainError(f"unknown side {side!r}")
