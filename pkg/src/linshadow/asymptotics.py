"""Closed-form growth signatures of positive sequences.

A :class:`Growth` describes a sequence ``u_n`` through

    log u_n = h * n log n + g * n + s * log n + r * log log n + O(1)

where the ``O(1)`` remainder is bounded above and below.  All closed-form
Köthe generators and eventually periodic weight products fall in this class,
so series divergence and limits of ``u_n`` are decided exactly by a
lexicographic sign test on ``(h, g, s, r)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TOL = 1e-12


def _sgn(x: float) -> int:
    if x > TOL:
        return 1
    if x < -TOL:
        return -1
    return 0


@dataclass(frozen=True)
class Growth:
    h: float = 0.0
    g: float = 0.0
    s: float = 0.0
    r: float = 0.0
    # -1: eventually zero, +1: eventually infinite (c/0 convention), 0: regular
    degenerate: int = 0

    @classmethod
    def zero(cls) -> "Growth":
        return cls(degenerate=-1)

    @classmethod
    def infinite(cls) -> "Growth":
        return cls(degenerate=1)

    def __neg__(self) -> "Growth":
        return Growth(-self.h, -self.g, -self.s, -self.r, -self.degenerate)

    def __add__(self, other: "Growth") -> "Growth | None":
        """Signature of the product sequence; ``None`` for ``0 * inf``."""
        if self.degenerate and other.degenerate and self.degenerate != other.degenerate:
            return None
        if self.degenerate or other.degenerate:
            return Growth(degenerate=self.degenerate or other.degenerate)
        return Growth(self.h + other.h, self.g + other.g, self.s + other.s, self.r + other.r)

    def __sub__(self, other: "Growth") -> "Growth | None":
        return self + (-other)

    def scaled(self, c: float) -> "Growth":
        """Signature of ``u_n ** c`` for ``c > 0``."""
        return Growth(c * self.h, c * self.g, c * self.s, c * self.r, self.degenerate)

    def trend(self) -> int:
        """+1 if ``u_n -> inf``, -1 if ``u_n -> 0``, 0 if bounded above and below."""
        if self.degenerate:
            return self.degenerate
        for c in (self.h, self.g, self.s, self.r):
            sg = _sgn(c)
            if sg:
                return sg
        return 0

    def series_diverges(self) -> bool:
        """Whether ``sum u_n`` diverges."""
        if self.degenerate:
            return self.degenerate > 0
        for c in (self.h, self.g):
            sg = _sgn(c)
            if sg:
                return sg > 0
        if _sgn(self.s + 1) != 0:
            return self.s + 1 > 0
        # u_n ~ (log n)^r / n
        return self.r >= -1 - TOL

    def tag(self) -> str:
        if self.degenerate:
            return "eventually zero" if self.degenerate < 0 else "eventually infinite"
        if _sgn(self.h):
            return f"factorial power {self.h:g}"
        if _sgn(self.g):
            return f"geometric ratio {math.exp(self.g):.6g}"
        if _sgn(self.s):
            return f"polynomial degree {self.s:g}"
        if _sgn(self.r):
            return f"logarithmic power {self.r:g}"
        return "constant"
