"""Shared primitives: three-valued verdicts, certified intervals, error types."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

EPS = float.fromhex("0x1p-52")


class DomainError(ValueError):
    """Raised when an input lies outside an operation's domain."""


class ResourceError(RuntimeError):
    """Raised when a computation would exceed its declared budget."""


class ConstructionError(RuntimeError):
    """A constructive recipe could not produce a certified object.

    ``details`` carries the quantities that blocked the construction (partial
    sums reached, required truncation depth, failing stage, ...).
    """

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


class Tri(enum.Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided"

    @classmethod
    def of(cls, flag: bool | None) -> "Tri":
        if flag is None:
            return cls.UNDECIDED
        return cls.YES if flag else cls.NO

    def __bool__(self) -> bool:  # pragma: no cover - guard against misuse
        raise TypeError("Tri values must be compared explicitly")


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` of reals used for certified comparisons."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi) and not (math.isnan(self.lo) or math.isnan(self.hi)):
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: float, rel: float = 0.0) -> "Interval":
        err = abs(x) * rel
        return cls(x - err, x + err)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __add__(self, other: "Interval | float") -> "Interval":
        if isinstance(other, Interval):
            return Interval(self.lo + other.lo, self.hi + other.hi)
        return Interval(self.lo + other, self.hi + other)

    def le(self, bound: float) -> Tri:
        """Certified ``value <= bound``."""
        if self.hi <= bound:
            return Tri.YES
        if self.lo > bound:
            return Tri.NO
        return Tri.UNDECIDED

    def lt(self, bound: float) -> Tri:
        """Certified ``value < bound``."""
        if self.hi < bound:
            return Tri.YES
        if self.lo >= bound:
            return Tri.NO
        return Tri.UNDECIDED

    def __str__(self) -> str:
        return f"[{self.lo:.6g}, {self.hi:.6g}]"


def rounding_slack(*magnitudes: float) -> float:
    """Outward error allowance for a handful of float operations."""
    return 8 * EPS * sum(abs(m) for m in magnitudes) + 1e-300


def combine(verdicts) -> Tri:
    """Conjunction of three-valued verdicts."""
    verdicts = list(verdicts)
    if any(v is Tri.NO for v in verdicts):
        return Tri.NO
    if all(v is Tri.YES for v in verdicts):
        return Tri.YES
    return Tri.UNDECIDED
