"""Pseudotrajectories of ``f -> lambda f`` on entire functions that no entire orbit follows.

Functions are power series; the seminorm on the disk of radius ``r`` is
replaced by the coefficient majorant ``q_r(f) = sum |a_n| r^n``, which
dominates the supremum norm and induces the same topology on polynomials.
The target ``g(z) = sum_{n>=1} (z/ell)^n / n^2`` has radius of convergence
exactly ``ell``, so ``q_ell(g) = pi^2/6`` and its majorant tails are trigamma
values: ``sum_{n>d} 1/n^2 = psi'(d + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import polygamma

from .core import ConstructionError, DomainError


def _tail(d: int) -> float:
    """``sum_{n > d} 1/n^2``."""
    return float(polygamma(1, d + 1))


@dataclass(frozen=True)
class EntireStep:
    j: int
    degree: int  # f_j = lambda^j * (g truncated at this degree)
    a_value: float  # q_ell(lambda^j g - f_j)
    a_bound: float  # delta / (2 |lambda|)
    b_value: float  # q_ell(lambda f_{j-1} - f_j), nan for j = 0
    b_bound: float  # delta / 2

    @property
    def ok(self) -> bool:
        return self.a_value < self.a_bound and (self.j == 0 or self.b_value < self.b_bound)


@dataclass(frozen=True)
class EntireDemo:
    lam: complex
    ell: float
    delta: float
    steps: tuple
    table: tuple  # rows (horizon, best_poly_degree, error)
    max_degree: int

    def coefficient(self, j: int, n: int) -> complex:
        """Coefficient of ``z^n`` in ``f_j``."""
        d = self.steps[j].degree
        if n < 1 or n > d:
            return 0j
        return self.lam ** j * self.ell ** (-n) / n ** 2

    def csv(self) -> str:
        lines = ["horizon,best_poly_degree,error"]
        lines += [f"{h},{deg},{err:.17g}" for h, deg, err in self.table]
        return "\n".join(lines) + "\n"


def _degree_for(target: float, scale: float) -> int:
    """Smallest ``d`` with ``scale * psi'(d + 1) < target``."""
    if scale * _tail(0) < target:
        return 0
    lo, hi = 0, 1
    while scale * _tail(hi) >= target:
        lo, hi = hi, hi * 2
        if hi > 1 << 62:
            raise ConstructionError("truncation degree overflows", target=target)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if scale * _tail(mid) < target:
            hi = mid
        else:
            lo = mid
    return hi


def _best_polynomial_error(lam: complex, ell: float, degrees: list[int], horizon: int, max_degree: int,
                           radius: float = 1.0, extra: int = 400) -> tuple[int, float]:
    """Least-squares polynomial candidates of degree <= max_degree and their sup error.

    Returns the candidate degree with the smallest ``max_{j <= horizon} q_radius(f_j - lambda^j f)``.
    """
    a = abs(lam)
    js = np.arange(horizon + 1)
    wts = a ** (2.0 * js)
    n_all = np.arange(1, max(max_degree, 1) + extra + 1)
    coeff = (radius / ell) ** n_all / n_all.astype(float) ** 2  # a_n radius^n
    dj = np.array(degrees[: horizon + 1])
    include = n_all[None, :] <= dj[:, None]  # [j, n]
    best = (0, math.inf)
    for D in range(0, max_degree + 1):
        b = np.zeros(n_all.size)
        free = n_all <= D
        # per-coefficient weighted least squares over j
        b[free] = (wts[:, None] * include[:, free]).sum(axis=0) / wts.sum() * coeff[free]
        diff = np.abs(include * coeff[None, :] - b[None, :]).sum(axis=1)
        # coefficients past the explicit range: |a_n| radius^n <= (radius/ell)^n, geometric remainder
        last = n_all[-1]
        q = radius / ell
        rem = q ** (last + 1) / (1 - q) if q < 1 else math.inf
        err = float(np.max(a ** js * (diff + rem)))
        if err < best[1]:
            best = (D, err)
    return best


def entire_demo(lam: complex, ell: float = 2.0, delta: float = 0.1, horizon: int = 10,
                max_degree: int = 12, table_horizons: tuple = (10, 20, 30)) -> EntireDemo:
    """Build ``f_{j+1} = lambda f_j + p_j`` with both step inequalities certified on the disk ``ell``.

    ``f_j`` is ``lambda^j`` times ``g`` truncated at the smallest degree
    ``d_j`` with ``|lambda|^j psi'(d_j + 1) < delta / (2 |lambda|)``, which
    makes ``p_j`` the block of coefficients between consecutive degrees.
    """
    lam = complex(lam)
    a = abs(lam)
    if a <= 1:
        raise DomainError("the demo needs |lambda| > 1")
    if ell <= 1:
        raise DomainError("the disk index must exceed 1")
    if delta <= 0:
        raise DomainError("delta must be positive")
    a_bound = delta / (2 * a)
    top = max([horizon] + list(table_horizons))
    degrees = [_degree_for(a_bound, a ** j) for j in range(top + 1)]
    steps = []
    for j in range(horizon + 1):
        d = degrees[j]
        a_val = a ** j * _tail(d)
        b_val = math.nan if j == 0 else a ** j * (_tail(degrees[j - 1]) - _tail(d))
        step = EntireStep(j, d, a_val, a_bound, b_val, delta / 2)
        if not step.ok:
            raise ConstructionError("truncation degree insufficient", step=j, degree=d)
        steps.append(step)
    table = []
    for h in table_horizons:
        deg, err = _best_polynomial_error(lam, ell, degrees, h, max_degree)
        table.append((h, deg, err))
    return EntireDemo(lam, float(ell), float(delta), tuple(steps), tuple(table), max_degree)
