"""Quadrature rules used by the invariants.

Periodic integrands over a curve use the trapezoid rule, which converges
geometrically for analytic periodic functions; panels are doubled until two
successive values agree. Chain areas use Gauss-Legendre in s times the
trapezoid rule in t.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass
class QuadratureResult:
    value: float
    error: float
    panels: int
    converged: bool
    history: list = field(default_factory=list)


def periodic_trapezoid(
    f: Callable[[np.ndarray], np.ndarray],
    tol: float = 1e-12,
    m0: int = 64,
    m_max: int = 1 << 16,
) -> QuadratureResult:
    """Integrate a 2pi-periodic f over [0, 2pi).

    The error estimate is |I_2m - I_m| at the final doubling; for analytic
    integrands it bounds the error of I_2m by a wide margin.
    """
    m = m0
    t = TWO_PI * np.arange(m) / m
    total = float(np.sum(f(t)))
    value = TWO_PI * total / m
    history = [(m, value)]
    while True:
        t_new = TWO_PI * (np.arange(m) + 0.5) / m
        total += float(np.sum(f(t_new)))
        m *= 2
        new = TWO_PI * total / m
        err = abs(new - value)
        history.append((m, new))
        value = new
        if err <= tol:
            return QuadratureResult(value, err, m, True, history)
        if m >= m_max:
            return QuadratureResult(value, err, m, False, history)


@lru_cache(maxsize=32)
def _gauss_unit(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def gauss_trapezoid(density: Callable, ns: int, nt: int) -> float:
    """Integral of density(s, t) over [0,1] x [0,2pi)."""
    s, ws = _gauss_unit(ns)
    t = TWO_PI * np.arange(nt) / nt
    S, T = np.meshgrid(s, t, indexing="ij")
    vals = density(S, T)
    return float(ws @ vals.sum(axis=1)) * TWO_PI / nt


def adaptive_area(
    density: Callable,
    tol: float = 1e-11,
    ns0: int = 16,
    nt0: int = 64,
    ns_max: int = 512,
    nt_max: int = 4096,
) -> QuadratureResult:
    """Tensor-product rule refined by doubling both directions until stable."""
    ns, nt = ns0, nt0
    value = gauss_trapezoid(density, ns, nt)
    history = [((ns, nt), value)]
    while True:
        ns, nt = min(2 * ns, ns_max), min(2 * nt, nt_max)
        new = gauss_trapezoid(density, ns, nt)
        err = abs(new - value)
        history.append(((ns, nt), new))
        value = new
        if err <= tol * max(1.0, abs(new)):
            return QuadratureResult(value, err, ns * nt, True, history)
        if ns >= ns_max and nt >= nt_max:
            return QuadratureResult(value, err, ns * nt, False, history)
