"""Frozen reference values, each computed independently of the package.

DISK_AREA: omega-area of {|w| <= r} in a line, r^2/(1 + r^2), by the radial
  closed form int_0^r 2 rho / (1 + rho^2)^2 d rho; also confirmed with
  scipy dblquad to 1e-15.
CONIC_PIECE_MASS: omega-area of w -> (1, w, w^2) over |w| <= 1 by scipy
  dblquad of |phi ^ phi'|^2 / (pi |phi|^4); equals half the conic degree.
CIRCLE_WINDING: unit circle (1, e^{it}, 0); the line z1 = 0 meets the disk
  once, so N.Z - area = 1 - 1/2; the line z0 = 0 misses it, 0 - 1/2.
HULL_ORIGIN: for the unit circle in P^1, ||sigma([1:0])|| = |a_0| and
  sup_circle ||sigma|| >= |a_0| / 2^{d/2} with equality for z0^d, so
  C_d([1:0]) = sqrt(2) for every d.
"""

import math
import warnings

import numpy as np

DISK_AREA = {0.5: 0.2, 1.0: 0.5, 2.0: 0.8}
CONIC_PIECE_MASS = 1.0
CIRCLE_WINDING = {"through": 0.5, "missing": -0.5}
HULL_ORIGIN = math.sqrt(2.0)


def violating_defect(weight: float, degree: int, w: np.ndarray) -> float:
    """Least eigenvalue of M for u = weight * log||sigma||, off the divisor.

    log|p| is pluriharmonic, so M = (1 - weight*d)/(2 pi) * H with H the
    Hessian of log(1 + |w|^2), whose eigenvalues are 1/r (across w) and
    1/r^2 (along w), r = 1 + |w|^2.
    """
    r = 1.0 + float(np.sum(np.abs(w) ** 2))
    k = (1.0 - weight * degree) / (2.0 * math.pi)
    eig = [1.0 / r, 1.0 / r**2] if w.size > 1 else [1.0 / r**2]
    return min(k * e for e in eig)


def convex_best_constant(x: np.ndarray, degree: int, samples: int = 512) -> float:
    """C_d(x) for the unit circle in P^1 by second-order cone programming.

    maximize Re sigma(x) / ||x||^d subject to ||sigma(gamma_i)|| <= 1 at
    the samples; the optimum is C_d(x)^d (up to sampling of the sup).
    """
    import cvxpy as cp

    t = 2 * np.pi * np.arange(samples) / samples
    z = np.stack([np.ones_like(t), np.exp(1j * t)], axis=-1)
    k = np.arange(degree + 1)
    A = (z[:, 0:1] ** (degree - k)) * (z[:, 1:2] ** k) / np.linalg.norm(z, axis=-1, keepdims=True) ** degree
    mx = (x[0] ** (degree - k)) * (x[1] ** k) / np.linalg.norm(x) ** degree
    c = cp.Variable(degree + 1, complex=True)
    prob = cp.Problem(cp.Maximize(cp.real(mx @ c)), [cp.abs(A @ c) <= 1])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        prob.solve(solver=cp.CLARABEL)
    return float(prob.value) ** (1.0 / degree)
