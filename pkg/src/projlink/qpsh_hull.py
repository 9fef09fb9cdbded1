"""Quasi-plurisubharmonic functions and projective hull estimates.

A function u on P^n is omega-quasi-psh when dd^C u + omega >= 0. In an
affine chart with coordinates w this is positivity of the Hermitian matrix

    M = (1/pi) u_{j kbar} + (1/2pi) d_j dbar_k log(1 + |w|^2),

which :func:`qpsh_defect` estimates. Section logarithms log||sigma||^{1/l}
satisfy M = 0 off the divisor.

The best constant of a point x relative to a compact K is the least C with
||sigma(x)|| <= C^d sup_K ||sigma|| for all sections; :func:`best_constant`
estimates it degree by degree from below by projected gradient ascent on
the unit sphere of coefficient vectors.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .curves import ParamCurve, parameter_grid
from .errors import SingularPoint, ValidationError
from .fs_core import HomogeneousSection, ProjPoint, monomial_exponents

EPS_CLEAR = 1e-8


# ------------------------------------------------------------- qpsh functions


@dataclass(frozen=True)
class QPSHFunction:
    """u = max_k ( weight_k * log||sigma_k|| + shift_k ).

    ``QPSHFunction.section_log(sigma)`` is log||sigma||^{1/l}. Weights other
    than 1/l are allowed so that non-qpsh test functions can be built.
    """

    terms: tuple

    @classmethod
    def section_log(cls, sigma: HomogeneousSection, shift: float = 0.0) -> "QPSHFunction":
        return cls(((sigma, 1.0 / sigma.degree, shift),))

    @classmethod
    def weighted_log(cls, sigma: HomogeneousSection, weight: float, shift: float = 0.0) -> "QPSHFunction":
        return cls(((sigma, float(weight), shift),))

    @classmethod
    def maximum(cls, functions: Sequence["QPSHFunction"]) -> "QPSHFunction":
        return cls(tuple(t for f in functions for t in f.terms))

    @property
    def n(self) -> int:
        return self.terms[0][0].n

    def term_values(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = []
        for sigma, weight, shift in self.terms:
            nrm = np.abs(sigma(z)) / np.linalg.norm(z, axis=-1) ** sigma.degree
            with np.errstate(divide="ignore"):
                out.append(weight * np.log(nrm) + shift)
        return np.stack(out, axis=-1)

    def __call__(self, z) -> np.ndarray:
        return np.max(self.term_values(z), axis=-1)

    def chart_gradient(self, w: np.ndarray, chart: int, term: int) -> np.ndarray:
        """du/dw_j of one term in the affine chart {z_chart = 1}."""
        sigma, weight, _ = self.terms[term]
        z = np.insert(w, chart, 1.0, axis=-1)
        val, grad = sigma.value_and_gradient(z)
        g = np.delete(grad, chart, axis=-1)
        fs = np.conj(w) / (1.0 + np.sum(np.abs(w) ** 2, axis=-1, keepdims=True))
        return weight * (0.5 * g / val[..., None] - 0.5 * sigma.degree * fs)


def fs_chart_hessian(w: np.ndarray) -> np.ndarray:
    """d_j dbar_k log(1 + |w|^2) at a single chart point w."""
    w = np.asarray(w, dtype=complex)
    r = 1.0 + np.sum(np.abs(w) ** 2)
    return np.eye(w.size) / r - np.outer(np.conj(w), w) / r**2


def _chart_of(x: np.ndarray) -> int:
    return int(np.argmax(np.abs(x)))


def _complex_hessian_from_gradient(grad: Callable, w: np.ndarray, h: float) -> np.ndarray:
    # H[j, k] = dbar_k (du/dw_j) = (d/dx_k + i d/dy_k) / 2 applied to du/dw_j;
    # central differences at h and h/2 combined by Richardson extrapolation
    m = w.size

    def central(step):
        H = np.empty((m, m), dtype=complex)
        for k in range(m):
            e = np.zeros(m, dtype=complex)
            e[k] = step
            dx = (grad(w + e) - grad(w - e)) / (2 * step)
            dy = (grad(w + 1j * e) - grad(w - 1j * e)) / (2 * step)
            H[:, k] = 0.5 * (dx + 1j * dy)
        return H

    H = (4.0 * central(0.5 * h) - central(h)) / 3.0
    return 0.5 * (H + H.conj().T)


def _complex_hessian_from_values(u: Callable, w: np.ndarray, h: float) -> np.ndarray:
    m = w.size
    dirs = []
    for k in range(m):
        e = np.zeros(m, dtype=complex)
        e[k] = 1.0
        dirs.append(e)
        dirs.append(1j * e)
    R = np.empty((2 * m, 2 * m))
    u0 = u(w)
    for a in range(2 * m):
        for b in range(a, 2 * m):
            if a == b:
                R[a, a] = (u(w + h * dirs[a]) - 2 * u0 + u(w - h * dirs[a])) / h**2
            else:
                R[a, b] = R[b, a] = (
                    u(w + h * (dirs[a] + dirs[b]))
                    - u(w + h * (dirs[a] - dirs[b]))
                    - u(w - h * (dirs[a] - dirs[b]))
                    + u(w - h * (dirs[a] + dirs[b]))
                ) / (4 * h**2)
    H = np.empty((m, m), dtype=complex)
    for j in range(m):
        for k in range(m):
            xx, yy = R[2 * j, 2 * k], R[2 * j + 1, 2 * k + 1]
            xy, yx = R[2 * j, 2 * k + 1], R[2 * j + 1, 2 * k]
            H[j, k] = 0.25 * (xx + yy + 1j * (xy - yx))
    return 0.5 * (H + H.conj().T)


def defect_matrix(u, x, h: float = 1e-4, eps_clear: float = EPS_CLEAR, chart: int | None = None) -> np.ndarray:
    """Chart matrix of dd^C u + omega at x.

    ``u`` is a :class:`QPSHFunction` (Hessian by central differences of its
    exact chart gradient) or a callable of chart coordinates w (Hessian by
    second differences of values).
    """
    z = x.homogeneous if isinstance(x, ProjPoint) else np.asarray(x, dtype=complex)
    j0 = _chart_of(z) if chart is None else chart
    w = np.delete(z / z[j0], j0)
    if isinstance(u, QPSHFunction):
        for sigma, _, _ in u.terms:
            if np.abs(sigma(z)) / (np.linalg.norm(z) ** sigma.degree * sigma.coefficient_norm) <= eps_clear:
                raise SingularPoint("point lies on the divisor of a constituent section")
        k = int(np.argmax(u.term_values(z)))
        sigma = u.terms[k][0]
        zc = np.insert(w, j0, 1.0)
        val, grad = sigma.value_and_gradient(zc)
        dist = abs(val) / max(np.linalg.norm(np.delete(grad, j0)), 1e-300)
        step = h * min(1.0, dist)
        hess = _complex_hessian_from_gradient(lambda v: u.chart_gradient(v, j0, k), w, step)
    else:
        hess = _complex_hessian_from_values(u, w, h)
    return hess / np.pi + fs_chart_hessian(w) / (2 * np.pi)


def qpsh_defect(u, x, h: float = 1e-4, eps_clear: float = EPS_CLEAR) -> float:
    """Smallest eigenvalue of the chart matrix of dd^C u + omega at x (>= 0 when qpsh)."""
    return float(np.linalg.eigvalsh(defect_matrix(u, x, h, eps_clear))[0])


# -------------------------------------------------------------- best constant


@dataclass
class HullEstimate:
    point: ProjPoint
    best_constant_by_degree: dict
    running_max: dict
    verdict: str
    lambda_estimate: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        z = self.point.homogeneous
        return {
            "point": {"re": z.real.tolist(), "im": z.imag.tolist()},
            "best_constant_by_degree": {str(d): c for d, c in self.best_constant_by_degree.items()},
            "running_max": {str(d): c for d, c in self.running_max.items()},
            "verdict": self.verdict,
            "lambda_estimate": self.lambda_estimate,
            "diagnostics": self.diagnostics,
        }


@dataclass(frozen=True)
class HullConfig:
    restarts: int = 6
    steps: int = 120
    samples: int = 512
    schedule: tuple = (16.0, 64.0, 256.0, 1024.0)
    stable_tol: float = 0.01
    growth_slope: float = 0.05
    log_cap: float = 10.0
    seed: int = 0


def peak_section(x: np.ndarray, degree: int) -> np.ndarray:
    """Coefficients of (conj(x) . z)^degree, whose FS norm peaks at x."""
    u = x / np.linalg.norm(x)
    E = monomial_exponents(x.size - 1, degree)
    multinom = np.array([math.factorial(degree) / math.prod(math.factorial(k) for k in a) for a in E])
    return multinom * np.prod(np.conj(u) ** E, axis=-1)


class _RatioProblem:
    """log ||sigma(x)|| - softmax_p log ||sigma|| over curve samples, as a function of coefficients."""

    def __init__(self, x: np.ndarray, zs: np.ndarray, degree: int):
        probe = HomogeneousSection(x.size - 1, degree, np.ones(math.comb(x.size - 1 + degree, degree)))
        self.mx = probe.monomials(x) / np.linalg.norm(x) ** degree
        self.MG = probe.monomials(zs) / (np.linalg.norm(zs, axis=-1) ** degree)[:, None]

    def value_grad(self, c: np.ndarray, p: float):
        sx = self.mx @ c
        sg = self.MG @ c
        with np.errstate(divide="ignore"):
            lx = np.log(np.abs(sx))
            lg = np.log(np.abs(sg))
        a = p * lg
        amax = np.max(a)
        wts = np.exp(a - amax)
        Z = wts.sum()
        soft = (amax + np.log(Z)) / p
        pi = wts / Z
        gx = np.conj(self.mx) * sx / np.abs(sx) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            coef = np.where(np.abs(sg) > 0, pi * sg / np.abs(sg) ** 2, 0.0)
        gg = np.conj(self.MG).T @ coef
        return lx - soft, gx - gg

    def exact_log_ratio(self, c: np.ndarray) -> float:
        return float(np.log(np.abs(self.mx @ c)) - np.log(np.max(np.abs(self.MG @ c))))


def _sphere_ascent(problem: _RatioProblem, c: np.ndarray, steps: int, schedule: Sequence[float], cap: float):
    c = c / np.linalg.norm(c)
    for p in schedule:
        val, g = problem.value_grad(c, p)
        eta = 0.1
        for _ in range(steps):
            if not np.isfinite(val) or val > cap:
                break
            gt = g - np.real(np.vdot(c, g)) * c
            gn = np.linalg.norm(gt)
            if gn < 1e-12:
                break
            while eta > 1e-12:
                trial = c + eta * gt
                trial /= np.linalg.norm(trial)
                tv, tg = problem.value_grad(trial, p)
                if np.isfinite(tv) and tv >= val + 1e-4 * eta * gn**2:
                    c, val, g = trial, tv, tg
                    eta *= 1.5
                    break
                eta *= 0.5
            else:
                break
    return c


def curve_sup(gamma: ParamCurve, coefficients: np.ndarray, degree: int, m: int = 512) -> float:
    """sup over the curve of ||sigma||, from m and 2m samples plus golden-section polishing."""
    sigma = HomogeneousSection(gamma.n, degree, coefficients)
    best = 0.0
    for comp in gamma.components:
        t = parameter_grid(2 * m)
        z = comp(t)
        vals = np.abs(sigma(z)) / np.linalg.norm(z, axis=-1) ** degree
        i = int(np.argmax(vals))
        lo, hi = t[i] - np.pi / m, t[i] + np.pi / m
        g = (np.sqrt(5.0) - 1.0) / 2.0

        def f(s):
            zz = comp(np.array([s]))
            return float(np.abs(sigma(zz))[0] / np.linalg.norm(zz) ** degree)

        for _ in range(50):
            a, b = hi - g * (hi - lo), lo + g * (hi - lo)
            if f(a) > f(b):
                hi = b
            else:
                lo = a
        best = max(best, float(vals[i]), f(0.5 * (lo + hi)))
    return best


def best_constant(
    gamma: ParamCurve,
    x,
    degrees: Iterable[int] = range(1, 7),
    config: HullConfig = HullConfig(),
    point_index: int = 0,
) -> HullEstimate:
    """Lower-bound estimates of C_d(x) = sup_sigma (||sigma(x)|| / sup_Gamma ||sigma||)^{1/d}."""
    point = x if isinstance(x, ProjPoint) else ProjPoint(x)
    xz = point.homogeneous
    if xz.size != gamma.n + 1:
        raise ValidationError("point and curve live in different projective spaces")
    zs = np.concatenate([c(parameter_grid(config.samples)) for c in gamma.components])
    degrees = sorted(set(int(d) for d in degrees))
    constants, witnesses = {}, {}
    for d in degrees:
        rng = np.random.default_rng([config.seed, point_index, d])
        problem = _RatioProblem(xz, zs, d)
        N = problem.mx.size
        starts = [peak_section(xz, d)]
        starts += [rng.standard_normal(N) + 1j * rng.standard_normal(N) for _ in range(config.restarts)]
        best, best_c = -math.inf, None
        for c0 in starts:
            c = _sphere_ascent(problem, c0, config.steps, config.schedule, cap=d * config.log_cap)
            sx = abs(problem.mx @ c)
            sup = curve_sup(gamma, c, d, config.samples)
            if sx == 0.0 or not np.isfinite(sx):
                continue
            lr = math.inf if sup == 0.0 else math.log(sx) - math.log(sup)
            if lr > best:
                best, best_c = lr, c
        constants[d] = math.exp(min(best / d, 700.0))
        witnesses[d] = best_c
    running, acc = {}, 0.0
    for d in degrees:
        acc = max(acc, constants[d])
        running[d] = acc
    verdict = _verdict(degrees, constants, running, config)
    lam = math.log(running[degrees[-1]]) if degrees else math.nan
    return HullEstimate(
        point,
        constants,
        running,
        verdict,
        lam,
        {"witness_norms": {str(d): float(np.linalg.norm(w)) for d, w in witnesses.items() if w is not None}},
    )


def _verdict(degrees, constants, running, config: HullConfig) -> str:
    if not degrees:
        return "undetermined"
    top = math.log(running[degrees[-1]])
    if top >= config.log_cap:
        return "non-member"
    if len(degrees) >= 2:
        slope = np.polyfit(degrees, [math.log(constants[d]) for d in degrees], 1)[0]
    else:
        slope = 0.0
    k = max(2, math.ceil(len(degrees) / 3))
    tail = [running[d] for d in degrees[-k:]]
    if len(degrees) >= 2 and (max(tail) - min(tail)) / min(tail) < config.stable_tol:
        return "member"
    if slope > config.growth_slope:
        return "non-member"
    return "undetermined"


def default_threads() -> int:
    return max(1, int(os.environ.get("PROJLINK_THREADS", "1")))


def hull_field(
    gamma: ParamCurve,
    points: Sequence,
    degrees: Iterable[int] = range(1, 7),
    config: HullConfig = HullConfig(),
    threads: int | None = None,
) -> list:
    """best_constant over a batch of points; output order matches input order."""
    degrees = list(degrees)
    pts = [p if isinstance(p, ProjPoint) else ProjPoint(p) for p in points]
    jobs = list(enumerate(pts))

    def run(job):
        i, p = job
        return best_constant(gamma, p, degrees, config, point_index=i)

    workers = threads or default_threads()
    if workers <= 1:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(run, jobs))


def chart_points(coords: Sequence[Sequence[complex]], chart: int = 0) -> list:
    """ProjPoints from affine coordinate vectors in the chart {z_chart = 1}."""
    return [ProjPoint.affine(np.atleast_1d(w), chart) for w in coords]


def write_field_csv(path, estimates: Sequence[HullEstimate], chart: int = 0) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        n = estimates[0].point.n if estimates else 0
        header = []
        for j in range(n):
            header += [f"w{j + 1}_re", f"w{j + 1}_im"]
        wr.writerow(header + ["lambda_estimate", "verdict"])
        for e in estimates:
            z = e.point.homogeneous
            w = np.delete(z / z[chart], chart) if z[chart] != 0 else np.full(n, np.nan)
            row = []
            for v in w:
                row += [f"{v.real:.12g}", f"{v.imag:.12g}"]
            wr.writerow(row + [f"{e.lambda_estimate:.12g}", e.verdict])


def write_field_svg(path, xs: Sequence[float], ys: Sequence[float], values: np.ndarray, cell: int = 12) -> None:
    """Heat map of a len(ys) x len(xs) array of Lambda estimates, no plotting dependency."""
    values = np.asarray(values, dtype=float)
    finite = values[np.isfinite(values)]
    lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    span = hi - lo if hi > lo else 1.0
    W, H = len(xs) * cell, len(ys) * cell
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H + 20}" viewBox="0 0 {W} {H + 20}">']
    for i in range(len(ys)):
        for j in range(len(xs)):
            v = values[i, j]
            if np.isfinite(v):
                a = (v - lo) / span
                r, g, b = int(255 * a), int(80 + 100 * (1 - abs(2 * a - 1))), int(255 * (1 - a))
                fill = f"rgb({r},{g},{b})"
            else:
                fill = "rgb(40,40,40)"
            y = (len(ys) - 1 - i) * cell
            parts.append(f'<rect x="{j * cell}" y="{y}" width="{cell}" height="{cell}" fill="{fill}"/>')
    parts.append(
        f'<text x="2" y="{H + 15}" font-size="11" font-family="monospace">'
        f"Lambda in [{lo:.4g}, {hi:.4g}]</text>"
    )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def dc_integral(u: QPSHFunction, gamma: ParamCurve, tol: float = 1e-12) -> float:
    """int_Gamma d^C u using chart gradients, switching to the best chart at every sample.

    d^C u (v) = (1/pi) Im(sum_j du/dw_j * dw_j/dt) in any affine chart.
    """
    from .quadrature import periodic_trapezoid

    total = 0.0
    for comp in gamma.components:

        def integrand(t, comp=comp):
            z, v = comp(t), comp.derivative(t)
            out = np.empty(t.size)
            charts = np.argmax(np.abs(z), axis=-1)
            for j0 in np.unique(charts):
                sel = charts == j0
                zj = z[sel, j0][:, None]
                w = np.delete(z[sel] / zj, j0, axis=-1)
                dw = np.delete((v[sel] * zj - z[sel] * v[sel, j0][:, None]) / zj**2, j0, axis=-1)
                k = np.argmax(u.term_values(z[sel]), axis=-1)
                vals = np.empty(w.shape[0])
                for term in np.unique(k):
                    m = k == term
                    g = u.chart_gradient(w[m], int(j0), int(term))
                    vals[m] = np.imag(np.sum(g * dw[m], axis=-1)) / np.pi
                out[sel] = vals
            return out

        total += comp.multiplicity * periodic_trapezoid(integrand, tol=tol).value
    return total
