"""Projective winding and linking numbers, intersection counts and masses.

For a curve Gamma, a section sigma of O(l) with divisor Z, and a 2-chain N
with dN = Gamma:

    Wind(Gamma, sigma) = int_Gamma d^C log||sigma||
    Link(Gamma, Z)     = N.Z - l * int_N omega

and the two agree. Winding numbers are computed by curve quadrature, linking
numbers by root finding on N plus an area integral, so comparing them is a
genuine cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .curves import ChainPiece, HoloChain, HoloPiece, ParamChain2, ParamCurve, chain_boundary_check, match_boundary
from .errors import NonIntegral, NonTransversal, NumericalError, SeedExhaustion, ValidationError, ZeroOnCurve
from .fs_core import (
    HomogeneousSection,
    dc_log_norm_pullback,
    fs_area_density,
    random_section,
    relative_fs_norm,
)
from .quadrature import adaptive_area, periodic_trapezoid

EPS_CLEAR = 1e-8
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Divisor:
    """Z = Div(sigma); its degree is the degree of sigma."""

    section: HomogeneousSection

    @property
    def degree(self) -> int:
        return self.section.degree


def _as_section(Z) -> HomogeneousSection:
    return Z.section if isinstance(Z, Divisor) else Z


@dataclass
class InvariantReport:
    value: float
    estimated_error: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"value": self.value, "error": self.estimated_error, "diagnostics": self.diagnostics}


# ----------------------------------------------------------------- winding


def _clearance(sigma: HomogeneousSection, z: np.ndarray, eps_clear: float) -> float:
    c = float(np.min(relative_fs_norm(sigma, z)))
    if c <= eps_clear:
        raise ZeroOnCurve(f"section comes within {c:.3g} (relative FS norm) of the curve; need > {eps_clear:g}")
    return c


def winding_number(
    gamma: ParamCurve,
    sigma,
    eps_clear: float = EPS_CLEAR,
    tol: float = 1e-12,
    m0: int = 64,
    m_max: int = 1 << 16,
) -> InvariantReport:
    """Wind_P(Gamma, sigma) by periodic trapezoid quadrature of d^C log||sigma||."""
    sigma = _as_section(sigma)
    if sigma.n != gamma.n:
        raise ValidationError(f"section on P^{sigma.n}, curve in P^{gamma.n}")
    total, err, panels, clear, converged = 0.0, 0.0, [], math.inf, True
    for comp in gamma.components:
        seen = [math.inf]

        def integrand(t, comp=comp, seen=seen):
            z = comp(t)
            seen[0] = min(seen[0], _clearance(sigma, z, eps_clear))
            return dc_log_norm_pullback(sigma, z, comp.derivative(t))

        q = periodic_trapezoid(integrand, tol=tol, m0=m0, m_max=m_max)
        total += comp.multiplicity * q.value
        err += comp.multiplicity * q.error
        panels.append(q.panels)
        clear = min(clear, seen[0])
        converged &= q.converged
    return InvariantReport(
        total,
        err,
        {"panels": panels, "clearance": clear, "converged": converged, "degree": sigma.degree},
    )


def reduced_winding(gamma: ParamCurve, sigma, **kw) -> InvariantReport:
    rep = winding_number(gamma, sigma, **kw)
    d = _as_section(sigma).degree
    return InvariantReport(rep.value / d, rep.estimated_error / d, rep.diagnostics)


# ------------------------------------------------------- intersection count


@dataclass
class IntersectionResult:
    count: int
    roots: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


def _edge_winding(piece: ChainPiece, sigma: HomogeneousSection, s_value: float) -> int:
    """Winding number of t -> sigma(F(s_value, t)) around 0, or 0 for a collapsed edge."""

    def integrand(t):
        F, _, Ft = piece.evaluate(np.full_like(t, s_value), t)
        val, grad = sigma.value_and_gradient(F)
        if np.min(np.abs(val) / (sigma.coefficient_norm * np.linalg.norm(F, axis=-1) ** sigma.degree)) <= EPS_CLEAR:
            raise NonTransversal(f"divisor meets the s={s_value:g} edge of the chain")
        return np.imag(np.sum(grad * Ft, axis=-1) / val) / TWO_PI

    q = periodic_trapezoid(integrand, tol=1e-9, m0=64, m_max=1 << 15)
    k = round(q.value)
    if abs(q.value - k) > 1e-6:
        raise NonIntegral(f"edge winding {q.value!r} is not an integer")
    return int(k)


def _newton_roots(piece: ChainPiece, sigma: HomogeneousSection, grid: int, iters: int = 60):
    s = (np.arange(grid) + 0.5) / grid
    t = TWO_PI * np.arange(grid) / grid
    S, T = (a.ravel() for a in np.meshgrid(s, t, indexing="ij"))
    active = np.ones(S.shape, dtype=bool)
    alive = np.ones(S.shape, dtype=bool)
    for it in range(iters):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        F, Fs, Ft = piece.evaluate(S[idx], T[idx])
        val, grad = sigma.value_and_gradient(F)
        fs = np.sum(grad * Fs, axis=-1)
        ft = np.sum(grad * Ft, axis=-1)
        det = fs.real * ft.imag - ft.real * fs.imag
        with np.errstate(divide="ignore", invalid="ignore"):
            ds = -(ft.imag * val.real - ft.real * val.imag) / det
            dt = -(-fs.imag * val.real + fs.real * val.imag) / det
        bad = ~np.isfinite(ds) | ~np.isfinite(dt)
        ds = np.where(bad, 0.0, ds)
        dt = np.where(bad, 0.0, dt)
        shrink = np.minimum(1.0, np.minimum(0.1 / np.maximum(np.abs(ds), 1e-300), 0.3 / np.maximum(np.abs(dt), 1e-300)))
        s_new = S[idx] + shrink * ds
        S[idx] = s_new
        T[idx] = np.mod(T[idx] + shrink * dt, TWO_PI)
        out = bad | (s_new < -0.2) | (s_new > 1.2)
        alive[idx[out]] = False
        small = np.hypot(ds, dt) < 1e-14
        # seeds still far from any zero after many steps are wandering
        stalled = np.zeros_like(small)
        if it >= 25:
            scale = sigma.coefficient_norm * np.linalg.norm(F, axis=-1) ** sigma.degree
            stalled = np.abs(val) > 1e-4 * scale
            alive[idx[stalled]] = False
        active[idx[out | small | stalled]] = False
    F, Fs, Ft = piece.evaluate(S, T)
    val, grad = sigma.value_and_gradient(F)
    scale = sigma.coefficient_norm * np.linalg.norm(F, axis=-1) ** sigma.degree
    ok = alive & (np.abs(val) <= 1e-11 * scale) & (S > 0.0) & (S < 1.0)
    fs = np.sum(grad * Fs, axis=-1)
    ft = np.sum(grad * Ft, axis=-1)
    return S[ok], T[ok], fs[ok], ft[ok], F[ok]


def _dedup(S, T, radius):
    keep = []
    for i in np.argsort(S, kind="stable"):
        for j in keep:
            dt = abs(T[i] - T[j])
            dt = min(dt, TWO_PI - dt)
            if math.hypot(S[i] - S[j], dt) < radius:
                break
        else:
            keep.append(i)
    return sorted(keep, key=lambda i: (S[i], T[i]))


def intersection_count(
    N: ParamChain2,
    Z,
    grid: int = 64,
    dedup: float = 1e-7,
    transversality: float = 1e-8,
    max_grid: int = 256,
) -> IntersectionResult:
    """Signed count N.Z from Newton-located zeros of sigma(F(s, t)).

    Each zero gets the sign of the real Jacobian of (s, t) -> sigma(F(s, t)),
    which equals |df/dzeta|^2 - |df/dzetabar|^2 in the chart zeta = s + i t.
    The total is checked against the argument principle on the edges of the
    parameter rectangle; the seed grid is refined on disagreement.
    """
    sigma = _as_section(Z)
    total = 0
    roots = []
    grids = []
    for index, piece in enumerate(N.pieces):
        if isinstance(piece, HoloPiece):
            # complex pieces: polynomial roots, all positive, center included
            inside = _holo_piece_roots(piece, sigma, index, 1e-9)
            total += piece.multiplicity * inside.size
            roots.extend({"piece": index, "w": complex(x), "sign": 1, "multiplicity": piece.multiplicity} for x in inside)
            grids.append(0)
            continue
        expected = _edge_winding(piece, sigma, 1.0) - _edge_winding(piece, sigma, 0.0)
        g = grid
        while True:
            S, T, fs, ft, F = _newton_roots(piece, sigma, g)
            keep = _dedup(S, T, dedup)
            signs = []
            local = []
            for i in keep:
                det = fs[i].real * ft[i].imag - ft[i].real * fs[i].imag
                size = abs(fs[i]) * abs(ft[i])
                if size == 0.0 or abs(det) < transversality * size:
                    raise NonTransversal(
                        f"degenerate intersection at s={S[i]:.6g}, t={T[i]:.6g} on piece {index}; perturb the chain"
                    )
                sign = 1 if det > 0 else -1
                signs.append(sign)
                local.append({"piece": index, "s": float(S[i]), "t": float(T[i]), "sign": sign,
                              "point": F[i] / np.linalg.norm(F[i])})
            if sum(signs) == expected:
                break
            if g >= max_grid:
                raise SeedExhaustion(
                    f"piece {index}: Newton found signed count {sum(signs)}, argument principle gives {expected}"
                )
            g *= 2
        grids.append(g)
        total += piece.multiplicity * expected
        for r in local:
            r["multiplicity"] = piece.multiplicity
        roots.extend(local)
    return IntersectionResult(int(total), roots, {"grid": grids})


def chain_area(N, tol: float = 1e-11) -> InvariantReport:
    """int_N omega summed over pieces with multiplicity."""
    pieces = N.pieces
    total, err, converged = 0.0, 0.0, True
    for piece in pieces:
        def density(S, T, piece=piece):
            F, Fs, Ft = piece.evaluate(S, T)
            return fs_area_density(F, Fs, Ft)

        q = adaptive_area(density, tol=tol)
        total += piece.multiplicity * q.value
        err += abs(piece.multiplicity) * q.error
        converged &= q.converged
    return InvariantReport(total, err, {"converged": converged})


def projective_linking(
    gamma: ParamCurve,
    Z,
    N: ParamChain2,
    eps_clear: float = EPS_CLEAR,
    boundary_tol: float = 1e-8,
    grid: int = 64,
) -> InvariantReport:
    """Link_P(Gamma, Z) = N.Z - deg(Z) int_N omega."""
    sigma = _as_section(Z)
    if sigma.n != gamma.n:
        raise ValidationError(f"section on P^{sigma.n}, curve in P^{gamma.n}")
    check = match_boundary(N.edges(boundary_tol), gamma, boundary_tol)
    if not check.ok:
        raise ValidationError(f"chain does not cobound the curve: {check.mismatches}")
    for comp in gamma.components:
        _clearance(sigma, comp(TWO_PI * np.arange(1024) / 1024), eps_clear)
    hits = intersection_count(N, sigma, grid=grid)
    area = chain_area(N)
    value = hits.count - sigma.degree * area.value
    return InvariantReport(
        value,
        sigma.degree * area.estimated_error,
        {
            "intersection_number": hits.count,
            "area": area.value,
            "roots": [{k: v for k, v in r.items() if k != "point"} for r in hits.roots],
            "seed_grid": hits.diagnostics["grid"],
            "degree": sigma.degree,
        },
    )


def reduced_linking(gamma: ParamCurve, Z, N: ParamChain2, **kw) -> InvariantReport:
    rep = projective_linking(gamma, Z, N, **kw)
    d = _as_section(Z).degree
    return InvariantReport(rep.value / d, rep.estimated_error / d, rep.diagnostics)


# ------------------------------------------------------------------ affine


def affine_linking(gamma: ParamCurve, sigma, chart: int = 0, eps_clear: float = EPS_CLEAR) -> int:
    """Classical linking number of Gamma with {p = 0}, p the dehomogenization of sigma.

    Computed as the multiplicity-weighted winding number of t -> p(x(t))
    with x(t) the affine coordinates of gamma(t) in the given chart.
    """
    sigma = _as_section(sigma)
    total = 0.0
    for comp in gamma.components:
        def integrand(t, comp=comp):
            z, v = comp(t), comp.derivative(t)
            zc = z[..., chart]
            if np.min(np.abs(zc) / np.linalg.norm(z, axis=-1)) <= eps_clear:
                raise ZeroOnCurve("curve meets the hyperplane at infinity of the chart")
            x = z / zc[..., None]
            dx = (v * zc[..., None] - z * v[..., chart][..., None]) / (zc**2)[..., None]
            _clearance(sigma, x, eps_clear)
            val, grad = sigma.value_and_gradient(x)
            # the chart coordinate of x is constant, so its gradient entry drops out
            dx[..., chart] = 0.0
            return np.imag(np.sum(grad * dx, axis=-1) / val) / TWO_PI

        q = periodic_trapezoid(integrand, tol=1e-10)
        total += comp.multiplicity * q.value
    k = round(total)
    if abs(total - k) > 1e-6:
        raise NonIntegral(f"affine linking {total!r} is not within 1e-6 of an integer")
    return int(k)


# ------------------------------------------------------- holomorphic chains


def chain_mass(T: HoloChain, tol: float = 1e-11) -> InvariantReport:
    """Mass of a positive holomorphic chain: sum_k n_k int_{V_k} omega."""
    rep = chain_area(T, tol=tol)
    return InvariantReport(max(rep.value, 0.0), rep.estimated_error, rep.diagnostics)


def _composition_coefficients(piece: HoloPiece, sigma: HomogeneousSection) -> np.ndarray:
    D = sigma.degree * piece.polynomial_degree
    M = D + 1
    rho = piece.outer_radius
    w = rho * np.exp(TWO_PI * 1j * np.arange(M) / M)
    g = sigma(piece.phi(w))
    a = np.fft.fft(g) / M
    return a / rho ** np.arange(M)


def _holo_piece_roots(piece: HoloPiece, sigma: HomogeneousSection, index: int, boundary_clearance: float) -> np.ndarray:
    """Zeros of the polynomial sigma(phi(w)) inside the piece; each counts positively."""
    a = _composition_coefficients(piece, sigma)
    scale = np.max(np.abs(a))
    probe = sigma(piece.phi(piece.outer_radius * np.exp(1j * np.linspace(0.1, 6.0, 7))))
    if scale == 0.0 or np.max(np.abs(probe)) <= 1e-13 * sigma.coefficient_norm:
        raise NonTransversal(f"piece {index} lies inside the divisor")
    a = np.where(np.abs(a) < 1e-14 * scale, 0.0, a)
    coeffs = np.trim_zeros(a[::-1], "f")
    w = np.roots(coeffs) if coeffs.size > 1 else np.array([], dtype=complex)
    r = np.abs(w)
    lo, hi = piece.inner_radius, piece.outer_radius
    near = (np.abs(r - hi) < boundary_clearance * hi) | ((lo > 0) & (np.abs(r - lo) < boundary_clearance * hi))
    if np.any(near):
        raise ZeroOnCurve(f"divisor meets the boundary of piece {index}")
    return w[(r < hi) & ((lo == 0.0) | (r > lo))]


def holo_intersection_count(T: HoloChain, Z, boundary_clearance: float = 1e-9) -> IntersectionResult:
    """T.Z for a holomorphic chain: zeros of the polynomial sigma(phi(w)) inside each piece."""
    sigma = _as_section(Z)
    total = 0
    roots = []
    for index, piece in enumerate(T.pieces):
        inside = _holo_piece_roots(piece, sigma, index, boundary_clearance)
        total += piece.multiplicity * inside.size
        roots.extend({"piece": index, "w": complex(x), "multiplicity": piece.multiplicity} for x in inside)
    return IntersectionResult(int(total), roots)


@dataclass
class NecessityReport:
    ok: bool
    mass: float
    minimum: float
    argmin: int | None
    boundary: dict
    values: list = field(default_factory=list)
    skipped: int = 0

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "mass": self.mass,
            "min_reduced_winding": self.minimum,
            "argmin": self.argmin,
            "boundary": self.boundary,
            "n_sections": len(self.values),
            "skipped": self.skipped,
        }


def necessity_check(
    gamma: ParamCurve,
    T: HoloChain,
    sections: Iterable[HomogeneousSection],
    tol: float = 1e-6,
) -> NecessityReport:
    """Check reduced winding >= -M(T) for every section that clears the curve."""
    boundary = chain_boundary_check(T, gamma)
    if not boundary.ok:
        raise ValidationError(f"chain boundary does not match the curve: {boundary.mismatches}")
    mass = chain_mass(T).value
    values, skipped = [], 0
    for sigma in sections:
        try:
            values.append(reduced_winding(gamma, sigma).value)
        except ZeroOnCurve:
            skipped += 1
            values.append(math.nan)
    finite = [v for v in values if not math.isnan(v)]
    minimum = min(finite) if finite else math.nan
    argmin = values.index(minimum) if finite else None
    ok = bool(finite) and minimum >= -mass - tol
    return NecessityReport(ok, mass, minimum, argmin, boundary.to_dict(), values, skipped)


@dataclass
class UniquenessReport:
    value: float
    argmin: int | None
    ratios: list
    conclusive: bool


def uniqueness_criterion(T: HoloChain, divisors: Sequence, zero_tol: float = 0.0) -> UniquenessReport:
    """min over the ensemble of T.Z / deg Z; a zero value certifies least mass."""
    ratios = []
    for Z in divisors:
        sigma = _as_section(Z)
        ratios.append(holo_intersection_count(T, sigma).count / sigma.degree)
    if not ratios:
        return UniquenessReport(math.inf, None, [], False)
    value = min(ratios)
    return UniquenessReport(value, ratios.index(value), ratios, value <= zero_tol)


# ----------------------------------------------------------- ensembles


def clearing_sections(
    gamma: ParamCurve,
    count: int,
    degrees: Sequence[int],
    rng: np.random.Generator,
    clearance: float = 1e-3,
    bombieri: bool = False,
    max_tries: int | None = None,
) -> list:
    """Random sections whose relative FS norm stays above ``clearance`` on the curve."""
    z = np.concatenate([c(TWO_PI * np.arange(512) / 512) for c in gamma.components])
    out = []
    tries = 0
    limit = max_tries or 100 * count
    while len(out) < count:
        tries += 1
        if tries > limit:
            raise NumericalError(f"only {len(out)} of {count} random sections cleared the curve")
        d = int(rng.choice(degrees))
        sigma = random_section(gamma.n, d, rng, bombieri=bombieri)
        if np.min(relative_fs_norm(sigma, z)) > clearance:
            out.append(sigma)
    return out
