"""Closed curves, cobounding 2-chains and holomorphic chains in P^n.

A curve component is a trigonometric polynomial t -> sum_k a_k e^{ikt} in
homogeneous coordinates, so samples and derivatives are exact. A 2-chain
piece is any map F(s, t) on [0, 1] x [0, 2pi) that is periodic in t; with
the orientation ds ^ dt its boundary is F(1, .) minus F(0, .).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NumericalError, ValidationError
from .fs_core import HomogeneousSection, ProjPoint, TangentVector, relative_fs_norm

TWO_PI = 2.0 * np.pi


def parameter_grid(m: int) -> np.ndarray:
    return TWO_PI * np.arange(m) / m


@dataclass(frozen=True, eq=False)
class CurveComponent:
    """gamma(t) = sum_k a_k e^{ikt}, traversed in increasing t, with a multiplicity."""

    modes: np.ndarray
    coefficients: np.ndarray
    multiplicity: int = 1

    def __post_init__(self):
        k = np.asarray(self.modes, dtype=int).reshape(-1)
        a = np.atleast_2d(np.asarray(self.coefficients, dtype=complex))
        if a.shape[0] != k.size:
            raise ValidationError("one coefficient vector per Fourier mode is required")
        if len(set(k.tolist())) != k.size:
            raise ValidationError("Fourier modes must be distinct")
        if a.shape[1] < 2:
            raise ValidationError("curve needs at least 2 homogeneous coordinates")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise ValidationError("multiplicity must be a positive integer")
        object.__setattr__(self, "modes", k)
        object.__setattr__(self, "coefficients", a)
        object.__setattr__(self, "multiplicity", int(self.multiplicity))

    @classmethod
    def from_dict(cls, modes: dict, multiplicity: int = 1) -> "CurveComponent":
        ks = sorted(modes)
        return cls(np.array(ks), np.array([modes[k] for k in ks]), multiplicity)

    @property
    def n(self) -> int:
        return self.coefficients.shape[1] - 1

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.exp(1j * np.multiply.outer(t, self.modes)) @ self.coefficients

    def derivative(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return (np.exp(1j * np.multiply.outer(t, self.modes)) * (1j * self.modes)) @ self.coefficients

    def reversed(self) -> "CurveComponent":
        return CurveComponent(-self.modes, self.coefficients, self.multiplicity)

    def with_multiplicity(self, multiplicity: int) -> "CurveComponent":
        return CurveComponent(self.modes, self.coefficients, multiplicity)

    def min_norm(self, m: int = 2048) -> float:
        return float(np.min(np.linalg.norm(self(parameter_grid(m)), axis=-1)))

    def self_intersection_gap(self, m: int = 512) -> float:
        """Smallest FS distance between non-adjacent samples, relative to local spacing."""
        u = _unit(self(parameter_grid(m)))
        G = np.abs(u @ np.conj(u).T)
        D = np.arccos(np.clip(G, 0.0, 1.0))
        step = np.array([D[i, (i + 1) % m] for i in range(m)])
        idx = np.arange(m)
        gap = np.abs(idx[:, None] - idx[None, :])
        gap = np.minimum(gap, m - gap)
        local = np.maximum(step[:, None], step[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(gap >= 2, D / local, np.inf)
        return float(np.min(ratio))


def _unit(z: np.ndarray) -> np.ndarray:
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


@dataclass(frozen=True, eq=False)
class ParamCurve:
    """An oriented closed curve: a list of components on a common P^n."""

    components: tuple
    n: int

    def __post_init__(self):
        comps = tuple(self.components)
        for c in comps:
            if c.n != self.n:
                raise ValidationError(f"component lives in P^{c.n}, curve declared in P^{self.n}")
        object.__setattr__(self, "components", comps)

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def reversed(self) -> "ParamCurve":
        return ParamCurve(tuple(c.reversed() for c in self.components), self.n)

    def scaled_multiplicity(self, factor: int) -> "ParamCurve":
        return ParamCurve(tuple(c.with_multiplicity(c.multiplicity * factor) for c in self.components), self.n)

    def validate(self, m: int = 512, embed_ratio: float = 0.25, disjoint_tol: float = 1e-6) -> None:
        """Raise ValidationError unless the curve is nonvanishing and embedded at resolution m."""
        if not self.components:
            return
        for i, c in enumerate(self.components):
            scale = float(np.max(np.linalg.norm(c(parameter_grid(m)), axis=-1)))
            if c.min_norm(4 * m) <= 1e-12 * scale:
                raise ValidationError(f"component {i} passes through the origin of C^{self.n + 1}")
            if c.self_intersection_gap(m) < embed_ratio:
                raise ValidationError(f"component {i} is not embedded at sampling resolution {m}")
        units = [_unit(c(parameter_grid(m))) for c in self.components]
        for i in range(len(units)):
            for j in range(i + 1, len(units)):
                G = np.abs(units[i] @ np.conj(units[j]).T)
                if np.min(np.arccos(np.clip(G, 0.0, 1.0))) < disjoint_tol:
                    raise ValidationError(f"components {i} and {j} meet")


def sample_curve(gamma: ParamCurve, m: int) -> list:
    """Equispaced samples (ProjPoint, TangentVector, multiplicity) over every component."""
    if m < 4:
        raise ValidationError("need at least 4 samples per component")
    t = parameter_grid(m)
    out = []
    for c in gamma.components:
        z, v = c(t), c.derivative(t)
        out.extend((ProjPoint(z[i]), TangentVector(z[i], v[i]), c.multiplicity) for i in range(m))
    return out


# --------------------------------------------------------------- 2-chains


class ChainPiece:
    """A map F: [0,1] x [0,2pi) -> C^{n+1} - {0} with an integer multiplicity."""

    multiplicity: int = 1

    def evaluate(self, s, t):
        """Return (F, dF/ds, dF/dt) broadcast over s and t."""
        raise NotImplementedError

    def edge(self, s_value: float) -> Callable:
        def sampler(t):
            t = np.asarray(t, dtype=float)
            F, _, Ft = self.evaluate(np.full_like(t, s_value), t)
            return F, Ft

        return sampler


@dataclass(eq=False)
class ConePiece(ChainPiece):
    """F(s, t) = (1 - s) p + s gamma(t)."""

    component: CurveComponent
    apex: np.ndarray
    multiplicity: int = 1

    def evaluate(self, s, t):
        s = np.asarray(s, dtype=float)[..., None]
        g = self.component(t)
        dg = self.component.derivative(t)
        F = (1.0 - s) * self.apex + s * g
        return F, g - self.apex, s * dg


@dataclass(eq=False)
class FunctionPiece(ChainPiece):
    """User map F(s, t); partials by central differences unless supplied."""

    func: Callable
    multiplicity: int = 1
    partials: Callable | None = None
    h: float = 1e-6

    def evaluate(self, s, t):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        F = np.asarray(self.func(s, t), dtype=complex)
        if self.partials is not None:
            Fs, Ft = self.partials(s, t)
            return F, np.asarray(Fs, dtype=complex), np.asarray(Ft, dtype=complex)
        h = self.h
        Fs = (np.asarray(self.func(s + h, t)) - np.asarray(self.func(s - h, t))) / (2 * h)
        Ft = (np.asarray(self.func(s, t + h)) - np.asarray(self.func(s, t - h))) / (2 * h)
        return F, Fs, Ft


@dataclass(eq=False)
class HoloPiece(ChainPiece):
    """phi(w) = sum_k c_k w^k on the disk |w| <= R or annulus r <= |w| <= R.

    As a 2-chain piece it is parameterized by w = rho(s) e^{it},
    rho(s) = r + s (R - r), so its s = 1 edge is the outer circle.
    """

    coefficients: np.ndarray
    multiplicity: int = 1
    outer_radius: float = 1.0
    inner_radius: float = 0.0

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coefficients, dtype=complex))
        if c.shape[1] < 2:
            raise ValidationError("holomorphic piece needs at least 2 homogeneous coordinates")
        if not (0.0 <= self.inner_radius < self.outer_radius):
            raise ValidationError("need 0 <= inner_radius < outer_radius")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise ValidationError("holomorphic pieces carry positive integer multiplicities")
        self.coefficients = c
        self.multiplicity = int(self.multiplicity)

    @property
    def n(self) -> int:
        return self.coefficients.shape[1] - 1

    @property
    def polynomial_degree(self) -> int:
        return self.coefficients.shape[0] - 1

    def phi(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        k = np.arange(self.coefficients.shape[0])
        return (w[..., None] ** k) @ self.coefficients

    def dphi(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        k = np.arange(1, self.coefficients.shape[0])
        if k.size == 0:
            return np.zeros(w.shape + (self.n + 1,), dtype=complex)
        return (k * w[..., None] ** (k - 1)) @ self.coefficients[1:]

    def evaluate(self, s, t):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        r, R = self.inner_radius, self.outer_radius
        e = np.exp(1j * t)
        w = (r + s * (R - r)) * e
        d = self.dphi(w)
        return self.phi(w), d * ((R - r) * e)[..., None], d * (1j * w)[..., None]

    def boundary_edges(self) -> list:
        edges = [(self.edge(1.0), self.multiplicity)]
        if self.inner_radius > 0:
            edges.append((self.edge(0.0), -self.multiplicity))
        return edges


@dataclass(eq=False)
class ParamChain2:
    """A 2-chain sum of pieces together with the curve it is meant to cobound."""

    pieces: list
    boundary: ParamCurve
    apex: np.ndarray | None = None

    def edges(self, tol: float = 1e-9, m: int = 64) -> list:
        out = []
        for p in self.pieces:
            out.append((p.edge(1.0), p.multiplicity))
            z0, _ = p.edge(0.0)(parameter_grid(m))
            if _fs_diameter(z0) > tol:
                out.append((p.edge(0.0), -p.multiplicity))
        return out

    def check_boundary(self, tol: float = 1e-8) -> "BoundaryReport":
        return match_boundary(self.edges(tol), self.boundary, tol)


@dataclass(eq=False)
class HoloChain:
    """A positive holomorphic 1-chain as a sum of polynomial disk/annulus pieces."""

    pieces: list
    n: int

    def __post_init__(self):
        for p in self.pieces:
            if p.n != self.n:
                raise ValidationError(f"piece lives in P^{p.n}, chain declared in P^{self.n}")

    def boundary_edges(self) -> list:
        return [e for p in self.pieces for e in p.boundary_edges()]

    def as_chain2(self, boundary: ParamCurve) -> ParamChain2:
        return ParamChain2(list(self.pieces), boundary)

    def __add__(self, other: "HoloChain") -> "HoloChain":
        return HoloChain(list(self.pieces) + list(other.pieces), self.n)


def _fs_diameter(z: np.ndarray) -> float:
    u = _unit(z)
    return float(np.max(_fs_dist(u[:, None, :], u[None, :, :])))


# ------------------------------------------------------------ cone chains


def _cone_min_norm(component: CurveComponent, apex: np.ndarray, m: int = 2048) -> float:
    g = component(parameter_grid(m))
    d = g - apex
    dd = np.sum(np.abs(d) ** 2, axis=-1)
    s = np.clip(-np.real(np.sum(np.conj(apex) * d, axis=-1)) / dd, 0.0, 1.0)
    return float(np.min(np.linalg.norm(apex + s[:, None] * d, axis=-1)))


def cone_chain(
    gamma: ParamCurve,
    apex=None,
    seed: int = 0,
    ratio: float = 0.1,
    avoid: Sequence[HomogeneousSection] = (),
    avoid_clearance: float = 1e-3,
    max_tries: int = 200,
) -> ParamChain2:
    """Cone over gamma from an apex, one piece per component.

    Without an explicit apex, random Gaussian apexes are drawn until
    min ||F|| >= ratio * min ||gamma|| and the apex stays off the divisors in
    ``avoid``.
    """
    if len(gamma) == 0:
        raise ValidationError("cannot cone over an empty curve")
    floor = ratio * min(c.min_norm() for c in gamma)

    def acceptable(p):
        if any(_cone_min_norm(c, p) < floor for c in gamma):
            return False
        return all(relative_fs_norm(sig, p) > avoid_clearance for sig in avoid)

    if apex is not None:
        p = apex.homogeneous if isinstance(apex, ProjPoint) else np.asarray(apex, dtype=complex)
        worst = min(_cone_min_norm(c, p) for c in gamma)
        if worst < floor:
            raise NumericalError(f"cone from apex {p} comes within {worst:.3g} of 0 (need {floor:.3g})")
    else:
        rng = np.random.default_rng(seed)
        scale = float(np.median([np.linalg.norm(c(parameter_grid(64)), axis=-1).mean() for c in gamma]))
        for _ in range(max_tries):
            p = (rng.standard_normal(gamma.n + 1) + 1j * rng.standard_normal(gamma.n + 1)) / np.sqrt(2)
            p *= scale / np.linalg.norm(p)
            if acceptable(p):
                break
        else:
            raise NumericalError(f"no acceptable cone apex after {max_tries} random tries")
    pieces = [ConePiece(c, p, c.multiplicity) for c in gamma]
    return ParamChain2(pieces, gamma, apex=p)


# ------------------------------------------------------- boundary matching


@dataclass
class BoundaryReport:
    ok: bool
    mismatches: list = field(default_factory=list)
    hausdorff: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "mismatches": self.mismatches, "hausdorff": self.hausdorff}


def _horizontal(z: np.ndarray, v: np.ndarray) -> np.ndarray:
    nz = np.linalg.norm(z, axis=-1, keepdims=True)
    u = z / nz
    return (v - np.sum(np.conj(u) * v, axis=-1, keepdims=True) * u) / nz


def _fs_dist(ua: np.ndarray, ub: np.ndarray) -> np.ndarray:
    # sin of the FS distance via the orthogonal component; accurate near 0
    proj = np.sum(np.conj(ua) * ub, axis=-1, keepdims=True)
    return np.arcsin(np.clip(np.linalg.norm(ub - proj * ua, axis=-1), 0.0, 1.0))


def _one_sided(a: Callable, b: Callable, m: int, dense: int) -> tuple[float, np.ndarray, np.ndarray]:
    """max over samples of a of the distance to b, with golden-section refinement in b's parameter."""
    ta = parameter_grid(m)
    za, _ = a(ta)
    ua = _unit(za)
    zb, _ = b(parameter_grid(dense))
    G = np.abs(ua @ np.conj(_unit(zb)).T)
    j = np.argmax(G, axis=1)
    h = TWO_PI / dense
    lo, hi = TWO_PI * j / dense - h, TWO_PI * j / dense + h
    g = (np.sqrt(5.0) - 1.0) / 2.0

    def f(t):
        return _fs_dist(ua, _unit(b(t)[0]))

    for _ in range(40):
        x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
        f1, f2 = f(x1), f(x2)
        left = f1 < f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
    tb = np.where(f1 < f2, x1, x2)
    d = np.minimum(np.minimum(f1, f2), _fs_dist(ua, _unit(zb[j])))
    return float(np.max(d)), ta, tb


def _compare(a: Callable, b: Callable, m: int = 256, dense: int = 2048) -> tuple[float, int]:
    """Hausdorff FS distance between two sampled closed curves and their relative orientation."""
    d_ab, ta, tb = _one_sided(a, b, m, dense)
    d_ba, _, _ = _one_sided(b, a, m, dense)
    za, va = a(ta)
    zb, vb = b(tb)
    ua, ub = _unit(za), _unit(zb)
    phase = np.sum(np.conj(ub) * ua, axis=-1)
    phase = phase / np.maximum(np.abs(phase), 1e-300)
    agree = np.real(np.sum(np.conj(_horizontal(za, va)) * _horizontal(zb, vb) * phase[:, None], axis=-1))
    return max(d_ab, d_ba), (1 if np.sum(agree) >= 0 else -1)


def match_boundary(edges: list, gamma: ParamCurve, tol: float) -> BoundaryReport:
    """Cancel coincident edges and compare the net boundary with gamma's components.

    ``edges`` is a list of (sampler, signed multiplicity) where
    ``sampler(t) -> (z, dz/dt)``.
    """
    groups: list = []  # [representative sampler, net multiplicity]
    for sampler, mult in edges:
        for g in groups:
            dist, orient = _compare(sampler, g[0])
            if dist <= tol:
                g[1] += orient * mult
                break
        else:
            groups.append([sampler, mult])

    report = BoundaryReport(ok=True)
    used = set()
    for i, comp in enumerate(gamma.components):
        target = lambda t, c=comp: (c(t), c.derivative(t))  # noqa: E731
        found = None
        for j, g in enumerate(groups):
            dist, orient = _compare(target, g[0])
            if dist <= tol:
                found = (j, orient * g[1], dist)
                break
        if found is None:
            report.ok = False
            report.mismatches.append({"component": i, "kind": "missing"})
            continue
        j, net, dist = found
        used.add(j)
        report.hausdorff.append(dist)
        if net == comp.multiplicity:
            continue
        report.ok = False
        kind = "orientation" if net == -comp.multiplicity else "multiplicity"
        report.mismatches.append({"component": i, "kind": kind, "expected": comp.multiplicity, "found": int(net)})
    for j, g in enumerate(groups):
        if j not in used and g[1] != 0:
            report.ok = False
            report.mismatches.append({"component": None, "kind": "extra", "found": int(g[1])})
    return report


def chain_boundary_check(T: HoloChain, gamma: ParamCurve, tol: float = 1e-6) -> BoundaryReport:
    """Does dT equal gamma (with multiplicities and orientations) up to FS Hausdorff distance tol?"""
    return match_boundary(T.boundary_edges(), gamma, tol)


# ------------------------------------------------------- common examples


def circle(radius: float = 1.0, n: int = 2, multiplicity: int = 1, axis: int = 1) -> ParamCurve:
    """(1, r e^{it}, 0, ...) in the line {z_j = 0, j not in (0, axis)}."""
    a0 = np.zeros(n + 1, dtype=complex)
    a0[0] = 1.0
    a1 = np.zeros(n + 1, dtype=complex)
    a1[axis] = radius
    return ParamCurve((CurveComponent(np.array([0, 1]), np.array([a0, a1]), multiplicity),), n)


def disk(radius: float = 1.0, n: int = 2, multiplicity: int = 1, axis: int = 1) -> HoloChain:
    c = np.zeros((2, n + 1), dtype=complex)
    c[0, 0] = 1.0
    c[1, axis] = 1.0
    return HoloChain([HoloPiece(c, multiplicity, outer_radius=radius)], n)


def random_fourier_curve(
    n: int,
    K: int,
    rng: np.random.Generator,
    amplitude: float = 0.6,
    affine: bool = False,
    max_tries: int = 100,
) -> ParamCurve:
    """A random embedded trigonometric curve with modes |k| <= K.

    With ``affine=True`` the z_0 coordinate is identically 1, so the curve
    lies in the chart C^n = {z_0 != 0}.
    """
    for _ in range(max_tries):
        ks = np.array([k for k in range(-K, K + 1)])
        a = (rng.standard_normal((ks.size, n + 1)) + 1j * rng.standard_normal((ks.size, n + 1))) / np.sqrt(2)
        a *= np.array([1.0 if k == 0 else amplitude / abs(k) for k in ks])[:, None]
        if affine:
            a[:, 0] = 0.0
            a[ks == 0, 0] = 1.0
        comp = CurveComponent(ks, a)
        g = comp(parameter_grid(1024))
        norms = np.linalg.norm(g, axis=-1)
        if norms.min() < 0.2 * norms.max():
            continue
        curve = ParamCurve((comp,), n)
        try:
            curve.validate()
        except ValidationError:
            continue
        return curve
    raise NumericalError("could not draw an embedded random curve")
