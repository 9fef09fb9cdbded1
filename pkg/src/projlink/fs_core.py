"""Homogeneous-coordinate geometry on P^n.

Points are nonzero vectors in C^{n+1} up to scale; sections of O(d) are
homogeneous polynomials of degree d stored in the monomial basis. The
Fubini-Study form ``omega`` is normalized so that a projective line has
unit area, and ``d^C = (i/2pi)(dbar - d)``.

For a real function u and a tangent vector v at z the pullback of d^C u is

    d^C u (v) = (1/pi) * Im( sum_j du/dz_j * v_j ),

which is what :func:`dc_log_norm_pullback` evaluates for u = log||sigma||.
Integrating it over the positively oriented unit circle of P^1 with
sigma = z_1 gives +1/2 (tested), which pins the sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import NumericalError, ValidationError, ZeroOnCurve

__all__ = [
    "ProjPoint",
    "HomogeneousSection",
    "TangentVector",
    "monomial_exponents",
    "evaluate",
    "fs_norm",
    "dc_log_norm_pullback",
    "dc_log_fs_potential",
    "fs_area_density",
    "fs_area_pullback",
    "random_section",
    "coordinate_section",
]


@lru_cache(maxsize=None)
def _exponents(n_vars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    if n_vars == 1:
        return ((degree,),)
    out = []
    for first in range(degree, -1, -1):
        for rest in _exponents(n_vars - 1, degree - first):
            out.append((first,) + rest)
    return tuple(out)


def monomial_exponents(n: int, degree: int) -> np.ndarray:
    """Multi-indices |alpha| = degree in n+1 variables, graded-lex (descending) order.

    >>> monomial_exponents(1, 2).tolist()
    [[2, 0], [1, 1], [0, 2]]
    """
    return np.array(_exponents(n + 1, degree), dtype=int)


def _power_table(z: np.ndarray, degree: int) -> np.ndarray:
    # P[..., j, k] = z_j**k for k = 0..degree
    P = np.empty(z.shape + (degree + 1,), dtype=complex)
    P[..., 0] = 1.0
    for k in range(1, degree + 1):
        P[..., k] = P[..., k - 1] * z
    return P


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """A point of P^n given by a homogeneous representative."""

    homogeneous: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        z = np.asarray(self.homogeneous, dtype=complex).reshape(-1)
        nz = np.linalg.norm(z)
        if not np.isfinite(nz) or nz == 0.0:
            raise ValidationError("ProjPoint needs a nonzero finite homogeneous vector")
        if self.normalized:
            z = z / nz
        z.setflags(write=False)
        object.__setattr__(self, "homogeneous", z)

    @property
    def n(self) -> int:
        return self.homogeneous.size - 1

    @classmethod
    def affine(cls, w, chart: int = 0) -> "ProjPoint":
        """Point with affine coordinates ``w`` in the chart {z_chart != 0}."""
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        return cls(np.insert(w, chart, 1.0))

    def unit(self) -> np.ndarray:
        z = self.homogeneous
        return z / np.linalg.norm(z)

    def distance(self, other: "ProjPoint") -> float:
        """Fubini-Study geodesic distance (in radians of the round metric)."""
        a, b = self.unit(), other.unit()
        orth = b - np.vdot(a, b) * a
        return float(math.asin(min(1.0, np.linalg.norm(orth))))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjPoint) or other.n != self.n:
            return NotImplemented
        return self.distance(other) < 1e-12

    __hash__ = None

    def __repr__(self) -> str:
        return f"ProjPoint({np.array2string(self.homogeneous, precision=6)})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Derivative v of a homogeneous-coordinate path through the base z."""

    base: np.ndarray
    vector: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "base", np.asarray(self.base, dtype=complex))
        object.__setattr__(self, "vector", np.asarray(self.vector, dtype=complex))


@dataclass(frozen=True, eq=False)
class HomogeneousSection:
    """A section of O(d) on P^n as a homogeneous polynomial.

    ``coefficients[i]`` multiplies the monomial ``z**monomial_exponents(n, d)[i]``.
    """

    n: int
    degree: int
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 1 or self.degree < 1:
            raise ValidationError("need n >= 1 and degree >= 1")
        c = np.asarray(self.coefficients, dtype=complex).reshape(-1)
        expected = math.comb(self.n + self.degree, self.degree)
        if c.size != expected:
            raise ValidationError(
                f"degree-{self.degree} section on P^{self.n} needs {expected} coefficients, got {c.size}"
            )
        if not np.all(np.isfinite(c)) or not np.any(c != 0):
            raise ValidationError("coefficient vector must be finite and not identically zero")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def exponents(self) -> np.ndarray:
        return monomial_exponents(self.n, self.degree)

    @property
    def coefficient_norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    @classmethod
    def from_monomials(cls, n: int, terms: dict) -> "HomogeneousSection":
        """Build from ``{exponent tuple: coefficient}``; all exponents share one degree."""
        degrees = {sum(a) for a in terms}
        if len(degrees) != 1:
            raise ValidationError("terms must all have the same total degree")
        (d,) = degrees
        index = {a: i for i, a in enumerate(_exponents(n + 1, d))}
        c = np.zeros(len(index), dtype=complex)
        for a, v in terms.items():
            if tuple(a) not in index:
                raise ValidationError(f"exponent {a} is not valid for P^{n}")
            c[index[tuple(a)]] += v
        return cls(n, d, c)

    def _check(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.n + 1:
            raise ValidationError(
                f"section lives on P^{self.n} but point has {z.shape[-1]} homogeneous coordinates"
            )
        return z

    def monomials(self, z: np.ndarray) -> np.ndarray:
        """Monomial values, shape ``z.shape[:-1] + (n_monomials,)``."""
        z = self._check(z)
        P = _power_table(z, self.degree)
        E = self.exponents
        out = np.ones(z.shape[:-1] + (E.shape[0],), dtype=complex)
        for j in range(self.n + 1):
            out *= P[..., j, :][..., E[:, j]]
        return out

    def monomials_and_jacobian(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Monomials and their z-derivatives ``J[..., i, j] = d m_i / d z_j``."""
        z = self._check(z)
        P = _power_table(z, self.degree)
        E = self.exponents
        factors = np.stack([P[..., j, :][..., E[:, j]] for j in range(self.n + 1)], axis=-1)
        lowered = np.stack(
            [P[..., j, :][..., np.maximum(E[:, j] - 1, 0)] * E[:, j] for j in range(self.n + 1)],
            axis=-1,
        )
        ones = np.ones(factors.shape[:-1] + (1,), dtype=complex)
        prefix = np.cumprod(np.concatenate([ones, factors[..., :-1]], axis=-1), axis=-1)
        suffix = np.cumprod(np.concatenate([ones, factors[..., :0:-1]], axis=-1), axis=-1)[..., ::-1]
        mon = prefix[..., -1] * factors[..., -1]
        jac = lowered * prefix * suffix
        return mon, jac

    def __call__(self, z: np.ndarray) -> np.ndarray:
        return self.monomials(z) @ self.coefficients

    def value_and_gradient(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """sigma(z) and the holomorphic gradient (d sigma/d z_j)_j."""
        mon, jac = self.monomials_and_jacobian(z)
        val = mon @ self.coefficients
        grad = np.einsum("...ij,i->...j", jac, self.coefficients)
        return val, grad

    def __mul__(self, other):
        if isinstance(other, HomogeneousSection):
            if other.n != self.n:
                raise ValidationError("cannot multiply sections on different P^n")
            terms: dict = {}
            for a, ca in zip(_exponents(self.n + 1, self.degree), self.coefficients):
                if ca == 0:
                    continue
                for b, cb in zip(_exponents(self.n + 1, other.degree), other.coefficients):
                    if cb == 0:
                        continue
                    key = tuple(x + y for x, y in zip(a, b))
                    terms[key] = terms.get(key, 0) + ca * cb
            return HomogeneousSection.from_monomials(self.n, terms)
        return HomogeneousSection(self.n, self.degree, self.coefficients * complex(other))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "HomogeneousSection":
        if k < 1:
            raise ValidationError("power must be a positive integer")
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def normalized(self) -> "HomogeneousSection":
        return HomogeneousSection(self.n, self.degree, self.coefficients / self.coefficient_norm)

    def dehomogenize(self, chart: int = 0):
        """The affine polynomial w -> sigma(w with 1 inserted at ``chart``)."""

        def p(w):
            w = np.asarray(w, dtype=complex)
            return self(np.insert(w, chart, 1.0, axis=-1))

        return p


def coordinate_section(n: int, j: int, degree: int = 1) -> HomogeneousSection:
    """The section z_j**degree."""
    a = [0] * (n + 1)
    a[j] = degree
    return HomogeneousSection.from_monomials(n, {tuple(a): 1.0})


def random_section(n: int, degree: int, rng: np.random.Generator, bombieri: bool = False) -> HomogeneousSection:
    """Standard complex Gaussian coefficients, optionally Bombieri (unitarily invariant) weighted."""
    E = monomial_exponents(n, degree)
    c = (rng.standard_normal(len(E)) + 1j * rng.standard_normal(len(E))) / math.sqrt(2.0)
    if bombieri:
        w = np.array([math.factorial(degree) / math.prod(math.factorial(k) for k in a) for a in E])
        c = c * np.sqrt(w)
    return HomogeneousSection(n, degree, c)


def evaluate(sigma: HomogeneousSection, z) -> complex:
    z = np.asarray(z, dtype=complex)
    if not np.any(z != 0):
        raise ValidationError("cannot evaluate at the origin of C^{n+1}")
    return complex(sigma(z))


def fs_norm(sigma: HomogeneousSection, x) -> np.ndarray:
    """Pointwise ||sigma(x)|| = |sigma(z)| / ||z||^d; vectorized over leading axes of z."""
    z = x.homogeneous if isinstance(x, ProjPoint) else np.asarray(x, dtype=complex)
    return np.abs(sigma(z)) / np.linalg.norm(z, axis=-1) ** sigma.degree


def relative_fs_norm(sigma: HomogeneousSection, z) -> np.ndarray:
    """fs_norm scaled by the coefficient norm; always in [0, 1] by Cauchy-Schwarz."""
    return fs_norm(sigma, z) / sigma.coefficient_norm


def dc_log_fs_potential(z: np.ndarray, v: np.ndarray) -> np.ndarray:
    """d^C log||z|| (v) in homogeneous coordinates."""
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return np.imag(np.sum(np.conj(z) * v, axis=-1) / np.sum(np.abs(z) ** 2, axis=-1)) / (2.0 * np.pi)


def dc_log_norm_pullback(sigma: HomogeneousSection, z, v=None) -> np.ndarray:
    """d^C log||sigma|| evaluated on the tangent vector v at z.

    Accepts a :class:`TangentVector` as ``z`` or arrays ``z, v`` with matching
    leading axes. The result is invariant under (z, v) -> (cz, cv) and under
    v -> v + lambda z.
    """
    if isinstance(z, TangentVector):
        z, v = z.base, z.vector
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    val, grad = sigma.value_and_gradient(z)
    if np.any(val == 0):
        raise ZeroOnCurve("section vanishes at the base point")
    holo = np.sum(grad * v, axis=-1) / val
    return np.imag(holo) / (2.0 * np.pi) - sigma.degree * dc_log_fs_potential(z, v)


def fs_area_density(F: np.ndarray, Fs: np.ndarray, Ft: np.ndarray) -> np.ndarray:
    """Density of F*omega with respect to ds ^ dt for a map into C^{n+1} - {0}."""
    F = np.asarray(F, dtype=complex)
    r2 = np.sum(np.abs(F) ** 2, axis=-1)
    ab = np.sum(Fs * np.conj(Ft), axis=-1)
    aF = np.sum(Fs * np.conj(F), axis=-1)
    Fb = np.sum(F * np.conj(Ft), axis=-1)
    H = (ab * r2 - aF * Fb) / r2**2
    return -np.imag(H) / np.pi


def fs_area_pullback(F, s, t, dF=None, h: float = 1e-6) -> np.ndarray:
    """F*omega density at (s, t) for a callable ``F(s, t) -> C^{n+1}``.

    ``dF(s, t)`` may return the pair of partials; otherwise central
    differences with step ``h`` are used.
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    val = np.asarray(F(s, t), dtype=complex)
    if np.any(np.linalg.norm(val, axis=-1) == 0):
        raise NumericalError("map hits the origin of C^{n+1}")
    if dF is not None:
        Fs, Ft = dF(s, t)
    else:
        Fs = (np.asarray(F(s + h, t)) - np.asarray(F(s - h, t))) / (2 * h)
        Ft = (np.asarray(F(s, t + h)) - np.asarray(F(s, t - h))) / (2 * h)
    return fs_area_density(val, np.asarray(Fs), np.asarray(Ft))

