import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projlink.errors import ValidationError, ZeroOnCurve
from projlink.fs_core import (
    HomogeneousSection,
    ProjPoint,
    TangentVector,
    coordinate_section,
    dc_log_fs_potential,
    dc_log_norm_pullback,
    evaluate,
    fs_area_density,
    fs_area_pullback,
    fs_norm,
    monomial_exponents,
    random_section,
    relative_fs_norm,
)


def brute_eval(sigma, z):
    return sum(c * np.prod(z**np.array(e)) for c, e in zip(sigma.coefficients, monomial_exponents(sigma.n, sigma.degree)))


def test_monomial_order_is_graded_lex_descending():
    E = monomial_exponents(2, 2).tolist()
    assert E == [[2, 0, 0], [1, 1, 0], [1, 0, 1], [0, 2, 0], [0, 1, 1], [0, 0, 2]]
    assert len(monomial_exponents(3, 4)) == math.comb(7, 4)


def test_coefficient_count_is_checked():
    with pytest.raises(ValidationError):
        HomogeneousSection(2, 2, np.ones(5))
    with pytest.raises(ValidationError):
        HomogeneousSection(2, 1, np.zeros(3))


def test_evaluation_matches_brute_force(rng):
    for n, d in [(1, 5), (2, 3), (3, 4)]:
        sigma = random_section(n, d, rng)
        z = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
        assert abs(evaluate(sigma, z) - brute_eval(sigma, z)) < 1e-12 * max(1, abs(brute_eval(sigma, z)))


def test_gradient_matches_finite_differences(rng):
    sigma = random_section(2, 4, rng)
    z = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    _, grad = sigma.value_and_gradient(z)
    h = 1e-6
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        fd = (sigma(z + e) - sigma(z - e)) / (2 * h)
        assert abs(fd - grad[j]) < 1e-7 * max(1, abs(grad[j]))


def test_euler_identity(rng):
    sigma = random_section(3, 3, rng)
    z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    val, grad = sigma.value_and_gradient(z)
    assert abs(np.sum(grad * z) - 3 * val) < 1e-11 * abs(val)


def test_fs_norm_is_projective(rng):
    sigma = random_section(2, 3, rng)
    z = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    assert abs(fs_norm(sigma, z) - fs_norm(sigma, (2 - 3j) * z)) < 1e-13
    assert 0.0 <= relative_fs_norm(sigma, z) <= 1.0


def test_product_and_power(rng):
    a, b = random_section(2, 2, rng), random_section(2, 3, rng)
    z = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    assert abs((a * b)(z) - a(z) * b(z)) < 1e-11 * abs(a(z) * b(z))
    assert abs((a**3)(z) - a(z) ** 3) < 1e-11 * abs(a(z) ** 3)
    assert (a * 2.0).degree == 2


def test_dehomogenize():
    sigma = HomogeneousSection.from_monomials(2, {(1, 1, 0): 2.0, (0, 0, 2): 1.0})
    p = sigma.dehomogenize(0)
    assert abs(p(np.array([3.0, 2.0])) - (2 * 3 + 4)) < 1e-12


def test_proj_point():
    x = ProjPoint(np.array([1, 2j, 3]))
    assert x == ProjPoint(np.array([2, 4j, 6]) * np.exp(0.7j))
    assert abs(x.distance(ProjPoint.affine([0.0, 0.0])) - math.acos(1 / math.sqrt(14))) < 1e-12
    with pytest.raises(ValidationError):
        ProjPoint(np.zeros(3))


def test_dc_pullback_invariances(rng):
    sigma = random_section(2, 3, rng)
    z = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    a = dc_log_norm_pullback(sigma, z, v)
    assert abs(a - dc_log_norm_pullback(sigma, (1 + 2j) * z, (1 + 2j) * v)) < 1e-13
    assert abs(a - dc_log_norm_pullback(sigma, z, v + (0.3 - 0.4j) * z)) < 1e-13
    assert abs(a - dc_log_norm_pullback(sigma, TangentVector(z, v))) < 1e-15


def test_dc_pullback_refuses_zeros():
    with pytest.raises(ZeroOnCurve):
        dc_log_norm_pullback(coordinate_section(2, 2), np.array([1, 1, 0]), np.array([0, 1, 0]))


def test_dc_potential_on_circle():
    # d^C log||z|| along (1, e^{it}, 0) is (1/2pi) * 1/2, integrating to 1/2
    t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    z = np.stack([np.ones_like(t), np.exp(1j * t), 0 * t], -1)
    v = np.stack([0 * t, 1j * np.exp(1j * t), 0 * t], -1)
    assert np.allclose(dc_log_fs_potential(z, v), 0.25 / np.pi)


def test_area_density_of_line_chart():
    # w -> (1, w) in polar coordinates w = s e^{it}: density s / (pi (1 + s^2)^2)
    s, t = 0.7, 1.3
    F = lambda s, t: np.stack([np.ones_like(s) + 0j, s * np.exp(1j * t)], -1)
    expect = s / (math.pi * (1 + s * s) ** 2)
    Fs = np.array([0, np.exp(1j * t)])
    Ft = np.array([0, 1j * s * np.exp(1j * t)])
    assert abs(fs_area_density(F(np.array(s), np.array(t)), Fs, Ft) - expect) < 1e-14
    assert abs(fs_area_pullback(F, np.array(s), np.array(t)) - expect) < 1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**31))
def test_scaling_invariance_of_reduced_norm(n, d, seed):
    rng = np.random.default_rng(seed)
    sigma = random_section(n, d, rng)
    z = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    lam = complex(rng.standard_normal(), rng.standard_normal())
    assert abs(fs_norm(sigma, z) - fs_norm(sigma, lam * z)) <= 1e-12 * max(1.0, fs_norm(sigma, z))
    assert abs(relative_fs_norm(sigma * lam, z) - relative_fs_norm(sigma, z)) <= 1e-12
