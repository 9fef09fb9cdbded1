import math

import numpy as np
import pytest

from oracles import HULL_ORIGIN, convex_best_constant, violating_defect
from projlink.curves import circle, random_fourier_curve
from projlink.errors import SingularPoint
from projlink.fs_core import coordinate_section, random_section
from projlink.invariants import clearing_sections, reduced_winding
from projlink.qpsh_hull import (
    HullConfig,
    QPSHFunction,
    best_constant,
    chart_points,
    curve_sup,
    dc_integral,
    defect_matrix,
    hull_field,
    peak_section,
    qpsh_defect,
    write_field_csv,
    write_field_svg,
)


def test_section_log_defect_vanishes(rng):
    worst = math.inf
    for _ in range(200):
        s = random_section(2, int(rng.integers(1, 5)), rng)
        x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        worst = min(worst, qpsh_defect(QPSHFunction.section_log(s), x))
    assert worst > -1e-5


def test_section_log_defect_is_rank_deficient(rng):
    s = random_section(2, 3, rng)
    x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    eig = np.linalg.eigvalsh(defect_matrix(QPSHFunction.section_log(s), x))
    # M = (1/l) [Z] off the divisor, so M itself is zero there
    assert np.max(np.abs(eig)) < 1e-5


@pytest.mark.parametrize("weight", [0.5, 1.0, 2.0])
def test_weighted_log_defect_closed_form(rng, weight):
    s = random_section(2, 2, rng)
    x = np.array([1.0, 0.3 + 0.2j, -0.4j])
    expect = violating_defect(weight, 2, x[1:])
    got = qpsh_defect(QPSHFunction.weighted_log(s, weight), x)
    assert abs(got - expect) < 1e-6


def test_callable_path():
    # u(w) = |w_1|^2: u_{j kbar} = diag(1, 0)
    u = lambda w: float(abs(w[0]) ** 2)
    x = np.array([1.0, 0.2, 0.1j])
    M = defect_matrix(u, x, chart=0)
    w = x[1:]
    r = 1 + np.sum(abs(w) ** 2)
    H = np.eye(2) / r - np.outer(np.conj(w), w) / r**2
    assert np.allclose(M, np.diag([1.0, 0.0]) / np.pi + H / (2 * np.pi), atol=1e-6)


def test_maximum_of_section_logs(rng):
    u = QPSHFunction.maximum([QPSHFunction.section_log(random_section(2, d, rng)) for d in (1, 2, 3)])
    for _ in range(20):
        x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        assert qpsh_defect(u, x) > -1e-5


def test_defect_on_divisor_refused():
    with pytest.raises(SingularPoint):
        qpsh_defect(QPSHFunction.section_log(coordinate_section(2, 1)), np.array([1.0, 0.0, 0.5]))


def test_dc_integral_matches_winding(rng):
    for _ in range(4):
        g = random_fourier_curve(2, 3, rng)
        s = clearing_sections(g, 1, (1, 2, 3), rng)[0]
        assert abs(dc_integral(QPSHFunction.section_log(s), g) - reduced_winding(g, s).value) < 1e-9


def test_peak_section_peaks_at_point():
    x = np.array([1.0, 0.5 - 0.2j, 0.3])
    c = peak_section(x, 3)
    from projlink.fs_core import HomogeneousSection, fs_norm

    s = HomogeneousSection(2, 3, c)
    assert abs(fs_norm(s, x) - 1.0) < 1e-12
    assert fs_norm(s, np.array([1.0, 0.0, 0.0])) < 1.0


def test_curve_sup_exact_for_monomial():
    g = circle(1.0, n=1)
    c = np.zeros(4)
    c[0] = 1.0
    assert abs(curve_sup(g, c, 3) - 2 ** -1.5) < 1e-12


@pytest.mark.parametrize("point", [(1.0, 0.0), (1.0, 0.5)])
def test_best_constant_against_convex_oracle(point):
    x = np.array(point, dtype=complex)
    est = best_constant(circle(1.0, n=1), x, degrees=range(1, 7), config=HullConfig(restarts=3))
    for d, c in est.best_constant_by_degree.items():
        ref = convex_best_constant(x, d)
        assert abs(c - ref) <= 1e-3 * ref


def test_hull_verdicts():
    g = circle(1.0)
    cfg = HullConfig(restarts=2)
    origin = best_constant(g, np.array([1.0, 0.0, 0.0]), degrees=range(1, 7), config=cfg)
    assert origin.verdict == "member" and abs(origin.running_max[6] - HULL_ORIGIN) < 1e-6
    off = best_constant(g, np.array([1.0, 0.0, 1.0]), degrees=range(1, 7), config=cfg)
    assert off.verdict == "non-member"
    on = best_constant(g, np.array([1.0, np.exp(0.7j), 0.0]), degrees=[4], config=cfg)
    assert abs(on.best_constant_by_degree[4] - 1.0) < 1e-3


def test_hull_field_deterministic_across_threads(tmp_path):
    g = circle(1.0, n=1)
    pts = chart_points([[0.0], [0.5j], [2.0]])
    cfg = HullConfig(restarts=1, steps=30)
    a = hull_field(g, pts, range(1, 4), cfg, threads=1)
    b = hull_field(g, pts, range(1, 4), cfg, threads=3)
    assert [e.to_dict() for e in a] == [e.to_dict() for e in b]
    write_field_csv(tmp_path / "f.csv", a)
    assert (tmp_path / "f.csv").read_text().splitlines()[0] == "w1_re,w1_im,lambda_estimate,verdict"
    write_field_svg(tmp_path / "f.svg", [0, 1, 2], [0], np.array([[e.lambda_estimate for e in a]]))
    assert (tmp_path / "f.svg").read_text().startswith("<svg")
