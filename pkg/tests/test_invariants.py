import numpy as np
import pytest

from oracles import CIRCLE_WINDING, CONIC_PIECE_MASS, DISK_AREA
from projlink.curves import HoloChain, HoloPiece, circle, cone_chain, disk, random_fourier_curve
from projlink.errors import ValidationError, ZeroOnCurve
from projlink.fs_core import HomogeneousSection, coordinate_section, random_section
from projlink.invariants import (
    Divisor,
    affine_linking,
    chain_area,
    chain_mass,
    clearing_sections,
    holo_intersection_count,
    intersection_count,
    necessity_check,
    projective_linking,
    reduced_linking,
    reduced_winding,
    uniqueness_criterion,
    winding_number,
)
from projlink.verify import full_line

Z0, Z1, Z2 = (coordinate_section(2, j) for j in range(3))


def test_circle_winding_oracle():
    g = circle(1.0)
    assert abs(winding_number(g, Z1).value - CIRCLE_WINDING["through"]) < 1e-12
    assert abs(winding_number(g, Z0).value - CIRCLE_WINDING["missing"]) < 1e-12


@pytest.mark.parametrize("r", sorted(DISK_AREA))
def test_winding_of_scaled_circle(r):
    assert abs(winding_number(circle(r), Z0).value + DISK_AREA[r]) < 1e-12
    assert abs(winding_number(circle(r), Z1).value - (1 - DISK_AREA[r])) < 1e-12


def test_winding_of_divisor_through_curve_is_refused():
    with pytest.raises(ZeroOnCurve):
        winding_number(circle(1.0), Z2)
    line = HomogeneousSection(2, 1, np.array([1.0, 1.0, 0.0]))
    with pytest.raises(ZeroOnCurve):
        winding_number(circle(1.0), line)


def test_dimension_mismatch():
    with pytest.raises(ValidationError):
        winding_number(circle(1.0), coordinate_section(3, 0))


def test_linking_through_disk_and_cone():
    g = circle(1.0)
    T = disk(1.0)
    assert abs(projective_linking(g, Z1, T.as_chain2(g)).value - 0.5) < 1e-10
    assert abs(projective_linking(g, Z0, T.as_chain2(g)).value + 0.5) < 1e-10
    rep = projective_linking(g, Z1, cone_chain(g, seed=1, avoid=(Z1,)))
    assert abs(rep.value - 0.5) < 1e-10


def test_winding_equals_linking_random(rng):
    for k in range(8):
        g = random_fourier_curve(2, 3, rng)
        s = clearing_sections(g, 1, (1, 2, 3), rng, clearance=1e-2)[0]
        w = winding_number(g, s).value
        link = projective_linking(g, Divisor(s), cone_chain(g, seed=k, avoid=(s,))).value
        assert abs(w - link) < 1e-8


def test_reduced_invariants(rng):
    g = random_fourier_curve(2, 2, rng)
    s = clearing_sections(g, 1, (2,), rng)[0]
    N = cone_chain(g, seed=5, avoid=(s,))
    assert abs(reduced_winding(g, s).value - winding_number(g, s).value / 2) < 1e-15
    assert abs(reduced_linking(g, s, N).value - reduced_winding(g, s).value) < 1e-8


def test_intersection_signs_follow_orientation():
    g = circle(1.0)
    N = disk(1.0).as_chain2(g)
    assert intersection_count(N, Z1).count == 1
    Nr = cone_chain(g.reversed(), seed=2, avoid=(Z1,))
    assert intersection_count(Nr, Z1).count - chain_area(Nr).value == pytest.approx(-0.5, abs=1e-10)


def test_masses():
    for r, area in DISK_AREA.items():
        assert abs(chain_mass(disk(r)).value - area) < 1e-10
    conic = HoloChain([HoloPiece(np.eye(3, dtype=complex))], 2)
    assert abs(chain_mass(conic).value - CONIC_PIECE_MASS) < 1e-10
    assert abs(chain_mass(disk(1.0, multiplicity=2)).value - 1.0) < 1e-10
    assert abs(chain_mass(full_line()).value - 1.0) < 1e-10


def test_holo_intersections():
    T = disk(1.0)
    assert holo_intersection_count(T, Z1).count == 1
    assert holo_intersection_count(T, Z0).count == 0
    q = HomogeneousSection.from_monomials(2, {(2, 0, 0): 0.25, (0, 2, 0): -1.0})  # w = +-1/2
    assert holo_intersection_count(T, q).count == 2
    with pytest.raises(ZeroOnCurve):
        holo_intersection_count(T, HomogeneousSection(2, 1, np.array([1.0, -1.0, 0.0])))


def test_necessity_and_uniqueness(rng):
    g, T = circle(1.0), disk(1.0)
    secs = clearing_sections(g, 40, (1, 2, 3), rng)
    rep = necessity_check(g, T, secs + [Z2])
    assert rep.ok and rep.skipped == 1 and rep.minimum >= -0.5 - 1e-9
    assert uniqueness_criterion(T, [Z0, Z1]).value == 0.0
    plus = T + full_line()
    ratios = uniqueness_criterion(plus, [random_section(2, d, rng) for d in (1, 2, 3)])
    assert ratios.value >= 1.0


def test_necessity_rejects_wrong_chain():
    with pytest.raises(ValidationError):
        necessity_check(circle(1.0), disk(2.0), [Z0])


def test_affine_linking_is_integer_and_relation_holds(rng):
    for _ in range(5):
        g = random_fourier_curve(2, 3, rng)
        s = clearing_sections(g, 1, (1, 2, 3), rng)[0]
        a = affine_linking(g, s)
        assert isinstance(a, int)
        rel = winding_number(g, s).value - a - s.degree * winding_number(g, Z0).value
        assert abs(rel) < 1e-9


def test_winding_is_quantized_on_closed_form():
    # Wind = k - d * area for the circle; k counts zeros of sigma(1, w, 0) in the disk
    q = HomogeneousSection.from_monomials(2, {(2, 0, 0): 0.25, (0, 2, 0): -1.0})
    assert abs(winding_number(circle(1.0), q).value - (2 - 2 * 0.5)) < 1e-12


def test_orientation_and_multiplicity_laws(rng):
    g = random_fourier_curve(2, 3, rng)
    s = clearing_sections(g, 1, (2,), rng)[0]
    w = winding_number(g, s).value
    assert abs(winding_number(g.reversed(), s).value + w) < 1e-12
    assert abs(winding_number(g.scaled_multiplicity(2), s).value - 2 * w) < 1e-12
    assert abs(reduced_winding(g, s**3).value - w / 2) < 1e-10
