import numpy as np
import pytest

from projlink.curves import (
    CurveComponent,
    HoloChain,
    HoloPiece,
    ParamCurve,
    chain_boundary_check,
    circle,
    cone_chain,
    disk,
    random_fourier_curve,
    sample_curve,
)
from projlink.errors import NumericalError, ValidationError
from projlink.verify import full_line


def test_circle_evaluation_and_derivative():
    g = circle(2.0).components[0]
    t = np.array([0.4])
    assert np.allclose(g(t), [[1, 2 * np.exp(0.4j), 0]])
    h = 1e-6
    fd = (g(t + h) - g(t - h)) / (2 * h)
    assert np.allclose(fd, g.derivative(t), atol=1e-8)


def test_reversal_and_multiplicity():
    g = circle(1.0)
    r = g.reversed().components[0]
    assert np.allclose(r(np.array([0.3])), g.components[0](np.array([-0.3])))
    assert g.scaled_multiplicity(3).components[0].multiplicity == 3
    with pytest.raises(ValidationError):
        CurveComponent(np.array([0, 1]), np.eye(2), multiplicity=0)


def test_validate_rejects_origin_and_double_points():
    bad = ParamCurve((CurveComponent(np.array([0, 1]), np.array([[1, 0], [1, 0]])),), 1)
    with pytest.raises(ValidationError):
        bad.validate()
    double = ParamCurve((CurveComponent(np.array([0, 2]), np.array([[1, 0], [0, 1]])),), 1)
    with pytest.raises(ValidationError):
        double.validate()
    circle(1.0).validate()


def test_random_curves_validate(rng):
    for _ in range(5):
        random_fourier_curve(2, 3, rng).validate()


def test_sample_curve():
    pts = sample_curve(circle(1.0, multiplicity=2), 8)
    assert len(pts) == 8 and pts[0][2] == 2


def test_disk_boundary_matches_circle():
    assert chain_boundary_check(disk(1.0), circle(1.0)).ok


def test_boundary_orientation_mismatch():
    rep = chain_boundary_check(disk(1.0), circle(1.0).reversed())
    assert not rep.ok and rep.mismatches[0]["kind"] == "orientation"


def test_boundary_multiplicity_mismatch():
    rep = chain_boundary_check(disk(1.0), circle(1.0, multiplicity=2))
    assert not rep.ok and rep.mismatches[0]["kind"] == "multiplicity"


def test_full_line_has_no_boundary():
    T = disk(1.0) + full_line()
    assert chain_boundary_check(T, circle(1.0)).ok
    assert len(full_line().boundary_edges()) == 2


def test_annulus_boundary():
    c = np.array([[1, 0, 0], [0, 1, 0]], dtype=complex)
    T = HoloChain([HoloPiece(c, outer_radius=2.0, inner_radius=1.0)], 2)
    gamma = ParamCurve((circle(2.0).components[0], circle(1.0).reversed().components[0]), 2)
    assert chain_boundary_check(T, gamma).ok


def test_cone_chain_boundary(rng):
    g = random_fourier_curve(2, 3, rng)
    N = cone_chain(g, seed=3)
    assert N.check_boundary().ok


def test_cone_rejects_apex_on_curve():
    with pytest.raises(NumericalError):
        cone_chain(circle(1.0), apex=np.array([-1.0, -1.0, 0.0]))
