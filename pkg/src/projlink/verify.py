"""Internal cross-validation battery run on the bundled example inputs.

Each check returns a dict with a name, a pass flag and the numbers it
compared. Reports contain no timings, so seeded runs are byte-identical.
"""

from __future__ import annotations

import math
from importlib import resources
from typing import Callable

import numpy as np

from . import io
from .criterion import CriterionConfig, SmoothedWinding, minimize_reduced_winding
from .curves import HoloChain, HoloPiece, circle, cone_chain, random_fourier_curve
from .errors import NumericalError
from .fs_core import coordinate_section, random_section
from .invariants import (
    affine_linking,
    clearing_sections,
    projective_linking,
    reduced_winding,
    uniqueness_criterion,
    necessity_check,
    winding_number,
)
from .qpsh_hull import HullConfig, QPSHFunction, best_constant, qpsh_defect
from .quadrature import periodic_trapezoid

BUNDLED = (
    "circle",
    "circle_reversed",
    "circle_mult2",
    "conic_boundary",
    "disk",
    "conic_piece",
    "z0",
    "z1",
    "z2",
)


def data_path(name: str):
    """Path of a bundled example file, e.g. data_path('circle')."""
    return resources.files("projlink").joinpath("data", f"{name}.json")


def load_bundled(name: str):
    doc = io.read_json(data_path(name))
    if "components" in doc:
        return io.curve_from_dict(doc)
    if "pieces" in doc:
        return io.chain_from_dict(doc)
    return io.section_from_dict(doc)


def _check(name, ok, **values) -> dict:
    return {"name": name, "ok": bool(ok), **values}


def full_line(n: int = 2, axis: int = 2) -> HoloChain:
    """The line through e_0 and e_axis as two unit disks glued along |w| = 1."""
    a = np.zeros((2, n + 1), dtype=complex)
    a[0, 0], a[1, axis] = 1.0, 1.0
    b = np.zeros((2, n + 1), dtype=complex)
    b[0, axis], b[1, 0] = 1.0, 1.0
    return HoloChain([HoloPiece(a), HoloPiece(b)], n)


def _instances(count: int, seed: int, degrees=(1, 2, 3)):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        gamma = random_fourier_curve(2, 3, rng)
        sigma = clearing_sections(gamma, 1, degrees, rng, clearance=1e-2)[0]
        out.append((gamma, sigma))
    return out


# -------------------------------------------------------------------- checks


def check_circle_winding() -> dict:
    gamma = load_bundled("circle")
    through = winding_number(gamma, load_bundled("z1")).value
    missing = winding_number(gamma, load_bundled("z0")).value
    ok = abs(through - 0.5) <= 1e-6 and abs(missing + 0.5) <= 1e-6
    return _check("circle-winding", ok, through=through, missing=missing, targets=[0.5, -0.5])


def check_winding_equals_linking(count: int, seed: int) -> dict:
    worst = 0.0
    for k, (gamma, sigma) in enumerate(_instances(count, seed)):
        N = cone_chain(gamma, seed=k, avoid=(sigma,))
        worst = max(worst, abs(winding_number(gamma, sigma).value - projective_linking(gamma, sigma, N).value))
    return _check("winding-equals-linking", worst <= 1e-5, instances=count, max_gap=worst, tol=1e-5)


def check_apex_independence(count: int, seed: int) -> dict:
    worst = 0.0
    for k, (gamma, sigma) in enumerate(_instances(count, seed + 1)):
        a = projective_linking(gamma, sigma, cone_chain(gamma, seed=2 * k, avoid=(sigma,))).value
        b = projective_linking(gamma, sigma, cone_chain(gamma, seed=2 * k + 1, avoid=(sigma,))).value
        worst = max(worst, abs(a - b))
    return _check("apex-independence", worst <= 1e-6, instances=count, max_gap=worst, tol=1e-6)


def check_necessity(count: int, seed: int) -> dict:
    gamma, T = load_bundled("circle"), load_bundled("disk")
    rng = np.random.default_rng(seed)
    sections = clearing_sections(gamma, count, (1, 2, 3, 4), rng)
    rep = necessity_check(gamma, T, sections, tol=1e-5)
    attained = reduced_winding(gamma, load_bundled("z0")).value
    ok = rep.ok and abs(attained + rep.mass) <= 1e-3
    return _check(
        "necessity", ok, sections=count, mass=rep.mass, min_reduced_winding=rep.minimum, attained=attained
    )


def check_tightness(quick: bool, seed: int) -> dict:
    if quick:
        cases = [(1.0, 1)]
        config = CriterionConfig(degrees=(1, 2), restarts=4, seed=seed)
    else:
        cases = [(0.5, 1), (1.0, 1), (2.0, 1), (1.0, 2)]
        config = CriterionConfig(degrees=(1, 2, 3, 4), restarts=8, seed=seed)
    rows, ok = [], True
    for r, mult in cases:
        est = minimize_reduced_winding(circle(r, multiplicity=mult), config=config).minimal_mass_estimate
        target = mult * r * r / (1 + r * r)
        ok &= abs(est - target) <= 2e-2
        rows.append({"radius": r, "multiplicity": mult, "estimate": est, "target": target})
    return _check("tightness", ok, cases=rows, tol=2e-2)


def check_uniqueness(seed: int) -> dict:
    T = load_bundled("disk")
    rng = np.random.default_rng(seed)
    ensemble = [load_bundled("z0")] + [random_section(2, d, rng) for d in (1, 2, 3)]
    bare = uniqueness_criterion(T, ensemble).value
    plus = HoloChain(list(T.pieces) + list(full_line().pieces), 2)
    ensemble2 = [random_section(2, d, rng) for d in (1, 2, 3)]
    with_line = uniqueness_criterion(plus, ensemble2).value
    ok = bare == 0.0 and with_line >= 1.0 - 1e-6
    return _check("uniqueness", ok, bare_disk=bare, disk_plus_line=with_line)


def check_affine_relation(count: int, seed: int) -> dict:
    worst, integral = 0.0, True
    z0 = coordinate_section(2, 0)
    for gamma, sigma in _instances(count, seed + 2):
        try:
            aff = affine_linking(gamma, sigma)
            inf_link = winding_number(gamma, z0).value
        except NumericalError:
            continue
        integral &= isinstance(aff, int)
        proj = winding_number(gamma, sigma).value
        worst = max(worst, abs(proj - aff - sigma.degree * inf_link))
    return _check("affine-relation", worst <= 1e-5 and integral, instances=count, max_gap=worst, tol=1e-5)


def check_qpsh_defect(count: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    worst = math.inf
    done = 0
    while done < count:
        sigma = random_section(2, int(rng.integers(1, 5)), rng)
        x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        if abs(sigma(x)) / np.linalg.norm(x) ** sigma.degree < 1e-3 * sigma.coefficient_norm:
            continue
        worst = min(worst, qpsh_defect(QPSHFunction.section_log(sigma), x))
        done += 1
    return _check("qpsh-defect", worst >= -1e-5, pairs=count, min_eigenvalue=worst, tol=1e-5)


def check_hull_calibration(quick: bool, seed: int) -> dict:
    config = HullConfig(restarts=2 if quick else 4, seed=seed)
    gamma = circle(1.0, n=1)
    on_curve = []
    for t in (0.3, 2.0) if quick else (0.3, 1.1, 2.0, 4.4):
        x = np.array([1.0, np.exp(1j * t)])
        on_curve.append(best_constant(gamma, x, degrees=[4], config=config).best_constant_by_degree[4])
    top = 4 if quick else 8
    origin = best_constant(gamma, np.array([1.0, 0.0]), degrees=range(1, top + 1), config=config)
    c0 = origin.running_max[top]
    ok = all(0.999 <= c <= 1.001 for c in on_curve) and abs(c0 - math.sqrt(2.0)) <= 0.02 * math.sqrt(2.0)
    return _check("hull-calibration", ok, on_curve=on_curve, origin=c0, origin_target=math.sqrt(2.0))


def check_properties(count: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    worst = {"orientation": 0.0, "multiplicity": 0.0, "power": 0.0, "scaling": 0.0, "gradient": 0.0}
    for gamma, sigma in _instances(count, seed + 3):
        w = winding_number(gamma, sigma).value
        worst["orientation"] = max(worst["orientation"], abs(winding_number(gamma.reversed(), sigma).value + w))
        worst["multiplicity"] = max(
            worst["multiplicity"], abs(winding_number(gamma.scaled_multiplicity(3), sigma).value - 3 * w)
        )
        r = w / sigma.degree
        worst["power"] = max(worst["power"], abs(reduced_winding(gamma, sigma**2).value - r))
        worst["scaling"] = max(worst["scaling"], abs(reduced_winding(gamma, sigma * (2.5 - 1.5j)).value - r))
        obj = SmoothedWinding(gamma, sigma.degree)
        c = sigma.coefficients
        dc = rng.standard_normal(c.size) + 1j * rng.standard_normal(c.size)
        h = 1e-6 * np.linalg.norm(c) / np.linalg.norm(dc)
        fd = (obj.value(c + h * dc, 0.05) - obj.value(c - h * dc, 0.05)) / (2 * h)
        an = float(np.real(np.vdot(obj.gradient(c, 0.05), dc)))
        worst["gradient"] = max(worst["gradient"], abs(fd - an) / max(abs(an), 1e-12))
    q = periodic_trapezoid(lambda t: 1.0 / (1.25 - np.cos(t)), tol=1e-13, m0=8)
    spectral = abs(q.value - 2 * np.pi / math.sqrt(1.25**2 - 1)) <= 1e-12 and q.panels <= 256
    ok = (
        worst["orientation"] <= 1e-9
        and worst["multiplicity"] <= 1e-9
        and worst["power"] <= 1e-9
        and worst["scaling"] <= 1e-9
        and worst["gradient"] <= 1e-5
        and spectral
    )
    return _check("properties", ok, instances=count, worst=worst, spectral_panels=q.panels)


def verify_suite(quick: bool = False, seed: int = 0, progress: Callable[[dict], None] | None = None) -> dict:
    """Run the battery; ``quick`` shrinks ensembles to fit in well under 30 s."""
    n = (lambda full, small: small if quick else full)
    jobs = [
        lambda: check_circle_winding(),
        lambda: check_winding_equals_linking(n(50, 5), seed),
        lambda: check_apex_independence(n(20, 3), seed),
        lambda: check_necessity(n(500, 60), seed),
        lambda: check_tightness(quick, seed),
        lambda: check_uniqueness(seed),
        lambda: check_affine_relation(n(20, 5), seed),
        lambda: check_qpsh_defect(n(10000, 300), seed),
        lambda: check_hull_calibration(quick, seed),
        lambda: check_properties(n(20, 4), seed),
    ]
    checks = []
    for job in jobs:
        try:
            res = job()
        except NumericalError as exc:
            res = _check(getattr(job, "__name__", "check"), False, error=f"{type(exc).__name__}: {exc}")
        checks.append(res)
        if progress:
            progress(res)
    return {"quick": quick, "seed": seed, "ok": all(c["ok"] for c in checks), "checks": checks}
