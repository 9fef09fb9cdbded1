"""Acceptance criteria, one test each, at the required tolerances and runtimes.

Each test prints (and records for the terminal summary) a PASS/FAIL line.
"""

import math
import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from oracles import CIRCLE_WINDING, DISK_AREA, HULL_ORIGIN, convex_best_constant
from projlink.criterion import estimate_minimal_mass
from projlink.curves import HoloChain, circle, cone_chain, disk, random_fourier_curve
from projlink.fs_core import coordinate_section, random_section
from projlink.invariants import (
    affine_linking,
    clearing_sections,
    necessity_check,
    projective_linking,
    reduced_winding,
    uniqueness_criterion,
    winding_number,
)
from projlink.qpsh_hull import HullConfig, QPSHFunction, best_constant, qpsh_defect
from projlink.verify import full_line, verify_suite

Z0, Z1 = coordinate_section(2, 0), coordinate_section(2, 1)


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def instances(count, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        g = random_fourier_curve(2, 3, rng)
        out.append((g, clearing_sections(g, 1, (1, 2, 3), rng, clearance=1e-2)[0]))
    return out


def test_01_circle_winding():
    t0 = time.perf_counter()
    g = circle(1.0)
    through = winding_number(g, Z1).value
    missing = winding_number(g, Z0).value
    dt = time.perf_counter() - t0
    ok = (
        abs(through - CIRCLE_WINDING["through"]) <= 1e-6
        and abs(missing - CIRCLE_WINDING["missing"]) <= 1e-6
        and dt < 1.0
    )
    report(1, "circle winding oracle", ok, f"through={through:.12f} missing={missing:.12f} time={dt:.3f}s")


def test_02_winding_equals_linking():
    t0 = time.perf_counter()
    worst = 0.0
    for k, (g, s) in enumerate(instances(50, 2)):
        N = cone_chain(g, seed=k, avoid=(s,))
        worst = max(worst, abs(winding_number(g, s).value - projective_linking(g, s, N).value))
    dt = time.perf_counter() - t0
    report(2, "winding = linking on 50 random pairs", worst <= 1e-5 and dt < 60, f"max gap={worst:.2e} time={dt:.1f}s")


def test_03_chain_independence():
    worst = 0.0
    for k, (g, s) in enumerate(instances(20, 3)):
        a = cone_chain(g, seed=100 + k, avoid=(s,))
        b = cone_chain(g, seed=200 + k, avoid=(s,))
        assert np.linalg.norm(a.apex / np.linalg.norm(a.apex) - b.apex / np.linalg.norm(b.apex)) > 1e-3
        worst = max(worst, abs(projective_linking(g, s, a).value - projective_linking(g, s, b).value))
    report(3, "two apex choices agree on 20 instances", worst <= 1e-6, f"max gap={worst:.2e}")


def test_04_necessity():
    g, T = circle(1.0), disk(1.0)
    rng = np.random.default_rng(4)
    sections = clearing_sections(g, 500, (1, 2, 3, 4), rng)
    rep = necessity_check(g, T, sections, tol=1e-5)
    attained = reduced_winding(g, Z0).value
    ok = rep.minimum >= -0.5 - 1e-5 and abs(attained + 0.5) <= 1e-3 and len(rep.values) == 500
    report(4, "necessity on circle/disk", ok, f"min over 500={rep.minimum:.9f} missing line={attained:.12f}")


def test_05_tightness():
    t0 = time.perf_counter()
    rows, ok = [], True
    for r, mult in [(0.5, 1), (1.0, 1), (2.0, 1), (1.0, 2)]:
        est = estimate_minimal_mass(circle(r, multiplicity=mult))
        target = mult * DISK_AREA[r]
        ok &= abs(est - target) <= 2e-2
        rows.append(f"r={r} m={mult}: {est:.6f} vs {target:.6f}")
    dt = time.perf_counter() - t0
    report(5, "minimal mass tightness", ok and dt < 300, "; ".join(rows) + f"; time={dt:.1f}s")


def test_06_uniqueness():
    T = disk(1.0)
    rng = np.random.default_rng(6)
    bare = uniqueness_criterion(T, [Z0] + [random_section(2, d, rng) for d in (1, 2, 3, 4)]).value
    plus = HoloChain(list(T.pieces) + list(full_line().pieces), 2)
    with_line = uniqueness_criterion(plus, [random_section(2, d, rng) for d in (1, 2, 3, 4)] + [Z0]).value
    ok = bare == 0.0 and with_line >= 1 - 1e-6
    report(6, "uniqueness criterion", ok, f"bare disk={bare} disk+line={with_line}")


def test_07_affine_relation():
    worst, integral = 0.0, True
    for g, s in instances(20, 7):
        a = affine_linking(g, s)
        integral &= isinstance(a, int)
        worst = max(worst, abs(winding_number(g, s).value - a - s.degree * winding_number(g, Z0).value))
    report(7, "affine relation on 20 instances", worst <= 1e-5 and integral, f"max gap={worst:.2e} integer={integral}")


def test_08_qpsh_defect():
    rng = np.random.default_rng(8)
    worst, n = math.inf, 0
    while n < 10_000:
        s = random_section(2, int(rng.integers(1, 5)), rng)
        x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        if abs(s(x)) / np.linalg.norm(x) ** s.degree < 1e-3 * s.coefficient_norm:
            continue
        worst = min(worst, qpsh_defect(QPSHFunction.section_log(s), x))
        n += 1
    report(8, "qpsh defect over 10^4 pairs", worst >= -1e-5, f"min eigenvalue={worst:.3e}")


def test_09_hull_calibration():
    g = circle(1.0, n=1)
    cfg = HullConfig(samples=512)
    on = []
    for t in np.linspace(0.2, 6.0, 5):
        est = best_constant(g, np.array([1.0, np.exp(1j * t)]), degrees=[4], config=cfg)
        on.append(est.best_constant_by_degree[4])
    origin = best_constant(g, np.array([1.0, 0.0]), degrees=range(1, 9), config=cfg)
    brute = max(convex_best_constant(np.array([1.0, 0.0]), d, samples=512) for d in range(1, 9))
    c0 = origin.running_max[8]
    ok = (
        all(0.999 <= c <= 1.001 for c in on)
        and abs(c0 - brute) <= 0.02 * brute
        and abs(brute - HULL_ORIGIN) <= 1e-6
    )
    report(9, "hull calibration", ok, f"C_4 on curve in [{min(on):.6f}, {max(on):.6f}]; C(0)={c0:.6f} oracle={brute:.6f}")


def test_10_property_suite():
    t0 = time.perf_counter()
    rep = verify_suite(quick=False, seed=0)
    dt = time.perf_counter() - t0
    failed = [c["name"] for c in rep["checks"] if not c["ok"]]
    report(10, "verify_suite property battery", rep["ok"] and dt < 300, f"{len(rep['checks'])} checks, failed={failed}, time={dt:.1f}s")
