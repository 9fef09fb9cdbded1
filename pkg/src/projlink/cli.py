"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 numerical failure (including a
verification check that does not pass). Errors are reported on stderr as a
JSON record.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import io
from .criterion import CriterionConfig, check_boundary_criterion, cross_validate_equivalences, minimize_reduced_winding, write_sweep_csv
from .curves import chain_boundary_check, cone_chain
from .errors import NumericalError, ValidationError
from .fs_core import ProjPoint
from .invariants import EPS_CLEAR, affine_linking, chain_mass, clearing_sections, necessity_check, projective_linking, winding_number
from .qpsh_hull import HullConfig, QPSHFunction, hull_field, qpsh_defect, write_field_csv, write_field_svg
from .verify import verify_suite

COMMANDS = ("wind", "link", "affine-link", "mass", "defect", "hull", "criterion", "verify")


@dataclass
class JobConfig:
    """Everything a run needs; every knob has a default."""

    command: str = "verify"
    curve: str | None = None
    section: str | None = None
    chain: str | None = None
    points: str | None = None
    point: list = field(default_factory=list)
    output: str | None = None
    csv: str | None = None
    svg: str | None = None
    tol: float = 1e-12
    eps_clear: float = EPS_CLEAR
    grid: int = 64
    chart: int = 0
    apex: str | None = None
    seed: int = 0
    degrees: list = field(default_factory=lambda: [1, 2, 3, 4, 5, 6])
    restarts: int = 32
    steps: int = 60
    bound: float | None = None
    hull_restarts: int = 6
    samples: int = 512
    box: list = field(default_factory=lambda: [-2.0, 2.0, -2.0, 2.0])
    resolution: int = 9
    step: float = 1e-4
    sections: int = 200
    threads: int | None = None
    quick: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "JobConfig":
        known = {f.name for f in fields(cls)}
        extra = set(doc) - known
        if extra:
            raise ValidationError(f"unknown config keys: {sorted(extra)}")
        return cls(**doc)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "JobConfig":
        return cls.from_dict(json.loads(text))


def _need(config: JobConfig, *names: str) -> None:
    missing = [n for n in names if getattr(config, n) is None]
    if missing:
        raise ValidationError(f"{config.command} needs --{' --'.join(missing)}")


def _doc(path) -> dict:
    return io.read_json(path)


def _points(config: JobConfig) -> list:
    pts = [io.parse_point(p) for p in config.point]
    if config.points:
        pts += io.load_points(config.points)
    return pts


# ------------------------------------------------------------------ commands


def _wind(config):
    _need(config, "curve", "section")
    cdoc, sdoc = _doc(config.curve), _doc(config.section)
    gamma, sigma = io.curve_from_dict(cdoc), io.section_from_dict(sdoc)
    rep = winding_number(gamma, sigma, eps_clear=config.eps_clear, tol=config.tol)
    diag = dict(rep.diagnostics, reduced=rep.value / sigma.degree)
    rec = io.make_record("winding", rep.value, rep.estimated_error, [cdoc, sdoc], diag)
    return rec, f"winding = {rep.value:.12g} +/- {rep.estimated_error:.2g} (reduced {rep.value / sigma.degree:.12g})", True


def _link(config):
    _need(config, "curve", "section")
    cdoc, sdoc = _doc(config.curve), _doc(config.section)
    gamma, sigma = io.curve_from_dict(cdoc), io.section_from_dict(sdoc)
    inputs = [cdoc, sdoc]
    if config.chain:
        chdoc = _doc(config.chain)
        N = io.chain_from_dict(chdoc).as_chain2(gamma)
        inputs.append(chdoc)
    elif config.apex:
        N = cone_chain(gamma, apex=io.parse_point(config.apex))
        inputs.append({"apex": config.apex})
    else:
        N = cone_chain(gamma, seed=config.seed, avoid=(sigma,))
        inputs.append({"seed": config.seed})
    rep = projective_linking(gamma, sigma, N, eps_clear=config.eps_clear, grid=config.grid)
    rec = io.make_record("linking", rep.value, rep.estimated_error, inputs, rep.diagnostics)
    d = rep.diagnostics
    return rec, f"linking = {rep.value:.12g} ({d['intersection_number']} intersections, area {d['area']:.12g})", True


def _affine_link(config):
    _need(config, "curve", "section")
    cdoc, sdoc = _doc(config.curve), _doc(config.section)
    gamma, sigma = io.curve_from_dict(cdoc), io.section_from_dict(sdoc)
    value = affine_linking(gamma, sigma, chart=config.chart, eps_clear=config.eps_clear)
    rec = io.make_record("affine_linking", value, 0.0, [cdoc, sdoc, {"chart": config.chart}], {"chart": config.chart})
    return rec, f"affine linking = {value} (chart {config.chart})", True


def _mass(config):
    _need(config, "chain")
    chdoc = _doc(config.chain)
    rep = chain_mass(io.chain_from_dict(chdoc))
    rec = io.make_record("mass", rep.value, rep.estimated_error, [chdoc], rep.diagnostics)
    return rec, f"mass = {rep.value:.12g} +/- {rep.estimated_error:.2g}", True


def _defect(config):
    _need(config, "section")
    sdoc = _doc(config.section)
    sigma = io.section_from_dict(sdoc)
    pts = _points(config)
    if not pts:
        raise ValidationError("defect needs --point or --points")
    u = QPSHFunction.section_log(sigma)
    values = [qpsh_defect(u, p.homogeneous, h=config.step, eps_clear=config.eps_clear) for p in pts]
    inputs = [sdoc, io.points_to_dict(pts), {"step": config.step}]
    rec = io.make_record("qpsh_defect", min(values), config.step**2, inputs, {"per_point": values})
    return rec, f"min eigenvalue of dd^C u + omega = {min(values):.6g} over {len(values)} point(s)", True


def _grid_points(config, n: int):
    x0, x1, y0, y1 = config.box
    xs = np.linspace(x0, x1, config.resolution)
    ys = np.linspace(y0, y1, config.resolution)
    pts = []
    for y in ys:
        for x in xs:
            w = np.zeros(n, dtype=complex)
            w[0] = x + 1j * y
            pts.append(ProjPoint.affine(w, config.chart))
    return xs, ys, pts


def _hull(config):
    _need(config, "curve")
    cdoc = _doc(config.curve)
    gamma = io.curve_from_dict(cdoc)
    pts = _points(config)
    grid = None
    if not pts:
        xs, ys, pts = _grid_points(config, gamma.n)
        grid = (xs, ys)
    hc = HullConfig(restarts=config.hull_restarts, samples=config.samples, seed=config.seed)
    est = hull_field(gamma, pts, config.degrees, hc, threads=config.threads)
    if config.csv:
        write_field_csv(config.csv, est, chart=config.chart)
    if config.svg:
        if grid is None:
            raise ValidationError("--svg renders the default chart grid; omit --point/--points")
        vals = np.array([e.lambda_estimate for e in est]).reshape(len(grid[1]), len(grid[0]))
        write_field_svg(config.svg, grid[0], grid[1], vals)
    inputs = [cdoc, io.points_to_dict(pts), {"degrees": config.degrees, "seed": config.seed}]
    rec = io.make_record("hull", [e.lambda_estimate for e in est], None, inputs, {"estimates": [e.to_dict() for e in est]})
    counts = {v: sum(e.verdict == v for e in est) for v in ("member", "non-member", "undetermined")}
    return rec, f"hull: {len(est)} point(s), " + ", ".join(f"{k} {v}" for k, v in counts.items()), True


def _criterion(config):
    _need(config, "curve")
    cdoc = _doc(config.curve)
    gamma = io.curve_from_dict(cdoc)
    cc = CriterionConfig(
        degrees=tuple(config.degrees),
        restarts=config.restarts,
        steps=config.steps,
        eps_clear=config.eps_clear,
        seed=config.seed,
        threads=config.threads,
    )
    res = minimize_reduced_winding(gamma, config=cc)
    if config.csv:
        write_sweep_csv(config.csv, res)
    diag = res.to_dict()
    line = f"inf reduced winding = {res.inf_reduced_winding:.12g}, minimal mass >= {res.minimal_mass_estimate:.12g}"
    ok = True
    if config.bound is not None:
        verdict = check_boundary_criterion(gamma, config.bound, res)
        diag["verdict"] = verdict.to_dict()
        line += f", bound {config.bound:g}: {verdict.verdict}"
    inputs = [cdoc, {k: getattr(config, k) for k in ("degrees", "restarts", "steps", "seed", "eps_clear")}]
    rec = io.make_record("criterion", res.inf_reduced_winding, None, inputs, diag)
    return rec, line, ok


def _verify(config):
    if config.curve is None and config.chain is None:
        report = verify_suite(
            quick=config.quick,
            seed=config.seed,
            progress=lambda c: print(f"{'PASS' if c['ok'] else 'FAIL'}  {c['name']}", file=sys.stderr),
        )
        rec = io.make_record("verify_suite", report["ok"], None, [{"quick": config.quick, "seed": config.seed}], report)
        n_ok = sum(c["ok"] for c in report["checks"])
        return rec, f"verify: {n_ok}/{len(report['checks'])} checks passed", report["ok"]
    _need(config, "curve", "chain")
    cdoc, chdoc = _doc(config.curve), _doc(config.chain)
    gamma, T = io.curve_from_dict(cdoc), io.chain_from_dict(chdoc)
    boundary = chain_boundary_check(T, gamma)
    checks = [{"name": "boundary", "ok": boundary.ok, **boundary.to_dict()}]
    if boundary.ok:
        rng = np.random.default_rng(config.seed)
        sections = clearing_sections(gamma, config.sections, (1, 2, 3, 4), rng)
        nec = necessity_check(gamma, T, sections)
        checks.append({"name": "necessity", **nec.to_dict()})
        eq = cross_validate_equivalences(gamma, sections[:5], chain=T.as_chain2(gamma))
        checks.append({"name": "equivalences", **eq.to_dict()})
    ok = all(c["ok"] for c in checks)
    for c in checks:
        print(f"{'PASS' if c['ok'] else 'FAIL'}  {c['name']}", file=sys.stderr)
    rec = io.make_record("verify", ok, None, [cdoc, chdoc, {"seed": config.seed, "sections": config.sections}], {"checks": checks})
    return rec, f"verify: {'all PASS' if ok else 'FAIL'} ({len(checks)} checks)", ok


HANDLERS = {
    "wind": _wind,
    "link": _link,
    "affine-link": _affine_link,
    "mass": _mass,
    "defect": _defect,
    "hull": _hull,
    "criterion": _criterion,
    "verify": _verify,
}


def _error(exc: Exception, code: int) -> int:
    rec = {"error": True, "kind": type(exc).__name__, "message": str(exc), "path": getattr(exc, "path", None), "exit_code": code}
    print(json.dumps(rec, sort_keys=True), file=sys.stderr)
    return code


def run(config: JobConfig) -> int:
    """Execute one job; returns the process exit status."""
    try:
        rec, line, ok = HANDLERS[config.command](config)
        text = io.dumps(rec)
        if config.output:
            Path(config.output).write_text(text)
        print(line)
        if not config.output:
            sys.stdout.write(text)
        return 0 if ok else 2
    except (ValidationError, ValueError, OSError) as exc:
        return _error(exc, 1)
    except NumericalError as exc:
        return _error(exc, 2)


# ------------------------------------------------------------------- parsing


def _int_list(text: str) -> list:
    """'1-6' or '1,2,4'."""
    out = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def _float_list(text: str) -> list:
    return [float(x) for x in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False, argument_default=S)
    common.add_argument("--config", help="JSON JobConfig; explicit flags override it")
    common.add_argument("--curve", help="curve JSON file")
    common.add_argument("--section", help="section JSON file")
    common.add_argument("--chain", help="holomorphic chain JSON file")
    common.add_argument("--points", help="points JSON file")
    common.add_argument("--point", action="append", help="homogeneous point, e.g. '1,0.5+0.2j,0' (repeatable)")
    common.add_argument("--output", "-o", help="write the JSON record here instead of stdout")
    common.add_argument("--csv", help="CSV output (hull field, criterion sweep)")
    common.add_argument("--svg", help="SVG heat map of the hull field")
    common.add_argument("--tol", type=float, help="quadrature tolerance (default 1e-12)")
    common.add_argument("--eps-clear", dest="eps_clear", type=float, help="clearance threshold (default 1e-8)")
    common.add_argument("--grid", type=int, help="Newton seed grid per side (default 64)")
    common.add_argument("--chart", type=int, help="affine chart index (default 0)")
    common.add_argument("--apex", help="cone apex for link, homogeneous coordinates")
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--degrees", type=_int_list, help="degree range, e.g. 1-6 (default)")
    common.add_argument("--restarts", type=int, help="criterion restarts per degree (default 32)")
    common.add_argument("--steps", type=int, help="criterion descent steps per smoothing level (default 60)")
    common.add_argument("--bound", type=float, help="mass bound Lambda to test (criterion)")
    common.add_argument("--hull-restarts", dest="hull_restarts", type=int, help="hull restarts (default 6)")
    common.add_argument("--samples", type=int, help="curve samples for hull sups (default 512)")
    common.add_argument("--box", type=_float_list, help="xmin,xmax,ymin,ymax of the hull grid (default -2,2,-2,2)")
    common.add_argument("--resolution", type=int, help="hull grid points per side (default 9)")
    common.add_argument("--step", type=float, help="finite-difference step for defect (default 1e-4)")
    common.add_argument("--sections", type=int, help="random sections for verify (default 200)")
    common.add_argument("--threads", type=int, help="worker threads (default $PROJLINK_THREADS or 1)")
    common.add_argument("--quick", action="store_true", help="verify: reduced battery")

    parser = argparse.ArgumentParser(prog="projlink", description="Projective linking numbers and boundary criteria.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "wind": "projective winding number of a curve and a section",
        "link": "projective linking number through a cobounding chain",
        "affine-link": "classical linking number in an affine chart",
        "mass": "mass of a holomorphic chain",
        "defect": "quasi-psh defect of a section logarithm",
        "hull": "best-constant estimates of projective hull membership",
        "criterion": "search for the infimum of the reduced winding",
        "verify": "cross-validation battery or chain verification",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def config_from_args(argv=None) -> JobConfig:
    ns = vars(build_parser().parse_args(argv))
    base = {}
    if "config" in ns:
        base = io.read_json(ns.pop("config"))
    base.update(ns)
    return JobConfig.from_dict(base)


def main(argv=None) -> int:
    try:
        config = config_from_args(argv)
    except (ValidationError, ValueError) as exc:
        return _error(exc, 1)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
