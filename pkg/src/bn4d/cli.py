"""Command-line front end.

    bn4d {constants,robin,reduce,verify,shoot,sweep} [--config PATH] [--out DIR]
         [--check] [--seed N] [--threads N]

Every command writes machine-readable files into ``--out`` with a
provenance header (tool version, config hash, seed). Exit codes: 0 success,
2 configuration error, 3 solver failure, 4 failed ``--check``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import replace
from typing import List, Optional

import numpy as np

from . import __version__
from . import verify as vf
from .bubbles import BubbleParams
from .checks import TOL, Check, _gaussian_field, _rel_gap
from .config import SCHEMA_VERSION, ConfigError, ExperimentConfig, load_config
from .constants import CONSTANTS, FRAK_c, OMEGA
from .domain import BallDomain, DomainError
from .radialode import RadialProblem, ShootingError, ShootOptions, auto_bracket, shoot, sweep
from .reduced import NewtonOptions, ReductionError, delta_of_eps, find_critical_point

EXIT_CONFIG, EXIT_SOLVER, EXIT_CHECK = 2, 3, 4


def default_config() -> ExperimentConfig:
    return ExperimentConfig.from_dict({})


def provenance(cfg: ExperimentConfig, command: str) -> dict:
    return {
        "tool": "bn4d",
        "version": __version__,
        "command": command,
        "schema_version": SCHEMA_VERSION,
        "config_sha256": cfg.sha256(),
        "seed": cfg.seed,
        "config": json.dumps(_jsonable(cfg.to_dict()), sort_keys=True, separators=(",", ":")),
    }


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _csv_text(cfg, command, header, rows) -> str:
    buf = io.StringIO()
    for k, v in provenance(cfg, command).items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_text(cfg, command, payload) -> str:
    doc = {"provenance": provenance(cfg, command), **payload}
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# ---------------------------------------------------------------------------
# command bodies (pure: config in, text out)
# ---------------------------------------------------------------------------


def render_constants(cfg) -> tuple:
    a, b, off = vf.dominance_constants()
    payload = {
        "constants": CONSTANTS.as_dict(),
        "dominance": {"a": a, "b": b, "a_closed_form": vf.dominance_closed_forms()[0],
                      "b_closed_form": vf.dominance_closed_forms()[1], "offdiag": off},
        "omega_over_12": {"closed_form": OMEGA / 12, "adaptive": vf.integral_omega_over_12(),
                          "gauss": vf.integral_omega_over_12("gauss"),
                          "qmc": vf.integral_omega_over_12("qmc", seed=cfg.seed)},
        "inverse_cube": {"closed_form": OMEGA / 4, "gauss": vf.integral_inverse_cube()},
    }
    worst = max(abs(v) for v in off.values())
    checks = [
        Check(1, "omega_over_12", abs(payload["omega_over_12"]["adaptive"] - OMEGA / 12) <= TOL["omega12"],
              payload["omega_over_12"]["adaptive"], "pi^2/6 +- 1e-8"),
        Check(1, "offdiag", worst <= TOL["offdiag"], worst, "<= 1e-10"),
    ]
    return {"constants.json": _json_text(cfg, "constants", payload)}, payload, checks


def _robin_points(cfg, dom):
    pts = cfg["robin"]["points"]
    if pts is None:
        R = getattr(dom, "radius", dom.scale)
        base = np.asarray(getattr(dom, "center", (0.0,) * 4))
        return [list(base + np.array([f * R, 0, 0, 0])) for f in np.linspace(0.0, 0.7, 8)]
    return pts


def render_robin(cfg) -> tuple:
    dom = cfg.build_domain()
    header = ["x1", "x2", "x3", "x4", "tau"] + [f"dtau{i}" for i in range(1, 5)] + \
        [f"h{i}{j}" for i in range(1, 5) for j in range(1, 5)]
    rows = []
    for x in _robin_points(cfg, dom):
        x = np.asarray(x, dtype=float)
        dom.check_margin(x)
        rows.append(list(x) + [float(dom.tau(x))] + list(dom.grad_tau(x)) +
                    list(np.asarray(dom.hess_tau(x)).ravel()))
    checks = []
    if isinstance(dom, BallDomain):
        c = np.asarray(dom.center)
        R = dom.radius
        checks.append(Check(2, "tau_center", abs(dom.tau(c) - 1 / (4 * math.pi**2 * R**2)) < 1e-15,
                            float(dom.tau(c)), "1/(4 pi^2 R^2)"))
        checks.append(Check(2, "grad_tau_center", np.max(np.abs(dom.grad_tau(c))) <= 1e-10,
                            float(np.max(np.abs(dom.grad_tau(c)))), "<= 1e-10"))
    return {"robin.csv": _csv_text(cfg, "robin", header, rows)}, {"rows": len(rows)}, checks


def _reduce(cfg):
    r = cfg["reduced"]
    opts = NewtonOptions(max_iter=r["max_iter"], grad_tol=r["grad_tol"],
                         degeneracy_rtol=r["degeneracy_rtol"])
    return find_critical_point(cfg.build_domain(), cfg.build_potential(), r["guess"], opts)


def render_reduce(cfg) -> tuple:
    sol = _reduce(cfg)
    dom, V = cfg.build_domain(), cfg.build_potential()
    payload = {
        "solution": sol.as_dict(),
        "predicted_delta": [{"eps": e, "delta": delta_of_eps(sol, e)} for e in cfg["eps"]["grid"]],
    }
    c = CONSTANTS.c_reduced
    lead = abs(c * dom.tau(sol.xi0) - sol.t0 * V.value(sol.xi0))
    checks = [
        Check(7, "scalar_equation", lead <= 1e-12 * abs(sol.t0 * V.value(sol.xi0)), lead,
              "<= 1e-12 |t0 V|"),
        Check(7, "gradient_equation", sol.residual_norm <= cfg["reduced"]["grad_tol"],
              sol.residual_norm, f"<= {cfg['reduced']['grad_tol']:g}"),
        Check(7, "degree_routes", sol.degree_sign == sol.degree_sign_reduced, sol.degree_sign,
              f"== {sol.degree_sign_reduced}"),
    ]
    return {"reduce.json": _json_text(cfg, "reduce", payload)}, payload, checks


VERIFY_HEADER = ["check_name", "delta", "eps", "numeric", "predicted", "ratio", "slope"]


def render_verify(cfg, quick: bool = False) -> str:
    return _verify(cfg, quick)[0]["verify.csv"]


def _verify(cfg, quick: bool = False) -> tuple:
    dom, V = cfg.build_domain(), cfg.build_potential()
    q = cfg.quadrature_spec()
    v = cfg["verify"]
    eps = cfg["eps"]["value"]
    xi = cfg["bubble"]["xi"]
    take = (lambda seq: seq[:2]) if quick else (lambda seq: seq)
    rows: List[vf.ExpansionReport] = []
    checks: List[Check] = []

    val = vf.integral_omega_over_12()
    rows.append(vf.ExpansionReport("omega_over_12", float("nan"), 0.0, val, OMEGA / 12,
                                   val / (OMEGA / 12)))

    centered_ball = isinstance(dom, BallDomain) and np.allclose(xi, dom.center)
    if centered_ball and not quick:
        R = dom.radius
        dd = v["defect_deltas"]
        sup = [vf.projection_defect(BubbleParams(d), R, seed=cfg.seed) for d in dd]
        slope = vf.loglog_slope(dd, sup)
        for d, s in zip(dd, sup):
            pred = FRAK_c * d**3 / (R * R * (d * d + R * R))
            rows.append(vf.ExpansionReport("projection_defect", d, 0.0, s, pred, s / pred, slope))
        c, h = TOL["defect_slope"]
        checks.append(Check(3, "defect_slope", abs(slope - c) <= h, slope, f"{c} +- {h}"))

    ed = take(cfg["bubble"]["deltas"])
    en = [vf.error_norm(dom, V, BubbleParams(d, xi), eps, q) for d in ed]
    slope = vf.loglog_slope(ed, en) if len(ed) > 1 else float("nan")
    for d, e in zip(ed, en):
        rows.append(vf.ExpansionReport("error_norm", d, eps, e, float("nan"), float("nan"), slope))
    if eps == 0 and not quick:
        c, h = TOL["error_slope"]
        checks.append(Check(4, "error_norm_slope", abs(slope - c) <= h, slope, f"{c} +- {h}"))

    if not quick:
        per = []
        for d in v["affinity_deltas"]:
            e1, e0, _ = vf.error_norm_eps_coefficient(dom, V, BubbleParams(d, xi), v["affinity_eps"], q)
            per.append(e1 / d)
            rows.append(vf.ExpansionReport("error_norm_eps_coefficient_per_delta", d, float("nan"),
                                           e1 / d, float("nan"), float("nan")))
        if len(per) >= 2:
            ratio = per[-1] / per[0]
            checks.append(Check(4, "eps_coefficient_ratio", abs(ratio - 1) <= TOL["eps_coefficient_ratio"],
                                ratio, "1 +- 0.2"))

    reps = [vf.reduced_expansion_check(dom, V, BubbleParams(d, xi), eps, q)
            for d in take(v["expansion_deltas"])]
    rows.extend(reps)
    if eps == 0 and not quick:
        lo, hi = TOL["expansion_ratio"]
        gaps = np.abs(np.array([r.ratio for r in reps]) - 1)
        checks.append(Check(5, "expansion_ratio_finest", lo <= reps[-1].ratio <= hi, reps[-1].ratio,
                            f"in [{lo}, {hi}]"))
        checks.append(Check(5, "expansion_monotone", bool(np.all(np.diff(gaps) < 0)),
                            float(gaps[-1]), "|ratio - 1| decreasing"))

    pd = v["pohozaev_delta"]
    for label, pxi in (("center", xi), ("offset", v["pohozaev_xi"])):
        rep = vf.pohozaev_check(dom, V, BubbleParams(pd, pxi), eps, v["eta"], q, v["j"])
        rows.append(replace(rep, check_name=f"pohozaev_interior_{label}"))
        rows.append(vf.ExpansionReport(f"pohozaev_boundary_{label}", pd, eps, rep.secondary_value,
                                       rep.predicted_value,
                                       vf._ratio(rep.secondary_value, rep.predicted_value)))
        scale = max(abs(rep.numeric_value), abs(rep.secondary_value))
        if abs(rep.predicted_value) > 0:
            checks.append(Check(6, f"pohozaev_routes_{label}",
                                _rel_gap(rep.numeric_value, rep.secondary_value) <= TOL["pohozaev_routes"],
                                _rel_gap(rep.numeric_value, rep.secondary_value), "<= 0.01"))
            checks.append(Check(6, f"pohozaev_prediction_{label}",
                                abs(rep.ratio - 1) <= TOL["pohozaev_prediction"], rep.ratio, "1 +- 0.1"))
        else:
            checks.append(Check(6, f"pohozaev_zero_{label}", scale <= 1e-3 * pd**2, scale,
                                "<= 1e-3 delta^2"))

    fu, fg, fl = _gaussian_field((0.1, -0.2, 0.05, 0.0))
    I, B = vf.pohozaev_routes(fu, fg, fl, (0.0,) * 4, 0.7, 1, q)
    rows.append(vf.ExpansionReport("divergence_identity", float("nan"), 0.0, I, B, I / B))
    checks.append(Check(6, "divergence_identity", _rel_gap(I, B) <= TOL["divergence"], _rel_gap(I, B),
                        "<= 1e-8"))

    text = _csv_text(cfg, "verify", VERIFY_HEADER, [r.csv_row() for r in rows])
    summary = {"reports": [r.as_dict() for r in rows]}
    return ({"verify.csv": text, "verify.json": _json_text(cfg, "verify", summary)}, summary, checks)


def _radial_problem(cfg, eps):
    dom = cfg.build_domain()
    if not isinstance(dom, BallDomain):
        raise ConfigError("domain.kind", "radial solves need a ball")
    return RadialProblem(R=dom.radius, eps=eps, V=cfg.build_potential(), center=dom.center)


def _shoot_opts(cfg):
    s = cfg["shoot"]
    return ShootOptions(rtol=s["rtol"], n_profile=s["n_profile"])


def render_shoot(cfg) -> tuple:
    eps = cfg["eps"]["value"] or cfg["eps"]["grid"][0]
    prob = _radial_problem(cfg, eps)
    opts = _shoot_opts(cfg)
    t0 = _reduce_for_radial(cfg)
    bracket = cfg["shoot"]["bracket"] or auto_bracket(prob, t0, opts)
    res = shoot(prob, bracket, opts)
    payload = {"result": res.as_dict(), "t0_pred": t0, "bracket": list(bracket)}
    prof = _csv_text(cfg, "shoot", ["r", "u"], zip(res.profile_r, res.profile_u))
    checks = [Check(8, "energy_identity", res.energy_residual <= 1e-6, res.energy_residual, "<= 1e-6")]
    return {"shoot.json": _json_text(cfg, "shoot", payload), "profile.csv": prof}, payload, checks


def _reduce_for_radial(cfg) -> float:
    return _reduce(cfg).t0


SWEEP_HEADER = ["eps", "u0", "delta_num", "eps_ln_inv_delta", "t0_pred", "status", "delta_halfwidth"]


def render_sweep(cfg, eps_grid=None, threads: int = 1) -> str:
    return _sweep(cfg, eps_grid, threads)[0]["sweep.csv"]


def _sweep(cfg, eps_grid=None, threads: int = 1) -> tuple:
    grid = cfg["eps"]["grid"] if eps_grid is None else eps_grid
    t0 = _reduce_for_radial(cfg)
    res = sweep(_radial_problem(cfg, grid[0]), grid, t0, _shoot_opts(cfg), threads=threads)
    rows = [[r.eps, r.u0, r.delta_num, r.eps_ln_inv_delta, r.t0_pred, r.status, r.delta_halfwidth]
            for r in res.rows]
    payload = {"slope": res.slope, "intercept": res.intercept, "t0_pred": t0,
               "n_ok": len(res.ok_rows()), "n_rows": len(res.rows)}
    gaps = np.abs(np.array([r.eps_ln_inv_delta for r in res.ok_rows()]) - t0)
    checks = [
        Check(8, "rows_solved", len(res.ok_rows()) == len(res.rows), len(res.ok_rows()),
              f"== {len(res.rows)}"),
        Check(8, "slope", abs(res.slope - t0) <= TOL["sweep_slope"] * t0, res.slope,
              f"{t0:g} +- 20%"),
        Check(8, "monotone_to_t0", bool(np.all(np.diff(gaps) < 0)), float(gaps[-1]) if len(gaps) else
              float("nan"), "decreasing"),
    ]
    return ({"sweep.csv": _csv_text(cfg, "sweep", SWEEP_HEADER, rows),
             "sweep.json": _json_text(cfg, "sweep", payload)}, payload, checks)


COMMANDS = {
    "constants": lambda cfg, args: render_constants(cfg),
    "robin": lambda cfg, args: render_robin(cfg),
    "reduce": lambda cfg, args: render_reduce(cfg),
    "verify": lambda cfg, args: _verify(cfg),
    "shoot": lambda cfg, args: render_shoot(cfg),
    "sweep": lambda cfg, args: _sweep(cfg, threads=args.threads),
}


def _error(kind: str, message: str, location: Optional[str] = None) -> None:
    rec = {"error": kind, "message": message}
    if location is not None:
        rec["location"] = location
    sys.stderr.write(json.dumps(rec, sort_keys=True) + "\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="TOML experiment file")
    common.add_argument("--out", metavar="DIR", help="output directory (default: output.dir)")
    common.add_argument("--check", action="store_true", help="evaluate tolerance checks; exit 4 on failure")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--threads", type=int, default=1, help="worker processes for sweeps")
    parser = argparse.ArgumentParser(prog="bn4d", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"bn4d {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else default_config()
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
    except ConfigError as exc:
        _error("config", exc.message, exc.location)
        return EXIT_CONFIG
    try:
        files, summary, checks = COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        _error("config", exc.message, exc.location)
        return EXIT_CONFIG
    except (ShootingError, ReductionError, DomainError, vf.QuadratureError, ArithmeticError) as exc:
        _error("solver", f"{type(exc).__name__}: {exc}")
        return EXIT_SOLVER
    out = args.out or cfg["output"]["dir"]
    os.makedirs(out, exist_ok=True)
    if args.check:
        files["checks.json"] = _json_text(cfg, args.command, {"checks": [c.as_dict() for c in checks]})
    for name, text in files.items():
        with open(os.path.join(out, name), "w", newline="") as fh:
            fh.write(text)
    if args.command == "constants":
        for k, v in summary["constants"].items():
            print(f"{k} = {_fmt(v)}")
        print(f"a = {_fmt(summary['dominance']['a'])}")
        print(f"b = {_fmt(summary['dominance']['b'])}")
        w = summary["omega_over_12"]
        print(f"omega/12 = {_fmt(w['closed_form'])} (quadrature {_fmt(w['adaptive'])})")
    for name in files:
        print(os.path.join(out, name))
    if args.check:
        for c in checks:
            print(c.line())
        if not all(c.passed for c in checks):
            return EXIT_CHECK
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
