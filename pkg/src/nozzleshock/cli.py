"""Command-line entry point: ``nozzleshock <subcommand> --config run.json``.

Exit codes: 0 success, 2 validation failure, 3 solver failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import kernels
from .config import RunConfig, gate, load_config, parse_config
from .errors import SolverError, ValidationError
from .fv import FvGrids, crosscheck
from .periodic_ode import FindOptions, find_periodic, linear_oracle, verify_estimates
from .shock import rh_residuals, scaling_config, scaling_from_inlet
from .stability import (IbvpGrids, compute_T0, initial_from_background, initial_from_periodic,
                        measure_decay, solve_ibvp)
from .steady import FitOptions, exit_density_for_shock, fit_transonic
from .subsonic import IterationOptions, run_iteration
from .supersonic import SupersonicGrids, solve_supersonic_periodic

log = logging.getLogger("nozzleshock")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


class Output:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.dir = cfg.resolved_output_dir()
        self.dir.mkdir(parents=True, exist_ok=True)
        self.written: list[str] = []

    def json(self, name: str, payload: dict) -> Path:
        path = self.dir / name
        body = {"config": self.cfg.as_dict(), "backend": kernels.BACKEND, **payload}
        path.write_text(json.dumps(_jsonable(body), indent=2, sort_keys=True) + "\n")
        self.written.append(str(path))
        return path

    def csv(self, name: str, columns: list[str], data) -> Path:
        path = self.dir / name
        arr = np.column_stack(data) if len(data) else np.zeros((0, len(columns)))
        np.savetxt(path, arr, delimiter=",", header=",".join(columns), comments="", fmt="%.17g")
        self.written.append(str(path))
        return path


def _fit(cfg: RunConfig, g):
    tol = cfg.tolerances
    opts = FitOptions(fit_tol=tol.fit_tol, steps_per_unit=cfg.grids.steps_per_unit,
                      eps=max(cfg.forcing.eps, 1e-12), tol_sonic=tol.tol_sonic)
    target = cfg.exit_density
    if target is None:
        target = exit_density_for_shock(g.profile, g.inlet, cfg.shock_position,
                                        cfg.grids.steps_per_unit, tol.tol_sonic)
    return fit_transonic(g.profile, g.inlet, target, opts)


def _steady_summary(bg) -> dict:
    rl, ul = bg.rho_l, bg.u_l
    rr, ur = bg.subsonic.at(bg.x_star)
    r1, r2 = rh_residuals(rl, ul, float(rr), float(ur), 0.0)
    p = bg.profile
    flux = []
    for br in (bg.supersonic, bg.subsonic):
        q = br.rho * br.u * p.area(br.x_grid)
        flux.append(float(np.max(np.abs(q / q[0] - 1.0))))
    return {"x_star": bg.x_star, "exit_density": bg.exit_density_target,
            "fit_residual": bg.fit_residual, "iterations": bg.iterations,
            "attainable_exit_density": list(bg.attainable), "direction": bg.direction,
            "delta": bg.delta, "rho_l": rl, "u_l": ul, "rho_r": float(rr), "u_r": float(ur),
            "rh_residuals": [float(r1), float(r2)], "mass_flux_defect": flux}


def _periodic(cfg: RunConfig, g):
    bg = _fit(cfg, g)
    forcing = cfg.forcing.build()
    sc = scaling_config(bg, cfg.scaling.alpha, cfg.scaling.beta)
    gr = cfg.grids
    sup = solve_supersonic_periodic(g.profile, bg, forcing, SupersonicGrids(n_t=gr.n_t, n_x=gr.n_x),
                                    cfg.tolerances.tol_sonic)
    opts = IterationOptions(n_t=gr.n_t, n_x=gr.n_x, conv_tol=cfg.tolerances.conv_tol,
                            max_iter=cfg.tolerances.max_iter, tol_sonic=cfg.tolerances.tol_sonic)
    sol, rep = run_iteration(bg, sup, forcing, sc, opts)
    return bg, sol, rep


def cmd_validate(cfg: RunConfig, out: Output, args) -> dict:
    g = gate(cfg)
    sc = scaling_from_inlet(g.inlet.u, cfg.scaling.alpha, cfg.scaling.beta)
    payload = {**g.as_dict(), "scaling": sc.as_dict()}
    out.json("validate.json", payload)
    return payload


def cmd_steady(cfg: RunConfig, out: Output, args) -> dict:
    g = gate(cfg)
    bg = _fit(cfg, g)
    for name, br in (("steady_supersonic.csv", bg.supersonic), ("steady_subsonic.csv", bg.subsonic)):
        out.csv(name, ["x", "rho", "u"], [br.x_grid, br.rho, br.u])
    payload = {"gate": g.as_dict(), "steady": _steady_summary(bg)}
    out.json("steady.json", payload)
    return payload


def _write_periodic(out: Output, sol):
    sup = sol.supersonic
    t = sup.t_grid
    gam = sol.shock.at(t % sol.period)
    T, X = np.meshgrid(t, sup.x_grid, indexing="ij")
    m = X < gam[:, None]
    rs, us = sol.background.supersonic.at(sup.x_grid)
    rho = rs[None, :] + sup.rho_bar
    u = us[None, :] + sup.u_bar
    out.csv("periodic_supersonic.csv", ["t", "x", "rho", "u"], [T[m], X[m], rho[m], u[m]])
    f = sol.subsonic
    T, X = np.meshgrid(f.t_grid, f.x_grid, indexing="ij")
    m = X >= sol.shock.gamma[:, None]
    out.csv("periodic_subsonic.csv", ["t", "x", "rho", "u"], [T[m], X[m], sol.rho_r[m], sol.u_r[m]])
    out.csv("shock.csv", ["t", "gamma", "gamma_dot"], [sol.shock.t_grid, sol.shock.gamma, sol.shock.gamma_dot])


def cmd_periodic(cfg: RunConfig, out: Output, args) -> dict:
    g = gate(cfg)
    bg, sol, rep = _periodic(cfg, g)
    _write_periodic(out, sol)
    payload = {"gate": g.as_dict(), "steady": _steady_summary(bg), "scaling": sol.scaling.as_dict(),
               "report": rep.as_dict(), "norms": sol.norms()}
    out.json("iteration_report.json", payload)
    return payload


def cmd_stability(cfg: RunConfig, out: Output, args) -> dict:
    g = gate(cfg)
    bg, sol, rep = _periodic(cfg, g)
    st = cfg.stability
    grids = IbvpGrids(n_left=cfg.grids.ibvp_n, n_right=cfg.grids.ibvp_n, snapshot_dt=st.snapshot_dt,
                      tol_sonic=cfg.tolerances.tol_sonic)
    if st.bump:
        init = initial_from_periodic(sol, grids, bump=st.bump)
    else:
        init = initial_from_background(bg, grids, shift=st.shift)
    T0 = compute_T0(sol)
    traj = solve_ibvp(bg, sol.forcing, init, st.windows * T0, grids)
    r = measure_decay(traj, sol, T0)
    out.csv("stability.csv", ["t", "gamma", "gamma_dot", "theta", "supersonic_gap"],
            [traj.t, traj.gamma, traj.gamma_dot, r.theta, r.supersonic_gap])
    payload = {"gate": g.as_dict(), "initial_perturbation": init.perturbation_size,
               "stability": r.as_dict(), "steps": traj.n_steps, "dt": traj.dt,
               "max_mass_defect": float(np.max(np.abs(traj.mass_defect)))}
    out.json("stability.json", payload)
    return payload


def cmd_crosscheck(cfg: RunConfig, out: Output, args) -> dict:
    g = gate(cfg)
    bg, sol, rep = _periodic(cfg, g)
    cc = cfg.crosscheck
    res = crosscheck(sol, FvGrids(ladder=tuple(cfg.grids.fv_ladder), snapshot_every=cc.snapshot_every),
                     cc.n_periods)
    if res.snapshots:
        cols = list(zip(*[(np.full(x.size, t), x, r, u) for t, x, r, u in res.snapshots]))
        out.csv("fv_snapshots.csv", ["t", "x", "rho", "u"], [np.concatenate(c) for c in cols])
    tr = np.array(res.shock_track)
    out.csv("fv_shock.csv", ["t", "x_fv", "gamma"], [tr[:, 0], tr[:, 1], tr[:, 2]])
    payload = {"gate": g.as_dict(), "crosscheck": res.as_dict()}
    out.json("crosscheck.json", payload)
    return payload


def cmd_ode_demo(cfg: RunConfig, out: Output, args) -> dict:
    eps = args.eps
    ode = linear_oracle(eps)
    orb = find_periodic(ode, FindOptions())
    exact = eps * (np.sin(orb.t_grid) - np.cos(orb.t_grid)) / 2.0
    payload = {"eps": eps, "sup_error": float(np.max(np.abs(orb.psi - exact))),
               "map_derivative": orb.map_derivative, "estimates": verify_estimates(orb, ode)}
    out.json("periodic_ode_demo.json", payload)
    return payload


COMMANDS = {
    "validate": (cmd_validate, "check the structural assumptions and print M, alpha, beta"),
    "steady": (cmd_steady, "fit the steady transonic shock"),
    "periodic": (cmd_periodic, "solve for the time-periodic solution"),
    "stability": (cmd_stability, "evolve perturbed data and measure decay"),
    "crosscheck": (cmd_crosscheck, "compare with the finite-volume oracle"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nozzleshock", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="JSON run configuration (defaults to the reference run)")
        p.add_argument("--out", help="output directory (NOZZLE_OUT takes precedence)")
    demo = sub.add_parser("periodic-ode-demo", help=argparse.SUPPRESS)
    demo.add_argument("--config")
    demo.add_argument("--out")
    demo.add_argument("--eps", type=float, default=0.01)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    func = cmd_ode_demo if args.command == "periodic-ode-demo" else COMMANDS[args.command][0]
    try:
        cfg = load_config(args.config) if args.config else parse_config({})
        if args.out:
            cfg = replace(cfg, output_dir=args.out)
        out = Output(cfg)
        payload = func(cfg, out, args)
    except ValidationError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    summary = {k: payload[k] for k in ("M", "scaling") if k in payload}
    if summary:
        print(json.dumps(_jsonable(summary), sort_keys=True))
    for path in out.written:
        log.info("wrote %s", path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
