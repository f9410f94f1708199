"""Command-line entry point: config-driven experiments with file outputs.

Subcommands: wolff, forward, sweep, reconstruct, monotonicity.  Every
artifact is written atomically (write-then-rename), floats are serialized
with repr so identical runs produce byte-identical files, and timestamps
appear only in the human-readable summary.  The P_ENCLOSE_LOG environment
variable (error | info | debug) controls logging verbosity.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import geometry, indicator, mesh as mesh_mod, monotonicity, solver, wolff
from .config import RunConfig
from .errors import ConfigError, PencloseError

log = logging.getLogger(__name__)


def _setup_logging():
    level_name = os.environ.get("P_ENCLOSE_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(
        level=levels.get(level_name, logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_config(args, require=()) -> RunConfig:
    cfg = RunConfig.load(args.config)
    if getattr(args, "out", None):
        cfg.out_dir = args.out
    if getattr(args, "workers", None) is not None:
        cfg.workers = args.workers
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    cfg.validate(require=require)
    return cfg


def cmd_wolff(args) -> int:
    if not (1.0 < args.p < math.inf):
        raise ConfigError(f"field 'p' must lie in (1, inf), got {args.p}")
    if args.step <= 0.0 or args.span <= 0.0:
        raise ConfigError("fields 'step' and 'span' must be positive")
    if args.a0 == 0.0 and args.b0 == 0.0:
        raise ConfigError("fields 'a0' and 'b0' must not both vanish")
    profile = wolff.integrate_profile(args.p, args.a0, args.b0, args.step, args.span)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    profile.to_csv(out / "profile.csv.tmp")
    os.replace(out / "profile.csv.tmp", out / "profile.csv")
    c, big_c = profile.orbit_bounds()
    summary = {
        "p": args.p,
        "a0": args.a0,
        "b0": args.b0,
        "step": args.step,
        "span": args.span,
        "period": profile.period,
        "orbit_lower": c,
        "orbit_upper": big_c,
        "period_mean": profile.period_integral() / profile.period,
        "ode_residual": profile.ode_residual(),
    }
    _atomic_write(out / "wolff_summary.json", _json_text(summary))
    print(f"period {profile.period!r}, orbit bounds ({c!r}, {big_c!r})")
    return 0


def _boundary_block(cfg: RunConfig, m):
    """Nodal boundary data from the config's boundary block."""
    block = cfg.boundary
    if not isinstance(block, dict) or "kind" not in block:
        raise ConfigError("field 'boundary' must be a block with a 'kind' key")
    pts = m.vertices[m.boundary_nodes]
    if block["kind"] == "affine":
        try:
            coeff = np.asarray(block["coeff"], dtype=float)
            offset = float(block.get("offset", 0.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"field 'boundary': bad affine block ({exc})") from exc
        if coeff.shape != (2,):
            raise ConfigError("field 'boundary.coeff' must be a 2-vector")
        return pts @ coeff + offset
    if block["kind"] == "wolff":
        try:
            rho = tuple(float(c) for c in block["rho"])
            tau = float(block["tau"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"field 'boundary': bad wolff block ({exc})") from exc
        if tau <= 0.0:
            raise ConfigError("field 'boundary.tau' must be positive")
        frame = wolff.DirectionFrame.from_direction(rho)
        t = block.get("t")
        t = geometry.support_function(cfg.domain, frame.rho) if t is None else float(t)
        profile = wolff.integrate_profile(cfg.p)
        params = wolff.TestFunctionParams(frame=frame, tau=tau, t=t, profile=profile)
        return wolff.eval_wolff(params, pts)[0]
    raise ConfigError(f"field 'boundary.kind' must be affine or wolff, got {block['kind']!r}")


def cmd_forward(args) -> int:
    cfg = _load_config(args, require=("boundary",))
    if cfg.boundary.get("kind") == "wolff":
        tau = float(cfg.boundary.get("tau", 0.0) or 0.0)
        if tau <= 0.0:
            raise ConfigError("field 'boundary.tau' must be positive")
        target = indicator.MESH_RULE / (tau * math.sqrt(2.0))
    else:
        target = 0.025
    m = mesh_mod.generate_mesh(cfg.domain, target, max_vertices=cfg.mesh_budget)
    sig = mesh_mod.assign_conductivity(m, cfg.inclusion, cfg.sigma_d)
    bv = _boundary_block(cfg, m)
    u, report = solver.solve_forward(m, sig, bv, cfg.p, tol=cfg.solver_tol)
    out = Path(cfg.out_dir)
    rows = ["x,y,value"]
    rows += [f"{float(x)!r},{float(y)!r},{float(v)!r}" for (x, y), v in zip(m.vertices, u)]
    _atomic_write(out / "solution.csv", "\n".join(rows) + "\n")
    _atomic_write(out / "forward_report.json", _json_text({
        "energy": report.energy,
        "optimality_residual": report.optimality_residual,
        "iterations": report.iterations,
        "epsilon_final": report.epsilon_final,
        "vertices": m.n_vertices,
        "h_max": m.h_max,
    }))
    print(f"energy {report.energy!r} after {report.iterations} iterations")
    return 0


def _sweep_csv_rows(samples) -> list[str]:
    rows = ["rho_x,rho_y,tau,t,indicator,pairing_sigma,pairing_background"]
    for s in samples:
        rows.append(
            f"{s.rho[0]!r},{s.rho[1]!r},{s.tau!r},{s.t!r},"
            f"{s.value!r},{s.pairing_sigma!r},{s.pairing_background!r}"
        )
    return rows


def cmd_sweep(args) -> int:
    cfg = _load_config(args, require=("rho",))
    frame = wolff.DirectionFrame.from_direction(cfg.rho)
    t = cfg.t_offset
    if t is None:
        t = geometry.support_function(cfg.domain, frame.rho)
    profile = wolff.integrate_profile(cfg.p)
    result = indicator.sweep(
        cfg.domain, cfg.inclusion, cfg.sigma_d, profile, frame.rho, t, cfg.p,
        cfg.tau_list, mesh_budget=cfg.mesh_budget, tol=cfg.solver_tol,
    )
    out = Path(cfg.out_dir)
    _atomic_write(out / "sweep.csv", "\n".join(_sweep_csv_rows(result.samples)) + "\n")
    _atomic_write(out / "sweep_summary.json", _json_text({
        "rho": list(frame.rho),
        "t": t,
        "slope": result.slope,
        "sign": result.sign,
        "usable": [bool(b) for b in result.usable],
        "fit_residual": result.fit_residual,
    }))
    print(f"slope {result.slope!r}, sign {result.sign}")
    return 0


def cmd_reconstruct(args) -> int:
    cfg = _load_config(args)
    result = indicator.reconstruct_hull(cfg)
    out = Path(cfg.out_dir)
    for i, sw in enumerate(result.sweeps):
        _atomic_write(out / f"sweep_{i:03d}.csv", "\n".join(_sweep_csv_rows(sw.samples)) + "\n")
    hull_doc = {
        "detected": result.detected,
        "estimates": [
            None if e is None else {
                "rho": list(e.rho),
                "h_hat": e.h_hat,
                "fit_residual": e.slope_fit_residual,
            }
            for e in result.estimates
        ],
        "hull_vertices": None if result.hull is None else result.hull.vertices.tolist(),
        "messages": result.messages,
        "config": cfg.to_dict(),
    }
    _atomic_write(out / "hull.json", _json_text(hull_doc))
    if result.hull is not None:
        rows = ["x,y"] + [f"{float(x)!r},{float(y)!r}" for x, y in result.hull.vertices]
        _atomic_write(out / "hull_vertices.csv", "\n".join(rows) + "\n")

    lines = [f"run finished {datetime.datetime.now().isoformat(timespec='seconds')}"]
    if not result.detected:
        lines.append("no inclusion detected (all sweeps at the noise floor)")
    else:
        lines.append(f"hull with {len(result.hull.vertices)} vertices from "
                     f"{sum(e is not None for e in result.estimates)}/{cfg.directions} directions")
        signs = {sw.sign for sw in result.sweeps if sw.sign != 0}
        if signs == {1}:
            lines.append("indicator signs positive: inclusion more conductive than background")
        elif signs == {-1}:
            lines.append("indicator signs negative: inclusion less conductive than background")
    for msg in result.messages:
        lines.append(f"note: {msg}")
    _atomic_write(out / "summary.txt", "\n".join(lines) + "\n")
    print("\n".join(lines[1:]) if len(lines) > 1 else "done")
    return 0


def cmd_monotonicity(args) -> int:
    cfg = _load_config(args)
    block = cfg.monotonicity or {}
    unknown = set(block) - {"p_list", "cases_per_p", "target_h"}
    if unknown:
        raise ConfigError(f"unknown monotonicity field(s): {', '.join(sorted(unknown))}")
    p_list = tuple(float(p) for p in block.get("p_list", (1.3, 1.5, 2.0, 3.0, 5.0)))
    if any(p <= 1.0 for p in p_list):
        raise ConfigError("field 'monotonicity.p_list' entries must exceed 1")
    cases = int(block.get("cases_per_p", 50))
    if cases < 1:
        raise ConfigError("field 'monotonicity.cases_per_p' must be positive")
    target_h = float(block.get("target_h", 1.0 / 24.0))

    records = []
    # smoke case first: identical conductivities give an exactly zero chain
    m = mesh_mod.generate_mesh(geometry.square((0.0, 0.0), 1.0), target_h)
    bg = mesh_mod.background_field(m)
    smoke = monotonicity.check_monotonicity(
        m, bg, bg, m.vertices[m.boundary_nodes, 0], p_list[0], tol=cfg.solver_tol
    )
    records.append({
        "seed": cfg.seed, "case": "smoke", "p": p_list[0], "contrast": 0.0,
        "lower": smoke.lower, "middle": smoke.middle, "upper": smoke.upper,
        "slack_lower": smoke.slack_lower, "slack_upper": smoke.slack_upper,
        "verdict": smoke.verdict,
    })
    records.extend(monotonicity.random_suite(
        p_list=p_list, cases_per_p=cases, seed=cfg.seed, target_h=target_h,
        tol=cfg.solver_tol,
    ))
    out = Path(cfg.out_dir)
    text = "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
    _atomic_write(out / "monotonicity.jsonl", text)
    failures = sum(not r["verdict"] for r in records)
    print(f"{len(records)} cases, {failures} chain violations")
    if failures:
        raise PencloseError(f"{failures} monotonicity cases violated the chain")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="penclose",
        description="Inclusion reconstruction for the weighted p-Laplace equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    w = sub.add_parser("wolff", help="integrate an oscillator profile and export it")
    w.add_argument("--p", type=float, default=2.0)
    w.add_argument("--a0", type=float, default=1.0)
    w.add_argument("--b0", type=float, default=0.0)
    w.add_argument("--step", type=float, default=1e-3)
    w.add_argument("--span", type=float, default=40.0)
    w.add_argument("--out", default="out")
    w.set_defaults(func=cmd_wolff)

    for name, func, help_text in (
        ("forward", cmd_forward, "solve one Dirichlet problem and dump the solution"),
        ("sweep", cmd_sweep, "run a tau sweep in one direction"),
        ("reconstruct", cmd_reconstruct, "reconstruct the convex hull of the inclusion"),
        ("monotonicity", cmd_monotonicity, "run the randomized monotonicity suite"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="path to the JSON run configuration")
        sp.add_argument("--out", help="output directory (overrides config)")
        sp.add_argument("--workers", type=int, help="worker pool size (overrides config)")
        sp.add_argument("--seed", type=int, help="random seed (overrides config)")
        sp.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PencloseError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
