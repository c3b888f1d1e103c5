"""Command line front end: solve, check, scan, fibering.

Exit codes: 0 success, 1 property-check failure, 2 configuration error,
3 hypothesis audit failure without --override-hypotheses, 4 solver failure.

All JSON output is emitted with sorted keys and no timestamps; CSV floats
use the shortest round-trip-safe decimal form (%.17g).  Reruns with the same
configuration and seed produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .energy import FiberingEvaluator, check_basic_estimates, energy_value, grad_J
from .meshing import random_fe_function, sine_mode
from .modular import check_modular_norm_sandwich
from .nfunctions import check_index_bounds
from .problems import HypothesisError, Problem, check_hypotheses, _mesh_x_samples
from .solver import (ProjectionError, SolverError, find_fibering_roots,
                     lambda_scan, profile_to_rows, solution_to_rows,
                     solve_two_solutions)

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_CONFIG = 2
EXIT_HYPOTHESES = 3
EXIT_SOLVER = 4


def _sanitize(obj):
    """Make an object strict-JSON safe and deterministic."""
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if not np.isfinite(f):
            return repr(f)
        return f
    return obj


def _emit_json(obj, path: str | None) -> None:
    text = json.dumps(_sanitize(obj), sort_keys=True, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _emit_csv(header, rows, path: str | None) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("%.17g" % float(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ----------------------------------------------------------------------
# property suite
# ----------------------------------------------------------------------

def run_property_suite(problem: Problem, seed: int = 0,
                       n_samples: int = 8) -> dict:
    """Executable inequality and identity checks on random functions.

    Returns one entry per property with the sample count, the worst relative
    violation seen and a pass flag; 'all_pass' aggregates them.
    """
    rng = np.random.default_rng(seed)
    mesh = problem.mesh
    entries = []

    chk = check_index_bounds(problem.nf, problem.indices,
                             x_samples=_mesh_x_samples(mesh))
    entries.append({"name": "operator_index_bounds", "samples": chk.n_checked,
                    "max_violation": chk.max_rel_violation, "pass": chk.ok})

    worst = 0.0
    ok = True
    for _ in range(n_samples):
        u = random_fe_function(mesh, rng, kind="smooth")
        rep = check_modular_norm_sandwich(
            problem.nf, mesh, u.grad_mag(),
            problem.indices.p_idx, problem.indices.q_idx)
        worst = max(worst, rep.max_rel_violation)
        ok = ok and rep.ok
    entries.append({"name": "modular_norm_sandwich", "samples": n_samples,
                    "max_violation": worst, "pass": ok})

    worst = 0.0
    ok = True
    for _ in range(n_samples):
        u = random_fe_function(mesh, rng, kind="smooth")
        est = check_basic_estimates(problem, u)
        worst = max(worst, est.max_violation)
        ok = ok and est.ok
    entries.append({"name": "radial_energy_bracket", "samples": n_samples,
                    "max_violation": worst, "pass": ok})

    worst = 0.0
    for _ in range(n_samples):
        u = random_fe_function(mesh, rng, kind="positive")
        t = float(np.exp(rng.uniform(np.log(1e-2), np.log(1e2))))
        ev = FiberingEvaluator(problem, u)
        ev_t = FiberingEvaluator(problem, t * u)
        pairs = ((ev.psi(t), ev_t.psi(1.0), 1.0),
                 (t * ev.dpsi(t), ev_t.dpsi(1.0), ev_t.dpsi_scale(1.0)),
                 (t * t * ev.d2psi(t), ev_t.d2psi(1.0),
                  ev_t.d2psi_scale(1.0)))
        for lhs, rhs, extra in pairs:
            scale = max(abs(lhs), abs(rhs), extra, 1e-300)
            worst = max(worst, abs(lhs - rhs) / scale)
    entries.append({"name": "fibering_scaling_identities",
                    "samples": 3 * n_samples, "max_violation": worst,
                    "pass": worst <= 1e-10})

    worst = 0.0
    for _ in range(n_samples):
        u = random_fe_function(mesh, rng, kind="positive")
        ev = FiberingEvaluator(problem, u)
        pairing = float(np.dot(grad_J(problem, u), u.values))
        scale = max(abs(pairing), ev.dpsi_scale(1.0), 1e-300)
        worst = max(worst, abs(pairing - ev.dpsi(1.0)) / scale)
    entries.append({"name": "gradient_constraint_pairing",
                    "samples": n_samples, "max_violation": worst,
                    "pass": worst <= 1e-10})

    worst = 0.0
    for _ in range(n_samples):
        u = random_fe_function(mesh, rng, kind="smooth")
        a, b = energy_value(problem, u), energy_value(problem, -u)
        scale = max(abs(a), abs(b), 1e-300)
        worst = max(worst, abs(a - b) / scale)
    entries.append({"name": "energy_evenness", "samples": n_samples,
                    "max_violation": worst, "pass": worst == 0.0})

    return {"properties": entries,
            "all_pass": all(e["pass"] for e in entries)}


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def _apply_overrides(cfg: RunConfig, args) -> tuple[int, bool]:
    seed = cfg.solver.seed if args.seed is None else args.seed
    override = cfg.solver.override_hypotheses or args.override_hypotheses
    return seed, override


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    seed, override = _apply_overrides(cfg, args)
    try:
        report = solve_two_solutions(
            cfg.problem, seed=seed, override_hypotheses=override,
            residual_rel_tol=cfg.solver.residual_rel_tol,
            max_iter=cfg.solver.max_iter, tol=cfg.solver.tol,
            n_directions=cfg.solver.n_directions,
            mass_scaled=cfg.solver.mass_scaled)
    except HypothesisError as exc:
        print(f"refusing to solve: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESES
    except (ProjectionError, SolverError) as exc:
        print(f"solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    out = args.out or cfg.output.json_path
    _emit_json(report.as_dict(cfg.problem), out)
    if cfg.output.csv_path:
        stem, ext = os.path.splitext(cfg.output.csv_path)
        mesh = cfg.problem.mesh
        coord_names = tuple(f"x{d}" for d in range(mesh.dim))
        for name, br in (("plus", report.plus), ("minus", report.minus)):
            _emit_csv(coord_names + ("value",),
                      solution_to_rows(mesh, br.point.u),
                      f"{stem}_{name}{ext}")
    if out is not None:
        for name, br in (("plus", report.plus), ("minus", report.minus)):
            print(f"{name:5s}: J = {br.point.energy: .6e}  "
                  f"residual_rel = {br.residual_rel:.3e}  "
                  f"iterations = {br.info.iterations}")
        print(f"wrote {out}")
    if not report.success:
        for line in report.failures:
            print(f"check failed: {line}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = load_config(args.config)
    seed, override = _apply_overrides(cfg, args)
    audit = check_hypotheses(cfg.problem)
    if not audit.all_ok and not override:
        for note in audit.notes:
            print(f"hypothesis check failed: {note}", file=sys.stderr)
        _emit_json({"hypotheses": audit.as_dict(), "properties": None,
                    "all_pass": False}, args.out or cfg.output.json_path)
        return EXIT_HYPOTHESES
    suite = run_property_suite(cfg.problem, seed=seed,
                               n_samples=args.samples)
    obj = {"hypotheses": audit.as_dict(),
           "hypotheses_overridden": not audit.all_ok,
           "properties": suite["properties"],
           "all_pass": suite["all_pass"]}
    out = args.out or cfg.output.json_path
    _emit_json(obj, out)
    if out is not None:
        for entry in suite["properties"]:
            flag = "pass" if entry["pass"] else "FAIL"
            print(f"{flag}  {entry['name']}  "
                  f"max_violation = {entry['max_violation']:.3e}")
        print(f"wrote {out}")
    return EXIT_OK if suite["all_pass"] else EXIT_PROPERTY


def cmd_scan(args) -> int:
    cfg = load_config(args.config)
    if cfg.scan is None:
        raise ConfigError("the scan command needs a [scan] section")
    seed, override = _apply_overrides(cfg, args)
    audit = check_hypotheses(cfg.problem)
    if not audit.all_ok and not override:
        for note in audit.notes:
            print(f"hypothesis check failed: {note}", file=sys.stderr)
        return EXIT_HYPOTHESES
    result = lambda_scan(cfg.problem, cfg.scan.lambdas,
                         n_directions=cfg.scan.n_directions, seed=seed)
    header = ("lambda", "direction_id", "n_roots", "t_plus", "t_minus",
              "D1", "D2", "sigma")
    rows = [(r.lam, r.direction, r.n_roots, r.t_plus, r.t_minus,
             r.norm_plus, r.norm_minus, r.energy_minus)
            for r in result.rows]
    out = args.out or cfg.output.csv_path
    _emit_csv(header, rows, out)
    if cfg.output.json_path:
        _emit_json({"per_lambda": list(result.per_lambda),
                    "lambda_empirical": result.lambda_empirical,
                    "n_directions": result.n_directions,
                    "seed": result.seed}, cfg.output.json_path)
    if out is not None:
        if result.lambda_empirical is None:
            print("lambda_empirical: none (no lambda had clean rays)")
        else:
            print(f"lambda_empirical = {result.lambda_empirical:.17g}")
        print(f"wrote {out}")
    return EXIT_OK


def cmd_fibering(args) -> int:
    cfg = load_config(args.config)
    seed, _ = _apply_overrides(cfg, args)
    if cfg.fibering.direction == "sine":
        u = sine_mode(cfg.problem.mesh)
    else:
        rng = np.random.default_rng(seed)
        u = random_fe_function(cfg.problem.mesh, rng, kind="positive")
    profile = find_fibering_roots(cfg.problem, u,
                                  t_min=cfg.fibering.t_min,
                                  t_max=cfg.fibering.t_max,
                                  n_scan=cfg.fibering.n_scan)
    out = args.out or cfg.output.csv_path
    _emit_csv(("t", "psi", "dpsi", "d2psi"), profile_to_rows(profile), out)
    if cfg.output.json_path:
        _emit_json({"roots": [{"t": r.t, "psi2": r.psi2, "branch": r.branch}
                              for r in profile.roots],
                    "n_roots": profile.n_roots}, cfg.output.json_path)
    if out is not None:
        for r in profile.roots:
            print(f"root: t = {r.t:.12g}  psi'' = {r.psi2:.6e}  "
                  f"branch = {r.branch:+d}")
        print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nehari",
        description="Two-solution Nehari manifold solver for Kirchhoff "
                    "problems with generalized Orlicz growth")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, with_override: bool = True):
        sp.add_argument("--config", required=True,
                        help="TOML run configuration")
        sp.add_argument("--seed", type=int, default=None,
                        help="override [solver] seed")
        sp.add_argument("--out", default=None,
                        help="output path (JSON for solve/check, CSV for "
                             "scan/fibering); stdout when omitted")
        if with_override:
            sp.add_argument("--override-hypotheses", action="store_true",
                            help="run even when the hypothesis audit fails")

    sp = sub.add_parser("solve", help="find both solutions and verify them")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("check", help="hypothesis audit plus property suite")
    common(sp)
    sp.add_argument("--samples", type=int, default=8,
                    help="random functions per property")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("scan", help="root structure across a lambda grid")
    common(sp)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("fibering", help="export one fibering profile as CSV")
    common(sp, with_override=False)
    sp.set_defaults(func=cmd_fibering)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "override_hypotheses", None) is None:
        args.override_hypotheses = False
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
