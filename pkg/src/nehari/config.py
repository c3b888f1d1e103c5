"""TOML run configuration: strict schema, problem assembly.

Sections: [problem] (operator, Kirchhoff data, reaction exponents, lambda),
[mesh] (built-in generators or a mesh file), [solver], [scan], [fibering],
[output].  Unknown sections or keys are rejected outright so typos fail fast
instead of silently running defaults.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .meshing import Mesh, interval_mesh, read_mesh, rect_mesh
from .nfunctions import NFunction, constant_weight, coordinate_weight
from .problems import Kirchhoff, Problem, Reactions, build_problem


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


_SECTIONS = {"problem", "mesh", "solver", "scan", "fibering", "output"}

_OPERATORS = {"power", "sum_power", "double_phase", "log_double_phase",
              "log_perturbed"}
_SINGLE_PHASE = {"power"}

_PROBLEM_KEYS = {"operator", "p", "q", "weight", "kirchhoff", "a", "b",
                 "eta_exp", "gamma", "r", "lambda"}
_MESH_KEYS = {"kind", "n", "nx", "ny", "path", "quadrature"}
_SOLVER_KEYS = {"seed", "max_iter", "tol", "residual_rel_tol", "n_directions",
                "override_hypotheses", "mass_scaled"}
_SCAN_KEYS = {"lambdas", "lambda_min", "lambda_max", "n_lambdas",
              "n_directions"}
_FIBERING_KEYS = {"direction", "t_min", "t_max", "n_scan"}
_OUTPUT_KEYS = {"json", "csv"}


def _check_keys(section: str, data: dict, allowed: set) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"[{section}] has unknown keys: {', '.join(unknown)}")


def _get(section: str, data: dict, key: str, kind: type, default=None,
         required: bool = False):
    if key not in data:
        if required:
            raise ConfigError(f"[{section}] is missing required key '{key}'")
        return default
    value = data[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"[{section}] key '{key}' must be a number")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"[{section}] key '{key}' must be an integer")
        return int(value)
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"[{section}] key '{key}' must be a boolean")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"[{section}] key '{key}' must be a string")
        return value
    raise AssertionError(kind)


@dataclass(frozen=True)
class SolverOptions:
    seed: int = 0
    max_iter: int = 30000
    tol: float = 1e-13
    residual_rel_tol: float = 1e-6
    n_directions: int = 10
    override_hypotheses: bool = False
    mass_scaled: bool = False


@dataclass(frozen=True)
class ScanOptions:
    lambdas: tuple[float, ...]
    n_directions: int


@dataclass(frozen=True)
class FiberingOptions:
    direction: str = "sine"
    t_min: float = 1e-6
    t_max: float = 1e6
    n_scan: int = 400


@dataclass(frozen=True)
class OutputOptions:
    json_path: str | None = None
    csv_path: str | None = None


@dataclass(frozen=True)
class RunConfig:
    problem: Problem
    solver: SolverOptions
    scan: ScanOptions | None
    fibering: FiberingOptions
    output: OutputOptions


def _build_weight(section: str, value):
    if value is None:
        return constant_weight(1.0)
    if isinstance(value, str):
        if value == "x0":
            return coordinate_weight(0)
        if value == "x1":
            return coordinate_weight(1)
        raise ConfigError(f"[{section}] weight must be a number, 'x0' or 'x1'")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"[{section}] weight must be a number, 'x0' or 'x1'")
    if value < 0:
        raise ConfigError(f"[{section}] weight must be nonnegative")
    return constant_weight(float(value))


def _build_nfunction(data: dict) -> NFunction:
    op = _get("problem", data, "operator", str, required=True)
    if op not in _OPERATORS:
        raise ConfigError(f"[problem] unknown operator '{op}'; choose one of "
                          + ", ".join(sorted(_OPERATORS)))
    p = _get("problem", data, "p", float, required=True)
    if op in _SINGLE_PHASE:
        for key in ("q", "weight"):
            if key in data:
                raise ConfigError(f"[problem] key '{key}' does not apply to "
                                  f"operator '{op}'")
        return NFunction.power(p)
    q = _get("problem", data, "q", float, required=True)
    weight = _build_weight("problem", data.get("weight"))
    try:
        if op == "sum_power" or op == "double_phase":
            return NFunction.double_phase(p, q, weight)
        if op == "log_double_phase":
            return NFunction.log_double_phase(p, q, weight)
        return NFunction.log_perturbed_double_phase(p, q, weight)
    except ValueError as exc:
        raise ConfigError(f"[problem] {exc}") from exc


def _build_kirchhoff(data: dict) -> Kirchhoff:
    kind = _get("problem", data, "kirchhoff", str, default="constant")
    a = _get("problem", data, "a", float, default=1.0)
    try:
        if kind == "constant":
            for key in ("b", "eta_exp"):
                if key in data:
                    raise ConfigError(f"[problem] key '{key}' does not apply "
                                      "to a constant Kirchhoff term")
            return Kirchhoff.constant(a)
        if kind == "affine_power":
            b = _get("problem", data, "b", float, default=0.0)
            eta_exp = _get("problem", data, "eta_exp", float, default=1.0)
            return Kirchhoff.affine_power(a, b, eta_exp)
    except ValueError as exc:
        raise ConfigError(f"[problem] {exc}") from exc
    raise ConfigError(f"[problem] unknown kirchhoff kind '{kind}'; "
                      "choose constant or affine_power")


def _build_reactions(data: dict) -> Reactions:
    gamma = _get("problem", data, "gamma", float, required=True)
    r = _get("problem", data, "r", float, required=True)
    try:
        return Reactions.powers(gamma, r)
    except ValueError as exc:
        raise ConfigError(f"[problem] {exc}") from exc


def _build_mesh(data: dict) -> Mesh:
    _check_keys("mesh", data, _MESH_KEYS)
    kind = _get("mesh", data, "kind", str, required=True)
    quad = _get("mesh", data, "quadrature", str)
    try:
        if kind == "interval":
            mesh = interval_mesh(_get("mesh", data, "n", int, required=True))
        elif kind == "rect":
            mesh = rect_mesh(_get("mesh", data, "nx", int, required=True),
                             _get("mesh", data, "ny", int, required=True))
        elif kind == "file":
            mesh = read_mesh(_get("mesh", data, "path", str, required=True))
        else:
            raise ConfigError(f"[mesh] unknown kind '{kind}'; choose "
                              "interval, rect or file")
        if quad is not None:
            mesh = mesh.with_quadrature(quad)
    except ConfigError:
        raise
    except (ValueError, OSError) as exc:
        raise ConfigError(f"[mesh] {exc}") from exc
    return mesh


def _build_scan(data: dict | None, solver: SolverOptions) -> ScanOptions | None:
    if data is None:
        return None
    _check_keys("scan", data, _SCAN_KEYS)
    n_dirs = _get("scan", data, "n_directions", int,
                  default=solver.n_directions)
    if "lambdas" in data:
        for key in ("lambda_min", "lambda_max", "n_lambdas"):
            if key in data:
                raise ConfigError("[scan] give either 'lambdas' or the "
                                  "min/max/count triple, not both")
        raw = data["lambdas"]
        if (not isinstance(raw, list) or not raw
                or any(isinstance(v, bool) or not isinstance(v, (int, float))
                       for v in raw)):
            raise ConfigError("[scan] 'lambdas' must be a nonempty list "
                              "of numbers")
        lambdas = tuple(float(v) for v in raw)
    else:
        lo = _get("scan", data, "lambda_min", float, required=True)
        hi = _get("scan", data, "lambda_max", float, required=True)
        n = _get("scan", data, "n_lambdas", int, required=True)
        if not 0 < lo <= hi or n < 1:
            raise ConfigError("[scan] need 0 < lambda_min <= lambda_max "
                              "and n_lambdas >= 1")
        if n == 1:
            lambdas = (lo,)
        else:
            lambdas = tuple(float(v) for v in np.geomspace(lo, hi, n))
    if any(v <= 0 for v in lambdas):
        raise ConfigError("[scan] lambdas must be positive")
    return ScanOptions(lambdas=lambdas, n_directions=n_dirs)


def parse_config(data: dict) -> RunConfig:
    """Validate a parsed TOML document and assemble the run configuration."""
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a table")
    unknown = sorted(set(data) - _SECTIONS)
    if unknown:
        raise ConfigError(f"unknown sections: {', '.join(unknown)}")
    for name in ("problem", "mesh"):
        if name not in data:
            raise ConfigError(f"missing required section [{name}]")
        if not isinstance(data[name], dict):
            raise ConfigError(f"[{name}] must be a table")
    for name in ("solver", "scan", "fibering", "output"):
        if name in data and not isinstance(data[name], dict):
            raise ConfigError(f"[{name}] must be a table")

    prob_data = data["problem"]
    _check_keys("problem", prob_data, _PROBLEM_KEYS)
    nf = _build_nfunction(prob_data)
    kirchhoff = _build_kirchhoff(prob_data)
    reactions = _build_reactions(prob_data)
    lam = _get("problem", prob_data, "lambda", float, required=True)
    if lam <= 0:
        raise ConfigError("[problem] lambda must be positive")

    mesh = _build_mesh(data["mesh"])

    sol_data = data.get("solver", {})
    _check_keys("solver", sol_data, _SOLVER_KEYS)
    solver = SolverOptions(
        seed=_get("solver", sol_data, "seed", int, default=0),
        max_iter=_get("solver", sol_data, "max_iter", int, default=30000),
        tol=_get("solver", sol_data, "tol", float, default=1e-13),
        residual_rel_tol=_get("solver", sol_data, "residual_rel_tol", float,
                              default=1e-6),
        n_directions=_get("solver", sol_data, "n_directions", int, default=10),
        override_hypotheses=_get("solver", sol_data, "override_hypotheses",
                                 bool, default=False),
        mass_scaled=_get("solver", sol_data, "mass_scaled", bool,
                         default=False),
    )
    if solver.max_iter < 1 or solver.n_directions < 1:
        raise ConfigError("[solver] max_iter and n_directions must be >= 1")
    if solver.tol <= 0 or solver.residual_rel_tol <= 0:
        raise ConfigError("[solver] tolerances must be positive")

    fib_data = data.get("fibering", {})
    _check_keys("fibering", fib_data, _FIBERING_KEYS)
    fibering = FiberingOptions(
        direction=_get("fibering", fib_data, "direction", str,
                       default="sine"),
        t_min=_get("fibering", fib_data, "t_min", float, default=1e-6),
        t_max=_get("fibering", fib_data, "t_max", float, default=1e6),
        n_scan=_get("fibering", fib_data, "n_scan", int, default=400),
    )
    if fibering.direction not in ("sine", "random"):
        raise ConfigError("[fibering] direction must be 'sine' or 'random'")
    if not 0 < fibering.t_min < fibering.t_max or fibering.n_scan < 16:
        raise ConfigError("[fibering] need 0 < t_min < t_max and "
                          "n_scan >= 16")

    out_data = data.get("output", {})
    _check_keys("output", out_data, _OUTPUT_KEYS)
    output = OutputOptions(
        json_path=_get("output", out_data, "json", str),
        csv_path=_get("output", out_data, "csv", str),
    )

    try:
        problem = build_problem(nf, kirchhoff, reactions, lam, mesh)
    except (ValueError, FloatingPointError) as exc:
        raise ConfigError(f"problem assembly failed: {exc}") from exc

    scan = _build_scan(data.get("scan"), solver)
    return RunConfig(problem=problem, solver=solver, scan=scan,
                     fibering=fibering, output=output)


def load_config(path: str) -> RunConfig:
    """Read and validate a TOML run configuration file."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(data)
