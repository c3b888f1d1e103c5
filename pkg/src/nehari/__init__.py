"""Two weak solutions of Kirchhoff problems with generalized Orlicz growth.

The library realizes the Nehari-manifold route numerically: P1 finite
elements, fibering maps along rays t -> J(t u), projection onto the two
manifold branches and constrained descent, for operators driven by
generalized N-functions (double phase with and without logarithmic
perturbation, plain powers, user callbacks), a nonlocal Kirchhoff
coefficient, and a singular-plus-superlinear right-hand side.
"""

from .energy import (EnergyBreakdown, EstimateReport, FiberingEvaluator,
                     ReactionRatios, check_basic_estimates, energy,
                     energy_value, fibering, grad_J, kirchhoff_A, kirchhoff_B,
                     reaction_growth_ratios, residual_norm)
from .config import (ConfigError, FiberingOptions, OutputOptions, RunConfig,
                     ScanOptions, SolverOptions, load_config, parse_config)
from .meshing import (FeFunction, Mesh, MeshFormatError, fe_interpolate,
                      integrate, interval_mesh, nodal_interpolate,
                      qp_values, random_fe_function, read_mesh, rect_mesh,
                      sine_mode)
from .modular import (ModularValue, check_modular_norm_sandwich,
                      gradient_norm, luxemburg_norm, modular_rho)
from .nfunctions import (IndexReport, NFunction, SandwichReport,
                         check_growth_sandwich, check_index_bounds,
                         constant_weight, coordinate_weight, envelope_over,
                         envelope_under, estimate_indices,
                         solve_log_threshold)
from .problems import (HypothesisError, HypothesisReport, Kirchhoff, Problem,
                       Reactions, build_problem, check_hypotheses,
                       estimate_eta_theta)
from .solver import (BranchResult, FiberingProfile, FiberingRoot,
                     MinimizeInfo, NehariDiagnostics, NehariPoint,
                     ProbeReport, ProjectionError, ScanResult, ScanRow,
                     SolveReport, SolverError, find_fibering_roots,
                     lambda_scan, local_minimality_probe, minimize_on_nehari,
                     nehari_diagnostics, profile_to_rows, project_to_nehari,
                     solution_to_rows, solve_two_solutions)

__version__ = "0.1.0"

__all__ = [
    "BranchResult", "ConfigError", "EnergyBreakdown", "EstimateReport",
    "FeFunction", "FiberingEvaluator", "FiberingOptions", "FiberingProfile",
    "FiberingRoot", "HypothesisError", "HypothesisReport", "IndexReport",
    "Kirchhoff", "Mesh", "MeshFormatError", "MinimizeInfo", "ModularValue",
    "NehariDiagnostics", "NehariPoint", "NFunction", "OutputOptions",
    "ProbeReport", "Problem", "ProjectionError", "Reactions",
    "ReactionRatios", "RunConfig", "SandwichReport", "ScanOptions",
    "ScanResult", "ScanRow", "SolveReport", "SolverError", "SolverOptions",
    "build_problem", "check_basic_estimates", "check_growth_sandwich",
    "check_hypotheses", "check_index_bounds", "check_modular_norm_sandwich",
    "constant_weight", "coordinate_weight", "energy", "energy_value",
    "envelope_over", "envelope_under", "estimate_eta_theta",
    "estimate_indices", "fe_interpolate", "fibering", "find_fibering_roots",
    "grad_J", "gradient_norm", "integrate", "interval_mesh", "kirchhoff_A",
    "kirchhoff_B", "lambda_scan", "load_config", "local_minimality_probe",
    "luxemburg_norm", "minimize_on_nehari", "modular_rho",
    "nehari_diagnostics", "nodal_interpolate", "parse_config",
    "profile_to_rows", "project_to_nehari", "qp_values",
    "random_fe_function", "reaction_growth_ratios", "read_mesh", "rect_mesh",
    "residual_norm", "sine_mode", "solution_to_rows", "solve_log_threshold",
    "solve_two_solutions",
]
