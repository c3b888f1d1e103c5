"""Nehari-manifold machinery: fibering roots, projection, two-solution solve.

The constraint set is N = {u != 0 : psi_u'(1) = 0}, split by the sign of
psi_u''(1) into the branch N+ (local minima of the ray map, small solutions
with negative energy) and N- (local maxima of the ray map, mountain-pass
type solutions with positive energy); N0 is the degenerate in-between and is
expected to be empty for admissible parameters.

Root finding along a ray scans psi_u' on a log grid in t, brackets each sign
change, bisects, then polishes with safeguarded Newton steps using psi_u''.
Roots are classified by the sign of psi_u'' against a dead band proportional
to the magnitude of its constituent terms.

Minimization over a branch is projected gradient descent: take the nodal
gradient of J, step, flip negative values (J is even, so |w| costs nothing
in energy while keeping the iterate admissible), re-project the candidate
onto the branch by a warm-started Newton solve in t, and accept on an
Armijo-style decrease.  On both branches the discrete constrained minimizer
is an unconstrained critical point (the multiplier vanishes because pairing
the gradient with u reproduces psi'(1) = 0 exactly), so the nodal residual
is driven to zero and reported relative to its starting magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import FiberingEvaluator, energy_value, grad_J
from .meshing import FeFunction, Mesh, random_fe_function, sine_mode
from .modular import gradient_norm
from .problems import HypothesisError, HypothesisReport, Problem, check_hypotheses

DEFAULT_T_MIN = 1e-6
DEFAULT_T_MAX = 1e6
DEFAULT_N_SCAN = 400
DEFAULT_ROOT_TOL = 1e-11
DEFAULT_CLASS_BAND = 1e-8


class ProjectionError(RuntimeError):
    """A ray does not meet the requested Nehari branch exactly once."""


class SolverError(RuntimeError):
    """The two-solution solve failed one of its posterior checks."""


@dataclass(frozen=True)
class FiberingRoot:
    t: float
    psi2: float          # psi_u''(t) at the root, unscaled
    branch: int          # +1 (psi''>band), -1 (psi''<-band), 0 inside the band


@dataclass(frozen=True)
class FiberingProfile:
    """Sampled ray maps plus the classified critical points."""

    t: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    d2psi: np.ndarray
    roots: tuple[FiberingRoot, ...]

    def roots_on(self, branch: int) -> tuple[FiberingRoot, ...]:
        return tuple(r for r in self.roots if r.branch == branch)

    @property
    def n_roots(self) -> int:
        return len(self.roots)


def _classify(ev: FiberingEvaluator, t: float, class_band: float) -> FiberingRoot:
    psi2 = ev.d2psi(t)
    band = class_band * (1.0 + ev.d2psi_scale(t))
    branch = 0 if abs(psi2) <= band else (1 if psi2 > 0 else -1)
    return FiberingRoot(t=float(t), psi2=float(psi2), branch=branch)


def _bisect_then_newton(ev: FiberingEvaluator, lo: float, hi: float,
                        f_lo: float, root_tol: float) -> float:
    """Refine a bracketed sign change of psi' to a near-machine root."""
    while hi - lo > 1e-13 * hi:
        mid = 0.5 * (lo + hi)
        f_mid = ev.dpsi(mid)
        if abs(f_mid) <= root_tol * ev.dpsi_scale(mid):
            lo = hi = mid
            break
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    for _ in range(6):
        d2 = ev.d2psi(t)
        if d2 == 0.0:
            break
        t_new = t - ev.dpsi(t) / d2
        if not (0.5 * t <= t_new <= 2.0 * t) or t_new <= 0:
            break
        if abs(t_new - t) <= 1e-16 * t:
            t = t_new
            break
        t = t_new
    return t


def find_fibering_roots(problem: Problem, u: FeFunction,
                        t_min: float = DEFAULT_T_MIN, t_max: float = DEFAULT_T_MAX,
                        n_scan: int = DEFAULT_N_SCAN,
                        root_tol: float = DEFAULT_ROOT_TOL,
                        class_band: float = DEFAULT_CLASS_BAND) -> FiberingProfile:
    """Scan psi_u' on a log grid, bracket, refine and classify every root."""
    if not 0 < t_min < t_max:
        raise ValueError("need 0 < t_min < t_max")
    ev = FiberingEvaluator(problem, u)
    ts = np.geomspace(t_min, t_max, n_scan)
    dps = np.array([ev.dpsi(t) for t in ts])
    psis = np.array([ev.psi(t) for t in ts])
    d2ps = np.array([ev.d2psi(t) for t in ts])

    roots: list[FiberingRoot] = []
    for i in range(n_scan - 1):
        a, b = dps[i], dps[i + 1]
        if a == 0.0:
            roots.append(_classify(ev, ts[i], class_band))
        elif a * b < 0.0:
            t = _bisect_then_newton(ev, ts[i], ts[i + 1], a, root_tol)
            roots.append(_classify(ev, t, class_band))
    if dps[-1] == 0.0:
        roots.append(_classify(ev, ts[-1], class_band))
    roots.sort(key=lambda r: r.t)
    return FiberingProfile(ts, psis, dps, d2ps, tuple(roots))


@dataclass(frozen=True)
class NehariPoint:
    """A function on one Nehari branch, stored after rescaling to t = 1."""

    u: FeFunction
    t_root: float        # the ray parameter that produced it
    branch: int
    psi2: float          # psi''(1) at the rescaled point
    energy: float

    def norm(self, problem: Problem) -> float:
        return gradient_norm(problem.nf, self.u)


def project_to_nehari(problem: Problem, u: FeFunction, branch: int,
                      **scan_opts) -> NehariPoint:
    """Rescale u onto the requested branch (+1 or -1) of the manifold.

    Errors out unless the ray through u meets the branch exactly once, which
    is the expected picture for admissible parameters and small lambda.
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    profile = find_fibering_roots(problem, u, **scan_opts)
    cand = profile.roots_on(branch)
    if len(cand) != 1:
        raise ProjectionError(
            f"expected 1 root on branch {branch:+d}, found {len(cand)} "
            f"(lambda={problem.lam:g}, {profile.n_roots} roots total)")
    t = cand[0].t
    ev = FiberingEvaluator(problem, u)
    u_new = FeFunction(problem.mesh, t * u.values, enforce_boundary=False)
    return NehariPoint(u=u_new, t_root=t, branch=branch,
                       psi2=t * t * cand[0].psi2, energy=ev.psi(t))


def _newton_reproject(problem: Problem, w: FeFunction, branch: int,
                      t_init: float = 1.0,
                      root_tol: float = DEFAULT_ROOT_TOL,
                      class_band: float = DEFAULT_CLASS_BAND):
    """Fast reprojection for the descent loop: Newton in t from t_init.

    Returns (t, psi2_scaled, energy, evaluator) or None when Newton leaves
    its safeguard window or lands on the wrong branch; callers then fall
    back to the full scan.
    """
    ev = FiberingEvaluator(problem, w)
    t = float(t_init)
    for _ in range(40):
        f = ev.dpsi(t)
        scale = ev.dpsi_scale(t)
        if abs(f) <= root_tol * scale:
            d2 = ev.d2psi(t)
            band = class_band * (1.0 + ev.d2psi_scale(t))
            if abs(d2) <= band or (d2 > 0) != (branch > 0):
                return None
            # one extra polish step tightens |psi'| to near machine level
            t_pol = t - f / d2
            if 0.5 * t <= t_pol <= 2.0 * t:
                t = t_pol
                d2 = ev.d2psi(t)
            return t, t * t * d2, ev.psi(t), ev
        d2 = ev.d2psi(t)
        if d2 == 0.0 or not np.isfinite(d2):
            return None
        t_new = t - f / d2
        if not np.isfinite(t_new):
            return None
        # keep steps inside a multiplicative trust window
        t_new = min(max(t_new, 0.3 * t), 3.0 * t)
        if not DEFAULT_T_MIN <= t_new <= DEFAULT_T_MAX:
            return None
        if abs(t_new - t) <= 1e-16 * t:
            t = t_new
            break
        t = t_new
    f = ev.dpsi(t)
    if abs(f) <= root_tol * ev.dpsi_scale(t):
        d2 = ev.d2psi(t)
        band = class_band * (1.0 + ev.d2psi_scale(t))
        if abs(d2) > band and (d2 > 0) == (branch > 0):
            return t, t * t * d2, ev.psi(t), ev
    return None


def _reproject(problem: Problem, w: FeFunction, branch: int, t_init: float):
    got = _newton_reproject(problem, w, branch, t_init)
    if got is not None:
        return got
    try:
        pt = project_to_nehari(problem, w, branch)
    except ProjectionError:
        return None
    ev = FiberingEvaluator(problem, w)
    return pt.t_root, pt.psi2, pt.energy, ev


@dataclass
class MinimizeInfo:
    iterations: int = 0
    converged: bool = False
    stagnated: bool = False
    residual0: float = np.nan
    residual: float = np.nan
    rejected_steps: int = 0
    energy: float = np.nan


def _lumped_mass(mesh: Mesh) -> np.ndarray:
    out = np.zeros(mesh.n_vertices)
    per_node = np.einsum("cq,qk->ck", mesh.qw, mesh.qbary)
    np.add.at(out, mesh.cells, per_node)
    return out


def minimize_on_nehari(problem: Problem, branch: int,
                       u0: FeFunction | None = None,
                       max_iter: int = 20000, tol: float = 1e-12,
                       armijo: float = 1e-4, max_halvings: int = 30,
                       residual_target: float | None = None,
                       mass_scaled: bool = False):
    """Projected gradient descent for J over one Nehari branch.

    Steps: descend along the nodal gradient of J, take absolute values
    (evenness keeps this admissible), re-project onto the branch, accept on
    an Armijo-style decrease (parameter ``armijo``) and halve the step
    otherwise, at most ``max_halvings`` times.  Stops when the relative
    energy decrease stays below ``tol`` for five accepted iterations, when
    the interior residual has dropped below ``residual_target`` times its
    starting value, or at ``max_iter``.

    Returns (NehariPoint, MinimizeInfo); the point's nodal values are
    nonnegative and its branch classification is re-verified at the end.
    """
    mesh = problem.mesh
    if u0 is None:
        u0 = sine_mode(mesh)
    w0 = abs(u0)
    start = project_to_nehari(problem, w0, branch)
    u = start.u
    J_cur = start.energy

    info = MinimizeInfo()
    mass = _lumped_mass(mesh) if mass_scaled else None
    step = 1.0
    flat_streak = 0

    r = grad_J(problem, u)
    res = float(np.linalg.norm(r[mesh.interior]))
    info.residual0 = res

    for it in range(max_iter):
        info.iterations = it + 1
        if residual_target is not None and res <= residual_target * info.residual0:
            info.converged = True
            break
        direction = r / mass if mass_scaled else r
        decrease_ref = float(np.dot(r[mesh.interior], direction[mesh.interior]))

        accepted = None
        for _ in range(max_halvings + 1):
            cand_vals = np.abs(u.values - step * direction)
            cand_vals[mesh.boundary] = 0.0
            if not np.any(cand_vals):
                step *= 0.5
                info.rejected_steps += 1
                continue
            cand = FeFunction(mesh, cand_vals, enforce_boundary=False)
            got = _reproject(problem, cand, branch, t_init=1.0)
            if got is None:
                step *= 0.5
                info.rejected_steps += 1
                continue
            t_root, psi2, J_new, _ = got
            if J_new <= J_cur - armijo * step * decrease_ref:
                accepted = (cand, t_root, J_new)
                break
            step *= 0.5
            info.rejected_steps += 1
        if accepted is None:
            info.stagnated = True
            break

        cand, t_root, J_new = accepted
        u = FeFunction(mesh, t_root * cand.values, enforce_boundary=False)
        rel_drop = (J_cur - J_new) / max(abs(J_new), 1e-300)
        J_cur = J_new
        step *= 1.5

        r = grad_J(problem, u)
        res = float(np.linalg.norm(r[mesh.interior]))

        flat_streak = flat_streak + 1 if rel_drop < tol else 0
        if flat_streak >= 5 and residual_target is None:
            info.converged = True
            break

    info.residual = res
    info.energy = J_cur
    ev = FiberingEvaluator(problem, u)
    point = NehariPoint(u=u, t_root=1.0, branch=branch,
                        psi2=ev.d2psi(1.0), energy=J_cur)
    return point, info


# ----------------------------------------------------------------------
# diagnostics, full solve, lambda scan, probes
# ----------------------------------------------------------------------

def _scan_with_retry(problem: Problem, w: FeFunction,
                     scan_opts: dict) -> FiberingProfile:
    """Root scan that widens the t window once when a branch is missing.

    The plus root scales like a positive power of lambda and slides below
    the default window as lambda shrinks; theory puts exactly one root on
    each branch for small lambda, so a missing branch at the default window
    is retried on a wider one before being reported as data.
    """
    profile = find_fibering_roots(problem, w, **scan_opts)
    have_plus = any(r.branch == 1 for r in profile.roots)
    have_minus = any(r.branch == -1 for r in profile.roots)
    if have_plus and have_minus:
        return profile
    t_min = scan_opts.get("t_min", DEFAULT_T_MIN)
    t_max = scan_opts.get("t_max", DEFAULT_T_MAX)
    n_scan = scan_opts.get("n_scan", DEFAULT_N_SCAN)
    per_decade = n_scan / np.log10(t_max / t_min)
    if not have_plus:
        t_min *= 1e-9
    if not have_minus:
        t_max *= 1e3
    opts = dict(scan_opts)
    opts.update(t_min=t_min, t_max=t_max,
                n_scan=int(np.ceil(per_decade * np.log10(t_max / t_min))))
    return find_fibering_roots(problem, w, **opts)


@dataclass(frozen=True)
class NehariDiagnostics:
    """Branch geometry sampled over random positive directions at one lambda."""

    d1: float            # largest norm seen on the plus branch
    d2: float            # smallest norm seen on the minus branch
    sigma: float         # smallest minus-branch energy (should be positive)
    n_directions: int
    all_rays_clean: bool  # every ray: exactly two roots, +1 then -1, no N0
    root_histogram: dict


def nehari_diagnostics(problem: Problem, n_directions: int = 10,
                       seed: int = 0, **scan_opts) -> NehariDiagnostics:
    rng = np.random.default_rng(seed)
    d1, d2, sigma = -np.inf, np.inf, np.inf
    clean = True
    hist: dict[int, int] = {}
    for _ in range(n_directions):
        w = random_fe_function(problem.mesh, rng, kind="positive")
        profile = _scan_with_retry(problem, w, scan_opts)
        hist[profile.n_roots] = hist.get(profile.n_roots, 0) + 1
        plus = profile.roots_on(1)
        minus = profile.roots_on(-1)
        ray_ok = (profile.n_roots == 2 and len(plus) == 1 and len(minus) == 1
                  and plus[0].t < minus[0].t)
        clean = clean and ray_ok
        norm_w = gradient_norm(problem.nf, w)
        ev = FiberingEvaluator(problem, w)
        if plus:
            d1 = max(d1, plus[0].t * norm_w)
        if minus:
            d2 = min(d2, minus[0].t * norm_w)
            sigma = min(sigma, ev.psi(minus[0].t))
    return NehariDiagnostics(d1=float(d1), d2=float(d2), sigma=float(sigma),
                             n_directions=n_directions, all_rays_clean=clean,
                             root_histogram=hist)


@dataclass(frozen=True)
class BranchResult:
    point: NehariPoint
    info: MinimizeInfo
    residual_rel: float
    min_interior_value: float


@dataclass(frozen=True)
class SolveReport:
    """Everything the two-solution solve produced, JSON-serializable."""

    hypothesis: HypothesisReport
    overridden: bool
    plus: BranchResult
    minus: BranchResult
    diagnostics: NehariDiagnostics
    seed: int
    success: bool
    failures: tuple[str, ...]

    def as_dict(self, problem: Problem) -> dict:
        def branch_dict(br: BranchResult) -> dict:
            return {
                "energy": br.point.energy,
                "psi2": br.point.psi2,
                "branch": br.point.branch,
                "residual_rel": br.residual_rel,
                "residual": br.info.residual,
                "residual0": br.info.residual0,
                "iterations": br.info.iterations,
                "converged": br.info.converged,
                "stagnated": br.info.stagnated,
                "min_interior_value": br.min_interior_value,
                "norm": br.point.norm(problem),
            }

        return {
            "problem": problem.summary(),
            "hypotheses": self.hypothesis.as_dict(),
            "hypotheses_overridden": self.overridden,
            "plus_branch": branch_dict(self.plus),
            "minus_branch": branch_dict(self.minus),
            "diagnostics": {
                "d1": self.diagnostics.d1,
                "d2": self.diagnostics.d2,
                "sigma": self.diagnostics.sigma,
                "n_directions": self.diagnostics.n_directions,
                "all_rays_clean": self.diagnostics.all_rays_clean,
                "root_histogram": {str(k): v for k, v in
                                   sorted(self.diagnostics.root_histogram.items())},
            },
            "seed": self.seed,
            "success": self.success,
            "failures": list(self.failures),
        }


def solve_two_solutions(problem: Problem, seed: int = 0,
                        override_hypotheses: bool = False,
                        residual_rel_tol: float = 1e-6,
                        max_iter: int = 30000, tol: float = 1e-13,
                        n_directions: int = 10,
                        u0: FeFunction | None = None,
                        mass_scaled: bool = False) -> SolveReport:
    """Find the small negative-energy and the large positive-energy solution.

    Refuses problems failing the hypothesis audit unless overridden.  The
    returned report carries residuals relative to the starting gradient
    scale, interior positivity, branch energies and D1/D2/sigma diagnostics;
    ``success`` summarizes all posterior checks.
    """
    audit = check_hypotheses(problem)
    if not audit.all_ok and not override_hypotheses:
        raise HypothesisError(
            "hypothesis audit failed: " + "; ".join(audit.notes))

    if u0 is None:
        u0 = sine_mode(problem.mesh)

    branches = {}
    for branch in (1, -1):
        point, info = minimize_on_nehari(
            problem, branch, u0=u0, max_iter=max_iter, tol=tol,
            residual_target=residual_rel_tol, mass_scaled=mass_scaled)
        rel = info.residual / info.residual0 if info.residual0 > 0 else np.inf
        interior_min = float(point.u.values[problem.mesh.interior].min())
        branches[branch] = BranchResult(point, info, float(rel), interior_min)

    diag = nehari_diagnostics(problem, n_directions=n_directions, seed=seed)

    plus, minus = branches[1], branches[-1]
    failures: list[str] = []
    if not plus.point.energy < 0:
        failures.append(f"plus-branch energy {plus.point.energy:g} not negative")
    if not minus.point.energy > 0:
        failures.append(f"minus-branch energy {minus.point.energy:g} not positive")
    for name, br in (("plus", plus), ("minus", minus)):
        if not br.residual_rel <= residual_rel_tol:
            failures.append(f"{name}-branch residual {br.residual_rel:.3e} "
                            f"above {residual_rel_tol:g}")
        if not br.min_interior_value > 0:
            failures.append(f"{name}-branch solution not positive inside")
    if not plus.point.psi2 > 0:
        failures.append("plus-branch curvature not positive")
    if not minus.point.psi2 < 0:
        failures.append("minus-branch curvature not negative")

    return SolveReport(hypothesis=audit, overridden=not audit.all_ok,
                       plus=plus, minus=minus, diagnostics=diag, seed=seed,
                       success=not failures, failures=tuple(failures))


@dataclass(frozen=True)
class ScanRow:
    lam: float
    direction: int
    n_roots: int
    t_plus: float
    t_minus: float
    norm_plus: float
    norm_minus: float
    energy_minus: float


@dataclass(frozen=True)
class ScanResult:
    rows: tuple[ScanRow, ...]
    per_lambda: tuple[dict, ...]
    lambda_empirical: float | None
    n_directions: int
    seed: int


def lambda_scan(problem: Problem, lambdas, n_directions: int = 10,
                seed: int = 0, **scan_opts) -> ScanResult:
    """Root structure across a lambda grid with a fixed direction sample.

    For every lambda and every direction the ray is scanned for roots; a
    lambda counts as fully successful when every ray shows exactly one plus
    root below one minus root and nothing degenerate.  ``lambda_empirical``
    is the largest fully successful lambda.
    """
    lambdas = sorted(float(l) for l in lambdas)
    if not lambdas:
        raise ValueError("lambda grid is empty")
    if lambdas[0] <= 0:
        raise ValueError("lambda grid must be positive")
    rng = np.random.default_rng(seed)
    directions = [random_fe_function(problem.mesh, rng, kind="positive")
                  for _ in range(n_directions)]
    norms = [gradient_norm(problem.nf, w) for w in directions]

    rows: list[ScanRow] = []
    per_lambda: list[dict] = []
    lambda_empirical = None
    for lam in lambdas:
        prob_l = problem.with_lambda(lam)
        d1, d2, sigma = -np.inf, np.inf, np.inf
        all_ok = True
        for j, w in enumerate(directions):
            profile = _scan_with_retry(prob_l, w, scan_opts)
            plus = profile.roots_on(1)
            minus = profile.roots_on(-1)
            ok = (profile.n_roots == 2 and len(plus) == 1 and len(minus) == 1
                  and plus[0].t < minus[0].t)
            all_ok = all_ok and ok
            tp = plus[0].t if len(plus) == 1 else np.nan
            tm = minus[0].t if len(minus) == 1 else np.nan
            e_minus = np.nan
            if len(minus) == 1:
                e_minus = FiberingEvaluator(prob_l, w).psi(tm)
                d2 = min(d2, tm * norms[j])
                sigma = min(sigma, e_minus)
            if len(plus) == 1:
                d1 = max(d1, tp * norms[j])
            rows.append(ScanRow(lam, j, profile.n_roots, tp, tm,
                                tp * norms[j] if np.isfinite(tp) else np.nan,
                                tm * norms[j] if np.isfinite(tm) else np.nan,
                                e_minus))
        per_lambda.append({"lambda": lam, "d1": float(d1), "d2": float(d2),
                           "sigma": float(sigma), "all_ok": bool(all_ok)})
        if all_ok:
            lambda_empirical = lam
    return ScanResult(tuple(rows), tuple(per_lambda), lambda_empirical,
                      n_directions, seed)


@dataclass(frozen=True)
class ProbeReport:
    branch: int
    n_probes: int
    violations: int
    skipped: int
    worst_gap: float          # most negative J(probe) - J(u) seen (0 if none)
    ray_is_local_max: bool | None  # minus branch: psi decreases both ways


def local_minimality_probe(problem: Problem, point: NehariPoint,
                           n_probes: int = 100, seed: int = 0,
                           rel_radius: float = 1e-3,
                           slack: float = 1e-10) -> ProbeReport:
    """Check the variational character of a solution by random perturbation.

    Plus branch: J(u + h) >= J(u) - slack for random small h (a genuine
    local minimum).  Minus branch: along the ray J strictly drops both ways,
    while along re-projected transverse perturbations J does not drop.
    """
    rng = np.random.default_rng(seed)
    u = point.u
    J_u = point.energy
    norm_u = gradient_norm(problem.nf, u)
    allowance = slack * (1.0 + abs(J_u))
    violations = skipped = 0
    worst = 0.0

    ray_ok = None
    if point.branch == -1:
        ev = FiberingEvaluator(problem, u)
        delta = 1e-3
        ray_ok = (ev.psi(1.0 - delta) < J_u and ev.psi(1.0 + delta) < J_u)

    for _ in range(n_probes):
        h = random_fe_function(problem.mesh, rng, kind="smooth")
        nh = gradient_norm(problem.nf, h)
        if nh == 0.0:
            skipped += 1
            continue
        h = (rel_radius * norm_u / nh) * h
        if point.branch == 1:
            J_probe = energy_value(problem, u + h)
        else:
            got = _reproject(problem, u + h, -1, t_init=1.0)
            if got is None:
                skipped += 1
                continue
            J_probe = got[2]
        gap = J_probe - J_u
        if gap < -allowance:
            violations += 1
            worst = min(worst, gap)
    return ProbeReport(branch=point.branch, n_probes=n_probes,
                       violations=violations, skipped=skipped,
                       worst_gap=float(worst), ray_is_local_max=ray_ok)


def profile_to_rows(profile: FiberingProfile):
    """(t, psi, dpsi, d2psi) rows for CSV export."""
    return np.column_stack([profile.t, profile.psi, profile.dpsi, profile.d2psi])


def solution_to_rows(mesh: Mesh, u: FeFunction):
    """(vertex coordinates..., nodal value) rows for CSV export."""
    return np.column_stack([mesh.vertices, u.values])
