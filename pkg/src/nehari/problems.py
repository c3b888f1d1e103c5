"""Problem data: Kirchhoff coefficient, reaction terms, hypothesis audit.

A problem instance bundles

* a generalized N-function ``H`` (see :mod:`nehari.nfunctions`),
* a nondecreasing Kirchhoff coefficient ``m > 0`` with primitive ``M``,
* a singular reaction ``f`` (built-in ``f(s) = s^-gamma``, 0 <= gamma < 1)
  and a superlinear reaction ``g`` (built-in ``g(s) = s^(r-1)``),
* the singular weight ``lambda > 0`` and a mesh.

Both reactions act through their odd extensions, with ``f(0) := 0`` and
``f'(0) := 0``.  The audit in :func:`check_hypotheses` verifies the standing
assumptions numerically:

* m positive and nondecreasing, with indices
  eta = sup s m'/m and theta = sup s m/M (so 1 <= theta <= eta + 1),
* 1 < p_idx, q_idx < p*, 0 < l_minus <= l_plus < inf,
* gamma in (1 - p_idx, 1) with f bounded away from zero near 0,
* 1 < r_minus <= r_plus < p*,
* the coupling q_idx * eta + l_plus < r_minus - 1, which forces the
  superlinear chain r_minus > q(eta+1) >= q*theta >= q >= p.

Solvers refuse problems that fail the audit unless explicitly overridden.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .meshing import Mesh
from .nfunctions import (DEFAULT_X_SAMPLES, IndexReport, LOG_KINDS, NFunction,
                         estimate_indices)

CLAMP_FLOOR = 1e-12

KIRCHHOFF_CONSTANT = "constant"
KIRCHHOFF_AFFINE_POWER = "affine_power"
KIRCHHOFF_CUSTOM = "custom"


class HypothesisError(RuntimeError):
    """A problem failed its hypothesis audit and no override was given."""


class Kirchhoff:
    """Kirchhoff coefficient m(s) with primitive M(s) = int_0^s m.

    Built-ins: ``constant(a)`` and ``affine_power(a, b, eta)`` for
    m(s) = a + b*s^eta with closed-form M.  Custom coefficients supply
    callbacks for m and m'; M then falls back to adaptive quadrature
    (absolute/relative tolerance 1e-12).
    """

    def __init__(self, kind, a=0.0, b=0.0, eta_exp=1.0, m=None, mp=None, name=None):
        self.kind = kind
        self.a = float(a)
        self.b = float(b)
        self.eta_exp = float(eta_exp)
        self._m = m
        self._mp = mp
        self.name = name or kind
        if kind == KIRCHHOFF_AFFINE_POWER and self.eta_exp <= 0 and self.b != 0:
            raise ValueError("affine_power needs a positive exponent")
        if kind in (KIRCHHOFF_CONSTANT, KIRCHHOFF_AFFINE_POWER):
            if self.a < 0 or self.b < 0 or (self.a == 0 and self.b == 0):
                raise ValueError("need a, b >= 0 with a + b > 0")
        if kind == KIRCHHOFF_CUSTOM and (m is None or mp is None):
            raise ValueError("custom Kirchhoff coefficient needs m and m'")

    @classmethod
    def constant(cls, a: float) -> "Kirchhoff":
        return cls(KIRCHHOFF_CONSTANT, a=a, name=f"m={a}")

    @classmethod
    def affine_power(cls, a: float, b: float, eta_exp: float = 1.0) -> "Kirchhoff":
        return cls(KIRCHHOFF_AFFINE_POWER, a=a, b=b, eta_exp=eta_exp,
                   name=f"m={a}+{b}*s^{eta_exp}")

    @classmethod
    def custom(cls, m: Callable, mp: Callable, name: str = "custom m") -> "Kirchhoff":
        return cls(KIRCHHOFF_CUSTOM, m=m, mp=mp, name=name)

    def m(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == KIRCHHOFF_CONSTANT:
            return np.broadcast_to(self.a, s.shape).copy() if s.ndim else self.a
        if self.kind == KIRCHHOFF_AFFINE_POWER:
            return self.a + self.b * s ** self.eta_exp
        return np.asarray(self._m(s), dtype=float)

    def mp(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == KIRCHHOFF_CONSTANT:
            return np.zeros(s.shape) if s.ndim else 0.0
        if self.kind == KIRCHHOFF_AFFINE_POWER:
            if self.b == 0.0:
                return np.zeros(s.shape) if s.ndim else 0.0
            return self.b * self.eta_exp * s ** (self.eta_exp - 1.0)
        return np.asarray(self._mp(s), dtype=float)

    def M(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == KIRCHHOFF_CONSTANT:
            return self.a * s
        if self.kind == KIRCHHOFF_AFFINE_POWER:
            e1 = self.eta_exp + 1.0
            return self.a * s + self.b * s ** e1 / e1
        from scipy.integrate import quad
        scalar = s.ndim == 0
        flat = np.atleast_1d(s).ravel()
        out = np.empty(flat.size)
        for i, si in enumerate(flat):
            out[i] = quad(lambda t: float(self._m(np.array(t))), 0.0, si,
                          epsabs=1e-12, epsrel=1e-12, limit=200)[0]
        return float(out[0]) if scalar else out.reshape(np.shape(s))

    def __repr__(self):
        return f"Kirchhoff({self.name})"


def estimate_eta_theta(kir: Kirchhoff, s_grid: np.ndarray | None = None):
    """(eta, theta) = (sup s m'/m, sup s m/M) over a log grid.

    Closed forms for the whole affine-power family m = a + b*s^e: constant
    m -> (0, 1); otherwise (e, e + 1).  Both ratios increase monotonically
    in s with limits e and e + 1, so these are the exact suprema; a grid
    supremum would undershoot them by the saturation error at the grid end.
    Custom coefficients use the grid supremum.
    """
    if kir.kind == KIRCHHOFF_CONSTANT or (kir.kind == KIRCHHOFF_AFFINE_POWER and kir.b == 0.0):
        return 0.0, 1.0
    if kir.kind == KIRCHHOFF_AFFINE_POWER:
        return kir.eta_exp, kir.eta_exp + 1.0
    if s_grid is None:
        s_grid = np.geomspace(1e-6, 1e6, 2001)
    s_grid = np.asarray(s_grid, dtype=float)
    m = kir.m(s_grid)
    mp = kir.mp(s_grid)
    M = kir.M(s_grid)
    if np.any(m <= 0):
        raise ValueError("m must be positive on (0, inf)")
    eta = float(np.max(s_grid * mp / m))
    theta = float(np.max(s_grid * m / M))
    return eta, theta


# ----------------------------------------------------------------------
# reactions
# ----------------------------------------------------------------------

class Reactions:
    """Singular term f and superlinear term g, acting via odd extensions.

    Built-in: ``powers(gamma, r)`` gives f(s) = s^-gamma, g(s) = s^(r-1)
    with primitives F(s) = s^(1-gamma)/(1-gamma), G(s) = s^r/r; all the
    energy integrands then exist in algebraically combined form and no
    division by small u ever happens.  Custom callbacks (f, fp, F) and
    (g, gp, G) take s >= 0; before evaluation |u| is clamped below
    ``CLAMP_FLOOR`` and each clamp is counted in ``clamp_events``.
    """

    def __init__(self, gamma=None, r=None, f=None, fp=None, F=None,
                 g=None, gp=None, G=None):
        self.gamma = None if gamma is None else float(gamma)
        self.r = None if r is None else float(r)
        self._f, self._fp, self._F = f, fp, F
        self._g, self._gp, self._G = g, gp, G
        self.clamp_events = 0
        if self.is_power_f:
            if not 0.0 <= self.gamma < 1.0:
                raise ValueError(f"need 0 <= gamma < 1, got {self.gamma}")
            self.gamma_minus = self.gamma_plus = self.gamma
        else:
            if any(c is None for c in (f, fp, F)):
                raise ValueError("custom singular term needs (f, fp, F)")
            self.gamma_minus, self.gamma_plus = self._estimate_f_indices()
        if self.is_power_g:
            if not self.r > 1.0:
                raise ValueError(f"need r > 1, got {self.r}")
            self.r_minus = self.r_plus = self.r
        else:
            if any(c is None for c in (g, gp, G)):
                raise ValueError("custom superlinear term needs (g, gp, G)")
            self.r_minus, self.r_plus = self._estimate_g_indices()

    @property
    def is_power_f(self) -> bool:
        return self.gamma is not None and self._f is None

    @property
    def is_power_g(self) -> bool:
        return self.r is not None and self._g is None

    @classmethod
    def powers(cls, gamma: float, r: float) -> "Reactions":
        return cls(gamma=gamma, r=r)

    def _estimate_f_indices(self):
        s = np.geomspace(1e-6, 1e6, 2001)
        fv = np.asarray(self._f(s), dtype=float)
        fpv = np.asarray(self._fp(s), dtype=float)
        if np.any(fv <= 0):
            raise ValueError("custom f must be positive on (0, inf)")
        ratio = -s * fpv / fv
        return float(ratio.min()), float(ratio.max())

    def _estimate_g_indices(self):
        s = np.geomspace(1e-6, 1e6, 2001)
        gv = np.asarray(self._g(s), dtype=float)
        gpv = np.asarray(self._gp(s), dtype=float)
        if np.any(gv <= 0):
            raise ValueError("custom g must be positive on (0, inf)")
        ratio = 1.0 + s * gpv / gv
        return float(ratio.min()), float(ratio.max())

    def _clamped(self, s):
        clamped = np.maximum(s, CLAMP_FLOOR)
        n = int(np.count_nonzero((s < CLAMP_FLOOR) & (s > 0)))
        if n:
            self.clamp_events += n
        return clamped

    # All take s = |u| >= 0 (odd extension handled by the caller's signs).

    def f_abs(self, s):
        """f(|u|) with f(0) := 0."""
        s = np.asarray(s, dtype=float)
        if self.is_power_f:
            with np.errstate(divide="ignore"):
                return np.where(s > 0, s ** (-self.gamma), 0.0)
        out = np.zeros(s.shape)
        pos = s > 0
        out[pos] = np.asarray(self._f(self._clamped(s[pos])), dtype=float)
        return out

    def f_abs_s(self, s):
        """f(|u|) * |u| in combined form (the fibering integrand)."""
        s = np.asarray(s, dtype=float)
        if self.is_power_f:
            return s ** (1.0 - self.gamma)
        return self.f_abs(s) * s

    def fp_abs_s2(self, s):
        """f'(|u|) * u^2 in combined form, with f'(0) := 0."""
        s = np.asarray(s, dtype=float)
        if self.is_power_f:
            return -self.gamma * s ** (1.0 - self.gamma)
        out = np.zeros(s.shape)
        pos = s > 0
        out[pos] = np.asarray(self._fp(self._clamped(s[pos])), dtype=float) * s[pos] ** 2
        return out

    def F_abs(self, s):
        s = np.asarray(s, dtype=float)
        if self.is_power_f:
            return s ** (1.0 - self.gamma) / (1.0 - self.gamma)
        return np.asarray(self._F(s), dtype=float)

    def g_abs(self, s):
        s = np.asarray(s, dtype=float)
        if self.is_power_g:
            return s ** (self.r - 1.0)
        return np.asarray(self._g(s), dtype=float)

    def g_abs_s(self, s):
        s = np.asarray(s, dtype=float)
        if self.is_power_g:
            return s ** self.r
        return self.g_abs(s) * s

    def gp_abs_s2(self, s):
        s = np.asarray(s, dtype=float)
        if self.is_power_g:
            return (self.r - 1.0) * s ** self.r
        return np.asarray(self._gp(s), dtype=float) * s ** 2

    def G_abs(self, s):
        s = np.asarray(s, dtype=float)
        if self.is_power_g:
            return s ** self.r / self.r
        return np.asarray(self._G(s), dtype=float)

    def liminf_f_near_zero(self):
        """(value, certified) lower bound of f near 0+."""
        if self.is_power_f:
            return (1.0 if self.gamma == 0.0 else np.inf), True
        s = np.geomspace(1e-9, 1e-3, 200)
        return float(np.min(np.asarray(self._f(s), dtype=float))), False

    def __repr__(self):
        fdesc = f"s^-{self.gamma}" if self.is_power_f else "custom f"
        gdesc = f"s^{self.r - 1}" if self.is_power_g else "custom g"
        return f"Reactions(f={fdesc}, g={gdesc})"


# ----------------------------------------------------------------------
# the assembled problem
# ----------------------------------------------------------------------

@dataclass
class Problem:
    """Full problem data plus derived constants and per-mesh caches."""

    nf: NFunction
    kirchhoff: Kirchhoff
    reactions: Reactions
    lam: float
    mesh: Mesh
    indices: IndexReport
    eta: float
    theta: float
    _mu_qp: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.mesh.dim

    @property
    def p_star(self) -> float:
        p, n = self.indices.p_idx, self.mesh.dim
        return n * p / (n - p) if p < n else np.inf

    def mu_qp(self) -> np.ndarray:
        if self._mu_qp is None:
            self._mu_qp = self.nf.mu_at(self.mesh.qp_flat).reshape(self.mesh.qw.shape)
        return self._mu_qp

    def with_lambda(self, lam: float) -> "Problem":
        return replace(self, lam=float(lam))

    def summary(self) -> dict:
        return {
            "operator": self.nf.name,
            "kirchhoff": self.kirchhoff.name,
            "reactions": repr(self.reactions),
            "lambda": self.lam,
            "mesh": repr(self.mesh),
            "indices": self.indices.as_dict(),
            "eta": self.eta,
            "theta": self.theta,
            "p_star": self.p_star if np.isfinite(self.p_star) else "unconstrained",
        }


def _mesh_x_samples(mesh: Mesh) -> np.ndarray:
    lo = mesh.vertices.min(axis=0)
    hi = mesh.vertices.max(axis=0)
    frac = DEFAULT_X_SAMPLES[:, :mesh.dim]
    return lo[None, :] + frac * (hi - lo)[None, :]


def build_problem(nf: NFunction, kirchhoff: Kirchhoff, reactions: Reactions,
                  lam: float, mesh: Mesh,
                  x_samples: np.ndarray | None = None) -> Problem:
    """Assemble a Problem, estimating indices and Kirchhoff constants."""
    if lam <= 0:
        raise ValueError(f"need lambda > 0, got {lam}")
    if x_samples is None:
        x_samples = _mesh_x_samples(mesh)
    indices = estimate_indices(nf, x_samples=x_samples)
    eta, theta = estimate_eta_theta(kirchhoff)
    return Problem(nf, kirchhoff, reactions, float(lam), mesh, indices, eta, theta)


@dataclass(frozen=True)
class HypothesisReport:
    """Numeric audit of the standing assumptions for one problem."""

    eta: float
    theta: float
    p_star: float
    gamma_minus: float
    gamma_plus: float
    r_minus: float
    r_plus: float
    ok_kirchhoff: bool
    ok_operator: bool
    ok_singular: bool
    ok_superlinear: bool
    ok_coupling: bool
    ok_chain: bool
    notes: tuple[str, ...] = ()

    @property
    def all_ok(self) -> bool:
        return (self.ok_kirchhoff and self.ok_operator and self.ok_singular
                and self.ok_superlinear and self.ok_coupling and self.ok_chain)

    def as_dict(self) -> dict:
        return {
            "eta": self.eta,
            "theta": self.theta,
            "p_star": self.p_star if np.isfinite(self.p_star) else "unconstrained",
            "gamma_minus": self.gamma_minus,
            "gamma_plus": self.gamma_plus,
            "r_minus": self.r_minus,
            "r_plus": self.r_plus,
            "kirchhoff_ok": self.ok_kirchhoff,
            "operator_ok": self.ok_operator,
            "singular_ok": self.ok_singular,
            "superlinear_ok": self.ok_superlinear,
            "coupling_ok": self.ok_coupling,
            "chain_ok": self.ok_chain,
            "all_ok": self.all_ok,
            "notes": list(self.notes),
        }


def check_hypotheses(problem: Problem) -> HypothesisReport:
    """Run the full numeric hypothesis audit for ``problem``."""
    idx = problem.indices
    rx = problem.reactions
    eta, theta = problem.eta, problem.theta
    p_star = problem.p_star
    notes: list[str] = []

    # Kirchhoff coefficient: positive, nondecreasing, sane indices.
    s = np.geomspace(1e-6, 1e6, 400)
    m_vals = problem.kirchhoff.m(s)
    mp_vals = problem.kirchhoff.mp(s)
    ok_kir = (bool(np.all(m_vals > 0))
              and bool(np.all(mp_vals >= -1e-12 * np.abs(m_vals)))
              and np.isfinite(eta) and eta >= 0.0
              and 1.0 - 1e-12 <= theta <= eta + 1.0 + 1e-12)
    if not ok_kir:
        notes.append("Kirchhoff coefficient fails positivity/monotonicity/index bounds")

    # Operator growth.
    ok_op = (idx.p_idx > 1.0 and idx.q_idx < p_star
             and idx.l_minus > 0.0 and np.isfinite(idx.l_plus))
    if problem.nf.kind in LOG_KINDS and idx.kappa is not None:
        if not problem.nf.q + idx.kappa < p_star:
            ok_op = False
            notes.append("q + kappa >= p_star for logarithmic operator")
    if not np.isfinite(p_star):
        notes.append("p_star unconstrained (p_idx >= dim)")
    if not ok_op:
        notes.append("operator growth indices out of range")

    # Singular reaction.
    liminf_f, certified = rx.liminf_f_near_zero()
    if not certified:
        notes.append("liminf of f near 0 sampled only (custom f)")
    ok_f = (liminf_f > 0.0
            and rx.gamma_minus > 1.0 - idx.p_idx
            and rx.gamma_plus < 1.0
            and rx.gamma_minus <= rx.gamma_plus)
    if not ok_f:
        notes.append("singular reaction indices out of range")

    # Superlinear reaction.
    ok_g = rx.r_minus > 1.0 and rx.r_plus < p_star and rx.r_minus <= rx.r_plus
    if not ok_g:
        notes.append("superlinear reaction indices out of range")

    # Coupling between operator, Kirchhoff and superlinear growth.
    coupling_lhs = idx.q_idx * eta + idx.l_plus
    ok_coupling = coupling_lhs < rx.r_minus - 1.0
    if not ok_coupling:
        notes.append(f"coupling fails: q_idx*eta + l_plus = {coupling_lhs:.6g} "
                     f">= r_minus - 1 = {rx.r_minus - 1.0:.6g}")

    # Superlinearity chain r- > q*eta + l+ + 1 >= q(eta+1) >= q*theta >= q >= p.
    q = idx.q_idx
    chain = (rx.r_minus > coupling_lhs + 1.0 if ok_coupling else False)
    chain = chain and (coupling_lhs + 1.0 >= q * (eta + 1.0) - 1e-12)
    chain = chain and (q * (eta + 1.0) >= q * theta - 1e-12)
    chain = chain and (q * theta >= q - 1e-12) and (q >= idx.p_idx)
    if not chain:
        notes.append("superlinearity chain violated")

    return HypothesisReport(
        eta=eta, theta=theta, p_star=p_star,
        gamma_minus=rx.gamma_minus, gamma_plus=rx.gamma_plus,
        r_minus=rx.r_minus, r_plus=rx.r_plus,
        ok_kirchhoff=bool(ok_kir), ok_operator=bool(ok_op),
        ok_singular=bool(ok_f), ok_superlinear=bool(ok_g),
        ok_coupling=bool(ok_coupling), ok_chain=bool(chain),
        notes=tuple(notes))
