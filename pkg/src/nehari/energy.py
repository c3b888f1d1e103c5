"""The energy functional, its gradient, and the fibering maps.

For a P1 function u with zero trace the energy is

    J(u) = M(phi(grad u)) - lambda * int F(u) - int G(u),

where ``phi`` is the gradient modular ``int H(x, |grad u|)`` and F, G are the
(even) primitives of the odd reaction extensions.  Everything the Nehari
machinery needs is a scalar function of one ray parameter:

    psi_u(t) = J(t u),
    psi_u'(t) = m(phi(t grad u)) int H_s(x, t|grad u|)|grad u|
                - lambda int f(t u) u - int g(t u) u,
    psi_u''(t) = m'(...) (int H_s(x, t|grad u|)|grad u|)^2
                 + m(...) int H_ss(x, t|grad u|)|grad u|^2
                 - lambda int f'(t u) u^2 - int g'(t u) u^2,

with the exact scaling relations psi_u(t) = psi_{tu}(1),
t psi_u'(t) = psi_{tu}'(1), t^2 psi_u''(t) = psi_{tu}''(1).

The radial bracket

    A = m(phi) int H_s(x, |xi|)|xi|,
    B = m'(phi) (int H_s |xi|)^2 + m(phi) int H_ss |xi|^2

obeys  p*M(phi) <= A <= q*theta*M(phi)  and  l- * A <= B <= (q*eta + l+) * A,
together with the envelope bound M(1) * env(||xi||) on M(phi); these are
exposed as executable checks at the bottom of the module.

All integrands involving the singular reaction are evaluated in combined
form (for built-ins, powers of |u| with nonnegative exponents), so no
division by a small u ever occurs; cells with vanishing gradient contribute
zero operator flux.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .meshing import FeFunction, integrate
from .modular import gradient_norm, luxemburg_norm, luxemburg_norm_of_field
from .nfunctions import CUSTOM, envelope_over, envelope_under
from .problems import Problem

_GRAD_FLOOR = 1e-280  # below this |grad u| the operator flux is exactly zero


@dataclass(frozen=True)
class EnergyBreakdown:
    """J split into its three parts; total = kirchhoff - singular - superlinear."""

    kirchhoff: float
    singular: float
    superlinear: float

    @property
    def total(self) -> float:
        return self.kirchhoff - self.singular - self.superlinear


def _h_field(problem: Problem, s):
    """H(x_q, s_q) over the quadrature layout; s broadcastable to (nc, nq)."""
    nf, mesh = problem.nf, problem.mesh
    s = np.broadcast_to(np.asarray(s, dtype=float), mesh.qw.shape)
    if nf.kind == CUSTOM:
        return nf.h(mesh.qp_flat, s.ravel()).reshape(mesh.qw.shape)
    return nf.h_mu(s, problem.mu_qp())


def _dh_field(problem: Problem, s):
    nf, mesh = problem.nf, problem.mesh
    s = np.broadcast_to(np.asarray(s, dtype=float), mesh.qw.shape)
    if nf.kind == CUSTOM:
        return nf.dh(mesh.qp_flat, s.ravel()).reshape(mesh.qw.shape)
    return nf.dh_mu(s, problem.mu_qp())


def _dh_s_field(problem: Problem, s):
    nf, mesh = problem.nf, problem.mesh
    s = np.broadcast_to(np.asarray(s, dtype=float), mesh.qw.shape)
    if nf.kind == CUSTOM:
        return nf.dh_s(mesh.qp_flat, s.ravel()).reshape(mesh.qw.shape)
    return nf.dh_s_mu(s, problem.mu_qp())


def _d2h_s2_field(problem: Problem, s):
    nf, mesh = problem.nf, problem.mesh
    s = np.broadcast_to(np.asarray(s, dtype=float), mesh.qw.shape)
    if nf.kind == CUSTOM:
        return nf.d2h_s2(mesh.qp_flat, s.ravel()).reshape(mesh.qw.shape)
    return nf.d2h_s2_mu(s, problem.mu_qp())


def phi_value(problem: Problem, u: FeFunction) -> float:
    """Gradient modular phi(grad u) = int H(x, |grad u|)."""
    gm = u.grad_mag()[:, None]
    return float(np.sum(problem.mesh.qw * _h_field(problem, gm)))


def energy(problem: Problem, u: FeFunction) -> EnergyBreakdown:
    """Evaluate J(u) split into Kirchhoff, singular and superlinear parts."""
    rx = problem.reactions
    mesh = problem.mesh
    au = np.abs(u.at_qp())
    kirchhoff = float(problem.kirchhoff.M(phi_value(problem, u)))
    singular = problem.lam * integrate(mesh, rx.F_abs(au))
    superlinear = integrate(mesh, rx.G_abs(au))
    return EnergyBreakdown(kirchhoff, singular, superlinear)


def energy_value(problem: Problem, u: FeFunction) -> float:
    return energy(problem, u).total


def _assemble(mesh, per_cell_node):
    out = np.zeros(mesh.n_vertices)
    np.add.at(out, mesh.cells, per_cell_node)
    out[mesh.boundary] = 0.0
    return out


def operator_apply(problem: Problem, u: FeFunction) -> np.ndarray:
    """Nodal pairing vector of the unscaled gradient operator.

    Entry i is  int H_s(x, |grad u|) (grad u / |grad u|) . grad phi_i  with
    the Kirchhoff factor left out; boundary rows are zero.  Cells with zero
    gradient contribute nothing.
    """
    mesh = problem.mesh
    gm = u.grad_mag()                                   # (nc,)
    dh = _dh_field(problem, gm[:, None])                # (nc, nq)
    wsum = np.sum(mesh.qw * dh, axis=1)                 # (nc,)
    safe = np.where(gm > _GRAD_FLOOR, gm, 1.0)
    coeff = np.where(gm > _GRAD_FLOOR, wsum / safe, 0.0)
    flux = coeff[:, None] * u.grad()                    # (nc, dim)
    per_node = np.einsum("cd,ckd->ck", flux, mesh.basis_grads)
    return _assemble(mesh, per_node)


def _reaction_load(problem: Problem, u: FeFunction) -> np.ndarray:
    """Nodal vector of  lambda*f(u) + g(u)  paired with the P1 basis."""
    mesh = problem.mesh
    rx = problem.reactions
    uq = u.at_qp()
    au = np.abs(uq)
    sgn = np.sign(uq)
    dens = sgn * (problem.lam * rx.f_abs(au) + rx.g_abs(au))
    per_node = np.einsum("cq,qk->ck", mesh.qw * dens, mesh.qbary)
    return _assemble(mesh, per_node)


def grad_J(problem: Problem, u: FeFunction) -> np.ndarray:
    """Nodal gradient of J at u (zero boundary rows).

    Pairing the result with the nodal values of u reproduces psi_u'(1)
    exactly at the quadrature level.  Rejects u = 0, where the singular
    term has no meaning.
    """
    if u.is_zero():
        raise ValueError("grad_J is undefined at u = 0 (singular reaction)")
    m_phi = float(problem.kirchhoff.m(phi_value(problem, u)))
    return m_phi * operator_apply(problem, u) - _reaction_load(problem, u)


def residual_norm(problem: Problem, u: FeFunction) -> float:
    """Euclidean norm of the interior rows of grad_J (the report's dual norm)."""
    r = grad_J(problem, u)
    return float(np.linalg.norm(r[problem.mesh.interior]))


# ----------------------------------------------------------------------
# the radial bracket A, B
# ----------------------------------------------------------------------

def kirchhoff_A(problem: Problem, mag) -> float:
    """A(xi) = m(phi(xi)) * int H_s(x, |xi|) |xi| for a magnitude field."""
    mesh = problem.mesh
    mag = np.asarray(mag, dtype=float)
    if mag.ndim == 1:
        mag = mag[:, None]
    phi = float(np.sum(mesh.qw * _h_field(problem, mag)))
    s1 = float(np.sum(mesh.qw * _dh_s_field(problem, mag)))
    return float(problem.kirchhoff.m(phi)) * s1


def kirchhoff_B(problem: Problem, mag) -> float:
    """B(xi) = m'(phi) (int H_s |xi|)^2 + m(phi) int H_ss |xi|^2."""
    mesh = problem.mesh
    mag = np.asarray(mag, dtype=float)
    if mag.ndim == 1:
        mag = mag[:, None]
    phi = float(np.sum(mesh.qw * _h_field(problem, mag)))
    s1 = float(np.sum(mesh.qw * _dh_s_field(problem, mag)))
    s2 = float(np.sum(mesh.qw * _d2h_s2_field(problem, mag)))
    kir = problem.kirchhoff
    return float(kir.mp(phi)) * s1 ** 2 + float(kir.m(phi)) * s2


# ----------------------------------------------------------------------
# fibering maps
# ----------------------------------------------------------------------

class FiberingEvaluator:
    """psi_u, psi_u', psi_u'' along the ray t -> t*u with cached fields.

    For built-in power reactions the two reaction integrals reduce to the
    scalars I_F = int |u|^(1-gamma), I_G = int |u|^r times powers of t, so a
    single construction pays for arbitrarily many t evaluations.
    """

    def __init__(self, problem: Problem, u: FeFunction):
        if u.is_zero():
            raise ValueError("fibering maps need u != 0")
        self.problem = problem
        self.mesh = problem.mesh
        self.rx = problem.reactions
        self.lam = problem.lam
        self.gm = u.grad_mag()[:, None]          # (nc, 1)
        self.au = np.abs(u.at_qp())              # (nc, nq)
        self.qw = self.mesh.qw
        if self.rx.is_power_f:
            self.I_F = float(np.sum(self.qw * self.au ** (1.0 - self.rx.gamma)))
        if self.rx.is_power_g:
            self.I_G = float(np.sum(self.qw * self.au ** self.rx.r))

    # -- kirchhoff side -------------------------------------------------

    def phi(self, t: float) -> float:
        return float(np.sum(self.qw * _h_field(self.problem, t * self.gm)))

    def _s1(self, t: float) -> float:
        """int H_s(x, t|grad u|) * t|grad u|  (equals t^2 * dphi_t/dt / t)."""
        return float(np.sum(self.qw * _dh_s_field(self.problem, t * self.gm)))

    def _s2(self, t: float) -> float:
        """int H_ss(x, t|grad u|) * (t|grad u|)^2."""
        return float(np.sum(self.qw * _d2h_s2_field(self.problem, t * self.gm)))

    # -- reaction side --------------------------------------------------

    def _F_int(self, t: float) -> float:
        if self.rx.is_power_f:
            return t ** (1.0 - self.rx.gamma) * self.I_F / (1.0 - self.rx.gamma)
        return float(np.sum(self.qw * self.rx.F_abs(t * self.au)))

    def _f_s(self, t: float) -> float:
        """int f(t u) u = (1/t) int f(t|u|) t|u|."""
        if self.rx.is_power_f:
            return t ** (-self.rx.gamma) * self.I_F
        return float(np.sum(self.qw * self.rx.f_abs_s(t * self.au))) / t

    def _fp_s2(self, t: float) -> float:
        """int f'(t u) u^2 = (1/t^2) int f'(t|u|)(t|u|)^2."""
        if self.rx.is_power_f:
            return -self.rx.gamma * t ** (-self.rx.gamma - 1.0) * self.I_F
        return float(np.sum(self.qw * self.rx.fp_abs_s2(t * self.au))) / t ** 2

    def _G_int(self, t: float) -> float:
        if self.rx.is_power_g:
            return t ** self.rx.r * self.I_G / self.rx.r
        return float(np.sum(self.qw * self.rx.G_abs(t * self.au)))

    def _g_s(self, t: float) -> float:
        if self.rx.is_power_g:
            return t ** (self.rx.r - 1.0) * self.I_G
        return float(np.sum(self.qw * self.rx.g_abs_s(t * self.au))) / t

    def _gp_s2(self, t: float) -> float:
        if self.rx.is_power_g:
            return (self.rx.r - 1.0) * t ** (self.rx.r - 2.0) * self.I_G
        return float(np.sum(self.qw * self.rx.gp_abs_s2(t * self.au))) / t ** 2

    # -- the maps --------------------------------------------------------

    def psi(self, t: float) -> float:
        t = self._check_t(t)
        return (float(self.problem.kirchhoff.M(self.phi(t)))
                - self.lam * self._F_int(t) - self._G_int(t))

    def dpsi(self, t: float) -> float:
        t = self._check_t(t)
        m = float(self.problem.kirchhoff.m(self.phi(t)))
        return m * self._s1(t) / t - self.lam * self._f_s(t) - self._g_s(t)

    def d2psi(self, t: float) -> float:
        t = self._check_t(t)
        kir = self.problem.kirchhoff
        phi_t = self.phi(t)
        s1 = self._s1(t) / t
        s2 = self._s2(t) / t ** 2
        return (float(kir.mp(phi_t)) * s1 ** 2 + float(kir.m(phi_t)) * s2
                - self.lam * self._fp_s2(t) - self._gp_s2(t))

    def dpsi_scale(self, t: float) -> float:
        """Sum of the magnitudes of the three terms of psi'(t)."""
        t = self._check_t(t)
        m = float(self.problem.kirchhoff.m(self.phi(t)))
        return (abs(m * self._s1(t) / t) + abs(self.lam * self._f_s(t))
                + abs(self._g_s(t)))

    def d2psi_scale(self, t: float) -> float:
        t = self._check_t(t)
        kir = self.problem.kirchhoff
        phi_t = self.phi(t)
        s1 = self._s1(t) / t
        s2 = self._s2(t) / t ** 2
        return (abs(float(kir.mp(phi_t))) * s1 ** 2 + abs(float(kir.m(phi_t))) * s2
                + abs(self.lam * self._fp_s2(t)) + abs(self._gp_s2(t)))

    @staticmethod
    def _check_t(t: float) -> float:
        t = float(t)
        if not t > 0:
            raise ValueError(f"fibering maps need t > 0, got {t}")
        return t


def fibering(problem: Problem, u: FeFunction, t: float):
    """(psi_u(t), psi_u'(t), psi_u''(t)) for a single ray parameter."""
    ev = FiberingEvaluator(problem, u)
    return ev.psi(t), ev.dpsi(t), ev.d2psi(t)


# ----------------------------------------------------------------------
# structural estimate checks
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class EstimateReport:
    """Worst relative violations of the radial bracket and envelope bounds."""

    ok: bool
    violation_radial: float      # p M(phi) <= A <= q theta M(phi)
    violation_second: float      # l- A <= B <= (q eta + l+) A
    violation_envelope: float    # M(1) env(||xi||) sandwich on M(phi)
    norm: float

    @property
    def max_violation(self) -> float:
        return max(self.violation_radial, self.violation_second,
                   self.violation_envelope)


def check_basic_estimates(problem: Problem, u: FeFunction,
                          rel_tol: float = 1e-8) -> EstimateReport:
    """Verify the A/B bracket and the M(phi) envelope for one function."""
    idx = problem.indices
    kir = problem.kirchhoff
    gm = u.grad_mag()
    A = kirchhoff_A(problem, gm)
    B = kirchhoff_B(problem, gm)
    mag = np.broadcast_to(gm[:, None], problem.mesh.qw.shape)
    phi = float(np.sum(problem.mesh.qw * _h_field(problem, gm[:, None])))
    Mphi = float(kir.M(phi))

    def rel(lo, val, hi):
        scale = max(abs(lo), abs(val), abs(hi), 1e-300)
        return max(lo - val, val - hi) / scale

    v1 = rel(idx.p_idx * Mphi, A, idx.q_idx * problem.theta * Mphi)
    v2 = rel(idx.l_minus * A, B, (idx.q_idx * problem.eta + idx.l_plus) * A)

    norm = luxemburg_norm_of_field(problem.nf, problem.mesh, mag)
    M1 = float(kir.M(1.0))
    qtheta = idx.q_idx * problem.theta
    lo = M1 * float(envelope_under(norm, idx.p_idx, qtheta))
    hi = M1 * float(envelope_over(norm, idx.p_idx, qtheta))
    v3 = rel(lo, Mphi, hi)

    ok = max(v1, v2, v3) <= rel_tol
    return EstimateReport(ok, float(v1), float(v2), float(v3), norm)


@dataclass(frozen=True)
class ReactionRatios:
    """Empirical constants of the reaction growth bounds for one function.

    ratio_F = int F(u) / env_over(||grad u||; 1-gamma+, 1-gamma-),
    ratio_G_upper = int G(u) / env_over(||grad u||; r-, r+),
    ratio_G_lower = int G(u) / env_under(||u||; r-, r+).

    The theory promises these stay bounded (and the last bounded away from
    zero) over any sample; the constants themselves are empirical.
    """

    ratio_F: float
    ratio_G_upper: float
    ratio_G_lower: float


def reaction_growth_ratios(problem: Problem, u: FeFunction) -> ReactionRatios:
    rx = problem.reactions
    mesh = problem.mesh
    au = np.abs(u.at_qp())
    F_int = integrate(mesh, rx.F_abs(au))
    G_int = integrate(mesh, rx.G_abs(au))
    ng = gradient_norm(problem.nf, u)
    nu = luxemburg_norm(problem.nf, u)
    a_f = 1.0 - rx.gamma_plus
    b_f = 1.0 - rx.gamma_minus
    rF = F_int / float(envelope_over(ng, a_f, b_f))
    rGu = G_int / float(envelope_over(ng, rx.r_minus, rx.r_plus))
    rGl = G_int / float(envelope_under(nu, rx.r_minus, rx.r_plus))
    return ReactionRatios(float(rF), float(rGu), float(rGl))
