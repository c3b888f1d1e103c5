"""Modulars and Luxemburg norms for discretized generalized Orlicz spaces.

The modular of a magnitude field ``v >= 0`` is the quadrature integral
``rho(v) = sum_q w_q H(x_q, v(x_q))``.  The Luxemburg norm is the unique
``alpha > 0`` with ``rho(v / alpha) = 1``; since ``alpha -> rho(v/alpha)`` is
continuous and strictly decreasing for ``v != 0``, it is found by doubling or
halving from ``alpha = 1`` until bracketed and then by plain bisection, which
is unconditionally robust.  The returned value satisfies
``|rho(v / alpha) - 1| <= 1e-10``.

The norm sandwich

    min(n^a, n^b) <= rho(v) <= max(n^a, n^b),   n = ||v||, a = p_idx, b = q_idx

is exposed as an executable check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .meshing import FeFunction, Mesh
from .nfunctions import CUSTOM, NFunction, SandwichReport, envelope_over, envelope_under


@dataclass(frozen=True)
class ModularValue:
    """A modular integral together with the quadrature that produced it."""

    value: float
    quadrature: str

    def __float__(self):
        return self.value


def _mag_at_qp(mesh: Mesh, mag) -> np.ndarray:
    mag = np.asarray(mag, dtype=float)
    if mag.ndim == 1:
        if mag.shape[0] != mesh.n_cells:
            raise ValueError("per-cell field length does not match the mesh")
        mag = np.broadcast_to(mag[:, None], mesh.qw.shape)
    elif mag.shape != mesh.qw.shape:
        raise ValueError(f"field shape {mag.shape} does not match "
                         f"quadrature layout {mesh.qw.shape}")
    if np.any(mag < 0):
        raise ValueError("magnitude fields must be nonnegative")
    return mag


def h_at_qp(nf: NFunction, mesh: Mesh, mag) -> np.ndarray:
    """H(x_q, mag_q) over the quadrature layout, shape (nc, nq)."""
    mag = _mag_at_qp(mesh, mag)
    if nf.kind == CUSTOM:
        vals = nf.h(mesh.qp_flat, mag.ravel())
        return vals.reshape(mesh.qw.shape)
    mu = nf.mu_at(mesh.qp_flat).reshape(mesh.qw.shape)
    return nf.h_mu(mag, mu)


def modular_of_field(nf: NFunction, mesh: Mesh, mag) -> float:
    with np.errstate(over="ignore"):
        return float(np.sum(mesh.qw * h_at_qp(nf, mesh, mag)))


def modular_rho(nf: NFunction, u: FeFunction, of_gradient: bool = False) -> ModularValue:
    """rho(u) = integral of H(x, |u|) (or H(x, |grad u|) if requested)."""
    mesh = u.mesh
    mag = u.grad_mag() if of_gradient else np.abs(u.at_qp())
    return ModularValue(modular_of_field(nf, mesh, mag), mesh.quadrature)


def luxemburg_norm_of_field(nf: NFunction, mesh: Mesh, mag,
                            rel_width: float = 1e-13,
                            residual_tol: float = 1e-10) -> float:
    """Luxemburg norm of a nonnegative magnitude field."""
    mag = _mag_at_qp(mesh, mag)
    if not np.any(mag > 0):
        return 0.0

    def rho(alpha: float) -> float:
        return modular_of_field(nf, mesh, mag / alpha)

    lo = hi = 1.0
    r = rho(1.0)
    if r > 1.0:
        while rho(hi) > 1.0:
            lo = hi
            hi *= 2.0
            if hi > 1e30:
                raise FloatingPointError("Luxemburg bracket exceeded 1e30")
    elif r < 1.0:
        while rho(lo) < 1.0:
            hi = lo
            lo *= 0.5
            if lo < 1e-30:
                raise FloatingPointError("Luxemburg bracket fell below 1e-30")
    else:
        return 1.0

    # rho(mag/alpha) is strictly decreasing in alpha: bisect [lo, hi]
    while hi - lo > rel_width * hi:
        mid = 0.5 * (lo + hi)
        if rho(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    alpha = 0.5 * (lo + hi)
    if abs(rho(alpha) - 1.0) > residual_tol:
        raise FloatingPointError(
            f"Luxemburg residual {abs(rho(alpha) - 1.0):.3e} above {residual_tol:g}")
    return alpha


def luxemburg_norm(nf: NFunction, u: FeFunction, of_gradient: bool = False) -> float:
    mesh = u.mesh
    mag = u.grad_mag() if of_gradient else np.abs(u.at_qp())
    return luxemburg_norm_of_field(nf, mesh, mag)


def gradient_norm(nf: NFunction, u: FeFunction) -> float:
    """The solver's working norm: Luxemburg norm of |grad u|."""
    return luxemburg_norm(nf, u, of_gradient=True)


def check_modular_norm_sandwich(nf: NFunction, mesh: Mesh, mag,
                                p_idx: float, q_idx: float,
                                rel_tol: float = 1e-8) -> SandwichReport:
    """Envelope sandwich between modular and Luxemburg norm for one field.

    Also certifies the unit-ball identity rho(v/||v||) = 1 (within the norm
    solver's residual) as part of the check.
    """
    mag = _mag_at_qp(mesh, mag)
    rho = modular_of_field(nf, mesh, mag)
    norm = luxemburg_norm_of_field(nf, mesh, mag)
    if norm == 0.0:
        ok = rho == 0.0
        return SandwichReport(ok, 0.0 if ok else np.inf, 0.0, 1, "zero field")
    lower = float(envelope_under(norm, p_idx, q_idx))
    upper = float(envelope_over(norm, p_idx, q_idx))
    scale = max(abs(rho), abs(lower), abs(upper))
    viol = max(lower - rho, rho - upper) / scale
    unit = abs(modular_of_field(nf, mesh, mag / norm) - 1.0)
    viol = max(viol, unit - 1e-10)
    return SandwichReport(viol <= rel_tol, float(viol), norm, 3,
                          "modular/norm sandwich + unit ball")
