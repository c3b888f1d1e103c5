"""Independent oracles for the test suite.

Everything here is written against the mathematical definitions directly,
using plain dense sampling, bisection, central differences, or closed
forms, without reusing the library's scan/bracket/Newton code paths.
"""

from __future__ import annotations

import numpy as np


def central_difference(fun, x: float, h: float) -> float:
    return (fun(x + h) - fun(x - h)) / (2.0 * h)


def bisect_root(fun, lo: float, hi: float, rel_width: float = 1e-14,
                max_iter: int = 200) -> float:
    f_lo = fun(lo)
    f_hi = fun(hi)
    assert f_lo * f_hi <= 0.0, "oracle bisection needs a sign change"
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rel_width * abs(mid):
            break
        f_mid = fun(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ----------------------------------------------------------------------
# scalar fibering model: psi'(t) = a t^(p-1) - lam b t^(-gamma) - c t^(r-1)
# ----------------------------------------------------------------------

def scalar_dpsi(a, b, c, lam, p, gamma, r):
    def dpsi(t):
        return a * t ** (p - 1.0) - lam * b * t ** (-gamma) - c * t ** (r - 1.0)
    return dpsi


def scalar_fibering_roots(a, b, c, lam, p, gamma, r,
                          lo: float = 1e-9, hi: float = 1e9,
                          n: int = 200001) -> list[float]:
    """All roots of the scalar ray derivative by dense scan + bisection."""
    dpsi = scalar_dpsi(a, b, c, lam, p, gamma, r)
    ts = np.geomspace(lo, hi, n)
    vals = dpsi(ts)
    roots = []
    for i in range(n - 1):
        if vals[i] == 0.0:
            roots.append(float(ts[i]))
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(bisect_root(dpsi, float(ts[i]), float(ts[i + 1])))
    if vals[-1] == 0.0:
        roots.append(float(ts[-1]))
    return roots


def scalar_fold_lambda(a, b, c, p, gamma, r,
                       lo: float = 1e-9, hi: float = 1e9,
                       n: int = 200001) -> float:
    """Largest lambda for which the scalar model still has two roots.

    psi' = 0 means lam = (a t^(p-1) - c t^(r-1)) / (b t^(-gamma)); the fold
    is the maximum of that ratio over t > 0.
    """
    ts = np.geomspace(lo, hi, n)
    ratio = (a * ts ** (p - 1.0) - c * ts ** (r - 1.0)) / (b * ts ** (-gamma))
    return float(np.max(ratio))


# ----------------------------------------------------------------------
# logarithmic threshold t0: the root of t = e*log(e+t)
# ----------------------------------------------------------------------

def log_threshold_oracle(rel_width: float = 1e-15) -> float:
    e = float(np.e)
    return bisect_root(lambda t: t - e * np.log(e + t), 1.0, 10.0, rel_width)


# ----------------------------------------------------------------------
# Kirchhoff indices by dense sampling
# ----------------------------------------------------------------------

def eta_theta_oracle(m, mp, M, lo: float = 1e-8, hi: float = 1e8,
                     n: int = 400001):
    s = np.geomspace(lo, hi, n)
    eta = float(np.max(s * mp(s) / m(s)))
    theta = float(np.max(s * m(s) / M(s)))
    return eta, theta


# ----------------------------------------------------------------------
# independent integration on the unit square / interval
# ----------------------------------------------------------------------

def tensor_midpoint_2d(f, n: int = 800) -> float:
    """Midpoint product rule for int_{(0,1)^2} f(x, y)."""
    x = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(x, x, indexing="ij")
    return float(np.sum(f(X, Y)) / (n * n))


def midpoint_1d(f, n: int = 20000) -> float:
    x = (np.arange(n) + 0.5) / n
    return float(np.sum(f(x)) / n)


def luxemburg_power_oracle(p: float, weights: np.ndarray,
                           mag: np.ndarray) -> float:
    """Closed form for H = s^p: rho(u/alpha) = 1 at alpha = (sum w |u|^p)^(1/p)."""
    return float(np.sum(weights * np.abs(mag) ** p) ** (1.0 / p))


# hand-written quadrature tables, independent of meshing.py
GAUSS2_POINTS = (0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0))
GAUSS2_WEIGHTS = (0.5, 0.5)
TRI_MIDEDGE_BARY = ((0.5, 0.5, 0.0), (0.0, 0.5, 0.5), (0.5, 0.0, 0.5))
TRI_MIDEDGE_WEIGHTS = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)


def integrate_p1_cellwise(vertices, cells, nodal, fun) -> float:
    """Apply fun to the P1 interpolant at midedge points, cell by cell.

    Independent re-derivation of the degree-2 triangle rule used for
    cross-checking the library's assembled integrals.
    """
    total = 0.0
    for cell in cells:
        coords = vertices[cell]
        area = 0.5 * abs(
            (coords[1, 0] - coords[0, 0]) * (coords[2, 1] - coords[0, 1])
            - (coords[2, 0] - coords[0, 0]) * (coords[1, 1] - coords[0, 1]))
        vals = nodal[cell]
        for bary, w in zip(TRI_MIDEDGE_BARY, TRI_MIDEDGE_WEIGHTS):
            v = sum(b * val for b, val in zip(bary, vals))
            total += w * area * fun(v)
    return total
