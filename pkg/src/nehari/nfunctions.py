"""Generalized N-functions H(x, s) and their growth indices.

The operator side of the solver is driven by an x-dependent Young function
``H(x, s)`` that is strictly convex and superlinear in ``s``.  Everything the
rest of the code needs from ``H`` is collected here:

* pointwise evaluation of ``H``, ``dH/ds`` and ``d2H/ds2`` (exact formulas for
  the built-in kinds, user callbacks for custom ones),
* the four growth indices

      p_idx = inf s*H_s/H,   q_idx = sup s*H_s/H,
      l_minus = inf s*H_ss/H_s,   l_plus = sup s*H_ss/H_s,

  with the infima/suprema taken over x-samples and a log grid in s,
* power envelopes ``min/max(t^a, t^b)`` used by every sandwich estimate,
* sandwich checkers that turn the growth comparisons into executable
  pass/fail reports.

Built-in kinds (all with exponents 1 < p <= q and a nonnegative weight
``mu(x)``):

    power                        H = s^p
    sum_power                    H = s^p + mu * s^q          (constant mu)
    double_phase                 H = s^p + mu(x) * s^q
    log_double_phase             H = s^p + mu(x) * s^q * log(e + s)
    log_perturbed_double_phase   H = (s^p + mu(x) * s^q) * log(e + s)

For the logarithmic kinds the upper index is controlled by
``q + kappa`` with ``kappa = e / (e + t0)`` where ``t0`` is the unique root
of ``t = e * log(e + t)`` in (1, 10).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

POWER = "power"
SUM_POWER = "sum_power"
DOUBLE_PHASE = "double_phase"
LOG_DOUBLE_PHASE = "log_double_phase"
LOG_PERTURBED_DOUBLE_PHASE = "log_perturbed_double_phase"
CUSTOM = "custom"

LOG_KINDS = (LOG_DOUBLE_PHASE, LOG_PERTURBED_DOUBLE_PHASE)
BUILTIN_KINDS = (POWER, SUM_POWER, DOUBLE_PHASE) + LOG_KINDS

# Default spatial samples for index estimation; weights that actually depend
# on x (e.g. the first coordinate) get probed at corners, center and edges of
# the unit square.  1-d weights read only column 0, so these work there too.
DEFAULT_X_SAMPLES = np.array(
    [[0.0, 0.0], [0.25, 0.5], [0.5, 0.25], [0.75, 0.75], [1.0, 1.0]]
)


def constant_weight(c: float) -> Callable[[np.ndarray], np.ndarray]:
    """Weight mu(x) identically equal to c >= 0."""
    c = float(c)
    if c < 0:
        raise ValueError(f"weight must be nonnegative, got {c}")

    def mu(x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        return np.full(x.shape[0], c)

    mu.is_constant = True  # type: ignore[attr-defined]
    mu.constant_value = c  # type: ignore[attr-defined]
    return mu


def coordinate_weight(axis: int = 0) -> Callable[[np.ndarray], np.ndarray]:
    """Weight mu(x) = x[axis], nonnegative on the unit domains used here."""

    def mu(x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        return np.asarray(x[:, axis], dtype=float)

    mu.is_constant = False  # type: ignore[attr-defined]
    return mu


def solve_log_threshold(tol: float = 1e-14) -> float:
    """Root t0 of t = e*log(e + t), bisected on [1, 10].

    The residual of the returned value is below 1e-12; t0 is approximately
    5.8408 and kappa = e/(e + t0) is approximately 0.3175.
    """

    def g(t: float) -> float:
        return t - np.e * np.log(np.e + t)

    lo, hi = 1.0, 10.0
    if not (g(lo) < 0 < g(hi)):  # pragma: no cover - fixed bracket
        raise RuntimeError("log-threshold bracket failed")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0:
            lo = mid
        else:
            hi = mid
    t0 = 0.5 * (lo + hi)
    if abs(g(t0)) > 1e-12:  # pragma: no cover - bisection guarantees this
        raise RuntimeError(f"log-threshold residual {g(t0):.3e} too large")
    return t0


class NFunction:
    """A generalized N-function H(x, s) with exact derivative formulas.

    Use the classmethod constructors; the plain constructor is internal.
    Custom callbacks take ``(x, s)`` with ``x`` of shape (n, dim) and ``s``
    of shape (n,) and are validated against finite differences on a sample
    grid at construction time.
    """

    def __init__(self, kind, p, q=None, weight=None, callbacks=None, name=None):
        if kind not in BUILTIN_KINDS + (CUSTOM,):
            raise ValueError(f"unknown N-function kind {kind!r}")
        self.kind = kind
        self.p = float(p)
        self.q = float(q) if q is not None else float(p)
        if not self.p > 1:
            raise ValueError(f"need p > 1, got p={self.p}")
        if self.q < self.p:
            raise ValueError(f"need p <= q, got p={self.p}, q={self.q}")
        self.weight = weight if weight is not None else constant_weight(0.0)
        self.callbacks = callbacks
        self.name = name or kind
        if kind == CUSTOM:
            if callbacks is None or any(c is None for c in callbacks):
                raise ValueError("custom kind needs (h, dh, d2h) callbacks")
            self._validate_custom()

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @classmethod
    def power(cls, p: float) -> "NFunction":
        return cls(POWER, p, p, constant_weight(0.0), name=f"power(p={p})")

    @classmethod
    def sum_power(cls, p: float, q: float, weight: float = 1.0) -> "NFunction":
        return cls(SUM_POWER, p, q, constant_weight(weight),
                   name=f"sum_power(p={p}, q={q}, w={weight})")

    @classmethod
    def double_phase(cls, p: float, q: float, mu) -> "NFunction":
        return cls(DOUBLE_PHASE, p, q, _as_weight(mu),
                   name=f"double_phase(p={p}, q={q})")

    @classmethod
    def log_double_phase(cls, p: float, q: float, mu) -> "NFunction":
        return cls(LOG_DOUBLE_PHASE, p, q, _as_weight(mu),
                   name=f"log_double_phase(p={p}, q={q})")

    @classmethod
    def log_perturbed_double_phase(cls, p: float, q: float, mu) -> "NFunction":
        return cls(LOG_PERTURBED_DOUBLE_PHASE, p, q, _as_weight(mu),
                   name=f"log_perturbed_double_phase(p={p}, q={q})")

    @classmethod
    def custom(cls, h, dh, d2h, *, p_hint: float = 2.0, q_hint: float | None = None,
               name: str = "custom") -> "NFunction":
        """Wrap user callbacks.  p_hint/q_hint seed the index report only."""
        return cls(CUSTOM, p_hint, q_hint if q_hint is not None else p_hint,
                   constant_weight(0.0), callbacks=(h, dh, d2h), name=name)

    # ------------------------------------------------------------------
    # evaluation
    # ------------------------------------------------------------------

    def mu_at(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.weight(x), dtype=float)

    def h_mu(self, s, mu):
        """H given precomputed weights (built-ins only)."""
        s = np.asarray(s, dtype=float)
        p, q = self.p, self.q
        if self.kind == POWER:
            return s ** p
        if self.kind in (SUM_POWER, DOUBLE_PHASE):
            return s ** p + mu * s ** q
        if self.kind == LOG_DOUBLE_PHASE:
            return s ** p + mu * s ** q * np.log(np.e + s)
        if self.kind == LOG_PERTURBED_DOUBLE_PHASE:
            return (s ** p + mu * s ** q) * np.log(np.e + s)
        raise TypeError("custom kind has no weight-based fast path")

    def dh_mu(self, s, mu):
        """dH/ds; the s -> 0+ limit (zero, since p > 1) is used at s = 0."""
        s = np.asarray(s, dtype=float)
        p, q = self.p, self.q
        if self.kind == POWER:
            return p * s ** (p - 1.0)
        if self.kind in (SUM_POWER, DOUBLE_PHASE):
            return p * s ** (p - 1.0) + mu * q * s ** (q - 1.0)
        if self.kind == LOG_DOUBLE_PHASE:
            return (p * s ** (p - 1.0)
                    + mu * (q * s ** (q - 1.0) * np.log(np.e + s)
                            + s ** q / (np.e + s)))
        if self.kind == LOG_PERTURBED_DOUBLE_PHASE:
            dp = p * s ** (p - 1.0) + mu * q * s ** (q - 1.0)
            pv = s ** p + mu * s ** q
            return dp * np.log(np.e + s) + pv / (np.e + s)
        raise TypeError("custom kind has no weight-based fast path")

    def d2h_mu(self, s, mu):
        """d2H/ds2 for s > 0; entries at s = 0 get the one-sided limit."""
        s = np.asarray(s, dtype=float)
        p, q = self.p, self.q
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == POWER:
                out = p * (p - 1.0) * s ** (p - 2.0)
            elif self.kind in (SUM_POWER, DOUBLE_PHASE):
                out = (p * (p - 1.0) * s ** (p - 2.0)
                       + mu * q * (q - 1.0) * s ** (q - 2.0))
            elif self.kind == LOG_DOUBLE_PHASE:
                out = (p * (p - 1.0) * s ** (p - 2.0)
                       + mu * (q * (q - 1.0) * s ** (q - 2.0) * np.log(np.e + s)
                               + 2.0 * q * s ** (q - 1.0) / (np.e + s)
                               - s ** q / (np.e + s) ** 2))
            elif self.kind == LOG_PERTURBED_DOUBLE_PHASE:
                d2 = p * (p - 1.0) * s ** (p - 2.0) + mu * q * (q - 1.0) * s ** (q - 2.0)
                dp = p * s ** (p - 1.0) + mu * q * s ** (q - 1.0)
                pv = s ** p + mu * s ** q
                out = (d2 * np.log(np.e + s) + 2.0 * dp / (np.e + s)
                       - pv / (np.e + s) ** 2)
            else:
                raise TypeError("custom kind has no weight-based fast path")
        if np.ndim(out) == 0:
            return self._d2h_limit0(mu) if s == 0 else float(out)
        zero = (s == 0)
        if np.any(zero):
            out = np.where(zero, self._d2h_limit0(mu), out)
        return out

    def _d2h_limit0(self, mu):
        p, q = self.p, self.q
        if p < 2.0:
            return np.inf
        lim = p * (p - 1.0) if p == 2.0 else 0.0
        if self.kind != POWER and q == 2.0:
            lim = lim + mu * q * (q - 1.0)
        return lim

    def dh_s_mu(self, s, mu):
        """s * dH/ds in fused form (finite and zero at s = 0)."""
        s = np.asarray(s, dtype=float)
        p, q = self.p, self.q
        if self.kind == POWER:
            return p * s ** p
        if self.kind in (SUM_POWER, DOUBLE_PHASE):
            return p * s ** p + mu * q * s ** q
        if self.kind == LOG_DOUBLE_PHASE:
            return (p * s ** p
                    + mu * (q * s ** q * np.log(np.e + s)
                            + s ** (q + 1.0) / (np.e + s)))
        if self.kind == LOG_PERTURBED_DOUBLE_PHASE:
            sdp = p * s ** p + mu * q * s ** q
            pv = s ** p + mu * s ** q
            return sdp * np.log(np.e + s) + s * pv / (np.e + s)
        raise TypeError("custom kind has no weight-based fast path")

    def d2h_s2_mu(self, s, mu):
        """s^2 * d2H/ds2 in fused form (finite and zero at s = 0)."""
        s = np.asarray(s, dtype=float)
        p, q = self.p, self.q
        if self.kind == POWER:
            return p * (p - 1.0) * s ** p
        if self.kind in (SUM_POWER, DOUBLE_PHASE):
            return p * (p - 1.0) * s ** p + mu * q * (q - 1.0) * s ** q
        if self.kind == LOG_DOUBLE_PHASE:
            return (p * (p - 1.0) * s ** p
                    + mu * (q * (q - 1.0) * s ** q * np.log(np.e + s)
                            + 2.0 * q * s ** (q + 1.0) / (np.e + s)
                            - s ** (q + 2.0) / (np.e + s) ** 2))
        if self.kind == LOG_PERTURBED_DOUBLE_PHASE:
            s2d2 = p * (p - 1.0) * s ** p + mu * q * (q - 1.0) * s ** q
            sdp = p * s ** p + mu * q * s ** q
            pv = s ** p + mu * s ** q
            return (s2d2 * np.log(np.e + s) + 2.0 * s * sdp / (np.e + s)
                    - s ** 2 * pv / (np.e + s) ** 2)
        raise TypeError("custom kind has no weight-based fast path")

    # x-aware entry points; s < 0 is a domain error everywhere.

    def h(self, x, s):
        s = _check_s(s)
        if self.kind == CUSTOM:
            return np.asarray(self.callbacks[0](x, s), dtype=float)
        return self.h_mu(s, self.mu_at(x))

    def dh(self, x, s):
        s = _check_s(s)
        if self.kind == CUSTOM:
            return np.asarray(self.callbacks[1](x, s), dtype=float)
        return self.dh_mu(s, self.mu_at(x))

    def d2h(self, x, s):
        s = _check_s(s)
        if self.kind == CUSTOM:
            return np.asarray(self.callbacks[2](x, s), dtype=float)
        return self.d2h_mu(s, self.mu_at(x))

    def dh_s(self, x, s):
        s = _check_s(s)
        if self.kind == CUSTOM:
            return s * np.asarray(self.callbacks[1](x, s), dtype=float)
        return self.dh_s_mu(s, self.mu_at(x))

    def d2h_s2(self, x, s):
        s = _check_s(s)
        if self.kind == CUSTOM:
            flat = np.atleast_1d(np.asarray(s, dtype=float)).ravel()
            x2 = np.atleast_2d(np.asarray(x, dtype=float))
            if x2.shape[0] == 1 and flat.size > 1:
                x2 = np.tile(x2, (flat.size, 1))
            out = np.zeros(flat.size)
            pos = flat > 0
            if np.any(pos):
                out[pos] = flat[pos] ** 2 * np.asarray(
                    self.callbacks[2](x2[pos], flat[pos]), dtype=float)
            return out.reshape(np.shape(s)) if np.ndim(s) else float(out[0])
        return self.d2h_s2_mu(s, self.mu_at(x))

    def __repr__(self):
        return f"NFunction({self.name})"

    # ------------------------------------------------------------------

    def _validate_custom(self):
        """Finite-difference audit of the supplied derivative callbacks."""
        s = np.geomspace(1e-3, 1e3, 31)
        x = np.tile(np.array([[0.5, 0.5]]), (s.size, 1))
        h, dh, d2h = self.callbacks
        eps = 1e-5 * s
        fd1 = (np.asarray(h(x, s + eps)) - np.asarray(h(x, s - eps))) / (2 * eps)
        fd2 = (np.asarray(dh(x, s + eps)) - np.asarray(dh(x, s - eps))) / (2 * eps)
        got1 = np.asarray(dh(x, s), dtype=float)
        got2 = np.asarray(d2h(x, s), dtype=float)
        for got, fd, label in ((got1, fd1, "dh"), (got2, fd2, "d2h")):
            denom = np.maximum(np.abs(fd), np.abs(got))
            denom = np.where(denom > 0, denom, 1.0)
            rel = np.abs(got - fd) / denom
            worst = int(np.argmax(rel))
            if rel[worst] > 1e-4:
                raise ValueError(
                    f"custom {label} disagrees with finite differences at "
                    f"s={s[worst]:.6g}: rel error {rel[worst]:.3e}")
        h0 = np.asarray(h(x[:1], np.array([0.0])), dtype=float)
        if not np.allclose(h0, 0.0, atol=1e-14):
            raise ValueError(f"custom H(x, 0) = {h0} must vanish")
        if np.any(got1 <= 0):
            raise ValueError("custom dH/ds must be positive for s > 0")


def _as_weight(mu):
    if callable(mu):
        return mu
    return constant_weight(float(mu))


def _check_s(s):
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("N-functions are evaluated at s = |.| >= 0 only")
    return s


# ----------------------------------------------------------------------
# public functional surface
# ----------------------------------------------------------------------

def eval_h(nf: NFunction, x, s):
    """H(x, s) evaluated pointwise; x (n, dim), s broadcastable to (n,)."""
    return nf.h(x, s)


def eval_dh(nf: NFunction, x, s):
    """dH/ds(x, s); exact formulas for built-ins, callback for custom."""
    return nf.dh(x, s)


def eval_d2h(nf: NFunction, x, s):
    """d2H/ds2(x, s); at s = 0 the one-sided limit is used for built-ins."""
    return nf.d2h(x, s)


@dataclass(frozen=True)
class IndexReport:
    """Growth indices of an N-function over a sample grid.

    kappa and t0 are populated for the logarithmic kinds only; there the
    certified upper bound q + kappa on q_idx holds.
    """

    p_idx: float
    q_idx: float
    l_minus: float
    l_plus: float
    kappa: float | None
    t0: float | None
    sample_grid: str

    def as_dict(self) -> dict:
        return {
            "p_idx": self.p_idx,
            "q_idx": self.q_idx,
            "l_minus": self.l_minus,
            "l_plus": self.l_plus,
            "kappa": self.kappa,
            "t0": self.t0,
            "sample_grid": self.sample_grid,
        }


def _ratio_fields(nf: NFunction, x_one: np.ndarray, s: np.ndarray):
    """(s H_s/H, s H_ss/H_s) at one spatial point for a vector of s > 0."""
    x = np.tile(np.reshape(x_one, (1, -1)), (s.size, 1))
    h = nf.h(x, s)
    dh_s = nf.dh_s(x, s)
    d2h_s2 = nf.d2h_s2(x, s)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = dh_s / h
        r2 = d2h_s2 / dh_s
    bad = ~(np.isfinite(r1) & np.isfinite(r2))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise FloatingPointError(
            f"non-finite index ratio at x={x_one}, s={s[i]:.6g}")
    return r1, r2


def _refine_extremum(fn, t_lo, t_hi, t_cand, maximize):
    """Polish a grid extremum of fn(t) on a log-t window around t_cand."""
    from scipy.optimize import minimize_scalar

    a = np.log(max(t_lo, t_cand / 20.0))
    b = np.log(min(t_hi, t_cand * 20.0))
    if not a < b:
        return fn(t_cand)
    sign = -1.0 if maximize else 1.0
    res = minimize_scalar(lambda y: sign * fn(np.exp(y)), bounds=(a, b),
                          method="bounded", options={"xatol": 1e-13})
    return max(fn(np.exp(res.x)), fn(t_cand)) if maximize else min(fn(np.exp(res.x)), fn(t_cand))


def estimate_indices(nf: NFunction, s_grid: np.ndarray | None = None,
                     x_samples: np.ndarray | None = None) -> IndexReport:
    """Estimate (p_idx, q_idx, l_minus, l_plus) for ``nf``.

    Closed forms are used where they are exact:

    * power: all four indices are constants in s,
    * sum_power / double_phase: the ratios are monotone between their limits
      p, q and p-1, q-1,
    * logarithmic kinds: the infima p and p-1 are attained in the s -> 0
      limit; the suprema are grid estimates with a scalar-optimizer polish of
      interior maxima, and q_idx <= q + kappa is certified.

    Custom kinds are estimated from the grid alone (with polish in both
    directions).  Non-finite ratios raise with the offending (x, s).
    """
    if s_grid is None:
        s_grid = np.geomspace(1e-4, 1e4, 2001)
    s_grid = np.asarray(s_grid, dtype=float)
    if s_grid.size < 200 or s_grid.min() > 1e-4 or s_grid.max() < 1e4:
        raise ValueError("s_grid must span [1e-4, 1e4] with at least 200 points")
    if x_samples is None:
        x_samples = DEFAULT_X_SAMPLES
    x_samples = np.atleast_2d(np.asarray(x_samples, dtype=float))
    grid_note = (f"s: {s_grid.size} log points in "
                 f"[{s_grid.min():.3g}, {s_grid.max():.3g}]; "
                 f"x: {x_samples.shape[0]} samples")

    kappa = t0 = None
    if nf.kind in LOG_KINDS:
        t0 = solve_log_threshold()
        kappa = np.e / (np.e + t0)

    if nf.kind == POWER:
        return IndexReport(nf.p, nf.p, nf.p - 1.0, nf.p - 1.0, None, None,
                           grid_note + " (closed form)")

    if nf.kind in (SUM_POWER, DOUBLE_PHASE):
        mu_vals = np.concatenate([nf.mu_at(x_samples)])
        if np.any(mu_vals < 0):
            raise ValueError("weight must be nonnegative on the sample set")
        if np.max(mu_vals) == 0.0:
            return IndexReport(nf.p, nf.p, nf.p - 1.0, nf.p - 1.0, None, None,
                               grid_note + " (closed form, vanishing weight)")
        return IndexReport(nf.p, nf.q, nf.p - 1.0, nf.q - 1.0, None, None,
                           grid_note + " (closed form)")

    # Logarithmic and custom kinds: sweep the grid per x sample.
    p_lo = np.inf
    q_hi = -np.inf
    l_lo = np.inf
    l_hi = -np.inf
    for x_one in x_samples:
        r1, r2 = _ratio_fields(nf, x_one, s_grid)
        i_q, i_l = int(np.argmax(r1)), int(np.argmax(r2))

        def f1(t, x_one=x_one):
            return float(_ratio_fields(nf, x_one, np.array([t]))[0][0])

        def f2(t, x_one=x_one):
            return float(_ratio_fields(nf, x_one, np.array([t]))[1][0])

        q_hi = max(q_hi, _refine_extremum(f1, s_grid[0], s_grid[-1],
                                          s_grid[i_q], maximize=True))
        l_hi = max(l_hi, _refine_extremum(f2, s_grid[0], s_grid[-1],
                                          s_grid[i_l], maximize=True))
        if nf.kind not in LOG_KINDS:
            i_p, i_m = int(np.argmin(r1)), int(np.argmin(r2))
            p_lo = min(p_lo, _refine_extremum(f1, s_grid[0], s_grid[-1],
                                              s_grid[i_p], maximize=False))
            l_lo = min(l_lo, _refine_extremum(f2, s_grid[0], s_grid[-1],
                                              s_grid[i_m], maximize=False))

    if nf.kind in LOG_KINDS:
        # The infima p and p-1 are approached as s -> 0; certified closed form.
        p_lo, l_lo = nf.p, nf.p - 1.0
        if q_hi > nf.q + kappa + 1e-9:
            raise FloatingPointError(
                f"q_idx estimate {q_hi:.12g} exceeds certified bound "
                f"q + kappa = {nf.q + kappa:.12g}")
    return IndexReport(float(p_lo), float(q_hi), float(l_lo), float(l_hi),
                       kappa, t0, grid_note)


# ----------------------------------------------------------------------
# power envelopes and sandwich checks
# ----------------------------------------------------------------------

def envelope_under(t, alpha: float, beta: float):
    """min(t^alpha, t^beta) for 0 <= alpha <= beta, t >= 0."""
    if not 0 <= alpha <= beta:
        raise ValueError(f"need 0 <= alpha <= beta, got ({alpha}, {beta})")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("envelopes need t >= 0")
    return np.minimum(t ** alpha, t ** beta)


def envelope_over(t, alpha: float, beta: float):
    """max(t^alpha, t^beta) for 0 <= alpha <= beta, t >= 0."""
    if not 0 <= alpha <= beta:
        raise ValueError(f"need 0 <= alpha <= beta, got ({alpha}, {beta})")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("envelopes need t >= 0")
    return np.maximum(t ** alpha, t ** beta)


@dataclass(frozen=True)
class SandwichReport:
    """Outcome of an inequality sweep: worst relative violation and where."""

    ok: bool
    max_rel_violation: float
    worst_s: float
    n_checked: int
    detail: str = ""


def _sandwich_violation(values, value_at_1, a, b, s_grid):
    lower = value_at_1 * envelope_under(s_grid, a, b)
    upper = value_at_1 * envelope_over(s_grid, a, b)
    scale = np.maximum(np.abs(values), np.maximum(np.abs(lower), np.abs(upper)))
    scale = np.where(scale > 0, scale, 1.0)
    viol = np.maximum(lower - values, values - upper) / scale
    return viol


def check_growth_sandwich(K, k, i_k: float, s_k: float,
                          s_grid: np.ndarray, rel_tol: float = 1e-9) -> SandwichReport:
    """Power sandwich for a scalar K with derivative k of index range [i_k, s_k].

    Checks, at every grid point,

        k(1) * min(s^i_k, s^s_k) <= k(s) <= k(1) * max(s^i_k, s^s_k)
        K(1) * min(s^(i_k+1), s^(s_k+1)) <= K(s) <= K(1) * max(...)

    and reports the worst relative violation.  ``K`` and ``k`` are callables
    of a vector argument.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    kv = np.asarray(k(s_grid), dtype=float)
    Kv = np.asarray(K(s_grid), dtype=float)
    k1 = float(np.asarray(k(np.array([1.0]))).reshape(-1)[0])
    K1 = float(np.asarray(K(np.array([1.0]))).reshape(-1)[0])
    v1 = _sandwich_violation(kv, k1, i_k, s_k, s_grid)
    v2 = _sandwich_violation(Kv, K1, i_k + 1.0, s_k + 1.0, s_grid)
    viol = np.maximum(v1, v2)
    i = int(np.argmax(viol))
    worst = float(viol[i])
    return SandwichReport(worst <= rel_tol, worst, float(s_grid[i]),
                          2 * s_grid.size, "growth sandwich for (k, K)")


def check_index_bounds(nf: NFunction, report: IndexReport,
                       s_grid: np.ndarray | None = None,
                       x_samples: np.ndarray | None = None,
                       rel_tol: float = 1e-9) -> SandwichReport:
    """Verify the index machinery of ``nf`` against ``report`` on a grid.

    At every (x, s) sample this checks

    * the ratio bounds p_idx <= s H_s/H <= q_idx and
      l_minus <= s H_ss/H_s <= l_plus,
    * the derivative sandwich for H_s with exponents [l_minus, l_plus],
    * the primitive sandwich for H with exponents [l_minus+1, l_plus+1]

    all relative to ``rel_tol``.  Returns the worst violation found.
    """
    if s_grid is None:
        s_grid = np.geomspace(1e-4, 1e4, 200)
    s_grid = np.asarray(s_grid, dtype=float)
    if x_samples is None:
        x_samples = DEFAULT_X_SAMPLES
    x_samples = np.atleast_2d(np.asarray(x_samples, dtype=float))

    worst = -np.inf
    worst_s = float("nan")
    n = 0
    for x_one in x_samples:
        x = np.tile(np.reshape(x_one, (1, -1)), (s_grid.size, 1))
        r1, r2 = _ratio_fields(nf, x_one, s_grid)
        ratio_scale1 = np.maximum(np.abs(r1), max(abs(report.p_idx), abs(report.q_idx)))
        ratio_scale2 = np.maximum(np.abs(r2), max(abs(report.l_minus), abs(report.l_plus)))
        v_r1 = np.maximum(report.p_idx - r1, r1 - report.q_idx) / ratio_scale1
        v_r2 = np.maximum(report.l_minus - r2, r2 - report.l_plus) / ratio_scale2

        one = np.array([1.0])
        x1 = np.reshape(x_one, (1, -1))
        dh1 = float(np.asarray(nf.dh(x1, one)).reshape(-1)[0])
        h1 = float(np.asarray(nf.h(x1, one)).reshape(-1)[0])
        v_k = _sandwich_violation(nf.dh(x, s_grid), dh1,
                                  report.l_minus, report.l_plus, s_grid)
        v_K = _sandwich_violation(nf.h(x, s_grid), h1,
                                  report.l_minus + 1.0, report.l_plus + 1.0, s_grid)

        viol = np.maximum(np.maximum(v_r1, v_r2), np.maximum(v_k, v_K))
        i = int(np.argmax(viol))
        if viol[i] > worst:
            worst, worst_s = float(viol[i]), float(s_grid[i])
        n += 4 * s_grid.size
    return SandwichReport(worst <= rel_tol, worst, worst_s, n,
                          f"index bounds for {nf.name}")
