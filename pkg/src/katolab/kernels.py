"""Kernels and boundary weights for the half-order nonlocal form.

* ``nonlocal_kernel``       -- |x-y|^-(n+1) on pairs of points.
* ``reduced_radial_kernel`` -- (rs/(r+s))^(n-1) / (r-s)^2, the one-dimensional
  kernel the double-ball integral collapses to for radial functions.
* ``euler_j``               -- the angular integral
  J(k) = int_0^pi |sin p|^(n-2) / (k^2 + sin^2(p/2))^((n+1)/2) dp, evaluated
  through the substitution t = sin^2(p/2), with the upper half mapped by
  t = 1 - s^2 so every endpoint singularity sits at an origin-anchored node.
* ``euler_j_bounds``        -- the two-sided analytic envelope
  (2^(2n-3) pi^(2-n)) / ((n-1) k^2 (k^2+1)^((n-1)/2))  <=  J(k)  <=
  pi^(n-1) / ((n-1) k^2 (k^2+1)^((n-1)/2)).
  An intermediate, tighter-looking lower form with k^2 + (pi/2)^2 in place of
  (pi/2)^2 (k^2 + 1) circulates as well; numerically it fails for n >= 3 at
  large k (the |sin z| >= 2z/pi step behind it is used outside |z| <= pi/2),
  so it is exposed only as a diagnostic, never asserted.
* ``weight``                -- Hardy rho^-2, Kato rho^-1 and the log-corrected
  Kato weight 1/(rho (1 + |ln rho|^3)).
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .errors import CoincidentPoints, CoincidentRadii, NonPositiveDistance
from .quadrature import QuadratureResult, integrate_1d

__all__ = [
    "nonlocal_kernel",
    "reduced_radial_kernel",
    "euler_j",
    "euler_j_bounds",
    "euler_j_intermediate_lower",
    "EulerJTable",
    "wallis_sin_integral",
    "WeightKind",
    "weight",
]


def nonlocal_kernel(x, y):
    """|x - y|^-(n+1) for two points of equal dimension n >= 2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError("x and y must be 1-d arrays of equal dimension n >= 2")
    d = float(np.linalg.norm(x - y))
    if d == 0.0:
        raise CoincidentPoints("kernel is singular at x == y")
    return d ** -(len(x) + 1)


def reduced_radial_kernel(r, s, n):
    """(rs/(r+s))^(n-1) / (r-s)^2 for radii in (0, 1], r != s."""
    if n < 2:
        raise ValueError("need n >= 2")
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(r <= 0) or np.any(s <= 0) or np.any(r > 1) or np.any(s > 1):
        raise ValueError("radii must lie in (0, 1]")
    if np.any(r == s):
        raise CoincidentRadii("reduced kernel is singular at r == s")
    out = (r * s / (r + s)) ** (n - 1) / (r - s) ** 2
    return float(out) if out.ndim == 0 else out


def wallis_sin_integral(m):
    """int_0^pi sin^m t dt by the closed-form recurrence W_m = W_{m-2} (m-1)/m."""
    if m < 0:
        raise ValueError("need m >= 0")
    w = [math.pi, 2.0]
    for j in range(2, m + 1):
        w.append(w[j - 2] * (j - 1) / j)
    return w[m]


def _j_pieces(n):
    """Integrand pieces of J(k) after t = sin^2(p/2).

    J(k) = 2^(n-2) int_0^1 (t(1-t))^((n-3)/2) (k^2+t)^-((n+1)/2) dt;
    the [1/2, 1] half is mapped by t = 1 - s^2 so that both singular ends
    (t -> 0, and t -> 1 when n = 2) land on exactly representable nodes.
    """
    p = (n - 3) / 2.0
    q = (n + 1) / 2.0

    def lower(t, k2):
        t = np.asarray(t, dtype=float)
        return (t * (1.0 - t)) ** p * (k2 + t) ** -q

    def upper(s, k2):
        s = np.asarray(s, dtype=float)
        one_m = 1.0 - s * s
        return 2.0 * one_m**p * s ** (n - 2) * (k2 + one_m) ** -q

    return lower, upper


def euler_j(k, n, tol=1e-11):
    """J(k) by adaptive quadrature; k > 0, n >= 2."""
    if k <= 0:
        raise ValueError("need k > 0")
    if n < 2:
        raise ValueError("need n >= 2")
    k2 = k * k
    lower, upper = _j_pieces(n)
    a = integrate_1d(lambda t: lower(t, k2), 0.0, 0.5, tol / 2)
    b = integrate_1d(lambda s: upper(s, k2), 0.0, math.sqrt(0.5), tol / 2)
    scale = 2.0 ** (n - 2)
    return QuadratureResult(
        value=scale * (a.value + b.value),
        error_estimate=scale * (a.error_estimate + b.error_estimate),
        evaluations=a.evaluations + b.evaluations,
    )


def euler_j_bounds(k, n):
    """Analytic (lower, upper) envelope of J(k); both sides recomputed."""
    k = np.asarray(k, dtype=float)
    common = (n - 1) * k**2 * (k**2 + 1.0) ** ((n - 1) / 2.0)
    lo = 2.0 ** (2 * n - 3) * math.pi ** (2 - n) / common
    hi = math.pi ** (n - 1) / common
    return lo, hi


def euler_j_intermediate_lower(k, n):
    """Diagnostic-only lower form with k^2 + (pi/2)^2; fails for n >= 3 at large k."""
    k = np.asarray(k, dtype=float)
    return (2.0 ** (n - 2) * math.pi
            / ((n - 1) * k**2 * (k**2 + (math.pi / 2.0) ** 2) ** ((n - 1) / 2.0)))


class EulerJTable:
    """Log-log interpolation table for J(k), one per dimension.

    Built once from a fixed deep tanh-sinh grid evaluated for every tabulated
    k at once; outside [k_min, k_max] the exact power asymptotes C/k^2 and
    W_(n-2)/k^(n+1) take over.
    """

    K_MIN = 1e-8
    K_MAX = 1e4
    POINTS = 1400

    def __init__(self, n):
        if n < 2:
            raise ValueError("need n >= 2")
        self.n = n
        self._lnk = np.linspace(math.log(self.K_MIN), math.log(self.K_MAX), self.POINTS)
        ks = np.exp(self._lnk)
        self._lnj = np.log(self._grid_values(ks))
        from scipy.interpolate import CubicSpline

        self._spline = CubicSpline(self._lnk, self._lnj)
        self._wallis = wallis_sin_integral(n - 2)
        self._j_kmin = math.exp(self._lnj[0])
        self._j_kmax = math.exp(self._lnj[-1])

    def _grid_values(self, ks):
        # fixed tanh-sinh nodes (h = 2^-8) on each piece, all k at once
        n = self.n
        lower, upper = _j_pieces(n)
        h = 2.0**-8
        t = np.arange(-5.8, 5.8 + h / 2, h)
        u = (math.pi / 2.0) * np.sinh(t)
        e = np.exp(-2.0 * np.abs(u))
        dist = 2.0 * e / (1.0 + e)
        wts = (math.pi / 2.0) * np.cosh(t) * (4.0 * e / (1.0 + e) ** 2) * h
        k2 = (ks * ks)[:, None]

        vals = np.zeros(len(ks))
        for lo, hi, piece in ((0.0, 0.5, lower), (0.0, math.sqrt(0.5), upper)):
            c = 0.5 * (hi - lo)
            x = np.where(t < 0, lo + c * dist, hi - c * dist)
            keep = (x > lo) & (x < hi)
            x, w = x[keep], wts[keep] * c
            vals += np.einsum("kj,j->k", piece(x[None, :], k2), w)
        return 2.0 ** (n - 2) * vals

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        scalar = k.ndim == 0
        k = np.atleast_1d(k)
        out = np.empty_like(k)
        smallk = k < self.K_MIN
        bigk = k > self.K_MAX
        mid = ~(smallk | bigk)
        if mid.any():
            out[mid] = np.exp(self._spline(np.log(k[mid])))
        if smallk.any():
            out[smallk] = self._j_kmin * (self.K_MIN / k[smallk]) ** 2
        if bigk.any():
            out[bigk] = self._wallis * k[bigk] ** -(self.n + 1)
        return float(out[0]) if scalar else out


class WeightKind(enum.Enum):
    HARDY = "hardy"
    KATO = "kato"
    LOG_KATO = "logkato"

    @classmethod
    def parse(cls, name):
        key = str(name).strip().lower().replace("-", "").replace("_", "")
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown weight kind {name!r}; use hardy|kato|logkato")


def weight(kind, rho):
    """Boundary-distance weight w(rho); rho must be strictly positive.

    Hardy: rho^-2, Kato: rho^-1, log-corrected Kato:
    1/(rho (1 + |ln rho|^3)).
    """
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(rho_arr <= 0.0):
        raise NonPositiveDistance("weights need rho > 0")
    if kind == WeightKind.HARDY:
        out = rho_arr**-2.0
    elif kind == WeightKind.KATO:
        out = rho_arr**-1.0
    elif kind == WeightKind.LOG_KATO:
        out = 1.0 / (rho_arr * (1.0 + np.abs(np.log(rho_arr)) ** 3))
    else:
        raise ValueError(f"unknown weight kind {kind!r}")
    return float(out) if out.ndim == 0 else out
