"""Domains, boundary distances, nested pairs, and Jacobian eigenvalue bounds.

The catalogue is balls (arbitrary radius/center), origin-centered ellipsoids,
and radial maps x = g(|u|) u of the unit ball with g(t) = base + quad t^2.
Balls and ellipsoids have exact boundary distances; the radial-map domain is
resolved through a direction mesh with local refinement (its image happens to
be the ball of radius g(1), which the tests exploit as an oracle).

Every object is immutable after construction and safe to share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateJacobian, EmptyGap, OutsideDomain
from .quadrature import sample_unit_ball, unit_ball_volume

__all__ = [
    "Ball",
    "Ellipsoid",
    "RadialMapDomain",
    "NestedPair",
    "JacobianBounds",
    "distance_to_boundary",
    "estimate_jacobian_bounds",
    "clearance_radius",
    "unit_directions",
]

_SAFETY = 1.05  # inflation turning sampled eigenvalue estimates into usable bounds


def unit_directions(n, count, seed=1234):
    """Deterministic unit vectors: uniform angles (n=2), product rule (n=3),
    seeded Gaussian directions otherwise.  Angles carry a half-step offset so
    no direction lies exactly on a coordinate axis."""
    if n == 2:
        th = (np.arange(count) + 0.5) * (2.0 * math.pi / count)
        return np.column_stack([np.cos(th), np.sin(th)])
    if n == 3:
        m = max(int(math.sqrt(count / 2.0)), 4)
        mu, _ = np.polynomial.legendre.leggauss(m)
        phi = (np.arange(2 * m) + 0.5) * (math.pi / m)
        MU, PHI = np.meshgrid(mu, phi, indexing="ij")
        st = np.sqrt(1.0 - MU**2)
        return np.column_stack([(st * np.cos(PHI)).ravel(),
                                (st * np.sin(PHI)).ravel(),
                                MU.ravel()])
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _sphere_rule(n, count, seed=1234):
    """(directions, weights) integrating over the unit sphere with total 1."""
    if n == 3:
        m = max(int(math.sqrt(count / 2.0)), 4)
        mu, wm = np.polynomial.legendre.leggauss(m)
        phi = (np.arange(2 * m) + 0.5) * (math.pi / m)
        MU, PHI = np.meshgrid(mu, phi, indexing="ij")
        st = np.sqrt(1.0 - MU**2)
        dirs = np.column_stack([(st * np.cos(PHI)).ravel(),
                                (st * np.sin(PHI)).ravel(),
                                MU.ravel()])
        w = np.repeat(wm, 2 * m) / (2.0 * 2 * m)
        return dirs, w
    dirs = unit_directions(n, count, seed)
    return dirs, np.full(len(dirs), 1.0 / len(dirs))


@dataclass(frozen=True)
class Ball:
    n: int
    radius: float = 1.0
    center: tuple = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need n >= 2")
        if not (self.radius > 0):
            raise ValueError("radius must be positive")
        c = self.center if self.center is not None else (0.0,) * self.n
        c = tuple(float(v) for v in c)
        if len(c) != self.n:
            raise ValueError("center dimension mismatch")
        object.__setattr__(self, "center", c)

    @property
    def dimension(self):
        return self.n

    def volume(self):
        return unit_ball_volume(self.n) * self.radius**self.n

    def inradius(self):
        return self.radius

    def contains(self, pts, tol=0.0):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.linalg.norm(pts - np.asarray(self.center), axis=1) <= self.radius - tol

    def boundary_distance(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return self.radius - np.linalg.norm(pts - np.asarray(self.center), axis=1)

    def boundary_radius(self, dirs):
        """Radial boundary parametrization from the origin (requires |c| < R)."""
        dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
        c = np.asarray(self.center)
        proj = dirs @ c
        disc = self.radius**2 - (c @ c - proj**2)
        if np.any(disc <= 0):
            raise ValueError("ball is not star shaped around the origin")
        return proj + np.sqrt(disc)

    def sample(self, rng, count):
        return np.asarray(self.center) + self.radius * sample_unit_ball(rng, count, self.n)

    # affine map R*u + c from the unit ball, for mapped-domain campaigns
    def map_from_ball(self, u):
        return np.asarray(self.center) + self.radius * np.atleast_2d(u)

    def jacobian_eigenvalues(self, u):
        u = np.atleast_2d(u)
        return np.full((len(u), self.n), self.radius)

    def spec_string(self):
        parts = [f"n={self.n}", f"r={_fmt(self.radius)}"]
        if any(v != 0.0 for v in self.center):
            parts += [f"c{i}={_fmt(v)}" for i, v in enumerate(self.center)]
        return "ball(" + ",".join(parts) + ")"


@dataclass(frozen=True)
class Ellipsoid:
    semi_axes: tuple

    def __post_init__(self):
        a = tuple(float(v) for v in self.semi_axes)
        if len(a) < 2:
            raise ValueError("need n >= 2 semi-axes")
        if any(v <= 0 for v in a):
            raise ValueError("semi-axes must be positive")
        object.__setattr__(self, "semi_axes", a)

    @property
    def dimension(self):
        return len(self.semi_axes)

    def volume(self):
        return unit_ball_volume(self.dimension) * float(np.prod(self.semi_axes))

    def inradius(self):
        return min(self.semi_axes)

    def contains(self, pts, tol=0.0):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        a = np.asarray(self.semi_axes)
        lvl = np.sqrt(np.sum((pts / a) ** 2, axis=1))
        return lvl <= 1.0 - tol / max(self.semi_axes)

    def boundary_radius(self, dirs):
        dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
        a = np.asarray(self.semi_axes)
        return 1.0 / np.sqrt(np.sum((dirs / a) ** 2, axis=1))

    def boundary_distance(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        a = np.asarray(self.semi_axes)
        generic = np.all(np.abs(pts) > 1e-12, axis=1)
        out = np.empty(len(pts))
        if generic.any():
            out[generic] = self._distance_generic(pts[generic], a)
        for i in np.nonzero(~generic)[0]:
            out[i] = self._distance_one(pts[i])
        return out

    def _distance_generic(self, pts, a):
        """Vectorized bisection of sum_i (a_i p_i/(a_i^2+t))^2 = 1; valid when
        every coordinate is nonzero (then the root gives the global nearest
        boundary point)."""
        lvl = np.sum((pts / a) ** 2, axis=1)
        if np.any(lvl > 1.0 + 1e-12):
            raise OutsideDomain("point outside the ellipsoid")
        t_lo_base = -float(np.min(a) ** 2)
        lo = np.full(len(pts), t_lo_base * (1.0 - 1e-15))
        # push lo toward the pole until F(lo) >= 1
        for _ in range(60):
            F = np.sum((a * pts / (a**2 + lo[:, None])) ** 2, axis=1)
            need = F < 1.0
            if not need.any():
                break
            lo[need] = t_lo_base + (lo[need] - t_lo_base) * 0.05
        hi = np.zeros(len(pts))
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            F = np.sum((a * pts / (a**2 + mid[:, None])) ** 2, axis=1)
            gt = F > 1.0
            lo = np.where(gt, mid, lo)
            hi = np.where(gt, hi, mid)
        t = 0.5 * (lo + hi)
        x = a**2 * pts / (a**2 + t[:, None])
        return np.linalg.norm(x - pts, axis=1)

    def _distance_one(self, p):
        """Exact interior distance: 1-d root of the projected stationarity
        equation, plus the off-axis candidates that take over inside the
        evolute when some coordinate vanishes."""
        a = np.asarray(self.semi_axes)
        lvl = float(np.sum((p / a) ** 2))
        if lvl > 1.0 + 1e-12:
            raise OutsideDomain("point outside the ellipsoid")
        nz = np.abs(p) > 1e-14
        best = math.inf
        if nz.any():
            an, pn = a[nz], p[nz]
            t_lo = -float(np.min(an) ** 2)

            def F(t):
                return float(np.sum((an * pn / (an**2 + t)) ** 2)) - 1.0

            lo, hi = t_lo, 0.0
            f_hi = F(0.0)
            if f_hi >= 0.0:
                x = np.where(nz, a**2 * p / (a**2 + 0.0), 0.0)  # boundary point
                best = 0.0
            else:
                # F decreasing from +inf on (t_lo, 0]; bisect the unique root
                lo_eval = t_lo + (hi - t_lo) * 1e-15
                while F(lo_eval) < 0.0 and (hi - t_lo) > 1e-300:
                    lo_eval = t_lo + (lo_eval - t_lo) * 0.1
                    if lo_eval - t_lo < 1e-280 * max(1.0, -t_lo):
                        break
                lo = lo_eval
                for _ in range(200):
                    mid = 0.5 * (lo + hi)
                    if F(mid) > 0.0:
                        lo = mid
                    else:
                        hi = mid
                t = 0.5 * (lo + hi)
                x = np.where(nz, a**2 * p / (a**2 + t), 0.0)
                best = float(np.linalg.norm(x - p))
        # candidates with a vanishing-coordinate axis engaged
        for j in np.nonzero(~nz)[0]:
            t = -a[j] ** 2
            denom = a**2 + t
            ok = np.abs(denom) > 1e-14
            if not np.all(ok | ~nz):
                continue
            x = np.zeros_like(p)
            x[nz] = (a[nz] ** 2) * p[nz] / denom[nz]
            rem = 1.0 - float(np.sum((x[nz] / a[nz]) ** 2))
            if rem <= 0.0:
                continue
            x[j] = a[j] * math.sqrt(rem)
            best = min(best, float(np.linalg.norm(x - p)))
        return best

    def sample(self, rng, count):
        return sample_unit_ball(rng, count, self.dimension) * np.asarray(self.semi_axes)

    def map_from_ball(self, u):
        return np.atleast_2d(u) * np.asarray(self.semi_axes)

    def jacobian_eigenvalues(self, u):
        u = np.atleast_2d(u)
        return np.tile(np.asarray(self.semi_axes), (len(u), 1))

    def spec_string(self):
        keys = "abcd"
        return "ellipsoid(" + ",".join(
            f"{keys[i]}={_fmt(v)}" for i, v in enumerate(self.semi_axes)) + ")"


@dataclass(frozen=True)
class RadialMapDomain:
    """Image of the unit ball under x = g(|u|) u with g(t) = base + quad t^2."""

    n: int
    base: float = 1.0
    quad: float = 0.0
    mesh: int = 512

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need n >= 2")
        if self.base <= 0 or self.quad < 0:
            raise ValueError("need g(0) = base > 0 and quad >= 0 (g increasing)")

    @property
    def dimension(self):
        return self.n

    def g(self, t):
        t = np.asarray(t, dtype=float)
        return self.base + self.quad * t**2

    def g_prime(self, t):
        t = np.asarray(t, dtype=float)
        return 2.0 * self.quad * t

    def outer_radius(self):
        return float(self.g(1.0))

    def volume(self):
        return unit_ball_volume(self.n) * self.outer_radius() ** self.n

    def inradius(self):
        return self.outer_radius()

    def contains(self, pts, tol=0.0):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.linalg.norm(pts, axis=1) <= self.outer_radius() - tol

    def boundary_radius(self, dirs):
        dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
        return np.full(len(dirs), self.outer_radius())

    def boundary_distance(self, pts):
        """Mesh over boundary directions with two local refinement passes."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        R = self.outer_radius()
        if np.any(np.linalg.norm(pts, axis=1) > R + 1e-12):
            raise OutsideDomain("point outside the mapped domain")
        dirs = unit_directions(self.n, self.mesh)
        bdry = R * dirs
        out = np.empty(len(pts))
        for i, p in enumerate(pts):
            d2 = np.sum((bdry - p) ** 2, axis=1)
            j = int(np.argmin(d2))
            best_dir = dirs[j]
            best = math.sqrt(d2[j])
            # local refinement: spherical-cap grids shrinking twice
            for span in (2.0 * math.pi / self.mesh, 2.0 * math.pi / self.mesh**2):
                cand = _cap_directions(best_dir, span, 33)
                d2c = np.sum((R * cand - p) ** 2, axis=1)
                jj = int(np.argmin(d2c))
                if d2c[jj] < best**2:
                    best = math.sqrt(d2c[jj])
                    best_dir = cand[jj]
            out[i] = best
        return out

    def sample(self, rng, count):
        return self.outer_radius() * sample_unit_ball(rng, count, self.n)

    def map_from_ball(self, u):
        u = np.atleast_2d(np.asarray(u, dtype=float))
        t = np.linalg.norm(u, axis=1, keepdims=True)
        return self.g(t) * u

    def jacobian_eigenvalues(self, u):
        """Spectrum of the symmetric Jacobian: g(t) with multiplicity n-1
        (orthogonal to u) and g(t) + t g'(t) along u."""
        u = np.atleast_2d(np.asarray(u, dtype=float))
        t = np.linalg.norm(u, axis=1)
        lam = np.empty((len(u), self.n))
        lam[:, : self.n - 1] = self.g(t)[:, None]
        lam[:, self.n - 1] = self.g(t) + t * self.g_prime(t)
        return lam

    def spec_string(self):
        return f"radialmap(n={self.n},base={_fmt(self.base)},quad={_fmt(self.quad)})"


def _cap_directions(center_dir, span, count):
    """Directions within angular radius span around center_dir."""
    n = len(center_dir)
    rng = np.random.default_rng(0xC0FFEE)
    tangents = rng.standard_normal((count, n))
    tangents -= np.outer(tangents @ center_dir, center_dir)
    norms = np.linalg.norm(tangents, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    tangents /= norms
    angles = np.linspace(0.0, span, count)
    cand = (np.cos(angles)[:, None] * center_dir[None, :]
            + np.sin(angles)[:, None] * tangents)
    return cand / np.linalg.norm(cand, axis=1, keepdims=True)


def _fmt(v):
    return format(float(v), "g")


def distance_to_boundary(domain, p):
    """Distance from an interior point to the domain boundary."""
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    pts = np.atleast_2d(p)
    if not np.all(domain.contains(pts, tol=-1e-12)):
        raise OutsideDomain("point not inside the domain")
    d = domain.boundary_distance(pts)
    return float(d[0]) if single else d


@dataclass(frozen=True)
class JacobianBounds:
    c12: float
    sample_count: int

    def __post_init__(self):
        if not (self.c12 >= 1.0):
            raise ValueError("c12 must be >= 1")


def estimate_jacobian_bounds(domain, samples=10_000, seed=2024):
    """Two-sided eigenvalue bound c12 for the map from the unit ball.

    c12 = max over sampled u of max(lambda_max, 1/lambda_min), inflated by a
    declared 5% safety factor.  Eigenvalues <= 0 raise DegenerateJacobian
    (the maps here have symmetric positive-definite Jacobians by design).
    """
    if samples < 1000:
        raise ValueError("need at least 10^3 samples")
    rng = np.random.default_rng(seed)
    u = sample_unit_ball(rng, samples, domain.dimension)
    lam = domain.jacobian_eigenvalues(u)
    if np.any(lam <= 0.0):
        raise DegenerateJacobian("Jacobian eigenvalue <= 0 on a sample")
    raw = max(float(np.max(lam)), float(1.0 / np.min(lam)))
    return JacobianBounds(c12=_SAFETY * max(raw, 1.0 / _SAFETY), sample_count=samples)


@dataclass(frozen=True)
class NestedPair:
    """Convex inner domain compactly inside an outer domain."""

    outer: object
    inner: object
    boundary_mesh: int = 720

    def __post_init__(self):
        if self.outer.dimension != self.inner.dimension:
            raise ValueError("dimension mismatch")
        dirs = unit_directions(self.inner.dimension, self.boundary_mesh)
        z = self.inner.boundary_radius(dirs)[:, None] * dirs
        if not np.all(self.outer.contains(z, tol=1e-12)):
            raise ValueError("closure(inner) must be contained in outer")

    @property
    def dimension(self):
        return self.outer.dimension

    def inner_boundary_points(self, count=None):
        dirs = unit_directions(self.dimension, count or self.boundary_mesh)
        return self.inner.boundary_radius(dirs)[:, None] * dirs

    def sup_inner_distance(self):
        """c3: the largest boundary distance inside the inner domain."""
        return self.inner.inradius()

    def spec_string(self):
        return f"pair(outer={self.outer.spec_string()},inner={self.inner.spec_string()})"


def clearance_radius(pair: NestedPair):
    """kappa: the smallest outer-boundary distance over the inner boundary.

    Exact for ball-in-ball; otherwise a direction mesh with two refinement
    passes around the argmin.
    """
    outer, inner = pair.outer, pair.inner
    if isinstance(outer, Ball) and isinstance(inner, Ball):
        off = float(np.linalg.norm(np.asarray(inner.center) - np.asarray(outer.center)))
        kappa = outer.radius - (off + inner.radius)
        if kappa <= 0:
            raise EmptyGap("no clearance between inner and outer boundaries")
        return kappa

    best_kappa, best_dir = math.inf, None
    dirs = unit_directions(pair.dimension, pair.boundary_mesh)
    z = inner.boundary_radius(dirs)[:, None] * dirs
    rho = outer.boundary_distance(z)
    j = int(np.argmin(rho))
    best_kappa, best_dir = float(rho[j]), dirs[j]
    span0 = 2.0 * math.pi / pair.boundary_mesh
    for span in (span0, span0 / 16.0):
        cand = _cap_directions(best_dir, span, 65)
        zc = inner.boundary_radius(cand)[:, None] * cand
        rc = outer.boundary_distance(zc)
        jj = int(np.argmin(rc))
        if rc[jj] < best_kappa:
            best_kappa, best_dir = float(rc[jj]), cand[jj]
    if best_kappa <= 0:
        raise EmptyGap("no clearance between inner and outer boundaries")
    return best_kappa
