"""Integration engines used by every other module.

Deterministic engines
---------------------
* ``integrate_1d``           -- adaptive tanh-sinh (double exponential) rule on a
  finite interval; tolerates endpoint power singularities milder than x^-1 and
  logarithmic singularities without being told the exponent.
* ``integrate_semi_infinite`` -- split at t=1, compactify the tail with
  t = u/(1-u); the u -> 1/u symmetry of several integrands in this project then
  lands on a plain finite-interval problem.
* ``integrate_diagonal_double`` -- double integrals on the unit square whose
  integrand concentrates on the diagonal r = s; symmetric dyadic strips
  |r-s| in [band*2^k, band*2^(k+1)] are integrated separately and the below-band
  tail is estimated geometrically.  Non-decaying strip sums are diagnosed as a
  non-integrable diagonal (DiagonalDivergence).

Stochastic engine
-----------------
* ``mc_double_ball`` -- seeded Monte Carlo over products of unit n-balls.
  Shard seeds derive from (seed, shard index) via numpy's SeedSequence spawn
  keys; shard partial sums are combined with math.fsum, so the reduction is
  exactly rounded and therefore order independent.  Identical MCConfig gives
  bit-identical results.

Limits
------
* ``limit_extrapolate`` -- Richardson (Neville at 0) extrapolation of a
  regularization parameter eps -> 0.

Error conventions: deterministic engines report the last refinement
difference (plus any truncation estimate); the MC engine reports 3x the
sample standard error.  All integrands must be pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    InsufficientData,
    IntegralDiverges,
    NonConvergence,
    NonFiniteIntegrand,
    NonFiniteSample,
    DiagonalDivergence,
    Oscillation,
)

__all__ = [
    "QuadratureResult",
    "MCConfig",
    "LimitPolicy",
    "integrate_1d",
    "integrate_semi_infinite",
    "integrate_diagonal_double",
    "mc_double_ball",
    "limit_extrapolate",
    "sample_unit_ball",
    "unit_ball_volume",
    "SMOKE_CORPUS",
]

_HALF_PI = math.pi / 2.0
_T_MAX = 6.0          # |t| beyond this: node-to-endpoint distance underflows
_LEVEL_MAX = 11
_REL_FLOOR = 1e-15    # cannot resolve below ~machine epsilon relative


@dataclass(frozen=True)
class QuadratureResult:
    """Numeric value with an a-posteriori absolute error estimate."""

    value: float
    error_estimate: float
    evaluations: int
    notes: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (self.error_estimate >= 0.0):
            raise ValueError("error_estimate must be >= 0")
        if self.evaluations < 1:
            raise ValueError("evaluations must be >= 1")


@dataclass(frozen=True)
class MCConfig:
    """Sampling budget; identical configs give bit-identical estimates."""

    samples: int
    seed: int = 0
    shards: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.shards < 1 or self.shards > self.samples:
            raise ValueError("need 1 <= shards <= samples")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class LimitPolicy:
    """Regularization sequence for eps -> 0 limits."""

    sequence: tuple = (0.05, 0.025, 0.0125, 0.00625, 0.003125)
    extrapolation_order: int = 4

    def __post_init__(self):
        seq = tuple(self.sequence)
        if len(seq) == 0:
            raise ValueError("sequence must be nonempty")
        if any(not (0.0 < e < 1.0) for e in seq):
            raise ValueError("all regularization parameters must be in (0,1)")
        if any(b >= a for a, b in zip(seq, seq[1:])):
            raise ValueError("sequence must be strictly decreasing")
        object.__setattr__(self, "sequence", seq)


def _vector_call(f, xs, counter):
    """Evaluate f on an array, falling back to a scalar loop."""
    counter[0] += xs.size
    try:
        ys = np.asarray(f(xs), dtype=float)
        if ys.shape == xs.shape:
            return ys
    except Exception:
        pass
    return np.array([float(f(x)) for x in xs])


def _ts_geometry(ts):
    """tanh-sinh node geometry for positive t: (distance factor, weight factor).

    distance factor = 1 - tanh((pi/2) sinh t)   (distance to endpoint per unit
    half-length), weight factor = (pi/2) cosh t sech^2((pi/2) sinh t); both
    computed via exp(-2u) so they stay accurate down to the underflow edge.
    """
    u = _HALF_PI * np.sinh(ts)
    e = np.exp(-2.0 * u)
    dist = 2.0 * e / (1.0 + e)
    wt = _HALF_PI * np.cosh(ts) * (4.0 * e / (1.0 + e) ** 2)
    return dist, wt


def _scan_level0(f, a, b, counter, tol):
    """Coarse scan with h=1, extending outward until terms are negligible.

    Returns (sum0, t_reach_neg, t_reach_pos, trunc_est).  Raises
    IntegralDiverges when the outward terms keep growing: that is the
    signature of a non-integrable endpoint.
    """
    c = 0.5 * (b - a)
    m = 0.5 * (a + b)
    dist0, wt0 = _ts_geometry(np.array([0.0]))
    y0 = _vector_call(f, np.array([m]), counter)
    if not np.isfinite(y0[0]):
        raise NonFiniteIntegrand(f"f({m}) is not finite")
    total = c * wt0[0] * y0[0]

    reach = [0.0, 0.0]
    trunc = 0.0
    scale_cut = max(tol * 1e-3, _REL_FLOOR * max(abs(total), 1.0))
    for side, sgn in ((0, -1.0), (1, +1.0)):
        endpoint = "a" if sgn < 0 else "b"
        terms = []
        t = 1.0
        while t <= _T_MAX:
            dist, wt = _ts_geometry(np.array([t]))
            d = c * dist[0]
            if d <= 0.0 or (sgn < 0 and a + d == a) or (sgn > 0 and b - d == b):
                break
            x = a + d if sgn < 0 else b - d
            y = _vector_call(f, np.array([x]), counter)[0]
            if not math.isfinite(y):
                if len(terms) >= 2 and abs(terms[-1]) > abs(terms[-2]):
                    raise IntegralDiverges(
                        f"integrand blows up faster than integrable near {endpoint}"
                    )
                raise NonFiniteIntegrand(f"f({x}) is not finite")
            term = c * wt[0] * y
            terms.append(term)
            total += term
            cut = max(scale_cut, _REL_FLOOR * max(abs(total), 1.0))
            if len(terms) >= 4:
                tail = [abs(v) for v in terms[-4:]]
                if tail[-1] > cut * 1e3 and tail[0] < tail[1] < tail[2] < tail[3]:
                    raise IntegralDiverges(
                        f"terms grow toward {endpoint}; integral diverges"
                    )
            if abs(term) < cut and len(terms) >= 3 and abs(terms[-2]) < cut:
                break
            t += 1.0
        cut = max(scale_cut, _REL_FLOOR * max(abs(total), 1.0))
        if (len(terms) >= 2 and abs(terms[-1]) > abs(terms[-2])
                and abs(terms[-1]) > cut * 1e3):
            # ran out of resolvable nodes while terms still grew
            raise IntegralDiverges(
                f"terms grow toward {endpoint}; integral diverges"
            )
        reach[side] = min(t, _T_MAX)
        if terms and abs(terms[-1]) >= scale_cut:
            # truncated while decaying: geometric tail bound
            ratio = abs(terms[-1]) / max(abs(terms[-2]), 1e-300) if len(terms) > 1 else 0.5
            ratio = min(ratio, 0.9)
            trunc += abs(terms[-1]) * ratio / (1.0 - ratio)
    return total, reach[0], reach[1], trunc


def integrate_1d(f, a, b, tol=1e-10, breakpoints=(), max_level=_LEVEL_MAX):
    """Integrate f over (a,b) with adaptive tanh-sinh refinement.

    Endpoint singularities of power type milder than x^-1, and logarithmic
    ones, are handled without hints.  ``breakpoints`` splits the interval
    first (useful for interior kinks).  tol is an absolute target with a
    machine-relative floor.
    """
    if not (a < b):
        raise ValueError("need a < b")
    pts = sorted(p for p in breakpoints if a < p < b)
    if pts:
        edges = [a] + pts + [b]
        vals = [integrate_1d(f, lo, hi, tol / len(edges), (), max_level)
                for lo, hi in zip(edges[:-1], edges[1:])]
        return QuadratureResult(
            value=math.fsum(v.value for v in vals),
            error_estimate=math.fsum(v.error_estimate for v in vals),
            evaluations=sum(v.evaluations for v in vals),
        )

    counter = [0]
    c = 0.5 * (b - a)
    m = 0.5 * (a + b)
    s_prev, t_neg, t_pos, trunc = _scan_level0(f, a, b, counter, tol)
    t_reach = max(t_neg, t_pos)

    h = 1.0
    err = abs(s_prev) + trunc
    value = s_prev
    errs = []
    for level in range(1, max_level + 1):
        h *= 0.5
        # new nodes: odd multiples of h within reach
        ts = np.arange(h, t_reach + h * 0.5, 2.0 * h)
        dist, wt = _ts_geometry(ts)
        d = c * dist
        newsum = 0.0
        for sgn in (-1.0, +1.0):
            ok = (d > 0.0) & ((a + d > a) if sgn < 0 else (b - d < b))
            xs = (a + d[ok]) if sgn < 0 else (b - d[ok])
            ys = _vector_call(f, xs, counter)
            bad = ~np.isfinite(ys)
            if bad.any():
                raise NonFiniteIntegrand(f"f({xs[bad][0]}) is not finite")
            newsum += float(np.dot(wt[ok], ys))
        value = 0.5 * s_prev + h * c * newsum
        err = abs(value - s_prev)
        s_prev = value
        errs.append(err)
        floor = _REL_FLOOR * max(abs(value), 1.0)
        if err <= max(tol, floor) and level >= 2:
            return QuadratureResult(value=value,
                                    error_estimate=max(err + trunc, floor),
                                    evaluations=counter[0])
        if level >= 4 and errs[-1] > 0.2 * errs[-3]:
            # refinement plateaued: endpoint mass below float resolution;
            # return the truncated value with an honest error bar
            return QuadratureResult(value=value,
                                    error_estimate=max(err + trunc, floor),
                                    evaluations=counter[0])
    floor = _REL_FLOOR * max(abs(value), 1.0)
    if err > max(tol, 100.0 * floor):
        raise NonConvergence(
            f"tanh-sinh did not reach tol={tol} (last delta {err:.3e}) on ({a},{b})"
        )
    return QuadratureResult(value=value, error_estimate=max(err + trunc, floor),
                            evaluations=counter[0])


def integrate_semi_infinite(f, a, tol=1e-10, breakpoints=()):
    """Integrate f over (a, inf); f must decay at least like x^(-3/2).

    The range is split at t = 1 (when a < 1) and the tail is compactified by
    t = u/(1-u); in the v = 1-u variable the tail becomes an integral over
    (0, 1 - a/(1+a)) with the singular end at v = 0, which tanh-sinh handles.
    """
    if a < 0:
        raise ValueError("need a >= 0")
    parts = []
    if a < 1.0:
        parts.append(integrate_1d(f, a, 1.0, tol / 2, breakpoints=breakpoints))
        cut = 1.0
    else:
        cut = a
    v_hi = 1.0 - cut / (1.0 + cut)          # t=cut maps to u=cut/(1+cut)

    def tail(v):
        # 1/v = 1 + t exactly; multiply left-to-right so t^(-3/2)-decay
        # integrands stay finite all the way to the underflow edge
        v = np.asarray(v, dtype=float)
        t = np.minimum((1.0 - v) / np.maximum(v, 1e-308), 1e300)
        fv = np.asarray(f(t), dtype=float)
        return fv * (1.0 + t) * (1.0 + t)

    parts.append(integrate_1d(tail, 0.0, v_hi, tol / 2))
    return QuadratureResult(
        value=math.fsum(p.value for p in parts),
        error_estimate=math.fsum(p.error_estimate for p in parts),
        evaluations=sum(p.evaluations for p in parts),
    )


def _gl_cache(n, cache={}):
    if n not in cache:
        cache[n] = np.polynomial.legendre.leggauss(n)
    return cache[n]


def _gl_panel(g, lo, hi, order, counter):
    x, w = _gl_cache(order)
    xs = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x
    ys = _vector_call(g, xs, counter)
    if not np.all(np.isfinite(ys)):
        raise NonFiniteIntegrand("inner integrand not finite")
    return 0.5 * (hi - lo) * float(np.dot(w, ys))


def _gl_adaptive(g, lo, hi, tol, counter, order=24, depth=0, max_depth=10):
    """Adaptive Gauss-Legendre by interval bisection (smooth integrands)."""
    coarse = _gl_panel(g, lo, hi, order, counter)
    mid = 0.5 * (lo + hi)
    fine = _gl_panel(g, lo, mid, order, counter) + _gl_panel(g, mid, hi, order, counter)
    err = abs(fine - coarse)
    if err <= max(tol, 1e-13 * abs(fine)) or depth >= max_depth:
        return fine, err
    lv, le = _gl_adaptive(g, lo, mid, tol / 2, counter, order, depth + 1, max_depth)
    rv, re = _gl_adaptive(g, mid, hi, tol / 2, counter, order, depth + 1, max_depth)
    return lv + rv, le + re


def integrate_diagonal_double(g, tol=1e-8, band=1e-6, breakpoints=()):
    """Integrate a symmetric g over (0,1)^2 with a diagonal concentration.

    The square is decomposed into dyadic strips in u = r - s down to ``band``;
    each strip integral is 2 * int_u int_s g(s+u, s) ds du.  The below-band
    remainder is extrapolated from the geometric decay of the strip sums.
    Raises DiagonalDivergence when the strip sums do not decay (the integral
    of an H^{1/2}-type kernel against a jump discontinuity behaves this way).
    """
    counter = [0]
    edges = [1.0]
    while edges[-1] * 0.5 > band:
        edges.append(edges[-1] * 0.5)
    edges.append(band)

    bps = sorted(set(float(p) for p in breakpoints if 0.0 < p < 1.0))
    budget = 20_000_000

    def strip(lo, hi, s_tol):
        inner_tol = s_tol * 1e-2

        def H(u_arr):
            if counter[0] > budget:
                raise NonConvergence("diagonal strip decomposition exceeded its budget")
            u_arr = np.atleast_1d(np.asarray(u_arr, dtype=float))
            out = np.empty_like(u_arr)
            for i, u in enumerate(u_arr):
                cuts = set()
                for p in bps:
                    if 0.0 < p < 1.0 - u:
                        cuts.add(p)
                    if 0.0 < p - u < 1.0 - u:
                        cuts.add(p - u)
                segs = [0.0] + sorted(cuts) + [1.0 - u]
                tot = 0.0
                for s_lo, s_hi in zip(segs[:-1], segs[1:]):
                    if s_hi - s_lo < 1e-15:
                        continue
                    v, _ = _gl_adaptive(
                        lambda s, u=u: np.asarray(g(s + u, s), dtype=float),
                        s_lo, s_hi, inner_tol, counter, order=16, max_depth=8)
                    tot += v
                out[i] = tot
            return out

        val, err = _gl_adaptive(H, lo, hi, s_tol, counter, order=12, max_depth=6)
        return 2.0 * val, 2.0 * err

    strip_tol = tol / (len(edges) + 2)
    sums, errs = [], []
    for hi, lo in zip(edges[:-1], edges[1:]):
        v, e = strip(lo, hi, strip_tol)
        sums.append(v)
        errs.append(e)

    total = math.fsum(sums)
    err = math.fsum(errs)
    scale = max(abs(total), 1.0)

    # ratio diagnostics over the innermost full strips
    tail_est = 0.0
    if len(sums) >= 4:
        last = [abs(s) for s in sums[-4:]]
        if last[-1] > max(tol, 1e-14 * scale):
            ratios = [last[i + 1] / last[i] for i in range(3) if last[i] > 0]
            if ratios and min(ratios) > 0.85:
                raise DiagonalDivergence(
                    "strip sums do not decay toward the diagonal "
                    f"(last ratios {[round(r, 3) for r in ratios]}); "
                    "non-integrable diagonal growth"
                )
            rho = min(max(ratios) if ratios else 0.5, 0.85)
            tail_est = last[-1] * rho / (1.0 - rho)
    total += tail_est
    err += 0.5 * tail_est if tail_est else 0.0
    return QuadratureResult(value=total, error_estimate=max(err, _REL_FLOOR * scale),
                            evaluations=counter[0])


def unit_ball_volume(n):
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def sample_unit_ball(rng, count, n):
    """Uniform points in the unit n-ball: Gaussian direction x U^(1/n) radius."""
    g = rng.standard_normal((count, n))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    radii = rng.random(count) ** (1.0 / n)
    return g / norms * radii[:, None]


def _shard_sizes(samples, shards):
    base, rem = divmod(samples, shards)
    return [base + (1 if i < rem else 0) for i in range(shards)]


_BLOCK = 500_000


def mc_double_ball(F, n, cfg: MCConfig):
    """Unbiased MC estimate of the double integral of F over B1(0) x B1(0).

    F must accept two (N, n) arrays and return an (N,) array.  Error estimate
    is 3x the sample standard error.  Deterministic and shard-order
    independent for a fixed MCConfig.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    vol2 = unit_ball_volume(n) ** 2
    part_sums, part_sqs = [], []
    for shard, size in enumerate(_shard_sizes(cfg.samples, cfg.shards)):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed,
                                                           spawn_key=(shard,)))
        s = sq = 0.0
        left = size
        while left > 0:
            m = min(left, _BLOCK)
            x = sample_unit_ball(rng, m, n)
            y = sample_unit_ball(rng, m, n)
            vals = np.asarray(F(x, y), dtype=float)
            if not np.all(np.isfinite(vals)):
                raise NonFiniteSample(
                    "F produced a non-finite sample; excise the diagonal or mollify"
                )
            s += float(np.sum(vals))
            sq += float(np.dot(vals, vals))
            left -= m
        part_sums.append(s)
        part_sqs.append(sq)
    tot = math.fsum(part_sums)
    tot_sq = math.fsum(part_sqs)
    mean = tot / cfg.samples
    if cfg.samples > 1:
        var = max(tot_sq - tot * tot / cfg.samples, 0.0) / (cfg.samples - 1)
        se = math.sqrt(var / cfg.samples)
    else:
        se = abs(mean)
    return QuadratureResult(value=vol2 * mean, error_estimate=3.0 * vol2 * se,
                            evaluations=cfg.samples)


def limit_extrapolate(values: Sequence, policy: LimitPolicy):
    """Richardson (Neville at 0) extrapolation of (eps, value) pairs.

    ``values`` must be ordered by strictly decreasing eps.  Uses the last
    ``extrapolation_order + 1`` points.  Raises Oscillation when the final
    correction grows instead of shrinking, the signature of a divergent limit.
    """
    vals = list(values)
    order = policy.extrapolation_order
    if len(vals) < order + 1:
        raise InsufficientData(
            f"need at least {order + 1} (eps, value) pairs, got {len(vals)}"
        )
    eps = [float(e) for e, _ in vals]
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("values must be ordered by strictly decreasing eps")
    pts = vals[-(order + 1):]
    x = np.array([p[0] for p in pts])
    t = np.array([float(p[1]) for p in pts])

    estimates = [t[-1]]
    tab = t.copy()
    m = len(x)
    for j in range(1, m):
        new = np.empty(m - j)
        for i in range(m - j):
            new[i] = (x[i] * tab[i + 1] - x[i + j] * tab[i]) / (x[i] - x[i + j])
        tab = new
        estimates.append(tab[-1])
    corrections = [abs(b - a) for a, b in zip(estimates, estimates[1:])]
    scale = max(abs(estimates[-1]), 1.0)
    if len(corrections) >= 2:
        if corrections[-1] > 4.0 * corrections[-2] and corrections[-1] > 1e-9 * scale:
            raise Oscillation(
                "extrapolation residuals increase; the eps -> 0 limit looks divergent"
            )
    return float(estimates[-1])


# Analytic, non-singular reference problems on [0,1]: (integrand, exact value).
SMOKE_CORPUS = (
    (lambda x: np.ones_like(x), 1.0),
    (lambda x: x, 0.5),
    (lambda x: x**2, 1.0 / 3.0),
    (lambda x: x**7 - 3 * x**3 + 1, 1.0 / 8.0 - 3.0 / 4.0 + 1.0),
    (lambda x: np.exp(x), math.e - 1.0),
    (lambda x: np.sin(math.pi * x), 2.0 / math.pi),
    (lambda x: 1.0 / (1.0 + x**2), math.pi / 4.0),
    (lambda x: np.cos(3.0 * x), math.sin(3.0) / 3.0),
)
