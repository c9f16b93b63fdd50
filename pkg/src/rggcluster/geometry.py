"""Deterministic and Monte Carlo geometric primitives.

Covers ball volumes, fixed-radius connectivity of finite point
configurations, union-of-balls volumes, and the radial energy functional

    g(z) = integral over the unit sphere of  max_i <u, z_i>^+  d(sigma)

together with its finite-scale counterpart g_r(z) = Vol(U_i B_1(r z_i) \\
B_1(o)) / r.  Configurations are plain (m, d) float arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import ROLE_SHELL, ROLE_SPHERE, ROLE_VOLUME, stream
from .estimate import Estimate

_CHUNK = 1 << 21  # max proposals per Monte Carlo batch


def unit_ball_volume(d: int) -> float:
    """Volume of the d-dimensional unit-radius ball."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def sphere_surface_measure(d: int) -> float:
    """Total surface measure of the unit sphere in R^d (= d * ball volume)."""
    return d * unit_ball_volume(d)


def as_points(points, d: int | None = None) -> np.ndarray:
    """Coerce a configuration to a finite (m, d) float array."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.ndim != 2:
        raise ValueError("configuration must be a 2-d array of points")
    if d is not None and pts.shape[1] != d:
        raise ValueError(f"points have dimension {pts.shape[1]}, expected {d}")
    if not np.isfinite(pts).all():
        raise ValueError("configuration contains non-finite coordinates")
    return pts


def connectivity(points, r: float) -> bool:
    """True iff the graph linking pairs at Euclidean distance <= r is connected.

    The edge condition is closed: ties at exactly r connect.  A single point
    counts as connected; an empty configuration is rejected.
    """
    pts = as_points(points)
    if r <= 0:
        raise ValueError("radius must be positive")
    m = pts.shape[0]
    if m == 0:
        raise ValueError("connectivity of an empty configuration is undefined")
    if m == 1:
        return True
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
    adj = d2 <= r * r
    seen = np.zeros(m, dtype=bool)
    seen[0] = True
    frontier = np.array([0])
    while frontier.size:
        reachable = adj[frontier].any(axis=0) & ~seen
        frontier = np.nonzero(reachable)[0]
        seen |= reachable
    return bool(seen.all())


def connectivity_batch(configs: np.ndarray, r: float) -> np.ndarray:
    """Vectorized connectivity for a (m, k, d) stack of small configurations."""
    configs = np.asarray(configs, dtype=float)
    if configs.ndim != 3:
        raise ValueError("expected a (m, k, d) array")
    m, k, _ = configs.shape
    if k == 1:
        return np.ones(m, dtype=bool)
    diff = configs[:, :, None, :] - configs[:, None, :, :]
    adj = (diff ** 2).sum(axis=3) <= r * r
    # reachability by k-1 rounds of boolean expansion from vertex 0
    reach = adj[:, 0, :].copy()
    for _ in range(k - 1):
        grown = np.einsum("mi,mij->mj", reach, adj) > 0
        if (grown == reach).all():
            break
        reach = grown
    return reach.all(axis=1)


def is_lex_leader(points) -> bool:
    """True iff the first listed point is the lexicographic minimum.

    Comparison is componentwise with exact floating-point ordering.
    Duplicate points are rejected: the leader would be ill-defined.
    """
    pts = as_points(points)
    if pts.shape[0] == 0:
        raise ValueError("empty configuration")
    if np.unique(pts, axis=0).shape[0] != pts.shape[0]:
        raise ValueError("duplicate points: lexicographic leader undefined")
    first = tuple(pts[0])
    return all(first <= tuple(p) for p in pts[1:])


def _union_membership(samples: np.ndarray, centers: np.ndarray, radius: float) -> np.ndarray:
    r2 = radius * radius
    inside = np.zeros(samples.shape[0], dtype=bool)
    for c in centers:
        inside |= ((samples - c) ** 2).sum(axis=1) <= r2
    return inside


def union_ball_volume(centers, radius: float, mc_samples: int, seed: int) -> Estimate:
    """Volume of a union of equal-radius balls.

    A single ball takes the closed form theta_d * radius^d (std_error 0);
    otherwise the volume is estimated by uniform rejection over the union's
    axis-aligned bounding box, which is trivially correct and keeps the
    acceptance fraction at least theta_d / 2^d per ball.
    """
    cen = as_points(centers)
    if cen.shape[0] == 0:
        raise ValueError("need at least one center")
    if radius <= 0:
        raise ValueError("radius must be positive")
    d = cen.shape[1]
    if cen.shape[0] == 1:
        return Estimate(unit_ball_volume(d) * radius ** d, 0.0, 0)
    if mc_samples <= 0:
        raise ValueError("mc_samples must be positive")
    lo = cen.min(axis=0) - radius
    hi = cen.max(axis=0) + radius
    box = float(np.prod(hi - lo))
    rng = stream(seed, role=ROLE_VOLUME)
    hits = 0
    done = 0
    while done < mc_samples:
        m = min(mc_samples - done, _CHUNK)
        u = rng.random((m, d)) * (hi - lo) + lo
        hits += int(_union_membership(u, cen, radius).sum())
        done += m
    p = hits / mc_samples
    return Estimate(box * p, box * math.sqrt(p * (1.0 - p) / mc_samples), mc_samples)


# --- radial energy -------------------------------------------------------

MODE_CLOSED_FORM = "closed-form"
MODE_EXACT_ANGULAR = "exact-angular"
MODE_SPHERE_MC = "sphere-monte-carlo"


@dataclass(frozen=True)
class EnergyQuadrature:
    """Quadrature rule for the spherical representation of the energy.

    ``exact-angular`` (d=2) is a uniform trapezoid rule in the angle; the
    integrand is piecewise smooth, so the rule converges at second order.
    ``sphere-monte-carlo`` (d>=3) averages over uniform random directions.
    ``closed-form`` is the exact d=1 expression.
    """

    mode: str
    node_count: int = 4096
    rng_seed: int = 0

    def __post_init__(self):
        if self.mode not in (MODE_CLOSED_FORM, MODE_EXACT_ANGULAR, MODE_SPHERE_MC):
            raise ValueError(f"unknown quadrature mode {self.mode!r}")
        if self.mode == MODE_EXACT_ANGULAR and self.node_count < 16:
            raise ValueError("exact-angular quadrature needs node_count >= 16")
        if self.mode == MODE_SPHERE_MC and self.node_count < 1000:
            raise ValueError("sphere-monte-carlo quadrature needs node_count >= 1000")


def default_quadrature(d: int, node_count: int | None = None, seed: int = 0) -> EnergyQuadrature:
    """Dimension-appropriate default rule."""
    if d == 1:
        return EnergyQuadrature(MODE_CLOSED_FORM, node_count or 16)
    if d == 2:
        return EnergyQuadrature(MODE_EXACT_ANGULAR, node_count or 4096)
    return EnergyQuadrature(MODE_SPHERE_MC, node_count or 200_000, rng_seed=seed)


def _directions(quad: EnergyQuadrature, d: int) -> np.ndarray:
    if quad.mode == MODE_EXACT_ANGULAR:
        ang = np.arange(quad.node_count) * (2.0 * math.pi / quad.node_count)
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    rng = stream(quad.rng_seed, role=ROLE_SPHERE)
    g = rng.standard_normal((quad.node_count, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def quasi_grav_energy_batch(configs: np.ndarray, quad: EnergyQuadrature | None = None) -> np.ndarray:
    """Energy g for a (m, k, d) stack of configurations.

    g(z) integrates the positive support function max_i <u, z_i>^+ of the
    union of balls with opposite poles at the origin and at each z_i over
    the unit sphere.  In d=1 this collapses to max_i z_i^+ + max_i z_i^-.
    """
    configs = np.asarray(configs, dtype=float)
    if configs.ndim != 3:
        raise ValueError("expected a (m, k, d) array")
    m, k, d = configs.shape
    if k < 1 or d < 1:
        raise ValueError("configurations must be non-empty with dimension >= 1")
    if quad is None:
        quad = default_quadrature(d)
    if d == 1:
        if quad.mode != MODE_CLOSED_FORM:
            raise ValueError("d=1 energy uses the closed-form mode")
        z = configs[:, :, 0]
        return np.clip(z, 0.0, None).max(axis=1) + np.clip(-z, 0.0, None).max(axis=1)
    if d == 2 and quad.mode != MODE_EXACT_ANGULAR:
        raise ValueError("d=2 energy uses the exact-angular mode")
    if d >= 3 and quad.mode != MODE_SPHERE_MC:
        raise ValueError("d>=3 energy uses the sphere-monte-carlo mode")
    u = _directions(quad, d)
    measure = sphere_surface_measure(d)
    out = np.empty(m)
    step = max(1, _CHUNK // max(1, u.shape[0] * k // 64))
    for a in range(0, m, step):
        piece = configs[a:a + step]
        dots = np.einsum("mkd,nd->mkn", piece, u)
        out[a:a + step] = np.clip(dots, 0.0, None).max(axis=1).mean(axis=1) * measure
    return out


def quasi_grav_energy(z, quad: EnergyQuadrature | None = None) -> float:
    """Energy g of a single configuration (see quasi_grav_energy_batch)."""
    pts = as_points(z)
    if pts.shape[0] == 0:
        raise ValueError("empty configuration")
    return float(quasi_grav_energy_batch(pts[None, :, :], quad)[0])


def _interval_union_length(intervals: list[tuple[float, float]], cut: tuple[float, float]) -> float:
    """Length of (union of intervals) minus the interval ``cut``."""
    intervals = sorted(intervals)
    merged: list[list[float]] = []
    for a, b in intervals:
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    c0, c1 = cut
    total = 0.0
    for a, b in merged:
        total += (b - a) - max(0.0, min(b, c1) - max(a, c0))
    return total


def scaled_shell_energy(z, r: float, mc_samples: int, seed: int) -> Estimate:
    """Finite-scale energy g_r(z) = Vol( U_i B_1(r z_i) \\ B_1(o) ) / r.

    Exact interval arithmetic in d=1 (std_error 0); Monte Carlo over the
    union's bounding box otherwise.  Requires r in (0, 1] and
    r * max_i |z_i| <= 1, the range on which g_r approximates g.
    """
    pts = as_points(z)
    if pts.shape[0] == 0:
        raise ValueError("empty configuration")
    if not 0.0 < r <= 1.0:
        raise ValueError("r must lie in (0, 1]")
    norms = np.linalg.norm(pts, axis=1)
    if r * norms.max() > 1.0 + 1e-12:
        raise ValueError("scaled shell energy requires r * max_i |z_i| <= 1")
    if mc_samples <= 0:
        raise ValueError("mc_samples must be positive")
    d = pts.shape[1]
    if d == 1:
        ivs = [(r * float(x) - 1.0, r * float(x) + 1.0) for x in pts[:, 0]]
        return Estimate(_interval_union_length(ivs, (-1.0, 1.0)) / r, 0.0, 0)
    cen = r * pts
    lo = cen.min(axis=0) - 1.0
    hi = cen.max(axis=0) + 1.0
    box = float(np.prod(hi - lo))
    rng = stream(seed, role=ROLE_SHELL)
    hits = 0
    done = 0
    while done < mc_samples:
        m = min(mc_samples - done, _CHUNK)
        u = rng.random((m, d)) * (hi - lo) + lo
        keep = _union_membership(u, cen, 1.0)
        keep &= (u ** 2).sum(axis=1) > 1.0
        hits += int(keep.sum())
        done += m
    p = hits / mc_samples
    return Estimate(box * p / r, box * math.sqrt(p * (1.0 - p) / mc_samples) / r, mc_samples)


# --- exact low-dimensional measures --------------------------------------

def _sqrt_antideriv(x: float, r2: float) -> float:
    # antiderivative of sqrt(r2 - x^2)
    x = min(max(x, -math.sqrt(r2)), math.sqrt(r2))
    return 0.5 * (x * math.sqrt(max(r2 - x * x, 0.0)) + r2 * math.asin(x / math.sqrt(r2)))


def ball_box_measure(center, radius: float, lo, hi) -> float:
    """Exact volume of ball(center, radius) intersected with box [lo, hi].

    Supported in d=1 (interval overlap) and d=2 (piecewise circular-segment
    integration).  Higher dimensions have no closed form here; callers fall
    back to Monte Carlo.
    """
    c = np.asarray(center, dtype=float).ravel()
    lo = np.asarray(lo, dtype=float).ravel()
    hi = np.asarray(hi, dtype=float).ravel()
    d = c.size
    if radius <= 0:
        raise ValueError("radius must be positive")
    if d == 1:
        return max(0.0, min(hi[0], c[0] + radius) - max(lo[0], c[0] - radius))
    if d != 2:
        raise NotImplementedError("exact ball/box measure implemented for d <= 2 only")
    # shift so the disk is centered at the origin
    x0, x1 = lo[0] - c[0], hi[0] - c[0]
    y0, y1 = lo[1] - c[1], hi[1] - c[1]
    r2 = radius * radius
    xa, xb = max(x0, -radius), min(x1, radius)
    if xa >= xb:
        return 0.0
    # split at abscissae where the chord meets the horizontal box edges
    cuts = {xa, xb}
    for y in (y0, y1):
        if abs(y) < radius:
            w = math.sqrt(r2 - y * y)
            for x in (-w, w):
                if xa < x < xb:
                    cuts.add(x)
    xs = sorted(cuts)
    area = 0.0
    for a, b in zip(xs[:-1], xs[1:]):
        mid = 0.5 * (a + b)
        half = math.sqrt(max(r2 - mid * mid, 0.0))
        top_flat = y1 <= half
        bot_flat = y0 >= -half
        if y1 <= -half or y0 >= half:
            continue
        # upper boundary
        if top_flat:
            up = y1 * (b - a)
        else:
            up = _sqrt_antideriv(b, r2) - _sqrt_antideriv(a, r2)
        # lower boundary
        if bot_flat:
            down = y0 * (b - a)
        else:
            down = -(_sqrt_antideriv(b, r2) - _sqrt_antideriv(a, r2))
        area += up - down
    return max(area, 0.0)


def spherical_cap_volume(d: int, height_from_center: float, radius: float = 1.0) -> float:
    """Volume of the cap {x in B_radius : x_1 >= t}, t = height_from_center."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    t = height_from_center / radius
    if t >= 1.0:
        return 0.0
    if t <= -1.0:
        return unit_ball_volume(d) * radius ** d
    if d == 1:
        return (1.0 - t) * radius
    from scipy.special import betainc

    # integral_t^1 (1-x^2)^((d-1)/2) dx via the regularized incomplete beta;
    # half = integral over [0, 1]
    a, b = 0.5, (d + 1) / 2.0
    half = 0.5 * math.gamma(a) * math.gamma(b) / math.gamma(a + b)
    if t >= 0:
        part = half * (1.0 - betainc(a, b, t * t))
    else:
        part = half * (1.0 + betainc(a, b, t * t))
    return unit_ball_volume(d - 1) * part * radius ** d


def two_ball_union_volume(d: int, dist: float, radius: float = 1.0) -> float:
    """Exact volume of the union of two d-balls of equal radius at distance dist."""
    if dist < 0:
        raise ValueError("distance must be non-negative")
    ball = unit_ball_volume(d) * radius ** d
    if dist >= 2 * radius:
        return 2.0 * ball
    overlap = 2.0 * spherical_cap_volume(d, dist / 2.0, radius)
    return 2.0 * ball - overlap
