"""Seeded samplers for Poisson and binomial point processes.

Domains are the unit cube [0,1]^d or the unit ball, carrying either the
uniform density or an affine profile f(x) proportional to 1 + a*x_1
(normalized on the domain).  All samplers are pure functions of their
arguments and seed; identical inputs give bit-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import ROLE_ACCEPT, ROLE_COUNT, ROLE_POINTS, ROLE_VOLUME, stream
from .estimate import Estimate
from .geometry import as_points, unit_ball_volume

_CHUNK = 1 << 21

SHAPE_CUBE = "cube"
SHAPE_BALL = "ball"
DENSITY_UNIFORM = "uniform"
DENSITY_AFFINE = "affine"


@dataclass(frozen=True)
class DomainSpec:
    """Sampling region plus density profile.

    ``cube`` is [0,1]^d; ``ball`` is the unit-radius ball at the origin.
    The affine profile is f(x) = (1 + slope*x_1) / normalization with
    slope in (-1, 1), which keeps the density strictly positive.
    Membership uses closed inequalities (the domain is compact).
    """

    shape: str
    dimension: int
    density: str = DENSITY_UNIFORM
    slope: float = 0.0

    def __post_init__(self):
        if self.shape not in (SHAPE_CUBE, SHAPE_BALL):
            raise ValueError(f"unknown shape {self.shape!r}")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.density not in (DENSITY_UNIFORM, DENSITY_AFFINE):
            raise ValueError(f"unknown density {self.density!r}")
        if self.density == DENSITY_AFFINE and not abs(self.slope) < 1.0:
            raise ValueError("affine slope must lie in (-1, 1)")
        if self.density == DENSITY_UNIFORM and self.slope != 0.0:
            raise ValueError("uniform density takes slope 0")

    def volume(self) -> float:
        return 1.0 if self.shape == SHAPE_CUBE else unit_ball_volume(self.dimension)

    def diameter(self) -> float:
        return math.sqrt(self.dimension) if self.shape == SHAPE_CUBE else 2.0

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        d = self.dimension
        if self.shape == SHAPE_CUBE:
            return np.zeros(d), np.ones(d)
        return -np.ones(d), np.ones(d)

    def _normalization(self) -> float:
        # integral of 1 + slope*x_1 over the shape
        if self.shape == SHAPE_CUBE:
            return 1.0 + self.slope / 2.0
        return self.volume()  # odd part cancels on the ball

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        if self.shape == SHAPE_CUBE:
            return ((pts >= 0.0) & (pts <= 1.0)).all(axis=1)
        return (pts ** 2).sum(axis=1) <= 1.0

    def density_at(self, points: np.ndarray) -> np.ndarray:
        """Probability density, zero outside the domain."""
        pts = np.atleast_2d(points)
        inside = self.contains(pts)
        if self.density == DENSITY_UNIFORM:
            return inside / self.volume()
        return inside * (1.0 + self.slope * pts[:, 0]) / self._normalization()

    def sample_uniform(self, rng: np.random.Generator, count: int) -> np.ndarray:
        d = self.dimension
        if self.shape == SHAPE_CUBE:
            return rng.random((count, d))
        g = rng.standard_normal((count, d))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        rad = rng.random(count) ** (1.0 / d)
        return g * rad[:, None]


def density_extremes(dom: DomainSpec) -> tuple[float, float, float]:
    """(inf over the domain, inf over the boundary, sup) of the density.

    Analytic for both supported families.  Affine densities attain their
    extremes at the extreme x_1 coordinates, which lie on the boundary of
    either shape, so the boundary infimum equals the global one.
    """
    if dom.density == DENSITY_UNIFORM:
        v = 1.0 / dom.volume()
        return (v, v, v)
    norm = dom._normalization()
    if dom.shape == SHAPE_CUBE:
        low, high = min(1.0, 1.0 + dom.slope), max(1.0, 1.0 + dom.slope)
    else:
        low, high = 1.0 - abs(dom.slope), 1.0 + abs(dom.slope)
    return (low / norm, low / norm, high / norm)


@dataclass(frozen=True, eq=False)
class ProcessSample:
    """A realized point process: (count, d) array plus provenance."""

    points: np.ndarray
    kind: str  # "poisson" | "binomial" | "homogeneous"
    intensity_or_count: float
    seed: int

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class BallWindow:
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("window radius must be positive")

    def volume(self, d: int) -> float:
        return unit_ball_volume(d) * self.radius ** d


@dataclass(frozen=True)
class BoxWindow:
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if not all(h > l for l, h in zip(self.lo, self.hi)):
            raise ValueError("window must have positive volume")

    def volume(self, d: int) -> float:
        return float(np.prod(np.asarray(self.hi) - np.asarray(self.lo)))


def sample_homogeneous(lam: float, window: BallWindow | BoxWindow, seed: int,
                       replicate: int = 0) -> ProcessSample:
    """Homogeneous Poisson process of intensity lam restricted to a window."""
    if lam < 0:
        raise ValueError("intensity must be non-negative")
    if isinstance(window, BallWindow):
        d = len(window.center)
    else:
        d = len(window.lo)
    count = int(stream(seed, replicate, ROLE_COUNT).poisson(lam * window.volume(d)))
    rng = stream(seed, replicate, ROLE_POINTS)
    if isinstance(window, BallWindow):
        g = rng.standard_normal((count, d))
        g /= np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)
        rad = window.radius * rng.random(count) ** (1.0 / d)
        pts = np.asarray(window.center) + g * rad[:, None]
    else:
        lo = np.asarray(window.lo)
        hi = np.asarray(window.hi)
        pts = rng.random((count, d)) * (hi - lo) + lo
    return ProcessSample(pts, "homogeneous", lam, seed)


def _sample_density(dom: DomainSpec, count: int, rng: np.random.Generator,
                    accept_rng: np.random.Generator) -> np.ndarray:
    """count i.i.d. points with density f, by rejection from uniform-on-shape."""
    if count == 0:
        return np.zeros((0, dom.dimension))
    if dom.density == DENSITY_UNIFORM:
        return dom.sample_uniform(rng, count)
    envelope = 1.0 + abs(dom.slope)
    out: list[np.ndarray] = []
    have = 0
    while have < count:
        want = count - have
        batch = max(64, int(want * envelope * 1.2))
        props = dom.sample_uniform(rng, batch)
        keep = accept_rng.random(batch) * envelope <= 1.0 + dom.slope * props[:, 0]
        kept = props[keep]
        out.append(kept[: want])
        have += min(len(kept), want)
    return np.concatenate(out, axis=0)


def sample_binomial(n: int, dom: DomainSpec, seed: int, replicate: int = 0) -> ProcessSample:
    """Exactly n i.i.d. density-f points on the domain."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pts = _sample_density(dom, int(n), stream(seed, replicate, ROLE_POINTS),
                          stream(seed, replicate, ROLE_ACCEPT))
    return ProcessSample(pts, "binomial", float(n), seed)


def sample_poisson_on_domain(n: float, dom: DomainSpec, seed: int, replicate: int = 0) -> ProcessSample:
    """Poisson process on the domain with intensity measure n * f(x) dx.

    The realized count is Poisson(n); n need not be an integer.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    count = int(stream(seed, replicate, ROLE_COUNT).poisson(n))
    pts = _sample_density(dom, count, stream(seed, replicate, ROLE_POINTS),
                          stream(seed, replicate, ROLE_ACCEPT))
    return ProcessSample(pts, "poisson", float(n), seed)


def nu_ball_union(dom: DomainSpec, centers, radius: float, mc_samples: int, seed: int,
                  replicate: int = 0) -> Estimate:
    """nu-measure of (union of balls) within the domain.

    Estimates integral of f over A intersected with U_i B_radius(c_i) by
    uniform sampling of the union's bounding box, accumulating f at points
    that land inside the union (density_at is zero outside A).
    """
    cen = as_points(centers, dom.dimension)
    if cen.shape[0] == 0:
        raise ValueError("need at least one center")
    if radius <= 0:
        raise ValueError("radius must be positive")
    if mc_samples <= 0:
        raise ValueError("mc_samples must be positive")
    lo = cen.min(axis=0) - radius
    hi = cen.max(axis=0) + radius
    box = float(np.prod(hi - lo))
    rng = stream(seed, replicate, ROLE_VOLUME)
    r2 = radius * radius
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < mc_samples:
        m = min(mc_samples - done, _CHUNK)
        u = rng.random((m, dom.dimension)) * (hi - lo) + lo
        in_union = np.zeros(m, dtype=bool)
        for c in cen:
            in_union |= ((u - c) ** 2).sum(axis=1) <= r2
        vals = np.where(in_union, dom.density_at(u), 0.0)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        done += m
    mean = total / mc_samples
    var = max(total_sq / mc_samples - mean * mean, 0.0)
    return Estimate(box * mean, box * math.sqrt(var / mc_samples), mc_samples)
