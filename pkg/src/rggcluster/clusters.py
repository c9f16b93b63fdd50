"""Fixed-radius component census and the origin-cluster sampler.

The census hashes points into a grid of cell side exactly r, links pairs at
distance <= r across the 3^d cell neighborhood with union-find (union by
size, path compression), and tallies root sizes.  A quadratic brute-force
twin serves as the test oracle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._parallel import parallel_map, split_ranges
from ._rng import ROLE_COUNT, ROLE_POINTS, stream
from .geometry import as_points, unit_ball_volume


@dataclass(frozen=True)
class ClusterCensus:
    """Map from component order to component count for a graph G(X, r)."""

    counts: dict[int, int]
    total_points: int
    radius: float

    def count(self, order: int) -> int:
        return self.counts.get(order, 0)

    def __post_init__(self):
        if sum(k * v for k, v in self.counts.items()) != self.total_points:
            raise ValueError("census does not conserve the point count")


def _census_from_roots(roots: np.ndarray, r: float) -> ClusterCensus:
    n = roots.size
    member_counts = np.bincount(roots, minlength=n)
    sizes = member_counts[member_counts > 0]
    orders, freq = np.unique(sizes, return_counts=True)
    return ClusterCensus({int(o): int(f) for o, f in zip(orders, freq)}, n, r)


def _resolve_roots(parent: list[int]) -> np.ndarray:
    par = np.asarray(parent)
    while True:
        grand = par[par]
        if np.array_equal(grand, par):
            return par
        par = grand


def _half_offsets(d: int) -> list[tuple[int, ...]]:
    # offsets lexicographically greater than zero: each unordered cell pair
    # is scanned exactly once
    out = []
    for off in itertools.product((-1, 0, 1), repeat=d):
        if off > (0,) * d:
            out.append(off)
    return out


def _union_edges(parent: list[int], size: list[int], ii: np.ndarray, jj: np.ndarray) -> None:
    for a, b in zip(ii.tolist(), jj.tolist()):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            if size[a] < size[b]:
                a, b = b, a
            parent[b] = a
            size[a] += size[b]


def _candidate_pairs(cells: np.ndarray, max_key: float = 4e18):
    """Yield (i, j) candidate index pairs from the 3^d cell neighborhood."""
    n, d = cells.shape
    rel = cells - cells.min(axis=0)
    extents = rel.max(axis=0).astype(np.int64) + 2
    if float(np.prod(extents.astype(float))) > max_key:
        raise OverflowError("grid too fine to pack cell keys")
    key = rel[:, 0].astype(np.int64)
    for axis in range(1, d):
        key = key * extents[axis] + rel[:, axis]
    order = np.argsort(key, kind="stable")
    sorted_key = key[order]
    all_idx = np.arange(n)
    for off in [(0,) * d] + _half_offsets(d):
        shifted = rel + np.asarray(off, dtype=np.int64)
        if ((shifted < 0) | (shifted >= extents)).any(axis=1).any():
            valid = ~((shifted < 0) | (shifted >= extents)).any(axis=1)
        else:
            valid = np.ones(n, dtype=bool)
        tkey = shifted[:, 0].astype(np.int64)
        for axis in range(1, d):
            tkey = tkey * extents[axis] + shifted[:, axis]
        lo = np.searchsorted(sorted_key, tkey, side="left")
        hi = np.searchsorted(sorted_key, tkey, side="right")
        cnt = np.where(valid, hi - lo, 0)
        total = int(cnt.sum())
        if total == 0:
            continue
        ends = np.cumsum(cnt)
        flat = np.arange(total) - np.repeat(ends - cnt, cnt) + np.repeat(lo, cnt)
        jj = order[flat]
        ii = np.repeat(all_idx, cnt)
        if off == (0,) * d:
            keep = ii < jj
            ii, jj = ii[keep], jj[keep]
        yield ii, jj


def component_census(points, r: float) -> ClusterCensus:
    """Exact component-order census of G(points, r).

    Near-linear for bounded local density: candidate pairs come only from
    the 3^d neighborhood of each occupied grid cell (cell side exactly r,
    so an edge spans at most one cell boundary per axis), and distances are
    compared squared against r^2.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    raw = np.asarray(points, dtype=float)
    if raw.size == 0:
        return ClusterCensus({}, 0, r)
    pts = np.atleast_2d(raw)
    n = pts.shape[0]
    cells = np.floor(pts / r).astype(np.int64)
    parent = list(range(n))
    size = [1] * n
    r2 = r * r
    for ii, jj in _candidate_pairs(cells):
        d2 = ((pts[ii] - pts[jj]) ** 2).sum(axis=1)
        keep = d2 <= r2
        if keep.any():
            _union_edges(parent, size, ii[keep], jj[keep])
    return _census_from_roots(_resolve_roots(parent), r)


def brute_force_census(points, r: float) -> ClusterCensus:
    """Quadratic oracle: all-pairs distances plus graph traversal."""
    if r <= 0:
        raise ValueError("radius must be positive")
    raw = np.asarray(points, dtype=float)
    if raw.size == 0:
        return ClusterCensus({}, 0, r)
    pts = np.atleast_2d(raw)
    n = pts.shape[0]
    if n > 10_000:
        raise ValueError("brute-force census is guarded at 10,000 points")
    r2 = r * r
    label = np.full(n, -1, dtype=np.int64)
    next_label = 0
    for start in range(n):
        if label[start] >= 0:
            continue
        stack = [start]
        label[start] = next_label
        while stack:
            i = stack.pop()
            d2 = ((pts - pts[i]) ** 2).sum(axis=1)
            for j in np.nonzero((d2 <= r2) & (label < 0))[0]:
                label[j] = next_label
                stack.append(int(j))
        next_label += 1
    return _census_from_roots(label, r)


def cluster_diameter(c) -> float:
    """Maximum pairwise Euclidean distance; a single point has diameter 0."""
    pts = as_points(c)
    if pts.shape[0] == 0:
        raise ValueError("empty configuration")
    if pts.shape[0] == 1:
        return 0.0
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
    return math.sqrt(float(d2.max()))


@dataclass(frozen=True, eq=False)
class OriginClusterResult:
    """Origin component of a Boolean model draw, or a window-bound flag.

    ``size is None`` means the component could not be certified within the
    simulation window (treated downstream as "order larger than k_max").
    """

    lam: float
    size: int | None
    cluster: np.ndarray | None

    @property
    def exceeded(self) -> bool:
        return self.size is None


def _window_points(lam: float, d: int, n_shells: int, seed: int, replicate: int) -> np.ndarray:
    """Poisson points of intensity lam on the ball of radius n_shells.

    Points are drawn annulus by annulus (unit-width shells) with a fixed
    per-shell consumption pattern, so enlarging the window appends shells
    without disturbing the points of the inner ones.
    """
    theta = unit_ball_volume(d)
    count_rng = stream(seed, replicate, ROLE_COUNT)
    point_rng = stream(seed, replicate, ROLE_POINTS)
    chunks = []
    for shell in range(n_shells):
        vol = theta * ((shell + 1) ** d - shell ** d)
        count = int(count_rng.poisson(lam * vol))
        if count == 0:
            continue
        g = point_rng.standard_normal((count, d))
        g /= np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)
        rad = (shell ** d + point_rng.random(count) * ((shell + 1) ** d - shell ** d)) ** (1.0 / d)
        chunks.append(g * rad[:, None])
    if not chunks:
        return np.zeros((0, d))
    return np.concatenate(chunks, axis=0)


def origin_cluster(lam: float, d: int, k_max: int, seed: int, replicate: int = 0) -> OriginClusterResult:
    """Origin component of the Boolean model at unit connection radius.

    Simulates the process on the window B_{k_max+1}(o), inserts the origin,
    and grows its component.  The result is exact whenever the component
    stays within B_{k_max-1}(o) with at most k_max points: any component of
    order <= k_max containing the origin fits in B_{k_max-1}(o), and every
    potential external neighbor then lies inside the window.  Otherwise the
    draw reports exceeds-window-bound.
    """
    if lam < 0:
        raise ValueError("intensity must be non-negative")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    theta = unit_ball_volume(d)
    count_rng = stream(seed, replicate, ROLE_COUNT)
    shell_counts = [int(count_rng.poisson(lam * theta))]
    # every point of the innermost shell is adjacent to the origin, so the
    # component order is at least 1 + shell_counts[0]; overflow needs no points
    if shell_counts[0] > k_max - 1:
        return OriginClusterResult(lam, None, None)
    for shell in range(1, k_max + 1):
        vol = theta * ((shell + 1) ** d - shell ** d)
        shell_counts.append(int(count_rng.poisson(lam * vol)))
    point_rng = stream(seed, replicate, ROLE_POINTS)
    chunks = []
    for shell, count in enumerate(shell_counts):
        if count == 0:
            continue
        g = point_rng.standard_normal((count, d))
        g /= np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)
        rad = (shell ** d + point_rng.random(count) * ((shell + 1) ** d - shell ** d)) ** (1.0 / d)
        chunks.append(g * rad[:, None])
    pts = np.concatenate(chunks, axis=0) if chunks else np.zeros((0, d))
    inner2 = float((k_max - 1) ** 2)
    taken = np.zeros(pts.shape[0], dtype=bool)
    cluster = [np.zeros(d)]
    frontier = np.zeros((1, d))
    while frontier.shape[0]:
        if pts.shape[0] == 0:
            break
        d2 = ((pts[None, :, :] - frontier[:, None, :]) ** 2).sum(axis=2).min(axis=0)
        new = np.nonzero((d2 <= 1.0) & ~taken)[0]
        if new.size == 0:
            break
        taken[new] = True
        added = pts[new]
        cluster.extend(added)
        if len(cluster) > k_max or (added ** 2).sum(axis=1).max() > inner2:
            return OriginClusterResult(lam, None, None)
        frontier = added
    return OriginClusterResult(lam, len(cluster), np.asarray(cluster))


def _size_histogram_worker(args: tuple[float, int, int, int, int, int]) -> np.ndarray:
    lam, d, k_max, seed, start, stop = args
    hist = np.zeros(k_max + 2, dtype=np.int64)  # slot k_max+1 counts exceeded
    for rep in range(start, stop):
        res = origin_cluster(lam, d, k_max, seed, replicate=rep)
        hist[res.size if res.size is not None else k_max + 1] += 1
    return hist


def origin_cluster_size_histogram(lam: float, d: int, k_max: int, seed: int,
                                  draws: int, workers: int | None = None) -> np.ndarray:
    """Histogram of origin-component sizes over independent draws.

    Entry k (1 <= k <= k_max) counts draws with |C| = k; entry k_max+1
    counts exceeds-window-bound draws; entry 0 is unused.  Deterministic for
    any worker count: draws are keyed by replicate index.
    """
    if draws < 1:
        raise ValueError("draws must be >= 1")
    jobs = [(lam, d, k_max, seed, a, b) for a, b in split_ranges(draws, 64)]
    parts = parallel_map(_size_histogram_worker, jobs, workers=workers)
    return np.sum(parts, axis=0)
