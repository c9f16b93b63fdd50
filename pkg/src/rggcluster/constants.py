"""Limit constants of the cluster-count asymptotics.

The central object is the family

    alpha_k(d) = (1/(k-1)!) * integral over (R^d)^(k-1) of exp(-g(z)) dz,

with alpha_1 = 1, where g is the radial energy from :mod:`rggcluster.geometry`.
Closed forms exist for k = 1 (any d), d = 1 (any k), and k = 2 (any d); the
general case is estimated by importance sampling.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from ._rng import ROLE_PROPOSAL, stream
from .estimate import Estimate
from .geometry import (
    EnergyQuadrature,
    connectivity_batch,
    default_quadrature,
    quasi_grav_energy_batch,
    unit_ball_volume,
)

_CHUNK = 20_000
MAX_WEIGHT_SHARE_LIMIT = 0.05


def alpha_closed_form(d: int, k: int) -> float | None:
    """Known exact values of alpha_k(d); None when no closed form exists.

    alpha_1 = 1 for every d; alpha_k(1) = k; alpha_2(d) = d! theta_d /
    theta_{d-1}^d (the k = 2 energy is exactly theta_{d-1}|z|, so the
    integral is a Gamma integral).
    """
    if d < 1 or k < 1:
        raise ValueError("d and k must be >= 1")
    if k == 1:
        return 1.0
    if d == 1:
        return float(k)
    if k == 2:
        return math.factorial(d) * unit_ball_volume(d) / unit_ball_volume(d - 1) ** d
    return None


def _proposal_radii_log_density_const(d: int) -> float:
    # proposal per point: density c_d * exp(-theta_{d-1} |z|), i.e. isotropic
    # with radius ~ Gamma(d, theta_{d-1}); c_d = theta_{d-1}^d / (d! theta_d)
    beta = unit_ball_volume(d - 1) if d >= 2 else 1.0
    return beta ** d / (math.factorial(d) * unit_ball_volume(d))


def estimate_alpha_detailed(d: int, k: int, mc_samples: int,
                            quad: EnergyQuadrature | None = None,
                            seed: int = 0) -> tuple[Estimate, dict]:
    """Importance-sampling estimate of alpha_k(d) with a heavy-tail diagnostic.

    The proposal is the product of isotropic exponentials
    q(z) = prod_i c_d exp(-theta_{d-1} |z_i|).  Since
    theta_{d-1} max_i |z_i| <= g(z) <= theta_{d-1} sum_i |z_i|,
    the weights exp(theta_{d-1} sum_i |z_i| - g(z)) are >= 1 exactly where
    the balls of the configuration overlap, which is where exp(-g) carries
    its mass; the same bound means the weight tail can be heavy, so the
    share of the largest single weight is reported and the estimate is
    flagged unreliable when it exceeds 5%.
    """
    if k < 2:
        raise ValueError("estimate_alpha needs k >= 2 (alpha_1 = 1 exactly)")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if mc_samples < 10_000:
        raise ValueError("mc_samples must be >= 10,000")
    if quad is None:
        # reduced node count relative to the geometry default, for throughput
        quad = default_quadrature(d, node_count=1024 if d == 2 else None, seed=seed + 1)
    beta = unit_ball_volume(d - 1) if d >= 2 else 1.0
    points = k - 1
    rng = stream(seed, role=ROLE_PROPOSAL)
    total = 0.0
    total_sq = 0.0
    comp = 0.0  # Kahan carry
    max_weight = 0.0
    done = 0
    while done < mc_samples:
        m = min(mc_samples - done, _CHUNK)
        radii = rng.gamma(shape=d, scale=1.0 / beta, size=(m, points))
        dirs = rng.standard_normal((m, points, d))
        dirs /= np.maximum(np.linalg.norm(dirs, axis=2, keepdims=True), 1e-300)
        z = radii[:, :, None] * dirs
        g = quasi_grav_energy_batch(z, quad)
        log_w = beta * radii.sum(axis=1) - g
        if not np.isfinite(log_w).all():
            raise RuntimeError(
                "non-finite importance weight (energy quadrature failure); "
                f"first bad configuration index {int(np.nonzero(~np.isfinite(log_w))[0][0])}"
            )
        w = np.exp(log_w)
        max_weight = max(max_weight, float(w.max()))
        chunk_sum = float(w.sum())
        y = chunk_sum - comp
        t = total + y
        comp = (t - total) - y
        total = t
        total_sq += float((w * w).sum())
        done += m
    mean_w = total / mc_samples
    var_w = max(total_sq / mc_samples - mean_w * mean_w, 0.0)
    scale = (1.0 / _proposal_radii_log_density_const(d)) ** points / math.factorial(points)
    value = scale * mean_w
    std_error = scale * math.sqrt(var_w / mc_samples)
    share = max_weight / total if total > 0 else 1.0
    reliable = share < MAX_WEIGHT_SHARE_LIMIT
    if not reliable:
        warnings.warn(
            f"alpha estimate flagged unreliable: max weight share {share:.2%} >= 5%",
            RuntimeWarning,
            stacklevel=2,
        )
    diagnostics = {"max_weight_share": share, "reliable": reliable,
                   "quad_mode": quad.mode, "quad_nodes": quad.node_count}
    return Estimate(value, std_error, mc_samples), diagnostics


def estimate_alpha(d: int, k: int, mc_samples: int,
                   quad: EnergyQuadrature | None = None, seed: int = 0) -> Estimate:
    """See estimate_alpha_detailed; this drops the diagnostics dict."""
    est, _ = estimate_alpha_detailed(d, k, mc_samples, quad, seed)
    return est


def sparse_connectivity_constant(d: int, k: int, mc_samples: int, seed: int = 0) -> Estimate:
    """Integral of the connectivity indicator h_1((o, x)) over (R^d)^(k-1).

    Uniform sampling of the box [-(k-1), k-1]^{d(k-1)}, which contains the
    support: a connected configuration through the origin at unit radius
    keeps every point within distance k-1 of the origin.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if mc_samples < 1:
        raise ValueError("mc_samples must be positive")
    points = k - 1
    half = float(k - 1)
    box_volume = (2.0 * half) ** (d * points)
    rng = stream(seed, role=ROLE_PROPOSAL)
    hits = 0
    done = 0
    while done < mc_samples:
        m = min(mc_samples - done, _CHUNK)
        x = rng.random((m, points, d)) * (2.0 * half) - half
        configs = np.concatenate([np.zeros((m, 1, d)), x], axis=1)
        hits += int(connectivity_batch(configs, 1.0).sum())
        done += m
    p = hits / mc_samples
    value = box_volume * p
    std_error = box_volume * math.sqrt(p * (1.0 - p) / mc_samples)
    return Estimate(value, std_error, mc_samples)
