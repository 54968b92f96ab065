"""Volumes, volume products, and the polar-coordinate dual-volume integral.

Exact kernels are classical closed forms (balls, ellipsoids, lp balls) or
origin-fan triangulation for polytopes at desk dimensions; Monte Carlo
rejection sampling covers everything else, with block-seeded streams so a
fixed seed reproduces bit-for-bit regardless of worker count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import config
from .bodies import (Ball, BodyError, Ellipsoid, HPolytope, LinearImage,
                     LpBall, VPolytope, polar, support)

MC_DEFAULT_SAMPLES = 200_000
MC_BLOCK_SIZE = 65_536


def unit_ball_volume(n):
    """Lebesgue volume of the Euclidean unit ball in R^n."""
    if n < 0:
        raise ValueError("dimension must be >= 0")
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def sphere_surface_area(n):
    """Surface area of the unit sphere S^{n-1} in R^n: 2 pi^{n/2}/Gamma(n/2)."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    method: str              # exact | monte_carlo | quadrature
    std_error: float = 0.0
    seed: int | None = None
    sample_count: int = 0

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("volume must be nonnegative")
        if self.method == "exact" and self.std_error != 0.0:
            raise ValueError("exact estimates must carry zero std_error")


@dataclass(frozen=True)
class VolumeProductReport:
    vol_body: VolumeEstimate
    vol_polar: VolumeEstimate
    product: float
    reference_product: float
    ratio: float


def _fan_volume(vertices):
    """Exact polytope volume by origin-apex triangulation over hull facets."""
    v = np.asarray(vertices, float)
    n = v.shape[1]
    if n == 1:
        return 2.0 * np.abs(v).max()
    try:
        hull = ConvexHull(v)
    except QhullError as e:
        raise BodyError(f"degenerate hull: {e}") from None
    dets = np.abs(np.linalg.det(v[hull.simplices]))
    return float(dets.sum() / math.factorial(n))


def _lp_ball_volume(n, p, r):
    if math.isinf(p):
        return (2.0 * r) ** n
    return (2.0 * math.gamma(1.0 / p + 1.0)) ** n * r ** n / math.gamma(n / p + 1.0)


def volume(body, mc_samples=MC_DEFAULT_SAMPLES, seed=0):
    """Volume of the body; exact when a closed form or fan triangulation
    applies, Monte Carlo above the exact-dimension cutoff."""
    n = body.dim
    if isinstance(body, Ball):
        return VolumeEstimate(unit_ball_volume(n) * body.radius ** n, "exact")
    if isinstance(body, Ellipsoid):
        det = float(np.linalg.det(body.shape))
        return VolumeEstimate(unit_ball_volume(n) / math.sqrt(det), "exact")
    if isinstance(body, LpBall):
        return VolumeEstimate(_lp_ball_volume(n, body.p, body.radius), "exact")
    if isinstance(body, VPolytope):
        if n <= config.MAX_EXACT_DIM:
            return VolumeEstimate(_fan_volume(body.vertices), "exact")
        return volume_mc(body, mc_samples, seed)
    if isinstance(body, HPolytope):
        if n <= config.MAX_EXACT_DIM:
            return VolumeEstimate(_fan_volume(body.vertices), "exact")
        return volume_mc(body, mc_samples, seed)
    if isinstance(body, LinearImage):
        base = volume(body.base, mc_samples, seed)
        return VolumeEstimate(body.det_abs * base.value, base.method,
                              body.det_abs * base.std_error, base.seed,
                              base.sample_count)
    raise BodyError(f"no volume rule for {type(body).__name__}")


def _mc_block(body, halfwidths, seed, block_index, block_len):
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                       spawn_key=(block_index,)))
    pts = rng.uniform(-1.0, 1.0, size=(block_len, body.dim)) * halfwidths
    return int(np.count_nonzero(body.gauge_values(pts) <= 1.0 + config.GEOM_ATOL))


def volume_mc(body, samples, seed, workers=None):
    """Rejection sampling in the support-function bounding box.

    Samples are drawn in fixed-size blocks whose generators derive from
    (seed, block index), so the result is reproducible for a given seed no
    matter how many workers execute the blocks.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    n = body.dim
    halfwidths = np.array([support(body, e) for e in np.eye(n)])
    box_vol = float(np.prod(2.0 * halfwidths))
    blocks = [(i, min(MC_BLOCK_SIZE, samples - i * MC_BLOCK_SIZE))
              for i in range((samples + MC_BLOCK_SIZE - 1) // MC_BLOCK_SIZE)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(lambda b: _mc_block(body, halfwidths, seed, *b), blocks))
    else:
        hits = sum(_mc_block(body, halfwidths, seed, i, m) for i, m in blocks)
    p_hat = hits / samples
    std_error = box_vol * math.sqrt(p_hat * (1.0 - p_hat) / samples)
    return VolumeEstimate(box_vol * p_hat, "monte_carlo", std_error, seed, samples)


def volume_product(body, mc_samples=MC_DEFAULT_SAMPLES, seed=0):
    """P(K) = vol(K) vol(K*), with the ball product of the same dimension
    as reference."""
    n = body.dim
    vol_k = volume(body, mc_samples, seed)
    vol_p = volume(polar(body), mc_samples, seed + 1)
    product = vol_k.value * vol_p.value
    reference = unit_ball_volume(n) ** 2
    return VolumeProductReport(vol_k, vol_p, product, reference, product / reference)


def polar_volume_polar_integral(body, n_dirs, seed):
    """vol(K*) as the spherical average of h_K^{-N}, scaled by vol(B).

    Integrating the polar body in polar coordinates gives
    vol(K*) / vol(B) = mean over the sphere of support(K, theta)^{-N};
    this is an independent cross-check of polar() followed by volume().
    """
    if n_dirs < 1:
        raise ValueError("n_dirs must be >= 1")
    n = body.dim
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n_dirs, n))
    dirs = g / np.linalg.norm(g, axis=1, keepdims=True)
    vals = body.support_values(dirs) ** (-float(n))
    kn = unit_ball_volume(n)
    mean = float(vals.mean())
    std_error = kn * float(vals.std(ddof=1)) / math.sqrt(n_dirs) if n_dirs > 1 else 0.0
    return VolumeEstimate(kn * mean, "monte_carlo", std_error, seed, n_dirs)
