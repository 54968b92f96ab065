"""Volume-product verification harness.

Treats the ellipsoid upper bound P(K) <= P(B) and the cube-family lower
bound P(K) >= 4^N/N! as falsifiable assertions: sweeps random bodies,
flags any violation beyond the numerical error budget loudly, and runs
the section-profile diagnostics that characterize the equality case.
"""

import math
from dataclasses import dataclass

import numpy as np

from .bodies import (Ball, BodyError, Ellipsoid, LpBall, VPolytope,
                     support)
from .measure import unit_ball_volume, volume, volume_product
from .radon import radon_profile, section_tail
from .records import body_hash


@dataclass(frozen=True)
class BSReport:
    body_hash: str
    dimension: int
    product: float
    p_ball: float
    ratio: float
    margin_std_errors: float
    verdict: str                     # satisfied | equality_candidate | violated
    label: str = ""


@dataclass(frozen=True)
class MahlerReport:
    body_hash: str
    dimension: int
    product: float
    bound: float
    slack: float
    std_error: float


@dataclass(frozen=True)
class DirectionFit:
    theta: np.ndarray
    alpha_hat: float
    profile_residual: float


@dataclass(frozen=True)
class EqualityDiagnostics:
    directions: tuple
    max_residual: float
    alpha_min: float
    alpha_max: float
    tail_deviation: float


def verify_bs(body, mc_samples=200_000, seed=0, label=""):
    """Volume-product report with a three-way verdict.

    equality_candidate when the ratio to the ball product is 1 within
    1e-6 (exact volumes) or two combined standard errors (Monte Carlo);
    violated only beyond five combined standard errors, never silently.
    """
    rep = volume_product(body, mc_samples, seed)
    rel_err = 0.0
    for est in (rep.vol_body, rep.vol_polar):
        if est.method != "exact" and est.value > 0:
            rel_err += est.std_error / est.value
    ratio = rep.ratio
    if rel_err == 0.0:
        margin = math.inf
        eq_band, viol_band = 1e-6, 1e-6
    else:
        margin = abs(ratio - 1.0) / rel_err
        eq_band, viol_band = 2.0 * rel_err, 5.0 * rel_err
    if ratio > 1.0 + viol_band:
        verdict = "violated"
    elif abs(ratio - 1.0) < eq_band:
        verdict = "equality_candidate"
    else:
        verdict = "satisfied"
    return BSReport(body_hash=body_hash(body), dimension=body.dim,
                    product=rep.product, p_ball=rep.reference_product,
                    ratio=ratio, margin_std_errors=margin, verdict=verdict,
                    label=label)


def mahler_check(body, mc_samples=200_000, seed=0):
    """Slack of the volume product over the cube-family floor 4^N/N!."""
    rep = volume_product(body, mc_samples, seed)
    n = body.dim
    bound = 4.0 ** n / math.factorial(n)
    err = 0.0
    for est in (rep.vol_body, rep.vol_polar):
        if est.method != "exact" and est.value > 0:
            err += est.std_error / est.value
    return MahlerReport(body_hash=body_hash(body), dimension=n,
                        product=rep.product, bound=bound,
                        slack=rep.product - bound,
                        std_error=err * rep.product)


def _fibonacci_sphere(count):
    i = np.arange(count, dtype=float)
    z = 1.0 - (2.0 * i + 1.0) / count
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def diagnostic_directions(n, n_dirs, seed=0):
    """Coordinate axes and main diagonals first (they are the worst
    directions for polytopes), then quasi-uniform sphere fill."""
    dirs = [np.eye(n)[i] for i in range(n)]
    signs = np.array(np.meshgrid(*([[-1.0, 1.0]] * (n - 1)), indexing="ij"))
    signs = signs.reshape(n - 1, -1).T if n > 1 else np.zeros((0, 0))
    for s in signs:
        d = np.concatenate([[1.0], s]) / math.sqrt(n)
        dirs.append(d)
    need = max(0, n_dirs - len(dirs))
    if need:
        if n == 3:
            dirs.extend(_fibonacci_sphere(need))
        else:
            rng = np.random.default_rng(seed)
            g = rng.standard_normal((need, n))
            dirs.extend(g / np.linalg.norm(g, axis=1, keepdims=True))
    return np.array(dirs[:max(n_dirs, len(dirs))])


def equality_diagnostics(body, n_dirs=64, n_t=16, n_profile=129, seed=0):
    """Per-direction fit of the section profile against the ball profile
    and the cross-direction spread of cap volumes.

    For ellipsoids every normalized section profile matches a scaled ball
    profile exactly (alpha 1, residual 0) and the cap volumes do not
    depend on direction; any body failing one of these is not an
    equality candidate.
    """
    if n_dirs < 8 or n_t < 8:
        raise ValueError("grids must be >= 8")
    n = body.dim
    if n < 2:
        raise BodyError("diagnostics need dimension >= 2")
    vol_k = volume(body).value
    kn, kn1 = unit_ball_volume(n), unit_ball_volume(n - 1)
    dirs = diagnostic_directions(n, n_dirs, seed)
    t_grid = np.linspace(0.0, 1.0, n_t)

    fits = []
    caps = np.empty((len(dirs), n_t))
    for i, theta in enumerate(dirs):
        h = support(body, theta)
        prof = radon_profile(body, theta, n_profile)
        ref = (kn1 / (kn * h)) * np.maximum(1.0 - (prof.t_grid / h) ** 2,
                                            0.0) ** ((n - 1) / 2.0)
        y = prof.values / vol_k
        alpha = float((y * ref).sum() / (ref * ref).sum())
        residual = float(np.abs(y - alpha * ref).max() / (alpha * ref).max())
        fits.append(DirectionFit(theta=theta, alpha_hat=alpha,
                                 profile_residual=residual))
        caps[i] = [section_tail(body, theta, float(t)) for t in t_grid]

    spread = (caps.max(axis=0) - caps.min(axis=0)) / (vol_k / 2.0)
    alphas = np.array([f.alpha_hat for f in fits])
    return EqualityDiagnostics(
        directions=tuple(fits),
        max_residual=float(max(f.profile_residual for f in fits)),
        alpha_min=float(alphas.min()), alpha_max=float(alphas.max()),
        tail_deviation=float(spread.max()))


def _hanner_recursive(axes, rng):
    """Random recursion over a coordinate set; returns (vertices embedded
    in R^N, exact volume).  An l_inf combination multiplies vertex lists
    pairwise; an l_1 combination unions them and rescales the volume by
    the mixing binomial."""
    if len(axes) == 1:
        n_total = rng.n_total
        v = np.zeros((2, n_total))
        v[0, axes[0]], v[1, axes[0]] = 1.0, -1.0
        return v, 2.0
    k = int(rng.integers(1, len(axes)))
    left, right = axes[:k], axes[k:]
    v1, vol1 = _hanner_recursive(left, rng)
    v2, vol2 = _hanner_recursive(right, rng)
    n1, n2 = len(left), len(right)
    if rng.integers(2) == 0:           # l_inf sum: cartesian product
        verts = (v1[:, None, :] + v2[None, :, :]).reshape(-1, v1.shape[1])
        return verts, vol1 * vol2
    verts = np.vstack([v1, v2])        # l_1 sum: convex hull of the union
    mix = math.factorial(n1) * math.factorial(n2) / math.factorial(n1 + n2)
    return verts, vol1 * vol2 * mix


def random_hanner(n, seed):
    """Random polytope from the segment-sum family, with its exact volume."""
    rng = np.random.default_rng(seed)
    rng.n_total = n
    axes = list(rng.permutation(n))
    verts, vol = _hanner_recursive(axes, rng)
    return VPolytope(vertices=verts), vol


def random_body(kind, n, size_param, seed):
    """Seed-deterministic random symmetric body of the requested kind."""
    if n < 1 or size_param < n:
        raise ValueError("need n >= 1 and size_param >= n")
    rng = np.random.default_rng(seed)
    if kind == "vpolytope":
        for _ in range(20):
            pts = rng.standard_normal((size_param, n))
            verts = np.vstack([pts, -pts])
            if np.linalg.matrix_rank(verts) == n:
                from .bodies import _hull_vertices
                return VPolytope(vertices=_hull_vertices(verts))
        raise BodyError("could not sample a nondegenerate vertex set")
    if kind == "hpolytope":
        from .bodies import HPolytope
        for _ in range(20):
            a = rng.standard_normal((size_param, n))
            scale = np.exp(rng.uniform(math.log(0.5), math.log(2.0),
                                       (size_param, 1)))
            a = a / np.linalg.norm(a, axis=1, keepdims=True) * scale
            normals = np.vstack([a, -a])
            if np.linalg.matrix_rank(normals) == n:
                return HPolytope(normals=normals)
        raise BodyError("could not sample a nondegenerate normal set")
    if kind == "ellipsoid":
        w = np.exp(rng.uniform(math.log(0.1), math.log(10.0), n))
        g = rng.standard_normal((n, n))
        q, r = np.linalg.qr(g)
        q = q * np.sign(np.diag(r))
        m = (q * w) @ q.T
        return Ellipsoid(shape=0.5 * (m + m.T))
    if kind == "lp_ball":
        p = math.inf if rng.random() < 0.15 else float(
            np.exp(rng.uniform(0.0, math.log(8.0))))
        radius = float(np.exp(rng.uniform(math.log(0.5), math.log(2.0))))
        return LpBall(p=p, radius=radius, dimension=n)
    if kind == "hanner":
        return random_hanner(n, seed)[0]
    raise ValueError(f"unknown body kind {kind!r}")


def sweep(family, dim, steps, seed=0, size_param=None, mc_samples=200_000):
    """Ratio curve of volume products over a body family.

    The lp family is parameterized by u in [0, 1] with 1/p = 1 - u, so
    dual exponents sit at mirrored parameters and the curve must be
    symmetric with its maximum (ratio 1) at p = 2.  Random families use
    consecutive seeds.  Returns a list of BSReport rows.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    rows = []
    if family == "lp":
        for u in np.linspace(0.0, 1.0, steps):
            p = math.inf if u >= 1.0 else 1.0 / (1.0 - u)
            body = LpBall(p=p, radius=1.0, dimension=dim)
            rows.append(verify_bs(body, mc_samples, seed, label=f"p={p:.6g}"))
        return rows
    if family in ("vpolytope", "hpolytope", "ellipsoid", "lp_ball", "hanner"):
        size = size_param or max(dim + 2, 2 * dim)
        for i in range(steps):
            body = random_body(family, dim, size, seed + i)
            rows.append(verify_bs(body, mc_samples, seed + i,
                                  label=f"{family}#{seed + i}"))
        return rows
    raise ValueError(f"unknown family {family!r}")
