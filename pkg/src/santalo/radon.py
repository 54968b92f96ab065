"""Hyperplane sections of convex bodies.

radon(K, theta, t) is the (N-1)-volume of the slice {x in K : x.theta = t}.
Balls and ellipsoids have closed forms; polytopes are sliced by collecting
edge crossings and hulling them in an orthonormal frame of the hyperplane;
linear images reduce to their base body by a change of variables.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize
from scipy.spatial import ConvexHull, QhullError

from . import config
from .bodies import (Ball, BodyError, ConvexBody, Ellipsoid, HPolytope,
                     LinearImage, LpBall, VPolytope, check_direction, support)
from .measure import unit_ball_volume, volume

QUAD_OPTS = dict(epsabs=1e-12, epsrel=1e-10, limit=200)


@dataclass(frozen=True)
class RadonProfile:
    """Sampled section-volume curve t -> S_K(t, theta) for one direction."""
    theta: np.ndarray
    t_grid: np.ndarray
    values: np.ndarray
    closed_form: str | None = None

    def integral(self):
        """Trapezoid integral over the grid; approximates vol(K)."""
        return float(np.trapezoid(self.values, self.t_grid))


def _hyperplane_frame(theta):
    """Orthonormal basis of theta-perp, deterministic in theta."""
    n = theta.shape[0]
    _, _, vt = np.linalg.svd(theta.reshape(1, n))
    return vt[1:]


def _polytope_slice(vertices, theta, t):
    """(N-1)-volume of conv(vertices) cut by {x.theta = t}.

    The slice polytope is the hull of the plane's crossings with all
    vertex-vertex segments plus any vertices lying on the plane; every
    true slice vertex is an edge crossing, and all other collected points
    lie inside the slice, so the hull is exact.
    """
    v = np.asarray(vertices, float)
    n = v.shape[1]
    scale = np.abs(v).max()
    tol = config.GEOM_ATOL * max(scale, 1.0)
    d = v @ theta - t
    pts = [v[np.abs(d) <= tol]]
    neg, pos = np.where(d < -tol)[0], np.where(d > tol)[0]
    if len(neg) and len(pos):
        di, dj = d[neg][:, None], d[pos][None, :]
        s = di / (di - dj)                       # crossing parameter in (0, 1)
        cross = v[neg][:, None, :] + s[..., None] * (v[pos][None, :, :] - v[neg][:, None, :])
        pts.append(cross.reshape(-1, n))
    pts = np.vstack(pts)
    if pts.shape[0] < n:
        return 0.0
    coords = pts @ _hyperplane_frame(theta).T
    if n == 2:
        return float(coords.max() - coords.min())
    try:
        return float(ConvexHull(coords).volume)
    except QhullError:
        return 0.0                               # lower-dimensional touch


def _chord_length_2d(body, theta, t):
    """Chord length of a generic planar body along {x.theta = t}, found by
    minimizing the gauge on the line and bisecting to the two crossings."""
    psi = _hyperplane_frame(theta)[0]
    h_psi = support(body, psi)

    def g(s):
        return float(body.gauge_values(t * theta + s * psi))

    res = optimize.minimize_scalar(g, bounds=(-h_psi, h_psi), method="bounded",
                                   options={"xatol": 1e-13})
    if res.fun > 1.0:
        return 0.0

    def crossing(lo, hi):
        # g(lo) <= 1 < g(hi); bisect for g = 1
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if g(mid) <= 1.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    s0 = res.x
    upper = crossing(s0, h_psi + 1e-9) if g(h_psi) > 1.0 else h_psi
    lower = crossing(s0, -h_psi - 1e-9) if g(-h_psi) > 1.0 else -h_psi
    return float(upper - lower)


def _as_sliceable_polytope(body):
    if isinstance(body, VPolytope):
        return body.vertices
    if isinstance(body, HPolytope):
        return body.vertices
    if isinstance(body, LpBall) and (body.p == 1.0 or math.isinf(body.p)):
        return body.as_vpolytope().vertices
    return None


def radon(body, theta, t):
    """Section volume S_K(t, theta) = vol_{N-1}({x in K : x.theta = t})."""
    n = body.dim
    theta = check_direction(theta, n)
    t = float(t)
    h = support(body, theta)
    if abs(t) >= h:
        return 0.0
    if n == 1:
        return 1.0                               # 0-dimensional counting measure
    if isinstance(body, Ball) or (isinstance(body, LpBall) and body.p == 2.0):
        r = body.radius
        return unit_ball_volume(n - 1) * (r * r - t * t) ** ((n - 1) / 2.0)
    if isinstance(body, Ellipsoid):
        det_fac = 1.0 / math.sqrt(float(np.linalg.det(body.shape)))
        return (unit_ball_volume(n - 1) * det_fac / h
                * (1.0 - (t / h) ** 2) ** ((n - 1) / 2.0))
    if isinstance(body, LinearImage):
        phi = body.matrix.T @ theta
        nphi = float(np.linalg.norm(phi))
        return body.det_abs / nphi * radon(body.base, phi / nphi, t / nphi)
    verts = _as_sliceable_polytope(body)
    if verts is not None:
        return _polytope_slice(verts, theta, t)
    if n == 2:
        return _chord_length_2d(body, theta, t)
    raise BodyError(f"no section rule for {type(body).__name__} in dimension {n}")


def _radon_curve(body, theta, ts):
    """Vectorized radon over a t array (closed forms) with scalar fallback."""
    n = body.dim
    ts = np.asarray(ts, float)
    h = support(body, theta)
    if isinstance(body, Ball) or (isinstance(body, LpBall) and body.p == 2.0):
        r = body.radius
        return unit_ball_volume(n - 1) * np.maximum(r * r - ts * ts, 0.0) ** ((n - 1) / 2.0)
    if isinstance(body, Ellipsoid):
        det_fac = 1.0 / math.sqrt(float(np.linalg.det(body.shape)))
        frac = np.maximum(1.0 - (ts / h) ** 2, 0.0)
        return unit_ball_volume(n - 1) * det_fac / h * frac ** ((n - 1) / 2.0)
    if isinstance(body, LinearImage):
        phi = body.matrix.T @ theta
        nphi = float(np.linalg.norm(phi))
        return body.det_abs / nphi * _radon_curve(body.base, phi / nphi, ts / nphi)
    return np.array([radon(body, theta, float(t)) for t in ts])


def radon_profile(body, theta, n_samples):
    """Sample the section curve on a uniform grid spanning [-h, h]."""
    if n_samples < 3:
        raise ValueError("n_samples must be >= 3")
    theta = check_direction(theta, body.dim)
    h = support(body, theta)
    ts = np.linspace(-h, h, n_samples)
    closed = "ball" if isinstance(body, Ball) else None
    return RadonProfile(theta=theta, t_grid=ts,
                        values=_radon_curve(body, theta, ts), closed_form=closed)


def section_tail(body, theta, t):
    """Cap volume D_K(t, theta): integral of the section curve from t*h to h,
    h = support(K, theta); t is the depth fraction in [0, 1]."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"depth fraction must be in [0, 1], got {t}")
    theta = check_direction(theta, body.dim)
    h = support(body, theta)
    if t >= 1.0:
        return 0.0
    val, _ = integrate.quad(lambda r: radon(body, theta, r), t * h, h, **QUAD_OPTS)
    return max(float(val), 0.0)


@lru_cache(maxsize=None)
def _half_profile_integral(n, t):
    val, _ = integrate.quad(lambda s: (1.0 - s * s) ** ((n - 1) / 2.0), t, 1.0,
                            **QUAD_OPTS)
    return val


def ball_tail_reference(n, t, vol_body):
    """Direction-independent cap-volume target for equality diagnostics:
    kappa_{N-1} * vol(K) / vol(B) * integral_t^1 (1 - s^2)^{(N-1)/2} ds.

    With vol(K) = vol(B) this reduces to the cap volume of the unit ball,
    so it must agree with section_tail on balls.
    """
    if n < 2:
        raise ValueError("dimension must be >= 2")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"depth fraction must be in [0, 1], got {t}")
    const = unit_ball_volume(n - 1) * vol_body / unit_ball_volume(n)
    return const * _half_profile_integral(n, float(t))
