"""Fourier transforms of body indicators and band-limited node models.

indicator_ft computes F_K(xi) = integral over K of e^{-2 pi i xi.x} dx:
product of sines for cubes, a Bessel radial form for balls and ellipsoids,
and the one-dimensional transform of the section curve (projection slice)
for polytopes.  BandlimitedFunction is the discrete frequency-node model
used by the extremal solvers: F(x) = sum_j g_j e^{2 pi i x.xi_j} Delta.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import jv

from . import config
from .bodies import (Ball, BodyError, ConvexBody, Ellipsoid, LinearImage,
                     LpBall, check_direction)
from .measure import unit_ball_volume, volume
from .radon import QUAD_OPTS, radon

MAX_GRID_NODES = 20_000_000


def _unit_ball_ft_radial(n, rho):
    """FT of the unit-ball indicator in R^n at radial frequency rho:
    rho^{-n/2} J_{n/2}(2 pi rho), continuous value kappa_n at rho = 0."""
    rho = np.asarray(rho, float)
    out = np.empty_like(rho)
    small = rho < 1e-9
    out[small] = unit_ball_volume(n)
    rs = rho[~small]
    out[~small] = rs ** (-n / 2.0) * jv(n / 2.0, 2.0 * math.pi * rs)
    return out


def _cube_ft(half_side, xi):
    # prod_j sin(2 pi s xi_j) / (pi xi_j) = prod_j 2 s sinc(2 s xi_j)
    return np.prod(2.0 * half_side * np.sinc(2.0 * half_side * xi), axis=-1)


def _profile_ft_quad(body, theta, r):
    """1-D Fourier transform of the section curve at frequency r, by
    adaptive oscillatory quadrature; returns a complex value."""
    h = body.support_values(theta)
    f = lambda t: radon(body, theta, t)
    if r == 0.0:
        re, _ = integrate.quad(f, -h, h, **QUAD_OPTS)
        return complex(re, 0.0)
    w = 2.0 * math.pi * r
    re, _ = integrate.quad(f, -h, h, weight="cos", wvar=w, **QUAD_OPTS)
    im, _ = integrate.quad(f, -h, h, weight="sin", wvar=w, **QUAD_OPTS)
    return complex(re, -im)


def indicator_ft(body, xi):
    """Fourier transform of the indicator of the body at frequency xi.

    Real for origin-symmetric bodies; the quadrature path asserts that the
    imaginary part is below 1e-10 relative to vol(K).  At xi = 0 the value
    is vol(K).  Accepts a single point or an array of points (..., N).
    """
    n = body.dim
    pts = np.asarray(xi, dtype=float)
    single = pts.ndim == 1
    if pts.shape[-1] != n:
        raise BodyError(f"frequency has dimension {pts.shape[-1]}, body has {n}")
    pts = pts.reshape(-1, n)

    if isinstance(body, LpBall) and math.isinf(body.p):
        out = _cube_ft(body.radius, pts).astype(complex)
    elif isinstance(body, Ball) or (isinstance(body, LpBall) and body.p == 2.0):
        r = body.radius
        rho = np.linalg.norm(pts, axis=-1)
        out = (r ** n * _unit_ball_ft_radial(n, r * rho)).astype(complex)
    elif isinstance(body, Ellipsoid):
        t, det_t = body.ball_factor
        rho = np.linalg.norm(pts @ t, axis=-1)
        out = (det_t * _unit_ball_ft_radial(n, rho)).astype(complex)
    elif isinstance(body, LinearImage):
        out = body.det_abs * indicator_ft(body.base, pts @ body.matrix)
    else:
        vol_k = volume(body).value
        out = np.empty(pts.shape[0], dtype=complex)
        for i, p in enumerate(pts):
            rho = float(np.linalg.norm(p))
            if rho == 0.0:
                out[i] = vol_k
                continue
            val = _profile_ft_quad(body, p / rho, rho)
            if abs(val.imag) > 1e-10 * max(vol_k, 1.0):
                raise ArithmeticError(
                    f"indicator transform of a symmetric body came out complex: {val!r}")
            out[i] = val
    return complex(out[0]) if single else out


@dataclass(frozen=True)
class BandlimitedFunction:
    """Finite frequency-node model of a function with spectrum in a body.

    Evaluation is F(x) = sum_j g_j exp(2 pi i x.xi_j) Delta, and the node
    model's squared L2 norm is sum_j |g_j|^2 Delta (Parseval on nodes).
    """
    spectrum_body: ConvexBody
    freq_nodes: np.ndarray
    weights: np.ndarray
    cell_measure: float

    def __post_init__(self):
        nodes = np.ascontiguousarray(np.asarray(self.freq_nodes, float))
        w = np.ascontiguousarray(np.asarray(self.weights, complex))
        if nodes.ndim != 2 or nodes.shape[1] != self.spectrum_body.dim:
            raise ValueError("freq_nodes must be (M, N) matching the spectrum body")
        if w.shape != (nodes.shape[0],):
            raise ValueError("weights must be one complex value per node")
        if self.cell_measure <= 0:
            raise ValueError("cell_measure must be positive")
        g = self.spectrum_body.gauge_values(nodes)
        if nodes.size and g.max() > 1.0 + config.GEOM_ATOL:
            raise ValueError("frequency node outside the spectrum body")
        nodes.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "freq_nodes", nodes)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self):
        return self.spectrum_body.dim

    def __call__(self, x):
        return evaluate(self, x)

    def value_at_zero(self):
        return complex(self.weights.sum() * self.cell_measure)

    def parseval_norm_sq(self):
        return float((np.abs(self.weights) ** 2).sum() * self.cell_measure)


def frequency_grid(body, grid_per_axis):
    """Covering lattice of frequency nodes for a body.

    Cells of a regular grid over the support bounding box are kept whenever
    they can meet the body (gauge at the center within a max-corner-gauge
    pad), so the covered measure M*Delta is never below vol(K); node points
    whose center falls outside are pulled radially onto the boundary so the
    spectrum stays inside K.  Returns (nodes, cell_measure).
    """
    if grid_per_axis < 2:
        raise ValueError("grid_per_axis must be >= 2")
    n = body.dim
    if grid_per_axis ** n > MAX_GRID_NODES:
        raise ValueError("grid too large for this dimension")
    half = body.support_values(np.eye(n))
    steps = 2.0 * half / grid_per_axis
    axes = [-half[i] + (np.arange(grid_per_axis) + 0.5) * steps[i] for i in range(n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([m.ravel() for m in mesh], axis=1)
    signs = np.array(np.meshgrid(*([[-1.0, 1.0]] * n), indexing="ij")).reshape(n, -1).T
    pad = float(body.gauge_values(signs * (steps / 2.0)).max())
    g = body.gauge_values(centers)
    keep = g <= 1.0 + pad + 1e-12
    nodes, gk = centers[keep], g[keep]
    outside = gk > 1.0
    if np.any(outside):
        nodes = nodes.copy()
        nodes[outside] /= gk[outside, None]
    if nodes.shape[0] == 0:
        raise ValueError("grid too coarse: no cell meets the body")
    return nodes, float(np.prod(steps))


def extremal_rho_function(body, grid_per_axis):
    """Discrete model of the normalized inverse transform of the indicator:
    constant weights 1/vol(K) on a frequency grid covering K.

    F(0) -> 1 and the Parseval norm -> 1/vol(K) as the grid refines.
    """
    nodes, delta = frequency_grid(body, grid_per_axis)
    vol_k = volume(body).value
    weights = np.full(nodes.shape[0], 1.0 / vol_k, dtype=complex)
    return BandlimitedFunction(spectrum_body=body, freq_nodes=nodes,
                               weights=weights, cell_measure=delta)


def evaluate(f, x, chunk=4_000_000):
    """Evaluate a BandlimitedFunction at one point or an array of points."""
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    if pts.shape[-1] != f.dim:
        raise BodyError(f"point has dimension {pts.shape[-1]}, function has {f.dim}")
    pts = pts.reshape(-1, f.dim)
    m = max(1, f.freq_nodes.shape[0])
    rows = max(1, chunk // m)
    out = np.empty(pts.shape[0], dtype=complex)
    for i in range(0, pts.shape[0], rows):
        block = pts[i:i + rows]
        phase = np.exp(2j * math.pi * (block @ f.freq_nodes.T))
        out[i:i + rows] = phase @ f.weights
    out *= f.cell_measure
    return complex(out[0]) if single else out


def reproducing_kernel(delta, n, w, z):
    """Evaluation kernel of the radius-delta band-limited space at real
    arguments: K(w, z) = indicator_ft(Ball(delta), z - w); K(0,0) is the
    volume of the delta-ball."""
    if delta <= 0:
        raise ValueError("kernel radius must be positive")
    w = np.asarray(w, float)
    z = np.asarray(z, float)
    return indicator_ft(Ball(radius=float(delta), dimension=n), z - w)


def fejer_kernel(x):
    """Product of squared sincs: nonnegative, 1 at the origin, zero at
    nonzero integer points, unit integral, spectrum inside [-1, 1]^N
    (structurally: each factor is the transform of a triangle on [-1, 1])."""
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 0:
        pts = pts.reshape(1)
    vals = np.prod(np.sinc(pts) ** 2, axis=-1)
    return float(vals) if vals.ndim == 0 else vals


class FejerKernel:
    """The product-sinc-squared kernel as a first-class admissible function
    for the cube: callable, with the separable structure exposed so lattice
    sums over Z^N reduce to powers of a one-dimensional sum."""

    def __init__(self, dim):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        self.dim = dim
        self.spectrum_body = LpBall(p=math.inf, radius=1.0, dimension=dim)

    def __call__(self, x):
        pts = np.asarray(x, dtype=float)
        if pts.ndim == 0:
            pts = pts.reshape(1)
        elif self.dim == 1 and pts.ndim == 1:
            pts = pts.reshape(-1, 1)      # a batch of points on the line
        return fejer_kernel(pts)

    def lattice_sum_1d(self, radius):
        n = np.arange(-radius, radius + 1, dtype=float)
        return float(np.sum(np.sinc(n) ** 2))

    def tail_bound_1d(self, radius):
        # |sinc(x)|^2 <= 1/(pi x)^2, so the two tails sum below 2/(pi^2 R)
        return 2.0 / (math.pi ** 2 * radius)


def projection_slice_check(body, theta, r_grid):
    """Max absolute gap between the 1-D transform of the section curve and
    the N-D indicator transform along the ray r*theta."""
    theta = check_direction(theta, body.dim)
    worst = 0.0
    for r in np.asarray(r_grid, float).reshape(-1):
        lhs = _profile_ft_quad(body, theta, float(abs(r)))
        rhs = indicator_ft(body, float(abs(r)) * theta)
        worst = max(worst, abs(lhs - rhs))
    return worst
