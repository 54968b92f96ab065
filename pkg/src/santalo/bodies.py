"""Origin-symmetric convex bodies: support functions, gauges, polarity.

Bodies are immutable tagged variants.  Every variant knows how to evaluate
its support function h_K(x) = sup {x.y : y in K} and its gauge
||x||_K = inf {lam > 0 : x in lam K}; the two are exchanged by polarity,
h_K = gauge of K*.  Polytopes carry both a vertex list and a facet-normal
list (computed lazily from each other through the polar convex hull trick),
which makes polarity a representation swap.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import config


class BodyError(ValueError):
    """Invalid body construction or degenerate geometry."""


def _as_points(x, dim, name="x"):
    """Coerce to a float array of shape (..., dim)."""
    a = np.asarray(x, dtype=float)
    if a.ndim == 0 or a.shape[-1] != dim:
        raise BodyError(f"{name} has dimension {a.shape[-1] if a.ndim else 0}, body has {dim}")
    return a


def check_direction(theta, dim):
    """Validate a unit vector; returns it as a 1-D float array."""
    t = np.asarray(theta, dtype=float).reshape(-1)
    if t.shape[0] != dim:
        raise BodyError(f"direction has dimension {t.shape[0]}, body has {dim}")
    if abs(np.linalg.norm(t) - 1.0) > 1e-12:
        raise BodyError(f"direction is not unit length: |theta| = {np.linalg.norm(t)!r}")
    return t


def _check_plus_minus_pairs(points, what):
    """Every row must have its negation in the list within SYM_ATOL."""
    pts = np.asarray(points, float)
    for i, p in enumerate(pts):
        d = np.abs(pts + p).max(axis=1)
        if d.min() > config.SYM_ATOL:
            raise BodyError(f"{what} are not origin symmetric: row {i} has no +- partner")


def _hull_facets_as_offset_one(points):
    """Facet normals a_i of conv(points), scaled so facets are {x : a_i.x = 1}.

    Requires the origin strictly inside the hull.  For N = 1 the hull of a
    symmetric point list is a segment [-m, m] with facets +-1/m.
    """
    pts = np.asarray(points, float)
    n = pts.shape[1]
    if n == 1:
        m = np.abs(pts).max()
        if m <= 0:
            raise BodyError("degenerate 1-D hull")
        return np.array([[1.0 / m], [-1.0 / m]])
    try:
        hull = ConvexHull(pts)
    except QhullError as e:
        raise BodyError(f"degenerate hull: {e}") from None
    eq = hull.equations  # rows (normal, offset): normal.x + offset <= 0
    off = eq[:, -1]
    if np.any(off >= -config.GEOM_ATOL):
        raise BodyError("origin is not strictly interior to the hull")
    return eq[:, :-1] / (-off[:, None])


def _hull_vertices(points):
    """Extreme points of conv(points), pruning interior/redundant rows."""
    pts = np.asarray(points, float)
    if pts.shape[1] == 1:
        m = np.abs(pts).max()
        return np.array([[m], [-m]])
    try:
        hull = ConvexHull(pts)
    except QhullError as e:
        raise BodyError(f"degenerate hull: {e}") from None
    return pts[np.sort(hull.vertices)]


def _freeze(a):
    a = np.ascontiguousarray(np.asarray(a, dtype=float))
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ConvexBody:
    """Base class; concrete variants implement the geometry hooks."""

    @property
    def dim(self):
        raise NotImplementedError

    def support_values(self, x):
        raise NotImplementedError

    def gauge_values(self, x):
        raise NotImplementedError

    def polar_body(self):
        raise NotImplementedError

    def variant(self):
        return type(self).__name__.lower()


@dataclass(frozen=True)
class Ball(ConvexBody):
    radius: float = 1.0
    dimension: int = 1

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise BodyError(f"ball radius must be positive, got {self.radius}")
        if self.dimension < 1:
            raise BodyError("dimension must be >= 1")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self):
        return self.dimension

    def support_values(self, x):
        return self.radius * np.linalg.norm(x, axis=-1)

    def gauge_values(self, x):
        return np.linalg.norm(x, axis=-1) / self.radius

    def polar_body(self):
        return Ball(radius=1.0 / self.radius, dimension=self.dimension)


@dataclass(frozen=True)
class Ellipsoid(ConvexBody):
    """Body {x : x^T M x <= 1} for symmetric positive definite M."""

    shape: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.shape, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise BodyError("ellipsoid shape matrix must be square")
        if not np.allclose(m, m.T, atol=config.SYM_ATOL, rtol=0):
            raise BodyError("ellipsoid shape matrix must be symmetric")
        m = 0.5 * (m + m.T)
        if np.linalg.eigvalsh(m).min() <= 0:
            raise BodyError("ellipsoid shape matrix must be positive definite")
        object.__setattr__(self, "shape", _freeze(m))

    @property
    def dim(self):
        return self.shape.shape[0]

    @cached_property
    def _inverse_shape(self):
        return _freeze(np.linalg.inv(self.shape))

    def support_values(self, x):
        q = np.einsum("...i,ij,...j->...", x, self._inverse_shape, x)
        return np.sqrt(np.maximum(q, 0.0))

    def gauge_values(self, x):
        q = np.einsum("...i,ij,...j->...", x, self.shape, x)
        return np.sqrt(np.maximum(q, 0.0))

    def polar_body(self):
        return Ellipsoid(shape=self._inverse_shape)

    @cached_property
    def ball_factor(self):
        """Matrix T with T B = self (so T = M^{-1/2}), and |det T|."""
        w, q = np.linalg.eigh(self.shape)
        t = (q * (1.0 / np.sqrt(w))) @ q.T
        return _freeze(t), float(np.prod(1.0 / np.sqrt(w)))


@dataclass(frozen=True)
class HPolytope(ConvexBody):
    """Body {x : a_i . x <= 1 for all i}; offsets are normalized to 1."""

    normals: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.normals, dtype=float)
        if a.ndim != 2 or a.shape[0] < 2:
            raise BodyError("normals must be a (k, N) array with k >= 2")
        _check_plus_minus_pairs(a, "normals")
        if np.linalg.matrix_rank(a) < a.shape[1]:
            raise BodyError("normals do not positively span: body is unbounded")
        object.__setattr__(self, "normals", _freeze(a))

    @property
    def dim(self):
        return self.normals.shape[1]

    @cached_property
    def vertices(self):
        # Vertices of {x : a_i.x <= 1} are the offset-1 facet normals of
        # conv{a_i}: one qhull call replaces explicit facet enumeration.
        return _freeze(_hull_facets_as_offset_one(self.normals))

    def support_values(self, x):
        return np.max(np.asarray(x) @ self.vertices.T, axis=-1)

    def gauge_values(self, x):
        return np.max(np.asarray(x) @ self.normals.T, axis=-1)

    def polar_body(self):
        return VPolytope(vertices=_hull_vertices(self.normals))


@dataclass(frozen=True)
class VPolytope(ConvexBody):
    """Convex hull of a symmetric vertex list."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2:
            raise BodyError("vertices must be a (k, N) array with k >= 2")
        _check_plus_minus_pairs(v, "vertices")
        if np.linalg.matrix_rank(v) < v.shape[1]:
            raise BodyError("vertices do not span: origin is not interior")
        object.__setattr__(self, "vertices", _freeze(v))

    @property
    def dim(self):
        return self.vertices.shape[1]

    @cached_property
    def facet_normals(self):
        return _freeze(_hull_facets_as_offset_one(self.vertices))

    def support_values(self, x):
        return np.max(np.asarray(x) @ self.vertices.T, axis=-1)

    def gauge_values(self, x):
        return np.max(np.asarray(x) @ self.facet_normals.T, axis=-1)

    def polar_body(self):
        return HPolytope(normals=self.vertices.copy())


@dataclass(frozen=True)
class LpBall(ConvexBody):
    """Ball of the p-norm, radius r; p = inf is the max norm (cube)."""

    p: float
    radius: float = 1.0
    dimension: int = 1

    def __post_init__(self):
        if not (self.p >= 1):
            raise BodyError(f"p must be in [1, inf], got {self.p}")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise BodyError(f"radius must be positive, got {self.radius}")
        if self.dimension < 1:
            raise BodyError("dimension must be >= 1")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self):
        return self.dimension

    @property
    def dual_exponent(self):
        if self.p == 1:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)

    @staticmethod
    def _pnorm(x, p):
        x = np.abs(np.asarray(x, float))
        if math.isinf(p):
            return x.max(axis=-1)
        if p == 1:
            return x.sum(axis=-1)
        return (x ** p).sum(axis=-1) ** (1.0 / p)

    def support_values(self, x):
        return self.radius * self._pnorm(x, self.dual_exponent)

    def gauge_values(self, x):
        return self._pnorm(x, self.p) / self.radius

    def polar_body(self):
        return LpBall(p=self.dual_exponent, radius=1.0 / self.radius,
                      dimension=self.dimension)

    def as_vpolytope(self):
        """Vertex representation; only p = 1 and p = inf are polytopes."""
        n, r = self.dimension, self.radius
        if math.isinf(self.p):
            corners = np.array(
                np.meshgrid(*([[-r, r]] * n), indexing="ij")).reshape(n, -1).T
            return VPolytope(vertices=corners)
        if self.p == 1:
            return VPolytope(vertices=np.vstack([r * np.eye(n), -r * np.eye(n)]))
        raise BodyError(f"lp ball with p={self.p} is not a polytope")


@dataclass(frozen=True)
class LinearImage(ConvexBody):
    """T K for an invertible matrix T and a base body K."""

    base: ConvexBody
    matrix: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.matrix, dtype=float)
        n = self.base.dim
        if t.shape != (n, n):
            raise BodyError(f"map must be {n}x{n}, got {t.shape}")
        if abs(np.linalg.det(t)) < 1e-300:
            raise BodyError("map is singular")
        object.__setattr__(self, "matrix", _freeze(t))

    @property
    def dim(self):
        return self.base.dim

    @cached_property
    def _inverse(self):
        return _freeze(np.linalg.inv(self.matrix))

    @property
    def det_abs(self):
        return abs(float(np.linalg.det(self.matrix)))

    def support_values(self, x):
        return self.base.support_values(np.asarray(x) @ self.matrix)

    def gauge_values(self, x):
        return self.base.gauge_values(np.asarray(x) @ self._inverse.T)

    def polar_body(self):
        return LinearImage(base=self.base.polar_body(), matrix=self._inverse.T.copy())


def cube(dim, half_side=1.0):
    """The cube [-s, s]^N as an l_inf ball."""
    return LpBall(p=math.inf, radius=half_side, dimension=dim)


def cross_polytope(dim, radius=1.0):
    """The l_1 ball of the given radius."""
    return LpBall(p=1.0, radius=radius, dimension=dim)


# ---------------------------------------------------------------------------
# Operation surface


def support(body, x):
    """Support function h_K(x); positively homogeneous and even."""
    pts = _as_points(x, body.dim)
    out = body.support_values(pts)
    return float(out) if pts.ndim == 1 else out


def gauge(body, x):
    """Minkowski gauge inf {lam > 0 : x in lam K}."""
    pts = _as_points(x, body.dim)
    out = body.gauge_values(pts)
    return float(out) if pts.ndim == 1 else out


def polar(body):
    """The polar (dual) body {y : x.y <= 1 for all x in K}."""
    return body.polar_body()


def contains(body, x, atol=None):
    """Membership test: gauge(K, x) <= 1 + atol (boundary inclusive)."""
    atol = config.GEOM_ATOL if atol is None else atol
    pts = _as_points(x, body.dim)
    out = body.gauge_values(pts) <= 1.0 + atol
    return bool(out) if pts.ndim == 1 else out


def linear_image(body, t):
    """The image T K, simplified to a closed-form variant where possible."""
    t = np.asarray(t, dtype=float)
    n = body.dim
    if t.shape != (n, n):
        raise BodyError(f"map must be {n}x{n}, got {t.shape}")
    det = np.linalg.det(t)
    if abs(det) < 1e-300:
        raise BodyError("map is singular")
    if isinstance(body, Ball):
        # T(rB) = ellipsoid {x : x^T M x <= 1}, M = (r^2 T T^T)^{-1}
        m = np.linalg.inv(body.radius ** 2 * (t @ t.T))
        return Ellipsoid(shape=0.5 * (m + m.T))
    if isinstance(body, Ellipsoid):
        ti = np.linalg.inv(t)
        m = ti.T @ body.shape @ ti
        return Ellipsoid(shape=0.5 * (m + m.T))
    if isinstance(body, VPolytope):
        return VPolytope(vertices=body.vertices @ t.T)
    if isinstance(body, HPolytope):
        return HPolytope(normals=body.normals @ np.linalg.inv(t))
    if isinstance(body, LinearImage):
        return LinearImage(base=body.base, matrix=t @ body.matrix)
    return LinearImage(base=body, matrix=t)
