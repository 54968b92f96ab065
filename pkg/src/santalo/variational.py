"""Discretized extremal problems for band-limited functions.

Two functionals are modeled on frequency-node grids: the least squared
L2 norm among functions with unit value at the origin and spectrum in K
(solved in closed form and by projected gradient descent, which must
agree), and its L1 analogue for nonnegative functions, which is certified
from above by explicit kernels (product sinc-squared for the cube, squared
reproducing kernel for the ball), bounded from below through lattice
sums, and probed by a linear program.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .bodies import Ball, polar, support
from .fourier import (BandlimitedFunction, FejerKernel, _unit_ball_ft_radial,
                      evaluate, frequency_grid)
from .measure import unit_ball_volume, volume


@dataclass(frozen=True)
class ExtremalEstimate:
    quantity: str                     # rho | eta
    upper: float
    conjectured_or_exact: float
    grid_spec: tuple
    certificate: str
    lower: float | None = None
    seed: int | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.quantity not in ("rho", "eta"):
            raise ValueError(f"unknown quantity {self.quantity!r}")
        if self.upper < 0:
            raise ValueError("upper bound must be nonnegative")


@dataclass(frozen=True)
class PoissonBound:
    """Truncated lattice sum as a lower-bound witness for the integral of
    an admissible nonnegative band-limited function."""
    value: float
    remainder_bound: float
    truncation_radius: int
    n_lattice_points: int


def rho_solve(body, grid_per_axis):
    """Minimize sum |g_j|^2 Delta subject to |sum g_j Delta| >= 1 on the
    frequency grid of the body.

    The closed-form optimum (constant weights, the Cauchy-Schwarz equality
    case) and a projected gradient descent from random initialization must
    agree to 1e-10; their common value 1/(M Delta) approaches 1/vol(K)
    from below as the covering grid refines.
    """
    nodes, delta = frequency_grid(body, grid_per_axis)
    m = nodes.shape[0]
    closed = 1.0 / (m * delta)

    rng = np.random.default_rng(12345)
    g = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    for _ in range(200):
        g = 0.5 * g                      # gradient step, rate 0.25/Delta
        s = g.sum() * delta
        if abs(s) < 1.0:
            target = s / abs(s) if abs(s) > 0 else 1.0
            g = g + (target - s) / (m * delta)
    iterative = float((np.abs(g) ** 2).sum() * delta)
    if abs(iterative - closed) > 1e-10 * max(1.0, closed):
        raise ArithmeticError(
            f"gradient solution {iterative!r} disagrees with closed form {closed!r}")

    vol_k = volume(body).value
    return ExtremalEstimate(
        quantity="rho", upper=closed, conjectured_or_exact=1.0 / vol_k,
        grid_spec=(grid_per_axis, 0), certificate="constant_density",
        details={"node_count": m, "cell_measure": delta,
                 "iterative_value": iterative})


def _sinc_sq_integral_check():
    """The squared sinc integrates to exactly 1 (it is the squared modulus
    of the transform of the unit-mass triangle); verify by composite
    Gauss-Legendre over unit periods with an explicit tail bound."""
    r = 2000
    x_gl, w_gl = np.polynomial.legendre.leggauss(16)
    starts = np.arange(0, r, dtype=float)[:, None]
    nodes = starts + 0.5 * (x_gl + 1.0)
    val = 2.0 * float((0.5 * w_gl * np.sinc(nodes) ** 2).sum())
    tail = 2.0 / (math.pi ** 2 * r)
    if abs(val - 1.0) > tail + 1e-9:
        raise ArithmeticError(f"sinc^2 quadrature {val!r} inconsistent with unit integral")
    return 1.0


def eta_upper_cube(n, n_samples=10_000, seed=0):
    """Certify the L1 extremal value 1 for the cube [-1, 1]^N via the
    product sinc-squared kernel: unit value at the origin, nonnegative,
    spectrum in the cube, unit integral (iterated 1-D integrals)."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    kernel = FejerKernel(n)
    f0 = kernel(np.zeros(n))
    if abs(f0 - 1.0) > 1e-12:
        raise ArithmeticError(f"kernel value at the origin is {f0!r}")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-20.0, 20.0, size=(n_samples, n))
    if float(kernel(pts).min()) < 0.0:
        raise ArithmeticError("kernel went negative on the sample set")
    one_dim = _sinc_sq_integral_check()
    upper = one_dim ** n
    vol_q = 2.0 ** n
    return ExtremalEstimate(
        quantity="eta", upper=upper, conjectured_or_exact=2.0 ** n / vol_q,
        grid_spec=(0, n_samples), certificate="fejer_product", seed=seed,
        details={"value_at_zero": f0})


def eta_lower_poisson(body, f, truncation_radius, n_samples=10_000, seed=0):
    """Truncated lattice sum of an admissible function as a certified
    lower-bound witness for its integral.

    Requires the spectrum strictly inside the open cube (-1, 1)^N so only
    the zero frequency survives on the dual side of Poisson summation; the
    product sinc-squared kernel is admitted structurally (its transform
    vanishes on the cube boundary).  All lattice terms are nonnegative, so
    every truncation lower-bounds the full sum, which equals the integral.
    """
    radius = int(truncation_radius)
    if radius < 1:
        raise ValueError("truncation radius must be >= 1")
    n = body.dim

    if isinstance(f, FejerKernel):
        if f.dim != n:
            raise ValueError("kernel dimension does not match the body")
        if any(support(body, e) > 1.0 + 1e-12 for e in np.eye(n)):
            raise ValueError("body is not contained in the closed unit cube")
        f0 = f(np.zeros(n))
        if f0 < 1.0 - 1e-12:
            raise ValueError(f"function value at the origin is {f0!r} < 1")
        s1 = f.lattice_sum_1d(radius)
        tail = f.tail_bound_1d(radius)
        value = s1 ** n
        remainder = (s1 + tail) ** n - value
        return PoissonBound(value=value, remainder_bound=remainder,
                            truncation_radius=radius,
                            n_lattice_points=(2 * radius + 1) ** n)

    if not isinstance(f, BandlimitedFunction):
        raise TypeError("f must be a BandlimitedFunction or FejerKernel")
    if f.dim != n:
        raise ValueError("function dimension does not match the body")
    if f.freq_nodes.size and np.abs(f.freq_nodes).max() >= 1.0 - 1e-12:
        raise ValueError("spectrum touches the closed cube boundary; "
                         "the dual side of Poisson summation is ambiguous")
    f0 = evaluate(f, np.zeros(n))
    if f0.real < 1.0 - 1e-12:
        raise ValueError(f"function value at the origin is {f0!r} < 1")
    rng = np.random.default_rng(seed)
    sample = rng.uniform(-8.0, 8.0, size=(n_samples, n))
    if float(evaluate(f, sample).real.min()) < -1e-10:
        raise ValueError("function went negative on the admissibility sample")

    if (2 * radius + 1) ** n > 20_000_000:
        raise ValueError("lattice too large; reduce the truncation radius")
    axis = np.arange(-radius, radius + 1, dtype=float)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    lattice = np.stack([g.ravel() for g in mesh], axis=1)
    vals = evaluate(f, lattice).real
    return PoissonBound(value=float(vals.sum()), remainder_bound=math.inf,
                        truncation_radius=radius,
                        n_lattice_points=lattice.shape[0])


def eta_upper_ball(n, grid_per_axis=None):
    """Certify the L1 extremal value 2^N / vol(B) for the unit ball.

    The witness is the squared normalized reproducing kernel of the
    radius-1/2 band-limited space: F = |V|^2 with V = K(0,.)/K(0,0), so
    F >= 0 structurally, F(0) = 1, and the spectrum (a sum of two
    half-ball spectra) lies in B.  The integral equals ||V||_2^2 =
    1/vol(B/2), cross-checked by spatial lattice quadrature within 2%.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if grid_per_axis is None:
        grid_per_axis = {1: 2001, 2: 501, 3: 241}.get(n, 81)
    k00 = unit_ball_volume(n) / 2.0 ** n          # vol of the half ball
    upper = 1.0 / k00

    # |V|^2 has spectrum in the unit ball, so a spacing-0.5 lattice sum is
    # alias-free and only truncation error remains.
    h = 0.5
    half_count = (grid_per_axis - 1) // 2
    axis = h * np.arange(-half_count, half_count + 1, dtype=float)
    rest = np.meshgrid(*([axis] * (n - 1)), indexing="ij") if n > 1 else []
    rest_sq = sum(g.ravel() ** 2 for g in rest) if n > 1 else np.zeros(1)
    total = 0.0
    for x1 in axis:
        radii = np.sqrt(x1 * x1 + rest_sq)
        v = _unit_ball_ft_radial(n, 0.5 * radii) / (2.0 ** n) / k00
        total += float((v * v).sum())
    quadrature = total * h ** n

    deviation = abs(quadrature - upper) / upper
    if deviation > 0.02:
        raise ArithmeticError(
            f"spatial quadrature {quadrature!r} deviates {deviation:.3%} "
            f"from the kernel value {upper!r}")
    return ExtremalEstimate(
        quantity="eta", upper=upper, conjectured_or_exact=upper,
        grid_spec=(grid_per_axis, len(axis) ** n), certificate="kernel_square",
        details={"spatial_quadrature": quadrature,
                 "quadrature_deviation": deviation})


def _fold_orbits(nodes):
    """Group symmetric nodes into {xi, -xi} orbits; returns (orbit
    representative indices, orbit sizes, index of the origin orbit).

    Matching is nearest-neighbor so coincident boundary-pulled nodes
    cannot confuse the pairing; quadratic cost is fine at probe sizes.
    """
    m = nodes.shape[0]
    seen = np.zeros(m, dtype=bool)
    reps, sizes, origin = [], [], -1
    for i in range(m):
        if seen[i]:
            continue
        seen[i] = True
        if np.abs(nodes[i]).max() < 1e-12:
            origin = len(reps)
            reps.append(i)
            sizes.append(1)
            continue
        dist = np.abs(nodes + nodes[i]).max(axis=1)
        dist[seen] = np.inf
        j = int(np.argmin(dist))
        if not np.isfinite(dist[j]) or dist[j] > 1e-9:
            raise ArithmeticError("frequency grid is not origin symmetric")
        seen[j] = True
        reps.append(i)
        sizes.append(2)
    return np.array(reps), np.array(sizes, float), origin


def _halton_ball(n, count, radius, seed):
    from scipy.stats import qmc
    sampler = qmc.Halton(d=n, scramble=True, seed=seed)
    pts = np.empty((0, n))
    while pts.shape[0] < count:
        raw = radius * (2.0 * sampler.random(2 * count) - 1.0)
        keep = np.linalg.norm(raw, axis=1) <= radius
        pts = np.vstack([pts, raw[keep]])
    return pts[:count]


def _random_rotation(n, rng):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def eta_lp_probe(body, freq_grid, space_samples, space_radius=None, seed=0,
                 n_rotations=None):
    """Linear-programming probe of the L1 extremal value.

    Variables are the transform samples g_j on a symmetric frequency grid
    (folded into +- orbits); the objective is the sample at the origin,
    which models the integral of F, subject to F(0) = sum g_j Delta >= 1
    and F(x_k) >= 0 at finitely many sample points.  Finite sampling
    cannot certify nonnegativity everywhere, so the optimum is reported as
    a heuristic indicator next to 2^N/vol(K), never asserted equal.  Ball
    probes average the optimum over random rotations of the whole
    discretization to reduce lattice anisotropy.
    """
    if freq_grid < 2 or space_samples < 2:
        raise ValueError("grids must be >= 2")
    if freq_grid % 2 == 0:
        freq_grid += 1                    # need a node at the origin
    n = body.dim
    if space_radius is None:
        dual = polar(body)
        diam_polar = 2.0 * max(support(dual, e) for e in np.eye(n))
        # The node model repeats on the scale of one over the grid step;
        # sampling must cover that quasi-period or the program is
        # unconstrained (and unbounded) beyond the window.
        quasi_period = freq_grid / (2.0 * min(support(body, e) for e in np.eye(n)))
        space_radius = max(8.0 * diam_polar, quasi_period)
    if n_rotations is None:
        n_rotations = 32 if isinstance(body, Ball) and n >= 2 else 1

    nodes, delta = frequency_grid(body, freq_grid)
    reps, sizes, origin = _fold_orbits(nodes)
    if origin < 0:
        raise ArithmeticError("no frequency node at the origin")
    rep_nodes = nodes[reps]

    halton = _halton_ball(n, space_samples, space_radius, seed)
    lat_r = min(8, int(space_radius))
    axis = np.arange(-lat_r, lat_r + 1, dtype=float)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    lattice = np.stack([g.ravel() for g in mesh], axis=1)
    points = np.vstack([halton, lattice])

    rng = np.random.default_rng(seed)
    optima = []
    for _ in range(n_rotations):
        rot = _random_rotation(n, rng) if n_rotations > 1 else np.eye(n)
        pts = points @ rot.T
        nds = rep_nodes @ rot.T
        cos_mat = np.cos(2.0 * math.pi * (pts @ nds.T)) * (sizes * delta)
        c = np.zeros(len(reps))
        c[origin] = 1.0
        a_ub = np.vstack([-cos_mat, -(sizes * delta)])
        b_ub = np.concatenate([np.zeros(pts.shape[0]), [-1.0]])
        res = optimize.linprog(c, A_ub=a_ub, b_ub=b_ub,
                               bounds=(None, None), method="highs")
        if res.status != 0:
            raise RuntimeError(f"linear program failed: {res.message}")
        optima.append(float(res.fun))

    vol_k = volume(body).value
    target = 2.0 ** n / vol_k
    probe = float(np.mean(optima))
    return ExtremalEstimate(
        quantity="eta", upper=target, lower=probe,
        conjectured_or_exact=target,
        grid_spec=(freq_grid, points.shape[0]), certificate="lp_solution",
        seed=seed,
        details={"optima": optima, "n_rotations": n_rotations,
                 "space_radius": float(space_radius),
                 "gap_vs_conjecture": probe - target})


def fejer_riesz_1d(cosine_coeffs, grid=10_000):
    """Factor a nonnegative cosine polynomial as a squared modulus.

    Given F(t) = a_0 + sum_k a_k cos(2 pi k t) >= 0, returns ascending
    complex coefficients of U with F(t) = |U(e^{2 pi i t})|^2, built by
    rooting the associated Laurent symbol and keeping the roots inside the
    unit disk plus one of each doubled unit-circle pair (deterministic by
    angle sort).  The leading coefficient is normalized positive real.
    """
    a = np.asarray(cosine_coeffs, dtype=float)
    if a.ndim != 1 or a.size < 1:
        raise ValueError("cosine_coeffs must be a nonempty 1-D array")

    ts = np.arange(grid) / grid
    f_vals = np.full(grid, a[0])
    for k in range(1, a.size):
        f_vals += a[k] * np.cos(2.0 * math.pi * k * ts)
    if f_vals.min() < -1e-12:
        raise ValueError(
            f"polynomial is negative (min {f_vals.min()!r}); not factorable")

    scale = max(np.abs(a).max(), 1.0)
    deg = 0
    for k in range(a.size - 1, 0, -1):
        if abs(a[k]) > 1e-14 * scale:
            deg = k
            break
    if deg == 0:
        return np.array([math.sqrt(max(a[0], 0.0))], dtype=complex)

    # Laurent symbol c_{-d}..c_d lifted to an ordinary polynomial in w.
    c = np.zeros(2 * deg + 1)
    c[deg] = a[0]
    for k in range(1, deg + 1):
        c[deg + k] = c[deg - k] = a[k] / 2.0
    roots = np.roots(c[::-1])

    inside = roots[np.abs(roots) < 1.0 - 1e-4]
    on_circle = roots[np.abs(np.abs(roots) - 1.0) <= 1e-4]
    if len(on_circle) % 2:
        raise ArithmeticError("unit-circle roots did not pair up")
    chosen = list(inside)
    if len(on_circle):
        order = np.argsort(np.angle(on_circle), kind="stable")
        ring = on_circle[order]
        for i in range(0, len(ring), 2):
            pair = ring[i:i + 2]
            phi = float(np.angle(pair).mean())
            chosen.append(np.exp(1j * phi))
    if len(chosen) != deg:
        raise ArithmeticError(
            f"selected {len(chosen)} roots for degree {deg}; factorization failed")

    u = np.poly(np.array(chosen))[::-1]       # ascending, monic in w^deg
    ring_vals = np.polyval(u[::-1], np.exp(2j * math.pi * ts))
    t_star = int(np.argmax(f_vals))
    gamma = math.sqrt(f_vals[t_star] / abs(ring_vals[t_star]) ** 2)
    u = gamma * u

    recon = np.abs(gamma * ring_vals) ** 2
    err = np.abs(recon - f_vals).max()
    if err > 1e-8 * max(1.0, f_vals.max()):
        raise ArithmeticError(f"reconstruction error {err!r} too large")
    return u
