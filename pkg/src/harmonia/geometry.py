"""Point-level operations on Euclidean space and hyperbolic space (hyperboloid model).

Points are plain numpy arrays of shape (..., dim): dim = n for Euclidean
space, n + 1 for the hyperboloid sheet {<x, x> = -1, x_0 > 0} in Minkowski
space. Point functions are numpy-vectorized callables taking (..., dim)
arrays and must be pure; quadrature evaluates them in large batches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import CapabilityError, ExtrapolationError
from .grids import RadialGrid, radial_grid
from .profiles import RadialProfile
from .spaces import EUCLIDEAN, HYPERBOLIC, ModelSpace, density, sphere_area

POINT_TOL = 1e-10
DEFAULT_S2_DEGREE = (64, 128)
DEFAULT_S1_NODES = 512


def _require_point_ops(space: ModelSpace):
    if not space.point_ops:
        raise CapabilityError(f"{space} has no point-level chart")


def ambient_dim(space: ModelSpace) -> int:
    return space.n if space.kind == EUCLIDEAN else space.n + 1


def minkowski_dot(a, b):
    """<a, b> = -a_0 b_0 + sum_i a_i b_i on the last axis."""
    prod = a * b
    return prod[..., 1:].sum(axis=-1) - prod[..., 0]


def base_point(space: ModelSpace) -> np.ndarray:
    _require_point_ops(space)
    dim = ambient_dim(space)
    p = np.zeros(dim)
    if space.kind == HYPERBOLIC:
        p[0] = 1.0
    return p


def on_manifold(space: ModelSpace, p) -> bool:
    p = np.asarray(p, dtype=float)
    if space.kind == EUCLIDEAN:
        return p.shape[-1] == space.n
    return (p.shape[-1] == space.n + 1
            and bool(np.all(np.abs(minkowski_dot(p, p) + 1.0) < POINT_TOL))
            and bool(np.all(p[..., 0] > 0)))


def distance(space: ModelSpace, p, q):
    _require_point_ops(space)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if space.kind == EUCLIDEAN:
        return np.linalg.norm(p - q, axis=-1)
    return np.arccosh(np.maximum(-minkowski_dot(p, q), 1.0))


def tangent_projection(space: ModelSpace, p, w):
    """Orthogonal projection of ambient w onto the tangent space at p."""
    if space.kind == EUCLIDEAN:
        return np.asarray(w, dtype=float)
    # <p, p> = -1, so w + <w, p> p is Minkowski-orthogonal to p
    return w + minkowski_dot(w, p)[..., None] * p


def tangent_norm(space: ModelSpace, p, w):
    if space.kind == EUCLIDEAN:
        return np.linalg.norm(w, axis=-1)
    return np.sqrt(np.maximum(minkowski_dot(w, w), 0.0))


def tangent_basis(space: ModelSpace, p) -> np.ndarray:
    """Orthonormal tangent basis at p (or batched at (..., dim) points).

    Returns shape (..., n, dim). On the hyperboloid the projected spatial
    axes have Gram matrix I + p_sp p_sp^T, so fixed-order Gram-Schmidt is
    stable without pivoting.
    """
    _require_point_ops(space)
    p = np.asarray(p, dtype=float)
    n, dim = space.n, ambient_dim(space)
    if space.kind == EUCLIDEAN:
        eye = np.eye(n)
        return np.broadcast_to(eye, p.shape[:-1] + (n, n)).copy()
    batch = p.shape[:-1]
    basis = np.empty(batch + (n, dim))
    for k in range(n):
        e = np.zeros(dim)
        e[k + 1] = 1.0
        w = tangent_projection(space, p, np.broadcast_to(e, p.shape))
        for j in range(k):
            w = w - minkowski_dot(w, basis[..., j, :])[..., None] * basis[..., j, :]
        w = w / tangent_norm(space, p, w)[..., None]
        basis[..., k, :] = w
    return basis


@dataclass(frozen=True)
class UnitVector:
    """A base point with a unit tangent direction; seeds geodesics and Busemann data."""

    base: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "base", np.asarray(self.base, dtype=float))
        object.__setattr__(self, "direction", np.asarray(self.direction, dtype=float))


def make_unit_vector(space: ModelSpace, base, direction) -> UnitVector:
    """Project and normalize a direction at base, validating the invariants."""
    _require_point_ops(space)
    base = np.asarray(base, dtype=float)
    direction = tangent_projection(space, base, np.asarray(direction, dtype=float))
    nrm = tangent_norm(space, base, direction)
    if nrm < POINT_TOL:
        raise ValueError("direction is (numerically) normal to the manifold")
    v = UnitVector(base, direction / nrm)
    check_unit_vector(space, v)
    return v


def check_unit_vector(space: ModelSpace, v: UnitVector):
    if abs(tangent_norm(space, v.base, v.direction) - 1.0) > POINT_TOL:
        raise ValueError("direction is not unit length")
    if space.kind == HYPERBOLIC:
        if abs(minkowski_dot(v.base, v.direction)) > POINT_TOL:
            raise ValueError("direction is not tangent to the hyperboloid")
        if abs(minkowski_dot(v.base, v.base) + 1.0) > POINT_TOL:
            raise ValueError("base point is off the hyperboloid")


def exp_map(space: ModelSpace, base, direction, t):
    """Geodesic point exp_base(t * direction); broadcasts over all arguments."""
    _require_point_ops(space)
    base = np.asarray(base, dtype=float)
    direction = np.asarray(direction, dtype=float)
    t = np.asarray(t, dtype=float)[..., None]
    if space.kind == EUCLIDEAN:
        return base + t * direction
    return np.cosh(t) * base + np.sinh(t) * direction


def geodesic(space: ModelSpace, v: UnitVector, t):
    return exp_map(space, v.base, v.direction, t)


def busemann(space: ModelSpace, v: UnitVector, x):
    """b_v(x) = lim_{t->inf} d(x, c_v(t)) - t; closed form per chart."""
    _require_point_ops(space)
    x = np.asarray(x, dtype=float)
    if space.kind == EUCLIDEAN:
        return -((x - v.base) @ v.direction)
    # boundary covector p + v: b_v(x) = log(-<x, p + v>)
    return np.log(-minkowski_dot(x, v.base + v.direction))


def horospherical_eigenfunction(space: ModelSpace, v: UnitVector, lam):
    """f = e^{(i lam - rho) b_v}: Laplace eigenfunction with eigenvalue -(lam^2 + rho^2)."""
    mu_exp = 1j * lam - space.rho

    def fn(y):
        return np.exp(mu_exp * busemann(space, v, y))

    return fn


def sphere_rule(space: ModelSpace, degree=None):
    """Unit-sphere quadrature rule: tangent coefficients (K, n) and weights (K,).

    Gauss-Legendre in the polar cosine times uniform azimuth for S^2,
    uniform angles for S^1. Weights sum to the sphere area.
    """
    _require_point_ops(space)
    n = space.n
    if n == 2:
        m = DEFAULT_S1_NODES if degree is None else int(degree)
        ang = 2.0 * np.pi * np.arange(m) / m
        coefs = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        weights = np.full(m, 2.0 * np.pi / m)
        return coefs, weights
    ntheta, nphi = DEFAULT_S2_DEGREE if degree is None else degree
    x, wx = np.polynomial.legendre.leggauss(int(ntheta))
    phi = 2.0 * np.pi * np.arange(int(nphi)) / int(nphi)
    sin_theta = np.sqrt(1.0 - x ** 2)
    ct = np.repeat(x, nphi)
    st = np.repeat(sin_theta, nphi)
    cp = np.tile(np.cos(phi), ntheta)
    sp = np.tile(np.sin(phi), ntheta)
    coefs = np.stack([st * cp, st * sp, ct], axis=1)
    weights = np.repeat(wx, nphi) * (2.0 * np.pi / nphi)
    return coefs, weights


def sphere_directions(space: ModelSpace, x, degree=None):
    """Unit tangent directions and weights of the sphere rule at x."""
    coefs, weights = sphere_rule(space, degree)
    basis = tangent_basis(space, x)
    dirs = coefs @ basis
    return dirs, weights


def sphere_average(space: ModelSpace, f, x, t, degree=None):
    """Average of f over the geodesic sphere S(x, t)."""
    dirs, w = sphere_directions(space, x, degree)
    if np.isscalar(t) or np.asarray(t).ndim == 0:
        if float(t) == 0.0:
            return f(np.asarray(x, dtype=float)[None, :])[0]
        pts = exp_map(space, x, dirs, float(t))
        return (w @ f(pts)) / w.sum()
    t = np.asarray(t, dtype=float)
    out = np.array([sphere_average(space, f, x, ti, degree) for ti in t])
    return out


def sphere_average_batch(space: ModelSpace, f, pts, t, degree=None, chunk: int = 4096):
    """Pi_t f at many centers at once (vectorized tangent frames and spheres)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    coefs, w = sphere_rule(space, degree)
    wsum = w.sum()
    out = np.empty(len(pts), dtype=complex)
    for start in range(0, len(pts), chunk):
        block = pts[start:start + chunk]
        basis = tangent_basis(space, block)            # (m, n, dim)
        dirs = np.einsum("kn,mnd->mkd", coefs, basis)  # (m, K, dim)
        if space.kind == EUCLIDEAN:
            nodes = block[:, None, :] + t * dirs
        else:
            nodes = math.cosh(t) * block[:, None, :] + math.sinh(t) * dirs
        vals = f(nodes.reshape(-1, nodes.shape[-1])).reshape(len(block), len(w))
        out[start:start + chunk] = (vals @ w) / wsum
    if np.allclose(out.imag, 0.0):
        out = out.real
    return out


def radialize(space: ModelSpace, f, x, grid: RadialGrid | None = None,
              degree=None, chunk: int = 32) -> RadialProfile:
    """R_x f: the profile r -> (average of f over S(x, r)) on the radial grid."""
    if grid is None:
        grid = radial_grid()
    dirs, w = sphere_directions(space, x, degree)
    wsum = w.sum()
    radii = grid.nodes
    out = None
    for start in range(0, len(radii), chunk):
        r = radii[start:start + chunk]
        pts = exp_map(space, np.asarray(x, dtype=float), dirs[None, :, :], r[:, None])
        vals = f(pts.reshape(-1, pts.shape[-1])).reshape(len(r), len(w))
        block = (vals @ w) / wsum
        if out is None:
            out = np.empty(len(radii), dtype=block.dtype)
        out[start:start + chunk] = block
    x_arr = np.asarray(x, dtype=float)
    out[0] = f(x_arr[None, :])[0]  # r = 0 is the point value
    return RadialProfile(grid, out)


def translate(space: ModelSpace, x, u: RadialProfile):
    """tau_x u: the point function y -> u(d(x, y))."""
    _require_point_ops(space)
    x = np.asarray(x, dtype=float)
    rmax = u.grid.rmax

    def fn(y):
        d = distance(space, x, y)
        if np.any(d > rmax * (1.0 + 1e-12)):
            raise ExtrapolationError(
                f"translate: evaluation at distance {float(np.max(d)):.3f} exceeds rmax={rmax}")
        return u.eval(d)

    return fn


def ball_quadrature(space: ModelSpace, center, radius: float,
                    radial_nodes: int = 65, degree=None):
    """Quadrature (points, weights) for integrals over the ball B(center, radius).

    Geodesic polar rule: the measure-exact radial weights for A(r) dr times
    the sphere rule (angular weights summing to the sphere area). The center
    node carries its radial weight once (the angular average there is the
    point value).
    """
    _require_point_ops(space)
    from .radial_ops import radial_measure_weights
    from .spaces import sphere_area

    rgrid = radial_grid(radius, radial_nodes)
    dirs, w_ang = sphere_directions(space, center, degree)
    w_rad = radial_measure_weights(space, rgrid)
    radii = rgrid.nodes[1:]
    pts = exp_map(space, np.asarray(center, dtype=float), dirs[None, :, :], radii[:, None])
    weights = (w_rad[1:, None] * w_ang[None, :]).ravel()
    pts = np.concatenate([np.asarray(center, dtype=float)[None, :],
                          pts.reshape(-1, pts.shape[-1])])
    weights = np.concatenate([[w_rad[0] * sphere_area(space)], weights])
    return pts, weights


def integrate_ball(space: ModelSpace, f, center, radius: float,
                   radial_nodes: int = 65, degree=None):
    pts, w = ball_quadrature(space, center, radius, radial_nodes, degree)
    return w @ f(pts)


def laplacian_fd(space: ModelSpace, f, pts, h: float = 0.01, richardson: bool = True):
    """Finite-difference Laplacian in geodesic normal coordinates at pts.

    Delta f(p) = sum_i d^2/dt^2 f(exp_p(t e_i)) at t = 0; the central stencil
    is second order in h, fourth order with the Richardson combination.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    basis = tangent_basis(space, pts)  # (m, n, dim)

    def second_sum(step):
        f0 = f(pts)
        acc = -2.0 * space.n * f0
        for i in range(space.n):
            e = basis[:, i, :]
            acc = acc + f(exp_map(space, pts, e, step)) + f(exp_map(space, pts, -e, step))
        return acc / step ** 2

    if not richardson:
        return second_sum(h)
    coarse = second_sum(h)
    fine = second_sum(h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def convolve_general(space: ModelSpace, f, u: RadialProfile, xs,
                     center=None, radius: float | None = None,
                     radial_nodes: int = 65, degree=None):
    """Brute-force (f * u)(x) = int f(y) u(d(x, y)) dy over a ball quadrature.

    f must be supported in B(center, radius). Oracle for the spectral
    convolution; cost is (number of xs) * (ball nodes) interpolations.
    """
    _require_point_ops(space)
    if center is None:
        center = base_point(space)
    if radius is None:
        radius = u.grid.rmax / 2.0
    pts, w = ball_quadrature(space, center, radius, radial_nodes, degree)
    fw = np.asarray(f(pts)) * w
    xs_arr = np.atleast_2d(np.asarray(xs, dtype=float))
    grid = u.grid
    complex_out = np.iscomplexobj(fw) or np.iscomplexobj(u.values)
    out = np.empty(len(xs_arr), dtype=complex if complex_out else float)
    vals_re = np.ascontiguousarray(grid.reflect(np.real(u.values)), dtype=float)
    for i, x in enumerate(xs_arr):
        d = distance(space, x, pts)
        if complex_out:
            out[i] = fw @ grid.evaluate(u.values, d)
        else:
            out[i] = _kernels.weighted_interp_sum(grid._xfull, grid._wbary, vals_re, d, fw)
    return out if np.asarray(xs).ndim > 1 else out[0]


def eigenfunction_check(space: ModelSpace, f, lam, xs, ts, phi: RadialProfile,
                        degree=None, tol: float = 1e-6):
    """Does f satisfy the sphere-average eigenfunction identity at the samples?

    For each sample x: residual max_t |Pi_t f(x) - f(x) phi_lam(t)| against
    tol * |f(x)|, plus the small-t Laplacian estimate
    2n (Pi_t f - f)/t^2 ~ -(lam^2 + rho^2) f(x).
    """
    xs_arr = np.atleast_2d(np.asarray(xs, dtype=float))
    ts = np.asarray(ts, dtype=float)
    phi_t = phi.eval(ts)
    mu = complex(lam) ** 2 + space.rho ** 2
    entries = []
    t_small = 1e-3
    for x in xs_arr:
        fx = f(x[None, :])[0]
        averages = np.array([sphere_average(space, f, x, t, degree) for t in ts])
        residual = float(np.max(np.abs(averages - fx * phi_t)))
        bound = tol * abs(fx)
        small = sphere_average(space, f, x, t_small, degree)
        lap_est = 2.0 * space.n * (small - fx) / t_small ** 2
        lap_err = abs(lap_est - (-mu * fx))
        entries.append({
            "x": [float(c) for c in x],
            "residual": residual,
            "tolerance": bound,
            "laplacian_estimate_error": float(lap_err),
            "pass": bool(residual < bound),
        })
    return {
        "lambda": complex(lam).real if complex(lam).imag == 0 else str(complex(lam)),
        "entries": entries,
        "pass": all(e["pass"] for e in entries),
    }
