"""Abel transform, its dual, inversion, and the radial convolution engine.

The primary Abel path is spectral: A(u) is the inverse Euclidean Fourier
transform (cosine synthesis) of the radial Fourier transform of u, which
works on every backend. The horosphere-integral formula is implemented for
point-capable backends as a cross-validation oracle. Convolution is
multiplication of radial Fourier transforms followed by synthesis;
line convolution is FFT-based on the uniform grid.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import CapabilityError, TruncationWarning
from .grids import (LambdaGrid, LineGrid, RadialGrid, cosine_matrix,
                    default_line_grid, lambda_grid, radial_grid)
from .profiles import DECAY_TOL, LineProfile, RadialProfile, SpectralProfile
from .radial_ops import radial_measure_weights
from .spaces import (EUCLIDEAN, HYPERBOLIC, ModelSpace, density, sphere_area)
from .spherical import inverse_spherical, phi_matrix, spherical_fourier


def fourier_of_line(w: LineProfile, lgrid: LambdaGrid | None = None) -> SpectralProfile:
    """F(w)(lam) = int e^{i lam s} w(s) ds = 2 int_0^inf w cos(lam s) ds."""
    if lgrid is None:
        lgrid = lambda_grid()
    mat = cosine_matrix(lgrid, w.grid)
    vals = 2.0 * (mat @ (w.grid.trapz_weights * w.values))
    return SpectralProfile(lgrid, vals)


def line_from_fourier(fhat: SpectralProfile, sgrid: LineGrid) -> LineProfile:
    """Inverse transform (1/pi) int_0^inf F(lam) cos(lam s) dlam on the s grid."""
    mat = cosine_matrix(fhat.grid, sgrid)
    vals = ((fhat.grid.trapz_weights * fhat.values) @ mat) / math.pi
    return LineProfile(sgrid, vals)


def abel_transform(space: ModelSpace, u: RadialProfile,
                   sgrid: LineGrid | None = None,
                   lgrid: LambdaGrid | None = None) -> LineProfile:
    """A(u) on the line, via cosine synthesis of the radial Fourier transform."""
    if sgrid is None:
        sgrid = default_line_grid(u.grid.rmax)
    fhat = spherical_fourier(space, u, lgrid)
    return line_from_fourier(fhat, sgrid)


def abel_transform_geometric(space: ModelSpace, u: RadialProfile,
                             sgrid: LineGrid | None = None,
                             quad_nodes: int = 400) -> LineProfile:
    """A(u)(s) = e^{-rho s} * integral of u over the horosphere at height s.

    Euclidean horospheres are hyperplanes at distance |s| from the center;
    hyperbolic ones are computed in the upper half-space model, where the
    horosphere at Busemann value s is the horizontal plane y = e^{-s} with
    flat induced metric scaled by e^{2s}. Validation oracle for the spectral
    path; point-capable backends only.
    """
    if not space.point_ops:
        raise CapabilityError(f"geometric Abel transform needs point operations; {space} is radial-only")
    if sgrid is None:
        sgrid = default_line_grid(u.grid.rmax)
    n = space.n
    rmax = u.grid.rmax
    glx, glw = np.polynomial.legendre.leggauss(quad_nodes)
    omega = 2.0 if n == 2 else 2.0 * math.pi  # area of S^{n-2}
    dtype = complex if np.iscomplexobj(u.values) else float
    out = np.zeros(sgrid.num_half, dtype=dtype)
    for i, s in enumerate(sgrid.s):
        if space.kind == EUCLIDEAN:
            # hyperplane at distance s from the center
            if s >= rmax:
                continue
            tmax = math.sqrt(rmax ** 2 - s ** 2)
            t = 0.5 * tmax * (glx + 1.0)
            wt = 0.5 * tmax * glw
            dist = np.sqrt(s ** 2 + t ** 2)
            prefac = 1.0
        else:
            # half-space model: the horosphere at Busemann value s is the
            # plane y = e^{-s}, flat with volume element e^{(n-1)s} dx, and
            # cosh d((x, y), base) = 1 + (|x|^2 + (y-1)^2) / (2y)
            y = math.exp(-s)
            c = (y - 1.0) ** 2
            tmax2 = 2.0 * y * (math.cosh(rmax) - 1.0) - c
            if tmax2 <= 0:
                continue
            tmax = math.sqrt(tmax2)
            t = 0.5 * tmax * (glx + 1.0)
            wt = 0.5 * tmax * glw
            arg = 1.0 + (t ** 2 + c) / (2.0 * y)
            dist = np.arccosh(np.maximum(arg, 1.0))
            # e^{-rho s} * e^{(n-1)s} = e^{rho s}
            prefac = math.exp(space.rho * s)
        vals = u.eval(dist)
        out[i] = prefac * omega * (wt @ (vals * t ** (n - 2)))
    return LineProfile(sgrid, out)


def dual_abel(space: ModelSpace, w, grid: RadialGrid | None = None,
              lgrid: LambdaGrid | None = None, path: str = "spectral",
              sgrid: LineGrid | None = None, degree=None) -> RadialProfile:
    """a(w)(r): sphere average of e^{-rho b_v} w(b_v) at radius r.

    path="spectral" expands w in cosines and synthesizes against the
    eigenfunction table (all backends): a(cos(lam .)) = phi_lam.
    path="quadrature" averages over geodesic spheres (point backends only).
    w may be a callable on R or a LineProfile.
    """
    if grid is None:
        grid = radial_grid()
    if path == "quadrature":
        from . import geometry

        if not space.point_ops:
            raise CapabilityError(f"quadrature path needs point operations; {space} is radial-only")
        fn = w if callable(w) else w.eval
        if space.kind == HYPERBOLIC:
            return _dual_abel_axial(space, fn, grid, degree)
        base = geometry.base_point(space)
        direction = geometry.tangent_basis(space, base)[0]
        vec = geometry.UnitVector(base, direction)
        rho = space.rho

        def integrand(y):
            b = geometry.busemann(space, vec, y)
            return np.exp(-rho * b) * fn(b)

        return geometry.radialize(space, integrand, base, grid, degree=degree)
    if path != "spectral":
        raise ValueError(f"unknown dual Abel path {path!r}")
    if lgrid is None:
        lgrid = lambda_grid()
    if callable(w):
        if sgrid is None:
            sgrid = default_line_grid(grid.rmax)
        w = LineProfile.from_function(w, sgrid)
    tail = np.max(np.abs(w.values[w.grid.s >= 0.95 * w.grid.smax]))
    if tail > 1e-9 * max(w.sup_norm(), 1e-300):
        warnings.warn("dual_abel (spectral path): w has not decayed on the line "
                      "grid; use the quadrature path for non-decaying data",
                      TruncationWarning)
    what = fourier_of_line(w, lgrid)
    phi = phi_matrix(space, grid, lgrid)
    vals = ((lgrid.trapz_weights * what.values) @ phi) / math.pi
    if w.is_real:
        vals = np.real(vals)
    return RadialProfile(grid, vals)


def _dual_abel_axial(space: ModelSpace, fn, grid: RadialGrid, degree=None) -> RadialProfile:
    """Sphere average of e^{-rho b} w(b) on hyperbolic space via the exact
    axial pushforward of the sphere measure.

    On S(x0, t) the Busemann value is b = log(cosh t - sinh t cos(theta)),
    so the angular integrand carries a near-pole at the antipodal direction
    (it reaches e^{rho t}); parametrized by b = t sin(psi) the axial density
    is analytic and Gauss-Legendre in psi converges spectrally. n in {2, 3}.
    """
    m = 128 if degree is None else int(np.atleast_1d(np.asarray(degree)).ravel()[0])
    glx, glw = np.polynomial.legendre.leggauss(m)
    psi = 0.5 * np.pi * glx
    wq = 0.5 * np.pi * glw
    t = grid.nodes[1:, None]
    b = t * np.sin(psi)[None, :]
    # axial density in b: (1 - u^2)^{(n-3)/2} e^b db with u = (cosh t - e^b)/sinh t
    if space.n == 3:
        dens = np.exp(b) * (t * np.cos(psi)[None, :])
    else:
        root = np.sqrt(np.expm1(t + b) * np.expm1(t - b))
        dens = np.sinh(t) * np.exp(0.5 * (b + t)) * (t * np.cos(psi)[None, :]) / root
    num = (dens * np.exp(-space.rho * b) * fn(b)) @ wq
    den = dens @ wq
    vals = np.empty(grid.num_nodes, dtype=num.dtype)
    vals[0] = np.asarray(fn(np.array([0.0]))).ravel()[0]
    vals[1:] = num / den
    return RadialProfile(grid, vals)


def inverse_abel(space: ModelSpace, w: LineProfile,
                 grid: RadialGrid | None = None,
                 lgrid: LambdaGrid | None = None) -> RadialProfile:
    """Inverse of the Abel transform via Fourier analysis and synthesis."""
    if grid is None:
        grid = radial_grid()
    what = fourier_of_line(w, lgrid)
    return inverse_spherical(space, what, grid)


def line_convolve(w1: LineProfile, w2: LineProfile) -> LineProfile:
    """Euclidean convolution of even line profiles via FFT.

    The combined support must fit inside [-smax, smax]; otherwise the result
    cannot be represented and an error is raised.
    """
    if w1.grid.key != w2.grid.key:
        raise ValueError("line profiles live on different grids")
    grid = w1.grid
    if w1.support_radius() + w2.support_radius() > grid.smax * (1 + 1e-12):
        raise ValueError("combined support exceeds the line grid; increase smax")
    if np.iscomplexobj(w1.values) or np.iscomplexobj(w2.values):
        re = line_convolve(LineProfile(grid, np.real(w1.values)), LineProfile(grid, np.real(w2.values))).values \
            - line_convolve(LineProfile(grid, np.imag(w1.values)), LineProfile(grid, np.imag(w2.values))).values
        im = line_convolve(LineProfile(grid, np.real(w1.values)), LineProfile(grid, np.imag(w2.values))).values \
            + line_convolve(LineProfile(grid, np.imag(w1.values)), LineProfile(grid, np.real(w2.values))).values
        return LineProfile(grid, re + 1j * im)
    # full samples sit at s_j = -smax + j ds, j = 0..2K-1; the linear
    # convolution entry l lives at -2 smax + l ds, so s = 0 is l = 2K
    f1 = grid.full_values(w1.values)
    f2 = grid.full_values(w2.values)
    size = 2 * len(f1)
    spec = np.fft.rfft(f1, size) * np.fft.rfft(f2, size)
    conv = np.fft.irfft(spec, size) * grid.ds
    center = 2 * (grid.num_half - 1)
    vals = conv[center:center + grid.num_half]
    return LineProfile(grid, vals)


def radial_convolve(space: ModelSpace, u: RadialProfile, v: RadialProfile,
                    lgrid: LambdaGrid | None = None) -> RadialProfile:
    """u * v via multiplication of radial Fourier transforms and synthesis."""
    if u.grid.key != v.grid.key:
        raise ValueError("profiles live on different grids")
    uhat = spherical_fourier(space, u, lgrid)
    vhat = spherical_fourier(space, v, lgrid)
    return inverse_spherical(space, uhat * vhat, u.grid)


def weighted_l1(space: ModelSpace, u: RadialProfile) -> float:
    """The norm of u as a function on the space: omega * int |u| A dr.

    |u| is only piecewise smooth where u changes sign; the rule is then
    good to roughly quadrature-of-a-kink accuracy, which is all the norm
    is used for.
    """
    w = radial_measure_weights(space, u.grid)
    return float(sphere_area(space) * (w @ np.abs(u.values)))


def radial_mass(space: ModelSpace, u: RadialProfile):
    """omega * int u A dr (signed mass)."""
    w = radial_measure_weights(space, u.grid)
    return sphere_area(space) * (w @ u.values)


def bump_values(x, eps):
    """Compactly supported mollifier shape exp(-1/(1-(x/eps)^2)) on [0, eps)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < eps
    t = (x[inside] / eps) ** 2
    out[inside] = np.exp(-1.0 / (1.0 - t))
    return out


def radial_mollifier(space: ModelSpace, eps: float, grid: RadialGrid | None = None) -> RadialProfile:
    """Unit-mass mollifier supported in the ball of radius eps around the center."""
    if grid is None:
        grid = radial_grid()
    raw = RadialProfile(grid, bump_values(grid.nodes, eps))
    mass = radial_mass(space, raw)
    if mass <= 0:
        raise ValueError("mollifier width too small for the grid")
    return RadialProfile(grid, raw.values / mass)


def line_mollifier(eps: float, sgrid: LineGrid) -> LineProfile:
    """Unit-mass even mollifier on the line, supported in [-eps, eps]."""
    raw = LineProfile(sgrid, bump_values(sgrid.s, eps))
    mass = raw.integral()
    if mass <= 0:
        raise ValueError("mollifier width too small for the line grid")
    return LineProfile(sgrid, raw.values / mass)
