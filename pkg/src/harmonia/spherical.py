"""Spherical eigenfunctions and the radial Fourier transform.

phi_lam is the radial eigenfunction of the Laplacian with eigenvalue
-(lam^2 + rho^2), normalized to 1 at the center. The construction of
record is spectral collocation of the eigenvalue ODE with the r = 0 row
replaced by the normalization (machine-accurate and smooth on the grid);
the textbook route, an even power-series start on [0, r0] continued by
adaptive high-order integration, is kept as a cross-check path, since its
dense-output jitter cannot satisfy spectral-derivative identities at the
1e-8 level.

The forward transform is f_hat(lam) = omega_{n-1} * int_0^inf u phi_lam A dr.
Synthesis uses a Plancherel density nu(lam) = c * shape(lam) whose constant
is calibrated once per backend by a round-trip on exp(-r^2); no closed
Plancherel formula is assumed.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.integrate import solve_ivp

from .errors import CapabilityError, TruncationWarning
from .grids import LambdaGrid, RadialGrid, lambda_grid, radial_grid
from .profiles import DECAY_TOL, RadialProfile, SpectralProfile
from .radial_ops import radial_measure_weights
from .spaces import (EUCLIDEAN, HYPERBOLIC, ModelSpace, density,
                     drift_odd_coeffs, log_derivative, sphere_area)

FROBENIUS_RADIUS = 1e-2
FROBENIUS_ORDER = 8
NOISE_FLOOR = 3e-13  # Chebyshev-mode floor for ODE dense-output jitter
ODE_RTOL = 1e-12
ODE_ATOL = 1e-14


def eigenvalue_shift(space: ModelSpace, lam):
    """mu = lam^2 + rho^2, so that L_A phi = -mu phi."""
    return np.asarray(lam) ** 2 + space.rho ** 2


def frobenius_coefficients(space: ModelSpace, mu, order: int = FROBENIUS_ORDER):
    """Even series coefficients c_0..c_order of the normalized eigenfunction.

    Recurrence from L_A u = -mu u with A'/A = (n-1)/r + sum a_{2i-1} r^{2i-1}:
      2(K+1)(2K+n) c_{K+1} = -(mu c_K + sum_{m=1}^K 2m a_{2(K-m)+1} c_m).
    mu may be an array; coefficients then broadcast over it.
    """
    mu = np.asarray(mu)
    a = drift_odd_coeffs(space, order)
    coeffs = [np.ones_like(mu, dtype=mu.dtype)]
    n = space.n
    for big_k in range(order):
        acc = mu * coeffs[big_k]
        for m in range(1, big_k + 1):
            acc = acc + 2 * m * a[big_k - m] * coeffs[m]
        coeffs.append(-acc / (2 * (big_k + 1) * (2 * big_k + n)))
    return coeffs


def _series_eval(coeffs, r):
    r2 = np.asarray(r) ** 2
    out = np.zeros(np.broadcast(r2, coeffs[0]).shape, dtype=np.result_type(coeffs[0], r2))
    for c in coeffs[::-1]:
        out = out * r2 + c
    return out


def _series_eval_derivative(coeffs, r):
    r = np.asarray(r)
    r2 = r ** 2
    out = np.zeros(np.broadcast(r2, coeffs[0]).shape, dtype=np.result_type(coeffs[0], r2))
    for j in range(len(coeffs) - 1, 0, -1):
        out = out * r2 + 2 * j * coeffs[j]
    return out * r


def _integrate_phi_ode(space, mu, grid, rtol):
    """Frobenius start plus adaptive DOP853 continuation; cross-check path.

    Dense-output jitter (~rtol, rough on the grid scale) limits how well
    spectral derivatives of this output satisfy the eigenvalue relation;
    the collocation path below is the construction of record.
    """
    nodes = grid.nodes
    mu = np.atleast_1d(mu)
    k = len(mu)
    coeffs = frobenius_coefficients(space, mu)
    r0 = FROBENIUS_RADIUS
    out = np.empty((len(nodes), k), dtype=mu.dtype)
    inner = nodes <= r0
    out[inner] = _series_eval(coeffs, nodes[inner, None])
    outer_nodes = nodes[~inner]
    if len(outer_nodes):
        y0 = np.concatenate([_series_eval(coeffs, np.array(r0)),
                             _series_eval_derivative(coeffs, np.array(r0))])

        def rhs(r, y):
            u, du = y[:k], y[k:]
            return np.concatenate([du, -mu * u - log_derivative(space, r) * du])

        sol = solve_ivp(rhs, (r0, outer_nodes[-1]), y0, method="DOP853",
                        t_eval=outer_nodes, rtol=rtol, atol=ODE_ATOL)
        if not sol.success:
            raise RuntimeError(f"eigenfunction integration failed: {sol.message}")
        out[~inner] = sol.y[:k].T
        # strip dense-output roughness so spectral derivatives stay cleaner
        out = grid.low_pass(out, NOISE_FLOOR)
    return out


_COLLOCATION_CACHE = {}


def radial_laplacian_matrix(space, grid) -> np.ndarray:
    """Dense matrix of L_A on even profiles, assembled from the spectral
    differentiation map; row 0 carries the regular limit n u''(0)."""
    key = (space.key, grid.key)
    lap = _COLLOCATION_CACHE.get(key)
    if lap is None:
        n1 = grid.num_nodes
        eye = np.eye(n1)
        d1m = np.empty((n1, n1))
        d2m = np.empty((n1, n1))
        for j in range(n1):
            d1m[:, j] = grid.differentiate(eye[:, j], 1, truncate=False)
            d2m[:, j] = grid.differentiate(eye[:, j], 2, truncate=False)
        lap = np.empty((n1, n1))
        lap[0] = space.n * d2m[0]
        drift = log_derivative(space, grid.nodes[1:])
        lap[1:] = d2m[1:] + drift[:, None] * d1m[1:]
        lap.setflags(write=False)
        _COLLOCATION_CACHE[key] = lap
    return lap


def _integrate_phi(space, mu, grid, rtol=None):
    """phi values on the grid nodes for all mu, by spectral collocation.

    Solves (L_A + mu) u = 0 on the nodes with the r = 0 row replaced by the
    normalization u(0) = 1 (evenness supplies u'(0) = 0 structurally).
    """
    mu = np.atleast_1d(mu)
    lap = radial_laplacian_matrix(space, grid)
    n1 = grid.num_nodes
    rhs = np.zeros(n1, dtype=mu.dtype)
    rhs[0] = 1.0
    out = np.empty((n1, len(mu)), dtype=mu.dtype)
    eye_tail = np.eye(n1)
    eye_tail[0, 0] = 0.0  # no eigenvalue shift on the normalization row
    base = lap.astype(mu.dtype).copy()
    base[0] = 0.0
    base[0, 0] = 1.0
    from scipy.linalg import lu_factor, lu_solve

    drift = log_derivative(space, grid.nodes[1:])
    for idx, m in enumerate(mu):
        a = base + m * eye_tail
        fac = lu_factor(a, check_finite=False)
        x = lu_solve(fac, rhs, check_finite=False)
        # defect correction against the (smooth-data-accurate) recurrence
        # operator; the LU is only a preconditioner (kappa ~ N^4 eps makes
        # the raw solve good to ~1e-8, the corrected one to machine level)
        for _ in range(2):
            d2v = grid.differentiate(x, 2)
            d1v = grid.differentiate(x, 1)
            defect = np.empty_like(x)
            defect[0] = x[0] - 1.0
            defect[1:] = d2v[1:] + drift * d1v[1:] + m * x[1:]
            x = x - lu_solve(fac, defect, check_finite=False)
        out[:, idx] = x
    return out


def spherical_function(space: ModelSpace, lam, grid: RadialGrid | None = None,
                       rtol: float = ODE_RTOL, method: str = "collocation") -> RadialProfile:
    """The eigenfunction profile phi_lam with phi(0) = 1, phi'(0) = 0.

    Complex lam is allowed in the strip |Im lam| <= rho + 1; outside it the
    solution grows too fast for the grid to carry meaning. method="ode"
    selects the Frobenius-plus-integration cross-check path.
    """
    if grid is None:
        grid = radial_grid()
    lam = complex(lam)
    if abs(lam.imag) > space.rho + 1.0 + 1e-12:
        raise ValueError(f"lam must satisfy |Im lam| <= rho + 1 = {space.rho + 1}")
    builder = {"collocation": _integrate_phi, "ode": _integrate_phi_ode}[method]
    mu = lam ** 2 + space.rho ** 2
    if lam.imag == 0.0:
        vals = builder(space, np.array([mu.real]), grid, rtol)[:, 0]
    else:
        vals = builder(space, np.array([mu], dtype=complex), grid, rtol)[:, 0]
    return RadialProfile(grid, vals)


_PHI_CACHE = {}


def phi_matrix(space: ModelSpace, grid: RadialGrid, lgrid: LambdaGrid,
               rtol: float = ODE_RTOL) -> np.ndarray:
    """Eigenfunction table phi[lam_m, r_i] for a real frequency grid; cached."""
    key = (space.key, grid.key, lgrid.key, rtol)
    mat = _PHI_CACHE.get(key)
    if mat is None:
        mu = eigenvalue_shift(space, lgrid.lam).astype(float)
        mat = _integrate_phi(space, mu, grid, rtol).T
        mat.setflags(write=False)
        _PHI_CACHE[key] = mat
    return mat


def _check_decay(u: RadialProfile, what: str):
    if u.decay_residual() > DECAY_TOL:
        warnings.warn(f"{what}: profile has not decayed below {DECAY_TOL:g} at rmax; "
                      "the result is truncated", TruncationWarning)


def spherical_fourier(space: ModelSpace, u: RadialProfile,
                      lgrid: LambdaGrid | None = None) -> SpectralProfile:
    """f_hat(lam) = omega_{n-1} * int_0^rmax u(r) phi_lam(r) A(r) dr."""
    if lgrid is None:
        lgrid = lambda_grid()
    _check_decay(u, "spherical_fourier")
    grid = u.grid
    phi = phi_matrix(space, grid, lgrid)
    weight = radial_measure_weights(space, grid) * sphere_area(space)
    vals = phi @ (weight * u.values)
    if u.is_real:
        vals = np.real(vals)
    return SpectralProfile(lgrid, vals)


def plancherel_shape(space: ModelSpace, lam):
    """Known shape of the inversion density; the constant comes from calibration."""
    lam = np.asarray(lam, dtype=float)
    if space.kind == EUCLIDEAN:
        return lam ** (space.n - 1)
    if space.kind == HYPERBOLIC and space.n == 3:
        return lam ** 2
    if space.kind == HYPERBOLIC and space.n == 2:
        return lam * np.tanh(np.pi * lam)
    raise CapabilityError(
        f"no inversion density available for {space}; supported: euclidean, "
        "hyperbolic n in {2, 3}")


def _shape_slope_at_zero(space: ModelSpace) -> float:
    """d(shape)/dlam at 0+: nonzero only for flat n = 2, whose density is
    linear in lam and kinks the even synthesis integrand at the endpoint."""
    return 1.0 if (space.kind == EUCLIDEAN and space.n == 2) else 0.0


_CALIBRATION_CACHE = {}


def _plancherel_constant(space: ModelSpace, grid: RadialGrid, lgrid: LambdaGrid) -> float:
    """Least-squares fit of the synthesis of exp(-r^2)-hat against exp(-r^2)."""
    key = (space.key, grid.key, lgrid.key)
    const = _CALIBRATION_CACHE.get(key)
    if const is None:
        ref = RadialProfile(grid, np.exp(-grid.nodes ** 2))
        fhat = spherical_fourier(space, ref, lgrid)
        phi = phi_matrix(space, grid, lgrid)
        shape = plancherel_shape(space, lgrid.lam)
        raw = (lgrid.trapz_weights * shape * fhat.values) @ phi
        slope = _shape_slope_at_zero(space)
        if slope:
            raw = raw + (lgrid.lam[1] ** 2 / 12.0) * slope * fhat.values[0] * phi[0]
        const = float((raw @ ref.values) / (raw @ raw))
        _CALIBRATION_CACHE[key] = const
    return const


def plancherel_density(space: ModelSpace, lam, grid: RadialGrid | None = None,
                       lgrid: LambdaGrid | None = None):
    """nu(lam) for the synthesis u(r) = int f_hat(lam) phi_lam(r) nu(lam) dlam."""
    if grid is None:
        grid = radial_grid()
    if lgrid is None:
        lgrid = lambda_grid()
    return _plancherel_constant(space, grid, lgrid) * plancherel_shape(space, lam)


def inverse_spherical(space: ModelSpace, fhat: SpectralProfile,
                      grid: RadialGrid | None = None) -> RadialProfile:
    """Synthesis against the calibrated density; round-trip inverse of the transform."""
    if grid is None:
        grid = radial_grid()
    lgrid = fhat.grid
    tail = np.max(np.abs(fhat.values[lgrid.lam >= 0.95 * lgrid.lmax]))
    sup = fhat.sup_norm()
    if sup > 0 and tail > 1e-9 * sup:
        warnings.warn("inverse_spherical: spectral data has not decayed at "
                      "lambda_max; synthesis is truncated", TruncationWarning)
    nu = plancherel_density(space, lgrid.lam, grid, lgrid)
    phi = phi_matrix(space, grid, lgrid)
    vals = (lgrid.trapz_weights * nu * fhat.values) @ phi
    slope = _shape_slope_at_zero(space)
    if slope:
        # Euler-Maclaurin endpoint term for the |lam|-kink of an odd density
        const = _plancherel_constant(space, grid, lgrid)
        vals = vals + (lgrid.lam[1] ** 2 / 12.0) * const * slope * fhat.values[0] * phi[0]
    if fhat.is_real:
        vals = np.real(vals)
    return RadialProfile(grid, vals)
