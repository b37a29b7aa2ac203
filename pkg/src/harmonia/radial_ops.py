"""Radial Laplacian, its polynomials, and even-derivative extraction at r = 0.

The radial part of the Laplacian is L_A = d^2/dr^2 + (A'/A) d/dr. At r = 0
the drift term has the limit (n-1) u''(0), so L_A u(0) = n u''(0); the
spectral operator uses that limit row instead of dividing by r.
"""

from __future__ import annotations

import math
import warnings
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import AccuracyWarning
from .grids import RadialGrid
from .profiles import LaplacePolynomial, RadialProfile
from .spaces import ModelSpace, _drift_coeffs_exact, density, log_derivative

RESOLUTION_TAIL = 1e-5

_COEFF_MAP_CACHE = {}
_MEASURE_CACHE = {}


def _coefficient_map(grid: RadialGrid) -> np.ndarray:
    """Matrix of the linear map stored values -> full Chebyshev coefficients."""
    mat = _COEFF_MAP_CACHE.get(grid.key)
    if mat is None:
        n1 = grid.num_nodes
        eye = np.eye(n1)
        cols = [grid.cheb_coefficients(eye[:, j]) for j in range(n1)]
        mat = np.stack(cols, axis=1)
        mat.setflags(write=False)
        _COEFF_MAP_CACHE[grid.key] = mat
    return mat


def radial_measure_weights(space: ModelSpace, grid: RadialGrid) -> np.ndarray:
    """Weights W with sum_i W_i h(r_i) ~= int_0^rmax h(r) A(r) dr for even smooth h.

    The plain reflection rule kinks whenever A has odd parity (even n), so
    these weights pair the even Chebyshev interpolant of h with exact
    modified moments of A, m_k = int T_k(r/rmax) A(r) dr, computed by
    panel Gauss-Legendre in theta = arccos(r/rmax) where T_k oscillates
    uniformly.
    """
    key = (space.key, grid.key)
    w = _MEASURE_CACHE.get(key)
    if w is None:
        rmax = grid.rmax
        kmax = 2 * (grid.num_nodes - 1)
        panels = max(32, kmax // 8)
        glx, glw = np.polynomial.legendre.leggauss(64)
        edges = np.linspace(0.0, np.pi / 2.0, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        theta = (mid[:, None] + half[:, None] * glx[None, :]).ravel()
        wq = (half[:, None] * glw[None, :]).ravel()
        r = rmax * np.cos(theta)
        fq = wq * density(space, r) * rmax * np.sin(theta)
        moments = np.cos(np.arange(kmax + 1)[:, None] * theta[None, :]) @ fq
        w = _coefficient_map(grid).T @ moments
        w.setflags(write=False)
        _MEASURE_CACHE[key] = w
    return w


def _support_window(grid: RadialGrid, values):
    """Smooth taper vanishing outside the support of the sampled profile.

    L_A is local, so L_A^k u shares u's support; iterated spectral
    derivatives however pile up k^4-amplified rounding noise near r = rmax
    (where the Chebyshev modes concentrate), and multiplying it away is
    exact. Returns None when the profile has not decayed (nothing may be
    cut) or when there is no room for a taper.
    """
    absv = np.abs(values).astype(float)
    peak = absv.max()
    if peak == 0.0:
        return None
    supported = absv > 1e-13 * peak
    r_supp = grid.nodes[supported][-1]
    start = r_supp + 0.25
    end = start + 1.0
    if end >= grid.rmax:
        return None
    r = grid.nodes
    t = np.clip((r - start) / (end - start), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f0 = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        f1 = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    window = f1 / (f0 + f1)
    return window


def _to_extended(values):
    return values.astype(np.clongdouble if np.iscomplexobj(values) else np.longdouble)


def _from_extended(values):
    return values.astype(complex if np.iscomplexobj(values) else float)


def _laplacian_core(space: ModelSpace, grid: RadialGrid, work):
    """L_A on raw values, preserving the working dtype."""
    d2 = grid.differentiate(work, 2)
    d1 = grid.differentiate(work, 1)
    drift = log_derivative(space, grid.nodes.astype(np.longdouble)[1:])
    out = np.empty_like(d2)
    out[0] = space.n * d2[0]
    out[1:] = d2[1:] + drift * d1[1:]
    return out


def apply_radial_laplacian(space: ModelSpace, u: RadialProfile, check: bool = False) -> RadialProfile:
    """L_A u = u'' + (A'/A) u', with the limit value n u''(0) at r = 0.

    Differentiation runs in extended precision: measure-weighted integrals
    over hyperbolic balls amplify pointwise profile errors by the ball
    volume (~1e7 at rmax = 8), so double-precision application noise would
    be visible at the transform level.
    """
    grid = u.grid
    out = _laplacian_core(space, grid, _to_extended(u.values))
    window = _support_window(grid, u.values)
    if window is not None:
        out = out * window
    result = RadialProfile(grid, _from_extended(out))
    if check and result.sup_norm() > 0 and grid.tail_fraction(result.values) > RESOLUTION_TAIL:
        warnings.warn("grid may not resolve the differentiated profile", AccuracyWarning)
    return result


def apply_polynomial(space: ModelSpace, poly: LaplacePolynomial, u: RadialProfile,
                     check: bool = True) -> RadialProfile:
    """P(Delta) u = sum a_k L_A^k u, Horner iteration held in extended precision."""
    coeffs = poly.coeffs
    real_out = u.is_real and bool(np.allclose(np.imag(coeffs), 0.0))
    if real_out:
        coeffs = np.real(coeffs)
        work = u.values.astype(np.longdouble)
    else:
        work = u.values.astype(np.clongdouble)
    window = _support_window(u.grid, u.values)
    acc = coeffs[-1] * work
    for a in coeffs[-2::-1]:
        acc = _laplacian_core(space, u.grid, acc) + a * work
        if window is not None:
            acc = acc * window
    result = RadialProfile(u.grid, acc.astype(float if real_out else complex))
    if check and result.sup_norm() > 0 and u.grid.tail_fraction(result.values) > RESOLUTION_TAIL:
        warnings.warn(
            f"grid may not resolve {2 * poly.degree} derivatives of the profile",
            AccuracyWarning)
    return result


@lru_cache(maxsize=None)
def _laplacian_power_table(key, size: int):
    """T[k][j] = (L_A^k r^{2j})(0), exact. Lower triangular with nonzero diagonal.

    L_A acts on the even-monomial basis e_j = r^{2j} by
      L_A e_j = 2j (2j - 2 + n) e_{j-1} + sum_i 2j a_{2i-1} e_{j+i-1},
    and a path from index j down to 0 in k steps never exceeds index size-1
    for k < size, so the truncation is exact.
    """
    kind, n, p, q = key
    a = _drift_coeffs_exact(key, size)
    mat = [[Fraction(0)] * size for _ in range(size)]
    for j in range(1, size):
        mat[j - 1][j] = Fraction(2 * j * (2 * j - 2 + n))
        for i in range(1, size):
            t = j + i - 1
            if t < size:
                mat[t][j] += 2 * j * a[i - 1]
    rows = [[Fraction(1)] + [Fraction(0)] * (size - 1)]
    current = rows[0]
    for _ in range(1, size):
        current = [sum(current[t] * mat[t][j] for t in range(size)) for j in range(size)]
        rows.append(current)
    return tuple(tuple(row) for row in rows)


def laplacian_power_table(space: ModelSpace, j_max: int):
    """Exact values (L_A^k r^{2j})(0) for 0 <= k, j <= j_max."""
    return _laplacian_power_table(space.key, j_max + 1)


def compute_pj_exact(space: ModelSpace, j_max: int):
    """Exact coefficients of P_0..P_{j_max} with u^{(2j)}(0) = P_j(Delta) f(x0).

    Returned as tuples of Fractions, lowest degree first.
    """
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    size = j_max + 1
    table = laplacian_power_table(space, j_max)
    # forward-substitute the lower-triangular system T S = I, then scale rows
    inv = [[Fraction(0)] * size for _ in range(size)]
    for col in range(size):
        for row in range(size):
            rhs = Fraction(1) if row == col else Fraction(0)
            rhs -= sum(table[row][t] * inv[t][col] for t in range(row))
            inv[row][col] = rhs / table[row][row]
    # inv solves sum_t T[row][t] x[t] = e_col in the j index: x = column of T^{-1}
    out = []
    for j in range(size):
        fact = math.factorial(2 * j)
        out.append(tuple(fact * inv[j][k] for k in range(size)))
    return out


def compute_pj(space: ModelSpace, j_max: int):
    """P_0..P_{j_max} as LaplacePolynomial values (floating point coefficients)."""
    exact = compute_pj_exact(space, j_max)
    return [LaplacePolynomial([float(c) for c in row]) for row in exact]


def laplacian_values_at_zero(space: ModelSpace, u: RadialProfile, k_max: int) -> np.ndarray:
    """(L_A^k u)(0) for k = 0..k_max via iterated spectral application."""
    vals = np.empty(k_max + 1, dtype=complex)
    work = _to_extended(u.values)
    vals[0] = complex(work[0])
    for k in range(1, k_max + 1):
        work = _laplacian_core(space, u.grid, work)
        vals[k] = complex(work[0])
    return vals


def derivatives_at_zero(space: ModelSpace, u: RadialProfile, j_max: int) -> np.ndarray:
    """u^{(2j)}(0) for j = 0..j_max, evaluated as P_j(Delta) f(x0)."""
    pj = compute_pj_exact(space, j_max)
    lap0 = laplacian_values_at_zero(space, u, j_max)
    out = np.array([sum(float(c) * lap0[k] for k, c in enumerate(row)) for row in pj])
    if u.is_real and np.allclose(out.imag, 0.0):
        out = out.real
    return out


def monomial_profile(grid: RadialGrid, j: int) -> RadialProfile:
    """The even monomial r^{2j} sampled on the grid."""
    return RadialProfile(grid, grid.nodes ** (2 * j))
