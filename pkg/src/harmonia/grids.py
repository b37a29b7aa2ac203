"""Radial, line and frequency grids with spectral differentiation and quadrature.

The radial grid holds the positive half of a Chebyshev-Lobatto grid on
[-R, R]; even profiles are differentiated and interpolated through their
reflection, so odd derivatives vanish identically at r = 0 and the 1/r
drift never meets a spurious u'(0).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import _kernels


def _cheb_diff_matrix(x, theta):
    """Chebyshev-Lobatto differentiation matrix on nodes x = R cos(theta).

    Off-diagonal entries use the trigonometric form of x_i - x_j and the
    diagonal the negative-sum trick, which keeps roundoff near eps*N^2
    instead of eps*N^4.
    """
    m = len(x) - 1
    c = np.ones(m + 1)
    c[0] = c[m] = 2.0
    sign = (-1.0) ** np.arange(m + 1)
    half_sum = 0.5 * (theta[:, None] + theta[None, :])
    half_diff = 0.5 * (theta[:, None] - theta[None, :])
    scale = x[0]  # = R
    with np.errstate(divide="ignore", invalid="ignore"):
        dx = -2.0 * scale * np.sin(half_sum) * np.sin(half_diff)
        d = (c[:, None] * sign[:, None]) * (sign[None, :] / c[None, :]) / dx
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))
    return d


def _clenshaw_curtis_weights(m):
    """Clenshaw-Curtis weights on the m+1 Lobatto points of [-1, 1]; m even."""
    theta = np.pi * np.arange(m + 1) / m
    w = np.zeros(m + 1)
    ii = np.arange(1, m)
    v = np.ones(m - 1)
    for k in range(1, m // 2):
        v -= 2.0 * np.cos(2.0 * k * theta[ii]) / (4.0 * k * k - 1.0)
    v -= np.cos(m * theta[ii]) / (m * m - 1.0)
    w[0] = w[m] = 1.0 / (m * m - 1.0)
    w[ii] = 2.0 * v / m
    return w


class RadialGrid:
    """Positive half of a Chebyshev-Lobatto grid on [-rmax, rmax].

    nodes are ascending with nodes[0] = 0 and nodes[-1] = rmax. d1 and d2
    map stored values of an even function to its first and second
    derivative values on the nodes; cc_weights integrate over [0, rmax].
    """

    def __init__(self, rmax: float = 8.0, num_nodes: int = 257):
        if rmax <= 0:
            raise ValueError("rmax must be positive")
        if num_nodes < 8:
            raise ValueError("num_nodes must be at least 8")
        n = num_nodes - 1
        m = 2 * n
        self.rmax = float(rmax)
        self.num_nodes = int(num_nodes)
        # exact antisymmetry: x_j = R sin((n-j) pi / m), x_{m-j} = -x_j, x_n = 0
        j = np.arange(m + 1)
        xfull = rmax * np.sin((n - j) * np.pi / m)
        theta = j * np.pi / m
        self.nodes = xfull[n::-1].copy()
        self._xfull = xfull
        self._theta = theta
        self._n = n
        self._m = m
        # barycentric weights of the Lobatto family (scale-free)
        wb = (-1.0) ** j
        wb[0] *= 0.5
        wb[m] *= 0.5
        self._wbary = wb
        self._fold_index = np.abs(n - j)
        dfull = _cheb_diff_matrix(xfull, theta)
        d2full = dfull @ dfull
        np.fill_diagonal(d2full, 0.0)
        np.fill_diagonal(d2full, -d2full.sum(axis=1))
        self.d1 = self._fold(dfull)
        self.d2 = self._fold(d2full)
        wcc = _clenshaw_curtis_weights(m) * rmax
        pos = n - np.arange(num_nodes)  # full index of stored node i
        w = wcc[pos].copy()
        w[0] *= 0.5
        self.cc_weights = w
        for arr in (self.nodes, self.d1, self.d2, self.cc_weights):
            arr.setflags(write=False)

    def _fold(self, dfull):
        n, m = self._n, self._m
        rows = n - np.arange(self.num_nodes)
        sub = dfull[rows]
        out = np.empty((self.num_nodes, self.num_nodes))
        out[:, 0] = sub[:, n]
        for b in range(1, self.num_nodes):
            out[:, b] = sub[:, n - b] + sub[:, n + b]
        return out

    @property
    def key(self):
        return (self.rmax, self.num_nodes)

    def reflect(self, values):
        """Even extension of stored values onto the full grid (descending order)."""
        return np.asarray(values)[self._fold_index]

    def evaluate(self, values, pts):
        """Barycentric evaluation of the even interpolant at arbitrary |pts| <= rmax."""
        pts = np.asarray(pts, dtype=float)
        scalar = pts.ndim == 0
        flat = np.abs(pts).ravel()
        values = np.asarray(values)
        if np.iscomplexobj(values):
            re = _kernels.barycentric_eval(self._xfull, self._wbary,
                                           np.ascontiguousarray(self.reflect(values.real)), flat)
            im = _kernels.barycentric_eval(self._xfull, self._wbary,
                                           np.ascontiguousarray(self.reflect(values.imag)), flat)
            out = re + 1j * im
        else:
            out = _kernels.barycentric_eval(self._xfull, self._wbary,
                                            np.ascontiguousarray(self.reflect(values), dtype=float), flat)
        return out[0] if scalar else out.reshape(pts.shape)

    def integrate(self, values):
        """Clenshaw-Curtis integral over [0, rmax]."""
        return self.cc_weights @ np.asarray(values)

    def cheb_coefficients(self, values):
        """Chebyshev coefficients of the even interpolant on the full grid."""
        from scipy.fft import dct

        vfull = self.reflect(values)
        if np.iscomplexobj(vfull):
            return (self.cheb_coefficients(np.real(values))
                    + 1j * self.cheb_coefficients(np.imag(values)))
        a = dct(vfull, type=1) / self._m
        a[0] *= 0.5
        a[-1] *= 0.5
        return a

    def _synthesize(self, coeffs):
        """Values on the stored (ascending) nodes from full Chebyshev coefficients."""
        from scipy.fft import dct

        tmp = coeffs.copy()
        tmp[1:-1] *= 0.5
        vals_full = dct(tmp, type=1)
        return vals_full[self._n::-1]

    def differentiate(self, values, order: int = 1, truncate: bool = True):
        """Spectral derivative of the even interpolant on the stored nodes.

        Coefficient-space recurrence (roundoff ~ eps * N^2 instead of the
        eps * N^4 of squared differentiation matrices).
        """
        values = np.asarray(values)
        if np.iscomplexobj(values):
            return (self.differentiate(values.real, order, truncate)
                    + 1j * self.differentiate(values.imag, order, truncate))
        a = self.cheb_coefficients(values)
        m = self._m
        # rounding-floor truncation: sub-eps modes are rounding noise of the
        # (double-precision) data and get amplified by ~k^2 per derivative
        # order. The floor stays at float64 eps even for extended-precision
        # work buffers, since profile data always originates in double.
        peak = np.max(np.abs(a))
        eps = np.finfo(np.float64).eps
        if truncate and peak > 0:
            a[np.abs(a) < 4.0 * eps * peak] = 0.0
        for _ in range(order):
            # b_{k-1} = b_{k+1} + 2k a_k: suffix sums over each parity class
            t = 2.0 * np.arange(m + 1) * a
            b = np.zeros_like(a)
            for parity in (0, 1):
                ks = np.arange(m - (m - parity) % 2, 0, -2)[::-1]  # ascending ks of this parity
                if len(ks):
                    suf = np.cumsum(t[ks][::-1])[::-1]
                    b[ks - 1] = suf
            b[0] *= 0.5
            a = b / self.rmax
        return self._synthesize(a)

    def low_pass(self, values, rel_floor: float):
        """Zero Chebyshev modes below rel_floor * peak and resynthesize.

        Projects samples of an analytic function onto their resolved modes;
        used to strip ODE dense-output noise before differentiation. values
        may be 1d or (num_nodes, k) for k profiles at once.
        """
        from scipy.fft import dct

        values = np.asarray(values)
        if np.iscomplexobj(values):
            return (self.low_pass(values.real, rel_floor)
                    + 1j * self.low_pass(values.imag, rel_floor))
        squeeze = values.ndim == 1
        mat = values[:, None] if squeeze else values
        vfull = mat[self._fold_index]
        a = dct(vfull, type=1, axis=0) / self._m
        a[0] *= 0.5
        a[-1] *= 0.5
        mag = np.abs(a)
        peak = np.max(mag, axis=0)
        # zero the suffix past the last resolved mode (per column); interior
        # dips are kept so the tail's smoothness structure stays intact
        keep = mag >= rel_floor * peak[None, :]
        keep = np.maximum.accumulate(keep[::-1], axis=0)[::-1]
        a[~keep] = 0.0
        a[1:-1] *= 0.5
        out = dct(a, type=1, axis=0)[self._n::-1]
        return out[:, 0] if squeeze else out

    def tail_fraction(self, values, frac=0.25):
        """Relative size of the trailing Chebyshev coefficients; resolution gauge."""
        a = np.abs(self.cheb_coefficients(values))
        peak = a.max()
        if peak == 0:
            return 0.0
        k = int((1 - frac) * len(a))
        return float(a[k:].max() / peak)


class LineGrid:
    """Uniform grid on [-smax, smax]; storage holds s >= 0, evaluation reflects."""

    def __init__(self, smax: float = 16.0, num_half: int = 2049):
        if smax <= 0:
            raise ValueError("smax must be positive")
        if num_half < 4:
            raise ValueError("num_half must be at least 4")
        self.smax = float(smax)
        self.num_half = int(num_half)
        self.ds = smax / (num_half - 1)
        self.s = np.linspace(0.0, smax, num_half)
        w = np.full(num_half, self.ds)
        w[0] *= 0.5
        w[-1] *= 0.5
        self.trapz_weights = w  # integral over [0, smax]
        self.s.setflags(write=False)
        self.trapz_weights.setflags(write=False)

    @property
    def key(self):
        return (self.smax, self.num_half)

    def full_values(self, values):
        """Even extension sampled on [-smax, smax - ds), length 2*(num_half-1)."""
        values = np.asarray(values)
        return np.concatenate([values[:0:-1], values[:-1]])

    def full_s(self):
        return np.concatenate([-self.s[:0:-1], self.s[:-1]])

    def integrate_full(self, values):
        """Trapezoid integral of the even extension over [-smax, smax]."""
        return 2.0 * (self.trapz_weights @ np.asarray(values))


class LambdaGrid:
    """Uniform frequency grid on [0, lmax]."""

    def __init__(self, lmax: float = 40.0, num: int = 2048):
        if lmax <= 0:
            raise ValueError("lmax must be positive")
        if num < 8:
            raise ValueError("num must be at least 8")
        self.lmax = float(lmax)
        self.num = int(num)
        self.lam = np.linspace(0.0, lmax, num)
        w = np.full(num, self.lam[1])
        w[0] *= 0.5
        w[-1] *= 0.5
        self.trapz_weights = w
        self.lam.setflags(write=False)
        self.trapz_weights.setflags(write=False)

    @property
    def key(self):
        return (self.lmax, self.num)


@lru_cache(maxsize=32)
def radial_grid(rmax: float = 8.0, num_nodes: int = 257) -> RadialGrid:
    return RadialGrid(rmax, num_nodes)


@lru_cache(maxsize=32)
def line_grid(smax: float = 16.0, num_half: int = 2049) -> LineGrid:
    return LineGrid(smax, num_half)


@lru_cache(maxsize=32)
def lambda_grid(lmax: float = 40.0, num: int = 2048) -> LambdaGrid:
    return LambdaGrid(lmax, num)


def default_line_grid(rmax: float) -> LineGrid:
    """Companion line grid: smax = 2*rmax leaves room for convolution supports."""
    return line_grid(2.0 * rmax, 2049)


_COS_CACHE = {}


def cosine_matrix(lgrid: LambdaGrid, sgrid: LineGrid) -> np.ndarray:
    """cos(lam_m * s_k), cached; the workhorse of the line <-> frequency maps."""
    key = (lgrid.key, sgrid.key)
    mat = _COS_CACHE.get(key)
    if mat is None:
        mat = np.cos(lgrid.lam[:, None] * sgrid.s[None, :])
        mat.setflags(write=False)
        _COS_CACHE[key] = mat
    return mat
