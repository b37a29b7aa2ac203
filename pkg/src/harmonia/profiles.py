"""Profile containers: radial, line and spectral data, series and operator coefficients.

CSV schemas:
  RadialProfile   r,value_re,value_im
  LineProfile     s,value_re,value_im
  SpectralProfile lambda,value_re,value_im
EvenSeries and LaplacePolynomial serialize as JSON arrays of coefficients.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ParityError
from .grids import LambdaGrid, LineGrid, RadialGrid, lambda_grid, line_grid, radial_grid

PARITY_TOL = 1e-6
DECAY_TOL = 1e-12


def _freeze(values):
    v = np.array(values)
    if not np.iscomplexobj(v):
        v = v.astype(float)
    v.setflags(write=False)
    return v


class RadialProfile:
    """Samples of an even function u(r) on a radial grid; f = u(d(x0, .))."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: RadialGrid, values):
        values = _freeze(values)
        if values.shape != (grid.num_nodes,):
            raise ValueError(f"expected {grid.num_nodes} values, got {values.shape}")
        self.grid = grid
        self.values = values

    @classmethod
    def from_function(cls, fn, grid: RadialGrid, check_parity: bool = True):
        """Sample a callable on the grid. Rejects callables that are visibly odd
        around 0 (checked at a few small +-r where the callable is defined there)."""
        vals = np.asarray(fn(grid.nodes))
        if check_parity:
            probes = grid.nodes[1:4]
            try:
                left = np.asarray(fn(-probes))
            except Exception:
                left = None
            if left is not None and np.all(np.isfinite(left)):
                scale = float(np.max(np.abs(vals))) or 1.0
                if np.max(np.abs(left - vals[1:4])) > PARITY_TOL * scale:
                    raise ParityError("function is not even around r = 0")
        return cls(grid, vals)

    @property
    def is_real(self):
        return not np.iscomplexobj(self.values)

    def eval(self, r):
        return self.grid.evaluate(self.values, r)

    __call__ = eval

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))

    def decay_residual(self):
        """max |u| on the outer 5% of the grid relative to max |u|."""
        sup = self.sup_norm()
        if sup == 0:
            return 0.0
        tail = np.abs(self.values[self.grid.nodes >= 0.95 * self.grid.rmax])
        return float(tail.max() / sup)

    def real_part(self):
        return RadialProfile(self.grid, np.real(self.values))

    def resample(self, grid: RadialGrid) -> "RadialProfile":
        """Barycentric resampling onto another radial grid (rmax must not grow)."""
        if grid.rmax > self.grid.rmax * (1 + 1e-12):
            raise ValueError("cannot resample beyond the resolved radius")
        if grid.key == self.grid.key:
            return self
        return RadialProfile(grid, self.eval(grid.nodes))

    def map(self, fn):
        return RadialProfile(self.grid, fn(self.values))

    def _binary(self, other, op):
        if isinstance(other, RadialProfile):
            if other.grid is not self.grid and other.grid.key != self.grid.key:
                raise ValueError("profiles live on different grids")
            return RadialProfile(self.grid, op(self.values, other.values))
        return RadialProfile(self.grid, op(self.values, other))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return RadialProfile(self.grid, -self.values)


class LineProfile:
    """Even function on [-smax, smax]; storage holds s >= 0, evaluation reflects."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: LineGrid, values):
        values = _freeze(values)
        if values.shape != (grid.num_half,):
            raise ValueError(f"expected {grid.num_half} values, got {values.shape}")
        self.grid = grid
        self.values = values

    @classmethod
    def from_function(cls, fn, grid: LineGrid):
        return cls(grid, np.asarray(fn(grid.s)))

    @property
    def is_real(self):
        return not np.iscomplexobj(self.values)

    def eval(self, s):
        """Cubic-spline evaluation of the even extension (grid data is exact)."""
        from scipy.interpolate import CubicSpline

        spl = CubicSpline(self.grid.s, self.values)
        return spl(np.abs(np.asarray(s, dtype=float)))

    __call__ = eval

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))

    def integral(self):
        """Integral over the whole line."""
        return self.grid.integrate_full(self.values)

    def support_radius(self, tol=DECAY_TOL):
        mask = np.abs(self.values) > tol * max(self.sup_norm(), 1e-300)
        if not mask.any():
            return 0.0
        return float(self.grid.s[mask][-1])

    def _binary(self, other, op):
        if isinstance(other, LineProfile):
            if other.grid.key != self.grid.key:
                raise ValueError("line profiles live on different grids")
            return LineProfile(self.grid, op(self.values, other.values))
        return LineProfile(self.grid, op(self.values, other))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__


class SpectralProfile:
    """Values of a radial Fourier transform on a uniform frequency grid."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: LambdaGrid, values):
        values = _freeze(values)
        if values.shape != (grid.num,):
            raise ValueError(f"expected {grid.num} values, got {values.shape}")
        self.grid = grid
        self.values = values

    @property
    def is_real(self):
        return not np.iscomplexobj(self.values)

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))

    def _binary(self, other, op):
        if isinstance(other, SpectralProfile):
            if other.grid.key != self.grid.key:
                raise ValueError("spectral profiles live on different grids")
            return SpectralProfile(self.grid, op(self.values, other.values))
        return SpectralProfile(self.grid, op(self.values, other))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__


class EvenSeries:
    """Truncated even Taylor series u(r) = sum c_{2j} r^{2j}."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = _freeze(np.atleast_1d(coeffs))

    @property
    def order(self):
        return len(self.coeffs) - 1

    def eval(self, r):
        r2 = np.asarray(r, dtype=float) ** 2
        out = np.zeros_like(r2, dtype=self.coeffs.dtype)
        for c in self.coeffs[::-1]:
            out = out * r2 + c
        return out

    __call__ = eval

    def derivative_at_zero(self, j):
        """u^{(2j)}(0) = (2j)! c_{2j}."""
        import math

        if j > self.order:
            return 0.0
        return math.factorial(2 * j) * self.coeffs[j]

    def to_json(self):
        return json.dumps([[float(np.real(c)), float(np.imag(c))] for c in self.coeffs])

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        return cls(np.array([complex(re, im) for re, im in data]))


class LaplacePolynomial:
    """Coefficients a_0..a_M of P(D) = sum a_k D^k in the radial Laplacian."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, trim: bool = True):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if trim and len(c) > 1:
            nz = np.nonzero(np.abs(c) > 0)[0]
            c = c[: nz[-1] + 1] if len(nz) else c[:1]
        self.coeffs = _freeze(c)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def eval(self, z):
        out = np.zeros_like(np.asarray(z, dtype=complex))
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out if out.shape else complex(out)

    __call__ = eval

    def to_json(self):
        return json.dumps([[float(c.real), float(c.imag)] for c in self.coeffs])

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        return cls([complex(re, im) for re, im in data])


def _write_csv(path, header, cols):
    arr = np.column_stack(cols)
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in arr:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _read_csv(path, header):
    with open(path) as fh:
        first = fh.readline().strip()
        if first != header:
            raise ValueError(f"expected header {header!r}, got {first!r}")
        data = np.loadtxt(fh, delimiter=",")
    data = np.atleast_2d(data)
    return data[:, 0], data[:, 1] + 1j * data[:, 2]


def _maybe_real(values):
    return values.real if np.allclose(values.imag, 0.0) else values


def save_radial_csv(path, profile: RadialProfile):
    v = np.asarray(profile.values, dtype=complex)
    _write_csv(path, "r,value_re,value_im", (profile.grid.nodes, v.real, v.imag))


def load_radial_csv(path) -> RadialProfile:
    r, values = _read_csv(path, "r,value_re,value_im")
    grid = radial_grid(float(r[-1]), len(r))
    if not np.allclose(grid.nodes, r, atol=1e-9 * grid.rmax):
        raise ValueError("radii do not match a Chebyshev-Lobatto radial grid")
    return RadialProfile(grid, _maybe_real(values))


def save_line_csv(path, profile: LineProfile):
    v = np.asarray(profile.values, dtype=complex)
    _write_csv(path, "s,value_re,value_im", (profile.grid.s, v.real, v.imag))


def load_line_csv(path) -> LineProfile:
    s, values = _read_csv(path, "s,value_re,value_im")
    grid = line_grid(float(s[-1]), len(s))
    if not np.allclose(grid.s, s, atol=1e-9 * grid.smax):
        raise ValueError("abscissae do not match a uniform line grid")
    return LineProfile(grid, _maybe_real(values))


def save_spectral_csv(path, profile: SpectralProfile):
    v = np.asarray(profile.values, dtype=complex)
    _write_csv(path, "lambda,value_re,value_im", (profile.grid.lam, v.real, v.imag))


def load_spectral_csv(path) -> SpectralProfile:
    lam, values = _read_csv(path, "lambda,value_re,value_im")
    grid = lambda_grid(float(lam[-1]), len(lam))
    if not np.allclose(grid.lam, lam, atol=1e-9 * grid.lmax):
        raise ValueError("frequencies do not match a uniform grid")
    return SpectralProfile(grid, _maybe_real(values))
