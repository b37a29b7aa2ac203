"""Model geometries described by their radial volume density A(r).

Three backends: Euclidean space (A = r^{n-1}, rho = 0), real hyperbolic
space of curvature -1 (A = sinh^{n-1} r, rho = (n-1)/2), and Damek-Ricci
space with A = 2^{p+q} sinh^{p+q}(r/2) cosh^q(r/2), rho = p/4 + q/2.
All derived quantities (A'/A, its odd Taylor series at 0, the horosphere
mean curvature h = 2*rho) are closed form; nothing here differentiates
numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

EUCLIDEAN = "euclidean"
HYPERBOLIC = "hyperbolic"
DAMEK_RICCI = "damek-ricci"


@dataclass(frozen=True)
class ModelSpace:
    """A harmonic model geometry. Immutable; safe to share across workers."""

    kind: str
    n: int
    rho: float
    point_ops: bool
    p: int = 0
    q: int = 0

    @property
    def key(self):
        return (self.kind, self.n, self.p, self.q)

    def __str__(self):
        if self.kind == DAMEK_RICCI:
            return f"damek-ricci(p={self.p},q={self.q})"
        return f"{self.kind}(n={self.n})"


def euclidean(n: int) -> ModelSpace:
    if n < 1:
        raise ValueError(f"euclidean dimension must be >= 1, got {n}")
    return ModelSpace(EUCLIDEAN, n, 0.0, 2 <= n <= 3)


def hyperbolic(n: int) -> ModelSpace:
    if n < 2:
        raise ValueError(f"hyperbolic dimension must be >= 2, got {n}")
    return ModelSpace(HYPERBOLIC, n, (n - 1) / 2.0, 2 <= n <= 3)


def damek_ricci(p: int, q: int) -> ModelSpace:
    if p < 1 or q < 1:
        raise ValueError(f"damek-ricci needs p, q >= 1, got p={p}, q={q}")
    # radial-only backend: no point chart
    return ModelSpace(DAMEK_RICCI, p + q + 1, p / 4.0 + q / 2.0, False, p, q)


def rho(space: ModelSpace) -> float:
    """Half the horosphere mean curvature, h = 2*rho."""
    return space.rho


def sphere_area(space: ModelSpace) -> float:
    """Area of the unit sphere S^{n-1}; 2 for n = 1 (two-point spheres)."""
    n = space.n
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def density(space: ModelSpace, r):
    """Radial volume density A(r); vol S(x, r) = sphere_area * A(r)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("density requires r >= 0")
    if space.kind == EUCLIDEAN:
        out = r ** (space.n - 1)
    elif space.kind == HYPERBOLIC:
        out = np.sinh(r) ** (space.n - 1)
    else:
        p, q = space.p, space.q
        out = 2.0 ** (p + q) * np.sinh(r / 2.0) ** (p + q) * np.cosh(r / 2.0) ** q
    return out if out.shape else float(out)


def log_derivative(space: ModelSpace, r):
    """Radial drift A'(r)/A(r), closed form per backend. Singular at r = 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("log_derivative requires r > 0")
    if space.kind == EUCLIDEAN:
        out = (space.n - 1) / r
    elif space.kind == HYPERBOLIC:
        out = (space.n - 1) / np.tanh(r)
    else:
        p, q = space.p, space.q
        out = (p + q) / 2.0 / np.tanh(r / 2.0) + q / 2.0 * np.tanh(r / 2.0)
    return out if out.shape else float(out)


def density_ratio(space: ModelSpace, r):
    """B(r) = A(r) / r^{n-1}, the even factor of the density; B(0) = 1."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("density_ratio requires r >= 0")
    small = r == 0
    rs = np.where(small, 1.0, r)
    if space.kind == EUCLIDEAN:
        out = np.ones_like(rs)
    elif space.kind == HYPERBOLIC:
        out = (np.sinh(rs) / rs) ** (space.n - 1)
    else:
        p, q = space.p, space.q
        out = (np.sinh(rs / 2.0) / (rs / 2.0)) ** (p + q) * np.cosh(rs / 2.0) ** q
    out = np.where(small, 1.0, out)
    return out if out.shape else float(out)


@lru_cache(maxsize=None)
def _bernoulli(kmax: int):
    """Bernoulli numbers B_0..B_kmax as exact fractions (B_1 = -1/2 convention)."""
    bern = [Fraction(1)]
    for m in range(1, kmax + 1):
        acc = Fraction(0)
        for j in range(m):
            acc += math.comb(m + 1, j) * bern[j]
        bern.append(-acc / (m + 1))
    return tuple(bern)


@lru_cache(maxsize=None)
def _drift_coeffs_exact(key, kmax: int):
    kind, n, p, q = key
    if kind == EUCLIDEAN:
        return tuple(Fraction(0) for _ in range(kmax))
    bern = _bernoulli(2 * kmax)
    out = []
    for k in range(1, kmax + 1):
        fact = Fraction(math.factorial(2 * k))
        coth_k = Fraction(4 ** k) * bern[2 * k] / fact      # coth x - 1/x
        tanh_k = Fraction(4 ** k * (4 ** k - 1)) * bern[2 * k] / fact
        if kind == HYPERBOLIC:
            out.append((n - 1) * coth_k)
        else:
            out.append(((p + q) * coth_k + q * tanh_k) / Fraction(4 ** k))
    return tuple(out)


def drift_odd_coeffs_exact(space: ModelSpace, kmax: int):
    """Exact Taylor coefficients a_1, a_3, ... of A'/A - (n-1)/r = sum a_{2k-1} r^{2k-1}."""
    return _drift_coeffs_exact(space.key, kmax)


def drift_odd_coeffs(space: ModelSpace, kmax: int) -> np.ndarray:
    return np.array([float(a) for a in drift_odd_coeffs_exact(space, kmax)])


def space_from_config(kind: str, n=None, p=None, q=None) -> ModelSpace:
    """Build a space from config keys space.kind and space.n or space.p/space.q."""
    kind = kind.strip().lower()
    if kind == EUCLIDEAN:
        if n is None:
            raise ValueError("euclidean space needs n")
        return euclidean(int(n))
    if kind == HYPERBOLIC:
        if n is None:
            raise ValueError("hyperbolic space needs n")
        return hyperbolic(int(n))
    if kind == DAMEK_RICCI:
        if p is None or q is None:
            raise ValueError("damek-ricci space needs p and q")
        return damek_ricci(int(p), int(q))
    raise ValueError(f"unknown space kind {kind!r}")


_SHORTHAND = {
    "e1": ("euclidean", 1), "e2": ("euclidean", 2), "e3": ("euclidean", 3),
    "h2": ("hyperbolic", 2), "h3": ("hyperbolic", 3), "h4": ("hyperbolic", 4),
}


def parse_space(text: str) -> ModelSpace:
    """Parse shorthand like 'h3', 'e2', 'euclidean:3', 'damek-ricci:2,1'."""
    text = text.strip().lower()
    if text in _SHORTHAND:
        kind, n = _SHORTHAND[text]
        return space_from_config(kind, n=n)
    if text in ("dr", "damek-ricci"):
        return damek_ricci(2, 1)
    if ":" in text:
        kind, _, rest = text.partition(":")
        if kind in (EUCLIDEAN, HYPERBOLIC):
            return space_from_config(kind, n=int(rest))
        if kind == DAMEK_RICCI:
            p, q = (int(v) for v in rest.split(","))
            return damek_ricci(p, q)
    raise ValueError(f"cannot parse space {text!r}")
