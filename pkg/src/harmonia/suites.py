"""Named verification suites: each check pins a theorem-level identity to a tolerance.

Checks return a residual measured against a fixed tolerance; capability
gaps (radial-only backends, resonant symbols, missing inversion densities)
surface as expected skips, not failures. run_suite assembles the JSON
report consumed by the command line driver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import abel, geometry, heat, operators, radial_ops, spherical
from .errors import CapabilityError, NotInAlgebraError, ResonantSymbolError
from .grids import lambda_grid, line_grid, radial_grid
from .profiles import LaplacePolynomial, RadialProfile
from .spaces import EUCLIDEAN, HYPERBOLIC, ModelSpace, density, sphere_area

SUITE_NAMES = ("cheigf", "abel", "algebra", "fundsol", "heat")


@dataclass
class CheckResult:
    check_name: str
    paper_anchor: str
    residual: float | None
    tolerance: float | None
    status: str  # "pass" | "fail" | "skip"
    detail: str = ""

    @property
    def passed(self):
        return self.status != "fail"

    def to_dict(self):
        return {
            "check_name": self.check_name,
            "paper_anchor": self.paper_anchor,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.status == "pass",
            "status": self.status,
            "detail": self.detail,
        }


class SuiteContext:
    """Config-derived grids, seeded generators and lazy shared objects."""

    def __init__(self, config):
        self.config = config
        self.space = config.space()
        self.grid = radial_grid(config.rmax, config.radial_nodes)
        self.lgrid = lambda_grid(config.lambda_max, config.lambda_nodes)
        self.sgrid = line_grid(config.smax, config.line_nodes)
        self.seed = config.seed

    def rng(self, salt=0):
        return np.random.default_rng(self.seed + salt)

    def bump(self, salt=0, sig_range=(0.35, 0.7)):
        return operators.seeded_bump(self.grid, self.rng(salt), sig_range=sig_range)

    def sphere_degree(self):
        if self.space.n == 2:
            return self.config.circle_nodes
        return (self.config.sphere_theta, self.config.sphere_phi)

    def require_point_ops(self):
        if not self.space.point_ops:
            raise CapabilityError(f"{self.space} has no point-level chart")

    def narrow_lgrid(self):
        return lambda_grid(min(20.0, self.config.lambda_max), max(self.config.lambda_nodes // 2, 256))


def _rel(residual, scale):
    return float(residual) / max(float(scale), 1e-300)


# ----------------------------------------------------------------- cheigf

def check_eigenfunction_identity(ctx):
    """Pi_t f = f phi_lam(t) for the horospherical eigenfunction."""
    ctx.require_point_ops()
    space = ctx.space
    lam = 1.0
    base = geometry.base_point(space)
    basis = geometry.tangent_basis(space, base)
    vec = geometry.UnitVector(base, basis[0])
    f = geometry.horospherical_eigenfunction(space, vec, lam)
    phi = spherical.spherical_function(space, lam, ctx.grid)
    rng = ctx.rng(1)
    xs = _sample_points(space, rng, 5, 1.5)
    report = geometry.eigenfunction_check(space, f, lam, xs, [0.25, 0.5, 1.0, 2.0],
                                          phi, degree=ctx.sphere_degree())
    worst = max(_rel(e["residual"], abs(f(np.asarray([e["x"]]))[0]))
                for e in report["entries"])
    return worst, 1e-6


def check_eigenfunction_negative(ctx):
    """A generic bump must fail the sphere-average identity by a margin."""
    ctx.require_point_ops()
    space = ctx.space
    base = geometry.base_point(space)
    off = geometry.exp_map(space, base, geometry.tangent_basis(space, base)[0], 1.0)
    sig = 0.8

    def f(y):
        return np.exp(-geometry.distance(space, off, y) ** 2 / (2 * sig ** 2))

    phi = spherical.spherical_function(space, 1.0, ctx.grid)
    x = geometry.exp_map(space, base, geometry.tangent_basis(space, base)[1], 0.7)
    ts = np.array([0.25, 0.5, 1.0, 2.0])
    avg = np.array([geometry.sphere_average(space, f, x, t, ctx.sphere_degree()) for t in ts])
    fx = f(x[None, :])[0]
    worst = np.max(np.abs(avg - fx * phi.eval(ts))) / abs(fx)
    # pass when the failure is visible: residual is the shortfall below 1e-2
    return (0.0 if worst >= 1e-2 else 1e-2 - worst), 1e-12


def check_small_t_laplacian(ctx):
    """Pi_t f = f + t^2/(2n) Delta f + O(t^4) at t = 1e-3."""
    ctx.require_point_ops()
    space = ctx.space
    lam = 1.0
    base = geometry.base_point(space)
    vec = geometry.UnitVector(base, geometry.tangent_basis(space, base)[0])
    f = geometry.horospherical_eigenfunction(space, vec, lam)
    x = geometry.exp_map(space, base, geometry.tangent_basis(space, base)[-1], 0.8)
    fx = f(x[None, :])[0]
    mu = lam ** 2 + space.rho ** 2
    t = 1e-3
    avg = geometry.sphere_average(space, f, x, t, ctx.sphere_degree())
    est = 2.0 * space.n * (avg - fx) / t ** 2
    return _rel(abs(est + mu * fx), abs(mu * fx)), 1e-4


def check_radialize_idempotent(ctx):
    ctx.require_point_ops()
    space = ctx.space
    base = geometry.base_point(space)
    u = ctx.bump(2)
    f = geometry.translate(space, base, u)
    small = radial_grid(ctx.config.rmax / 2.0, 65)
    prof = geometry.radialize(space, f, base, small, ctx.sphere_degree())
    return float(np.max(np.abs(prof.values - u.eval(small.nodes)))), 1e-10


def check_radialize_positive(ctx):
    ctx.require_point_ops()
    space = ctx.space
    base = geometry.base_point(space)
    off = geometry.exp_map(space, base, geometry.tangent_basis(space, base)[0], 0.9)

    def f(y):
        return np.exp(-geometry.distance(space, off, y) ** 2)

    small = radial_grid(ctx.config.rmax / 2.0, 65)
    prof = geometry.radialize(space, f, base, small, ctx.sphere_degree())
    return float(max(0.0, -np.min(np.real(prof.values)))), 1e-14


def _sample_points(space, rng, count, radius):
    base = geometry.base_point(space)
    basis = geometry.tangent_basis(space, base)
    pts = []
    for _ in range(count):
        direction = rng.normal(size=space.n) @ basis
        direction /= geometry.tangent_norm(space, base, direction)
        pts.append(geometry.exp_map(space, base, direction, rng.uniform(0.2, radius)))
    return np.array(pts)


def _ball_setup(ctx, radius=2.0):
    return dict(radius=radius, radial_nodes=65, degree=ctx.sphere_degree())


def check_radialize_adjoint(ctx):
    """<R_x f, g> = <f, R_x g> on compactly supported bumps."""
    ctx.require_point_ops()
    space = ctx.space
    base = geometry.base_point(space)
    basis = geometry.tangent_basis(space, base)
    p1 = geometry.exp_map(space, base, basis[0], 0.6)
    p2 = geometry.exp_map(space, base, -basis[1], 0.4)

    def f(y):
        return np.exp(-geometry.distance(space, p1, y) ** 2 / 0.5)

    def g(y):
        return np.exp(-geometry.distance(space, p2, y) ** 2 / 0.72)

    small = radial_grid(4.0, 65)
    rf = geometry.radialize(space, f, base, small, ctx.sphere_degree())
    rg = geometry.radialize(space, g, base, small, ctx.sphere_degree())
    pts, w = geometry.ball_quadrature(space, base, 4.0, 65, ctx.sphere_degree())
    rf_pts = rf.eval(geometry.distance(space, base, pts))
    rg_pts = rg.eval(geometry.distance(space, base, pts))
    lhs = w @ (rf_pts * g(pts))
    rhs = w @ (f(pts) * rg_pts)
    scale = math.sqrt(abs(w @ f(pts) ** 2) * abs(w @ g(pts) ** 2))
    return _rel(abs(lhs - rhs), scale), 1e-4


def check_radialize_mass(ctx):
    ctx.require_point_ops()
    space = ctx.space
    base = geometry.base_point(space)
    off = geometry.exp_map(space, base, geometry.tangent_basis(space, base)[0], 0.7)

    def f(y):
        return np.exp(-geometry.distance(space, off, y) ** 2 / 0.6)

    small = radial_grid(4.0, 65)
    rf = geometry.radialize(space, f, base, small, ctx.sphere_degree())
    mass_radial = float(np.real(abel.radial_mass(space, rf)))
    mass_direct = float(geometry.integrate_ball(space, f, base, 4.0, 65, ctx.sphere_degree()))
    return _rel(abs(mass_radial - mass_direct), abs(mass_direct)), 1e-4


def check_radialize_product_rule(ctx):
    """R_x(f * R_x g) = R_x f * R_x g, both sides by quadrature."""
    ctx.require_point_ops()
    space = ctx.space
    if space.n != 2:
        raise CapabilityError("product-rule quadrature oracle runs on 2d charts")
    base = geometry.base_point(space)
    basis = geometry.tangent_basis(space, base)
    p1 = geometry.exp_map(space, base, basis[0], 0.5)

    def f(y):
        return np.exp(-geometry.distance(space, p1, y) ** 2 / 0.32)

    def g(y):
        return np.exp(-geometry.distance(space, base, y) ** 2 / 0.5)

    deg = 64 if space.n == 2 else (16, 32)
    rg = geometry.radialize(space, g, base, ctx.grid, deg)  # support reaches ~4
    # lhs: radialize the brute-force convolution f * (R g)
    coarse = radial_grid(3.0, 17)
    angles = 48 if space.n == 2 else (12, 24)
    dirs, w_ang = geometry.sphere_directions(space, base, angles)

    def conv_at(points):
        return geometry.convolve_general(space, f, rg, points, base, 3.75, 49, deg)

    lhs_vals = np.empty(coarse.num_nodes)
    for i, r in enumerate(coarse.nodes):
        if r == 0:
            lhs_vals[i] = np.real(conv_at(geometry.base_point(space)[None, :])[0])
        else:
            sphere_pts = geometry.exp_map(space, base, dirs, r)
            lhs_vals[i] = float(np.real(conv_at(sphere_pts)) @ w_ang / w_ang.sum())
    # rhs: radial convolution of the radializations
    rf = geometry.radialize(space, f, base, ctx.grid, deg)
    rhs_prof = abel.radial_convolve(space, rf, rg, ctx.lgrid)
    rhs_vals = np.real(rhs_prof.eval(coarse.nodes))
    scale = np.max(np.abs(rhs_vals))
    return _rel(np.max(np.abs(lhs_vals - rhs_vals)), scale), 1e-3


def check_radialize_laplacian_commute(ctx):
    """R_x(Delta f) = L_A(R_x f) against the normal-coordinate stencil."""
    ctx.require_point_ops()
    space = ctx.space
    base = geometry.base_point(space)
    off = geometry.exp_map(space, base, geometry.tangent_basis(space, base)[0], 0.8)

    def f(y):
        return np.exp(-geometry.distance(space, off, y) ** 2 / 0.72)

    small = radial_grid(3.0, 49)
    deg = ctx.sphere_degree()
    lap_f = geometry.radialize(space, lambda y: geometry.laplacian_fd(space, f, y, h=0.01),
                               base, small, deg)
    rf = geometry.radialize(space, f, base, small, deg)
    lap_rf = radial_ops.apply_radial_laplacian(space, rf)
    inner = small.nodes <= 2.5
    err = np.max(np.abs(np.real(lap_f.values)[inner] - np.real(lap_rf.values)[inner]))
    return _rel(err, np.max(np.abs(lap_rf.values))), 1e-3


def check_sphere_average_selfadjoint(ctx):
    ctx.require_point_ops()
    space = ctx.space
    base = geometry.base_point(space)
    basis = geometry.tangent_basis(space, base)
    p1 = geometry.exp_map(space, base, basis[0], 0.5)
    p2 = geometry.exp_map(space, base, -basis[-1], 0.6)

    def f(y):
        return np.exp(-geometry.distance(space, p1, y) ** 2 / 0.5)

    def g(y):
        return np.exp(-geometry.distance(space, p2, y) ** 2 / 0.4)

    t = 0.6
    deg = 48 if space.n == 2 else (12, 24)
    pts, w = geometry.ball_quadrature(space, base, 3.5, 49, 96 if space.n == 2 else (24, 48))
    pif = geometry.sphere_average_batch(space, f, pts, t, deg)
    pig = geometry.sphere_average_batch(space, g, pts, t, deg)
    lhs = w @ (pif * g(pts))
    rhs = w @ (f(pts) * pig)
    scale = math.sqrt(abs(w @ f(pts) ** 2) * abs(w @ g(pts) ** 2))
    return _rel(abs(lhs - rhs), scale), 1e-4


# ------------------------------------------------------------------- abel

def check_abel_fourier(ctx):
    """F(A u) = u_hat."""
    u = ctx.bump(3)
    fhat = spherical.spherical_fourier(ctx.space, u, ctx.lgrid)
    w = abel.abel_transform(ctx.space, u, ctx.sgrid, ctx.lgrid)
    back = abel.fourier_of_line(w, ctx.lgrid)
    return _rel(np.max(np.abs(back.values - fhat.values)), fhat.sup_norm()), 1e-6


def check_abel_geometric(ctx):
    ctx.require_point_ops()
    u = ctx.bump(4)
    spec = abel.abel_transform(ctx.space, u, ctx.sgrid, ctx.lgrid)
    geo = abel.abel_transform_geometric(ctx.space, u, ctx.sgrid)
    return float(np.max(np.abs(spec.values - geo.values))), 1e-5


def check_convolution_theorem(ctx):
    """A(u * v) = A(u) * A(v)."""
    u, v = ctx.bump(5), ctx.bump(6)
    conv = abel.radial_convolve(ctx.space, u, v, ctx.lgrid)
    lhs = abel.abel_transform(ctx.space, conv, ctx.sgrid, ctx.lgrid)
    rhs = abel.line_convolve(abel.abel_transform(ctx.space, u, ctx.sgrid, ctx.lgrid),
                             abel.abel_transform(ctx.space, v, ctx.sgrid, ctx.lgrid))
    return _rel(np.max(np.abs(lhs.values - rhs.values)), lhs.sup_norm()), 1e-6


def check_young(ctx):
    """||u * v||_1 <= ||u||_1 ||v||_1 (equality for positive data)."""
    u, v = ctx.bump(7), ctx.bump(8)
    conv = abel.radial_convolve(ctx.space, u, v, ctx.lgrid)
    lhs = abel.weighted_l1(ctx.space, conv)
    rhs = abel.weighted_l1(ctx.space, u) * abel.weighted_l1(ctx.space, v)
    return float(max(0.0, lhs / rhs - 1.0)), 1e-6


def check_delta_convergence(ctx):
    """A carries approximate identities at the center to approximate deltas at 0.

    Tested distributionally against cosine test functions: integrating
    A(m_eps) against cos(lam s) equals the radial transform of m_eps, which
    must approach 1 (the transform of the delta) as eps -> 0. Quadrature is
    Gauss-Legendre over the mollifier support, so the main grid need not
    resolve the narrow bump.
    """
    lams = (0.7, 1.3, 2.1)
    phis = [spherical.spherical_function(ctx.space, lam, ctx.grid) for lam in lams]
    glx, glw = np.polynomial.legendre.leggauss(96)
    errs = []
    for eps in (0.4, 0.2, 0.1):
        r = 0.5 * eps * (glx + 1.0)
        w = 0.5 * eps * glw
        meas = w * abel.bump_values(r, eps) * density(ctx.space, r)
        mass = meas.sum()
        worst = max(abs((np.real(phi.eval(r)) @ meas) / mass - 1.0) for phi in phis)
        errs.append(worst)
    monotone = all(errs[i + 1] <= errs[i] * (1 + 1e-9) for i in range(len(errs) - 1))
    return (errs[-1] if monotone else float("inf")), 0.02


def check_dual_abel(ctx):
    """a(cos(lam .)) = phi_lam via sphere quadrature (the defining duality)."""
    ctx.require_point_ops()
    lam = 1.0
    phi = spherical.spherical_function(ctx.space, lam, ctx.grid)
    da = abel.dual_abel(ctx.space, lambda s: np.cos(lam * np.asarray(s)), ctx.grid,
                        path="quadrature")
    return float(np.max(np.abs(da.values - phi.values))), 1e-6


def check_convolve_brute_force(ctx):
    """Spectral radial convolution against the chart quadrature oracle."""
    ctx.require_point_ops()
    space = ctx.space
    if space.n != 2:
        raise CapabilityError("brute-force convolution oracle runs on 2d charts")
    base = geometry.base_point(space)
    u = ctx.bump(9, sig_range=(0.3, 0.45))
    v = ctx.bump(10, sig_range=(0.3, 0.45))
    conv = abel.radial_convolve(space, u, v, ctx.lgrid)
    f = geometry.translate(space, base, u)
    radii = np.linspace(0.0, 2.0, 9)
    basis = geometry.tangent_basis(space, base)
    xs = np.array([geometry.exp_map(space, base, basis[0], r) for r in radii])
    direct = geometry.convolve_general(space, f, v, xs, base, 2.5, 65, 256)
    spec = np.real(conv.eval(radii))
    return _rel(np.max(np.abs(np.real(direct) - spec)), np.max(np.abs(spec))), 1e-3


# ---------------------------------------------------------------- algebra

def check_pj_exact(ctx):
    from fractions import Fraction

    pj = radial_ops.compute_pj_exact(ctx.space, 1)
    ok = (pj[0][0] == 1 and all(c == 0 for c in pj[0][1:])
          and pj[1][0] == 0 and pj[1][1] == Fraction(1, ctx.space.n))
    return (0.0 if ok else 1.0), 1e-12


def check_pj_derivative_oracle(ctx):
    """derivatives_at_zero against one-sided finite differences, even polys."""
    rng = ctx.rng(11)
    coeffs = rng.uniform(-1.0, 1.0, 5)  # u = sum c_j r^{2j}, degree 8
    vals = np.zeros_like(ctx.grid.nodes)
    for j, c in enumerate(coeffs):
        vals += c * ctx.grid.nodes ** (2 * j)
    u = RadialProfile(ctx.grid, vals)
    got = np.real(radial_ops.derivatives_at_zero(ctx.space, u, 4))
    h = 0.4
    m = 12
    pts = h * np.arange(m)
    vander = np.vander(pts, m, increasing=True)
    worst = 0.0
    for j in range(5):
        rhs = np.zeros(m)
        rhs[2 * j] = math.factorial(2 * j)
        stencil = np.linalg.solve(vander.T, rhs)
        sample = np.zeros_like(pts)
        for k, c in enumerate(coeffs):
            sample += c * pts ** (2 * k)
        oracle = stencil @ sample
        scale = max(abs(oracle), 1.0)
        worst = max(worst, abs(got[j] - oracle) / scale)
    return worst, 1e-5


def check_radialpoly_vanishing(ctx):
    """L_A^k (h r^{2(k+1)}) vanishes at r -> 0 for k = 1, 2.

    h must be even for the profile machinery (h = exp(-r^2) here); the
    leading term h(0) L_A^k r^{2(k+1)} ~ 840 r^2 at k = 2 nearly saturates
    the 1e-3 budget at r = 1e-3 for n = 3 and exceeds it for n >= 4.
    """
    worst = 0.0
    for k in (1, 2):
        vals = np.exp(-ctx.grid.nodes ** 2) * ctx.grid.nodes ** (2 * (k + 1))
        prof = RadialProfile(ctx.grid, vals)
        for _ in range(k):
            prof = radial_ops.apply_radial_laplacian(ctx.space, prof)
        worst = max(worst, abs(float(np.real(prof.eval(1e-3)))))
    return worst, 1e-3


def check_identify_roundtrip(ctx):
    worst = 0.0
    for salt in range(5):
        rng = ctx.rng(20 + salt)
        deg = int(rng.integers(1, 4))
        coeffs = rng.uniform(-1.5, 1.5, deg + 1)
        if abs(coeffs[-1]) < 0.3:
            coeffs[-1] = 1.0
        poly = LaplacePolynomial(coeffs)

        def op(u, poly=poly):
            return radial_ops.apply_polynomial(ctx.space, poly, u, check=False)

        got = operators.identify_operator(ctx.space, op, 4, ctx.grid, seed=ctx.seed)
        pad = np.zeros(5, dtype=complex)
        pad[: len(poly.coeffs)] = poly.coeffs
        gpad = np.zeros(5, dtype=complex)
        gpad[: len(got.coeffs)] = got.coeffs
        worst = max(worst, float(np.max(np.abs(pad - gpad))))
    return worst, 1e-6


def check_identify_shifted(ctx):
    poly = LaplacePolynomial([2.0, 3.0, 1.0])

    def op(u):
        return radial_ops.apply_polynomial(ctx.space, poly, u, check=False)

    got = operators.identify_operator(ctx.space, op, 4, ctx.grid, seed=ctx.seed)
    gpad = np.zeros(3, dtype=complex)
    gpad[: len(got.coeffs)] = got.coeffs[:3]
    return float(np.max(np.abs(gpad - np.array([2.0, 3.0, 1.0])))), 1e-6


def check_identify_negative(ctx):
    def op(u):
        return RadialProfile(u.grid, u.grid.nodes ** 2 * u.values)

    try:
        operators.identify_operator(ctx.space, op, 4, ctx.grid, seed=ctx.seed)
    except NotInAlgebraError:
        return 0.0, 1e-12
    return 1.0, 1e-12


def check_commutativity(ctx):
    rng = ctx.rng(30)
    p1 = LaplacePolynomial(rng.normal(size=3))
    p2 = LaplacePolynomial(rng.normal(size=3))
    u = ctx.bump(31)
    ab_ = radial_ops.apply_polynomial(
        ctx.space, p2, radial_ops.apply_polynomial(ctx.space, p1, u, check=False), check=False)
    ba_ = radial_ops.apply_polynomial(
        ctx.space, p1, radial_ops.apply_polynomial(ctx.space, p2, u, check=False), check=False)
    return _rel(np.max(np.abs(ab_.values - ba_.values)), np.max(np.abs(ab_.values))), 1e-8


def check_eigen_coincidence(ctx):
    lam = 2.0
    mu = lam ** 2 + ctx.space.rho ** 2
    poly = LaplacePolynomial([2.0, 3.0, 1.0])
    phi = spherical.spherical_function(ctx.space, lam, ctx.grid)
    out = radial_ops.apply_polynomial(ctx.space, poly, phi, check=False)
    pred = poly.eval(-mu)
    return _rel(np.max(np.abs(out.values - pred * phi.values)), abs(pred)), 1e-6


def check_eigen_relation(ctx):
    worst = 0.0
    for lam in (0.5, 1.0, 2.0, 5.0):
        phi = spherical.spherical_function(ctx.space, lam, ctx.grid)
        mu = lam ** 2 + ctx.space.rho ** 2
        res = np.max(np.abs(
            radial_ops.apply_radial_laplacian(ctx.space, phi).values + mu * phi.values))
        worst = max(worst, float(res) / (1e-8 * (1 + lam ** 2)))
    return worst, 1.0


def check_limit_quotient(ctx):
    """(phi(r) - 1)/r^2 -> -(lam^2 + rho^2)/(2n) at r = 1e-3."""
    lam = 1.0
    mu = lam ** 2 + ctx.space.rho ** 2
    phi = spherical.spherical_function(ctx.space, lam, ctx.grid)
    r = 1e-3
    quotient = (float(np.real(phi.eval(r))) - 1.0) / r ** 2
    return abs(quotient + mu / (2.0 * ctx.space.n)) / mu, 1e-4


# ---------------------------------------------------------------- fundsol

def check_conjugate_base(ctx):
    tilde = operators.abel_conjugate(ctx.space, LaplacePolynomial([0.0, 1.0]))
    want = np.array([-ctx.space.rho ** 2, 0.0, 1.0])
    got = np.zeros(3, dtype=complex)
    got[: len(tilde.coeffs)] = tilde.coeffs
    return float(np.max(np.abs(got - want))), 1e-12


def check_fundamental_closed_form(ctx):
    """D = Delta - 1 has the explicit line Green's function."""
    fund = operators.fundamental_solution(ctx.space, LaplacePolynomial([-1.0, 1.0]))
    mu = math.sqrt(1.0 + ctx.space.rho ** 2)
    s = ctx.sgrid.s
    want = -np.exp(-mu * s) / (2.0 * mu)
    got = np.real(fund.line_values(s))
    return float(np.max(np.abs(got - want))), 1e-12


def check_laplacian_fundamental(ctx):
    """D = Delta alone: resonant at rho = 0, explicit otherwise."""
    fund = operators.fundamental_solution(ctx.space, LaplacePolynomial([0.0, 1.0]))
    rho = ctx.space.rho
    s = ctx.sgrid.s
    want = -np.exp(-rho * s) / (2.0 * rho)
    return float(np.max(np.abs(np.real(fund.line_values(s)) - want))), 1e-12


def check_certificate(ctx):
    """Line-domain fundamental-solution certificate (no inversion needed).

    The Green's function decays like e^{-mu|s|} with mu = sqrt(1 + rho^2),
    so the certificate line grid is widened until that tail is negligible.
    """
    fund = operators.fundamental_solution(ctx.space, LaplacePolynomial([-1.0, 1.0]))
    f = ctx.bump(40)
    mu = math.sqrt(1.0 + ctx.space.rho ** 2)
    smax = max(ctx.config.smax, math.ceil(34.0 / mu))
    cert_grid = line_grid(float(smax), 8192 * int(round(smax / 16.0)) + 1)
    af = abel.abel_transform(ctx.space, f, cert_grid, ctx.lgrid)
    conv = fund.convolve_line(af)
    back = fund.tilde.apply_line(conv)
    return _rel(np.max(np.abs(back.values - af.values)), af.sup_norm()), 1e-6


def check_solve_residual(ctx):
    poly = LaplacePolynomial([-1.0, 1.0])
    f = ctx.bump(41)
    u = operators.solve(ctx.space, poly, f, ctx.lgrid)
    res = radial_ops.apply_polynomial(ctx.space, poly, u, check=False)
    return float(np.max(np.abs(res.values - f.values))), 1e-4


def check_solve_roundtrip(ctx):
    poly = LaplacePolynomial([-1.0, 1.0])
    u = ctx.bump(42)
    f = radial_ops.apply_polynomial(ctx.space, poly, u, check=False)
    back = operators.solve(ctx.space, poly, f, ctx.lgrid)
    return float(np.max(np.abs(back.values - u.values))), 1e-4


def check_intertwining(ctx):
    u = ctx.bump(43)
    res = operators.abel_intertwining_check(ctx.space, LaplacePolynomial([0.0, 1.0]),
                                            u, ctx.sgrid, ctx.narrow_lgrid())
    return res, 1e-6


# ------------------------------------------------------------------- heat

def check_heat_closed_form(ctx):
    t = 0.5
    kern = heat.heat_kernel(ctx.space, t, ctx.grid, ctx.lgrid)
    want = heat.heat_kernel_closed_form(ctx.space, t, ctx.grid.nodes)
    return float(np.max(np.abs(np.real(kern.profile.values) - want))), 1e-6


def check_heat_mass(ctx):
    kern = heat.heat_kernel(ctx.space, 0.5, ctx.grid, ctx.lgrid)
    return abs(kern.mass() - 1.0), 1e-6


def check_heat_semigroup(ctx):
    k1 = heat.heat_kernel(ctx.space, 0.5, ctx.grid, ctx.lgrid)
    k2 = heat.heat_kernel(ctx.space, 0.3, ctx.grid, ctx.lgrid)
    k3 = heat.heat_kernel(ctx.space, 0.8, ctx.grid, ctx.lgrid)
    conv = abel.radial_convolve(ctx.space, k1.profile, k2.profile, ctx.lgrid)
    return float(np.max(np.abs(conv.values - k3.profile.values))), 1e-6


def check_heat_identity_limit(ctx):
    # a wide plateau bump: the t -> 0 error is t * sup|L_A u|, so the test
    # function must have Laplacian no larger than its own sup
    u = RadialProfile(ctx.grid, abel.bump_values(ctx.grid.nodes, 0.75 * ctx.config.rmax))
    evolved = heat.heat_evolve(ctx.space, u, 1e-3, ctx.lgrid)
    return _rel(np.max(np.abs(evolved.values - u.values)), u.sup_norm()), 1e-3


def check_heat_spectral_decay(ctx):
    kern = heat.heat_kernel(ctx.space, 0.5, ctx.grid, ctx.lgrid)
    fhat = spherical.spherical_fourier(ctx.space, kern.profile, ctx.lgrid)
    window = ctx.lgrid.lam <= 10.0
    want = kern.spectral_values()
    return float(np.max(np.abs(fhat.values - want)[window])), 1e-6


def check_heat_pde(ctx):
    k0 = heat.heat_kernel(ctx.space, 0.1, ctx.grid, ctx.lgrid)
    stepped = heat.crank_nicolson_evolve(ctx.space, k0.profile, 0.4, dt=5e-4)
    k1 = heat.heat_kernel(ctx.space, 0.5, ctx.grid, ctx.lgrid)
    return float(np.max(np.abs(stepped.values - k1.profile.values))), 1e-4


def check_heat_positivity(ctx):
    """h_t > 0 on the resolved range: negative values may only appear below
    the synthesis noise floor, measured relative to the kernel peak."""
    worst = 0.0
    for t in (0.05, 0.5, 5.0):
        kern = heat.heat_kernel(ctx.space, t, ctx.grid, ctx.lgrid)
        vals = np.real(kern.profile.values)
        worst = max(worst, -float(np.min(vals)) / float(np.max(vals)))
    return max(worst, 0.0), 1e-8


def check_heat_span_member(ctx):
    kern = heat.heat_kernel(ctx.space, 0.7, ctx.grid, ctx.lgrid)
    out = heat.heat_span_projection(ctx.space, kern.profile, [0.7], ctx.grid, ctx.lgrid)
    coeff_err = abs(out["coefficients"][0] - 1.0)
    return max(out["l1_residual"], coeff_err), 1e-8


def check_heat_span_density(ctx):
    """Nested fits: the minimized (weighted-L2) residual must be monotone
    non-increasing and the weighted-L1 residual small at the full set."""
    target = ctx.bump(51)
    times = list(np.logspace(math.log10(0.01), math.log10(5.0), 20))
    curve = heat.heat_span_residual_curve(ctx.space, target, times, ctx.grid,
                                          ctx.lgrid, kind="l2")
    slack = 1e-9 * curve[0]
    monotone = all(curve[i + 1] <= curve[i] + slack for i in range(len(curve) - 1))
    final = heat.heat_span_projection(ctx.space, target, times, ctx.grid,
                                      ctx.lgrid)["l1_residual"]
    norm = abel.weighted_l1(ctx.space, target)
    return (final / norm if monotone else float("inf")), 1e-3


def check_heat_derivative_bound(ctx):
    rep = heat.derivative_bound_probe(ctx.space, 0.5, 1, 1.0, ctx.grid, ctx.lgrid)
    return rep["relative_change"], 0.05


SUITES = {
    "cheigf": [
        ("cheigf-identity", "Thm cheigf", check_eigenfunction_identity),
        ("cheigf-negative-control", "Thm cheigf", check_eigenfunction_negative),
        ("cheigf-small-t-laplacian", "Lemma on averages", check_small_t_laplacian),
        ("radialize-idempotent", "Prop radialoperator (1)", check_radialize_idempotent),
        ("radialize-positive", "Prop radialoperator (2)", check_radialize_positive),
        ("radialize-adjoint", "Prop radialoperator (3)", check_radialize_adjoint),
        ("radialize-mass", "Prop radialoperator (4)", check_radialize_mass),
        ("radialize-product-rule", "Prop radialoperator (5)", check_radialize_product_rule),
        ("radialize-laplacian-commute", "Prop radialoperator (8)", check_radialize_laplacian_commute),
        ("sphere-average-selfadjoint", "Lemma A:self", check_sphere_average_selfadjoint),
    ],
    "abel": [
        ("abel-fourier-identity", "eq. abel-fourier", check_abel_fourier),
        ("abel-geometric-agreement", "geometric Abel formula", check_abel_geometric),
        ("abel-convolution-theorem", "Abel convolution lemma", check_convolution_theorem),
        ("young-inequality", "eq. conalg", check_young),
        ("abel-delta-convergence", "Lemma A(delta)=delta", check_delta_convergence),
        ("dual-abel-duality", "dual Abel definition", check_dual_abel),
        ("convolve-brute-force", "convolution definition", check_convolve_brute_force),
    ],
    "algebra": [
        ("pj-first-two", "Lemma radialpoly", check_pj_exact),
        ("pj-derivative-oracle", "Lemma radialpoly", check_pj_derivative_oracle),
        ("radialpoly-vanishing", "Lemma radialpoly0", check_radialpoly_vanishing),
        ("identify-roundtrip", "Thm invariantalgebra", check_identify_roundtrip),
        ("identify-shifted", "Thm invariantalgebra", check_identify_shifted),
        ("identify-negative-control", "Thm invariantalgebra", check_identify_negative),
        ("algebra-commutativity", "Corollary (1)", check_commutativity),
        ("eigen-coincidence", "Corollary (2)", check_eigen_coincidence),
        ("eigen-relation", "eq. radiallaplace", check_eigen_relation),
        ("limit-quotient", "Lemma limitvarphi", check_limit_quotient),
    ],
    "fundsol": [
        ("conjugate-base", "Lemma D-tilde", check_conjugate_base),
        ("fundamental-closed-form", "Thm fundamental", check_fundamental_closed_form),
        ("laplacian-fundamental", "Thm fundamental", check_laplacian_fundamental),
        ("fundsol-certificate", "Thm fundamental", check_certificate),
        ("solve-residual", "Thm diffop", check_solve_residual),
        ("solve-roundtrip", "Thm diffop", check_solve_roundtrip),
        ("abel-intertwining", "Lemma D-tilde", check_intertwining),
    ],
    "heat": [
        ("heat-closed-form", "heat kernel section", check_heat_closed_form),
        ("heat-unit-mass", "heat kernel section", check_heat_mass),
        ("heat-semigroup", "rem:heat", check_heat_semigroup),
        ("heat-identity-limit", "heat kernel section", check_heat_identity_limit),
        ("heat-spectral-decay", "heat kernel section", check_heat_spectral_decay),
        ("heat-pde-crosscheck", "heat equation", check_heat_pde),
        ("heat-positivity", "heat kernel section", check_heat_positivity),
        ("heat-span-member", "density theorem", check_heat_span_member),
        ("heat-span-density", "density theorem", check_heat_span_density),
        ("heat-derivative-bound", "Davies bound", check_heat_derivative_bound),
    ],
}


def run_checks(config, suite: str):
    """Execute one suite; returns a list of CheckResult sorted by name."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; have {sorted(SUITES)} and 'all'")
    ctx = SuiteContext(config)
    results = []
    for name, anchor, fn in SUITES[suite]:
        try:
            residual, tolerance = fn(ctx)
        except (CapabilityError, ResonantSymbolError) as exc:
            results.append(CheckResult(name, anchor, None, None, "skip", str(exc)))
            continue
        status = "pass" if residual < tolerance else "fail"
        results.append(CheckResult(name, anchor, float(residual), float(tolerance), status))
    results.sort(key=lambda r: r.check_name)
    return results


def run_suite(config, suite: str):
    """Run one suite (or 'all'); returns (report dict, exit code)."""
    names = list(SUITES) if suite == "all" else [suite]
    checks = []
    for name in names:
        checks.extend(run_checks(config, name))
    checks.sort(key=lambda r: r.check_name)
    all_pass = all(c.passed for c in checks)
    report = {
        "experiment": config.experiment,
        "suite": suite,
        "space": str(config.space()),
        "seed": config.seed,
        "checks": [c.to_dict() for c in checks],
        "all_pass": all_pass,
    }
    return report, (0 if all_pass else 1)
