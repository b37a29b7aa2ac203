"""Radial harmonic analysis on noncompact harmonic model spaces.

Spherical eigenfunctions, the radial Fourier and Abel transforms, the
radial convolution algebra, polynomial-in-Laplacian operators with their
fundamental solutions, heat kernels, and point-level sphere-average
geometry on the flat and hyperbolic backends.
"""

from .abel import (abel_transform, abel_transform_geometric, dual_abel,
                   inverse_abel, line_convolve, line_mollifier,
                   radial_convolve, radial_mass, radial_mollifier, weighted_l1)
from .errors import (AccuracyWarning, CapabilityError, ConfigError,
                     ExtrapolationError, NotInAlgebraError, ParityError,
                     ResonantSymbolError, TruncationWarning)
from .grids import (LambdaGrid, LineGrid, RadialGrid, default_line_grid,
                    lambda_grid, line_grid, radial_grid)
from .heat import (HeatKernel, crank_nicolson_evolve, derivative_bound_probe,
                   heat_evolve, heat_kernel, heat_kernel_closed_form,
                   heat_span_projection, heat_span_residual_curve)
from .operators import (ConstCoeffOperator, FundamentalSolution,
                        abel_conjugate, abel_intertwining_check,
                        builtin_operator, fundamental_solution,
                        identify_operator, seeded_bump, solve)
from .profiles import (EvenSeries, LaplacePolynomial, LineProfile,
                       RadialProfile, SpectralProfile, load_line_csv,
                       load_radial_csv, load_spectral_csv, save_line_csv,
                       save_radial_csv, save_spectral_csv)
from .radial_ops import (apply_polynomial, apply_radial_laplacian,
                         compute_pj, compute_pj_exact, derivatives_at_zero,
                         monomial_profile)
from .spaces import (ModelSpace, damek_ricci, density, density_ratio,
                     euclidean, hyperbolic, log_derivative, parse_space,
                     rho, space_from_config, sphere_area)
from .spherical import (eigenvalue_shift, inverse_spherical,
                        plancherel_density, spherical_fourier,
                        spherical_function)

__version__ = "0.1.0"
