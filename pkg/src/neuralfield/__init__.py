"""Localised steady states of planar neural field equations: spectral
evaluation of the integral model, matrix-free Newton-Krylov solves, secant
continuation, Arnoldi stability and rational-kernel PDE cross-validation."""

from .grid import (Field, GridMismatchError, KernelSpectrum, PeriodicGrid,
                   convolve, lowpass, read_field, sample_kernel,
                   spectrum_from_fourier, spectrum_from_samples, write_field)
from .model import (FiringRate, GaussianInput, KernelSpec, ModelParams,
                    RationalSpectrumParams, S, S_prime, jacobian_vec,
                    params_from_config, params_to_config, residual, rhs,
                    trivial_state_spectrum, turing_mu_c, w_oscillatory)
from .rk4 import IntegrationConfig, IntegrationResult, integrate
from .solvers import (GmresConfig, GmresResult, NewtonConfig, SolveReport,
                      gmres, newton)
from .continuation import (Branch, BranchPoint, ContinuationConfig,
                           continue_branch, detect_folds, fold_mus)
from .stability import (EigenResult, SpectrumRequest, leading_eigenvalues,
                        leading_spectrum)
from .kernelfit import (FitReport, FitResult, RadialSamples, fit_rational,
                        fit_report, initial_guess, inverse_radial_fourier,
                        kernel_spectrum_samples, radial_fourier)
from .seeds import SeedSpec, make_seed
from .pdepolar import (PdeParams, PdeSolveResult, PolarOperator, SectorGrid,
                       build_operator, continuation_callbacks, helmholtz_like,
                       pde4_residual, pde8_residual, read_sector_field,
                       solve_pde4, solve_pde8, write_sector_field)
from .analysis import (count_spots, radial_asymmetry, rotation_asymmetry,
                       support_radius, support_touches_boundary)
from .workflows import compare_branches, continue_in_mu, settle, steady_state
from .presets import PRESET_NAMES, preset_config

__version__ = "0.1.0"
