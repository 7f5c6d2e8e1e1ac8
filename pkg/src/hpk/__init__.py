"""Hua-Pickrell diffusion kernels.

Transition densities of the real-line diffusion with generator
(1+u^2) d^2/du^2 + (2Au+K) d/du by three independent routes (spectral
expansion, upper-half-plane kernel integral, Monte-Carlo), the
associated special functions, the non-colliding N-particle extension,
and a machine-verification suite for the identities tying the routes
together.
"""

from .quad import Estimate, QuadConfig, RngStream, integrate, principal_power, \
    richardson_limit
from .specfun import HpParams, cgamma, ferrer_p, hyp2f1, phi_eigen, romanovski, \
    speed_density, stationary_density, weight_w
from .spectral import SpectralScheme, build_scheme, hp_density_spectral, \
    hp_density_spectral_grid, norm_sq
from .maass import HyperbolicPoint, hp_charfn, hp_density_integral, \
    hp_density_integral_grid, hyp_distance, maass_moment, maass_q, theta_hw
from .stochastic import SampleSet, ks_distance, sample_expfunctional, \
    simulate_particles, simulate_y
from .particles import ParticleParams, ParticleState, invariant_density, \
    invariant_normalize, km_density, lambda_sn, multivar_legendre_det, \
    particles_density_spectral
from .verify import VerificationReport, run_suite

__version__ = "0.1.0"
