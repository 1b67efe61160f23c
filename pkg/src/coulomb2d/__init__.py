"""Lower bounds on the indirect Coulomb energy of planar atoms.

Public surface: the bound constants, density profiles with their
functional terms, Coulomb integrals, the molecular stability functional,
and small-N wavefunction cross-checks.
"""

from .constants import (BoundParameters, StabilityInputs, a_from_a_tilde,
                        a_tilde_sq_from_coupling, a_tilde_squared,
                        b_tilde_sq_from_couplings, b_tilde_squared,
                        beta_constant, derive_parameters, h_branches,
                        h_of_sigma, maximize_h, sharp_constant)
from .coulomb import (DiskSpec, InequalityCheck, MolecularConfig,
                      angular_coulomb_kernel, attraction_term,
                      complete_elliptic_first, direct_term,
                      direct_term_monte_carlo, repulsion_term,
                      verify_coulomb_uncertainty, verify_uncertainty_lemma)
from .density import (DensityProfile, ExponentialProfile, FunctionalValue,
                      GaussianProfile, MixtureProfile, TabulatedProfile,
                      evaluate_G, evaluate_L, functional_value,
                      gaussian_G_closed_form, gaussian_G_over_L,
                      gaussian_L_closed_form, kinetic_functional,
                      profile_from_descriptor, profile_to_descriptor,
                      scale_density)
from .errors import DivergenceError, DomainError
from .manybody import (BoundCheckResult, ScanResult, ScanRow,
                       WaveFunctionSpec, check_main_bound, indirect_energy,
                       pair_repulsion_expectation, single_particle_density,
                       spec_from_descriptor, spec_to_descriptor,
                       tightness_scan)
from .stability import (FunctionalBreakdown, StabilityVerdict, SweepReport,
                        analytic_stability_rhs, default_stability_inputs,
                        empirical_stability_sweep, evaluate_xi,
                        stability_bracket, stability_verdict)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
