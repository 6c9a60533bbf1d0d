//! Information gain, relative entropy, equilibrium states and entropy
//! production for symbolic dynamics.
//!
//! The finite-alphabet side is exact: potentials are locally constant lookup
//! tables, the Ruelle operator is a finite matrix, and invariant measures are
//! Markov. The compact alphabet `[0, 1]` is reached by quadrature, which turns
//! every continuous problem back into a finite one (see [`tfca`]).
//!
//! All logarithms are natural. Front ends convert with [`LogBase`].

pub mod error;
pub mod finite_thermo;
pub mod info_gain;
pub mod involution;
pub mod symbolic;
pub mod tfca;
pub mod units;

pub use error::{Error, Result};
pub use finite_thermo::{
    equilibrium, equilibrium_measure, integrate_potential, is_normalized, normalize_potential,
    relative_entropy, spectral_data, spectral_data_with, transfer_apply, EquilibriumState,
    Potential, SolverOptions, SpectralData,
};
pub use info_gain::{
    conditional_entropy, ig_shift, information_gain, joint_jacobian, kernel_information_gain,
    kl_divergence, mutual_information, shannon_entropy, variational_entropy_oracle, JacobianTable,
    JointDistribution, OracleResult, ProbabilityKernel,
};
pub use involution::{
    cylinder_gain_estimate, dual_eigenvalue_check, entropy_production_markov,
    entropy_production_potential, involution_kernel, is_symmetric, orbit_gain_estimate,
    specific_gain, GainReport, GainRoute, InvolutionData, SymmetryReport,
};
pub use symbolic::{
    cylinder_mass, ks_entropy, log_cylinder_mass, reverse_measure, sample_orbit,
    stationary_distribution, Alphabet, AprioriWeights, MarkovMeasure, StochasticMatrix, Word,
};
pub use tfca::{
    nystrom_spectral, tfca_entropy, tfca_entropy_production, tfca_equilibrium, ContinuousPotential,
    QuadratureMeasure, QuadratureRule, TfcaEquilibrium,
};
pub use units::{ExtReal, LogBase};
