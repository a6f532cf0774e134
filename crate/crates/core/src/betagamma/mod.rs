//! Products of independent Beta, Gamma and uniform-power variables: Mellin
//! transforms, sampling, the density of T(a, b, c) = Beta(a, b) * Gamma(c),
//! equality-in-law checks and the Kummer type 2 Laplace transform.

mod density;
mod expr;
mod law;

pub use density::{
    density_t, holomorphy_witness, kummer2_laplace, kummer2_laplace_quadrature, ln_density_t, reciprocal_mellin_t,
    u_rho_product_density, HolomorphyWitness,
};
pub use expr::{moment_check, sample, Atom, DistributionExpr, Factor, MomentCheck};
pub use law::{
    beta_shift_identity, beta_uniform_identity, ks_against_density_t, mellin_grid, standard_identities,
    t_factorization_identity, t_gamma_identity, t_integer_b_identity, t_shift_identity, t_symmetry_identity,
    verify_law, LawDiagnostic, LawIdentity, LawMethod, LawParams, LawTestReport, KS_CRITICAL_001,
};
