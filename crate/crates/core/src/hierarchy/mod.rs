//! The quantum KdV and ILW hierarchies at the level of densities.

pub mod appendix;
pub mod commutator;
pub mod eigen;
pub mod ppoly;
pub mod recursion;

pub use appendix::{d_coeff, d_genfun_check, eliashberg_densities, epsilon_extremes, g_infinity_operator};
pub use commutator::commutator_bracket;
pub use eigen::{eigenvalue_sum, perturbative_eigenvalues};
pub use ppoly::{p_polynomial, p_polynomial_closed, p_tilde, PPolynomial};
pub use recursion::{densities, ilw_g1, r1_ilw, r2_ilw, recursion_residuals, stabilization_check, reduced_densities, DensityTable, Mode};
