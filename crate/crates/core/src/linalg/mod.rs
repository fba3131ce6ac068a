//! Dense complex linear algebra used throughout the crate.

mod chol;
mod eig;
mod expm;
mod lu;
mod mat;
mod sigma;
mod svd;

pub use chol::{cholesky, solve_lower, solve_upper, weighted_similarity};
pub use eig::{eig, eigenvalues, Schur};
pub use expm::expm;
pub use lu::{inverse, solve, wrap_angle, Lu};
pub use mat::{vec_dot, vec_norm, Mat};
pub use sigma::{sigma_min, sigma_min_shifted};
pub use svd::{cond2, norm2, Svd};
