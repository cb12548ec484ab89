//! Dense complex linear algebra used throughout the crate.

mod eig;
mod matrix;
mod norms;
mod special;

pub use eig::{
    characteristic_polynomial, fourth_root_multiplicities, hermitian_eig, multiset_distance, normal_eig,
    singular_values, small_eig, HermitianEig, SMALL_EIG_MAX_N,
};
pub use matrix::{basis, sgn, vdot, vnorm, CMatrix, C64, I, ONE, ZERO};
pub use norms::{is_uniform, norms, uniform_deviation, uniformity_ratio, NormReport, DEFAULT_UNIFORM_TOL};
pub use special::{
    cyclic_shift, dft, dft_multiplicities, extend_to_unitary, hadamard2, householder, omega_pow, root_of_unity,
};
