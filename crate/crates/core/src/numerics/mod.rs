//! Dense complex linear algebra generic over the real scalar type.

pub mod decomp;
pub mod eigen;
pub mod givens;
pub mod matrix;
pub mod pfaffian;
pub mod random;
pub mod scalar;
pub mod skew;

pub use decomp::{householder_qr, lu_determinant, svd, Svd};
pub use eigen::{hermitian_eig, matrix_function_hermitian, matrix_function_hermitian_complex, HermitianEig};
pub use givens::{
    apply_givens, apply_givens_in_place, givens_params_to_zero, givens_params_to_zero_first, left_rotation_zeroing,
    right_rotation_zeroing, GivensRotation, Side,
};
pub use matrix::ComplexMatrix;
pub use pfaffian::pfaffian;
pub use scalar::{bound, cplx, phase, re, wrap_angle, Complex, Real};
pub use skew::{skew_real_canonical, SkewCanonicalForm};
