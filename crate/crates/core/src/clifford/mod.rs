//! Real Clifford algebra Cl(n) with `e_i e_j + e_j e_i = -2 δ_ij`.

mod blade;
mod multivector;
mod paravector;

pub use blade::{blade_product, conjugation_sign, product_sign, sign_table, BladeIndex, SignTable, MAX_ALGEBRA_DIM};
pub use multivector::Multivector;
pub use paravector::{paravector_inverse, Paravector, MAX_AXES};

use crate::error::Result;
use crate::scalar::Scalar;

/// Geometric product with dimension checking.
pub fn mv_mul<T: Scalar>(a: &Multivector<T>, b: &Multivector<T>) -> Result<Multivector<T>> {
    a.mul(b)
}

pub fn conjugate<T: Scalar>(a: &Multivector<T>) -> Multivector<T> {
    a.conjugate()
}

pub fn norm<T: Scalar>(a: &Multivector<T>) -> T {
    a.norm()
}
