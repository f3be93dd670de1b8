//! Paravectors `x = x⁰ + Σ xʲ e_j`, identified with points of R^{n+1}.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::blade::{BladeIndex, MAX_ALGEBRA_DIM};
use super::multivector::Multivector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest ambient dimension `n + 1`.
pub const MAX_AXES: usize = MAX_ALGEBRA_DIM + 1;

/// Paravector of Cl(n) / point of R^{n+1}; stored inline so it is `Copy`.
#[derive(Clone, Copy, PartialEq)]
pub struct Paravector<T: Scalar> {
    n: usize,
    c: [T; MAX_AXES],
}

impl<T: Scalar> Paravector<T> {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_ALGEBRA_DIM);
        Self { n, c: [T::zero(); MAX_AXES] }
    }

    /// From the `n + 1` components `(x⁰, …, xⁿ)`.
    pub fn new(components: &[T]) -> Self {
        assert!(!components.is_empty() && components.len() <= MAX_AXES, "bad component count");
        let mut p = Self::zero(components.len() - 1);
        p.c[..components.len()].copy_from_slice(components);
        p
    }

    pub fn from_f64(components: &[f64]) -> Self {
        let v: Vec<T> = components.iter().map(|&x| T::lit(x)).collect();
        Self::new(&v)
    }

    /// Unit vector along axis `j` (0 is the scalar axis).
    pub fn axis(n: usize, j: usize) -> Self {
        let mut p = Self::zero(n);
        p.c[j] = T::one();
        p
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Ambient dimension `n + 1`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    #[inline]
    pub fn components(&self) -> &[T] {
        &self.c[..=self.n]
    }

    #[inline]
    pub fn components_mut(&mut self) -> &mut [T] {
        &mut self.c[..=self.n]
    }

    pub fn to_vec_f64(&self) -> Vec<f64> {
        self.components().iter().map(|c| c.as_f64()).collect()
    }

    #[inline]
    pub fn norm_sq(&self) -> T {
        self.components().iter().map(|&x| x * x).sum()
    }

    #[inline]
    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, other: &Self) -> T {
        (*self - *other).norm()
    }

    /// `x̄ = x⁰ - Σ xʲ e_j`, again a paravector.
    pub fn conj(&self) -> Self {
        let mut p = *self;
        for j in 1..=self.n {
            p.c[j] = -p.c[j];
        }
        p
    }

    pub fn scale(&self, s: T) -> Self {
        let mut p = *self;
        for x in p.components_mut() {
            *x = *x * s;
        }
        p
    }

    pub fn to_multivector(&self) -> Multivector<T> {
        let mut m = Multivector::zero(self.n);
        m.set(BladeIndex::SCALAR, self.c[0]);
        for j in 1..=self.n {
            m.set(BladeIndex::generator(j), self.c[j]);
        }
        m
    }

    /// Reads the paravector part of `m`; fails if `m` has support on higher grades.
    pub fn from_multivector(m: &Multivector<T>, tol: T) -> Result<Self> {
        let mut p = Self::zero(m.n());
        for (b, &c) in m.coeffs().iter().enumerate() {
            match (b as u32).count_ones() {
                0 => p.c[0] = c,
                1 => p.c[b.trailing_zeros() as usize + 1] = c,
                _ if c.abs() > tol => {
                    return Err(Error::InvalidParameter(format!(
                        "multivector has grade-{} part",
                        (b as u32).count_ones()
                    )))
                }
                _ => {}
            }
        }
        Ok(p)
    }

    /// `x⁻¹ = x̄ / |x|²`.
    pub fn inverse(&self) -> Result<Multivector<T>> {
        let r2 = self.norm_sq();
        if r2.is_zero() {
            return Err(Error::ZeroParavector);
        }
        Ok(self.conj().scale(r2.recip()).to_multivector())
    }

    /// `out += scale * self * u`, exploiting that `self` has grade ≤ 1.
    pub fn left_mul_acc(&self, u: &Multivector<T>, scale: T, out: &mut Multivector<T>) {
        u.add_scaled_into(scale * self.c[0], out);
        for j in 1..=self.n {
            let cj = self.c[j];
            if !cj.is_zero() {
                u.left_blade_acc(BladeIndex::generator(j), scale * cj, out);
            }
        }
    }

    pub fn cast<U: Scalar>(&self) -> Paravector<U> {
        let v: Vec<U> = self.components().iter().map(|c| U::lit(c.as_f64())).collect();
        Paravector::new(&v)
    }
}

/// Paravector inverse as a free function.
pub fn paravector_inverse<T: Scalar>(x: &Paravector<T>) -> Result<Multivector<T>> {
    x.inverse()
}

impl<T: Scalar> std::fmt::Debug for Paravector<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.components()).finish()
    }
}

impl<T: Scalar> Index<usize> for Paravector<T> {
    type Output = T;
    #[inline]
    fn index(&self, i: usize) -> &T {
        &self.components()[i]
    }
}

impl<T: Scalar> IndexMut<usize> for Paravector<T> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.components_mut()[i]
    }
}

impl<T: Scalar> Add for Paravector<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        for j in 0..=self.n {
            self.c[j] = self.c[j] + rhs.c[j];
        }
        self
    }
}

impl<T: Scalar> Sub for Paravector<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        for j in 0..=self.n {
            self.c[j] = self.c[j] - rhs.c[j];
        }
        self
    }
}

impl<T: Scalar> Mul<T> for Paravector<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Scalar> Serialize for Paravector<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec_f64().serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Paravector<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = Vec::<f64>::deserialize(d)?;
        if v.is_empty() || v.len() > MAX_AXES {
            return Err(D::Error::custom(format!("paravector needs 1..={MAX_AXES} components")));
        }
        Ok(Self::from_f64(&v))
    }
}
