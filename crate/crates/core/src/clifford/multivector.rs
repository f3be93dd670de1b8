//! Dense multivectors of Cl(n).

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::blade::{conjugation_sign, sign_table, BladeIndex, MAX_ALGEBRA_DIM};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Element of Cl(n) with all `2^n` coefficients stored, indexed by blade bitmask.
#[derive(Clone, Debug, PartialEq)]
pub struct Multivector<T: Scalar> {
    n: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> Multivector<T> {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_ALGEBRA_DIM, "algebra dimension {n} above {MAX_ALGEBRA_DIM}");
        Self { n, coeffs: vec![T::zero(); 1 << n] }
    }

    pub fn scalar(n: usize, s: T) -> Self {
        let mut m = Self::zero(n);
        m.coeffs[0] = s;
        m
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, T::one())
    }

    pub fn blade(n: usize, blade: BladeIndex, c: T) -> Self {
        let mut m = Self::zero(n);
        m.coeffs[blade.0 as usize] = c;
        m
    }

    /// Generator `e_i`; `e_0` is the unit.
    pub fn basis(n: usize, i: usize) -> Self {
        if i == 0 {
            Self::one(n)
        } else {
            Self::blade(n, BladeIndex::generator(i), T::one())
        }
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<T>) -> Result<Self> {
        if n > MAX_ALGEBRA_DIM {
            return Err(Error::DimensionTooLarge { n, max: MAX_ALGEBRA_DIM });
        }
        if coeffs.len() != 1 << n {
            return Err(Error::DimensionMismatch { left: 1 << n, right: coeffs.len() });
        }
        Ok(Self { n, coeffs })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    #[inline]
    pub fn get(&self, blade: BladeIndex) -> T {
        self.coeffs[blade.0 as usize]
    }

    #[inline]
    pub fn set(&mut self, blade: BladeIndex, c: T) {
        self.coeffs[blade.0 as usize] = c;
    }

    pub fn scalar_part(&self) -> T {
        self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Geometric product; fails on dimension mismatch.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        let mut out = Self::zero(self.n);
        self.mul_acc(other, T::one(), &mut out);
        Ok(out)
    }

    /// `out += scale * self * other`, without allocation.
    pub fn mul_acc(&self, other: &Self, scale: T, out: &mut Self) {
        let table = sign_table(self.n);
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            let ca = ca * scale;
            for (b, &cb) in other.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let term = ca * cb;
                if table.sign(a, b) > 0 {
                    out.coeffs[a ^ b] = out.coeffs[a ^ b] + term;
                } else {
                    out.coeffs[a ^ b] = out.coeffs[a ^ b] - term;
                }
            }
        }
    }

    /// `out += scale * e_blade * self` (left multiplication by a basis blade).
    pub fn left_blade_acc(&self, blade: BladeIndex, scale: T, out: &mut Self) {
        let table = sign_table(self.n);
        let a = blade.0 as usize;
        for (b, &cb) in self.coeffs.iter().enumerate() {
            if cb.is_zero() {
                continue;
            }
            let term = scale * cb;
            if table.sign(a, b) > 0 {
                out.coeffs[a ^ b] = out.coeffs[a ^ b] + term;
            } else {
                out.coeffs[a ^ b] = out.coeffs[a ^ b] - term;
            }
        }
    }

    /// `out += scale * self`.
    pub fn add_scaled_into(&self, scale: T, out: &mut Self) {
        for (o, &c) in out.coeffs.iter_mut().zip(&self.coeffs) {
            *o = *o + scale * c;
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    /// Conjugation `a ↦ ā`, the anti-involution with `ē_j = -e_j`.
    pub fn conjugate(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(b, &c)| if conjugation_sign(b as u32) > 0 { c } else { -c })
            .collect();
        Self { n: self.n, coeffs }
    }

    /// Algebra norm `sqrt(Σ a_A²)`.
    pub fn norm(&self) -> T {
        self.coeffs.iter().map(|&c| c * c).sum::<T>().sqrt()
    }

    pub fn distance(&self, other: &Self) -> T {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt()
    }

    pub fn cast<U: Scalar>(&self) -> Multivector<U> {
        Multivector { n: self.n, coeffs: self.coeffs.iter().map(|c| U::lit(c.as_f64())).collect() }
    }
}

impl<T: Scalar> Add for &Multivector<T> {
    type Output = Multivector<T>;
    fn add(self, rhs: Self) -> Multivector<T> {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Multivector {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Scalar> Sub for &Multivector<T> {
    type Output = Multivector<T>;
    fn sub(self, rhs: Self) -> Multivector<T> {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Multivector {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Scalar> Mul for &Multivector<T> {
    type Output = Multivector<T>;
    /// Panics on dimension mismatch; use [`Multivector::mul`] for a `Result`.
    fn mul(self, rhs: Self) -> Multivector<T> {
        Multivector::mul(self, rhs).expect("dimension mismatch")
    }
}

impl<T: Scalar> Neg for &Multivector<T> {
    type Output = Multivector<T>;
    fn neg(self) -> Multivector<T> {
        Multivector { n: self.n, coeffs: self.coeffs.iter().map(|&c| -c).collect() }
    }
}

impl<T: Scalar> AddAssign<&Multivector<T>> for Multivector<T> {
    fn add_assign(&mut self, rhs: &Multivector<T>) {
        for (a, &b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = *a + b;
        }
    }
}

impl<T: Scalar> SubAssign<&Multivector<T>> for Multivector<T> {
    fn sub_assign(&mut self, rhs: &Multivector<T>) {
        for (a, &b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = *a - b;
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MultivectorRepr {
    n: usize,
    coeffs: BTreeMap<String, f64>,
}

impl<T: Scalar> Serialize for Multivector<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(b, c)| *b == 0 || !c.is_zero())
            .map(|(b, c)| (BladeIndex(b as u32).key(), c.as_f64()))
            .collect();
        MultivectorRepr { n: self.n, coeffs }.serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Multivector<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = MultivectorRepr::deserialize(d)?;
        if repr.n > MAX_ALGEBRA_DIM {
            return Err(D::Error::custom(format!("n = {} above {MAX_ALGEBRA_DIM}", repr.n)));
        }
        let mut m = Multivector::zero(repr.n);
        for (key, c) in repr.coeffs {
            let blade = BladeIndex::parse_key(repr.n, &key).map_err(D::Error::custom)?;
            m.set(blade, T::lit(c));
        }
        Ok(m)
    }
}
