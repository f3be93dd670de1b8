//! Truncated multivariate Taylor series, used for exact derivatives of
//! smooth compositions (bumps, partitions of unity, cutoffs).

use std::collections::HashMap;
use std::ops::{Add, Sub};

use crate::scalar::Scalar;
use crate::whitney::MultiIndex;

/// Monomial basis of a truncated power series space in `vars` variables up to `order`.
#[derive(Clone, Debug)]
pub struct TpsSpace {
    vars: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    products: Vec<(u32, u32, u32)>,
}

impl TpsSpace {
    pub fn new(vars: usize, order: usize) -> Self {
        let indices = MultiIndex::all_up_to(vars, order);
        let lookup: HashMap<_, _> = indices.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mut products = Vec::new();
        for (i, a) in indices.iter().enumerate() {
            for (j, b) in indices.iter().enumerate() {
                if a.order() + b.order() <= order {
                    let k = lookup[&a.checked_add(b)];
                    products.push((i as u32, j as u32, k as u32));
                }
            }
        }
        Self { vars, order, indices, lookup, products }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index_of(&self, m: &MultiIndex) -> Option<usize> {
        self.lookup.get(m).copied()
    }

    pub fn zero<T: Scalar>(&self) -> Tps<T> {
        Tps { c: vec![T::zero(); self.len()] }
    }

    pub fn constant<T: Scalar>(&self, v: T) -> Tps<T> {
        let mut t = self.zero();
        t.c[0] = v;
        t
    }

    /// The coordinate function `x_axis` expanded at a point where it equals `value`.
    pub fn variable<T: Scalar>(&self, axis: usize, value: T) -> Tps<T> {
        let mut t = self.constant(value);
        if self.order >= 1 {
            t.c[self.lookup[&MultiIndex::unit(self.vars, axis)]] = T::one();
        }
        t
    }

    pub fn mul<T: Scalar>(&self, a: &Tps<T>, b: &Tps<T>) -> Tps<T> {
        let mut out = self.zero();
        for &(i, j, k) in &self.products {
            let (ai, bj) = (a.c[i as usize], b.c[j as usize]);
            if !ai.is_zero() && !bj.is_zero() {
                out.c[k as usize] = out.c[k as usize] + ai * bj;
            }
        }
        out
    }

    /// `g(a)` from the scaled derivatives `series[j] = g^{(j)}(a₀) / j!`.
    pub fn compose<T: Scalar>(&self, a: &Tps<T>, series: &[T]) -> Tps<T> {
        let mut d = a.clone();
        d.c[0] = T::zero();
        let top = self.order.min(series.len() - 1);
        let mut r = self.constant(series[top]);
        for j in (0..top).rev() {
            r = self.mul(&r, &d);
            r.c[0] = r.c[0] + series[j];
        }
        r
    }

    pub fn exp<T: Scalar>(&self, a: &Tps<T>) -> Tps<T> {
        let e = a.c[0].exp();
        let mut series = Vec::with_capacity(self.order + 1);
        let mut fact = T::one();
        for j in 0..=self.order {
            if j > 0 {
                fact = fact * T::lit(j as f64);
            }
            series.push(e / fact);
        }
        self.compose(a, &series)
    }

    /// `1 / a`; requires `a₀ != 0`.
    pub fn recip<T: Scalar>(&self, a: &Tps<T>) -> Tps<T> {
        let inv = a.c[0].recip();
        let mut series = Vec::with_capacity(self.order + 1);
        let mut p = inv;
        for _ in 0..=self.order {
            series.push(p);
            p = -p * inv;
        }
        self.compose(a, &series)
    }

    /// `sqrt(a)`; requires `a₀ > 0`.
    pub fn sqrt<T: Scalar>(&self, a: &Tps<T>) -> Tps<T> {
        let a0 = a.c[0];
        let mut series = Vec::with_capacity(self.order + 1);
        // binomial coefficients of (1 + d)^{1/2}, scaled by a0^{1/2 - j}
        let mut coef = T::one();
        let mut pw = a0.sqrt();
        for j in 0..=self.order {
            series.push(coef * pw);
            let jf = T::lit(j as f64);
            coef = coef * (T::lit(0.5) - jf) / (jf + T::one());
            pw = pw / a0;
        }
        self.compose(a, &series)
    }

    /// Partial derivative `∂^m` of the series at its expansion point: `m! · coef_m`.
    pub fn derivative<T: Scalar>(&self, a: &Tps<T>, m: &MultiIndex) -> T {
        match self.index_of(m) {
            Some(i) => a.c[i] * T::lit(m.factorial()),
            None => T::zero(),
        }
    }
}

/// Coefficient vector in the basis of a [`TpsSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct Tps<T: Scalar> {
    pub c: Vec<T>,
}

impl<T: Scalar> Tps<T> {
    pub fn value(&self) -> T {
        self.c[0]
    }

    pub fn scale(&self, s: T) -> Self {
        Self { c: self.c.iter().map(|&x| x * s).collect() }
    }

    pub fn add_scaled(&mut self, other: &Self, s: T) {
        for (a, &b) in self.c.iter_mut().zip(&other.c) {
            *a = *a + s * b;
        }
    }

    pub fn add_const(mut self, v: T) -> Self {
        self.c[0] = self.c[0] + v;
        self
    }
}

impl<T: Scalar> Add for &Tps<T> {
    type Output = Tps<T>;
    fn add(self, rhs: Self) -> Tps<T> {
        Tps { c: self.c.iter().zip(&rhs.c).map(|(&a, &b)| a + b).collect() }
    }
}

impl<T: Scalar> Sub for &Tps<T> {
    type Output = Tps<T>;
    fn sub(self, rhs: Self) -> Tps<T> {
        Tps { c: self.c.iter().zip(&rhs.c).map(|(&a, &b)| a - b).collect() }
    }
}
