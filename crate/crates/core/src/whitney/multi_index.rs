//! Multi-indices `j = (j₀, …, jₙ)` over the `n + 1` coordinates of R^{n+1}.

use std::fmt;

use crate::clifford::MAX_AXES;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    dim: u8,
    e: [u8; MAX_AXES],
}

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_AXES);
        Self { dim: dim as u8, e: [0; MAX_AXES] }
    }

    pub fn new(exponents: &[u8]) -> Self {
        let mut m = Self::zero(exponents.len());
        m.e[..exponents.len()].copy_from_slice(exponents);
        m
    }

    /// The unit multi-index `1_r`.
    pub fn unit(dim: usize, r: usize) -> Self {
        let mut m = Self::zero(dim);
        m.e[r] = 1;
        m
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn exponents(&self) -> &[u8] {
        &self.e[..self.dim as usize]
    }

    pub fn order(&self) -> usize {
        self.exponents().iter().map(|&x| x as usize).sum()
    }

    /// `j! = Π jᵢ!`.
    pub fn factorial(&self) -> f64 {
        self.exponents()
            .iter()
            .map(|&x| (1..=x as u32).map(f64::from).product::<f64>())
            .product()
    }

    /// `x^j = Π xᵢ^{jᵢ}`.
    pub fn pow<T: Scalar>(&self, x: &[T]) -> T {
        self.exponents()
            .iter()
            .zip(x)
            .fold(T::one(), |acc, (&j, &xi)| acc * xi.powi(j as i32))
    }

    pub fn checked_add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut m = *self;
        for i in 0..self.dim() {
            m.e[i] += other.e[i];
        }
        m
    }

    /// `self - other` if non-negative componentwise.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut m = *self;
        for i in 0..self.dim() {
            m.e[i] = self.e[i].checked_sub(other.e[i])?;
        }
        Some(m)
    }

    /// All multi-indices with `|j| <= order`, graded by order then lexicographically descending.
    pub fn all_up_to(dim: usize, order: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for total in 0..=order {
            let mut cur = Self::zero(dim);
            fill(&mut out, &mut cur, 0, total);
        }
        out
    }

    /// Space-separated exponents, the key used in jet files.
    pub fn key(&self) -> String {
        self.exponents().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    }

    pub fn parse_key(dim: usize, key: &str) -> Result<Self> {
        let parts: Vec<u8> = key
            .split_whitespace()
            .map(|s| s.parse::<u8>().map_err(|_| Error::Format(format!("bad multi-index {key:?}"))))
            .collect::<Result<_>>()?;
        if parts.len() != dim {
            return Err(Error::Format(format!("multi-index {key:?} needs {dim} entries")));
        }
        Ok(Self::new(&parts))
    }
}

fn fill(out: &mut Vec<MultiIndex>, cur: &mut MultiIndex, axis: usize, left: usize) {
    let dim = cur.dim();
    if axis + 1 == dim {
        cur.e[axis] = left as u8;
        out.push(*cur);
        return;
    }
    for v in (0..=left).rev() {
        cur.e[axis] = v as u8;
        fill(out, cur, axis + 1, left - v);
    }
    cur.e[axis] = 0;
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.key().replace(' ', ","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        // binomial(d + k, k)
        assert_eq!(MultiIndex::all_up_to(2, 2).len(), 6);
        assert_eq!(MultiIndex::all_up_to(3, 3).len(), 20);
        let all = MultiIndex::all_up_to(3, 2);
        assert_eq!(all[0], MultiIndex::zero(3));
        assert_eq!(all[1], MultiIndex::new(&[1, 0, 0]));
        assert!(all.windows(2).all(|w| w[0].order() <= w[1].order()));
    }

    #[test]
    fn factorial_and_power() {
        let j = MultiIndex::new(&[2, 0, 3]);
        assert_eq!(j.order(), 5);
        assert_eq!(j.factorial(), 12.0);
        assert_eq!(j.pow(&[2.0, 7.0, -1.0]), -4.0);
    }

    #[test]
    fn key_round_trip() {
        let j = MultiIndex::new(&[0, 1, 2]);
        assert_eq!(j.key(), "0 1 2");
        assert_eq!(MultiIndex::parse_key(3, "0 1 2").unwrap(), j);
        assert!(MultiIndex::parse_key(2, "0 1 2").is_err());
    }
}
