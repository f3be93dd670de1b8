//! Basis blades `e_A` of Cl(n), stored as generator bitmasks.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest algebra dimension `n` handled by the dense representation.
pub const MAX_ALGEBRA_DIM: usize = 8;

/// Basis blade `e_A`: bit `i - 1` set iff generator `e_i` belongs to `A`.
///
/// The empty mask is the unit `e_0 = 1`. Generators inside a blade are always
/// taken in ascending order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BladeIndex(pub u32);

impl BladeIndex {
    pub const SCALAR: BladeIndex = BladeIndex(0);

    /// Blade from generator indices in `1..=n`; order and duplicates are rejected
    /// only through the range check, the set semantics come from the mask.
    pub fn from_generators(n: usize, gens: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &g in gens {
            if g == 0 || g > n {
                return Err(Error::GeneratorOutOfRange { index: g, n });
            }
            mask |= 1 << (g - 1);
        }
        Ok(BladeIndex(mask))
    }

    /// The generator `e_i` (`i >= 1`).
    pub fn generator(i: usize) -> Self {
        debug_assert!(i >= 1);
        BladeIndex(1 << (i - 1))
    }

    pub fn grade(self) -> u32 {
        self.0.count_ones()
    }

    /// Ascending generator indices.
    pub fn generators(self) -> Vec<usize> {
        (0..32).filter(|b| self.0 & (1 << b) != 0).map(|b| b + 1).collect()
    }

    /// Ascending digit string, e.g. `"12"` for `e_1 e_2` and `""` for the unit.
    pub fn key(self) -> String {
        self.generators().iter().map(|g| g.to_string()).collect()
    }

    pub fn parse_key(n: usize, key: &str) -> Result<Self> {
        let mut gens = Vec::with_capacity(key.len());
        for ch in key.chars() {
            let d = ch
                .to_digit(10)
                .ok_or_else(|| Error::Format(format!("bad blade key {key:?}")))? as usize;
            gens.push(d);
        }
        if gens.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format(format!("blade key {key:?} not strictly ascending")));
        }
        Self::from_generators(n, &gens)
    }

    pub fn fits(self, n: usize) -> bool {
        (self.0 >> n) == 0
    }
}

impl fmt::Debug for BladeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            write!(f, "e0")
        } else {
            write!(f, "e{}", self.key())
        }
    }
}

/// Sign of `e_a e_b` after reordering into ascending form: each generator of `b`
/// moves past the larger generators of `a`, and shared generators square to -1.
#[inline]
pub fn product_sign(a: u32, b: u32) -> i8 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    swaps += (a & b).count_ones();
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `e_a e_b = sign * e_result` under `e_i e_j + e_j e_i = -2 δ_ij`.
pub fn blade_product(n: usize, a: BladeIndex, b: BladeIndex) -> Result<(i8, BladeIndex)> {
    if n > MAX_ALGEBRA_DIM {
        return Err(Error::DimensionTooLarge { n, max: MAX_ALGEBRA_DIM });
    }
    for blade in [a, b] {
        if !blade.fits(n) {
            let top = 32 - blade.0.leading_zeros() as usize;
            return Err(Error::GeneratorOutOfRange { index: top, n });
        }
    }
    Ok((product_sign(a.0, b.0), BladeIndex(a.0 ^ b.0)))
}

/// Memoized `2^n x 2^n` sign table for one algebra dimension.
pub struct SignTable {
    size: usize,
    signs: Vec<i8>,
}

impl SignTable {
    #[inline]
    pub fn sign(&self, a: usize, b: usize) -> i8 {
        self.signs[a * self.size + b]
    }
}

static TABLES: [OnceLock<SignTable>; MAX_ALGEBRA_DIM + 1] = [const { OnceLock::new() }; MAX_ALGEBRA_DIM + 1];

/// The shared sign table for `n`; built on first use, read-only afterwards.
pub fn sign_table(n: usize) -> &'static SignTable {
    TABLES[n].get_or_init(|| {
        let size = 1usize << n;
        let mut signs = vec![0i8; size * size];
        for a in 0..size {
            for b in 0..size {
                signs[a * size + b] = product_sign(a as u32, b as u32);
            }
        }
        SignTable { size, signs }
    })
}

/// Sign relating the conjugate `ē_A = (-1)^k e_{β_k} ... e_{β_1}` to `e_A`.
#[inline]
pub fn conjugation_sign(blade: u32) -> i8 {
    let k = blade.count_ones();
    // reversal contributes k(k-1)/2 swaps, the (-1)^k prefactor the rest
    if (k * (k + 1) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Multiplies generator strings by bubble-sorting them, independent of the
    /// bitmask formula above.
    fn product_by_permutation(a: &[usize], b: &[usize]) -> (i8, Vec<usize>) {
        let mut word: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
        let mut sign = 1i8;
        loop {
            let mut changed = false;
            let mut i = 0;
            while i + 1 < word.len() {
                if word[i] > word[i + 1] {
                    word.swap(i, i + 1);
                    sign = -sign;
                    changed = true;
                } else if word[i] == word[i + 1] {
                    word.drain(i..i + 2);
                    sign = -sign;
                    changed = true;
                    continue;
                }
                i += 1;
            }
            if !changed {
                break;
            }
        }
        (sign, word)
    }

    #[test]
    fn documented_products() {
        let b = |g: &[usize]| BladeIndex::from_generators(3, g).unwrap();
        assert_eq!(blade_product(3, b(&[1]), b(&[2])).unwrap(), (1, b(&[1, 2])));
        assert_eq!(blade_product(3, b(&[1]), b(&[1])).unwrap(), (-1, BladeIndex::SCALAR));
        assert_eq!(blade_product(3, b(&[1, 2]), b(&[2])).unwrap(), (-1, b(&[1])));
    }

    #[test]
    fn matches_permutation_oracle_for_cl4() {
        let n = 4;
        for a in 0..16u32 {
            for b in 0..16u32 {
                let ga = BladeIndex(a).generators();
                let gb = BladeIndex(b).generators();
                let (s, word) = product_by_permutation(&ga, &gb);
                let (sign, res) = blade_product(n, BladeIndex(a), BladeIndex(b)).unwrap();
                assert_eq!(sign, s, "{a:b} * {b:b}");
                assert_eq!(res.generators(), word);
                assert_eq!(sign_table(n).sign(a as usize, b as usize), s);
            }
        }
    }

    #[test]
    fn out_of_range_generators_rejected() {
        assert!(BladeIndex::from_generators(2, &[3]).is_err());
        assert!(BladeIndex::from_generators(2, &[0]).is_err());
        assert!(blade_product(2, BladeIndex(0b100), BladeIndex(1)).is_err());
    }

    #[test]
    fn keys_round_trip() {
        let b = BladeIndex::from_generators(3, &[1, 3]).unwrap();
        assert_eq!(b.key(), "13");
        assert_eq!(BladeIndex::parse_key(3, "13").unwrap(), b);
        assert_eq!(BladeIndex::parse_key(3, "").unwrap(), BladeIndex::SCALAR);
        assert!(BladeIndex::parse_key(3, "31").is_err());
    }
}
