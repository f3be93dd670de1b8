//! Scalar abstraction shared by the algebraic layers.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar type usable for Clifford arithmetic and kernels: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal, panicking only for non-representable values.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Field-like numbers for closed-form formulas that must also run on exact rationals.
pub trait Field:
    num_traits::Num + Copy + PartialOrd + FromPrimitive + Debug
{
}

impl<T> Field for T where T: num_traits::Num + Copy + PartialOrd + FromPrimitive + Debug {}

/// Fixed-order pairwise summation; the result does not depend on thread count.
pub fn tree_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        len if len <= 8 => values.iter().sum(),
        len => {
            let (a, b) = values.split_at(len / 2);
            tree_sum(a) + tree_sum(b)
        }
    }
}

/// Chunk length used by parallel reductions; fixed so results are reproducible.
pub const REDUCE_CHUNK: usize = 4096;

/// Parallel sum of `f(i)` for `i in 0..len` with a deterministic reduction order.
pub fn par_tree_sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    use rayon::prelude::*;
    let chunks: Vec<f64> = (0..len.div_ceil(REDUCE_CHUNK))
        .into_par_iter()
        .map(|c| {
            let start = c * REDUCE_CHUNK;
            let end = (start + REDUCE_CHUNK).min(len);
            let vals: Vec<f64> = (start..end).map(&f).collect();
            tree_sum(&vals)
        })
        .collect();
    tree_sum(&chunks)
}

/// Parallel fold over `0..len` in chunks of [`REDUCE_CHUNK`], merged in a fixed binary tree.
pub fn par_chunked_fold<A, I, F, M>(len: usize, init: I, fold: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, usize) + Sync,
    M: Fn(A, A) -> A + Sync,
{
    use rayon::prelude::*;
    let parts: Vec<A> = (0..len.div_ceil(REDUCE_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            for i in c * REDUCE_CHUNK..((c + 1) * REDUCE_CHUNK).min(len) {
                fold(&mut acc, i);
            }
            acc
        })
        .collect();
    fn reduce<A, M: Fn(A, A) -> A>(mut parts: Vec<A>, merge: &M) -> Option<A> {
        match parts.len() {
            0 => None,
            1 => parts.pop(),
            len => {
                let right = parts.split_off(len / 2);
                let a = reduce(parts, merge)?;
                let b = reduce(right, merge)?;
                Some(merge(a, b))
            }
        }
    }
    reduce(parts, &merge).unwrap_or_else(init)
}
