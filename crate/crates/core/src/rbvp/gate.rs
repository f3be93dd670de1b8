//! Solvability gate, uniqueness band, threshold comparison and the radial cutoff.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SurfaceSpec;
use crate::metrics::theoretical_values_exact;
use crate::scalar::Field;
use crate::taylor::{Tps, TpsSpace};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate<F> {
    pub admitted: bool,
    /// `1 - m/(n+1)`.
    pub threshold: F,
    /// `ν - threshold`.
    pub margin: F,
    /// `k < n + 1`.
    pub order_ok: bool,
}

/// `ν > 1 - m/(n+1)` and `k < n + 1`.
pub fn solvability_check<F: Field>(nu: F, k: usize, m_est: F, n: usize) -> Gate<F> {
    let n1 = F::from_usize(n + 1).expect("n representable");
    let threshold = F::one() - m_est / n1;
    let margin = nu - threshold;
    let order_ok = k < n + 1;
    Gate { admitted: margin > F::zero() && order_ok, threshold, margin, order_ok }
}

/// `(dim - n, 1 - (n+1)(1-ν)/m)`, or `None` when the band is empty.
pub fn uniqueness_band<F: Field>(nu: F, m_est: F, n: usize, dim_upper: F) -> Result<Option<(F, F)>> {
    if !(m_est > F::zero()) {
        return Err(Error::InvalidParameter(format!("m = {m_est:?} must be positive")));
    }
    let nf = F::from_usize(n).expect("n representable");
    if dim_upper < nf || dim_upper > nf + F::one() {
        return Err(Error::InvalidParameter(format!("dimension {dim_upper:?} outside [{n}, {}]", n + 1)));
    }
    let lo = dim_upper - nf;
    let hi = F::one() - (nf + F::one()) * (F::one() - nu) / m_est;
    Ok(if lo < hi { Some((lo, hi)) } else { None })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionComparison<F> {
    pub n: usize,
    pub dim: F,
    pub m: F,
    /// `1 - m/(n+1)`.
    pub marcinkiewicz_threshold: F,
    /// `dim/(n+1)`, the threshold after substituting `m >= (n+1) - dim`.
    pub dimension_threshold: F,
    /// `ν` admitted by the first threshold only: `(marcinkiewicz, dimension]`.
    pub window: Option<(F, F)>,
}

pub fn condition_comparison_exact<F: Field>(n: usize, alpha: F, beta: F) -> ConditionComparison<F> {
    let (dim, m) = theoretical_values_exact(n, alpha, beta);
    let n1 = F::from_usize(n + 1).expect("n representable");
    let marcinkiewicz_threshold = F::one() - m / n1;
    let dimension_threshold = dim / n1;
    let window = if marcinkiewicz_threshold < dimension_threshold {
        Some((marcinkiewicz_threshold, dimension_threshold))
    } else {
        None
    };
    ConditionComparison { n, dim, m, marcinkiewicz_threshold, dimension_threshold, window }
}

pub fn condition_comparison(spec: &SurfaceSpec) -> ConditionComparison<f64> {
    condition_comparison_exact(spec.n, spec.alpha, spec.beta)
}

/// Radial cutoff equal to 1 on `|x| <= r1` and 0 on `|x| >= r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub r1: f64,
    pub r: f64,
}

fn g(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// `g(s) / (g(s) + g(1 - s))` with `g(t) = exp(-1/t)`: smooth, 0 below 0, 1 above 1, 1/2 at 1/2.
pub fn smooth_step(s: f64) -> f64 {
    let (a, b) = (g(s), g(1.0 - s));
    a / (a + b)
}

impl Cutoff {
    pub fn new(r1: f64, r: f64) -> Result<Self> {
        if !(r1 > 0.0 && r1 < r) {
            return Err(Error::InvalidParameter(format!("cutoff radii need 0 < r1 < r, got {r1}, {r}")));
        }
        Ok(Self { r1, r })
    }

    /// `r1 = 1.25 R`, `r = 2 r1` for circumradius `R`.
    pub fn around(circumradius: f64) -> Result<Self> {
        let r1 = 1.25 * circumradius;
        Self::new(r1, 2.0 * r1)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        1.0 - smooth_step((norm - self.r1) / (self.r - self.r1))
    }

    /// `ρ(x + δ)` as a truncated series in `δ`.
    pub fn series(&self, space: &TpsSpace, x: &[f64]) -> Tps<f64> {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let s0 = (norm - self.r1) / (self.r - self.r1);
        if s0 <= 0.0 || s0 >= 1.0 {
            return space.constant(self.value(x));
        }
        let mut r2 = space.zero();
        for (a, &xa) in x.iter().enumerate() {
            let v = space.variable(a, xa);
            r2.add_scaled(&space.mul(&v, &v), 1.0);
        }
        let s = space.sqrt(&r2).add_const(-self.r1).scale(1.0 / (self.r - self.r1));
        let gs = space.exp(&space.recip(&s).scale(-1.0));
        let one_minus = s.scale(-1.0).add_const(1.0);
        let gt = space.exp(&space.recip(&one_minus).scale(-1.0));
        let step = space.mul(&gs, &space.recip(&(&gs + &gt)));
        step.scale(-1.0).add_const(1.0)
    }
}

/// `ρ(x)` for the cutoff with radii `r1 < r`.
pub fn cutoff_rho(r1: f64, r: f64, x: &[f64]) -> Result<f64> {
    Ok(Cutoff::new(r1, r)?.value(x))
}
