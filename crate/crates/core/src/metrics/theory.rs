//! Closed-form values for the family and the dimension/exponent inequality.

use serde::{Deserialize, Serialize};

use crate::geometry::SurfaceSpec;
use crate::scalar::Field;

/// `(dim, m_lower)` with `dim = (n+1)β/(β+1)` and `m_lower = 1 - (β-n)/(α(β+1))`.
pub fn theoretical_values_exact<F: Field>(n: usize, alpha: F, beta: F) -> (F, F) {
    let one = F::one();
    let nf = F::from_usize(n).expect("n representable");
    let dim = (nf + one) * beta / (beta + one);
    let m_lower = one - (beta - nf) / (alpha * (beta + one));
    (dim, m_lower)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryValues {
    pub dim: f64,
    pub m_lower: f64,
}

pub fn theoretical_values(spec: &SurfaceSpec) -> TheoryValues {
    let (dim, m_lower) = theoretical_values_exact(spec.n, spec.alpha, spec.beta);
    TheoryValues { dim, m_lower }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Strict,
    Equality,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub n: usize,
    pub dim: f64,
    pub m: f64,
    /// `(n + 1) - dim`.
    pub bound: f64,
    /// `m - bound`.
    pub margin: f64,
    pub verdict: Verdict,
}

/// Tolerance separating equality from a strict margin.
pub const EQUALITY_TOL: f64 = 1e-9;

/// Compares `m` against `(n + 1) - dim`.
pub fn inequality_report(dim: f64, m: f64, n: usize) -> InequalityReport {
    inequality_report_tol(dim, m, n, EQUALITY_TOL)
}

pub fn inequality_report_tol(dim: f64, m: f64, n: usize, tol: f64) -> InequalityReport {
    let bound = (n + 1) as f64 - dim;
    let margin = m - bound;
    let verdict = if margin.abs() <= tol {
        Verdict::Equality
    } else if margin > 0.0 {
        Verdict::Strict
    } else {
        Verdict::Violated
    };
    InequalityReport { n, dim, m, bound, margin, verdict }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_surface_spec;
    use num_rational::Ratio;

    #[test]
    fn closed_forms() {
        let t = theoretical_values(&build_surface_spec(1, 2.0, 3.0, 1).unwrap());
        assert_eq!((t.dim, t.m_lower), (1.5, 0.75));
        let t = theoretical_values(&build_surface_spec(2, 3.0, 6.0, 1).unwrap());
        assert!((t.dim - 18.0 / 7.0).abs() < 1e-15);
        assert!((t.m_lower - (1.0 - 4.0 / 21.0)).abs() < 1e-15);
        let t = theoretical_values(&build_surface_spec(1, 1.0, 1.0, 1).unwrap());
        assert_eq!((t.dim, t.m_lower), (1.0, 1.0));
    }

    #[test]
    fn alpha_one_identity_is_exact() {
        for n in 1..=4usize {
            for b in 0..20i64 {
                let beta = Ratio::new(n as i64 * 4 + b, 4);
                let (dim, m) = theoretical_values_exact(n, Ratio::from_integer(1), beta);
                assert_eq!(dim + m, Ratio::from_integer(n as i64 + 1));
            }
        }
    }

    #[test]
    fn inequality_examples() {
        let r = inequality_report(1.5, 0.75, 1);
        assert_eq!(r.verdict, Verdict::Strict);
        assert!((r.margin - 0.25).abs() < 1e-15);
        assert_eq!(inequality_report(1.0, 1.0, 1).verdict, Verdict::Equality);
        let (dim, m) = theoretical_values_exact(2, 1.0, 3.0);
        let r = inequality_report(dim, m, 2);
        assert_eq!((r.dim, r.m, r.verdict), (2.25, 0.75, Verdict::Equality));
    }
}
