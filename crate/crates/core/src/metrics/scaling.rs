//! Scaling curves and log-log least-squares fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// `N_k` against `2^{-k}`.
    BoxCounts,
    /// `V(t)` against `t`.
    Volume,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingCurve {
    pub kind: CurveKind,
    /// `(scale, value)` with strictly decreasing scales.
    pub samples: Vec<(f64, f64)>,
}

impl ScalingCurve {
    /// Counts `N_k` for consecutive depths starting at `k_min`.
    pub fn from_box_counts(k_min: u32, counts: &[u64]) -> Self {
        let samples = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| ((-((k_min as usize + i) as f64)).exp2(), c as f64))
            .collect();
        Self { kind: CurveKind::BoxCounts, samples }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.windows(2).any(|w| !(w[1].0 < w[0].0)) {
            return Err(Error::InvalidParameter("scales must be strictly decreasing".into()));
        }
        if self.samples.iter().any(|s| !(s.1 > 0.0) || !(s.0 > 0.0)) {
            return Err(Error::InsufficientData("scaling curve has a non-positive value".into()));
        }
        Ok(())
    }

    /// Depth `k` of a box-count sample, `-log2(scale)`.
    pub fn depth(scale: f64) -> u32 {
        (-scale.log2()).round() as u32
    }

    /// CSV with header `k,N_k` (box counts) or `t,V_t` (volumes).
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        match self.kind {
            CurveKind::BoxCounts => {
                writeln!(w, "k,N_k")?;
                for &(s, v) in &self.samples {
                    writeln!(w, "{},{}", Self::depth(s), v as u64)?;
                }
            }
            CurveKind::Volume => {
                writeln!(w, "t,V_t")?;
                for &(s, v) in &self.samples {
                    writeln!(w, "{s:e},{v:e}")?;
                }
            }
        }
        Ok(())
    }

    pub fn tail(&self, len: usize) -> Self {
        let start = self.samples.len().saturating_sub(len);
        Self { kind: self.kind, samples: self.samples[start..].to_vec() }
    }
}

/// Ordinary least squares `y = slope x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return Err(Error::InsufficientData(format!("least squares needs >= 2 points, got {n}")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("least squares needs distinct abscissae".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit { slope, intercept, slope_stderr })
}

/// Log-log slope of a curve: `log V` against `log t`, or `log2 N_k` against `k`.
pub fn loglog_fit(curve: &ScalingCurve) -> Result<LinearFit> {
    curve.validate()?;
    let xs: Vec<f64> = curve.samples.iter().map(|s| -s.0.log2()).collect();
    let ys: Vec<f64> = curve.samples.iter().map(|s| s.1.log2()).collect();
    let fit = ols(&xs, &ys)?;
    Ok(match curve.kind {
        CurveKind::BoxCounts => fit,
        CurveKind::Volume => LinearFit { slope: -fit.slope, ..fit },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub value: f64,
    pub slope_stderr: f64,
    pub k_range: (u32, u32),
    /// Largest slope over the suffixes of length >= 4, a stand-in for the limsup.
    pub max_suffix_slope: f64,
}

impl DimensionEstimate {
    /// Plausible for a hypersurface in R^{n+1}.
    pub fn in_hypersurface_range(&self, n: usize) -> bool {
        let n = n as f64;
        self.value >= n - 0.05 && self.value <= n + 1.05
    }
}

/// Minimum number of samples for a dimension fit.
pub const MIN_FIT_SAMPLES: usize = 4;

/// Least-squares slope of `log N_k` against `k log 2` over every sample of the curve.
pub fn minkowski_dimension(curve: &ScalingCurve) -> Result<DimensionEstimate> {
    if curve.kind != CurveKind::BoxCounts {
        return Err(Error::InvalidParameter("dimension fit needs a box-count curve".into()));
    }
    if curve.samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "dimension fit needs >= {MIN_FIT_SAMPLES} samples, got {}",
            curve.samples.len()
        )));
    }
    let fit = loglog_fit(curve)?;
    let mut max_suffix_slope = f64::NEG_INFINITY;
    for start in 0..=curve.samples.len() - MIN_FIT_SAMPLES {
        let sub = ScalingCurve { kind: curve.kind, samples: curve.samples[start..].to_vec() };
        max_suffix_slope = max_suffix_slope.max(loglog_fit(&sub)?.slope);
    }
    let first = curve.samples.first().unwrap().0;
    let last = curve.samples.last().unwrap().0;
    Ok(DimensionEstimate {
        value: fit.slope,
        slope_stderr: fit.slope_stderr,
        k_range: (ScalingCurve::depth(first), ScalingCurve::depth(last)),
        max_suffix_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut out = Vec::new();
        ScalingCurve::from_box_counts(3, &[8, 16]).write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "k,N_k\n3,8\n4,16\n");
        let v = ScalingCurve { kind: CurveKind::Volume, samples: vec![(0.5, 0.25)] };
        let mut out = Vec::new();
        v.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "t,V_t\n5e-1,2.5e-1\n");
    }

    #[test]
    fn exact_power_laws() {
        let c: Vec<u64> = (1..=8).map(|k| 1u64 << k).collect();
        let d = minkowski_dimension(&ScalingCurve::from_box_counts(1, &c)).unwrap();
        assert_eq!(d.value, 1.0);
        assert_eq!(d.slope_stderr, 0.0);
        assert_eq!(d.k_range, (1, 8));
        let c: Vec<u64> = (1..=8).map(|k| 1u64 << (2 * k)).collect();
        assert_eq!(minkowski_dimension(&ScalingCurve::from_box_counts(1, &c)).unwrap().value, 2.0);
    }

    #[test]
    fn rejects_short_or_zero_curves() {
        assert!(minkowski_dimension(&ScalingCurve::from_box_counts(1, &[2, 4, 8])).is_err());
        assert!(minkowski_dimension(&ScalingCurve::from_box_counts(1, &[2, 0, 8, 16])).is_err());
    }

    #[test]
    fn volume_slope_sign() {
        let curve = ScalingCurve {
            kind: CurveKind::Volume,
            samples: (1..6).map(|j| ((-(j as f64)).exp2(), 3.0 * (-(j as f64)).exp2().powf(0.8))).collect(),
        };
        assert!((loglog_fit(&curve).unwrap().slope - 0.8).abs() < 1e-12);
    }
}
