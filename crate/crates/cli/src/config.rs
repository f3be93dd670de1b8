//! Run parameters: command-line flags merged over an optional JSON config file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use cliffrac_core::geometry::build_surface_spec;
use cliffrac_core::rbvp::{ShapeSpec, SideChoice};
use cliffrac_core::Error;

use crate::exit::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    /// Fractal family member `S_{α,β}`.
    Family,
    /// Ball of radius `--radius` centred at the origin.
    Ball,
    /// Unit cube `[0,1]^{n+1}`.
    Box,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PolyKind {
    Zero,
    One,
    X0,
    Identity,
}

/// Every flag is optional so that a config file can supply it.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// JSON file with any of these parameters; explicit flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub shape: Option<ShapeKind>,
    /// Algebra dimension; the ambient space is R^{n+1}.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub m_max: Option<u32>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Surface spec file written by `gen-surface`.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Voxel file written by `gen-surface`.
    #[arg(long)]
    pub voxels: Option<PathBuf>,
    /// Finest grid depth; cells have edge 2^-depth.
    #[arg(long)]
    pub depth: Option<u32>,
    /// Coarsest box-counting depth.
    #[arg(long)]
    pub k_min: Option<u32>,
    /// Polymonogenic order.
    #[arg(long)]
    pub k: Option<usize>,
    /// Lipschitz exponent of the jump data.
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub side: Option<String>,
    /// Jet file with the jump data.
    #[arg(long)]
    pub jet: Option<PathBuf>,
    /// Polynomial sampled on the boundary when no jet file is given.
    #[arg(long, value_enum)]
    pub poly: Option<PolyKind>,
    /// Use this Marcinkiewicz exponent in the solvability gate.
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub probes: Option<usize>,
    /// Approach offset of the jump probes, in grid cells.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Largest admissible relative jump error.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Exit with code 4 when a fit's standard error exceeds this.
    #[arg(long)]
    pub max_stderr: Option<f64>,
    /// Add closed-form values for family surfaces.
    #[arg(long)]
    pub theory: bool,
    /// Print a JSON summary on stdout.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($top:expr, $base:expr; $($opt:ident),*; $($flag:ident),*) => {{
        let (top, base) = ($top, $base);
        Params {
            config: top.config,
            $($opt: top.$opt.or(base.$opt),)*
            $($flag: top.$flag || base.$flag,)*
        }
    }};
}

impl Params {
    /// Flags over the config file named by `--config`, if any.
    pub fn resolve(self) -> Result<Params, Failure> {
        let Some(path) = self.config.clone() else { return Ok(self) };
        let text = std::fs::read_to_string(&path).map_err(|e| Failure::io(&path, e))?;
        let base: Params = serde_json::from_str(&text)
            .map_err(|e| Failure::Params(format!("config {}: {e}", path.display())))?;
        Ok(overlay!(self, base;
            shape, n, alpha, beta, m_max, radius, spec, voxels, depth, k_min, k, nu, side, jet, poly, m,
            probes, eps, tolerance, seed, max_stderr, threads, out;
            theory, json))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn side_choice(&self) -> Result<SideChoice, Failure> {
        match &self.side {
            None => Ok(SideChoice::Auto),
            Some(s) => s.parse().map_err(|e: Error| Failure::Params(e.to_string())),
        }
    }

    /// The solid named by `--spec` or by the shape flags.
    pub fn shape_spec(&self) -> Result<ShapeSpec, Failure> {
        if let Some(path) = &self.spec {
            return read_shape_spec(path);
        }
        let kind = self.shape.unwrap_or(if self.alpha.is_some() || self.beta.is_some() {
            ShapeKind::Family
        } else {
            ShapeKind::Ball
        });
        let n = self.n.unwrap_or(1);
        let spec = match kind {
            ShapeKind::Family => {
                let (Some(alpha), Some(beta)) = (self.alpha, self.beta) else {
                    return Err(Failure::Params("family surfaces need --alpha and --beta".into()));
                };
                ShapeSpec::Family(build_surface_spec(n, alpha, beta, self.m_max.unwrap_or(6))?)
            }
            ShapeKind::Ball => ShapeSpec::Ball { n, radius: self.radius.unwrap_or(1.0) },
            ShapeKind::Box => ShapeSpec::Box { lo: vec![0.0; n + 1], hi: vec![1.0; n + 1] },
        };
        spec.build()?;
        Ok(spec)
    }
}

/// A family spec `{n, alpha, beta, m_max}` or a tagged shape such as `{"ball": {"n": 1, "radius": 1}}`.
pub fn read_shape_spec(path: &Path) -> Result<ShapeSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let spec = match serde_json::from_str::<cliffrac_core::geometry::SurfaceSpec>(&text) {
        Ok(s) => ShapeSpec::Family(s.validated()?),
        Err(_) => serde_json::from_str::<ShapeSpec>(&text)
            .map_err(|e| Failure::Io(format!("{}: not a surface spec: {e}", path.display())))?,
    };
    spec.build()?;
    Ok(spec)
}

pub fn write_shape_spec(spec: &ShapeSpec) -> String {
    let text = match spec {
        ShapeSpec::Family(s) => serde_json::to_string_pretty(s),
        other => serde_json::to_string_pretty(other),
    };
    text.expect("shape specs serialise") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_config() {
        let base = Params { n: Some(2), alpha: Some(3.0), theory: true, ..Params::default() };
        let top = Params { n: Some(1), ..Params::default() };
        let merged = overlay!(top, base;
            shape, n, alpha, beta, m_max, radius, spec, voxels, depth, k_min, k, nu, side, jet, poly, m,
            probes, eps, tolerance, seed, max_stderr, threads, out;
            theory, json);
        assert_eq!(merged.n, Some(1));
        assert_eq!(merged.alpha, Some(3.0));
        assert!(merged.theory);
    }

    #[test]
    fn family_needs_both_exponents() {
        let p = Params { shape: Some(ShapeKind::Family), alpha: Some(2.0), ..Params::default() };
        assert!(matches!(p.shape_spec(), Err(Failure::Params(_))));
        let p = Params { alpha: Some(2.0), beta: Some(3.0), ..Params::default() };
        assert!(matches!(p.shape_spec().unwrap(), ShapeSpec::Family(_)));
    }
}
