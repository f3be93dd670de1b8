//! Solution fields of the jump problem.
//!
//! Inner formula: `Φ = f̃ χ⁺ - T^k_{Ω⁺}(D^k f̃)`.
//! Outer formula: `Φ = -f* χ* + T^k_{Ω*}(D^k f*)` with `f* = f̃ ρ` and `Ω* = Ω⁻ ∩ B(0, r)`.
//! Derivatives use `D^i T^k = T^{k-i}`, so `D^i Φ` needs no differencing.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::JumpSetup;
use crate::clifford::Multivector;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::kernels::dirac_fd_power;
use crate::metrics::Side;
use crate::transforms::{DensityField, QuadratureOptions, Teodorescu};
use crate::whitney::{dirac_of_series, WhitneyExtension};

/// Refined-to-centre ratio of `‖D^k f̃‖_1` above which the density is reported non-integrable.
pub const INTEGRABILITY_RATIO: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub cells: usize,
    pub carrier_points: usize,
    pub density_sup: f64,
    /// `‖D^k f̃‖_1` from cell centres.
    pub l1_centre: f64,
    /// Same with sub-cell samples near `S`.
    pub l1_refined: f64,
}

pub struct SolutionField<'s> {
    setup: &'s JumpSetup,
    ext: WhitneyExtension<'s>,
    density: DensityField<'s>,
    opts: QuadratureOptions,
    offset: Option<Multivector<f64>>,
    diagnostics: SolveDiagnostics,
}

/// Builds the extension and the density `D^k f̃` (or `D^k f*`) on the chosen side.
pub fn solve_jump(setup: &JumpSetup) -> Result<SolutionField<'_>> {
    solve_jump_with(setup, QuadratureOptions::default())
}

pub fn solve_jump_with(setup: &JumpSetup, opts: QuadratureOptions) -> Result<SolutionField<'_>> {
    let h = setup.h();
    let ext = WhitneyExtension::for_grid_step(&setup.spec.jet, &setup.domain.grid.bounds, h)?;
    let region = setup.region();
    let mut sol = SolutionField {
        setup,
        ext,
        density: DensityField::zero(region),
        opts,
        offset: None,
        diagnostics: SolveDiagnostics {
            cells: 0,
            carrier_points: setup.spec.jet.len(),
            density_sup: 0.0,
            l1_centre: 0.0,
            l1_refined: 0.0,
        },
    };
    sol.diagnostics.cells = sol.density.cells().len();
    if setup.spec.jet.is_zero() {
        return Ok(sol);
    }
    let k = setup.spec.k;
    let failure = std::sync::Mutex::new(None);
    let f = |x: &Point| match sol.density_value(k, x) {
        Ok(v) => v,
        Err(e) => {
            failure.lock().unwrap().get_or_insert(e);
            Multivector::zero(x.n())
        }
    };
    let mut density = DensityField::cached(region, f)?;
    if opts.refine_near_boundary {
        density = density.with_boundary_refinement_from(&f)?;
    }
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    sol.diagnostics.density_sup = density.sup_norm();
    let (c, r) = l1_norms(&density);
    sol.diagnostics.l1_centre = c;
    sol.diagnostics.l1_refined = r;
    if r > INTEGRABILITY_RATIO * c && r > 1e-300 {
        return Err(Error::Integrability(format!(
            "‖D^k f‖_1 grows from {c:.4e} to {r:.4e} under sub-cell refinement"
        )));
    }
    sol.density = density;
    Ok(sol)
}

fn l1_norms(d: &DensityField<'_>) -> (f64, f64) {
    let vol = d.domain().grid.cell_volume();
    let w = d.width;
    let subs = 1usize << d.domain().grid.dim();
    let norm = |s: &[f64]| s.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (mut centre, mut refined) = (0.0, 0.0);
    for i in 0..d.cells().len() {
        let c = norm(&d.values[i * w..(i + 1) * w]);
        centre += c * vol;
        match d.sub_slot.get(i) {
            Some(&s) if s != u32::MAX => {
                let s = s as usize;
                let total: f64 = (0..subs).map(|q| norm(&d.sub_values[(s + q) * w..(s + q + 1) * w])).sum();
                refined += total * vol / subs as f64;
            }
            _ => refined += c * vol,
        }
    }
    (centre, refined)
}

impl<'s> SolutionField<'s> {
    pub fn setup(&self) -> &'s JumpSetup {
        self.setup
    }

    pub fn side(&self) -> Side {
        self.setup.side()
    }

    pub fn extension(&self) -> &WhitneyExtension<'s> {
        &self.ext
    }

    pub fn density(&self) -> &DensityField<'s> {
        &self.density
    }

    pub fn diagnostics(&self) -> &SolveDiagnostics {
        &self.diagnostics
    }

    pub fn quadrature(&self) -> QuadratureOptions {
        self.opts
    }

    /// Adds `c` to `Φ` inside the solid; used to check that verification catches faults.
    pub fn perturb_inside(&mut self, c: Multivector<f64>) {
        self.offset = Some(c);
    }

    fn n(&self) -> usize {
        self.setup.spec.jet.n()
    }

    /// Membership in the side carrying the indicator: `Ω⁺`, or `Ω*` for the outer formula.
    pub fn indicator(&self, x: &Point) -> bool {
        let inside = self.setup.shape.contains(x);
        match (self.side(), self.setup.cutoff) {
            (Side::Inner, _) => inside,
            (Side::Outer, Some(c)) => !inside && x.norm() < c.r,
            (Side::Outer, None) => !inside,
        }
    }

    /// `D^i f̃(x)` for the inner formula, `D^i (f̃ ρ)(x)` for the outer one.
    pub fn smooth_term(&self, i: usize, x: &Point) -> Result<Multivector<f64>> {
        match self.setup.cutoff {
            Some(c) if self.side() == Side::Outer => {
                let rho = c.value(x.components());
                if rho == 0.0 {
                    return Ok(Multivector::zero(self.n()));
                }
                if rho == 1.0 && x.norm() <= c.r1 {
                    return self.ext.dirac_power(i, x);
                }
                let (space, mut series) = self.ext.expansion(x, i)?;
                let r = c.series(space, x.components());
                for s in series.iter_mut() {
                    *s = space.mul(s, &r);
                }
                Ok(dirac_of_series(self.n(), i, space, &series))
            }
            _ => self.ext.dirac_power(i, x),
        }
    }

    /// `D^k` of the smooth term, moved off the carrier when `x` lands on a sample.
    fn density_value(&self, k: usize, x: &Point) -> Result<Multivector<f64>> {
        let h = self.setup.h();
        let (_, d) = self.ext.nearest(x);
        if d < 1e-9 * h {
            let mut y = *x;
            for a in 0..y.dim() {
                y[a] += 1e-3 * h;
            }
            return self.smooth_term(k, &y);
        }
        self.smooth_term(k, x)
    }

    fn sign(&self) -> f64 {
        match self.side() {
            Side::Inner => 1.0,
            Side::Outer => -1.0,
        }
    }

    /// `T^{k-i}` of the density, the volume part of `D^i Φ` up to sign.
    pub fn volume_term(&self, i: usize, x: &Point) -> Result<Multivector<f64>> {
        let k = self.setup.spec.k;
        if self.density.is_zero() {
            return Ok(Multivector::zero(self.n()));
        }
        Teodorescu::new(&self.density, k - i, self.opts)?.eval(x)
    }

    /// `D^i Φ(x)` for `0 <= i <= k - 1`, `x ∉ S`.
    pub fn dirac_power(&self, i: usize, x: &Point) -> Result<Multivector<f64>> {
        let k = self.setup.spec.k;
        if i >= k {
            return Err(Error::OutOfRange { index: i as i64, range: format!("0..{k}") });
        }
        if x.n() != self.n() {
            return Err(Error::DimensionMismatch { left: self.n(), right: x.n() });
        }
        let s = self.sign();
        let mut out = self.volume_term(i, x)?.scale(-s);
        if self.indicator(x) {
            self.smooth_term(i, x)?.add_scaled_into(s, &mut out);
        }
        if let (0, Some(c)) = (i, &self.offset) {
            if self.setup.shape.contains(x) {
                out += c;
            }
        }
        Ok(out)
    }

    /// `Φ(x)`.
    pub fn eval(&self, x: &Point) -> Result<Multivector<f64>> {
        self.dirac_power(0, x)
    }

    pub fn eval_many(&self, xs: &[Point]) -> Result<Vec<Multivector<f64>>> {
        xs.par_iter().map(|x| self.eval(x)).collect()
    }

    /// Finite-difference `D^times Φ` at `x` with step `h/8` and one quadrature plan.
    pub fn dirac_fd_power(&self, x: &Point, times: usize) -> Result<Multivector<f64>> {
        let k = self.setup.spec.k;
        let step = self.setup.h() / 8.0;
        let s = self.sign();
        let chi = self.indicator(x);
        let t = Teodorescu::new(&self.density, k, self.opts)?;
        let plan = t.plan(x)?;
        let zero = self.density.is_zero();
        let phi = |y: &Point| -> Result<Multivector<f64>> {
            let mut out =
                if zero { Multivector::zero(self.n()) } else { t.eval_planned(&plan, y)?.scale(-s) };
            if chi {
                self.smooth_term(0, y)?.add_scaled_into(s, &mut out);
            }
            Ok(out)
        };
        dirac_fd_power(&phi, x, step, times)
    }
}
