//! Problem description, side selection and the discretised setup shared by the solver.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::gate::{solvability_check, Cutoff, Gate};
use crate::error::{Error, Result};
use crate::geometry::{voxelize, Ball, FractalSurface, Point, Rect, Shape, SolidBox, SurfaceSpec, VoxelDomain};
use crate::metrics::{
    default_outer_radius, marcinkiewicz_exponent, theoretical_values, ExponentEstimate, Side, SideRegion,
};
use crate::whitney::{estimate_lip_constant, LipschitzJet};

/// Solid whose boundary carries the jump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeSpec {
    Family(SurfaceSpec),
    Ball { n: usize, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl ShapeSpec {
    pub fn n(&self) -> usize {
        match self {
            ShapeSpec::Family(s) => s.n,
            ShapeSpec::Ball { n, .. } => *n,
            ShapeSpec::Box { lo, .. } => lo.len().saturating_sub(1),
        }
    }

    pub fn build(&self) -> Result<Box<dyn Shape>> {
        Ok(match self {
            ShapeSpec::Family(s) => Box::new(FractalSurface::new(*s)?),
            ShapeSpec::Ball { n, radius } => Box::new(Ball::new(*n, *radius)?),
            ShapeSpec::Box { lo, hi } => Box::new(SolidBox::new(Rect::from_slices(lo, hi)?)?),
        })
    }

    pub fn family(&self) -> Option<&SurfaceSpec> {
        match self {
            ShapeSpec::Family(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideChoice {
    #[default]
    Auto,
    Inner,
    Outer,
}

impl std::str::FromStr for SideChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SideChoice::Auto),
            "inner" => Ok(SideChoice::Inner),
            "outer" => Ok(SideChoice::Outer),
            _ => Err(Error::InvalidParameter(format!("side must be auto, inner or outer, got {s:?}"))),
        }
    }
}

/// Jump data `f` of order `k - 1` and Lipschitz exponent `ν` on the boundary of `shape`.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub shape: ShapeSpec,
    pub jet: LipschitzJet,
    pub k: usize,
    pub nu: f64,
    pub side: SideChoice,
}

impl ProblemSpec {
    pub fn new(shape: ShapeSpec, jet: LipschitzJet, k: usize, nu: f64, side: SideChoice) -> Result<Self> {
        let spec = Self { shape, jet, k, nu, side };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(Error::InvalidParameter(format!("nu = {} must lie in (0, 1]", self.nu)));
        }
        if self.k < 1 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        if self.jet.k() != self.k {
            return Err(Error::InvalidParameter(format!(
                "jet has order {} but the problem needs order {}",
                self.jet.order(),
                self.k - 1
            )));
        }
        if self.jet.n() != self.shape.n() {
            return Err(Error::DimensionMismatch { left: self.shape.n(), right: self.jet.n() });
        }
        Ok(())
    }
}

/// Nearest boundary points of the boundary cells of `domain`, first occurrence kept.
pub fn boundary_samples(shape: &dyn Shape, domain: &VoxelDomain) -> Vec<Point> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for lin in 0..domain.len() {
        if !domain.label(lin).is_boundary() {
            continue;
        }
        let (_, p) = shape.nearest_boundary(&domain.center(lin));
        let key: Vec<u64> = p.components().iter().map(|v| v.to_bits()).collect();
        if seen.insert(key) {
            out.push(p);
        }
    }
    out
}

/// Sides whose exponents differ by at most this much count as tied; ties go to the inner side.
pub const SIDE_TIE: f64 = 0.05;

/// Largest grid used to measure exponents of shapes without closed forms.
const MEASURE_CELLS: u128 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideSelection {
    pub side: Side,
    /// `m(S)` used by the gate.
    pub m: f64,
    pub m_inner: Option<f64>,
    pub m_outer: Option<f64>,
    /// `theory`, `measured` or `override`.
    pub source: String,
}

/// Inner and outer volume-slope exponents measured on the default bounds.
pub fn measure_exponents(shape: &dyn Shape, depth: u32) -> Result<(ExponentEstimate, ExponentEstimate)> {
    let bounds = shape.default_bounds();
    let mut k = depth;
    while k > 4 && crate::geometry::Grid::new(&bounds, k).cell_count() > MEASURE_CELLS {
        k -= 1;
    }
    let dom = voxelize(shape, k, &bounds)?;
    let inner = marcinkiewicz_exponent(&SideRegion::inner(&dom))?;
    let outer = marcinkiewicz_exponent(&SideRegion::outer(&dom, default_outer_radius(shape)))?;
    Ok((inner, outer))
}

/// Picks the formula: the side attaining `max(m⁺, m⁻)`, or the forced side.
pub fn select_side(spec: &ProblemSpec, shape: &dyn Shape, depth: u32, m_override: Option<f64>) -> Result<SideSelection> {
    let (m_inner, m_outer, source) = if m_override.is_some() {
        (None, None, "override")
    } else if let Some(s) = spec.shape.family() {
        let t = theoretical_values(s);
        // outer exponent of the family: (n+1) - dim
        (Some(t.m_lower), Some((s.n + 1) as f64 - t.dim), "theory")
    } else {
        let (i, o) = measure_exponents(shape, depth)?;
        (Some(i.value), Some(o.value), "measured")
    };
    let auto_side = match (m_inner, m_outer) {
        (Some(i), Some(o)) if o > i + SIDE_TIE => Side::Outer,
        _ => Side::Inner,
    };
    let side = match spec.side {
        SideChoice::Auto => auto_side,
        SideChoice::Inner => Side::Inner,
        SideChoice::Outer => Side::Outer,
    };
    let m = match (m_override, m_inner, m_outer) {
        (Some(m), _, _) => m,
        (None, Some(i), Some(o)) => i.max(o),
        _ => unreachable!("exponents are set when no override is given"),
    };
    Ok(SideSelection { side, m, m_inner, m_outer, source: source.into() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetupOptions {
    /// Use this `m(S)` instead of theory or measurement.
    pub m_override: Option<f64>,
    /// Skip the solvability gate (diagnostic runs only).
    pub force: bool,
}

impl Default for SetupOptions {
    fn default() -> Self {
        Self { m_override: None, force: false }
    }
}

/// Everything the solution formulas need apart from the extension: the solid, the
/// chosen side, the gate verdict, the cutoff and the voxel domain.
pub struct JumpSetup {
    pub spec: ProblemSpec,
    pub shape: Box<dyn Shape>,
    pub depth: u32,
    pub selection: SideSelection,
    pub gate: Gate<f64>,
    /// Present for the outer formula.
    pub cutoff: Option<Cutoff>,
    pub domain: VoxelDomain,
}

impl JumpSetup {
    pub fn new(spec: ProblemSpec, depth: u32, opts: SetupOptions) -> Result<Self> {
        spec.validate()?;
        let shape = spec.shape.build()?;
        let n = shape.n();
        let selection = select_side(&spec, shape.as_ref(), depth, opts.m_override)?;
        if !(selection.m > 0.0 && selection.m <= (n + 1) as f64) {
            return Err(Error::InvalidParameter(format!("m = {} outside (0, n+1]", selection.m)));
        }
        let gate = solvability_check(spec.nu, spec.k, selection.m, n);
        if !gate.admitted && !opts.force {
            if !gate.order_ok {
                return Err(Error::InvalidParameter(format!("k = {} must be < n + 1 = {}", spec.k, n + 1)));
            }
            return Err(Error::GateRejected { margin: gate.margin });
        }
        if spec.jet.len() > 1 {
            let lip = estimate_lip_constant(&spec.jet)?;
            if !lip.m.is_finite() {
                return Err(Error::InvalidParameter("jet Lipschitz constant is not finite".into()));
            }
        }
        let bbox = shape.bounding_box();
        let (cutoff, bounds) = match selection.side {
            Side::Inner => (None, bbox.expanded(1.25)),
            Side::Outer => {
                let c = Cutoff::around(shape.circumradius())?;
                (Some(c), Rect::centered_cube(n, c.r * 1.02))
            }
        };
        let domain = voxelize(shape.as_ref(), depth, &bounds)?;
        Ok(Self { spec, shape, depth, selection, gate, cutoff, domain })
    }

    pub fn side(&self) -> Side {
        self.selection.side
    }

    pub fn h(&self) -> f64 {
        self.domain.grid.h
    }

    pub fn region(&self) -> SideRegion<'_> {
        match (self.selection.side, self.cutoff) {
            (Side::Outer, Some(c)) => SideRegion::outer(&self.domain, c.r),
            _ => SideRegion::inner(&self.domain),
        }
    }
}
