//! The subcommands.

use std::fs;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use cliffrac_core::geometry::{voxelize, Point, Shape, VoxelDomain};
use cliffrac_core::metrics::{
    absolute_exponent, box_counts, box_counts_from_voxels, default_outer_radius, family_inner_exponent,
    inequality_report, levels_for_octaves, loglog_fit, marcinkiewicz_exponent, minkowski_dimension,
    theoretical_values, volume_curve, BoundaryOf, ExponentEstimate, InequalityReport, ScalingCurve, SideRegion,
    TheoryValues,
};
use cliffrac_core::rbvp::{
    boundary_samples, solve_jump, verify_jump, JumpReport, JumpSetup, ProbeSelection, ProblemSpec, SetupOptions,
    ShapeSpec, SolutionField, VerifyOptions,
};
use cliffrac_core::transforms::unit_directions;
use cliffrac_core::whitney::{LipschitzJet, MultiIndex, Polynomial};
use cliffrac_core::Multivector64;

use crate::config::{write_shape_spec, Params, PolyKind};
use crate::exit::Failure;
use crate::plot::loglog_svg;

pub const SPEC_FILE: &str = "surface.json";
pub const VOXEL_FILE: &str = "voxels.bin";
pub const ESTIMATE_FILE: &str = "estimate.json";
pub const JUMP_FILE: &str = "report.json";
pub const SOLUTION_FILE: &str = "solution.json";
pub const JET_FILE: &str = "jet.json";
pub const CONFIG_FILE: &str = "config.json";
pub const SUMMARY_FILE: &str = "report.md";

/// Files are staged in memory and written together once the command has finished.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn add(&mut self, name: &str, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), bytes.into()));
    }

    fn add_json<T: Serialize>(&mut self, name: &str, value: &T) {
        let mut text = serde_json::to_string_pretty(value).expect("outputs serialise");
        text.push('\n');
        self.add(name, text);
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<String>, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
        let mut names = Vec::new();
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|e| Failure::io(&path, e))?;
            names.push(name.clone());
        }
        Ok(names)
    }
}

/// What a command hands back to `main`: files, a summary and a deferred failure.
pub struct Outcome {
    pub outputs: Outputs,
    pub summary: Value,
    pub text: String,
    /// Reported after the outputs are written.
    pub failure: Option<Failure>,
}

fn config_record(command: &str, p: &Params) -> Value {
    let mut v = serde_json::to_value(p).expect("params serialise");
    let obj = v.as_object_mut().expect("params are an object");
    // presentation flags do not change results
    obj.remove("json");
    obj.remove("threads");
    obj.remove("out");
    obj.insert("command".into(), json!(command));
    v
}

pub fn gen_surface(p: &Params) -> Result<Outcome, Failure> {
    let spec = p.shape_spec()?;
    let depth = p.depth.unwrap_or(8);
    let shape = spec.build()?;
    let dom = voxelize(shape.as_ref(), depth, &shape.default_bounds())?;
    let mut voxels = Vec::new();
    dom.write_to(&mut voxels)?;

    let mut outputs = Outputs::default();
    outputs.add(SPEC_FILE, write_shape_spec(&spec));
    outputs.add(VOXEL_FILE, voxels);
    outputs.add_json(CONFIG_FILE, &config_record("gen-surface", p));
    let counts = dom.label_counts();
    let summary = json!({
        "shape": spec,
        "depth": depth,
        "cells": dom.len(),
        "label_counts": {
            "exterior": counts[0],
            "interior": counts[1],
            "boundary_out": counts[2],
            "boundary_in": counts[3],
        },
    });
    let text = format!(
        "{} at depth {depth}: {} cells (exterior {}, interior {}, boundary {} out / {} in)",
        shape.describe(),
        dom.len(),
        counts[0],
        counts[1],
        counts[2],
        counts[3]
    );
    Ok(Outcome { outputs, summary, text, failure: None })
}

/// Entry of the estimate report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimateEntry {
    pub value: f64,
    pub stderr: f64,
    pub method: String,
    /// Depths of a box-count fit, or `(t_min, t_max)` of a volume fit.
    pub k_range: (f64, f64),
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl From<&ExponentEstimate> for EstimateEntry {
    fn from(e: &ExponentEstimate) -> Self {
        let method = serde_json::to_value(e.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        Self { value: e.value, stderr: e.stderr, method, k_range: e.window, notes: e.notes.clone() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimateReport {
    pub n: usize,
    pub depth: u32,
    pub dimension: EstimateEntry,
    pub exponent_inner: EstimateEntry,
    pub exponent_outer: EstimateEntry,
    pub exponent: EstimateEntry,
    pub inequality: InequalityReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theory: Option<TheoryValues>,
    /// Inner exponent from the exact family volume, over many more octaves than the grid resolves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent_inner_exact: Option<EstimateEntry>,
}

struct EstimateInput {
    spec: Option<ShapeSpec>,
    shape: Option<Box<dyn Shape>>,
    domain: VoxelDomain,
}

fn read_voxels(path: &Path) -> Result<VoxelDomain, Failure> {
    let f = fs::File::open(path).map_err(|e| Failure::io(path, e))?;
    VoxelDomain::read_from(BufReader::new(f)).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn estimate_input(p: &Params) -> Result<EstimateInput, Failure> {
    let spec = match (&p.voxels, &p.spec) {
        (Some(_), None) => None,
        _ => Some(p.shape_spec()?),
    };
    let shape = spec.as_ref().map(|s| s.build()).transpose()?;
    let domain = match (&p.voxels, &shape) {
        (Some(path), _) => read_voxels(path)?,
        (None, Some(s)) => voxelize(s.as_ref(), p.depth.unwrap_or(10), &s.default_bounds())?,
        (None, None) => unreachable!("a shape exists without a voxel file"),
    };
    if let Some(s) = &spec {
        if s.n() != domain.n() {
            return Err(Failure::Params(format!("spec has n = {} but the voxels have n = {}", s.n(), domain.n())));
        }
    }
    Ok(EstimateInput { spec, shape, domain })
}

fn curve_points(curve: &ScalingCurve, box_counts: bool) -> Vec<(f64, f64)> {
    curve
        .samples
        .iter()
        .map(|&(s, v)| if box_counts { (-s.log2(), v.log2()) } else { (s.log2(), v.log2()) })
        .collect()
}

pub fn estimate(p: &Params) -> Result<Outcome, Failure> {
    let input = estimate_input(p)?;
    let dom = &input.domain;
    let n = dom.n();
    let depth = dom.grid.k;
    let k_min = p.k_min.unwrap_or(depth.saturating_sub(6).max(1));
    if k_min + 3 > depth {
        return Err(Failure::Params(format!("need at least 4 depths, got {k_min}..={depth}")));
    }
    let counts = match &input.shape {
        Some(s) => box_counts(&BoundaryOf(s.as_ref()), &dom.grid.bounds, k_min, depth)?,
        None => box_counts_from_voxels(dom, k_min)?,
    };
    let count_curve = ScalingCurve::from_box_counts(k_min, &counts);
    let dim = minkowski_dimension(&count_curve)?;
    let dim_fit = loglog_fit(&count_curve)?;

    let r_star = match &input.shape {
        Some(s) => default_outer_radius(s.as_ref()),
        None => 2.0 * boundary_diameter(dom),
    };
    let inner_region = SideRegion::inner(dom);
    let outer_region = SideRegion::outer(dom, r_star);
    let inner = marcinkiewicz_exponent(&inner_region)?;
    let outer = marcinkiewicz_exponent(&outer_region)?;
    let absolute = absolute_exponent(&inner, &outer);
    let inequality = inequality_report(dim.value, absolute.value, n);

    let family = input.spec.as_ref().and_then(|s| s.family().copied());
    let (theory, exact) = match family {
        Some(s) if p.theory => {
            let levels = levels_for_octaves(s.alpha, s.beta, 30);
            let exact = cliffrac_core::geometry::FractalSurface::new(s.with_m_max(levels.max(s.m_max)))
                .and_then(|t| family_inner_exponent(&t, 6, 30))
                .ok();
            (Some(theoretical_values(&s)), exact.as_ref().map(EstimateEntry::from))
        }
        _ => (None, None),
    };
    if p.theory && family.is_none() {
        eprintln!("note: --theory only applies to family surfaces");
    }

    let report = EstimateReport {
        n,
        depth,
        dimension: EstimateEntry {
            value: dim.value,
            stderr: dim.slope_stderr,
            method: "box_count".into(),
            k_range: (dim.k_range.0 as f64, dim.k_range.1 as f64),
            notes: if dim.in_hypersurface_range(n) {
                Vec::new()
            } else {
                vec![format!("dimension {:.3} outside [n, n+1]", dim.value)]
            },
        },
        exponent_inner: (&inner).into(),
        exponent_outer: (&outer).into(),
        exponent: (&absolute).into(),
        inequality,
        theory,
        exponent_inner_exact: exact,
    };

    let mut outputs = Outputs::default();
    let mut csv = Vec::new();
    count_curve.write_csv(&mut csv)?;
    outputs.add("box_counts.csv", csv);
    outputs.add(
        "box_counts.svg",
        loglog_svg(
            "box counts",
            "k",
            "log2 N_k",
            &curve_points(&count_curve, true),
            Some((dim_fit.slope, dim_fit.intercept)),
        ),
    );
    for (name, region, est) in [("inner", &inner_region, &inner), ("outer", &outer_region, &outer)] {
        let curve = volume_curve(region, 6)?;
        let mut csv = Vec::new();
        curve.write_csv(&mut csv)?;
        outputs.add(&format!("volume_{name}.csv"), csv);
        let fit = loglog_fit(&curve.tail(cliffrac_core::metrics::VOLUME_WINDOW))?;
        outputs.add(
            &format!("volume_{name}.svg"),
            loglog_svg(
                &format!("{name} neighbourhood volume"),
                "log2 t",
                "log2 V(t)",
                &curve_points(&curve, false),
                Some((est.value, fit.intercept)),
            ),
        );
    }
    outputs.add_json(ESTIMATE_FILE, &report);
    outputs.add_json(CONFIG_FILE, &config_record("estimate", p));

    let mut text = format!(
        "dimension {:.4} ± {:.4} (k = {}..{})\nexponent inner {:.4} ± {:.4}, outer {:.4} ± {:.4}, m = {:.4}\n\
         inequality m - ((n+1) - dim) = {:+.4} ({:?})",
        dim.value,
        dim.slope_stderr,
        dim.k_range.0,
        dim.k_range.1,
        inner.value,
        inner.stderr,
        outer.value,
        outer.stderr,
        absolute.value,
        report.inequality.margin,
        report.inequality.verdict
    );
    if let Some(t) = &report.theory {
        text += &format!("\ntheory: dim {:.4}, m_lower {:.4}", t.dim, t.m_lower);
    }
    if let Some(e) = &report.exponent_inner_exact {
        text += &format!("\nexact family inner exponent {:.4} ± {:.4}", e.value, e.stderr);
    }

    let failure = p.max_stderr.and_then(|limit| {
        let worst = [("dimension", dim.slope_stderr), ("inner exponent", inner.stderr), ("outer exponent", outer.stderr)]
            .into_iter()
            .find(|(_, s)| *s > limit)?;
        Some(Failure::Fit(format!("{} stderr {:.4} exceeds {limit}", worst.0, worst.1)))
    });
    let summary = serde_json::to_value(&report).expect("report serialises");
    Ok(Outcome { outputs, summary, text, failure })
}

/// Diameter of the box spanned by the boundary cells.
fn boundary_diameter(dom: &VoxelDomain) -> f64 {
    let m = dom.grid.dim();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for lin in 0..dom.len() {
        if dom.label(lin).is_boundary() {
            let c = dom.center(lin);
            for a in 0..m {
                lo[a] = lo[a].min(c[a]);
                hi[a] = hi[a].max(c[a]);
            }
        }
    }
    lo.iter().zip(&hi).map(|(l, h)| (h - l).max(0.0).powi(2)).sum::<f64>().sqrt()
}

fn polynomial(kind: PolyKind, n: usize) -> Result<Polynomial, Failure> {
    let one = Multivector64::one(n);
    Ok(match kind {
        PolyKind::Zero => Polynomial::constant(Multivector64::zero(n)),
        PolyKind::One => Polynomial::constant(one),
        PolyKind::X0 => Polynomial::new(n, vec![(MultiIndex::unit(n + 1, 0), one)])?,
        PolyKind::Identity => Polynomial::identity(n),
    })
}

struct Problem {
    spec: ProblemSpec,
    depth: u32,
    /// Present when the jet was sampled from a polynomial.
    generated_jet: Option<LipschitzJet>,
}

fn problem(p: &Params) -> Result<Problem, Failure> {
    let shape_spec = p.shape_spec()?;
    let depth = p.depth.unwrap_or(8);
    let k = p.k.unwrap_or(1);
    let nu = p.nu.unwrap_or(1.0);
    let (jet, generated) = match &p.jet {
        Some(path) => {
            let f = fs::File::open(path).map_err(|e| Failure::io(path, e))?;
            let jet = LipschitzJet::read_json(BufReader::new(f)).map_err(|e| match e {
                cliffrac_core::Error::Io(_) | cliffrac_core::Error::Json(_) | cliffrac_core::Error::Format(_) => {
                    Failure::Io(format!("{}: {e}", path.display()))
                }
                other => other.into(),
            })?;
            if jet.nu() != nu && p.nu.is_some() {
                return Err(Failure::Params(format!("jet file has nu = {} but --nu is {nu}", jet.nu())));
            }
            let nu = jet.nu();
            return Ok(Problem {
                spec: ProblemSpec::new(shape_spec, jet, k, nu, p.side_choice()?)?,
                depth,
                generated_jet: None,
            });
        }
        None => {
            let shape = shape_spec.build()?;
            let bounds = shape.bounding_box().expanded(1.25);
            let dom = voxelize(shape.as_ref(), depth, &bounds)?;
            let points = boundary_samples(shape.as_ref(), &dom);
            let poly = polynomial(p.poly.unwrap_or(PolyKind::X0), shape_spec.n())?;
            let jet = LipschitzJet::from_polynomial(&poly, k, nu, points)?;
            (jet.clone(), Some(jet))
        }
    };
    Ok(Problem { spec: ProblemSpec::new(shape_spec, jet, k, nu, p.side_choice()?)?, depth, generated_jet: generated })
}

fn verify_options(p: &Params, setup: &JumpSetup) -> Result<VerifyOptions, Failure> {
    let eps_cells = p.eps.unwrap_or(4.0);
    if !(eps_cells > 0.0) {
        return Err(Failure::Params(format!("eps = {eps_cells} cells must be positive")));
    }
    let tolerance = p.tolerance.unwrap_or(0.05);
    if !(tolerance > 0.0) {
        return Err(Failure::Params(format!("tolerance = {tolerance} must be positive")));
    }
    Ok(VerifyOptions {
        probes: ProbeSelection::Count(p.probes.unwrap_or(50)),
        eps: Some(eps_cells * setup.h()),
        seed: p.seed(),
        tolerance,
        decay: true,
        monogenic_checks: 4,
    })
}

/// `Φ` at seeded points on spheres about the solid's centre, inside and outside.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionSample {
    pub x: Vec<f64>,
    pub inside: bool,
    pub value: Multivector64,
}

fn solution_samples(sol: &SolutionField<'_>, count: usize, seed: u64) -> Result<Vec<SolutionSample>, Failure> {
    let setup = sol.setup();
    let shape = setup.shape.as_ref();
    let bb = shape.bounding_box();
    let centre = bb.center();
    let half = 0.5 * bb.diam();
    let dirs = unit_directions(setup.spec.shape.n(), count, seed);
    let h = setup.h();
    let mut out = Vec::new();
    for (i, d) in dirs.iter().enumerate() {
        let r = if i % 2 == 0 { 0.3 * half } else { 1.5 * half };
        let x: Point = centre + d.scale(r);
        if shape.distance(&x) < 2.0 * h {
            continue;
        }
        let value = sol.eval(&x)?;
        out.push(SolutionSample { x: x.to_vec_f64(), inside: shape.contains(&x), value });
    }
    Ok(out)
}

fn jump_text(report: &JumpReport, setup: &JumpSetup) -> String {
    let s = &report.summary;
    let decay: Vec<String> = s.decay.iter().map(|d| format!("{:.3}", d.ratio)).collect();
    format!(
        "side {:?}, m = {:.4} ({}), gate margin {:+.4}\nprobes {} of {} resolved, max error {:.4}, median {:.4}, \
         decay ratios [{}]{}\n{}",
        setup.side(),
        setup.selection.m,
        setup.selection.source,
        setup.gate.margin,
        s.resolved,
        s.requested,
        s.max_err,
        s.median_err,
        decay.join(", "),
        s.monogenic_residual.map(|r| format!(", D^k residual {r:.2e}")).unwrap_or_default(),
        if s.passed { "verification passed" } else { "verification FAILED" }
    )
}

fn jump_failure(report: &JumpReport) -> Option<Failure> {
    let s = &report.summary;
    (!s.passed).then(|| {
        Failure::Verify(format!(
            "max error {:.4} vs tolerance {}, {} of {} probes resolved",
            s.max_err, report.config.tolerance, s.resolved, s.requested
        ))
    })
}

fn run_jump(p: &Params, command: &str, with_solution: bool) -> Result<Outcome, Failure> {
    let prob = problem(p)?;
    let opts = SetupOptions { m_override: p.m, force: false };
    let setup = JumpSetup::new(prob.spec, prob.depth, opts)?;
    let vopts = verify_options(p, &setup)?;
    let sol = solve_jump(&setup)?;
    let report = verify_jump(&sol, &vopts)?;

    let mut outputs = Outputs::default();
    outputs.add_json(JUMP_FILE, &report);
    if with_solution {
        outputs.add_json(SOLUTION_FILE, &solution_samples(&sol, 32, p.seed())?);
        if let Some(jet) = &prob.generated_jet {
            let mut bytes = Vec::new();
            jet.write_json(&mut bytes)?;
            bytes.push(b'\n');
            outputs.add(JET_FILE, bytes);
        }
    }
    outputs.add_json(CONFIG_FILE, &config_record(command, p));
    let summary = json!({
        "side": setup.side(),
        "m": setup.selection.m,
        "m_source": setup.selection.source,
        "gate": setup.gate,
        "diagnostics": sol.diagnostics(),
        "summary": report.summary,
        "config": report.config,
    });
    let text = jump_text(&report, &setup);
    let failure = jump_failure(&report);
    Ok(Outcome { outputs, summary, text, failure })
}

pub fn solve(p: &Params) -> Result<Outcome, Failure> {
    run_jump(p, "solve", true)
}

pub fn verify(p: &Params) -> Result<Outcome, Failure> {
    run_jump(p, "verify", false)
}

fn read_json_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Option<T>, Failure> {
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    serde_json::from_str(&text).map(Some).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Summarises the estimate and jump reports found in the output directory.
pub fn report(p: &Params) -> Result<Outcome, Failure> {
    let dir = p.out_dir();
    let estimate: Option<EstimateReport> = read_json_file(&dir.join(ESTIMATE_FILE))?;
    let jump: Option<JumpReport> = read_json_file(&dir.join(JUMP_FILE))?;
    if estimate.is_none() && jump.is_none() {
        return Err(Failure::Io(format!("{}: no {ESTIMATE_FILE} or {JUMP_FILE} found", dir.display())));
    }
    let mut md = String::from("# cliffrac report\n");
    let mut outputs = Outputs::default();
    if let Some(e) = &estimate {
        md += "\n## Estimates\n\n| quantity | value | stderr | method | window |\n|---|---|---|---|---|\n";
        let mut rows = vec![
            ("dimension", &e.dimension),
            ("inner exponent", &e.exponent_inner),
            ("outer exponent", &e.exponent_outer),
            ("exponent", &e.exponent),
        ];
        if let Some(x) = &e.exponent_inner_exact {
            rows.push(("inner exponent (exact volume)", x));
        }
        for (name, r) in rows {
            md += &format!(
                "| {name} | {:.4} | {:.4} | {} | {:.4e} .. {:.4e} |\n",
                r.value, r.stderr, r.method, r.k_range.0, r.k_range.1
            );
        }
        let q = &e.inequality;
        md += &format!(
            "\nm - ((n+1) - dim) = {:+.4} with n = {}: {:?}\n",
            q.margin, q.n, q.verdict
        );
        if let Some(t) = &e.theory {
            md += &format!("\nClosed forms: dim = {:.4}, m_lower = {:.4}\n", t.dim, t.m_lower);
        }
    }
    if let Some(j) = &jump {
        let s = &j.summary;
        md += &format!(
            "\n## Jump verification\n\nside {:?}, depth {}, eps {:.4e}, n = {}, k = {}, nu = {}\n\n\
             max error {:.4}, median {:.4}, {} of {} probes resolved, passed: {}\n",
            j.config.side,
            j.config.depth,
            j.config.eps,
            j.config.n,
            j.config.k,
            j.config.nu,
            s.max_err,
            s.median_err,
            s.resolved,
            s.requested,
            s.passed
        );
        if !s.decay.is_empty() {
            md += "\n| row | r | max at r | max at 2r | ratio |\n|---|---|---|---|---|\n";
            for d in &s.decay {
                md += &format!("| {} | {:.3} | {:.4e} | {:.4e} | {:.4} |\n", d.i, d.r, d.max_abs_r, d.max_abs_2r, d.ratio);
            }
        }
        let pts: Vec<(f64, f64)> =
            j.probes.iter().enumerate().map(|(i, pr)| (i as f64, pr.rel_err.max(1e-16).log2())).collect();
        if !pts.is_empty() {
            outputs.add("jump_errors.svg", loglog_svg("relative jump error per probe", "probe", "log2 error", &pts, None));
        }
    }
    outputs.add(SUMMARY_FILE, md.clone());
    let summary = json!({
        "estimate": estimate.is_some(),
        "jump": jump.is_some(),
        "passed": jump.as_ref().map(|j| j.summary.passed),
    });
    Ok(Outcome { outputs, summary, text: md.trim_end().to_string(), failure: None })
}
