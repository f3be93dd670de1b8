//! The Whitney extension `f̃ = Σ φ_i P(·, p_i)` and its Dirac powers.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::decompose::{Carrier, DyadicFrame, WhitneyCube};
use super::jet::LipschitzJet;
use super::MultiIndex;
use crate::clifford::{BladeIndex, Multivector};
use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};
use crate::taylor::{Tps, TpsSpace};

/// Support of a cube's bump relative to its half-edge.
pub const EXPANSION: f64 = 1.5;

/// `exp(1 - 1/(1 - s²))` on `|s| < 1`, zero outside.
pub fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// Extension of a jet over `bounds`.
pub struct WhitneyExtension<'j> {
    jet: &'j LipschitzJet,
    carrier: Carrier,
    frame: DyadicFrame,
    spaces: Vec<OnceLock<TpsSpace>>,
}

impl<'j> WhitneyExtension<'j> {
    pub fn new(jet: &'j LipschitzJet, bounds: &Rect, max_level: u32) -> Result<Self> {
        if jet.is_empty() {
            return Err(Error::InsufficientData("empty carrier".into()));
        }
        if bounds.n() != jet.n() {
            return Err(Error::DimensionMismatch { left: jet.n(), right: bounds.n() });
        }
        let carrier = Carrier::points(jet.points().to_vec())?;
        let spaces = (0..=jet.k().max(7)).map(|_| OnceLock::new()).collect();
        Ok(Self { jet, carrier, frame: DyadicFrame::new(bounds, max_level)?, spaces })
    }

    /// Depth limit two levels below a working grid step `h`.
    pub fn for_grid_step(jet: &'j LipschitzJet, bounds: &Rect, h: f64) -> Result<Self> {
        let frame = DyadicFrame::for_grid_step(bounds, h)?;
        Self::new(jet, bounds, frame.max_level)
    }

    pub fn jet(&self) -> &'j LipschitzJet {
        self.jet
    }

    pub fn bounds(&self) -> &Rect {
        &self.frame.bounds
    }

    pub fn frame(&self) -> &DyadicFrame {
        &self.frame
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    /// Distance to the carrier and the nearest sample.
    pub fn nearest(&self, x: &Point) -> (usize, f64) {
        self.carrier.nearest(x).expect("carrier is non-empty")
    }

    /// Decomposition cubes whose expanded bump is positive at `x`.
    pub fn active_cubes(&self, x: &Point) -> Result<Vec<WhitneyCube>> {
        if !self.frame.bounds.contains(x) {
            return Err(Error::OutsideBounds(x.to_vec_f64()));
        }
        let d = self.nearest(x).1;
        let m = self.frame.dim();
        let mut out = Vec::new();
        for level in 0..=self.frame.max_level {
            let e = self.frame.edge(level);
            let diam = e * (m as f64).sqrt();
            let plausible = level == 0 || level == self.frame.max_level || (diam <= 2.0 * d && diam >= d / 8.0);
            if !plausible {
                continue;
            }
            let mut lo = [0i64; 9];
            let mut hi = [0i64; 9];
            for a in 0..m {
                let t = (x[a] - self.frame.root.lo[a]) / e;
                lo[a] = (t - 0.5 * (EXPANSION - 1.0)).floor() as i64;
                hi[a] = (t + 0.5 * (EXPANSION - 1.0)).floor() as i64;
            }
            let mut coords = lo;
            loop {
                if let Some(c) = self.frame.classify_near(&self.carrier, level, &coords[..m], Some((x, d))) {
                    if bump_value(&c, x) > 0.0 {
                        out.push(c);
                    }
                }
                let mut a = 0;
                loop {
                    if a == m {
                        break;
                    }
                    if coords[a] < hi[a] {
                        coords[a] += 1;
                        break;
                    }
                    coords[a] = lo[a];
                    a += 1;
                }
                if a == m {
                    break;
                }
            }
        }
        if out.is_empty() {
            return Err(Error::Evaluation { at: x.to_vec_f64(), reason: "no Whitney cube covers the point".into() });
        }
        Ok(out)
    }

    /// `(cube, φ_i(x))` for the active cubes.
    pub fn partition(&self, x: &Point) -> Result<Vec<(WhitneyCube, f64)>> {
        let cubes = self.active_cubes(x)?;
        let psi: Vec<f64> = cubes.iter().map(|c| bump_value(c, x)).collect();
        let total: f64 = psi.iter().sum();
        Ok(cubes.into_iter().zip(psi).map(|(c, p)| (c, p / total)).collect())
    }

    /// `f̃(x)`; equals the jet value at carrier points.
    pub fn eval(&self, x: &Point) -> Result<Multivector<f64>> {
        let (p, d) = self.nearest(x);
        if d == 0.0 {
            return Ok(self.jet.value(p, 0).clone());
        }
        let mut out = Multivector::zero(self.jet.n());
        for (c, phi) in self.partition(x)? {
            let anchor = c.anchor.expect("point carrier");
            self.jet.taylor(anchor, x).add_scaled_into(phi, &mut out);
        }
        Ok(out)
    }

    /// Taylor expansion of `f̃` at `x` to `order`, one series per blade coefficient.
    pub fn expansion(&self, x: &Point, order: usize) -> Result<(&TpsSpace, Vec<Tps<f64>>)> {
        let n = self.jet.n();
        let m = n + 1;
        let width = 1usize << n;
        let space = self
            .spaces
            .get(order)
            .ok_or_else(|| Error::OutOfRange { index: order as i64, range: format!("0..{}", self.spaces.len()) })?
            .get_or_init(|| TpsSpace::new(m, order));
        let cubes = self.active_cubes(x)?;
        let psis: Vec<Tps<f64>> = cubes.iter().map(|c| bump_series(space, c, x)).collect();
        let mut total = space.zero();
        for p in &psis {
            total.add_scaled(p, 1.0);
        }
        let inv = space.recip(&total);
        let mut out = vec![space.zero(); width];
        let vars: Vec<Tps<f64>> = (0..m).map(|a| space.variable(a, 0.0)).collect();
        for (c, psi) in cubes.iter().zip(&psis) {
            let phi = space.mul(psi, &inv);
            let anchor = c.anchor.expect("point carrier");
            let taylor = self.taylor_series(space, &vars, anchor, x);
            for (o, t) in out.iter_mut().zip(&taylor) {
                o.add_scaled(&space.mul(&phi, t), 1.0);
            }
        }
        Ok((space, out))
    }

    /// `P(x + δ, p)` as series in `δ`, per blade.
    fn taylor_series(&self, space: &TpsSpace, vars: &[Tps<f64>], p: usize, x: &Point) -> Vec<Tps<f64>> {
        let n = self.jet.n();
        let width = 1usize << n;
        let base = self.jet.points()[p];
        let shift: Vec<Tps<f64>> = (0..=n).map(|a| vars[a].clone().add_const(x[a] - base[a])).collect();
        let mut out = vec![space.zero(); width];
        for (i, l) in self.jet.indices().iter().enumerate() {
            let coef = self.jet.value(p, i);
            if coef.is_zero() {
                continue;
            }
            let mut mono = space.constant(1.0 / l.factorial());
            for (a, &e) in l.exponents().iter().enumerate() {
                for _ in 0..e {
                    mono = space.mul(&mono, &shift[a]);
                }
            }
            for (b, &cb) in coef.coeffs().iter().enumerate() {
                if cb != 0.0 {
                    out[b].add_scaled(&mono, cb);
                }
            }
        }
        out
    }

    /// `∂^j f̃(x)` off the carrier.
    pub fn partial(&self, j: &MultiIndex, x: &Point) -> Result<Multivector<f64>> {
        let (space, series) = self.expansion(x, j.order())?;
        let coeffs = series.iter().map(|t| space.derivative(t, j)).collect();
        Multivector::from_coeffs(self.jet.n(), coeffs)
    }

    /// `D^i f̃(x)`; on the carrier returns the bold-f value for `i <= k - 1`.
    pub fn dirac_power(&self, i: usize, x: &Point) -> Result<Multivector<f64>> {
        let k = self.jet.k();
        if i > k {
            return Err(Error::OutOfRange { index: i as i64, range: format!("0..={k}") });
        }
        let (p, d) = self.nearest(x);
        if d == 0.0 {
            if i == k {
                return Err(Error::Evaluation { at: x.to_vec_f64(), reason: format!("D^{k} is undefined on the carrier") });
            }
            return bold_f_at(self.jet, i, p);
        }
        let (space, series) = self.expansion(x, i)?;
        Ok(dirac_of_series(self.jet.n(), i, space, &series))
    }

    /// `D^i f̃` at many points in parallel.
    pub fn dirac_power_many(&self, i: usize, xs: &[Point]) -> Result<Vec<Multivector<f64>>> {
        xs.par_iter().map(|x| self.dirac_power(i, x)).collect()
    }
}

/// `D^i` at the expansion point of a per-blade series of order at least `i`.
pub fn dirac_of_series(n: usize, i: usize, space: &TpsSpace, series: &[Tps<f64>]) -> Multivector<f64> {
    let mut out = Multivector::zero(n);
    for_each_word(n, i, |word, blade_sign| {
        let mut j = MultiIndex::zero(n + 1);
        for &r in word {
            j = j.checked_add(&MultiIndex::unit(n + 1, r));
        }
        let coeffs: Vec<f64> = series.iter().map(|t| space.derivative(t, &j)).collect();
        let v = Multivector::from_coeffs(n, coeffs).expect("width matches");
        v.left_blade_acc(blade_sign.0, blade_sign.1, &mut out);
    });
    out
}

fn bump_value(c: &WhitneyCube, x: &Point) -> f64 {
    let centre = c.cell.center();
    let rho = 0.5 * c.scale * EXPANSION;
    (0..c.cell.dim()).map(|a| bump((x[a] - centre[a]) / rho)).product()
}

fn bump_series(space: &TpsSpace, c: &WhitneyCube, x: &Point) -> Tps<f64> {
    let centre = c.cell.center();
    let rho = 0.5 * c.scale * EXPANSION;
    let mut out = space.constant(1.0);
    for a in 0..c.cell.dim() {
        let s = space.variable(a, x[a] - centre[a]).scale(1.0 / rho);
        let u = space.mul(&s, &s).scale(-1.0).add_const(1.0);
        let w = space.recip(&u).scale(-1.0).add_const(1.0);
        out = space.mul(&out, &space.exp(&w));
    }
    out
}

/// Calls `f(word, (blade, sign))` for every word `r_1..r_i` over `0..=n`, where
/// `e_{r_1} ··· e_{r_i} = sign · e_blade` and `e_0 = 1`.
fn for_each_word(n: usize, i: usize, mut f: impl FnMut(&[usize], (BladeIndex, f64))) {
    let mut word = vec![0usize; i];
    loop {
        let mut prod = Multivector::<f64>::one(n);
        for &r in word.iter().rev() {
            if r > 0 {
                let mut next = Multivector::zero(n);
                prod.left_blade_acc(BladeIndex::generator(r), 1.0, &mut next);
                prod = next;
            }
        }
        let (b, s) = prod
            .coeffs()
            .iter()
            .enumerate()
            .find(|(_, c)| **c != 0.0)
            .map(|(b, c)| (BladeIndex(b as u32), *c))
            .expect("a product of generators is a signed blade");
        f(&word, (b, s));
        let mut a = 0;
        loop {
            if a == i {
                return;
            }
            word[a] += 1;
            if word[a] <= n {
                break;
            }
            word[a] = 0;
            a += 1;
        }
    }
}

fn bold_f_at(jet: &LipschitzJet, i: usize, p: usize) -> Result<Multivector<f64>> {
    let n = jet.n();
    let mut out = Multivector::zero(n);
    let mut err = None;
    for_each_word(n, i, |word, (blade, sign)| {
        let mut j = MultiIndex::zero(n + 1);
        for &r in word {
            j = j.checked_add(&MultiIndex::unit(n + 1, r));
        }
        match jet.component(p, &j) {
            Ok(v) => v.left_blade_acc(blade, sign, &mut out),
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// `f^(i)_bold = Σ_{r_1..r_i} e_{r_1} ··· e_{r_i} f^{(1_{r_1} + ... + 1_{r_i})}` at every sample.
pub fn assemble_bold_f(jet: &LipschitzJet, i: usize) -> Result<Vec<Multivector<f64>>> {
    if i > jet.order() {
        return Err(Error::OutOfRange { index: i as i64, range: format!("0..={}", jet.order()) });
    }
    (0..jet.len()).map(|p| bold_f_at(jet, i, p)).collect()
}

/// `f̃(x)`.
pub fn extend(ext: &WhitneyExtension<'_>, x: &Point) -> Result<Multivector<f64>> {
    ext.eval(x)
}

/// `D^i f̃(x)`.
pub fn dirac_power_extension(ext: &WhitneyExtension<'_>, i: usize, x: &Point) -> Result<Multivector<f64>> {
    ext.dirac_power(i, x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipEstimate {
    /// Smallest `M` meeting both bounds over all sampled pairs.
    pub m: f64,
    pub value_sup: f64,
    pub remainder_sup: f64,
    /// The same estimate on every second sample.
    pub m_half: f64,
    /// `M` grows by more than half when the sample density doubles.
    pub inconsistent: bool,
    /// Samples entering the pairwise remainder bound.
    pub sampled: usize,
}

/// Pairwise remainders are taken over an evenly strided subset of at most this many samples.
pub const LIP_SAMPLE_CAP: usize = 4096;

fn lip_sup(jet: &LipschitzJet) -> (f64, f64) {
    let k = jet.k() as f64;
    let nu = jet.nu();
    let idx = jet.indices();
    let value_sup = (0..jet.len())
        .flat_map(|p| (0..idx.len()).map(move |i| (p, i)))
        .map(|(p, i)| jet.value(p, i).norm())
        .fold(0.0, f64::max);
    let remainder_sup = (0..jet.len())
        .into_par_iter()
        .map(|x| {
            let mut best: f64 = 0.0;
            for y in 0..jet.len() {
                if x == y {
                    continue;
                }
                let d = jet.points()[x].dist(&jet.points()[y]);
                if d == 0.0 {
                    continue;
                }
                for j in idx {
                    let r = jet.remainder(x, j, y).expect("own components").norm();
                    best = best.max(r / d.powf(k - 1.0 + nu - j.order() as f64));
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    (value_sup, remainder_sup)
}

/// Empirical `M` of the Lipschitz bounds over all sample pairs.
pub fn estimate_lip_constant(jet: &LipschitzJet) -> Result<LipEstimate> {
    if jet.len() < 2 {
        return Err(Error::InsufficientData("Lipschitz estimate needs >= 2 samples".into()));
    }
    let stride = jet.len().div_ceil(LIP_SAMPLE_CAP);
    let capped;
    let jet = if stride > 1 {
        capped = jet.subsample(|p| p % stride == 0);
        &capped
    } else {
        jet
    };
    let (value_sup, remainder_sup) = lip_sup(jet);
    let m = value_sup.max(remainder_sup);
    let half = jet.subsample(|p| p % 2 == 0);
    let m_half = if half.len() >= 2 {
        let (v, r) = lip_sup(&half);
        v.max(r)
    } else {
        m
    };
    Ok(LipEstimate { m, value_sup, remainder_sup, m_half, inconsistent: m > 1.5 * m_half, sampled: jet.len() })
}
