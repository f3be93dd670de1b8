//! Jets `{f^(j)}_{|j| <= k-1}` sampled on a finite carrier.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::MultiIndex;
use crate::clifford::Multivector;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// `Σ c_a x^a` with multivector coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    n: usize,
    terms: Vec<(MultiIndex, Multivector<f64>)>,
}

impl Polynomial {
    pub fn new(n: usize, terms: Vec<(MultiIndex, Multivector<f64>)>) -> Result<Self> {
        for (a, c) in &terms {
            if a.dim() != n + 1 || c.n() != n {
                return Err(Error::DimensionMismatch { left: n, right: c.n() });
            }
        }
        Ok(Self { n, terms })
    }

    pub fn constant(c: Multivector<f64>) -> Self {
        let n = c.n();
        Self { n, terms: vec![(MultiIndex::zero(n + 1), c)] }
    }

    /// The paravector identity `x = x⁰ + Σ x^j e_j`.
    pub fn identity(n: usize) -> Self {
        let terms = (0..=n)
            .map(|j| {
                let c = if j == 0 { Multivector::one(n) } else { Multivector::basis(n, j) };
                (MultiIndex::unit(n + 1, j), c)
            })
            .collect();
        Self { n, terms }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.0.order()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &Point) -> Multivector<f64> {
        self.derivative(&MultiIndex::zero(self.n + 1), x)
    }

    /// `∂^j p(x)`.
    pub fn derivative(&self, j: &MultiIndex, x: &Point) -> Multivector<f64> {
        let mut out = Multivector::zero(self.n);
        let xs = &x.components()[..self.n + 1];
        for (a, c) in &self.terms {
            if let Some(rest) = a.checked_sub(j) {
                let falling = a.factorial() / rest.factorial();
                c.add_scaled_into(falling * rest.pow(xs), &mut out);
            }
        }
        out
    }
}

/// A jet of order `k - 1` with smoothness `ν` on sample points.
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzJet {
    n: usize,
    k: usize,
    nu: f64,
    indices: Vec<MultiIndex>,
    points: Vec<Point>,
    /// `values[p * indices.len() + i]` is `f^(indices[i])(points[p])`.
    values: Vec<Multivector<f64>>,
}

impl LipschitzJet {
    fn check(n: usize, k: usize, nu: f64) -> Result<()> {
        if k < 1 {
            return Err(Error::InvalidParameter("jet order k must be >= 1".into()));
        }
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::InvalidParameter(format!("ν = {nu} outside (0, 1]")));
        }
        if n < 1 || n > crate::clifford::MAX_ALGEBRA_DIM {
            return Err(Error::DimensionTooLarge { n, max: crate::clifford::MAX_ALGEBRA_DIM });
        }
        Ok(())
    }

    /// Samples `f(p, j) = f^(j)(p)` at each point.
    pub fn sample(
        n: usize,
        k: usize,
        nu: f64,
        points: Vec<Point>,
        f: impl Fn(&Point, &MultiIndex) -> Multivector<f64>,
    ) -> Result<Self> {
        Self::check(n, k, nu)?;
        let indices = MultiIndex::all_up_to(n + 1, k - 1);
        let mut values = Vec::with_capacity(points.len() * indices.len());
        for p in &points {
            if p.n() != n {
                return Err(Error::DimensionMismatch { left: n, right: p.n() });
            }
            for j in &indices {
                let v = f(p, j);
                if v.n() != n {
                    return Err(Error::DimensionMismatch { left: n, right: v.n() });
                }
                values.push(v);
            }
        }
        Ok(Self { n, k, nu, indices, points, values })
    }

    /// Jet of a global polynomial; exact for any `ν`.
    pub fn from_polynomial(p: &Polynomial, k: usize, nu: f64, points: Vec<Point>) -> Result<Self> {
        Self::sample(p.n(), k, nu, points, |x, j| p.derivative(j, x))
    }

    pub fn zero(n: usize, k: usize, nu: f64, points: Vec<Point>) -> Result<Self> {
        Self::sample(n, k, nu, points, |_, _| Multivector::zero(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Largest `|j|`, `k - 1`.
    pub fn order(&self) -> usize {
        self.k - 1
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// `f^(j)` at point `p`.
    pub fn component(&self, p: usize, j: &MultiIndex) -> Result<&Multivector<f64>> {
        let i = self.indices.iter().position(|m| m == j).ok_or_else(|| Error::MissingComponent(j.key()))?;
        self.values.get(p * self.indices.len() + i).ok_or(Error::OutOfRange {
            index: p as i64,
            range: format!("0..{}", self.points.len()),
        })
    }

    /// `f^(indices[i])` at point `p`.
    pub(crate) fn value(&self, p: usize, i: usize) -> &Multivector<f64> {
        &self.values[p * self.indices.len() + i]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Taylor field `P(x, p) = Σ_{|l| <= k-1} f^(l)(p) (x - p)^l / l!`.
    pub fn taylor(&self, p: usize, x: &Point) -> Multivector<f64> {
        self.taylor_derivative(p, &MultiIndex::zero(self.n + 1), x)
    }

    /// `∂^j_x P(x, p) = Σ_{|j + l| <= k-1} f^(j+l)(p) (x - p)^l / l!`.
    pub fn taylor_derivative(&self, p: usize, j: &MultiIndex, x: &Point) -> Multivector<f64> {
        let d = *x - self.points[p];
        let ds = &d.components()[..self.n + 1];
        let mut out = Multivector::zero(self.n);
        for (i, a) in self.indices.iter().enumerate() {
            if let Some(l) = a.checked_sub(j) {
                self.value(p, i).add_scaled_into(l.pow(ds) / l.factorial(), &mut out);
            }
        }
        out
    }

    /// `R_j(x, y) = f^(j)(x) - ∂^j P(x, y)` for sample indices `x`, `y`.
    pub fn remainder(&self, x: usize, j: &MultiIndex, y: usize) -> Result<Multivector<f64>> {
        let fx = self.component(x, j)?;
        Ok(fx - &self.taylor_derivative(y, j, &self.points[x]))
    }

    /// Keeps the samples whose index satisfies `keep`.
    pub fn subsample(&self, keep: impl Fn(usize) -> bool) -> Self {
        let w = self.indices.len();
        let mut points = Vec::new();
        let mut values = Vec::new();
        for p in 0..self.points.len() {
            if keep(p) {
                points.push(self.points[p]);
                values.extend_from_slice(&self.values[p * w..(p + 1) * w]);
            }
        }
        Self { points, values, indices: self.indices.clone(), ..*self }
    }

    pub fn to_file(&self) -> JetFile {
        let points = (0..self.points.len())
            .map(|p| JetPoint {
                x: self.points[p].to_vec_f64(),
                components: self.indices.iter().enumerate().map(|(i, j)| (j.key(), self.value(p, i).clone())).collect(),
            })
            .collect();
        JetFile { n: self.n, k: self.k, nu: self.nu, points }
    }

    pub fn from_file(file: &JetFile) -> Result<Self> {
        let (n, k) = (file.n, file.k);
        Self::check(n, k, file.nu)?;
        let indices = MultiIndex::all_up_to(n + 1, k - 1);
        let mut points = Vec::with_capacity(file.points.len());
        let mut values = Vec::with_capacity(file.points.len() * indices.len());
        for jp in &file.points {
            if jp.x.len() != n + 1 {
                return Err(Error::DimensionMismatch { left: n + 1, right: jp.x.len() });
            }
            points.push(Point::from_f64(&jp.x));
            let mut found = vec![None; indices.len()];
            for (key, mv) in &jp.components {
                let j = MultiIndex::parse_key(n + 1, key)?;
                let i = indices
                    .iter()
                    .position(|m| *m == j)
                    .ok_or_else(|| Error::Format(format!("component {key:?} exceeds order {}", k - 1)))?;
                if mv.n() != n {
                    return Err(Error::DimensionMismatch { left: n, right: mv.n() });
                }
                found[i] = Some(mv.clone());
            }
            for (v, j) in found.into_iter().zip(&indices) {
                values.push(v.ok_or_else(|| Error::MissingComponent(j.key()))?);
            }
        }
        Ok(Self { n, k, nu: file.nu, indices, points, values })
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer(w, &self.to_file())?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        let file: JetFile = serde_json::from_reader(r)?;
        Self::from_file(&file)
    }
}

/// Jet file layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetFile {
    pub n: usize,
    pub k: usize,
    pub nu: f64,
    pub points: Vec<JetPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetPoint {
    pub x: Vec<f64>,
    pub components: BTreeMap<String, Multivector<f64>>,
}
