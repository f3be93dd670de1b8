//! Gauss-Legendre rules and tensor/pyramid quadrature on boxes.

use std::sync::OnceLock;

use crate::geometry::{Point, Rect};

const MAX_ORDER: usize = 16;

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Nodes and weights of the `n`-point rule on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    if n <= MAX_ORDER {
        static TABLE: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
        let t = TABLE.get_or_init(|| (0..=MAX_ORDER).map(|k| if k < 2 { (vec![0.0], vec![2.0]) } else { compute(k) }).collect());
        return t[n].clone();
    }
    compute(n)
}

/// Rule mapped to `[0, 1]`.
pub(crate) fn unit_rule(n: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    x.iter().zip(&w).map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect()
}

/// Calls `f(point, weight)` for the tensor rule of order `g` on `b`.
pub(crate) fn tensor_box<F: FnMut(&Point, f64)>(b: &Rect, g: usize, mut f: F) {
    let m = b.dim();
    let rule = unit_rule(g);
    let mut ext = [0.0; 9];
    for (a, e) in ext.iter_mut().enumerate().take(m) {
        *e = b.extent(a);
    }
    let vol: f64 = ext[..m].iter().product();
    let mut digits = [0usize; 9];
    let mut y = b.lo;
    loop {
        let mut w = vol;
        for a in 0..m {
            let (t, wt) = rule[digits[a]];
            y[a] = b.lo[a] + t * ext[a];
            w *= wt;
        }
        f(&y, w);
        let mut a = 0;
        loop {
            if a == m {
                return;
            }
            digits[a] += 1;
            if digits[a] < g {
                break;
            }
            digits[a] = 0;
            a += 1;
        }
    }
}

/// Pyramid (Duffy) rule on `b` with apex `x`, which must lie in `b`.
///
/// `b` is cut at `x` into boxes having `x` as a corner; each box is the union of
/// one pyramid per axis with apex `x`. Calls `f(y, w, t)` where `t` is the radial
/// pyramid coordinate; the Jacobian factor `t^{m-1}` is left to the caller so
/// that a kernel homogeneous of degree `1 - m` stays bounded.
pub(crate) fn duffy_box<F: FnMut(&Point, f64, f64)>(b: &Rect, x: &Point, g: usize, mut f: F) {
    let m = b.dim();
    let rule = unit_rule(g);
    let mut sub = [[0.0f64; 2]; 9];
    for a in 0..m {
        sub[a] = [b.lo[a] - x[a], b.hi[a] - x[a]];
    }
    for corner in 0..(1usize << m) {
        let mut len = [0.0; 9];
        let mut skip = false;
        for a in 0..m {
            len[a] = sub[a][(corner >> a) & 1];
            if len[a] == 0.0 {
                skip = true;
            }
        }
        if skip {
            continue;
        }
        let vol: f64 = (0..m).map(|a| len[a].abs()).product();
        for apex_axis in 0..m {
            let mut digits = [0usize; 9];
            let mut y = *x;
            loop {
                let (t, wt) = rule[digits[0]];
                let mut w = vol * wt;
                let mut d = 1;
                for a in 0..m {
                    let v = if a == apex_axis {
                        1.0
                    } else {
                        let (v, wv) = rule[digits[d]];
                        w *= wv;
                        d += 1;
                        v
                    };
                    y[a] = x[a] + t * v * len[a];
                }
                f(&y, w, t);
                let mut a = 0;
                loop {
                    if a == m {
                        break;
                    }
                    digits[a] += 1;
                    if digits[a] < g {
                        break;
                    }
                    digits[a] = 0;
                    a += 1;
                }
                if a == m {
                    break;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_exactness() {
        for n in 1..=12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
        assert_eq!(gauss_legendre(20).0.len(), 20);
    }

    #[test]
    fn tensor_and_duffy_volumes() {
        let b = Rect::from_slices(&[0.0, -1.0, 2.0], &[1.0, 1.0, 2.5]).unwrap();
        let mut v = 0.0;
        tensor_box(&b, 3, |_, w| v += w);
        assert!((v - 1.0).abs() < 1e-14);
        let x = Point::from_f64(&[0.25, 0.0, 2.4]);
        let mut v = 0.0;
        let mut mom = 0.0;
        duffy_box(&b, &x, 4, |y, w, t| {
            v += w * t * t;
            mom += w * t * t * y[0];
        });
        assert!((v - 1.0).abs() < 1e-13, "{v}");
        assert!((mom - 0.5).abs() < 1e-13, "{mom}");
    }

    #[test]
    fn duffy_integrates_newton_kernel() {
        // ∫_{[-1,1]^2} 1/|y| dy = 8 asinh(1)
        let b = Rect::from_slices(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        let x = Point::from_f64(&[0.0, 0.0]);
        let mut s = 0.0;
        duffy_box(&b, &x, 8, |y, w, t| s += w * t / y.norm());
        assert!((s - 8.0 * 1f64.asinh()).abs() < 1e-10, "{s}");
    }
}
