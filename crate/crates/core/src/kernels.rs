//! Cauchy kernel `E`, polymonogenic kernels `E^k` and a finite-difference Dirac operator.

use crate::clifford::{Multivector, Paravector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

fn gamma_half<T: Scalar>(m: usize) -> T {
    // Γ(m/2) by the recursion Γ(s + 1) = s Γ(s)
    let mut g = if m % 2 == 0 { T::one() } else { T::PI().sqrt() };
    let mut twice_s = if m % 2 == 0 { 2 } else { 1 };
    while twice_s < m {
        g = g * T::lit(twice_s as f64 / 2.0);
        twice_s += 2;
    }
    g
}

/// Hypersurface area `σ_m = 2π^{m/2} / Γ(m/2)` of the unit sphere in R^m.
pub fn unit_sphere_area<T: Scalar>(m: usize) -> Result<T> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("sphere dimension m = {m} < 2")));
    }
    let two = T::lit(2.0);
    Ok(two * T::PI().powf(T::lit(m as f64 / 2.0)) / gamma_half::<T>(m))
}

/// `E^k` for fixed `(n, k)` with the normalising constant folded in.
#[derive(Clone, Copy, Debug)]
pub struct PolyKernel<T: Scalar> {
    n: usize,
    k: usize,
    scale: T,
}

impl<T: Scalar> PolyKernel<T> {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameter("kernel order k must be >= 1".into()));
        }
        let sigma = unit_sphere_area::<T>(n + 1)?;
        let fact: f64 = (1..k).map(|i| i as f64).product();
        Ok(Self { n, k, scale: T::one() / (sigma * T::lit(fact)) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.k
    }

    /// `E^k(x)` as a paravector; `E^k(x) = x̄ (x⁰)^{k-1} / ((k-1)! σ |x|^{n+1})`.
    #[inline]
    pub fn eval(&self, x: &Paravector<T>) -> Result<Paravector<T>> {
        let r2 = x.norm_sq();
        if r2.is_zero() {
            return Err(Error::Singularity);
        }
        Ok(self.eval_unchecked(x, r2))
    }

    /// As [`eval`](Self::eval) with `r2 = |x|² > 0` supplied by the caller.
    #[inline]
    pub fn eval_unchecked(&self, x: &Paravector<T>, r2: T) -> Paravector<T> {
        x.conj().scale(self.radial_factor(x[0], r2))
    }

    /// `s` with `E^k(x) = s x̄`, given `x⁰` and `r2 = |x|²`.
    #[inline]
    pub fn radial_factor(&self, x0: T, r2: T) -> T {
        let r = r2.sqrt();
        let mut denom = r;
        for _ in 0..self.n {
            denom = denom * r;
        }
        let mut s = self.scale / denom;
        for _ in 1..self.k {
            s = s * x0;
        }
        s
    }
}

/// Cauchy kernel `E(x) = x̄ / (σ_{n+1} |x|^{n+1})`.
pub fn cauchy_kernel<T: Scalar>(x: &Paravector<T>) -> Result<Multivector<T>> {
    poly_kernel(1, x)
}

/// Polymonogenic kernel `E^k(x)`; `E^1` is the Cauchy kernel.
pub fn poly_kernel<T: Scalar>(k: usize, x: &Paravector<T>) -> Result<Multivector<T>> {
    Ok(PolyKernel::new(x.n(), k)?.eval(x)?.to_multivector())
}

/// Kernel value together with its evaluation point and order.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelEval<T: Scalar> {
    pub value: Multivector<T>,
    pub at: Paravector<T>,
    pub order: usize,
}

impl<T: Scalar> KernelEval<T> {
    pub fn new(k: usize, at: Paravector<T>) -> Result<Self> {
        Ok(Self { value: poly_kernel(k, &at)?, at, order: k })
    }
}

/// `Σ_j e_j (f(x + h e_j) - f(x - h e_j)) / 2h`, with `e_0 = 1`.
pub fn dirac_fd<T, F>(f: F, x: &Paravector<T>, h: T) -> Result<Multivector<T>>
where
    T: Scalar,
    F: Fn(&Paravector<T>) -> Result<Multivector<T>>,
{
    if !(h > T::zero()) {
        return Err(Error::InvalidParameter("finite-difference step must be positive".into()));
    }
    let n = x.n();
    let mut out = Multivector::zero(n);
    let inv = T::one() / (h + h);
    for j in 0..=n {
        let step = Paravector::axis(n, j).scale(h);
        let fp = f(&(*x + step))?;
        let fm = f(&(*x - step))?;
        let diff = &fp - &fm;
        let e = Paravector::axis(n, j);
        e.left_mul_acc(&diff, inv, &mut out);
    }
    Ok(out)
}

/// `times`-fold nested [`dirac_fd`]; the stencil widens with each application.
pub fn dirac_fd_power<T, F>(f: &F, x: &Paravector<T>, h: T, times: usize) -> Result<Multivector<T>>
where
    T: Scalar,
    F: Fn(&Paravector<T>) -> Result<Multivector<T>>,
{
    if times == 0 {
        return f(x);
    }
    dirac_fd(|y: &Paravector<T>| dirac_fd_power(f, y, h, times - 1), x, h)
}

/// Richardson combination `(4 D_{h/2} - D_h) / 3` of two central differences.
pub fn dirac_fd_richardson<T, F>(f: F, x: &Paravector<T>, h: T) -> Result<Multivector<T>>
where
    T: Scalar,
    F: Fn(&Paravector<T>) -> Result<Multivector<T>>,
{
    let coarse = dirac_fd(&f, x, h)?;
    let fine = dirac_fd(&f, x, h / T::lit(2.0))?;
    Ok(&fine.scale(T::lit(4.0 / 3.0)) - &coarse.scale(T::lit(1.0 / 3.0)))
}
