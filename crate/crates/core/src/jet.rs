//! Truncated multivariate Taylor arithmetic ("jets") of total order four.
//!
//! A [`Jet`] in `m` variables stores the Taylor coefficients of a holomorphic
//! function at a base point for every monomial of total degree at most
//! [`JET_ORDER`]. Products are truncated, and analytic functions (`ln`, `exp`,
//! reciprocals, real powers) are applied by composing their univariate Taylor
//! expansion with the nilpotent part of the jet.
//!
//! Polarized kernels use `m = 2n`: the first `n` variables are the
//! holomorphic slot `z`, the last `n` the conjugate slot `s` (standing in for
//! `conj(w)`).

use std::collections::HashMap;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::scalar::{Scalar, C64};

pub const JET_ORDER: usize = 4;

/// Monomial bookkeeping for jets in a fixed number of variables.
#[derive(Debug)]
pub struct JetLayout {
    nvars: usize,
    exponents: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    /// `(i, j, k)` with `exponents[i] + exponents[j] == exponents[k]`.
    products: Vec<(u32, u32, u32)>,
}

impl JetLayout {
    fn build(nvars: usize) -> Self {
        let mut exponents = Vec::new();
        for deg in 0..=JET_ORDER {
            let mut cur = vec![0u8; nvars];
            push_compositions(deg, 0, &mut cur, &mut exponents);
        }
        let index: HashMap<Vec<u8>, usize> = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let mut products = Vec::new();
        for (i, a) in exponents.iter().enumerate() {
            let da: usize = a.iter().map(|&x| x as usize).sum();
            for (j, b) in exponents.iter().enumerate() {
                let db: usize = b.iter().map(|&x| x as usize).sum();
                if da + db > JET_ORDER {
                    continue;
                }
                let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                products.push((i as u32, j as u32, index[&sum] as u32));
            }
        }
        Self {
            nvars,
            exponents,
            index,
            products,
        }
    }

    /// Shared layout for `nvars` variables.
    pub fn get(nvars: usize) -> Arc<JetLayout> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<JetLayout>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("jet layout cache poisoned");
        guard
            .entry(nvars)
            .or_insert_with(|| Arc::new(JetLayout::build(nvars)))
            .clone()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u8>] {
        &self.exponents
    }

    pub fn index_of(&self, exponent: &[u8]) -> Option<usize> {
        self.index.get(exponent).copied()
    }
}

fn push_compositions(remaining: usize, pos: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining as u8;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    if cur.is_empty() {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for k in (0..=remaining).rev() {
        cur[pos] = k as u8;
        push_compositions(remaining - k, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// Truncated Taylor polynomial of total degree [`JET_ORDER`].
#[derive(Clone)]
pub struct Jet {
    layout: Arc<JetLayout>,
    coeffs: Vec<C64>,
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.layout.nvars)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl Jet {
    pub fn constant(layout: &Arc<JetLayout>, c: C64) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); layout.len()];
        coeffs[0] = c;
        Self {
            layout: layout.clone(),
            coeffs,
        }
    }

    /// The affine jet `value + x_var`.
    pub fn variable(layout: &Arc<JetLayout>, var: usize, value: C64) -> Self {
        assert!(var < layout.nvars, "jet variable out of range");
        let mut jet = Self::constant(layout, value);
        let mut e = vec![0u8; layout.nvars];
        e[var] = 1;
        jet.coeffs[layout.index[&e]] = C64::new(1.0, 0.0);
        jet
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    /// Raw Taylor coefficients, aligned with `layout().exponents()`.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn taylor_coeff(&self, exponent: &[u8]) -> C64 {
        self.layout
            .index_of(exponent)
            .map(|i| self.coeffs[i])
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Mixed partial derivative: Taylor coefficient times the product of factorials.
    pub fn derivative(&self, exponent: &[u8]) -> C64 {
        let fact: f64 = exponent.iter().map(|&k| factorial(k as usize)).product();
        self.taylor_coeff(exponent) * fact
    }

    fn same_layout(&self, other: &Self) {
        debug_assert!(
            Arc::ptr_eq(&self.layout, &other.layout),
            "jets over different layouts"
        );
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.same_layout(other);
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len()];
        for &(i, j, k) in &self.layout.products {
            out[k as usize] += self.coeffs[i as usize] * other.coeffs[j as usize];
        }
        Self {
            layout: self.layout.clone(),
            coeffs: out,
        }
    }

    /// Applies `f(c0 + y) = sum_k taylor[k] y^k` where `c0` is the constant term.
    fn compose(&self, taylor: [C64; JET_ORDER + 1]) -> Self {
        let mut y = self.clone();
        y.coeffs[0] = C64::new(0.0, 0.0);
        // Horner in the nilpotent part.
        let mut acc = Self::constant(&self.layout, taylor[JET_ORDER]);
        for k in (0..JET_ORDER).rev() {
            acc = acc.mul_ref(&y);
            acc.coeffs[0] += taylor[k];
        }
        acc
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        self.same_layout(&rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        self.same_layout(&rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.mul_ref(&rhs)
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        self.mul_ref(&rhs.recip())
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for a in self.coeffs.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Scalar for Jet {
    fn constant_like(&self, c: C64) -> Self {
        Jet::constant(&self.layout, c)
    }

    fn value(&self) -> C64 {
        self.coeffs[0]
    }

    fn scale(&self, c: C64) -> Self {
        Self {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    fn add_const(&self, c: C64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    fn recip(&self) -> Self {
        // 1/(c0 (1 + y/c0)) keeps the series coefficients of unit size
        let inv = self.coeffs[0].inv();
        let one = C64::new(1.0, 0.0);
        let t = [one, -one, one, -one, one];
        self.scale(inv).compose(t).scale(inv)
    }

    fn ln(&self) -> Self {
        let c0 = self.coeffs[0];
        let mut t = [C64::new(0.0, 0.0); JET_ORDER + 1];
        for (k, slot) in t.iter_mut().enumerate().skip(1) {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *slot = C64::new(sign / k as f64, 0.0);
        }
        let mut out = self.scale(c0.inv()).compose(t);
        out.coeffs[0] = Complex64::ln(c0);
        out
    }

    fn exp(&self) -> Self {
        let e0 = Complex64::exp(self.coeffs[0]);
        let mut t = [C64::new(0.0, 0.0); JET_ORDER + 1];
        for (k, slot) in t.iter_mut().enumerate() {
            *slot = e0 / factorial(k);
        }
        self.compose(t)
    }

    fn powf(&self, alpha: f64) -> Self {
        let c0 = self.coeffs[0];
        let mut t = [C64::new(0.0, 0.0); JET_ORDER + 1];
        let mut binom = 1.0;
        for (k, slot) in t.iter_mut().enumerate() {
            if k > 0 {
                binom *= (alpha - (k - 1) as f64) / k as f64;
            }
            *slot = C64::new(binom, 0.0);
        }
        self.scale(c0.inv()).compose(t).scale(Complex64::powf(c0, alpha))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn layout_sizes_are_binomial() {
        // C(m + 4, 4)
        assert_eq!(JetLayout::get(1).len(), 5);
        assert_eq!(JetLayout::get(2).len(), 15);
        assert_eq!(JetLayout::get(4).len(), 70);
        assert_eq!(JetLayout::get(6).len(), 210);
    }

    #[test]
    fn univariate_reciprocal_series() {
        let l = JetLayout::get(1);
        let x = Jet::variable(&l, 0, c(0.5, 0.0));
        let one_minus = x.constant_like(c(1.0, 0.0)) - x;
        let r = one_minus.recip();
        // 1/(1-x) at x=0.5: derivatives k!/(0.5)^{k+1}
        for k in 0..=4u8 {
            let d = r.derivative(&[k]);
            let expect = factorial(k as usize) / 0.5f64.powi(k as i32 + 1);
            assert!((d - expect).norm() < 1e-12 * expect, "k={k}");
        }
    }

    #[test]
    fn log_exp_roundtrip() {
        let l = JetLayout::get(2);
        let x = Jet::variable(&l, 0, c(0.2, 0.1));
        let y = Jet::variable(&l, 1, c(-0.3, 0.4));
        let f = x.clone() * y.clone() + x.exp() - y.scale(c(0.0, 2.0));
        let back = f.exp().ln();
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn powf_agrees_with_exp_ln() {
        let l = JetLayout::get(2);
        let x = Jet::variable(&l, 0, c(1.3, 0.2));
        let y = Jet::variable(&l, 1, c(0.1, -0.4));
        let f = x + y.clone() * y;
        let a = f.powf(-2.5);
        let b = (f.ln().scale(c(-2.5, 0.0))).exp();
        for (p, q) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((p - q).norm() < 1e-12 * (1.0 + q.norm()));
        }
    }

    #[test]
    fn mixed_partial_of_product() {
        let l = JetLayout::get(2);
        let x = Jet::variable(&l, 0, c(0.7, 0.0));
        let y = Jet::variable(&l, 1, c(-0.2, 0.0));
        // f = x^2 y^2, d^2/dx^2 d^2/dy^2 f = 4
        let f = x.clone() * x * y.clone() * y;
        assert!((f.derivative(&[2, 2]) - 4.0).norm() < 1e-14);
        // d/dx d/dy f = 4 x y
        assert!((f.derivative(&[1, 1]) - 4.0 * 0.7 * -0.2).norm() < 1e-14);
    }
}
