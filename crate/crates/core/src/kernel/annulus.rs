//! Bergman kernel of the annulus `{ r < |z| < 1 }`.
//!
//! With `u = z conj(w)` the kernel is the Laurent series
//! `sum_k u^k / nu_k`, `nu_k = pi (1 - r^{2k+2}) / (k + 1)` for `k != -1` and
//! `nu_{-1} = 2 pi log(1/r)`. Splitting `1 / (1 - x) = 1 + x / (1 - x)` in each
//! half of the series sums the slowly converging parts in closed form:
//!
//! ```text
//! K = 1/(pi (1-u)^2) + v^2/(pi r^2 (1-v)^2) + 1/(2 pi log(1/r) u)
//!   + sum_{k>=0} (k+1) q_{k+1} u^k / pi + sum_{m>=2} (m-1) q_{m-1} v^m / (pi r^2)
//! ```
//!
//! where `v = r^2 / u` and `q_j = r^{2j} / (1 - r^{2j})`. Both remainders
//! decay like `(r^2 |u|)^k` resp. `(r^2 |v|)^m`, so the truncation is certified
//! by an explicit geometric tail bound all the way up to either boundary
//! circle.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, C64};

/// Hard cap on remainder terms; reached only when `r` is very close to 1.
pub const MAX_TERMS: usize = 200_000;

/// Absolute tolerance on the neglected remainder (including a margin for
/// fourth derivatives).
const TAIL_TOL: f64 = 1e-19;

#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusSeries {
    r: f64,
}

impl AnnulusSeries {
    pub fn new(r: f64) -> Self {
        Self { r }
    }

    pub fn inner_radius(&self) -> f64 {
        self.r
    }

    /// Squared norm of `z^k` on the annulus.
    pub fn nu(&self, k: i32) -> f64 {
        if k == -1 {
            2.0 * PI * (1.0 / self.r).ln()
        } else {
            PI * (1.0 - self.r.powi(2 * k + 2)) / (k as f64 + 1.0)
        }
    }

    /// Plain truncated Laurent sum over `k in [-n, n]`.
    pub fn laurent_partial_sum(&self, u: C64, n: i32) -> C64 {
        (-n..=n).map(|k| u.powi(k) / self.nu(k)).sum()
    }

    /// Number of remainder terms needed for ratio `rho = r^2 |x|` so that the
    /// derivative-weighted tail `sum_{k>=N} (k+1)^5 rho^k` is below tolerance.
    fn terms_for(rho: f64, scale: f64) -> Result<usize> {
        if !(rho < 1.0) {
            return Err(Error::TruncationNotConverged {
                max_terms: MAX_TERMS,
            });
        }
        let mut term = 1.0f64;
        for n in 0..MAX_TERMS {
            let w = (n as f64 + 1.0).powi(5);
            let ratio = ((n as f64 + 2.0) / (n as f64 + 1.0)).powi(5) * rho;
            if ratio < 1.0 && w * term * scale / (1.0 - ratio) < TAIL_TOL {
                return Ok(n + 1);
            }
            term *= rho;
        }
        Err(Error::TruncationNotConverged {
            max_terms: MAX_TERMS,
        })
    }

    /// Evaluates the kernel as a function of `u = z * s` (`s` the polarized
    /// conjugate slot).
    pub fn eval<S: Scalar>(&self, u: &S) -> Result<S> {
        let r = self.r;
        let r2 = r * r;
        let u0 = u.value();
        if u0.norm() == 0.0 {
            return Err(Error::OutsideDomain);
        }
        let one = C64::new(1.0, 0.0);
        let v = u.recip().scale(C64::new(r2, 0.0));
        let q = |j: usize| {
            let x = r2.powi(j as i32);
            x / (1.0 - x)
        };

        let outer = (u.constant_like(one) - u.clone()).powi(-2).scale(C64::new(1.0 / PI, 0.0));
        let inner = (v.constant_like(one) - v.clone()).powi(-2) * v.clone() * v.clone();
        let inner = inner.scale(C64::new(1.0 / (PI * r2), 0.0));
        let log_term = u.recip().scale(C64::new(1.0 / (2.0 * PI * (1.0 / r).ln()), 0.0));

        // sum_{k>=0} (k+1) q_{k+1} u^k / pi, Horner from the top
        let n_pos = Self::terms_for(r2 * u0.norm(), r2 / (1.0 - r2))?;
        let mut pos = u.constant_like(C64::new(0.0, 0.0));
        for k in (0..n_pos).rev() {
            pos = (pos * u.clone()).add_const(C64::new((k as f64 + 1.0) * q(k + 1) / PI, 0.0));
        }

        // sum_{m>=2} (m-1) q_{m-1} v^m / (pi r^2) = v^2 sum_{j>=0} (j+1) q_{j+1} v^j / (pi r^2)
        let v0 = C64::new(r2, 0.0) / u0;
        let n_neg = Self::terms_for(r2 * v0.norm(), v0.norm_sqr() / (1.0 - r2))?;
        let mut neg = u.constant_like(C64::new(0.0, 0.0));
        for j in (0..n_neg).rev() {
            neg = (neg * v.clone()).add_const(C64::new(
                (j as f64 + 1.0) * q(j + 1) / (PI * r2),
                0.0,
            ));
        }
        let neg = neg * v.clone() * v;

        Ok(outer + inner + log_term + pos + neg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resummed_series_matches_direct_laurent_sum() {
        let s = AnnulusSeries::new(0.5);
        for &(re, im) in &[(0.4, 0.0), (-0.354, 0.0), (0.3, 0.4), (-0.2, -0.5), (0.6, 0.1)] {
            let u = C64::new(re, im);
            let direct = s.laurent_partial_sum(u, 400);
            let fast = s.eval(&u).unwrap();
            assert!(
                (direct - fast).norm() < 1e-13 * (1.0 + direct.norm()),
                "u={u}: {direct} vs {fast}"
            );
        }
    }

    #[test]
    fn norms_have_expected_values() {
        let s = AnnulusSeries::new(0.5);
        assert!((s.nu(0) - PI * 0.75).abs() < 1e-15);
        assert!((s.nu(-1) - 2.0 * PI * 2f64.ln()).abs() < 1e-15);
        // nu_{-2} = pi (r^{-2} - 1)
        assert!((s.nu(-2) - PI * 3.0).abs() < 1e-13);
    }

    #[test]
    fn evaluates_near_both_circles() {
        let s = AnnulusSeries::new(0.5);
        let near_outer = C64::new((1.0 - 1e-6f64).powi(2), 0.0);
        let near_inner = C64::new((0.5 + 1e-6f64).powi(2), 0.0);
        assert!(s.eval(&near_outer).unwrap().re > 1e10);
        assert!(s.eval(&near_inner).unwrap().re > 1e10);
    }
}
