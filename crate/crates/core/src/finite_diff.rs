//! Finite-difference oracle for mixed Wirtinger derivatives of `log K(z, z)`.
//!
//! Works only with the real function `x -> log K(z(x), z(x))` on `R^{2n}`, so
//! it is independent of the jet machinery. Wirtinger operators are expanded
//! into real partials (`∂_z = (∂_x - i ∂_y)/2`, `∂_{z̄} = (∂_x + i ∂_y)/2`),
//! each real partial is a tensor-product central difference, and one
//! Richardson step removes the `h^2` error term.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::kernel::KernelModel;
use crate::scalar::C64;

/// Relative step (times boundary distance) per total derivative order.
fn step_for_order(order: usize) -> f64 {
    match order {
        1 => 2e-3,
        2 => 5e-3,
        3 => 1e-2,
        _ => 2e-2,
    }
}

/// One-dimensional central stencils `(offset, weight)` of second-order accuracy.
fn stencil(order: u8) -> &'static [(i32, f64)] {
    match order {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => unreachable!("order checked by caller"),
    }
}

pub struct FdOracle<'a> {
    k: &'a KernelModel,
    p: Vec<C64>,
    scale: f64,
    cache: HashMap<(u64, Vec<i32>), f64>,
}

impl<'a> FdOracle<'a> {
    pub fn new(k: &'a KernelModel, p: &[C64]) -> Result<Self> {
        let delta = k.domain().boundary_distance(p)?;
        Ok(Self {
            k,
            p: p.to_vec(),
            scale: delta.min(1.0),
            cache: HashMap::new(),
        })
    }

    fn f(&mut self, h: f64, offsets: &[i32]) -> Result<f64> {
        let key = (h.to_bits(), offsets.to_vec());
        if let Some(&v) = self.cache.get(&key) {
            return Ok(v);
        }
        let n = self.p.len();
        let z: Vec<C64> = (0..n)
            .map(|j| self.p[j] + C64::new(h * offsets[2 * j] as f64, h * offsets[2 * j + 1] as f64))
            .collect();
        if !self.k.domain().contains(&z)? {
            return Err(Error::StencilExitsDomain);
        }
        let v = self.k.diagonal(&z)?.ln();
        self.cache.insert(key, v);
        Ok(v)
    }

    fn real_partial_at(&mut self, alpha: &[u8], h: f64) -> Result<f64> {
        let dims = alpha.len();
        let stencils: Vec<&[(i32, f64)]> = alpha.iter().map(|&a| stencil(a)).collect();
        let total: usize = stencils.iter().map(|s| s.len()).product();
        let mut acc = 0.0;
        let mut offsets = vec![0i32; dims];
        for flat in 0..total {
            let mut rest = flat;
            let mut w = 1.0;
            for d in 0..dims {
                let s = stencils[d];
                let (o, wd) = s[rest % s.len()];
                rest /= s.len();
                offsets[d] = o;
                w *= wd;
            }
            acc += w * self.f(h, &offsets)?;
        }
        let order: i32 = alpha.iter().map(|&a| a as i32).sum();
        Ok(acc / h.powi(order))
    }

    /// Real partial `∂^alpha f` over `(x_1, y_1, .., x_n, y_n)`.
    pub fn real_partial(&mut self, alpha: &[u8]) -> Result<f64> {
        let order: usize = alpha.iter().map(|&a| a as usize).sum();
        if order == 0 {
            return self.f(0.0, &vec![0; alpha.len()]);
        }
        let h = step_for_order(order) * self.scale;
        let coarse = self.real_partial_at(alpha, h)?;
        let fine = self.real_partial_at(alpha, 0.5 * h)?;
        Ok((4.0 * fine - coarse) / 3.0)
    }

    /// `∂^a_z ∂^b_{z̄} log K(z, z)` at the base point.
    pub fn wirtinger(&mut self, a: &[u8], b: &[u8]) -> Result<C64> {
        let n = self.p.len();
        let order: usize = a.iter().chain(b).map(|&x| x as usize).sum();
        if order > 4 {
            return Err(Error::OrderTooHigh(order));
        }
        // polynomial in real partials: exponent over 2n vars -> coefficient
        let mut poly: HashMap<Vec<u8>, C64> = HashMap::new();
        poly.insert(vec![0; 2 * n], C64::new(1.0, 0.0));
        let apply = |poly: &mut HashMap<Vec<u8>, C64>, var: usize, sign: f64| {
            let mut next: HashMap<Vec<u8>, C64> = HashMap::new();
            for (e, c) in poly.iter() {
                let mut ex = e.clone();
                ex[2 * var] += 1;
                *next.entry(ex).or_insert(C64::new(0.0, 0.0)) += c * 0.5;
                let mut ey = e.clone();
                ey[2 * var + 1] += 1;
                *next.entry(ey).or_insert(C64::new(0.0, 0.0)) += c * C64::new(0.0, 0.5 * sign);
            }
            *poly = next;
        };
        for j in 0..n {
            for _ in 0..a[j] {
                apply(&mut poly, j, -1.0);
            }
            for _ in 0..b[j] {
                apply(&mut poly, j, 1.0);
            }
        }
        let mut terms: Vec<(Vec<u8>, C64)> = poly.into_iter().collect();
        terms.sort_by(|x, y| x.0.cmp(&y.0));
        let mut acc = C64::new(0.0, 0.0);
        for (alpha, c) in terms {
            if c.norm() == 0.0 {
                continue;
            }
            acc += c * self.real_partial(&alpha)?;
        }
        Ok(acc)
    }
}

/// Finite-difference estimate of `∂^a_z ∂^b_{z̄} log K(z, z)` at `p`.
pub fn finite_difference_check(k: &KernelModel, p: &[C64], a: &[u8], b: &[u8]) -> Result<C64> {
    if a.len() != p.len() || b.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: a.len().max(b.len()),
        });
    }
    if a.iter().chain(b).all(|&x| x == 0) {
        return Ok(C64::new(k.diagonal(p)?.ln(), 0.0));
    }
    FdOracle::new(k, p)?.wirtinger(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use crate::kernel::closed_form_kernel;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn disc_metric_by_differences() {
        let k = closed_form_kernel(&DomainSpec::Disc).unwrap();
        let g0 = finite_difference_check(&k, &[c(0.0, 0.0)], &[1], &[1]).unwrap();
        assert!((g0 - 2.0).norm() < 1e-8);
        let g = finite_difference_check(&k, &[c(0.3, 0.0)], &[1], &[1]).unwrap();
        let exact = 2.0 / (1.0f64 - 0.09).powi(2);
        assert!((g - exact).norm() < 1e-6 * exact);
    }

    #[test]
    fn zeroth_order_is_exact() {
        let k = closed_form_kernel(&DomainSpec::Disc).unwrap();
        let v = finite_difference_check(&k, &[c(0.4, 0.1)], &[0], &[0]).unwrap();
        assert_eq!(v.re, k.diagonal(&[c(0.4, 0.1)]).unwrap().ln());
    }

    #[test]
    fn fourth_order_at_disc_centre() {
        let k = closed_form_kernel(&DomainSpec::Disc).unwrap();
        let v = finite_difference_check(&k, &[c(0.0, 0.0)], &[2], &[2]).unwrap();
        assert!((v - 4.0).norm() < 4e-4, "{v}");
    }

    #[test]
    fn stencil_outside_domain_is_reported() {
        let k = closed_form_kernel(&DomainSpec::Annulus { r: 0.5 }).unwrap();
        // the oracle scales its step with the boundary distance, so it stays inside
        assert!(finite_difference_check(&k, &[c(0.7, 0.0)], &[1], &[1]).is_ok());
        let mut o = FdOracle::new(&k, &[c(0.7, 0.0)]).unwrap();
        assert!(matches!(o.f(0.5, &[1, 0]), Err(Error::StencilExitsDomain)));
    }
}
