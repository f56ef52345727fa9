//! Bergman kernel evaluators.
//!
//! A [`KernelModel`] evaluates `K(z, w)` and, more fundamentally, its
//! polarization `K(z, s)` with `s` standing in for `conj(w)`. The polarized
//! form is generic over [`Scalar`], which is how jets of `log K` are produced.

pub mod annulus;
pub mod gram;
pub mod zeros;

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::domain::{BiholoMap, DomainSpec};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, C64};

pub use annulus::AnnulusSeries;
pub use gram::GramBasis;
pub use zeros::{find_real_axis_zero, KernelZero};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Pushforward,
    GramNumerical {
        degree: usize,
        quad_order: usize,
        condition_estimate: f64,
    },
}

#[derive(Clone, Debug)]
enum Repr {
    Disc,
    Ball(usize),
    Annulus(AnnulusSeries),
    Product(Vec<KernelModel>),
    Pushforward {
        base: Box<KernelModel>,
        map: BiholoMap,
    },
    Gram(Arc<GramBasis>),
}

/// Bergman kernel of a domain.
#[derive(Clone, Debug)]
pub struct KernelModel {
    domain: DomainSpec,
    repr: Repr,
    provenance: Provenance,
}

impl KernelModel {
    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// The Gram basis behind a numerical kernel.
    pub fn gram_basis(&self) -> Option<&GramBasis> {
        match &self.repr {
            Repr::Gram(g) => Some(g),
            _ => None,
        }
    }

    /// `K(z, s)` holomorphic in all `2n` arguments; `K(z, w) = polarized(z, conj(w))`.
    pub fn polarized<S: Scalar>(&self, z: &[S], s: &[S]) -> Result<S> {
        match &self.repr {
            Repr::Disc => {
                let u = z[0].clone() * s[0].clone();
                let one = u.constant_like(C64::new(1.0, 0.0));
                Ok((one - u).powi(-2).scale(C64::new(1.0 / PI, 0.0)))
            }
            Repr::Ball(n) => {
                let mut u = z[0].clone() * s[0].clone();
                for i in 1..*n {
                    u = u + z[i].clone() * s[i].clone();
                }
                let one = u.constant_like(C64::new(1.0, 0.0));
                let nf: f64 = (1..=*n).map(|k| k as f64).product();
                let c = nf / PI.powi(*n as i32);
                Ok((one - u).powi(-(*n as i32 + 1)).scale(C64::new(c, 0.0)))
            }
            Repr::Annulus(series) => series.eval(&(z[0].clone() * s[0].clone())),
            Repr::Product(factors) => {
                let mut off = 0;
                let mut acc: Option<S> = None;
                for f in factors {
                    let d = f.dim();
                    let k = f.polarized(&z[off..off + d], &s[off..off + d])?;
                    off += d;
                    acc = Some(match acc {
                        None => k,
                        Some(a) => a * k,
                    });
                }
                Ok(acc.expect("product has factors"))
            }
            Repr::Pushforward { base, map } => {
                let x = map.inverse(z, false)?;
                let y = map.inverse(s, true)?;
                let k = base.polarized(&x, &y)?;
                let jz = map.jacobian_det(&x, false);
                let js = map.jacobian_det(&y, true);
                Ok(k / (jz * js))
            }
            Repr::Gram(g) => g.eval(z, s),
        }
    }

    /// `K(z, w)`.
    pub fn eval(&self, z: &[C64], w: &[C64]) -> Result<C64> {
        self.domain.check_dim(z)?;
        self.domain.check_dim(w)?;
        let s: Vec<C64> = w.iter().map(|c| c.conj()).collect();
        self.polarized(z, &s)
    }

    /// `K(z, z)`, real by Hermitian symmetry.
    pub fn diagonal(&self, z: &[C64]) -> Result<f64> {
        Ok(self.eval(z, z)?.re)
    }
}

/// Closed-form kernel of a model domain or a product of model domains.
/// Pushforward domains are routed through [`pushforward_kernel`].
pub fn closed_form_kernel(d: &DomainSpec) -> Result<KernelModel> {
    d.validate()?;
    let repr = match d {
        // The origin is pluripolar: the punctured disc has the disc kernel.
        DomainSpec::Disc | DomainSpec::PuncturedDisc => Repr::Disc,
        DomainSpec::Ball { n } => Repr::Ball(*n),
        DomainSpec::Annulus { r } => Repr::Annulus(AnnulusSeries::new(*r)),
        DomainSpec::Polydisc { n } => Repr::Product(
            (0..*n)
                .map(|_| closed_form_kernel(&DomainSpec::Disc))
                .collect::<Result<_>>()?,
        ),
        DomainSpec::Product { factors } => {
            Repr::Product(factors.iter().map(kernel_for).collect::<Result<_>>()?)
        }
        DomainSpec::Pushforward { map, base } => {
            let base = kernel_for(base)?;
            return pushforward_kernel(base, map.clone());
        }
    };
    Ok(KernelModel {
        domain: d.clone(),
        repr,
        provenance: Provenance::ClosedForm,
    })
}

/// The exact kernel of any supported domain (closed forms and pushforwards).
pub fn kernel_for(d: &DomainSpec) -> Result<KernelModel> {
    closed_form_kernel(d)
}

/// Transformation rule `K_F(F z, F w) = K(z, w) / (det F'(z) conj(det F'(w)))`.
pub fn pushforward_kernel(base: KernelModel, map: BiholoMap) -> Result<KernelModel> {
    let domain = DomainSpec::pushforward(base.domain.clone(), map.clone())?;
    Ok(KernelModel {
        domain,
        repr: Repr::Pushforward {
            base: Box::new(base),
            map,
        },
        provenance: Provenance::Pushforward,
    })
}

/// Numerical kernel from a degree-`degree` (Laurent) monomial basis.
pub fn gram_kernel(d: &DomainSpec, degree: usize, quad_order: usize) -> Result<KernelModel> {
    let basis = GramBasis::build(d, degree, quad_order)?;
    Ok(from_gram_basis(basis))
}

pub fn from_gram_basis(basis: GramBasis) -> KernelModel {
    KernelModel {
        domain: basis.domain().clone(),
        provenance: Provenance::GramNumerical {
            degree: basis.degree(),
            quad_order: basis.quad_order(),
            condition_estimate: basis.condition_estimate(),
        },
        repr: Repr::Gram(Arc::new(basis)),
    }
}

/// Default quadrature order for a Gram oracle of the given degree.
pub fn default_quad_order(d: &DomainSpec, degree: usize) -> usize {
    match d {
        DomainSpec::Annulus { .. } => 2 * degree + 20,
        DomainSpec::Product { factors } if factors.iter().any(|f| matches!(f, DomainSpec::Annulus { .. })) => {
            2 * degree + 20
        }
        DomainSpec::Pushforward { .. } => degree + 4,
        _ => degree + 4,
    }
}

/// Skwarczyński distance `rho = sqrt(1 - |K(z, z0)| / sqrt(K(z, z) K(z0, z0)))`.
///
/// At a kernel zero the value is exactly 1, the boundary of the range.
pub fn skwarczynski_rho(k: &KernelModel, z0: &[C64], z: &[C64]) -> Result<f64> {
    for p in [z0, z] {
        if !k.domain().contains(p)? {
            return Err(Error::OutsideDomain);
        }
    }
    let kzz = k.diagonal(z)?;
    let k00 = k.diagonal(z0)?;
    if !(kzz > 0.0 && k00 > 0.0) {
        return Err(Error::KernelNotPolarizable(
            "kernel is not positive on the diagonal".into(),
        ));
    }
    let off = k.eval(z, z0)?.norm();
    let t = (off / (kzz * k00).sqrt()).min(1.0);
    Ok((1.0 - t).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn closed_form_values_at_origin() {
        let disc = closed_form_kernel(&DomainSpec::Disc).unwrap();
        assert!((disc.diagonal(&[c(0.0, 0.0)]).unwrap() - 1.0 / PI).abs() < 1e-15);
        let ball = closed_form_kernel(&DomainSpec::ball(2)).unwrap();
        let v = ball.diagonal(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((v - 2.0 / (PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn punctured_disc_uses_disc_evaluator() {
        let a = closed_form_kernel(&DomainSpec::Disc).unwrap();
        let b = closed_form_kernel(&DomainSpec::PuncturedDisc).unwrap();
        let (z, w) = ([c(0.5, 0.1)], [c(-0.2, 0.3)]);
        assert_eq!(a.eval(&z, &w).unwrap(), b.eval(&z, &w).unwrap());
    }

    #[test]
    fn scaling_pushforward_divides_by_jacobian() {
        let disc = closed_form_kernel(&DomainSpec::Disc).unwrap();
        let big = pushforward_kernel(disc, BiholoMap::scaling(1, c(2.0, 0.0))).unwrap();
        let v = big.diagonal(&[c(0.0, 0.0)]).unwrap();
        assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn hartogs_kernel_is_product_over_jacobian() {
        let h = kernel_for(&DomainSpec::hartogs_triangle()).unwrap();
        let base = [c(0.3, 0.0), c(0.5, 0.0)];
        let img = [c(0.15, 0.0), c(0.5, 0.0)];
        let disc = |x: f64| 1.0 / (PI * (1.0 - x * x).powi(2));
        let expect = disc(0.3) * disc(0.5) / 0.25;
        let got = h.diagonal(&img).unwrap();
        assert!((got - expect).abs() < 1e-12 * expect);
        assert!(h.domain().contains(&img).unwrap());
        let _ = base;
    }

    #[test]
    fn rho_examples() {
        let disc = closed_form_kernel(&DomainSpec::Disc).unwrap();
        let z0 = [c(0.0, 0.0)];
        assert_eq!(skwarczynski_rho(&disc, &z0, &z0).unwrap(), 0.0);
        let r = skwarczynski_rho(&disc, &z0, &[c(0.5, 0.0)]).unwrap();
        assert!((r - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gram_center_value_is_exact() {
        let k = gram_kernel(&DomainSpec::Disc, 10, 14).unwrap();
        let v = k.diagonal(&[c(0.0, 0.0)]).unwrap();
        assert!((v - 1.0 / PI).abs() < 1e-12);
    }
}
