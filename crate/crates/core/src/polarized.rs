//! Jets of `log K` in the polarized variables `(z, s)`, `s <-> conj(z)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{Jet, JetLayout};
use crate::kernel::KernelModel;
use crate::scalar::{Scalar, C64};

/// Which slots of the polarized kernel are expanded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Vary {
    Both,
    HolomorphicOnly,
    ConjugateOnly,
}

/// Jet of `K(z, s)` around `(z0, s0)` in `2n` variables. Slots that do not
/// vary are held constant (their derivatives vanish).
pub fn kernel_jet(k: &KernelModel, z0: &[C64], s0: &[C64], vary: Vary) -> Result<Jet> {
    let n = k.dim();
    k.domain().check_dim(z0)?;
    k.domain().check_dim(s0)?;
    let layout = JetLayout::get(2 * n);
    let z: Vec<Jet> = (0..n)
        .map(|i| match vary {
            Vary::ConjugateOnly => Jet::constant(&layout, z0[i]),
            _ => Jet::variable(&layout, i, z0[i]),
        })
        .collect();
    let s: Vec<Jet> = (0..n)
        .map(|i| match vary {
            Vary::HolomorphicOnly => Jet::constant(&layout, s0[i]),
            _ => Jet::variable(&layout, n + i, s0[i]),
        })
        .collect();
    k.polarized(&z, &s)
}

/// Jet of `log K(z, s)` around `(z0, s0)`; fails at kernel zeros.
pub fn log_kernel_jet(k: &KernelModel, z0: &[C64], s0: &[C64], vary: Vary) -> Result<Jet> {
    let kj = kernel_jet(k, z0, s0, vary)?;
    let v = kj.value();
    if v.norm() == 0.0 || !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::KernelZeroAtPair);
    }
    Ok(kj.ln())
}

/// All mixed partials `∂^a_z ∂^b_{z̄} log K(z, z)` at `p` up to total order 4.
#[derive(Clone, Debug)]
pub struct PolarizedJet {
    base: Vec<C64>,
    jet: Jet,
}

impl PolarizedJet {
    pub fn base(&self) -> &[C64] {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn order(&self) -> usize {
        crate::jet::JET_ORDER
    }

    pub fn jet(&self) -> &Jet {
        &self.jet
    }

    /// `∂^a_z ∂^b_{z̄} log K` at the base point.
    pub fn coeff(&self, a: &[u8], b: &[u8]) -> C64 {
        let mut e = Vec::with_capacity(a.len() + b.len());
        e.extend_from_slice(a);
        e.extend_from_slice(b);
        self.jet.derivative(&e)
    }

    /// Derivative with one holomorphic index list and one conjugate index
    /// list, e.g. `d(&[i, k], &[j])` for `∂_i ∂_k ∂_{j̄}`.
    pub fn d(&self, holo: &[usize], anti: &[usize]) -> C64 {
        let n = self.dim();
        let mut a = vec![0u8; n];
        let mut b = vec![0u8; n];
        for &i in holo {
            a[i] += 1;
        }
        for &j in anti {
            b[j] += 1;
        }
        self.coeff(&a, &b)
    }

    /// Coefficient table keyed by `"a|b"` exponent strings.
    pub fn to_table(&self) -> BTreeMap<String, [f64; 2]> {
        let n = self.dim();
        self.jet
            .layout()
            .exponents()
            .iter()
            .map(|e| {
                let key = format!(
                    "{}|{}",
                    join(&e[..n]),
                    join(&e[n..])
                );
                let v = self.jet.derivative(e);
                (key, [v.re, v.im])
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Dump<'a> {
            schema_version: u32,
            base: &'a [C64],
            order: usize,
            coefficients: BTreeMap<String, [f64; 2]>,
        }
        serde_json::to_string_pretty(&Dump {
            schema_version: crate::SCHEMA_VERSION,
            base: &self.base,
            order: self.order(),
            coefficients: self.to_table(),
        })
        .expect("jet dump serializes")
    }
}

fn join(e: &[u8]) -> String {
    e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Expands `log K(z, s)` at `(p, conj p)`.
pub fn polarized_log_jet(k: &KernelModel, p: &[C64]) -> Result<PolarizedJet> {
    if !k.domain().contains(p)? {
        return Err(Error::OutsideDomain);
    }
    let s0: Vec<C64> = p.iter().map(|c| c.conj()).collect();
    let kj = kernel_jet(k, p, &s0, Vary::Both)?;
    let v = kj.value();
    if !(v.re > 0.0) || !v.re.is_finite() {
        return Err(Error::KernelNotPolarizable(format!(
            "K(p, p) = {v} is not positive"
        )));
    }
    Ok(PolarizedJet {
        base: p.to_vec(),
        jet: kj.ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use crate::kernel::closed_form_kernel;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn disc_origin_coefficients() {
        let k = closed_form_kernel(&DomainSpec::Disc).unwrap();
        let j = polarized_log_jet(&k, &[c(0.0, 0.0)]).unwrap();
        assert!((j.coeff(&[0], &[0]) - (1.0 / PI).ln()).norm() < 1e-15);
        assert!((j.coeff(&[1], &[1]) - 2.0).norm() < 1e-14);
        assert!(j.coeff(&[2], &[1]).norm() < 1e-14);
        assert!(j.coeff(&[1], &[2]).norm() < 1e-14);
        // -2 log(1 - u) = 2u + u^2 + ..., so ∂²∂̄² = 2! 2! * 1
        assert!((j.coeff(&[2], &[2]) - 4.0).norm() < 1e-13);
    }

    #[test]
    fn ball_origin_metric() {
        let k = closed_form_kernel(&DomainSpec::ball(2)).unwrap();
        let j = polarized_log_jet(&k, &[c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((j.d(&[0], &[0]) - 3.0).norm() < 1e-14);
        assert!((j.d(&[1], &[1]) - 3.0).norm() < 1e-14);
        assert!(j.d(&[0], &[1]).norm() < 1e-14);
    }

    #[test]
    fn reality_symmetry_is_exact_for_closed_forms() {
        let k = closed_form_kernel(&DomainSpec::ball(2)).unwrap();
        let j = polarized_log_jet(&k, &[c(0.2, -0.1), c(0.3, 0.4)]).unwrap();
        let layout = j.jet().layout().clone();
        for e in layout.exponents() {
            let (a, b) = e.split_at(2);
            let lhs = j.coeff(a, b);
            let rhs = j.coeff(b, a).conj();
            assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()), "{e:?}");
        }
    }

    #[test]
    fn outside_point_rejected() {
        let k = closed_form_kernel(&DomainSpec::Disc).unwrap();
        assert!(matches!(
            polarized_log_jet(&k, &[c(1.2, 0.0)]),
            Err(Error::OutsideDomain)
        ));
    }

    #[test]
    fn table_keys() {
        let k = closed_form_kernel(&DomainSpec::Disc).unwrap();
        let j = polarized_log_jet(&k, &[c(0.0, 0.0)]).unwrap();
        let t = j.to_table();
        assert_eq!(t.len(), 15);
        assert!((t["1|1"][0] - 2.0).abs() < 1e-14);
        assert!(j.to_json().contains("\"schema_version\": 1"));
    }
}
