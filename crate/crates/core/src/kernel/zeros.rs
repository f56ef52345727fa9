//! Locating zeros of `K(., z0)` on the real axis.
//!
//! For kernels whose polarization has real Taylor coefficients (the annulus,
//! the disc family) `K(x, x0)` is real for real `x, x0`, so a sign change
//! brackets a zero. Bisection is followed by a few complex Newton steps using
//! the jet derivative.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{Jet, JetLayout};
use crate::kernel::KernelModel;
use crate::scalar::{Scalar, C64};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelZero {
    /// Zero of `K(., base)`.
    pub zeta: C64,
    pub base: C64,
    /// `|K(zeta, base)|` after refinement.
    pub residual: f64,
    /// Sign-change bracket on the real axis before refinement.
    pub bracket: (f64, f64),
}

/// Scans `x` over `samples` equispaced points of `(lo, hi)` for a sign change
/// of the real part of `K(x, x0)`, bisects it and polishes the root.
pub fn find_real_axis_zero(
    k: &KernelModel,
    x0: f64,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<Option<KernelZero>> {
    if k.dim() != 1 {
        return Err(Error::UnsupportedDomain("real-axis zero scan (dimension != 1)"));
    }
    let w = [C64::new(x0, 0.0)];
    let f = |x: f64| -> Result<f64> { Ok(k.eval(&[C64::new(x, 0.0)], &w)?.re) };
    let samples = samples.max(2);
    let mut prev_x = lo;
    let mut prev = f(lo)?;
    for i in 1..=samples {
        let x = lo + (hi - lo) * i as f64 / samples as f64;
        let cur = f(x)?;
        if prev == 0.0 || prev.signum() != cur.signum() {
            let (mut a, mut b, mut fa) = (prev_x, x, prev);
            let bracket = (a, b);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = f(m)?;
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            let zeta = polish(k, C64::new(0.5 * (a + b), 0.0), w[0])?;
            let residual = k.eval(&[zeta], &w)?.norm();
            return Ok(Some(KernelZero {
                zeta,
                base: w[0],
                residual,
                bracket,
            }));
        }
        prev_x = x;
        prev = cur;
    }
    Ok(None)
}

/// Newton refinement of `z -> K(z, w)` in the complex plane.
fn polish(k: &KernelModel, start: C64, w: C64) -> Result<C64> {
    let layout = JetLayout::get(1);
    let s = [Jet::constant(&layout, w.conj())];
    let mut z = start;
    let mut best = (k.eval(&[z], &[w])?.norm(), z);
    for _ in 0..8 {
        let zj = [Jet::variable(&layout, 0, z)];
        let kj = k.polarized(&zj, &s)?;
        let d = kj.derivative(&[1]);
        if d.norm() == 0.0 {
            break;
        }
        z -= kj.value() / d;
        let r = k.eval(&[z], &[w])?.norm();
        if r < best.0 {
            best = (r, z);
        }
        if r == 0.0 {
            break;
        }
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use crate::kernel::closed_form_kernel;

    #[test]
    fn annulus_has_a_real_zero_against_point_seven() {
        let k = closed_form_kernel(&DomainSpec::Annulus { r: 0.5 }).unwrap();
        let z = find_real_axis_zero(&k, 0.7, -0.9999, -0.5001, 400)
            .unwrap()
            .expect("sign change");
        assert!(z.residual < 1e-10);
        assert!(z.zeta.re < -0.5 && z.zeta.re > -1.0);
        assert!(z.zeta.im.abs() < 1e-12);
    }

    #[test]
    fn disc_kernel_has_no_zero() {
        let k = closed_form_kernel(&DomainSpec::Disc).unwrap();
        assert!(find_real_axis_zero(&k, 0.7, -0.999, 0.999, 400)
            .unwrap()
            .is_none());
    }
}
