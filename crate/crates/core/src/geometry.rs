//! Bergman metric, curvature, representative coordinates and the diastasis.
//!
//! Matrix conventions: `G[a][b] = g_{a b̄}` and `H = G^{-1}`, so the inverse
//! metric entry `g^{b̄ a}` is `H[b][a]`. The rank-4 curvature tensor is
//! stored row-major over `(i, j̄, k, l̄)`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::domain::{BiholoMap, DomainSpec};
use crate::error::{Error, Result};
use crate::jet::{Jet, JetLayout};
use crate::kernel::{pushforward_kernel, KernelModel, Provenance};
use crate::polarized::{log_kernel_jet, polarized_log_jet, PolarizedJet, Vary};
use crate::scalar::{Scalar, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Largest tolerated `|G - G^H| / |G|` before the metric is rejected.
const HERMITIAN_REJECT: f64 = 1e-8;

fn conj_vec(v: &[C64]) -> Vec<C64> {
    v.iter().map(|c| c.conj()).collect()
}

fn unit(n: usize, i: usize) -> Vec<u8> {
    let mut e = vec![0u8; n];
    e[i] = 1;
    e
}

/// `∂_{z_a} ∂_{s_b}` exponent in the `2n`-variable layout.
fn mixed(n: usize, a: usize, b: usize) -> Vec<u8> {
    let mut e = vec![0u8; 2 * n];
    e[a] += 1;
    e[n + b] += 1;
    e
}

fn matrix_json(m: &DMatrix<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Bergman metric `g_{a b̄}` at a point.
#[derive(Clone, Debug)]
pub struct MetricTensor {
    base: Vec<C64>,
    g: DMatrix<C64>,
    inverse: DMatrix<C64>,
    eigenvalues: Vec<f64>,
    hermitian_defect: f64,
}

impl MetricTensor {
    fn from_matrix(base: Vec<C64>, raw: DMatrix<C64>) -> Result<Self> {
        let scale = raw.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::SingularMetric);
        }
        let defect = (&raw - raw.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max) / scale;
        if defect > HERMITIAN_REJECT {
            return Err(Error::SingularMetric);
        }
        let g = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(g.clone());
        let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        eigenvalues.sort_by(f64::total_cmp);
        if !(eigenvalues[0] > 0.0) {
            return Err(Error::SingularMetric);
        }
        let inverse = g.clone().try_inverse().ok_or(Error::SingularMetric)?;
        Ok(Self {
            base,
            g,
            inverse,
            eigenvalues,
            hermitian_defect: defect,
        })
    }

    pub fn base(&self) -> &[C64] {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `g_{a b̄}` (Hermitian part of the jet coefficients).
    pub fn entry(&self, a: usize, b: usize) -> C64 {
        self.g[(a, b)]
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.g
    }

    /// `H = G^{-1}`; `g^{b̄ a} = H[b][a]`.
    pub fn inverse(&self) -> &DMatrix<C64> {
        &self.inverse
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Relative size of the anti-Hermitian part of the raw coefficients.
    pub fn hermitian_defect(&self) -> f64 {
        self.hermitian_defect
    }

    pub fn det(&self) -> f64 {
        self.g.determinant().re
    }

    /// `sum g_{a b̄} w_a conj(w_b)`.
    pub fn quad_form(&self, w: &[C64]) -> f64 {
        let n = self.dim();
        let mut acc = ZERO;
        for a in 0..n {
            for b in 0..n {
                acc += w[a] * self.g[(a, b)] * w[b].conj();
            }
        }
        acc.re
    }

    /// `sum g^{b̄ a} v_a conj(v_b)` for a covector `v_a = ∂_a f`.
    pub fn dual_form(&self, v: &[C64]) -> f64 {
        let n = self.dim();
        let mut acc = ZERO;
        for a in 0..n {
            for b in 0..n {
                acc += v[a] * self.inverse[(b, a)] * v[b].conj();
            }
        }
        acc.re
    }

    /// Hermitian square root `S` with `S S = G`.
    pub fn sqrt(&self) -> DMatrix<C64> {
        let eig = SymmetricEigen::new(self.g.clone());
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.sqrt(), 0.0)));
        &eig.eigenvectors * d * eig.eigenvectors.adjoint()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "base": self.base,
            "g": matrix_json(&self.g),
            "det": self.det(),
            "min_eigenvalue": self.min_eigenvalue(),
        })
    }
}

/// Jet of `log K` at `(p, conj p)` together with the metric read from it.
#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub jet: PolarizedJet,
    pub metric: MetricTensor,
}

impl LocalGeometry {
    pub fn at(k: &KernelModel, p: &[C64]) -> Result<Self> {
        let jet = polarized_log_jet(k, p)?;
        let n = p.len();
        let raw = DMatrix::from_fn(n, n, |a, b| jet.d(&[a], &[b]));
        let metric = MetricTensor::from_matrix(p.to_vec(), raw)?;
        Ok(Self { jet, metric })
    }

    pub fn curvature(&self) -> CurvatureTensor {
        let n = self.metric.dim();
        let h = self.metric.inverse();
        let third_holo: Vec<C64> = (0..n * n * n)
            .map(|t| {
                let (i, k, b) = (t / (n * n), (t / n) % n, t % n);
                self.jet.d(&[i, k], &[b])
            })
            .collect();
        let third_anti: Vec<C64> = (0..n * n * n)
            .map(|t| {
                let (a, j, l) = (t / (n * n), (t / n) % n, t % n);
                self.jet.d(&[a], &[j, l])
            })
            .collect();
        let mut r = vec![ZERO; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut acc = -self.jet.d(&[i, k], &[j, l]);
                        for a in 0..n {
                            for b in 0..n {
                                acc += h[(b, a)]
                                    * third_holo[(i * n + k) * n + b]
                                    * third_anti[(a * n + j) * n + l];
                            }
                        }
                        r[((i * n + j) * n + k) * n + l] = acc;
                    }
                }
            }
        }
        CurvatureTensor {
            base: self.metric.base.clone(),
            n,
            r,
        }
    }

    /// `sum g^{b̄ a} ∂_a log K conj(∂_b log K)`.
    pub fn log_gradient_sq(&self) -> f64 {
        let n = self.metric.dim();
        let v: Vec<C64> = (0..n).map(|a| self.jet.d(&[a], &[])).collect();
        self.metric.dual_form(&v)
    }
}

/// `R_{i j̄ k l̄}` at a point.
#[derive(Clone, Debug)]
pub struct CurvatureTensor {
    base: Vec<C64>,
    n: usize,
    r: Vec<C64>,
}

impl CurvatureTensor {
    pub fn base(&self) -> &[C64] {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        let n = self.n;
        self.r[((i * n + j) * n + k) * n + l]
    }

    /// Entries in row-major `(i, j̄, k, l̄)` order.
    pub fn entries(&self) -> &[C64] {
        &self.r
    }

    /// `sum R_{i j̄ k l̄} X_i conj(X_j) X_k conj(X_l) / |X|_g^4`, complex.
    pub fn sectional(&self, metric: &MetricTensor, x: &[C64]) -> Result<C64> {
        if x.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::ZeroDirection);
        }
        let n = self.n;
        let mut num = ZERO;
        for i in 0..n {
            for j in 0..n {
                let xij = x[i] * x[j].conj();
                for k in 0..n {
                    for l in 0..n {
                        num += self.get(i, j, k, l) * xij * x[k] * x[l].conj();
                    }
                }
            }
        }
        let den = metric.quad_form(x);
        Ok(num / (den * den))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "index_order": "row-major (i, jbar, k, lbar)",
            "dim": self.n,
            "entries": self.r.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
        })
    }
}

pub fn metric_at(k: &KernelModel, p: &[C64]) -> Result<MetricTensor> {
    Ok(LocalGeometry::at(k, p)?.metric)
}

pub fn curvature_tensor(k: &KernelModel, p: &[C64]) -> Result<CurvatureTensor> {
    Ok(LocalGeometry::at(k, p)?.curvature())
}

/// Holomorphic sectional curvature along `x` at `p`.
pub fn hsc(k: &KernelModel, p: &[C64], x: &[C64]) -> Result<f64> {
    k.domain().check_dim(x)?;
    let lg = LocalGeometry::at(k, p)?;
    Ok(lg.curvature().sectional(&lg.metric, x)?.re)
}

/// Value of the representative coordinate map at a query point.
#[derive(Clone, Debug)]
pub struct RepCoords {
    pub w: Vec<C64>,
    pub base_metric: MetricTensor,
    /// `∂ w_a / ∂ z_c` at the query point.
    pub jacobian: DMatrix<C64>,
}

impl RepCoords {
    pub fn quad_form(&self) -> f64 {
        self.base_metric.quad_form(&self.w)
    }

    pub fn jacobian_det(&self) -> C64 {
        self.jacobian.determinant()
    }
}

fn rep_coords_with(k: &KernelModel, base: &LocalGeometry, z: &[C64]) -> Result<RepCoords> {
    let p = base.metric.base();
    let n = p.len();
    if !k.domain().contains(z)? {
        return Err(Error::OutsideDomain);
    }
    let jz = log_kernel_jet(k, z, &conj_vec(p), Vary::Both)?;
    let h = base.metric.inverse();
    let diff: Vec<C64> = (0..n)
        .map(|j| {
            let mut e = vec![0u8; 2 * n];
            e[n + j] = 1;
            jz.derivative(&e) - base.jet.jet().derivative(&e)
        })
        .collect();
    let w: Vec<C64> = (0..n)
        .map(|a| (0..n).map(|j| h[(j, a)] * diff[j]).sum())
        .collect();
    let jacobian = DMatrix::from_fn(n, n, |a, c| {
        (0..n).map(|j| h[(j, a)] * jz.derivative(&mixed(n, c, j))).sum()
    });
    Ok(RepCoords {
        w,
        base_metric: base.metric.clone(),
        jacobian,
    })
}

/// Representative coordinates of `z` with base point `p`.
pub fn rep_coords(k: &KernelModel, p: &[C64], z: &[C64]) -> Result<RepCoords> {
    let base = LocalGeometry::at(k, p)?;
    rep_coords_with(k, &base, z)
}

/// Diastasis `log(K(z,z) K(z0,z0) / |K(z,z0)|^2)`.
///
/// Returns `f64::INFINITY` when `K(z, z0) = 0`.
pub fn diastasis(k: &KernelModel, z0: &[C64], z: &[C64]) -> Result<f64> {
    for p in [z0, z] {
        if !k.domain().contains(p)? {
            return Err(Error::OutsideDomain);
        }
    }
    let kzz = k.eval(z, z)?;
    let k00 = k.eval(z0, z0)?;
    let off = k.eval(z, z0)?.norm();
    if off == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(kzz.re.ln() + k00.re.ln() - 2.0 * off.ln())
}

/// `-(2 / c^2) log(1 - (c^2 / 2) Q)` with `Q` the quadratic form of the
/// representative coordinates of `z` based at `p`.
pub fn diastasis_closed_form(k: &KernelModel, p: &[C64], z: &[C64], c2: f64) -> Result<f64> {
    let rc = rep_coords(k, p, z)?;
    closed_form_from_q(rc.quad_form(), c2)
}

/// `|Φ - Φ_closed| / max(1, Φ)` at `z` with base `p`.
pub fn closed_form_residual(k: &KernelModel, p: &[C64], z: &[C64], c2: f64) -> Result<f64> {
    let direct = diastasis(k, p, z)?;
    let closed = diastasis_closed_form(k, p, z, c2)?;
    Ok((direct - closed).abs() / direct.max(1.0))
}

fn closed_form_from_q(q: f64, c2: f64) -> Result<f64> {
    let arg = 1.0 - 0.5 * c2 * q;
    if !(arg > 0.0) {
        return Err(Error::QuadraticFormOutOfRange(arg));
    }
    Ok(-2.0 / c2 * arg.ln())
}

/// The two evaluations of `|∂Φ_{z0}|_g^2` at `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GradientLength {
    /// `∂Φ` contracted with the inverse metric.
    pub direct: f64,
    /// Quadratic form of the representative coordinates of `z0` based at `p`.
    pub via_rep_coords: f64,
}

impl GradientLength {
    pub fn relative_gap(&self) -> f64 {
        let s = self.direct.abs().max(self.via_rep_coords.abs());
        if s == 0.0 {
            0.0
        } else {
            (self.direct - self.via_rep_coords).abs() / s
        }
    }
}

fn gradient_with(k: &KernelModel, base: &LocalGeometry, z0: &[C64]) -> Result<GradientLength> {
    let p = base.metric.base();
    let n = p.len();
    if !k.domain().contains(z0)? {
        return Err(Error::OutsideDomain);
    }
    let j0 = log_kernel_jet(k, p, &conj_vec(z0), Vary::HolomorphicOnly)?;
    let grad: Vec<C64> = (0..n)
        .map(|a| {
            let mut e = unit(n, a);
            e.extend(std::iter::repeat(0).take(n));
            base.jet.jet().derivative(&e) - j0.derivative(&e)
        })
        .collect();
    let direct = base.metric.dual_form(&grad);
    let via_rep_coords = rep_coords_with(k, base, z0)?.quad_form();
    Ok(GradientLength {
        direct,
        via_rep_coords,
    })
}

/// `|∂Φ_{z0}|_g^2` at `p`, computed two independent ways.
pub fn gradient_length_both(k: &KernelModel, z0: &[C64], p: &[C64]) -> Result<GradientLength> {
    let base = LocalGeometry::at(k, p)?;
    gradient_with(k, &base, z0)
}

/// `|∂Φ_{z0}|_g^2` at `p` (the direct evaluation).
pub fn gradient_length_sq(k: &KernelModel, z0: &[C64], p: &[C64]) -> Result<f64> {
    Ok(gradient_length_both(k, z0, p)?.direct)
}

/// Pieces of the volume identity at `z` with base `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VolumeCheck {
    /// `det g(z)`.
    pub v: f64,
    pub jacobian_det_abs: f64,
    pub det_g_base: f64,
    pub quad_form: f64,
    pub rhs: f64,
    pub residual: f64,
}

pub fn volume_identity(k: &KernelModel, p: &[C64], z: &[C64], c2: f64) -> Result<VolumeCheck> {
    let base = LocalGeometry::at(k, p)?;
    let rc = rep_coords_with(k, &base, z)?;
    let v = metric_at(k, z)?.det();
    let n = p.len() as i32;
    let q = rc.quad_form();
    let arg = 1.0 - 0.5 * c2 * q;
    if !(arg > 0.0) {
        return Err(Error::QuadraticFormOutOfRange(arg));
    }
    let dt = rc.jacobian_det().norm();
    let det_gp = base.metric.det();
    let rhs = dt * dt * det_gp * arg.powi(-(n + 1));
    Ok(VolumeCheck {
        v,
        jacobian_det_abs: dt,
        det_g_base: det_gp,
        quad_form: q,
        rhs,
        residual: (v - rhs).abs() / v,
    })
}

/// `|V - |D_T|^2 det g(p) (1 - c^2 Q / 2)^{-(n+1)}| / V`.
pub fn volume_identity_residual(k: &KernelModel, p: &[C64], z: &[C64], c2: f64) -> Result<f64> {
    Ok(volume_identity(k, p, z, c2)?.residual)
}

/// `φ = -(c^2 Φ_{z0}(z) / 4 + 1)^{-1}`.
pub fn exhaustion_phi(k: &KernelModel, z0: &[C64], z: &[C64], c2: f64) -> Result<f64> {
    let phi = diastasis(k, z0, z)?;
    if phi.is_infinite() {
        return Err(Error::KernelZeroAtPair);
    }
    Ok(-1.0 / (0.25 * c2 * phi + 1.0))
}

/// Complex Hessian `∂_a ∂_{b̄} φ` at `z`, from the polarized jet of the diastasis.
pub fn exhaustion_hessian(k: &KernelModel, z0: &[C64], z: &[C64], c2: f64) -> Result<DMatrix<C64>> {
    for p in [z0, z] {
        if !k.domain().contains(p)? {
            return Err(Error::OutsideDomain);
        }
    }
    let n = z.len();
    let zc = conj_vec(z);
    let z0c = conj_vec(z0);
    let both = log_kernel_jet(k, z, &zc, Vary::Both)?;
    let left = log_kernel_jet(k, z, &z0c, Vary::HolomorphicOnly)?;
    let right = log_kernel_jet(k, z0, &zc, Vary::ConjugateOnly)?;
    let k00 = k.diagonal(z0)?;
    let phi_jet: Jet = (both - left - right).add_const(C64::new(k00.ln(), 0.0));
    let t = phi_jet.scale(C64::new(0.25 * c2, 0.0)).add_const(C64::new(1.0, 0.0));
    let f = -t.recip();
    Ok(DMatrix::from_fn(n, n, |a, b| f.derivative(&mixed(n, a, b))))
}

/// Smallest eigenvalue of the Hermitian part of [`exhaustion_hessian`].
pub fn hessian_min_eig(k: &KernelModel, z0: &[C64], z: &[C64], c2: f64) -> Result<f64> {
    let m = exhaustion_hessian(k, z0, z, c2)?;
    let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    Ok(SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// `|ψ'(w) / ψ(w)| (1 - |w|^2)` for `ψ(w) = exp((w + 1) / (w - 1))`.
///
/// Computed from the derivative of the exponent, so it stays finite where
/// `ψ` itself underflows.
pub fn zimmer_quantity(w: C64) -> f64 {
    let layout = JetLayout::get(1);
    let x = Jet::variable(&layout, 0, w);
    let one = C64::new(1.0, 0.0);
    let expo = x.add_const(one) / x.add_const(-one);
    expo.derivative(&[1]).norm() * (1.0 - w.norm_sqr())
}

/// `2 log(1 / |ψ(w)|)`, evaluated through `ψ`.
pub fn zimmer_log_modulus(w: C64) -> f64 {
    -2.0 * crate::domain::zimmer_psi(&w).norm().ln()
}

/// `|∂ log K(z, z)|_g`.
pub fn property_star_star_length(k: &KernelModel, z: &[C64]) -> Result<f64> {
    Ok(LocalGeometry::at(k, z)?.log_gradient_sq().sqrt())
}

/// Kernel of the image of `k.domain()` under `z -> S^T (z - p)` with
/// `S = g(p)^{1/2}`; the metric at the origin of the image is the identity.
pub fn normalize_at(k: &KernelModel, p: &[C64]) -> Result<KernelModel> {
    let g = metric_at(k, p)?;
    let a = g.sqrt().transpose();
    let n = p.len();
    let b: Vec<C64> = (0..n).map(|i| -(0..n).map(|j| a[(i, j)] * p[j]).sum::<C64>()).collect();
    let rows = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
    pushforward_kernel(k.clone(), BiholoMap::linear(rows, b)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct HscSample {
    pub direction: Vec<C64>,
    pub value: f64,
}

/// Everything this module computes at a query point `z` with base `z0`.
#[derive(Clone, Debug, Serialize)]
pub struct GeometryReport {
    pub schema_version: u32,
    pub domain: DomainSpec,
    pub provenance: Provenance,
    pub point: Vec<C64>,
    pub base: Vec<C64>,
    pub kernel_diagonal: f64,
    pub metric: serde_json::Value,
    pub det_g: f64,
    pub hsc: Vec<HscSample>,
    pub curvature: serde_json::Value,
    /// `None` when `K(z, base) = 0`.
    pub rep_coords: Option<Vec<C64>>,
    pub quad_form: Option<f64>,
    /// `None` encodes `+inf` (kernel zero).
    pub diastasis: Option<f64>,
    pub gradient_length_sq: Option<GradientLength>,
    pub volume_coeff: f64,
    pub declared_c2: Option<f64>,
    pub curvature_constant_estimate: Option<f64>,
    pub volume_residual: Option<f64>,
}

impl GeometryReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn hsc_range(&self) -> (f64, f64) {
        self.hsc.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s.value), hi.max(s.value))
        })
    }
}

fn zero_tolerant<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::KernelZeroAtPair) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Builds a [`GeometryReport`]; a pure function of `(k, base, z, directions)`.
pub fn geometry_report(
    k: &KernelModel,
    base: &[C64],
    z: &[C64],
    directions: &[Vec<C64>],
) -> Result<GeometryReport> {
    let at_z = LocalGeometry::at(k, z)?;
    let at_base = LocalGeometry::at(k, base)?;
    let curv = at_z.curvature();
    let hsc = directions
        .iter()
        .map(|x| {
            k.domain().check_dim(x)?;
            Ok(HscSample {
                direction: x.clone(),
                value: curv.sectional(&at_z.metric, x)?.re,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rc = zero_tolerant(rep_coords_with(k, &at_base, z))?;
    let phi = diastasis(k, base, z)?;
    let grad = zero_tolerant(gradient_with(k, &at_z, base))?;
    let declared = k.domain().declared_c2();
    let estimate = if hsc.is_empty() {
        None
    } else {
        Some(-hsc.iter().map(|s| s.value).sum::<f64>() / hsc.len() as f64)
    };
    let volume_residual = match (declared, &rc) {
        (Some(c2), Some(_)) => match volume_identity(k, base, z, c2) {
            Ok(v) => Some(v.residual),
            Err(Error::QuadraticFormOutOfRange(_)) => None,
            Err(e) => return Err(e),
        },
        _ => None,
    };
    Ok(GeometryReport {
        schema_version: crate::SCHEMA_VERSION,
        domain: k.domain().clone(),
        provenance: k.provenance().clone(),
        point: z.to_vec(),
        base: base.to_vec(),
        kernel_diagonal: k.diagonal(z)?,
        metric: at_z.metric.to_json_value(),
        det_g: at_z.metric.det(),
        hsc,
        curvature: curv.to_json_value(),
        quad_form: rc.as_ref().map(|r| r.quad_form()),
        rep_coords: rc.map(|r| r.w),
        diastasis: phi.is_finite().then_some(phi),
        gradient_length_sq: grad,
        volume_coeff: at_z.metric.det(),
        declared_c2: declared,
        curvature_constant_estimate: estimate,
        volume_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::closed_form_kernel;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn disc() -> KernelModel {
        closed_form_kernel(&DomainSpec::Disc).unwrap()
    }

    fn ball(n: usize) -> KernelModel {
        closed_form_kernel(&DomainSpec::ball(n)).unwrap()
    }

    #[test]
    fn metric_examples() {
        let g = metric_at(&disc(), &[c(0.0, 0.0)]).unwrap();
        assert!((g.entry(0, 0) - 2.0).norm() < 1e-14);
        let g = metric_at(&ball(2), &[c(0.0, 0.0); 2]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let e = if a == b { 3.0 } else { 0.0 };
                assert!((g.entry(a, b) - e).norm() < 1e-14);
            }
        }
        let pd = closed_form_kernel(&DomainSpec::polydisc(2)).unwrap();
        let g = metric_at(&pd, &[c(0.0, 0.0); 2]).unwrap();
        assert!((g.entry(0, 0) - 2.0).norm() < 1e-14 && g.entry(0, 1).norm() < 1e-14);
        // off-centre disc value against -2 log(1 - |z|^2)
        let g = metric_at(&disc(), &[c(0.3, 0.4)]).unwrap();
        assert!((g.entry(0, 0).re - 2.0 / 0.75f64.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn curvature_disc_centre() {
        let r = curvature_tensor(&disc(), &[c(0.0, 0.0)]).unwrap();
        assert!((r.get(0, 0, 0, 0) + 4.0).norm() < 1e-12);
    }

    #[test]
    fn hsc_examples() {
        for p in [c(0.0, 0.0), c(0.3, 0.0), c(0.0, 0.6)] {
            let v = hsc(&disc(), &[p], &[c(1.0, 0.0)]).unwrap();
            assert!((v + 1.0).abs() < 1e-8, "{v}");
        }
        let v = hsc(&ball(3), &[c(0.1, 0.2), c(-0.3, 0.1), c(0.2, -0.2)], &[c(0.3, -1.0), c(0.5, 0.2), c(-0.7, 0.4)])
            .unwrap();
        assert!((v + 0.5).abs() < 1e-8, "{v}");
        let pd = closed_form_kernel(&DomainSpec::polydisc(2)).unwrap();
        let axis = hsc(&pd, &[c(0.0, 0.0); 2], &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let diag = hsc(&pd, &[c(0.0, 0.0); 2], &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((axis + 1.0).abs() < 1e-12);
        assert!(diag > -1.0 + 1e-3, "{diag}");
        assert_eq!(
            hsc(&disc(), &[c(0.1, 0.0)], &[c(0.0, 0.0)]),
            Err(Error::ZeroDirection)
        );
    }

    /// Reference values from a 50-digit evaluation of the Laurent series with
    /// numerically differentiated `-(1/g) ∂∂̄ log g`.
    #[test]
    fn annulus_hsc_against_high_precision_values() {
        let ann = closed_form_kernel(&DomainSpec::Annulus { r: 0.5 }).unwrap();
        let a = hsc(&ann, &[c(0.6, 0.0)], &[c(1.0, 0.0)]).unwrap();
        assert!((a + 0.999_999_999_974_422_16).abs() < 1e-12, "{a}");
        let thin = closed_form_kernel(&DomainSpec::Annulus { r: 0.1 }).unwrap();
        let a = hsc(&thin, &[c(0.28, 0.0)], &[c(1.0, 0.0)]).unwrap();
        let b = hsc(&thin, &[c(0.0, 0.82)], &[c(0.0, 1.0)]).unwrap();
        assert!((a + 1.025_343_975_669_978_7).abs() < 1e-9, "{a}");
        assert!((b + 1.000_383_339_792_238_8).abs() < 1e-9, "{b}");
        assert!((a - b).abs() > 1e-3);
    }

    #[test]
    fn curvature_symmetries() {
        let r = curvature_tensor(&ball(2), &[c(0.2, 0.1), c(-0.3, 0.25)]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let v = r.get(i, j, k, l);
                        assert!((v - r.get(k, j, i, l)).norm() < 1e-10);
                        assert!((v - r.get(i, l, k, j)).norm() < 1e-10);
                        assert!((v - r.get(j, i, l, k).conj()).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn rep_coords_examples() {
        let w = rep_coords(&disc(), &[c(0.0, 0.0)], &[c(0.5, 0.0)]).unwrap();
        assert!((w.w[0] - 0.5).norm() < 1e-14);
        let p = [c(0.2, -0.3)];
        let w = rep_coords(&disc(), &p, &p).unwrap();
        assert_eq!(w.w[0], c(0.0, 0.0));
        let w = rep_coords(&ball(2), &[c(0.0, 0.0); 2], &[c(0.3, 0.0), c(0.4, 0.0)]).unwrap();
        assert!((w.w[0] - 0.3).norm() < 1e-14 && (w.w[1] - 0.4).norm() < 1e-14);
        assert!((w.quad_form() - 0.75).abs() < 1e-13);
    }

    #[test]
    fn diastasis_examples() {
        let z = [c(0.5, 0.0)];
        let o = [c(0.0, 0.0)];
        assert_eq!(diastasis(&disc(), &z, &z).unwrap(), 0.0);
        let expect = -2.0 * 0.75f64.ln();
        assert!((diastasis(&disc(), &o, &z).unwrap() - expect).abs() < 1e-14);
        assert!((diastasis_closed_form(&disc(), &o, &z, 1.0).unwrap() - expect).abs() < 1e-14);
        let b = ball(2);
        let zb = [c(0.3, 0.0), c(0.4, 0.0)];
        let cf = diastasis_closed_form(&b, &[c(0.0, 0.0); 2], &zb, 2.0 / 3.0).unwrap();
        assert!((cf + 3.0 * 0.75f64.ln()).abs() < 1e-13);
        assert!((diastasis(&b, &[c(0.0, 0.0); 2], &zb).unwrap() - cf).abs() < 1e-13);
    }

    #[test]
    fn gradient_examples() {
        let g = gradient_length_both(&disc(), &[c(0.5, 0.0)], &[c(0.0, 0.0)]).unwrap();
        assert!((g.direct - 0.5).abs() < 1e-14 && (g.via_rep_coords - 0.5).abs() < 1e-14);
        let g = gradient_length_sq(&ball(2), &[c(0.3, 0.0), c(0.4, 0.0)], &[c(0.0, 0.0); 2]).unwrap();
        assert!((g - 0.75).abs() < 1e-13);
        let p = [c(0.1, 0.1)];
        assert!(gradient_length_sq(&disc(), &p, &p).unwrap().abs() < 1e-14);
    }

    #[test]
    fn volume_examples() {
        let o = [c(0.0, 0.0)];
        let v = volume_identity(&disc(), &o, &o, 1.0).unwrap();
        assert!((v.v - 2.0).abs() < 1e-14 && (v.jacobian_det_abs - 1.0).abs() < 1e-14);
        assert!((v.det_g_base - 2.0).abs() < 1e-14 && v.residual < 1e-15);
        assert!(volume_identity_residual(&disc(), &o, &[c(0.5, 0.0)], 1.0).unwrap() < 1e-10);
        let r = volume_identity_residual(&ball(2), &[c(0.1, 0.0), c(0.0, 0.2)], &[c(-0.3, 0.2), c(0.1, 0.4)], 2.0 / 3.0)
            .unwrap();
        assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn exhaustion_examples() {
        let z = [c(0.5, 0.0)];
        assert_eq!(exhaustion_phi(&disc(), &z, &z, 1.0).unwrap(), -1.0);
        let v = exhaustion_phi(&disc(), &[c(0.0, 0.0)], &z, 1.0).unwrap();
        assert!((v + 1.0 / (1.0 - 0.5 * 0.75f64.ln())).abs() < 1e-14);
        assert!((v + 0.8742).abs() < 1e-4);
        let m = hessian_min_eig(&ball(2), &[c(0.1, 0.2), c(0.0, -0.3)], &[c(-0.4, 0.1), c(0.2, 0.3)], 2.0 / 3.0).unwrap();
        assert!(m > 0.0);
    }

    #[test]
    fn exhaustion_hessian_matches_disc_closed_form() {
        // z0 = 0: φ = -1 / (1 - log(1 - |z|^2) / 2), a radial function.
        let x = 0.4f64;
        let m = exhaustion_hessian(&disc(), &[c(0.0, 0.0)], &[c(x, 0.0)], 1.0).unwrap()[(0, 0)];
        // ∂∂̄ f(t) with t = |z|^2 is f'(t) + t f''(t)
        let f = |t: f64| -1.0 / (1.0 - 0.5 * (1.0 - t).ln());
        let t = x * x;
        let h = 1e-4;
        let d1 = (f(t + h) - f(t - h)) / (2.0 * h);
        let d2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
        assert!((m.re - (d1 + t * d2)).abs() < 1e-6, "{m}");
        assert!(m.im.abs() < 1e-14);
    }

    #[test]
    fn zimmer_examples() {
        assert!((zimmer_quantity(c(0.0, 0.0)) - 2.0).abs() < 1e-14);
        assert!((zimmer_quantity(c(0.9, 0.0)) - 38.0).abs() < 1e-12);
        for w in [c(0.0, 0.0), c(0.9, 0.0), c(-0.3, 0.5)] {
            assert!((zimmer_quantity(w) - zimmer_log_modulus(w)).abs() < 1e-12);
        }
        let hit = (1..=10).any(|j| zimmer_quantity(c(1.0 - 0.5f64.powi(j), 0.0)) > 100.0);
        assert!(hit);
    }

    #[test]
    fn star_star_examples() {
        assert!(property_star_star_length(&disc(), &[c(0.0, 0.0)]).unwrap() < 1e-15);
        let l = property_star_star_length(&disc(), &[c(0.5, 0.0)]).unwrap();
        assert!((l - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn star_star_unbounded_on_zimmer_domain() {
        let k = crate::kernel::kernel_for(&DomainSpec::zimmer_domain()).unwrap();
        let map = BiholoMap::Zimmer;
        let mut best = 0.0f64;
        for j in 1..=5 {
            let w = 1.0 - 0.5f64.powi(j);
            let z = map.forward(&[c(0.0, 0.0), c(w, 0.0)], false).unwrap();
            best = best.max(property_star_star_length(&k, &z).unwrap());
        }
        assert!(best > 10.0, "{best}");
    }

    #[test]
    fn normalize_gives_identity_metric() {
        let p = [c(0.3, -0.1), c(0.2, 0.4)];
        let nk = normalize_at(&ball(2), &p).unwrap();
        let g = metric_at(&nk, &[c(0.0, 0.0); 2]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((g.entry(a, b) - e).norm() < 1e-10, "{:?}", g.matrix());
            }
        }
    }

    #[test]
    fn report_serializes_with_schema() {
        let r = geometry_report(&ball(2), &[c(0.0, 0.0); 2], &[c(0.3, 0.0), c(0.4, 0.0)], &[vec![c(1.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        let s = r.to_json();
        assert!(s.contains("\"schema_version\": 1"));
        assert!(s.contains("row-major (i, jbar, k, lbar)"));
        assert!((r.quad_form.unwrap() - 0.75).abs() < 1e-13);
        assert!((r.curvature_constant_estimate.unwrap() - 2.0 / 3.0).abs() < 1e-10);
    }
}
