//! Bounded model domains in C^n and the biholomorphic maps used to push them
//! forward.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, C64};

/// Biholomorphic maps with closed-form inverses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiholoMap {
    /// `(z1, z2) -> (z1 z2, z2)`, taking D x D* onto the Hartogs triangle.
    Hartogs,
    /// `(z1, z2) -> (psi(z2) z1, z2)` with the covering map
    /// `psi(w) = exp((w + 1) / (w - 1))` of the punctured disc.
    Zimmer,
    /// `z -> A z + b`.
    Linear { a: Vec<Vec<C64>>, b: Vec<C64> },
}

/// `psi(w) = exp((w + 1) / (w - 1))`.
pub fn zimmer_psi<S: Scalar>(w: &S) -> S {
    let one = C64::new(1.0, 0.0);
    (w.add_const(one) / w.add_const(-one)).exp()
}

impl BiholoMap {
    pub fn linear(a: Vec<Vec<C64>>, b: Vec<C64>) -> Result<Self> {
        let map = BiholoMap::Linear { a, b };
        map.validate(map.required_dim().unwrap_or(0))?;
        Ok(map)
    }

    /// Scalar multiple of the identity, `z -> lambda z`.
    pub fn scaling(n: usize, lambda: C64) -> Self {
        let a = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { lambda } else { C64::new(0.0, 0.0) })
                    .collect()
            })
            .collect();
        BiholoMap::Linear {
            a,
            b: vec![C64::new(0.0, 0.0); n],
        }
    }

    fn required_dim(&self) -> Option<usize> {
        match self {
            BiholoMap::Hartogs | BiholoMap::Zimmer => Some(2),
            BiholoMap::Linear { a, .. } => Some(a.len()),
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if let Some(req) = self.required_dim() {
            if req != dim {
                return Err(Error::InvalidDomain(format!(
                    "map requires a base of dimension {req}, base has {dim}"
                )));
            }
        }
        if let BiholoMap::Linear { a, b } = self {
            let n = a.len();
            if n == 0 || a.iter().any(|row| row.len() != n) || b.len() != n {
                return Err(Error::InvalidDomain(
                    "linear map needs a square matrix `a` and matching `b`".into(),
                ));
            }
            if self.linear_det().norm() < 1e-300 {
                return Err(Error::InvalidDomain("linear map is singular".into()));
            }
        }
        Ok(())
    }

    fn linear_matrix(&self) -> Option<DMatrix<C64>> {
        match self {
            BiholoMap::Linear { a, .. } => {
                let n = a.len();
                Some(DMatrix::from_fn(n, n, |i, j| a[i][j]))
            }
            _ => None,
        }
    }

    fn linear_det(&self) -> C64 {
        self.linear_matrix()
            .map(|m| m.determinant())
            .unwrap_or(C64::new(1.0, 0.0))
    }

    fn linear_inverse(&self) -> Result<DMatrix<C64>> {
        self.linear_matrix()
            .and_then(|m| m.try_inverse())
            .ok_or(Error::MapNotInvertibleAtPoint)
    }

    /// Applies the map. With `conj` set, the map with conjugated
    /// coefficients is applied (the polarization of `conj(F(conj s))`).
    pub fn forward<S: Scalar>(&self, z: &[S], conj: bool) -> Result<Vec<S>> {
        match self {
            BiholoMap::Hartogs => Ok(vec![z[0].clone() * z[1].clone(), z[1].clone()]),
            BiholoMap::Zimmer => {
                if (z[1].value() - 1.0).norm() == 0.0 {
                    return Err(Error::MapNotInvertibleAtPoint);
                }
                Ok(vec![zimmer_psi(&z[1]) * z[0].clone(), z[1].clone()])
            }
            BiholoMap::Linear { a, b } => {
                let cj = |c: C64| if conj { c.conj() } else { c };
                Ok((0..a.len())
                    .map(|i| {
                        let mut acc = z[0].constant_like(cj(b[i]));
                        for (j, zj) in z.iter().enumerate() {
                            acc = acc + zj.scale(cj(a[i][j]));
                        }
                        acc
                    })
                    .collect())
            }
        }
    }

    /// Closed-form inverse; see [`BiholoMap::forward`] for `conj`.
    pub fn inverse<S: Scalar>(&self, zeta: &[S], conj: bool) -> Result<Vec<S>> {
        match self {
            BiholoMap::Hartogs => {
                if zeta[1].value().norm() == 0.0 {
                    return Err(Error::MapNotInvertibleAtPoint);
                }
                Ok(vec![zeta[0].clone() / zeta[1].clone(), zeta[1].clone()])
            }
            BiholoMap::Zimmer => {
                if (zeta[1].value() - 1.0).norm() == 0.0 {
                    return Err(Error::MapNotInvertibleAtPoint);
                }
                let one = C64::new(1.0, 0.0);
                let inv_psi = (-(zeta[1].add_const(one) / zeta[1].add_const(-one))).exp();
                Ok(vec![zeta[0].clone() * inv_psi, zeta[1].clone()])
            }
            BiholoMap::Linear { b, .. } => {
                let inv = self.linear_inverse()?;
                let cj = |c: C64| if conj { c.conj() } else { c };
                let n = b.len();
                let shifted: Vec<S> = (0..n).map(|j| zeta[j].add_const(-cj(b[j]))).collect();
                Ok((0..n)
                    .map(|i| {
                        let mut acc = zeta[0].constant_like(C64::new(0.0, 0.0));
                        for (j, sj) in shifted.iter().enumerate() {
                            acc = acc + sj.scale(cj(inv[(i, j)]));
                        }
                        acc
                    })
                    .collect())
            }
        }
    }

    /// `det F'(z)` in closed form.
    pub fn jacobian_det<S: Scalar>(&self, z: &[S], conj: bool) -> S {
        match self {
            BiholoMap::Hartogs => z[1].clone(),
            BiholoMap::Zimmer => zimmer_psi(&z[1]),
            BiholoMap::Linear { .. } => {
                let d = self.linear_det();
                z[0].constant_like(if conj { d.conj() } else { d })
            }
        }
    }
}

/// Symbolic description of a bounded domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Disc,
    Ball {
        n: usize,
    },
    Polydisc {
        n: usize,
    },
    /// `{ r < |z| < 1 }`.
    Annulus {
        r: f64,
    },
    /// The unit disc less the origin.
    PuncturedDisc,
    Product {
        factors: Vec<DomainSpec>,
    },
    Pushforward {
        map: BiholoMap,
        base: Box<DomainSpec>,
    },
}

impl DomainSpec {
    pub fn ball(n: usize) -> Self {
        DomainSpec::Ball { n }
    }

    pub fn polydisc(n: usize) -> Self {
        DomainSpec::Polydisc { n }
    }

    pub fn annulus(r: f64) -> Result<Self> {
        let d = DomainSpec::Annulus { r };
        d.validate()?;
        Ok(d)
    }

    pub fn product(factors: Vec<DomainSpec>) -> Result<Self> {
        let d = DomainSpec::Product { factors };
        d.validate()?;
        Ok(d)
    }

    pub fn pushforward(base: DomainSpec, map: BiholoMap) -> Result<Self> {
        let d = DomainSpec::Pushforward {
            map,
            base: Box::new(base),
        };
        d.validate()?;
        Ok(d)
    }

    /// D x D* pushed forward onto the Hartogs triangle `|z1| < |z2| < 1`.
    pub fn hartogs_triangle() -> Self {
        DomainSpec::Pushforward {
            map: BiholoMap::Hartogs,
            base: Box::new(DomainSpec::Product {
                factors: vec![DomainSpec::Disc, DomainSpec::PuncturedDisc],
            }),
        }
    }

    /// The image of the unit ball of C^2 under the Zimmer map.
    pub fn zimmer_domain() -> Self {
        DomainSpec::Pushforward {
            map: BiholoMap::Zimmer,
            base: Box::new(DomainSpec::Ball { n: 2 }),
        }
    }

    /// Parses a JSON domain configuration and validates it.
    pub fn from_json(text: &str) -> Result<Self> {
        let d: DomainSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidDomain(e.to_string()))?;
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("domain serializes")
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Ball { n } | DomainSpec::Polydisc { n } if *n == 0 => Err(
                Error::InvalidDomain("dimension must be positive".into()),
            ),
            DomainSpec::Annulus { r } if !(*r > 0.0 && *r < 1.0) => Err(Error::InvalidDomain(
                format!("annulus requires 0 < r < 1, got {r}"),
            )),
            DomainSpec::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidDomain("product needs factors".into()));
                }
                factors.iter().try_for_each(|f| f.validate())
            }
            DomainSpec::Pushforward { map, base } => {
                base.validate()?;
                map.validate(base.dim())
            }
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Disc | DomainSpec::Annulus { .. } | DomainSpec::PuncturedDisc => 1,
            DomainSpec::Ball { n } | DomainSpec::Polydisc { n } => *n,
            DomainSpec::Product { factors } => factors.iter().map(|f| f.dim()).sum(),
            DomainSpec::Pushforward { base, .. } => base.dim(),
        }
    }

    /// Radius of a centred Euclidean ball containing the domain.
    pub fn circumscribing_radius(&self) -> f64 {
        match self {
            DomainSpec::Disc | DomainSpec::Annulus { .. } | DomainSpec::PuncturedDisc => 1.0,
            DomainSpec::Ball { .. } => 1.0,
            DomainSpec::Polydisc { n } => (*n as f64).sqrt(),
            DomainSpec::Product { factors } => factors
                .iter()
                .map(|f| f.circumscribing_radius().powi(2))
                .sum::<f64>()
                .sqrt(),
            DomainSpec::Pushforward { map, base } => {
                let r = base.circumscribing_radius();
                match map {
                    // |z1 z2| <= |z1| and |psi| < 1
                    BiholoMap::Hartogs | BiholoMap::Zimmer => r,
                    BiholoMap::Linear { a, b } => {
                        let frob: f64 = a.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>();
                        let shift: f64 = b.iter().map(|c| c.norm_sqr()).sum::<f64>();
                        frob.sqrt() * r + shift.sqrt()
                    }
                }
            }
        }
    }

    /// Square of the declared constant holomorphic sectional curvature
    /// `-c^2`, when the domain is known to have one.
    pub fn declared_c2(&self) -> Option<f64> {
        match self {
            DomainSpec::Disc | DomainSpec::PuncturedDisc => Some(1.0),
            DomainSpec::Ball { n } => Some(2.0 / (*n as f64 + 1.0)),
            DomainSpec::Polydisc { n: 1 } => Some(1.0),
            DomainSpec::Pushforward { base, .. } => base.declared_c2(),
            _ => None,
        }
    }

    /// A fixed interior point.
    pub fn reference_point(&self) -> Vec<C64> {
        match self {
            DomainSpec::Disc | DomainSpec::Ball { .. } | DomainSpec::Polydisc { .. } => {
                vec![C64::new(0.0, 0.0); self.dim()]
            }
            DomainSpec::Annulus { r } => vec![C64::new(0.5 * (1.0 + r), 0.0)],
            DomainSpec::PuncturedDisc => vec![C64::new(0.5, 0.0)],
            DomainSpec::Product { factors } => {
                factors.iter().flat_map(|f| f.reference_point()).collect()
            }
            DomainSpec::Pushforward { map, base } => map
                .forward(&base.reference_point(), false)
                .expect("reference point maps"),
        }
    }

    pub fn check_dim(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        Ok(())
    }

    /// Open-domain membership.
    pub fn contains(&self, z: &[C64]) -> Result<bool> {
        self.check_dim(z)?;
        Ok(self.contains_unchecked(z))
    }

    fn contains_unchecked(&self, z: &[C64]) -> bool {
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return false;
        }
        match self {
            DomainSpec::Disc => z[0].norm() < 1.0,
            DomainSpec::Ball { .. } => z.iter().map(|c| c.norm_sqr()).sum::<f64>() < 1.0,
            DomainSpec::Polydisc { .. } => z.iter().all(|c| c.norm() < 1.0),
            DomainSpec::Annulus { r } => {
                let m = z[0].norm();
                *r < m && m < 1.0
            }
            DomainSpec::PuncturedDisc => {
                let m = z[0].norm();
                0.0 < m && m < 1.0
            }
            DomainSpec::Product { factors } => {
                let mut off = 0;
                factors.iter().all(|f| {
                    let d = f.dim();
                    let inside = f.contains_unchecked(&z[off..off + d]);
                    off += d;
                    inside
                })
            }
            DomainSpec::Pushforward { map, base } => match map.inverse(z, false) {
                Ok(pre) => base.contains_unchecked(&pre),
                Err(_) => false,
            },
        }
    }

    /// Euclidean distance to the boundary. Exact for model domains and
    /// products; for pushforwards a conservative estimate.
    pub fn boundary_distance(&self, z: &[C64]) -> Result<f64> {
        if !self.contains(z)? {
            return Err(Error::OutsideDomain);
        }
        self.boundary_distance_unchecked(z)
    }

    fn boundary_distance_unchecked(&self, z: &[C64]) -> Result<f64> {
        Ok(match self {
            DomainSpec::Disc => 1.0 - z[0].norm(),
            DomainSpec::Ball { .. } => 1.0 - z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
            DomainSpec::Polydisc { .. } => z
                .iter()
                .map(|c| 1.0 - c.norm())
                .fold(f64::INFINITY, f64::min),
            DomainSpec::Annulus { r } => {
                let m = z[0].norm();
                (1.0 - m).min(m - r)
            }
            DomainSpec::PuncturedDisc => {
                let m = z[0].norm();
                (1.0 - m).min(m)
            }
            DomainSpec::Product { factors } => {
                let mut off = 0;
                let mut best = f64::INFINITY;
                for f in factors {
                    let d = f.dim();
                    best = best.min(f.boundary_distance_unchecked(&z[off..off + d])?);
                    off += d;
                }
                best
            }
            DomainSpec::Pushforward { map, base } => match map {
                BiholoMap::Hartogs => {
                    // Conservative min over |z1| < |z2| < 1; the cone
                    // |z1| = |z2| sits at distance (|z2| - |z1|) / sqrt(2).
                    let (a, b) = (z[0].norm(), z[1].norm());
                    (1.0 - b).min((b - a) * FRAC_1_SQRT_2)
                }
                BiholoMap::Linear { .. } => {
                    let pre = map.inverse(z, false)?;
                    let inv = map.linear_inverse()?;
                    let norm = inv.singular_values().max();
                    base.boundary_distance_unchecked(&pre)? / norm
                }
                BiholoMap::Zimmer => {
                    if !matches!(**base, DomainSpec::Ball { n: 2 }) {
                        return Err(Error::UnsupportedDomain(
                            "boundary distance of a Zimmer image of a non-ball",
                        ));
                    }
                    zimmer_boundary_estimate(map, z)
                }
            },
        })
    }
}

/// Minimum distance from `z` to images of a fixed grid on the unit sphere
/// of C^2. The grid avoids the singular point `z2 = 1` of `psi`.
fn zimmer_boundary_estimate(map: &BiholoMap, z: &[C64]) -> f64 {
    const STEPS: usize = 48;
    let mut best = f64::INFINITY;
    for ia in 0..=STEPS {
        let alpha = std::f64::consts::FRAC_PI_2 * ia as f64 / STEPS as f64;
        let (s, c) = alpha.sin_cos();
        for i1 in 0..STEPS {
            let t1 = std::f64::consts::TAU * i1 as f64 / STEPS as f64;
            for i2 in 0..STEPS {
                let t2 = std::f64::consts::TAU * (i2 as f64 + 0.5) / STEPS as f64;
                let b = [C64::from_polar(c, t1), C64::from_polar(s, t2)];
                if let Ok(img) = map.forward(&b, false) {
                    let d = ((img[0] - z[0]).norm_sqr() + (img[1] - z[1]).norm_sqr()).sqrt();
                    if d.is_finite() {
                        best = best.min(d);
                    }
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn membership_examples() {
        assert!(DomainSpec::Disc.contains(&[c(0.0, 0.0)]).unwrap());
        let ann = DomainSpec::annulus(0.5).unwrap();
        assert!(!ann.contains(&[c(0.25, 0.0)]).unwrap());
        let h = DomainSpec::hartogs_triangle();
        // (0.25, 0.5) pulls back to (0.5, 0.5) in D x D*
        assert!(h.contains(&[c(0.25, 0.0), c(0.5, 0.0)]).unwrap());
        assert!(!h.contains(&[c(0.5, 0.0), c(0.25, 0.0)]).unwrap());
        assert!(!DomainSpec::PuncturedDisc.contains(&[c(0.0, 0.0)]).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = DomainSpec::ball(2).contains(&[c(0.0, 0.0)]).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                got: 1
            }
        );
    }

    #[test]
    fn boundary_distance_examples() {
        let d = DomainSpec::Disc.boundary_distance(&[c(0.0, 0.0)]).unwrap();
        assert_eq!(d, 1.0);
        let ann = DomainSpec::annulus(0.5).unwrap();
        assert!((ann.boundary_distance(&[c(0.75, 0.0)]).unwrap() - 0.25).abs() < 1e-15);
        let b = DomainSpec::ball(2)
            .boundary_distance(&[c(0.6, 0.0), c(0.0, 0.0)])
            .unwrap();
        assert!((b - 0.4).abs() < 1e-15);
        assert_eq!(
            DomainSpec::Disc.boundary_distance(&[c(1.5, 0.0)]),
            Err(Error::OutsideDomain)
        );
    }

    #[test]
    fn annulus_radius_is_validated() {
        assert!(DomainSpec::annulus(0.0).is_err());
        assert!(DomainSpec::annulus(1.0).is_err());
        assert!(DomainSpec::from_json(r#"{"kind":"annulus","r":1.5}"#).is_err());
    }

    #[test]
    fn config_files_parse() {
        let a = DomainSpec::from_json(r#"{"kind":"annulus","r":0.5}"#).unwrap();
        assert_eq!(a, DomainSpec::Annulus { r: 0.5 });
        let b = DomainSpec::from_json(r#"{"kind":"ball","n":2}"#).unwrap();
        assert_eq!(b.dim(), 2);
        let h = DomainSpec::from_json(
            r#"{"kind":"pushforward","map":"hartogs","base":{"kind":"product","factors":[{"kind":"disc"},{"kind":"punctured_disc"}]}}"#,
        )
        .unwrap();
        assert_eq!(h, DomainSpec::hartogs_triangle());
        let lin = DomainSpec::from_json(
            r#"{"kind":"pushforward","map":{"linear":{"a":[[[2.0,0.0]]],"b":[[0.0,0.0]]}},"base":{"kind":"disc"}}"#,
        )
        .unwrap();
        assert_eq!(lin.dim(), 1);
        assert!(DomainSpec::from_json(r#"{"kind":"pushforward","map":"hartogs","base":{"kind":"disc"}}"#).is_err());
    }

    #[test]
    fn product_dimension_adds() {
        let p = DomainSpec::product(vec![DomainSpec::ball(2), DomainSpec::Disc]).unwrap();
        assert_eq!(p.dim(), 3);
        let pf = DomainSpec::pushforward(p.clone(), BiholoMap::scaling(3, c(2.0, 0.0))).unwrap();
        assert_eq!(pf.dim(), 3);
    }

    #[test]
    fn zimmer_psi_maps_into_punctured_disc() {
        for &w in &[c(0.0, 0.0), c(0.5, 0.3), c(-0.9, 0.1), c(0.2, -0.95)] {
            let p = zimmer_psi(&w);
            assert!(p.norm() < 1.0 && p.norm() > 0.0);
        }
        assert!((zimmer_psi(&c(0.0, 0.0)).norm() - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn linear_pushforward_distance_is_scaled() {
        let d = DomainSpec::pushforward(DomainSpec::Disc, BiholoMap::scaling(1, c(2.0, 0.0))).unwrap();
        assert!((d.boundary_distance(&[c(0.5, 0.0)]).unwrap() - 1.5).abs() < 1e-12);
        assert!(d.contains(&[c(1.9, 0.0)]).unwrap());
    }
}
