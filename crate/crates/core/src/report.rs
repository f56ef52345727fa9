//! CSV and JSON artifacts.
//!
//! Every float in CSV output is written with 17 significant digits so that
//! parsing the text recovers the exact double.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    closed_form_residual, diastasis, gradient_length_both, volume_identity, LocalGeometry,
};
use crate::kernel::KernelModel;
use crate::scalar::C64;

/// `{:.16e}`: 17 significant digits, round-trip exact.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Grid of query points in the plane of one coordinate; the remaining
/// coordinates are held at `anchor`.
#[derive(Clone, Debug, PartialEq)]
pub enum ScanGrid {
    Polar {
        r_min: f64,
        r_max: f64,
        n_r: usize,
        n_theta: usize,
    },
    Cartesian {
        min: f64,
        max: f64,
        n: usize,
    },
}

impl ScanGrid {
    /// Points of the grid in row-major order.
    pub fn points(&self) -> Vec<C64> {
        let lin = |a: f64, b: f64, n: usize, i: usize| {
            if n <= 1 {
                a
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        };
        match *self {
            ScanGrid::Polar {
                r_min,
                r_max,
                n_r,
                n_theta,
            } => {
                let mut out = Vec::with_capacity(n_r * n_theta);
                for i in 0..n_r {
                    let r = lin(r_min, r_max, n_r, i);
                    if r == 0.0 {
                        out.push(C64::new(0.0, 0.0));
                        continue;
                    }
                    for j in 0..n_theta {
                        let t = std::f64::consts::TAU * j as f64 / n_theta.max(1) as f64;
                        out.push(C64::from_polar(r, t));
                    }
                }
                out
            }
            ScanGrid::Cartesian { min, max, n } => {
                let mut out = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        out.push(C64::new(lin(min, max, n, j), lin(min, max, n, i)));
                    }
                }
                out
            }
        }
    }
}

/// One row of the geometry scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub index: usize,
    pub point: Vec<C64>,
    pub kernel: f64,
    pub det_g: f64,
    pub hsc_min: f64,
    pub hsc_max: f64,
    pub diastasis: f64,
    pub gradient_length_sq: Option<f64>,
    pub quad_form: Option<f64>,
    pub lemma_residual: Option<f64>,
    pub closed_form_residual: Option<f64>,
    pub volume_residual: Option<f64>,
}

/// Evaluates the geometry at every grid point inside the domain. The grid
/// moves coordinate `slot` of `anchor`; `base` is the diastasis base point.
pub fn scan(
    k: &KernelModel,
    base: &[C64],
    anchor: &[C64],
    slot: usize,
    grid: &ScanGrid,
    directions: &[Vec<C64>],
) -> Result<Vec<ScanRow>> {
    k.domain().check_dim(anchor)?;
    if slot >= anchor.len() {
        return Err(Error::InvalidArgument(format!("scan slot {slot} out of range")));
    }
    let c2 = k.domain().declared_c2();
    let mut rows = Vec::new();
    for (index, p) in grid.points().into_iter().enumerate() {
        let mut z = anchor.to_vec();
        z[slot] = p;
        if !k.domain().contains(&z)? {
            continue;
        }
        let lg = LocalGeometry::at(k, &z)?;
        let curv = lg.curvature();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in directions {
            let v = curv.sectional(&lg.metric, x)?.re;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let phi = diastasis(k, base, &z)?;
        let grad = match gradient_length_both(k, base, &z) {
            Ok(g) => Some(g),
            Err(Error::KernelZeroAtPair) => None,
            Err(e) => return Err(e),
        };
        let (closed, vol) = match (c2, &grad) {
            (Some(c2), Some(_)) => (
                closed_form_residual(k, base, &z, c2).ok(),
                volume_identity(k, base, &z, c2).ok().map(|v| v.residual),
            ),
            _ => (None, None),
        };
        rows.push(ScanRow {
            index,
            point: z.clone(),
            kernel: k.diagonal(&z)?,
            det_g: lg.metric.det(),
            hsc_min: lo,
            hsc_max: hi,
            diastasis: phi,
            gradient_length_sq: grad.map(|g| g.direct),
            quad_form: grad.map(|g| g.via_rep_coords),
            lemma_residual: grad.map(|g| g.relative_gap()),
            closed_form_residual: closed,
            volume_residual: vol,
        });
    }
    Ok(rows)
}

/// Geometry scan as CSV.
pub fn scan_csv(rows: &[ScanRow], dim: usize) -> String {
    let mut out = String::new();
    let mut header = vec!["index".to_string()];
    for j in 1..=dim {
        header.push(format!("re_z{j}"));
        header.push(format!("im_z{j}"));
    }
    for h in [
        "kernel",
        "det_g",
        "hsc_min",
        "hsc_max",
        "diastasis",
        "gradient_length_sq",
        "quad_form",
        "lemma_residual",
        "closed_form_residual",
        "volume_residual",
    ] {
        header.push(h.into());
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for r in rows {
        let mut f = vec![r.index.to_string()];
        for c in &r.point {
            f.push(fmt_f64(c.re));
            f.push(fmt_f64(c.im));
        }
        f.push(fmt_f64(r.kernel));
        f.push(fmt_f64(r.det_g));
        f.push(fmt_f64(r.hsc_min));
        f.push(fmt_f64(r.hsc_max));
        f.push(fmt_f64(r.diastasis));
        f.push(fmt_opt(r.gradient_length_sq));
        f.push(fmt_opt(r.quad_form));
        f.push(fmt_opt(r.lemma_residual));
        f.push(fmt_opt(r.closed_form_residual));
        f.push(fmt_opt(r.volume_residual));
        out.push_str(&f.join(","));
        out.push('\n');
    }
    out
}

/// `K(z, z)` over a grid of a one-dimensional domain: columns `re_z,im_z,K`.
pub fn kernel_grid_csv(k: &KernelModel, grid: &ScanGrid) -> Result<String> {
    if k.dim() != 1 {
        return Err(Error::UnsupportedDomain("kernel grid (dimension != 1)"));
    }
    let mut out = String::from("re_z,im_z,K\n");
    for p in grid.points() {
        if !k.domain().contains(&[p])? {
            continue;
        }
        let v = k.diagonal(&[p])?;
        out.push_str(&format!("{},{},{}\n", fmt_f64(p.re), fmt_f64(p.im), fmt_f64(v)));
    }
    Ok(out)
}

/// Pretty JSON with the schema version injected at the top level.
pub fn to_json_with_schema<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("value serializes");
    if let serde_json::Value::Object(map) = &mut v {
        map.insert("schema_version".into(), crate::SCHEMA_VERSION.into());
    }
    serde_json::to_string_pretty(&v).expect("json value serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use crate::kernel::closed_form_kernel;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::f64::consts::PI] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn scan_disc_rows() {
        let k = closed_form_kernel(&DomainSpec::Disc).unwrap();
        let grid = ScanGrid::Polar {
            r_min: 0.3,
            r_max: 0.9,
            n_r: 4,
            n_theta: 3,
        };
        let rows = scan(&k, &[C64::new(0.0, 0.0)], &[C64::new(0.0, 0.0)], 0, &grid, &[vec![C64::new(1.0, 0.0)]])
            .unwrap();
        assert_eq!(rows.len(), 12);
        for r in &rows {
            assert!((r.hsc_min + 1.0).abs() < 1e-8);
            assert!(r.lemma_residual.unwrap() < 1e-10);
        }
        let csv = scan_csv(&rows, 1);
        let header = csv.lines().next().unwrap();
        assert!(header.starts_with("index,re_z1,im_z1,kernel,det_g"));
        assert_eq!(csv.lines().count(), 13);
    }

    #[test]
    fn polar_centre_appears_once() {
        let g = ScanGrid::Polar { r_min: 0.0, r_max: 0.5, n_r: 3, n_theta: 4 };
        assert_eq!(g.points().len(), 9);
    }

    #[test]
    fn cartesian_grid_skips_outside_points() {
        let k = closed_form_kernel(&DomainSpec::Annulus { r: 0.5 }).unwrap();
        let csv = kernel_grid_csv(&k, &ScanGrid::Cartesian { min: -1.0, max: 1.0, n: 9 }).unwrap();
        assert!(csv.starts_with("re_z,im_z,K\n"));
        for line in csv.lines().skip(1) {
            let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            let m = (f[0] * f[0] + f[1] * f[1]).sqrt();
            assert!(m > 0.5 && m < 1.0 && f[2] > 0.0);
        }
    }
}
