//! Finite-dimensional kernel oracle `K_N(z, w) = b(z)^T (G^{-1})^T conj(b(w))`
//! from a monomial (or Laurent) basis and its quadrature Gram matrix.

use std::collections::BTreeSet;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domain::{BiholoMap, DomainSpec};
use crate::error::{Error, Result};
use crate::quadrature::{quadrature, reinhardt_rule};
use crate::scalar::{Scalar, C64};

/// Condition estimates above this are refused.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
enum Factor {
    /// `sqrt(G_ii)` for exactly diagonal Gram matrices.
    Diagonal(Vec<f64>),
    /// Lower Cholesky factor `L` with `G = L L^H`.
    Lower(DMatrix<C64>),
}

/// Basis exponents, Gram matrix and its triangular factor.
#[derive(Clone, Debug, PartialEq)]
pub struct GramBasis {
    domain: DomainSpec,
    degree: usize,
    quad_order: usize,
    exponents: Vec<Vec<i32>>,
    gram: DMatrix<C64>,
    factor: Factor,
    condition_estimate: f64,
}

impl GramBasis {
    pub fn build(d: &DomainSpec, degree: usize, quad_order: usize) -> Result<Self> {
        d.validate()?;
        let min_order = degree + 1;
        if quad_order < min_order {
            return Err(Error::InvalidArgument(format!(
                "quadrature order {quad_order} cannot integrate degree-{degree} Gram entries (need >= {min_order})"
            )));
        }
        let exponents = basis_exponents(d, degree)?;
        match d {
            DomainSpec::Pushforward { .. } => Self::build_dense(d, degree, quad_order, exponents),
            _ => Self::build_diagonal(d, degree, quad_order, exponents),
        }
    }

    /// Reinhardt domains: the angular trapezoid annihilates every pair of
    /// distinct exponents, so `G` is diagonal by construction.
    fn build_diagonal(
        d: &DomainSpec,
        degree: usize,
        quad_order: usize,
        exponents: Vec<Vec<i32>>,
    ) -> Result<Self> {
        let rule = reinhardt_rule(d, quad_order)?;
        let n = exponents.len();
        let mut gram = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        let mut diag = Vec::with_capacity(n);
        for (i, a) in exponents.iter().enumerate() {
            for (j, b) in exponents.iter().enumerate() {
                let ang: f64 = a
                    .iter()
                    .zip(b)
                    .enumerate()
                    .map(|(c, (x, y))| rule.angular_factor(c, (x - y) as i64))
                    .product();
                if ang != 0.0 && i != j {
                    return Err(Error::InvalidArgument(
                        "angular resolution too coarse for the requested degree".into(),
                    ));
                }
            }
            let g = rule.monomial_norm_sq(a);
            if !(g > 0.0) {
                return Err(Error::GramNotPositive { pivot: i });
            }
            gram[(i, i)] = C64::new(g, 0.0);
            diag.push(g.sqrt());
        }
        Ok(Self {
            domain: d.clone(),
            degree,
            quad_order,
            exponents,
            gram,
            factor: Factor::Diagonal(diag),
            condition_estimate: 1.0,
        })
    }

    /// Pushforward domains: image-coordinate basis integrated on the base
    /// with weight `|det F'|^2`.
    fn build_dense(
        d: &DomainSpec,
        degree: usize,
        quad_order: usize,
        exponents: Vec<Vec<i32>>,
    ) -> Result<Self> {
        let (nodes, weights) = pulled_back_rule(d, quad_order)?;
        let n = exponents.len();
        let mut gram = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        let mut b = vec![C64::new(0.0, 0.0); n];
        for (z, &w) in nodes.iter().zip(&weights) {
            let basis = eval_basis(&exponents, z);
            for (slot, v) in b.iter_mut().zip(basis) {
                *slot = v;
            }
            for j in 0..n {
                let cj = b[j].conj() * w;
                for i in j..n {
                    gram[(i, j)] += b[i] * cj;
                }
            }
        }
        for j in 0..n {
            for i in 0..j {
                gram[(i, j)] = gram[(j, i)].conj();
            }
        }
        // equilibrate, factor, rescale
        let scale: Vec<f64> = (0..n).map(|i| gram[(i, i)].re.sqrt()).collect();
        if let Some(i) = scale.iter().position(|s| !(*s > 0.0)) {
            return Err(Error::GramNotPositive { pivot: i });
        }
        let eq = DMatrix::from_fn(n, n, |i, j| gram[(i, j)] / (scale[i] * scale[j]));
        let eig = nalgebra::SymmetricEigen::new(eq.clone()).eigenvalues;
        let (lo, hi) = eig
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
        let condition_estimate = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if condition_estimate > MAX_CONDITION {
            return Err(Error::IllConditionedGram {
                estimate: condition_estimate,
            });
        }
        let chol = eq.cholesky().ok_or(Error::GramNotPositive { pivot: 0 })?;
        let mut lower = chol.unpack();
        for i in 0..n {
            for j in 0..=i {
                lower[(i, j)] *= scale[i];
            }
        }
        Ok(Self {
            domain: d.clone(),
            degree,
            quad_order,
            exponents,
            gram,
            factor: Factor::Lower(lower),
            condition_estimate,
        })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    pub fn exponents(&self) -> &[Vec<i32>] {
        &self.exponents
    }

    pub fn gram(&self) -> &DMatrix<C64> {
        &self.gram
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.factor, Factor::Diagonal(_))
    }

    /// Forward substitution `L phi = b` (with `conj(L)` for the conjugate slot).
    fn orthonormalize<S: Scalar>(&self, b: Vec<S>, conj: bool) -> Vec<S> {
        match &self.factor {
            Factor::Diagonal(d) => b
                .into_iter()
                .zip(d)
                .map(|(x, &s)| x.scale(C64::new(1.0 / s, 0.0)))
                .collect(),
            Factor::Lower(l) => {
                let n = b.len();
                let mut phi: Vec<S> = Vec::with_capacity(n);
                for (i, bi) in b.into_iter().enumerate() {
                    let mut acc = bi;
                    for (j, pj) in phi.iter().enumerate() {
                        let lij = if conj { l[(i, j)].conj() } else { l[(i, j)] };
                        acc = acc - pj.scale(lij);
                    }
                    let lii = l[(i, i)];
                    let lii = if conj { lii.conj() } else { lii };
                    phi.push(acc.scale(lii.inv()));
                }
                phi
            }
        }
    }

    pub fn eval<S: Scalar>(&self, z: &[S], s: &[S]) -> Result<S> {
        let bz = eval_basis(&self.exponents, z);
        let bs = eval_basis(&self.exponents, s);
        let pz = self.orthonormalize(bz, false);
        let ps = self.orthonormalize(bs, true);
        let mut acc = z[0].constant_like(C64::new(0.0, 0.0));
        for (a, b) in pz.into_iter().zip(ps) {
            acc = acc + a * b;
        }
        Ok(acc)
    }

    /// Stable hash of (domain, degree, quadrature order) for cache files.
    pub fn domain_hash(d: &DomainSpec, degree: usize, quad_order: usize) -> String {
        let mut h = Sha256::new();
        h.update(d.to_json().as_bytes());
        h.update(degree.to_le_bytes());
        h.update(quad_order.to_le_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let to_rows = |m: &DMatrix<C64>| -> Vec<Vec<C64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                .collect()
        };
        let factor = match &self.factor {
            Factor::Diagonal(d) => CachedFactor::Diagonal(d.clone()),
            Factor::Lower(l) => CachedFactor::Lower(to_rows(l)),
        };
        let cache = GramCache {
            schema_version: crate::SCHEMA_VERSION,
            domain_hash: Self::domain_hash(&self.domain, self.degree, self.quad_order),
            domain: self.domain.clone(),
            degree: self.degree,
            quad_order: self.quad_order,
            exponents: self.exponents.clone(),
            gram: to_rows(&self.gram),
            factor,
            condition_estimate: self.condition_estimate,
        };
        let text = serde_json::to_string(&cache).map_err(|e| Error::Cache(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| Error::Cache(e.to_string()))
    }

    /// Loads a cached basis, refusing files built for another configuration.
    pub fn load(path: &Path, d: &DomainSpec, degree: usize, quad_order: usize) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Cache(e.to_string()))?;
        let cache: GramCache =
            serde_json::from_str(&text).map_err(|e| Error::Cache(e.to_string()))?;
        if cache.domain_hash != Self::domain_hash(d, degree, quad_order) || cache.domain != *d {
            return Err(Error::Cache("domain hash mismatch".into()));
        }
        let from_rows = |rows: &[Vec<C64>]| -> DMatrix<C64> {
            let n = rows.len();
            DMatrix::from_fn(n, n, |i, j| rows[i][j])
        };
        let factor = match cache.factor {
            CachedFactor::Diagonal(d) => Factor::Diagonal(d),
            CachedFactor::Lower(rows) => Factor::Lower(from_rows(&rows)),
        };
        Ok(Self {
            domain: cache.domain,
            degree: cache.degree,
            quad_order: cache.quad_order,
            exponents: cache.exponents,
            gram: from_rows(&cache.gram),
            factor,
            condition_estimate: cache.condition_estimate,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct GramCache {
    schema_version: u32,
    domain_hash: String,
    domain: DomainSpec,
    degree: usize,
    quad_order: usize,
    exponents: Vec<Vec<i32>>,
    gram: Vec<Vec<C64>>,
    factor: CachedFactor,
    condition_estimate: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum CachedFactor {
    Diagonal(Vec<f64>),
    Lower(Vec<Vec<C64>>),
}

/// Which coordinates carry Laurent (negative) exponents.
fn laurent_coords(d: &DomainSpec) -> Vec<bool> {
    match d {
        DomainSpec::Annulus { .. } => vec![true],
        DomainSpec::Product { factors } => factors.iter().flat_map(laurent_coords).collect(),
        _ => vec![false; d.dim()],
    }
}

/// Multi-indices with `sum |a_j| <= degree`, ordered by total degree then
/// lexicographically.
fn bounded_indices(laurent: &[bool], degree: usize) -> Vec<Vec<i32>> {
    fn rec(pos: usize, budget: i32, laurent: &[bool], cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if pos == laurent.len() {
            out.push(cur.clone());
            return;
        }
        let lo = if laurent[pos] { -budget } else { 0 };
        for a in lo..=budget {
            cur.push(a);
            rec(pos + 1, budget - a.abs(), laurent, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, degree as i32, laurent, &mut Vec::new(), &mut out);
    out.sort_by_key(|a| (a.iter().map(|x| x.abs()).sum::<i32>(), a.clone()));
    out
}

pub fn basis_exponents(d: &DomainSpec, degree: usize) -> Result<Vec<Vec<i32>>> {
    match d {
        DomainSpec::Pushforward { map, base } => match map {
            BiholoMap::Hartogs => {
                // zeta1^a zeta2^b pulls back to z1^a z2^(a+b+1) after the
                // Jacobian factor; keep pullback exponents >= 0, total <= degree.
                let mut set = BTreeSet::new();
                for idx in bounded_indices(&laurent_coords(base), degree) {
                    let (a, e) = (idx[0], idx[1]);
                    if a >= 0 && e >= 0 {
                        set.insert((a + e, vec![a, e - a - 1]));
                    }
                }
                Ok(set.into_iter().map(|(_, v)| v).collect())
            }
            _ => Ok(bounded_indices(&vec![false; d.dim()], degree)),
        },
        _ => Ok(bounded_indices(&laurent_coords(d), degree)),
    }
}

/// Explicit nodes of the domain obtained by mapping base nodes forward, with
/// weights multiplied by `|det F'|^2`.
fn pulled_back_rule(d: &DomainSpec, order: usize) -> Result<(Vec<Vec<C64>>, Vec<f64>)> {
    match d {
        DomainSpec::Pushforward { map, base } => {
            let (nodes, weights) = pulled_back_rule(base, order)?;
            let mut out_n = Vec::with_capacity(nodes.len());
            let mut out_w = Vec::with_capacity(nodes.len());
            for (x, w) in nodes.iter().zip(weights) {
                let y = map.forward(x, false)?;
                let j = map.jacobian_det(x, false).norm_sqr();
                out_n.push(y);
                out_w.push(w * j);
            }
            Ok((out_n, out_w))
        }
        _ => {
            let q = quadrature(d, order)?;
            Ok((q.nodes, q.weights))
        }
    }
}

/// Monomials `prod_c z_c^{a_c}` (negative exponents allowed).
pub(crate) fn eval_basis<S: Scalar>(exponents: &[Vec<i32>], z: &[S]) -> Vec<S> {
    let dim = z.len();
    let mut lo = vec![0i32; dim];
    let mut hi = vec![0i32; dim];
    for a in exponents {
        for c in 0..dim {
            lo[c] = lo[c].min(a[c]);
            hi[c] = hi[c].max(a[c]);
        }
    }
    let one = z[0].constant_like(C64::new(1.0, 0.0));
    let powers: Vec<Vec<S>> = (0..dim)
        .map(|c| {
            let mut table = Vec::with_capacity((hi[c] - lo[c] + 1) as usize);
            let mut neg = Vec::new();
            if lo[c] < 0 {
                let inv = z[c].recip();
                let mut p = inv.clone();
                for _ in 0..(-lo[c]) {
                    neg.push(p.clone());
                    p = p * inv.clone();
                }
            }
            for k in (0..(-lo[c]) as usize).rev() {
                table.push(neg[k].clone());
            }
            let mut p = one.clone();
            for _ in 0..=hi[c] {
                table.push(p.clone());
                p = p * z[c].clone();
            }
            table
        })
        .collect();
    exponents
        .iter()
        .map(|a| {
            let mut acc = one.clone();
            for c in 0..dim {
                let k = a[c];
                if k != 0 {
                    acc = acc * powers[c][(k - lo[c]) as usize].clone();
                }
            }
            acc
        })
        .collect()
}
