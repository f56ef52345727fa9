//! Quadrature rules for the L^2 inner product on model domains.
//!
//! Every supported model domain is Reinhardt (invariant under rotating each
//! coordinate), so rules are tensor products of a radial Gauss–Legendre part
//! and a uniform trapezoid in each angle. [`ReinhardtRule`] keeps that
//! factorization; [`QuadratureRule`] is the expanded node list.

use std::f64::consts::TAU;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::scalar::C64;

/// Explicit nodes and positive weights (Lebesgue measure on C^n = R^{2n}).
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<Vec<C64>>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<F: FnMut(&[C64]) -> C64>(&self, mut f: F) -> C64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(C64::new(0.0, 0.0), |acc, (z, &w)| acc + f(z) * w)
    }
}

/// Factorized rule: radial nodes `(r_1, .., r_n)` with weights that already
/// include the polar Jacobian, times `angles[j]` equispaced angles per
/// coordinate.
#[derive(Clone, Debug)]
pub struct ReinhardtRule {
    pub radii: Vec<Vec<f64>>,
    pub radial_weights: Vec<f64>,
    pub angles: Vec<usize>,
    pub order: usize,
}

impl ReinhardtRule {
    pub fn dim(&self) -> usize {
        self.angles.len()
    }

    /// `sum_m exp(i k theta_m) * (2 pi / M)` for the trapezoid with `m` nodes:
    /// exactly `2 pi` when `m` divides `k`, else exactly zero.
    pub fn angular_factor(&self, coord: usize, k: i64) -> f64 {
        if k.rem_euclid(self.angles[coord] as i64) == 0 {
            TAU
        } else {
            0.0
        }
    }

    /// `∫ |z^a|^2` for a (Laurent) multi-index `a`, evaluated with this rule.
    pub fn monomial_norm_sq(&self, exponent: &[i32]) -> f64 {
        let ang: f64 = (0..self.dim()).map(|j| self.angular_factor(j, 0)).product();
        let radial: f64 = self
            .radii
            .iter()
            .zip(&self.radial_weights)
            .map(|(r, &w)| {
                w * r
                    .iter()
                    .zip(exponent)
                    .map(|(&rj, &aj)| rj.powi(2 * aj))
                    .product::<f64>()
            })
            .sum();
        ang * radial
    }

    pub fn expand(&self) -> QuadratureRule {
        let n = self.dim();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let ang_w: f64 = self.angles.iter().map(|&m| TAU / m as f64).product();
        let total_angles: usize = self.angles.iter().product();
        for (r, &w) in self.radii.iter().zip(&self.radial_weights) {
            for flat in 0..total_angles {
                let mut rest = flat;
                let mut z = Vec::with_capacity(n);
                for j in 0..n {
                    let m = self.angles[j];
                    let idx = rest % m;
                    rest /= m;
                    z.push(C64::from_polar(r[j], TAU * idx as f64 / m as f64));
                }
                nodes.push(z);
                weights.push(w * ang_w);
            }
        }
        QuadratureRule {
            nodes,
            weights,
            order: self.order,
        }
    }

    fn tensor(factors: Vec<ReinhardtRule>, order: usize) -> ReinhardtRule {
        let mut radii = vec![Vec::new()];
        let mut radial_weights = vec![1.0];
        let mut angles = Vec::new();
        for f in factors {
            let mut nr = Vec::with_capacity(radii.len() * f.radii.len());
            let mut nw = Vec::with_capacity(nr.capacity());
            for (r0, &w0) in radii.iter().zip(&radial_weights) {
                for (r1, &w1) in f.radii.iter().zip(&f.radial_weights) {
                    let mut r = r0.clone();
                    r.extend_from_slice(r1);
                    nr.push(r);
                    nw.push(w0 * w1);
                }
            }
            radii = nr;
            radial_weights = nw;
            angles.extend(f.angles);
        }
        ReinhardtRule {
            radii,
            radial_weights,
            angles,
            order,
        }
    }
}

/// Gauss–Legendre nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(order).expect("order >= 1"));
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect()
}

fn radial_interval(order: usize, inner: f64) -> ReinhardtRule {
    let (radii, radial_weights) = gauss_legendre(order, inner, 1.0)
        .into_iter()
        .map(|(r, w)| (vec![r], w * r))
        .unzip();
    ReinhardtRule {
        radii,
        radial_weights,
        angles: vec![2 * order + 1],
        order,
    }
}

/// Ball rule through `t_j = r_j^2` on the simplex, collapsed onto the cube
/// by `t_j = u_j * prod_{i<j} (1 - u_i)`.
fn ball_rule(n: usize, order: usize) -> ReinhardtRule {
    let gl = gauss_legendre(order, 0.0, 1.0);
    let total = gl.len().pow(n as u32);
    let mut radii = Vec::with_capacity(total);
    let mut radial_weights = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rest = flat;
        let mut remaining = 1.0;
        // r dr = dt / 2 in every coordinate
        let mut w = 0.5f64.powi(n as i32);
        let mut r = Vec::with_capacity(n);
        for _ in 0..n {
            let (u, wu) = gl[rest % gl.len()];
            rest /= gl.len();
            r.push((remaining * u).sqrt());
            w *= wu * remaining;
            remaining *= 1.0 - u;
        }
        radii.push(r);
        radial_weights.push(w);
    }
    ReinhardtRule {
        radii,
        radial_weights,
        angles: vec![2 * order + 1; n],
        order,
    }
}

/// Factorized rule for Reinhardt model domains and their products.
pub fn reinhardt_rule(d: &DomainSpec, order: usize) -> Result<ReinhardtRule> {
    if order == 0 {
        return Err(Error::InvalidArgument("quadrature order must be >= 1".into()));
    }
    match d {
        // The origin is never a Gauss–Legendre node, so the punctured disc
        // shares the disc rule exactly.
        DomainSpec::Disc | DomainSpec::PuncturedDisc => Ok(radial_interval(order, 0.0)),
        DomainSpec::Annulus { r } => Ok(radial_interval(order, *r)),
        DomainSpec::Ball { n } => Ok(ball_rule(*n, order)),
        DomainSpec::Polydisc { n } => Ok(ReinhardtRule::tensor(
            vec![radial_interval(order, 0.0); *n],
            order,
        )),
        DomainSpec::Product { factors } => {
            let rules = factors
                .iter()
                .map(|f| reinhardt_rule(f, order))
                .collect::<Result<Vec<_>>>()?;
            Ok(ReinhardtRule::tensor(rules, order))
        }
        DomainSpec::Pushforward { .. } => Err(Error::UnsupportedDomain(
            "quadrature (pushforward domains integrate on the base)",
        )),
    }
}

/// Explicit rule with all nodes inside the domain.
pub fn quadrature(d: &DomainSpec, order: usize) -> Result<QuadratureRule> {
    let mut rule = reinhardt_rule(d, order)?.expand();
    if matches!(d, DomainSpec::PuncturedDisc) {
        let keep: Vec<bool> = rule.nodes.iter().map(|z| z[0].norm() > 0.0).collect();
        let mut it = keep.iter();
        rule.nodes.retain(|_| *it.next().unwrap());
        let mut it = keep.iter();
        rule.weights.retain(|_| *it.next().unwrap());
    }
    Ok(rule)
}

/// `∫_{F(base)} f` computed on the base as `∫ f(F(x)) |det F'(x)|^2`.
pub fn integrate_pullback<F: FnMut(&[C64]) -> C64>(d: &DomainSpec, order: usize, mut f: F) -> Result<C64> {
    pullback_dyn(d, order, &mut f)
}

fn pullback_dyn(d: &DomainSpec, order: usize, f: &mut dyn FnMut(&[C64]) -> C64) -> Result<C64> {
    match d {
        DomainSpec::Pushforward { map, base } => {
            let mut inner = |x: &[C64]| -> C64 {
                let y = map.forward(x, false).expect("quadrature node maps");
                let j = map.jacobian_det(x, false).norm_sqr();
                f(&y) * j
            };
            pullback_dyn(base, order, &mut inner)
        }
        _ => Ok(quadrature(d, order)?.integrate(f)),
    }
}
