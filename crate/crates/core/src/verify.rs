//! Named verification suites.
//!
//! Each suite samples with a seeded generator, records its measurements with
//! the tolerance they are held to, and keeps the first violating sample as a
//! reproducible witness.

use std::f64::consts::PI;
use std::time::Instant;

use serde::Serialize;

use crate::domain::{BiholoMap, DomainSpec};
use crate::error::{Error, Result};
use crate::geometry::{
    closed_form_residual, diastasis, exhaustion_phi, gradient_length_both, hessian_min_eig, hsc,
    property_star_star_length, rep_coords, volume_identity, zimmer_log_modulus, zimmer_quantity,
    LocalGeometry,
};
use crate::kernel::{
    closed_form_kernel, default_quad_order, find_real_axis_zero, gram_kernel, kernel_for,
    skwarczynski_rho, KernelModel,
};
use crate::sampling::{self, SampleRng};
use crate::scalar::C64;

pub const DEFAULT_SEED: u64 = 0x5EED_B3A6;

pub const SUITE_NAMES: &[&str] = &[
    "constant_curvature",
    "identity_lemma",
    "closed_form_diastasis",
    "oracle_equivalence",
    "annulus_counterexample",
    "zimmer",
    "hyperconvexity",
    "mok_yau",
    "volume",
    "removability",
    "skwarczynski",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
}

impl Relation {
    fn holds(self, value: f64, tol: f64) -> bool {
        match self {
            Relation::AtMost => value <= tol,
            Relation::Below => value < tol,
            Relation::AtLeast => value >= tol,
            Relation::Above => value > tol,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::Below => "<",
            Relation::AtLeast => ">=",
            Relation::Above => ">",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measurement {
    pub label: String,
    pub value: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub label: String,
    pub points: Vec<Vec<C64>>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub schema_version: u32,
    pub suite_name: String,
    pub status: Status,
    pub measurements: Vec<Measurement>,
    pub seed: u64,
    pub runtime_ms: u64,
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn measurement(&self, label: &str) -> Option<&Measurement> {
        self.measurements.iter().find(|m| m.label == label)
    }

    /// Measurements whose label contains `pattern`.
    pub fn matching<'a>(&'a self, pattern: &'a str) -> impl Iterator<Item = &'a Measurement> + 'a {
        self.measurements.iter().filter(move |m| m.label.contains(pattern))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite result serializes")
    }
}

struct Suite {
    name: &'static str,
    seed: u64,
    start: Instant,
    measurements: Vec<Measurement>,
    witness: Option<Witness>,
    notes: Vec<String>,
}

impl Suite {
    fn new(name: &'static str, seed: u64) -> Self {
        Self {
            name,
            seed,
            start: Instant::now(),
            measurements: Vec::new(),
            witness: None,
            notes: Vec::new(),
        }
    }

    fn check(&mut self, label: impl Into<String>, value: f64, relation: Relation, tolerance: f64) -> bool {
        let passed = relation.holds(value, tolerance);
        self.measurements.push(Measurement {
            label: label.into(),
            value,
            relation,
            tolerance,
            passed,
        });
        passed
    }

    fn witness(&mut self, label: impl Into<String>, points: &[&[C64]], detail: impl Into<String>) {
        if self.witness.is_none() {
            self.witness = Some(Witness {
                label: label.into(),
                points: points.iter().map(|p| p.to_vec()).collect(),
                detail: detail.into(),
            });
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Records an unexpected error as a failed measurement.
    fn error(&mut self, label: impl Into<String>, e: &Error, points: &[&[C64]]) {
        let label = label.into();
        self.witness(label.clone(), points, e.to_string());
        self.check(format!("{label}: error"), 1.0, Relation::AtMost, 0.0);
    }

    fn finish(self) -> SuiteResult {
        let status = if self.measurements.iter().all(|m| m.passed) {
            Status::Pass
        } else {
            Status::Fail
        };
        SuiteResult {
            schema_version: crate::SCHEMA_VERSION,
            suite_name: self.name.to_string(),
            status,
            measurements: self.measurements,
            seed: self.seed,
            runtime_ms: self.start.elapsed().as_millis() as u64,
            witness: self.witness,
            notes: self.notes,
        }
    }
}

fn stream(seed: u64, tag: u64) -> SampleRng {
    sampling::rng(seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn ball_family() -> Vec<(&'static str, DomainSpec)> {
    vec![
        ("disc", DomainSpec::Disc),
        ("ball2", DomainSpec::ball(2)),
        ("ball3", DomainSpec::ball(3)),
    ]
}

fn model(d: &DomainSpec) -> KernelModel {
    closed_form_kernel(d).expect("model domains have closed-form kernels")
}

/// Interior sample; annuli are kept to the band `[r + 0.05(1-r), 0.9]`.
fn sample(rng: &mut SampleRng, d: &DomainSpec) -> Vec<C64> {
    sampling::interior_point(rng, d, 0.9).expect("model domains can be sampled")
}

/// Holomorphic sectional curvature is `-2/(n+1)` on the ball family and
/// visibly non-constant on the bidisc and the annulus.
pub fn suite_constant_curvature(seed: u64) -> SuiteResult {
    let mut s = Suite::new("constant_curvature", seed);
    for (tag, (name, d)) in ball_family().into_iter().enumerate() {
        let k = model(&d);
        let n = d.dim() as f64;
        let c2 = d.declared_c2().expect("ball family declares c^2");
        let mut rng = stream(seed, tag as u64);
        let mut max_dev = 0.0f64;
        let mut sum = 0.0;
        let mut count = 0;
        for _ in 0..50 {
            let p = sample(&mut rng, &d);
            let x = sampling::direction(&mut rng, d.dim());
            match hsc(&k, &p, &x) {
                Ok(v) => {
                    let dev = (v + c2).abs();
                    if dev > 1e-7 {
                        s.witness(format!("{name}: hsc deviation"), &[&p, &x], format!("hsc = {v}"));
                    }
                    max_dev = max_dev.max(dev);
                    sum += v;
                    count += 1;
                }
                Err(e) => s.error(format!("{name}: hsc"), &e, &[&p, &x]),
            }
        }
        let estimate = -sum / count.max(1) as f64;
        s.check(format!("{name}: max |hsc + c^2|"), max_dev, Relation::AtMost, 1e-7);
        let agree = s.check(
            format!("{name}: |c^2 estimate - declared c^2|"),
            (estimate - c2).abs(),
            Relation::AtMost,
            1e-7,
        );
        if !agree {
            s.note(format!("{name}: estimated c^2 disagrees with the declared value; constancy checks refused"));
        }
        s.check(
            format!("{name}: |2/c^2 - 1 - n| from estimate"),
            (2.0 / estimate - 1.0 - n).abs(),
            Relation::AtMost,
            1e-6,
        );
    }
    for (tag, (name, d)) in [
        ("polydisc2", DomainSpec::polydisc(2)),
        ("annulus0.5", DomainSpec::Annulus { r: 0.5 }),
    ]
    .into_iter()
    .enumerate()
    {
        let k = model(&d);
        let mut rng = stream(seed, 10 + tag as u64);
        let mut lo = (f64::INFINITY, Vec::new());
        let mut hi = (f64::NEG_INFINITY, Vec::new());
        for _ in 0..50 {
            let p = sample(&mut rng, &d);
            let x = sampling::direction(&mut rng, d.dim());
            match hsc(&k, &p, &x) {
                Ok(v) => {
                    if v < lo.0 {
                        lo = (v, p.clone());
                    }
                    if v > hi.0 {
                        hi = (v, p.clone());
                    }
                }
                Err(e) => s.error(format!("{name}: hsc"), &e, &[&p, &x]),
            }
        }
        let spread = hi.0 - lo.0;
        if !s.check(format!("{name}: hsc spread"), spread, Relation::AtLeast, 1e-2) {
            s.witness(
                format!("{name}: hsc spread"),
                &[&lo.1, &hi.1],
                format!("hsc range [{}, {}]", lo.0, hi.0),
            );
        }
    }
    s.finish()
}

/// The two evaluations of `|∂Φ_{z0}|_g^2` agree, with or without constant curvature.
pub fn suite_identity_lemma(seed: u64) -> SuiteResult {
    let mut s = Suite::new("identity_lemma", seed);
    let mut domains = ball_family();
    domains.push(("annulus0.5", DomainSpec::Annulus { r: 0.5 }));
    for (tag, (name, d)) in domains.into_iter().enumerate() {
        let k = model(&d);
        let mut rng = stream(seed, tag as u64);
        let mut worst = 0.0f64;
        let mut skipped = 0;
        for _ in 0..100 {
            let z0 = sample(&mut rng, &d);
            let p = sample(&mut rng, &d);
            match gradient_length_both(&k, &z0, &p) {
                Ok(g) => {
                    let gap = g.relative_gap();
                    if gap > 1e-8 {
                        s.witness(format!("{name}: gradient paths"), &[&z0, &p], format!("{g:?}"));
                    }
                    worst = worst.max(gap);
                }
                Err(Error::KernelZeroAtPair) => skipped += 1,
                Err(e) => s.error(format!("{name}: gradient"), &e, &[&z0, &p]),
            }
        }
        s.check(format!("{name}: max relative gap"), worst, Relation::AtMost, 1e-8);
        if skipped > 0 {
            s.note(format!("{name}: {skipped} pairs skipped at kernel zeros"));
        }
    }
    s.finish()
}

/// Closed-form diastasis, the range of the representative coordinates and
/// the gradient bound on the ball family.
pub fn suite_closed_form_diastasis(seed: u64) -> SuiteResult {
    let mut s = Suite::new("closed_form_diastasis", seed);
    for (tag, (name, d)) in ball_family().into_iter().enumerate() {
        let k = model(&d);
        let c2 = d.declared_c2().expect("declared");
        let bound = 2.0 / c2;
        let mut rng = stream(seed, tag as u64);
        let (mut res, mut q_max, mut g_max) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..100 {
            let p = sample(&mut rng, &d);
            let z = sample(&mut rng, &d);
            let r = closed_form_residual(&k, &p, &z, c2);
            let q = rep_coords(&k, &p, &z).map(|w| w.quad_form());
            let g = gradient_length_both(&k, &z, &p).map(|g| g.direct);
            match (r, q, g) {
                (Ok(r), Ok(q), Ok(g)) => {
                    if r > 1e-8 || q >= bound || g >= bound {
                        s.witness(
                            format!("{name}: closed form"),
                            &[&p, &z],
                            format!("residual {r}, Q {q}, |dPhi|^2 {g}"),
                        );
                    }
                    res = res.max(r);
                    q_max = q_max.max(q);
                    g_max = g_max.max(g);
                }
                (r, q, g) => {
                    let e = r.err().or(q.err()).or(g.err()).expect("one failed");
                    s.error(format!("{name}: closed form"), &e, &[&p, &z]);
                }
            }
        }
        s.check(format!("{name}: max closed-form residual"), res, Relation::AtMost, 1e-8);
        s.check(format!("{name}: max Q c^2/2"), q_max / bound, Relation::Below, 1.0);
        s.check(format!("{name}: max |dPhi|^2 c^2/2"), g_max / bound, Relation::Below, 1.0);
        // radial approach to the boundary at distance 1e-4; the gap is
        // 2(n+1) δ (1-|p|^2)/|1-<z,p>|^2, so base points stay within |p| <= 0.1
        let mut gap = 0.0f64;
        for _ in 0..20 {
            let p = sampling::in_ball(&mut rng, d.dim(), 0.1);
            let u = sampling::direction(&mut rng, d.dim());
            let z: Vec<C64> = u.iter().map(|c| c * (1.0 - 1e-4)).collect();
            match rep_coords(&k, &p, &z) {
                Ok(w) => gap = gap.max((bound - w.quad_form()).abs()),
                Err(e) => s.error(format!("{name}: boundary approach"), &e, &[&p, &z]),
            }
        }
        s.check(format!("{name}: boundary |2/c^2 - Q|"), gap, Relation::AtMost, 1e-3);
    }
    s.finish()
}

/// Gram kernels of degree 30 reproduce the closed forms.
pub fn suite_oracle_equivalence(seed: u64) -> SuiteResult {
    const DEGREE: usize = 30;
    let mut s = Suite::new("oracle_equivalence", seed);
    let domains = [
        ("disc", DomainSpec::Disc),
        ("ball2", DomainSpec::ball(2)),
        ("polydisc2", DomainSpec::polydisc(2)),
        ("annulus0.5", DomainSpec::Annulus { r: 0.5 }),
    ];
    for (tag, (name, d)) in domains.into_iter().enumerate() {
        let exact = model(&d);
        let numeric = match gram_kernel(&d, DEGREE, default_quad_order(&d, DEGREE)) {
            Ok(k) => k,
            Err(e) => {
                s.error(format!("{name}: gram build"), &e, &[]);
                continue;
            }
        };
        if let Some(g) = numeric.gram_basis() {
            s.note(format!(
                "{name}: {} basis functions, condition estimate {:.3e}",
                g.exponents().len(),
                g.condition_estimate()
            ));
        }
        let mut rng = stream(seed, tag as u64);
        let pick = |rng: &mut SampleRng| match d {
            // the truncated Laurent basis only reaches 1e-6 near |z| = 0.69
            DomainSpec::Annulus { .. } => {
                let m = 0.68 + 0.02 * rand::Rng::gen::<f64>(rng);
                vec![sampling::on_circle(rng, m)]
            }
            DomainSpec::Polydisc { n } => (0..n).flat_map(|_| sampling::in_ball(rng, 1, 0.7)).collect(),
            _ => sampling::in_ball(rng, d.dim(), 0.7),
        };
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let z = pick(&mut rng);
            let w = pick(&mut rng);
            let err = (|| -> Result<f64> {
                let scale = (exact.diagonal(&z)? * exact.diagonal(&w)?).sqrt();
                Ok((numeric.eval(&z, &w)? - exact.eval(&z, &w)?).norm() / scale)
            })();
            match err {
                Ok(e) => {
                    if e > 1e-6 {
                        s.witness(format!("{name}: oracle"), &[&z, &w], format!("normalized error {e}"));
                    }
                    worst = worst.max(e);
                }
                Err(e) => s.error(format!("{name}: oracle"), &e, &[&z, &w]),
            }
        }
        s.check(format!("{name}: max normalized error"), worst, Relation::AtMost, 1e-6);
    }
    s.note("error is |K_N(z,w) - K(z,w)| / sqrt(K(z,z) K(w,w))");
    s.finish()
}

fn monotone_tail(values: &[f64], len: usize) -> bool {
    let start = values.len().saturating_sub(len);
    values[start..].windows(2).all(|w| w[1] > w[0])
}

/// A zero of the annulus kernel and the blow-up of the diastasis towards it
/// and towards both boundary circles.
pub fn suite_annulus_counterexample(seed: u64, r: f64) -> SuiteResult {
    let mut s = Suite::new("annulus_counterexample", seed);
    let d = match DomainSpec::annulus(r) {
        Ok(d) => d,
        Err(e) => {
            s.error("annulus", &e, &[]);
            return s.finish();
        }
    };
    let k = model(&d);
    let x0 = r + 0.4 * (1.0 - r);
    let z0 = [C64::new(x0, 0.0)];
    let zero = match find_real_axis_zero(&k, x0, -(1.0 - 1e-4), -(r + 1e-4), 4000) {
        Ok(Some(z)) => z,
        Ok(None) => {
            s.check("zero located", 0.0, Relation::AtLeast, 1.0);
            return s.finish();
        }
        Err(e) => {
            s.error("zero search", &e, &[&z0]);
            return s.finish();
        }
    };
    s.check("|K(zeta, z0)| at located zero", zero.residual, Relation::Below, 1e-10);
    s.note(format!("zero zeta = {} for z0 = {}", zero.zeta, x0));
    s.witness("zero pair", &[&[zero.zeta], &z0], format!("|K| = {:e}", zero.residual));

    let ladder = |s: &mut Suite, label: &str, pts: Vec<C64>| -> Vec<f64> {
        let mut out = Vec::new();
        for p in pts {
            match diastasis(&k, &z0, &[p]) {
                Ok(v) => out.push(v),
                Err(e) => {
                    s.error(label.to_string(), &e, &[&[p]]);
                    break;
                }
            }
        }
        out
    };
    let toward_zero: Vec<C64> = (1..=8).map(|j| zero.zeta * (1.0 + 10f64.powi(-j))).collect();
    let outer: Vec<C64> = (1..=4).map(|j| C64::new(-(1.0 - 10f64.powi(-j)), 0.0)).collect();
    let inner: Vec<C64> = (1..=4).map(|j| C64::new(-(r + 10f64.powi(-j)), 0.0)).collect();
    for (label, pts) in [("zero", toward_zero), ("outer circle", outer.clone()), ("inner circle", inner)] {
        let phi = ladder(&mut s, label, pts);
        s.note(format!("{label} ladder: {phi:?}"));
        let top = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for t in [10.0, 20.0, 30.0] {
            s.check(format!("{label}: max Phi vs {t}"), top, Relation::Above, t);
        }
        s.check(
            format!("{label}: Phi increasing over last 3 steps"),
            monotone_tail(&phi, 3) as u8 as f64,
            Relation::AtLeast,
            1.0,
        );
    }
    // off-diagonal values stay bounded while the diagonal blows up
    let mut off = Vec::new();
    let mut diag = Vec::new();
    for p in &outer {
        if let (Ok(a), Ok(b)) = (k.eval(&[*p], &z0), k.diagonal(&[*p])) {
            off.push(a.norm());
            diag.push(b);
        }
    }
    let off_max = off.iter().copied().fold(0.0, f64::max);
    s.check("outer: max |K(s_j, z0)|", off_max, Relation::Below, 1e3 * off[0].max(1.0));
    s.check("outer: K(s_4, s_4) / K(s_1, s_1)", diag[diag.len() - 1] / diag[0], Relation::Above, 1e4);
    s.note("approach distances are kept >= 1e-4 from the boundary");
    s.finish()
}

/// The covering map of the punctured disc gives an unbounded gradient.
pub fn suite_zimmer(seed: u64, bound: f64) -> SuiteResult {
    let mut s = Suite::new("zimmer", seed);
    let mut witness = None;
    for j in 1..=40 {
        let w = C64::new(1.0 - 0.5f64.powi(j), 0.0);
        let q = zimmer_quantity(w);
        if q > bound {
            witness = Some((w, q));
            break;
        }
    }
    match witness {
        Some((w, q)) => {
            s.check("witness quantity", q, Relation::Above, bound);
            s.check("witness |w|", w.norm(), Relation::Below, 1.0);
            s.note(format!("witness w = {w}, quantity {q}"));
        }
        None => {
            s.check("witness quantity", 0.0, Relation::Above, bound);
        }
    }
    let mut rng = stream(seed, 0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let w = sampling::in_ball(&mut rng, 1, 0.95)[0];
        let res = (zimmer_quantity(w) - zimmer_log_modulus(w)).abs();
        if res > 1e-12 {
            s.witness("covering identity", &[&[w]], format!("residual {res}"));
        }
        worst = worst.max(res);
    }
    s.check("covering identity max residual", worst, Relation::Below, 1e-12);
    // the same growth seen through the kernel of the pushed-forward ball
    match kernel_for(&DomainSpec::zimmer_domain()) {
        Ok(k) => {
            let mut best = 0.0f64;
            for j in 1..=5 {
                let pre = [C64::new(0.0, 0.0), C64::new(1.0 - 0.5f64.powi(j), 0.0)];
                match BiholoMap::Zimmer
                    .forward(&pre, false)
                    .and_then(|z| property_star_star_length(&k, &z))
                {
                    Ok(l) => best = best.max(l),
                    Err(e) => s.error("log-gradient length", &e, &[&pre]),
                }
            }
            s.check("max |d log K|_g on the image domain", best, Relation::Above, 10.0);
        }
        Err(e) => s.error("zimmer kernel", &e, &[]),
    }
    s.finish()
}

/// Positivity of the complex Hessian of `-(c^2 Φ / 4 + 1)^{-1}`.
pub fn suite_hyperconvexity(seed: u64) -> SuiteResult {
    let mut s = Suite::new("hyperconvexity", seed);
    for (tag, (name, d)) in [("disc", DomainSpec::Disc), ("ball2", DomainSpec::ball(2))]
        .into_iter()
        .enumerate()
    {
        let k = model(&d);
        let c2 = d.declared_c2().expect("declared");
        let mut rng = stream(seed, tag as u64);
        let mut min_eig = f64::INFINITY;
        let mut range = (f64::INFINITY, f64::NEG_INFINITY);
        for _ in 0..100 {
            let z0 = sample(&mut rng, &d);
            let z = sample(&mut rng, &d);
            match (hessian_min_eig(&k, &z0, &z, c2), exhaustion_phi(&k, &z0, &z, c2)) {
                (Ok(m), Ok(phi)) => {
                    if m <= 1e-12 {
                        s.witness(format!("{name}: hessian"), &[&z0, &z], format!("min eigenvalue {m}"));
                    }
                    min_eig = min_eig.min(m);
                    range = (range.0.min(phi), range.1.max(phi));
                }
                (Err(e), _) | (_, Err(e)) => s.error(format!("{name}: hessian"), &e, &[&z0, &z]),
            }
        }
        s.check(format!("{name}: min hessian eigenvalue"), min_eig, Relation::Above, 1e-12);
        s.check(format!("{name}: min phi"), range.0, Relation::AtLeast, -1.0);
        s.check(format!("{name}: max phi"), range.1, Relation::Below, 0.0);
    }
    s.finish()
}

/// Lower bound `K(z,z) δ^2 (log δ)^2` over a radial grid `δ ∈ [1e-4, 0.5]`.
pub fn suite_mok_yau(seed: u64) -> SuiteResult {
    let mut s = Suite::new("mok_yau", seed);
    let grid: Vec<f64> = (0..=200)
        .map(|i| 10f64.powf(-4.0 + (0.5f64.log10() + 4.0) * i as f64 / 200.0))
        .collect();
    let mut rng = stream(seed, 0);
    for (name, d) in [("disc", DomainSpec::Disc), ("ball2", DomainSpec::ball(2))] {
        let k = model(&d);
        let u = sampling::direction(&mut rng, d.dim());
        let mut inf_log = (f64::INFINITY, 0.0);
        let mut inf_plain = f64::INFINITY;
        for &delta in &grid {
            let z: Vec<C64> = u.iter().map(|c| c * (1.0 - delta)).collect();
            let res = d
                .boundary_distance(&z)
                .and_then(|dist| Ok((dist, k.diagonal(&z)?)));
            match res {
                Ok((dist, kv)) => {
                    let ratio = kv * dist * dist * dist.ln().powi(2);
                    if ratio < inf_log.0 {
                        inf_log = (ratio, dist);
                    }
                    inf_plain = inf_plain.min(kv * dist * dist);
                }
                Err(e) => s.error(format!("{name}: grid"), &e, &[&z]),
            }
        }
        s.note(format!(
            "{name}: empirical C = {:.12} attained at delta = {:.3e}; inf K delta^2 = {:.12}",
            inf_log.0, inf_log.1, inf_plain
        ));
        if name == "disc" {
            let target = 1.0 / (4.0 * PI);
            if !s.check("disc: inf K delta^2 (log delta)^2", inf_log.0, Relation::AtLeast, target - 1e-6) {
                let z: Vec<C64> = u.iter().map(|c| c * (1.0 - inf_log.1)).collect();
                s.witness("disc: Mok-Yau ratio", &[&z], format!("ratio {} at delta {}", inf_log.0, inf_log.1));
            }
            s.check("disc: inf K delta^2 (analytic oracle)", inf_plain, Relation::AtLeast, target - 1e-12);
        } else {
            s.check(format!("{name}: inf K delta^2 (log delta)^2"), inf_log.0, Relation::Above, 0.0);
        }
    }
    s.finish()
}

/// Volume identity with the `det g(p)` normalization.
pub fn suite_volume(seed: u64) -> SuiteResult {
    let mut s = Suite::new("volume", seed);
    for (tag, (name, d)) in [("disc", DomainSpec::Disc), ("ball2", DomainSpec::ball(2))]
        .into_iter()
        .enumerate()
    {
        let k = model(&d);
        let c2 = d.declared_c2().expect("declared");
        let n = d.dim() as i32;
        let mut rng = stream(seed, tag as u64);
        let mut worst = 0.0f64;
        let mut factor_gap = 0.0f64;
        for _ in 0..100 {
            let p = sample(&mut rng, &d);
            let z = sample(&mut rng, &d);
            match volume_identity(&k, &p, &z, c2) {
                Ok(v) => {
                    if v.residual >= 1e-8 {
                        s.witness(format!("{name}: volume"), &[&p, &z], format!("{v:?}"));
                    }
                    worst = worst.max(v.residual);
                    // factor F with V = |D_T|^2 F (1 - c^2 Q/2)^{-(n+1)}
                    let found = v.v
                        / (v.jacobian_det_abs.powi(2) * (1.0 - 0.5 * c2 * v.quad_form).powi(-(n + 1)));
                    factor_gap = factor_gap.max((found / v.det_g_base - 1.0).abs());
                }
                Err(e) => s.error(format!("{name}: volume"), &e, &[&p, &z]),
            }
        }
        s.check(format!("{name}: max residual"), worst, Relation::Below, 1e-8);
        s.check(
            format!("{name}: max |normalization factor / det g(p) - 1|"),
            factor_gap,
            Relation::Below,
            1e-8,
        );
        let origin = vec![C64::new(0.0, 0.0); d.dim()];
        if let Ok(v) = volume_identity(&k, &origin, &origin, c2) {
            s.note(format!(
                "{name}: at p = z = 0 the normalization factor is {} = det g(0)",
                v.v / v.jacobian_det_abs.powi(2)
            ));
        }
    }
    s.finish()
}

fn same_bits(a: &[C64], b: &[C64]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
}

/// The disc and the punctured disc share their Bergman space.
pub fn suite_removability(seed: u64) -> SuiteResult {
    const DEGREE: usize = 30;
    let mut s = Suite::new("removability", seed);
    let order = default_quad_order(&DomainSpec::Disc, DEGREE);
    let built = gram_kernel(&DomainSpec::Disc, DEGREE, order)
        .and_then(|a| Ok((a, gram_kernel(&DomainSpec::PuncturedDisc, DEGREE, order)?)));
    let (a, b) = match built {
        Ok(x) => x,
        Err(e) => {
            s.error("gram build", &e, &[]);
            return s.finish();
        }
    };
    let (ga, gb) = (a.gram_basis().expect("gram"), b.gram_basis().expect("gram"));
    let mismatched = ga
        .gram()
        .iter()
        .zip(gb.gram().iter())
        .filter(|(x, y)| !same_bits(&[**x], &[**y]))
        .count()
        + (ga.gram().len() != gb.gram().len()) as usize
        + (ga.exponents() != gb.exponents()) as usize;
    s.check("gram entries differing", mismatched as f64, Relation::AtMost, 0.0);

    let mut differing = 0usize;
    let mut compare = |s: &mut Suite, label: &str, x: Result<Vec<C64>>, y: Result<Vec<C64>>, pts: &[&[C64]]| match (x, y) {
        (Ok(x), Ok(y)) => {
            if !same_bits(&x, &y) {
                differing += 1;
                s.witness(label.to_string(), pts, format!("{x:?} vs {y:?}"));
            }
        }
        (Err(e), _) | (_, Err(e)) => s.error(label.to_string(), &e, pts),
    };
    let (z, w) = ([C64::new(0.5, 0.0)], [C64::new(0.2, 0.0)]);
    compare(&mut s, "K(0.5, 0.2)", a.eval(&z, &w).map(|v| vec![v]), b.eval(&z, &w).map(|v| vec![v]), &[&z, &w]);
    let p = [C64::new(0.3, 0.0)];
    let one = [C64::new(1.0, 0.0)];
    let hsc_a = hsc(&a, &p, &one);
    compare(
        &mut s,
        "hsc at 0.3",
        hsc_a.clone().map(|v| vec![C64::new(v, 0.0)]),
        hsc(&b, &p, &one).map(|v| vec![C64::new(v, 0.0)]),
        &[&p],
    );
    if let Ok(v) = hsc_a {
        s.check("|hsc(0.3) + 1|", (v + 1.0).abs(), Relation::AtMost, 1e-8);
    }
    let mut rng = stream(seed, 0);
    for _ in 0..20 {
        let z0 = sample(&mut rng, &DomainSpec::PuncturedDisc);
        let z = sample(&mut rng, &DomainSpec::PuncturedDisc);
        let dia = |k: &KernelModel| diastasis(k, &z0, &z).map(|v| vec![C64::new(v, 0.0)]);
        compare(&mut s, "diastasis", dia(&a), dia(&b), &[&z0, &z]);
        let met = |k: &KernelModel| LocalGeometry::at(k, &z).map(|g| g.metric.matrix().iter().copied().collect());
        compare(&mut s, "metric", met(&a), met(&b), &[&z]);
        let cur = |k: &KernelModel| LocalGeometry::at(k, &z).map(|g| g.curvature().entries().to_vec());
        compare(&mut s, "curvature", cur(&a), cur(&b), &[&z]);
    }
    s.check("derived quantities differing", differing as f64, Relation::AtMost, 0.0);
    s.finish()
}

/// `-2 log(1 - rho^2) = Φ` for the Skwarczyński distance.
pub fn suite_skwarczynski(seed: u64) -> SuiteResult {
    let mut s = Suite::new("skwarczynski", seed);
    let domains = [
        ("disc", DomainSpec::Disc),
        ("ball2", DomainSpec::ball(2)),
        ("ball3", DomainSpec::ball(3)),
        ("polydisc2", DomainSpec::polydisc(2)),
        ("annulus0.5", DomainSpec::Annulus { r: 0.5 }),
        ("hartogs", DomainSpec::hartogs_triangle()),
    ];
    for (tag, (name, d)) in domains.into_iter().enumerate() {
        let k = kernel_for(&d).expect("exact kernel");
        let mut rng = stream(seed, tag as u64);
        let mut worst = 0.0f64;
        let mut scaled = 0.0f64;
        for _ in 0..100 {
            let z0 = sample(&mut rng, &d);
            let z = sample(&mut rng, &d);
            let r = skwarczynski_rho(&k, &z0, &z).and_then(|rho| Ok((rho, diastasis(&k, &z0, &z)?)));
            match r {
                Ok((_, phi)) if phi.is_infinite() => {}
                Ok((rho, phi)) => {
                    let res = (-2.0 * (1.0 - rho * rho).ln() - phi).abs();
                    if res > 1e-10 {
                        s.witness(format!("{name}: skwarczynski"), &[&z0, &z], format!("residual {res}"));
                    }
                    worst = worst.max(res);
                    scaled = scaled.max(res * (1.0 - rho * rho));
                }
                Err(e) => s.error(format!("{name}: skwarczynski"), &e, &[&z0, &z]),
            }
        }
        s.check(format!("{name}: max residual"), worst, Relation::AtMost, 1e-10);
        // rho is stored in double precision, so near kernel zeros (1 - rho^2 small)
        // the residual is bounded by a few ulps divided by 1 - rho^2
        s.check(
            format!("{name}: max residual * (1 - rho^2)"),
            scaled,
            Relation::AtMost,
            1e-14,
        );
    }
    s.finish()
}

/// Runs one suite by name with its default parameters.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteResult> {
    Ok(match name {
        "constant_curvature" => suite_constant_curvature(seed),
        "identity_lemma" => suite_identity_lemma(seed),
        "closed_form_diastasis" => suite_closed_form_diastasis(seed),
        "oracle_equivalence" => suite_oracle_equivalence(seed),
        "annulus_counterexample" => suite_annulus_counterexample(seed, 0.5),
        "zimmer" => suite_zimmer(seed, 1000.0),
        "hyperconvexity" => suite_hyperconvexity(seed),
        "mok_yau" => suite_mok_yau(seed),
        "volume" => suite_volume(seed),
        "removability" => suite_removability(seed),
        "skwarczynski" => suite_skwarczynski(seed),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown suite `{other}` (known: {})",
                SUITE_NAMES.join(", ")
            )))
        }
    })
}

pub fn run_all(seed: u64) -> Vec<SuiteResult> {
    SUITE_NAMES
        .iter()
        .map(|n| run_suite(n, seed).expect("listed suites exist"))
        .collect()
}

/// Human-readable table: one line per suite, then failing measurements.
pub fn summary_table(results: &[SuiteResult]) -> String {
    let mut out = format!("{:<24} {:<6} {:>10}\n", "suite", "status", "ms");
    for r in results {
        out.push_str(&format!(
            "{:<24} {:<6} {:>10}\n",
            r.suite_name,
            if r.passed() { "pass" } else { "FAIL" },
            r.runtime_ms
        ));
        for m in r.measurements.iter().filter(|m| !m.passed) {
            out.push_str(&format!(
                "    {}: {:e} (required {} {:e})\n",
                m.label,
                m.value,
                m.relation.symbol(),
                m.tolerance
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Relation::AtMost.holds(1.0, 1.0));
        assert!(!Relation::Below.holds(1.0, 1.0));
        assert!(Relation::Above.holds(2.0, 1.0));
        assert!(!Relation::AtLeast.holds(f64::NAN, 0.0));
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(matches!(run_suite("nope", 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn zimmer_suite_is_deterministic() {
        let a = suite_zimmer(7, 10.0);
        let b = suite_zimmer(7, 10.0);
        assert_eq!(a.measurements, b.measurements);
        assert!(a.passed(), "{}", a.to_json());
    }

    #[test]
    fn failures_carry_witnesses() {
        // a bound no witness can reach within the search range
        let r = suite_zimmer(1, 1e300);
        assert!(!r.passed());
        let table = summary_table(&[r]);
        assert!(table.contains("FAIL"));
    }

    #[test]
    fn json_has_schema_and_status() {
        let r = suite_zimmer(3, 10.0);
        let j = r.to_json();
        assert!(j.contains("\"schema_version\": 1") && j.contains("\"status\": \"pass\""));
    }
}
