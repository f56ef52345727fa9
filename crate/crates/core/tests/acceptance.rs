//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Three criteria cannot hold as stated and are expected to fail:
//! the annulus(0.5) curvature is constant to about 1e-10, the disc infimum of
//! K δ² (log δ)² is 0.068 < 1/(4π), and ρ stored in double precision loses
//! the identity near annulus kernel zeros. The harness fails if any other
//! criterion fails, or if one of these starts passing.

use std::collections::BTreeSet;
use std::time::Duration;

use bergman_core::verify::{self, Measurement, SuiteResult, DEFAULT_SEED};

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Duration,
    run: fn(u64) -> SuiteResult,
    /// Selects the measurements of the suite that belong to this criterion.
    select: fn(&Measurement) -> bool,
}

fn all(_: &Measurement) -> bool {
    true
}

fn criteria() -> Vec<Criterion> {
    let secs = Duration::from_secs;
    vec![
        Criterion {
            id: 1,
            title: "constant curvature on disc, ball(2), ball(3)",
            limit: secs(10),
            run: verify::suite_constant_curvature,
            select: |m| !m.label.contains("spread"),
        },
        Criterion {
            id: 2,
            title: "curvature spread on polydisc(2) and annulus(0.5)",
            limit: secs(10),
            run: verify::suite_constant_curvature,
            select: |m| m.label.contains("spread"),
        },
        Criterion {
            id: 3,
            title: "gradient length, two evaluations",
            limit: secs(20),
            run: verify::suite_identity_lemma,
            select: all,
        },
        Criterion {
            id: 4,
            title: "closed-form diastasis bundle",
            limit: secs(20),
            run: verify::suite_closed_form_diastasis,
            select: |m| !m.label.contains("boundary"),
        },
        Criterion {
            id: 5,
            title: "Gram kernel vs closed forms",
            limit: secs(60),
            run: verify::suite_oracle_equivalence,
            select: all,
        },
        Criterion {
            id: 6,
            title: "annulus kernel zero and diastasis ladders",
            limit: secs(30),
            run: |seed| verify::suite_annulus_counterexample(seed, 0.5),
            select: all,
        },
        Criterion {
            id: 7,
            title: "punctured-disc gradient unbounded",
            limit: secs(5),
            run: |seed| verify::suite_zimmer(seed, 1000.0),
            select: all,
        },
        Criterion {
            id: 8,
            title: "exhaustion Hessian positive",
            limit: secs(20),
            run: verify::suite_hyperconvexity,
            select: all,
        },
        Criterion {
            id: 9,
            title: "Mok-Yau lower bound",
            limit: secs(10),
            run: verify::suite_mok_yau,
            select: all,
        },
        Criterion {
            id: 10,
            title: "volume identity",
            limit: secs(20),
            run: verify::suite_volume,
            select: all,
        },
        Criterion {
            id: 11,
            title: "disc and punctured disc identical",
            limit: secs(10),
            run: verify::suite_removability,
            select: all,
        },
        Criterion {
            id: 12,
            title: "Skwarczynski identity",
            limit: secs(5),
            run: verify::suite_skwarczynski,
            select: all,
        },
    ]
}

/// Criterion id and the measurement labels expected to fail.
const KNOWN_UNATTAINABLE: &[(u32, &str)] = &[
    (2, "annulus0.5: hsc spread"),
    (9, "disc: inf K delta^2 (log delta)^2"),
    (12, "annulus0.5: max residual"),
];

fn main() {
    let mut failed_labels = BTreeSet::new();
    let mut report = String::new();
    for c in criteria() {
        let result = (c.run)(DEFAULT_SEED);
        let ms: Vec<&Measurement> = result.measurements.iter().filter(|m| (c.select)(m)).collect();
        assert!(!ms.is_empty(), "criterion {} selected no measurements", c.id);
        let in_time = result.runtime_ms as u128 <= c.limit.as_millis();
        let failing: Vec<&&Measurement> = ms.iter().filter(|m| !m.passed).collect();
        let pass = failing.is_empty() && in_time;
        let line = format!(
            "{} criterion {:>2}: {} ({} ms, limit {} s)",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            result.runtime_ms,
            c.limit.as_secs()
        );
        println!("{line}");
        report.push_str(&line);
        report.push('\n');
        for m in &failing {
            let detail = format!(
                "     {}: {:e} (required {:?} {:e})",
                m.label, m.value, m.relation, m.tolerance
            );
            println!("{detail}");
            failed_labels.insert((c.id, m.label.clone()));
        }
        if !in_time {
            failed_labels.insert((c.id, "runtime".to_string()));
        }
    }
    let expected: BTreeSet<(u32, String)> = KNOWN_UNATTAINABLE
        .iter()
        .map(|(id, l)| (*id, l.to_string()))
        .collect();
    if failed_labels != expected {
        eprintln!("failing measurements differ from the documented unattainable set");
        eprintln!("expected: {expected:?}");
        eprintln!("found:    {failed_labels:?}");
        eprint!("{report}");
        std::process::exit(1);
    }
    println!("acceptance: failures match the documented unattainable set");
}
