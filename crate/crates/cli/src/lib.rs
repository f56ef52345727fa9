//! Front end for `bergman-lab`: domain configs in, reports and CSV grids out.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use bergman_core::geometry::{self, LocalGeometry};
use bergman_core::kernel::{default_quad_order, gram_kernel, kernel_for};
use bergman_core::report::{self, fmt_f64, ScanGrid};
use bergman_core::verify::{self, SuiteResult, DEFAULT_SEED};
use bergman_core::{sampling, DomainSpec, KernelModel, C64, SCHEMA_VERSION};

pub mod literal;

use literal::parse_point;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{field}: {message}")]
    Config { field: String, message: String },
    #[error("{field}: {message}")]
    Parse { field: String, message: String },
    #[error(transparent)]
    Compute(#[from] bergman_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn parse(field: &str, message: impl Into<String>) -> Self {
        CliError::Parse {
            field: field.to_string(),
            message: message.into(),
        }
    }

    fn config(field: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Parse { .. } => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}

const GRAMMAR: &str = "\
Points are comma-separated complex literals, one per coordinate.
A literal is `a`, `ai`, `a+bi` or `a-bi` where a and b are decimal reals,
for example `0.3+0.4i,0` or `-0.5i`.

Domain configs are JSON, e.g. {\"kind\":\"ball\",\"n\":2} or
{\"kind\":\"annulus\",\"r\":0.5}.

Exit codes: 0 success, 1 suite failure or numerical error, 2 config or parse error.";

#[derive(Debug, Parser)]
#[command(name = "bergman-lab", version, about = "Bergman kernels and Kähler geometry of model domains", after_help = GRAMMAR)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct DomainArgs {
    /// JSON domain configuration.
    #[arg(long)]
    pub domain: PathBuf,
    /// Use the Gram oracle of this total degree instead of the exact kernel.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Quadrature order for the Gram oracle.
    #[arg(long)]
    pub quad_order: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// K(z, w); with --grid, K(z, z) over a grid of a planar domain as CSV.
    Kernel {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Second argument w (defaults to the point).
        #[arg(long, allow_hyphen_values = true)]
        base: Option<String>,
        /// `polar:r_min,r_max,n_r,n_theta` or `cartesian:min,max,n`.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Bergman metric g_{a b̄} at a point.
    Metric {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Curvature tensor, or holomorphic sectional curvature along each --direction.
    Curvature {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_hyphen_values = true)]
        direction: Vec<String>,
    },
    /// Representative coordinates of --point based at --base.
    Repcoords {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Diastasis Φ_base(point).
    Diastasis {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Geometry over a grid in one coordinate plane.
    Scan {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        /// `polar:r_min,r_max,n_r,n_theta` or `cartesian:min,max,n`.
        #[arg(long)]
        grid: String,
        /// Values of the coordinates not being scanned (defaults to the base).
        #[arg(long, allow_hyphen_values = true)]
        anchor: Option<String>,
        /// Index of the scanned coordinate.
        #[arg(long, default_value_t = 0)]
        slot: usize,
        /// Random directions for the curvature range, besides the coordinate axes.
        #[arg(long, default_value_t = 8)]
        directions: usize,
        #[arg(long, env = "BERGMAN_LAB_SEED")]
        seed: Option<u64>,
    },
    /// Run verification suites; JSON lines out, summary table on stderr.
    Verify {
        /// Suite name; repeatable. All suites when omitted.
        #[arg(long)]
        suite: Vec<String>,
        #[arg(long, env = "BERGMAN_LAB_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Result of one invocation: the artifact, an optional side report for
/// stderr, where the artifact goes, and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub artifact: String,
    pub summary: Option<String>,
    pub output: Option<PathBuf>,
    pub exit_code: u8,
}

impl Outcome {
    fn ok(artifact: String, output: &Option<PathBuf>) -> Self {
        Self {
            artifact,
            summary: None,
            output: output.clone(),
            exit_code: 0,
        }
    }
}

fn load_kernel(args: &DomainArgs) -> Result<KernelModel, CliError> {
    let text = std::fs::read_to_string(&args.domain)
        .map_err(|e| CliError::config("--domain", format!("{}: {e}", args.domain.display())))?;
    let d = DomainSpec::from_json(&text).map_err(|e| CliError::config("domain config", e.to_string()))?;
    match (args.degree, args.quad_order) {
        (None, None) => kernel_for(&d).map_err(|e| CliError::config("domain config", e.to_string())),
        (None, Some(_)) => Err(CliError::config("--quad-order", "requires --degree")),
        (Some(deg), q) => {
            let q = q.unwrap_or_else(|| default_quad_order(&d, deg));
            Ok(gram_kernel(&d, deg, q)?)
        }
    }
}

/// Parses a point and checks it against the domain.
fn point_in(k: &KernelModel, field: &str, s: &str) -> Result<Vec<C64>, CliError> {
    let z = parse_point(field, s)?;
    let d = k.domain();
    if z.len() != d.dim() {
        return Err(CliError::parse(
            field,
            format!("expected {} coordinates, got {}", d.dim(), z.len()),
        ));
    }
    if !d.contains(&z)? {
        return Err(CliError::parse(field, "point lies outside the domain"));
    }
    Ok(z)
}

fn direction_of(k: &KernelModel, s: &str) -> Result<Vec<C64>, CliError> {
    let x = parse_point("--direction", s)?;
    if x.len() != k.dim() {
        return Err(CliError::parse(
            "--direction",
            format!("expected {} coordinates, got {}", k.dim(), x.len()),
        ));
    }
    Ok(x)
}

pub fn parse_grid(s: &str) -> Result<ScanGrid, CliError> {
    let bad = |m: &str| CliError::parse("--grid", m.to_string());
    let (kind, rest) = s.split_once(':').ok_or_else(|| bad("expected `polar:...` or `cartesian:...`"))?;
    let nums: Vec<&str> = rest.split(',').map(str::trim).collect();
    let real = |t: &str| t.parse::<f64>().map_err(|_| bad(&format!("`{t}` is not a number")));
    let count = |t: &str| t.parse::<usize>().map_err(|_| bad(&format!("`{t}` is not a count")));
    match (kind, nums.as_slice()) {
        ("polar", [a, b, n, m]) => Ok(ScanGrid::Polar {
            r_min: real(a)?,
            r_max: real(b)?,
            n_r: count(n)?,
            n_theta: count(m)?,
        }),
        ("cartesian", [a, b, n]) => Ok(ScanGrid::Cartesian {
            min: real(a)?,
            max: real(b)?,
            n: count(n)?,
        }),
        _ => Err(bad("expected `polar:r_min,r_max,n_r,n_theta` or `cartesian:min,max,n`")),
    }
}

fn fmt6(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:.6}", z.re)
    } else {
        format!("{:.6}{:+.6}i", z.re, z.im)
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

fn provenance(k: &KernelModel) -> serde_json::Value {
    serde_json::to_value(k.provenance()).expect("provenance serializes")
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Kernel {
            domain,
            point,
            base,
            grid,
        } => {
            let k = load_kernel(&domain)?;
            if let Some(g) = grid {
                if point.is_some() || base.is_some() {
                    return Err(CliError::parse("--grid", "cannot be combined with --point/--base"));
                }
                let g = parse_grid(&g)?;
                return Ok(Outcome::ok(report::kernel_grid_csv(&k, &g)?, &domain.output));
            }
            let point = point.ok_or_else(|| CliError::parse("--point", "required without --grid"))?;
            let z = point_in(&k, "--point", &point)?;
            let w = match &base {
                Some(b) => point_in(&k, "--base", b)?,
                None => z.clone(),
            };
            let v = k.eval(&z, &w)?;
            let text = match domain.format {
                Format::Text => format!("{}\n", fmt6(v)),
                Format::Json => pretty(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "domain": k.domain(),
                    "provenance": provenance(&k),
                    "point": z,
                    "base": w,
                    "value": v,
                })),
                Format::Csv => csv_table(&["re_K", "im_K"], &[vec![fmt_f64(v.re), fmt_f64(v.im)]]),
            };
            Ok(Outcome::ok(text, &domain.output))
        }
        Command::Metric { domain, point } => {
            let k = load_kernel(&domain)?;
            let z = point_in(&k, "--point", &point)?;
            let g = geometry::metric_at(&k, &z)?;
            let n = g.dim();
            let text = match domain.format {
                Format::Text => {
                    let mut s = String::new();
                    for a in 0..n {
                        let row: Vec<String> = (0..n).map(|b| fmt6(g.entry(a, b))).collect();
                        writeln!(s, "{}", row.join("  ")).unwrap();
                    }
                    s
                }
                Format::Json => {
                    let mut v = g.to_json_value();
                    v["schema_version"] = SCHEMA_VERSION.into();
                    v["provenance"] = provenance(&k);
                    pretty(&v)
                }
                Format::Csv => {
                    let rows: Vec<Vec<String>> = (0..n)
                        .flat_map(|a| (0..n).map(move |b| (a, b)))
                        .map(|(a, b)| {
                            let e = g.entry(a, b);
                            vec![a.to_string(), b.to_string(), fmt_f64(e.re), fmt_f64(e.im)]
                        })
                        .collect();
                    csv_table(&["a", "bbar", "re", "im"], &rows)
                }
            };
            Ok(Outcome::ok(text, &domain.output))
        }
        Command::Curvature {
            domain,
            point,
            direction,
        } => {
            let k = load_kernel(&domain)?;
            let z = point_in(&k, "--point", &point)?;
            let dirs = direction
                .iter()
                .map(|s| direction_of(&k, s))
                .collect::<Result<Vec<_>, _>>()?;
            let lg = LocalGeometry::at(&k, &z)?;
            let curv = lg.curvature();
            let hsc = dirs
                .iter()
                .map(|x| Ok(curv.sectional(&lg.metric, x)?.re))
                .collect::<Result<Vec<f64>, CliError>>()?;
            let n = k.dim();
            let text = match domain.format {
                Format::Text if !dirs.is_empty() => hsc.iter().map(|h| format!("{h:.6}\n")).collect(),
                Format::Text => {
                    let mut s = String::new();
                    for (idx, v) in curv.entries().iter().enumerate() {
                        let (i, j, kk, l) = (idx / n.pow(3), idx / n.pow(2) % n, idx / n % n, idx % n);
                        writeln!(s, "R[{i},{j},{kk},{l}] = {}", fmt6(*v)).unwrap();
                    }
                    s
                }
                Format::Json => {
                    let mut v = curv.to_json_value();
                    v["schema_version"] = SCHEMA_VERSION.into();
                    v["provenance"] = provenance(&k);
                    v["hsc"] = json!(dirs
                        .iter()
                        .zip(&hsc)
                        .map(|(x, h)| json!({"direction": x, "value": h}))
                        .collect::<Vec<_>>());
                    pretty(&v)
                }
                Format::Csv if !dirs.is_empty() => {
                    let rows: Vec<Vec<String>> = dirs
                        .iter()
                        .zip(&hsc)
                        .map(|(x, h)| vec![literal::format_point(x), fmt_f64(*h)])
                        .collect();
                    csv_table(&["direction", "hsc"], &rows)
                }
                Format::Csv => {
                    let rows: Vec<Vec<String>> = curv
                        .entries()
                        .iter()
                        .enumerate()
                        .map(|(idx, v)| {
                            vec![
                                (idx / n.pow(3)).to_string(),
                                (idx / n.pow(2) % n).to_string(),
                                (idx / n % n).to_string(),
                                (idx % n).to_string(),
                                fmt_f64(v.re),
                                fmt_f64(v.im),
                            ]
                        })
                        .collect();
                    csv_table(&["i", "jbar", "k", "lbar", "re", "im"], &rows)
                }
            };
            Ok(Outcome::ok(text, &domain.output))
        }
        Command::Repcoords { domain, base, point } => {
            let k = load_kernel(&domain)?;
            let p = point_in(&k, "--base", &base)?;
            let z = point_in(&k, "--point", &point)?;
            let rc = geometry::rep_coords(&k, &p, &z)?;
            let q = rc.quad_form();
            let text = match domain.format {
                Format::Text => {
                    let mut s = String::new();
                    writeln!(s, "w = {}", rc.w.iter().map(|c| fmt6(*c)).collect::<Vec<_>>().join(", ")).unwrap();
                    writeln!(s, "Q = {q:.6}").unwrap();
                    writeln!(s, "det Dw = {}", fmt6(rc.jacobian_det())).unwrap();
                    s
                }
                Format::Json => pretty(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "domain": k.domain(),
                    "provenance": provenance(&k),
                    "base": p,
                    "point": z,
                    "w": rc.w,
                    "quad_form": q,
                    "jacobian_det": rc.jacobian_det(),
                })),
                Format::Csv => {
                    let rows: Vec<Vec<String>> = rc
                        .w
                        .iter()
                        .enumerate()
                        .map(|(a, w)| vec![a.to_string(), fmt_f64(w.re), fmt_f64(w.im)])
                        .collect();
                    csv_table(&["a", "re_w", "im_w"], &rows)
                }
            };
            Ok(Outcome::ok(text, &domain.output))
        }
        Command::Diastasis { domain, base, point } => {
            let k = load_kernel(&domain)?;
            let p = point_in(&k, "--base", &base)?;
            let z = point_in(&k, "--point", &point)?;
            let phi = geometry::diastasis(&k, &p, &z)?;
            let text = match domain.format {
                Format::Text => format!("{phi:.6}\n"),
                Format::Json => pretty(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "domain": k.domain(),
                    "provenance": provenance(&k),
                    "base": p,
                    "point": z,
                    // null encodes +inf at a kernel zero
                    "diastasis": if phi.is_finite() { json!(phi) } else { json!(null) },
                })),
                Format::Csv => csv_table(&["diastasis"], &[vec![fmt_f64(phi)]]),
            };
            Ok(Outcome::ok(text, &domain.output))
        }
        Command::Scan {
            domain,
            base,
            grid,
            anchor,
            slot,
            directions,
            seed,
        } => {
            let k = load_kernel(&domain)?;
            let p = point_in(&k, "--base", &base)?;
            let anchor = match &anchor {
                Some(a) => {
                    let a = parse_point("--anchor", a)?;
                    if a.len() != k.dim() {
                        return Err(CliError::parse("--anchor", format!("expected {} coordinates", k.dim())));
                    }
                    a
                }
                None => p.clone(),
            };
            if slot >= k.dim() {
                return Err(CliError::parse("--slot", format!("must be below {}", k.dim())));
            }
            let grid = parse_grid(&grid)?;
            let n = k.dim();
            let mut dirs: Vec<Vec<C64>> = (0..n)
                .map(|a| (0..n).map(|b| C64::new((a == b) as u8 as f64, 0.0)).collect())
                .collect();
            let mut rng = sampling::rng(seed.unwrap_or(DEFAULT_SEED));
            dirs.extend((0..directions).map(|_| sampling::direction(&mut rng, n)));
            let rows = report::scan(&k, &p, &anchor, slot, &grid, &dirs)?;
            let text = match domain.format {
                Format::Text | Format::Csv => report::scan_csv(&rows, n),
                Format::Json => pretty(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "domain": k.domain(),
                    "provenance": provenance(&k),
                    "base": p,
                    "directions": dirs,
                    "rows": rows,
                })),
            };
            Ok(Outcome::ok(text, &domain.output))
        }
        Command::Verify { suite, seed, output } => {
            let seed = seed.unwrap_or(DEFAULT_SEED);
            let names: Vec<String> = if suite.is_empty() {
                verify::SUITE_NAMES.iter().map(|s| s.to_string()).collect()
            } else {
                for s in &suite {
                    if !verify::SUITE_NAMES.contains(&s.as_str()) {
                        return Err(CliError::parse(
                            "--suite",
                            format!("unknown suite `{s}` (known: {})", verify::SUITE_NAMES.join(", ")),
                        ));
                    }
                }
                suite
            };
            let results = run_parallel(&names, seed);
            let mut artifact = String::new();
            for r in &results {
                artifact.push_str(&serde_json::to_string(r).expect("suite result serializes"));
                artifact.push('\n');
            }
            let failed = results.iter().any(|r| !r.passed());
            Ok(Outcome {
                artifact,
                summary: Some(verify::summary_table(&results)),
                output,
                exit_code: if failed { 1 } else { 0 },
            })
        }
    }
}

/// Each suite on its own thread; results in the order requested.
fn run_parallel(names: &[String], seed: u64) -> Vec<SuiteResult> {
    std::thread::scope(|s| {
        let handles: Vec<_> = names
            .iter()
            .map(|n| s.spawn(move || verify::run_suite(n, seed).expect("suite names checked")))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(
            parse_grid("polar:0,0.9,3,4").unwrap(),
            ScanGrid::Polar { r_min: 0.0, r_max: 0.9, n_r: 3, n_theta: 4 }
        );
        assert!(matches!(parse_grid("cartesian:-1,1,5").unwrap(), ScanGrid::Cartesian { n: 5, .. }));
        for bad in ["polar:0,1", "hex:1,2,3", "cartesian:a,1,3", "polar"] {
            let e = parse_grid(bad).unwrap_err();
            assert_eq!(e.exit_code(), 2);
            assert!(e.to_string().starts_with("--grid"));
        }
    }

    #[test]
    fn six_digit_text() {
        assert_eq!(fmt6(C64::new(-2.0 / 3.0, 0.0)), "-0.666667");
        assert_eq!(fmt6(C64::new(0.5, -0.25)), "0.500000-0.250000i");
    }
}
