use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bergman-lab"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("BERGMAN_LAB_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn ball_curvature_example() {
    let o = run(&[
        "curvature",
        "--domain",
        config("ball2.json").to_str().unwrap(),
        "--point",
        "0,0",
        "--direction",
        "1,0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v + 2.0 / 3.0).abs() < 1e-6);
    assert_eq!(stdout(&o).trim(), "-0.666667");
}

#[test]
fn disc_diastasis_example() {
    let o = run(&[
        "diastasis",
        "--domain",
        config("disc.json").to_str().unwrap(),
        "--base",
        "0",
        "--point",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0.575364");
}

#[test]
fn removability_suite_passes() {
    let o = run(&["verify", "--suite", "removability"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(v["suite_name"], "removability");
    assert_eq!(v["status"], "pass");
    assert_eq!(v["schema_version"], 1);
    assert!(stderr(&o).contains("removability"));
}

#[test]
fn failing_suite_exits_one_with_witness() {
    let o = run(&["verify", "--suite", "mok_yau"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["status"], "fail");
    assert!(v["witness"]["points"].is_array());
}

#[test]
fn config_errors_exit_two_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind":"annulus"}"#).unwrap();
    let o = run(&["kernel", "--domain", bad.to_str().unwrap(), "--point", "0.7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`r`"), "{}", stderr(&o));

    let o = run(&["kernel", "--domain", dir.path().join("missing.json").to_str().unwrap(), "--point", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--domain"));

    let o = run(&["kernel", "--domain", config("disc.json").to_str().unwrap(), "--point", "0.3+i"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--point"));

    let o = run(&["metric", "--domain", config("disc.json").to_str().unwrap(), "--point", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("outside"));

    let o = run(&["verify", "--suite", "nonexistent"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--suite"));
}

#[test]
fn scan_csv_is_round_trip_exact_and_deterministic() {
    let domain = config("annulus.json");
    let args = [
        "scan",
        "--domain",
        domain.to_str().unwrap(),
        "--base",
        "0.7",
        "--grid",
        "polar:0.55,0.95,5,6",
        "--format",
        "csv",
        "--seed",
        "11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "index");
    assert!(header.contains(&"hsc_min") && header.contains(&"quad_form"));
    let mut rows = 0;
    for line in lines {
        rows += 1;
        for field in line.split(',').skip(1).filter(|f| !f.is_empty()) {
            let x: f64 = field.parse().unwrap();
            if x.is_finite() && x != 0.0 {
                // 17 significant digits in scientific notation
                let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
                assert_eq!(mantissa.replace('.', "").len(), 17, "{field}");
            }
        }
    }
    assert_eq!(rows, 30);
}

#[test]
fn seed_comes_from_the_environment() {
    let domain = config("polydisc2.json");
    let args = [
        "scan",
        "--domain",
        domain.to_str().unwrap(),
        "--base",
        "0.1,0.2i",
        "--grid",
        "cartesian:-0.5,0.5,3",
        "--format",
        "json",
    ];
    let with_env = bin().args(args).env("BERGMAN_LAB_SEED", "5").output().unwrap();
    let mut explicit = args.to_vec();
    explicit.extend(["--seed", "5"]);
    let with_flag = run(&explicit);
    assert_eq!(with_env.status.code(), Some(0));
    assert_eq!(with_env.stdout, with_flag.stdout);
    let other = run(&args);
    assert_ne!(other.stdout, with_flag.stdout);
}

#[test]
fn output_file_and_json_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("metric.json");
    let o = run(&[
        "metric",
        "--domain",
        config("hartogs.json").to_str().unwrap(),
        "--point",
        "0.1,0.5+0.1i",
        "--format",
        "json",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn gram_oracle_matches_exact_kernel() {
    let exact = run(&["kernel", "--domain", config("disc.json").to_str().unwrap(), "--point", "0.3+0.2i", "--format", "csv"]);
    let gram = run(&[
        "kernel",
        "--domain",
        config("disc.json").to_str().unwrap(),
        "--point",
        "0.3+0.2i",
        "--format",
        "csv",
        "--degree",
        "30",
    ]);
    let value = |o: &Output| -> f64 { stdout(o).lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap() };
    assert!((value(&exact) - value(&gram)).abs() < 1e-9 * value(&exact));
    let o = run(&["kernel", "--domain", config("disc.json").to_str().unwrap(), "--point", "0", "--quad-order", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--quad-order"));
}

#[test]
fn kernel_grid_csv() {
    let o = run(&["kernel", "--domain", config("annulus.json").to_str().unwrap(), "--grid", "cartesian:-1,1,11"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("re_z,im_z,K\n"));
}
