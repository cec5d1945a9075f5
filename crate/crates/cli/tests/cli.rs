use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use modelset_core::{QuadField, QuadReal};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_modelset"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("MODELSET_THREADS").output().expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn report(prefix: &Path) -> Value {
    let text = fs::read_to_string(format!("{}.report.json", prefix.display())).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn listing(dir: &TempDir) -> Vec<String> {
    let mut names: Vec<String> =
        fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    names
}

const FIB_50: &str = r#"{
  "preset": "fibonacci",
  "xi": { "internal": ["1/7"] },
  "box": { "lo": ["0"], "hi": ["50"] }
}"#;

#[test]
fn generate_fibonacci_gaps_are_one_and_phi() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "fib.json", FIB_50);
    let out = dir.path().join("fib");
    let o = run(&["generate", "-c", &cfg, "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(format!("{}.points.txt", out.display())).unwrap();
    let f = QuadField::GOLDEN;
    let mut xs = Vec::new();
    for line in text.lines() {
        let (exact, float) = line.split_once('\t').expect("exact<TAB>float");
        let x: QuadReal = f.parse(exact).unwrap();
        assert!((x.to_f64() - float.parse::<f64>().unwrap()).abs() < 1e-12);
        xs.push(x);
    }
    assert!(xs.len() > 25);
    let mut gaps: Vec<QuadReal> = xs.windows(2).map(|w| &w[1] - &w[0]).collect();
    gaps.sort();
    gaps.dedup();
    assert_eq!(gaps, vec![f.one(), f.phi()]);
    assert_eq!(report(&out)["points"], xs.len());
}

#[test]
fn malformed_config_exits_2_without_outputs() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("syntax.json", "{ \"preset\": "),
        ("unknown.json", r#"{ "preset": "fibonacci", "colour": 3 }"#),
        ("window.json", r#"{ "preset": "fibonacci", "window": { "0": [["1", "0"]] } }"#),
        ("literal.json", r#"{ "preset": "fibonacci", "xi": { "internal": ["1/0"] } }"#),
    ];
    for (name, text) in cases {
        let cfg = write_config(&dir, name, text);
        let out = dir.path().join("out");
        let o = run(&["generate", "-c", &cfg, "-o", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
    let names = listing(&dir);
    assert!(names.iter().all(|n| n.ends_with(".json") && !n.contains("report")), "{names:?}");
    let o = run(&["generate", "-c", "/nonexistent/config.json", "-o", "/tmp/never"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["generate", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn singular_offset_is_a_domain_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "sing.json", r#"{ "preset": "fibonacci", "box": { "lo": ["-5"], "hi": ["5"] } }"#);
    let out = dir.path().join("sing");
    let o = run(&["generate", "-c", &cfg, "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(listing(&dir), vec!["sing.json"]);
}

#[test]
fn thread_variable_is_validated() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "fib.json", FIB_50);
    let out = dir.path().join("fib");
    let o = bin().args(["generate", "-c", &cfg, "-o", out.to_str().unwrap()]).env("MODELSET_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["generate", "-c", &cfg, "-o", out.to_str().unwrap()]).env("MODELSET_THREADS", "2").output().unwrap();
    assert!(o.status.success());
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = configs().join("fibonacci.json");
    let mut runs = Vec::new();
    for (k, threads) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("run{k}"));
        let o = bin()
            .args(["localize", "-c", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()])
            .env("MODELSET_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let stdout = String::from_utf8(o.stdout).unwrap();
        let files: Vec<(String, Vec<u8>)> = stdout
            .lines()
            .map(|p| (p.rsplit_once(&format!("run{k}")).unwrap().1.to_string(), fs::read(p).unwrap()))
            .collect();
        runs.push(files);
    }
    assert!(runs[0].len() >= 2, "{:?}", runs[0].iter().map(|f| &f.0).collect::<Vec<_>>());
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn every_config_command_succeeds() {
    let dir = TempDir::new().unwrap();
    let c = configs();
    let cases: &[(&[&str], &str)] = &[
        (&["scheme", "validate"], "fibonacci.json"),
        (&["generate"], "fibonacci_float.json"),
        (&["acceptance"], "fibonacci.json"),
        (&["localize"], "fibonacci.json"),
        (&["reproject"], "fibonacci_reproject.json"),
        (&["deform"], "fibonacci.json"),
        (&["meyer"], "fibonacci.json"),
        (&["nonslip-probe"], "fibonacci_singular.json"),
        (&["decompose"], "fibonacci.json"),
        (&["subst", "expand"], "doubled_fibonacci.json"),
        (&["subst", "matrix"], "doubled_fibonacci.json"),
        (&["subst", "eigen"], "doubled_fibonacci.json"),
        (&["subst", "realize"], "doubled_fibonacci.json"),
    ];
    for (k, (cmd, cfg)) in cases.iter().enumerate() {
        let out = dir.path().join(format!("c{k}"));
        let cfg = c.join(cfg);
        let mut args: Vec<&str> = cmd.to_vec();
        args.extend(["-c", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
        let o = run(&args);
        assert!(o.status.success(), "{cmd:?}: {}", String::from_utf8_lossy(&o.stderr));
        let v = report(&out);
        assert!(v.is_object(), "{cmd:?}");
    }
}

#[test]
fn eigen_report_and_localization() {
    let dir = TempDir::new().unwrap();
    let c = configs();
    let out = dir.path().join("eig");
    let cfg = c.join("doubled_fibonacci.json");
    assert!(run(&["subst", "eigen", "-c", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]).status.success());
    let v = report(&out);
    let classes: Vec<&str> = v["eigenvalues"].as_array().unwrap().iter().map(|e| e["class"].as_str().unwrap()).collect();
    assert_eq!(classes.len(), 4);
    for class in ["pf", "pf-conjugate", "contracting-non-conjugate", "expanding-other"] {
        assert!(classes.contains(&class), "{classes:?}");
    }
    let out = dir.path().join("loc");
    let cfg = c.join("fibonacci.json");
    assert!(run(&["localize", "-c", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]).status.success());
    assert_eq!(report(&out)["within_target"], true);
}

#[test]
fn experiment_and_plot() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s7");
    let o = run(&["experiment", "section7", "--n-max", "16", "--eps", "1/8", "--meyer-to", "6", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = report(&out);
    assert_eq!(v["eigenvalues_match"], true);
    assert_eq!(v["characteristic_polynomial_factors"], true);
    assert_eq!(v["gap_law_holds"], true);
    assert_eq!(v["gap_table"].as_array().unwrap().len(), 16);
    assert_eq!(v["gap_table"][0]["gap"], "-1/8 + 1/8*sqrt(5)");
    assert_eq!(v["reprojection"]["meyer"]["verdict"]["kind"], "meyer-consistent");
    let svg = fs::read_to_string(format!("{}.svg", out.display())).unwrap();
    assert!(svg.contains(r#"width="800""#) && svg.contains(r#"height="240""#));

    let plotted = dir.path().join("again.svg");
    let input = format!("{}.report.json", out.display());
    let o = run(&["plot", "-i", &input, "-o", plotted.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(plotted).unwrap().starts_with("<svg"));

    let o = run(&["experiment", "section7", "--eps=-1/8", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
