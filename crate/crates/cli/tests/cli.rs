use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conebesov"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn run(args: &[&str], cfg: &Path, out: &Path) -> Output {
    bin().args(args)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn advise_admissible_exits_zero() {
    let out = scratch("advise_ok");
    let o = run(&["advise"], &config("octant_dirichlet.json"), &out);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = std::fs::read_to_string(out.join("advisor_report.txt")).unwrap();
    assert!(text.contains("r_max (excluded): 2.000000"));
    assert!(text.contains("adaptive rate: 0.666667"));
    assert!(out.join("advisor.json").exists());
}

#[test]
fn advise_rejection_exits_two() {
    let out = scratch("advise_strip");
    let o = run(&["advise"], &config("octant_strip_hit.json"), &out);
    assert_eq!(o.status.code(), Some(2));
    let text = std::fs::read_to_string(out.join("advisor_failure.txt")).unwrap();
    assert!(text.contains("strip_free_line"), "{text}");

    let out = scratch("advise_weight");
    let o = run(&["advise"], &config("lcone_weight_fail.json"), &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("dirichlet_edge_weight[0]"));
}

#[test]
fn errors_exit_one() {
    let out = scratch("errors");
    let o = run(&["advise"], Path::new("/nonexistent/config.json"), &out);
    assert_eq!(o.status.code(), Some(1));

    let bad = Path::new(env!("CARGO_TARGET_TMPDIR")).join("bad_config.json");
    std::fs::write(&bad, r#"{"geometry":{"preset":"octant","truncation_radius":1},"colour":3}"#).unwrap();
    let o = run(&["pencil"], &bad, &out);
    assert_eq!(o.status.code(), Some(1));

    // advise without a weights block
    let o = run(&["advise"], &config("cardinality_octant.json"), &out);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn report_manifest_hashes_and_reruns_are_identical() {
    let a = scratch("report_a");
    let b = scratch("report_b");
    let cfg = config("octant_dirichlet.json");
    assert_eq!(run(&["report"], &cfg, &a).status.code(), Some(0));
    assert_eq!(run(&["report"], &cfg, &b).status.code(), Some(0));

    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["verdict"], "pass");
    let outputs = manifest["outputs"].as_object().unwrap();
    assert!(outputs.contains_key("advisor_report.txt"));
    for (name, hash) in outputs {
        let bytes = std::fs::read(a.join(name)).unwrap();
        let digest = sha2_hex(&bytes);
        assert_eq!(hash.as_str().unwrap(), digest, "{name}");
    }
    let src = std::fs::read(&cfg).unwrap();
    assert_eq!(manifest["inputs"]["config.json"].as_str().unwrap(), sha2_hex(&src));

    for entry in std::fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(
            std::fs::read(a.join(&name)).unwrap(),
            std::fs::read(b.join(&name)).unwrap(),
            "{name:?} differs between runs"
        );
    }
}

fn sha2_hex(bytes: &[u8]) -> String {
    conebesov::experiments::sha256_hex(bytes)
}

#[test]
fn analyze_from_field_file_matches_direct_sampling() {
    let cfg = config("octant_dirichlet.json");
    let s = scratch("sample");
    assert_eq!(run(&["sample"], &cfg, &s).status.code(), Some(0));
    let field = s.join("field.bin");
    assert!(field.exists());

    let direct = scratch("analyze_direct");
    let from_file = scratch("analyze_file");
    assert_eq!(run(&["analyze"], &cfg, &direct).status.code(), Some(0));
    let o = bin()
        .args(["analyze", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&from_file)
        .arg("--field")
        .arg(&field)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    for name in ["coefficients.csv", "bins.csv", "analyze.txt"] {
        assert_eq!(
            std::fs::read(direct.join(name)).unwrap(),
            std::fs::read(from_file.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn nterm_reports_a_slope() {
    let out = scratch("nterm");
    let o = run(&["nterm"], &config("octant_dirichlet.json"), &out);
    assert_eq!(o.status.code(), Some(0));
    let report = std::fs::read_to_string(out.join("nterm_report.txt")).unwrap();
    assert!(report.contains("slope: -"), "{report}");
    let csv = std::fs::read_to_string(out.join("nterm.csv")).unwrap();
    let sigmas: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(sigmas.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn pencil_and_cardinality() {
    let out = scratch("pencil");
    assert_eq!(run(&["pencil"], &config("octant_dirichlet.json"), &out).status.code(), Some(0));
    let edges = std::fs::read_to_string(out.join("pencil_edges.csv")).unwrap();
    assert!(edges.lines().count() > 1);

    let out = scratch("cardinality");
    let o = run(&["cardinality"], &config("cardinality_octant.json"), &out);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict: bounded"));
}
