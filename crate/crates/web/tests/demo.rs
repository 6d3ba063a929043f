use conebesov_web::{advise_octant_json, edge_spectrum_json, nterm_demo_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn edge_spectrum_of_the_reentrant_wedge() {
    let v = parse(&edge_spectrum_json(270.0, "DD", 3));
    let ev = v["eigenvalues"].as_array().unwrap();
    assert_eq!(ev.len(), 3);
    assert!((ev[0].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert!((v["strip"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert!(parse(&edge_spectrum_json(270.0, "XX", 3))["error"].is_string());
}

#[test]
fn advisor_on_the_octant() {
    let v = parse(&advise_octant_json(0.0, 0.4, 0.4, 0.4));
    assert_eq!(v["admissible"], true);
    assert!((v["r_max"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let v = parse(&advise_octant_json(-2.5, 0.4, 0.4, 0.4));
    assert_eq!(v["admissible"], false);
    assert!(v["report"].as_str().unwrap().contains("strip_free_line"));
}

#[test]
fn nterm_demo_curves() {
    let v = parse(&nterm_demo_json(270.0, 32));
    let u = v["uniform"].as_array().unwrap();
    let a = v["adaptive"].as_array().unwrap();
    assert_eq!(u.len(), a.len());
    for (x, y) in u.iter().zip(a) {
        assert!(y.as_f64().unwrap() <= x.as_f64().unwrap() + 1e-15);
    }
}
