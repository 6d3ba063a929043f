//! WebAssembly bindings for the demo page. Each operation returns a JSON
//! string; errors come back as `{"error": "..."}`.

use conebesov::advisor::{advise, Advice, BoundaryData, ProblemSpec, SobolevConstants};
use conebesov::geometry::{PolyhedralCone, TruncatedCone};
use conebesov::models::{edge_singularity, Cutoff};
use conebesov::pencil::{edge_eigenvalues, edge_strip, pencil_spectrum, Bc, BcAssignment, EdgeBc};
use conebesov::wavelet::nterm::{level_truncation_from_groups, nterm_from_groups};
use conebesov::wavelet::{analyze, fit_rate, Grid, LevelGroups, WaveletSystem};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn render(r: conebesov::Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn edge_bc(name: &str) -> conebesov::Result<EdgeBc> {
    match name {
        "DD" => Ok(EdgeBc::DD),
        "NN" => Ok(EdgeBc::NN),
        "DN" | "ND" => Ok(EdgeBc::Mixed),
        other => Err(conebesov::Error::Config(format!("unknown edge condition '{other}'"))),
    }
}

/// Edge eigenvalues and strip half-width for an opening angle in degrees.
pub fn edge_spectrum_json(theta_deg: f64, bc: &str, count: u32) -> String {
    render((|| {
        let theta = theta_deg.to_radians();
        let bc = edge_bc(bc)?;
        let values = edge_eigenvalues(theta, bc, 1..=count.clamp(1, 50))?;
        let (strip, _) = edge_strip(theta, bc)?;
        Ok(json!({ "theta": theta, "eigenvalues": values, "strip": strip }))
    })())
}

/// Advisor on the Dirichlet octant with `l = 2`.
pub fn advise_octant_json(beta: f64, d1: f64, d2: f64, d3: f64) -> String {
    render((|| {
        let cone = PolyhedralCone::octant();
        let bc = BcAssignment::uniform(3, Bc::Dirichlet);
        let spectrum = pencil_spectrum(&cone, &bc, 4, 4, 4)?;
        let spec = ProblemSpec {
            domain: TruncatedCone::new(cone, 1.0)?,
            bc,
            l: 2,
            p: 2.0,
            beta,
            delta: vec![d1, d2, d3],
            rhs_in_l2: true,
            boundary: BoundaryData::default(),
            constants: SobolevConstants::default(),
        };
        Ok(match advise(&spec, &spectrum)? {
            Advice::Admissible(r) => json!({
                "admissible": true,
                "set": r.besov_admissible.to_string(),
                "r_max": r.r_max,
                "adaptive_rate": r.adaptive_rate,
                "uniform_rate": r.uniform_rate,
                "report": r.to_text(),
            }),
            Advice::Rejected(f) => json!({ "admissible": false, "report": f.to_string() }),
        })
    })())
}

/// Level-truncation and best N-term curves of a Dirichlet wedge function
/// sampled on `n³` cells.
pub fn nterm_demo_json(theta_deg: f64, n: usize) -> String {
    render((|| {
        let n = n.clamp(16, 64).next_power_of_two();
        let levels = n.trailing_zeros() - 1;
        let f = edge_singularity(theta_deg.to_radians(), EdgeBc::DD, 1, Cutoff::scaled(1.0))?;
        let grid = Grid::sample(|x| f.value(x), [-1.0; 3], 2.0, n);
        let field = analyze(&grid, &WaveletSystem::daubechies(3)?, levels)?;
        let groups = LevelGroups::collect(&field, None);
        let uniform = level_truncation_from_groups(&groups);
        let ns: Vec<u64> = uniform.points.iter().map(|p| p.0).collect();
        let adaptive = nterm_from_groups(&groups, &ns, 2.0)?;
        let usable = uniform.points.iter().take_while(|p| p.1 > 0.0).count();
        let window = 1..usable;
        Ok(json!({
            "exponent": f.exponent,
            "n": ns,
            "uniform": uniform.points.iter().map(|p| p.1).collect::<Vec<_>>(),
            "adaptive": adaptive.points.iter().map(|p| p.1).collect::<Vec<_>>(),
            "uniform_slope": fit_rate(&uniform, window.clone()).ok(),
            "adaptive_slope": fit_rate(&adaptive, window).ok(),
        }))
    })())
}

#[wasm_bindgen]
pub fn edge_spectrum(theta_deg: f64, bc: &str, count: u32) -> String {
    edge_spectrum_json(theta_deg, bc, count)
}

#[wasm_bindgen]
pub fn advise_octant(beta: f64, d1: f64, d2: f64, d3: f64) -> String {
    advise_octant_json(beta, d1, d2, d3)
}

#[wasm_bindgen]
pub fn nterm_demo(theta_deg: f64, n: usize) -> String {
    nterm_demo_json(theta_deg, n)
}
