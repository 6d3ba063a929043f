//! Experiment configuration and end-to-end runs producing CSV and text
//! artifacts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::advisor::{advise, Advice, BoundaryData, ProblemSpec, SobolevConstants};
use crate::error::{Error, Result};
use crate::fieldio::field_bytes;
use crate::geometry::{GeometryConfig, TruncatedCone, Vec3};
use crate::models::{FunctionConfig, SingularFunction};
use crate::pencil::{pencil_spectrum, Bc, BcAssignment, PencilSpectrum};
use crate::wavelet::nterm::{besov_norm_groups, level_truncation_from_groups, nterm_from_groups};
use crate::wavelet::{analyze, bin_cardinalities, classify, fit_rate, CoeffField, Grid, LevelGroups, NTermCurve, WaveletSystem};
use crate::weighted::WeightParams;

/// Boundary conditions as one value for all faces or one per face.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BcConfig {
    Uniform(Bc),
    Faces(Vec<Bc>),
}

impl BcConfig {
    pub fn build(&self, n: usize) -> BcAssignment {
        match self {
            BcConfig::Uniform(b) => BcAssignment::uniform(n, *b),
            BcConfig::Faces(f) => BcAssignment::new(f.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveletConfig {
    /// Vanishing moments of the Daubechies system.
    pub order: usize,
    /// Number of decomposition steps.
    pub levels: u32,
    /// Cells per axis.
    pub grid: usize,
    /// Lower corner of the sampling cube; defaults to `-R` in every axis.
    pub lo: Option<Vec3>,
    /// Side of the sampling cube; defaults to `2R`.
    pub side: Option<f64>,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        WaveletConfig {
            order: 4,
            levels: 7,
            grid: 256,
            lo: None,
            side: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PencilConfig {
    pub edge_count: u32,
    pub vertex_count: usize,
    pub refinements: u32,
}

impl Default for PencilConfig {
    fn default() -> Self {
        PencilConfig {
            edge_count: 4,
            vertex_count: 6,
            refinements: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    pub rhs_in_l2: bool,
    pub boundary: BoundaryData,
    pub constants: SobolevConstants,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig {
            rhs_in_l2: true,
            boundary: BoundaryData::default(),
            constants: SobolevConstants::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentBlock {
    /// Inclusive level range of the cardinality study.
    pub levels: [u32; 2],
    pub slope_tolerance: f64,
    /// Norm exponent of the N-term curve.
    pub p: f64,
    /// N values of the `nterm` run; defaults to the level-truncation counts.
    pub ns: Option<Vec<u64>>,
    /// Besov parameters `(s, p, q)` evaluated by `analyze`.
    pub besov: Option<[f64; 3]>,
    /// Whether `report` also runs the embedding verification.
    pub verify: bool,
    pub seed: u64,
}

impl Default for ExperimentBlock {
    fn default() -> Self {
        ExperimentBlock {
            levels: [4, 8],
            slope_tolerance: 0.15,
            p: 2.0,
            ns: None,
            besov: None,
            verify: false,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub bc: Option<BcConfig>,
    #[serde(default)]
    pub weights: Option<WeightParams>,
    #[serde(default)]
    pub function: Option<FunctionConfig>,
    #[serde(default)]
    pub wavelet: WaveletConfig,
    #[serde(default)]
    pub pencil: PencilConfig,
    #[serde(default)]
    pub problem: ProblemConfig,
    #[serde(default)]
    pub experiment: ExperimentBlock,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Cross-block consistency.
    pub fn validate(&self) -> Result<()> {
        let tc = self.geometry.build()?;
        let n = tc.cone.n();
        if let Some(bc) = &self.bc {
            bc.build(n).check(&tc.cone)?;
        }
        if let Some(w) = &self.weights {
            w.validate(n)?;
        }
        let wc = &self.wavelet;
        if wc.grid == 0 || !wc.grid.is_power_of_two() {
            return Err(Error::Config(format!("grid {} is not a power of two", wc.grid)));
        }
        if wc.levels == 0 || (1usize << wc.levels.min(63)) > wc.grid {
            return Err(Error::Config(format!(
                "{} levels need at least 2^{} cells per axis, grid has {}",
                wc.levels, wc.levels, wc.grid
            )));
        }
        let [a, b] = self.experiment.levels;
        if a == 0 || a > b {
            return Err(Error::Config(format!("invalid level range [{a}, {b}]")));
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<TruncatedCone> {
        self.geometry.build()
    }

    pub fn bc(&self, n: usize) -> Result<BcAssignment> {
        self.bc
            .as_ref()
            .map(|b| b.build(n))
            .ok_or_else(|| Error::Config("missing 'bc' block".into()))
    }

    pub fn weights(&self) -> Result<&WeightParams> {
        self.weights
            .as_ref()
            .ok_or_else(|| Error::Config("missing 'weights' block".into()))
    }

    pub fn function(&self, tc: &TruncatedCone) -> Result<SingularFunction> {
        let f = self
            .function
            .as_ref()
            .ok_or_else(|| Error::Config("missing 'function' block".into()))?;
        let bc = self.bc.as_ref().map(|b| b.build(tc.cone.n()));
        f.build(&tc.cone, tc.radius, bc.as_ref())
    }

    /// Sampling cube `(lo, side)`.
    pub fn cube(&self, tc: &TruncatedCone) -> (Vec3, f64) {
        let r = tc.radius;
        (
            self.wavelet.lo.unwrap_or([-r; 3]),
            self.wavelet.side.unwrap_or(2.0 * r),
        )
    }

    pub fn problem(&self) -> Result<ProblemSpec> {
        let domain = self.domain()?;
        let bc = self.bc(domain.cone.n())?;
        let w = self.weights()?;
        Ok(ProblemSpec {
            domain,
            bc,
            l: w.l,
            p: w.p,
            beta: w.beta,
            delta: w.delta.clone(),
            rhs_in_l2: self.problem.rhs_in_l2,
            boundary: self.problem.boundary,
            constants: self.problem.constants,
        })
    }
}

/// A named output file.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn text(name: impl Into<String>, text: impl Into<String>) -> Self {
        Artifact {
            name: name.into(),
            bytes: text.into().into_bytes(),
        }
    }
}

/// Artifacts of a run and its verdict, if the run has one.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub verdict: Option<bool>,
    pub summary: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Writes every artifact into `dir`, returning `(name, sha256)` pairs.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<(String, String)>> {
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        if a.name.contains('/') || a.name.contains("..") {
            return Err(Error::Config(format!("artifact name '{}' leaves the run directory", a.name)));
        }
        std::fs::write(dir.join(&a.name), &a.bytes)?;
        out.push((a.name.clone(), sha256_hex(&a.bytes)));
    }
    Ok(out)
}

pub fn pencil_tables(spec: &PencilSpectrum) -> (String, String) {
    let mut edges = String::from("edge,theta,bc,delta_plus,delta_minus,m,lambda\n");
    for e in &spec.edges {
        for (i, lam) in e.eigenvalues.iter().enumerate() {
            let _ = writeln!(
                edges,
                "{},{:.12},{},{:.12},{:.12},{},{:.12}",
                e.edge,
                e.theta,
                e.bc,
                e.strip.0,
                e.strip.1,
                i + 1,
                lam
            );
        }
    }
    let mut vertex = String::from("l,lambda_tilde,lambda_plus,lambda_minus,error\n");
    for v in &spec.vertex {
        let _ = writeln!(
            vertex,
            "{},{:.10},{:.10},{:.10},{:.3e}",
            v.l, v.lambda, v.lambda_plus, v.lambda_minus, v.error
        );
    }
    (edges, vertex)
}

pub fn run_pencil(cfg: &ExperimentConfig) -> Result<(PencilSpectrum, Outcome)> {
    let tc = cfg.domain()?;
    let bc = cfg.bc(tc.cone.n())?;
    let p = &cfg.pencil;
    let spec = pencil_spectrum(&tc.cone, &bc, p.edge_count, p.vertex_count, p.refinements)?;
    let (edges, vertex) = pencil_tables(&spec);
    let summary = format!(
        "{} edges, {} vertex eigenvalues at resolution {}",
        spec.edges.len(),
        spec.vertex.len(),
        spec.resolution
    );
    Ok((
        spec,
        Outcome {
            artifacts: vec![Artifact::text("pencil_edges.csv", edges), Artifact::text("pencil_vertex.csv", vertex)],
            verdict: None,
            summary,
        },
    ))
}

/// Machine-readable advisor output.
pub fn advice_json(advice: &Advice) -> Result<String> {
    Ok(serde_json::to_string_pretty(advice)? + "\n")
}

pub fn run_advise(cfg: &ExperimentConfig) -> Result<(Advice, Outcome)> {
    let (spectrum, pencil) = run_pencil(cfg)?;
    let spec = cfg.problem()?;
    let advice = advise(&spec, &spectrum)?;
    let (text, verdict, file) = match &advice {
        Advice::Admissible(r) => (r.to_text(), true, "advisor_report.txt"),
        Advice::Rejected(f) => (format!("{f}\n"), false, "advisor_failure.txt"),
    };
    let mut artifacts = pencil.artifacts;
    artifacts.push(Artifact::text(file, text.clone()));
    artifacts.push(Artifact::text("advisor.json", advice_json(&advice)?));
    Ok((
        advice,
        Outcome {
            artifacts,
            verdict: Some(verdict),
            summary: text,
        },
    ))
}

pub fn sample_grid(cfg: &ExperimentConfig) -> Result<Grid> {
    let tc = cfg.domain()?;
    let f = cfg.function(&tc)?;
    let (lo, side) = cfg.cube(&tc);
    let g = Grid::sample(|x| f.value(x), lo, side, cfg.wavelet.grid);
    g.fine_level()?;
    Ok(g)
}

pub fn run_sample(cfg: &ExperimentConfig) -> Result<(Grid, Outcome)> {
    let g = sample_grid(cfg)?;
    let summary = format!(
        "{}^3 samples, cell size {}, origin {:?}",
        g.dims[0], g.h, g.lo
    );
    let bytes = field_bytes(&g);
    Ok((
        g,
        Outcome {
            artifacts: vec![Artifact {
                name: "field.bin".into(),
                bytes,
            }],
            verdict: None,
            summary,
        },
    ))
}

pub fn coefficient_field(cfg: &ExperimentConfig, grid: &Grid) -> Result<CoeffField> {
    let w = WaveletSystem::daubechies(cfg.wavelet.order)?;
    analyze(grid, &w, cfg.wavelet.levels)
}

/// Per-level coefficient counts and energies.
pub fn level_summary_csv(groups: &LevelGroups) -> String {
    let mut s = String::from("j,kind,count,energy\n");
    for (j, scaling, vals) in &groups.groups {
        let e: f64 = vals.iter().map(|v| v * v).sum();
        let _ = writeln!(
            s,
            "{j},{},{},{e:.12e}",
            if *scaling { "scaling" } else { "wavelet" },
            vals.len()
        );
    }
    s
}

pub fn run_analyze(cfg: &ExperimentConfig, grid: &Grid) -> Result<Outcome> {
    let tc = cfg.domain()?;
    let field = coefficient_field(cfg, grid)?;
    let groups = LevelGroups::collect(&field, Some(&tc));
    let nonneg: Vec<bool> = match &cfg.weights {
        Some(w) => w.delta.iter().map(|&d| d >= 0.0).collect(),
        None => Vec::new(),
    };
    let bins = classify(&field, &tc, &nonneg)?;
    let mut summary = format!(
        "{} coefficients, {} meet the domain ({} vertex, {} interior, {} edge), {} excluded\n",
        field.coefficient_count(),
        groups.count(),
        bins.vertex,
        bins.interior,
        bins.edge,
        bins.excluded
    );
    if let Some([s, p, q]) = cfg.experiment.besov {
        let b = besov_norm_groups(&groups, s, p, q)?;
        let _ = writeln!(summary, "besov norm B^{s}_{{{p},{q}}}: {b:.12e}");
    }
    Ok(Outcome {
        artifacts: vec![
            Artifact::text("coefficients.csv", level_summary_csv(&groups)),
            Artifact::text("bins.csv", bins.to_csv()),
            Artifact::text("analyze.txt", summary.clone()),
        ],
        verdict: None,
        summary,
    })
}

/// Fit window over the usable (nonzero) points: drops the two coarsest and
/// the finest.
pub fn fit_window(curve: &NTermCurve) -> Result<std::ops::Range<usize>> {
    let usable = curve.points.iter().take_while(|p| p.1 > 0.0).count();
    if usable < 7 {
        return Err(Error::Insufficient(format!(
            "{usable} usable points, the fit needs 7 (two coarsest and the finest are dropped)"
        )));
    }
    Ok(2..usable - 1)
}

pub fn curves_csv(uniform: &NTermCurve, adaptive: &NTermCurve) -> String {
    let mut s = String::from("n,uniform,adaptive\n");
    for (u, a) in uniform.points.iter().zip(&adaptive.points) {
        let _ = writeln!(s, "{},{:.12e},{:.12e}", u.0, u.1, a.1);
    }
    s
}

pub fn run_nterm(cfg: &ExperimentConfig, grid: &Grid) -> Result<Outcome> {
    let tc = cfg.domain()?;
    let field = coefficient_field(cfg, grid)?;
    let groups = LevelGroups::collect(&field, Some(&tc));
    let uniform = level_truncation_from_groups(&groups);
    let ns: Vec<u64> = match &cfg.experiment.ns {
        Some(ns) => ns.clone(),
        None => uniform.points.iter().map(|p| p.0).collect(),
    };
    let curve = nterm_from_groups(&groups, &ns, cfg.experiment.p)?;
    let mut report = format!("norm: {:?}\n", curve.tag);
    match fit_window(&curve).and_then(|w| fit_rate(&curve, w.clone()).map(|s| (w, s))) {
        Ok((w, slope)) => {
            let _ = writeln!(report, "fit window: points {}..{}\nslope: {slope:.6}", w.start, w.end);
        }
        Err(e) => {
            let _ = writeln!(report, "slope: unavailable ({e})");
        }
    }
    Ok(Outcome {
        artifacts: vec![
            Artifact::text("nterm.csv", curve.to_csv()),
            Artifact::text("nterm_report.txt", report.clone()),
        ],
        verdict: None,
        summary: report,
    })
}

/// Normalised bin counts per level and the boundedness verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CardinalityStudy {
    pub levels: Vec<u32>,
    /// `sup_k |Λ_{j,k}| / k²` over `2 ≤ k ≤ 2^{j-1}`, per level.
    pub shell_constants: Vec<f64>,
    /// `sup |Λ_{j,k,m}| / m` over `4 ≤ k ≤ 2^{j-1}` and `1 ≤ m ≤ k/2`, the
    /// edge zone where the nearest singular point lies on an edge.
    pub edge_constants: Vec<f64>,
    pub shell_spread: f64,
    pub edge_spread: f64,
    pub verdict: bool,
    pub shell_csv: String,
    pub edge_csv: String,
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

pub fn cardinality_study(tc: &TruncatedCone, levels: std::ops::RangeInclusive<u32>) -> Result<CardinalityStudy> {
    let levels: Vec<u32> = levels.collect();
    if levels.is_empty() || levels[0] < 2 {
        return Err(Error::Insufficient("the study needs levels of at least 2".into()));
    }
    let mut shell_csv = String::from("j,k,count,count_over_k2\n");
    let mut edge_csv = String::from("j,k,m,count,count_over_m\n");
    let mut shell_constants = Vec::new();
    let mut edge_constants = Vec::new();
    for &j in &levels {
        let kmax = 1u64 << (j - 1);
        let t = bin_cardinalities(tc, j, kmax)?;
        let mut s = 0.0f64;
        for (&k, &c) in &t.by_k {
            let norm = if k > 0 { c as f64 / (k * k) as f64 } else { f64::NAN };
            let _ = writeln!(shell_csv, "{j},{k},{c},{norm:.6}");
            if k >= 2 {
                s = s.max(norm);
            }
        }
        let mut e = 0.0f64;
        for (&(k, m), &c) in &t.by_km {
            if m == 0 {
                continue;
            }
            let norm = c as f64 / m as f64;
            let _ = writeln!(edge_csv, "{j},{k},{m},{c},{norm:.6}");
            if k >= 4 && 2 * m <= k {
                e = e.max(norm);
            }
        }
        shell_constants.push(s);
        edge_constants.push(e);
    }
    let shell_spread = spread(&shell_constants);
    let edge_spread = spread(&edge_constants);
    Ok(CardinalityStudy {
        levels,
        shell_constants,
        edge_constants,
        shell_spread,
        edge_spread,
        verdict: shell_spread <= 4.0 && edge_spread <= 4.0,
        shell_csv,
        edge_csv,
    })
}

pub fn run_cardinality_study(cfg: &ExperimentConfig) -> Result<(CardinalityStudy, Outcome)> {
    let tc = cfg.domain()?;
    let [a, b] = cfg.experiment.levels;
    let study = cardinality_study(&tc, a..=b)?;
    let mut summary = String::from("j,shell_constant,edge_constant\n");
    for (i, j) in study.levels.iter().enumerate() {
        let _ = writeln!(summary, "{j},{:.6},{:.6}", study.shell_constants[i], study.edge_constants[i]);
    }
    let _ = writeln!(
        summary,
        "spread: shell {:.4}, edge {:.4}; verdict: {}",
        study.shell_spread,
        study.edge_spread,
        if study.verdict { "bounded" } else { "unbounded" }
    );
    let outcome = Outcome {
        artifacts: vec![
            Artifact::text("cardinality_k.csv", study.shell_csv.clone()),
            Artifact::text("cardinality_km.csv", study.edge_csv.clone()),
            Artifact::text("cardinality.txt", summary.clone()),
        ],
        verdict: Some(study.verdict),
        summary,
    };
    Ok((study, outcome))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationResult {
    pub r_max: f64,
    pub admissible: String,
    pub predicted_rate: f64,
    /// `s/3` with `s` the fractional Sobolev limit of the sampled function.
    pub uniform_theory_rate: f64,
    pub measured_adaptive_rate: f64,
    pub measured_uniform_rate: f64,
    pub slope_tolerance: f64,
    pub window: (usize, usize),
    pub pass: bool,
    pub uniform: NTermCurve,
    pub adaptive: NTermCurve,
}

/// Largest `s` with the function in `H^s` near its singularity.
pub fn sobolev_limit(f: &SingularFunction) -> f64 {
    if f.is_edge() {
        1.0 + f.exponent
    } else {
        f.exponent + 1.5
    }
}

pub fn run_verify_embedding(cfg: &ExperimentConfig) -> Result<(VerificationResult, Outcome)> {
    let tc = cfg.domain()?;
    let f = cfg.function(&tc)?;
    let (advice, adv) = run_advise(cfg)?;
    let report = match advice {
        Advice::Admissible(r) => r,
        Advice::Rejected(fail) => {
            return Err(Error::Precondition(format!("weights are not advisor-admissible: {fail}")))
        }
    };
    let grid = sample_grid(cfg)?;
    let field = coefficient_field(cfg, &grid)?;
    drop(grid);
    let groups = LevelGroups::collect(&field, Some(&tc));
    drop(field);
    let uniform = level_truncation_from_groups(&groups);
    let ns: Vec<u64> = uniform.points.iter().map(|p| p.0).collect();
    let adaptive = nterm_from_groups(&groups, &ns, 2.0)?;
    let window = fit_window(&uniform)?;
    let su = fit_rate(&uniform, window.clone())?;
    let sa = fit_rate(&adaptive, window.clone())?;
    let tol = cfg.experiment.slope_tolerance;
    let predicted_rate = report.adaptive_rate;
    let (mu, ma) = (-su, -sa);
    let result = VerificationResult {
        r_max: report.r_max,
        admissible: report.besov_admissible.to_string(),
        predicted_rate,
        uniform_theory_rate: sobolev_limit(&f) / 3.0,
        measured_adaptive_rate: ma,
        measured_uniform_rate: mu,
        slope_tolerance: tol,
        window: (window.start, window.end),
        pass: ma >= predicted_rate - tol && ma >= mu - tol,
        uniform,
        adaptive,
    };
    let summary = format!(
        "admissible r: {}\npredicted adaptive rate: {:.6}\nuniform rate from Sobolev limit: {:.6}\nmeasured adaptive rate: {:.6}\nmeasured uniform rate: {:.6}\nfit window: {}..{}\ntolerance: {}\nverdict: {}\n",
        result.admissible,
        result.predicted_rate,
        result.uniform_theory_rate,
        ma,
        mu,
        window.start,
        window.end,
        tol,
        if result.pass { "pass" } else { "fail" }
    );
    let mut artifacts = adv.artifacts;
    artifacts.push(Artifact::text("curves.csv", curves_csv(&result.uniform, &result.adaptive)));
    artifacts.push(Artifact::text("verify.txt", summary.clone()));
    let verdict = Some(result.pass);
    Ok((
        result,
        Outcome {
            artifacts,
            verdict,
            summary,
        },
    ))
}

/// Chains pencil, advisor and optionally the verification, writing every
/// artifact and a manifest into `dir`.
pub fn run_report(cfg: &ExperimentConfig, config_bytes: &[u8], dir: &Path) -> Result<Outcome> {
    let mut artifacts = vec![Artifact {
        name: "config.json".into(),
        bytes: config_bytes.to_vec(),
    }];
    let mut verdict = true;
    let mut summary = String::new();
    let advice = run_advise(cfg);
    match advice {
        Ok((advice, out)) => {
            verdict &= matches!(advice, Advice::Admissible(_));
            summary.push_str(&out.summary);
            artifacts.extend(out.artifacts);
            if cfg.experiment.verify && verdict {
                let (_, v) = run_verify_embedding(cfg)?;
                verdict &= v.verdict == Some(true);
                summary.push_str(&v.summary);
                artifacts.extend(v.artifacts.into_iter().filter(|a| a.name == "curves.csv" || a.name == "verify.txt"));
            }
        }
        Err(e) => return Err(e),
    }
    let hashes = write_artifacts(dir, &artifacts)?;
    let mut files = BTreeMap::new();
    for (name, hash) in hashes {
        files.insert(name, hash);
    }
    let manifest = serde_json::json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": { "config.json": sha256_hex(config_bytes) },
        "seed": cfg.experiment.seed,
        "outputs": files,
        "verdict": if verdict { "pass" } else { "fail" },
    });
    let manifest = Artifact::text("manifest.json", serde_json::to_string_pretty(&manifest)? + "\n");
    write_artifacts(dir, std::slice::from_ref(&manifest))?;
    artifacts.push(manifest);
    Ok(Outcome {
        artifacts,
        verdict: Some(verdict),
        summary,
    })
}
