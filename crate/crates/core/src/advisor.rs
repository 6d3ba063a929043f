//! Parameter conditions of the Besov embeddings and of the Dirichlet,
//! Neumann and mixed regularity results, assembled into a report.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::TruncatedCone;
use crate::pencil::{strip_free_check, BcAssignment, EdgeBc, PencilSpectrum};

/// Union of disjoint open intervals, sorted.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IntervalSet(pub Vec<(f64, f64)>);

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet(Vec::new())
    }

    /// `(lo, hi)`, or nothing if `lo >= hi`.
    pub fn open(lo: f64, hi: f64) -> Self {
        if lo < hi {
            IntervalSet(vec![(lo, hi)])
        } else {
            IntervalSet::empty()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, r: f64) -> bool {
        self.0.iter().any(|&(a, b)| a < r && r < b)
    }

    pub fn sup(&self) -> Option<f64> {
        self.0.last().map(|i| i.1)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all: Vec<(f64, f64)> = self.0.iter().chain(&other.0).copied().collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(all.len());
        for (a, b) in all {
            match out.last_mut() {
                Some(last) if a < last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        IntervalSet(out)
    }

    pub fn intersect(&self, lo: f64, hi: f64) -> IntervalSet {
        IntervalSet(
            self.0
                .iter()
                .map(|&(a, b)| (a.max(lo), b.min(hi)))
                .filter(|(a, b)| a < b)
                .collect(),
        )
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "empty");
        }
        let parts: Vec<String> = self.0.iter().map(|(a, b)| format!("({a:.6}, {b:.6})")).collect();
        write!(f, "{}", parts.join(" u "))
    }
}

/// `1/τ = r/3 + 1/2`.
pub fn tau_of(r: f64) -> f64 {
    1.0 / (r / 3.0 + 0.5)
}

/// `(0, r_max)` with `r_max = min{l, 3(l - |δ|), 3s}`, for strictly positive
/// edge exponents.
pub fn admissible_r_positive(l: u32, delta: &[f64], s: f64) -> Result<IntervalSet> {
    if l == 0 || !(s > 0.0) {
        return Err(Error::Precondition(format!("need l > 0 and s > 0, got l = {l}, s = {s}")));
    }
    if let Some(d) = delta.iter().find(|&&d| !(d > 0.0)) {
        return Err(Error::Precondition(format!("edge exponent {d} is not positive")));
    }
    let l = l as f64;
    let abs: f64 = delta.iter().sum();
    Ok(IntervalSet::open(0.0, l.min(3.0 * (l - abs)).min(3.0 * s)))
}

/// A linear expression `a·l + b·β + c·|δ| + d·|δ|⁺`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Linear {
    pub l: f64,
    pub beta: f64,
    pub abs: f64,
    pub plus: f64,
}

impl Linear {
    const fn new(l: f64, beta: f64, abs: f64, plus: f64) -> Self {
        Linear { l, beta, abs, plus }
    }

    pub fn eval(&self, l: f64, beta: f64, abs: f64, plus: f64) -> f64 {
        self.l * l + self.beta * beta + self.abs * abs + self.plus * plus
    }
}

const ABS: Linear = Linear::new(0.0, 0.0, 1.0, 0.0);
const BETA_MINUS_PLUS: Linear = Linear::new(0.0, 1.5, 0.0, -1.5);
const L_MINUS_PLUS: Linear = Linear::new(1.5, 0.0, 0.0, -1.5);
const THREE_HALVES_PLUS: Linear = Linear::new(0.0, 0.0, 0.0, 1.5);
const THREE_QUARTER_BETA: Linear = Linear::new(0.0, 0.75, 0.0, 0.0);
const THREE_QUARTER_L: Linear = Linear::new(0.75, 0.0, 0.0, 0.0);

/// One region of the negative-exponent embedding: `max(lower) < r < min(upper)`.
#[derive(Clone, Copy, Debug)]
pub struct Region {
    pub name: &'static str,
    pub lower: &'static [Linear],
    pub upper: &'static [Linear],
}

pub const NEGATIVE_REGIONS: [Region; 8] = [
    Region {
        name: "A",
        lower: &[],
        upper: &[ABS, BETA_MINUS_PLUS],
    },
    Region {
        name: "B",
        lower: &[BETA_MINUS_PLUS],
        upper: &[ABS, L_MINUS_PLUS],
    },
    Region {
        name: "i",
        lower: &[L_MINUS_PLUS, BETA_MINUS_PLUS, ABS, THREE_QUARTER_BETA],
        upper: &[THREE_HALVES_PLUS, THREE_QUARTER_L],
    },
    Region {
        name: "ii",
        lower: &[ABS, THREE_QUARTER_BETA],
        upper: &[THREE_HALVES_PLUS, THREE_QUARTER_L, BETA_MINUS_PLUS],
    },
    Region {
        name: "iii",
        lower: &[ABS, BETA_MINUS_PLUS],
        upper: &[THREE_HALVES_PLUS, THREE_QUARTER_BETA, L_MINUS_PLUS],
    },
    Region {
        name: "iv",
        lower: &[ABS],
        upper: &[THREE_HALVES_PLUS, THREE_QUARTER_BETA, BETA_MINUS_PLUS],
    },
    Region {
        name: "C",
        lower: &[THREE_HALVES_PLUS, THREE_QUARTER_BETA],
        upper: &[THREE_QUARTER_L],
    },
    Region {
        name: "D",
        lower: &[THREE_HALVES_PLUS],
        upper: &[THREE_QUARTER_BETA],
    },
];

/// Per-region intervals for `r > 0` before intersecting with `(0, 3s)`.
pub fn negative_regions(l: u32, beta: f64, delta: &[f64]) -> Result<Vec<(&'static str, IntervalSet)>> {
    if !delta.iter().any(|&d| d < 0.0) {
        return Err(Error::Precondition("no negative edge exponent".into()));
    }
    if !(l as f64 > beta) {
        return Err(Error::Precondition(format!("need l > beta, got l = {l}, beta = {beta}")));
    }
    let lf = l as f64;
    let abs: f64 = delta.iter().sum();
    let plus: f64 = delta.iter().filter(|&&d| d >= 0.0).sum();
    Ok(NEGATIVE_REGIONS
        .iter()
        .map(|reg| {
            let lo = reg
                .lower
                .iter()
                .map(|t| t.eval(lf, beta, abs, plus))
                .fold(0.0, f64::max);
            let hi = reg
                .upper
                .iter()
                .map(|t| t.eval(lf, beta, abs, plus))
                .fold(f64::INFINITY, f64::min);
            (reg.name, IntervalSet::open(lo, hi))
        })
        .collect())
}

/// Union of the region intervals, intersected with `(0, 3s)`.
pub fn admissible_r_negative(l: u32, beta: f64, delta: &[f64], s: f64) -> Result<IntervalSet> {
    if !(s > 0.0) {
        return Err(Error::Precondition(format!("need s > 0, got {s}")));
    }
    let union = negative_regions(l, beta, delta)?
        .iter()
        .fold(IntervalSet::empty(), |acc, (_, set)| acc.union(set));
    Ok(union.intersect(0.0, 3.0 * s))
}

/// Which result a condition belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    PositiveEmbedding,
    NegativeEmbedding,
    WSpaceEmbedding,
    DirichletWeightedSolvability,
    NeumannWeightedSolvability,
    MixedWeightedSolvability,
    DirichletFractionalRegularity,
    NeumannFractionalRegularity,
    MixedFractionalRegularity,
    DirichletBesovRegularity,
    NeumannBesovRegularity,
    MixedBesovRegularity,
}

/// Lower and upper bounds a tested value must lie strictly between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bounds {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrailEntry {
    pub id: String,
    pub theorem: Theorem,
    pub pass: bool,
    pub lhs: f64,
    pub rhs: Bounds,
    pub note: String,
}

impl TrailEntry {
    fn between(id: impl Into<String>, theorem: Theorem, lhs: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        let pass = lower.is_none_or(|a| a < lhs) && upper.is_none_or(|b| lhs < b);
        TrailEntry {
            id: id.into(),
            theorem,
            pass,
            lhs,
            rhs: Bounds { lower, upper },
            note: String::new(),
        }
    }

    fn flag(id: impl Into<String>, theorem: Theorem, pass: bool, note: impl Into<String>) -> Self {
        TrailEntry {
            id: id.into(),
            theorem,
            pass,
            lhs: if pass { 1.0 } else { 0.0 },
            rhs: Bounds {
                lower: None,
                upper: None,
            },
            note: note.into(),
        }
    }
}

/// Per-edge weight checks; `pass` iff every entry passes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightCheck {
    pub pass: bool,
    pub entries: Vec<TrailEntry>,
}

impl WeightCheck {
    fn from_entries(entries: Vec<TrailEntry>) -> Self {
        WeightCheck {
            pass: entries.iter().all(|e| e.pass),
            entries,
        }
    }
}

fn check_lengths(delta: &[f64], strips: &[(f64, f64)]) -> Result<()> {
    if delta.len() != strips.len() {
        return Err(Error::InvalidParameter(format!(
            "{} edge exponents for {} strips",
            delta.len(),
            strips.len()
        )));
    }
    Ok(())
}

/// `-δ₊ < δ_j - l + 1 < δ₋` on every edge.
pub fn dirichlet_weight_check(l: u32, delta: &[f64], strips: &[(f64, f64)]) -> Result<WeightCheck> {
    check_lengths(delta, strips)?;
    let lf = l as f64;
    Ok(WeightCheck::from_entries(
        delta
            .iter()
            .zip(strips)
            .enumerate()
            .map(|(j, (&d, &(dp, dm)))| {
                TrailEntry::between(
                    format!("dirichlet_edge_weight[{j}]"),
                    Theorem::DirichletWeightedSolvability,
                    d - lf + 1.0,
                    Some(-dp),
                    Some(dm),
                )
            })
            .collect(),
    ))
}

/// `max(l - δ₊, 0) < δ_j + 1 < l` on every edge.
pub fn neumann_weight_check(l: u32, delta: &[f64], strips: &[(f64, f64)]) -> Result<WeightCheck> {
    check_lengths(delta, strips)?;
    let lf = l as f64;
    Ok(WeightCheck::from_entries(
        delta
            .iter()
            .zip(strips)
            .enumerate()
            .map(|(j, (&d, &(dp, _)))| {
                TrailEntry::between(
                    format!("neumann_edge_weight[{j}]"),
                    Theorem::NeumannWeightedSolvability,
                    d + 1.0,
                    Some((lf - dp).max(0.0)),
                    Some(lf),
                )
            })
            .collect(),
    ))
}

/// `l - δ₊ < δ_j + 1 < l` for `j ∈ J̃`, and `max(l - δ₊, l - 2) < δ_j + 1 < l`
/// otherwise.
pub fn mixed_weight_check(l: u32, delta: &[f64], strips: &[(f64, f64)], jtilde: &[usize]) -> Result<WeightCheck> {
    check_lengths(delta, strips)?;
    if let Some(&j) = jtilde.iter().find(|&&j| j >= delta.len()) {
        return Err(Error::IndexOutOfRange {
            index: j,
            count: delta.len(),
        });
    }
    let lf = l as f64;
    Ok(WeightCheck::from_entries(
        delta
            .iter()
            .zip(strips)
            .enumerate()
            .map(|(j, (&d, &(dp, _)))| {
                let lower = if jtilde.contains(&j) {
                    lf - dp
                } else {
                    (lf - dp).max(lf - 2.0)
                };
                TrailEntry::between(
                    format!("mixed_edge_weight[{j}]"),
                    Theorem::MixedWeightedSolvability,
                    d + 1.0,
                    Some(lower),
                    Some(lf),
                )
            })
            .collect(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Dirichlet,
    Neumann,
    Mixed,
}

impl ProblemKind {
    pub fn of(bc: &BcAssignment) -> Self {
        match (bc.dirichlet_faces().is_empty(), bc.neumann_faces().is_empty()) {
            (false, true) => ProblemKind::Dirichlet,
            (true, false) => ProblemKind::Neumann,
            _ => ProblemKind::Mixed,
        }
    }

    fn weighted(self) -> Theorem {
        match self {
            ProblemKind::Dirichlet => Theorem::DirichletWeightedSolvability,
            ProblemKind::Neumann => Theorem::NeumannWeightedSolvability,
            ProblemKind::Mixed => Theorem::MixedWeightedSolvability,
        }
    }

    fn fractional(self) -> Theorem {
        match self {
            ProblemKind::Dirichlet => Theorem::DirichletFractionalRegularity,
            ProblemKind::Neumann => Theorem::NeumannFractionalRegularity,
            ProblemKind::Mixed => Theorem::MixedFractionalRegularity,
        }
    }

    fn besov(self) -> Theorem {
        match self {
            ProblemKind::Dirichlet => Theorem::DirichletBesovRegularity,
            ProblemKind::Neumann => Theorem::NeumannBesovRegularity,
            ProblemKind::Mixed => Theorem::MixedBesovRegularity,
        }
    }
}

/// Domain-dependent constants of the fractional Sobolev results.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SobolevConstants {
    pub alpha0_dirichlet: f64,
    pub alpha0_neumann: f64,
    pub alpha0_mixed: f64,
    pub eps_mixed: f64,
}

impl Default for SobolevConstants {
    fn default() -> Self {
        SobolevConstants {
            alpha0_dirichlet: 1.5,
            alpha0_neumann: 1.5,
            alpha0_mixed: 1.25,
            eps_mixed: 0.1,
        }
    }
}

/// Boundary data class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundaryData {
    pub homogeneous: bool,
    /// Fractional order of the global trace data.
    pub s: Option<f64>,
    /// Neumann data orthogonal to constants.
    pub mean_zero: bool,
}

impl Default for BoundaryData {
    fn default() -> Self {
        BoundaryData {
            homogeneous: true,
            s: None,
            mean_zero: true,
        }
    }
}

/// Boundary value problem data relevant to the regularity results.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub domain: TruncatedCone,
    pub bc: BcAssignment,
    pub l: u32,
    pub p: f64,
    pub beta: f64,
    pub delta: Vec<f64>,
    pub rhs_in_l2: bool,
    pub boundary: BoundaryData,
    pub constants: SobolevConstants,
}

impl ProblemSpec {
    pub fn kind(&self) -> ProblemKind {
        ProblemKind::of(&self.bc)
    }
}

/// Fractional Sobolev smoothness `ᾱ` of the solution; `open` marks a bound
/// that holds for every smaller value only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SobolevBound {
    pub value: f64,
    pub open: bool,
}

pub fn sobolev_bound(spec: &ProblemSpec) -> Result<SobolevBound> {
    let c = &spec.constants;
    let kind = spec.kind();
    if spec.boundary.homogeneous {
        let (value, floor) = match kind {
            ProblemKind::Dirichlet => (c.alpha0_dirichlet, 1.5),
            ProblemKind::Neumann => (c.alpha0_neumann, 1.5),
            ProblemKind::Mixed => (c.alpha0_mixed, 1.25),
        };
        if value < floor {
            return Err(Error::Config(format!("alpha0 = {value} is below {floor}")));
        }
        return Ok(SobolevBound { value, open: true });
    }
    let s = spec
        .boundary
        .s
        .ok_or_else(|| Error::Config("inhomogeneous boundary data need an order s".into()))?;
    let (lo, hi) = match kind {
        ProblemKind::Mixed => (1.0 - c.eps_mixed, 1.0 + c.eps_mixed),
        _ => (0.5, 1.5),
    };
    if !(lo < s && s < hi) {
        return Err(Error::Precondition(format!("boundary order s = {s} outside ({lo}, {hi})")));
    }
    Ok(SobolevBound { value: s, open: false })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityReport {
    pub kind: ProblemKind,
    pub sobolev_bound: SobolevBound,
    pub besov_admissible: IntervalSet,
    /// Excluded supremum of the admissible set.
    pub r_max: f64,
    pub tau: f64,
    pub adaptive_rate: f64,
    pub uniform_rate: f64,
    pub gain_factor: f64,
    pub trail: Vec<TrailEntry>,
    pub provisos: Vec<String>,
}

impl RegularityReport {
    pub fn tau_of(&self, r: f64) -> f64 {
        tau_of(r)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "problem: {:?}\nsobolev bound: {}{}\nbesov admissible r: {}\nr_max (excluded): {:.6}\ntau(r_max): {:.6}\nadaptive rate: {:.6}\nuniform rate: {:.6}\ngain factor: {:.6}\n",
            self.kind,
            if self.sobolev_bound.open { "< " } else { "" },
            self.sobolev_bound.value,
            self.besov_admissible,
            self.r_max,
            self.tau,
            self.adaptive_rate,
            self.uniform_rate,
            self.gain_factor
        );
        s.push_str("conditions:\n");
        for e in &self.trail {
            s.push_str(&format!("  [{}] {} ({:?})\n", if e.pass { "ok" } else { "FAIL" }, e.id, e.theorem));
        }
        for p in &self.provisos {
            s.push_str(&format!("note: {p}\n"));
        }
        s
    }
}

/// A violated hypothesis. `condition` is the id of the failing trail entry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdviceFailure {
    pub condition: String,
    pub theorem: Theorem,
    pub trail: Vec<TrailEntry>,
}

impl fmt::Display for AdviceFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {} of {:?} fails", self.condition, self.theorem)?;
        if let Some(e) = self.trail.iter().find(|e| e.id == self.condition) {
            write!(f, " (value {}, bounds {:?}..{:?})", e.lhs, e.rhs.lower, e.rhs.upper)?;
            if !e.note.is_empty() {
                write!(f, ": {}", e.note)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Advice {
    Admissible(RegularityReport),
    Rejected(AdviceFailure),
}

struct Trail(Vec<TrailEntry>);

impl Trail {
    /// Records the entry and reports whether it failed.
    fn push(&mut self, e: TrailEntry) -> Option<AdviceFailure> {
        let fail = (!e.pass).then(|| (e.id.clone(), e.theorem));
        self.0.push(e);
        fail.map(|(condition, theorem)| AdviceFailure {
            condition,
            theorem,
            trail: self.0.clone(),
        })
    }

    fn extend(&mut self, check: WeightCheck) -> Option<AdviceFailure> {
        let mut first = None;
        for e in check.entries {
            let f = self.push(e);
            first = first.or(f);
        }
        first.map(|f| AdviceFailure {
            trail: self.0.clone(),
            ..f
        })
    }
}

macro_rules! reject {
    ($e:expr) => {
        if let Some(f) = $e {
            return Ok(Advice::Rejected(f));
        }
    };
}

/// Checks every hypothesis of the regularity result matching the boundary
/// conditions and, if all hold, reports the admissible Besov smoothness.
pub fn advise(spec: &ProblemSpec, spectrum: &PencilSpectrum) -> Result<Advice> {
    let cone = &spec.domain.cone;
    let n = cone.n();
    spec.bc.check(cone)?;
    if spec.delta.len() != n || spectrum.edges.len() != n {
        return Err(Error::InvalidParameter(format!(
            "cone has {n} edges, got {} exponents and {} edge spectra",
            spec.delta.len(),
            spectrum.edges.len()
        )));
    }
    let kind = spec.kind();
    let mut trail = Trail(Vec::new());
    let lf = spec.l as f64;

    reject!(trail.push(TrailEntry::between(
        "integrability_p",
        kind.besov(),
        spec.p,
        Some(2.0 - 1e-12),
        Some(2.0 + 1e-12),
    )));
    let min_l = if kind == ProblemKind::Dirichlet { 1.0 } else { 2.0 };
    reject!(trail.push(TrailEntry::between("order_l", kind.besov(), lf, Some(min_l - 0.5), None)));
    reject!(trail.push(TrailEntry::flag(
        "rhs_in_l2",
        kind.besov(),
        spec.rhs_in_l2,
        "right-hand side must be square integrable on the truncated cone",
    )));
    if kind == ProblemKind::Neumann && !spec.boundary.homogeneous {
        reject!(trail.push(TrailEntry::flag(
            "neumann_data_mean_zero",
            kind.fractional(),
            spec.boundary.mean_zero,
            "Neumann data must be orthogonal to constants",
        )));
    }
    let alpha = match sobolev_bound(spec) {
        Ok(a) => a,
        Err(Error::Precondition(msg)) => {
            let s = spec.boundary.s.unwrap_or(f64::NAN);
            let mut e = TrailEntry::flag("boundary_order_s", kind.fractional(), false, msg);
            e.lhs = s;
            reject!(trail.push(e));
            unreachable!()
        }
        Err(e) => return Err(e),
    };
    trail.0.push(TrailEntry {
        id: "sobolev_bound".into(),
        theorem: kind.fractional(),
        pass: true,
        lhs: alpha.value,
        rhs: Bounds {
            lower: None,
            upper: None,
        },
        note: if alpha.open {
            "every smaller order is attained".into()
        } else {
            "equals the boundary data order".into()
        },
    });

    let mut edge_bc = Vec::with_capacity(n);
    for j in 0..n {
        edge_bc.push(spec.bc.edge_bc(cone, j)?);
    }
    if kind == ProblemKind::Mixed {
        let mixed = edge_bc.iter().filter(|&&e| e == EdgeBc::Mixed).count();
        let mut e = TrailEntry::between(
            "two_edge_interface",
            Theorem::MixedBesovRegularity,
            mixed as f64,
            Some(1.5),
            Some(2.5),
        );
        e.note = "Dirichlet and Neumann parts must meet along exactly two edges".into();
        reject!(trail.push(e));
    }

    let strips: Vec<(f64, f64)> = spectrum.edges.iter().map(|e| e.strip).collect();
    let jtilde = spec.bc.jtilde(cone)?;
    let check = match kind {
        ProblemKind::Dirichlet => dirichlet_weight_check(spec.l, &spec.delta, &strips)?,
        ProblemKind::Neumann => neumann_weight_check(spec.l, &spec.delta, &strips)?,
        ProblemKind::Mixed => mixed_weight_check(spec.l, &spec.delta, &strips, &jtilde)?,
    };
    reject!(trail.extend(check));

    let strip = strip_free_check(spec.l, spec.beta, &spectrum.vertex, None)?;
    let mut e = TrailEntry::between("strip_free_line", kind.weighted(), strip.distance, Some(strip.tolerance), None);
    e.note = format!(
        "line Re = {} vs nearest vertex exponent {}",
        strip.line, strip.nearest
    );
    reject!(trail.push(e));
    reject!(trail.push(TrailEntry::between("l_exceeds_beta", kind.besov(), spec.beta, None, Some(lf))));

    let negative = spec.delta.iter().any(|&d| d < 0.0);
    let mut provisos = vec!["the admissible set collects sufficient conditions only".to_string()];
    let set = if negative {
        if kind != ProblemKind::Dirichlet {
            for j in (0..n).filter(|j| !jtilde.contains(j)) {
                reject!(trail.push(TrailEntry::between(
                    format!("w_space_edge_exponent[{j}]"),
                    Theorem::WSpaceEmbedding,
                    spec.delta[j],
                    Some(-2.0 / spec.p),
                    None,
                )));
            }
        }
        provisos.push(format!(
            "negative edge exponents: r < 3 alpha = {:.6} and one region condition must hold; regions carried over unchanged from the embedding",
            3.0 * alpha.value
        ));
        if kind == ProblemKind::Mixed {
            provisos.push("mixed problem with negative exponents uses the W-space embedding route".into());
        }
        admissible_r_negative(spec.l, spec.beta, &spec.delta, alpha.value)?
    } else {
        let all_positive = spec.delta.iter().all(|&d| d > 0.0);
        let mut e = TrailEntry::flag(
            "edge_exponents_positive",
            Theorem::PositiveEmbedding,
            all_positive,
            "zero edge exponents are covered by neither embedding",
        );
        e.lhs = spec.delta.iter().copied().fold(f64::INFINITY, f64::min);
        e.rhs.lower = Some(0.0);
        reject!(trail.push(e));
        admissible_r_positive(spec.l, &spec.delta, alpha.value)?
    };
    if kind == ProblemKind::Mixed {
        provisos.push(format!(
            "trace parameter eps = {} is a configured guess",
            spec.constants.eps_mixed
        ));
    }
    let r_max = set.sup().unwrap_or(0.0);
    let mut e = TrailEntry::between(
        "besov_set_nonempty",
        if negative { Theorem::NegativeEmbedding } else { Theorem::PositiveEmbedding },
        r_max,
        Some(0.0),
        None,
    );
    e.note = set.to_string();
    reject!(trail.push(e));

    let adaptive_rate = r_max / 3.0;
    let uniform_rate = alpha.value / 3.0;
    Ok(Advice::Admissible(RegularityReport {
        kind,
        sobolev_bound: alpha,
        besov_admissible: set,
        r_max,
        tau: tau_of(r_max),
        adaptive_rate,
        uniform_rate,
        gain_factor: adaptive_rate / uniform_rate,
        trail: trail.0,
        provisos,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_examples() {
        let r = admissible_r_positive(2, &[0.5; 3], 1.4).unwrap();
        assert_eq!(r.0, vec![(0.0, 1.5)]);
        let r = admissible_r_positive(2, &[0.4; 3], 1.4).unwrap();
        assert_eq!(r.sup(), Some(2.0));
        assert!(admissible_r_positive(2, &[0.7; 3], 1.4).unwrap().is_empty());
        assert!(admissible_r_positive(2, &[0.5, -0.1, 0.5], 1.4).is_err());
    }

    #[test]
    fn negative_example() {
        let regs = negative_regions(2, 1.0, &[0.5, 0.5, -0.25]).unwrap();
        for (name, set) in &regs {
            if *name == "B" {
                assert_eq!(set.0, vec![(0.0, 0.75)]);
            } else {
                assert!(set.is_empty(), "{name}: {set}");
            }
        }
        let r = admissible_r_negative(2, 1.0, &[0.5, 0.5, -0.25], 100.0).unwrap();
        assert_eq!(r.0, vec![(0.0, 0.75)]);
        assert!(admissible_r_negative(2, 1.0, &[0.5; 3], 1.0).is_err());
        assert!(admissible_r_negative(2, 2.0, &[-0.5; 3], 1.0).is_err());
    }

    #[test]
    fn interval_union() {
        let a = IntervalSet::open(0.0, 1.0).union(&IntervalSet::open(0.5, 2.0));
        assert_eq!(a.0, vec![(0.0, 2.0)]);
        let b = IntervalSet::open(0.0, 1.0).union(&IntervalSet::open(1.0, 2.0));
        assert_eq!(b.0.len(), 2);
        assert!(!b.contains(1.0));
        assert_eq!(b.intersect(0.5, 1.5).0, vec![(0.5, 1.0), (1.0, 1.5)]);
    }

    #[test]
    fn weight_examples() {
        let s = |d: f64| vec![(d, d)];
        let two_thirds = 2.0 / 3.0;
        assert!(dirichlet_weight_check(2, &[0.5], &s(2.0)).unwrap().pass);
        assert!(dirichlet_weight_check(2, &[0.5], &s(two_thirds)).unwrap().pass);
        assert!(!dirichlet_weight_check(2, &[0.2], &s(two_thirds)).unwrap().pass);
        assert!(neumann_weight_check(2, &[0.5], &s(2.0)).unwrap().pass);
        assert!(!neumann_weight_check(2, &[1.2], &s(2.0)).unwrap().pass);
        assert!(neumann_weight_check(2, &[0.5], &s(two_thirds)).unwrap().pass);
        assert!(mixed_weight_check(2, &[0.5], &s(1.0), &[0]).unwrap().pass);
        assert!(mixed_weight_check(2, &[0.8], &s(1.0 / 3.0), &[0]).unwrap().pass);
        assert!(!mixed_weight_check(2, &[0.5], &s(1.0 / 3.0), &[0]).unwrap().pass);
        for d in [-0.5, 0.1, 0.5, 0.99, 1.0] {
            assert_eq!(
                mixed_weight_check(2, &[d], &s(2.0), &[]).unwrap().pass,
                neumann_weight_check(2, &[d], &s(2.0)).unwrap().pass
            );
        }
    }

    #[test]
    fn tau_relation() {
        assert!((tau_of(2.0) - 6.0 / 7.0).abs() < 1e-15);
        for r in [0.1, 0.7, 1.3, 2.9] {
            assert!((1.0 / tau_of(r) - 0.5 - r / 3.0).abs() < 1e-15);
        }
    }
}
