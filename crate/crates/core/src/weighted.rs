//! Mixed-weight Sobolev norms on a truncated polyhedral cone.
//!
//! Integrals are evaluated in spherical coordinates. The radial direction is
//! split into dyadic layers toward the apex; the cap is split into triangles
//! with one cone edge at a corner, each mapped by a Duffy-type substitution
//! whose first variable is split into dyadic layers toward that corner. Every
//! refinement level adds a fixed number of layers in both directions, so a
//! level's value is the integral over the region left after removing a
//! shrinking neighbourhood of the singular set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{add, det, distance_to_ray, norm, scale, sub, TruncatedCone, Vec3};
use crate::jet::Jet;

/// Which edges carry order-dependent exponents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    V,
    W,
    Wcal(Vec<usize>),
}

impl Variant {
    /// Whether edge `j` of an `n`-edge cone uses the order-dependent exponent.
    pub fn graded(&self, j: usize) -> bool {
        match self {
            Variant::V => true,
            Variant::W => false,
            Variant::Wcal(jt) => jt.contains(&j),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub l: u32,
    pub p: f64,
    pub beta: f64,
    pub delta: Vec<f64>,
    pub variant: Variant,
}

impl WeightParams {
    pub fn new(l: u32, p: f64, beta: f64, delta: Vec<f64>, variant: Variant) -> Self {
        WeightParams {
            l,
            p,
            beta,
            delta,
            variant,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::InvalidParameter(format!("p = {} must be a real >= 1", self.p)));
        }
        if self.delta.len() != n {
            return Err(Error::InvalidParameter(format!(
                "delta has {} entries for a cone with {n} edges",
                self.delta.len()
            )));
        }
        if let Variant::Wcal(jt) = &self.variant {
            if let Some(&j) = jt.iter().find(|&&j| j >= n) {
                return Err(Error::IndexOutOfRange { index: j, count: n });
            }
        }
        for (j, &d) in self.delta.iter().enumerate() {
            if !self.variant.graded(j) && d <= -2.0 / self.p {
                return Err(Error::InvalidParameter(format!(
                    "delta[{j}] = {d} must exceed -2/p on an edge without order-dependent weight"
                )));
            }
        }
        Ok(())
    }

    /// `|δ|`, the sum of all edge exponents.
    pub fn delta_sum(&self) -> f64 {
        self.delta.iter().sum()
    }

    /// Sum of the nonnegative edge exponents.
    pub fn delta_plus(&self) -> f64 {
        self.delta.iter().filter(|&&d| d >= 0.0).sum()
    }
}

/// A function with exact partial derivatives.
pub trait DerivativeOracle {
    fn max_order(&self) -> u32;

    /// Value, gradient and Hessian at `x`. Entries beyond `max_order` are
    /// unspecified.
    fn jet(&self, x: Vec3) -> Jet;

    fn partial(&self, alpha: [u8; 3], x: Vec3) -> Option<f64> {
        let order: u32 = alpha.iter().map(|&a| a as u32).sum();
        if order > self.max_order() {
            return None;
        }
        self.jet(x).partial(alpha)
    }
}

/// Wraps a closure written against jet arithmetic.
pub struct JetFn<F> {
    f: F,
    order: u32,
}

impl<F: Fn([Jet; 3]) -> Jet> JetFn<F> {
    pub fn new(f: F) -> Self {
        JetFn { f, order: 2 }
    }

    pub fn with_order(f: F, order: u32) -> Self {
        JetFn { f, order }
    }
}

impl<F: Fn([Jet; 3]) -> Jet> DerivativeOracle for JetFn<F> {
    fn max_order(&self) -> u32 {
        self.order
    }

    fn jet(&self, x: Vec3) -> Jet {
        (self.f)(Jet::point(x))
    }
}

impl<T: DerivativeOracle + ?Sized> DerivativeOracle for &T {
    fn max_order(&self) -> u32 {
        (**self).max_order()
    }
    fn jet(&self, x: Vec3) -> Jet {
        (**self).jet(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradedQuadrature {
    /// Gauss–Legendre points per layer in each variable.
    pub order: usize,
    /// Layers added per refinement level in each graded variable.
    pub layers_per_level: usize,
    /// Number of refinement levels.
    pub levels: usize,
    /// Geometric grading ratio between consecutive layers.
    pub ratio: f64,
}

impl Default for GradedQuadrature {
    fn default() -> Self {
        GradedQuadrature {
            order: 4,
            layers_per_level: 4,
            levels: 6,
            ratio: 0.5,
        }
    }
}

impl GradedQuadrature {
    fn validate(&self) -> Result<()> {
        if self.order == 0 || self.layers_per_level == 0 || self.levels < 4 {
            return Err(Error::InvalidParameter(
                "quadrature needs order >= 1, layers >= 1 and at least 4 levels".into(),
            ));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidParameter(format!("grading ratio {} not in (0, 1)", self.ratio)));
        }
        Ok(())
    }

    fn depth(&self) -> usize {
        self.levels * self.layers_per_level
    }

    /// Width of the excluded neighbourhood of the singular set, relative to
    /// the truncation radius.
    pub fn exclusion(&self) -> f64 {
        self.ratio.powi(self.depth() as i32)
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Cap triangle `(corner, b, c)` parametrised from `corner`.
struct Sector {
    corner: Vec3,
    a: Vec3,
    b: Vec3,
    jac: f64,
}

fn sectors(tc: &TruncatedCone) -> Vec<Sector> {
    let cone = &tc.cone;
    let cycle: Vec<Vec3> = cone.cycle().iter().map(|&j| cone.edges()[j]).collect();
    let n = cycle.len();
    let fan: Vec<[Vec3; 3]> = if cone.is_convex() {
        (1..n - 1).map(|i| [cycle[0], cycle[i], cycle[i + 1]]).collect()
    } else {
        let c = cone.center();
        (0..n).map(|i| [c, cycle[i], cycle[(i + 1) % n]]).collect()
    };
    let mut out = Vec::with_capacity(6 * fan.len());
    for tri in fan {
        let g = scale(add(add(tri[0], tri[1]), tri[2]), 1.0 / 3.0);
        for k in 0..3 {
            let corner = tri[k];
            for other in [tri[(k + 1) % 3], tri[(k + 2) % 3]] {
                let mid = scale(add(corner, other), 0.5);
                let a = sub(mid, corner);
                let b = sub(g, mid);
                out.push(Sector {
                    corner,
                    a,
                    b,
                    jac: det(corner, a, b).abs(),
                });
            }
        }
    }
    out
}

/// Layered integral table: `cells[i][k]` holds the contribution of radial
/// layer `i` and angular layer `k`.
#[derive(Clone, Debug)]
struct Table {
    cells: Vec<Vec<f64>>,
}

impl Table {
    fn new(depth: usize) -> Self {
        Table {
            cells: vec![vec![0.0; depth]; depth],
        }
    }

    fn level_values(&self, q: &GradedQuadrature) -> Vec<f64> {
        (1..=q.levels)
            .map(|lev| {
                let d = lev * q.layers_per_level;
                self.cells[..d].iter().map(|row| row[..d].iter().sum::<f64>()).sum()
            })
            .collect()
    }
}

/// Integrates `N` integrands over the truncated cone at once.
fn integrate<const N: usize>(
    tc: &TruncatedCone,
    q: &GradedQuadrature,
    mut f: impl FnMut(Vec3) -> [f64; N],
) -> [Table; N] {
    let depth = q.depth();
    let (gx, gw) = gauss_legendre(q.order);
    let mut tables: [Table; N] = std::array::from_fn(|_| Table::new(depth));
    let radius = tc.radius;
    let secs = sectors(tc);
    for ir in 0..depth {
        let (r_hi, r_lo) = (radius * q.ratio.powi(ir as i32), radius * q.ratio.powi(ir as i32 + 1));
        for ia in 0..depth {
            let (s_hi, s_lo) = (q.ratio.powi(ia as i32), q.ratio.powi(ia as i32 + 1));
            let mut acc = [0.0; N];
            for sec in &secs {
                for (&si, &swi) in gx.iter().zip(&gw) {
                    let s = s_lo + (s_hi - s_lo) * si;
                    let ws = swi * (s_hi - s_lo);
                    for (&ti, &twi) in gx.iter().zip(&gw) {
                        let pt = add(sec.corner, scale(add(sec.a, scale(sec.b, ti)), s));
                        let pn = norm(pt);
                        let omega = scale(pt, 1.0 / pn);
                        let wang = ws * twi * s * sec.jac / (pn * pn * pn);
                        for (&ri, &rwi) in gx.iter().zip(&gw) {
                            let rho = r_lo + (r_hi - r_lo) * ri;
                            let w = wang * rwi * (r_hi - r_lo) * rho * rho;
                            let vals = f(scale(omega, rho));
                            for k in 0..N {
                                acc[k] += w * vals[k];
                            }
                        }
                    }
                }
            }
            for k in 0..N {
                tables[k].cells[ir][ia] = acc[k];
            }
        }
    }
    tables
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelRow {
    pub level: usize,
    /// Norm over the region resolved at this level.
    pub norm: f64,
    /// Ratio of successive increments of the integral; `NaN` on the first two levels.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub diverges: bool,
    pub levels: Vec<LevelRow>,
}

impl NormEstimate {
    /// Divergence is flagged when the increments of the integral stop
    /// shrinking on each of the last three levels: a convergent power-law
    /// singularity gives a fixed ratio below one.
    fn from_integrals(values: &[f64], p: f64) -> Self {
        let mut levels = Vec::with_capacity(values.len());
        let mut prev_inc = f64::NAN;
        let mut growing = 0;
        for (i, &v) in values.iter().enumerate() {
            let inc = if i == 0 { v } else { v - values[i - 1] };
            let ratio = if i < 1 {
                f64::NAN
            } else if prev_inc.abs() > 0.0 {
                inc.abs() / prev_inc.abs()
            } else if inc.abs() > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            if i >= 1 {
                growing = if ratio >= 1.0 { growing + 1 } else { 0 };
            }
            levels.push(LevelRow {
                level: i + 1,
                norm: v.max(0.0).powf(1.0 / p),
                ratio,
            });
            prev_inc = inc;
        }
        NormEstimate {
            value: values.last().copied().unwrap_or(0.0).max(0.0).powf(1.0 / p),
            diverges: growing >= 3,
            levels,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,norm,ratio\n");
        for r in &self.levels {
            s.push_str(&format!("{},{:.12e},{:.6}\n", r.level, r.norm, r.ratio));
        }
        s
    }
}

/// Multi-indices of total order at most `l`, grouped by order.
pub fn multi_indices(l: u32) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for order in 0..=l as u8 {
        for a in (0..=order).rev() {
            for b in (0..=order - a).rev() {
                out.push([a, b, order - a - b]);
            }
        }
    }
    out
}

/// Sum over multi-indices of order `k` of `|∂^α u|^p`, for `k = 0..=l`.
fn derivative_powers(jet: &Jet, l: u32, p: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    out[0] = jet.value.abs().powf(p);
    if l >= 1 {
        out[1] = jet.grad.iter().map(|g| g.abs().powf(p)).sum();
    }
    if l >= 2 {
        out[2] = multi_indices(2)
            .iter()
            .filter(|a| a.iter().map(|&x| x as u32).sum::<u32>() == 2)
            .map(|&a| jet.partial(a).unwrap().abs().powf(p))
            .sum();
    }
    out
}

fn check_order<U: DerivativeOracle + ?Sized>(u: &U, l: u32) -> Result<()> {
    if l > 2 {
        return Err(Error::Unsupported(format!("derivative order {l} above 2")));
    }
    if u.max_order() < l {
        return Err(Error::Precondition(format!(
            "oracle provides order {} but the norm needs {l}",
            u.max_order()
        )));
    }
    Ok(())
}

/// Logarithm of the weight multiplying `|∂^α u|^p` for `|α| = k`.
fn log_weight(params: &WeightParams, k: u32, log_rho: f64, log_rel: &[f64]) -> f64 {
    let l = params.l as f64;
    let k = k as f64;
    let mut e = (params.beta - l + k) * log_rho;
    for (j, (&d, &lr)) in params.delta.iter().zip(log_rel).enumerate() {
        let ex = if params.variant.graded(j) { d - l + k } else { d };
        e += ex * lr;
    }
    params.p * e
}

fn edge_logs(tc: &TruncatedCone, x: Vec3, out: &mut Vec<f64>) -> f64 {
    let rho = norm(x);
    let log_rho = rho.ln();
    out.clear();
    out.extend(
        tc.cone
            .edges()
            .iter()
            .map(|&e| (distance_to_ray(x, e) / rho).ln()),
    );
    log_rho
}

/// The weighted norm of `u` for the given parameters.
pub fn weighted_norm<U: DerivativeOracle + ?Sized>(
    u: &U,
    params: &WeightParams,
    tc: &TruncatedCone,
    q: &GradedQuadrature,
) -> Result<NormEstimate> {
    params.validate(tc.cone.n())?;
    check_order(u, params.l)?;
    q.validate()?;
    let mut logs = Vec::with_capacity(tc.cone.n());
    let [table] = integrate(tc, q, |x| {
        let jet = u.jet(x);
        let pw = derivative_powers(&jet, params.l, params.p);
        let log_rho = edge_logs(tc, x, &mut logs);
        let mut v = 0.0;
        for k in 0..=params.l {
            if pw[k as usize] != 0.0 {
                v += log_weight(params, k, log_rho, &logs).exp() * pw[k as usize];
            }
        }
        [v]
    });
    Ok(NormEstimate::from_integrals(&table.level_values(q), params.p))
}

/// The Kondratiev norm with weight `min(1, dist(x, S))^{|α| - a}`.
pub fn kondratiev_norm<U: DerivativeOracle + ?Sized>(
    u: &U,
    m: u32,
    a: f64,
    p: f64,
    tc: &TruncatedCone,
    q: &GradedQuadrature,
) -> Result<NormEstimate> {
    check_order(u, m)?;
    q.validate()?;
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must be >= 1")));
    }
    let [table] = integrate(tc, q, |x| {
        let jet = u.jet(x);
        let pw = derivative_powers(&jet, m, p);
        let rho = tc.cone.min_singular_distance(x);
        let mut v = 0.0;
        for k in 0..=m {
            if pw[k as usize] != 0.0 {
                v += rho.powf(p * (k as f64 - a)) * pw[k as usize];
            }
        }
        [v]
    });
    Ok(NormEstimate::from_integrals(&table.level_values(q), p))
}

#[derive(Clone, Debug, Serialize)]
pub struct NormChain {
    pub v: NormEstimate,
    pub wcal: NormEstimate,
    pub w: NormEstimate,
    /// Whether the V integrand dominated the 𝒲 integrand, and that the W
    /// integrand, at every quadrature node.
    pub dominated: bool,
}

/// V, 𝒲(J̃) and W norms of `u` with shared `(l, p, β, δ)`; `params.variant`
/// supplies J̃ (V means all edges, W none).
pub fn norm_chain_check<U: DerivativeOracle + ?Sized>(
    u: &U,
    params: &WeightParams,
    tc: &TruncatedCone,
    q: &GradedQuadrature,
) -> Result<NormChain> {
    let n = tc.cone.n();
    let jtilde: Vec<usize> = (0..n).filter(|&j| params.variant.graded(j)).collect();
    let pv = WeightParams {
        variant: Variant::V,
        ..params.clone()
    };
    let pc = WeightParams {
        variant: Variant::Wcal(jtilde),
        ..params.clone()
    };
    let pwv = WeightParams {
        variant: Variant::W,
        ..params.clone()
    };
    pc.validate(n)?;
    pwv.validate(n)?;
    check_order(u, params.l)?;
    q.validate()?;
    let mut logs = Vec::with_capacity(n);
    let mut dominated = true;
    let [tv, tcal, tw] = integrate(tc, q, |x| {
        let jet = u.jet(x);
        let pw = derivative_powers(&jet, params.l, params.p);
        let log_rho = edge_logs(tc, x, &mut logs);
        let mut out = [0.0; 3];
        for k in 0..=params.l {
            let d = pw[k as usize];
            if d == 0.0 {
                continue;
            }
            let lv = log_weight(&pv, k, log_rho, &logs);
            let lc = log_weight(&pc, k, log_rho, &logs);
            let lw = log_weight(&pwv, k, log_rho, &logs);
            let tol = 1e-12 * (1.0 + lv.abs());
            if lv + tol < lc || lc + tol < lw {
                dominated = false;
            }
            out[0] += lv.exp() * d;
            out[1] += lc.exp() * d;
            out[2] += lw.exp() * d;
        }
        out
    });
    Ok(NormChain {
        v: NormEstimate::from_integrals(&tv.level_values(q), params.p),
        wcal: NormEstimate::from_integrals(&tcal.level_values(q), params.p),
        w: NormEstimate::from_integrals(&tw.level_values(q), params.p),
        dominated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PolyhedralCone;

    fn octant() -> TruncatedCone {
        TruncatedCone::new(PolyhedralCone::octant(), 1.0).unwrap()
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in 1..8 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((q - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn constant_l2_norm() {
        let u = JetFn::new(|_| Jet::constant(1.0));
        let params = WeightParams::new(0, 2.0, 0.0, vec![0.0; 3], Variant::V);
        let exact = (std::f64::consts::PI / 6.0).sqrt();
        let est = weighted_norm(&u, &params, &octant(), &GradedQuadrature::default()).unwrap();
        assert!((est.value - exact).abs() < 2e-6 * exact, "{} vs {exact}", est.value);
        assert!(!est.diverges);
        let fine = GradedQuadrature { order: 8, ..Default::default() };
        let est = weighted_norm(&u, &params, &octant(), &fine).unwrap();
        assert!((est.value - exact).abs() < 1e-10 * exact, "{} vs {exact}", est.value);
    }

    #[test]
    fn kondratiev_constant() {
        let u = JetFn::new(|_| Jet::constant(1.0));
        let est = kondratiev_norm(&u, 0, 0.0, 2.0, &octant(), &GradedQuadrature::default()).unwrap();
        assert!((est.value - (std::f64::consts::PI / 6.0).sqrt()).abs() < 2e-6);
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(0).len(), 1);
        assert_eq!(multi_indices(1).len(), 4);
        assert_eq!(multi_indices(2).len(), 10);
    }

    #[test]
    fn validation() {
        let p = WeightParams::new(1, 2.0, 0.0, vec![0.0; 2], Variant::V);
        assert!(p.validate(3).is_err());
        let p = WeightParams::new(1, 2.0, 0.0, vec![-1.5, 0.0, 0.0], Variant::W);
        assert!(p.validate(3).is_err());
        let p = WeightParams::new(1, 2.0, 0.0, vec![-1.5, 0.0, 0.0], Variant::Wcal(vec![0]));
        assert!(p.validate(3).is_ok());
        let p = WeightParams::new(1, 0.5, 0.0, vec![0.0; 3], Variant::V);
        assert!(p.validate(3).is_err());
    }

    #[test]
    fn divergence_heuristic() {
        let conv: Vec<f64> = (1..=6).map(|l| 1.0 - 0.5f64.powi(l)).collect();
        assert!(!NormEstimate::from_integrals(&conv, 2.0).diverges);
        let div: Vec<f64> = (1..=6).map(|l| 1.1f64.powi(l)).collect();
        assert!(NormEstimate::from_integrals(&div, 2.0).diverges);
        let log: Vec<f64> = (1..=6).map(|l| l as f64).collect();
        assert!(NormEstimate::from_integrals(&log, 2.0).diverges);
    }
}
