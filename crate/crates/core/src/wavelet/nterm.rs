//! Besov norms, best N-term and level-truncation error curves.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::TruncatedCone;
use crate::wavelet::transform::CoeffField;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum NormTag {
    /// Exact `L₂` error by Parseval.
    L2Parseval,
    /// `ℓ_p` sum of `L_p`-scaled coefficients, an equivalent-norm proxy.
    CoefficientProxy { p: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NTermCurve {
    pub points: Vec<(u64, f64)>,
    pub tag: NormTag,
}

impl NTermCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,sigma\n");
        for (n, e) in &self.points {
            s.push_str(&format!("{n},{e:.12e}\n"));
        }
        s
    }
}

/// Coefficients grouped by level, coarsest first; the first group holds the
/// scaling coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LevelGroups {
    pub groups: Vec<(i32, bool, Vec<f64>)>,
}

impl LevelGroups {
    /// All coefficients, or only those whose support meets `domain`.
    pub fn collect(field: &CoeffField, domain: Option<&TruncatedCone>) -> Self {
        let mut by_level: Vec<(i32, bool, Vec<f64>)> = Vec::new();
        field.for_each_position(|j, scaling, b, vals| {
            if let Some(tc) = domain {
                if !tc.intersects_box(b) {
                    return;
                }
            }
            match by_level.iter_mut().find(|g| g.0 == j && g.1 == scaling) {
                Some(g) => g.2.extend_from_slice(vals),
                None => by_level.push((j, scaling, vals.to_vec())),
            }
        });
        by_level.sort_by_key(|g| (!g.1, g.0));
        LevelGroups { groups: by_level }
    }

    pub fn count(&self) -> usize {
        self.groups.iter().map(|g| g.2.len()).sum()
    }
}

fn proxy_scale(j: i32, p: f64) -> f64 {
    2f64.powf(j as f64 * 3.0 * (0.5 - 1.0 / p))
}

/// Best N-term errors of a coefficient set for each `N` in `ns`.
///
/// For `p = 2` this is the exact `L₂` tail; otherwise the tail is measured in
/// the `ℓ_p` norm of coefficients scaled to `L_p` normalisation.
pub fn nterm_from_groups(groups: &LevelGroups, ns: &[u64], p: f64) -> Result<NTermCurve> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must be >= 1")));
    }
    if ns.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("N values must be sorted ascending".into()));
    }
    let total = groups.count() as u64;
    if let Some(&n) = ns.iter().find(|&&n| n > total) {
        return Err(Error::InvalidParameter(format!(
            "N = {n} exceeds the {total} available coefficients"
        )));
    }
    let l2 = p == 2.0;
    let mut mags: Vec<f64> = Vec::with_capacity(total as usize);
    for (j, _, vals) in &groups.groups {
        let s = if l2 { 1.0 } else { proxy_scale(*j, p) };
        mags.extend(vals.iter().map(|v| (v * s).abs().powf(p)));
    }
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    // tail sums accumulated from the smallest term
    let mut tail = vec![0.0; mags.len() + 1];
    for i in (0..mags.len()).rev() {
        tail[i] = tail[i + 1] + mags[i];
    }
    Ok(NTermCurve {
        points: ns.iter().map(|&n| (n, tail[n as usize].powf(1.0 / p))).collect(),
        tag: if l2 { NormTag::L2Parseval } else { NormTag::CoefficientProxy { p } },
    })
}

pub fn nterm_curve(field: &CoeffField, domain: Option<&TruncatedCone>, ns: &[u64], p: f64) -> Result<NTermCurve> {
    nterm_from_groups(&LevelGroups::collect(field, domain), ns, p)
}

/// Error after keeping every coefficient up to each level, coarsest first.
pub fn level_truncation_from_groups(groups: &LevelGroups) -> NTermCurve {
    let energies: Vec<f64> = groups
        .groups
        .iter()
        .map(|g| g.2.iter().map(|v| v * v).sum())
        .collect();
    let mut points = Vec::with_capacity(energies.len());
    let mut count = 0u64;
    for i in 0..energies.len() {
        count += groups.groups[i].2.len() as u64;
        let rest: f64 = energies[i + 1..].iter().rev().sum();
        points.push((count, rest.sqrt()));
    }
    NTermCurve {
        points,
        tag: NormTag::L2Parseval,
    }
}

pub fn level_truncation_curve(field: &CoeffField, domain: Option<&TruncatedCone>) -> NTermCurve {
    level_truncation_from_groups(&LevelGroups::collect(field, domain))
}

/// Least-squares slope of `log σ` against `log N` over `points[window]`.
pub fn fit_rate(curve: &NTermCurve, window: std::ops::Range<usize>) -> Result<f64> {
    let pts = curve
        .points
        .get(window.clone())
        .ok_or_else(|| Error::Insufficient(format!("window {window:?} outside {} points", curve.points.len())))?;
    if pts.len() < 3 {
        return Err(Error::Insufficient(format!("{} points in the fit window", pts.len())));
    }
    if pts.iter().any(|&(n, e)| n == 0 || !(e > 0.0)) {
        return Err(Error::Insufficient("zero values in the fit window".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, e)| e.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Insufficient("all N values equal".into()));
    }
    Ok(sxy / sxx)
}

/// Wavelet-characterisation Besov norm `B^s_{p,q}`: the scaling part in the
/// `L_p`-scaled `ℓ_p` norm plus the `ℓ_q` sum of weighted level norms.
pub fn besov_norm_groups(groups: &LevelGroups, s: f64, p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && q > 0.0) {
        return Err(Error::InvalidParameter("p and q must be positive".into()));
    }
    let floor = (3.0 * (1.0 / p - 1.0)).max(0.0);
    if !(s > floor) {
        return Err(Error::InvalidParameter(format!("s = {s} must exceed {floor}")));
    }
    let lp = |vals: &[f64]| vals.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p);
    let mut scaling = 0.0;
    let mut detail = 0.0;
    for (j, is_scaling, vals) in &groups.groups {
        let jf = *j as f64;
        if *is_scaling {
            scaling += proxy_scale(*j, p) * lp(vals);
        } else {
            detail += (2f64.powf(jf * (s + 3.0 * (0.5 - 1.0 / p))) * lp(vals)).powf(q);
        }
    }
    Ok(scaling + detail.powf(1.0 / q))
}

pub fn besov_norm(field: &CoeffField, domain: Option<&TruncatedCone>, s: f64, p: f64, q: f64) -> Result<f64> {
    besov_norm_groups(&LevelGroups::collect(field, domain), s, p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn groups(vals: Vec<f64>) -> LevelGroups {
        LevelGroups {
            groups: vec![(0, false, vals)],
        }
    }

    #[test]
    fn small_examples() {
        let g = groups(vec![3.0, 1.0, 2.0]);
        let c = nterm_from_groups(&g, &[0, 1, 3], 2.0).unwrap();
        assert!((c.points[0].1 - 14f64.sqrt()).abs() < 1e-15);
        assert!((c.points[1].1 - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.points[2].1, 0.0);
        assert!(nterm_from_groups(&g, &[4], 2.0).is_err());
        assert!(nterm_from_groups(&g, &[2, 1], 2.0).is_err());
    }

    #[test]
    fn geometric_tail() {
        let g = groups((0..=20).map(|i| 2f64.powi(-i)).collect());
        let ns: Vec<u64> = (0..=21).collect();
        let c = nterm_from_groups(&g, &ns, 2.0).unwrap();
        for (n, e) in c.points {
            let exact: f64 = (n as i32..=20).map(|i| 4f64.powi(-i)).sum::<f64>().sqrt();
            assert!((e - exact).abs() <= 1e-15 * (1.0 + exact), "{n}");
        }
    }

    #[test]
    fn fit_examples() {
        let mk = |f: &dyn Fn(f64) -> f64| NTermCurve {
            points: (1..=10).map(|i| (1u64 << i, f((1u64 << i) as f64))).collect(),
            tag: NormTag::L2Parseval,
        };
        assert!((fit_rate(&mk(&|n| n.powf(-0.5)), 0..10).unwrap() + 0.5).abs() < 1e-12);
        assert!((fit_rate(&mk(&|n| 7.0 / n), 0..10).unwrap() + 1.0).abs() < 1e-12);
        assert!(fit_rate(&mk(&|n| n), 0..2).is_err());
        assert!(fit_rate(&mk(&|_| 0.0), 0..5).is_err());
    }

    #[test]
    fn single_wavelet_besov() {
        let g = LevelGroups {
            groups: vec![(0, true, vec![0.0; 4]), (5, false, vec![0.0, 1.0, 0.0])],
        };
        for (s, p, q) in [(1.0, 2.0, 2.0), (0.7, 1.0, 3.0), (2.0, 4.0, 1.0)] {
            let b = besov_norm_groups(&g, s, p, q).unwrap();
            let exact = 2f64.powf(5.0 * (s + 3.0 * (0.5 - 1.0 / p)));
            assert!((b - exact).abs() < 1e-12 * exact);
        }
        assert_eq!(besov_norm_groups(&groups(vec![0.0; 5]), 1.0, 2.0, 2.0).unwrap(), 0.0);
        assert!(besov_norm_groups(&g, 0.5, 0.5, 1.0).is_err());
    }

    #[test]
    fn level_truncation_ends_at_zero() {
        let g = LevelGroups {
            groups: vec![(0, true, vec![1.0]), (1, false, vec![0.5, 0.5]), (2, false, vec![0.1; 4])],
        };
        let c = level_truncation_from_groups(&g);
        assert_eq!(c.points.len(), 3);
        assert_eq!(c.points[0].0, 1);
        assert!((c.points[0].1 - (0.5f64 + 0.04).sqrt()).abs() < 1e-15);
        assert_eq!(c.points[2], (7, 0.0));
    }
}
