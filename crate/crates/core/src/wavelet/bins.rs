//! Dyadic distance bins of wavelet coefficients relative to the singular set.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Aabb, TruncatedCone};
use crate::wavelet::transform::CoeffField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    /// `k = 0`: supports touching the vertex zone.
    Vertex,
    /// `k ≥ 1, m ≥ 1`: away from vertex and edges.
    Interior,
    /// `k ≥ 1, m = 0`: along an edge.
    Edge,
}

impl Family {
    pub fn of(k: u64, m: u64) -> Self {
        match (k, m) {
            (0, _) => Family::Vertex,
            (_, 0) => Family::Edge,
            _ => Family::Interior,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BinKey {
    pub j: i32,
    pub k: u64,
    pub m: u64,
    /// `(m₁, m₂)` from the distances to edges with nonnegative and negative
    /// exponents, when both kinds are present.
    pub split: Option<(u64, u64)>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct BinStats {
    pub count: u64,
    pub energy: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IndexBins {
    pub bins: BTreeMap<BinKey, BinStats>,
    pub vertex: u64,
    pub interior: u64,
    pub edge: u64,
    /// Coefficients whose support misses the truncated cone.
    pub excluded: u64,
}

impl IndexBins {
    pub fn total(&self) -> u64 {
        self.vertex + self.interior + self.edge
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,k,m,m1,m2,family,count,energy\n");
        for (key, st) in &self.bins {
            let (m1, m2) = key
                .split
                .map_or((String::new(), String::new()), |(a, b)| (a.to_string(), b.to_string()));
            s.push_str(&format!(
                "{},{},{},{},{},{:?},{},{:.6e}\n",
                key.j,
                key.k,
                key.m,
                m1,
                m2,
                Family::of(key.k, key.m),
                st.count,
                st.energy
            ));
        }
        s
    }
}

/// `ρ_I`, `r_I` and the split distances of a support box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxDistances {
    pub rho: f64,
    pub r: f64,
    /// Smallest distance to an edge with nonnegative exponent.
    pub r_plus: Option<f64>,
    /// Largest distance to an edge with negative exponent.
    pub r_minus: Option<f64>,
}

/// `nonnegative[j]` tells whether edge `j` has a nonnegative exponent.
pub fn box_distances(tc: &TruncatedCone, b: &Aabb, nonnegative: &[bool]) -> BoxDistances {
    let rho = b.distance_to_point([0.0; 3]);
    let mut r = f64::INFINITY;
    let mut r_plus: Option<f64> = None;
    let mut r_minus: Option<f64> = None;
    for (j, &e) in tc.cone.edges().iter().enumerate() {
        let d = b.distance_to_ray(e);
        r = r.min(d);
        if nonnegative.get(j).copied().unwrap_or(true) {
            r_plus = Some(r_plus.map_or(d, |v| v.min(d)));
        } else {
            let dm = b.max_distance_to_ray(e);
            r_minus = Some(r_minus.map_or(dm, |v| v.max(dm)));
        }
    }
    BoxDistances {
        rho,
        r,
        r_plus,
        r_minus,
    }
}

fn bin_index(dist: f64, j: i32) -> u64 {
    (dist * 2f64.powi(j)).floor().max(0.0) as u64
}

/// Assigns every wavelet coefficient whose support meets the truncated cone
/// to its `(j, k, m)` bin. With exponents of both signs, bins are further
/// keyed by `(m₁, m₂)`.
pub fn classify(field: &CoeffField, tc: &TruncatedCone, nonnegative: &[bool]) -> Result<IndexBins> {
    if !nonnegative.is_empty() && nonnegative.len() != tc.cone.n() {
        return Err(Error::InvalidParameter(format!(
            "sign pattern has {} entries for {} edges",
            nonnegative.len(),
            tc.cone.n()
        )));
    }
    let mixed = nonnegative.iter().any(|&s| s) && nonnegative.iter().any(|&s| !s);
    let mut out = IndexBins::default();
    field.for_each_position(|j, scaling, b, vals| {
        if scaling {
            return;
        }
        if !tc.intersects_box(b) {
            out.excluded += vals.len() as u64;
            return;
        }
        let d = box_distances(tc, b, nonnegative);
        let k = bin_index(d.rho, j);
        let m = bin_index(d.r, j);
        let split = if mixed {
            Some((
                bin_index(d.r_plus.unwrap_or(0.0), j),
                bin_index(d.r_minus.unwrap_or(0.0), j),
            ))
        } else {
            None
        };
        let entry = out.bins.entry(BinKey { j, k, m, split }).or_default();
        entry.count += vals.len() as u64;
        entry.energy += vals.iter().map(|v| v * v).sum::<f64>();
        let n = vals.len() as u64;
        match Family::of(k, m) {
            Family::Vertex => out.vertex += n,
            Family::Interior => out.interior += n,
            Family::Edge => out.edge += n,
        }
    });
    Ok(out)
}

/// Counts of dyadic cubes of side `2^{-j}` meeting the truncated cone, by
/// vertex bin `k` and by `(k, m)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CardinalityTable {
    pub j: u32,
    pub by_k: BTreeMap<u64, u64>,
    pub by_km: BTreeMap<(u64, u64), u64>,
}

/// Enumerates all dyadic cubes at level `j` with vertex bin `k ≤ max_k`.
pub fn bin_cardinalities(tc: &TruncatedCone, j: u32, max_k: u64) -> Result<CardinalityTable> {
    if j == 0 {
        return Err(Error::InvalidParameter("level must be at least 1".into()));
    }
    let h = 2f64.powi(-(j as i32));
    let reach = ((tc.radius / h).ceil() as i64).min(max_k as i64 + 2);
    let mut table = CardinalityTable {
        j,
        ..Default::default()
    };
    for a in -reach..reach {
        for b in -reach..reach {
            for c in -reach..reach {
                let lo = [a as f64 * h, b as f64 * h, c as f64 * h];
                let cube = Aabb::new(lo, [lo[0] + h, lo[1] + h, lo[2] + h]);
                let rho = cube.distance_to_point([0.0; 3]);
                let k = bin_index(rho, j as i32);
                if k > max_k || !tc.intersects_box(&cube) {
                    continue;
                }
                let r = tc
                    .cone
                    .edges()
                    .iter()
                    .map(|&e| cube.distance_to_ray(e))
                    .fold(f64::INFINITY, f64::min);
                let m = bin_index(r, j as i32);
                *table.by_k.entry(k).or_default() += 1;
                *table.by_km.entry((k, m)).or_default() += 1;
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PolyhedralCone;

    #[test]
    fn level_one_octant_hand_count() {
        let tc = TruncatedCone::new(PolyhedralCone::octant(), 1.0).unwrap();
        let t = bin_cardinalities(&tc, 1, 10).unwrap();
        assert_eq!(t.by_k.get(&0), Some(&1));
        assert_eq!(t.by_k.get(&1), Some(&7));
        assert_eq!(t.by_km.get(&(0, 0)), Some(&1));
        assert_eq!(t.by_km.get(&(1, 0)), Some(&3));
        assert_eq!(t.by_km.get(&(1, 1)), Some(&4));
        assert_eq!(t.by_k.values().sum::<u64>(), 8);
    }

    #[test]
    fn bins_from_distances() {
        assert_eq!(bin_index(5.3 / 16.0, 4), 5);
        assert_eq!(bin_index(2.1 / 16.0, 4), 2);
        assert_eq!(Family::of(5, 2), Family::Interior);
        assert_eq!(Family::of(0, 3), Family::Vertex);
        assert_eq!(Family::of(4, 0), Family::Edge);
    }

    #[test]
    fn shell_counts_grow_quadratically() {
        let tc = TruncatedCone::new(PolyhedralCone::octant(), 1.0).unwrap();
        let t = bin_cardinalities(&tc, 5, 16).unwrap();
        for k in 2..=16u64 {
            let c = t.by_k[&k] as f64 / (k * k) as f64;
            assert!(c > 0.5 && c < 4.0, "k={k}: {c}");
        }
    }
}
