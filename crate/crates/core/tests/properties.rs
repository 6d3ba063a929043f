use std::f64::consts::PI;

use conebesov::advisor::{admissible_r_positive, tau_of, IntervalSet};
use conebesov::fieldio::{field_bytes, read_field};
use conebesov::geometry::{PolyhedralCone, TruncatedCone};
use conebesov::pencil::{edge_eigenvalues, edge_strip, pencil_exponents, EdgeBc};
use conebesov::wavelet::{analyze, classify, nterm_curve, Grid, LevelGroups, WaveletSystem};
use proptest::prelude::*;

fn edge_bc() -> impl Strategy<Value = EdgeBc> {
    prop_oneof![Just(EdgeBc::DD), Just(EdgeBc::NN), Just(EdgeBc::Mixed)]
}

fn grid(n: usize, values: Vec<f64>) -> Grid {
    Grid {
        lo: [0.0; 3],
        h: 1.0 / n as f64,
        dims: [n; 3],
        values,
    }
}

proptest! {
    #[test]
    fn edge_eigenvalues_are_spaced_by_pi_over_theta(theta in 0.1f64..6.2, bc in edge_bc(), m in 1u32..20) {
        prop_assume!((theta - PI).abs() > 1e-3);
        let v = edge_eigenvalues(theta, bc, [m, m + 1]).unwrap();
        prop_assert!((v[1] - v[0] - PI / theta).abs() < 1e-12 * (1.0 + v[1]));
        let (dp, dm) = edge_strip(theta, bc).unwrap();
        prop_assert!(dp > 0.0 && dp == dm);
        // the strip is the gap to the first nonzero eigenvalue
        let first = edge_eigenvalues(theta, bc, [if bc == EdgeBc::NN { 2 } else { 1 }]).unwrap()[0];
        prop_assert!((first - dp).abs() < 1e-12 * first);
    }

    #[test]
    fn pencil_pair_is_root_pair(lambda in 0.0f64..200.0) {
        let (p, m) = pencil_exponents(lambda);
        prop_assert!((p + m + 1.0).abs() < 1e-12);
        prop_assert!((p * m + lambda).abs() < 1e-9 * (1.0 + lambda));
        prop_assert!(p >= -0.5);
    }

    #[test]
    fn interval_union_is_pointwise_or(
        a in 0.0f64..3.0, b in 0.0f64..3.0, c in 0.0f64..3.0, d in 0.0f64..3.0, r in 0.0f64..3.0,
    ) {
        let x = IntervalSet::open(a, b);
        let y = IntervalSet::open(c, d);
        let u = x.union(&y);
        prop_assert_eq!(u.contains(r), x.contains(r) || y.contains(r));
        prop_assert!(u.0.windows(2).all(|w| w[0].1 <= w[1].0));
        let i = u.intersect(0.5, 2.0);
        prop_assert_eq!(i.contains(r), u.contains(r) && 0.5 < r && r < 2.0);
    }

    #[test]
    fn positive_set_shrinks_with_exponents(l in 1u32..5, d in 0.01f64..2.0, extra in 0.0f64..1.0, s in 0.1f64..3.0) {
        let a = admissible_r_positive(l, &[d, 0.1], s).unwrap();
        let b = admissible_r_positive(l, &[d + extra, 0.1], s).unwrap();
        prop_assert!(b.sup().unwrap_or(0.0) <= a.sup().unwrap_or(0.0));
        if let Some(r) = a.sup() {
            prop_assert!(r <= l as f64 && r <= 3.0 * s);
            prop_assert!(tau_of(r) > 0.0 && tau_of(r) <= 2.0);
        }
    }

    #[test]
    fn field_files_roundtrip(values in proptest::collection::vec(-1e6f64..1e6, 64)) {
        let g = grid(4, values);
        let back = read_field(field_bytes(&g).as_slice()).unwrap();
        prop_assert_eq!(back, g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn parseval_on_random_fields(order in 2usize..6, values in proptest::collection::vec(-1.0f64..1.0, 16 * 16 * 16)) {
        let w = WaveletSystem::daubechies(order).unwrap();
        let g = grid(16, values);
        let f = analyze(&g, &w, 2).unwrap();
        let e = g.l2_norm_squared();
        prop_assert!((f.energy() - e).abs() < 1e-10 * e);
        let back = f.synthesize();
        let err = back.values.iter().zip(&g.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10);
    }

    #[test]
    fn nterm_curve_is_monotone_and_starts_at_norm(values in proptest::collection::vec(-1.0f64..1.0, 8 * 8 * 8)) {
        let w = WaveletSystem::daubechies(2).unwrap();
        let f = analyze(&grid(8, values), &w, 2).unwrap();
        let total = LevelGroups::collect(&f, None).count() as u64;
        let ns: Vec<u64> = (0..=total).step_by(37).collect();
        let c = nterm_curve(&f, None, &ns, 2.0).unwrap();
        prop_assert!((c.points[0].1 - f.energy().sqrt()).abs() < 1e-10);
        prop_assert!(c.points.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-15));
    }

    #[test]
    fn classification_partitions_the_wavelet_coefficients(values in proptest::collection::vec(-1.0f64..1.0, 16 * 16 * 16)) {
        let w = WaveletSystem::daubechies(2).unwrap();
        let mut g = grid(16, values);
        g.lo = [-0.5; 3];
        let f = analyze(&g, &w, 3).unwrap();
        let tc = TruncatedCone::new(PolyhedralCone::octant(), 0.45).unwrap();
        let bins = classify(&f, &tc, &[]).unwrap();
        let binned: u64 = bins.bins.values().map(|s| s.count).sum();
        prop_assert_eq!(binned, bins.total());
        let scaling = f.coarse.len() as u64;
        prop_assert_eq!(bins.total() + bins.excluded + scaling, f.coefficient_count() as u64);
    }
}
