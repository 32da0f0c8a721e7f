mod common;

use proptest::prelude::*;
use re100::envelope::storage_requirement_lossy;
use re100::oracle::{enumerate_intervals, fingerprint, greedy_min_capacity};
use re100::StorageTech;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simulation_agrees_with_enumeration(seed in any::<u64>(), n in 2usize..60, x in 1.0f64..4.0) {
        let (d, g) = common::pair(seed, n);
        let c = greedy_min_capacity(&d, &g, x, &StorageTech::LOSSLESS, 1e-10).unwrap().unwrap();
        prop_assert!((c - enumerate_intervals(&d, &g, x).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn simulation_agrees_with_lossy_scan(seed in any::<u64>(), n in 2usize..60, x in 1.0f64..4.0, cycle in 0.4f64..1.0) {
        let (d, g) = common::pair(seed, n);
        let tech = StorageTech::symmetric(cycle).unwrap();
        let sim = greedy_min_capacity(&d, &g, x, &tech, 1e-10).unwrap();
        match (sim, storage_requirement_lossy(&d, &g, x, &tech)) {
            (Some(c), Ok(r)) => prop_assert!((c - r.x_s).abs() <= 1e-8),
            (None, Err(_)) => {}
            (a, b) => prop_assert!(false, "verdicts differ: {a:?} vs {b:?}"),
        }
    }
}

#[test]
fn fingerprints_differ_by_instance() {
    let (d1, g1) = common::pair(1, 24);
    let (d2, g2) = common::pair(2, 24);
    assert_ne!(fingerprint(&[&d1, &g1], &[]), fingerprint(&[&d2, &g2], &[]));
}
