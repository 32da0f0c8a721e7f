mod common;

use proptest::prelude::*;
use re100::envelope::{
    grid, partial_sum_hull, partial_sum_hull_with, storage_requirement_lossy,
    storage_requirement_power_capped, HullOptions,
};
use re100::oracle::enumerate_intervals;
use re100::profiles::mix;
use re100::StorageTech;

fn sizes() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 2usize..80)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_matches_enumeration((seed, n) in sizes()) {
        let (d, g) = common::pair(seed, n);
        let pf = partial_sum_hull(&d, &g).unwrap();
        for x in grid(1.0, 5.0, 41) {
            let want = enumerate_intervals(&d, &g, x).unwrap();
            prop_assert!((pf.eval(x).unwrap() - want).abs() <= 1e-12, "x_g = {x}");
        }
    }

    #[test]
    fn convex_and_nonincreasing((seed, n) in sizes()) {
        let (d, g) = common::pair(seed, n);
        let pf = partial_sum_hull(&d, &g).unwrap();
        let xs = grid(1.0, 6.0, 101);
        let v: Vec<f64> = xs.iter().map(|&x| pf.eval(x).unwrap()).collect();
        for w in v.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-14);
        }
        for w in v.windows(3) {
            prop_assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-12);
        }
        prop_assert!(v.iter().all(|&s| s >= 0.0));
        for s in pf.segments.windows(2) {
            prop_assert!(s[0].slope > s[1].slope);
        }
    }

    #[test]
    fn bottleneck_balances_energy((seed, n) in sizes(), x in 1.0f64..5.0) {
        let (d, g) = common::pair(seed, n);
        let pf = partial_sum_hull(&d, &g).unwrap();
        let b = pf.bottleneck_at(x).unwrap();
        let x_s = pf.eval(x).unwrap();
        prop_assert!((b.x_s - x_s).abs() <= 1e-12);
        let sum = |p: &re100::Profile| b.interval.steps(n).map(|t| p.at(t)).sum::<f64>();
        prop_assert!((sum(&d) - b.demand_sum).abs() <= 1e-12);
        prop_assert!((sum(&g) - b.generation_sum).abs() <= 1e-12);
        if x_s > 0.0 {
            prop_assert!((b.demand_sum - x * b.generation_sum - x_s).abs() <= 1e-12);
        }
        if let Some(seg) = pf.segment_at(x) {
            if x_s > 0.0 && x > seg.x_g_lo + 1e-9 && x < seg.x_g_hi - 1e-9 {
                prop_assert!((seg.slope - b.generation_sum).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn marginal_rate_is_bottleneck_generation((seed, n) in sizes(), x in 1.0f64..4.0) {
        let (d, g) = common::pair(seed, n);
        let pf = partial_sum_hull(&d, &g).unwrap();
        let h = 1e-7;
        let (lo, hi) = (pf.eval(x).unwrap(), pf.eval(x + h).unwrap());
        if lo > 0.0 && hi > 0.0 {
            let seg = pf.segment_at(x).unwrap();
            if x + h < seg.x_g_lo.max(1.0) || x + h <= seg.x_g_hi {
                prop_assert!(((lo - hi) / h - seg.slope).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn mixing_is_convex(seed in any::<u64>(), n in 2usize..60, beta in 0.0f64..=1.0, x in 1.0f64..4.0) {
        let mut r = common::rng(seed);
        let d = common::demand(&mut r, n);
        let g1 = common::generation(&mut r, n);
        let g2 = common::generation(&mut r, n);
        let gm = mix(&[&g1, &g2], &[beta, 1.0 - beta]).unwrap();
        let at = |g| partial_sum_hull(&d, g).unwrap().eval(x).unwrap();
        prop_assert!(at(&gm) <= beta * at(&g1) + (1.0 - beta) * at(&g2) + 1e-12);
    }

    #[test]
    fn chunking_does_not_change_the_hull((seed, n) in sizes(), rows in 1usize..40) {
        let (d, g) = common::pair(seed, n);
        let base = partial_sum_hull(&d, &g).unwrap();
        for exact in [false, true] {
            let pf = partial_sum_hull_with(&d, &g, &HullOptions { exact, chunk_rows: rows }).unwrap();
            prop_assert_eq!(&pf.vertices, &base.vertices);
        }
    }

    #[test]
    fn lossless_scan_matches_hull((seed, n) in sizes(), x in 1.0f64..4.0) {
        let (d, g) = common::pair(seed, n);
        let pf = partial_sum_hull(&d, &g).unwrap();
        let r = storage_requirement_lossy(&d, &g, x, &StorageTech::LOSSLESS).unwrap();
        prop_assert!((r.x_s - pf.eval(x).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn losses_never_reduce_storage((seed, n) in sizes(), x in 1.0f64..4.0, cycle in 0.3f64..1.0) {
        let (d, g) = common::pair(seed, n);
        let lossless = storage_requirement_lossy(&d, &g, x, &StorageTech::LOSSLESS).unwrap().x_s;
        if let Ok(r) = storage_requirement_lossy(&d, &g, x, &StorageTech::symmetric(cycle).unwrap()) {
            prop_assert!(r.x_s >= lossless - 1e-12);
        }
    }

    #[test]
    fn ample_power_matches_uncapped((seed, n) in sizes(), x in 1.0f64..4.0) {
        let (d, g) = common::pair(seed, n);
        let tech = StorageTech::st2();
        let free = storage_requirement_lossy(&d, &g, x, &tech);
        let capped = storage_requirement_power_capped(&d, &g, x, 1e6, &tech);
        match (free, capped) {
            (Ok(a), Ok(b)) => prop_assert!((a.x_s - b.x_s).abs() <= 1e-12),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "verdicts differ: {a:?} vs {b:?}"),
        }
    }
}

#[test]
fn block_profile_storage_need() {
    let d = re100::profiles::normalize(&[1.0; 4], re100::ProfileKind::Demand, "d").unwrap();
    let g = re100::profiles::normalize(&[1.0, 1.0, 0.0, 0.0], re100::ProfileKind::Generation, "g")
        .unwrap();
    let pf = partial_sum_hull(&d, &g).unwrap();
    assert_eq!(pf.eval(1.0).unwrap(), 0.5);
    assert_eq!(pf.eval(3.0).unwrap(), 0.5);
    let b = pf.bottleneck_at(1.0).unwrap();
    assert_eq!((b.interval.start, b.interval.len), (2, 2));
}
