mod common;

use proptest::prelude::*;
use re100::econ::{legendre, present_value_factor, single_lcoe, ContourPiece, Financials};
use re100::envelope::partial_sum_hull;
use re100::oracle::vertex_scan;

fn cost_function(
    seed: u64,
    n: usize,
) -> (
    re100::envelope::ProductionFunction,
    re100::econ::CostFunction,
) {
    let (d, g) = common::pair(seed, n);
    let pf = partial_sum_hull(&d, &g).unwrap();
    let cf = legendre(&pf);
    (pf, cf)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn regions_partition_the_ratio_axis(seed in any::<u64>(), n in 2usize..60) {
        let (pf, cf) = cost_function(seed, n);
        prop_assert_eq!(cf.regions.len(), pf.vertices.len());
        prop_assert!(cf.regions[0].ratio_hi.is_infinite());
        prop_assert_eq!(cf.regions.last().unwrap().ratio_lo, 0.0);
        for w in cf.regions.windows(2) {
            prop_assert_eq!(w[0].ratio_lo, w[1].ratio_hi);
            prop_assert!(w[0].ratio_lo > w[1].ratio_lo);
        }
    }

    #[test]
    fn optimum_matches_vertex_scan(seed in any::<u64>(), n in 2usize..60, c_g in 0.01f64..20.0, c_s in 0.01f64..500.0) {
        let (pf, cf) = cost_function(seed, n);
        let o = cf.optimal_capacity(c_g, c_s).unwrap();
        let (_, _, best) = vertex_scan(&pf, c_g, c_s);
        prop_assert!((o.lcoe - best).abs() <= 1e-12 * best.max(1.0));
        for &(x, s) in &pf.vertices {
            prop_assert!(o.lcoe <= c_g * x + c_s * s + 1e-12 * best.max(1.0));
        }
    }

    #[test]
    fn scaling_costs_scales_lcoe(seed in any::<u64>(), n in 2usize..60, c_g in 0.01f64..20.0, c_s in 0.01f64..500.0, a in 0.01f64..100.0) {
        let (_, cf) = cost_function(seed, n);
        let base = cf.optimal_capacity(c_g, c_s).unwrap();
        let scaled = cf.optimal_capacity(a * c_g, a * c_s).unwrap();
        prop_assert_eq!(base.vertex, scaled.vertex);
        prop_assert!((scaled.lcoe - a * base.lcoe).abs() <= 1e-12 * scaled.lcoe.max(1.0));
    }

    #[test]
    fn contour_points_have_the_target_cost(seed in any::<u64>(), n in 2usize..60, l in 0.5f64..50.0) {
        let (_, cf) = cost_function(seed, n);
        let contour = cf.contour(l);
        for (c_g, c_s) in contour.sample(7, 1e4) {
            let o = cf.optimal_capacity(c_g, c_s).unwrap();
            prop_assert!((o.lcoe - l).abs() <= 1e-9 * l, "({c_g}, {c_s}) gives {}", o.lcoe);
        }
        for piece in &contour.pieces {
            if let ContourPiece::Segment { from, to, .. } = piece {
                prop_assert!(from.1 <= to.1);
            }
        }
    }

    #[test]
    fn undiscounted_lcoe_is_straight_line(capital in 0.0f64..1e4, fixed in 0.0f64..100.0, var in 0.0f64..1.0, life in 1.0f64..60.0, cf in 0.05f64..1.0) {
        prop_assert_eq!(present_value_factor(0.0, life), life);
        let fin = Financials {
            capital_cost: capital,
            fixed_cost: fixed,
            variable_cost: var,
            discount_rate: 0.0,
            lifetime: life,
            capacity_factor: cf,
            hours_per_period: 8760.0,
        };
        let want = (capital / life + fixed) / (cf * 8760.0) + var;
        prop_assert!((single_lcoe(&fin).unwrap() - want).abs() <= 1e-12 * want.max(1.0));
    }
}

#[test]
fn present_value_factor_closed_form() {
    let f = present_value_factor(0.05, 20.0);
    let sum: f64 = (1..=20).map(|k| 1.05f64.powi(-k)).sum();
    assert!((f - sum).abs() < 1e-12);
}
