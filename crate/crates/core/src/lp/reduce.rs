//! Two-variable form of the lossless model.
//!
//! Eliminating flows and states leaves `min c_g x_g + c_s x_s` subject to
//! `x_s + G_k x_g >= D_k` for every circular interval `k`, plus the cycle
//! balance `G x_g >= D` over the whole period. The T² constraints make the
//! primal tableau large, so the dual (two rows, one column per constraint)
//! is solved instead and the capacities are read from its row multipliers.

use super::simplex::{self, Outcome};
use super::{LpModel, Row, Sense, Variant};
use crate::envelope::Interval;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedLp {
    pub generation_cost: f64,
    pub storage_cost: f64,
    /// `(interval, G, D)` for every circular interval.
    pub constraints: Vec<(Interval, f64, f64)>,
    /// Whole-cycle sums `(G, D)` of the balance row.
    pub cycle: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedSolution {
    pub objective: f64,
    pub x_g: f64,
    pub x_s: f64,
}

pub fn reduce_to_2var(model: &LpModel) -> Result<ReducedLp> {
    if model.variant != Variant::Simplest {
        return Err(Error::Validation(format!(
            "only the simplest model reduces to two variables, got {}",
            model.variant
        )));
    }
    let n = model.period;
    let mut constraints = Vec::with_capacity(n * n);
    for start in 0..n {
        let (mut g, mut d) = (0.0, 0.0);
        for len in 1..=n {
            let t = (start + len - 1) % n;
            g += model.generation[t];
            d += model.demand[t];
            constraints.push((Interval { start, len }, g, d));
        }
    }
    let cycle = (model.generation.iter().sum(), model.demand.iter().sum());
    Ok(ReducedLp {
        generation_cost: model.objective[0],
        storage_cost: model.objective[1],
        constraints,
        cycle,
    })
}

impl ReducedLp {
    pub fn solve(&self) -> Result<ReducedSolution> {
        // Dual: max sum(l_k D_k) + m D subject to
        //   sum(l_k G_k) + m G <= c_g,  sum(l_k) <= c_s,  l, m >= 0.
        let k = self.constraints.len();
        let mut objective: Vec<f64> = self.constraints.iter().map(|c| -c.2).collect();
        objective.push(-self.cycle.1);
        let mut gen_row: Vec<(usize, f64)> = self
            .constraints
            .iter()
            .enumerate()
            .map(|(j, c)| (j, c.1))
            .collect();
        gen_row.push((k, self.cycle.0));
        let storage_row: Vec<(usize, f64)> = (0..k).map(|j| (j, 1.0)).collect();
        let rows = [
            Row {
                coeffs: gen_row,
                sense: Sense::Le,
                rhs: self.generation_cost,
            },
            Row {
                coeffs: storage_row,
                sense: Sense::Le,
                rhs: self.storage_cost,
            },
        ];
        match simplex::solve(&objective, &rows)? {
            Outcome::Optimal {
                duals, objective, ..
            } => Ok(ReducedSolution {
                objective: -objective,
                x_g: -duals[0],
                x_s: -duals[1],
            }),
            Outcome::Unbounded => Err(Error::Infeasible {
                reason: "reduced model has no feasible capacities".into(),
                min_generation: None,
            }),
            Outcome::Infeasible => Err(Error::Solver(
                "dual of the reduced model is infeasible".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{Profile, ProfileKind};
    use crate::tech::TechCosts;

    fn model(c_s: f64) -> LpModel {
        let d = Profile::from_normalized(vec![0.25; 4], ProfileKind::Demand, "d").unwrap();
        let g = Profile::from_normalized(vec![0.1, 0.4, 0.1, 0.4], ProfileKind::Generation, "g")
            .unwrap();
        LpModel::build(Variant::Simplest, &d, &g, &TechCosts::simple(1.0, c_s), &[]).unwrap()
    }

    #[test]
    fn matches_full_model() {
        for (c_s, expected) in [(5.0, 1.75), (20.0, 2.5)] {
            let m = model(c_s);
            let r = reduce_to_2var(&m).unwrap();
            assert_eq!(r.constraints.len(), 16);
            let s = r.solve().unwrap();
            assert!((s.objective - expected).abs() < 1e-9);
            assert!((s.objective - m.solve().unwrap().objective).abs() < 1e-7);
            assert!((s.x_g + c_s * s.x_s / 1.0 - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_other_variants() {
        let mut m = model(5.0);
        m.variant = Variant::Lossy;
        assert!(matches!(reduce_to_2var(&m), Err(Error::Validation(_))));
    }
}
