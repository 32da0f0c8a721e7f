//! Bottleneck checks on an optimal LP solution.

use super::{Capacity, LpModel, LpSolution, Status, Variant};
use crate::envelope::Interval;
use crate::error::{Error, Result};

/// Relative tolerance for matching a cost ratio against a sensitivity.
const RATIO_TOLERANCE: f64 = 1e-3;
/// Relative perturbation of capacities in the sensitivity re-solves.
const STEP: f64 = 1e-4;

/// Response of the binding energy capacity to one other capacity, as the
/// coefficient `a = -d x_e / d c` from each side. A side that cannot be
/// perturbed feasibly reports infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity {
    pub capacity: Capacity,
    pub value: f64,
    pub step: f64,
    pub left: f64,
    pub right: f64,
    /// Objective coefficient ratio `c / c_e`.
    pub cost_ratio: f64,
    /// Whether `right <= cost_ratio <= left` within tolerance.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// Energy capacity whose bottleneck is examined.
    pub energy: Capacity,
    pub energy_capacity: f64,
    /// Interval of largest drain of the examined storage.
    pub bottleneck: Interval,
    /// Generation neither consumed nor stored during the bottleneck.
    pub unutilized_power: f64,
    /// State of charge just before the bottleneck starts.
    pub soc_start: f64,
    /// State of charge at the end of the bottleneck.
    pub soc_end: f64,
    pub sensitivities: Vec<Sensitivity>,
    /// Set when a cost ratio sits on a kink, so several vertices tie.
    pub inconclusive: bool,
}

/// Circular interval maximizing `s[i - 1] - s[j]`, ties to the longer one.
fn largest_drain(soc: &[f64]) -> Interval {
    let n = soc.len();
    let mut best = (f64::NEG_INFINITY, Interval::EMPTY);
    for start in 0..n {
        let before = soc[(start + n - 1) % n];
        for len in 1..=n {
            let drain = before - soc[(start + len - 1) % n];
            if drain > best.0 + 1e-12 || (drain >= best.0 - 1e-12 && len > best.1.len) {
                best = (drain.max(best.0), Interval { start, len });
            }
        }
    }
    best.1
}

fn energy_of(model: &LpModel, solution: &LpSolution) -> (Capacity, usize) {
    if model.variant == Variant::TwoStorage {
        let first = solution.capacity(Capacity::Energy).unwrap_or(0.0);
        let second = solution.capacity(Capacity::SecondEnergy).unwrap_or(0.0);
        if second >= first {
            return (Capacity::SecondEnergy, 1);
        }
    }
    (Capacity::Energy, 0)
}

/// Re-solves with every capacity but `energy` pinned, `target` set to
/// `value`, and returns the energy capacity, or `None` when infeasible.
fn energy_at(
    model: &LpModel,
    solution: &LpSolution,
    energy: Capacity,
    target: Capacity,
    value: f64,
) -> Result<Option<f64>> {
    let mut m = model.clone();
    for &c in model.capacities() {
        if c == energy || model.fixed.iter().any(|(f, _)| *f == c) {
            continue;
        }
        let v = if c == target {
            value
        } else {
            solution.capacity(c).unwrap_or(0.0)
        };
        m.fix(c, v)?;
    }
    let s = m.solve()?;
    Ok(match s.status {
        Status::Optimal => s.capacity(energy),
        _ => None,
    })
}

pub fn diagnostics(model: &LpModel, solution: &LpSolution) -> Result<Diagnostics> {
    if !solution.is_optimal() {
        return Err(Error::Validation(format!(
            "diagnostics need an optimal solution, got {}",
            solution.status.name()
        )));
    }
    let (energy, storage) = energy_of(model, solution);
    let energy_capacity = solution.capacity(energy).unwrap_or(0.0);
    let soc = solution.state_of_charge(storage);
    let n = model.period;
    let bottleneck = largest_drain(&soc);
    let soc_start = soc[(bottleneck.start + n - 1) % n];
    let soc_end = soc[bottleneck.end(n).unwrap_or(bottleneck.start)];

    let x_g = solution.capacity(Capacity::Generation).unwrap_or(0.0);
    let used: &[usize] = if model.variant == Variant::TwoStorage {
        &[0, 1, 3]
    } else {
        &[0, 1]
    };
    let unutilized_power = bottleneck
        .steps(n)
        .map(|t| {
            let used: f64 = used.iter().map(|&k| solution.flow(t, k)).sum();
            (x_g * model.generation[t] - used).max(0.0)
        })
        .sum();

    let energy_cost = model.objective[model.capacity_column(energy).expect("energy column")];
    let mut sensitivities = Vec::new();
    let mut inconclusive = false;
    for &c in model.capacities() {
        if c.is_energy() || model.fixed.iter().any(|(f, _)| *f == c) {
            continue;
        }
        let value = solution.capacity(c).unwrap_or(0.0);
        let scale = if c == Capacity::Generation {
            1.0
        } else {
            1.0 / n as f64
        };
        let step = STEP * value.max(scale);
        let right = energy_at(model, solution, energy, c, value + step)?
            .map_or(f64::NAN, |e| (energy_capacity - e) / step);
        let left = if value - step >= 0.0 {
            energy_at(model, solution, energy, c, value - step)?
                .map_or(f64::INFINITY, |e| (e - energy_capacity) / step)
        } else {
            f64::INFINITY
        };
        let cost_ratio =
            model.objective[model.capacity_column(c).expect("capacity column")] / energy_cost;
        let tol = RATIO_TOLERANCE * cost_ratio.abs().max(1.0);
        let consistent = right - tol <= cost_ratio && cost_ratio <= left + tol;
        if !right.is_finite()
            || (cost_ratio - right).abs() <= tol
            || (left - cost_ratio).abs() <= tol
        {
            inconclusive = true;
        }
        sensitivities.push(Sensitivity {
            capacity: c,
            value,
            step,
            left,
            right,
            cost_ratio,
            consistent,
        });
    }

    Ok(Diagnostics {
        energy,
        energy_capacity,
        bottleneck,
        unutilized_power,
        soc_start,
        soc_end,
        sensitivities,
        inconclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{Profile, ProfileKind};
    use crate::tech::TechCosts;

    fn solve(d: &[f64], g: &[f64], c_g: f64, c_s: f64) -> (LpModel, LpSolution) {
        let d = Profile::from_normalized(d.to_vec(), ProfileKind::Demand, "d").unwrap();
        let g = Profile::from_normalized(g.to_vec(), ProfileKind::Generation, "g").unwrap();
        let m =
            LpModel::build(Variant::Simplest, &d, &g, &TechCosts::simple(c_g, c_s), &[]).unwrap();
        let s = m.solve().unwrap();
        (m, s)
    }

    #[test]
    fn block_bottleneck_is_drained_fully() {
        let (m, s) = solve(&[0.25; 4], &[0.5, 0.5, 0.0, 0.0], 1.0, 1.0);
        let d = diagnostics(&m, &s).unwrap();
        assert_eq!(d.bottleneck, Interval { start: 2, len: 2 });
        assert!(d.unutilized_power.abs() < 1e-9);
        assert!((d.soc_start - 0.5).abs() < 1e-9);
        assert!(d.soc_end.abs() < 1e-9);
    }

    #[test]
    fn sensitivity_matches_slope() {
        let (m, s) = solve(&[0.25; 4], &[0.1, 0.4, 0.1, 0.4], 1.0, 5.0);
        let d = diagnostics(&m, &s).unwrap();
        let a = d.sensitivities[0];
        assert_eq!(a.capacity, Capacity::Generation);
        assert!((a.right - 0.1).abs() < 1e-3);
        assert!(a.left.is_infinite());
        assert!(a.consistent && !d.inconclusive);
    }

    #[test]
    fn tied_vertex_is_inconclusive() {
        let (m, s) = solve(&[0.25; 4], &[0.1, 0.4, 0.1, 0.4], 1.0, 10.0);
        let d = diagnostics(&m, &s).unwrap();
        assert!(d.inconclusive);
    }
}
