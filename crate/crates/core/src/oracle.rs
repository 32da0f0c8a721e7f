//! Brute-force reference computations.
//!
//! Everything here is written from the defining formulas with plain loops and
//! no shared numerics, so agreement with the fast paths means something.

use std::fmt;

use sha2::{Digest, Sha256};

use crate::envelope::ProductionFunction;
use crate::error::{Error, Result};
use crate::profiles::Profile;
use crate::tech::StorageTech;

/// Largest period the quadratic enumeration accepts.
pub const MAX_PERIOD: usize = 2000;

/// Slack allowed on the state of charge during simulation.
const SIMULATION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    IntervalEnumeration,
    VertexScan,
    GreedySimulation,
    Bisection,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::IntervalEnumeration => "interval-enumeration",
            Method::VertexScan => "vertex-scan",
            Method::GreedySimulation => "greedy-simulation",
            Method::Bisection => "bisection",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub quantity: String,
    pub method: Method,
    pub value: f64,
    /// Hash of the instance data and parameters.
    pub fingerprint: String,
}

/// Short hex digest of profile values and scalar parameters.
pub fn fingerprint(profiles: &[&Profile], params: &[f64]) -> String {
    let mut h = Sha256::new();
    for p in profiles {
        h.update((p.len() as u64).to_le_bytes());
        for v in p.values() {
            h.update(v.to_le_bytes());
        }
    }
    for v in params {
        h.update(v.to_le_bytes());
    }
    h.finalize()[..8]
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn check(demand: &Profile, generation: &Profile) -> Result<()> {
    if demand.len() != generation.len() {
        return Err(Error::Validation(format!(
            "profile lengths differ: {} vs {}",
            demand.len(),
            generation.len()
        )));
    }
    Ok(())
}

/// Largest `D_ij - x_g G_ij` over all circular intervals, floored at 0.
pub fn enumerate_intervals(demand: &Profile, generation: &Profile, x_g: f64) -> Result<f64> {
    check(demand, generation)?;
    let n = demand.len();
    if n > MAX_PERIOD {
        return Err(Error::Resource(format!(
            "interval enumeration is limited to {MAX_PERIOD} steps, got {n}"
        )));
    }
    let (d, g) = (demand.values(), generation.values());
    let mut best = 0.0_f64;
    for i in 0..n {
        let mut gap = 0.0;
        for k in 0..n {
            let t = (i + k) % n;
            gap += d[t] - x_g * g[t];
            if gap > best {
                best = gap;
            }
        }
    }
    Ok(best)
}

/// Serves demand from generation, charges on surplus and discharges on
/// deficit over two back-to-back cycles, starting full. True when demand is
/// met at every step and the second cycle ends no lower than the first, so
/// the operation can repeat indefinitely.
pub fn greedy_simulate(
    demand: &Profile,
    generation: &Profile,
    x_g: f64,
    capacity: f64,
    tech: &StorageTech,
) -> Result<bool> {
    check(demand, generation)?;
    let (d, g) = (demand.values(), generation.values());
    let mut level = capacity;
    let mut ends = [0.0; 2];
    for end in &mut ends {
        for t in 0..d.len() {
            let residual = x_g * g[t] - d[t];
            if residual >= 0.0 {
                level = (level + tech.charge * residual).min(capacity);
            } else {
                level += tech.discharge * residual;
                if level < -SIMULATION_TOLERANCE {
                    return Ok(false);
                }
            }
        }
        *end = level;
    }
    Ok(ends[1] >= ends[0] - SIMULATION_TOLERANCE)
}

/// Smallest capacity for which [`greedy_simulate`] succeeds, to `tol`.
pub fn greedy_min_capacity(
    demand: &Profile,
    generation: &Profile,
    x_g: f64,
    tech: &StorageTech,
    tol: f64,
) -> Result<Option<f64>> {
    let total_deficit: f64 = demand
        .values()
        .iter()
        .zip(generation.values())
        .map(|(d, g)| (d - x_g * g).max(0.0))
        .sum();
    let mut hi = tech.discharge * total_deficit + tol;
    if !greedy_simulate(demand, generation, x_g, hi, tech)? {
        return Ok(None);
    }
    if greedy_simulate(demand, generation, x_g, 0.0, tech)? {
        return Ok(Some(0.0));
    }
    let mut lo = 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if greedy_simulate(demand, generation, x_g, mid, tech)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Vertex of least `c_g x_g + c_s x_s`; ties go to the smaller `x_g`.
pub fn vertex_scan(pf: &ProductionFunction, c_g: f64, c_s: f64) -> (usize, (f64, f64), f64) {
    let mut best: Option<(usize, (f64, f64), f64)> = None;
    for (k, &(x, s)) in pf.vertices.iter().enumerate() {
        let cost = c_g * x + c_s * s;
        let better = match best {
            None => true,
            Some((_, _, b)) => cost < b - 1e-12 * b.abs().max(1.0),
        };
        if better {
            best = Some((k, (x, s), cost));
        }
    }
    best.expect("production function has at least one vertex")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::ProfileKind;

    fn pair(d: &[f64], g: &[f64]) -> (Profile, Profile) {
        (
            Profile::from_normalized(d.to_vec(), ProfileKind::Demand, "d").unwrap(),
            Profile::from_normalized(g.to_vec(), ProfileKind::Generation, "g").unwrap(),
        )
    }

    #[test]
    fn enumeration_examples() {
        let (d, g) = pair(&[0.25; 4], &[0.5, 0.5, 0.0, 0.0]);
        assert_eq!(enumerate_intervals(&d, &g, 1.0).unwrap(), 0.5);
        let v = [0.1, 0.2, 0.3, 0.4];
        let (d, g) = pair(&v, &v);
        assert_eq!(enumerate_intervals(&d, &g, 1.0).unwrap(), 0.0);
        assert_eq!(enumerate_intervals(&d, &g, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn enumeration_size_cap() {
        let n = MAX_PERIOD + 1;
        let (d, g) = pair(&vec![1.0 / n as f64; n], &vec![1.0 / n as f64; n]);
        assert!(matches!(
            enumerate_intervals(&d, &g, 1.0),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn simulation_examples() {
        let (d, g) = pair(&[0.25; 4], &[0.5, 0.5, 0.0, 0.0]);
        let lossless = StorageTech::LOSSLESS;
        assert!(greedy_simulate(&d, &g, 1.0, 0.5, &lossless).unwrap());
        assert!(!greedy_simulate(&d, &g, 1.0, 0.49, &lossless).unwrap());
        let v = [0.1, 0.2, 0.3, 0.4];
        let (d, g) = pair(&v, &v);
        assert!(greedy_simulate(&d, &g, 1.0, 0.0, &lossless).unwrap());
    }

    #[test]
    fn draining_store_is_not_periodic() {
        let (d, g) = pair(&[0.25; 4], &[0.5, 0.5, 0.0, 0.0]);
        let lossy = StorageTech::symmetric(0.5).unwrap();
        assert!(!greedy_simulate(&d, &g, 1.0, 10.0, &lossy).unwrap());
        assert!(greedy_simulate(&d, &g, 2.0, 10.0, &lossy).unwrap());
    }

    #[test]
    fn minimal_capacity_by_bisection() {
        let (d, g) = pair(&[0.25; 4], &[0.5, 0.5, 0.0, 0.0]);
        let c = greedy_min_capacity(&d, &g, 1.0, &StorageTech::LOSSLESS, 1e-7)
            .unwrap()
            .unwrap();
        assert!((c - 0.5).abs() <= 1e-7);
    }

    #[test]
    fn fingerprint_is_stable() {
        let (d, g) = pair(&[0.25; 4], &[0.5, 0.5, 0.0, 0.0]);
        let a = fingerprint(&[&d, &g], &[1.0]);
        assert_eq!(a, fingerprint(&[&d, &g], &[1.0]));
        assert_ne!(a, fingerprint(&[&d, &g], &[2.0]));
        assert_eq!(a.len(), 16);
    }
}
