//! Storage requirement with charge/discharge loss and power limits.
//!
//! With losses the boundary has no global piecewise form, so it is evaluated
//! pointwise: weight each step by what it does to the state of charge and
//! take the circular maximum-sum interval.

use super::{grid, Interval};
use crate::error::{Error, Result};
use crate::profiles::{check_pair, Profile};
use crate::summation::Compensated;
use crate::tech::StorageTech;

/// Slack allowed on the whole-cycle energy balance.
const BALANCE_TOLERANCE: f64 = 1e-12;
const BISECTION_TOLERANCE: f64 = 1e-10;
const MAX_GENERATION: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StorageRequirement {
    pub x_g: f64,
    pub x_s: f64,
    /// Interval of largest net drain; empty when no storage is needed.
    pub interval: Interval,
}

/// Largest sum over circular intervals of `w`, including the empty interval
/// (value 0) and the full cycle. Ties go to the longer interval.
pub fn circular_max_interval(w: &[f64]) -> (f64, Interval) {
    let n = w.len();
    let mut total = Compensated::default();
    for &v in w {
        total.add(v);
    }
    let total = total.value();

    let mut best = (0.0, Interval::EMPTY);
    let mut offer = |value: f64, iv: Interval| {
        if value > best.0 || (value == best.0 && iv.len > best.1.len) {
            best = (value, iv);
        }
    };

    let (mut hi, mut hi_start) = (0.0_f64, 0);
    let (mut lo, mut lo_start) = (0.0_f64, 0);
    for t in 0..n {
        if t == 0 || hi < 0.0 {
            hi = w[t];
            hi_start = t;
        } else {
            hi += w[t];
        }
        offer(
            hi,
            Interval {
                start: hi_start,
                len: t + 1 - hi_start,
            },
        );

        if t == 0 || lo > 0.0 {
            lo = w[t];
            lo_start = t;
        } else {
            lo += w[t];
        }
        let lo_len = t + 1 - lo_start;
        if lo_len < n {
            offer(
                total - lo,
                Interval {
                    start: (t + 1) % n,
                    len: n - lo_len,
                },
            );
        }
    }
    offer(total, Interval::full(n));
    best
}

fn weights(
    demand: &Profile,
    generation: &Profile,
    x_g: f64,
    tech: &StorageTech,
    cap: f64,
) -> Vec<f64> {
    demand
        .values()
        .iter()
        .zip(generation.values())
        .map(|(d, g)| {
            let r = x_g * g - d;
            -(tech.charge * r.max(0.0).min(cap) + tech.discharge * r.min(0.0))
        })
        .collect()
}

/// Infeasibility reason at `x_g`, if any.
fn infeasibility(
    demand: &Profile,
    generation: &Profile,
    x_g: f64,
    tech: &StorageTech,
    cap: f64,
) -> Option<String> {
    let mut balance = Compensated::default();
    for (d, g) in demand.values().iter().zip(generation.values()) {
        let r = x_g * g - d;
        if cap.is_finite() && tech.discharge * (-r) > cap * (1.0 + 1e-12) {
            return Some(format!(
                "deficit {:.6e} needs more than the discharge power limit {cap:.6e}",
                -r
            ));
        }
        balance.add(tech.charge * r.max(0.0).min(cap) + tech.discharge * r.min(0.0));
    }
    let balance = balance.value();
    (balance < -BALANCE_TOLERANCE).then(|| {
        format!(
            "charge over the cycle falls short of discharge by {:.6e}",
            -balance
        )
    })
}

/// Smallest `x_g` passing the feasibility test, by bisection.
fn min_generation(
    demand: &Profile,
    generation: &Profile,
    tech: &StorageTech,
    cap: f64,
) -> Option<f64> {
    let feasible = |x: f64| infeasibility(demand, generation, x, tech, cap).is_none();
    let mut hi = 1.0;
    while !feasible(hi) {
        hi *= 2.0;
        if hi > MAX_GENERATION {
            return None;
        }
    }
    let mut lo = 0.0;
    while hi - lo > BISECTION_TOLERANCE * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

fn check_inputs(
    demand: &Profile,
    generation: &Profile,
    x_g: f64,
    tech: &StorageTech,
) -> Result<()> {
    check_pair(demand, generation)?;
    tech.validate()?;
    if !(x_g >= 0.0 && x_g.is_finite()) {
        return Err(Error::Validation(format!(
            "generation capacity must be finite and non-negative, got {x_g}"
        )));
    }
    Ok(())
}

fn requirement(
    demand: &Profile,
    generation: &Profile,
    x_g: f64,
    tech: &StorageTech,
    cap: f64,
) -> Result<StorageRequirement> {
    if let Some(reason) = infeasibility(demand, generation, x_g, tech, cap) {
        return Err(Error::Infeasible {
            reason,
            min_generation: min_generation(demand, generation, tech, cap),
        });
    }
    let (value, interval) = circular_max_interval(&weights(demand, generation, x_g, tech, cap));
    Ok(StorageRequirement {
        x_g,
        x_s: value.max(0.0),
        interval,
    })
}

/// Storage energy needed at `x_g` with charge/discharge loss.
pub fn storage_requirement_lossy(
    demand: &Profile,
    generation: &Profile,
    x_g: f64,
    tech: &StorageTech,
) -> Result<StorageRequirement> {
    check_inputs(demand, generation, x_g, tech)?;
    requirement(demand, generation, x_g, tech, f64::INFINITY)
}

/// Smallest generation capacity at which lossy storage can close the cycle.
pub fn min_generation_lossy(
    demand: &Profile,
    generation: &Profile,
    tech: &StorageTech,
) -> Result<f64> {
    check_pair(demand, generation)?;
    tech.validate()?;
    if tech.is_lossless() {
        return Ok(1.0);
    }
    min_generation(demand, generation, tech, f64::INFINITY).ok_or_else(|| {
        Error::Validation("generation profile cannot cover demand at any capacity".into())
    })
}

/// Storage energy needed at `x_g` when charge input and discharge output are
/// both limited to `x_p` per step.
pub fn storage_requirement_power_capped(
    demand: &Profile,
    generation: &Profile,
    x_g: f64,
    x_p: f64,
    tech: &StorageTech,
) -> Result<StorageRequirement> {
    check_inputs(demand, generation, x_g, tech)?;
    if !(x_p > 0.0) {
        return Err(Error::Validation(format!(
            "power capacity must be positive, got {x_p}"
        )));
    }
    requirement(demand, generation, x_g, tech, x_p)
}

/// Lossy storage requirement sampled on a grid, interpolated linearly between
/// samples. Each sample is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct LossyCurve {
    pub tech: StorageTech,
    pub min_generation: f64,
    pub points: Vec<StorageRequirement>,
}

impl LossyCurve {
    pub fn eval(&self, x_g: f64) -> Result<f64> {
        let (first, last) = match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Validation("empty curve".into())),
        };
        if !(x_g >= first.x_g && x_g <= last.x_g) {
            return Err(Error::Domain {
                x_g,
                x_g_min: first.x_g,
            });
        }
        let k = self.points.partition_point(|p| p.x_g < x_g);
        if k == 0 || self.points[k].x_g == x_g {
            return Ok(self.points[k].x_s);
        }
        let (a, b) = (&self.points[k - 1], &self.points[k]);
        let w = (x_g - a.x_g) / (b.x_g - a.x_g);
        Ok(a.x_s + w * (b.x_s - a.x_s))
    }
}

/// Samples the lossy requirement at `n` points over `[lo, hi]`. Samples below
/// the minimum generation are dropped and the minimum itself is added.
pub fn lossy_curve(
    demand: &Profile,
    generation: &Profile,
    tech: &StorageTech,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<LossyCurve> {
    let x_min = min_generation_lossy(demand, generation, tech)?;
    let mut xs: Vec<f64> = grid(lo, hi, n).into_iter().filter(|&x| x > x_min).collect();
    if lo <= x_min && x_min <= hi {
        xs.insert(0, x_min);
    }
    let points = xs
        .into_iter()
        .map(|x| storage_requirement_lossy(demand, generation, x, tech))
        .collect::<Result<Vec<_>>>()?;
    Ok(LossyCurve {
        tech: *tech,
        min_generation: x_min,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::partial_sum_hull;
    use crate::profiles::ProfileKind;

    fn pair(d: &[f64], g: &[f64]) -> (Profile, Profile) {
        (
            Profile::from_normalized(d.to_vec(), ProfileKind::Demand, "d").unwrap(),
            Profile::from_normalized(g.to_vec(), ProfileKind::Generation, "g").unwrap(),
        )
    }

    #[test]
    fn circular_max_wraps() {
        let (v, iv) = circular_max_interval(&[1.0, -5.0, 2.0, 0.5]);
        assert_eq!(v, 3.5);
        assert_eq!(iv, Interval { start: 2, len: 3 });
        let (v, iv) = circular_max_interval(&[-1.0, -2.0]);
        assert_eq!((v, iv), (0.0, Interval::EMPTY));
        let (v, iv) = circular_max_interval(&[1.0, 2.0]);
        assert_eq!((v, iv), (3.0, Interval::full(2)));
    }

    #[test]
    fn lossless_matches_hull() {
        let (d, g) = pair(&[0.25; 4], &[0.1, 0.4, 0.1, 0.4]);
        let pf = partial_sum_hull(&d, &g).unwrap();
        for x in [1.0, 1.3, 2.0, 2.5, 3.0] {
            let r = storage_requirement_lossy(&d, &g, x, &StorageTech::LOSSLESS).unwrap();
            assert!((r.x_s - pf.eval(x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn deficit_hour_fully_served_from_storage() {
        let (d, g) = pair(&[0.5, 0.5], &[1.0, 0.0]);
        let tech = StorageTech::new(0.8, 1.0).unwrap();
        let r = storage_requirement_lossy(&d, &g, 1.125, &tech).unwrap();
        assert!((r.x_s - 0.5).abs() < 1e-12);
        assert_eq!(r.interval, Interval { start: 1, len: 1 });
    }

    #[test]
    fn min_generation_closes_balance() {
        let (d, g) = pair(&[0.5, 0.5], &[1.0, 0.0]);
        let tech = StorageTech::new(0.8, 1.0).unwrap();
        let x = min_generation_lossy(&d, &g, &tech).unwrap();
        assert!((x - 1.125).abs() < 1e-9);
        assert_eq!(
            min_generation_lossy(&d, &g, &StorageTech::LOSSLESS).unwrap(),
            1.0
        );
    }

    #[test]
    fn below_min_generation_is_infeasible() {
        let (d, g) = pair(&[0.5, 0.5], &[1.0, 0.0]);
        let tech = StorageTech::new(0.8, 1.0).unwrap();
        match storage_requirement_lossy(&d, &g, 1.1, &tech) {
            Err(Error::Infeasible { min_generation, .. }) => {
                assert!((min_generation.unwrap() - 1.125).abs() < 1e-9)
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn power_cap() {
        let (d, g) = pair(&[0.5, 0.5], &[1.0, 0.0]);
        let lossless = StorageTech::LOSSLESS;
        assert!(matches!(
            storage_requirement_power_capped(&d, &g, 2.0, 0.25, &lossless),
            Err(Error::Infeasible { .. })
        ));
        let capped = storage_requirement_power_capped(&d, &g, 2.0, 10.0, &lossless).unwrap();
        let free = storage_requirement_lossy(&d, &g, 2.0, &lossless).unwrap();
        assert_eq!(capped, free);
        assert!(storage_requirement_power_capped(&d, &g, 2.0, 0.0, &lossless).is_err());
    }

    #[test]
    fn curve_interpolates() {
        let (d, g) = pair(&[0.5, 0.5], &[1.0, 0.0]);
        let tech = StorageTech::new(0.8, 1.0).unwrap();
        let c = lossy_curve(&d, &g, &tech, 1.0, 3.0, 5).unwrap();
        assert!((c.points[0].x_g - 1.125).abs() < 1e-9);
        assert_eq!(c.points.len(), 5);
        assert!((c.eval(2.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(c.eval(1.0).is_err());
    }
}
