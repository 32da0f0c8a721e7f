//! Production function of a generation + storage system.
//!
//! For a demand profile `d` and unit generation profile `g`, the storage needed
//! at generation capacity `x_g` is the largest shortfall over any circular
//! interval:
//!
//! ```text
//! x_s(x_g) = max(0, max_ij (D_ij - x_g * G_ij))
//! ```
//!
//! where `G_ij`, `D_ij` are interval sums of `g` and `d`. Each interval is a
//! line in the `(x_g, x_s)` plane and a point in the `(G, D)` plane; the upper
//! envelope of the lines is read off the upper convex hull of the points.

pub mod hull;
mod scan;

pub use hull::{HullOptions, PartialSums};
pub use scan::{
    circular_max_interval, lossy_curve, min_generation_lossy, storage_requirement_lossy,
    storage_requirement_power_capped, LossyCurve, StorageRequirement,
};

use crate::error::{Error, Result};
use crate::profiles::{check_pair, Profile};

/// Largest period accepted by [`partial_sum_hull`].
pub const MAX_PERIOD: usize = 100_000;

/// Relative tolerance used to decide that two candidate intervals tie.
const TIE_TOLERANCE: f64 = 1e-12;

/// A circular run of `len` steps starting at `start` (0-based). `len == 0` is
/// the empty interval and `len == period` the full cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Interval {
    pub start: usize,
    pub len: usize,
}

impl Interval {
    pub const EMPTY: Interval = Interval { start: 0, len: 0 };

    pub fn full(period: usize) -> Self {
        Interval {
            start: 0,
            len: period,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Last step of the interval (inclusive); `None` when empty.
    pub fn end(&self, period: usize) -> Option<usize> {
        (self.len > 0).then(|| (self.start + self.len - 1) % period)
    }

    pub fn contains(&self, t: usize, period: usize) -> bool {
        self.len > 0 && (t + period - self.start) % period < self.len
    }

    pub fn steps(&self, period: usize) -> impl Iterator<Item = usize> {
        let start = self.start;
        (0..self.len).map(move |k| (start + k) % period)
    }
}

/// Interval sums of unit generation and demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialSumPoint {
    pub interval: Interval,
    pub generation: f64,
    pub demand: f64,
}

impl PartialSumPoint {
    pub fn empty() -> Self {
        Self {
            interval: Interval::EMPTY,
            generation: 0.0,
            demand: 0.0,
        }
    }

    /// Shortfall `D - x_g * G` of this interval.
    pub fn shortfall(&self, x_g: f64) -> f64 {
        self.demand - x_g * self.generation
    }
}

/// One linear piece `x_s = intercept - slope * x_g` on `[x_g_lo, x_g_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    /// Unit generation summed over the bottleneck interval.
    pub slope: f64,
    /// Demand summed over the bottleneck interval.
    pub intercept: f64,
    pub x_g_lo: f64,
    pub x_g_hi: f64,
    pub bottleneck: Interval,
}

impl Segment {
    pub fn value(&self, x_g: f64) -> f64 {
        self.intercept - self.slope * x_g
    }
}

/// Piecewise-linear boundary `x_s(x_g)` of the lossless system.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductionFunction {
    /// Pieces in order of increasing `x_g`; slopes strictly decrease.
    pub segments: Vec<Segment>,
    pub x_g_min: f64,
    /// Corner points `(x_g, x_s)`: the domain start, every breakpoint and,
    /// when storage need reaches zero, the point where it does.
    pub vertices: Vec<(f64, f64)>,
    pub period: usize,
    pub step_hours: f64,
    /// Whole-cycle sums, reported when the entire cycle binds.
    pub full_cycle: PartialSumPoint,
    /// Upper hull face in the `(G, D)` plane, from `G = 0` to the first point
    /// of maximal `D`, including the empty interval when it is a vertex.
    pub boundary: Vec<PartialSumPoint>,
}

/// Which interval binds at a given generation capacity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BottleneckReport {
    pub x_g: f64,
    pub interval: Interval,
    pub demand_sum: f64,
    pub generation_sum: f64,
    pub x_s: f64,
    pub length_hours: f64,
}

/// Builds the exact production function from the interval partial sums.
pub fn partial_sum_hull(demand: &Profile, generation: &Profile) -> Result<ProductionFunction> {
    partial_sum_hull_with(demand, generation, &HullOptions::default())
}

pub fn partial_sum_hull_with(
    demand: &Profile,
    generation: &Profile,
    options: &HullOptions,
) -> Result<ProductionFunction> {
    check_pair(demand, generation)?;
    let period = demand.len();
    if period > MAX_PERIOD {
        return Err(Error::Resource(format!(
            "period {period} exceeds the hull limit of {MAX_PERIOD} steps"
        )));
    }
    let sums = PartialSums::new(demand.values(), generation.values());
    let boundary = sums.hull(options);
    Ok(from_boundary(
        boundary,
        sums.full_cycle(),
        period,
        demand.step_hours(),
    ))
}

/// Reads the production function off the hull face for `x_g >= 1`.
///
/// Vertex `k` of the face maximizes `D - x_g G` for `x_g` between the slopes
/// of its right and left edges, so only vertices whose left edge is steeper
/// than 1 contribute.
pub fn from_boundary(
    boundary: Vec<PartialSumPoint>,
    full_cycle: PartialSumPoint,
    period: usize,
    step_hours: f64,
) -> ProductionFunction {
    let x_g_min = 1.0;
    let edge_slope = |k: usize| {
        let (a, b) = (&boundary[k - 1], &boundary[k]);
        (b.demand - a.demand) / (b.generation - a.generation)
    };
    let last_active = (1..boundary.len())
        .take_while(|&k| edge_slope(k) > x_g_min * (1.0 + TIE_TOLERANCE))
        .last()
        .unwrap_or(0);
    let floor_is_vertex = boundary
        .first()
        .is_none_or(|p| p.demand == 0.0 && p.generation == 0.0);

    let mut segments = Vec::new();
    for k in (0..=last_active).rev() {
        if k == 0 && floor_is_vertex {
            break;
        }
        let p = boundary[k];
        segments.push(Segment {
            slope: p.generation,
            intercept: p.demand,
            x_g_lo: if k == last_active {
                x_g_min
            } else {
                edge_slope(k + 1)
            },
            x_g_hi: if k == 0 { f64::INFINITY } else { edge_slope(k) },
            bottleneck: p.interval,
        });
    }

    let mut vertices = vec![(
        x_g_min,
        segments.first().map_or(0.0, |s| s.value(x_g_min).max(0.0)),
    )];
    for k in (1..=last_active).rev() {
        let x = edge_slope(k);
        let x_s = if k == 1 && floor_is_vertex {
            0.0
        } else {
            boundary[k - 1].shortfall(x).max(0.0)
        };
        vertices.push((x, x_s));
    }

    ProductionFunction {
        segments,
        x_g_min,
        vertices,
        period,
        step_hours,
        full_cycle,
        boundary,
    }
}

impl ProductionFunction {
    fn check_domain(&self, x_g: f64) -> Result<()> {
        if x_g.is_nan() || x_g < self.x_g_min {
            return Err(Error::Domain {
                x_g,
                x_g_min: self.x_g_min,
            });
        }
        Ok(())
    }

    /// Required storage at `x_g`.
    pub fn eval(&self, x_g: f64) -> Result<f64> {
        self.check_domain(x_g)?;
        Ok(self
            .segments
            .iter()
            .map(|s| s.value(x_g))
            .fold(0.0, f64::max))
    }

    /// Segment whose range contains `x_g`, if storage is needed there.
    pub fn segment_at(&self, x_g: f64) -> Option<&Segment> {
        self.segments
            .iter()
            .find(|s| x_g >= s.x_g_lo && x_g <= s.x_g_hi)
    }

    /// Binding interval at `x_g`. Ties go to the longer interval, then to the
    /// smaller start. Where no storage is needed the empty interval binds,
    /// except at `x_g = 1` where the full cycle ties and wins.
    pub fn bottleneck_at(&self, x_g: f64) -> Result<BottleneckReport> {
        self.check_domain(x_g)?;
        let candidates = self
            .boundary
            .iter()
            .copied()
            .chain([self.full_cycle, PartialSumPoint::empty()]);
        let best = self.eval(x_g)?;
        let tol = TIE_TOLERANCE * (1.0 + best.abs() + x_g.abs());
        let chosen = candidates
            .filter(|p| (p.shortfall(x_g) - best).abs() <= tol)
            .fold(None::<PartialSumPoint>, |acc, p| match acc {
                None => Some(p),
                Some(q) => {
                    let better = p.interval.len > q.interval.len
                        || (p.interval.len == q.interval.len
                            && p.interval.start < q.interval.start);
                    Some(if better { p } else { q })
                }
            })
            .unwrap_or_else(PartialSumPoint::empty);
        Ok(BottleneckReport {
            x_g,
            interval: chosen.interval,
            demand_sum: chosen.demand,
            generation_sum: chosen.generation,
            x_s: chosen.shortfall(x_g).max(0.0),
            length_hours: chosen.interval.len as f64 * self.step_hours,
        })
    }

    /// Bottleneck reports on an even grid of `n` points over `[lo, hi]`.
    pub fn bottleneck_sweep(&self, lo: f64, hi: f64, n: usize) -> Result<Vec<BottleneckReport>> {
        grid(lo, hi, n)
            .into_iter()
            .map(|x| self.bottleneck_at(x))
            .collect()
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}
