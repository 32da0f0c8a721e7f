//! Upper convex hull of the interval partial-sum points `(G_ij, D_ij)`.
//!
//! Points are streamed row by row: row `i` holds every circular interval
//! starting at step `i`, in order of increasing length. Because profiles are
//! non-negative, `G` is non-decreasing along a row, so each row feeds a
//! monotone-chain builder without sorting. Rows are grouped into fixed-size
//! chunks whose hulls are built in parallel and then merged in chunk order.
//! Chunk boundaries never depend on the worker count, so the result is
//! bit-identical for any thread pool.

use rayon::prelude::*;

use super::{Interval, PartialSumPoint};
use crate::summation::prefix_sums;

/// Rows per parallel work unit.
pub const DEFAULT_CHUNK_ROWS: usize = 32;

/// Relative tolerance of the floating-point orientation test.
pub const ORIENTATION_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullOptions {
    /// Use exact orientation predicates instead of the relative epsilon test.
    pub exact: bool,
    pub chunk_rows: usize,
}

impl Default for HullOptions {
    fn default() -> Self {
        Self {
            exact: false,
            chunk_rows: DEFAULT_CHUNK_ROWS,
        }
    }
}

/// Ordering among points with equal `G`: larger `D`, then the longer interval,
/// then the smaller start index.
fn preferred(p: &PartialSumPoint, q: &PartialSumPoint) -> bool {
    if p.demand != q.demand {
        return p.demand > q.demand;
    }
    if p.interval.len != q.interval.len {
        return p.interval.len > q.interval.len;
    }
    p.interval.start < q.interval.start
}

/// True when `b` lies on or above the line through `o` and `a` (a left turn
/// or collinear when walking left to right), meaning `a` is not a strict
/// upper-hull vertex.
fn not_right_turn(
    o: &PartialSumPoint,
    a: &PartialSumPoint,
    b: &PartialSumPoint,
    exact: bool,
) -> bool {
    if exact {
        let det = robust::orient2d(
            robust::Coord {
                x: o.generation,
                y: o.demand,
            },
            robust::Coord {
                x: a.generation,
                y: a.demand,
            },
            robust::Coord {
                x: b.generation,
                y: b.demand,
            },
        );
        return det >= 0.0;
    }
    let lhs = (a.generation - o.generation) * (b.demand - o.demand);
    let rhs = (a.demand - o.demand) * (b.generation - o.generation);
    lhs - rhs >= -ORIENTATION_EPS * (lhs.abs() + rhs.abs())
}

/// Monotone-chain upper hull over points pushed in non-decreasing `G`.
#[derive(Debug, Clone, Default)]
pub struct UpperHull {
    points: Vec<PartialSumPoint>,
    exact: bool,
}

impl UpperHull {
    pub fn new(exact: bool) -> Self {
        Self {
            points: Vec::new(),
            exact,
        }
    }

    pub fn push(&mut self, p: PartialSumPoint) {
        if let Some(top) = self.points.last() {
            debug_assert!(p.generation >= top.generation, "points out of order");
            if top.generation == p.generation {
                if preferred(&p, top) {
                    self.points.pop();
                } else {
                    return;
                }
            }
        }
        while self.points.len() >= 2 {
            let n = self.points.len();
            if not_right_turn(&self.points[n - 2], &self.points[n - 1], &p, self.exact) {
                self.points.pop();
            } else {
                break;
            }
        }
        self.points.push(p);
    }

    /// Drops the descending tail, keeping the face from the leftmost point up
    /// to the first point of maximal `D`.
    pub fn finish(mut self) -> Vec<PartialSumPoint> {
        while self.points.len() >= 2 {
            let n = self.points.len();
            if self.points[n - 1].demand <= self.points[n - 2].demand {
                self.points.pop();
            } else {
                break;
            }
        }
        self.points
    }
}

/// Hull of the union of two hull faces. Associative and commutative for exact
/// predicates.
pub fn merge(a: &[PartialSumPoint], b: &[PartialSumPoint], exact: bool) -> Vec<PartialSumPoint> {
    let mut hull = UpperHull::new(exact);
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => {
                p.generation < q.generation || (p.generation == q.generation && preferred(p, q))
            }
            (Some(_), None) => true,
            _ => false,
        };
        if take_a {
            hull.push(a[i]);
            i += 1;
        } else {
            hull.push(b[j]);
            j += 1;
        }
    }
    hull.finish()
}

/// Prefix sums of a demand/generation pair, shared by every row.
pub struct PartialSums {
    generation: Vec<f64>,
    demand: Vec<f64>,
}

impl PartialSums {
    pub fn new(demand: &[f64], generation: &[f64]) -> Self {
        assert_eq!(demand.len(), generation.len());
        Self {
            generation: prefix_sums(generation),
            demand: prefix_sums(demand),
        }
    }

    pub fn period(&self) -> usize {
        self.generation.len() - 1
    }

    /// Sums over the circular interval. Wrapped intervals are the total minus
    /// the complementary prefix gap.
    pub fn point(&self, interval: Interval) -> PartialSumPoint {
        let period = self.period();
        let (g, d) = (&self.generation, &self.demand);
        let start = interval.start;
        let end = start + interval.len;
        let (generation, demand) = if end <= period {
            (g[end] - g[start], d[end] - d[start])
        } else {
            (
                (g[period] - g[start]) + g[end - period],
                (d[period] - d[start]) + d[end - period],
            )
        };
        PartialSumPoint {
            interval,
            generation,
            demand,
        }
    }

    pub fn full_cycle(&self) -> PartialSumPoint {
        self.point(Interval::full(self.period()))
    }

    fn row(&self, start: usize, exact: bool) -> Vec<PartialSumPoint> {
        let period = self.period();
        let max_len = if start == 0 { period } else { period - 1 };
        let mut hull = UpperHull::new(exact);
        for len in 1..=max_len {
            hull.push(self.point(Interval { start, len }));
        }
        hull.finish()
    }

    /// Hull of the rows `chunk * chunk_rows ..`.
    pub fn chunk_hull(&self, chunk: usize, options: &HullOptions) -> Vec<PartialSumPoint> {
        let period = self.period();
        let lo = chunk * options.chunk_rows;
        let hi = (lo + options.chunk_rows).min(period);
        let mut acc: Vec<PartialSumPoint> = Vec::new();
        for start in lo..hi {
            let row = self.row(start, options.exact);
            acc = merge(&acc, &row, options.exact);
        }
        acc
    }

    pub fn chunk_count(&self, options: &HullOptions) -> usize {
        self.period().div_ceil(options.chunk_rows.max(1))
    }

    /// Per-chunk hulls, in chunk order.
    pub fn chunk_hulls(&self, options: &HullOptions) -> Vec<Vec<PartialSumPoint>> {
        let options = HullOptions {
            chunk_rows: options.chunk_rows.max(1),
            ..*options
        };
        (0..self.chunk_count(&options))
            .into_par_iter()
            .map(|c| self.chunk_hull(c, &options))
            .collect()
    }

    /// Upper hull face of all interval points plus the empty interval.
    pub fn hull(&self, options: &HullOptions) -> Vec<PartialSumPoint> {
        let floor = vec![PartialSumPoint::empty()];
        self.chunk_hulls(options)
            .iter()
            .fold(floor, |acc, h| merge(&acc, h, options.exact))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(start: usize, len: usize, g: f64, d: f64) -> PartialSumPoint {
        PartialSumPoint {
            interval: Interval { start, len },
            generation: g,
            demand: d,
        }
    }

    #[test]
    fn drops_interior_and_collinear_points() {
        let mut h = UpperHull::new(false);
        for p in [
            pt(0, 1, 0.0, 0.0),
            pt(0, 2, 1.0, 0.5),
            pt(0, 3, 2.0, 2.0),
            pt(0, 4, 3.0, 3.0),
            pt(0, 5, 4.0, 4.0),
        ] {
            h.push(p);
        }
        let out = h.finish();
        let coords: Vec<(f64, f64)> = out.iter().map(|p| (p.generation, p.demand)).collect();
        assert_eq!(coords, vec![(0.0, 0.0), (4.0, 4.0)]);
    }

    #[test]
    fn equal_points_prefer_longer_then_earlier() {
        let mut h = UpperHull::new(true);
        h.push(pt(3, 1, 0.0, 0.5));
        h.push(pt(2, 2, 0.0, 0.5));
        h.push(pt(1, 2, 0.0, 0.5));
        let out = h.finish();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].interval, Interval { start: 1, len: 2 });
    }

    #[test]
    fn descending_tail_is_trimmed() {
        let mut h = UpperHull::new(false);
        for p in [pt(0, 1, 0.0, 0.1), pt(0, 2, 0.5, 0.8), pt(0, 3, 1.0, 0.6)] {
            h.push(p);
        }
        assert_eq!(h.finish().len(), 2);
    }

    #[test]
    fn merge_is_order_independent() {
        let a = vec![pt(0, 1, 0.0, 0.2), pt(0, 2, 0.5, 0.7), pt(0, 3, 1.0, 1.0)];
        let b = vec![pt(1, 1, 0.1, 0.4), pt(1, 2, 0.6, 0.9)];
        assert_eq!(merge(&a, &b, true), merge(&b, &a, true));
    }
}
