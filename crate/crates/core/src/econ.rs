//! Levelized cost algebra and the cost function of a production function.
//!
//! Storage cost `c_s` is the annualized fixed cost per unit of energy
//! capacity. It is not divided by the energy the storage discharges, which is
//! what keeps the total cost `c_g * x_g + c_s * x_s` linear in the capacities.

use crate::envelope::ProductionFunction;
use crate::error::{Error, Result};
use crate::tech::TechCosts;

const SHARE_TOLERANCE: f64 = 1e-9;

/// Cost and usage data of one technology.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Financials {
    pub capital_cost: f64,
    /// Fixed operating cost per period.
    pub fixed_cost: f64,
    /// Variable cost per unit of energy.
    pub variable_cost: f64,
    pub discount_rate: f64,
    /// Usage period in periods (years).
    pub lifetime: f64,
    pub capacity_factor: f64,
    pub hours_per_period: f64,
}

impl Default for Financials {
    fn default() -> Self {
        Self {
            capital_cost: 0.0,
            fixed_cost: 0.0,
            variable_cost: 0.0,
            discount_rate: 0.0,
            lifetime: 1.0,
            capacity_factor: 1.0,
            hours_per_period: 8760.0,
        }
    }
}

impl Financials {
    pub fn validate(&self) -> Result<()> {
        let problem = if !(self.discount_rate >= 0.0) {
            Some("discount rate must be non-negative")
        } else if !(self.lifetime >= 1.0) {
            Some("lifetime must be at least one period")
        } else if !(self.capacity_factor > 0.0 && self.capacity_factor <= 1.0) {
            Some("capacity factor must lie in (0, 1]")
        } else if !(self.hours_per_period > 0.0) {
            Some("hours per period must be positive")
        } else {
            None
        };
        match problem {
            Some(p) => Err(Error::Validation(p.into())),
            None => Ok(()),
        }
    }
}

/// Uniform series present worth factor: the present value of one unit paid at
/// the end of each of `lifetime` periods.
pub fn present_value_factor(rate: f64, lifetime: f64) -> f64 {
    if rate == 0.0 {
        return lifetime;
    }
    let growth = (1.0 + rate).powf(lifetime);
    (growth - 1.0) / (rate * growth)
}

/// Cost per unit of energy over the lifetime.
pub fn single_lcoe(fin: &Financials) -> Result<f64> {
    fin.validate()?;
    let annual =
        fin.capital_cost / present_value_factor(fin.discount_rate, fin.lifetime) + fin.fixed_cost;
    Ok(annual / (fin.capacity_factor * fin.hours_per_period) + fin.variable_cost)
}

/// Share-weighted LCOE of a generation mix.
pub fn module_lcoe(lcoes: &[f64], shares: &[f64]) -> Result<f64> {
    if lcoes.len() != shares.len() || lcoes.is_empty() {
        return Err(Error::Validation(format!(
            "need one share per LCOE, got {} LCOEs and {} shares",
            lcoes.len(),
            shares.len()
        )));
    }
    if shares.iter().any(|b| !(*b >= 0.0)) {
        return Err(Error::Validation("shares must be non-negative".into()));
    }
    let total: f64 = shares.iter().sum();
    if (total - 1.0).abs() > SHARE_TOLERANCE {
        return Err(Error::Validation(format!("shares sum to {total}, not 1")));
    }
    Ok(lcoes.iter().zip(shares).map(|(l, b)| l * b).sum())
}

/// System cost per unit of demand.
pub fn total_lcoe(costs: &TechCosts, x_g: f64, x_s: f64) -> f64 {
    costs.generation * x_g + costs.storage * x_s
}

/// Range of cost ratios `c_g / c_s` for which a vertex is optimal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub ratio_lo: f64,
    pub ratio_hi: f64,
    pub x_g: f64,
    pub x_s: f64,
}

/// Optimal capacities as a function of the cost ratio. Regions follow the
/// production function vertices in order of increasing `x_g`, so ratios
/// decrease along the list.
#[derive(Debug, Clone, PartialEq)]
pub struct CostFunction {
    pub regions: Vec<Region>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub vertex: usize,
    pub x_g: f64,
    pub x_s: f64,
    pub lcoe: f64,
}

/// Vertex `k` sits between the segments of slope `a_k` (left) and `a_{k+1}`
/// (right) and is optimal for ratios in `[a_{k+1}, a_k]`.
pub fn legendre(pf: &ProductionFunction) -> CostFunction {
    let slopes: Vec<f64> = pf.segments.iter().map(|s| s.slope).collect();
    let regions = pf
        .vertices
        .iter()
        .enumerate()
        .map(|(k, &(x_g, x_s))| Region {
            ratio_lo: slopes.get(k).copied().unwrap_or(0.0),
            ratio_hi: if k == 0 { f64::INFINITY } else { slopes[k - 1] },
            x_g,
            x_s,
        })
        .collect();
    CostFunction { regions }
}

fn ratio(c_g: f64, c_s: f64) -> f64 {
    if c_s == 0.0 {
        f64::INFINITY
    } else {
        c_g / c_s
    }
}

impl CostFunction {
    /// Index of the optimal region; boundary ratios go to the smaller `x_g`.
    pub fn region_index(&self, ratio: f64) -> usize {
        self.regions
            .iter()
            .position(|r| ratio >= r.ratio_lo)
            .unwrap_or(self.regions.len() - 1)
    }

    pub fn optimal_capacity(&self, c_g: f64, c_s: f64) -> Result<Optimum> {
        for (name, v) in [("generation", c_g), ("storage", c_s)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!(
                    "{name} cost must be finite and non-negative, got {v}"
                )));
            }
        }
        let k = self.region_index(ratio(c_g, c_s));
        let r = self.regions[k];
        Ok(Optimum {
            vertex: k,
            x_g: r.x_g,
            x_s: r.x_s,
            lcoe: c_g * r.x_g + c_s * r.x_s,
        })
    }

    /// Cost pairs `(c_g, c_s)` whose minimum total cost equals `lcoe`.
    pub fn contour(&self, lcoe: f64) -> Contour {
        let pieces = self
            .regions
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let at = |rho: f64| {
                    if rho.is_infinite() {
                        (lcoe / r.x_g, 0.0)
                    } else {
                        let c_s = lcoe / (rho * r.x_g + r.x_s);
                        (rho * c_s, c_s)
                    }
                };
                if r.x_s > 0.0 {
                    ContourPiece::Segment {
                        vertex: k,
                        from: at(r.ratio_hi),
                        to: at(r.ratio_lo),
                    }
                } else {
                    let c_g = lcoe / r.x_g;
                    ContourPiece::Ray {
                        vertex: k,
                        c_g,
                        c_s_from: if r.ratio_hi.is_infinite() {
                            0.0
                        } else {
                            c_g / r.ratio_hi
                        },
                    }
                }
            })
            .collect();
        Contour { lcoe, pieces }
    }
}

/// Exact piecewise-linear description of a level set in the `(c_g, c_s)` plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub lcoe: f64,
    pub pieces: Vec<ContourPiece>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourPiece {
    /// Line segment, endpoints ordered by increasing `c_s`.
    Segment {
        vertex: usize,
        from: (f64, f64),
        to: (f64, f64),
    },
    /// Vertical ray `c_g = const` for all `c_s >= c_s_from`.
    Ray {
        vertex: usize,
        c_g: f64,
        c_s_from: f64,
    },
}

impl Contour {
    /// Polyline through the piece endpoints, with the ray cut at `c_s_max`.
    pub fn polyline(&self, c_s_max: f64) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut push = |p: (f64, f64)| {
            if out.last() != Some(&p) {
                out.push(p);
            }
        };
        for piece in &self.pieces {
            match *piece {
                ContourPiece::Segment { from, to, .. } => {
                    push(from);
                    push(to);
                }
                ContourPiece::Ray { c_g, c_s_from, .. } => {
                    push((c_g, c_s_from));
                    push((c_g, c_s_max.max(c_s_from)));
                }
            }
        }
        out
    }

    /// `n` points per piece, evenly spaced along each piece.
    pub fn sample(&self, n: usize, c_s_max: f64) -> Vec<(f64, f64)> {
        let n = n.max(2);
        let mut out = Vec::new();
        for piece in &self.pieces {
            let (a, b) = match *piece {
                ContourPiece::Segment { from, to, .. } => (from, to),
                ContourPiece::Ray { c_g, c_s_from, .. } => {
                    ((c_g, c_s_from), (c_g, c_s_max.max(c_s_from)))
                }
            };
            for k in 0..n {
                let w = k as f64 / (n - 1) as f64;
                out.push((a.0 + w * (b.0 - a.0), a.1 + w * (b.1 - a.1)));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::partial_sum_hull;
    use crate::profiles::{Profile, ProfileKind};

    fn example_cf() -> CostFunction {
        let d = Profile::from_normalized(vec![0.25; 4], ProfileKind::Demand, "d").unwrap();
        let g = Profile::from_normalized(vec![0.1, 0.4, 0.1, 0.4], ProfileKind::Generation, "g")
            .unwrap();
        legendre(&partial_sum_hull(&d, &g).unwrap())
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn present_value() {
        assert_eq!(present_value_factor(0.0, 10.0), 10.0);
        assert!(close(present_value_factor(0.2, 5.0), 2.990612, 1e-6));
        assert!(close(present_value_factor(0.2, 10.0), 4.192472, 1e-6));
    }

    #[test]
    fn single() {
        let pure = Financials {
            variable_cost: 5.0,
            ..Default::default()
        };
        assert_eq!(single_lcoe(&pure).unwrap(), 5.0);
        let f = Financials {
            capital_cost: 876.0,
            lifetime: 10.0,
            capacity_factor: 0.5,
            ..Default::default()
        };
        assert!(close(single_lcoe(&f).unwrap(), 0.02, 1e-15));
        let f = Financials {
            capital_cost: 299.06,
            discount_rate: 0.2,
            lifetime: 5.0,
            ..Default::default()
        };
        assert!(close(single_lcoe(&f).unwrap(), 0.011416, 1e-6));
        let bad = Financials {
            capacity_factor: 0.0,
            ..Default::default()
        };
        assert!(single_lcoe(&bad).is_err());
    }

    #[test]
    fn module() {
        assert_eq!(module_lcoe(&[7.0], &[1.0]).unwrap(), 7.0);
        assert_eq!(module_lcoe(&[4.0, 10.0], &[0.5, 0.5]).unwrap(), 7.0);
        assert!(close(
            module_lcoe(&[4.7, 6.1], &[0.3, 0.7]).unwrap(),
            5.68,
            1e-12
        ));
        assert!(module_lcoe(&[4.0, 10.0], &[0.5, 0.6]).is_err());
    }

    #[test]
    fn total() {
        assert_eq!(total_lcoe(&TechCosts::simple(4.0, 100.0), 1.0, 0.0), 4.0);
        assert_eq!(total_lcoe(&TechCosts::simple(1.0, 20.0), 2.5, 0.0), 2.5);
        assert!(close(
            total_lcoe(&TechCosts::simple(1.0, 5.0), 1.0, 0.15),
            1.75,
            1e-12
        ));
    }

    #[test]
    fn regions_partition() {
        let cf = example_cf();
        assert_eq!(cf.regions.len(), 2);
        assert_eq!(cf.regions[0].ratio_hi, f64::INFINITY);
        assert_eq!(cf.regions[0].ratio_lo, cf.regions[1].ratio_hi);
        assert_eq!(cf.regions[1].ratio_lo, 0.0);
    }

    #[test]
    fn vertex_selection() {
        let cf = example_cf();
        let r = cf.region_index(0.2);
        assert_eq!(r, 0);
        assert_eq!(cf.region_index(0.05), 1);
        let slope = cf.regions[0].ratio_lo;
        assert_eq!(cf.region_index(slope), 0);
        let o = cf.optimal_capacity(1.0, 20.0).unwrap();
        assert!(close(o.x_g, 2.5, 1e-12) && o.x_s == 0.0 && close(o.lcoe, 2.5, 1e-12));
        let o = cf.optimal_capacity(1.0, 5.0).unwrap();
        assert!(close(o.x_g, 1.0, 0.0) && close(o.x_s, 0.15, 1e-12) && close(o.lcoe, 1.75, 1e-12));
        let o3 = cf.optimal_capacity(3.0, 15.0).unwrap();
        assert_eq!(o3.vertex, o.vertex);
        assert!(close(o3.lcoe, 3.0 * o.lcoe, 1e-12));
    }

    #[test]
    fn contour_through_known_point() {
        let c = example_cf().contour(2.5);
        match c.pieces[1] {
            ContourPiece::Ray { c_g, c_s_from, .. } => {
                assert!(close(c_g, 1.0, 1e-12));
                assert!(c_s_from <= 20.0);
            }
            other => panic!("expected ray, got {other:?}"),
        }
        let big = example_cf().contour(10.0);
        for (p, q) in c.polyline(100.0).iter().zip(big.polyline(400.0)) {
            assert!(close(4.0 * p.0, q.0, 1e-12) && close(4.0 * p.1, q.1, 1e-12));
        }
    }

    #[test]
    fn storage_free_contour() {
        let v = vec![0.1, 0.2, 0.3, 0.4];
        let d = Profile::from_normalized(v.clone(), ProfileKind::Demand, "d").unwrap();
        let g = Profile::from_normalized(v, ProfileKind::Generation, "g").unwrap();
        let cf = legendre(&partial_sum_hull(&d, &g).unwrap());
        let c = cf.contour(7.0);
        assert_eq!(
            c.pieces,
            vec![ContourPiece::Ray {
                vertex: 0,
                c_g: 7.0,
                c_s_from: 0.0
            }]
        );
    }
}
