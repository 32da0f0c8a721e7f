//! Capacity-expansion linear programs over a periodic profile.
//!
//! Columns are ordered capacities first, then for each step `t` its flows
//! followed by its storage states. Rows are time-major: all rows of step 0,
//! then step 1, and so on, followed by any rows added with [`LpModel::fix`].
//! Storage states are periodic, so step 0 draws on the state after step
//! `T - 1`.
//!
//! Variants and per-step layout:
//!
//! | variant        | capacities                              | flows              | states   | rows |
//! |----------------|-----------------------------------------|--------------------|----------|------|
//! | `simplest`     | x_g, x_s                                | x1 x2 x3           | s        | 4    |
//! | `lossy`        | x_g, x_s                                | x1 x2 x3           | s        | 4    |
//! | `power-capped` | x_g, x_s, x_p                           | x1 x2 x3           | s        | 6    |
//! | `two-storage`  | x_g, x_s, x_p, x_2s, x_2p_in, x_2p_out  | x1 x2 x3 x4 x5 x6  | s1 s2    | 10   |
//!
//! `x1` serves demand from generation, `x2` charges the first storage, `x3`
//! discharges it to demand; `x4`/`x5` charge and discharge the second
//! storage and `x6` moves energy from the first storage to the second.
//! Power capacity costs are per unit of power, so they are divided by the
//! step length in hours to price per-step energy flows.

mod diagnostics;
mod reduce;
pub mod simplex;

use std::fmt;
use std::str::FromStr;

pub use diagnostics::{diagnostics, Diagnostics, Sensitivity};
pub use reduce::{reduce_to_2var, ReducedLp, ReducedSolution};

use crate::error::{Error, Result};
use crate::profiles::{check_pair, Profile};
use crate::tech::{StorageTech, TechCosts};

/// Tolerance of the primal feasibility re-check.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

impl FromStr for Sense {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "<=" => Ok(Sense::Le),
            "=" => Ok(Sense::Eq),
            ">=" => Ok(Sense::Ge),
            other => Err(Error::Validation(format!("unknown row sense `{other}`"))),
        }
    }
}

/// Sparse constraint row `sum(a_j x_j) <sense> rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Simplest,
    Lossy,
    PowerCapped,
    TwoStorage,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Simplest,
        Variant::Lossy,
        Variant::PowerCapped,
        Variant::TwoStorage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Simplest => "simplest",
            Variant::Lossy => "lossy",
            Variant::PowerCapped => "power-capped",
            Variant::TwoStorage => "two-storage",
        }
    }

    pub fn capacities(self) -> &'static [Capacity] {
        use Capacity::*;
        match self {
            Variant::Simplest | Variant::Lossy => &[Generation, Energy],
            Variant::PowerCapped => &[Generation, Energy, Power],
            Variant::TwoStorage => &[
                Generation,
                Energy,
                Power,
                SecondEnergy,
                SecondPowerIn,
                SecondPowerOut,
            ],
        }
    }

    fn flows_per_step(self) -> usize {
        if self == Variant::TwoStorage {
            6
        } else {
            3
        }
    }

    fn states_per_step(self) -> usize {
        if self == Variant::TwoStorage {
            2
        } else {
            1
        }
    }

    fn rows_per_step(self) -> usize {
        match self {
            Variant::Simplest | Variant::Lossy => 4,
            Variant::PowerCapped => 6,
            Variant::TwoStorage => 10,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                Error::Validation(format!(
                    "unknown variant `{s}` (expected simplest, lossy, power-capped or two-storage)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Capacity {
    Generation,
    /// Energy capacity of the (first) storage.
    Energy,
    /// Power capacity of the first storage, shared by charge and discharge.
    Power,
    SecondEnergy,
    SecondPowerIn,
    SecondPowerOut,
}

impl Capacity {
    pub const ALL: [Capacity; 6] = [
        Capacity::Generation,
        Capacity::Energy,
        Capacity::Power,
        Capacity::SecondEnergy,
        Capacity::SecondPowerIn,
        Capacity::SecondPowerOut,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Capacity::Generation => "x_g",
            Capacity::Energy => "x_s",
            Capacity::Power => "x_p",
            Capacity::SecondEnergy => "x_2s",
            Capacity::SecondPowerIn => "x_2p_in",
            Capacity::SecondPowerOut => "x_2p_out",
        }
    }

    pub fn is_energy(self) -> bool {
        matches!(self, Capacity::Energy | Capacity::SecondEnergy)
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Capacity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Capacity::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown capacity `{s}`")))
    }
}

/// Which storages a two-storage model may build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StorageOption {
    Both,
    FirstOnly,
    SecondOnly,
}

impl StorageOption {
    pub const ALL: [StorageOption; 3] = [
        StorageOption::Both,
        StorageOption::FirstOnly,
        StorageOption::SecondOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StorageOption::Both => "ST1&ST2",
            StorageOption::FirstOnly => "ST1",
            StorageOption::SecondOnly => "ST2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    pub variant: Variant,
    pub period: usize,
    pub step_hours: f64,
    pub demand: Vec<f64>,
    pub generation: Vec<f64>,
    pub costs: TechCosts,
    /// Storage technologies in model order; empty for `simplest`.
    pub techs: Vec<StorageTech>,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    /// Capacities pinned by [`LpModel::fix`].
    pub fixed: Vec<(Capacity, f64)>,
}

impl LpModel {
    /// Builds the model from normalized profiles.
    pub fn build(
        variant: Variant,
        demand: &Profile,
        generation: &Profile,
        costs: &TechCosts,
        techs: &[StorageTech],
    ) -> Result<Self> {
        check_pair(demand, generation)?;
        Self::from_series(
            variant,
            demand.values(),
            generation.values(),
            demand.step_hours(),
            costs,
            techs,
        )
    }

    /// Builds the model from raw series. Demand may be identically zero.
    pub fn from_series(
        variant: Variant,
        demand: &[f64],
        generation: &[f64],
        step_hours: f64,
        costs: &TechCosts,
        techs: &[StorageTech],
    ) -> Result<Self> {
        let period = demand.len();
        if period < 2 || generation.len() != period {
            return Err(Error::Validation(format!(
                "need equal series of at least 2 steps, got {} and {}",
                period,
                generation.len()
            )));
        }
        if demand
            .iter()
            .chain(generation)
            .any(|v| !(*v >= 0.0 && v.is_finite()))
        {
            return Err(Error::Validation(
                "series must be finite and non-negative".into(),
            ));
        }
        if !(step_hours > 0.0) {
            return Err(Error::Validation(format!(
                "step length must be positive, got {step_hours}"
            )));
        }
        costs.validate()?;
        let needed = match variant {
            Variant::Simplest => 0,
            Variant::Lossy | Variant::PowerCapped => 1,
            Variant::TwoStorage => 2,
        };
        if techs.len() < needed {
            return Err(Error::Validation(format!(
                "{variant} model needs {needed} storage technologies, got {}",
                techs.len()
            )));
        }
        let techs: Vec<StorageTech> = techs[..needed].to_vec();
        for t in &techs {
            t.validate()?;
        }
        let power = |name: &str| {
            costs.storage_power.ok_or_else(|| {
                Error::Validation(format!("{name} model needs a storage power cost"))
            })
        };

        let caps = variant.capacities();
        let mut objective =
            vec![0.0; caps.len() + period * (variant.flows_per_step() + variant.states_per_step())];
        objective[0] = costs.generation;
        objective[1] = costs.storage;
        match variant {
            Variant::Simplest | Variant::Lossy => {}
            Variant::PowerCapped => objective[2] = power("power-capped")? / step_hours,
            Variant::TwoStorage => {
                let second = costs.second.ok_or_else(|| {
                    Error::Validation("two-storage model needs second storage costs".into())
                })?;
                objective[2] = power("two-storage")? / step_hours;
                objective[3] = second.energy;
                objective[4] = second.power_in / step_hours;
                objective[5] = second.power_out / step_hours;
            }
        }

        let mut model = LpModel {
            variant,
            period,
            step_hours,
            demand: demand.to_vec(),
            generation: generation.to_vec(),
            costs: *costs,
            techs,
            objective,
            rows: Vec::with_capacity(period * variant.rows_per_step()),
            fixed: Vec::new(),
        };
        for t in 0..period {
            model.push_step_rows(t);
        }
        Ok(model)
    }

    /// Two-storage model restricted to one storage option by fixing the other
    /// storage's capacities to zero.
    pub fn two_storage_option(
        demand: &Profile,
        generation: &Profile,
        costs: &TechCosts,
        techs: &[StorageTech],
        option: StorageOption,
    ) -> Result<Self> {
        let mut model = Self::build(Variant::TwoStorage, demand, generation, costs, techs)?;
        let zero: &[Capacity] = match option {
            StorageOption::Both => &[],
            StorageOption::FirstOnly => &[
                Capacity::SecondEnergy,
                Capacity::SecondPowerIn,
                Capacity::SecondPowerOut,
            ],
            StorageOption::SecondOnly => &[Capacity::Energy, Capacity::Power],
        };
        for &c in zero {
            model.fix(c, 0.0)?;
        }
        Ok(model)
    }

    fn push_step_rows(&mut self, t: usize) {
        use Sense::*;
        let prev = (t + self.period - 1) % self.period;
        let (g, d) = (self.generation[t], self.demand[t]);
        let f = |k: usize| self.flow_column(t, k);
        let s = |k: usize| self.state_column(t, k);
        let sp = |k: usize| self.state_column(prev, k);
        let row = |coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64| Row { coeffs, sense, rhs };
        let rows = match self.variant {
            Variant::Simplest | Variant::Lossy | Variant::PowerCapped => {
                let tech = self.techs.first().copied().unwrap_or(StorageTech::LOSSLESS);
                let (ec, ed) = (tech.charge, tech.discharge);
                let mut rows = vec![
                    row(vec![(f(0), 1.0), (f(1), 1.0), (0, -g)], Le, 0.0),
                    row(vec![(f(0), 1.0), (f(2), 1.0)], Eq, d),
                    row(
                        vec![(f(1), ec), (f(2), -ed), (sp(0), 1.0), (s(0), -1.0)],
                        Eq,
                        0.0,
                    ),
                    row(vec![(s(0), 1.0), (1, -1.0)], Le, 0.0),
                ];
                if self.variant == Variant::PowerCapped {
                    rows.push(row(vec![(f(1), 1.0), (2, -1.0)], Le, 0.0));
                    rows.push(row(vec![(f(2), ed), (2, -1.0)], Le, 0.0));
                }
                rows
            }
            Variant::TwoStorage => {
                let (t1, t2) = (self.techs[0], self.techs[1]);
                vec![
                    row(
                        vec![(f(0), 1.0), (f(1), 1.0), (f(3), 1.0), (0, -g)],
                        Le,
                        0.0,
                    ),
                    row(vec![(f(0), 1.0), (f(2), 1.0), (f(4), 1.0)], Ge, d),
                    row(
                        vec![
                            (f(1), t1.charge),
                            (f(2), -t1.discharge),
                            (f(5), -t1.discharge),
                            (sp(0), 1.0),
                            (s(0), -1.0),
                        ],
                        Eq,
                        0.0,
                    ),
                    row(
                        vec![
                            (f(3), t2.charge),
                            (f(5), t2.charge),
                            (f(4), -t2.discharge),
                            (sp(1), 1.0),
                            (s(1), -1.0),
                        ],
                        Eq,
                        0.0,
                    ),
                    row(vec![(s(0), 1.0), (1, -1.0)], Le, 0.0),
                    row(vec![(s(1), 1.0), (3, -1.0)], Le, 0.0),
                    row(vec![(f(1), 1.0), (2, -1.0)], Le, 0.0),
                    row(
                        vec![(f(2), t1.discharge), (f(5), t1.discharge), (2, -1.0)],
                        Le,
                        0.0,
                    ),
                    row(vec![(f(3), 1.0), (f(5), 1.0), (4, -1.0)], Le, 0.0),
                    row(vec![(f(4), t2.discharge), (5, -1.0)], Le, 0.0),
                ]
            }
        };
        self.rows.extend(rows);
    }

    pub fn capacities(&self) -> &'static [Capacity] {
        self.variant.capacities()
    }

    pub fn capacity_column(&self, capacity: Capacity) -> Option<usize> {
        self.capacities().iter().position(|&c| c == capacity)
    }

    fn step_width(&self) -> usize {
        self.variant.flows_per_step() + self.variant.states_per_step()
    }

    pub fn flows_per_step(&self) -> usize {
        self.variant.flows_per_step()
    }

    pub fn states_per_step(&self) -> usize {
        self.variant.states_per_step()
    }

    /// Column of flow `k` (0-based: `x1` is 0) at step `t`.
    pub fn flow_column(&self, t: usize, k: usize) -> usize {
        self.capacities().len() + t * self.step_width() + k
    }

    /// Column of the state of storage `k` after step `t`.
    pub fn state_column(&self, t: usize, k: usize) -> usize {
        self.flow_column(t, self.variant.flows_per_step() + k)
    }

    pub fn num_variables(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    /// Pins a capacity with an equality row.
    pub fn fix(&mut self, capacity: Capacity, value: f64) -> Result<()> {
        let col = self.capacity_column(capacity).ok_or_else(|| {
            Error::Validation(format!("{} model has no capacity {capacity}", self.variant))
        })?;
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::Validation(format!(
                "fixed capacity must be finite and non-negative, got {value}"
            )));
        }
        self.rows.push(Row {
            coeffs: vec![(col, 1.0)],
            sense: Sense::Eq,
            rhs: value,
        });
        self.fixed.push((capacity, value));
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// Largest scaled constraint violation of `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        simplex::violation(x, &self.rows)
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let outcome = simplex::solve(&self.objective, &self.rows)?;
        let (status, x, duals) = match outcome {
            simplex::Outcome::Optimal { x, duals, .. } => (Status::Optimal, x, duals),
            simplex::Outcome::Infeasible => (Status::Infeasible, Vec::new(), Vec::new()),
            simplex::Outcome::Unbounded => (Status::Unbounded, Vec::new(), Vec::new()),
        };
        if status == Status::Optimal {
            let v = self.violation(&x);
            if v > FEASIBILITY_TOLERANCE {
                return Err(Error::Solver(format!(
                    "solution violates the model by {v:.3e}"
                )));
            }
        }
        let objective = if status == Status::Optimal {
            self.objective_value(&x)
        } else {
            f64::NAN
        };
        Ok(LpSolution {
            variant: self.variant,
            status,
            objective,
            x,
            duals,
            period: self.period,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
        }
    }
}

impl FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimal" => Ok(Status::Optimal),
            "infeasible" => Ok(Status::Infeasible),
            "unbounded" => Ok(Status::Unbounded),
            other => Err(Error::Validation(format!("unknown status `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub variant: Variant,
    pub status: Status,
    /// Total cost per unit of demand; NaN unless optimal.
    pub objective: f64,
    /// Values of all columns; empty unless optimal.
    pub x: Vec<f64>,
    /// Row multipliers; empty unless optimal.
    pub duals: Vec<f64>,
    pub period: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    fn column(&self, t: usize, k: usize) -> f64 {
        let caps = self.variant.capacities().len();
        let width = self.variant.flows_per_step() + self.variant.states_per_step();
        self.x[caps + t * width + k]
    }

    pub fn capacity(&self, capacity: Capacity) -> Option<f64> {
        let col = self
            .variant
            .capacities()
            .iter()
            .position(|&c| c == capacity)?;
        self.x.get(col).copied()
    }

    pub fn capacities(&self) -> Vec<(Capacity, f64)> {
        self.variant
            .capacities()
            .iter()
            .filter_map(|&c| Some((c, self.capacity(c)?)))
            .collect()
    }

    /// Flow `k` at step `t`.
    pub fn flow(&self, t: usize, k: usize) -> f64 {
        self.column(t, k)
    }

    /// State of charge of storage `k` after each step.
    pub fn state_of_charge(&self, k: usize) -> Vec<f64> {
        let flows = self.variant.flows_per_step();
        (0..self.period)
            .map(|t| self.column(t, flows + k))
            .collect()
    }
}
