//! Demand and generation profiles.
//!
//! Every profile is normalized so that its values sum to one over the cycle.
//! With both demand and unit generation normalized, generation capacity `x_g`
//! is the ratio of annual generation to annual demand and storage capacity
//! `x_s` is a fraction of annual demand. Profiles are periodic: index
//! arithmetic wraps modulo the period length.

mod io;
mod synth;

pub use io::{export, ingest_csv, ingest_occto, write_profiles};
pub use synth::{synth, Pattern, SynthParams};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Tolerance on the unit-sum invariant.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    Demand,
    Generation,
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileKind::Demand => f.write_str("demand"),
            ProfileKind::Generation => f.write_str("generation"),
        }
    }
}

/// A normalized periodic series. Immutable once built; clones share storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    values: Arc<[f64]>,
    kind: ProfileKind,
    label: String,
    step_hours: f64,
}

impl Profile {
    /// Wraps values that are already normalized, checking every invariant.
    pub fn from_normalized(
        values: Vec<f64>,
        kind: ProfileKind,
        label: impl Into<String>,
    ) -> Result<Self> {
        check_series(&values)?;
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::Validation(format!(
                "profile values sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            values: values.into(),
            kind,
            label: label.into(),
            step_hours: 1.0,
        })
    }

    pub fn with_step_hours(mut self, step_hours: f64) -> Result<Self> {
        if !(step_hours.is_finite() && step_hours > 0.0) {
            return Err(Error::Validation(format!(
                "step_hours must be positive, got {step_hours}"
            )));
        }
        self.step_hours = step_hours;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn step_hours(&self) -> f64 {
        self.step_hours
    }

    /// Value at a circular index.
    pub fn at(&self, t: usize) -> f64 {
        self.values[t % self.values.len()]
    }
}

fn check_series(values: &[f64]) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::Validation(format!(
            "a profile needs at least 2 steps, got {}",
            values.len()
        )));
    }
    for (index, &value) in values.iter().enumerate() {
        if value.is_nan() || value.is_infinite() {
            return Err(Error::Validation(format!(
                "non-finite value {value} at index {index}"
            )));
        }
        if value < 0.0 {
            return Err(Error::NegativeValue { index, value });
        }
    }
    Ok(())
}

/// Scales a raw non-negative series by its total so that it sums to one.
pub fn normalize(raw: &[f64], kind: ProfileKind, label: impl Into<String>) -> Result<Profile> {
    let label = label.into();
    check_series(raw)?;
    let total = crate::summation::sum(raw);
    if total <= 0.0 {
        return Err(Error::Normalization { label });
    }
    let values: Vec<f64> = raw.iter().map(|v| v / total).collect();
    Ok(Profile {
        values: values.into(),
        kind,
        label,
        step_hours: 1.0,
    })
}

/// Blends generation profiles with generation-share weights.
///
/// `betas[k]` is the share of annual generation from source `k`, not its share
/// of installed capacity.
pub fn mix(generations: &[&Profile], betas: &[f64]) -> Result<Profile> {
    if generations.is_empty() {
        return Err(Error::Validation("mix needs at least one profile".into()));
    }
    if generations.len() != betas.len() {
        return Err(Error::Validation(format!(
            "{} profiles but {} shares",
            generations.len(),
            betas.len()
        )));
    }
    if let Some(b) = betas.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
        return Err(Error::Validation(format!(
            "share {b} is not a non-negative number"
        )));
    }
    let share_total: f64 = betas.iter().sum();
    if (share_total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::Validation(format!(
            "generation shares sum to {share_total}, expected 1"
        )));
    }
    let first = generations[0];
    for p in generations {
        if p.kind() != ProfileKind::Generation {
            return Err(Error::Validation(format!(
                "`{}` is a {} profile; only generation profiles can be mixed",
                p.label(),
                p.kind()
            )));
        }
        if p.len() != first.len() {
            return Err(Error::Validation(format!(
                "`{}` has {} steps, `{}` has {}",
                p.label(),
                p.len(),
                first.label(),
                first.len()
            )));
        }
        if p.step_hours() != first.step_hours() {
            return Err(Error::Validation(
                "mixed profiles differ in step length".into(),
            ));
        }
    }
    if generations.len() == 1 {
        return Ok(first.clone());
    }
    let values: Vec<f64> = (0..first.len())
        .map(|t| {
            generations
                .iter()
                .zip(betas)
                .map(|(p, b)| b * p.values()[t])
                .sum()
        })
        .collect();
    let label = generations
        .iter()
        .zip(betas)
        .map(|(p, b)| format!("{}*{}", b, p.label()))
        .collect::<Vec<_>>()
        .join("+");
    Ok(Profile {
        values: values.into(),
        kind: ProfileKind::Generation,
        label,
        step_hours: first.step_hours(),
    })
}

/// Checks that two profiles can be analyzed together.
pub(crate) fn check_pair(demand: &Profile, generation: &Profile) -> Result<()> {
    if demand.len() != generation.len() {
        return Err(Error::Validation(format!(
            "demand has {} steps but generation has {}",
            demand.len(),
            generation.len()
        )));
    }
    if demand.step_hours() != generation.step_hours() {
        return Err(Error::Validation(
            "demand and generation differ in step length".into(),
        ));
    }
    Ok(())
}

/// Demand plus one or more generation profiles for a region and year.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSet {
    pub demand: Profile,
    pub generations: Vec<(String, Profile)>,
    pub region: String,
    pub year: String,
    /// Timestamps as they appeared in the source; informative only.
    pub timestamps: Vec<String>,
}

impl ProfileSet {
    pub fn new(
        demand: Profile,
        generations: Vec<(String, Profile)>,
        region: impl Into<String>,
        year: impl Into<String>,
        timestamps: Vec<String>,
    ) -> Result<Self> {
        for (name, g) in &generations {
            check_pair(&demand, g)
                .map_err(|e| Error::Validation(format!("source `{name}`: {e}")))?;
        }
        if !timestamps.is_empty() && timestamps.len() != demand.len() {
            return Err(Error::Validation(format!(
                "{} timestamps for {} steps",
                timestamps.len(),
                demand.len()
            )));
        }
        Ok(Self {
            demand,
            generations,
            region: region.into(),
            year: year.into(),
            timestamps,
        })
    }

    pub fn len(&self) -> usize {
        self.demand.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demand.is_empty()
    }

    pub fn generation(&self, name: &str) -> Option<&Profile> {
        self.generations
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
    }
}
