//! Storage technologies and cost settings.

use crate::error::{Error, Result};

/// Charge/discharge behavior of one storage type. Charging `x` from the grid
/// stores `e_c * x`; delivering `y` to demand drains `e_d * y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StorageTech {
    pub charge: f64,
    pub discharge: f64,
}

impl StorageTech {
    pub const LOSSLESS: StorageTech = StorageTech {
        charge: 1.0,
        discharge: 1.0,
    };

    pub fn new(charge: f64, discharge: f64) -> Result<Self> {
        let tech = Self { charge, discharge };
        tech.validate()?;
        Ok(tech)
    }

    /// Splits a round-trip efficiency evenly between charge and discharge.
    pub fn symmetric(cycle: f64) -> Result<Self> {
        Self::new(cycle.sqrt(), 1.0 / cycle.sqrt())
    }

    /// Battery-like storage, round trip 0.8.
    pub fn st1() -> Self {
        Self {
            charge: 0.8_f64.sqrt(),
            discharge: 1.0 / 0.8_f64.sqrt(),
        }
    }

    /// Power-to-gas-to-power, round trip 0.4.
    pub fn st2() -> Self {
        Self {
            charge: 0.8,
            discharge: 2.0,
        }
    }

    /// Round-trip efficiency.
    pub fn cycle(&self) -> f64 {
        self.charge / self.discharge
    }

    pub fn is_lossless(&self) -> bool {
        self.charge == 1.0 && self.discharge == 1.0
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.charge > 0.0
            && self.charge <= 1.0
            && self.discharge >= 1.0
            && self.discharge.is_finite();
        if !ok {
            return Err(Error::Validation(format!(
                "efficiencies must satisfy 0 < e_c <= 1 <= e_d, got e_c = {}, e_d = {}",
                self.charge, self.discharge
            )));
        }
        Ok(())
    }
}

/// Second-storage cost block: energy capacity plus separate input and output
/// power capacity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondStorageCosts {
    pub energy: f64,
    pub power_in: f64,
    pub power_out: f64,
}

/// Annualized unit costs. `generation` is the single LCOE of generation per
/// unit of energy; storage costs are per unit of capacity per year, with
/// capacities measured in units of annual demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TechCosts {
    pub generation: f64,
    /// Energy capacity of the (first) storage.
    pub storage: f64,
    /// Power capacity of the first storage, shared by charge and discharge.
    pub storage_power: Option<f64>,
    pub second: Option<SecondStorageCosts>,
}

impl Default for TechCosts {
    fn default() -> Self {
        Self {
            generation: 4.7,
            storage: 500.0,
            storage_power: Some(10_000.0),
            second: Some(SecondStorageCosts {
                energy: 10.0,
                power_in: 10_000.0,
                power_out: 15_000.0,
            }),
        }
    }
}

impl TechCosts {
    /// Generation and storage energy only.
    pub fn simple(generation: f64, storage: f64) -> Self {
        Self {
            generation,
            storage,
            storage_power: None,
            second: None,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            generation: self.generation * factor,
            storage: self.storage * factor,
            storage_power: self.storage_power.map(|c| c * factor),
            second: self.second.map(|s| SecondStorageCosts {
                energy: s.energy * factor,
                power_in: s.power_in * factor,
                power_out: s.power_out * factor,
            }),
        }
    }

    /// Cost ratio `c_g / c_s` that selects the optimal vertex.
    pub fn ratio(&self) -> f64 {
        self.generation / self.storage
    }

    pub fn validate(&self) -> Result<()> {
        let mut all = vec![("generation", self.generation), ("storage", self.storage)];
        if let Some(c) = self.storage_power {
            all.push(("storage power", c));
        }
        if let Some(s) = self.second {
            all.extend([
                ("second storage energy", s.energy),
                ("second storage power in", s.power_in),
                ("second storage power out", s.power_out),
            ]);
        }
        for (name, v) in all {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!(
                    "{name} cost must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_efficiencies() {
        assert!((StorageTech::st1().cycle() - 0.8).abs() < 1e-12);
        assert!((StorageTech::st2().cycle() - 0.4).abs() < 1e-12);
        assert_eq!(StorageTech::LOSSLESS.cycle(), 1.0);
    }

    #[test]
    fn rejects_bad_efficiency() {
        assert!(StorageTech::new(1.2, 1.0).is_err());
        assert!(StorageTech::new(0.9, 0.9).is_err());
        assert!(StorageTech::new(0.0, 1.0).is_err());
    }

    #[test]
    fn default_costs() {
        let c = TechCosts::default();
        assert_eq!((c.generation, c.storage), (4.7, 500.0));
        assert_eq!(c.storage_power, Some(10_000.0));
        let s = c.second.unwrap();
        assert_eq!(
            (s.energy, s.power_in, s.power_out),
            (10.0, 10_000.0, 15_000.0)
        );
        assert!(c.validate().is_ok());
        assert!(TechCosts::simple(-1.0, 1.0).validate().is_err());
    }
}
