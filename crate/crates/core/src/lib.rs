//! Production and cost functions of generation-plus-storage power systems
//! served entirely by variable renewables.

pub mod econ;
pub mod envelope;
pub mod error;
pub mod format;
pub mod lp;
pub mod oracle;
pub mod profiles;
pub mod summation;
pub mod tech;

pub use error::{Error, Result};
pub use profiles::{Profile, ProfileKind, ProfileSet};
pub use tech::{StorageTech, TechCosts};
