//! Closed-form small-signal models of the differential junctions.

pub mod basis;
pub mod current;
pub mod voltage;

pub use basis::{from_modes, ideal_smatrix, to_modes, JunctionBasis};
pub use current::{cm_column, cm_modes, cm_sparams, elastance_coeffs, ModeResponseCM};
pub use voltage::{vm_column, vm_modes, vm_sparams, ModeResponseVM};

use serde::{Deserialize, Serialize};

/// Which differential topology a model or sweep refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Two delta junctions of parallel tanks joined by differential ports.
    #[default]
    Voltage,
    /// Two wye junctions of series tanks with tied terminals.
    Current,
}

impl Family {
    pub fn sparams(
        self,
        grid: &[f64],
        cp: &crate::CircuitParams,
        mp: &crate::ModulationParams,
    ) -> crate::Result<crate::SParameterSet> {
        match self {
            Family::Voltage => vm_sparams(grid, cp, mp),
            Family::Current => cm_sparams(grid, cp, mp),
        }
    }

    pub fn column(
        self,
        omega: f64,
        cp: &crate::CircuitParams,
        mp: &crate::ModulationParams,
    ) -> crate::Result<[num_complex::Complex64; 3]> {
        match self {
            Family::Voltage => vm_column(omega, cp, mp),
            Family::Current => cm_column(omega, cp, mp),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "voltage" | "vm" => Ok(Family::Voltage),
            "current" | "cm" => Ok(Family::Current),
            _ => Err(format!("unknown topology `{s}` (expected voltage|current)")),
        }
    }
}
