//! Power extraction, power matrices over sea-state bins, and annual energy.

mod aep;
mod jpd;
mod matrix;
mod study;

pub use aep::{annual_energy, AepCell, AepReport, HOURS_PER_YEAR};
pub use jpd::{load_jpd, load_jpd_path, Jpd};
pub use matrix::{compute_power_matrix, CellStatus, Design, PowerCell, PowerMatrix};
pub use study::{aep_study, AepRow, AepStudy, DOUBLED_SINGLE_LABEL};

use serde::{Deserialize, Serialize};

use crate::dynamics::{IntegrationConfig, ResponseRecord};
use crate::error::{Error, Result};

fn default_true() -> bool {
    true
}

/// Linear rotational damper: P = C_pto·⟨θ'²⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtoModel {
    #[serde(rename = "damping_Nms_per_rad")]
    pub damping: f64,
    /// Whether the PTO damping is already part of the hydrodynamic damping
    /// used by the dynamics. When false it is added on top.
    #[serde(rename = "included_in_damping", default = "default_true")]
    pub included: bool,
}

impl PtoModel {
    /// PTO taking `fraction` of `damping`, counted inside it.
    pub fn share_of(damping: f64, fraction: f64) -> Self {
        PtoModel {
            damping: damping * fraction,
            included: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.damping >= 0.0 && self.damping.is_finite()) {
            return Err(Error::invalid(format!(
                "PTO damping must be >= 0, got {}",
                self.damping
            )));
        }
        Ok(())
    }
}

/// Mean absorbed power of each flap and their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlapPower {
    #[serde(rename = "per_flap_W")]
    pub per_flap: Vec<f64>,
    #[serde(rename = "total_W")]
    pub total: f64,
    /// False when the record never reached steady state.
    pub steady: bool,
}

/// Mean PTO power over the measured window of `record`.
pub fn mean_power(
    record: &ResponseRecord,
    pto: &PtoModel,
    cfg: &IntegrationConfig,
) -> Result<FlapPower> {
    pto.validate()?;
    let window = record.measure_window(cfg.measure_periods)?;
    let n = window.len() as f64;
    let per_flap: Vec<f64> = record
        .velocity
        .iter()
        .map(|v| pto.damping * v[window.clone()].iter().map(|w| w * w).sum::<f64>() / n)
        .collect();
    Ok(FlapPower {
        total: per_flap.iter().sum(),
        per_flap,
        steady: record.steady,
    })
}
