use serde::{Deserialize, Serialize};

use super::integrate::{IntegrationConfig, ResponseRecord};
use super::system::{ForcingSpec, SystemMatrices};
use crate::error::{Error, Result};

/// Mean power fed in by the forcing and mean power removed by damping over
/// the measured window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBalance {
    #[serde(rename = "input_W")]
    pub input: f64,
    #[serde(rename = "dissipated_W")]
    pub dissipated: f64,
}

impl PowerBalance {
    pub fn relative_error(&self) -> f64 {
        let scale = self.input.abs().max(self.dissipated.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.input - self.dissipated).abs() / scale
        }
    }
}

pub fn power_balance(
    record: &ResponseRecord,
    system: &SystemMatrices,
    forcing: &ForcingSpec,
    cfg: &IntegrationConfig,
) -> Result<PowerBalance> {
    let n = record.flap_count();
    if n != system.dof_count() || n != forcing.flaps.len() {
        return Err(Error::invalid("record, system and forcing dimensions differ"));
    }
    let window = record.measure_window(cfg.measure_periods)?;
    let count = window.len() as f64;
    let (mut input, mut dissipated) = (0.0, 0.0);
    for s in window {
        let t = record.time[s];
        for i in 0..n {
            let vi = record.velocity[i][s];
            input += forcing.flaps[i].torque_at(forcing.omega, t) * vi;
            for j in 0..n {
                dissipated += vi * system.damping[i][j] * record.velocity[j][s];
            }
        }
    }
    Ok(PowerBalance {
        input: input / count,
        dissipated: dissipated / count,
    })
}
