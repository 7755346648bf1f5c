use serde::{Deserialize, Serialize};

use super::HydroCoefficients;
use crate::error::{Error, Result};

/// Decaying oscillatory stand-in for the cross-flap coupling terms.
///
/// ```text
/// C_lr  = -gain · C   · cos(k·d) / sqrt(max(k·d, min_kd))
/// Ia_lr = -gain · I_a · sin(k·d) / sqrt(max(k·d, min_kd))
/// ```
///
/// Negative coupling damping at small `k·d` lowers the net damping of the
/// in-phase mode and raises it for the out-of-phase mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingKernel {
    #[serde(rename = "alpha")]
    pub gain: f64,
    #[serde(rename = "epsilon", default = "CouplingKernel::default_min_kd")]
    pub min_kd: f64,
}

impl CouplingKernel {
    /// Gain of the shipped reference configuration.
    pub const REFERENCE_GAIN: f64 = 0.05;

    fn default_min_kd() -> f64 {
        0.1
    }

    pub fn new(gain: f64) -> Self {
        CouplingKernel {
            gain,
            min_kd: Self::default_min_kd(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gain) {
            return Err(Error::invalid(format!(
                "kernel gain must lie in [0, 1], got {}",
                self.gain
            )));
        }
        if !(self.min_kd > 0.0 && self.min_kd.is_finite()) {
            return Err(Error::invalid(format!(
                "kernel min kd must be > 0, got {}",
                self.min_kd
            )));
        }
        Ok(())
    }
}

impl Default for CouplingKernel {
    fn default() -> Self {
        CouplingKernel::new(Self::REFERENCE_GAIN)
    }
}

/// Replace the coupling terms of `base` with the kernel evaluated at
/// separation `distance` and wavenumber `wavenumber`.
pub fn analytic_coupling(
    base: &HydroCoefficients,
    distance: f64,
    wavenumber: f64,
    kernel: &CouplingKernel,
) -> Result<HydroCoefficients> {
    kernel.validate()?;
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(Error::invalid(format!("distance must be > 0, got {distance}")));
    }
    if !(wavenumber > 0.0 && wavenumber.is_finite()) {
        return Err(Error::invalid(format!("wavenumber must be > 0, got {wavenumber}")));
    }
    let kd = wavenumber * distance;
    let scale = -kernel.gain / kd.max(kernel.min_kd).sqrt();
    Ok(HydroCoefficients {
        coupling_damping: scale * base.damping * kd.cos(),
        coupling_inertia: scale * base.added_inertia * kd.sin(),
        ..*base
    })
}
