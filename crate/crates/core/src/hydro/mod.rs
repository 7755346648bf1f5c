//! Wave kinematics and hydrodynamic coefficient provisioning.
//!
//! Coefficients are inputs to the simulator: either a tabulated grid over
//! (period, separation distance) or a base set of diagonal coefficients
//! combined with an analytic cross-flap coupling kernel.

mod dispersion;
mod kernel;
mod table;

pub use dispersion::{
    angular_frequency, solve_dispersion, wavelength, wavelength_deep, Environment, WaterDepth,
    DEFAULT_GRAVITY,
};
pub use kernel::{analytic_coupling, CouplingKernel};
pub use table::CoefficientTable;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hydrodynamic coefficients of one flap pair at a given period and distance.
///
/// The coupling terms fill both off-diagonal slots of the inertia and damping
/// matrices. A single flap uses zero coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydroCoefficients {
    #[serde(rename = "added_inertia_kg_m2")]
    pub added_inertia: f64,
    #[serde(rename = "damping_Nms_per_rad")]
    pub damping: f64,
    #[serde(rename = "coupling_inertia_kg_m2", default)]
    pub coupling_inertia: f64,
    #[serde(rename = "coupling_damping_Nms_per_rad", default)]
    pub coupling_damping: f64,
}

impl HydroCoefficients {
    pub fn uncoupled(added_inertia: f64, damping: f64) -> Self {
        HydroCoefficients {
            added_inertia,
            damping,
            coupling_inertia: 0.0,
            coupling_damping: 0.0,
        }
    }

    /// Same diagonal terms, coupling removed.
    pub fn without_coupling(self) -> Self {
        HydroCoefficients::uncoupled(self.added_inertia, self.damping)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.added_inertia,
            self.damping,
            self.coupling_inertia,
            self.coupling_damping,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("hydrodynamic coefficients must be finite"));
        }
        if self.added_inertia < 0.0 {
            return Err(Error::invalid(format!(
                "added inertia must be >= 0, got {}",
                self.added_inertia
            )));
        }
        if self.damping <= 0.0 {
            return Err(Error::invalid(format!(
                "damping must be > 0, got {}",
                self.damping
            )));
        }
        Ok(())
    }

    pub(crate) fn lerp(a: &Self, b: &Self, t: f64) -> Self {
        let mix = |x: f64, y: f64| x + (y - x) * t;
        HydroCoefficients {
            added_inertia: mix(a.added_inertia, b.added_inertia),
            damping: mix(a.damping, b.damping),
            coupling_inertia: mix(a.coupling_inertia, b.coupling_inertia),
            coupling_damping: mix(a.coupling_damping, b.coupling_damping),
        }
    }
}

/// Where the simulator gets its hydrodynamic coefficients from.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientSource {
    Table(CoefficientTable),
    Analytic {
        base: HydroCoefficients,
        kernel: CouplingKernel,
    },
}

impl CoefficientSource {
    /// Diagonal coefficients for an isolated flap.
    ///
    /// For a table this is the largest tabulated distance, the most isolated
    /// configuration on the grid.
    pub fn single(&self, period: f64) -> Result<HydroCoefficients> {
        match self {
            CoefficientSource::Table(table) => {
                let far = *table.distances().last().unwrap_or(&0.0);
                Ok(table.coefficients_at(period, far)?.without_coupling())
            }
            CoefficientSource::Analytic { base, .. } => Ok(base.without_coupling()),
        }
    }

    /// Coefficients for a flap pair separated by `distance`.
    pub fn pair(&self, period: f64, distance: f64, env: &Environment) -> Result<HydroCoefficients> {
        match self {
            CoefficientSource::Table(table) => table.coefficients_at(period, distance),
            CoefficientSource::Analytic { base, kernel } => {
                let k = solve_dispersion(period, env)?;
                analytic_coupling(base, distance, k, kernel)
            }
        }
    }

    /// Same source with every coupling term forced to zero.
    pub fn decoupled(&self) -> Self {
        match self {
            CoefficientSource::Table(table) => CoefficientSource::Table(table.decoupled()),
            CoefficientSource::Analytic { base, kernel } => CoefficientSource::Analytic {
                base: base.without_coupling(),
                kernel: CouplingKernel {
                    gain: 0.0,
                    ..*kernel
                },
            },
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            CoefficientSource::Table(t) => format!(
                "table ({} periods x {} distances)",
                t.periods().len(),
                t.distances().len()
            ),
            CoefficientSource::Analytic { kernel, .. } => format!(
                "analytic kernel (gain {}, min kd {})",
                kernel.gain, kernel.min_kd
            ),
        }
    }
}
