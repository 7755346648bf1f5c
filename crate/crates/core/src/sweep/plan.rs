use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forcing::ScenarioKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Study {
    Torque,
    Wave,
    Heading,
}

impl fmt::Display for Study {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Study::Torque => "torque",
            Study::Wave => "wave",
            Study::Heading => "heading",
        })
    }
}

impl FromStr for Study {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "torque" => Ok(Study::Torque),
            "wave" => Ok(Study::Wave),
            "heading" => Ok(Study::Heading),
            other => Err(Error::invalid(format!(
                "unknown study '{other}' (expected torque, wave or heading)"
            ))),
        }
    }
}

/// The seven flap separations of the energy-production study.
pub const STUDY_DISTANCES_M: [f64; 7] = [10.0, 15.0, 33.0, 45.0, 55.0, 70.0, 86.0];

/// Axes of a parameter sweep. Each study reads only the axes it needs.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub scenarios: Vec<ScenarioKind>,
    pub distances_m: Vec<f64>,
    pub periods_s: Vec<f64>,
    pub torque_amplitudes_Nm: Vec<f64>,
    pub wave_heights_m: Vec<f64>,
    pub headings_deg: Vec<f64>,
    pub heading_distance_m: f64,
    pub heading_period_s: f64,
    pub heading_wave_height_m: f64,
}

fn range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

impl SweepPlan {
    fn base() -> Self {
        SweepPlan {
            scenarios: ScenarioKind::DUAL.to_vec(),
            distances_m: STUDY_DISTANCES_M.to_vec(),
            periods_s: range(7.5, 11.5, 0.5),
            torque_amplitudes_Nm: vec![0.6e6, 0.8e6, 1.0e6, 1.2e6],
            wave_heights_m: vec![1.75, 3.25],
            headings_deg: range(0.0, 45.0, 5.0),
            heading_distance_m: 45.0,
            heading_period_s: 8.5,
            heading_wave_height_m: 1.75,
        }
    }

    /// Torque-forced grid: three distances, four periods, four amplitudes,
    /// five dual-flap scenarios.
    pub fn torque_default() -> Self {
        SweepPlan {
            distances_m: vec![10.0, 45.0, 70.0],
            periods_s: vec![7.5, 8.5, 9.5, 10.5],
            ..Self::base()
        }
    }

    /// Regular-wave grid: seven distances, periods 7.5–11.5 s in 0.5 s steps,
    /// heights 1.75 m and 3.25 m.
    pub fn wave_default() -> Self {
        Self::base()
    }

    /// Headings 0–45° in 5° steps at d = 45 m, T = 8.5 s, H = 1.75 m.
    pub fn heading_default() -> Self {
        Self::base()
    }

    pub fn default_for(study: Study) -> Self {
        match study {
            Study::Torque => Self::torque_default(),
            Study::Wave => Self::wave_default(),
            Study::Heading => Self::heading_default(),
        }
    }

    pub fn validate(&self, study: Study) -> Result<()> {
        fn axis(name: &str, values: &[f64], allow_zero: bool) -> Result<()> {
            if values.is_empty() {
                return Err(Error::invalid(format!("sweep axis '{name}' is empty")));
            }
            let ok = |v: f64| v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
            if let Some(v) = values.iter().find(|&&v| !ok(v)) {
                return Err(Error::invalid(format!("sweep axis '{name}' has invalid value {v}")));
            }
            Ok(())
        }
        match study {
            Study::Torque => {
                if self.scenarios.is_empty() {
                    return Err(Error::invalid("sweep scenario list is empty"));
                }
                axis("distances", &self.distances_m, false)?;
                axis("periods", &self.periods_s, false)?;
                axis("torque amplitudes", &self.torque_amplitudes_Nm, false)?;
            }
            Study::Wave => {
                axis("distances", &self.distances_m, false)?;
                axis("periods", &self.periods_s, false)?;
                axis("wave heights", &self.wave_heights_m, false)?;
            }
            Study::Heading => {
                axis("headings", &self.headings_deg, true)?;
                if let Some(b) = self.headings_deg.iter().find(|&&b| b >= 90.0) {
                    return Err(Error::invalid(format!("heading {b} must be below 90 degrees")));
                }
                axis("heading distance", &[self.heading_distance_m], false)?;
                axis("heading period", &[self.heading_period_s], false)?;
                axis("heading wave height", &[self.heading_wave_height_m], false)?;
            }
        }
        Ok(())
    }
}
