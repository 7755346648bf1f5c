use serde::{Deserialize, Serialize};

use super::fit::harmonic_fit;
use super::integrate::{IntegrationConfig, ResponseRecord};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlapMetrics {
    #[serde(rename = "rms_rotation_rad")]
    pub rms_rotation: f64,
    #[serde(rename = "amplitude_rad")]
    pub amplitude: f64,
    #[serde(rename = "phase_rad")]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseMetrics {
    pub flaps: Vec<FlapMetrics>,
    pub steady: bool,
    /// Whole periods in the measured window.
    pub cycles_used: usize,
    pub periods_integrated: usize,
}

/// RMS, amplitude and phase of each flap over the final `measure_periods`.
pub fn response_metrics(record: &ResponseRecord, cfg: &IntegrationConfig) -> Result<ResponseMetrics> {
    let window = record.measure_window(cfg.measure_periods)?;
    let n = window.len() as f64;
    let flaps = record
        .rotation
        .iter()
        .map(|series| {
            let rms = (series[window.clone()].iter().map(|v| v * v).sum::<f64>() / n).sqrt();
            let fit = harmonic_fit(&record.time, series, record.omega, window.clone())?;
            Ok(FlapMetrics {
                rms_rotation: rms,
                amplitude: fit.amplitude,
                phase: fit.phase,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResponseMetrics {
        flaps,
        steady: record.steady,
        cycles_used: cfg.measure_periods,
        periods_integrated: record.periods,
    })
}
