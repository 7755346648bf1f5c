//! Experiment grids: torque-forced scenarios, regular-wave distance sweeps
//! and heading sweeps, each compared against an isolated flap.
//!
//! Grid points run in parallel on the current rayon pool. Rows come back in
//! grid order whatever the worker count.

mod plan;
mod report;

pub use plan::{Study, SweepPlan, STUDY_DISTANCES_M};
pub use report::{classify_band, Band, FlapResult, SweepReport, SweepRow};

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::Result;
use crate::forcing::{ScenarioKind, TorqueScenario, WaveCondition};
use crate::hydro::wavelength;
use crate::model::{CaseResult, Model};

/// Isolated-flap reference for one forcing level.
#[derive(Debug, Clone, Copy)]
struct Baseline {
    rms: f64,
    power: f64,
}

// f64 bit patterns; every axis value is finite
type BaselineKey = (u64, u64, u64);

fn key(period: f64, level: f64, heading: f64) -> BaselineKey {
    (period.to_bits(), level.to_bits(), heading.to_bits())
}

fn baselines<F>(keys: Vec<BaselineKey>, run: F) -> BTreeMap<BaselineKey, std::result::Result<Baseline, String>>
where
    F: Fn(f64, f64, f64) -> Result<CaseResult> + Sync,
{
    let mut keys = keys;
    keys.sort_unstable();
    keys.dedup();
    let results: Vec<_> = keys
        .par_iter()
        .map(|&(p, l, h)| {
            run(f64::from_bits(p), f64::from_bits(l), f64::from_bits(h))
                .map(|c| Baseline {
                    rms: c.metrics.flaps[0].rms_rotation,
                    power: c.power.total,
                })
                .map_err(|e| e.to_string())
        })
        .collect();
    keys.into_iter().zip(results).collect()
}

fn build_row(
    mut row: SweepRow,
    result: Result<CaseResult>,
    baseline: Option<&std::result::Result<Baseline, String>>,
) -> SweepRow {
    let case = match result {
        Ok(c) => c,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let base = match baseline {
        Some(Ok(b)) => Some(*b),
        Some(Err(e)) => {
            row.error = Some(format!("single-flap baseline failed: {e}"));
            None
        }
        None => None,
    };
    row.flaps = case
        .metrics
        .flaps
        .iter()
        .zip(&case.power.per_flap)
        .map(|(m, &p)| FlapResult {
            rms_rotation_rad: m.rms_rotation,
            amplitude_rad: m.amplitude,
            phase_rad: m.phase,
            power_W: p,
            rms_ratio: base.map(|b| m.rms_rotation / b.rms),
        })
        .collect();
    row.single_rms_rad = base.map(|b| b.rms);
    row.single_power_W = base.map(|b| b.power);
    row.total_power_W = Some(case.power.total);
    row.steady = case.power.steady;
    row
}

pub fn run_torque_study(plan: &SweepPlan, model: &Model) -> Result<SweepReport> {
    plan.validate(Study::Torque)?;
    model.validate()?;

    let mut points = Vec::new();
    for &kind in &plan.scenarios {
        let distances: Vec<Option<f64>> = if kind.is_dual() {
            plan.distances_m.iter().map(|&d| Some(d)).collect()
        } else {
            vec![None]
        };
        for &d in &distances {
            for &period in &plan.periods_s {
                for &amplitude in &plan.torque_amplitudes_Nm {
                    points.push((kind, d, period, amplitude));
                }
            }
        }
    }

    let keys = points.iter().map(|&(_, _, p, a)| key(p, a, 0.0)).collect();
    let base = baselines(keys, |period, amplitude, _| {
        model.simulate_torque(&TorqueScenario {
            kind: ScenarioKind::SingleBaseline,
            amplitude,
            period,
            distance: 0.0,
        })
    });

    let rows = points
        .par_iter()
        .map(|&(kind, d, period, amplitude)| {
            let scenario = TorqueScenario {
                kind,
                amplitude,
                period,
                distance: d.unwrap_or(0.0),
            };
            let mut row = SweepRow::new(Study::Torque, period);
            row.scenario = Some(kind);
            row.distance_m = d;
            row.torque_Nm = Some(amplitude);
            if let Some(d) = d {
                annotate_ratio(&mut row, model, d, period);
            }
            build_row(
                row,
                model.simulate_torque(&scenario),
                base.get(&key(period, amplitude, 0.0)),
            )
        })
        .collect();

    Ok(SweepReport::new(Study::Torque, plan, model, rows))
}

fn annotate_ratio(row: &mut SweepRow, model: &Model, distance: f64, period: f64) {
    if let Ok(lambda) = wavelength(period, &model.env) {
        let r = distance / lambda;
        row.d_over_lambda = Some(r);
        row.band = Some(classify_band(r));
    }
}

pub fn run_wave_study(plan: &SweepPlan, model: &Model) -> Result<SweepReport> {
    plan.validate(Study::Wave)?;
    model.validate()?;

    let mut points = Vec::new();
    for &d in &plan.distances_m {
        for &period in &plan.periods_s {
            for &height in &plan.wave_heights_m {
                points.push((d, period, height));
            }
        }
    }

    let keys = points.iter().map(|&(_, p, h)| key(p, h, 0.0)).collect();
    let base = baselines(keys, |period, height, heading| {
        model.simulate_wave(&WaveCondition::new(height, period, heading), None)
    });

    let rows = points
        .par_iter()
        .map(|&(d, period, height)| {
            let mut row = SweepRow::new(Study::Wave, period);
            row.distance_m = Some(d);
            row.wave_height_m = Some(height);
            row.heading_deg = Some(0.0);
            annotate_ratio(&mut row, model, d, period);
            build_row(
                row,
                model.simulate_wave(&WaveCondition::new(height, period, 0.0), Some(d)),
                base.get(&key(period, height, 0.0)),
            )
        })
        .collect();

    Ok(SweepReport::new(Study::Wave, plan, model, rows))
}

pub fn run_heading_study(plan: &SweepPlan, model: &Model) -> Result<SweepReport> {
    plan.validate(Study::Heading)?;
    model.validate()?;

    let d = plan.heading_distance_m;
    let period = plan.heading_period_s;
    let height = plan.heading_wave_height_m;

    let keys = plan
        .headings_deg
        .iter()
        .map(|&b| key(period, height, b))
        .collect();
    let base = baselines(keys, |period, height, heading| {
        model.simulate_wave(&WaveCondition::new(height, period, heading), None)
    });

    let reference = model
        .simulate_wave(&WaveCondition::new(height, period, 0.0), Some(d))
        .map(|c| c.power.total);

    let mut rows: Vec<SweepRow> = plan
        .headings_deg
        .par_iter()
        .map(|&beta| {
            let mut row = SweepRow::new(Study::Heading, period);
            row.distance_m = Some(d);
            row.wave_height_m = Some(height);
            row.heading_deg = Some(beta);
            annotate_ratio(&mut row, model, d, period);
            build_row(
                row,
                model.simulate_wave(&WaveCondition::new(height, period, beta), Some(d)),
                base.get(&key(period, height, beta)),
            )
        })
        .collect();

    for row in &mut rows {
        match (&reference, row.total_power_W) {
            (Ok(p0), Some(p)) if *p0 > 0.0 => row.power_loss_fraction = Some(1.0 - p / p0),
            (Err(e), _) if row.error.is_none() => {
                row.error = Some(format!("zero-heading reference failed: {e}"))
            }
            _ => {}
        }
    }

    Ok(SweepReport::new(Study::Heading, plan, model, rows))
}

pub fn run_study(study: Study, plan: &SweepPlan, model: &Model) -> Result<SweepReport> {
    match study {
        Study::Torque => run_torque_study(plan, model),
        Study::Wave => run_wave_study(plan, model),
        Study::Heading => run_heading_study(plan, model),
    }
}
