use std::io::Write;

use serde::{Deserialize, Serialize};

use super::jpd::Jpd;
use super::matrix::{CellStatus, Design, PowerMatrix};
use crate::error::{Error, Result};
use crate::model::ModelDescriptor;

/// Mean Gregorian year.
pub const HOURS_PER_YEAR: f64 = 8766.0;

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AepCell {
    pub hs_m: f64,
    pub te_s: f64,
    pub occurrence: f64,
    pub status: CellStatus,
    pub power_W: f64,
    pub energy_Wh: f64,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AepReport {
    pub design: Design,
    pub model: ModelDescriptor,
    pub hours_per_year: f64,
    pub cells: Vec<AepCell>,
    pub total_Wh: f64,
    pub total_GWh: f64,
    pub failed_cells: usize,
    pub unsteady_cells: usize,
}

/// Σ P(cell)·p(cell)·hours over the power matrix.
pub fn annual_energy(pm: &PowerMatrix, jpd: &Jpd, hours_per_year: f64) -> Result<AepReport> {
    if pm.hs_m != jpd.hs() || pm.te_s != jpd.te() {
        return Err(Error::invalid(
            "power matrix and JPD bin axes do not match",
        ));
    }
    if !(hours_per_year > 0.0 && hours_per_year.is_finite()) {
        return Err(Error::invalid("hours per year must be > 0"));
    }
    let cells: Vec<AepCell> = pm
        .cells
        .iter()
        .zip(jpd.cells())
        .map(|(c, &p)| AepCell {
            hs_m: c.hs_m,
            te_s: c.te_s,
            occurrence: p,
            status: c.status,
            power_W: c.total_W,
            energy_Wh: c.total_W * p * hours_per_year,
        })
        .collect();
    let total: f64 = cells.iter().map(|c| c.energy_Wh).sum();
    Ok(AepReport {
        design: pm.design,
        model: pm.model.clone(),
        hours_per_year,
        cells,
        total_Wh: total,
        total_GWh: total / 1e9,
        failed_cells: pm.failed_cells(),
        unsteady_cells: pm.unsteady_cells(),
    })
}

impl AepReport {
    /// Long-format cell table with a `#` units line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "# hs_m [m], te_s [s], occurrence [fraction], power_W [W], energy_Wh [Wh/yr], status"
        )?;
        writeln!(out, "hs_m,te_s,occurrence,power_W,energy_Wh,status")?;
        for c in &self.cells {
            let status = serde_json::to_value(c.status).unwrap();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                c.hs_m,
                c.te_s,
                c.occurrence,
                c.power_W,
                c.energy_Wh,
                status.as_str().unwrap_or("")
            )?;
        }
        Ok(())
    }
}
