use std::io::Write;

use serde::{Deserialize, Serialize};

use super::aep::{annual_energy, AepReport, HOURS_PER_YEAR};
use super::jpd::Jpd;
use super::matrix::{compute_power_matrix, Design, PowerMatrix};
use crate::error::{Error, Result};
use crate::model::Model;

/// One line of the AEP comparison table.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AepRow {
    pub label: String,
    pub distance_m: Option<f64>,
    pub aep_GWh: f64,
    /// AEP over twice the single-flap AEP.
    pub relative_to_doubled_single: f64,
    pub failed_cells: usize,
    pub unsteady_cells: usize,
}

/// Annual energy of a flap pair at several separations, against two
/// isolated flaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AepStudy {
    pub single: AepReport,
    pub dual: Vec<AepReport>,
    #[serde(skip)]
    pub matrices: Vec<PowerMatrix>,
}

pub const DOUBLED_SINGLE_LABEL: &str = "single (doubled)";

pub fn aep_study(model: &Model, jpd: &Jpd, distances: &[f64]) -> Result<AepStudy> {
    if distances.is_empty() {
        return Err(Error::invalid("no separation distances given"));
    }
    if let Some(d) = distances.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(Error::invalid(format!("separation distance must be > 0, got {d}")));
    }
    model.validate()?;
    let designs: Vec<Design> = std::iter::once(Design::single())
        .chain(distances.iter().map(|&d| Design::dual(d)))
        .collect();
    let matrices: Vec<PowerMatrix> = designs
        .iter()
        .map(|d| compute_power_matrix(model, d, jpd))
        .collect();
    let mut reports = matrices
        .iter()
        .map(|pm| annual_energy(pm, jpd, HOURS_PER_YEAR))
        .collect::<Result<Vec<_>>>()?;
    let single = reports.remove(0);
    Ok(AepStudy {
        single,
        dual: reports,
        matrices,
    })
}

impl AepStudy {
    /// Doubled-single baseline first, then one row per distance.
    pub fn table(&self) -> Vec<AepRow> {
        let base = 2.0 * self.single.total_GWh;
        let ratio = |x: f64| if base > 0.0 { x / base } else { f64::NAN };
        std::iter::once(AepRow {
            label: DOUBLED_SINGLE_LABEL.to_string(),
            distance_m: None,
            aep_GWh: base,
            relative_to_doubled_single: ratio(base),
            failed_cells: self.single.failed_cells,
            unsteady_cells: self.single.unsteady_cells,
        })
        .chain(self.dual.iter().map(|r| {
            let d = r.design.distance.unwrap_or(0.0);
            AepRow {
                label: format!("d = {d} m"),
                distance_m: Some(d),
                aep_GWh: r.total_GWh,
                relative_to_doubled_single: ratio(r.total_GWh),
                failed_cells: r.failed_cells,
                unsteady_cells: r.unsteady_cells,
            }
        }))
        .collect()
    }

    /// (max − min) / mean of the dual-flap AEP over distances.
    pub fn relative_spread(&self) -> f64 {
        let v: Vec<f64> = self.dual.iter().map(|r| r.total_GWh).collect();
        let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        (max - min) / mean
    }

    pub fn write_table_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "# design [-], distance_m [m], aep_GWh [GWh/yr], relative_to_doubled_single [-], failed_cells [count], unsteady_cells [count]"
        )?;
        writeln!(
            out,
            "design,distance_m,aep_GWh,relative_to_doubled_single,failed_cells,unsteady_cells"
        )?;
        for r in self.table() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.label,
                r.distance_m.map(|d| d.to_string()).unwrap_or_default(),
                r.aep_GWh,
                r.relative_to_doubled_single,
                r.failed_cells,
                r.unsteady_cells
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shape_and_decoupled_identity() {
        let mut m = Model::reference().decoupled();
        m.integration.steps_per_period = 60;
        let jpd = Jpd::uniform(vec![1.75], vec![8.5, 9.5], 1.0).unwrap();
        let s = aep_study(&m, &jpd, &[10.0, 45.0]).unwrap();
        let t = s.table();
        assert_eq!(t.len(), 3);
        assert_eq!(t[0].label, DOUBLED_SINGLE_LABEL);
        for r in &t[1..] {
            assert!((r.relative_to_doubled_single - 1.0).abs() < 1e-3, "{r:?}");
        }
        assert!(s.relative_spread() < 1e-3);
    }

    #[test]
    fn empty_distances_rejected() {
        let jpd = Jpd::uniform(vec![1.75], vec![8.5], 1.0).unwrap();
        assert!(aep_study(&Model::reference(), &jpd, &[]).is_err());
    }
}
