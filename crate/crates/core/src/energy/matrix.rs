use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::jpd::Jpd;
use crate::forcing::WaveCondition;
use crate::model::{Model, ModelDescriptor};

/// Array layout a power matrix is computed for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Design {
    /// Flap separation; `None` for a single flap.
    #[serde(rename = "distance_m")]
    pub distance: Option<f64>,
    #[serde(rename = "heading_deg")]
    pub heading_deg: f64,
}

impl Design {
    pub fn single() -> Self {
        Design {
            distance: None,
            heading_deg: 0.0,
        }
    }

    pub fn dual(distance: f64) -> Self {
        Design {
            distance: Some(distance),
            heading_deg: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    /// Computed, but the integration never met its convergence tolerance.
    Unsteady,
    /// Zero occurrence; not simulated.
    Skipped,
    Failed,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCell {
    pub hs_m: f64,
    pub te_s: f64,
    pub status: CellStatus,
    pub per_flap_W: Vec<f64>,
    pub total_W: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Mean absorbed power per (Hs, Te) bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerMatrix {
    pub hs_m: Vec<f64>,
    pub te_s: Vec<f64>,
    pub design: Design,
    pub model: ModelDescriptor,
    /// Row-major, one row per height.
    pub cells: Vec<PowerCell>,
}

impl PowerMatrix {
    pub fn cell(&self, hs_index: usize, te_index: usize) -> &PowerCell {
        &self.cells[hs_index * self.te_s.len() + te_index]
    }

    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.status == CellStatus::Failed).count()
    }

    pub fn unsteady_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.status == CellStatus::Unsteady).count()
    }
}

fn compute_cell(model: &Model, design: &Design, hs: f64, te: f64) -> PowerCell {
    let wave = WaveCondition::new(hs, te, design.heading_deg);
    match model.simulate_wave(&wave, design.distance) {
        Ok(case) => PowerCell {
            hs_m: hs,
            te_s: te,
            status: if case.power.steady {
                CellStatus::Ok
            } else {
                CellStatus::Unsteady
            },
            total_W: case.power.total,
            per_flap_W: case.power.per_flap,
            error: None,
        },
        Err(e) => PowerCell {
            hs_m: hs,
            te_s: te,
            status: CellStatus::Failed,
            per_flap_W: Vec::new(),
            total_W: 0.0,
            error: Some(e.to_string()),
        },
    }
}

/// Simulate every bin of `bins` that has non-zero occurrence.
///
/// Cells run in parallel on the current rayon pool and are collected in bin
/// order, so the result does not depend on the worker count. A failing cell
/// is recorded as [`CellStatus::Failed`] without aborting the others.
pub fn compute_power_matrix(model: &Model, design: &Design, bins: &Jpd) -> PowerMatrix {
    let (hs, te) = (bins.hs(), bins.te());
    let cells = (0..hs.len() * te.len())
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / te.len(), idx % te.len());
            if bins.occurrence(i, j) == 0.0 {
                PowerCell {
                    hs_m: hs[i],
                    te_s: te[j],
                    status: CellStatus::Skipped,
                    per_flap_W: Vec::new(),
                    total_W: 0.0,
                    error: None,
                }
            } else {
                compute_cell(model, design, hs[i], te[j])
            }
        })
        .collect();
    PowerMatrix {
        hs_m: hs.to_vec(),
        te_s: te.to_vec(),
        design: *design,
        model: model.descriptor(),
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_occurrence_cells_skipped() {
        let jpd = Jpd::new(vec![1.75], vec![8.5, 9.5], vec![0.0, 0.5]).unwrap();
        let pm = compute_power_matrix(&Model::reference(), &Design::single(), &jpd);
        assert_eq!(pm.cell(0, 0).status, CellStatus::Skipped);
        assert_eq!(pm.cell(0, 1).status, CellStatus::Ok);
        assert!(pm.cell(0, 1).total_W > 0.0);
    }

    #[test]
    fn failures_are_quarantined() {
        let jpd = Jpd::uniform(vec![1.75], vec![8.5, 9.5], 1.0).unwrap();
        let mut model = Model::reference();
        model.pto.damping = 5.0e6;
        let pm = compute_power_matrix(&model, &Design::dual(45.0), &jpd);
        assert_eq!(pm.failed_cells(), 2);
        assert!(pm.cells.iter().all(|c| c.error.is_some()));

        // a heading of 90 degrees is rejected per cell
        let design = Design {
            distance: Some(45.0),
            heading_deg: 90.0,
        };
        let pm = compute_power_matrix(&Model::reference(), &design, &jpd);
        assert_eq!(pm.failed_cells(), 2);
    }

    #[test]
    fn dual_cells_have_two_flaps() {
        let jpd = Jpd::uniform(vec![1.75], vec![9.5], 1.0).unwrap();
        let pm = compute_power_matrix(&Model::reference(), &Design::dual(45.0), &jpd);
        let c = pm.cell(0, 0);
        assert_eq!(c.per_flap_W.len(), 2);
        assert!((c.per_flap_W[0] + c.per_flap_W[1] - c.total_W).abs() < 1e-9 * c.total_W);
    }
}
