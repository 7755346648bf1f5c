use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use super::HydroCoefficients;
use crate::error::{Error, Result};

/// Hydrodynamic coefficients tabulated over (period, separation distance).
///
/// Queries interpolate bilinearly and clamp at the grid edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    periods: Vec<f64>,
    distances: Vec<f64>,
    // row-major: period index outer, distance index inner
    cells: Vec<HydroCoefficients>,
}

#[derive(Debug, Deserialize)]
struct Row {
    period_s: f64,
    distance_m: f64,
    #[serde(rename = "Ia")]
    added_inertia: f64,
    #[serde(rename = "C")]
    damping: f64,
    #[serde(rename = "Ia_lr")]
    coupling_inertia: f64,
    #[serde(rename = "C_lr")]
    coupling_damping: f64,
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid(format!("coefficient table has an empty {name} grid")));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("{name} grid contains non-finite values")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(format!("{name} grid must be strictly increasing")));
    }
    Ok(())
}

/// Lower/upper bracket indices and the fraction between them, clamped.
fn bracket(grid: &[f64], x: f64) -> (usize, usize, f64) {
    let last = grid.len() - 1;
    if x <= grid[0] {
        return (0, 0, 0.0);
    }
    if x >= grid[last] {
        return (last, last, 0.0);
    }
    let hi = grid.partition_point(|&g| g <= x);
    let lo = hi - 1;
    if grid[lo] == x {
        return (lo, lo, 0.0);
    }
    (lo, hi, (x - grid[lo]) / (grid[hi] - grid[lo]))
}

impl CoefficientTable {
    pub fn new(
        periods: Vec<f64>,
        distances: Vec<f64>,
        cells: Vec<HydroCoefficients>,
    ) -> Result<Self> {
        check_grid("period", &periods)?;
        check_grid("distance", &distances)?;
        if cells.len() != periods.len() * distances.len() {
            return Err(Error::invalid(format!(
                "coefficient table has {} cells, expected {} x {}",
                cells.len(),
                periods.len(),
                distances.len()
            )));
        }
        for c in &cells {
            c.validate()?;
        }
        Ok(CoefficientTable {
            periods,
            distances,
            cells,
        })
    }

    /// Parse the `period_s,distance_m,Ia,C,Ia_lr,C_lr` CSV format.
    ///
    /// Grids are the distinct period and distance values. Every combination
    /// must appear exactly once.
    pub fn from_csv_reader<R: Read>(reader: R, source_name: &str) -> Result<Self> {
        let parse_err = |line: usize, column: usize, message: String| Error::Parse {
            source_name: source_name.to_string(),
            line,
            column,
            message,
        };

        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut rows = Vec::new();
        for (i, rec) in rdr.deserialize::<Row>().enumerate() {
            let row = rec.map_err(|e| {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(i + 2);
                parse_err(line, 0, e.to_string())
            })?;
            rows.push((i + 2, row));
        }
        if rows.is_empty() {
            return Err(Error::invalid(format!("{source_name}: coefficient table is empty")));
        }

        let distinct = |f: fn(&Row) -> f64| {
            let mut v: Vec<f64> = rows.iter().map(|(_, r)| f(r)).collect();
            v.sort_by(|a, b| a.total_cmp(b));
            v.dedup();
            v
        };
        let periods = distinct(|r| r.period_s);
        let distances = distinct(|r| r.distance_m);

        let mut cells: Vec<Option<HydroCoefficients>> = vec![None; periods.len() * distances.len()];
        for (line, r) in &rows {
            let ip = periods.iter().position(|&p| p == r.period_s).unwrap();
            let id = distances.iter().position(|&d| d == r.distance_m).unwrap();
            let slot = &mut cells[ip * distances.len() + id];
            if slot.is_some() {
                return Err(parse_err(
                    *line,
                    0,
                    format!("duplicate cell (T = {}, d = {})", r.period_s, r.distance_m),
                ));
            }
            *slot = Some(HydroCoefficients {
                added_inertia: r.added_inertia,
                damping: r.damping,
                coupling_inertia: r.coupling_inertia,
                coupling_damping: r.coupling_damping,
            });
        }

        let mut full = Vec::with_capacity(cells.len());
        for (idx, c) in cells.into_iter().enumerate() {
            match c {
                Some(c) => full.push(c),
                None => {
                    let (ip, id) = (idx / distances.len(), idx % distances.len());
                    return Err(Error::invalid(format!(
                        "{source_name}: missing cell (T = {}, d = {})",
                        periods[ip], distances[id]
                    )));
                }
            }
        }
        CoefficientTable::new(periods, distances, full)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file, &path.display().to_string())
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn cell(&self, period_index: usize, distance_index: usize) -> &HydroCoefficients {
        &self.cells[period_index * self.distances.len() + distance_index]
    }

    /// Bilinear interpolation in (period, distance), clamped to the grid.
    pub fn coefficients_at(&self, period: f64, distance: f64) -> Result<HydroCoefficients> {
        if self.cells.is_empty() {
            return Err(Error::invalid("coefficient table is empty"));
        }
        if !period.is_finite() || !distance.is_finite() {
            return Err(Error::invalid("non-finite coefficient query"));
        }
        let (p0, p1, tp) = bracket(&self.periods, period);
        let (d0, d1, td) = bracket(&self.distances, distance);
        let low = HydroCoefficients::lerp(self.cell(p0, d0), self.cell(p0, d1), td);
        let high = HydroCoefficients::lerp(self.cell(p1, d0), self.cell(p1, d1), td);
        Ok(HydroCoefficients::lerp(&low, &high, tp))
    }

    pub(crate) fn decoupled(&self) -> Self {
        CoefficientTable {
            periods: self.periods.clone(),
            distances: self.distances.clone(),
            cells: self.cells.iter().map(|c| c.without_coupling()).collect(),
        }
    }
}
