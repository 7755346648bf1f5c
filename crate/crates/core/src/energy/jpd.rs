use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const HEADER_CORNER: &str = "hs_m\\te_s";
const TOTAL_SLACK: f64 = 1e-9;

/// Joint occurrence of sea states over (wave height, period) bin centres.
///
/// Occurrences may sum to less than one: a partial matrix covering only the
/// sea states of interest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jpd {
    #[serde(rename = "hs_m")]
    hs: Vec<f64>,
    #[serde(rename = "te_s")]
    te: Vec<f64>,
    /// Row-major, one row per height.
    occurrence: Vec<f64>,
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::invalid(format!("JPD {name} axis is empty")));
    }
    if axis.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::invalid(format!("JPD {name} centres must be > 0")));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(format!("JPD {name} centres must be strictly increasing")));
    }
    Ok(())
}

impl Jpd {
    pub fn new(hs: Vec<f64>, te: Vec<f64>, occurrence: Vec<f64>) -> Result<Self> {
        check_axis("height", &hs)?;
        check_axis("period", &te)?;
        if occurrence.len() != hs.len() * te.len() {
            return Err(Error::invalid(format!(
                "JPD has {} cells, expected {} x {}",
                occurrence.len(),
                hs.len(),
                te.len()
            )));
        }
        if let Some(i) = occurrence.iter().position(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(Error::invalid(format!(
                "JPD cell (Hs = {}, Te = {}) has occurrence {}",
                hs[i / te.len()],
                te[i % te.len()],
                occurrence[i]
            )));
        }
        let jpd = Jpd { hs, te, occurrence };
        if jpd.total() > 1.0 + TOTAL_SLACK {
            return Err(Error::invalid(format!(
                "JPD occurrences sum to {} > 1",
                jpd.total()
            )));
        }
        Ok(jpd)
    }

    /// Equal occurrence in every cell, summing to `total`.
    pub fn uniform(hs: Vec<f64>, te: Vec<f64>, total: f64) -> Result<Self> {
        let n = hs.len() * te.len();
        let p = if n == 0 { 0.0 } else { total / n as f64 };
        Jpd::new(hs, te, vec![p; n])
    }

    pub fn hs(&self) -> &[f64] {
        &self.hs
    }

    pub fn te(&self) -> &[f64] {
        &self.te
    }

    pub fn occurrence(&self, hs_index: usize, te_index: usize) -> f64 {
        self.occurrence[hs_index * self.te.len() + te_index]
    }

    pub fn cells(&self) -> &[f64] {
        &self.occurrence
    }

    pub fn total(&self) -> f64 {
        self.occurrence.iter().sum()
    }

    /// Same axes with occurrences multiplied by `factor`. Not re-validated,
    /// so a scaled matrix may exceed one in total.
    pub fn scaled(&self, factor: f64) -> Self {
        Jpd {
            occurrence: self.occurrence.iter().map(|p| p * factor).collect(),
            ..self.clone()
        }
    }

    /// Same occurrences on a height axis multiplied by `factor`.
    pub fn with_heights_scaled(&self, factor: f64) -> Self {
        Jpd {
            hs: self.hs.iter().map(|h| h * factor).collect(),
            ..self.clone()
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "{HEADER_CORNER}")?;
        for t in &self.te {
            write!(out, ",{t}")?;
        }
        writeln!(out)?;
        for (i, h) in self.hs.iter().enumerate() {
            write!(out, "{h}")?;
            for j in 0..self.te.len() {
                write!(out, ",{}", self.occurrence(i, j))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Parse a JPD: header row `hs_m\te_s,<periods...>`, then one row per wave
/// height with its occurrence fractions.
pub fn load_jpd<R: Read>(reader: R, source_name: &str) -> Result<Jpd> {
    let err = |line: usize, column: usize, message: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        column,
        message,
    };
    let number = |field: &str, line: usize, column: usize| -> Result<f64> {
        field
            .trim()
            .parse::<f64>()
            .map_err(|_| err(line, column, format!("'{}' is not a number", field.trim())))
    };

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(reader);

    let mut records = rdr.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| err(1, 0, e.to_string()))?,
        None => return Err(err(1, 0, "empty JPD file".into())),
    };
    let header_line = header.position().map(|p| p.line() as usize).unwrap_or(1);
    if header.get(0).map(str::trim) != Some(HEADER_CORNER) {
        return Err(err(
            header_line,
            1,
            format!("header must start with '{HEADER_CORNER}'"),
        ));
    }
    let te = header
        .iter()
        .enumerate()
        .skip(1)
        .map(|(c, f)| number(f, header_line, c + 1))
        .collect::<Result<Vec<f64>>>()?;
    if te.is_empty() {
        return Err(err(header_line, 0, "no period columns".into()));
    }

    let mut hs = Vec::new();
    let mut occurrence = Vec::new();
    let mut last_line = header_line;
    for rec in records {
        let rec = rec.map_err(|e| err(0, 0, e.to_string()))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        last_line = line;
        if rec.len() != te.len() + 1 {
            return Err(err(
                line,
                0,
                format!("expected {} fields, found {} (ragged row)", te.len() + 1, rec.len()),
            ));
        }
        hs.push(number(&rec[0], line, 1)?);
        for (c, field) in rec.iter().enumerate().skip(1) {
            let p = number(field, line, c + 1)?;
            if !(p >= 0.0 && p.is_finite()) {
                return Err(err(line, c + 1, format!("occurrence {p} must be >= 0")));
            }
            occurrence.push(p);
        }
    }
    if hs.is_empty() {
        return Err(err(header_line, 0, "no wave-height rows".into()));
    }
    let total: f64 = occurrence.iter().sum();
    if total > 1.0 + TOTAL_SLACK {
        return Err(err(last_line, 0, format!("occurrences sum to {total} > 1")));
    }
    Jpd::new(hs, te, occurrence).map_err(|e| err(0, 0, e.to_string()))
}

pub fn load_jpd_path(path: &Path) -> Result<Jpd> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_jpd(file, &path.display().to_string())
}
