use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::plan::{Study, SweepPlan};
use crate::error::{Error, Result};
use crate::forcing::ScenarioKind;
use crate::model::{Model, ModelDescriptor};

/// Where a separation falls relative to the incident wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    /// 0.06 ≤ d/λ ≤ 0.11
    Short,
    /// 0.25 ≤ d/λ ≤ 0.80
    Long,
    Other,
}

impl Band {
    pub fn name(self) -> &'static str {
        match self {
            Band::Short => "short",
            Band::Long => "long",
            Band::Other => "other",
        }
    }
}

/// Classifies d/λ after rounding to two decimals.
pub fn classify_band(ratio: f64) -> Band {
    let r = (ratio * 100.0).round() / 100.0;
    if (0.06..=0.11).contains(&r) {
        Band::Short
    } else if (0.25..=0.80).contains(&r) {
        Band::Long
    } else {
        Band::Other
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlapResult {
    pub rms_rotation_rad: f64,
    pub amplitude_rad: f64,
    pub phase_rad: f64,
    pub power_W: f64,
    /// RMS rotation over the isolated-flap RMS for the same forcing.
    pub rms_ratio: Option<f64>,
}

/// One grid point. Flap 0 is the left (torque studies) or front (wave
/// studies) flap.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub study: Study,
    pub scenario: Option<ScenarioKind>,
    pub distance_m: Option<f64>,
    pub period_s: f64,
    pub torque_Nm: Option<f64>,
    pub wave_height_m: Option<f64>,
    pub heading_deg: Option<f64>,
    pub d_over_lambda: Option<f64>,
    pub band: Option<Band>,
    pub flaps: Vec<FlapResult>,
    pub single_rms_rad: Option<f64>,
    pub single_power_W: Option<f64>,
    pub total_power_W: Option<f64>,
    /// Heading study only: 1 − P(β)/P(0).
    pub power_loss_fraction: Option<f64>,
    pub steady: bool,
    pub error: Option<String>,
}

impl SweepRow {
    pub(crate) fn new(study: Study, period: f64) -> Self {
        SweepRow {
            study,
            scenario: None,
            distance_m: None,
            period_s: period,
            torque_Nm: None,
            wave_height_m: None,
            heading_deg: None,
            d_over_lambda: None,
            band: None,
            flaps: Vec::new(),
            single_rms_rad: None,
            single_power_W: None,
            total_power_W: None,
            power_loss_fraction: None,
            steady: false,
            error: None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    pub fn flap(&self, i: usize) -> Option<&FlapResult> {
        self.flaps.get(i)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub study: Study,
    pub model: ModelDescriptor,
    pub plan: SweepPlan,
    pub rows: Vec<SweepRow>,
}

const COLUMNS: [(&str, &str); 22] = [
    ("study", "-"),
    ("scenario", "-"),
    ("distance_m", "m"),
    ("period_s", "s"),
    ("torque_Nm", "N m"),
    ("wave_height_m", "m"),
    ("heading_deg", "deg"),
    ("d_over_lambda", "-"),
    ("band", "short|long|other"),
    ("rms_0_rad", "rad"),
    ("rms_1_rad", "rad"),
    ("amplitude_0_rad", "rad"),
    ("amplitude_1_rad", "rad"),
    ("phase_0_rad", "rad"),
    ("phase_1_rad", "rad"),
    ("ratio_0", "-"),
    ("ratio_1", "-"),
    ("power_0_W", "W"),
    ("power_1_W", "W"),
    ("total_power_W", "W"),
    ("loss_fraction", "-"),
    ("steady", "bool"),
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl SweepReport {
    pub(crate) fn new(study: Study, plan: &SweepPlan, model: &Model, rows: Vec<SweepRow>) -> Self {
        SweepReport {
            study,
            model: model.descriptor(),
            plan: plan.clone(),
            rows,
        }
    }

    pub fn failed_rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| !r.is_ok())
    }

    /// Flat table, one line per grid point. The first line is a `#` comment
    /// listing every column with its unit; flap 0 is left/front, flap 1
    /// right/back.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        let mut comment = String::from("# columns:");
        for (name, unit) in COLUMNS {
            let _ = write!(comment, " {name} [{unit}];");
        }
        comment.push_str(" error [-]; flap 0 = left/front, flap 1 = right/back");
        writeln!(out, "{comment}").map_err(|e| Error::io("<csv>", e))?;

        let mut w = csv::Writer::from_writer(out);
        let header: Vec<&str> = COLUMNS.iter().map(|c| c.0).chain(["error"]).collect();
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rows {
            let f = |i: usize, g: fn(&FlapResult) -> Option<f64>| opt(r.flap(i).and_then(g));
            let rec = vec![
                r.study.to_string(),
                r.scenario.map(|s| s.name().to_string()).unwrap_or_default(),
                opt(r.distance_m),
                r.period_s.to_string(),
                opt(r.torque_Nm),
                opt(r.wave_height_m),
                opt(r.heading_deg),
                opt(r.d_over_lambda),
                r.band.map(|b| b.name().to_string()).unwrap_or_default(),
                f(0, |x| Some(x.rms_rotation_rad)),
                f(1, |x| Some(x.rms_rotation_rad)),
                f(0, |x| Some(x.amplitude_rad)),
                f(1, |x| Some(x.amplitude_rad)),
                f(0, |x| Some(x.phase_rad)),
                f(1, |x| Some(x.phase_rad)),
                f(0, |x| x.rms_ratio),
                f(1, |x| x.rms_ratio),
                f(0, |x| Some(x.power_W)),
                f(1, |x| Some(x.power_W)),
                opt(r.total_power_W),
                opt(r.power_loss_fraction),
                r.steady.to_string(),
                r.error.clone().unwrap_or_default(),
            ];
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// Rows nested by the study's grid axes, outermost first.
    pub fn to_json(&self) -> Value {
        let axes: &[(&str, fn(&SweepRow) -> Value)] = match self.study {
            Study::Torque => &[
                ("scenario", |r| json!(r.scenario)),
                ("distance_m", |r| json!(r.distance_m)),
                ("period_s", |r| json!(r.period_s)),
            ],
            Study::Wave => &[
                ("distance_m", |r| json!(r.distance_m)),
                ("period_s", |r| json!(r.period_s)),
            ],
            Study::Heading => &[("heading_deg", |r| json!(r.heading_deg))],
        };
        let refs: Vec<&SweepRow> = self.rows.iter().collect();
        json!({
            "study": self.study,
            "model": self.model,
            "plan": self.plan,
            "axes": axes.iter().map(|a| a.0).collect::<Vec<_>>(),
            "results": nest(&refs, axes),
        })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::invalid(format!("writing csv: {e}"))
}

// Groups consecutive rows sharing a key; rows arrive in grid order, so each
// group is contiguous.
fn nest(rows: &[&SweepRow], axes: &[(&str, fn(&SweepRow) -> Value)]) -> Value {
    let Some(((name, key), rest)) = axes.split_first() else {
        return json!(rows);
    };
    let mut groups: Vec<(Value, Vec<&SweepRow>)> = Vec::new();
    for &r in rows {
        let k = key(r);
        match groups.last_mut() {
            Some((last, members)) if *last == k => members.push(r),
            _ => groups.push((k, vec![r])),
        }
    }
    Value::Array(
        groups
            .into_iter()
            .map(|(k, members)| {
                let mut m = Map::new();
                m.insert((*name).to_string(), k);
                let child = if rest.is_empty() { "rows" } else { rest[0].0 };
                let nested = nest(&members, rest);
                m.insert(if rest.is_empty() { child.to_string() } else { "by".to_string() }, nested);
                Value::Object(m)
            })
            .collect(),
    )
}
