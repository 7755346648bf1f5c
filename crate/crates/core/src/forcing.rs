//! Forcing builders for the torque-driven scenarios and for regular waves.
//!
//! Flap index 0 is the left flap (torque studies) or the front flap (wave
//! studies); index 1 is the right or back flap.

use std::f64::consts::PI;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{FlapForcing, ForcingSpec};
use crate::error::{Error, Result};
use crate::hydro::{angular_frequency, solve_dispersion, wavelength, Environment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// One isolated flap.
    SingleBaseline,
    RightOnlyLeftFixed,
    RightOnlyLeftFree,
    InPhase,
    OutOfPhase,
    /// Right flap lags by 2π·d/λ.
    ArbitraryPhase,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::SingleBaseline,
        ScenarioKind::RightOnlyLeftFixed,
        ScenarioKind::RightOnlyLeftFree,
        ScenarioKind::InPhase,
        ScenarioKind::OutOfPhase,
        ScenarioKind::ArbitraryPhase,
    ];

    /// The five dual-flap cases compared against the single flap.
    pub const DUAL: [ScenarioKind; 5] = [
        ScenarioKind::RightOnlyLeftFixed,
        ScenarioKind::RightOnlyLeftFree,
        ScenarioKind::InPhase,
        ScenarioKind::OutOfPhase,
        ScenarioKind::ArbitraryPhase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::SingleBaseline => "single",
            ScenarioKind::RightOnlyLeftFixed => "right-only-left-fixed",
            ScenarioKind::RightOnlyLeftFree => "right-only-left-free",
            ScenarioKind::InPhase => "in-phase",
            ScenarioKind::OutOfPhase => "out-of-phase",
            ScenarioKind::ArbitraryPhase => "arbitrary-phase",
        }
    }

    pub fn is_dual(self) -> bool {
        self != ScenarioKind::SingleBaseline
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s || (s == "single-baseline" && *k == ScenarioKind::SingleBaseline))
            .ok_or_else(|| Error::invalid(format!("unknown scenario '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorqueScenario {
    pub kind: ScenarioKind,
    #[serde(rename = "amplitude_Nm")]
    pub amplitude: f64,
    #[serde(rename = "period_s")]
    pub period: f64,
    /// Separation; ignored by the single baseline.
    #[serde(rename = "distance_m")]
    pub distance: f64,
}

impl TorqueScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::invalid(format!(
                "torque amplitude must be > 0, got {}",
                self.amplitude
            )));
        }
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(Error::invalid(format!("period must be > 0, got {}", self.period)));
        }
        if self.kind.is_dual() && !(self.distance >= 0.0 && self.distance.is_finite()) {
            return Err(Error::invalid(format!(
                "distance must be >= 0, got {}",
                self.distance
            )));
        }
        Ok(())
    }
}

pub fn build_torque_scenario(s: &TorqueScenario, env: &Environment) -> Result<ForcingSpec> {
    s.validate()?;
    let omega = angular_frequency(s.period);
    let t0 = s.amplitude;
    let spec = match s.kind {
        ScenarioKind::SingleBaseline => ForcingSpec::single(t0, 0.0, omega),
        ScenarioKind::RightOnlyLeftFixed => {
            ForcingSpec::dual(FlapForcing::fixed(), FlapForcing::free(t0, 0.0), omega)
        }
        ScenarioKind::RightOnlyLeftFree => {
            ForcingSpec::dual(FlapForcing::free(0.0, 0.0), FlapForcing::free(t0, 0.0), omega)
        }
        ScenarioKind::InPhase => {
            ForcingSpec::dual(FlapForcing::free(t0, 0.0), FlapForcing::free(t0, 0.0), omega)
        }
        ScenarioKind::OutOfPhase => {
            ForcingSpec::dual(FlapForcing::free(t0, 0.0), FlapForcing::free(t0, PI), omega)
        }
        ScenarioKind::ArbitraryPhase => {
            let lambda = wavelength(s.period, env)?;
            let phase = 2.0 * PI * s.distance / lambda;
            ForcingSpec::dual(FlapForcing::free(t0, 0.0), FlapForcing::free(t0, phase), omega)
        }
    };
    Ok(spec)
}

/// A regular incident wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveCondition {
    /// Crest-to-trough height.
    #[serde(rename = "height_m")]
    pub height: f64,
    #[serde(rename = "period_s")]
    pub period: f64,
    /// 0 is normal incidence on the flap width.
    #[serde(rename = "heading_deg", default)]
    pub heading_deg: f64,
}

impl WaveCondition {
    pub fn new(height: f64, period: f64, heading_deg: f64) -> Self {
        WaveCondition {
            height,
            period,
            heading_deg,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.height > 0.0 && self.height.is_finite()) {
            return Err(Error::invalid(format!(
                "wave height must be > 0, got {}",
                self.height
            )));
        }
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(Error::invalid(format!("period must be > 0, got {}", self.period)));
        }
        if !(0.0..90.0).contains(&self.heading_deg) {
            return Err(Error::invalid(format!(
                "heading must lie in [0, 90) degrees, got {}",
                self.heading_deg
            )));
        }
        Ok(())
    }
}

/// Wave-to-torque map: excitation torque per metre of wave amplitude over a
/// period grid, plus the back-flap transmission `τ(d) = 1 − η·e^{−d/λ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitationTransfer {
    #[serde(rename = "periods_s")]
    periods: Vec<f64>,
    #[serde(rename = "gamma_Nm_per_m")]
    gamma: Vec<f64>,
    #[serde(rename = "back_flap_eta")]
    pub eta: f64,
}

#[allow(non_snake_case)]
#[derive(Debug, Deserialize)]
struct TransferRow {
    period_s: f64,
    gamma_Nm_per_m: f64,
}

impl ExcitationTransfer {
    pub const DEFAULT_ETA: f64 = 0.1;

    /// Front-flap torque amplitude the reference Γ produces for a 1.75 m
    /// wave.
    pub const REFERENCE_TORQUE: f64 = 1.0e6;

    pub fn new(periods: Vec<f64>, gamma: Vec<f64>, eta: f64) -> Result<Self> {
        if periods.is_empty() {
            return Err(Error::invalid("excitation transfer table is empty"));
        }
        if periods.len() != gamma.len() {
            return Err(Error::invalid("transfer periods and values differ in length"));
        }
        if periods.iter().any(|p| !p.is_finite()) || periods.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("transfer periods must be strictly increasing"));
        }
        if gamma.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
            return Err(Error::invalid("transfer values must be > 0"));
        }
        if !(0.0..1.0).contains(&eta) {
            return Err(Error::invalid(format!("eta must lie in [0, 1), got {eta}")));
        }
        Ok(ExcitationTransfer {
            periods,
            gamma,
            eta,
        })
    }

    /// Constant Γ calibrated so a 1.75 m wave gives a 1 MN·m front-flap
    /// torque amplitude.
    pub fn reference() -> Self {
        let gamma = Self::REFERENCE_TORQUE / (1.75 / 2.0);
        ExcitationTransfer::new(vec![7.5, 11.5], vec![gamma, gamma], Self::DEFAULT_ETA).unwrap()
    }

    /// Parse the `period_s,gamma_Nm_per_m` CSV format.
    pub fn from_csv_reader<R: Read>(reader: R, source_name: &str, eta: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut rows: Vec<TransferRow> = Vec::new();
        for (i, rec) in rdr.deserialize::<TransferRow>().enumerate() {
            rows.push(rec.map_err(|e| Error::Parse {
                source_name: source_name.to_string(),
                line: e.position().map(|p| p.line() as usize).unwrap_or(i + 2),
                column: 0,
                message: e.to_string(),
            })?);
        }
        rows.sort_by(|a, b| a.period_s.total_cmp(&b.period_s));
        ExcitationTransfer::new(
            rows.iter().map(|r| r.period_s).collect(),
            rows.iter().map(|r| r.gamma_Nm_per_m).collect(),
            eta,
        )
        .map_err(|e| Error::invalid(format!("{source_name}: {e}")))
    }

    pub fn from_path(path: &Path, eta: f64) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file, &path.display().to_string(), eta)
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    pub fn values(&self) -> &[f64] {
        &self.gamma
    }

    /// The same map with the back-flap attenuation switched off.
    pub fn without_attenuation(&self) -> Self {
        ExcitationTransfer {
            eta: 0.0,
            ..self.clone()
        }
    }

    /// Back-flap transmission factor at separation `distance`.
    ///
    /// `distance = 0` means coincident flaps and transmits fully.
    pub fn transmission(&self, distance: f64, wavelength: f64) -> f64 {
        if distance <= 0.0 {
            1.0
        } else {
            1.0 - self.eta * (-distance / wavelength).exp()
        }
    }
}

/// Γ(T) by linear interpolation, clamped at the grid edges.
pub fn transfer_at(xfer: &ExcitationTransfer, period: f64) -> Result<f64> {
    let (p, g) = (&xfer.periods, &xfer.gamma);
    if p.is_empty() {
        return Err(Error::invalid("excitation transfer table is empty"));
    }
    if !period.is_finite() {
        return Err(Error::invalid("non-finite period"));
    }
    let last = p.len() - 1;
    if period <= p[0] {
        return Ok(g[0]);
    }
    if period >= p[last] {
        return Ok(g[last]);
    }
    let hi = p.partition_point(|&x| x <= period);
    let lo = hi - 1;
    let t = (period - p[lo]) / (p[hi] - p[lo]);
    Ok(g[lo] + (g[hi] - g[lo]) * t)
}

/// Regular-wave torque on a front/back flap pair separated by `distance`
/// (0 for a single flap position).
///
/// Front: `Γ·(H/2)·cos β` at phase 0. Back: scaled by `τ(d)` and lagging by
/// `k·d·cos β`.
pub fn build_wave_forcing(
    w: &WaveCondition,
    distance: f64,
    xfer: &ExcitationTransfer,
    env: &Environment,
) -> Result<ForcingSpec> {
    w.validate()?;
    if !(distance >= 0.0 && distance.is_finite()) {
        return Err(Error::invalid(format!("distance must be >= 0, got {distance}")));
    }
    let cos_b = w.heading_deg.to_radians().cos();
    let front = transfer_at(xfer, w.period)? * 0.5 * w.height * cos_b;
    let k = solve_dispersion(w.period, env)?;
    let tau = xfer.transmission(distance, 2.0 * PI / k);
    let omega = angular_frequency(w.period);
    Ok(ForcingSpec::dual(
        FlapForcing::free(front, 0.0),
        FlapForcing::free(tau * front, -k * distance * cos_b),
        omega,
    ))
}

/// Torque on an isolated flap in the same wave.
pub fn build_single_wave_forcing(
    w: &WaveCondition,
    xfer: &ExcitationTransfer,
) -> Result<ForcingSpec> {
    w.validate()?;
    let amp = transfer_at(xfer, w.period)? * 0.5 * w.height * w.heading_deg.to_radians().cos();
    Ok(ForcingSpec::single(amp, 0.0, angular_frequency(w.period)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env() -> Environment {
        Environment::deep()
    }

    fn scenario(kind: ScenarioKind, distance: f64, period: f64) -> TorqueScenario {
        TorqueScenario {
            kind,
            amplitude: 0.6e6,
            period,
            distance,
        }
    }

    #[test]
    fn scenario_layouts() {
        let f = build_torque_scenario(&scenario(ScenarioKind::SingleBaseline, 0.0, 9.5), &env())
            .unwrap();
        assert_eq!(f.flaps, vec![FlapForcing::free(0.6e6, 0.0)]);

        let f = build_torque_scenario(&scenario(ScenarioKind::RightOnlyLeftFixed, 10.0, 9.5), &env())
            .unwrap();
        assert!(f.flaps[0].fixed);
        assert_eq!(f.flaps[1], FlapForcing::free(0.6e6, 0.0));

        let f = build_torque_scenario(&scenario(ScenarioKind::RightOnlyLeftFree, 10.0, 9.5), &env())
            .unwrap();
        assert_eq!(f.flaps[0], FlapForcing::free(0.0, 0.0));

        let f = build_torque_scenario(&scenario(ScenarioKind::InPhase, 10.0, 9.5), &env()).unwrap();
        assert_eq!(f.flaps[0], f.flaps[1]);

        let f = build_torque_scenario(&scenario(ScenarioKind::OutOfPhase, 10.0, 9.5), &env())
            .unwrap();
        assert_eq!((f.flaps[0].phase, f.flaps[1].phase), (0.0, PI));
        assert!((f.omega - 2.0 * PI / 9.5).abs() < 1e-15);
    }

    #[test]
    fn arbitrary_phase_law() {
        let f = build_torque_scenario(&scenario(ScenarioKind::ArbitraryPhase, 45.0, 9.5), &env())
            .unwrap();
        assert!((f.flaps[1].phase - 2.006_577_936_128_360_7).abs() < 1e-9);
        assert_eq!(f.flaps[0].phase, 0.0);
    }

    #[test]
    fn arbitrary_phase_one_wavelength_is_in_phase() {
        let lambda = wavelength(9.5, &env()).unwrap();
        let f = build_torque_scenario(&scenario(ScenarioKind::ArbitraryPhase, lambda, 9.5), &env())
            .unwrap();
        let wrapped = f.flaps[1].phase.rem_euclid(2.0 * PI);
        assert!(wrapped < 1e-12 || (2.0 * PI - wrapped) < 1e-12);
    }

    #[test]
    fn scenario_names_round_trip() {
        for k in ScenarioKind::ALL {
            assert_eq!(k.name().parse::<ScenarioKind>().unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(serde_json::from_str::<ScenarioKind>(&json).unwrap(), k);
        }
        assert!("sideways".parse::<ScenarioKind>().is_err());
    }

    #[test]
    fn scenario_rejects_bad_values() {
        let mut s = scenario(ScenarioKind::InPhase, 10.0, 9.5);
        s.amplitude = 0.0;
        assert!(build_torque_scenario(&s, &env()).is_err());
        let s = scenario(ScenarioKind::InPhase, 10.0, -1.0);
        assert!(build_torque_scenario(&s, &env()).is_err());
    }

    #[test]
    fn coincident_flaps_identical() {
        let xfer = ExcitationTransfer::reference();
        let w = WaveCondition::new(1.75, 8.5, 0.0);
        let f = build_wave_forcing(&w, 0.0, &xfer, &env()).unwrap();
        assert_eq!(f.flaps[0].amplitude, f.flaps[1].amplitude);
        assert!((f.flaps[0].amplitude - 1.0e6).abs() < 1e-6);
        assert_eq!(f.flaps[1].phase, 0.0);
    }

    #[test]
    fn back_flap_lag() {
        let xfer = ExcitationTransfer::reference();
        let f = build_wave_forcing(&WaveCondition::new(1.75, 8.5, 0.0), 55.0, &xfer, &env())
            .unwrap();
        assert!((f.flaps[1].phase + 3.063_483_654_119_846_5).abs() < 1e-9);
        assert!(f.flaps[1].amplitude < f.flaps[0].amplitude);
    }

    #[test]
    fn oblique_heading_scales_amplitude() {
        let xfer = ExcitationTransfer::reference();
        let w0 = build_wave_forcing(&WaveCondition::new(1.75, 8.5, 0.0), 45.0, &xfer, &env())
            .unwrap();
        let w45 = build_wave_forcing(&WaveCondition::new(1.75, 8.5, 45.0), 45.0, &xfer, &env())
            .unwrap();
        for i in 0..2 {
            let r = w45.flaps[i].amplitude / w0.flaps[i].amplitude;
            assert!((r - 0.5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn heading_must_be_below_ninety() {
        let xfer = ExcitationTransfer::reference();
        let w = WaveCondition::new(1.75, 8.5, 90.0);
        assert!(matches!(
            build_wave_forcing(&w, 45.0, &xfer, &env()),
            Err(Error::InvalidInput(_))
        ));
        assert!(build_wave_forcing(&WaveCondition::new(0.0, 8.5, 0.0), 45.0, &xfer, &env()).is_err());
    }

    #[test]
    fn transfer_interpolation() {
        let xfer = ExcitationTransfer::new(vec![7.5, 9.5, 11.5], vec![1.0, 3.0, 2.0], 0.1).unwrap();
        assert_eq!(transfer_at(&xfer, 9.5).unwrap(), 3.0);
        assert_eq!(transfer_at(&xfer, 8.5).unwrap(), 2.0);
        assert_eq!(transfer_at(&xfer, 5.0).unwrap(), 1.0);
        assert_eq!(transfer_at(&xfer, 20.0).unwrap(), 2.0);
    }

    #[test]
    fn transfer_reference_calibration() {
        let g = transfer_at(&ExcitationTransfer::reference(), 8.5).unwrap();
        assert!((g - 1.0e6 / 0.875).abs() < 1e-6);
        assert!((g * 1.75 / 2.0 - 1.0e6).abs() < 1e-6);
    }

    #[test]
    fn transfer_csv() {
        let csv = "period_s,gamma_Nm_per_m\n9.5,2.0\n7.5,1.0\n";
        let xfer = ExcitationTransfer::from_csv_reader(csv.as_bytes(), "t", 0.1).unwrap();
        assert_eq!(xfer.periods(), &[7.5, 9.5]);
        assert!(ExcitationTransfer::from_csv_reader("period_s,gamma_Nm_per_m\n".as_bytes(), "t", 0.1)
            .is_err());
        assert!(ExcitationTransfer::from_csv_reader(
            "period_s,gamma_Nm_per_m\n7.5,-1\n".as_bytes(),
            "t",
            0.1
        )
        .is_err());
        assert!(ExcitationTransfer::new(vec![7.5], vec![1.0], 1.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn arbitrary_phase_periodic(d in 0.0f64..200.0, period in 6.0f64..13.0) {
                let lambda = wavelength(period, &env()).unwrap();
                let a = build_torque_scenario(&scenario(ScenarioKind::ArbitraryPhase, d, period), &env()).unwrap();
                let b = build_torque_scenario(&scenario(ScenarioKind::ArbitraryPhase, d + lambda, period), &env()).unwrap();
                let diff = (b.flaps[1].phase - a.flaps[1].phase - 2.0 * PI).abs();
                prop_assert!(diff < 1e-9);
            }

            #[test]
            fn amplitude_decreasing_in_heading(b1 in 0.0f64..89.0, step in 0.01f64..1.0, d in 0.0f64..100.0) {
                let xfer = ExcitationTransfer::reference();
                let lo = build_wave_forcing(&WaveCondition::new(1.75, 8.5, b1), d, &xfer, &env()).unwrap();
                let hi = build_wave_forcing(&WaveCondition::new(1.75, 8.5, (b1 + step).min(89.99)), d, &xfer, &env()).unwrap();
                prop_assert!(hi.flaps[0].amplitude < lo.flaps[0].amplitude);
            }

            #[test]
            fn back_never_exceeds_front(d in 0.0f64..300.0, period in 7.0f64..12.0, beta in 0.0f64..89.0) {
                let xfer = ExcitationTransfer::reference();
                let f = build_wave_forcing(&WaveCondition::new(2.0, period, beta), d, &xfer, &env()).unwrap();
                prop_assert!(f.flaps[1].amplitude <= f.flaps[0].amplitude);
                if d > 0.0 {
                    prop_assert!(f.flaps[1].amplitude < f.flaps[0].amplitude);
                }
                let k = solve_dispersion(period, &env()).unwrap();
                let lag = (f.flaps[1].phase - f.flaps[0].phase).abs();
                prop_assert!((lag - k * d * beta.to_radians().cos()).abs() < 1e-12);
            }
        }
    }
}
