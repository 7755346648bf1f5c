//! Built-in oracle suite on seeded random well-posed systems.
//!
//! Three properties per case:
//! - the time-domain steady response matches the frequency-domain solve
//!   (amplitude within 1%, phase within 0.02 rad);
//! - mean input power equals mean dissipated power within 1%;
//! - doubling the forcing doubles the response.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    freq_domain_solve, harmonic_fit, integrate, power_balance, Dof, FlapForcing, ForcingSpec,
    IntegrationConfig, SystemMatrices,
};
use crate::error::Result;

pub const AMPLITUDE_TOL: f64 = 0.01;
pub const PHASE_TOL: f64 = 0.02;
pub const BALANCE_TOL: f64 = 0.01;
pub const LINEARITY_TOL: f64 = 1e-6;

/// Deliberate faults, for checking that the suite catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Dissipated power is accounted with the damping matrix negated.
    FlipDampingSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub cases: usize,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            cases: 20,
            seed: 0,
            fault: None,
        }
    }
}

/// One randomized system and its forcing, in full.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyCase {
    pub index: usize,
    pub system: SystemMatrices,
    pub forcing: ForcingSpec,
    pub damping_ratio: f64,
    /// Forcing frequency over the undamped natural frequency.
    pub frequency_ratio: f64,
}

impl fmt::Display for VerifyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.system;
        write!(
            f,
            "case {}: dof={} M={:?} C={:?} K={:?} omega={} forcing={:?} zeta={} omega/omega_n={}",
            self.index,
            s.dof_count(),
            s.inertia,
            s.damping,
            s.stiffness,
            self.forcing.omega,
            self.forcing
                .flaps
                .iter()
                .map(|fl| (fl.amplitude, fl.phase))
                .collect::<Vec<_>>(),
            self.damping_ratio,
            self.frequency_ratio
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    OracleEquivalence,
    EnergyBalance,
    Linearity,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::OracleEquivalence => "oracle-equivalence",
            Property::EnergyBalance => "energy-balance",
            Property::Linearity => "linearity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub property: Property,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseOutcome {
    pub case: VerifyCase,
    pub properties: Vec<PropertyOutcome>,
}

impl CaseOutcome {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub cases: Vec<CaseOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(CaseOutcome::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseOutcome> {
        self.cases.iter().filter(|c| !c.passed())
    }

    /// Pass count per property, in suite order.
    pub fn summary(&self) -> Vec<(Property, usize, usize)> {
        [Property::OracleEquivalence, Property::EnergyBalance, Property::Linearity]
            .into_iter()
            .map(|prop| {
                let all = self.cases.iter().flat_map(|c| &c.properties).filter(|p| p.property == prop);
                let (mut pass, mut total) = (0, 0);
                for p in all {
                    total += 1;
                    pass += p.passed as usize;
                }
                (prop, pass, total)
            })
            .collect()
    }
}

/// Random system with damping ratio in [0.02, 1.0] and forcing frequency in
/// [0.5, 2] times resonance. Odd indices are symmetric two-flap systems.
pub fn random_case(rng: &mut impl Rng, index: usize) -> VerifyCase {
    let inertia: f64 = rng.gen_range(1.0e6..2.0e7);
    let omega_n: f64 = rng.gen_range(0.4..1.2);
    let stiffness = inertia * omega_n * omega_n;
    let zeta = rng.gen_range(0.02..=1.0);
    let damping = 2.0 * zeta * (stiffness * inertia).sqrt();
    let ratio = rng.gen_range(0.5..=2.0);
    let omega = ratio * omega_n;
    let amplitude = rng.gen_range(1.0e5..2.0e6);

    let (dof, ci, cd, flaps) = if index % 2 == 0 {
        (Dof::One, 0.0, 0.0, vec![FlapForcing::free(amplitude, rng.gen_range(-3.0..3.0))])
    } else {
        let ci = rng.gen_range(-0.3..0.3) * inertia;
        let cd = rng.gen_range(-0.3..0.3) * damping;
        let phase = match index % 6 {
            1 => 0.0,
            3 => std::f64::consts::PI,
            _ => rng.gen_range(-3.0..3.0),
        };
        (
            Dof::Two,
            ci,
            cd,
            vec![FlapForcing::free(amplitude, 0.0), FlapForcing::free(amplitude, phase)],
        )
    };

    VerifyCase {
        index,
        system: SystemMatrices {
            inertia: [[inertia, ci], [ci, inertia]],
            damping: [[damping, cd], [cd, damping]],
            stiffness: [stiffness, stiffness],
            dof,
        },
        forcing: ForcingSpec { omega, flaps },
        damping_ratio: zeta,
        frequency_ratio: ratio,
    }
}

pub fn random_cases(count: usize, seed: u64) -> Vec<VerifyCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_case(&mut rng, i)).collect()
}

fn wrap(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = a.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r - two_pi
    } else {
        r
    }
}

fn outcome(property: Property, passed: bool, detail: String) -> PropertyOutcome {
    PropertyOutcome {
        property,
        passed,
        detail,
    }
}

fn failed(property: Property, err: &crate::Error) -> PropertyOutcome {
    outcome(property, false, format!("error: {err}"))
}

/// Runs all three properties on one case.
pub fn verify_case(case: &VerifyCase, cfg: &IntegrationConfig, fault: Option<Fault>) -> CaseOutcome {
    let properties = match run_properties(case, cfg, fault) {
        Ok(p) => p,
        Err(e) => [Property::OracleEquivalence, Property::EnergyBalance, Property::Linearity]
            .iter()
            .map(|&p| failed(p, &e))
            .collect(),
    };
    CaseOutcome {
        case: case.clone(),
        properties,
    }
}

fn run_properties(
    case: &VerifyCase,
    cfg: &IntegrationConfig,
    fault: Option<Fault>,
) -> Result<Vec<PropertyOutcome>> {
    let (sys, forcing) = (&case.system, &case.forcing);
    let record = integrate(sys, forcing, cfg)?;
    let window = record.measure_window(cfg.measure_periods)?;
    let oracle = freq_domain_solve(sys, forcing)?;

    let fits = (0..record.flap_count())
        .map(|i| harmonic_fit(&record.time, &record.rotation[i], forcing.omega, window.clone()))
        .collect::<Result<Vec<_>>>()?;

    // oracle equivalence
    let mut worst_amp: f64 = 0.0;
    let mut worst_phase: f64 = 0.0;
    for (i, fit) in fits.iter().enumerate() {
        let want = oracle.amplitude(i);
        if want > 0.0 {
            worst_amp = worst_amp.max((fit.amplitude - want).abs() / want);
            worst_phase = worst_phase.max(wrap(fit.phase - oracle.phase(i)).abs());
        } else {
            worst_amp = worst_amp.max(fit.amplitude);
        }
    }
    let mut out = vec![outcome(
        Property::OracleEquivalence,
        worst_amp <= AMPLITUDE_TOL && worst_phase <= PHASE_TOL && record.steady,
        format!(
            "amplitude error {worst_amp:.3e}, phase error {worst_phase:.3e} rad, steady {}",
            record.steady
        ),
    )];

    // energy balance
    let accounting = match fault {
        Some(Fault::FlipDampingSign) => {
            let mut s = *sys;
            for row in &mut s.damping {
                for c in row {
                    *c = -*c;
                }
            }
            s
        }
        None => *sys,
    };
    let balance = power_balance(&record, &accounting, forcing, cfg)?;
    let err = balance.relative_error();
    out.push(outcome(
        Property::EnergyBalance,
        err <= BALANCE_TOL,
        format!(
            "input {:.6e} W, dissipated {:.6e} W, relative error {err:.3e}",
            balance.input, balance.dissipated
        ),
    ));

    // linearity
    let doubled = forcing.scaled(2.0);
    let record2 = integrate(sys, &doubled, cfg)?;
    let mut worst: f64 = 0.0;
    for (i, fit) in fits.iter().enumerate() {
        let fit2 = harmonic_fit(&record2.time, &record2.rotation[i], forcing.omega, window.clone())?;
        let scale = fit.amplitude.max(f64::MIN_POSITIVE);
        if fit.amplitude > 0.0 {
            worst = worst.max((fit2.amplitude - 2.0 * fit.amplitude).abs() / (2.0 * scale));
        } else {
            worst = worst.max(fit2.amplitude);
        }
    }
    out.push(outcome(
        Property::Linearity,
        worst <= LINEARITY_TOL,
        format!("relative deviation from 2x response {worst:.3e}"),
    ));
    Ok(out)
}

/// Runs the suite on `opts.cases` random cases in parallel.
pub fn run_verification(opts: &VerifyOptions, cfg: &IntegrationConfig) -> VerifyReport {
    let cases = random_cases(opts.cases, opts.seed);
    VerifyReport {
        cases: cases.par_iter().map(|c| verify_case(c, cfg, opts.fault)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cases_are_well_posed_and_seeded() {
        let a = random_cases(12, 7);
        assert_eq!(a, random_cases(12, 7));
        assert_ne!(a, random_cases(12, 8));
        for c in &a {
            assert!((0.02..=1.0).contains(&c.damping_ratio));
            assert!((0.5..=2.0).contains(&c.frequency_ratio));
            let s = &c.system;
            assert!(s.inertia[0][1].abs() < s.inertia[0][0]);
            assert!(s.damping[0][1].abs() < s.damping[0][0]);
        }
    }

    #[test]
    fn zero_amplitude_passes_everything() {
        let mut c = random_cases(2, 1).pop().unwrap();
        c.forcing = c.forcing.scaled(0.0);
        let out = verify_case(&c, &IntegrationConfig::default(), None);
        assert!(out.passed(), "{:?}", out.properties);
    }

    #[test]
    fn flipped_damping_fails_energy_balance_only() {
        let c = random_cases(1, 3).pop().unwrap();
        let out = verify_case(&c, &IntegrationConfig::default(), Some(Fault::FlipDampingSign));
        let by = |p| out.properties.iter().find(|o| o.property == p).unwrap().passed;
        assert!(!by(Property::EnergyBalance));
        assert!(by(Property::OracleEquivalence));
        assert!(by(Property::Linearity));
    }

    #[test]
    fn wrap_to_half_open_interval() {
        assert!((wrap(3.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
        assert!((wrap(-0.5) + 0.5).abs() < 1e-15);
    }
}
