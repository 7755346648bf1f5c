use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hydro::HydroCoefficients;

/// Dry inertia and restoring stiffness of one flap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlapProperties {
    #[serde(rename = "inertia_dry_kg_m2")]
    pub inertia_dry: f64,
    #[serde(rename = "stiffness_Nm_per_rad")]
    pub stiffness: f64,
}

impl FlapProperties {
    pub fn validate(&self) -> Result<()> {
        if !(self.inertia_dry > 0.0 && self.inertia_dry.is_finite()) {
            return Err(Error::invalid(format!(
                "dry inertia must be > 0, got {}",
                self.inertia_dry
            )));
        }
        if !(self.stiffness > 0.0 && self.stiffness.is_finite()) {
            return Err(Error::invalid(format!(
                "stiffness must be > 0, got {}",
                self.stiffness
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dof {
    One,
    Two,
}

impl Dof {
    pub fn count(self) -> usize {
        match self {
            Dof::One => 1,
            Dof::Two => 2,
        }
    }
}

/// Mass, damping and stiffness of the assembled system.
///
/// Always stored 2×2; a single-DOF system only uses the `[0][0]` entries
/// and keeps the rest at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemMatrices {
    pub inertia: [[f64; 2]; 2],
    pub damping: [[f64; 2]; 2],
    pub stiffness: [f64; 2],
    pub dof: Dof,
}

impl SystemMatrices {
    pub fn dof_count(&self) -> usize {
        self.dof.count()
    }

    /// Add `extra` to every diagonal damping entry.
    pub fn with_extra_damping(mut self, extra: f64) -> Self {
        for i in 0..self.dof_count() {
            self.damping[i][i] += extra;
        }
        self
    }

    /// Undamped natural frequency of one isolated flap, sqrt(k / (I + I_a)).
    pub fn natural_frequency(&self) -> f64 {
        (self.stiffness[0] / self.inertia[0][0]).sqrt()
    }

    fn validate(&self) -> Result<()> {
        let n = self.dof_count();
        for i in 0..n {
            if !(self.inertia[i][i] > 0.0) {
                return Err(Error::invalid("total inertia must be > 0"));
            }
            if !(self.damping[i][i] > 0.0) {
                return Err(Error::invalid("diagonal damping must be > 0"));
            }
            if !(self.stiffness[i] > 0.0) {
                return Err(Error::invalid("stiffness must be > 0"));
            }
        }
        if n == 2 {
            let det = self.inertia[0][0] * self.inertia[1][1]
                - self.inertia[0][1] * self.inertia[1][0];
            if !(det > 0.0) || self.inertia[0][1] != self.inertia[1][0] {
                return Err(Error::invalid(
                    "inertia matrix must be symmetric positive definite",
                ));
            }
        }
        Ok(())
    }
}

/// Build the system matrices. `Dof::One` ignores the coupling terms.
pub fn assemble_system(
    props: &FlapProperties,
    coeffs: &HydroCoefficients,
    dof: Dof,
) -> Result<SystemMatrices> {
    props.validate()?;
    coeffs.validate()?;

    let diag_inertia = props.inertia_dry + coeffs.added_inertia;
    let c = coeffs.damping;
    let k = props.stiffness;

    let sys = match dof {
        Dof::One => SystemMatrices {
            inertia: [[diag_inertia, 0.0], [0.0, 0.0]],
            damping: [[c, 0.0], [0.0, 0.0]],
            stiffness: [k, 0.0],
            dof,
        },
        Dof::Two => {
            let mi = coeffs.coupling_inertia;
            if mi.abs() >= diag_inertia {
                return Err(Error::invalid(format!(
                    "total inertia is not positive definite: |Ia_lr| = {} >= I + Ia = {}",
                    mi.abs(),
                    diag_inertia
                )));
            }
            let cd = coeffs.coupling_damping;
            // one of the two modes would be undamped or amplifying
            if cd.abs() >= c {
                return Err(Error::invalid(format!(
                    "damping is not positive definite: |C_lr| = {} >= C = {}",
                    cd.abs(),
                    c
                )));
            }
            SystemMatrices {
                inertia: [[diag_inertia, mi], [mi, diag_inertia]],
                damping: [[c, cd], [cd, c]],
                stiffness: [k, k],
                dof,
            }
        }
    };
    sys.validate()?;
    Ok(sys)
}

/// Harmonic torque T0·sin(ωt + φ) on one flap, or a fixed flap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlapForcing {
    #[serde(rename = "amplitude_Nm")]
    pub amplitude: f64,
    #[serde(rename = "phase_rad")]
    pub phase: f64,
    pub fixed: bool,
}

impl FlapForcing {
    pub fn free(amplitude: f64, phase: f64) -> Self {
        FlapForcing {
            amplitude,
            phase,
            fixed: false,
        }
    }

    /// A flap held at θ = 0 for the whole run.
    pub fn fixed() -> Self {
        FlapForcing {
            amplitude: 0.0,
            phase: 0.0,
            fixed: true,
        }
    }

    pub fn torque_at(&self, omega: f64, t: f64) -> f64 {
        if self.fixed {
            0.0
        } else {
            self.amplitude * (omega * t + self.phase).sin()
        }
    }
}

/// Forcing on every flap of a system, sharing one angular frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcingSpec {
    #[serde(rename = "omega_rad_per_s")]
    pub omega: f64,
    pub flaps: Vec<FlapForcing>,
}

impl ForcingSpec {
    pub fn single(amplitude: f64, phase: f64, omega: f64) -> Self {
        ForcingSpec {
            omega,
            flaps: vec![FlapForcing::free(amplitude, phase)],
        }
    }

    pub fn dual(left: FlapForcing, right: FlapForcing, omega: f64) -> Self {
        ForcingSpec {
            omega,
            flaps: vec![left, right],
        }
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    /// Every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        ForcingSpec {
            omega: self.omega,
            flaps: self
                .flaps
                .iter()
                .map(|f| FlapForcing {
                    amplitude: f.amplitude * factor,
                    ..*f
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::invalid(format!(
                "angular frequency must be > 0, got {}",
                self.omega
            )));
        }
        for (i, f) in self.flaps.iter().enumerate() {
            if !(f.amplitude >= 0.0 && f.amplitude.is_finite()) || !f.phase.is_finite() {
                return Err(Error::invalid(format!(
                    "flap {i}: amplitude must be finite and >= 0, phase finite"
                )));
            }
        }
        Ok(())
    }
}

/// The system restricted to its free flaps.
#[derive(Debug, Clone)]
pub(crate) struct Reduced {
    /// Original flap index of each free row.
    pub free: Vec<usize>,
    pub inertia: [[f64; 2]; 2],
    pub inertia_inv: [[f64; 2]; 2],
    pub damping: [[f64; 2]; 2],
    pub stiffness: [f64; 2],
    pub amplitude: [f64; 2],
    pub phase: [f64; 2],
    pub omega: f64,
}

impl Reduced {
    pub fn new(system: &SystemMatrices, forcing: &ForcingSpec) -> Result<Self> {
        forcing.validate()?;
        let n = system.dof_count();
        if forcing.flaps.len() != n {
            return Err(Error::invalid(format!(
                "forcing has {} flaps but the system has {n} degrees of freedom",
                forcing.flaps.len()
            )));
        }
        let free: Vec<usize> = (0..n).filter(|&i| !forcing.flaps[i].fixed).collect();

        let mut r = Reduced {
            free: free.clone(),
            inertia: [[0.0; 2]; 2],
            inertia_inv: [[0.0; 2]; 2],
            damping: [[0.0; 2]; 2],
            stiffness: [0.0; 2],
            amplitude: [0.0; 2],
            phase: [0.0; 2],
            omega: forcing.omega,
        };
        for (a, &i) in free.iter().enumerate() {
            for (b, &j) in free.iter().enumerate() {
                r.inertia[a][b] = system.inertia[i][j];
                r.damping[a][b] = system.damping[i][j];
            }
            r.stiffness[a] = system.stiffness[i];
            r.amplitude[a] = forcing.flaps[i].amplitude;
            r.phase[a] = forcing.flaps[i].phase;
        }

        match free.len() {
            0 => {}
            1 => r.inertia_inv[0][0] = 1.0 / r.inertia[0][0],
            _ => {
                let m = &r.inertia;
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                if !(det > 0.0) {
                    return Err(Error::invalid("inertia matrix is singular"));
                }
                r.inertia_inv = [
                    [m[1][1] / det, -m[0][1] / det],
                    [-m[1][0] / det, m[0][0] / det],
                ];
            }
        }
        Ok(r)
    }

    pub fn n(&self) -> usize {
        self.free.len()
    }
}
